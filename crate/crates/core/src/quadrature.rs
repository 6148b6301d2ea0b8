//! Adaptive Gauss–Kronrod quadrature.
//!
//! Used as an independent numerical route to the closed-form weight and
//! norm expressions in [`crate::cmn`]; nothing in the solver path calls it.

use crate::cmn::CmnParams;
use crate::error::{Error, Result};

const MAX_PANELS: usize = 5000;

// 15-point Kronrod nodes on [-1, 1] (nonnegative half) with the embedded
// 7-point Gauss weights.
const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Integrates `f` over `[a, b]`, repeatedly bisecting the panel with the
/// largest Kronrod–Gauss error estimate until the summed estimate is below
/// `abs_tol` or the rounding level of the result.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    // (lo, hi, value, error)
    let mut panels = vec![{
        let (v, e) = gk15(&f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..MAX_PANELS {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::invalid("quadrature: non-finite integrand"));
        }
        if err <= abs_tol.max(64.0 * f64::EPSILON * total.abs()) {
            return Ok(total);
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(lo < mid && mid < hi) {
            return Err(Error::invalid("quadrature did not converge"));
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
    Err(Error::invalid("quadrature did not converge"))
}

/// Quadrature value of the uniform-mixture weight
/// `∫ (1/(p_f − p_s))·(p/q)·z'^(p−q) dp` over `[p_s, p_f]`, `z' = z_abs + eps`.
///
/// The degenerate range collapses to the pointwise integrand.
pub fn phi_weight_oracle(z_abs: f64, params: &CmnParams) -> Result<f64> {
    let zp = z_abs + params.eps;
    if !(zp > 0.0) {
        return Err(Error::invalid("oracle requires |z| + eps > 0"));
    }
    let (ps, pf, q) = (params.p_s, params.p_f, params.q);
    let integrand = |p: f64| (p / q) * zp.powf(p - q);
    if pf == ps {
        return Ok(integrand(ps));
    }
    let width = pf - ps;
    integrate(|p| integrand(p) / width, ps, pf, 1e-12)
}

/// Quadrature value of the per-coordinate mixed norm `∫ λ(p)·v'^p dp`.
pub fn cmn_elem_oracle(v_abs: f64, params: &CmnParams) -> Result<f64> {
    let vp = v_abs + params.eps;
    let (ps, pf) = (params.p_s, params.p_f);
    if pf == ps {
        return Ok(vp.powf(ps));
    }
    integrate(|p| vp.powf(p) / (pf - ps), ps, pf, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-14).unwrap();
        assert!((v - 8.0).abs() < 1e-13);
    }

    #[test]
    fn exponential_integral() {
        let v = integrate(f64::exp, 0.0, 1.0, 1e-14).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn oracle_at_unit_argument() {
        let p = CmnParams::new(0.3, 1.7, 2.0, 0.0).unwrap();
        let v = phi_weight_oracle(1.0, &p).unwrap();
        assert!((v - (0.3 + 1.7) / 4.0).abs() < 1e-13);
    }

    #[test]
    fn oracle_shrinking_interval_approaches_pointwise_weight() {
        let p = CmnParams::new(0.8, 0.8 + 1e-7, 2.0, 0.0).unwrap();
        let v = phi_weight_oracle(3.0, &p).unwrap();
        let pointwise = (0.8 / 2.0) * 3.0f64.powf(0.8 - 2.0);
        assert!((v - pointwise).abs() / pointwise < 1e-6);
    }

    #[test]
    fn oracle_rejects_zero_argument() {
        let p = CmnParams::new(0.0, 1.0, 1.0, 0.0).unwrap();
        assert!(phi_weight_oracle(0.0, &p).is_err());
    }
}
