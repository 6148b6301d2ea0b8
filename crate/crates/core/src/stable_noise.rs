//! Symmetric α-stable noise and its generalized-Gaussian approximation.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Open01};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Parameters of SαS(α, β = 0, γ, δ = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableNoiseParams {
    pub alpha: f64,
    pub gamma: f64,
}

impl StableNoiseParams {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        let p = Self { alpha, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::invalid(format!(
                "stability index must lie in (0, 2], got {}",
                self.alpha
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!(
                "scale must be positive, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// One unit-scale SαS draw by the Chambers–Mallows–Stuck transform.
pub fn standard_sas<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    let v = PI * (u - 0.5);
    if alpha == 1.0 {
        return v.tan();
    }
    let e: f64 = Open01.sample(rng);
    let w = -e.ln();
    let a = alpha;
    (a * v).sin() / v.cos().powf(1.0 / a) * ((v - a * v).cos() / w).powf((1.0 - a) / a)
}

/// `count` i.i.d. SαS draws from the given generator.
pub fn sample_sas_with<R: Rng + ?Sized>(
    params: &StableNoiseParams,
    count: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    params.validate()?;
    Ok((0..count)
        .map(|_| params.gamma * standard_sas(params.alpha, rng))
        .collect())
}

/// `count` i.i.d. SαS draws, deterministic in `seed`.
pub fn sample_sas(params: &StableNoiseParams, count: usize, seed: u64) -> Result<Vec<f64>> {
    sample_sas_with(params, count, &mut stream_rng(seed, 0))
}

/// Generalized Gaussian density `α/(2σΓ(1/α))·exp(−|x|^α/σ^α)`.
pub fn ggd_pdf(x: f64, alpha: f64, sigma_n: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(sigma_n > 0.0) {
        return Err(Error::invalid("ggd_pdf requires alpha > 0 and sigma_n > 0"));
    }
    let norm = alpha / (2.0 * sigma_n * gamma(1.0 / alpha));
    Ok(norm * (-(x.abs() / sigma_n).powf(alpha)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    #[test]
    fn rejects_bad_params() {
        assert!(StableNoiseParams::new(0.0, 1.0).is_err());
        assert!(StableNoiseParams::new(2.1, 1.0).is_err());
        assert!(StableNoiseParams::new(1.0, 0.0).is_err());
        let bad = StableNoiseParams {
            alpha: 3.0,
            gamma: 1.0,
        };
        assert!(sample_sas(&bad, 4, 0).is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        let p = StableNoiseParams::new(1.5, 0.1).unwrap();
        let a = sample_sas(&p, 100, 42).unwrap();
        let b = sample_sas(&p, 100, 42).unwrap();
        let c = sample_sas(&p, 100, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(sample_sas(&p, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn gamma_is_pure_scale() {
        for alpha in [0.5, 1.0, 1.5, 2.0] {
            let base = sample_sas(&StableNoiseParams::new(alpha, 1.0).unwrap(), 500, 3).unwrap();
            let scaled = sample_sas(&StableNoiseParams::new(alpha, 7.5).unwrap(), 500, 3).unwrap();
            for (b, s) in base.iter().zip(&scaled) {
                assert!((7.5 * b - s).abs() <= 1e-14 * s.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn ggd_pdf_examples() {
        let v = ggd_pdf(0.0, 2.0, 1.0).unwrap();
        assert!((v - 1.0 / PI.sqrt()).abs() < 1e-14);
        assert!((v - 0.564190).abs() < 1e-6);
        assert!((ggd_pdf(0.0, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        for x in [0.3, 1.7, 12.0] {
            assert_eq!(ggd_pdf(x, 1.3, 0.7).unwrap(), ggd_pdf(-x, 1.3, 0.7).unwrap());
        }
        assert!(ggd_pdf(0.0, 0.0, 1.0).is_err());
        assert!(ggd_pdf(0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn ggd_pdf_integrates_to_one() {
        for alpha in [0.5, 1.0, 1.5, 2.0] {
            for sigma in [1.0, 0.3] {
                // split at zero where the density has a cusp for alpha <= 1
                let f = |x: f64| ggd_pdf(x, alpha, sigma).unwrap();
                let half = integrate(f, 0.0, 50.0 * sigma, 1e-12).unwrap();
                let other = integrate(f, -50.0 * sigma, 0.0, 1e-12).unwrap();
                let total = half + other;
                assert!(
                    (total - (1.0 - tail_mass(alpha))).abs() < 1e-6,
                    "alpha={alpha}: {total}"
                );
                if alpha >= 1.0 {
                    assert!((total - 1.0).abs() < 1e-6);
                }
            }
        }
    }

    /// Mass beyond ±50σ: Γ(1/α, 50^α)/Γ(1/α), closed form for the tested α.
    fn tail_mass(alpha: f64) -> f64 {
        let x = 50f64.powf(alpha);
        match alpha {
            // Γ(2, x) = e^{−x}(1 + x)
            a if a == 0.5 => (-x).exp() * (1.0 + x),
            // Γ(1, x) = e^{−x}
            a if a == 1.0 => (-x).exp(),
            _ => 0.0,
        }
    }

    /// Two-sample Kolmogorov–Smirnov statistic.
    fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / na - j as f64 / nb).abs());
        }
        d
    }

    #[test]
    fn independent_seeds_pass_ks() {
        let n = 100_000;
        // c(1e-3) = sqrt(-ln(1e-3 / 2) / 2)
        let crit = (-(1e-3f64 / 2.0).ln() / 2.0).sqrt() * (2.0 / n as f64).sqrt();
        for alpha in [0.5, 1.0, 1.5, 2.0] {
            let p = StableNoiseParams::new(alpha, 1.0).unwrap();
            let a = sample_sas(&p, n, 1).unwrap();
            let b = sample_sas(&p, n, 2).unwrap();
            let d = ks_statistic(a, b);
            assert!(d < crit, "alpha={alpha}: D={d} crit={crit}");
        }
    }
}
