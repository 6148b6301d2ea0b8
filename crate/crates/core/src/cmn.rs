//! Continuous mixed norm (CMN) with a uniform mixing density.
//!
//! For a vector `v` the fidelity is `ℓ(v) = Σᵢ ∫ λ(p)·|vᵢ|^p dp` with
//! `λ = 1/(p_f − p_s)` on `[p_s, p_f]`. The majorize-minimize solver replaces
//! each `|zᵢ|^p` by the tangent bound
//! `s(z, z') = |z|^q·(p/q)·|z'|^(p−q) + (1 − p/q)·|z'|^p` (valid for `p ≤ q`),
//! which after integration over `p` yields
//!
//! ```text
//! ℓ_S(z, z') = Σᵢ |zᵢ|^q·φ(z'ᵢ) + Σᵢ ψ(z'ᵢ)
//! φ(z') = [z'^pf·(pf·ln z' − 1) − z'^ps·(ps·ln z' − 1)] / ((pf − ps)·q·z'^q·ln² z')
//! ```
//!
//! The closed form for `φ` is 0/0 at `z' = 1` and loses most of its digits
//! near it, so it is evaluated here in the equivalent form
//!
//! ```text
//! φ(z') = z'^(ps−q)/q · [ps·E(u) + w·F(u)],   L = ln z', w = pf − ps, u = w·L
//! E(u) = (eᵘ − 1)/u,   F(u) = (u·eᵘ − eᵘ + 1)/u²
//! ```
//!
//! where both bracketed terms are nonnegative, so no cancellation occurs for
//! any `z' > 0`. Small `|u|` uses the Taylor series of `F`.
//!
//! All evaluations apply the regularizing shift `z' = |z| + eps`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ranges narrower than this use the pointwise ℓp weight.
pub const DEGENERATE_WIDTH: f64 = 1e-9;

/// Below this `|u|` the series of `F` is used instead of the closed form.
const SERIES_CUTOFF: f64 = 0.5;
const SERIES_TERMS: usize = 30;

/// Norm range `[p_s, p_f]`, surrogate exponent `q` and regularizer `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmnParams {
    pub p_s: f64,
    pub p_f: f64,
    pub q: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

fn default_eps() -> f64 {
    1e-2
}

impl CmnParams {
    pub fn new(p_s: f64, p_f: f64, q: f64, eps: f64) -> Result<Self> {
        let params = Self { p_s, p_f, q, eps };
        params.validate()?;
        Ok(params)
    }

    /// Single-norm weight `p_s = p_f = p`, as used by the ℓp–ℓ1 baseline.
    pub fn single_norm(p: f64, q: f64, eps: f64) -> Result<Self> {
        Self::new(p, p, q, eps)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { p_s, p_f, q, eps } = *self;
        if ![p_s, p_f, q, eps].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("CMN parameters must be finite"));
        }
        if !(0.0 <= p_s && p_s <= p_f && p_f <= q && p_f <= 2.0) {
            return Err(Error::invalid(format!(
                "CMN parameters must satisfy 0 <= p_s <= p_f <= q and p_f <= 2 \
                 (got p_s={p_s}, p_f={p_f}, q={q})"
            )));
        }
        if p_f <= 0.0 {
            return Err(Error::invalid("p_f must be positive"));
        }
        if eps < 0.0 {
            return Err(Error::invalid(format!("eps must be nonnegative, got {eps}")));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.p_f - self.p_s
    }

    pub fn is_degenerate(&self) -> bool {
        self.width() < DEGENERATE_WIDTH
    }

    fn mid_p(&self) -> f64 {
        0.5 * (self.p_s + self.p_f)
    }
}

/// `(eᵘ − 1)/u`
fn expm1_ratio(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        u.exp_m1() / u
    }
}

/// `(u·eᵘ − eᵘ + 1)/u² = Σₖ u^k (k+1)/(k+2)!`
fn f_series(u: f64) -> f64 {
    let mut term_fact = 0.5; // 1/(k+2)! at k = 0
    let mut upow = 1.0;
    let mut acc = 0.0;
    for k in 0..SERIES_TERMS {
        acc += upow * (k as f64 + 1.0) * term_fact;
        upow *= u;
        term_fact /= k as f64 + 3.0;
    }
    acc
}

fn check_abs(z_abs: f64) -> Result<()> {
    if z_abs >= 0.0 && z_abs.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("expected a finite magnitude, got {z_abs}")))
    }
}

/// Majorizing weight `φ(|z| + eps)` for the uniform mixing density.
///
/// Returns [`Error::Singular`] when `|z| + eps = 0` and the weight diverges.
pub fn phi_weight(z_abs: f64, params: &CmnParams) -> Result<f64> {
    check_abs(z_abs)?;
    let zp = z_abs + params.eps;
    let q = params.q;

    if params.is_degenerate() {
        let p = params.mid_p();
        if zp == 0.0 {
            return if p == q { Ok(1.0) } else { Err(Error::Singular) };
        }
        return Ok((p / q) * zp.powf(p - q));
    }
    if zp == 0.0 {
        return Err(Error::Singular);
    }

    let (ps, pf, w) = (params.p_s, params.p_f, params.width());
    let l = zp.ln();
    let u = w * l;
    let low = ((ps - q) * l).exp(); // z'^(ps−q)
    let bracket = if u.abs() < SERIES_CUTOFF {
        low * (ps * expm1_ratio(u) + w * f_series(u))
    } else {
        let high = ((pf - q) * l).exp(); // z'^(pf−q)
        ps * (high - low) / u + w * (u * high - high + low) / (u * u)
    };
    Ok(bracket / q)
}

/// Weights for every coordinate of `z`.
pub fn phi_weights(z: &[f64], params: &CmnParams) -> Result<Vec<f64>> {
    z.iter().map(|v| phi_weight(v.abs(), params)).collect()
}

/// Per-coordinate mixed norm `∫ λ(p)·(|v| + eps)^p dp`.
///
/// At `|v| + eps = 0` the integrand vanishes for every `p > 0`; the value is
/// taken as 0 even when `p_s = 0`, since the single point `p = 0` has no mass.
pub fn cmn_elem(v_abs: f64, params: &CmnParams) -> f64 {
    let vp = v_abs + params.eps;
    if vp == 0.0 {
        return 0.0;
    }
    if params.is_degenerate() {
        return vp.powf(params.mid_p());
    }
    let (ps, pf, w) = (params.p_s, params.p_f, params.width());
    let l = vp.ln();
    let u = w * l;
    if u.abs() < SERIES_CUTOFF {
        (ps * l).exp() * expm1_ratio(u)
    } else {
        ((pf * l).exp() - (ps * l).exp()) / u
    }
}

/// `ℓ(v) = Σᵢ ∫ λ(p)·(|vᵢ| + eps)^p dp`
pub fn cmn_value(v: &[f64], params: &CmnParams) -> f64 {
    v.iter().map(|x| cmn_elem(x.abs(), params)).sum()
}

/// Constant part `ψ(z')` of the surrogate, fixed by tangency at `z = z'`.
pub fn psi_term(z_ref_abs: f64, params: &CmnParams) -> Result<f64> {
    let phi = phi_weight(z_ref_abs, params)?;
    let zp = z_ref_abs + params.eps;
    Ok(cmn_elem(z_ref_abs, params) - zp.powf(params.q) * phi)
}

/// Surrogate `ℓ_S(z, z_ref)` in the shifted variable `|z| + eps`.
///
/// With `eps = 0` this is exactly `Σ |zᵢ|^q φ(z_refᵢ) + Σ ψ(z_refᵢ)`; with
/// `eps > 0` it majorizes the regularized norm returned by [`cmn_value`] and
/// touches it at `z = z_ref`.
pub fn surrogate_value(z: &[f64], z_ref: &[f64], params: &CmnParams) -> Result<f64> {
    Error::check_len("surrogate reference", z.len(), z_ref.len())?;
    let q = params.q;
    let mut total = 0.0;
    for (zi, ri) in z.iter().zip(z_ref) {
        let phi = phi_weight(ri.abs(), params)?;
        let psi = psi_term(ri.abs(), params)?;
        total += (zi.abs() + params.eps).powf(q) * phi + psi;
    }
    Ok(total)
}
