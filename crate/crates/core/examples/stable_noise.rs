//! Symmetric alpha-stable noise: sample quantiles against the
//! generalized-Gaussian density used as its approximation.
//!
//! Run with `cargo run --release --example stable_noise`.

use cmn_alm::stable_noise::{ggd_pdf, sample_sas, StableNoiseParams};

fn main() -> cmn_alm::Result<()> {
    let n = 200_000;
    for alpha in [0.5, 1.0, 1.5, 2.0] {
        let params = StableNoiseParams::new(alpha, 1.0)?;
        let mut draws = sample_sas(&params, n, 42)?;
        draws.sort_by(f64::total_cmp);
        let q = |p: f64| draws[((n - 1) as f64 * p) as usize];
        let outliers = draws.iter().filter(|x| x.abs() > 10.0).count();
        println!(
            "alpha={alpha:<4} quartiles ({:+.3}, {:+.3}, {:+.3})  1%/99% ({:+.2e}, {:+.2e})  |x|>10: {:.3}%  ggd(0) = {:.4}",
            q(0.25),
            q(0.5),
            q(0.75),
            q(0.01),
            q(0.99),
            100.0 * outliers as f64 / n as f64,
            ggd_pdf(0.0, alpha, 1.0)?
        );
    }
    Ok(())
}
