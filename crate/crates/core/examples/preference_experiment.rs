//! Preference ratios of the CMN variants against the single-norm baseline
//! over a grid of p.
//!
//! Run with `cargo run --release --example preference_experiment -- [alpha] [gamma] [trials]`.

use cmn_alm::experiments::{run_preference_experiment, ExperimentConfig, BASELINE_LABEL};

fn main() -> cmn_alm::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let alpha = args.first().copied().unwrap_or(1.5);
    let gamma = args.get(1).copied().unwrap_or(1e-4);
    let mut cfg = ExperimentConfig::preference(alpha, gamma);
    cfg.trials = args.get(2).map_or(20, |t| *t as usize);

    let result = run_preference_experiment(&cfg)?;
    println!("alpha = {alpha}, gamma = {gamma}, {} trials", cfg.trials);
    println!("{:>5}  {:>10}", "p", BASELINE_LABEL);
    for p in &cfg.grid {
        println!("{p:>5}  {:>10.2}", result.mean(BASELINE_LABEL, *p).unwrap_or(f64::NAN));
    }
    for r in &result.preference {
        let snr = result.mean(&r.variant, cfg.grid[0]).unwrap_or(f64::NAN);
        println!("{:<12} {snr:7.2} dB  preference {:5.1}%", r.variant, r.ratio);
    }
    Ok(())
}
