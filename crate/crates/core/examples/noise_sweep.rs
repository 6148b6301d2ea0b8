//! Mean SNR against the noise scale gamma.
//!
//! Run with `cargo run --release --example noise_sweep -- [alpha] [trials]`.

use cmn_alm::experiments::{run_noise_sweep, ExperimentConfig};

fn main() -> cmn_alm::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let alpha = args.first().copied().unwrap_or(0.5);
    let mut cfg = ExperimentConfig::noise_sweep(alpha);
    cfg.trials = args.get(1).map_or(20, |t| *t as usize);

    let result = run_noise_sweep(&cfg)?;
    let labels: Vec<String> = result.rows.iter().map(|r| r.variant.clone()).fold(Vec::new(), |mut v, l| {
        if !v.contains(&l) {
            v.push(l);
        }
        v
    });
    print!("{:>8}", "gamma");
    for l in &labels {
        print!("  {l:>14}");
    }
    println!();
    for g in &cfg.grid {
        print!("{g:>8.0e}");
        for l in &labels {
            print!("  {:>14.2}", result.mean(l, *g).unwrap_or(f64::NAN));
        }
        println!();
    }
    Ok(())
}
