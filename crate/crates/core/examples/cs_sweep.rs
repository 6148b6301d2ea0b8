//! Mean SNR against the measurement ratio m/n.
//!
//! Run with `cargo run --release --example cs_sweep -- [alpha] [gamma] [trials]`.

use cmn_alm::experiments::{run_cs_sweep, ExperimentConfig};

fn main() -> cmn_alm::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let alpha = args.first().copied().unwrap_or(1.5);
    let gamma = args.get(1).copied().unwrap_or(1e-3);
    let mut cfg = ExperimentConfig::cs_sweep(alpha, gamma);
    cfg.trials = args.get(2).map_or(20, |t| *t as usize);

    let result = run_cs_sweep(&cfg)?;
    for v in cfg.variants.iter().map(|v| v.label.clone()).chain(cfg.baseline_p.iter().map(|p| format!("Lp-ADM(p={p})"))) {
        let curve: Vec<String> = result
            .series(&v)
            .iter()
            .map(|r| r.mean_snr_db.map_or("  fail".into(), |m| format!("{m:6.1}")))
            .collect();
        println!("{v:<16}{}", curve.join(" "));
    }
    let header: Vec<String> = cfg.grid.iter().map(|g| format!("{g:6.1}")).collect();
    println!("{:<16}{}", "m/n", header.join(" "));
    Ok(())
}
