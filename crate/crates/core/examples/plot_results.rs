//! Runs a small preference experiment and writes the chart as SVG.
//!
//! Run with `cargo run --release --example plot_results -- [out.svg]`.

use cmn_alm::cli::plot::{group_series, render_svg, PlotSpec};
use cmn_alm::experiments::{run_experiment, ExperimentConfig, BASELINE_LABEL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "preference.svg".into());
    let mut cfg = ExperimentConfig::preference(1.5, 1e-4);
    cfg.trials = 10;
    let result = run_experiment(&cfg, None)?;

    let spec = PlotSpec {
        x_label: "p".into(),
        log_x: false,
        highlight: Some("CMN(0,1,1)".into()),
        baseline: Some(BASELINE_LABEL.into()),
    };
    std::fs::write(&out, render_svg(&group_series(&result.rows), &spec))?;
    println!("wrote {out}");
    Ok(())
}
