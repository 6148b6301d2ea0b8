//! The single-norm baseline across p, next to the (0, 1, 1) mixture.
//!
//! Run with `cargo run --release --example lp_baseline`.

use cmn_alm::experiments::{snr_db, Instance, MatrixNorm, TrialSpec};
use cmn_alm::solver::{solve_cmn_alm, solve_lp_admm, SolverConfig};
use cmn_alm::stable_noise::StableNoiseParams;

fn main() -> cmn_alm::Result<()> {
    let trials = 10;
    let config = SolverConfig::default();
    let instances = (0..trials)
        .map(|t| {
            Instance::generate(&TrialSpec {
                n: 128,
                m: 50,
                k: 7,
                noise: StableNoiseParams::new(0.5, 1e-3)?,
                matrix_norm: MatrixNorm::UnitSpectral,
                master_seed: 1,
                trial_index: t,
                cell: 0,
            })
        })
        .collect::<cmn_alm::Result<Vec<_>>>()?;

    let mean_snr = |solve: &dyn Fn(&Instance) -> cmn_alm::Result<Vec<f64>>| -> cmn_alm::Result<f64> {
        let mut total = 0.0;
        for inst in &instances {
            total += snr_db(&inst.x_true, &solve(inst)?)?;
        }
        Ok(total / trials as f64)
    };

    let cmn = mean_snr(&|i| Ok(solve_cmn_alm(&i.problem(1.0)?, &config)?.x_hat))?;
    println!("alpha = 0.5, gamma = 1e-3, {trials} trials");
    println!("{:<15} {cmn:7.2} dB", "CMN(0,1,1)");
    for p in [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0] {
        let lp = mean_snr(&|i| Ok(solve_lp_admm(&i.problem(1.0)?, p, &config)?.x_hat))?;
        println!("{:<15} {lp:7.2} dB", format!("Lp-ADM(p={p})"));
    }
    Ok(())
}
