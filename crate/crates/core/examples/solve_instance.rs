//! Recovers a sparse vector from measurements hit by impulsive noise.
//!
//! Run with `cargo run --release --example solve_instance`.

use cmn_alm::cmn::CmnParams;
use cmn_alm::experiments::{snr_db, Instance, MatrixNorm, TrialSpec};
use cmn_alm::solver::{CmnAlm, SolverConfig};
use cmn_alm::stable_noise::StableNoiseParams;

fn main() -> cmn_alm::Result<()> {
    let inst = Instance::generate(&TrialSpec {
        n: 128,
        m: 50,
        k: 7,
        noise: StableNoiseParams::new(1.0, 1e-3)?,
        matrix_norm: MatrixNorm::UnitSpectral,
        master_seed: 3,
        trial_index: 0,
        cell: 0,
    })?;
    let problem = inst.problem(1.0)?;

    for (ps, pf, q) in [(0.0, 1.0, 1.0), (0.0, 1.0, 2.0), (0.0, 2.0, 2.0)] {
        let config = SolverConfig::default().with_cmn(CmnParams::new(ps, pf, q, 1e-2)?);
        let mut solver = CmnAlm::new(&problem, &config)?;
        // step manually to watch the residuals
        while !solver.converged() && solver.state().k < config.max_iter {
            let rec = solver.step()?;
            if rec.iter % 25 == 0 {
                println!(
                    "  ({ps},{pf},{q}) iter {:>3}: primal {:.3e} dual {:.3e} objective {:.4}",
                    rec.iter, rec.primal, rec.dual, rec.objective
                );
            }
        }
        let x_hat = &solver.state().x;
        println!("CMN({ps},{pf},{q}): SNR {:.2} dB\n", snr_db(&inst.x_true, x_hat)?);
    }
    Ok(())
}
