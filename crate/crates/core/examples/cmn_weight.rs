//! Majorizer weights and mixed-norm values, checked against quadrature.
//!
//! Run with `cargo run --example cmn_weight`.

use cmn_alm::cmn::{cmn_value, phi_weight, surrogate_value, CmnParams};
use cmn_alm::quadrature::phi_weight_oracle;

fn main() -> cmn_alm::Result<()> {
    for (ps, pf, q) in [(0.0, 1.0, 1.0), (0.0, 1.0, 2.0), (0.0, 2.0, 2.0), (1.0, 1.0, 1.0)] {
        let params = CmnParams::new(ps, pf, q, 0.0)?;
        println!("range [{ps}, {pf}], q = {q}");
        println!("  {:>10}  {:>14}  {:>14}", "z'", "phi", "quadrature");
        for z in [1e-3, 0.1, 0.999_999, 1.0, 2.0, 50.0] {
            let w = phi_weight(z, &params)?;
            let oracle = phi_weight_oracle(z, &params)?;
            println!("  {z:>10.6}  {w:>14.8e}  {oracle:>14.8e}");
        }
    }

    // The surrogate built at z_ref lies above the fidelity and touches it at z_ref.
    let params = CmnParams::new(0.0, 1.0, 1.0, 1e-2)?;
    let z_ref = [0.4, -1.5, 0.0];
    for z in [[0.4, -1.5, 0.0], [0.0, 0.0, 0.0], [2.0, 1.0, -0.3]] {
        println!(
            "z = {z:?}: fidelity {:.6}, surrogate {:.6}",
            cmn_value(&z, &params),
            surrogate_value(&z, &z_ref, &params)?
        );
    }
    Ok(())
}
