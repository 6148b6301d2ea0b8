//! Sparse recovery from linear measurements corrupted by impulsive
//! (symmetric α-stable) noise, using a continuous mixed norm (CMN) as the
//! data-fidelity term.
//!
//! The estimator solves
//!
//! ```text
//! min_x  ℓ((Ax − y)/σ_n) + μ‖x‖₁,    ℓ(v) = Σᵢ ∫_{p_s}^{p_f} λ(p)|vᵢ|^p dp
//! ```
//!
//! with ADMM on the split `z = (Ax − y)/σ_n` and majorize-minimize steps in
//! both blocks (see [`solver`]). The fidelity math lives in [`cmn`], the noise
//! model in [`stable_noise`], and the Monte-Carlo benchmark harness in
//! [`experiments`]. The `cmnalm` binary wraps [`cli`].
//!
//! ```
//! use cmn_alm::linalg::DenseMatrix;
//! use cmn_alm::solver::{solve_cmn_alm, Problem, SolverConfig};
//!
//! let a = DenseMatrix::identity(3).unwrap();
//! let problem = Problem::new(a, vec![0.0; 3], 1.0).unwrap();
//! let report = solve_cmn_alm(&problem, &SolverConfig::default()).unwrap();
//! assert!(report.converged);
//! ```

pub mod cli;
pub mod cmn;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod quadrature;
pub mod rng;
pub mod solver;
pub mod stable_noise;

pub use cmn::CmnParams;
pub use error::{Error, Result};
pub use linalg::DenseMatrix;
pub use solver::{solve_cmn_alm, solve_lp_admm, Problem, SolveReport, SolverConfig};
pub use stable_noise::StableNoiseParams;
