//! Jacobi-type solvers for symmetric positive (semi)definite sparse systems
//! `Qx = b`, with Nesterov acceleration and adaptive restart.
//!
//! The accelerated iteration is `x = y + J⁻¹(b − Qy)` where `J` is a
//! diagonal or block-diagonal proximal matrix with `J − Q ⪰ 0`, so every
//! row block can be updated independently. Classic Jacobi, weighted Jacobi,
//! CG and diagonally preconditioned CG are included as baselines.

pub mod accel;
pub mod classic;
pub mod dense;
pub mod eigen;
pub mod error;
pub mod io;
pub mod parallel;
pub mod proximal;
pub mod solver;
pub mod sparse;

pub use accel::{acc_jacobi_solve, acc_jacobi_solve_observed, lyapunov_energy, AccelOptions};
pub use classic::{
    cg_solve, cg_solve_observed, jacobi_solve, optimal_weight, pcg_diag_solve,
    weighted_jacobi_solve,
};
pub use error::{Error, Result};
pub use io::{gen_consistent_rhs, gen_sdd, EdgeList, ProblemInstance};
pub use parallel::{load_imbalance, partition_rows, BlockWorkspace};
pub use proximal::{build_j_block, build_j_diag, check_s_psd, Partition, ProxKind, ProxMatrix};
pub use solver::{IterateView, SolveReport, SolveStatus, SolverConfig, TraceEntry};
pub use sparse::{objective, rel_residual, CsrMatrix};
