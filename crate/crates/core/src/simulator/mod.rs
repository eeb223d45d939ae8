//! Method-of-lines integration of the delayed reaction-diffusion equation,
//! companion comparison ODEs and run diagnostics.

mod companion;
mod config;
mod init;
mod monitor;
mod pde;
mod tridiag;

pub use companion::{simulate_companion, simulate_scalar, CompanionKind, ScalarTrajectory};
pub use config::SolverConfig;
pub use init::{HistoryTable, InitialHistory};
pub use monitor::{
    comparison_monitor, comparison_tolerance, fluctuation_diagnostics, ComparisonVerdict, FluctuationEstimate, Side,
    Violation, MIN_SPANS,
};
pub use pde::{
    run, simulate, RunOptions, Simulator, Snapshot, TrajectoryRecord, CONVERGENCE_EPS, POSITIVITY_FLOOR,
    STEP_LIPSCHITZ_LIMIT,
};
pub use tridiag::Tridiagonal;
