//! Simulation and stability analysis of reaction-diffusion equations with
//! distributed delay
//!
//! ```text
//! u_t - D u_xx = -f(u) + ∫₀^τ h(a) g(u(t - a)) da,   x ∈ [0, L],  u_x = 0 at both ends.
//! ```

// `!(x > 0.0)` rejects NaN along with the failing values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod error;
pub mod model;
pub mod rates;
pub mod report;
pub mod simulator;
pub mod sweep;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
