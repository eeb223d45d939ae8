//! Reaction pairs, delay kernels, the spatial grid and history containers.

mod grid;
mod history;
mod kernel;
mod reaction;

pub use grid::{Field, SpatialGrid};
pub use history::HistoryState;
pub use kernel::{DelayKernel, KernelShape, KernelWeights};
pub use reaction::{central_difference, ReactionKind, ReactionPair, TabulatedPair, ORIGIN_TOLERANCE};
