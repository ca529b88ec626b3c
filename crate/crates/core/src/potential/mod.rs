//! Exact electrical-network and killed-kernel computations on finite graphs.

mod green;
mod killed;
mod nash;
mod resistance;

pub use green::{
    green_kernel, green_kernel_with, GreenEntry, GreenOptions, PairResistance, PotentialReport,
};
pub use killed::{killed_densities, KilledKernelTrace, KilledPropagator};
pub use nash::{nash_williams_cutsum, CutSumRow, NashWilliamsReport};
pub use resistance::{effective_resistance, tree_resistance_to_boundary, Resistance};

/// Interior systems above this size are solved by conjugate gradients.
pub const DIRECT_SOLVE_LIMIT: usize = 200_000;
/// Largest accepted max-norm residual of any linear solve.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
