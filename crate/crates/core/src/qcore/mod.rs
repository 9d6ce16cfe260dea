//! Dense states over small Hilbert spaces and the information measures on them.

pub mod haar;
pub mod linalg;
pub mod measures;
pub mod state;

pub use measures::{
    binary_entropy, cqmi, dmax, dmax_pure, fidelity, mutual_information, partial_trace,
    pure_fidelity, purified_distance, reduced_pure, relative_entropy, spectrum_entropy,
    von_neumann_entropy,
};
pub use state::{DensityOperator, Ensemble, HilbertDim, PureState, Register};
