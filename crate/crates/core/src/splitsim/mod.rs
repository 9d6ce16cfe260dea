//! State-splitting apparatus: convex split, feasible solutions of `Q(η, r)`,
//! protocol simulation and the lower-bound arithmetic.

pub mod bounds;
pub mod convex_split;
pub mod feasible;
pub mod oracle;
pub mod protocol;

pub use bounds::{min_expected_log_product, ordered_factorizations, simple_lower_bound, LogProductMinimum};
pub use convex_split::{
    convex_split_build, convex_split_certificate, typ_zero_cap, ConvexSplitInstance, ConvexSplitResult,
};
pub use feasible::{
    baseline_solution, validate_feasible_solution, Assignment, FeasibleSolution, ValidationReport, Violation,
};
pub use oracle::q_oracle_grid;
pub use protocol::{exact_expected_cost, simulate_one_way_protocol, Branch, CostRecord, SimulationReport};
