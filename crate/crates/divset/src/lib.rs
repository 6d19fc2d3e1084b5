//! Diverse solution sets for monotone set-function maximization.
//!
//! The pipeline has two stages. Greedy construction ([`greedy::dgs`] for
//! uniform budgets, [`greedy::gdgs`] for knapsack budgets) builds a
//! high-value core and fills the reserved margin with random completions,
//! giving a population whose members all inherit the core's approximation
//! guarantee. Evolutionary refinement ([`evo::divea`]) then maximizes the
//! population's element entropy while treating that quality level as a hard
//! floor.
//!
//! Benchmark objectives (vertex coverage, influence spread under independent
//! cascade, and a bitcount baseline) live in [`problems`]; exhaustive
//! reference oracles and bound checks for small instances live in
//! [`oracle`]; seeded experiment grids and their CSV/JSON reporting live in
//! [`bench`].

pub mod bench;
pub mod core;
pub mod diversity;
pub mod error;
pub mod evo;
pub mod greedy;
pub mod oracle;
pub mod problems;

pub use self::core::{value_at_least, ConstraintKind, CostModel, Objective, Population, Solution};
pub use self::diversity::{
    dgs_entropy_upper_bound, entropy, entropy_of_counts, entropy_without, onemax_max_entropy,
    EntropyState,
};
pub use self::error::{Error, Result};
pub use self::evo::{divea, mutate, DiveaConfig, DiveaResult};
pub use self::greedy::{
    binomial, dgs, dgs_solution_count_bound, gdgs, gdgs_solution_count_bound, GreedyTrace,
};
