//! A toolkit for the traveling thief problem (TTP).
//!
//! A TTP instance couples a tour over `n` cities with a knapsack over `m`
//! items scattered across those cities. The thief starts and ends at city 1,
//! picks up items on arrival, and slows down linearly with carried weight.
//! For rent rate `r`, collected profit `P`, and total travel time `T`, the
//! objective is
//!
//! ```text
//! B = P - r * T
//! ```
//!
//! The two sub-problems interact through the weight-dependent speed: which
//! items are worth stealing depends on the tour, and the best tour depends on
//! which items will be carried. This crate makes that interaction measurable.
//!
//! The crate is organized as follows:
//!
//! * [`instance`] — problem data model, text file format, validation, and a
//!   seeded random instance generator.
//! * [`evaluate`] — the objective simulation for (tour, packing) pairs, the
//!   speed model, and packing repair.
//! * [`oracle`] — exact solvers by bounded enumeration: full TTP, the
//!   knapsack alone, and the tour alone.
//! * [`solvers`] — constructive heuristics, a decomposed pipeline baseline, a
//!   joint evolutionary algorithm, and two-species cooperative coevolution.
//! * [`analysis`] — a conditional-optimum dependency probe and parameter
//!   sweeps that map out when the problem decomposes.
//! * [`cli`] — the `ttp` command-line interface.
//!
//! # Example
//!
//! ```
//! use ttp::{objective, parse_instance, PackingPlan, Tour};
//!
//! let text = "\
//! PROBLEM NAME: sample3
//! DIMENSION: 3
//! NUMBER OF ITEMS: 2
//! CAPACITY OF KNAPSACK: 5
//! MIN SPEED: 0.1
//! MAX SPEED: 1.0
//! RENTING RATIO: 1.0
//! EDGE_WEIGHT_TYPE: EUC_2D
//! NODE_COORD_SECTION (INDEX, X, Y):
//! 1 0 0
//! 2 3 0
//! 3 3 4
//! ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):
//! 1 100 3 2
//! 2 40 2 3
//! ";
//! let inst = parse_instance(text)?;
//! let tour = Tour::new(vec![1, 2, 3], inst.num_cities())?;
//! let plan = PackingPlan::all(inst.num_items());
//! let eval = objective(&inst, &tour, &plan)?;
//! assert!(eval.feasible);
//! assert!((eval.objective - (140.0 - eval.time)).abs() < 1e-9);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod evaluate;
pub mod instance;
pub mod oracle;
pub mod solvers;

pub use analysis::{
    capacity_sensitivity, dependency_test, rent_sweep, slope_sweep, AnalysisError,
    DependencyReport, Direction, SweepParameter, SweepPoint, SweepResult,
};
pub use evaluate::{
    objective, repair_packing, speed, tour_length, EvalError, Evaluation, Evaluator, PackingPlan,
    Tour,
};
pub use instance::{
    generate_instance, parse_instance, serialize_instance, validate_instance, City,
    GeneratorConfig, InstanceError, Item, KpClass, Rounding, SpeedModel, TtpInstance,
};
pub use oracle::{solve_exact_kp, solve_exact_tsp, solve_exact_ttp, OracleError, OracleLimits, Solution};
pub use solvers::{
    cooperative_coevolution, decomposed_pipeline, greedy_packing, joint_ea, nearest_neighbor_tour,
    two_opt, RunResult, SolverConfig, SolverError,
};

#[cfg(test)]
pub(crate) mod testutil {
    use crate::instance::{parse_instance, TtpInstance};

    /// Three cities on a 3-4-5 right triangle with one item each at the two
    /// non-depot cities. Small enough to check every quantity by hand.
    pub const SAMPLE3: &str = "\
PROBLEM NAME: sample3
DIMENSION: 3
NUMBER OF ITEMS: 2
CAPACITY OF KNAPSACK: 5
MIN SPEED: 0.1
MAX SPEED: 1.0
RENTING RATIO: 1.0
EDGE_WEIGHT_TYPE: EUC_2D
NODE_COORD_SECTION (INDEX, X, Y):
1 0 0
2 3 0
3 3 4
ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):
1 100 3 2
2 40 2 3
";

    pub fn sample3() -> TtpInstance {
        parse_instance(SAMPLE3).expect("sample3 fixture parses")
    }
}
