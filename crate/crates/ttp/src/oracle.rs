//! Exact solvers by bounded enumeration.
//!
//! These oracles are ground truth for everything else in the crate: solver
//! quality is measured against [`solve_exact_ttp`], and the analysis module
//! compares full solutions against the component optima from
//! [`solve_exact_kp`] and [`solve_exact_tsp`].
//!
//! Enumerating `(n-1)! * 2^m` pairs is only tractable for small instances, so
//! every entry point takes [`OracleLimits`] and refuses anything larger. The
//! refusal is an error naming the exceeded bound, never an approximation:
//! raising the limits is how a caller knowingly accepts the cost.
//!
//! Ties are broken deterministically. The full oracle prefers the
//! lexicographically smallest tour order and then the smallest plan read as a
//! binary number with item 1 as the least significant bit; the component
//! oracles use the matching rule for their side.

use itertools::Itertools;
use thiserror::Error;

use crate::evaluate::{Evaluation, Evaluator, PackingPlan, Tour};
use crate::instance::{Item, TtpInstance};

/// Enumeration size bounds. Defaults keep the oracle under a second for most
/// instances; larger values are accepted but the cost grows factorially.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_cities: usize,
    pub max_items: usize,
}

impl Default for OracleLimits {
    fn default() -> OracleLimits {
        OracleLimits { max_cities: 9, max_items: 14 }
    }
}

/// A fully evaluated (tour, plan) pair. The stored evaluation is exactly what
/// [`objective`](crate::evaluate::objective) returns for the pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub tour: Tour,
    pub plan: PackingPlan,
    pub eval: Evaluation,
}

/// Refusals when an instance exceeds the enumeration limits.
#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance has {n} cities, exceeding the oracle limit of {max}")]
    TooManyCities { n: usize, max: usize },
    #[error("instance has {m} items, exceeding the oracle limit of {max}")]
    TooManyItems { m: usize, max: usize },
}

/// Every capacity-feasible plan, ascending by plan number (item 1 = bit 0).
/// Always contains at least the empty plan.
fn feasible_plans(items: &[Item], capacity: f64) -> Vec<Vec<bool>> {
    let m = items.len();
    let mut plans = Vec::new();
    for mask in 0u64..(1u64 << m) {
        let mut weight = 0.0;
        for (idx, item) in items.iter().enumerate() {
            if mask >> idx & 1 == 1 {
                weight += item.weight;
            }
        }
        if weight <= capacity {
            plans.push((0..m).map(|idx| mask >> idx & 1 == 1).collect());
        }
    }
    plans
}

/// Iterates all tours in lexicographic order, calling `visit` with the order
/// buffer. `n >= 2`.
fn for_each_tour(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut order = vec![1; n];
    if n == 1 {
        visit(&order);
        return;
    }
    for perm in (2..=n).permutations(n - 1) {
        order[1..].copy_from_slice(&perm);
        visit(&order);
    }
}

/// Exact TTP optimum by full enumeration of tours and feasible plans.
///
/// Ties are broken toward the lexicographically smallest tour order, then the
/// smallest plan number. Runtime is `O((n-1)! * 2^m * n)`.
pub fn solve_exact_ttp(
    inst: &TtpInstance,
    limits: &OracleLimits,
) -> Result<Solution, OracleError> {
    let n = inst.num_cities();
    let m = inst.num_items();
    if n > limits.max_cities {
        return Err(OracleError::TooManyCities { n, max: limits.max_cities });
    }
    if m > limits.max_items {
        return Err(OracleError::TooManyItems { m, max: limits.max_items });
    }

    let ev = Evaluator::new(inst);
    let plans = feasible_plans(&inst.items, inst.speed.capacity);

    let mut best: Option<(Vec<usize>, usize, Evaluation)> = None;
    // Tour-major, plan-minor iteration with strict improvement implements the
    // tie-break: the first candidate attaining the maximum wins.
    for_each_tour(n, |order| {
        for (plan_idx, selected) in plans.iter().enumerate() {
            let eval = ev.evaluate_raw(order, selected);
            let improves = match &best {
                None => true,
                Some((_, _, incumbent)) => eval.objective > incumbent.objective,
            };
            if improves {
                best = Some((order.to_vec(), plan_idx, eval));
            }
        }
    });

    let (order, plan_idx, eval) = best.expect("at least one tour and the empty plan exist");
    Ok(Solution {
        tour: Tour { order },
        plan: PackingPlan { selected: plans[plan_idx].clone() },
        eval,
    })
}

/// Exact knapsack optimum: maximize total profit subject to the capacity.
///
/// Uses dynamic programming over integer weights when all weights are
/// integral (no item count limit), and falls back to subset enumeration
/// bounded by `limits.max_items` otherwise. Ties are broken toward the
/// smallest plan number, which means high-index items are excluded first.
pub fn solve_exact_kp(
    items: &[Item],
    capacity: f64,
    limits: &OracleLimits,
) -> Result<PackingPlan, OracleError> {
    let m = items.len();
    let integral = items.iter().all(|it| it.weight.fract() == 0.0 && it.weight >= 1.0);
    if integral {
        let total: f64 = items.iter().map(|it| it.weight).sum();
        let cap = capacity.min(total).max(0.0).floor() as usize;
        if m.saturating_mul(cap + 1) <= 200_000_000 {
            return Ok(kp_dynamic_program(items, cap));
        }
    }
    if m > limits.max_items {
        return Err(OracleError::TooManyItems { m, max: limits.max_items });
    }
    Ok(kp_enumerate(items, capacity))
}

fn kp_dynamic_program(items: &[Item], cap: usize) -> PackingPlan {
    let m = items.len();
    let mut dp = vec![0.0f64; cap + 1];
    let mut keep = vec![false; m * (cap + 1)];
    for (i, item) in items.iter().enumerate() {
        let w = item.weight as usize;
        if w > cap {
            continue;
        }
        for c in (w..=cap).rev() {
            let candidate = dp[c - w] + item.profit;
            if candidate > dp[c] {
                dp[c] = candidate;
                keep[i * (cap + 1) + c] = true;
            }
        }
    }
    // Walking from the highest index excludes items whenever the optimum is
    // attainable without them, yielding the smallest plan number.
    let mut selected = vec![false; m];
    let mut c = cap;
    for i in (0..m).rev() {
        if keep[i * (cap + 1) + c] {
            selected[i] = true;
            c -= items[i].weight as usize;
        }
    }
    PackingPlan { selected }
}

fn kp_enumerate(items: &[Item], capacity: f64) -> PackingPlan {
    let m = items.len();
    let mut best_profit = f64::NEG_INFINITY;
    let mut best_mask = 0u64;
    for mask in 0u64..(1u64 << m) {
        let mut weight = 0.0;
        let mut profit = 0.0;
        for (idx, item) in items.iter().enumerate() {
            if mask >> idx & 1 == 1 {
                weight += item.weight;
                profit += item.profit;
            }
        }
        if weight <= capacity && profit > best_profit {
            best_profit = profit;
            best_mask = mask;
        }
    }
    PackingPlan { selected: (0..m).map(|idx| best_mask >> idx & 1 == 1).collect() }
}

/// Exact directed TSP optimum: the closed tour of minimum weight-free length.
///
/// Ties are broken toward the lexicographically smallest tour order.
pub fn solve_exact_tsp(inst: &TtpInstance, limits: &OracleLimits) -> Result<Tour, OracleError> {
    let n = inst.num_cities();
    if n > limits.max_cities {
        return Err(OracleError::TooManyCities { n, max: limits.max_cities });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for_each_tour(n, |order| {
        let length = crate::evaluate::tour_length_raw(inst, order);
        let improves = match &best {
            None => true,
            Some((_, incumbent)) => length < *incumbent,
        };
        if improves {
            best = Some((order.to_vec(), length));
        }
    });
    let (order, _) = best.expect("at least one tour exists");
    Ok(Tour { order })
}
