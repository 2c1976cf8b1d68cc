//! Objective evaluation for (tour, packing) pairs.
//!
//! The simulation walks the tour legs in order, closing back to city 1. On
//! arrival at a city the thief picks up every selected item located there, so
//! the added weight slows down the *departing* leg, never the arriving one.
//! Leg time is `distance / speed(current weight)` with the linear
//! [`SpeedModel`](crate::instance::SpeedModel).
//!
//! The objective is `B = P - r * T`. A plan whose total weight exceeds the
//! capacity gets `B = -inf` as an infeasibility sentinel; its profit and time
//! are still reported for diagnostics, with the weight capped at the capacity
//! inside the speed function so the simulation stays defined.

use thiserror::Error;

use crate::instance::{SpeedModel, TtpInstance};

/// A closed tour. `order` is a permutation of `1..=n` starting at the depot;
/// the return leg to city 1 is implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    pub order: Vec<usize>,
}

impl Tour {
    /// Validates that `order` is a permutation of `1..=n` starting at 1.
    pub fn new(order: Vec<usize>, n: usize) -> Result<Tour, EvalError> {
        check_tour(&order, n)?;
        Ok(Tour { order })
    }

    /// The tour `1, 2, ..., n`.
    #[must_use]
    pub fn identity(n: usize) -> Tour {
        Tour { order: (1..=n).collect() }
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.order.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// An item selection. `selected[i]` refers to the item with 1-based index
/// `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingPlan {
    pub selected: Vec<bool>,
}

impl PackingPlan {
    /// The empty plan for `m` items.
    #[must_use]
    pub fn empty(m: usize) -> PackingPlan {
        PackingPlan { selected: vec![false; m] }
    }

    /// The plan selecting all `m` items.
    #[must_use]
    pub fn all(m: usize) -> PackingPlan {
        PackingPlan { selected: vec![true; m] }
    }

    /// Plan for `m` items selecting the given 1-based item indices.
    pub fn from_taken(m: usize, taken: &[usize]) -> Result<PackingPlan, EvalError> {
        let mut selected = vec![false; m];
        for &index in taken {
            if index == 0 || index > m {
                return Err(EvalError::ItemIndexOutOfRange { index, m });
            }
            selected[index - 1] = true;
        }
        Ok(PackingPlan { selected })
    }

    /// 1-based indices of the selected items, ascending.
    #[must_use]
    pub fn taken(&self) -> Vec<usize> {
        self.selected
            .iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i + 1))
            .collect()
    }

    #[must_use]
    pub fn num_selected(&self) -> usize {
        self.selected.iter().filter(|&&s| s).count()
    }

    #[must_use]
    pub fn is_none_selected(&self) -> bool {
        self.selected.iter().all(|&s| !s)
    }
}

/// The result of simulating one (tour, plan) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub feasible: bool,
    pub total_weight: f64,
    /// Sum of selected profits `P`.
    pub profit: f64,
    /// Total travel time `T`.
    pub time: f64,
    /// `P - r * T`, or `-inf` when the plan is over capacity.
    pub objective: f64,
}

/// Errors from malformed tours, plans, or speed queries.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("weight {w} outside the speed model domain [0, {capacity}]")]
    SpeedDomain { w: f64, capacity: f64 },
    #[error("tour has {got} cities, instance has {expected}")]
    TourLength { expected: usize, got: usize },
    #[error("tour must start at city 1, found {0}")]
    TourStart(usize),
    #[error("tour is not a permutation: {0}")]
    TourNotPermutation(String),
    #[error("plan covers {got} items, instance has {expected}")]
    PlanLength { expected: usize, got: usize },
    #[error("item index {index} out of range 1..={m}")]
    ItemIndexOutOfRange { index: usize, m: usize },
}

/// Speed at carried weight `w`: `v_max - w * (v_max - v_min) / capacity`.
///
/// Fails if `w` is outside `[0, capacity]`.
pub fn speed(model: &SpeedModel, w: f64) -> Result<f64, EvalError> {
    if !(w >= 0.0 && w <= model.capacity) {
        return Err(EvalError::SpeedDomain { w, capacity: model.capacity });
    }
    Ok(speed_at(model, w))
}

/// Unchecked speed; callers guarantee `0 <= w <= capacity`. The `w == 0`
/// short-circuit keeps degenerate zero-capacity models defined.
#[inline]
pub(crate) fn speed_at(model: &SpeedModel, w: f64) -> f64 {
    if w <= 0.0 {
        model.v_max
    } else {
        model.v_max - w * (model.v_max - model.v_min) / model.capacity
    }
}

fn check_tour(order: &[usize], n: usize) -> Result<(), EvalError> {
    if order.len() != n {
        return Err(EvalError::TourLength { expected: n, got: order.len() });
    }
    if n == 0 {
        return Err(EvalError::TourLength { expected: 1, got: 0 });
    }
    if order[0] != 1 {
        return Err(EvalError::TourStart(order[0]));
    }
    let mut seen = vec![false; n + 1];
    for &city in order {
        if city == 0 || city > n {
            return Err(EvalError::TourNotPermutation(format!(
                "city {city} out of range 1..={n}"
            )));
        }
        if seen[city] {
            return Err(EvalError::TourNotPermutation(format!("city {city} repeated")));
        }
        seen[city] = true;
    }
    Ok(())
}

/// Reusable evaluation context for one instance.
///
/// Construction indexes items by city and caches the distance matrix for
/// all but very large instances, so that repeated evaluation inside a solver
/// costs `O(n + m)` per call. [`objective`] is the validating one-shot
/// convenience wrapper.
pub struct Evaluator<'a> {
    inst: &'a TtpInstance,
    items_by_city: Vec<Vec<usize>>,
    dist: Option<Vec<f64>>,
}

const DIST_CACHE_MAX_CITIES: usize = 1024;

impl<'a> Evaluator<'a> {
    #[must_use]
    pub fn new(inst: &'a TtpInstance) -> Evaluator<'a> {
        let n = inst.num_cities();
        let mut items_by_city = vec![Vec::new(); n];
        for (idx, item) in inst.items.iter().enumerate() {
            if item.city >= 1 && item.city <= n {
                items_by_city[item.city - 1].push(idx);
            }
        }
        let dist = (n <= DIST_CACHE_MAX_CITIES).then(|| {
            let mut table = vec![0.0; n * n];
            for j in 1..=n {
                for k in 1..=n {
                    table[(j - 1) * n + (k - 1)] = inst.distance_unchecked(j, k);
                }
            }
            table
        });
        Evaluator { inst, items_by_city, dist }
    }

    #[must_use]
    pub fn instance(&self) -> &TtpInstance {
        self.inst
    }

    #[inline]
    fn leg(&self, j: usize, k: usize) -> f64 {
        match &self.dist {
            Some(table) => table[(j - 1) * self.inst.num_cities() + (k - 1)],
            None => self.inst.distance_unchecked(j, k),
        }
    }

    /// Validating evaluation of a (tour, plan) pair.
    pub fn evaluate(&self, tour: &Tour, plan: &PackingPlan) -> Result<Evaluation, EvalError> {
        check_tour(&tour.order, self.inst.num_cities())?;
        if plan.selected.len() != self.inst.num_items() {
            return Err(EvalError::PlanLength {
                expected: self.inst.num_items(),
                got: plan.selected.len(),
            });
        }
        Ok(self.evaluate_raw(&tour.order, &plan.selected))
    }

    /// Evaluation without shape checks, for solver hot loops. `order` must be
    /// a permutation of `1..=n` starting at 1 and `selected` must have one
    /// entry per item.
    #[must_use]
    pub fn evaluate_raw(&self, order: &[usize], selected: &[bool]) -> Evaluation {
        debug_assert!(check_tour(order, self.inst.num_cities()).is_ok());
        debug_assert_eq!(selected.len(), self.inst.num_items());

        let inst = self.inst;
        let capacity = inst.speed.capacity;

        let mut total_weight = 0.0;
        for (idx, item) in inst.items.iter().enumerate() {
            if selected[idx] {
                total_weight += item.weight;
            }
        }
        let feasible = total_weight <= capacity;

        let n = order.len();
        let mut weight = 0.0;
        let mut profit = 0.0;
        let mut time = 0.0;
        for pos in 0..n {
            let from = order[pos];
            let to = order[(pos + 1) % n];
            let carried = if weight > capacity { capacity } else { weight };
            time += self.leg(from, to) / speed_at(&inst.speed, carried);
            for &idx in &self.items_by_city[to - 1] {
                if selected[idx] {
                    weight += inst.items[idx].weight;
                    profit += inst.items[idx].profit;
                }
            }
        }

        let objective = if feasible { profit - inst.rent * time } else { f64::NEG_INFINITY };
        Evaluation { feasible, total_weight, profit, time, objective }
    }
}

/// Simulates `(tour, plan)` on `inst` and returns the full [`Evaluation`].
///
/// Validates shapes first; malformed tours or plans are errors, while plans
/// over capacity evaluate to the `-inf` sentinel. For repeated evaluation
/// build one [`Evaluator`] instead.
pub fn objective(
    inst: &TtpInstance,
    tour: &Tour,
    plan: &PackingPlan,
) -> Result<Evaluation, EvalError> {
    Evaluator::new(inst).evaluate(tour, plan)
}

/// Weight-free closed length of a tour.
pub fn tour_length(inst: &TtpInstance, tour: &Tour) -> Result<f64, EvalError> {
    check_tour(&tour.order, inst.num_cities())?;
    Ok(tour_length_raw(inst, &tour.order))
}

pub(crate) fn tour_length_raw(inst: &TtpInstance, order: &[usize]) -> f64 {
    let n = order.len();
    let mut length = 0.0;
    for pos in 0..n {
        length += inst.distance_unchecked(order[pos], order[(pos + 1) % n]);
    }
    length
}

/// Trims an over-capacity plan back to feasibility.
///
/// Within-capacity plans are returned unchanged. Otherwise items are removed
/// in ascending profit/weight ratio (ties: higher index first) until the plan
/// fits, then a final greedy pass re-adds removed items that still fit, in
/// descending ratio (ties: lower index first). The result is always a
/// feasible subset of the input plan.
///
/// # Panics
///
/// Panics if the plan length does not match the instance item count.
#[must_use]
pub fn repair_packing(inst: &TtpInstance, plan: &PackingPlan) -> PackingPlan {
    assert_eq!(
        plan.selected.len(),
        inst.num_items(),
        "plan length must match instance item count"
    );
    let capacity = inst.speed.capacity;
    let mut selected = plan.selected.clone();
    let mut total: f64 = inst
        .items
        .iter()
        .enumerate()
        .filter(|(idx, _)| selected[*idx])
        .map(|(_, it)| it.weight)
        .sum();
    if total <= capacity {
        return PackingPlan { selected };
    }

    let ratio = |idx: usize| inst.items[idx].profit / inst.items[idx].weight;
    let mut by_ratio: Vec<usize> =
        (0..selected.len()).filter(|&idx| selected[idx]).collect();
    by_ratio.sort_by(|&a, &b| {
        ratio(a).total_cmp(&ratio(b)).then(b.cmp(&a)) // ascending ratio, higher index first
    });

    let mut removed = Vec::new();
    for &idx in &by_ratio {
        if total <= capacity {
            break;
        }
        selected[idx] = false;
        total -= inst.items[idx].weight;
        removed.push(idx);
    }
    // `removed` is in (ratio asc, index desc) order, so the reverse walk
    // re-adds by descending ratio with lower indices first.
    for &idx in removed.iter().rev() {
        if total + inst.items[idx].weight <= capacity {
            selected[idx] = true;
            total += inst.items[idx].weight;
        }
    }
    PackingPlan { selected }
}
