//! Heuristic and evolutionary solvers.
//!
//! All search budgets are measured in objective evaluations: every simulation
//! of a (tour, plan) pair counts as one call, no matter which solver asked.
//! That makes runs comparable across algorithms. Each stochastic solver is a
//! pure function of `(instance, config)`; the seed in [`SolverConfig`] drives
//! a ChaCha8 generator and identical configs give identical runs.
//!
//! * [`nearest_neighbor_tour`] and [`two_opt`] are weight-free tour
//!   heuristics; they never consume evaluations.
//! * [`greedy_packing`] packs a fixed tour by repeatedly adding the item with
//!   the best exact marginal objective gain.
//! * [`decomposed_pipeline`] chains the three: it solves the tour as if there
//!   were no items and then packs for that tour. This is the "solve the
//!   parts separately" baseline that coupled instances are designed to beat.
//! * [`joint_ea`] evolves (tour, plan) pairs together.
//! * [`cooperative_coevolution`] evolves a tour species and a plan species in
//!   alternation; individuals are scored by collaborating with members of
//!   the other species.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::evaluate::{repair_packing, Evaluation, Evaluator, PackingPlan, Tour};
use crate::instance::TtpInstance;
use crate::oracle::Solution;

/// Shared configuration for the search solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub seed: u64,
    /// Maximum number of objective evaluations.
    pub eval_budget: u64,
    pub population_size: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    /// Probability that an offspring tour receives a segment reversal.
    pub mutation_rate_tour: f64,
    /// Per-item flip probability for offspring plans.
    pub mutation_rate_item: f64,
    /// Individuals copied unchanged into the next generation.
    pub elitism: usize,
    /// Random collaborators per fitness evaluation in coevolution, in
    /// addition to the best individual of the other species.
    pub collaborators_random: usize,
}

impl SolverConfig {
    /// Default configuration: population 50, tournament 3, crossover 0.9,
    /// tour mutation 0.3, per-item flip `2/m`, elitism 1, 2 random
    /// collaborators, budget 100000.
    #[must_use]
    pub fn defaults(seed: u64, num_items: usize) -> SolverConfig {
        SolverConfig {
            seed,
            eval_budget: 100_000,
            population_size: 50,
            tournament_size: 3,
            crossover_rate: 0.9,
            mutation_rate_tour: 0.3,
            mutation_rate_item: if num_items > 0 {
                (2.0 / num_items as f64).min(1.0)
            } else {
                0.0
            },
            elitism: 1,
            collaborators_random: 2,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let mut problems = Vec::new();
        if self.eval_budget == 0 {
            problems.push("eval_budget must be positive");
        }
        if self.population_size < 2 {
            problems.push("population_size must be at least 2");
        }
        if self.tournament_size == 0 {
            problems.push("tournament_size must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            problems.push("crossover_rate must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate_tour) {
            problems.push("mutation_rate_tour must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate_item) {
            problems.push("mutation_rate_item must be in [0, 1]");
        }
        if self.elitism >= self.population_size {
            problems.push("elitism must be smaller than population_size");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(SolverError::Config(problems.join("; ")))
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver config: {0}")]
    Config(String),
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best: Solution,
    pub evals_used: u64,
    /// `(evaluations consumed, best objective so far)` at every improvement.
    /// The objective column is non-decreasing.
    pub history: Vec<(u64, f64)>,
}

/// Budget accounting plus incumbent tracking shared by the search solvers.
struct Trace<'a, 'i> {
    ev: &'a Evaluator<'i>,
    budget: u64,
    used: u64,
    best: Option<(Vec<usize>, Vec<bool>, Evaluation)>,
    history: Vec<(u64, f64)>,
}

impl<'a, 'i> Trace<'a, 'i> {
    fn new(ev: &'a Evaluator<'i>, budget: u64) -> Trace<'a, 'i> {
        Trace { ev, budget, used: 0, best: None, history: Vec::new() }
    }

    fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    /// One budgeted objective call. `None` once the budget is spent.
    fn eval(&mut self, order: &[usize], selected: &[bool]) -> Option<Evaluation> {
        if self.used >= self.budget {
            return None;
        }
        self.used += 1;
        let eval = self.ev.evaluate_raw(order, selected);
        let improves = match &self.best {
            None => true,
            Some((_, _, incumbent)) => eval.objective > incumbent.objective,
        };
        if improves {
            self.best = Some((order.to_vec(), selected.to_vec(), eval));
            self.history.push((self.used, eval.objective));
        }
        Some(eval)
    }

    fn into_result(self) -> RunResult {
        let (order, selected, eval) = self.best.expect("positive budget implies one evaluation");
        RunResult {
            best: Solution {
                tour: Tour { order },
                plan: PackingPlan { selected },
                eval,
            },
            evals_used: self.used,
            history: self.history,
        }
    }
}

/// Greedy nearest-neighbor construction from the depot. Ties go to the
/// lowest city index. Consumes no objective evaluations.
#[must_use]
pub fn nearest_neighbor_tour(inst: &TtpInstance) -> Tour {
    let n = inst.num_cities();
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n + 1];
    order.push(1);
    visited[1] = true;
    let mut current = 1;
    for _ in 1..n {
        let mut next: Option<(usize, f64)> = None;
        for city in 2..=n {
            if visited[city] {
                continue;
            }
            let d = inst.distance_unchecked(current, city);
            if next.is_none_or(|(_, best)| d < best) {
                next = Some((city, d));
            }
        }
        let (city, _) = next.expect("unvisited city remains");
        order.push(city);
        visited[city] = true;
        current = city;
    }
    Tour { order }
}

const TWO_OPT_EPS: f64 = 1e-9;

/// Best-improvement 2-opt on the weight-free tour length. City 1 stays
/// first; reversals apply until no move shortens the tour. Consumes no
/// objective evaluations.
pub fn two_opt(inst: &TtpInstance, tour: &Tour) -> Result<Tour, crate::evaluate::EvalError> {
    crate::evaluate::tour_length(inst, tour)?; // validates the tour
    let mut order = tour.order.clone();
    let n = order.len();
    loop {
        let mut best_delta = -TWO_OPT_EPS;
        let mut best_move: Option<(usize, usize)> = None;
        for i in 1..n {
            for j in i + 1..n {
                let a = order[i - 1];
                let b = order[i];
                let c = order[j];
                let e = order[(j + 1) % n];
                let delta = inst.distance_unchecked(a, c) + inst.distance_unchecked(b, e)
                    - inst.distance_unchecked(a, b)
                    - inst.distance_unchecked(c, e);
                if delta < best_delta {
                    best_delta = delta;
                    best_move = Some((i, j));
                }
            }
        }
        match best_move {
            Some((i, j)) => order[i..=j].reverse(),
            None => break,
        }
    }
    Ok(Tour { order })
}

/// Greedy packing loop shared by the public wrapper and the pipeline. Adds
/// the feasible item with the largest positive exact marginal gain until no
/// item helps or `eval` reports budget exhaustion. Ties go to the lowest
/// item index.
fn greedy_pack(
    inst: &TtpInstance,
    order: &[usize],
    mut eval: impl FnMut(&[usize], &[bool]) -> Option<Evaluation>,
) -> (Vec<bool>, Option<Evaluation>) {
    let m = inst.num_items();
    let capacity = inst.speed.capacity;
    let mut selected = vec![false; m];
    let Some(mut current) = eval(order, &selected) else {
        return (selected, None);
    };
    let mut weight = 0.0;
    loop {
        let mut best: Option<(usize, Evaluation)> = None;
        let mut out_of_budget = false;
        for i in 0..m {
            if selected[i] || weight + inst.items[i].weight > capacity {
                continue;
            }
            selected[i] = true;
            match eval(order, &selected) {
                Some(candidate) => {
                    selected[i] = false;
                    let gain = candidate.objective - current.objective;
                    if gain > 0.0
                        && best
                            .as_ref()
                            .is_none_or(|(_, b)| candidate.objective > b.objective)
                    {
                        best = Some((i, candidate));
                    }
                }
                None => {
                    selected[i] = false;
                    out_of_budget = true;
                    break;
                }
            }
        }
        match best {
            Some((i, eval)) => {
                selected[i] = true;
                weight += inst.items[i].weight;
                current = eval;
                if out_of_budget {
                    break;
                }
            }
            None => break,
        }
    }
    (selected, Some(current))
}

/// Greedy packing for a fixed tour, unbudgeted.
pub fn greedy_packing(
    inst: &TtpInstance,
    tour: &Tour,
) -> Result<PackingPlan, crate::evaluate::EvalError> {
    let ev = Evaluator::new(inst);
    // Validate once up front; the greedy loop then uses the raw path.
    ev.evaluate(tour, &PackingPlan::empty(inst.num_items()))?;
    let (selected, _) = greedy_pack(inst, &tour.order, |o, s| Some(ev.evaluate_raw(o, s)));
    Ok(PackingPlan { selected })
}

/// The decomposition baseline: nearest-neighbor plus 2-opt for the tour
/// (ignoring items entirely), then greedy packing for that fixed tour.
///
/// Only `eval_budget` is read from the config; the tour phase is evaluation-
/// free, so the budget caps the packing phase.
pub fn decomposed_pipeline(
    inst: &TtpInstance,
    cfg: &SolverConfig,
) -> Result<RunResult, SolverError> {
    cfg.validate()?;
    let tour = two_opt(inst, &nearest_neighbor_tour(inst)).expect("constructed tour is valid");
    let ev = Evaluator::new(inst);
    let mut trace = Trace::new(&ev, cfg.eval_budget);
    let (selected, final_eval) = greedy_pack(inst, &tour.order, |o, s| trace.eval(o, s));
    let eval = final_eval.expect("positive budget implies one evaluation");
    debug_assert_eq!(
        eval.objective,
        trace.best.as_ref().map(|(_, _, e)| e.objective).unwrap(),
        "greedy result must be the best evaluation seen"
    );
    Ok(RunResult {
        best: Solution { tour, plan: PackingPlan { selected }, eval },
        evals_used: trace.used,
        history: trace.history,
    })
}

fn random_tour_order(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut rest: Vec<usize> = (2..=n).collect();
    rest.shuffle(rng);
    let mut order = Vec::with_capacity(n);
    order.push(1);
    order.extend(rest);
    order
}

fn random_repaired_plan(inst: &TtpInstance, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let selected = (0..inst.num_items()).map(|_| rng.gen_bool(0.5)).collect();
    repair_packing(inst, &PackingPlan { selected }).selected
}

/// Order crossover on the non-depot segment: the child keeps a random slice
/// of `p1` in place and fills the rest with the remaining cities in `p2`
/// order, wrapping after the slice.
fn order_crossover(p1: &[usize], p2: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = p1.len();
    let l = n - 1;
    if l < 2 {
        return p1.to_vec();
    }
    let mut a = rng.gen_range(0..l);
    let mut b = rng.gen_range(0..l);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut child = vec![0usize; n];
    let mut used = vec![false; n + 1];
    child[0] = 1;
    used[1] = true;
    for pos in a..=b {
        let city = p1[1 + pos];
        child[1 + pos] = city;
        used[city] = true;
    }
    let mut write = (b + 1) % l;
    for offset in 0..l {
        let city = p2[1 + (b + 1 + offset) % l];
        if !used[city] {
            child[1 + write] = city;
            used[city] = true;
            write = (write + 1) % l;
        }
    }
    child
}

fn uniform_crossover(p1: &[bool], p2: &[bool], rng: &mut ChaCha8Rng) -> Vec<bool> {
    p1.iter()
        .zip(p2)
        .map(|(&a, &b)| if rng.gen_bool(0.5) { a } else { b })
        .collect()
}

/// Reverses a random non-depot segment in place.
fn reverse_random_segment(order: &mut [usize], rng: &mut ChaCha8Rng) {
    let n = order.len();
    if n < 4 {
        // Fewer than 3 movable cities: every reversal is a no-op or a swap
        // of the only pair.
        if n == 3 {
            order.swap(1, 2);
        }
        return;
    }
    let i = rng.gen_range(1..n);
    let j = loop {
        let j = rng.gen_range(1..n);
        if j != i {
            break j;
        }
    };
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    order[lo..=hi].reverse();
}

fn tournament_pick<T>(pop: &[T], fitness: impl Fn(&T) -> f64, size: usize, rng: &mut ChaCha8Rng) -> usize {
    let mut best = rng.gen_range(0..pop.len());
    for _ in 1..size {
        let challenger = rng.gen_range(0..pop.len());
        if fitness(&pop[challenger]) > fitness(&pop[best]) {
            best = challenger;
        }
    }
    best
}

/// Indices of the `count` fittest individuals, ties toward lower index.
fn elite_indices(fitness: &[f64], count: usize) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..fitness.len()).collect();
    indices.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
    indices.truncate(count);
    indices
}

#[derive(Clone)]
struct JointIndividual {
    order: Vec<usize>,
    selected: Vec<bool>,
    fitness: f64,
}

/// Joint evolutionary algorithm over complete (tour, plan) genomes.
///
/// Generational with elitism and tournament selection. Crossover applies
/// order crossover to the tour and uniform crossover to the plan; mutation is
/// a segment reversal plus per-item flips followed by repair, so every
/// individual that is ever evaluated is feasible.
pub fn joint_ea(inst: &TtpInstance, cfg: &SolverConfig) -> Result<RunResult, SolverError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ev = Evaluator::new(inst);
    let mut trace = Trace::new(&ev, cfg.eval_budget);

    let mut population: Vec<JointIndividual> = Vec::with_capacity(cfg.population_size);
    let nn = nearest_neighbor_tour(inst);
    for i in 0..cfg.population_size {
        let order = if i == 0 {
            nn.order.clone()
        } else {
            random_tour_order(inst.num_cities(), &mut rng)
        };
        let selected = random_repaired_plan(inst, &mut rng);
        let Some(eval) = trace.eval(&order, &selected) else {
            break;
        };
        population.push(JointIndividual { order, selected, fitness: eval.objective });
    }

    'outer: while !trace.exhausted() && !population.is_empty() {
        let fitness: Vec<f64> = population.iter().map(|ind| ind.fitness).collect();
        let mut next: Vec<JointIndividual> = elite_indices(&fitness, cfg.elitism)
            .into_iter()
            .map(|i| population[i].clone())
            .collect();
        while next.len() < cfg.population_size {
            if trace.exhausted() {
                break 'outer;
            }
            let p1 = tournament_pick(&population, |ind| ind.fitness, cfg.tournament_size, &mut rng);
            let p2 = tournament_pick(&population, |ind| ind.fitness, cfg.tournament_size, &mut rng);
            let (mut order, mut selected) = if rng.gen_bool(cfg.crossover_rate) {
                (
                    order_crossover(&population[p1].order, &population[p2].order, &mut rng),
                    uniform_crossover(&population[p1].selected, &population[p2].selected, &mut rng),
                )
            } else {
                (population[p1].order.clone(), population[p1].selected.clone())
            };
            if cfg.mutation_rate_tour > 0.0 && rng.gen_bool(cfg.mutation_rate_tour) {
                reverse_random_segment(&mut order, &mut rng);
            }
            if cfg.mutation_rate_item > 0.0 {
                for bit in selected.iter_mut() {
                    if rng.gen_bool(cfg.mutation_rate_item) {
                        *bit = !*bit;
                    }
                }
            }
            let selected = repair_packing(inst, &PackingPlan { selected }).selected;
            let Some(eval) = trace.eval(&order, &selected) else {
                break 'outer;
            };
            next.push(JointIndividual { order, selected, fitness: eval.objective });
        }
        population = next;
    }

    Ok(trace.into_result())
}

#[derive(Clone)]
struct SpeciesIndividual<G> {
    genome: G,
    fitness: f64,
}

/// Two-species cooperative coevolution: a tour population and a plan
/// population evolve in alternating generations. An individual's fitness is
/// the maximum objective over pairings with the best individual of the other
/// species from the previous generation plus `collaborators_random` random
/// ones. The returned solution is the best complete pairing ever evaluated.
pub fn cooperative_coevolution(
    inst: &TtpInstance,
    cfg: &SolverConfig,
) -> Result<RunResult, SolverError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ev = Evaluator::new(inst);
    let mut trace = Trace::new(&ev, cfg.eval_budget);
    let pop_size = cfg.population_size;

    let nn = nearest_neighbor_tour(inst);
    let mut tours: Vec<SpeciesIndividual<Vec<usize>>> = (0..pop_size)
        .map(|i| SpeciesIndividual {
            genome: if i == 0 {
                nn.order.clone()
            } else {
                random_tour_order(inst.num_cities(), &mut rng)
            },
            fitness: f64::NEG_INFINITY,
        })
        .collect();
    let mut plans: Vec<SpeciesIndividual<Vec<bool>>> = (0..pop_size)
        .map(|_| SpeciesIndividual {
            genome: random_repaired_plan(inst, &mut rng),
            fitness: f64::NEG_INFINITY,
        })
        .collect();

    // Bootstrap fitness by pairing the populations index to index; later
    // generations collaborate with the best of the previous generation.
    for i in 0..pop_size {
        let Some(eval) = trace.eval(&tours[i].genome, &plans[i].genome) else {
            break;
        };
        tours[i].fitness = eval.objective;
        plans[i].fitness = eval.objective;
    }

    'outer: while !trace.exhausted() {
        // Tour generation against the frozen plan species.
        {
            let best_plan =
                plans[elite_indices(&plans.iter().map(|p| p.fitness).collect::<Vec<_>>(), 1)[0]]
                    .genome
                    .clone();
            let fitness: Vec<f64> = tours.iter().map(|t| t.fitness).collect();
            let mut next: Vec<SpeciesIndividual<Vec<usize>>> = elite_indices(&fitness, cfg.elitism)
                .into_iter()
                .map(|i| tours[i].clone())
                .collect();
            while next.len() < pop_size {
                if trace.exhausted() {
                    break 'outer;
                }
                let p1 = tournament_pick(&tours, |t| t.fitness, cfg.tournament_size, &mut rng);
                let p2 = tournament_pick(&tours, |t| t.fitness, cfg.tournament_size, &mut rng);
                let mut order = if rng.gen_bool(cfg.crossover_rate) {
                    order_crossover(&tours[p1].genome, &tours[p2].genome, &mut rng)
                } else {
                    tours[p1].genome.clone()
                };
                if cfg.mutation_rate_tour > 0.0 && rng.gen_bool(cfg.mutation_rate_tour) {
                    reverse_random_segment(&mut order, &mut rng);
                }
                let mut fitness = f64::NEG_INFINITY;
                let mut evaluated = false;
                for c in 0..=cfg.collaborators_random {
                    let partner = if c == 0 {
                        &best_plan
                    } else {
                        &plans[rng.gen_range(0..pop_size)].genome
                    };
                    let Some(eval) = trace.eval(&order, partner) else {
                        break;
                    };
                    evaluated = true;
                    if eval.objective > fitness {
                        fitness = eval.objective;
                    }
                }
                if !evaluated {
                    break 'outer;
                }
                next.push(SpeciesIndividual { genome: order, fitness });
            }
            tours = next;
        }
        if trace.exhausted() {
            break;
        }
        // Plan generation against the frozen tour species.
        {
            let best_tour =
                tours[elite_indices(&tours.iter().map(|t| t.fitness).collect::<Vec<_>>(), 1)[0]]
                    .genome
                    .clone();
            let fitness: Vec<f64> = plans.iter().map(|p| p.fitness).collect();
            let mut next: Vec<SpeciesIndividual<Vec<bool>>> = elite_indices(&fitness, cfg.elitism)
                .into_iter()
                .map(|i| plans[i].clone())
                .collect();
            while next.len() < pop_size {
                if trace.exhausted() {
                    break 'outer;
                }
                let p1 = tournament_pick(&plans, |p| p.fitness, cfg.tournament_size, &mut rng);
                let p2 = tournament_pick(&plans, |p| p.fitness, cfg.tournament_size, &mut rng);
                let mut selected = if rng.gen_bool(cfg.crossover_rate) {
                    uniform_crossover(&plans[p1].genome, &plans[p2].genome, &mut rng)
                } else {
                    plans[p1].genome.clone()
                };
                if cfg.mutation_rate_item > 0.0 {
                    for bit in selected.iter_mut() {
                        if rng.gen_bool(cfg.mutation_rate_item) {
                            *bit = !*bit;
                        }
                    }
                }
                let selected = repair_packing(inst, &PackingPlan { selected }).selected;
                let mut fitness = f64::NEG_INFINITY;
                let mut evaluated = false;
                for c in 0..=cfg.collaborators_random {
                    let partner = if c == 0 {
                        &best_tour
                    } else {
                        &tours[rng.gen_range(0..pop_size)].genome
                    };
                    let Some(eval) = trace.eval(partner, &selected) else {
                        break;
                    };
                    evaluated = true;
                    if eval.objective > fitness {
                        fitness = eval.objective;
                    }
                }
                if !evaluated {
                    break 'outer;
                }
                next.push(SpeciesIndividual { genome: selected, fitness });
            }
            plans = next;
        }
    }

    Ok(trace.into_result())
}
