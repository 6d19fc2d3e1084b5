//! Ground-set elements, candidate solutions, populations, the objective
//! trait, and the constraint model shared by every algorithm in the crate.

use crate::error::{Error, Result};

/// Relative tolerance for feasibility comparisons on non-integral costs.
const COST_REL_TOL: f64 = 1e-9;

/// A candidate solution: a subset of the ground set `{0, .., n-1}`.
///
/// Members are kept sorted and unique. Evaluations and costs can be cached on
/// the solution; any membership change invalidates both caches. Equality and
/// hashing consider only the member set, never the caches.
#[derive(Clone, Debug, Default)]
pub struct Solution {
    members: Vec<usize>,
    cached_value: Option<f64>,
    cached_cost: Option<f64>,
}

impl Solution {
    pub fn new() -> Self {
        Solution::default()
    }

    /// Builds a solution from arbitrary element indices, deduplicating.
    pub fn from_elements(elements: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = elements.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Solution {
            members,
            cached_value: None,
            cached_cost: None,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, element: usize) -> bool {
        self.members.binary_search(&element).is_ok()
    }

    /// Inserts an element; returns false if it was already present.
    pub fn insert(&mut self, element: usize) -> bool {
        match self.members.binary_search(&element) {
            Ok(_) => false,
            Err(pos) => {
                self.members.insert(pos, element);
                self.invalidate();
                true
            }
        }
    }

    /// Removes an element; returns false if it was absent.
    pub fn remove(&mut self, element: usize) -> bool {
        match self.members.binary_search(&element) {
            Ok(pos) => {
                self.members.remove(pos);
                self.invalidate();
                true
            }
            Err(_) => false,
        }
    }

    /// Flips membership of an element.
    pub fn toggle(&mut self, element: usize) {
        if !self.insert(element) {
            self.remove(element);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn value(&self) -> Option<f64> {
        self.cached_value
    }

    pub fn set_value(&mut self, value: f64) {
        self.cached_value = Some(value);
    }

    pub fn cost(&self) -> Option<f64> {
        self.cached_cost
    }

    pub fn set_cost(&mut self, cost: f64) {
        self.cached_cost = Some(cost);
    }

    fn invalidate(&mut self) {
        self.cached_value = None;
        self.cached_cost = None;
    }
}

impl PartialEq for Solution {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for Solution {}

impl std::hash::Hash for Solution {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.members.hash(state);
    }
}

impl FromIterator<usize> for Solution {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Solution::from_elements(iter)
    }
}

/// A multiset of solutions over a common ground set, with per-element
/// occurrence counts maintained incrementally.
///
/// `counts[e]` always equals the number of stored solutions containing `e`;
/// this is recounted in debug builds after every mutation.
#[derive(Clone, Debug)]
pub struct Population {
    n: usize,
    solutions: Vec<Solution>,
    counts: Vec<u32>,
}

impl Population {
    pub fn new(n: usize) -> Self {
        Population {
            n,
            solutions: Vec::new(),
            counts: vec![0; n],
        }
    }

    pub fn with_solutions(n: usize, solutions: Vec<Solution>) -> Result<Self> {
        let mut pop = Population::new(n);
        for sol in solutions {
            pop.push(sol)?;
        }
        Ok(pop)
    }

    pub fn ground_set_size(&self) -> usize {
        self.n
    }

    /// Ground-set size the population ranges over.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn push(&mut self, solution: Solution) -> Result<()> {
        if let Some(&max) = solution.as_slice().last() {
            if max >= self.n {
                return Err(Error::invalid(format!(
                    "solution references element {max} outside ground set of size {}",
                    self.n
                )));
            }
        }
        for e in solution.iter() {
            self.counts[e] += 1;
        }
        self.solutions.push(solution);
        debug_assert!(self.counts_consistent());
        Ok(())
    }

    /// Removes and returns the solution at `index`, preserving the order of
    /// the remaining solutions.
    pub fn remove(&mut self, index: usize) -> Solution {
        let sol = self.solutions.remove(index);
        for e in sol.iter() {
            self.counts[e] -= 1;
        }
        debug_assert!(self.counts_consistent());
        sol
    }

    pub fn solutions(&self) -> &[Solution] {
        &self.solutions
    }

    pub fn into_solutions(self) -> Vec<Solution> {
        self.solutions
    }

    pub fn get(&self, index: usize) -> Option<&Solution> {
        self.solutions.get(index)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn occurrence(&self, element: usize) -> u32 {
        self.counts[element]
    }

    /// Recounts occurrences from scratch and compares with the maintained
    /// counters. Used by debug assertions and audit-mode checks.
    pub fn counts_consistent(&self) -> bool {
        let mut fresh = vec![0u32; self.n];
        for sol in &self.solutions {
            for e in sol.iter() {
                fresh[e] += 1;
            }
        }
        fresh == self.counts
    }

    /// Smallest cached value across solutions; evaluates nothing itself.
    pub fn min_cached_value(&self) -> Option<f64> {
        self.solutions
            .iter()
            .map(|s| s.value())
            .collect::<Option<Vec<_>>>()
            .map(|vs| vs.into_iter().fold(f64::INFINITY, f64::min))
    }
}

/// A set-function oracle over a ground set of `n` elements.
///
/// Implementations are expected to be monotone (`f(A) <= f(B)` for
/// `A ⊆ B`) and nonnegative; algorithms in this crate assert these
/// properties where they rely on them.
pub trait Objective: Send + Sync {
    /// Ground-set size.
    fn n(&self) -> usize;

    /// Short identifier used in reports and output records.
    fn name(&self) -> &str;

    fn evaluate(&self, solution: &Solution) -> f64;

    /// True when the implementation is submodular by construction, letting
    /// callers take the submodularity ratio as exactly 1 without enumeration.
    fn certified_submodular(&self) -> bool {
        false
    }

    /// When every attainable value times this scale is an exact integer,
    /// returns the scale. Enables exact rational comparisons downstream.
    fn value_scale(&self) -> Option<u64> {
        None
    }

    /// Evaluates through the solution's cache.
    fn value_of(&self, solution: &mut Solution) -> f64 {
        match solution.value() {
            Some(v) => v,
            None => {
                let v = self.evaluate(solution);
                solution.set_value(v);
                v
            }
        }
    }
}

/// True when `value >= floor` up to float noise; exact for integer-scaled
/// objectives, where comparing rounded scaled values removes the noise term
/// entirely.
pub fn value_at_least(oracle: &dyn Objective, value: f64, floor: f64) -> bool {
    match oracle.value_scale() {
        Some(scale) => {
            let s = scale as f64;
            (value * s).round() >= (floor * s).round()
        }
        None => value >= floor - 1e-9 * floor.abs().max(1.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Uniform,
    Knapsack,
}

impl std::fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConstraintKind::Uniform => "uniform",
            ConstraintKind::Knapsack => "knapsack",
        })
    }
}

/// Constraint model: a budget `B`, a diversity margin `m <= B`, and either
/// unit costs (uniform: `|X| <= B`) or per-element costs (knapsack:
/// `c(X) <= B`).
///
/// Feasibility comparisons are exact when all costs and the budget are
/// integral (integer arithmetic is exact in f64 well past these magnitudes)
/// and use a relative tolerance of 1e-9 otherwise.
#[derive(Clone, Debug)]
pub struct CostModel {
    kind: ConstraintKind,
    budget: f64,
    margin: f64,
    item_costs: Option<Vec<f64>>,
    c_min: f64,
    c_max: f64,
    integral: bool,
}

impl CostModel {
    pub fn uniform(budget: f64, margin: f64) -> Result<Self> {
        Self::validate_budget_margin(budget, margin)?;
        if budget.fract() != 0.0 || margin.fract() != 0.0 {
            return Err(Error::invalid(
                "uniform constraints take whole-number budget and margin",
            ));
        }
        Ok(CostModel {
            kind: ConstraintKind::Uniform,
            budget,
            margin,
            item_costs: None,
            c_min: 1.0,
            c_max: 1.0,
            integral: true,
        })
    }

    pub fn knapsack(item_costs: Vec<f64>, budget: f64, margin: f64) -> Result<Self> {
        Self::validate_budget_margin(budget, margin)?;
        if item_costs.is_empty() {
            return Err(Error::invalid(
                "knapsack constraint needs at least one item cost",
            ));
        }
        let mut c_min = f64::INFINITY;
        let mut c_max = 0.0f64;
        let mut integral = budget.fract() == 0.0 && margin.fract() == 0.0;
        for (i, &c) in item_costs.iter().enumerate() {
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::invalid(format!(
                    "item cost {i} must be positive and finite, got {c}"
                )));
            }
            c_min = c_min.min(c);
            c_max = c_max.max(c);
            integral &= c.fract() == 0.0;
        }
        Ok(CostModel {
            kind: ConstraintKind::Knapsack,
            budget,
            margin,
            item_costs: Some(item_costs),
            c_min,
            c_max,
            integral,
        })
    }

    fn validate_budget_margin(budget: f64, margin: f64) -> Result<()> {
        if !(budget > 0.0) || !budget.is_finite() {
            return Err(Error::invalid(format!(
                "budget must be positive, got {budget}"
            )));
        }
        if !(0.0..=budget).contains(&margin) {
            return Err(Error::invalid(format!(
                "margin must satisfy 0 <= m <= B, got m = {margin}, B = {budget}"
            )));
        }
        Ok(())
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn item_costs(&self) -> Option<&[f64]> {
        self.item_costs.as_deref()
    }

    pub fn item_cost(&self, element: usize) -> f64 {
        match &self.item_costs {
            Some(costs) => costs[element],
            None => 1.0,
        }
    }

    /// Smallest single-item cost (1 for uniform constraints).
    pub fn c_min(&self) -> f64 {
        self.c_min
    }

    /// Largest single-item cost (1 for uniform constraints).
    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    /// Number of items the model carries costs for; None for uniform models,
    /// which apply to any ground set.
    pub fn item_count(&self) -> Option<usize> {
        self.item_costs.as_ref().map(|c| c.len())
    }

    pub fn cost(&self, solution: &Solution) -> f64 {
        match &self.item_costs {
            None => solution.len() as f64,
            Some(costs) => solution.iter().map(|e| costs[e]).sum(),
        }
    }

    /// Cost through the solution's cache.
    pub fn cost_of(&self, solution: &mut Solution) -> f64 {
        match solution.cost() {
            Some(c) => c,
            None => {
                let c = self.cost(solution);
                solution.set_cost(c);
                c
            }
        }
    }

    /// True when `cost(x) <= budget - slack` under the model's comparison
    /// semantics. `slack` reserves part of the budget (for example the
    /// diversity margin during greedy construction).
    pub fn is_feasible(&self, solution: &Solution, slack: f64) -> bool {
        debug_assert!(slack <= self.budget);
        self.fits(self.cost(solution), slack)
    }

    /// Comparison used by `is_feasible`, exposed for incremental callers that
    /// track a running cost.
    pub fn fits(&self, cost: f64, slack: f64) -> bool {
        let limit = self.budget - slack;
        if self.integral {
            cost <= limit
        } else {
            cost <= limit + COST_REL_TOL * limit.abs().max(1.0)
        }
    }
}
