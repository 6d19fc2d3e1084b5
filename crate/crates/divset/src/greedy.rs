//! Greedy core construction with randomized completion.
//!
//! Both algorithms build a deterministic high-value core that deliberately
//! stops short of the budget, then spend the reserved margin on uniformly
//! random completions, yielding a population of mu budget-filling solutions
//! that all inherit the core's value guarantee.

use num_bigint::BigUint;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::core::{value_at_least, ConstraintKind, CostModel, Objective, Population, Solution};
use crate::error::{Error, Result};

/// Construction record: the deterministic part of a greedy run.
#[derive(Clone, Debug)]
pub struct GreedyTrace {
    /// Seed of every completion: the greedy core `S`, or for the knapsack
    /// variant the selected starting set `T`.
    pub core_solution: Solution,
    /// Elements in the order the greedy core added them, with the marginal
    /// gain each contributed at selection time.
    pub insertion_order: Vec<(usize, f64)>,
    /// Best affordable singleton considered by the knapsack variant.
    pub best_singleton: Option<(usize, f64)>,
    /// Degeneracy markers (never errors): unusual but handled geometry.
    pub flags: Vec<String>,
}

/// Diversifying greedy sampling under a uniform constraint.
///
/// Greedily grows a core `S` by maximal marginal gain (ties to the lowest
/// index, zero gains included) until `|S| = B - m`, then emits `mu`
/// solutions, each extending `S` with `m` elements drawn uniformly without
/// replacement from the rest of the ground set.
pub fn dgs(
    oracle: &dyn Objective,
    model: &CostModel,
    mu: usize,
    seed: u64,
) -> Result<(Population, GreedyTrace)> {
    if model.kind() != ConstraintKind::Uniform {
        return Err(Error::invalid("dgs requires a uniform constraint model"));
    }
    if mu == 0 {
        return Err(Error::invalid("population size mu must be at least 1"));
    }
    let n = oracle.n();
    if n == 0 {
        return Err(Error::invalid("objective has an empty ground set"));
    }
    let b = model.budget() as usize;
    let m = model.margin() as usize;
    let mut flags = Vec::new();
    if b > n {
        flags.push("budget_exceeds_ground_set".to_string());
    }

    let mut s = Solution::new();
    let mut fs = oracle.evaluate(&s);
    let mut insertion_order = Vec::new();
    while s.len() < b.saturating_sub(m) && s.len() < n {
        let mut best: Option<(usize, f64)> = None;
        let mut probe = s.clone();
        for v in 0..n {
            if s.contains(v) {
                continue;
            }
            probe.insert(v);
            let value = oracle.evaluate(&probe);
            probe.remove(v);
            if best.is_none_or(|(_, bv)| value > bv) {
                best = Some((v, value));
            }
        }
        let (v, value) = best.expect("candidates remain while |S| < n");
        s.insert(v);
        insertion_order.push((v, value - fs));
        fs = value;
    }
    s.set_value(fs);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<usize> = (0..n).filter(|&v| !s.contains(v)).collect();
    let mut population = Population::new(n);
    for _ in 0..mu {
        let mut remaining = pool.clone();
        let mut p = s.clone();
        while p.len() < b && !remaining.is_empty() {
            let pick = rng.random_range(0..remaining.len());
            p.insert(remaining.swap_remove(pick));
        }
        let value = oracle.evaluate(&p);
        if !value_at_least(oracle, value, fs) {
            return Err(Error::invariant(format!(
                "objective is not monotone: superset of the core evaluated to {value} < {fs}"
            )));
        }
        p.set_value(value);
        debug_assert!(model.is_feasible(&p, 0.0));
        population.push(p)?;
    }

    Ok((
        population,
        GreedyTrace {
            core_solution: s,
            insertion_order,
            best_singleton: None,
            flags,
        },
    ))
}

/// Generalized (knapsack) diversifying greedy sampling.
///
/// Scans candidates by best gain-to-cost ratio, adding an element only while
/// the core stays within `B - m` and discarding it otherwise; picks the
/// better of the core and the best affordable singleton as the completion
/// seed `T`; then emits `mu` solutions by scanning a random order of the
/// remaining elements and adding every one that still fits in `B`.
pub fn gdgs(
    oracle: &dyn Objective,
    model: &CostModel,
    mu: usize,
    seed: u64,
) -> Result<(Population, GreedyTrace)> {
    if model.kind() != ConstraintKind::Knapsack {
        return Err(Error::invalid("gdgs requires a knapsack constraint model"));
    }
    if mu == 0 {
        return Err(Error::invalid("population size mu must be at least 1"));
    }
    let n = oracle.n();
    if model.item_count() != Some(n) {
        return Err(Error::invalid(format!(
            "cost model covers {:?} items but the objective has {n}",
            model.item_count()
        )));
    }
    let margin = model.margin();
    let mut flags = Vec::new();

    // Core phase: every round considers all remaining candidates, takes the
    // best ratio (ties to the lowest index), and consumes the winner whether
    // or not it fits.
    let mut s = Solution::new();
    let mut fs = oracle.evaluate(&s);
    let mut cost_s = 0.0;
    let mut insertion_order = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut probe = Solution::new();
    while !remaining.is_empty() {
        let mut best: Option<(usize, usize, f64, f64)> = None;
        for (pos, &v) in remaining.iter().enumerate() {
            probe.clone_from(&s);
            probe.insert(v);
            let value = oracle.evaluate(&probe);
            let ratio = (value - fs) / model.item_cost(v);
            if best.is_none_or(|(_, _, br, _)| ratio > br) {
                best = Some((pos, v, ratio, value));
            }
        }
        let (pos, v, _, value) = best.expect("nonempty candidate list");
        if model.fits(cost_s + model.item_cost(v), margin) {
            s.insert(v);
            insertion_order.push((v, value - fs));
            fs = value;
            cost_s += model.item_cost(v);
        }
        remaining.remove(pos);
    }

    // Best singleton affordable within the reduced budget B - m.
    let mut best_singleton: Option<(usize, f64)> = None;
    for v in 0..n {
        if !model.fits(model.item_cost(v), margin) {
            continue;
        }
        let value = oracle.evaluate(&Solution::from_elements([v]));
        if best_singleton.is_none_or(|(_, bv)| value > bv) {
            best_singleton = Some((v, value));
        }
    }

    let mut t = if s.is_empty() && best_singleton.is_none() {
        // Nothing fits under B - m. Fall back to the best singleton under
        // the full budget so the completion has a seed at all.
        flags.push("no_affordable_core".to_string());
        let mut fallback: Option<(usize, f64)> = None;
        for v in 0..n {
            if !model.fits(model.item_cost(v), 0.0) {
                continue;
            }
            let value = oracle.evaluate(&Solution::from_elements([v]));
            if fallback.is_none_or(|(_, bv)| value > bv) {
                fallback = Some((v, value));
            }
        }
        match fallback {
            Some((v, value)) => {
                let mut t = Solution::from_elements([v]);
                t.set_value(value);
                t
            }
            None => {
                flags.push("empty_seed".to_string());
                let mut t = Solution::new();
                t.set_value(oracle.evaluate(&t));
                t
            }
        }
    } else {
        // Prefer the core on ties.
        match best_singleton {
            Some((v, value)) if value > fs => {
                let mut t = Solution::from_elements([v]);
                t.set_value(value);
                t
            }
            _ => {
                let mut t = s.clone();
                t.set_value(fs);
                t
            }
        }
    };
    let ft = oracle.value_of(&mut t);
    let cost_t = model.cost(&t);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<usize> = (0..n).filter(|&v| !t.contains(v)).collect();
    let mut population = Population::new(n);
    for _ in 0..mu {
        let mut remaining = pool.clone();
        let mut p = t.clone();
        let mut cost_p = cost_t;
        while !remaining.is_empty() {
            let pick = rng.random_range(0..remaining.len());
            let v = remaining.swap_remove(pick);
            if model.fits(cost_p + model.item_cost(v), 0.0) {
                p.insert(v);
                cost_p += model.item_cost(v);
            }
        }
        let value = oracle.evaluate(&p);
        if !value_at_least(oracle, value, ft) {
            return Err(Error::invariant(format!(
                "objective is not monotone: superset of the seed evaluated to {value} < {ft}"
            )));
        }
        p.set_value(value);
        debug_assert!(model.is_feasible(&p, 0.0));
        population.push(p)?;
    }

    Ok((
        population,
        GreedyTrace {
            core_solution: t,
            insertion_order,
            best_singleton,
            flags,
        },
    ))
}

/// Binomial coefficient as an arbitrary-precision integer; 0 when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Guaranteed-solution count for the uniform variant: any subset of the
/// non-core pool with at most `m` elements extends the core feasibly, so at
/// least `sum_{i=0}^{m} C(n-B+m, i)` feasible solutions reach the core's
/// value. Returns `(total, per_draw)` where `per_draw = C(n-B+m, m)` counts
/// the exact-size completions one sample is drawn from.
pub fn dgs_solution_count_bound(n: usize, b: f64, m: f64) -> Result<(BigUint, BigUint)> {
    if b.fract() != 0.0 || m.fract() != 0.0 {
        return Err(Error::invalid("count bound takes whole-number B and m"));
    }
    let (b, m) = (b as usize, m as usize);
    if m > b || b > n {
        return Err(Error::invalid(format!(
            "count bound needs m <= B <= n, got m = {m}, B = {b}, n = {n}"
        )));
    }
    let pool = (n - b + m) as u64;
    let total = (0..=m as u64).map(|i| binomial(pool, i)).sum();
    Ok((total, binomial(pool, m as u64)))
}

/// Knapsack analog: at least `sum_{i=1}^{floor(m/c_max)} C(n - floor((B-m)/c_min), i)`
/// feasible solutions reach the seed's value. Returns zero when
/// `floor(m/c_max) = 0`, in which case the bound is vacuous and callers
/// should flag it rather than assert on it.
pub fn gdgs_solution_count_bound(
    n: usize,
    b: f64,
    m: f64,
    c_min: f64,
    c_max: f64,
) -> Result<BigUint> {
    if !(c_min > 0.0) || c_max < c_min {
        return Err(Error::invalid(format!(
            "need 0 < c_min <= c_max, got c_min = {c_min}, c_max = {c_max}"
        )));
    }
    if m > b {
        return Err(Error::invalid(format!("need m <= B, got m = {m}, B = {b}")));
    }
    // Epsilon before flooring: these quotients are exact rationals that f64
    // division can land just below (for example 10 / 0.1).
    let k = (m / c_max + 1e-9).floor() as u64;
    if k == 0 {
        return Ok(BigUint::ZERO);
    }
    let cap = ((b - m) / c_min + 1e-9).floor() as usize;
    let pool = n.saturating_sub(cap) as u64;
    Ok((1..=k).map(|i| binomial(pool, i)).sum())
}
