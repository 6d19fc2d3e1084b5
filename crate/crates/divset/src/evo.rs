//! Diversity-maximizing evolutionary search over a fixed-quality population.
//!
//! Starting from a feasible population whose members all clear a quality
//! threshold, the search repeatedly mutates a random member and, when the
//! offspring also clears the threshold and the budget, swaps it in whenever
//! doing so does not lower the population's element entropy. Quality is a
//! hard constraint, so entropy climbs monotonically while every member stays
//! above the threshold at all times.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::core::{value_at_least, CostModel, Objective, Population, Solution};
use crate::diversity::{entropy, EntropyState};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct DiveaConfig {
    /// Total iterations to run; the loop never stops early.
    pub t_max: u64,
    /// Per-element flip probability; `None` means `1/n`.
    pub mutation_rate: Option<f64>,
    /// Quality floor every population member must keep satisfying.
    pub f_min: f64,
    pub seed: u64,
    /// Trajectory sampling period in iterations.
    pub log_interval: u64,
    /// Re-verify every invariant from scratch each iteration. Slow;
    /// intended for tests.
    pub audit: bool,
}

impl Default for DiveaConfig {
    fn default() -> Self {
        DiveaConfig {
            t_max: 10_000,
            mutation_rate: None,
            f_min: 0.0,
            seed: 0,
            log_interval: 100,
            audit: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiveaResult {
    pub population: Population,
    /// `(iteration, entropy)` samples: iteration 0, every `log_interval`
    /// iterations, and the final iteration.
    pub trajectory: Vec<(u64, f64)>,
    /// Offspring that passed both the quality and the budget check.
    pub accepted: u64,
    /// Iteration of the last strict entropy increase (0 if none).
    pub last_improvement: u64,
    pub final_entropy: f64,
}

/// Standard bit-flip mutation: each ground-set element toggles membership
/// independently with probability `rate`.
pub fn mutate(parent: &Solution, n: usize, rate: f64, rng: &mut impl Rng) -> Solution {
    let mut child = parent.clone();
    for v in 0..n {
        if rng.random::<f64>() < rate {
            child.toggle(v);
        }
    }
    child
}

fn values_close(oracle: &dyn Objective, a: f64, b: f64) -> bool {
    match oracle.value_scale() {
        Some(scale) => {
            let s = scale as f64;
            (a * s).round() == (b * s).round()
        }
        None => (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0),
    }
}

fn audit_state(
    oracle: &dyn Objective,
    model: &CostModel,
    population: &Population,
    state: &EntropyState,
    f_min: f64,
    t: u64,
) -> Result<()> {
    if !population.counts_consistent() {
        return Err(Error::invariant(format!(
            "iteration {t}: occurrence counts diverged from the population"
        )));
    }
    let fresh = entropy(population);
    if (state.value() - fresh).abs() > 1e-9 {
        return Err(Error::invariant(format!(
            "iteration {t}: tracked entropy {} drifted from recomputed {fresh}",
            state.value()
        )));
    }
    for (idx, sol) in population.solutions().iter().enumerate() {
        if !model.is_feasible(sol, 0.0) {
            return Err(Error::invariant(format!(
                "iteration {t}: member {idx} exceeds the budget"
            )));
        }
        let fresh_value = oracle.evaluate(sol);
        match sol.value() {
            Some(cached) if values_close(oracle, cached, fresh_value) => {}
            Some(cached) => {
                return Err(Error::invariant(format!(
                    "iteration {t}: member {idx} cached value {cached} != {fresh_value}"
                )));
            }
            None => {
                return Err(Error::invariant(format!(
                    "iteration {t}: member {idx} has no cached value"
                )));
            }
        }
        if !value_at_least(oracle, fresh_value, f_min) {
            return Err(Error::invariant(format!(
                "iteration {t}: member {idx} fell below the quality floor"
            )));
        }
    }
    Ok(())
}

/// Runs the diversity search for exactly `t_max` iterations.
///
/// Every member of `initial` must fit the budget and clear `f_min`; member
/// values are (re)computed here, so cached values are not required.
pub fn divea(
    oracle: &dyn Objective,
    model: &CostModel,
    initial: Population,
    config: &DiveaConfig,
) -> Result<DiveaResult> {
    let n = oracle.n();
    if initial.is_empty() {
        return Err(Error::invalid("initial population is empty"));
    }
    if initial.n() != n {
        return Err(Error::invalid(format!(
            "initial population is over a ground set of {} but the objective has {n}",
            initial.n()
        )));
    }
    if config.log_interval == 0 {
        return Err(Error::invalid("log_interval must be at least 1"));
    }
    let rate = config.mutation_rate.unwrap_or(1.0 / n as f64);
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::invalid(format!(
            "mutation rate must lie in [0, 1], got {rate}"
        )));
    }

    let mu = initial.len();
    let mut population = Population::new(n);
    for (index, sol) in initial.into_solutions().into_iter().enumerate() {
        let mut sol = sol;
        if !model.is_feasible(&sol, 0.0) {
            return Err(Error::InfeasibleInitial {
                index,
                reason: format!(
                    "cost {} exceeds budget {}",
                    model.cost(&sol),
                    model.budget()
                ),
            });
        }
        let value = oracle.value_of(&mut sol);
        if !value_at_least(oracle, value, config.f_min) {
            return Err(Error::InfeasibleInitial {
                index,
                reason: format!("value {value} is below the quality floor {}", config.f_min),
            });
        }
        population.push(sol)?;
    }

    let mut state = EntropyState::new(&population);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trajectory = vec![(0, state.value())];
    let mut accepted = 0u64;
    let mut last_improvement = 0u64;

    for t in 1..=config.t_max {
        let parent = population
            .get(rng.random_range(0..mu))
            .expect("population holds mu members");
        let child = mutate(parent, n, rate, &mut rng);
        if model.is_feasible(&child, 0.0) {
            let value = oracle.evaluate(&child);
            if value_at_least(oracle, value, config.f_min) {
                let mut child = child;
                child.set_value(value);
                population.push(child)?;
                let (remove_idx, new_h) = state.select_removal(&population);
                population.remove(remove_idx);
                if new_h > state.value() {
                    last_improvement = t;
                }
                state.commit(new_h);
                accepted += 1;
            }
        }
        if t % config.log_interval == 0 {
            trajectory.push((t, state.value()));
        }
        if config.audit {
            audit_state(oracle, model, &population, &state, config.f_min, t)?;
        }
    }

    if trajectory.last().map(|&(t, _)| t) != Some(config.t_max) {
        trajectory.push((config.t_max, state.value()));
    }

    Ok(DiveaResult {
        population,
        final_entropy: state.value(),
        trajectory,
        accepted,
        last_improvement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::CostModel;
    use crate::diversity::onemax_max_entropy;
    use crate::greedy::dgs;
    use crate::problems::OneMax;

    fn onemax_start(
        n: usize,
        b: f64,
        m: f64,
        mu: usize,
        seed: u64,
    ) -> (OneMax, CostModel, Population, f64) {
        let f = OneMax::new(n);
        let model = CostModel::uniform(b, m).unwrap();
        let (pop, trace) = dgs(&f, &model, mu, seed).unwrap();
        let f_min = trace.core_solution.value().unwrap();
        (f, model, pop, f_min)
    }

    #[test]
    fn mutation_rate_zero_and_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let parent = Solution::from_elements([0, 2, 4]);
        let same = mutate(&parent, 6, 0.0, &mut rng);
        assert_eq!(same, parent);
        let complement = mutate(&parent, 6, 1.0, &mut rng);
        assert_eq!(complement.as_slice(), &[1, 3, 5]);
    }

    #[test]
    fn mutation_flips_one_element_on_average() {
        let n = 100;
        let parent = Solution::from_elements(0..50);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trials = 100_000;
        let mut flips = 0u64;
        for _ in 0..trials {
            let child = mutate(&parent, n, 1.0 / n as f64, &mut rng);
            let common = child.iter().filter(|&v| parent.contains(v)).count();
            flips += (child.len() - common + parent.len() - common) as u64;
        }
        let mean = flips as f64 / trials as f64;
        assert!(
            (0.97..=1.03).contains(&mean),
            "mean Hamming distance {mean}"
        );
    }

    #[test]
    fn rejects_bad_initial_population() {
        let f = OneMax::new(10);
        let model = CostModel::uniform(3.0, 0.0).unwrap();
        let mut pop = Population::new(10);
        pop.push(Solution::from_elements([0, 1, 2, 3])).unwrap();
        let err = divea(&f, &model, pop, &DiveaConfig::default()).unwrap_err();
        assert!(matches!(err, Error::InfeasibleInitial { index: 0, .. }));

        let mut pop = Population::new(10);
        pop.push(Solution::from_elements([0])).unwrap();
        let config = DiveaConfig {
            f_min: 2.0,
            ..DiveaConfig::default()
        };
        let err = divea(&f, &model, pop, &config).unwrap_err();
        assert!(matches!(err, Error::InfeasibleInitial { index: 0, .. }));
    }

    #[test]
    fn trajectory_is_exactly_monotone_under_audit() {
        let (f, model, pop, f_min) = onemax_start(30, 6.0, 4.0, 8, 11);
        let config = DiveaConfig {
            t_max: 2_000,
            f_min,
            seed: 5,
            log_interval: 50,
            audit: true,
            ..DiveaConfig::default()
        };
        let result = divea(&f, &model, pop, &config).unwrap();
        assert!(result.accepted > 0);
        for w in result.trajectory.windows(2) {
            assert!(
                w[1].1 >= w[0].1,
                "entropy dropped: {:?} -> {:?}",
                w[0],
                w[1]
            );
        }
        assert_eq!(result.trajectory.first().unwrap().0, 0);
        assert_eq!(result.trajectory.last().unwrap().0, 2_000);
        assert_eq!(result.final_entropy, result.trajectory.last().unwrap().1);
        assert!(result.last_improvement <= 2_000);
    }

    #[test]
    fn quality_floor_holds_in_final_population() {
        let (f, model, pop, f_min) = onemax_start(25, 5.0, 3.0, 6, 3);
        let config = DiveaConfig {
            t_max: 3_000,
            f_min,
            seed: 17,
            ..DiveaConfig::default()
        };
        let result = divea(&f, &model, pop, &config).unwrap();
        assert_eq!(result.population.len(), 6);
        for sol in result.population.solutions() {
            assert!(model.is_feasible(sol, 0.0));
            assert!(f.evaluate(sol) >= f_min);
        }
    }

    #[test]
    fn entropy_approaches_the_ceiling_on_loose_instances() {
        // B = 3, mu = 4 over n = 30: the ceiling B log2 mu = 6 is attainable
        // (12 disjoint slots fit). The quality floor of B forces every
        // member to stay at exactly 3 elements.
        let f = OneMax::new(30);
        let model = CostModel::uniform(3.0, 0.0).unwrap();
        let mut pop = Population::new(30);
        for _ in 0..4 {
            let mut s = Solution::from_elements([0, 1, 2]);
            s.set_value(3.0);
            pop.push(s).unwrap();
        }
        let config = DiveaConfig {
            t_max: 20_000,
            f_min: 3.0,
            seed: 2,
            ..DiveaConfig::default()
        };
        let result = divea(&f, &model, pop, &config).unwrap();
        let ceiling = 3.0 * 4.0_f64.log2();
        assert!(result.final_entropy <= ceiling + 1e-9);
        assert!(
            result.final_entropy >= ceiling - 0.1,
            "final entropy {} well below ceiling {ceiling}",
            result.final_entropy
        );
    }

    #[test]
    fn entropy_never_exceeds_either_ceiling() {
        // A floor of exactly B pins every member at B elements, so both
        // ceilings apply: B log2 mu from the occupancy argument and
        // -B log2(B/n) from the fixed total mass. The latter binds here
        // (6 bits vs 13.9).
        let f = OneMax::new(12);
        let model = CostModel::uniform(6.0, 0.0).unwrap();
        let mut pop = Population::new(12);
        for _ in 0..5 {
            let mut s = Solution::from_elements(0..6);
            s.set_value(6.0);
            pop.push(s).unwrap();
        }
        let config = DiveaConfig {
            t_max: 10_000,
            f_min: 6.0,
            seed: 101,
            ..DiveaConfig::default()
        };
        let result = divea(&f, &model, pop, &config).unwrap();
        let slot_ceiling = 6.0 * 5.0_f64.log2();
        let size_ceiling = onemax_max_entropy(12, 6, 5);
        for &(_, h) in &result.trajectory {
            assert!(h <= slot_ceiling + 1e-9);
            assert!(h <= size_ceiling + 1e-9);
        }
        assert!(result.final_entropy > 0.8 * size_ceiling);
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let (f, model, pop, f_min) = onemax_start(20, 5.0, 2.0, 5, 13);
        let config = DiveaConfig {
            t_max: 1_000,
            f_min,
            seed: 99,
            ..DiveaConfig::default()
        };
        let a = divea(&f, &model, pop.clone(), &config).unwrap();
        let b = divea(&f, &model, pop.clone(), &config).unwrap();
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.population.solutions(), b.population.solutions());
        assert_eq!(a.accepted, b.accepted);

        let other = DiveaConfig {
            seed: 100,
            ..config
        };
        let c = divea(&f, &model, pop, &other).unwrap();
        assert_ne!(a.population.solutions(), c.population.solutions());
    }
}
