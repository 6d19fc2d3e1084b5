//! Exhaustive ground truth for small instances.
//!
//! Everything here enumerates subsets outright, so hard size caps keep the
//! work at desk scale: 2^n evaluations for optima and counting, roughly
//! n * 3^n marginal pairs for the submodularity ratio. The results are exact
//! and serve as the reference the scalable algorithms are verified against.

use num_bigint::BigUint;

use crate::core::{value_at_least, ConstraintKind, CostModel, Objective, Population, Solution};
use crate::error::{Error, Result};
use crate::greedy::{dgs, gdgs};

/// Largest ground set `brute_force_opt` accepts (2^22 subsets).
pub const MAX_ENUMERATION_N: usize = 22;
/// Largest ground set `submodularity_ratio` accepts (pair enumeration).
pub const MAX_RATIO_N: usize = 14;
/// Largest ground set the guarantee checks accept.
pub const MAX_GUARANTEE_N: usize = 18;

#[derive(Clone, Debug)]
pub struct BruteForceResult {
    pub opt_value: f64,
    /// Lowest-index feasible maximizer (first reached by subset order).
    pub opt_witness: Solution,
    /// Count of feasible subsets with value at least the given threshold;
    /// present iff a threshold was supplied.
    pub feasible_count_at_threshold: Option<BigUint>,
    /// Total subsets examined, feasible or not.
    pub enumerated: u64,
}

/// Exact optimum (and optional threshold count) by full subset enumeration.
///
/// Infeasible subsets are skipped before evaluation. The empty set is always
/// feasible, so a witness always exists.
pub fn brute_force_opt(
    oracle: &dyn Objective,
    model: &CostModel,
    threshold: Option<f64>,
) -> Result<BruteForceResult> {
    let n = oracle.n();
    if n > MAX_ENUMERATION_N {
        return Err(Error::TooLarge {
            n,
            cap: MAX_ENUMERATION_N,
        });
    }
    let mut opt_value = f64::NEG_INFINITY;
    let mut opt_witness = Solution::new();
    let mut count = 0u64;
    let mut members = Vec::with_capacity(n);
    for mask in 0u64..1u64 << n {
        members.clear();
        let mut cost = 0.0;
        for v in 0..n {
            if mask >> v & 1 == 1 {
                members.push(v);
                cost += model.item_cost(v);
            }
        }
        if !model.fits(cost, 0.0) {
            continue;
        }
        let sol = Solution::from_elements(members.iter().copied());
        let value = oracle.evaluate(&sol);
        if value > opt_value {
            opt_value = value;
            opt_witness = sol;
        }
        if let Some(t) = threshold {
            if value_at_least(oracle, value, t) {
                count += 1;
            }
        }
    }
    Ok(BruteForceResult {
        opt_value,
        opt_witness,
        feasible_count_at_threshold: threshold.map(|_| BigUint::from(count)),
        enumerated: 1u64 << n,
    })
}

/// The marginal-gain pair attaining the ratio minimum.
#[derive(Clone, Debug)]
pub struct SubmodularityWitness {
    pub subset: Solution,
    pub superset: Solution,
    pub element: usize,
}

#[derive(Clone, Debug)]
pub struct SubmodularityReport {
    /// min over A subset-of B, v outside B of the marginal-gain ratio
    /// (f(A+v) - f(A)) / (f(B+v) - f(B)); 1 exactly iff f is submodular.
    pub alpha_f: f64,
    /// Absent only when every denominator is zero (constant f), in which
    /// case `alpha_f` is 1 by convention.
    pub witness: Option<SubmodularityWitness>,
    /// All (A, B, v) triples enumerated, including skipped zero-denominator
    /// ones.
    pub pairs_examined: u64,
    /// True when the minimum was taken over exact integer ratios.
    pub exact: bool,
}

fn solution_from_mask(mask: u32, n: usize) -> Solution {
    Solution::from_elements((0..n).filter(|&v| mask >> v & 1 == 1))
}

/// Exact submodularity ratio by enumerating every nested pair.
///
/// Pairs with a zero denominator are skipped: a 0/0 pair constrains
/// nothing, and a positive-over-zero pair is +inf, never the minimum. The
/// pair A = B always contributes ratio 1, so the result never exceeds 1
/// once any positive marginal exists. Integer-scaled objectives are
/// compared as exact rationals, so a submodular instance yields exactly 1.0.
pub fn submodularity_ratio(oracle: &dyn Objective) -> Result<SubmodularityReport> {
    let n = oracle.n();
    if n > MAX_RATIO_N {
        return Err(Error::TooLarge {
            n,
            cap: MAX_RATIO_N,
        });
    }
    let size = 1usize << n;
    let values: Vec<f64> = (0..size)
        .map(|mask| oracle.evaluate(&solution_from_mask(mask as u32, n)))
        .collect();
    let scaled: Option<Vec<i64>> = oracle.value_scale().map(|scale| {
        values
            .iter()
            .map(|&v| (v * scale as f64).round() as i64)
            .collect()
    });

    let mut pairs_examined = 0u64;
    // Best ratio as an exact fraction (num, den), den > 0.
    let mut best_exact: Option<(i64, i64, u32, u32, usize)> = None;
    let mut best_float: Option<(f64, u32, u32, usize)> = None;
    for bm in 0..size as u32 {
        for v in 0..n {
            let vb = 1u32 << v;
            if bm & vb != 0 {
                continue;
            }
            let db = values[(bm | vb) as usize] - values[bm as usize];
            let dbi = scaled
                .as_ref()
                .map(|s| s[(bm | vb) as usize] - s[bm as usize]);
            let mut am = bm;
            loop {
                pairs_examined += 1;
                match (&scaled, dbi) {
                    (Some(s), Some(dbi)) => {
                        if dbi > 0 {
                            let dai = s[(am | vb) as usize] - s[am as usize];
                            let smaller = match best_exact {
                                None => true,
                                Some((bn, bd, ..)) => {
                                    (dai as i128) * (bd as i128) < (bn as i128) * (dbi as i128)
                                }
                            };
                            if smaller {
                                best_exact = Some((dai, dbi, am, bm, v));
                            }
                        }
                    }
                    _ => {
                        if db > 0.0 {
                            let ratio = (values[(am | vb) as usize] - values[am as usize]) / db;
                            if best_float.is_none_or(|(br, ..)| ratio < br) {
                                best_float = Some((ratio, am, bm, v));
                            }
                        }
                    }
                }
                if am == 0 {
                    break;
                }
                am = (am - 1) & bm;
            }
        }
    }

    let exact = scaled.is_some();
    let (alpha_f, witness) = if let Some((num, den, am, bm, v)) = best_exact {
        (
            num as f64 / den as f64,
            Some(SubmodularityWitness {
                subset: solution_from_mask(am, n),
                superset: solution_from_mask(bm, n),
                element: v,
            }),
        )
    } else if let Some((ratio, am, bm, v)) = best_float {
        (
            ratio,
            Some(SubmodularityWitness {
                subset: solution_from_mask(am, n),
                superset: solution_from_mask(bm, n),
                element: v,
            }),
        )
    } else {
        (1.0, None)
    };
    Ok(SubmodularityReport {
        alpha_f,
        witness,
        pairs_examined,
        exact,
    })
}

/// Submodularity ratio, shortcut to 1 for certified implementations.
pub fn alpha_of(oracle: &dyn Objective) -> Result<f64> {
    if oracle.certified_submodular() {
        Ok(1.0)
    } else {
        Ok(submodularity_ratio(oracle)?.alpha_f)
    }
}

#[derive(Clone, Debug)]
pub struct GuaranteeReport {
    pub opt_value: f64,
    pub alpha: f64,
    /// Guaranteed fraction of the optimum.
    pub bound_fraction: f64,
    /// `bound_fraction * opt_value`: the value floor being checked.
    pub floor: f64,
    /// Smallest value observed across all checked solutions.
    pub min_observed: f64,
    pub trials: usize,
    /// Runs excluded because the construction flagged degenerate geometry.
    pub skipped: usize,
    pub holds: bool,
}

/// Guaranteed fraction of the optimum for margin-completed greedy under a
/// uniform budget: `1 - (1 - alpha/B)^(B-m)`.
pub fn completion_bound_fraction(alpha: f64, b: f64, m: f64) -> f64 {
    1.0 - (1.0 - alpha / b).powi((b - m) as i32)
}

/// Guaranteed fraction for the knapsack seed `T` after a core of `L` ratio
/// picks: `(1/2) (1 - (1 - (B-m)/((L+1) B))^(L+1))`.
///
/// The exponent base spends the core budget `B - m` over `L + 1` equal-cost
/// steps of the induction, so at `m = 0` this reduces to the familiar
/// `(1/2)(1 - (1 - 1/(L+1))^(L+1))`.
pub fn seed_bound_fraction(b: f64, m: f64, core_size: usize) -> f64 {
    let l1 = core_size as f64 + 1.0;
    0.5 * (1.0 - (1.0 - (b - m) / (l1 * b)).powi(core_size as i32 + 1))
}

/// Checks every member of repeated margin-completed greedy populations
/// against the value floor `completion_bound_fraction(alpha, B, m) * OPT`.
///
/// The comparison is as-is, with no slack term. Trials differ only in the
/// completion seed.
pub fn dgs_guarantee_check(
    oracle: &dyn Objective,
    model: &CostModel,
    mu: usize,
    trials: usize,
    base_seed: u64,
) -> Result<GuaranteeReport> {
    let n = oracle.n();
    if n > MAX_GUARANTEE_N {
        return Err(Error::TooLarge {
            n,
            cap: MAX_GUARANTEE_N,
        });
    }
    if model.kind() != ConstraintKind::Uniform {
        return Err(Error::invalid(
            "the completion bound applies to uniform budgets",
        ));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let alpha = alpha_of(oracle)?;
    let opt = brute_force_opt(oracle, model, None)?.opt_value;
    let bound_fraction = completion_bound_fraction(alpha, model.budget(), model.margin());
    let floor = bound_fraction * opt;
    let mut min_observed = f64::INFINITY;
    for t in 0..trials {
        let (pop, _) = dgs(oracle, model, mu, base_seed.wrapping_add(t as u64))?;
        for sol in pop.solutions() {
            min_observed = min_observed.min(sol.value().expect("populations carry values"));
        }
    }
    Ok(GuaranteeReport {
        opt_value: opt,
        alpha,
        bound_fraction,
        floor,
        min_observed,
        trials,
        skipped: 0,
        holds: min_observed >= floor,
    })
}

/// Checks the knapsack seed `T` against the value floor
/// `seed_bound_fraction(B, m, |core|) * OPT`.
///
/// The seed is deterministic, so a single construction suffices. Restricted
/// to certified-submodular objectives (the finite-form bound is derived for
/// submodular f); degenerate constructions are reported as skipped, not
/// failed.
pub fn gdgs_seed_guarantee_check(
    oracle: &dyn Objective,
    model: &CostModel,
) -> Result<GuaranteeReport> {
    let n = oracle.n();
    if n > MAX_GUARANTEE_N {
        return Err(Error::TooLarge {
            n,
            cap: MAX_GUARANTEE_N,
        });
    }
    if model.kind() != ConstraintKind::Knapsack {
        return Err(Error::invalid("the seed bound applies to knapsack budgets"));
    }
    if !oracle.certified_submodular() {
        return Err(Error::invalid(
            "the seed bound is checked only for certified-submodular objectives",
        ));
    }
    let opt = brute_force_opt(oracle, model, None)?.opt_value;
    let (_, trace) = gdgs(oracle, model, 1, 0)?;
    if !trace.flags.is_empty() {
        return Ok(GuaranteeReport {
            opt_value: opt,
            alpha: 1.0,
            bound_fraction: 0.0,
            floor: 0.0,
            min_observed: trace.core_solution.value().unwrap_or(0.0),
            trials: 1,
            skipped: 1,
            holds: true,
        });
    }
    let core_size = trace.insertion_order.len();
    let bound_fraction = seed_bound_fraction(model.budget(), model.margin(), core_size);
    let floor = bound_fraction * opt;
    let observed = trace.core_solution.value().expect("seed carries a value");
    Ok(GuaranteeReport {
        opt_value: opt,
        alpha: 1.0,
        bound_fraction,
        floor,
        min_observed: observed,
        trials: 1,
        skipped: 0,
        holds: observed >= floor,
    })
}

/// Convenience: the smallest member value of a population, evaluated fresh.
pub fn population_floor(oracle: &dyn Objective, population: &Population) -> f64 {
    population
        .solutions()
        .iter()
        .map(|s| oracle.evaluate(s))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{CoverageInstance, Modular, OneMax};

    struct SizeSquared {
        n: usize,
    }

    impl Objective for SizeSquared {
        fn n(&self) -> usize {
            self.n
        }
        fn name(&self) -> &str {
            "size-squared"
        }
        fn evaluate(&self, solution: &Solution) -> f64 {
            (solution.len() * solution.len()) as f64
        }
        fn value_scale(&self) -> Option<u64> {
            Some(1)
        }
    }

    #[test]
    fn onemax_opt_and_threshold_counts() {
        let f = OneMax::new(10);
        let model = CostModel::uniform(3.0, 0.0).unwrap();
        let res = brute_force_opt(&f, &model, Some(3.0)).unwrap();
        assert_eq!(res.opt_value, 3.0);
        assert_eq!(res.opt_witness.as_slice(), &[0, 1, 2]);
        assert_eq!(res.enumerated, 1024);
        // Exactly the 3-subsets: C(10, 3).
        assert_eq!(res.feasible_count_at_threshold, Some(BigUint::from(120u32)));
        // f >= 2 adds the 2-subsets: C(10, 3) + C(10, 2).
        let res = brute_force_opt(&f, &model, Some(2.0)).unwrap();
        assert_eq!(res.feasible_count_at_threshold, Some(BigUint::from(165u32)));
    }

    #[test]
    fn coverage_path_opt() {
        let inst = CoverageInstance::from_sets(3, &[vec![0, 1], vec![1, 2], vec![2]]).unwrap();
        let model = CostModel::uniform(1.0, 0.0).unwrap();
        let res = brute_force_opt(&inst, &model, None).unwrap();
        assert_eq!(res.opt_value, 2.0);
        assert_eq!(res.opt_witness.as_slice(), &[0]);
    }

    #[test]
    fn knapsack_opt_prunes_by_cost() {
        let f = Modular::new(vec![5.0, 4.0, 1.0]).unwrap();
        let model = CostModel::knapsack(vec![3.0, 3.0, 3.0], 4.0, 0.0).unwrap();
        let res = brute_force_opt(&f, &model, Some(1.0)).unwrap();
        assert_eq!(res.opt_value, 5.0);
        assert_eq!(res.opt_witness.as_slice(), &[0]);
        // Feasible with f >= 1: the three singletons.
        assert_eq!(res.feasible_count_at_threshold, Some(BigUint::from(3u32)));
    }

    #[test]
    fn enumeration_size_cap() {
        let f = OneMax::new(23);
        let model = CostModel::uniform(3.0, 0.0).unwrap();
        assert!(matches!(
            brute_force_opt(&f, &model, None),
            Err(Error::TooLarge { n: 23, cap: 22 })
        ));
    }

    #[test]
    fn submodular_objectives_have_ratio_exactly_one() {
        let inst = CoverageInstance::from_sets(
            8,
            &[
                vec![0, 1, 2],
                vec![2, 3],
                vec![3, 4, 5],
                vec![5, 6, 7],
                vec![0, 7],
            ],
        )
        .unwrap();
        let report = submodularity_ratio(&inst).unwrap();
        assert!(report.exact);
        assert_eq!(report.alpha_f, 1.0);
        assert!(report.witness.is_some());

        let report = submodularity_ratio(&OneMax::new(6)).unwrap();
        assert_eq!(report.alpha_f, 1.0);
    }

    #[test]
    fn supermodular_toy_ratio() {
        // |X|^2 on 3 elements: the minimum ratio pairs the first element's
        // gain (1) against its gain on top of the other two (9 - 4 = 5).
        let report = submodularity_ratio(&SizeSquared { n: 3 }).unwrap();
        assert_eq!(report.alpha_f, 0.2);
        let w = report.witness.unwrap();
        assert!(w.subset.is_empty());
        assert_eq!(w.superset.len(), 2);
        assert!(!w.superset.contains(w.element));
        // All (A, B, v) triples: sum over B of (n - |B|) 2^|B| = n 3^(n-1).
        assert_eq!(report.pairs_examined, 3 * 9);
    }

    #[test]
    fn ratio_size_cap() {
        assert!(matches!(
            submodularity_ratio(&OneMax::new(15)),
            Err(Error::TooLarge { n: 15, cap: 14 })
        ));
    }

    #[test]
    fn greedy_is_optimal_on_modular_instances() {
        let f = Modular::new(vec![3.0, 8.0, 1.0, 9.0, 4.0, 2.0, 7.0, 5.0]).unwrap();
        let model = CostModel::uniform(4.0, 0.0).unwrap();
        let opt = brute_force_opt(&f, &model, None).unwrap().opt_value;
        let (_, trace) = dgs(&f, &model, 1, 0).unwrap();
        assert_eq!(trace.core_solution.value().unwrap(), opt);
        assert_eq!(opt, 29.0);
    }

    #[test]
    fn completion_bound_holds_with_ratio_one_on_onemax() {
        let f = OneMax::new(12);
        let model = CostModel::uniform(5.0, 2.0).unwrap();
        let report = dgs_guarantee_check(&f, &model, 4, 10, 3).unwrap();
        assert!(report.holds);
        assert_eq!(report.alpha, 1.0);
        assert_eq!(report.opt_value, 5.0);
        // Every member has exactly B elements, so the minimum is the optimum.
        assert_eq!(report.min_observed, 5.0);
    }

    #[test]
    fn completion_bound_holds_across_a_greedy_gap() {
        // Trap set 0 covers 5 fresh elements; the optimal pair covers 8.
        // Greedy takes the trap, lands at 7 < 8, and the bound still holds.
        let inst = CoverageInstance::from_sets(
            9,
            &[vec![0, 1, 4, 5, 8], vec![0, 1, 2, 3], vec![4, 5, 6, 7]],
        )
        .unwrap();
        let model = CostModel::uniform(2.0, 0.0).unwrap();
        let opt = brute_force_opt(&inst, &model, None).unwrap().opt_value;
        assert_eq!(opt, 8.0);
        let (_, trace) = dgs(&inst, &model, 1, 0).unwrap();
        let greedy_value = trace.core_solution.value().unwrap();
        assert_eq!(greedy_value, 7.0);
        let report = dgs_guarantee_check(&inst, &model, 1, 1, 0).unwrap();
        assert!(report.holds);
        assert!(report.min_observed < report.opt_value);
        // 1 - (1 - 1/2)^2 = 3/4.
        assert_eq!(report.bound_fraction, 0.75);
    }

    #[test]
    fn seed_bound_fraction_reduces_at_zero_margin() {
        let l = 5;
        let plain = 0.5 * (1.0 - (1.0 - 1.0 / 6.0_f64).powi(6));
        assert!((seed_bound_fraction(10.0, 0.0, l) - plain).abs() < 1e-15);
        // Positive margin weakens the fraction.
        assert!(seed_bound_fraction(10.0, 3.0, l) < plain);
    }

    #[test]
    fn seed_bound_holds_on_knapsack_coverage() {
        let inst = CoverageInstance::from_sets(
            10,
            &[
                vec![0, 1, 2],
                vec![2, 3, 4, 5],
                vec![5, 6],
                vec![7, 8],
                vec![9, 0],
            ],
        )
        .unwrap();
        let model = CostModel::knapsack(inst.set_size_costs(), 7.0, 2.0).unwrap();
        let report = gdgs_seed_guarantee_check(&inst, &model).unwrap();
        assert_eq!(report.skipped, 0);
        assert!(report.holds);
        assert!(report.min_observed >= report.floor);
    }
}
