//! Population diversity measured as empirical element entropy.
//!
//! For a population `P` of `mu` solutions over ground set `{0,..,n-1}`, each
//! element contributes `-p log2 p` with `p = occurrences / mu`; absent
//! elements contribute zero.

use crate::core::Population;
use crate::error::{Error, Result};

/// Contribution of one element occurring `count` times among `mu` solutions.
#[inline]
fn term(count: u32, mu: usize) -> f64 {
    if count == 0 {
        return 0.0;
    }
    let p = count as f64 / mu as f64;
    -p * p.log2()
}

/// Entropy of an explicit occurrence-count vector with denominator `mu`.
pub fn entropy_of_counts(counts: &[u32], mu: usize) -> f64 {
    if mu == 0 {
        return 0.0;
    }
    counts.iter().map(|&c| term(c, mu)).sum()
}

/// Entropy of a population. An empty population has entropy 0.
pub fn entropy(pop: &Population) -> f64 {
    entropy_of_counts(pop.counts(), pop.len())
}

/// Entropy of the population with the solution at `index` removed, computed
/// against denominator `|P| - 1` by adjusting only the terms the removed
/// solution touches.
pub fn entropy_without(pop: &Population, index: usize) -> Result<f64> {
    let len = pop.len();
    let sol = pop.get(index).ok_or_else(|| {
        Error::invalid(format!(
            "no solution at index {index} in population of {len}"
        ))
    })?;
    let mu = len - 1;
    if mu == 0 {
        return Ok(0.0);
    }
    let counts = pop.counts();
    let base: f64 = counts.iter().map(|&c| term(c, mu)).sum();
    let adjust: f64 = sol
        .iter()
        .map(|e| term(counts[e] - 1, mu) - term(counts[e], mu))
        .sum();
    Ok(base + adjust)
}

/// Incremental entropy bookkeeping for a steady-state loop that repeatedly
/// adds one solution to a size-`mu` population and removes one again.
///
/// Scores are computed from the current counts through a precomputed term
/// table every call, so floating-point error never accumulates across
/// iterations, and removing the just-added solution is scored as exactly the
/// current entropy (it restores the previous population). Consequently the
/// entropy reported across accepted steps is non-decreasing without any
/// tolerance.
#[derive(Clone, Debug)]
pub struct EntropyState {
    mu: usize,
    /// term(c) for c in 0..=mu+1, denominator mu.
    table: Vec<f64>,
    value: f64,
}

impl EntropyState {
    pub fn new(pop: &Population) -> Self {
        let mu = pop.len();
        let table = (0..=mu as u32 + 1).map(|c| term(c, mu)).collect();
        EntropyState {
            mu,
            table,
            value: entropy(pop),
        }
    }

    /// Entropy of the current size-`mu` population.
    pub fn value(&self) -> f64 {
        self.value
    }

    /// Scores every removal candidate of a working population holding
    /// `mu + 1` solutions whose newest member sits at the last index.
    /// Returns `(index, entropy after removal)` for the best removal,
    /// breaking ties toward the largest index (the newest solution).
    pub fn select_removal(&self, pop: &Population) -> (usize, f64) {
        debug_assert_eq!(pop.len(), self.mu + 1);
        let counts = pop.counts();
        let last = pop.len() - 1;
        // Base entropy of the working counts against denominator mu: the
        // current entropy plus the incoming solution's term shifts.
        let base: f64 = self.value
            + pop.solutions()[last]
                .iter()
                .map(|e| self.table[counts[e] as usize] - self.table[counts[e] as usize - 1])
                .sum::<f64>();
        // Removing the newest solution restores the previous population, so
        // its score is the current entropy by construction, not recomputed.
        // Iterating high to low with a strict comparison makes every tie
        // resolve toward the largest index, the newest solution included.
        let mut best = (last, self.value);
        for j in (0..last).rev() {
            let score: f64 = base
                + pop.solutions()[j]
                    .iter()
                    .map(|e| self.table[counts[e] as usize - 1] - self.table[counts[e] as usize])
                    .sum::<f64>();
            if score > best.1 {
                best = (j, score);
            }
        }
        best
    }

    /// Records the entropy chosen by `select_removal` once the caller has
    /// applied the removal.
    pub fn commit(&mut self, new_value: f64) {
        self.value = new_value;
    }
}

/// Upper bound on the entropy of any population produced by greedy-core
/// sampling with budget `b` and margin `m` over `n` elements:
/// `-m log2(m / (n - b + m))`. Zero when `m = 0`.
pub fn dgs_entropy_upper_bound(n: usize, b: f64, m: f64) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    let pool = n as f64 - b + m;
    -m * (m / pool).log2()
}

/// Entropy of the equal-occurrence distribution for cardinality objectives:
/// `-b log2(b / n)`. Independent of the population size.
pub fn onemax_max_entropy(n: usize, b: usize, _mu: usize) -> f64 {
    if b == 0 {
        return 0.0;
    }
    let p = b as f64 / n as f64;
    -(b as f64) * p.log2()
}
