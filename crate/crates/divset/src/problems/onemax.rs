//! Cardinality objective: `f(X) = |X|`.

use crate::core::{Objective, Solution};

#[derive(Clone, Copy, Debug)]
pub struct OneMax {
    n: usize,
}

impl OneMax {
    pub fn new(n: usize) -> Self {
        OneMax { n }
    }
}

impl Objective for OneMax {
    fn n(&self) -> usize {
        self.n
    }

    fn name(&self) -> &str {
        "onemax"
    }

    fn evaluate(&self, solution: &Solution) -> f64 {
        solution.len() as f64
    }

    fn certified_submodular(&self) -> bool {
        true
    }

    fn value_scale(&self) -> Option<u64> {
        Some(1)
    }
}
