//! Additive objective: `f(X) = sum of per-element weights`. Chiefly a test
//! fixture; every bound in the crate is tight or trivial on modular
//! functions, which makes them good calibration instances.

use crate::core::{Objective, Solution};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Modular {
    weights: Vec<f64>,
    integral: bool,
}

impl Modular {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid(
                "modular objective needs at least one weight",
            ));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::invalid(format!(
                "modular weights must be finite and nonnegative, got {w}"
            )));
        }
        let integral = weights.iter().all(|w| w.fract() == 0.0);
        Ok(Modular { weights, integral })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl Objective for Modular {
    fn n(&self) -> usize {
        self.weights.len()
    }

    fn name(&self) -> &str {
        "modular"
    }

    fn evaluate(&self, solution: &Solution) -> f64 {
        solution.iter().map(|e| self.weights[e]).sum()
    }

    fn certified_submodular(&self) -> bool {
        true
    }

    fn value_scale(&self) -> Option<u64> {
        if self.integral {
            Some(1)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_weights() {
        let f = Modular::new(vec![5.0, 4.0, 1.0]).unwrap();
        assert_eq!(f.evaluate(&Solution::from_elements([0, 2])), 6.0);
        assert_eq!(f.value_scale(), Some(1));
        let g = Modular::new(vec![0.5, 1.0]).unwrap();
        assert_eq!(g.value_scale(), None);
        assert!(Modular::new(vec![-1.0]).is_err());
        assert!(Modular::new(vec![]).is_err());
    }
}
