//! Maximum vertex coverage: selecting element `i` covers a fixed subset
//! `V_i` of a universe; the objective is the size of the united coverage.
//!
//! For a graph, `V_i` is vertex `i` together with its adjacent vertices of
//! higher index, so every universe vertex appears in at least one set and
//! each undirected edge enlarges exactly one set.

use crate::core::{Objective, Solution};
use crate::error::{Error, Result};
use crate::problems::graph::Graph;

/// Coverage instance over a bit-packed universe.
#[derive(Clone, Debug)]
pub struct CoverageInstance {
    universe: usize,
    words: usize,
    /// n set masks, each `words` u64s, stored back to back.
    masks: Vec<u64>,
    sizes: Vec<u32>,
}

impl CoverageInstance {
    /// Builds the neighborhood instance of a graph: universe = vertices,
    /// `V_i = {i} ∪ {j adjacent to i, j > i}`.
    pub fn from_graph(graph: &Graph) -> Self {
        let n = graph.n();
        let nbrs = graph.undirected_neighbors();
        let sets: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                std::iter::once(i)
                    .chain(nbrs[i].iter().map(|&j| j as usize).filter(|&j| j > i))
                    .collect()
            })
            .collect();
        Self::from_sets(n, &sets).expect("graph-derived sets are always in range")
    }

    /// Closed-neighborhood variant: `V_i = {i} ∪ N(i)` with neighbors in
    /// both directions, so covering a vertex dominates it. Each edge then
    /// enlarges two sets, unlike [`CoverageInstance::from_graph`].
    pub fn from_graph_closed(graph: &Graph) -> Self {
        let n = graph.n();
        let nbrs = graph.undirected_neighbors();
        let sets: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                std::iter::once(i)
                    .chain(nbrs[i].iter().map(|&j| j as usize))
                    .collect()
            })
            .collect();
        Self::from_sets(n, &sets).expect("graph-derived sets are always in range")
    }

    /// Builds an instance from explicit sets over `0..universe`.
    pub fn from_sets(universe: usize, sets: &[Vec<usize>]) -> Result<Self> {
        if universe == 0 || sets.is_empty() {
            return Err(Error::invalid(
                "coverage instance needs a nonempty universe and at least one set",
            ));
        }
        let words = universe.div_ceil(64);
        let mut masks = vec![0u64; sets.len() * words];
        let mut sizes = Vec::with_capacity(sets.len());
        for (i, set) in sets.iter().enumerate() {
            let mask = &mut masks[i * words..(i + 1) * words];
            for &v in set {
                if v >= universe {
                    return Err(Error::invalid(format!(
                        "set {i} contains {v}, outside universe of size {universe}"
                    )));
                }
                mask[v / 64] |= 1u64 << (v % 64);
            }
            sizes.push(mask.iter().map(|w| w.count_ones()).sum());
        }
        Ok(CoverageInstance {
            universe,
            words,
            masks,
            sizes,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    pub fn num_sets(&self) -> usize {
        self.sizes.len()
    }

    pub fn set_size(&self, i: usize) -> u32 {
        self.sizes[i]
    }

    /// Per-set sizes as knapsack costs (`c(i) = |V_i|`).
    pub fn set_size_costs(&self) -> Vec<f64> {
        self.sizes.iter().map(|&s| s as f64).collect()
    }

    pub fn set_members(&self, i: usize) -> Vec<usize> {
        let mask = &self.masks[i * self.words..(i + 1) * self.words];
        (0..self.universe)
            .filter(|&v| mask[v / 64] >> (v % 64) & 1 == 1)
            .collect()
    }

    /// Number of universe elements covered by the union of the chosen sets.
    pub fn coverage_of(&self, solution: &Solution) -> u64 {
        let mut acc = vec![0u64; self.words];
        for i in solution.iter() {
            let mask = &self.masks[i * self.words..(i + 1) * self.words];
            for (a, &m) in acc.iter_mut().zip(mask) {
                *a |= m;
            }
        }
        acc.iter().map(|w| w.count_ones() as u64).sum()
    }
}

impl Objective for CoverageInstance {
    fn n(&self) -> usize {
        self.sizes.len()
    }

    fn name(&self) -> &str {
        "coverage"
    }

    fn evaluate(&self, solution: &Solution) -> f64 {
        self.coverage_of(solution) as f64
    }

    fn certified_submodular(&self) -> bool {
        true
    }

    fn value_scale(&self) -> Option<u64> {
        Some(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::graph::Graph;

    #[test]
    fn path_graph_sets_use_higher_neighbors() {
        // Path 0-1-2: V_0 = {0,1}, V_1 = {1,2}, V_2 = {2}.
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)], true, 0.1).unwrap();
        let inst = CoverageInstance::from_graph(&g);
        assert_eq!(inst.set_members(0), vec![0, 1]);
        assert_eq!(inst.set_members(1), vec![1, 2]);
        assert_eq!(inst.set_members(2), vec![2]);
        assert_eq!(inst.coverage_of(&Solution::from_elements([0])), 2);
        assert_eq!(inst.coverage_of(&Solution::from_elements([0, 2])), 3);
        assert_eq!(inst.coverage_of(&Solution::new()), 0);
    }

    #[test]
    fn closed_variant_uses_both_directions() {
        // Path 0-1-2: closed sets are N[0] = {0,1}, N[1] = {0,1,2},
        // N[2] = {1,2}; picking the middle vertex covers everything.
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)], true, 0.1).unwrap();
        let inst = CoverageInstance::from_graph_closed(&g);
        assert_eq!(inst.set_members(0), vec![0, 1]);
        assert_eq!(inst.set_members(1), vec![0, 1, 2]);
        assert_eq!(inst.set_members(2), vec![1, 2]);
        assert_eq!(inst.coverage_of(&Solution::from_elements([1])), 3);
    }

    #[test]
    fn set_size_sum_counts_each_edge_once() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 2), (2, 3)], true, 0.1).unwrap();
        let inst = CoverageInstance::from_graph(&g);
        let total: u64 = (0..4).map(|i| inst.set_size(i) as u64).sum();
        assert_eq!(total, 4 + 4);
    }

    #[test]
    fn explicit_sets_and_costs() {
        let inst = CoverageInstance::from_sets(5, &[vec![0, 1, 2], vec![2, 3], vec![4]]).unwrap();
        assert_eq!(inst.set_size_costs(), vec![3.0, 2.0, 1.0]);
        assert_eq!(inst.coverage_of(&Solution::from_elements([0, 1])), 4);
        assert!(CoverageInstance::from_sets(3, &[vec![3]]).is_err());
        assert!(CoverageInstance::from_sets(0, &[]).is_err());
    }

    #[test]
    fn wide_universe_crosses_word_boundaries() {
        let sets: Vec<Vec<usize>> = vec![(0..70).collect(), vec![69, 100]];
        let inst = CoverageInstance::from_sets(128, &sets).unwrap();
        assert_eq!(inst.coverage_of(&Solution::from_elements([0])), 70);
        assert_eq!(inst.coverage_of(&Solution::from_elements([0, 1])), 71);
        assert_eq!(inst.set_size(1), 2);
    }
}
