//! Influence spread under the independent-cascade model.
//!
//! A fixed-sample evaluator draws `r` live-edge subgraphs up front (each arc
//! kept independently with its probability) and reports the mean number of
//! vertices reachable from the chosen seed set across those samples. With the
//! samples frozen, the objective is a deterministic coverage-style function:
//! monotone and submodular.
//!
//! Small instances precompute, per sample, the reachability closure of every
//! vertex via strongly-connected-component condensation, making evaluation a
//! handful of bitset unions. Larger instances fall back to a breadth-first
//! search per evaluation. A fresh-sampling mode that redraws live edges on
//! every call exists for variance studies; it is neither deterministic under
//! call reordering nor submodular, and the rest of the crate expects the
//! fixed mode.

use std::sync::Mutex;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::core::{Objective, Solution};
use crate::error::{Error, Result};
use crate::problems::graph::Graph;

/// Default ceiling on closure storage: 8M u64 words (64 MB).
const CLOSURE_WORD_BUDGET: usize = 8 << 20;

#[derive(Debug)]
enum Mode {
    Fixed {
        /// r stripes of arc-liveness bits, each `arc_words` wide.
        live: Vec<u64>,
        /// Per sample, per vertex: reachable-set bitmask (`words` wide).
        reach: Option<Vec<u64>>,
    },
    Fresh {
        rng: Mutex<ChaCha8Rng>,
    },
}

#[derive(Debug)]
pub struct CascadeEvaluator {
    n: usize,
    r: usize,
    words: usize,
    arc_words: usize,
    arcs: Vec<(u32, u32)>,
    probs: Vec<f64>,
    offsets: Vec<u32>,
    out_arcs: Vec<u32>,
    mode: Mode,
}

impl CascadeEvaluator {
    /// Fixed-sample evaluator with the default closure budget.
    pub fn new(graph: &Graph, r: usize, seed: u64) -> Result<Self> {
        Self::with_closure_budget(graph, r, seed, CLOSURE_WORD_BUDGET)
    }

    /// Fixed-sample evaluator; `closure_word_budget` caps the precomputed
    /// reachability storage in u64 words (0 forces the per-evaluation BFS).
    pub fn with_closure_budget(
        graph: &Graph,
        r: usize,
        seed: u64,
        closure_word_budget: usize,
    ) -> Result<Self> {
        let mut ev = Self::bare(graph, r)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut live = vec![0u64; r * ev.arc_words];
        for s in 0..r {
            let stripe = &mut live[s * ev.arc_words..(s + 1) * ev.arc_words];
            for (a, &p) in ev.probs.iter().enumerate() {
                if rng.random::<f64>() < p {
                    stripe[a / 64] |= 1u64 << (a % 64);
                }
            }
        }
        let reach = if r * ev.n * ev.words <= closure_word_budget {
            let mut reach = vec![0u64; r * ev.n * ev.words];
            for s in 0..r {
                let stripe = &live[s * ev.arc_words..(s + 1) * ev.arc_words];
                let rows = &mut reach[s * ev.n * ev.words..(s + 1) * ev.n * ev.words];
                ev.sample_closure(stripe, rows);
            }
            Some(reach)
        } else {
            None
        };
        ev.mode = Mode::Fixed { live, reach };
        Ok(ev)
    }

    /// Redraws live edges on every evaluation. Values are random; two calls
    /// with the same argument differ.
    pub fn fresh(graph: &Graph, r: usize, seed: u64) -> Result<Self> {
        let mut ev = Self::bare(graph, r)?;
        ev.mode = Mode::Fresh {
            rng: Mutex::new(ChaCha8Rng::seed_from_u64(seed)),
        };
        Ok(ev)
    }

    fn bare(graph: &Graph, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::invalid("sample count r must be at least 1"));
        }
        let n = graph.n();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0u32;
        offsets.push(0);
        for v in 0..n {
            acc += graph.out_degree(v) as u32;
            offsets.push(acc);
        }
        Ok(CascadeEvaluator {
            n,
            r,
            words: n.div_ceil(64),
            arc_words: graph.num_arcs().div_ceil(64).max(1),
            arcs: graph.arcs().to_vec(),
            probs: graph.probs().to_vec(),
            offsets,
            out_arcs: (0..n)
                .flat_map(|v| graph.out_arc_indices(v).iter().copied())
                .collect(),
            mode: Mode::Fixed {
                live: Vec::new(),
                reach: None,
            },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self.mode, Mode::Fixed { .. })
    }

    pub fn uses_closure(&self) -> bool {
        matches!(self.mode, Mode::Fixed { reach: Some(_), .. })
    }

    /// Liveness of an arc in a fixed sample; None in fresh mode.
    pub fn live_arc(&self, sample: usize, arc: usize) -> Option<bool> {
        match &self.mode {
            Mode::Fixed { live, .. } => {
                let w = live[sample * self.arc_words + arc / 64];
                Some(w >> (arc % 64) & 1 == 1)
            }
            Mode::Fresh { .. } => None,
        }
    }

    /// Mean reachable-vertex count across samples.
    pub fn spread(&self, solution: &Solution) -> f64 {
        if solution.is_empty() {
            return 0.0;
        }
        let total = match &self.mode {
            Mode::Fixed {
                reach: Some(reach), ..
            } => {
                let mut total = 0u64;
                let mut acc = vec![0u64; self.words];
                for s in 0..self.r {
                    let rows = &reach[s * self.n * self.words..(s + 1) * self.n * self.words];
                    acc.fill(0);
                    for v in solution.iter() {
                        let row = &rows[v * self.words..(v + 1) * self.words];
                        for (a, &w) in acc.iter_mut().zip(row) {
                            *a |= w;
                        }
                    }
                    total += acc.iter().map(|w| w.count_ones() as u64).sum::<u64>();
                }
                total
            }
            Mode::Fixed { live, .. } => {
                let mut total = 0u64;
                for s in 0..self.r {
                    let stripe = &live[s * self.arc_words..(s + 1) * self.arc_words];
                    total +=
                        self.bfs_count(solution, |arc| stripe[arc / 64] >> (arc % 64) & 1 == 1);
                }
                total
            }
            Mode::Fresh { rng } => {
                let mut rng = rng.lock().expect("cascade rng poisoned");
                let mut total = 0u64;
                for _ in 0..self.r {
                    // Deferred decisions: each arc out of an activated vertex
                    // is flipped exactly once.
                    total += self.bfs_count(solution, |arc| rng.random::<f64>() < self.probs[arc]);
                }
                total
            }
        };
        total as f64 / self.r as f64
    }

    /// One reachability BFS; `is_live` decides arc traversal.
    fn bfs_count(&self, seeds: &Solution, mut is_live: impl FnMut(usize) -> bool) -> u64 {
        let mut visited = vec![0u64; self.words];
        let mut queue: Vec<u32> = Vec::new();
        for v in seeds.iter() {
            visited[v / 64] |= 1u64 << (v % 64);
            queue.push(v as u32);
        }
        while let Some(u) = queue.pop() {
            let (lo, hi) = (self.offsets[u as usize], self.offsets[u as usize + 1]);
            for &arc in &self.out_arcs[lo as usize..hi as usize] {
                let head = self.arcs[arc as usize].1 as usize;
                let seen = visited[head / 64] >> (head % 64) & 1 == 1;
                if is_live(arc as usize) && !seen {
                    visited[head / 64] |= 1u64 << (head % 64);
                    queue.push(head as u32);
                }
            }
        }
        visited.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Per-vertex reachability closure of one live-edge sample, written into
    /// `rows` (n stripes of `words`). Condenses strongly connected
    /// components, then accumulates reach masks in reverse-topological
    /// order, so each component's successors are final when it is processed.
    fn sample_closure(&self, live: &[u64], rows: &mut [u64]) {
        let mut g: DiGraph<(), (), u32> = DiGraph::with_capacity(self.n, 0);
        for _ in 0..self.n {
            g.add_node(());
        }
        for (a, &(u, v)) in self.arcs.iter().enumerate() {
            if live[a / 64] >> (a % 64) & 1 == 1 {
                g.add_edge(NodeIndex::new(u as usize), NodeIndex::new(v as usize), ());
            }
        }
        // Emitted in postorder: successors of a component always precede it.
        let sccs = tarjan_scc(&g);
        let words = self.words;
        let mut scc_of = vec![0u32; self.n];
        for (k, scc) in sccs.iter().enumerate() {
            for node in scc {
                scc_of[node.index()] = k as u32;
            }
        }
        let mut scc_reach = vec![0u64; sccs.len() * words];
        for (k, scc) in sccs.iter().enumerate() {
            let (done, rest) = scc_reach.split_at_mut(k * words);
            let row = &mut rest[..words];
            for node in scc {
                let v = node.index();
                row[v / 64] |= 1u64 << (v % 64);
            }
            for node in scc {
                let v = node.index();
                let (lo, hi) = (self.offsets[v], self.offsets[v + 1]);
                for &arc in &self.out_arcs[lo as usize..hi as usize] {
                    if live[arc as usize / 64] >> (arc as usize % 64) & 1 != 1 {
                        continue;
                    }
                    let j = scc_of[self.arcs[arc as usize].1 as usize] as usize;
                    if j != k {
                        let src = &done[j * words..(j + 1) * words];
                        for (a, &w) in row.iter_mut().zip(src) {
                            *a |= w;
                        }
                    }
                }
            }
        }
        for v in 0..self.n {
            let j = scc_of[v] as usize;
            rows[v * words..(v + 1) * words]
                .copy_from_slice(&scc_reach[j * words..(j + 1) * words]);
        }
    }
}

impl Objective for CascadeEvaluator {
    fn n(&self) -> usize {
        self.n
    }

    fn name(&self) -> &str {
        "influence"
    }

    fn evaluate(&self, solution: &Solution) -> f64 {
        self.spread(solution)
    }

    fn certified_submodular(&self) -> bool {
        self.is_fixed()
    }

    fn value_scale(&self) -> Option<u64> {
        if self.is_fixed() {
            Some(self.r as u64)
        } else {
            None
        }
    }
}
