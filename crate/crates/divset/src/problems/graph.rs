//! Graph ingestion and the shared directed-graph representation.
//!
//! Two text formats are accepted: DIMACS ("c" comments, "p edge <n> <m>",
//! "e <u> <v>" with 1-based vertices) and a plain edge list of
//! "<u> <v>[ <p>]" lines with 0-based vertices and an optional per-arc
//! probability.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::core::CostModel;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Auto,
    Dimacs,
    EdgeList,
}

/// Ingestion bookkeeping reported alongside the parsed graph.
#[derive(Clone, Debug, Default)]
pub struct IngestStats {
    pub declared_vertices: Option<usize>,
    pub declared_edges: Option<usize>,
    pub input_lines: usize,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
    pub symmetrized: bool,
    /// Header declared an edge count that does not match the parsed count.
    pub edge_count_mismatch: bool,
}

/// A directed graph with per-arc propagation probabilities.
///
/// When built with `symmetrize`, every undirected input edge contributes two
/// opposite arcs. Undirected structure (for coverage-style neighborhoods) is
/// always derived from arcs in either direction.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    arcs: Vec<(u32, u32)>,
    probs: Vec<f64>,
    /// CSR over arc indices: out_arcs[offsets[v]..offsets[v+1]].
    offsets: Vec<u32>,
    out_arcs: Vec<u32>,
    undirected_edges: usize,
    stats: IngestStats,
}

impl Graph {
    /// Builds a graph from explicit edges. With `symmetrize`, input pairs are
    /// treated as undirected edges; otherwise as directed arcs.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize)],
        symmetrize: bool,
        default_p: f64,
    ) -> Result<Self> {
        let raw: Vec<RawEdge> = edges
            .iter()
            .map(|&(u, v)| RawEdge {
                u,
                v,
                p: None,
                line: 0,
            })
            .collect();
        build_graph(Some(n), raw, symmetrize, default_p, IngestStats::default())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    /// Number of distinct unordered adjacent pairs.
    pub fn undirected_edge_count(&self) -> usize {
        self.undirected_edges
    }

    pub fn arcs(&self) -> &[(u32, u32)] {
        &self.arcs
    }

    pub fn prob(&self, arc: usize) -> f64 {
        self.probs[arc]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Arc indices leaving `v`.
    pub fn out_arc_indices(&self, v: usize) -> &[u32] {
        &self.out_arcs[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    pub fn stats(&self) -> &IngestStats {
        &self.stats
    }

    /// Neighbor sets ignoring direction, each sorted ascending.
    pub fn undirected_neighbors(&self) -> Vec<Vec<u32>> {
        let mut nbrs = vec![Vec::new(); self.n];
        for &(u, v) in &self.arcs {
            nbrs[u as usize].push(v);
            nbrs[v as usize].push(u);
        }
        for list in &mut nbrs {
            list.sort_unstable();
            list.dedup();
        }
        nbrs
    }
}

/// Knapsack cost model where element `v` costs `outdegree(v) + 1`.
pub fn degree_cost_model(graph: &Graph, budget: f64, margin: f64) -> Result<CostModel> {
    let costs = (0..graph.n())
        .map(|v| graph.out_degree(v) as f64 + 1.0)
        .collect();
    CostModel::knapsack(costs, budget, margin)
}

/// Reads and parses a graph file.
pub fn ingest_graph(
    path: impl AsRef<Path>,
    format: GraphFormat,
    symmetrize: bool,
    default_p: f64,
) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: 0,
        msg: format!("cannot open: {e}"),
    })?;
    parse_graph(
        BufReader::new(file),
        &path.display().to_string(),
        format,
        symmetrize,
        default_p,
    )
}

/// Parses a graph from any reader; `label` names the source in errors.
pub fn parse_graph(
    reader: impl Read,
    label: &str,
    format: GraphFormat,
    symmetrize: bool,
    default_p: f64,
) -> Result<Graph> {
    if !(0.0..=1.0).contains(&default_p) {
        return Err(Error::invalid(format!(
            "default probability must lie in [0, 1], got {default_p}"
        )));
    }
    let mut lines = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            path: label.to_string(),
            line: i + 1,
            msg: e.to_string(),
        })?;
        lines.push(line);
    }
    let format = match format {
        GraphFormat::Auto => detect_format(&lines),
        f => f,
    };
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: label.to_string(),
        line,
        msg,
    };

    let mut stats = IngestStats {
        input_lines: lines.len(),
        ..IngestStats::default()
    };
    let mut raw = Vec::new();
    let mut declared_n = None;

    match format {
        GraphFormat::Dimacs => {
            for (i, line) in lines.iter().enumerate() {
                let lineno = i + 1;
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('c') {
                    continue;
                }
                let fields: Vec<&str> = trimmed.split_whitespace().collect();
                match fields[0] {
                    "p" => {
                        if fields.len() != 4 {
                            return Err(parse_err(
                                lineno,
                                format!(
                                    "expected 'p <format> <vertices> <edges>', got '{trimmed}'"
                                ),
                            ));
                        }
                        let n: usize = fields[2].parse().map_err(|_| {
                            parse_err(lineno, format!("bad vertex count '{}'", fields[2]))
                        })?;
                        let m: usize = fields[3].parse().map_err(|_| {
                            parse_err(lineno, format!("bad edge count '{}'", fields[3]))
                        })?;
                        declared_n = Some(n);
                        stats.declared_vertices = Some(n);
                        stats.declared_edges = Some(m);
                    }
                    "e" => {
                        if fields.len() != 3 {
                            return Err(parse_err(
                                lineno,
                                format!("expected 'e <u> <v>', got '{trimmed}'"),
                            ));
                        }
                        let n = declared_n.ok_or_else(|| {
                            parse_err(lineno, "edge line before problem header".to_string())
                        })?;
                        let u: usize = fields[1].parse().map_err(|_| {
                            parse_err(lineno, format!("bad vertex '{}'", fields[1]))
                        })?;
                        let v: usize = fields[2].parse().map_err(|_| {
                            parse_err(lineno, format!("bad vertex '{}'", fields[2]))
                        })?;
                        if u == 0 || v == 0 || u > n || v > n {
                            return Err(parse_err(
                                lineno,
                                format!("vertex out of range 1..={n} in '{trimmed}'"),
                            ));
                        }
                        raw.push(RawEdge {
                            u: u - 1,
                            v: v - 1,
                            p: None,
                            line: lineno,
                        });
                    }
                    other => {
                        return Err(parse_err(
                            lineno,
                            format!("unrecognized line type '{other}'"),
                        ));
                    }
                }
            }
            if declared_n.is_none() {
                return Err(parse_err(lines.len(), "missing problem header".to_string()));
            }
        }
        GraphFormat::EdgeList => {
            for (i, line) in lines.iter().enumerate() {
                let lineno = i + 1;
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    continue;
                }
                let fields: Vec<&str> = trimmed.split_whitespace().collect();
                if fields.len() != 2 && fields.len() != 3 {
                    return Err(parse_err(
                        lineno,
                        format!("expected '<u> <v>[ <p>]', got '{trimmed}'"),
                    ));
                }
                let u: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad vertex '{}'", fields[0])))?;
                let v: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad vertex '{}'", fields[1])))?;
                let p = match fields.get(2) {
                    None => None,
                    Some(s) => {
                        let p: f64 = s
                            .parse()
                            .map_err(|_| parse_err(lineno, format!("bad probability '{s}'")))?;
                        if !(0.0..=1.0).contains(&p) {
                            return Err(parse_err(
                                lineno,
                                format!("probability {p} outside [0, 1]"),
                            ));
                        }
                        Some(p)
                    }
                };
                raw.push(RawEdge {
                    u,
                    v,
                    p,
                    line: lineno,
                });
            }
            if raw.is_empty() {
                return Err(parse_err(lines.len(), "no edges found".to_string()));
            }
        }
        GraphFormat::Auto => unreachable!(),
    }

    build_graph(declared_n, raw, symmetrize, default_p, stats)
}

struct RawEdge {
    u: usize,
    v: usize,
    p: Option<f64>,
    line: usize,
}

fn detect_format(lines: &[String]) -> GraphFormat {
    for line in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        return if trimmed.starts_with("c ")
            || trimmed == "c"
            || trimmed.starts_with("p ")
            || trimmed.starts_with("e ")
        {
            GraphFormat::Dimacs
        } else {
            GraphFormat::EdgeList
        };
    }
    GraphFormat::EdgeList
}

fn build_graph(
    declared_n: Option<usize>,
    raw: Vec<RawEdge>,
    symmetrize: bool,
    default_p: f64,
    mut stats: IngestStats,
) -> Result<Graph> {
    let n = match declared_n {
        Some(n) => n,
        None => raw.iter().map(|e| e.u.max(e.v) + 1).max().unwrap_or(0),
    };
    if n == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    if let Some(bad) = raw.iter().find(|e| e.u >= n || e.v >= n) {
        return Err(Error::invalid(format!(
            "line {}: edge ({}, {}) outside vertex range 0..{n}",
            bad.line, bad.u, bad.v
        )));
    }
    let raw_edge_lines = raw.len();

    // Drop self-loops, canonicalize, and collapse duplicates. Under
    // symmetrize the unordered pair identifies an edge; otherwise the
    // ordered pair identifies an arc. First occurrence wins, so a line's
    // explicit probability is kept over later duplicates.
    let mut kept: Vec<RawEdge> = Vec::with_capacity(raw.len());
    let mut seen = std::collections::HashSet::new();
    for e in raw {
        if e.u == e.v {
            stats.self_loops_dropped += 1;
            continue;
        }
        let key = if symmetrize {
            (e.u.min(e.v), e.u.max(e.v))
        } else {
            (e.u, e.v)
        };
        if seen.insert(key) {
            kept.push(e);
        } else {
            stats.duplicates_collapsed += 1;
        }
    }
    // Deterministic arc order regardless of input order.
    kept.sort_unstable_by_key(|e| {
        if symmetrize {
            (e.u.min(e.v), e.u.max(e.v))
        } else {
            (e.u, e.v)
        }
    });

    let mut arcs: Vec<(u32, u32)> = Vec::new();
    let mut probs: Vec<f64> = Vec::new();
    for e in &kept {
        let p = e.p.unwrap_or(default_p);
        if symmetrize {
            let (a, b) = (e.u.min(e.v) as u32, e.u.max(e.v) as u32);
            arcs.push((a, b));
            probs.push(p);
            arcs.push((b, a));
            probs.push(p);
        } else {
            arcs.push((e.u as u32, e.v as u32));
            probs.push(p);
        }
    }
    stats.symmetrized = symmetrize;
    if let Some(declared) = stats.declared_edges {
        stats.edge_count_mismatch = declared != raw_edge_lines;
    }

    // Undirected edge count: distinct unordered pairs among arcs.
    let undirected_edges = if symmetrize {
        kept.len()
    } else {
        let mut pairs: Vec<(u32, u32)> = arcs.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs.len()
    };

    // CSR over arc indices sorted by source.
    let mut offsets = vec![0u32; n + 1];
    for &(u, _) in &arcs {
        offsets[u as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut out_arcs = vec![0u32; arcs.len()];
    for (idx, &(u, _)) in arcs.iter().enumerate() {
        out_arcs[cursor[u as usize] as usize] = idx as u32;
        cursor[u as usize] += 1;
    }

    Ok(Graph {
        n,
        arcs,
        probs,
        offsets,
        out_arcs,
        undirected_edges,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, format: GraphFormat, symmetrize: bool) -> Result<Graph> {
        parse_graph(text.as_bytes(), "test", format, symmetrize, 0.1)
    }

    #[test]
    fn parses_dimacs_one_based() {
        let g = parse(
            "c a comment\np edge 3 2\ne 1 2\ne 2 3\n",
            GraphFormat::Auto,
            true,
        )
        .unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.undirected_edge_count(), 2);
        assert_eq!(g.num_arcs(), 4);
        assert_eq!(g.stats().declared_vertices, Some(3));
        assert!(!g.stats().edge_count_mismatch);
    }

    #[test]
    fn parses_edge_list_with_probability() {
        let g = parse("# header\n0 1 0.25\n1 2\n", GraphFormat::Auto, false).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.num_arcs(), 2);
        assert_eq!(g.prob(0), 0.25);
        assert_eq!(g.prob(1), 0.1);
        assert_eq!(g.undirected_edge_count(), 2);
    }

    #[test]
    fn drops_self_loops_and_duplicates() {
        let g = parse("0 0\n0 1\n1 0\n0 1\n", GraphFormat::EdgeList, true).unwrap();
        assert_eq!(g.stats().self_loops_dropped, 1);
        assert_eq!(g.stats().duplicates_collapsed, 2);
        assert_eq!(g.undirected_edge_count(), 1);
        assert_eq!(g.num_arcs(), 2);
    }

    #[test]
    fn directed_mode_keeps_orientations() {
        let g = parse("0 1\n1 0\n", GraphFormat::EdgeList, false).unwrap();
        assert_eq!(g.num_arcs(), 2);
        assert_eq!(g.undirected_edge_count(), 1);
        assert_eq!(g.stats().duplicates_collapsed, 0);
    }

    #[test]
    fn rejects_malformed_lines() {
        let err = parse("p edge 3 1\ne 1 4\n", GraphFormat::Dimacs, true).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("test:2"), "got: {msg}");
        assert!(parse("0 1 2 3\n", GraphFormat::EdgeList, true).is_err());
        assert!(parse("0 1 1.5\n", GraphFormat::EdgeList, true).is_err());
        assert!(parse("e 1 2\n", GraphFormat::Dimacs, true).is_err());
    }

    #[test]
    fn out_adjacency_matches_arcs() {
        let g = parse("0 1\n0 2\n2 1\n", GraphFormat::EdgeList, false).unwrap();
        let arcs0: Vec<(u32, u32)> = g
            .out_arc_indices(0)
            .iter()
            .map(|&a| g.arcs()[a as usize])
            .collect();
        assert_eq!(arcs0, vec![(0, 1), (0, 2)]);
        assert_eq!(g.out_degree(0), 2);
        assert_eq!(g.out_degree(1), 0);
        assert_eq!(g.out_degree(2), 1);
    }

    #[test]
    fn undirected_neighbors_ignore_direction() {
        let g = parse("0 1\n2 0\n", GraphFormat::EdgeList, false).unwrap();
        let nbrs = g.undirected_neighbors();
        assert_eq!(nbrs[0], vec![1, 2]);
        assert_eq!(nbrs[1], vec![0]);
        assert_eq!(nbrs[2], vec![0]);
    }

    #[test]
    fn degree_costs_are_outdegree_plus_one() {
        let g = Graph::from_edges(3, &[(0, 1), (0, 2)], true, 0.05).unwrap();
        let model = degree_cost_model(&g, 4.0, 0.0).unwrap();
        // Symmetrized: vertex 0 has outdegree 2, vertices 1 and 2 have 1.
        assert_eq!(model.item_costs().unwrap(), &[3.0, 2.0, 2.0]);
    }
}
