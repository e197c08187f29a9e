use std::collections::BTreeMap;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use serde::Serialize;

use super::{ChannelInput, FiniteChannel};
use crate::error::{Error, Result};
use crate::exact::Q;

/// Simple undirected graph whose vertices are channel inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusabilityGraph {
    labels: Vec<ChannelInput>,
    adj: Vec<FixedBitSet>,
}

impl ConfusabilityGraph {
    /// Vertex `v` is labelled `labels[v]`. Self-loops are rejected.
    pub fn from_edges(labels: Vec<ChannelInput>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop on {}", labels[a])));
            }
            adj[a].insert(b);
            adj[b].insert(a);
        }
        Ok(Self { labels, adj })
    }

    /// Unlabelled graph on `n` vertices, labelled `(0, v)`.
    pub fn plain(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges((0..n).map(|v| ChannelInput::new(0, v)).collect(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[ChannelInput] {
        &self.labels
    }

    pub fn vertex_of(&self, label: ChannelInput) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.vertex_count())
            .flat_map(|a| self.adj[a].ones().filter(move |&b| b > a).map(move |b| (a, b)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|s| s.count_ones(..)).sum::<usize>() / 2
    }

    /// First adjacent pair inside `vertices`, if any.
    pub fn conflict(&self, vertices: &[usize]) -> Option<(usize, usize)> {
        vertices
            .iter()
            .tuple_combinations()
            .find(|(&a, &b)| self.adjacent(a, b))
            .map(|(&a, &b)| (a, b))
    }

    /// Text edge list: one `v m j` line per vertex, then one `e m j m' j'`
    /// line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# {} vertices, {} edges", self.vertex_count(), self.edge_count()).unwrap();
        for l in &self.labels {
            writeln!(out, "v {} {}", l.m, l.j).unwrap();
        }
        for (a, b) in self.edges() {
            let (x, y) = (self.labels[a], self.labels[b]);
            writeln!(out, "e {} {} {} {}", x.m, x.j, y.m, y.j).unwrap();
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut labels = Vec::new();
        let mut index = BTreeMap::new();
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Parse(format!("edge list line {}: {line:?}", lineno + 1));
            let mut parts = line.split_whitespace();
            let kind = parts.next().ok_or_else(bad)?;
            let nums: Vec<usize> = parts.map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?;
            match (kind, nums.as_slice()) {
                ("v", &[m, j]) => {
                    let l = ChannelInput::new(m, j);
                    if index.insert(l, labels.len()).is_some() {
                        return Err(bad());
                    }
                    labels.push(l);
                }
                ("e", &[m, j, m2, j2]) => {
                    let a = *index.get(&ChannelInput::new(m, j)).ok_or_else(bad)?;
                    let b = *index.get(&ChannelInput::new(m2, j2)).ok_or_else(bad)?;
                    edges.push((a, b));
                }
                _ => return Err(bad()),
            }
        }
        Self::from_edges(labels, &edges)
    }
}

/// Inputs `i`, `i'` are adjacent when some output has positive probability
/// under both. Works for any output alphabet.
pub fn confusability_graph_from_rows<O: Ord>(
    labels: Vec<ChannelInput>,
    rows: &[BTreeMap<O, Q>],
) -> Result<ConfusabilityGraph> {
    assert_eq!(labels.len(), rows.len());
    let mut edges = Vec::new();
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            if rows[a].keys().any(|o| rows[b].contains_key(o)) {
                edges.push((a, b));
            }
        }
    }
    ConfusabilityGraph::from_edges(labels, &edges)
}

pub fn confusability_graph(ch: &FiniteChannel) -> ConfusabilityGraph {
    confusability_graph_from_rows(ch.inputs().collect(), ch.rows()).expect("rows match inputs")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependentSet {
    pub size: usize,
    pub vertices: Vec<usize>,
    pub labels: Vec<ChannelInput>,
}

struct MisSearch<'a> {
    g: &'a ConfusabilityGraph,
    best: Vec<usize>,
}

impl MisSearch<'_> {
    /// Greedy clique cover of `cand`; its size bounds the independence number
    /// of the induced subgraph.
    fn clique_cover(&self, cand: &FixedBitSet) -> usize {
        let mut left = cand.clone();
        let mut cliques = 0;
        while let Some(v) = left.ones().next() {
            cliques += 1;
            let mut common = self.g.adj[v].clone();
            common.intersect_with(&left);
            left.set(v, false);
            while let Some(u) = common.ones().next() {
                left.set(u, false);
                common.set(u, false);
                common.intersect_with(&self.g.adj[u]);
            }
        }
        cliques
    }

    fn expand(&mut self, current: &mut Vec<usize>, cand: FixedBitSet) {
        let Some(v) = cand.ones().next() else {
            if current.len() > self.best.len() {
                self.best = current.clone();
            }
            return;
        };
        if current.len() + self.clique_cover(&cand) <= self.best.len() {
            return;
        }
        let mut with_v = cand.clone();
        with_v.set(v, false);
        with_v.difference_with(&self.g.adj[v]);
        current.push(v);
        self.expand(current, with_v);
        current.pop();

        let mut without_v = cand;
        without_v.set(v, false);
        self.expand(current, without_v);
    }
}

/// Exact maximum independent set by branch and bound with a greedy clique
/// cover bound.
pub fn independence_number(g: &ConfusabilityGraph) -> IndependentSet {
    let n = g.vertex_count();
    let mut search = MisSearch { g, best: Vec::new() };
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    search.expand(&mut Vec::new(), all);
    let mut vertices = search.best;
    vertices.sort_unstable();
    IndependentSet {
        size: vertices.len(),
        labels: vertices.iter().map(|&v| g.labels[v]).collect(),
        vertices,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetScan {
    pub size: usize,
    pub subsets_checked: u64,
    pub first_independent: Option<Vec<usize>>,
}

/// Checks every `size`-subset of vertices for independence.
pub fn scan_independent_subsets(g: &ConfusabilityGraph, size: usize) -> SubsetScan {
    let mut checked = 0u64;
    let mut first = None;
    for subset in (0..g.vertex_count()).combinations(size) {
        checked += 1;
        if first.is_none() && g.conflict(&subset).is_none() {
            first = Some(subset);
        }
    }
    SubsetScan {
        size,
        subsets_checked: checked,
        first_independent: first,
    }
}
