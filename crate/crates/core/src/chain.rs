//! Chains of trivial components and the leaf-elimination filling plan.
//!
//! A chain is a set of trivial link components in which every pair is either
//! Hopf-linked or unlinked, encoded as a graph: one vertex per component,
//! one edge per Hopf-linked pair, and a `(1, p)` filling coefficient per
//! vertex. When the graph is a forest, performing all the fillings at once
//! still yields a link complement: filling a leaf inserts its twists and
//! turns its parent's filling into a `(1, p_parent + p_leaf)` filling, so
//! leaves can be eliminated one at a time. [`fill_chain`] materializes that
//! argument as an explicit plan.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("chain contains a cycle: {}", cycle.join(" - "))]
    Cycle { cycle: Vec<String> },
    #[error("unknown component `{name}`")]
    UnknownVertex { name: String },
    #[error("component `{name}` is already present")]
    DuplicateVertex { name: String },
    #[error("edge {a} - {b} is already present")]
    DuplicateEdge { a: String, b: String },
    #[error("component `{name}` cannot be linked with itself")]
    SelfLoop { name: String },
    #[error("{reason}")]
    BadParameters { reason: String },
    #[error("cannot read chain file: {0}")]
    Io(String),
    #[error("chain file parse error: {0}")]
    Parse(#[from] toml::de::Error),
}

/// A chain of trivial components with filling coefficients.
///
/// Vertices stand for trivial components; edges for Hopf-linked pairs.
#[derive(Debug, Clone, Default)]
pub struct ChainGraph {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    coefficients: Vec<i64>,
    strands: Vec<Option<u64>>,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl ChainGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: &str, coefficient: i64) -> Result<usize, ChainError> {
        if self.index.contains_key(name) {
            return Err(ChainError::DuplicateVertex { name: name.to_owned() });
        }
        let id = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        self.coefficients.push(coefficient);
        self.strands.push(None);
        self.adjacency.push(Vec::new());
        Ok(id)
    }

    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<(), ChainError> {
        let ia = self.lookup(a)?;
        let ib = self.lookup(b)?;
        if ia == ib {
            return Err(ChainError::SelfLoop { name: a.to_owned() });
        }
        if self.adjacency[ia].contains(&ib) {
            return Err(ChainError::DuplicateEdge { a: a.to_owned(), b: b.to_owned() });
        }
        self.adjacency[ia].push(ib);
        self.adjacency[ib].push(ia);
        self.edge_count += 1;
        Ok(())
    }

    /// Number of strands through the disk bounded by a component, when known.
    pub fn set_strands(&mut self, name: &str, strands: u64) -> Result<(), ChainError> {
        let id = self.lookup(name)?;
        self.strands[id] = Some(strands);
        Ok(())
    }

    pub fn set_coefficient(&mut self, name: &str, coefficient: i64) -> Result<(), ChainError> {
        let id = self.lookup(name)?;
        self.coefficients[id] = coefficient;
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertex_names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn coefficient(&self, name: &str) -> Result<i64, ChainError> {
        Ok(self.coefficients[self.lookup(name)?])
    }

    fn lookup(&self, name: &str) -> Result<usize, ChainError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ChainError::UnknownVertex { name: name.to_owned() })
    }

    /// Parse from the key/value chain document format.
    pub fn from_toml_str(text: &str) -> Result<Self, ChainError> {
        let raw: RawChain = toml::from_str(text)?;
        let mut g = ChainGraph::new();
        // BTreeMap iteration gives a stable vertex order.
        for (name, coefficient) in &raw.vertices {
            g.add_vertex(name, *coefficient)?;
        }
        for (a, b) in &raw.edges {
            g.add_edge(a, b)?;
        }
        for (name, strands) in &raw.strands {
            g.set_strands(name, *strands)?;
        }
        Ok(g)
    }

    pub fn from_path(path: &Path) -> Result<Self, ChainError> {
        let text = std::fs::read_to_string(path).map_err(|e| ChainError::Io(e.to_string()))?;
        Self::from_toml_str(&text)
    }

    /// Find some cycle, as a list of vertex names, if one exists.
    fn find_cycle(&self) -> Option<Vec<String>> {
        let n = self.vertex_count();
        let mut visited = vec![false; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            if visited[root] {
                continue;
            }
            // Iterative DFS keeping the tree parent of each vertex.
            let mut stack = vec![(root, usize::MAX)];
            while let Some((v, from)) = stack.pop() {
                if visited[v] {
                    continue;
                }
                visited[v] = true;
                parent[v] = from;
                for &w in &self.adjacency[v] {
                    if w == from {
                        continue;
                    }
                    if visited[w] {
                        // Back edge v-w closes a cycle; walk v up to w.
                        let mut cycle = vec![self.names[w].clone()];
                        let mut cur = v;
                        while cur != w && cur != usize::MAX {
                            cycle.push(self.names[cur].clone());
                            cur = parent[cur];
                        }
                        cycle.reverse();
                        return Some(cycle);
                    }
                    stack.push((w, v));
                }
            }
        }
        None
    }

    /// Connected components, each sorted by name; components ordered by
    /// their smallest member.
    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        for root in order {
            if seen[root] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![root];
            seen[root] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
            out.push(comp);
        }
        out
    }
}

/// Result of [`check_chain`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChainCheck {
    /// True exactly when the graph is a forest.
    pub acyclic: bool,
    /// The vertices of each tree (connected component).
    pub trees: Vec<Vec<String>>,
}

/// Decide whether the chain graph is a forest and list its trees.
pub fn check_chain(graph: &ChainGraph) -> ChainCheck {
    let acyclic = graph.find_cycle().is_none();
    let trees = graph
        .components()
        .into_iter()
        .map(|comp| comp.into_iter().map(|v| graph.names[v].clone()).collect())
        .collect();
    ChainCheck { acyclic, trees }
}

/// One elimination step: fill the component with its accumulated coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillingStep {
    pub component: String,
    /// Full twists inserted when this component is filled.
    pub twist_count: i64,
    /// Strands through its disk, when recorded.
    pub strand_count: Option<u64>,
}

/// A complete elimination order certifying that the filled manifold is
/// again a link complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillingPlan {
    pub steps: Vec<FillingStep>,
    /// Final accumulated coefficient per component, same data as the steps.
    pub residual_coefficients: BTreeMap<String, i64>,
}

/// Eliminate leaves round by round, folding each leaf's coefficient into
/// its parent. Within a round the current leaves go in name order; a vertex
/// that only becomes a leaf during a round waits for the next one, so tree
/// centers are filled last. Fails with the offending cycle if the graph is
/// not a forest.
pub fn fill_chain(graph: &ChainGraph) -> Result<FillingPlan, ChainError> {
    if let Some(cycle) = graph.find_cycle() {
        return Err(ChainError::Cycle { cycle });
    }
    let n = graph.vertex_count();
    let mut rank = vec![0usize; n];
    {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| graph.names[a].cmp(&graph.names[b]));
        for (r, v) in order.into_iter().enumerate() {
            rank[v] = r;
        }
    }
    let mut degree: Vec<usize> = graph.adjacency.iter().map(Vec::len).collect();
    let mut coeff = graph.coefficients.clone();
    let mut eliminated = vec![false; n];
    let mut queued = vec![false; n];
    let mut round: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    for &v in &round {
        queued[v] = true;
    }
    let mut steps = Vec::with_capacity(n);
    let mut residual = BTreeMap::new();
    while !round.is_empty() {
        round.sort_by_key(|&v| rank[v]);
        let mut next_round = Vec::new();
        for v in round {
            eliminated[v] = true;
            steps.push(FillingStep {
                component: graph.names[v].clone(),
                twist_count: coeff[v],
                strand_count: graph.strands[v],
            });
            residual.insert(graph.names[v].clone(), coeff[v]);
            if let Some(&parent) = graph.adjacency[v].iter().find(|&&w| !eliminated[w]) {
                // The parent's filling becomes (1, p_parent + p_leaf).
                coeff[parent] += coeff[v];
                degree[parent] -= 1;
                if degree[parent] <= 1 && !queued[parent] {
                    queued[parent] = true;
                    next_round.push(parent);
                }
            }
        }
        round = next_round;
    }
    debug_assert_eq!(steps.len(), n);
    Ok(FillingPlan { steps, residual_coefficients: residual })
}

/// Chain skeleton of the daisy-chain cover construction: the components not
/// kept as cusps form two disjoint paths of `m (n − 4) / 2` vertices each.
/// Requires even `n > 4` and `m ≥ 1`; filling coefficients default to 1.
pub fn daisy_cover_skeleton(n: u64, m: u64) -> Result<ChainGraph, ChainError> {
    if n <= 4 || !n.is_multiple_of(2) {
        return Err(ChainError::BadParameters {
            reason: format!("chain length n must be even and greater than 4, got {n}"),
        });
    }
    if m == 0 {
        return Err(ChainError::BadParameters {
            reason: "cover degree m must be at least 1".to_owned(),
        });
    }
    let per_path = (m * (n - 4) / 2) as usize;
    let mut g = ChainGraph::new();
    for prefix in ["A", "B"] {
        let mut prev: Option<String> = None;
        for i in 1..=per_path {
            let name = format!("{prefix}{i}");
            g.add_vertex(&name, 1)?;
            if let Some(p) = prev {
                g.add_edge(&p, &name)?;
            }
            prev = Some(name);
        }
    }
    Ok(g)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChain {
    #[serde(default)]
    vertices: BTreeMap<String, i64>,
    #[serde(default)]
    edges: Vec<(String, String)>,
    #[serde(default)]
    strands: BTreeMap<String, u64>,
}
