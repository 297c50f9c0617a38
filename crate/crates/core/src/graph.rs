//! Directed simple graphs with opaque string ids and dense indices.
//!
//! Friends are out-edges and followers are in-edges. Adjacency is kept in
//! both directions, sorted, so membership tests are binary searches.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::write_atomic;

/// Counts of what was dropped while ingesting an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub duplicates: usize,
    pub self_loops: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl DirectedGraph {
    /// Builds a graph over `ids` from index pairs. Self-loops and duplicate
    /// edges are dropped and tallied.
    pub fn from_index_edges<I>(ids: Vec<String>, edges: I) -> Result<(Self, IngestStats)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if ids.is_empty() {
            return Err(Error::invalid("a graph needs at least one node"));
        }
        let n = ids.len();
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate node id `{id}`")));
            }
        }
        let mut out_adj = vec![Vec::new(); n];
        let mut stats = IngestStats::default();
        let mut raw = 0usize;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge ({u},{v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            out_adj[u].push(v);
            raw += 1;
        }
        let mut in_adj = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (u, succ) in out_adj.iter_mut().enumerate() {
            succ.sort_unstable();
            succ.dedup();
            edge_count += succ.len();
            for &v in succ.iter() {
                in_adj[v].push(u);
            }
        }
        // in_adj is filled in increasing u, so it is already sorted.
        stats.duplicates = raw - edge_count;
        Ok((
            DirectedGraph {
                ids,
                index,
                out_adj,
                in_adj,
                edge_count,
            },
            stats,
        ))
    }

    /// Builds a graph from string id pairs. Node order is first appearance.
    pub fn from_id_edges<'a, I>(edges: I) -> Result<(Self, IngestStats)>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut ids = Vec::new();
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut pairs = Vec::new();
        for (s, t) in edges {
            let mut intern = |id: &'a str| {
                *index.entry(id).or_insert_with(|| {
                    ids.push(id.to_string());
                    ids.len() - 1
                })
            };
            let u = intern(s);
            let v = intern(t);
            pairs.push((u, v));
        }
        Self::from_index_edges(ids, pairs)
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out_adj[u].binary_search(&v).is_ok()
    }

    /// All edges in (source, target) index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, succ)| succ.iter().map(move |&v| (u, v)))
    }

    /// Subgraph induced on `nodes` (in the given order, which becomes the new
    /// index order). Ids are carried over.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> DirectedGraph {
        let mut local = vec![usize::MAX; self.node_count()];
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        let ids = nodes.iter().map(|&v| self.ids[v].clone()).collect();
        let edges = nodes.iter().enumerate().flat_map(|(i, &u)| {
            let local = &local;
            self.out_adj[u]
                .iter()
                .filter(move |&&v| local[v] != usize::MAX)
                .map(move |&v| (i, local[v]))
        });
        let edges: Vec<_> = edges.collect();
        Self::from_index_edges(ids, edges)
            .expect("induced subgraph of a valid graph is valid")
            .0
    }

    /// Edge {u,v} exists iff (u,v) or (v,u) is a directed edge.
    pub fn undirected_projection(&self) -> UndirectedGraph {
        let adj = (0..self.node_count())
            .map(|v| merge_sorted(&self.out_adj[v], &self.in_adj[v]))
            .collect::<Vec<_>>();
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        UndirectedGraph { adj, edge_count }
    }

    /// Core numbers of the undirected projection, indexed by node.
    pub fn k_core_decomposition(&self) -> Vec<usize> {
        self.undirected_projection().core_numbers()
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        let mut out = String::from("source,target\n");
        for (u, v) in self.edges() {
            out.push_str(&self.ids[u]);
            out.push(',');
            out.push_str(&self.ids[v]);
            out.push('\n');
        }
        write_atomic(path, out.as_bytes())
    }
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Undirected simple graph sharing the index space of its source digraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl UndirectedGraph {
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Each edge once, as (u, v) with u < v.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Minimum-degree peeling (Batagelj–Zaversnik bucket order).
    pub fn core_numbers(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut deg: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let max_deg = deg.iter().copied().max().unwrap_or(0);
        let mut bin = vec![0usize; max_deg + 1];
        for &d in &deg {
            bin[d] += 1;
        }
        let mut start = 0;
        for b in bin.iter_mut() {
            let count = *b;
            *b = start;
            start += count;
        }
        let mut pos = vec![0usize; n];
        let mut vert = vec![0usize; n];
        for v in 0..n {
            pos[v] = bin[deg[v]];
            vert[pos[v]] = v;
            bin[deg[v]] += 1;
        }
        for d in (1..=max_deg).rev() {
            bin[d] = bin[d - 1];
        }
        bin[0] = 0;
        for i in 0..n {
            let v = vert[i];
            for &u in &self.adj[v] {
                if deg[u] > deg[v] {
                    let du = deg[u];
                    let pu = pos[u];
                    let pw = bin[du];
                    let w = vert[pw];
                    if u != w {
                        pos[u] = pw;
                        vert[pu] = w;
                        pos[w] = pu;
                        vert[pw] = u;
                    }
                    bin[du] += 1;
                    deg[u] -= 1;
                }
            }
        }
        deg
    }
}

/// Reads a `source,target` edge list. A leading `source,target` header is
/// optional; blank lines are skipped.
pub fn load_edge_list(path: &Path) -> Result<(DirectedGraph, IngestStats)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut pairs: Vec<(&str, &str)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let (Some(s), Some(t), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: format!("expected `source,target`, got `{line}`"),
            });
        };
        if s.is_empty() || t.is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: "empty node id".into(),
            });
        }
        if pairs.is_empty() && s == "source" && t == "target" {
            continue;
        }
        pairs.push((s, t));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput(path.to_path_buf()));
    }
    DirectedGraph::from_id_edges(pairs)
}
