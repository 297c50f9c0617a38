//! Two-step friends-only ego networks and their one-step reductions.
//!
//! A friends crawl starting at the ego fetches the ego's friend list and the
//! friend list of every friend. Only those fetched ("expanded") nodes
//! contribute out-edges; the friends-of-friends appear as nodes, but their
//! own out-edges are never seen.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Depth {
    K2,
    K1,
}

impl Depth {
    pub fn as_str(self) -> &'static str {
        match self {
            Depth::K2 => "k2",
            Depth::K1 => "k1",
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Depth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "k2" => Ok(Depth::K2),
            "k1" => Ok(Depth::K1),
            other => Err(Error::invalid(format!("unknown graph type `{other}`"))),
        }
    }
}

/// How a K2 network is cut down to its one-step counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Induced subgraph on the ego and its friends.
    #[default]
    EgoInduced,
    /// Ego plus every node whose core number in the K2 projection is at least k.
    KCore(usize),
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reduction::EgoInduced => f.write_str("ego"),
            Reduction::KCore(k) => write!(f, "kcore:{k}"),
        }
    }
}

impl FromStr for Reduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "ego" {
            return Ok(Reduction::EgoInduced);
        }
        if let Some(k) = s.strip_prefix("kcore:") {
            return k
                .parse()
                .map(Reduction::KCore)
                .map_err(|_| Error::invalid(format!("bad k-core level `{k}`")));
        }
        Err(Error::invalid(format!(
            "unknown reduction `{s}` (expected ego or kcore:<k>)"
        )))
    }
}

#[derive(Debug, Clone)]
pub struct EgoNetwork {
    graph: DirectedGraph,
    ego: usize,
    depth: Depth,
    expanded: Vec<bool>,
}

impl EgoNetwork {
    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    /// Local index of the ego inside [`EgoNetwork::graph`].
    pub fn ego(&self) -> usize {
        self.ego
    }

    pub fn ego_id(&self) -> &str {
        self.graph.id(self.ego)
    }

    pub fn depth(&self) -> Depth {
        self.depth
    }

    pub fn is_expanded(&self, v: usize) -> bool {
        self.expanded[v]
    }

    pub fn expanded(&self) -> Vec<usize> {
        (0..self.expanded.len())
            .filter(|&v| self.expanded[v])
            .collect()
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Applies `reduction` to a K2 network.
    pub fn reduce(&self, reduction: Reduction) -> Result<EgoNetwork> {
        match reduction {
            Reduction::EgoInduced => reduce_to_k1(self),
            Reduction::KCore(k) => reduce_to_kcore(self, k),
        }
    }
}

/// Extracts the K2 network of `ego` (a global index of `g`).
pub fn extract_k2(g: &DirectedGraph, ego: usize) -> Result<EgoNetwork> {
    if ego >= g.node_count() {
        return Err(Error::invalid(format!("ego index {ego} out of range")));
    }
    let n = g.node_count();
    // local index per global node, usize::MAX when absent
    let mut local = vec![usize::MAX; n];
    let mut nodes = vec![ego];
    local[ego] = 0;
    for &f in g.out_neighbors(ego) {
        local[f] = nodes.len();
        nodes.push(f);
    }
    let n_expanded = nodes.len();
    let mut second: Vec<usize> = Vec::new();
    for &f in &nodes[1..n_expanded] {
        for &ff in g.out_neighbors(f) {
            if local[ff] == usize::MAX {
                local[ff] = 0; // placeholder, reassigned below
                second.push(ff);
            }
        }
    }
    second.sort_unstable();
    for ff in second {
        local[ff] = nodes.len();
        nodes.push(ff);
    }

    let ids = nodes.iter().map(|&v| g.id(v).to_string()).collect();
    let edges: Vec<(usize, usize)> = nodes[..n_expanded]
        .iter()
        .enumerate()
        .flat_map(|(i, &u)| g.out_neighbors(u).iter().map(move |&v| (i, v)))
        .map(|(i, v)| (i, local[v]))
        .collect();
    let (graph, _) = DirectedGraph::from_index_edges(ids, edges)?;
    let mut expanded = vec![false; nodes.len()];
    expanded[..n_expanded].iter_mut().for_each(|e| *e = true);
    Ok(EgoNetwork {
        graph,
        ego: 0,
        depth: Depth::K2,
        expanded,
    })
}

/// Looks the ego up by id and extracts its K2 network.
pub fn extract_k2_by_id(g: &DirectedGraph, ego: &str) -> Result<EgoNetwork> {
    let idx = g
        .index_of(ego)
        .ok_or_else(|| Error::UnknownNode(ego.to_string()))?;
    extract_k2(g, idx)
}

/// Induced subgraph of a K2 network on the ego's closed out-neighbourhood.
pub fn reduce_to_k1(k2: &EgoNetwork) -> Result<EgoNetwork> {
    if k2.depth != Depth::K2 {
        return Err(Error::invalid("reduce_to_k1 expects a K2 network"));
    }
    let g = &k2.graph;
    let mut nodes = vec![k2.ego];
    nodes.extend_from_slice(g.out_neighbors(k2.ego));
    Ok(k1_from_nodes(k2, nodes))
}

/// Keeps the ego plus every node of core number ≥ `k` in the K2 projection.
pub fn reduce_to_kcore(k2: &EgoNetwork, k: usize) -> Result<EgoNetwork> {
    if k2.depth != Depth::K2 {
        return Err(Error::invalid("k-core reduction expects a K2 network"));
    }
    let core = k2.graph.k_core_decomposition();
    let mut nodes = vec![k2.ego];
    nodes.extend((0..core.len()).filter(|&v| v != k2.ego && core[v] >= k));
    Ok(k1_from_nodes(k2, nodes))
}

fn k1_from_nodes(k2: &EgoNetwork, nodes: Vec<usize>) -> EgoNetwork {
    let expanded = nodes.iter().map(|&v| k2.expanded[v]).collect();
    let graph = k2.graph.induced_subgraph(&nodes);
    EgoNetwork {
        graph,
        ego: 0,
        depth: Depth::K1,
        expanded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net_edges(net: &EgoNetwork) -> Vec<(String, String)> {
        let g = net.graph();
        let mut e: Vec<_> = g
            .edges()
            .map(|(u, v)| (g.id(u).to_string(), g.id(v).to_string()))
            .collect();
        e.sort();
        e
    }

    fn ids(net: &EgoNetwork) -> Vec<String> {
        let mut v = net.graph().ids().to_vec();
        v.sort();
        v
    }

    fn pair(a: &str, b: &str) -> (String, String) {
        (a.to_string(), b.to_string())
    }

    #[test]
    fn level_two_nodes_are_not_expanded() {
        let (g, _) = DirectedGraph::from_id_edges([("ego", "a"), ("a", "b"), ("b", "c")]).unwrap();
        let k2 = extract_k2_by_id(&g, "ego").unwrap();
        assert_eq!(ids(&k2), ["a", "b", "ego"]);
        assert_eq!(net_edges(&k2), vec![pair("a", "b"), pair("ego", "a")]);
        assert_eq!(k2.ego_id(), "ego");
        assert!(!k2.is_expanded(k2.graph().index_of("b").unwrap()));
    }

    #[test]
    fn mutual_dyad_kept_both_ways() {
        let (g, _) = DirectedGraph::from_id_edges([("ego", "a"), ("a", "ego")]).unwrap();
        let k2 = extract_k2_by_id(&g, "ego").unwrap();
        assert_eq!(k2.graph().edge_count(), 2);
    }

    #[test]
    fn k1_is_the_closed_friend_set() {
        let (g, _) = DirectedGraph::from_id_edges([("ego", "a"), ("a", "b")]).unwrap();
        let k1 = reduce_to_k1(&extract_k2_by_id(&g, "ego").unwrap()).unwrap();
        assert_eq!(ids(&k1), ["a", "ego"]);
        assert_eq!(net_edges(&k1), vec![pair("ego", "a")]);
        assert_eq!(k1.depth(), Depth::K1);

        let (g, _) =
            DirectedGraph::from_id_edges([("ego", "a"), ("ego", "b"), ("a", "b")]).unwrap();
        let k1 = reduce_to_k1(&extract_k2_by_id(&g, "ego").unwrap()).unwrap();
        assert!(net_edges(&k1).contains(&pair("a", "b")));
    }

    #[test]
    fn friendless_ego_is_a_singleton() {
        let (g, _) = DirectedGraph::from_id_edges([("x", "ego")]).unwrap();
        let k2 = extract_k2_by_id(&g, "ego").unwrap();
        assert_eq!(k2.node_count(), 1);
        assert_eq!(reduce_to_k1(&k2).unwrap().node_count(), 1);
    }

    #[test]
    fn unknown_ego_and_wrong_depth() {
        let (g, _) = DirectedGraph::from_id_edges([("a", "b")]).unwrap();
        assert!(matches!(
            extract_k2_by_id(&g, "zzz"),
            Err(Error::UnknownNode(_))
        ));
        let k1 = reduce_to_k1(&extract_k2_by_id(&g, "a").unwrap()).unwrap();
        assert!(reduce_to_k1(&k1).is_err());
    }

    #[test]
    fn kcore_reduction_keeps_ego_and_dense_part() {
        // triangle a,b,c among the ego's friends plus a pendant d
        let (g, _) = DirectedGraph::from_id_edges([
            ("ego", "a"),
            ("ego", "d"),
            ("a", "b"),
            ("b", "c"),
            ("c", "a"),
            ("ego", "b"),
            ("ego", "c"),
        ])
        .unwrap();
        let k2 = extract_k2_by_id(&g, "ego").unwrap();
        let red = k2.reduce(Reduction::KCore(3)).unwrap();
        assert_eq!(ids(&red), ["a", "b", "c", "ego"]);
        assert_eq!("kcore:3".parse::<Reduction>().unwrap(), Reduction::KCore(3));
        assert!("kcore:x".parse::<Reduction>().is_err());
    }
}
