//! The thirteen topology measures computed per ego network.
//!
//! Clustering coefficients, assortativity and articulation points are taken
//! on the undirected projection. Density, centralization, degrees and
//! reciprocity use edge direction.

use crate::ego::EgoNetwork;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, UndirectedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    In,
    Out,
    Total,
}

impl DegreeMode {
    fn degree(self, g: &DirectedGraph, v: usize) -> usize {
        match self {
            DegreeMode::In => g.in_degree(v),
            DegreeMode::Out => g.out_degree(v),
            DegreeMode::Total => g.in_degree(v) + g.out_degree(v),
        }
    }
}

/// Column names of the feature matrix, in order.
pub const MEASURE_NAMES: [&str; 13] = [
    "size",
    "density",
    "gcc",
    "lcc",
    "centr_in",
    "centr_out",
    "centr_total",
    "deg_in",
    "deg_out",
    "deg_total",
    "reciprocity",
    "assortativity",
    "articulation",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub size: usize,
    pub density: f64,
    pub global_clustering: f64,
    pub local_clustering_ego: f64,
    pub centralization_in: f64,
    pub centralization_out: f64,
    pub centralization_total: f64,
    pub ego_indegree: usize,
    pub ego_outdegree: usize,
    pub ego_degree: usize,
    pub reciprocity: f64,
    /// `None` when the degree variance is zero.
    pub assortativity: Option<f64>,
    pub articulation_points: usize,
}

impl FeatureVector {
    /// Values in [`MEASURE_NAMES`] order; undefined assortativity becomes 0.
    pub fn values(&self) -> [f64; 13] {
        [
            self.size as f64,
            self.density,
            self.global_clustering,
            self.local_clustering_ego,
            self.centralization_in,
            self.centralization_out,
            self.centralization_total,
            self.ego_indegree as f64,
            self.ego_outdegree as f64,
            self.ego_degree as f64,
            self.reciprocity,
            self.assortativity.unwrap_or(0.0),
            self.articulation_points as f64,
        ]
    }

    pub fn assortativity_undefined(&self) -> bool {
        self.assortativity.is_none()
    }
}

/// m / (n(n-1)).
pub fn density(g: &DirectedGraph) -> Result<f64> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::UndefinedMeasure {
            measure: "density",
            reason: "fewer than two nodes",
        });
    }
    Ok(g.edge_count() as f64 / (n * (n - 1)) as f64)
}

fn triangles_at(u: &UndirectedGraph, v: usize) -> usize {
    // edges among neighbours of v, via sorted intersections
    let nb = u.neighbors(v);
    let mut count = 0;
    for (i, &a) in nb.iter().enumerate() {
        let na = u.neighbors(a);
        count += sorted_intersection_count(&nb[i + 1..], na);
    }
    count
}

fn sorted_intersection_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Transitivity: closed 2-paths over all 2-paths. Zero without 2-paths.
pub fn global_clustering(g: &DirectedGraph) -> f64 {
    global_clustering_undirected(&g.undirected_projection())
}

fn global_clustering_undirected(u: &UndirectedGraph) -> f64 {
    let mut closed = 0usize; // = 3 * triangles
    let mut triples = 0usize;
    for v in 0..u.node_count() {
        let d = u.degree(v);
        triples += d * d.saturating_sub(1) / 2;
        closed += triangles_at(u, v);
    }
    if triples == 0 {
        0.0
    } else {
        closed as f64 / triples as f64
    }
}

/// Edges among the neighbours of `v` over C(deg, 2). Zero when deg < 2.
pub fn local_clustering(g: &DirectedGraph, v: usize) -> f64 {
    local_clustering_undirected(&g.undirected_projection(), v)
}

fn local_clustering_undirected(u: &UndirectedGraph, v: usize) -> f64 {
    let d = u.degree(v);
    if d < 2 {
        return 0.0;
    }
    triangles_at(u, v) as f64 / (d * (d - 1) / 2) as f64
}

pub fn ego_degree(g: &DirectedGraph, v: usize, mode: DegreeMode) -> usize {
    mode.degree(g, v)
}

/// Freeman centralization, normalised so that a pure out-star (or in-star)
/// scores exactly 1 in its own mode.
pub fn centralization(g: &DirectedGraph, mode: DegreeMode) -> Result<f64> {
    let n = g.node_count();
    if n < 3 {
        return Err(Error::UndefinedMeasure {
            measure: "centralization",
            reason: "fewer than three nodes",
        });
    }
    let degrees: Vec<usize> = (0..n).map(|v| mode.degree(g, v)).collect();
    let max = *degrees.iter().max().expect("n >= 3");
    let spread: usize = degrees.iter().map(|&d| max - d).sum();
    let cap = match mode {
        DegreeMode::In | DegreeMode::Out => n - 1,
        DegreeMode::Total => 2 * (n - 1),
    };
    Ok(spread as f64 / ((n - 1) * cap) as f64)
}

/// Fraction of edges whose reverse edge is also present.
pub fn reciprocity(g: &DirectedGraph) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::UndefinedMeasure {
            measure: "reciprocity",
            reason: "no edges",
        });
    }
    let mutual = g.edges().filter(|&(u, v)| g.has_edge(v, u)).count();
    Ok(mutual as f64 / g.edge_count() as f64)
}

/// Newman degree assortativity of the undirected projection. `None` when
/// there are no edges or all edge endpoints share one degree.
pub fn degree_assortativity(g: &DirectedGraph) -> Option<f64> {
    assortativity_undirected(&g.undirected_projection())
}

fn assortativity_undirected(u: &UndirectedGraph) -> Option<f64> {
    if u.edge_count() == 0 {
        return None;
    }
    // Pearson over both orientations of every edge, in exact integer sums.
    let count = 2 * u.edge_count() as i128;
    let (mut s1, mut s2, mut sxy) = (0i128, 0i128, 0i128);
    for v in 0..u.node_count() {
        let d = u.degree(v) as i128;
        s1 += d * d;
        s2 += d * d * d;
    }
    for (a, b) in u.edges() {
        sxy += 2 * (u.degree(a) as i128) * (u.degree(b) as i128);
    }
    let den = count * s2 - s1 * s1;
    if den == 0 {
        return None;
    }
    let num = count * sxy - s1 * s1;
    Some((num as f64 / den as f64).clamp(-1.0, 1.0))
}

/// Articulation points of the undirected projection (iterative lowlink).
pub fn articulation_point_count(g: &DirectedGraph) -> usize {
    articulation_points_undirected(&g.undirected_projection())
        .iter()
        .filter(|&&a| a)
        .count()
}

fn articulation_points_undirected(u: &UndirectedGraph) -> Vec<bool> {
    let n = u.node_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut timer = 0;
    // (node, parent, next neighbour position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut root_children = 0;
        stack.push((root, usize::MAX, 0));
        while let Some(frame) = stack.last_mut() {
            let (v, parent, pos) = *frame;
            if let Some(&w) = u.neighbors(v).get(pos) {
                frame.2 += 1;
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if w != parent {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if parent != root && low[v] >= disc[parent] {
                        is_cut[parent] = true;
                    }
                }
            }
        }
        is_cut[root] = root_children > 1;
    }
    is_cut
}

/// All thirteen measures. Networks with fewer than three nodes are rejected
/// as degenerate observations.
pub fn compute_feature_vector(net: &EgoNetwork) -> Result<FeatureVector> {
    let g = net.graph();
    if g.node_count() < 3 {
        return Err(Error::Degenerate {
            ego: net.ego_id().to_string(),
            nodes: g.node_count(),
        });
    }
    Ok(feature_vector_unchecked(g, net.ego()))
}

/// Like [`compute_feature_vector`] but fills measures that are undefined on
/// tiny networks with 0 instead of failing.
pub fn compute_feature_vector_lenient(net: &EgoNetwork) -> FeatureVector {
    feature_vector_unchecked(net.graph(), net.ego())
}

fn feature_vector_unchecked(g: &DirectedGraph, ego: usize) -> FeatureVector {
    let u = g.undirected_projection();
    let centr = |mode| centralization(g, mode).unwrap_or(0.0);
    let ego_indegree = g.in_degree(ego);
    let ego_outdegree = g.out_degree(ego);
    FeatureVector {
        size: g.node_count(),
        density: density(g).unwrap_or(0.0),
        global_clustering: global_clustering_undirected(&u),
        local_clustering_ego: local_clustering_undirected(&u, ego),
        centralization_in: centr(DegreeMode::In),
        centralization_out: centr(DegreeMode::Out),
        centralization_total: centr(DegreeMode::Total),
        ego_indegree,
        ego_outdegree,
        ego_degree: ego_indegree + ego_outdegree,
        reciprocity: reciprocity(g).unwrap_or(0.0),
        assortativity: assortativity_undirected(&u),
        articulation_points: articulation_points_undirected(&u)
            .iter()
            .filter(|&&a| a)
            .count(),
    }
}
