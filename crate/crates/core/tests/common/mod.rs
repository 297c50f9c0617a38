//! Brute-force reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use egotopo::dissimilarity::DissimilarityMatrix;
use egotopo::DirectedGraph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> DirectedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let ids = (0..n).map(|i| format!("v{i}")).collect();
    DirectedGraph::from_index_edges(ids, edges).unwrap().0
}

/// Dense adjacency: `a[u][v]` iff u→v.
pub fn adjacency(g: &DirectedGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
    }
    a
}

fn undirected(a: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|u| (0..n).map(|v| u != v && (a[u][v] || a[v][u])).collect())
        .collect()
}

fn components(u: &[Vec<bool>], removed: Option<usize>) -> usize {
    let n = u.len();
    let mut seen = vec![false; n];
    if let Some(r) = removed {
        seen[r] = true;
    }
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(x) = stack.pop() {
            for y in 0..n {
                if u[x][y] && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    count
}

/// The thirteen measures, by enumeration over dyads, triples and node removals.
#[derive(Debug, Clone)]
pub struct OracleMeasures {
    pub size: f64,
    pub density: f64,
    pub gcc: f64,
    pub lcc: f64,
    pub centr: [f64; 3],
    pub deg: [f64; 3],
    pub reciprocity: f64,
    pub assortativity: Option<f64>,
    pub articulation: f64,
}

pub fn oracle_measures(g: &DirectedGraph, ego: usize) -> OracleMeasures {
    let a = adjacency(g);
    let n = a.len();
    let u = undirected(&a);
    let m: usize = a.iter().flatten().filter(|&&x| x).count();

    let mut triples = 0usize;
    let mut closed = 0usize;
    for c in 0..n {
        for x in 0..n {
            for y in x + 1..n {
                if x != c && y != c && u[c][x] && u[c][y] {
                    triples += 1;
                    if u[x][y] {
                        closed += 1;
                    }
                }
            }
        }
    }
    let gcc = if triples == 0 {
        0.0
    } else {
        closed as f64 / triples as f64
    };

    let nb: Vec<usize> = (0..n).filter(|&v| u[ego][v]).collect();
    let mut links = 0;
    for i in 0..nb.len() {
        for j in i + 1..nb.len() {
            if u[nb[i]][nb[j]] {
                links += 1;
            }
        }
    }
    let k = nb.len();
    let lcc = if k < 2 {
        0.0
    } else {
        links as f64 / (k * (k - 1) / 2) as f64
    };

    let indeg: Vec<usize> = (0..n)
        .map(|v| (0..n).filter(|&w| a[w][v]).count())
        .collect();
    let outdeg: Vec<usize> = (0..n)
        .map(|v| (0..n).filter(|&w| a[v][w]).count())
        .collect();
    let total: Vec<usize> = (0..n).map(|v| indeg[v] + outdeg[v]).collect();
    let centr_of = |d: &[usize], cap: usize| {
        let mx = *d.iter().max().unwrap();
        d.iter().map(|&x| (mx - x) as f64).sum::<f64>() / ((n - 1) * cap) as f64
    };

    let mutual = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| a[x][y] && a[y][x])
        .count();

    let udeg: Vec<f64> = (0..n)
        .map(|v| u[v].iter().filter(|&&b| b).count() as f64)
        .collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if u[x][y] {
                xs.push(udeg[x]);
                ys.push(udeg[y]);
            }
        }
    }
    let assortativity = pearson_two_pass(&xs, &ys);

    let base = components(&u, None);
    let articulation = (0..n).filter(|&v| components(&u, Some(v)) > base).count();

    OracleMeasures {
        size: n as f64,
        density: m as f64 / (n * (n - 1)) as f64,
        gcc,
        lcc,
        centr: [
            centr_of(&indeg, n - 1),
            centr_of(&outdeg, n - 1),
            centr_of(&total, 2 * (n - 1)),
        ],
        deg: [indeg[ego] as f64, outdeg[ego] as f64, total[ego] as f64],
        reciprocity: if m == 0 {
            f64::NAN
        } else {
            mutual as f64 / m as f64
        },
        assortativity,
        articulation: articulation as f64,
    }
}

impl OracleMeasures {
    /// Same order as the feature vector; undefined assortativity as 0.
    pub fn values(&self) -> [f64; 13] {
        [
            self.size,
            self.density,
            self.gcc,
            self.lcc,
            self.centr[0],
            self.centr[1],
            self.centr[2],
            self.deg[0],
            self.deg[1],
            self.deg[2],
            self.reciprocity,
            self.assortativity.unwrap_or(0.0),
            self.articulation,
        ]
    }
}

pub fn pearson_two_pass(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.is_empty() {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx <= 1e-12 || syy <= 1e-12 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Ego network as id sets, found by two rounds of out-edge crawling where
/// only the ego and the first-round nodes are expanded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crawl {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeSet<(String, String)>,
    pub expanded: BTreeSet<String>,
}

pub fn crawl_oracle(g: &DirectedGraph, ego: &str) -> Crawl {
    let out: BTreeMap<&str, Vec<&str>> = (0..g.node_count())
        .map(|v| {
            let succ = g
                .edges()
                .filter(|&(s, _)| s == v)
                .map(|(_, t)| g.id(t))
                .collect();
            (g.id(v), succ)
        })
        .collect();
    let mut nodes = BTreeSet::from([ego.to_string()]);
    let mut expanded = BTreeSet::new();
    let mut edges = BTreeSet::new();
    let mut frontier = vec![ego.to_string()];
    for _round in 0..2 {
        let mut next = Vec::new();
        for src in frontier {
            expanded.insert(src.clone());
            for &t in &out[src.as_str()] {
                edges.insert((src.clone(), t.to_string()));
                if nodes.insert(t.to_string()) {
                    next.push(t.to_string());
                }
            }
        }
        frontier = next;
    }
    Crawl {
        nodes,
        edges,
        expanded,
    }
}

/// First-level restriction of a crawl: ego plus its direct friends.
pub fn k1_oracle(c: &Crawl, ego: &str) -> Crawl {
    let mut nodes: BTreeSet<String> = c
        .edges
        .iter()
        .filter(|(s, _)| s == ego)
        .map(|(_, t)| t.clone())
        .collect();
    nodes.insert(ego.to_string());
    let edges = c
        .edges
        .iter()
        .filter(|(s, t)| nodes.contains(s) && nodes.contains(t))
        .cloned()
        .collect();
    Crawl {
        expanded: nodes.clone(),
        nodes,
        edges,
    }
}

pub fn network_as_sets(g: &DirectedGraph) -> (BTreeSet<String>, BTreeSet<(String, String)>) {
    let nodes = g.ids().iter().cloned().collect();
    let edges = g
        .edges()
        .map(|(u, v)| (g.id(u).to_string(), g.id(v).to_string()))
        .collect();
    (nodes, edges)
}

/// Optimal k-medoid objective over every medoid subset.
pub fn exhaustive_medoids(d: &DissimilarityMatrix, k: usize) -> f64 {
    fn rec(
        d: &DissimilarityMatrix,
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        best: &mut f64,
    ) {
        if chosen.len() == k {
            let cost: f64 = (0..d.len())
                .map(|i| {
                    chosen
                        .iter()
                        .map(|&m| d.get(i, m))
                        .fold(f64::INFINITY, f64::min)
                })
                .sum();
            *best = best.min(cost);
            return;
        }
        for m in start..d.len() {
            chosen.push(m);
            rec(d, k, m + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = f64::INFINITY;
    rec(d, k, 0, &mut Vec::new(), &mut best);
    best
}

pub fn euclidean_matrix(points: &[Vec<f64>]) -> DissimilarityMatrix {
    let n = points.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    points[i]
                        .iter()
                        .zip(&points[j])
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect()
        })
        .collect();
    let ids = (0..n).map(|i| i.to_string()).collect();
    DissimilarityMatrix::from_square(ids, &rows).unwrap()
}

/// Two Gaussian-ish blobs in the plane, `n` points in total.
pub fn planted_blobs(rng: &mut ChaCha8Rng, n: usize, gap: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let cx = if i % 2 == 0 { 0.0 } else { gap };
            vec![cx + rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
        })
        .collect()
}

pub fn random_dissimilarity(rng: &mut ChaCha8Rng, n: usize) -> DissimilarityMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let x = rng.gen_range(0.0..10.0);
            rows[i][j] = x;
            rows[j][i] = x;
        }
    }
    let ids = (0..n).map(|i| i.to_string()).collect();
    DissimilarityMatrix::from_square(ids, &rows).unwrap()
}
