//! Agglomerative nesting with unweighted average linkage (UPGMA).

use super::{ClusterAssignment, Clusterer};
use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};

/// One merge step. Node ids follow the usual convention: `0..n` are the
/// observations, `n + s` is the cluster created by merge `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn observations(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }
}

/// Repeatedly merges the two clusters with the smallest mean pairwise
/// dissimilarity. Ties go to the pair whose smallest members are
/// lexicographically lowest.
pub fn agnes(d: &DissimilarityMatrix) -> Result<Dendrogram> {
    let n = d.len();
    if n < 2 {
        return Err(Error::invalid("agnes needs at least two observations"));
    }
    // Slot s holds the active cluster whose smallest member is s.
    let mut dist: Vec<f64> = (0..n * n).map(|x| d.get(x / n, x % n)).collect();
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut node = (0..n).collect::<Vec<_>>();
    let mut merges = Vec::with_capacity(n - 1);
    let mut last = f64::NEG_INFINITY;
    for step in 0..n - 1 {
        let mut best = (usize::MAX, usize::MAX, f64::INFINITY);
        for a in (0..n).filter(|&a| active[a]) {
            for b in (a + 1..n).filter(|&b| active[b]) {
                let v = dist[a * n + b];
                if v < best.2 {
                    best = (a, b, v);
                }
            }
        }
        let (a, b, h) = best;
        // UPGMA heights are monotone; only rounding can undercut the previous one.
        let height = h.max(last);
        last = height;
        let (sa, sb) = (size[a] as f64, size[b] as f64);
        for c in (0..n).filter(|&c| active[c] && c != a && c != b) {
            let v = (sa * dist[a * n + c] + sb * dist[b * n + c]) / (sa + sb);
            dist[a * n + c] = v;
            dist[c * n + a] = v;
        }
        active[b] = false;
        size[a] += size[b];
        merges.push(Merge {
            left: node[a],
            right: node[b],
            height,
            size: size[a],
        });
        node[a] = n + step;
    }
    Ok(Dendrogram { n, merges })
}

/// The k clusters left after undoing the last k−1 merges. Clusters are
/// numbered by their smallest observation index.
pub fn cut_dendrogram(t: &Dendrogram, k: usize, ids: &[String]) -> Result<ClusterAssignment> {
    let n = t.n;
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "cannot cut {n} observations into {k} clusters"
        )));
    }
    if ids.len() != n {
        return Err(Error::invalid("one id per observation required"));
    }
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (s, m) in t.merges.iter().take(n - k).enumerate() {
        let (l, r) = (find(&mut parent, m.left), find(&mut parent, m.right));
        parent[l] = n + s;
        parent[r] = n + s;
    }
    let mut number = std::collections::HashMap::new();
    let labels = (0..n)
        .map(|i| {
            let root = find(&mut parent, i);
            let next = number.len() + 1;
            *number.entry(root).or_insert(next)
        })
        .collect();
    ClusterAssignment::new(ids.to_vec(), labels, k, Clusterer::Agnes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three() -> DissimilarityMatrix {
        DissimilarityMatrix::from_rows(&[
            vec![0.0, 1.0, 10.0],
            vec![1.0, 0.0, 10.0],
            vec![10.0, 10.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn hand_computed_heights() {
        let t = agnes(&three()).unwrap();
        assert_eq!(t.heights(), vec![1.0, 10.0]);
        assert_eq!((t.merges()[0].left, t.merges()[0].right), (0, 1));
        assert_eq!((t.merges()[1].left, t.merges()[1].right), (3, 2));
        assert_eq!(t.merges()[1].size, 3);
    }

    #[test]
    fn cuts() {
        let d = three();
        let t = agnes(&d).unwrap();
        assert_eq!(cut_dendrogram(&t, 2, d.ids()).unwrap().labels(), &[1, 1, 2]);
        assert_eq!(cut_dendrogram(&t, 3, d.ids()).unwrap().labels(), &[1, 2, 3]);
        assert_eq!(cut_dendrogram(&t, 1, d.ids()).unwrap().labels(), &[1, 1, 1]);
        assert!(cut_dendrogram(&t, 4, d.ids()).is_err());
        assert!(cut_dendrogram(&t, 0, d.ids()).is_err());
    }

    #[test]
    fn two_points() {
        let d = DissimilarityMatrix::from_rows(&[vec![0.0, 2.5], vec![2.5, 0.0]]).unwrap();
        assert_eq!(agnes(&d).unwrap().heights(), vec![2.5]);
    }
}
