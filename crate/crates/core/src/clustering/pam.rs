//! Partitioning around medoids: greedy BUILD seeding followed by steepest
//! descent SWAP until no single medoid exchange lowers the total distance.

use super::{check_k, ClusterAssignment, Clusterer};
use crate::dissimilarity::DissimilarityMatrix;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct PamResult {
    pub assignment: ClusterAssignment,
    /// Medoid observation indices, ascending; cluster `c` has medoid `medoids[c-1]`.
    pub medoids: Vec<usize>,
    /// Sum over observations of the distance to the nearest medoid.
    pub objective: f64,
    pub swaps: usize,
}

/// Total distance from every observation to its nearest medoid.
pub fn pam_objective(d: &DissimilarityMatrix, medoids: &[usize]) -> f64 {
    (0..d.len())
        .map(|i| {
            medoids
                .iter()
                .map(|&m| d.get(i, m))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

pub fn pam(d: &DissimilarityMatrix, k: usize) -> Result<PamResult> {
    let n = d.len();
    check_k(n, k)?;
    let mut medoids = build(d, k);
    let mut swaps = 0;
    loop {
        let (near, second) = nearest_two(d, &medoids);
        let current: f64 = near.iter().map(|&(_, dist)| dist).sum();
        let eps = 1e-12 * current.abs().max(1.0);
        let mut best: Option<(usize, usize, f64)> = None;
        let mut is_medoid = vec![false; n];
        medoids.iter().for_each(|&m| is_medoid[m] = true);
        for (slot, _) in medoids.iter().enumerate() {
            for h in (0..n).filter(|&h| !is_medoid[h]) {
                let delta = swap_delta(d, &near, &second, slot, h);
                if delta < -eps && best.is_none_or(|(_, _, b)| delta < b) {
                    best = Some((slot, h, delta));
                }
            }
        }
        match best {
            Some((slot, h, _)) => {
                medoids[slot] = h;
                swaps += 1;
            }
            None => break,
        }
    }
    medoids.sort_unstable();
    let labels = assign(d, &medoids);
    let objective = pam_objective(d, &medoids);
    let assignment = ClusterAssignment::new(d.ids().to_vec(), labels, k, Clusterer::Pam)?
        .with_medoids(medoids.clone());
    Ok(PamResult {
        assignment,
        medoids,
        objective,
        swaps,
    })
}

/// Greedy seeding: the most central object first, then repeatedly the
/// object that most reduces the objective. Ties go to the lowest index.
fn build(d: &DissimilarityMatrix, k: usize) -> Vec<usize> {
    let n = d.len();
    let first = (0..n)
        .map(|i| (i, d.row(i).iter().sum::<f64>()))
        .fold((usize::MAX, f64::INFINITY), |acc, (i, s)| {
            if s < acc.1 {
                (i, s)
            } else {
                acc
            }
        })
        .0;
    let mut medoids = vec![first];
    let mut nearest: Vec<f64> = (0..n).map(|j| d.get(j, first)).collect();
    while medoids.len() < k {
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        for i in (0..n).filter(|i| !medoids.contains(i)) {
            let gain: f64 = (0..n).map(|j| (nearest[j] - d.get(j, i)).max(0.0)).sum();
            if gain > best.1 {
                best = (i, gain);
            }
        }
        let m = best.0;
        medoids.push(m);
        for j in 0..n {
            nearest[j] = nearest[j].min(d.get(j, m));
        }
    }
    medoids
}

/// Per observation: (slot, distance) of the nearest medoid and the distance
/// to the second nearest.
fn nearest_two(d: &DissimilarityMatrix, medoids: &[usize]) -> (Vec<(usize, f64)>, Vec<f64>) {
    let n = d.len();
    let mut near = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    for i in 0..n {
        let mut a = (usize::MAX, f64::INFINITY);
        let mut b = f64::INFINITY;
        for (slot, &m) in medoids.iter().enumerate() {
            let v = d.get(i, m);
            if v < a.1 {
                b = a.1;
                a = (slot, v);
            } else if v < b {
                b = v;
            }
        }
        near.push(a);
        second.push(b);
    }
    (near, second)
}

fn swap_delta(
    d: &DissimilarityMatrix,
    near: &[(usize, f64)],
    second: &[f64],
    slot: usize,
    h: usize,
) -> f64 {
    let mut delta = 0.0;
    for (j, &(nslot, dn)) in near.iter().enumerate() {
        let dh = d.get(j, h);
        if nslot == slot {
            delta += dh.min(second[j]) - dn;
        } else if dh < dn {
            delta += dh - dn;
        }
    }
    delta
}

/// Nearest medoid, ties to the lower cluster. Medoids always label their
/// own cluster so no cluster is left empty.
fn assign(d: &DissimilarityMatrix, medoids: &[usize]) -> Vec<usize> {
    (0..d.len())
        .map(|i| {
            if let Some(c) = medoids.iter().position(|&m| m == i) {
                return c + 1;
            }
            let mut best = (0, f64::INFINITY);
            for (c, &m) in medoids.iter().enumerate() {
                if d.get(i, m) < best.1 {
                    best = (c, d.get(i, m));
                }
            }
            best.0 + 1
        })
        .collect()
}
