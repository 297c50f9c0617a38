//! Fuzzy analysis clustering.
//!
//! Minimises Σ_v [Σ_{i,j} u_iv^r u_jv^r d(i,j)] / [2 Σ_j u_jv^r] over row
//! stochastic memberships. Each step takes the stationarity fixed point of
//! the objective (the relational fuzzy c-means update) as a search
//! direction and backtracks along it until the objective does not rise, so
//! the objective trace is monotone even for non-Euclidean dissimilarities.

use super::{check_k, pam, ClusterAssignment, Clusterer};
use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FannyOptions {
    /// Membership exponent r > 1.
    pub memb_exp: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FannyOptions {
    fn default() -> Self {
        FannyOptions {
            memb_exp: 2.0,
            tol: 1e-9,
            max_iter: 500,
        }
    }
}

/// n×k row-stochastic membership coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix {
    k: usize,
    u: Vec<f64>,
}

impl MembershipMatrix {
    pub fn n_rows(&self) -> usize {
        self.u.len() / self.k
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.u[i * self.k..(i + 1) * self.k]
    }

    pub fn get(&self, i: usize, v: usize) -> f64 {
        self.u[i * self.k + v]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.u.chunks(self.k)
    }

    /// Row-wise argmax as 1-based labels, ties to the lower cluster.
    pub fn crisp_labels(&self) -> Vec<usize> {
        self.rows()
            .map(|row| {
                let mut best = 0;
                for v in 1..row.len() {
                    if row[v] > row[best] {
                        best = v;
                    }
                }
                best + 1
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct FannyResult {
    pub memberships: MembershipMatrix,
    pub assignment: ClusterAssignment,
    pub objective: f64,
    /// Objective after initialisation and after every accepted step.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// FANNY objective for memberships `u` (n×k, row-major).
pub fn fanny_objective(d: &DissimilarityMatrix, u: &[f64], k: usize, r: f64) -> f64 {
    let n = d.len();
    let mut total = 0.0;
    let mut w = vec![0.0; n];
    for v in 0..k {
        for i in 0..n {
            w[i] = u[i * k + v].powf(r);
        }
        let s: f64 = w.iter().sum();
        if s <= 0.0 {
            continue;
        }
        let mut num = 0.0;
        for i in 0..n {
            if w[i] == 0.0 {
                continue;
            }
            let row = d.row(i);
            num += w[i] * row.iter().zip(&w).map(|(dij, wj)| dij * wj).sum::<f64>();
        }
        total += num / (2.0 * s);
    }
    total
}

pub fn fanny(d: &DissimilarityMatrix, k: usize, opts: &FannyOptions) -> Result<FannyResult> {
    let n = d.len();
    check_k(n, k)?;
    if k < 2 {
        return Err(Error::invalid("fanny needs k >= 2"));
    }
    if !(opts.memb_exp > 1.0) {
        return Err(Error::invalid("membership exponent must exceed 1"));
    }
    let r = opts.memb_exp;
    let mut u = initial_memberships(d, k, r)?;
    let mut obj = fanny_objective(d, &u, k, r);
    let mut trace = vec![obj];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let target = fixed_point(d, &u, k, r);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let cand: Vec<f64> = u
                .iter()
                .zip(&target)
                .map(|(a, b)| a + step * (b - a))
                .collect();
            let cand = normalize_rows(cand, k);
            let cobj = fanny_objective(d, &cand, k, r);
            if cobj <= obj {
                accepted = Some((cand, cobj));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, cobj)) = accepted else {
            // no descent along the fixed-point direction: stationary
            converged = true;
            break;
        };
        let decrease = obj - cobj;
        u = cand;
        obj = cobj;
        trace.push(obj);
        if decrease < opts.tol {
            converged = true;
            break;
        }
    }
    let memberships = MembershipMatrix { k, u };
    let labels = memberships.crisp_labels();
    let assignment = ClusterAssignment::new(d.ids().to_vec(), labels, k, Clusterer::Fanny)?;
    Ok(FannyResult {
        memberships,
        assignment,
        objective: obj,
        objective_trace: trace,
        iterations,
        converged,
    })
}

/// Memberships from inverse distances to BUILD medoids. An observation at
/// distance 0 from a medoid starts crisp in that cluster.
fn initial_memberships(d: &DissimilarityMatrix, k: usize, r: f64) -> Result<Vec<f64>> {
    let medoids = pam::pam(d, k)?.medoids;
    let n = d.len();
    let mut u = vec![0.0; n * k];
    let p = 1.0 / (r - 1.0);
    for i in 0..n {
        let dist: Vec<f64> = medoids.iter().map(|&m| d.get(i, m)).collect();
        set_row(&mut u[i * k..(i + 1) * k], &dist, p);
    }
    Ok(u)
}

/// u_iv ∝ (1/a_iv)^p; any a_iv <= 0 takes the whole row mass (shared equally).
fn set_row(row: &mut [f64], a: &[f64], p: f64) {
    let zeros = a.iter().filter(|&&x| x <= 0.0).count();
    if zeros > 0 {
        for (u, &x) in row.iter_mut().zip(a) {
            *u = if x <= 0.0 { 1.0 / zeros as f64 } else { 0.0 };
        }
        return;
    }
    // scale by the minimum to keep the powers in range
    let amin = a.iter().copied().fold(f64::INFINITY, f64::min);
    let mut total = 0.0;
    for (u, &x) in row.iter_mut().zip(a) {
        *u = if x.is_finite() {
            (amin / x).powf(p)
        } else {
            0.0
        };
        total += *u;
    }
    row.iter_mut().for_each(|u| *u /= total);
}

fn fixed_point(d: &DissimilarityMatrix, u: &[f64], k: usize, r: f64) -> Vec<f64> {
    let n = d.len();
    let p = 1.0 / (r - 1.0);
    // a[i][v] = (D w_v)_i - w_v' D w_v / 2, with w_v = u_v^r / Σ u_v^r
    let mut a = vec![f64::INFINITY; n * k];
    let mut w = vec![0.0; n];
    let mut dw = vec![0.0; n];
    for v in 0..k {
        for i in 0..n {
            w[i] = u[i * k + v].powf(r);
        }
        let s: f64 = w.iter().sum();
        if s <= 0.0 {
            continue;
        }
        w.iter_mut().for_each(|x| *x /= s);
        for i in 0..n {
            dw[i] = d.row(i).iter().zip(&w).map(|(dij, wj)| dij * wj).sum();
        }
        let quad: f64 = w.iter().zip(&dw).map(|(a, b)| a * b).sum();
        for i in 0..n {
            a[i * k + v] = dw[i] - quad / 2.0;
        }
    }
    let mut out = vec![0.0; n * k];
    for i in 0..n {
        set_row(&mut out[i * k..(i + 1) * k], &a[i * k..(i + 1) * k], p);
    }
    out
}

fn normalize_rows(mut u: Vec<f64>, k: usize) -> Vec<f64> {
    for row in u.chunks_mut(k) {
        row.iter_mut().for_each(|x| *x = x.max(0.0));
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= s);
    }
    u
}
