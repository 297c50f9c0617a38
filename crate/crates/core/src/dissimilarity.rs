//! Row-to-row dissimilarities between feature vectors.
//!
//! Correlation methods report `1 - r`, so values fall in [0, 2].

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::io::{fmt_f64, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistanceMethod {
    Euclidean,
    Pearson,
    Spearman,
    Kendall,
}

impl DistanceMethod {
    pub const ALL: [DistanceMethod; 4] = [
        DistanceMethod::Euclidean,
        DistanceMethod::Pearson,
        DistanceMethod::Spearman,
        DistanceMethod::Kendall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMethod::Euclidean => "euclidean",
            DistanceMethod::Pearson => "pearson",
            DistanceMethod::Spearman => "spearman",
            DistanceMethod::Kendall => "kendall",
        }
    }
}

impl fmt::Display for DistanceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclidean" => Ok(DistanceMethod::Euclidean),
            "pearson" => Ok(DistanceMethod::Pearson),
            "spearman" => Ok(DistanceMethod::Spearman),
            "kendall" => Ok(DistanceMethod::Kendall),
            other => Err(Error::invalid(format!("unknown distance method `{other}`"))),
        }
    }
}

/// A distance value; `flagged` marks the constant-vector convention
/// (correlation undefined, distance set to 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distance {
    pub value: f64,
    pub flagged: bool,
}

impl Distance {
    fn exact(value: f64) -> Self {
        Distance {
            value,
            flagged: false,
        }
    }

    fn undefined() -> Self {
        Distance {
            value: 1.0,
            flagged: true,
        }
    }
}

pub fn distance(x: &[f64], y: &[f64], method: DistanceMethod) -> Result<Distance> {
    if x.len() != y.len() {
        return Err(Error::invalid(
            "distance between vectors of different length",
        ));
    }
    if x.is_empty() || (method != DistanceMethod::Euclidean && x.len() < 2) {
        return Err(Error::invalid(
            "correlation distances need vectors of length at least 2",
        ));
    }
    Ok(match method {
        DistanceMethod::Euclidean => Distance::exact(
            x.iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
        ),
        DistanceMethod::Pearson => correlation_distance(pearson(x, y)),
        DistanceMethod::Spearman => {
            correlation_distance(pearson(&average_ranks(x), &average_ranks(y)))
        }
        DistanceMethod::Kendall => correlation_distance(kendall_tau_b(x, y)),
    })
}

fn correlation_distance(r: Option<f64>) -> Distance {
    match r {
        Some(r) => Distance::exact((1.0 - r).clamp(0.0, 2.0)),
        None => Distance::undefined(),
    }
}

/// Pearson correlation; `None` if either vector is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks, ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Tie-corrected Kendall tau; `None` if either vector is constant.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut tie_x, mut tie_y) = (0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i].partial_cmp(&x[j])?;
            let dy = y[i].partial_cmp(&y[j])?;
            use std::cmp::Ordering::Equal;
            match (dx, dy) {
                (Equal, Equal) => {
                    tie_x += 1;
                    tie_y += 1;
                }
                (Equal, _) => tie_x += 1,
                (_, Equal) => tie_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as i64;
    let den = ((pairs - tie_x) as f64) * ((pairs - tie_y) as f64);
    if den == 0.0 {
        return None;
    }
    Some(((concordant - discordant) as f64 / den.sqrt()).clamp(-1.0, 1.0))
}

/// Symmetric, zero-diagonal, nonnegative n×n matrix over observations.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    ids: Vec<String>,
    d: Vec<f64>,
    method: Option<DistanceMethod>,
    flagged_pairs: usize,
}

impl DissimilarityMatrix {
    /// Fills the upper triangle with `f(i, j)` for i < j, calling `f` exactly
    /// once per pair, and mirrors it.
    pub fn from_fn<F>(ids: Vec<String>, method: Option<DistanceMethod>, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<Distance> + Sync,
    {
        let n = ids.len();
        let upper: Vec<Vec<Distance>> = (0..n)
            .into_par_iter()
            .map(|i| ((i + 1)..n).map(|j| f(i, j)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let mut d = vec![0.0; n * n];
        let mut flagged_pairs = 0;
        for (i, row) in upper.iter().enumerate() {
            for (off, dist) in row.iter().enumerate() {
                let j = i + 1 + off;
                if !(dist.value >= 0.0) {
                    return Err(Error::invalid(format!(
                        "negative or NaN dissimilarity at ({i},{j})"
                    )));
                }
                d[i * n + j] = dist.value;
                d[j * n + i] = dist.value;
                flagged_pairs += usize::from(dist.flagged);
            }
        }
        Ok(DissimilarityMatrix {
            ids,
            d,
            method,
            flagged_pairs,
        })
    }

    /// Wraps an explicit square matrix after checking the invariants.
    pub fn from_square(ids: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = ids.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid(
                "dissimilarity matrix must be n×n with one id per row",
            ));
        }
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(Error::invalid(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = rows[i][j];
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::invalid(format!("invalid entry at ({i},{j})")));
                }
                if v != rows[j][i] {
                    return Err(Error::invalid(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(DissimilarityMatrix {
            ids,
            d: rows.iter().flatten().copied().collect(),
            method: None,
            flagged_pairs: 0,
        })
    }

    /// Unnamed matrix with ids "0".."n-1"; handy for tests and bindings.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ids = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::from_square(ids, rows)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.ids.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.ids.len();
        &self.d[i * n..(i + 1) * n]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn method(&self) -> Option<DistanceMethod> {
        self.method
    }

    /// Pairs that fell back to the constant-vector convention.
    pub fn flagged_pairs(&self) -> usize {
        self.flagged_pairs
    }

    pub fn max(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Principal submatrix on `idx`, in that order.
    pub fn submatrix(&self, idx: &[usize]) -> DissimilarityMatrix {
        let d = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        DissimilarityMatrix {
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            d,
            method: self.method,
            flagged_pairs: 0,
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["id".to_string()];
        header.extend(self.ids.iter().cloned());
        w.write_record(&header)?;
        for (i, id) in self.ids.iter().enumerate() {
            let mut rec = vec![id.clone()];
            rec.extend(self.row(i).iter().map(|&v| fmt_f64(v)));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        write_atomic(path, &bytes)
    }
}

/// Pairwise dissimilarities between the rows of a standardized matrix.
pub fn build_dissimilarity_matrix(
    f: &FeatureMatrix,
    method: DistanceMethod,
) -> Result<DissimilarityMatrix> {
    if !f.is_standardized() {
        return Err(Error::invalid("feature matrix must be standardized first"));
    }
    DissimilarityMatrix::from_fn(f.ids().to_vec(), Some(method), |i, j| {
        distance(f.row(i), f.row(j), method)
    })
}
