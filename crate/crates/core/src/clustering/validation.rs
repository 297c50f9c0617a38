//! Internal (connectivity, Dunn, silhouette) and stability (APN, AD, ADM,
//! FOM) cluster validation, and the method/k selection grid built on them.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{cluster, ClusterAssignment, ClusterParams, Clusterer};
use crate::dissimilarity::{build_dissimilarity_matrix, DissimilarityMatrix, DistanceMethod};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::io::{fmt_opt, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InternalScores {
    pub connectivity: f64,
    pub dunn: f64,
    pub silhouette: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityScores {
    pub apn: f64,
    pub ad: f64,
    pub adm: f64,
    pub fom: f64,
}

fn groups(labels: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut g = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        g[l - 1].push(i);
    }
    g
}

/// Connectivity over the `nn` nearest neighbours (capped at n−1), Dunn index
/// and mean silhouette width. Singleton clusters use a_i = 0.
pub fn internal_validation(
    d: &DissimilarityMatrix,
    a: &ClusterAssignment,
    nn: usize,
) -> Result<InternalScores> {
    let n = d.len();
    if a.len() != n {
        return Err(Error::invalid("assignment and matrix sizes differ"));
    }
    let labels = a.labels();
    let nonempty = a.cluster_sizes().iter().filter(|&&s| s > 0).count();
    if nonempty < 2 {
        return Err(Error::invalid(
            "validation needs at least two non-empty clusters",
        ));
    }

    let nn = nn.min(n - 1);
    let mut connectivity = 0.0;
    for i in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        others.sort_by(|&x, &y| d.get(i, x).total_cmp(&d.get(i, y)).then(x.cmp(&y)));
        for (rank, &j) in others.iter().take(nn).enumerate() {
            if labels[j] != labels[i] {
                connectivity += 1.0 / (rank + 1) as f64;
            }
        }
    }

    let mut min_between = f64::INFINITY;
    let mut max_within: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            if labels[i] == labels[j] {
                max_within = max_within.max(d.get(i, j));
            } else {
                min_between = min_between.min(d.get(i, j));
            }
        }
    }
    let dunn = if max_within > 0.0 {
        min_between / max_within
    } else {
        f64::INFINITY
    };

    let g = groups(labels, a.k());
    let mut total = 0.0;
    for i in 0..n {
        let own = labels[i] - 1;
        let mean_to = |c: &Vec<usize>| {
            let s: f64 = c.iter().filter(|&&j| j != i).map(|&j| d.get(i, j)).sum();
            let m = c.iter().filter(|&&j| j != i).count();
            s / m as f64
        };
        let ai = if g[own].len() > 1 {
            mean_to(&g[own])
        } else {
            0.0
        };
        let bi = g
            .iter()
            .enumerate()
            .filter(|(c, members)| *c != own && !members.is_empty())
            .map(|(_, members)| mean_to(members))
            .fold(f64::INFINITY, f64::min);
        let den = ai.max(bi);
        total += if den > 0.0 { (bi - ai) / den } else { 0.0 };
    }
    Ok(InternalScores {
        connectivity,
        dunn,
        silhouette: total / n as f64,
    })
}

/// Column-removal stability. `f` must be standardized; each column is
/// removed in turn, the data reclustered, and the two partitions compared.
/// FOM carries the sqrt(n/(n−k)) small-sample adjustment.
pub fn stability_validation(
    f: &FeatureMatrix,
    method: Clusterer,
    k: usize,
    distance: DistanceMethod,
    params: &ClusterParams,
) -> Result<StabilityScores> {
    let p = f.n_cols();
    if p < 2 {
        return Err(Error::invalid(
            "stability validation needs at least two columns",
        ));
    }
    let n = f.n_rows();
    let full_d = build_dissimilarity_matrix(f, distance)?;
    let full = cluster(&full_d, method, k, params)?;
    let full_groups = groups(full.labels(), k);
    let mut acc = StabilityScores {
        apn: 0.0,
        ad: 0.0,
        adm: 0.0,
        fom: 0.0,
    };
    for del in 0..p {
        let reduced = f.drop_column(del);
        let red_d = build_dissimilarity_matrix(&reduced, distance)?;
        let red = cluster(&red_d, method, k, params)?;
        let red_groups = groups(red.labels(), k);

        let (mut apn, mut ad, mut adm) = (0.0, 0.0, 0.0);
        for gi in full_groups.iter().filter(|g| !g.is_empty()) {
            let ci = centroid(&reduced, gi);
            for gj in red_groups.iter().filter(|g| !g.is_empty()) {
                let overlap = gi.iter().filter(|x| gj.contains(x)).count() as f64;
                if overlap == 0.0 {
                    continue;
                }
                apn += overlap * overlap / gi.len() as f64;
                let mean_d = gi
                    .iter()
                    .flat_map(|&a| gj.iter().map(move |&b| (a, b)))
                    .map(|(a, b)| full_d.get(a, b))
                    .sum::<f64>()
                    / (gi.len() * gj.len()) as f64;
                ad += overlap * mean_d;
                let cj = centroid(&reduced, gj);
                let gap = ci
                    .iter()
                    .zip(&cj)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                adm += overlap * gap;
            }
        }
        acc.apn += 1.0 - apn / n as f64;
        acc.ad += ad / n as f64;
        acc.adm += adm / n as f64;

        let mut ss = 0.0;
        for gj in red_groups.iter().filter(|g| !g.is_empty()) {
            let mean = gj.iter().map(|&i| f.row(i)[del]).sum::<f64>() / gj.len() as f64;
            ss += gj
                .iter()
                .map(|&i| (f.row(i)[del] - mean).powi(2))
                .sum::<f64>();
        }
        acc.fom += if n > k {
            (ss / (n - k) as f64).sqrt()
        } else {
            0.0
        };
    }
    let p = p as f64;
    Ok(StabilityScores {
        apn: acc.apn / p,
        ad: acc.ad / p,
        adm: acc.adm / p,
        fom: acc.fom / p,
    })
}

fn centroid(f: &FeatureMatrix, members: &[usize]) -> Vec<f64> {
    let mut c = vec![0.0; f.n_cols()];
    for &i in members {
        for (acc, x) in c.iter_mut().zip(f.row(i)) {
            *acc += x;
        }
    }
    c.iter_mut().for_each(|x| *x /= members.len() as f64);
    c
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectOptions {
    pub sample_fraction: f64,
    pub seed: u64,
    pub clusterers: Vec<Clusterer>,
    pub k_range: std::ops::RangeInclusive<usize>,
    pub nn: usize,
    pub params: ClusterParams,
}

impl Default for SelectOptions {
    fn default() -> Self {
        SelectOptions {
            sample_fraction: 0.10,
            seed: 42,
            clusterers: Clusterer::ALL.to_vec(),
            k_range: 2..=6,
            nn: 10,
            params: ClusterParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub distance: DistanceMethod,
    pub clusterer: Clusterer,
    pub k: usize,
    pub internal: Option<InternalScores>,
    pub stability: Option<StabilityScores>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Ids of the sampled observations, in matrix order.
    pub sample: Vec<String>,
    pub rows: Vec<ValidationRow>,
}

/// Measures in report order with whether larger is better.
pub const VALIDATION_MEASURES: [(&str, bool); 7] = [
    ("connectivity", false),
    ("dunn", true),
    ("silhouette", true),
    ("apn", false),
    ("ad", false),
    ("adm", false),
    ("fom", false),
];

impl ValidationRow {
    pub fn measure(&self, name: &str) -> Option<f64> {
        let i = self.internal;
        let s = self.stability;
        match name {
            "connectivity" => i.map(|x| x.connectivity),
            "dunn" => i.map(|x| x.dunn),
            "silhouette" => i.map(|x| x.silhouette),
            "apn" => s.map(|x| x.apn),
            "ad" => s.map(|x| x.ad),
            "adm" => s.map(|x| x.adm),
            "fom" => s.map(|x| x.fom),
            _ => None,
        }
    }
}

impl ValidationReport {
    /// Rows ranked best-first on `measure`; rows lacking it are dropped.
    pub fn ranked_by(&self, measure: &str) -> Vec<&ValidationRow> {
        let higher = VALIDATION_MEASURES
            .iter()
            .find(|(m, _)| *m == measure)
            .map(|(_, h)| *h)
            .unwrap_or(true);
        let mut rows: Vec<&ValidationRow> = self
            .rows
            .iter()
            .filter(|r| r.measure(measure).is_some())
            .collect();
        rows.sort_by(|a, b| {
            let (x, y) = (a.measure(measure).unwrap(), b.measure(measure).unwrap());
            if higher {
                y.total_cmp(&x)
            } else {
                x.total_cmp(&y)
            }
        });
        rows
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("distance,clusterer,k");
        for (m, _) in VALIDATION_MEASURES {
            out.push(',');
            out.push_str(m);
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{}", r.distance, r.clusterer, r.k));
            for (m, _) in VALIDATION_MEASURES {
                out.push(',');
                out.push_str(&fmt_opt(r.measure(m)));
            }
            out.push('\n');
        }
        write_atomic(path, out.as_bytes())
    }

    /// One line per measure naming the best (distance, clusterer, k).
    pub fn write_best_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("measure,distance,clusterer,k,value\n");
        for (m, _) in VALIDATION_MEASURES {
            if let Some(r) = self.ranked_by(m).first() {
                out.push_str(&format!(
                    "{m},{},{},{},{}\n",
                    r.distance,
                    r.clusterer,
                    r.k,
                    fmt_opt(r.measure(m))
                ));
            }
        }
        write_atomic(path, out.as_bytes())
    }
}

/// Seeded uniform sample of row indices, sorted ascending.
pub fn sample_rows(n: usize, fraction: f64, seed: u64) -> Result<Vec<usize>> {
    if n < 10 {
        return Err(Error::invalid(format!(
            "need at least 10 observations, have {n}"
        )));
    }
    let size = ((fraction * n as f64).ceil() as usize).clamp(10, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, n, size).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// Internal and stability validation for every (clusterer, k) on a seeded
/// sample, once per distance method. `f` may be raw; the sample is
/// standardized on its own.
pub fn select_methods(
    f: &FeatureMatrix,
    distances: &[DistanceMethod],
    opts: &SelectOptions,
) -> Result<ValidationReport> {
    let idx = sample_rows(f.n_rows(), opts.sample_fraction, opts.seed)?;
    let (sample, _) = f.select_rows(&idx).standardize()?;
    let mut rows = Vec::new();
    for &distance in distances {
        let d = build_dissimilarity_matrix(&sample, distance)?;
        for &clusterer in &opts.clusterers {
            for k in opts.k_range.clone() {
                if k >= sample.n_rows() {
                    continue;
                }
                let internal = cluster(&d, clusterer, k, &opts.params)
                    .and_then(|a| internal_validation(&d, &a, opts.nn))
                    .ok();
                let stability =
                    stability_validation(&sample, clusterer, k, distance, &opts.params).ok();
                rows.push(ValidationRow {
                    distance,
                    clusterer,
                    k,
                    internal,
                    stability,
                });
            }
        }
    }
    Ok(ValidationReport {
        sample: sample.ids().to_vec(),
        rows,
    })
}
