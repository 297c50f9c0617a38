//! Partitioning (PAM), fuzzy (FANNY) and agglomerative (AGNES) clustering over
//! a [`DissimilarityMatrix`], plus internal and stability validation.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::io::write_atomic;

pub mod agnes;
pub mod fanny;
pub mod pam;
pub mod validation;

pub use agnes::{agnes, cut_dendrogram, Dendrogram, Merge};
pub use fanny::{fanny, FannyOptions, FannyResult, MembershipMatrix};
pub use pam::{pam, PamResult};
pub use validation::{
    internal_validation, select_methods, stability_validation, InternalScores, SelectOptions,
    StabilityScores, ValidationReport, ValidationRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clusterer {
    Pam,
    Fanny,
    Agnes,
}

impl Clusterer {
    pub const ALL: [Clusterer; 3] = [Clusterer::Pam, Clusterer::Fanny, Clusterer::Agnes];

    pub fn as_str(self) -> &'static str {
        match self {
            Clusterer::Pam => "pam",
            Clusterer::Fanny => "fanny",
            Clusterer::Agnes => "agnes",
        }
    }
}

impl fmt::Display for Clusterer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Clusterer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pam" => Ok(Clusterer::Pam),
            "fanny" => Ok(Clusterer::Fanny),
            "agnes" => Ok(Clusterer::Agnes),
            other => Err(Error::invalid(format!("unknown clusterer `{other}`"))),
        }
    }
}

/// Crisp partition of observations into clusters labelled 1..=k.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    ids: Vec<String>,
    labels: Vec<usize>,
    k: usize,
    method: Clusterer,
    medoids: Option<Vec<usize>>,
}

impl ClusterAssignment {
    pub fn new(ids: Vec<String>, labels: Vec<usize>, k: usize, method: Clusterer) -> Result<Self> {
        if ids.len() != labels.len() {
            return Err(Error::invalid("one label per observation required"));
        }
        if labels.iter().any(|&l| l == 0 || l > k) {
            return Err(Error::invalid(format!("labels must lie in 1..={k}")));
        }
        Ok(ClusterAssignment {
            ids,
            labels,
            k,
            method,
            medoids: None,
        })
    }

    pub(crate) fn with_medoids(mut self, medoids: Vec<usize>) -> Self {
        self.medoids = Some(medoids);
        self
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn method(&self) -> Clusterer {
        self.method
    }

    pub fn medoids(&self) -> Option<&[usize]> {
        self.medoids.as_deref()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l - 1] += 1;
        }
        sizes
    }

    /// True when no cluster is empty. FANNY's argmax labels can leave one
    /// empty when memberships tie.
    pub fn is_complete(&self) -> bool {
        self.cluster_sizes().iter().all(|&s| s > 0)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("user_id,cluster\n");
        for (id, l) in self.ids.iter().zip(&self.labels) {
            out.push_str(id);
            out.push(',');
            out.push_str(&l.to_string());
            out.push('\n');
        }
        write_atomic(path, out.as_bytes())
    }
}

/// Tunables shared by the grid runner.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClusterParams {
    pub fanny: FannyOptions,
}

/// Runs `method` with `k` clusters.
pub fn cluster(
    d: &DissimilarityMatrix,
    method: Clusterer,
    k: usize,
    params: &ClusterParams,
) -> Result<ClusterAssignment> {
    match method {
        Clusterer::Pam => Ok(pam(d, k)?.assignment),
        Clusterer::Fanny => Ok(fanny(d, k, &params.fanny)?.assignment),
        Clusterer::Agnes => cut_dendrogram(&agnes(d)?, k, d.ids()),
    }
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::invalid(format!(
            "k={k} out of range: need 1 <= k < n={n}"
        )));
    }
    Ok(())
}
