//! Scoring cluster assignments against bot/not labels.

use std::path::Path;

use crate::clustering::{ClusterAssignment, Clusterer};
use crate::dissimilarity::DistanceMethod;
use crate::ego::Depth;
use crate::error::{Error, Result};
use crate::io::{fmt_opt, write_atomic};
use crate::labels::{Label, Labels};

/// Cluster assignment mapped onto predicted labels.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedAssignment {
    pub ids: Vec<String>,
    pub predicted: Vec<Label>,
    /// For two clusters: cluster 1 was taken as the bot cluster instead of
    /// the default cluster 2.
    pub flipped: bool,
}

/// For k = 2, picks whichever of the two cluster→label mappings scores the
/// higher accuracy on the labeled observations; a tie keeps cluster 2 as
/// bot. For k > 2 each cluster takes its majority label (ties to bot).
pub fn align_clusters(assignment: &ClusterAssignment, labels: &Labels) -> OrientedAssignment {
    let k = assignment.k();
    // per cluster: (bots, humans) among labeled observations
    let mut tally = vec![(0usize, 0usize); k];
    for (id, &c) in assignment.ids().iter().zip(assignment.labels()) {
        match labels.get(id) {
            Some(Label::Bot) => tally[c - 1].0 += 1,
            Some(Label::Human) => tally[c - 1].1 += 1,
            None => {}
        }
    }
    let (bot_cluster, flipped): (Vec<bool>, bool) = if k == 2 {
        // correct predictions under each orientation
        let default = tally[1].0 + tally[0].1;
        let flipped = tally[0].0 + tally[1].1;
        if flipped > default {
            (vec![true, false], true)
        } else {
            (vec![false, true], false)
        }
    } else {
        (tally.iter().map(|&(b, h)| b >= h).collect(), false)
    };
    let predicted = assignment
        .labels()
        .iter()
        .map(|&c| {
            if bot_cluster[c - 1] {
                Label::Bot
            } else {
                Label::Human
            }
        })
        .collect();
    OrientedAssignment {
        ids: assignment.ids().to_vec(),
        predicted,
        flipped,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionTable {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionTable {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// The table obtained by swapping predicted classes.
    pub fn swapped(&self) -> ConfusionTable {
        ConfusionTable {
            tp: self.fn_,
            fp: self.tn,
            fn_: self.tp,
            tn: self.fp,
        }
    }
}

/// Confusion counts over labeled ids; the second value counts ids without a
/// label, which are skipped.
pub fn confusion(oriented: &OrientedAssignment, labels: &Labels) -> (ConfusionTable, usize) {
    let mut ct = ConfusionTable::default();
    let mut skipped = 0;
    for (id, &pred) in oriented.ids.iter().zip(&oriented.predicted) {
        match (pred, labels.get(id)) {
            (_, None) => skipped += 1,
            (Label::Bot, Some(Label::Bot)) => ct.tp += 1,
            (Label::Bot, Some(Label::Human)) => ct.fp += 1,
            (Label::Human, Some(Label::Bot)) => ct.fn_ += 1,
            (Label::Human, Some(Label::Human)) => ct.tn += 1,
        }
    }
    (ct, skipped)
}

/// The six performance measures; `None` marks a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub fpr: Option<f64>,
    pub tpr: Option<f64>,
    pub acc: Option<f64>,
    pub phi: Option<f64>,
    pub f: Option<f64>,
    pub prec: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn performance(ct: &ConfusionTable) -> Metrics {
    let ConfusionTable { tp, fp, fn_, tn } = *ct;
    let tpr = ratio(tp, tp + fn_);
    let prec = ratio(tp, tp + fp);
    let f = match (prec, tpr) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    let den = [tp + fp, tp + fn_, tn + fp, tn + fn_]
        .iter()
        .map(|&x| x as f64)
        .product::<f64>();
    let phi = (den > 0.0).then(|| {
        let num = tp as f64 * tn as f64 - fp as f64 * fn_ as f64;
        (num / den.sqrt()).clamp(-1.0, 1.0)
    });
    Metrics {
        fpr: ratio(fp, fp + tn),
        tpr,
        acc: ratio(tp + tn, ct.total()),
        phi,
        f,
        prec,
    }
}

/// One cell of the evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MethodDescriptor {
    pub distance: DistanceMethod,
    pub graph: Depth,
    pub clusterer: Clusterer,
}

impl std::fmt::Display for MethodDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}-{}", self.distance, self.graph, self.clusterer)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceReport {
    pub method: MethodDescriptor,
    pub flipped: bool,
    pub confusion: ConfusionTable,
    pub metrics: Metrics,
}

impl PerformanceReport {
    pub fn evaluate(
        method: MethodDescriptor,
        assignment: &ClusterAssignment,
        labels: &Labels,
    ) -> PerformanceReport {
        let oriented = align_clusters(assignment, labels);
        let (confusion, _) = confusion(&oriented, labels);
        PerformanceReport {
            method,
            flipped: oriented.flipped,
            confusion,
            metrics: performance(&confusion),
        }
    }
}

pub const RESULTS_HEADER: &str =
    "distance,graph_type,clusterer,flipped,tp,fp,fn,tn,fpr,tpr,acc,phi,f,prec";

pub fn write_results_csv(path: &Path, reports: &[PerformanceReport]) -> Result<()> {
    let mut out = format!("{RESULTS_HEADER}\n");
    for r in reports {
        let m = &r.metrics;
        let c = &r.confusion;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.method.distance,
            r.method.graph,
            r.method.clusterer,
            u8::from(r.flipped),
            c.tp,
            c.fp,
            c.fn_,
            c.tn,
            fmt_opt(m.fpr),
            fmt_opt(m.tpr),
            fmt_opt(m.acc),
            fmt_opt(m.phi),
            fmt_opt(m.f),
            fmt_opt(m.prec),
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// A single ROC point; `None` coordinates are written as `NA`.
#[derive(Debug, Clone, PartialEq)]
pub struct RocPoint {
    pub method: String,
    pub fpr: Option<f64>,
    pub tpr: Option<f64>,
}

impl RocPoint {
    pub fn is_defined(&self) -> bool {
        self.fpr.is_some() && self.tpr.is_some()
    }

    /// On the fpr = tpr chance diagonal.
    pub fn on_diagonal(&self) -> bool {
        matches!((self.fpr, self.tpr), (Some(x), Some(y)) if (x - y).abs() < 1e-12)
    }
}

/// Name under which the chance diagonal is documented; it is a convention of
/// the plot, not a data row.
pub const RANDOM_GUESS: &str = "random-guess: tpr = fpr";

pub fn roc_table(reports: &[PerformanceReport]) -> Vec<RocPoint> {
    reports
        .iter()
        .map(|r| RocPoint {
            method: r.method.to_string(),
            fpr: r.metrics.fpr,
            tpr: r.metrics.tpr,
        })
        .collect()
}

pub fn write_roc_csv(path: &Path, points: &[RocPoint]) -> Result<()> {
    let mut out = String::from("method,fpr,tpr\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            p.method,
            fmt_opt(p.fpr),
            fmt_opt(p.tpr)
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Reads an assignment CSV (`user_id,cluster`) back.
pub fn read_assignment_csv(path: &Path, method: Clusterer) -> Result<ClusterAssignment> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        let bad = || Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: format!("expected `user_id,cluster`, got `{line}`"),
        };
        let (id, c) = line.split_once(',').ok_or_else(bad)?;
        ids.push(id.to_string());
        labels.push(c.trim().parse::<usize>().map_err(|_| bad())?);
    }
    let k = labels.iter().copied().max().unwrap_or(1);
    ClusterAssignment::new(ids, labels, k, method)
}
