//! File-based pipeline stages: generate, features, validate, classify.
//!
//! Each stage reads only documented files and writes its outputs atomically
//! into the output directory, so any stage can be re-run on its own.

use std::cmp::Ordering;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::clustering::{
    cluster, select_methods, ClusterParams, Clusterer, FannyOptions, SelectOptions,
};
use crate::dissimilarity::{build_dissimilarity_matrix, DissimilarityMatrix, DistanceMethod};
use crate::ego::{extract_k2, Depth, Reduction};
use crate::error::{Error, Result};
use crate::evaluation::{
    roc_table, write_results_csv, write_roc_csv, MethodDescriptor, PerformanceReport,
};
use crate::features::FeatureMatrix;
use crate::graph::{load_edge_list, DirectedGraph};
use crate::io::write_atomic;
use crate::labels::{load_labels, write_labels, Labels};
use crate::measures::{compute_feature_vector, compute_feature_vector_lenient, FeatureVector};
use crate::synthgen::{generate_dataset, BotStrategy, GeneratorConfig};
use crate::vat::{render_idm, vat_order};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegeneratePolicy {
    /// Drop egos whose network has fewer than three nodes.
    #[default]
    Exclude,
    /// Keep them, with undefined measures set to 0.
    Impute,
}

impl fmt::Display for DegeneratePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DegeneratePolicy::Exclude => "exclude",
            DegeneratePolicy::Impute => "impute",
        })
    }
}

impl FromStr for DegeneratePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exclude" => Ok(DegeneratePolicy::Exclude),
            "impute" => Ok(DegeneratePolicy::Impute),
            other => Err(Error::invalid(format!(
                "unknown degenerate policy `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub edges: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub egos: Option<PathBuf>,
    /// Directory holding `k2_features.csv` / `k1_features.csv`; defaults to `out`.
    pub features: Option<PathBuf>,
    pub generator: GeneratorConfig,
    pub distances: Vec<DistanceMethod>,
    pub clusterers: Vec<Clusterer>,
    pub graphs: Vec<Depth>,
    pub k: usize,
    pub reduce: Reduction,
    pub jobs: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub degenerate: DegeneratePolicy,
    pub nn: usize,
    pub sample_fraction: f64,
    pub fanny: FannyOptions,
    /// Also write one dissimilarity CSV per (distance, graph type).
    pub write_dissimilarity: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            edges: None,
            labels: None,
            egos: None,
            features: None,
            generator: GeneratorConfig::default(),
            distances: vec![DistanceMethod::Pearson, DistanceMethod::Spearman],
            clusterers: Clusterer::ALL.to_vec(),
            graphs: vec![Depth::K2, Depth::K1],
            k: 2,
            reduce: Reduction::EgoInduced,
            jobs: 1,
            seed: 42,
            out: PathBuf::from("out"),
            degenerate: DegeneratePolicy::Exclude,
            nn: 10,
            sample_fraction: 0.10,
            fanny: FannyOptions::default(),
            write_dissimilarity: false,
        }
    }
}

fn parse_list<T: FromStr<Err = Error>>(s: &str) -> Result<Vec<T>> {
    let items = s
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        return Err(Error::invalid("empty list"));
    }
    Ok(items)
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "1" | "true" | "yes" => Ok(true),
        "0" | "false" | "no" => Ok(false),
        _ => Err(Error::invalid(format!("bad boolean `{value}` for `{key}`"))),
    }
}

impl PipelineConfig {
    /// Sets one `key=value` option. Keys match the long CLI flag names
    /// (dashes or underscores), plus the generator fields.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        let g = &mut self.generator;
        match key.as_str() {
            "edges" => self.edges = Some(PathBuf::from(v)),
            "labels" => self.labels = Some(PathBuf::from(v)),
            "egos" => self.egos = Some(PathBuf::from(v)),
            "features" => self.features = Some(PathBuf::from(v)),
            "out" => self.out = PathBuf::from(v),
            "distances" => self.distances = parse_list(v)?,
            "clusterers" => self.clusterers = parse_list(v)?,
            "graphs" => self.graphs = parse_list(v)?,
            "k" => self.k = parse_num(&key, v)?,
            "reduce" => self.reduce = v.parse()?,
            "jobs" => self.jobs = parse_num(&key, v)?,
            "seed" => {
                self.seed = parse_num(&key, v)?;
                g.seed = self.seed;
            }
            "degenerate" => self.degenerate = v.parse()?,
            "nn" => self.nn = parse_num(&key, v)?,
            "sample_fraction" => self.sample_fraction = parse_num(&key, v)?,
            "memb_exp" => self.fanny.memb_exp = parse_num(&key, v)?,
            "fanny_tol" => self.fanny.tol = parse_num(&key, v)?,
            "fanny_max_iter" => self.fanny.max_iter = parse_num(&key, v)?,
            "write_dissimilarity" => self.write_dissimilarity = parse_bool(&key, v)?,
            "preset" => {
                if v != "default" {
                    return Err(Error::invalid(format!("unknown preset `{v}`")));
                }
                let seed = g.seed;
                *g = GeneratorConfig {
                    seed,
                    ..GeneratorConfig::default()
                };
            }
            "n_humans" => g.n_humans = parse_num(&key, v)?,
            "n_bots" => g.n_bots = parse_num(&key, v)?,
            "human_attachment" => g.human_attachment = parse_num(&key, v)?,
            "human_reciprocation_prob" => g.human_reciprocation_prob = parse_num(&key, v)?,
            "capitalist_fraction" => g.capitalist_fraction = parse_num(&key, v)?,
            "bot_out_degree" => g.bot_out_degree = parse_num(&key, v)?,
            "bot_strategy" => g.bot_strategy = v.parse::<BotStrategy>()?,
            "disguised_bots" => g.disguised_bots = parse_bool(&key, v)?,
            other => return Err(Error::invalid(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a plain-text `key=value` config; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: PathBuf::from("<config>"),
                line: lineno + 1,
                msg: format!("expected key=value, got `{line}`"),
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.distances.is_empty() || self.clusterers.is_empty() || self.graphs.is_empty() {
            return Err(Error::invalid(
                "at least one distance, clusterer and graph type required",
            ));
        }
        if self.k < 2 {
            return Err(Error::invalid("k must be at least 2"));
        }
        Ok(())
    }

    fn features_dir(&self) -> &Path {
        self.features.as_deref().unwrap_or(&self.out)
    }

    fn edges_path(&self) -> PathBuf {
        self.edges
            .clone()
            .unwrap_or_else(|| self.out.join("edges.csv"))
    }

    fn labels_path(&self) -> PathBuf {
        self.labels
            .clone()
            .unwrap_or_else(|| self.out.join("labels.csv"))
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))
    }

    fn cluster_params(&self) -> ClusterParams {
        ClusterParams { fanny: self.fanny }
    }
}

pub fn features_file(graph: Depth) -> String {
    format!("{graph}_features.csv")
}

/// Numeric ids compare as numbers, anything else lexically.
pub fn compare_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

// ---------------------------------------------------------------- generate

pub fn cmd_generate(cfg: &PipelineConfig) -> Result<(PathBuf, PathBuf)> {
    let data = generate_dataset(&cfg.generator)?;
    let edges = cfg.out.join("edges.csv");
    let labels = cfg.out.join("labels.csv");
    data.graph.write_edge_list(&edges)?;
    write_labels(&labels, data.labeled_ids())?;
    write_atomic(
        &cfg.out.join("generator.cfg"),
        cfg.generator.describe().as_bytes(),
    )?;
    Ok((edges, labels))
}

// ---------------------------------------------------------------- features

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    pub matrix: FeatureMatrix,
    /// (ego id, node count) of degenerate egos that were dropped.
    pub excluded: Vec<(String, usize)>,
}

/// Feature vectors for every ego, in the order given, for one graph type.
pub fn extract_features(
    g: &DirectedGraph,
    egos: &[String],
    graph: Depth,
    reduce: Reduction,
    policy: DegeneratePolicy,
) -> Result<FeatureSet> {
    let idx = egos
        .iter()
        .map(|id| g.index_of(id).ok_or_else(|| Error::UnknownNode(id.clone())))
        .collect::<Result<Vec<_>>>()?;
    let per_ego: Vec<std::result::Result<FeatureVector, usize>> = idx
        .par_iter()
        .map(|&e| {
            let k2 = extract_k2(g, e)?;
            let net = match graph {
                Depth::K2 => k2,
                Depth::K1 => k2.reduce(reduce)?,
            };
            Ok(match compute_feature_vector(&net) {
                Ok(fv) => Ok(fv),
                Err(Error::Degenerate { nodes, .. }) => match policy {
                    DegeneratePolicy::Exclude => Err(nodes),
                    DegeneratePolicy::Impute => Ok(compute_feature_vector_lenient(&net)),
                },
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for (id, r) in egos.iter().zip(per_ego) {
        match r {
            Ok(fv) => rows.push((id.clone(), fv)),
            Err(nodes) => excluded.push((id.clone(), nodes)),
        }
    }
    Ok(FeatureSet {
        matrix: FeatureMatrix::from_vectors(rows),
        excluded,
    })
}

fn read_ego_list(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(|l| l.split(',').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty() && *l != "user_id" && *l != "id")
        .map(str::to_string)
        .collect())
}

fn ego_list(cfg: &PipelineConfig, g: &DirectedGraph) -> Result<Vec<String>> {
    let mut egos = if let Some(p) = &cfg.egos {
        read_ego_list(p)?
    } else if cfg.labels_path().exists() {
        load_labels(&cfg.labels_path())?.into_keys().collect()
    } else {
        g.ids().to_vec()
    };
    egos.sort_by(|a, b| compare_ids(a, b));
    egos.dedup();
    Ok(egos)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeaturesSummary {
    /// (graph type, rows written, egos excluded)
    pub counts: Vec<(Depth, usize, usize)>,
}

pub fn cmd_features(cfg: &PipelineConfig) -> Result<FeaturesSummary> {
    cfg.validate()?;
    let (g, _) = load_edge_list(&cfg.edges_path())?;
    let egos = ego_list(cfg, &g)?;
    let pool = cfg.pool()?;
    let mut excluded_csv = String::from("user_id,graph_type,nodes\n");
    let mut counts = Vec::new();
    for &graph in &cfg.graphs {
        let set =
            pool.install(|| extract_features(&g, &egos, graph, cfg.reduce, cfg.degenerate))?;
        set.matrix.write_csv(&cfg.out.join(features_file(graph)))?;
        for (id, nodes) in &set.excluded {
            excluded_csv.push_str(&format!("{id},{graph},{nodes}\n"));
        }
        counts.push((graph, set.matrix.n_rows(), set.excluded.len()));
    }
    write_atomic(&cfg.out.join("excluded.csv"), excluded_csv.as_bytes())?;
    Ok(FeaturesSummary { counts })
}

// ---------------------------------------------------------------- validate

pub fn cmd_validate(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let opts = SelectOptions {
        sample_fraction: cfg.sample_fraction,
        seed: cfg.seed,
        clusterers: cfg.clusterers.clone(),
        k_range: 2..=6,
        nn: cfg.nn,
        params: cfg.cluster_params(),
    };
    let pool = cfg.pool()?;
    let mut written = Vec::new();
    for &graph in &cfg.graphs {
        let f = FeatureMatrix::read_csv(&cfg.features_dir().join(features_file(graph)))?;
        let report = pool.install(|| select_methods(&f, &cfg.distances, &opts))?;
        let path = cfg.out.join(format!("validation_{graph}.csv"));
        report.write_csv(&path)?;
        report.write_best_csv(&cfg.out.join(format!("validation_{graph}_best.csv")))?;
        written.push(path);
    }
    Ok(written)
}

// ---------------------------------------------------------------- classify

#[derive(Debug, Clone)]
pub struct CellFailure {
    pub method: MethodDescriptor,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct ClassifySummary {
    pub reports: Vec<PerformanceReport>,
    pub failures: Vec<CellFailure>,
    pub images: Vec<PathBuf>,
}

impl ClassifySummary {
    pub fn complete(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Prepared {
    graph: Depth,
    distance: DistanceMethod,
    matrix: std::result::Result<DissimilarityMatrix, String>,
}

pub fn cmd_classify(cfg: &PipelineConfig) -> Result<ClassifySummary> {
    cfg.validate()?;
    let labels: Labels = load_labels(&cfg.labels_path())?;
    let pool = cfg.pool()?;
    let params = cfg.cluster_params();

    let mut standardized = Vec::new();
    for &graph in &cfg.graphs {
        let f = FeatureMatrix::read_csv(&cfg.features_dir().join(features_file(graph)))?;
        let (s, _) = f.standardize()?;
        standardized.push((graph, s));
    }

    let pairs: Vec<(usize, DistanceMethod)> = (0..standardized.len())
        .flat_map(|g| cfg.distances.iter().map(move |&d| (g, d)))
        .collect();
    let prepared: Vec<Prepared> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(gi, distance)| {
                let (graph, f) = &standardized[gi];
                Prepared {
                    graph: *graph,
                    distance,
                    matrix: build_dissimilarity_matrix(f, distance).map_err(|e| e.to_string()),
                }
            })
            .collect()
    });

    let mut images = Vec::new();
    for p in &prepared {
        if let Ok(d) = &p.matrix {
            let path = cfg
                .out
                .join("idm")
                .join(format!("{}_{}.pgm", p.distance, p.graph));
            render_idm(d, &vat_order(d), &path)?;
            images.push(path);
            if cfg.write_dissimilarity {
                d.write_csv(
                    &cfg.out
                        .join(format!("dissimilarity_{}_{}.csv", p.distance, p.graph)),
                )?;
            }
        }
    }

    // grid order: distance, graph type, clusterer
    let mut cells = Vec::new();
    for &distance in &cfg.distances {
        for &graph in &cfg.graphs {
            let pi = prepared
                .iter()
                .position(|p| p.graph == graph && p.distance == distance)
                .expect("every pair prepared");
            for &clusterer in &cfg.clusterers {
                cells.push((
                    pi,
                    MethodDescriptor {
                        distance,
                        graph,
                        clusterer,
                    },
                ));
            }
        }
    }
    let outcomes: Vec<std::result::Result<PerformanceReport, String>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(pi, method)| {
                let d = prepared[pi].matrix.as_ref().map_err(Clone::clone)?;
                let a = cluster(d, method.clusterer, cfg.k, &params).map_err(|e| e.to_string())?;
                let path = cfg.out.join("assignments").join(format!("{method}.csv"));
                a.write_csv(&path).map_err(|e| e.to_string())?;
                Ok(PerformanceReport::evaluate(method, &a, &labels))
            })
            .collect()
    });

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for ((_, method), outcome) in cells.iter().zip(outcomes) {
        match outcome {
            Ok(r) => reports.push(r),
            Err(error) => failures.push(CellFailure {
                method: *method,
                error,
            }),
        }
    }
    write_results_csv(&cfg.out.join("results.csv"), &reports)?;
    write_roc_csv(&cfg.out.join("roc.csv"), &roc_table(&reports))?;
    let mut errors = String::from("distance,graph_type,clusterer,error\n");
    for f in &failures {
        let m = f.method;
        let msg = f.error.replace([',', '\n'], ";");
        errors.push_str(&format!(
            "{},{},{},{msg}\n",
            m.distance, m.graph, m.clusterer
        ));
    }
    write_atomic(&cfg.out.join("errors.csv"), errors.as_bytes())?;
    Ok(ClassifySummary {
        reports,
        failures,
        images,
    })
}

// ---------------------------------------------------------------- run

/// All stages. Generates a dataset first when no edge list is given.
pub fn cmd_run(cfg: &PipelineConfig) -> Result<ClassifySummary> {
    cfg.validate()?;
    let mut cfg = cfg.clone();
    if cfg.edges.is_none() {
        let (edges, labels) = cmd_generate(&cfg)?;
        cfg.edges = Some(edges);
        cfg.labels = Some(labels);
    }
    cmd_features(&cfg)?;
    cmd_validate(&cfg)?;
    cmd_classify(&cfg)
}
