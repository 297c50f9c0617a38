//! Python bindings: graphs, ego features, dissimilarities, clustering,
//! scoring and the file pipeline.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict};

use egotopo::clustering::{self as cl, ClusterParams};
use egotopo::dissimilarity::build_dissimilarity_matrix;
use egotopo::evaluation::{MethodDescriptor, PerformanceReport};
use egotopo::pipeline::{self, extract_features, DegeneratePolicy, PipelineConfig};
use egotopo::vat;
use egotopo::{
    ClusterAssignment, Clusterer, Depth, DirectedGraph, DissimilarityMatrix, DistanceMethod,
    FeatureMatrix, Label, Labels,
};

fn err(e: egotopo::Error) -> PyErr {
    match e {
        egotopo::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = egotopo::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

/// Applies Python keyword arguments as `key=value` settings.
fn apply_kwargs(cfg: &mut PipelineConfig, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<()> {
    let Some(kw) = kwargs else { return Ok(()) };
    for (k, v) in kw.iter() {
        let key: String = k.extract()?;
        let value = if v.is_instance_of::<PyBool>() {
            v.extract::<bool>()?.to_string()
        } else if let Ok(items) = v.extract::<Vec<String>>() {
            items.join(",")
        } else {
            v.str()?.to_string()
        };
        cfg.set(&key, &value).map_err(err)?;
    }
    Ok(())
}

fn to_labels(labels: BTreeMap<String, bool>) -> Labels {
    labels
        .into_iter()
        .map(|(id, bot)| (id, if bot { Label::Bot } else { Label::Human }))
        .collect()
}

/// Directed follow graph with string node ids.
#[pyclass(name = "Graph", module = "pyegotopo", skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: DirectedGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(edges: Vec<(String, String)>) -> PyResult<Self> {
        let (inner, _) =
            DirectedGraph::from_id_edges(edges.iter().map(|(a, b)| (a.as_str(), b.as_str())))
                .map_err(err)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let (inner, _) = egotopo::graph::load_edge_list(&path).map_err(err)?;
        Ok(PyGraph { inner })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.write_edge_list(&path).map_err(err)
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn ids(&self) -> Vec<String> {
        self.inner.ids().to_vec()
    }

    fn edges(&self) -> Vec<(String, String)> {
        self.inner
            .edges()
            .map(|(u, v)| (self.inner.id(u).to_string(), self.inner.id(v).to_string()))
            .collect()
    }

    /// Ego network of `ego` at depth `k2` or `k1`.
    #[pyo3(signature = (ego, depth="k2", reduce="ego"))]
    fn ego_network(&self, ego: &str, depth: &str, reduce: &str) -> PyResult<PyGraph> {
        let k2 = egotopo::ego::extract_k2_by_id(&self.inner, ego).map_err(err)?;
        let net = match parse::<Depth>(depth)? {
            Depth::K2 => k2,
            Depth::K1 => k2.reduce(parse(reduce)?).map_err(err)?,
        };
        Ok(PyGraph {
            inner: net.graph().clone(),
        })
    }

    /// The thirteen measures of one ego network, by name.
    #[pyo3(signature = (ego, depth="k2", reduce="ego"))]
    fn measures(&self, ego: &str, depth: &str, reduce: &str) -> PyResult<BTreeMap<String, f64>> {
        let k2 = egotopo::ego::extract_k2_by_id(&self.inner, ego).map_err(err)?;
        let net = match parse::<Depth>(depth)? {
            Depth::K2 => k2,
            Depth::K1 => k2.reduce(parse(reduce)?).map_err(err)?,
        };
        let fv = egotopo::measures::compute_feature_vector(&net).map_err(err)?;
        Ok(egotopo::measures::MEASURE_NAMES
            .iter()
            .zip(fv.values())
            .map(|(n, v)| (n.to_string(), v))
            .collect())
    }

    /// Feature rows for `egos` (all nodes when omitted).
    #[pyo3(signature = (egos=None, depth="k2", reduce="ego", degenerate="exclude"))]
    fn features(
        &self,
        egos: Option<Vec<String>>,
        depth: &str,
        reduce: &str,
        degenerate: &str,
    ) -> PyResult<PyFeatures> {
        let egos = egos.unwrap_or_else(|| self.inner.ids().to_vec());
        let policy: DegeneratePolicy = parse(degenerate)?;
        let set = extract_features(&self.inner, &egos, parse(depth)?, parse(reduce)?, policy)
            .map_err(err)?;
        Ok(PyFeatures {
            inner: set.matrix,
            excluded: set.excluded,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(nodes={}, edges={})",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

/// Per-ego feature matrix.
#[pyclass(name = "Features", module = "pyegotopo", skip_from_py_object)]
#[derive(Clone)]
struct PyFeatures {
    inner: FeatureMatrix,
    excluded: Vec<(String, usize)>,
}

#[pymethods]
impl PyFeatures {
    #[new]
    fn new(ids: Vec<String>, columns: Vec<String>, rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyFeatures {
            inner: FeatureMatrix::new(ids, columns, rows).map_err(err)?,
            excluded: Vec::new(),
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyFeatures {
            inner: FeatureMatrix::read_csv(&path).map_err(err)?,
            excluded: Vec::new(),
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.write_csv(&path).map_err(err)
    }

    #[getter]
    fn ids(&self) -> Vec<String> {
        self.inner.ids().to_vec()
    }

    #[getter]
    fn columns(&self) -> Vec<String> {
        self.inner.columns().to_vec()
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows().to_vec()
    }

    /// (ego id, node count) of egos dropped as degenerate.
    #[getter]
    fn excluded(&self) -> Vec<(String, usize)> {
        self.excluded.clone()
    }

    fn standardize(&self) -> PyResult<PyFeatures> {
        let (inner, _) = self.inner.standardize().map_err(err)?;
        Ok(PyFeatures {
            inner,
            excluded: self.excluded.clone(),
        })
    }

    /// Standardizes if needed, then builds the pairwise matrix.
    #[pyo3(signature = (method="spearman"))]
    fn dissimilarity(&self, method: &str) -> PyResult<PyDissimilarity> {
        let f = if self.inner.is_standardized() {
            self.inner.clone()
        } else {
            self.inner.standardize().map_err(err)?.0
        };
        let inner =
            build_dissimilarity_matrix(&f, parse::<DistanceMethod>(method)?).map_err(err)?;
        Ok(PyDissimilarity { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.n_rows()
    }
}

type FannyTuple = (Vec<usize>, Vec<Vec<f64>>, f64, bool);

/// Symmetric dissimilarity matrix with a zero diagonal.
#[pyclass(name = "Dissimilarity", module = "pyegotopo", skip_from_py_object)]
#[derive(Clone)]
struct PyDissimilarity {
    inner: DissimilarityMatrix,
}

#[pymethods]
impl PyDissimilarity {
    #[new]
    #[pyo3(signature = (rows, ids=None))]
    fn new(rows: Vec<Vec<f64>>, ids: Option<Vec<String>>) -> PyResult<Self> {
        let inner = match ids {
            Some(ids) => DissimilarityMatrix::from_square(ids, &rows),
            None => DissimilarityMatrix::from_rows(&rows),
        }
        .map_err(err)?;
        Ok(PyDissimilarity { inner })
    }

    #[getter]
    fn ids(&self) -> Vec<String> {
        self.inner.ids().to_vec()
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        (0..self.inner.len())
            .map(|i| self.inner.row(i).to_vec())
            .collect()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        let n = self.inner.len();
        if i >= n || j >= n {
            return Err(PyValueError::new_err(format!(
                "index out of range for {n} observations"
            )));
        }
        Ok(self.inner.get(i, j))
    }

    fn vat_order(&self) -> Vec<usize> {
        vat::vat_order(&self.inner)
    }

    /// Row-major 8-bit intensities of the VAT-ordered image.
    fn idm_pixels(&self) -> PyResult<Vec<u8>> {
        vat::idm_pixels(&self.inner, &vat::vat_order(&self.inner)).map_err(err)
    }

    fn write_idm(&self, path: PathBuf) -> PyResult<()> {
        vat::render_idm(&self.inner, &vat::vat_order(&self.inner), &path).map_err(err)
    }

    /// Cluster labels 1..=k from `pam`, `fanny` or `agnes`.
    #[pyo3(signature = (method, k=2))]
    fn cluster(&self, method: &str, k: usize) -> PyResult<Vec<usize>> {
        let a =
            cl::cluster(&self.inner, parse(method)?, k, &ClusterParams::default()).map_err(err)?;
        Ok(a.labels().to_vec())
    }

    /// (labels, medoid indices, objective)
    #[pyo3(signature = (k=2))]
    fn pam(&self, k: usize) -> PyResult<(Vec<usize>, Vec<usize>, f64)> {
        let r = cl::pam::pam(&self.inner, k).map_err(err)?;
        Ok((r.assignment.labels().to_vec(), r.medoids, r.objective))
    }

    /// (labels, membership rows, objective, converged)
    #[pyo3(signature = (k=2, memb_exp=2.0, tol=1e-9, max_iter=500))]
    fn fanny(&self, k: usize, memb_exp: f64, tol: f64, max_iter: usize) -> PyResult<FannyTuple> {
        let opts = cl::FannyOptions {
            memb_exp,
            tol,
            max_iter,
        };
        let r = cl::fanny::fanny(&self.inner, k, &opts).map_err(err)?;
        let u = r.memberships.rows().map(<[f64]>::to_vec).collect();
        Ok((r.assignment.labels().to_vec(), u, r.objective, r.converged))
    }

    /// Merge heights of the average-linkage dendrogram.
    fn agnes_heights(&self) -> PyResult<Vec<f64>> {
        Ok(cl::agnes::agnes(&self.inner).map_err(err)?.heights())
    }

    /// Connectivity, Dunn index and mean silhouette of a labelling.
    #[pyo3(signature = (labels, nn=10))]
    fn internal_validation(
        &self,
        labels: Vec<usize>,
        nn: usize,
    ) -> PyResult<BTreeMap<String, f64>> {
        let k = labels.iter().copied().max().unwrap_or(1);
        let a = ClusterAssignment::new(self.inner.ids().to_vec(), labels, k, Clusterer::Pam)
            .map_err(err)?;
        let s = cl::validation::internal_validation(&self.inner, &a, nn).map_err(err)?;
        Ok(BTreeMap::from([
            ("connectivity".into(), s.connectivity),
            ("dunn".into(), s.dunn),
            ("silhouette".into(), s.silhouette),
        ]))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

fn metrics_dict(r: &PerformanceReport) -> BTreeMap<String, Option<f64>> {
    let m = &r.metrics;
    let c = &r.confusion;
    let mut out: BTreeMap<String, Option<f64>> = [
        ("fpr", m.fpr),
        ("tpr", m.tpr),
        ("acc", m.acc),
        ("phi", m.phi),
        ("f", m.f),
        ("prec", m.prec),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    for (k, v) in [("tp", c.tp), ("fp", c.fp), ("fn", c.fn_), ("tn", c.tn)] {
        out.insert(k.into(), Some(v as f64));
    }
    out
}

/// Scores a clustering against bot labels (`True` = bot).
#[pyfunction]
fn evaluate(
    ids: Vec<String>,
    clusters: Vec<usize>,
    labels: BTreeMap<String, bool>,
) -> PyResult<BTreeMap<String, Option<f64>>> {
    let k = clusters.iter().copied().max().unwrap_or(1);
    let a = ClusterAssignment::new(ids, clusters, k, Clusterer::Pam).map_err(err)?;
    let method = MethodDescriptor {
        distance: DistanceMethod::Spearman,
        graph: Depth::K2,
        clusterer: Clusterer::Pam,
    };
    Ok(metrics_dict(&PerformanceReport::evaluate(
        method,
        &a,
        &to_labels(labels),
    )))
}

/// Synthetic labeled graph; keyword arguments override generator fields.
#[pyfunction]
#[pyo3(signature = (seed=42, **kwargs))]
fn generate(
    seed: u64,
    kwargs: Option<&Bound<'_, PyDict>>,
) -> PyResult<(PyGraph, BTreeMap<String, bool>)> {
    let mut cfg = PipelineConfig::default();
    cfg.set("seed", &seed.to_string()).map_err(err)?;
    apply_kwargs(&mut cfg, kwargs)?;
    let d = egotopo::synthgen::generate_dataset(&cfg.generator).map_err(err)?;
    let labels = d
        .labels
        .iter()
        .map(|(id, l)| (id.clone(), l.is_bot()))
        .collect();
    Ok((PyGraph { inner: d.graph }, labels))
}

/// Runs every pipeline stage into `out`; returns one dict per grid cell.
#[pyfunction]
#[pyo3(signature = (out, **kwargs))]
fn run_pipeline(
    py: Python<'_>,
    out: PathBuf,
    kwargs: Option<&Bound<'_, PyDict>>,
) -> PyResult<Vec<BTreeMap<String, Py<PyAny>>>> {
    let mut cfg = PipelineConfig {
        out,
        ..PipelineConfig::default()
    };
    apply_kwargs(&mut cfg, kwargs)?;
    let summary = py.detach(|| pipeline::cmd_run(&cfg)).map_err(err)?;
    if let Some(f) = summary.failures.first() {
        return Err(PyValueError::new_err(format!(
            "cell {} failed: {}",
            f.method, f.error
        )));
    }
    summary
        .reports
        .iter()
        .map(|r| {
            let mut row: BTreeMap<String, Py<PyAny>> = metrics_dict(r)
                .into_iter()
                .map(|(k, v)| Ok((k, v.into_pyobject(py)?.into_any().unbind())))
                .collect::<PyResult<_>>()?;
            row.insert(
                "method".into(),
                r.method.to_string().into_pyobject(py)?.into_any().unbind(),
            );
            Ok(row)
        })
        .collect()
}

#[pymodule]
fn pyegotopo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyFeatures>()?;
    m.add_class::<PyDissimilarity>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add("MEASURES", egotopo::measures::MEASURE_NAMES.to_vec())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
