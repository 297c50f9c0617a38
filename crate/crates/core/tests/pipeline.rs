mod common;

use std::fs;
use std::path::Path;

use common::{crawl_oracle, k1_oracle, oracle_measures, Crawl};
use egotopo::measures::MEASURE_NAMES;
use egotopo::pipeline::{cmd_classify, cmd_features, cmd_generate, cmd_validate, PipelineConfig};
use egotopo::synthgen::GeneratorConfig;
use egotopo::{Clusterer, Depth, DirectedGraph, DistanceMethod, FeatureMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_generator() -> GeneratorConfig {
    GeneratorConfig {
        n_humans: 60,
        n_bots: 30,
        bot_out_degree: 15,
        ..GeneratorConfig::default()
    }
}

fn config(out: &Path) -> PipelineConfig {
    PipelineConfig {
        out: out.to_path_buf(),
        generator: small_generator(),
        ..PipelineConfig::default()
    }
}

fn data_lines(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

fn crawl_graph(c: &Crawl) -> DirectedGraph {
    DirectedGraph::from_id_edges(c.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())))
        .unwrap()
        .0
}

#[test]
fn tiny_ego_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.csv");
    fs::write(
        &edges,
        "source,target\na,b\na,c\nb,c\nc,a\nc,d\nd,e\ne,a\nb,f\n",
    )
    .unwrap();
    let egos = dir.path().join("egos.txt");
    fs::write(&egos, "a\n").unwrap();
    let cfg = PipelineConfig {
        edges: Some(edges.clone()),
        egos: Some(egos),
        ..config(dir.path())
    };
    let summary = cmd_features(&cfg).unwrap();
    assert_eq!(summary.counts, vec![(Depth::K2, 1, 0), (Depth::K1, 1, 0)]);

    let (g, _) = egotopo::graph::load_edge_list(&edges).unwrap();
    let k2 = crawl_oracle(&g, "a");
    assert_eq!(k2.nodes.len(), 5);
    for (graph, crawl) in [(Depth::K2, k2.clone()), (Depth::K1, k1_oracle(&k2, "a"))] {
        let f = FeatureMatrix::read_csv(&dir.path().join(format!("{graph}_features.csv"))).unwrap();
        assert_eq!(f.ids(), ["a"]);
        assert_eq!(f.columns(), MEASURE_NAMES);
        let cg = crawl_graph(&crawl);
        let want = oracle_measures(&cg, cg.index_of("a").unwrap()).values();
        for (got, want) in f.row(0).iter().zip(want) {
            assert!((got - want).abs() < 1e-9, "{graph}: {got} vs {want}");
        }
    }

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "zz\n").unwrap();
    let cfg = PipelineConfig {
        egos: Some(bad),
        ..cfg
    };
    assert!(cmd_features(&cfg).is_err());
}

#[test]
fn generated_features_account_for_every_ego() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    cmd_generate(&cfg).unwrap();
    let summary = cmd_features(&cfg).unwrap();
    let excluded = data_lines(&dir.path().join("excluded.csv"));
    let mut total_excluded = 0;
    for (graph, rows, ex) in &summary.counts {
        assert_eq!(rows + ex, 90, "{graph}");
        assert_eq!(
            data_lines(&dir.path().join(format!("{graph}_features.csv"))),
            *rows
        );
        total_excluded += ex;
    }
    assert_eq!(excluded, total_excluded);

    let before = fs::read(dir.path().join("k2_features.csv")).unwrap();
    let cfg4 = PipelineConfig { jobs: 4, ..cfg };
    cmd_features(&cfg4).unwrap();
    assert_eq!(
        before,
        fs::read(dir.path().join("k2_features.csv")).unwrap()
    );
}

#[test]
fn default_grid_writes_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    cmd_generate(&cfg).unwrap();
    cmd_features(&cfg).unwrap();
    let s = cmd_classify(&cfg).unwrap();
    assert!(s.complete());
    assert_eq!(s.reports.len(), 12);
    assert_eq!(s.images.len(), 4);
    assert_eq!(data_lines(&dir.path().join("results.csv")), 12);
    assert_eq!(data_lines(&dir.path().join("roc.csv")), 12);
    assert_eq!(data_lines(&dir.path().join("errors.csv")), 0);
    for img in &s.images {
        assert!(fs::read(img).unwrap().starts_with(b"P5\n"));
    }
    let first = &s.reports[0].method;
    assert_eq!(
        (first.distance, first.graph, first.clusterer),
        (DistanceMethod::Pearson, Depth::K2, Clusterer::ALL[0])
    );
    assert!(dir
        .path()
        .join("assignments")
        .join(format!("{first}.csv"))
        .exists());
}

#[test]
fn separable_features_are_classified_perfectly() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    let mut labels = String::from("user_id,label\n");
    for i in 0..40 {
        let bot = i % 3 == 0;
        let sign = if bot { 1.0 } else { -1.0 };
        rows.push(
            (0..13)
                .map(|j| sign * ((j as f64) + 0.5).sin() + rng.gen_range(-0.05..0.05))
                .collect(),
        );
        ids.push(format!("{i}"));
        labels.push_str(&format!("{i},{}\n", bot as u8));
    }
    let columns = MEASURE_NAMES.iter().map(|s| s.to_string()).collect();
    FeatureMatrix::new(ids, columns, rows)
        .unwrap()
        .write_csv(&dir.path().join("k2_features.csv"))
        .unwrap();
    fs::write(dir.path().join("labels.csv"), labels).unwrap();
    let cfg = PipelineConfig {
        graphs: vec![Depth::K2],
        distances: vec![
            DistanceMethod::Euclidean,
            DistanceMethod::Pearson,
            DistanceMethod::Spearman,
            DistanceMethod::Kendall,
        ],
        ..config(dir.path())
    };
    let s = cmd_classify(&cfg).unwrap();
    assert_eq!(s.reports.len(), 12);
    for r in &s.reports {
        assert_eq!(r.metrics.acc, Some(1.0), "{}", r.method);
    }
}

#[test]
fn validation_tables_are_complete_and_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        graphs: vec![Depth::K2],
        ..config(dir.path())
    };
    cmd_generate(&cfg).unwrap();
    cmd_features(&cfg).unwrap();
    let written = cmd_validate(&cfg).unwrap();
    assert_eq!(written.len(), 1);
    assert_eq!(data_lines(&written[0]), 2 * 3 * 5);
    let first = fs::read(&written[0]).unwrap();
    cmd_validate(&PipelineConfig { jobs: 3, ..cfg }).unwrap();
    assert_eq!(first, fs::read(&written[0]).unwrap());
    assert!(dir.path().join("validation_k2_best.csv").exists());
}

#[test]
fn missing_inputs_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    assert!(cmd_features(&cfg).is_err());
    assert!(cmd_classify(&cfg).is_err());
    assert!(cmd_validate(&cfg).is_err());
}
