use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use egotopo::pipeline::{self, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "egotopo",
    version,
    about = "Bot detection from ego-network topology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic follower graph.
    Generate(Opts),
    /// Extract K2 and K1 feature CSVs for every ego.
    Features(Opts),
    /// Run the clustering grid and score it against labels.
    Classify(Opts),
    /// Internal and stability validation on a sample.
    Validate(Opts),
    /// All stages in order.
    Run(Opts),
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// key=value config file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// generator preset (only `default`)
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    edges: Option<String>,
    #[arg(long)]
    labels: Option<String>,
    /// ego id list, one per line
    #[arg(long)]
    egos: Option<String>,
    /// directory holding the feature CSVs (defaults to --out)
    #[arg(long)]
    features: Option<String>,
    #[arg(long)]
    distances: Option<String>,
    #[arg(long)]
    clusterers: Option<String>,
    #[arg(long)]
    graphs: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// `ego` or `kcore:<k>`
    #[arg(long)]
    reduce: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// `exclude` or `impute`
    #[arg(long)]
    degenerate: Option<String>,
    /// extra key=value settings, applied last
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Opts {
    fn config(&self) -> egotopo::Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        if let Some(p) = &self.config {
            cfg.apply_file(p)?;
        }
        let flags = [
            ("preset", &self.preset),
            ("edges", &self.edges),
            ("labels", &self.labels),
            ("egos", &self.egos),
            ("features", &self.features),
            ("distances", &self.distances),
            ("clusterers", &self.clusterers),
            ("graphs", &self.graphs),
            ("k", &self.k),
            ("reduce", &self.reduce),
            ("jobs", &self.jobs),
            ("seed", &self.seed),
            ("out", &self.out),
            ("degenerate", &self.degenerate),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                egotopo::Error::InvalidConfig(format!("expected KEY=VALUE, got `{kv}`"))
            })?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }
}

fn report_classify(s: &pipeline::ClassifySummary) -> ExitCode {
    for r in &s.reports {
        let acc = r
            .metrics
            .acc
            .map_or("NA".to_string(), |a| format!("{a:.3}"));
        let tpr = r
            .metrics
            .tpr
            .map_or("NA".to_string(), |a| format!("{a:.3}"));
        println!("{}\tacc={acc}\ttpr={tpr}", r.method);
    }
    for f in &s.failures {
        eprintln!("cell {} failed: {}", f.method, f.error);
    }
    if s.complete() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn run(cli: Cli) -> egotopo::Result<ExitCode> {
    match cli.command {
        Command::Generate(o) => {
            let (edges, labels) = pipeline::cmd_generate(&o.config()?)?;
            println!("wrote {} and {}", edges.display(), labels.display());
        }
        Command::Features(o) => {
            let summary = pipeline::cmd_features(&o.config()?)?;
            for (graph, rows, excluded) in summary.counts {
                println!("{graph}: {rows} rows, {excluded} excluded");
            }
        }
        Command::Validate(o) => {
            for p in pipeline::cmd_validate(&o.config()?)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Classify(o) => return Ok(report_classify(&pipeline::cmd_classify(&o.config()?)?)),
        Command::Run(o) => return Ok(report_classify(&pipeline::cmd_run(&o.config()?)?)),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
