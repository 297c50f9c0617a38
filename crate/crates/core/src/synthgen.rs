//! Labeled synthetic follow graphs.
//!
//! Humans grow by directed preferential attachment: every newcomer follows
//! `m` existing humans picked with probability proportional to total degree
//! plus one, and each followed human follows back with probability `p_r`
//! (always, for social capitalists). Bots then follow `bot_out_degree`
//! humans; only capitalists follow a bot back, unless the bot is a
//! disguised degree-preferential one.
//!
//! All randomness comes from a single ChaCha8 stream seeded from the config.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::labels::{Label, Labels};

/// Generator identity recorded alongside every generated dataset.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3, rand 0.8)";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BotStrategy {
    UniformRandom,
    DegreePreferential,
}

impl fmt::Display for BotStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BotStrategy::UniformRandom => "uniform_random",
            BotStrategy::DegreePreferential => "degree_preferential",
        })
    }
}

impl FromStr for BotStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "uniform_random" => Ok(BotStrategy::UniformRandom),
            "degree_preferential" => Ok(BotStrategy::DegreePreferential),
            other => Err(Error::InvalidConfig(format!(
                "unknown bot strategy `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n_humans: usize,
    pub n_bots: usize,
    /// Follows made by each new human.
    pub human_attachment: usize,
    pub human_reciprocation_prob: f64,
    pub capitalist_fraction: f64,
    pub bot_out_degree: usize,
    pub bot_strategy: BotStrategy,
    /// Degree-preferential bots are also followed back with `p_r`.
    pub disguised_bots: bool,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_humans: 200,
            n_bots: 100,
            human_attachment: 3,
            human_reciprocation_prob: 0.4,
            capitalist_fraction: 0.1,
            bot_out_degree: 50,
            bot_strategy: BotStrategy::UniformRandom,
            disguised_bots: false,
            seed: 42,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!(
                    "{name} must lie in [0,1], got {p}"
                )))
            }
        };
        prob("human_reciprocation_prob", self.human_reciprocation_prob)?;
        prob("capitalist_fraction", self.capitalist_fraction)?;
        if self.human_attachment == 0 {
            return Err(Error::InvalidConfig(
                "human_attachment must be at least 1".into(),
            ));
        }
        if self.n_humans < self.human_attachment + 1 {
            return Err(Error::InvalidConfig(format!(
                "need at least {} humans for attachment {}",
                self.human_attachment + 1,
                self.human_attachment
            )));
        }
        if self.n_humans + self.n_bots < 3 {
            return Err(Error::InvalidConfig("need at least three accounts".into()));
        }
        if self.n_bots > 0 && self.bot_out_degree > self.n_humans {
            return Err(Error::InvalidConfig(format!(
                "bot_out_degree {} exceeds the {} humans available",
                self.bot_out_degree, self.n_humans
            )));
        }
        Ok(())
    }

    /// `key=value` lines echoing the config and the RNG in use.
    pub fn describe(&self) -> String {
        format!(
            "n_humans={}\nn_bots={}\nhuman_attachment={}\nhuman_reciprocation_prob={}\n\
             capitalist_fraction={}\nbot_out_degree={}\nbot_strategy={}\ndisguised_bots={}\n\
             seed={}\nrng={}\n",
            self.n_humans,
            self.n_bots,
            self.human_attachment,
            self.human_reciprocation_prob,
            self.capitalist_fraction,
            self.bot_out_degree,
            self.bot_strategy,
            self.disguised_bots,
            self.seed,
            RNG_NAME,
        )
    }
}

/// Growing graph state. Node `i` has id `i.to_string()`.
#[derive(Debug, Clone)]
pub struct Substrate {
    edges: Vec<(usize, usize)>,
    n: usize,
    n_humans: usize,
    capitalist: Vec<bool>,
    in_degree: Vec<usize>,
    /// Each node once plus both endpoints of each human-human edge, so a
    /// uniform draw picks a human with probability ∝ degree + 1.
    urn: Vec<usize>,
}

impl Substrate {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn human_count(&self) -> usize {
        self.n_humans
    }

    pub fn is_capitalist(&self, v: usize) -> bool {
        self.capitalist.get(v).copied().unwrap_or(false)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        self.edges.push((u, v));
        self.in_degree[v] += 1;
    }

    pub fn to_graph(&self) -> DirectedGraph {
        let ids = (0..self.n).map(|i| i.to_string()).collect();
        DirectedGraph::from_index_edges(ids, self.edges.iter().copied())
            .expect("generated edges are in range")
            .0
    }
}

/// Grows the human part of the graph.
pub fn grow_substrate(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Result<Substrate> {
    cfg.validate()?;
    let n = cfg.n_humans;
    let mut s = Substrate {
        edges: Vec::new(),
        n: 0,
        n_humans: 0,
        capitalist: Vec::with_capacity(n),
        in_degree: Vec::with_capacity(n),
        urn: Vec::new(),
    };
    for t in 0..n {
        s.capitalist.push(rng.gen_bool(cfg.capitalist_fraction));
        s.in_degree.push(0);
        let want = cfg.human_attachment.min(t);
        let mut targets: Vec<usize> = Vec::with_capacity(want);
        while targets.len() < want {
            let pick = s.urn[rng.gen_range(0..s.urn.len())];
            if !targets.contains(&pick) {
                targets.push(pick);
            }
        }
        s.urn.push(t);
        s.n = t + 1;
        s.n_humans = t + 1;
        for v in targets {
            s.add_edge(t, v);
            s.urn.extend([t, v]);
            if s.capitalist[v] || rng.gen_bool(cfg.human_reciprocation_prob) {
                s.add_edge(v, t);
                s.urn.extend([v, t]);
            }
        }
    }
    Ok(s)
}

pub fn generate_human_substrate(
    cfg: &GeneratorConfig,
    rng: &mut ChaCha8Rng,
) -> Result<DirectedGraph> {
    Ok(grow_substrate(cfg, rng)?.to_graph())
}

/// Adds one bot following `bot_out_degree` humans; returns its index.
pub fn attach_bot(s: &mut Substrate, cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Result<usize> {
    let humans = s.n_humans;
    if humans == 0 {
        return Err(Error::InvalidConfig(
            "cannot attach a bot to an empty substrate".into(),
        ));
    }
    if cfg.bot_out_degree > humans {
        return Err(Error::InvalidConfig(format!(
            "bot_out_degree {} exceeds the {humans} humans available",
            cfg.bot_out_degree
        )));
    }
    let bot = s.n;
    s.n += 1;
    s.in_degree.push(0);
    let mut targets = match cfg.bot_strategy {
        BotStrategy::UniformRandom => index::sample(rng, humans, cfg.bot_out_degree).into_vec(),
        BotStrategy::DegreePreferential => {
            let weights: Vec<f64> = s.in_degree[..humans]
                .iter()
                .map(|&d| d as f64 + 1.0)
                .collect();
            index::sample_weighted(rng, humans, |i| weights[i], cfg.bot_out_degree)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?
                .into_vec()
        }
    };
    targets.sort_unstable();
    let disguised = cfg.disguised_bots && cfg.bot_strategy == BotStrategy::DegreePreferential;
    for v in targets {
        s.add_edge(bot, v);
        if s.capitalist[v] || (disguised && rng.gen_bool(cfg.human_reciprocation_prob)) {
            s.add_edge(v, bot);
        }
    }
    Ok(bot)
}

#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub graph: DirectedGraph,
    pub labels: Labels,
    pub config: GeneratorConfig,
}

impl LabeledDataset {
    /// Ids in node order, with their labels.
    pub fn labeled_ids(&self) -> impl Iterator<Item = (&str, Label)> + '_ {
        self.graph
            .ids()
            .iter()
            .map(|id| (id.as_str(), self.labels[id]))
    }
}

pub fn generate_dataset(cfg: &GeneratorConfig) -> Result<LabeledDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut s = grow_substrate(cfg, &mut rng)?;
    for _ in 0..cfg.n_bots {
        attach_bot(&mut s, cfg, &mut rng)?;
    }
    let graph = s.to_graph();
    let labels = (0..s.n)
        .map(|i| {
            let label = if i < s.n_humans {
                Label::Human
            } else {
                Label::Bot
            };
            (i.to_string(), label)
        })
        .collect();
    Ok(LabeledDataset {
        graph,
        labels,
        config: cfg.clone(),
    })
}
