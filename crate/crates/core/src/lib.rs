//! Bot/human classification of social accounts from the topology of their
//! two-step friends-only ego networks.
//!
//! The pipeline runs: [`graph`] ingestion, [`ego`] extraction, [`measures`]
//! per ego, [`dissimilarity`] construction with [`vat`] ordering,
//! [`clustering`], and [`evaluation`] against labels. [`synthgen`] produces
//! labeled test graphs and [`pipeline`] ties the stages to files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clustering;
pub mod dissimilarity;
pub mod ego;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod graph;
pub mod io;
pub mod labels;
pub mod measures;
pub mod pipeline;
pub mod synthgen;
pub mod vat;

pub use clustering::{ClusterAssignment, Clusterer};
pub use dissimilarity::{DissimilarityMatrix, DistanceMethod};
pub use ego::{Depth, EgoNetwork, Reduction};
pub use error::{Error, Result};
pub use features::FeatureMatrix;
pub use graph::{DirectedGraph, IngestStats, UndirectedGraph};
pub use labels::{Label, Labels};
pub use measures::FeatureVector;
