//! Emerging-node prediction on time-evolving networks.
//!
//! The crate scores every node of a network snapshot by combining a
//! structural centrality (PageRank) with exponentially decayed recent
//! in-link activity, and evaluates such predictors against the links each
//! node actually receives in a future window.
//!
//! Pipeline, bottom-up:
//!
//! * [`ingest`] turns raw interaction logs into time-ordered edge lists and
//!   generates synthetic evolving networks.
//! * [`graph`] stores the edge stream and materializes strict-before
//!   [`Snapshot`](graph::Snapshot)s with window-degree queries.
//! * [`pagerank`] runs matrix-free power iteration over a snapshot.
//! * [`predictors`] implements the hybrid scores and popularity baselines.
//! * [`metrics`] computes precision, novelty, AUC and Kendall's tau.
//! * [`experiment`] samples evaluation times and sweeps parameter grids.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod pagerank;
pub mod predictors;

mod blocks;

pub use error::{Error, Result};
pub use graph::{EdgeList, Snapshot, TemporalEdge, TemporalGraph, WindowConfig};
pub use metrics::MetricsReport;
pub use pagerank::{PageRankConfig, PageRankVector};
pub use predictors::{PredictorSpec, ScoreVector, Variant};
