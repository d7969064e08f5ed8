//! Temporal graph representation learning.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`stream`] parses a timestamped edge list into a canonical, time-ordered
//!    [`EdgeStream`].
//! 2. [`series`] cuts the stream into a graph time-series, either by a fixed
//!    time span (`tau`) or by a fixed number of edges (`epsilon`).
//! 3. [`models`] turns snapshots into static weighted graphs: snapshot graphs,
//!    exponentially decayed summary graphs, and (weighted) temporal
//!    reachability graphs.
//! 4. [`embed`] learns per-snapshot node embeddings and fuses them, and
//!    [`eval`] scores the result on temporal link prediction.
//!
//! [`experiment`] wires the stages together behind a declarative config.

pub mod embed;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod models;
pub mod series;
pub mod stream;
pub mod synth;

pub use embed::{BaseMethod, EmbeddingMatrix, FusionMode, FusionParams};
pub use error::{Error, Result};
pub use eval::{MetricRecord, RankTable};
pub use experiment::{ExperimentConfig, ExperimentReport};
pub use models::{TsgParams, WeightedGraph};
pub use series::{GraphTimeSeries, PartitionSpec, Snapshot};
pub use stream::{EdgeStream, NodeId, NodeTable, TemporalEdge};
