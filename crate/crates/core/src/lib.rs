//! Streaming graph partitioning for data-parallel GNN training.
//!
//! The pipeline is: replay an edge list ([`graph_stream`]), partition it with
//! SPRING ([`spring`]) or one of the vertex-cut [`baselines`], complete every
//! node's neighborhood in its home partition ([`completion`]), measure the
//! result ([`metrics`]), persist it ([`store`]) and, optionally, validate it by
//! simulated model-averaging training ([`train`]).

pub mod baselines;
pub mod bitset;
pub mod completion;
pub mod datasets;
pub mod error;
pub mod exec;
pub mod graph_stream;
pub mod metrics;
pub mod pipeline;
pub mod spring;
pub mod store;
pub mod train;

pub use error::{Error, ErrorCategory, Result};
pub use exec::Exec;
