//! Katz and eigenvector centrality for dense graphs, computed on the sparse
//! complement graph.
//!
//! A graph missing only a few of its possible edges has a dense adjacency
//! matrix `A` but a sparse complement `B`. This crate writes `A` as a
//! rank-one matrix plus a diagonal minus `B` ([`graph::ComplementView`]) and
//! obtains Katz rankings from one sparse solve with `B`
//! ([`katz::katz_complement`]), eigenvector centrality from a power
//! iteration that only touches `B`, and certified approximate rankings from
//! a thresholded complement ([`threshold`]).

pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod katz;
pub mod linalg;
pub mod ranking;
pub mod threshold;

pub use error::{Error, Result};
pub use graph::{build_graph, ComplementView, Graph, LoopPolicy, SparseMatrix, WeightScale};
pub use katz::{CentralityResult, ComplementMode, KatzOptions, KatzParams, KatzRoute, Route};
pub use linalg::{SolveMethod, SolveOptions, SpectralEstimate, SpectralOptions};
pub use ranking::{kendall_tau, rank, same_ranking, Ranking};

/// Library version embedded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
