//! Ranking from heavily perturbed tournaments whose vertices come from several
//! domains, each internally consistent with its own total order.
//!
//! The pipeline: [`clustering::dag_clustering`] partitions the vertices into
//! near-transitive clusters, [`purify::purify`] discards cluster outliers using
//! a fresh tournament, and [`ranking::hetero_ranking`] orders each cluster by
//! pivot-restricted QuickSort.

pub mod bitset;
pub mod clustering;
pub mod error;
pub mod eval;
pub mod fas;
pub mod gadget;
pub mod graph;
pub mod io;
pub mod model;
pub mod purify;
pub mod ranking;
pub mod seed;

pub use bitset::VertexSet;
pub use error::{Error, Result};
pub use graph::{Direction, Ordering, Tournament};
