//! Greedy maximum-cardinality matching laboratory.
//!
//! * [`dynamic::DynamicGraph`]: degree buckets with O(1) edge deletion and
//!   minimum-degree queries.
//! * [`matchers`]: Greedy, MRG, MinGreedy, Karp–Sipser, EDSM and MDS.
//! * [`instances`]: hard instances with certified optima.
//! * [`exact`]: Hopcroft–Karp, brute force and matching verification.
//! * [`certifier`]: the transfer/charging scheme as an executable check.
//! * [`priority`]: the adaptive priority game and its adversaries.
//! * [`hypergraph`]: k-uniform hypergraph matching and its hard gadget.
//! * [`enumerate`]: small connected graphs up to isomorphism.

pub mod certifier;
pub mod dynamic;
pub mod enumerate;
pub mod error;
pub mod exact;
pub mod graph;
pub mod hypergraph;
pub mod instances;
pub mod matchers;
pub mod matching;
pub mod priority;
pub mod rng;

pub use dynamic::{DynamicGraph, NaiveDegreeOracle, TiePolicy};
pub use error::{Error, Result};
pub use graph::Graph;
pub use matchers::{Algorithm, MatcherConfig};
pub use matching::{ExecutionTrace, Matching};
pub use rng::RandomStream;
