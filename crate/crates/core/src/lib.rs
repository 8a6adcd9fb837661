//! Randomized padded decompositions of weighted graphs.
//!
//! Four schemes share one residual-graph carving model:
//!
//! * [`weak`]: weak-diameter partitions of `K_{r+1}`-minor-free graphs,
//! * [`strong`]: strong-diameter partitions of the same class, built from
//!   path buffers cut into cones,
//! * [`treewidth`]: strong-diameter partitions driven by a tree decomposition,
//! * [`genus`]: strong-diameter partitions of embedded graphs, peeling
//!   genus-reducing cycles until the remainder is planar.
//!
//! Every run returns a [`Partition`] and a replayable [`DecompositionTrace`];
//! [`harness`] estimates padding and cut probabilities from them and checks
//! the structural invariants the padding analysis relies on.

mod carve;
pub mod corpus;
pub mod error;
pub mod genus;
pub mod graph;
pub mod harness;
pub mod io;
pub mod partition;
pub mod sampling;
pub mod stats;
pub mod strong;
pub mod trace;
pub mod treewidth;
pub mod weak;

pub use error::{Error, Result};
pub use graph::{DiameterMode, Graph, Path, VertexSet};
pub use partition::{Partition, Scheme};
pub use sampling::{RandomStream, TexpParams};
pub use trace::DecompositionTrace;
