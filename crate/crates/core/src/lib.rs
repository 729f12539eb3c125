//! Core types for locally checkable labeling problems on bounded-degree
//! trees: labels, problems, port-numbered graphs, canonical balls and
//! local algorithms.

pub mod algorithm;
pub mod arith;
pub mod ball;
pub mod error;
pub mod format;
pub mod general;
pub mod graph;
pub mod label;
pub mod problem;

pub use algorithm::{BallView, LocalAlgorithm, RunContext, ZeroRoundAlgorithm};
pub use ball::{canonical_ball, extract, Mode, View};
pub use error::{Error, Result};
pub use format::{parse_problem, serialize_problem};
pub use general::GeneralLcl;
pub use graph::{HalfEdge, HalfEdgeLabeling, Identity, PortGraph};
pub use label::{Alphabet, Label};
pub use problem::{catalog, MultisetConfig, Problem};
