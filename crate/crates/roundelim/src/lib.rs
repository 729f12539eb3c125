//! Round elimination: problem operators, algorithm transformations, the
//! general-LCL compiler and the end-to-end pipeline.

pub mod operators;
pub mod budget;
pub mod zero_round;
pub mod lock;
pub mod slowdown;
pub mod speedup;
pub mod compiler;
pub mod pipeline;
