//! LOCAL-model execution.

use lcl_core::{extract, Error, HalfEdgeLabeling, Label, LocalAlgorithm, PortGraph, Result, RunContext};

/// Runs `a` at every node, telling it the true node count.
pub fn run_local(a: &LocalAlgorithm, g: &PortGraph) -> Result<HalfEdgeLabeling> {
    run_local_with(a, g, &RunContext { n: g.n() })
}

pub fn run_local_with(a: &LocalAlgorithm, g: &PortGraph, ctx: &RunContext) -> Result<HalfEdgeLabeling> {
    let labels = (0..g.n())
        .map(|v| node_outputs(a, g, v, ctx))
        .collect::<Result<Vec<_>>>()?;
    Ok(HalfEdgeLabeling::new(labels))
}

pub fn node_outputs(a: &LocalAlgorithm, g: &PortGraph, v: usize, ctx: &RunContext) -> Result<Vec<Label>> {
    let view = extract(g, v, a.radius, a.mode, None)?;
    a.evaluate(&view, ctx).map_err(|e| match e {
        Error::Algorithm(msg) => Error::Algorithm(format!("node {v}: {msg}")),
        other => other,
    })
}
