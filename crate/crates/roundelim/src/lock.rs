//! Running an order-invariant algorithm as if the graph had `n0` nodes.

use lcl_core::{Error, LocalAlgorithm, Mode, Result, RunContext, View};

/// Nodes in a radius-`r` ball of a tree with maximum degree Δ.
pub fn ball_size(delta: usize, r: usize) -> usize {
    1 + (1..=r).map(|i| delta * delta.saturating_sub(1).pow(i as u32 - 1)).sum::<usize>()
}

/// Least `n0` with `Δ · |B(radius + r)| < n0`.
pub fn min_n0(delta: usize, radius: usize, r: usize) -> usize {
    delta.max(1) * ball_size(delta, radius + r) + 1
}

/// Evaluates `a` on the rank order of the visible identifiers, telling it
/// the graph has `n0` nodes.
pub fn lock_order_invariant(a: &LocalAlgorithm, n0: usize, delta: usize, r: usize) -> Result<LocalAlgorithm> {
    if a.mode != Mode::OrderInvariant {
        return Err(Error::Algorithm(format!("lock needs an order-invariant algorithm, got {}", a.mode)));
    }
    let need = min_n0(delta, a.radius, r);
    if n0 < need {
        return Err(Error::Algorithm(format!(
            "n0 = {n0} too small: radius {} balls have up to {} nodes; need n0 >= {need}",
            a.radius + r,
            ball_size(delta, a.radius + r)
        )));
    }
    let inner = a.clone();
    let name = format!("lock({}, n0={n0})", a.name);
    Ok(LocalAlgorithm::from_rule(name, a.radius, Mode::OrderInvariant, move |v: &View, _| {
        inner.evaluate(v, &RunContext { n: n0 })
    }))
}
