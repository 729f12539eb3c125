//! The VOLUME probe model.
//!
//! A query starts with the queried node's record revealed. Each probe names
//! an already revealed record and one of its ports and reveals the node on
//! the other side: its identifier token, degree, inputs, and the port the
//! edge arrives at. There is no lookup by identifier, so the revealed set is
//! connected by construction; [`run_volume`] re-checks it anyway.

use std::collections::HashSet;
use std::fmt::Write as _;

use lcl_core::{
    Error, HalfEdge, HalfEdgeLabeling, Label, LocalAlgorithm, Mode, PortGraph, Result, RunContext, View,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeRecord {
    pub id: Option<u64>,
    pub degree: usize,
    pub inputs: Vec<Label>,
    /// Port at this node of the edge it was revealed through.
    pub back: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub query: HalfEdge,
    pub records: Vec<NodeRecord>,
    /// `(record index, port)` of each probe; probe `i` revealed record `i + 1`.
    pub probes: Vec<(usize, usize)>,
}

impl Transcript {
    pub fn probe_count(&self) -> usize {
        self.probes.len()
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        let root = &self.records[0];
        writeln!(s, "query {} -> {}", self.query, render_record(root)).unwrap();
        for (i, (idx, port)) in self.probes.iter().enumerate() {
            let r = &self.records[i + 1];
            writeln!(s, "probe {idx}:{port} -> {}", render_record(r)).unwrap();
        }
        s
    }

    /// The record revealed through `(idx, port)`, if probed.
    pub fn probed(&self, idx: usize, port: usize) -> Option<usize> {
        self.probes.iter().position(|&p| p == (idx, port)).map(|i| i + 1)
    }

    /// Parent record and port for every non-root record.
    pub fn parent(&self, idx: usize) -> Option<(usize, usize)> {
        idx.checked_sub(1).map(|i| self.probes[i])
    }
}

fn render_record(r: &NodeRecord) -> String {
    let ins: Vec<String> = r.inputs.iter().map(Label::render).collect();
    let id = r.id.map_or("-".to_string(), |t| t.to_string());
    let mut s = format!("id={id} deg={} in={}", r.degree, ins.join(","));
    if let Some(b) = r.back {
        write!(s, " back={b}").unwrap();
    }
    s
}

pub enum Step {
    Probe { idx: usize, port: usize },
    /// Outputs for every port of the queried node.
    Answer(Vec<Label>),
}

pub trait ProbeStrategy: Send + Sync {
    fn name(&self) -> String;
    /// Maximum number of probes on graphs with `n` nodes.
    fn budget(&self, ctx: &RunContext) -> usize;
    fn step(&self, ctx: &RunContext, t: &Transcript) -> Result<Step>;
}

fn record(g: &PortGraph, v: usize, back: Option<usize>) -> NodeRecord {
    NodeRecord {
        id: g.token(v),
        degree: g.degree(v),
        inputs: g.inputs(v).to_vec(),
        back,
    }
}

/// Answers the query `q` with `s`, enforcing connectivity and the budget.
pub fn run_volume(
    s: &dyn ProbeStrategy,
    g: &PortGraph,
    q: HalfEdge,
    ctx: &RunContext,
) -> Result<(Label, Transcript)> {
    if q.node >= g.n() || q.port == 0 || q.port > g.degree(q.node) {
        return Err(Error::InvalidGraph(format!("no half-edge {q}")));
    }
    let budget = s.budget(ctx);
    let mut t = Transcript {
        query: q,
        records: vec![record(g, q.node, None)],
        probes: Vec::new(),
    };
    let mut nodes = vec![q.node];
    loop {
        match s.step(ctx, &t)? {
            Step::Answer(out) => {
                if out.len() != g.degree(q.node) {
                    return Err(Error::Algorithm(format!(
                        "{} answered {} labels for a degree-{} node",
                        s.name(),
                        out.len(),
                        g.degree(q.node)
                    )));
                }
                if !is_connected(g, &nodes) {
                    return Err(Error::Algorithm("revealed set is disconnected".into()));
                }
                return Ok((out[q.port - 1].clone(), t));
            }
            Step::Probe { idx, port } => {
                if idx >= t.records.len() {
                    return Err(Error::Algorithm(format!(
                        "disconnected probe: record {idx} has not been revealed"
                    )));
                }
                let v = nodes[idx];
                if port == 0 || port > g.degree(v) {
                    return Err(Error::Algorithm(format!(
                        "probe of nonexistent port {port} at record {idx} (degree {})",
                        g.degree(v)
                    )));
                }
                if t.probes.len() >= budget {
                    return Err(Error::Algorithm(format!(
                        "probe budget {budget} exceeded by {}",
                        s.name()
                    )));
                }
                let o = g
                    .opposite(HalfEdge::new(v, port))
                    .ok_or_else(|| Error::Algorithm(format!("port {port} at record {idx} is dangling")))?;
                t.probes.push((idx, port));
                t.records.push(record(g, o.node, Some(o.port)));
                nodes.push(o.node);
            }
        }
    }
}

fn is_connected(g: &PortGraph, nodes: &[usize]) -> bool {
    let set: HashSet<usize> = nodes.iter().copied().collect();
    let mut seen = HashSet::from([nodes[0]]);
    let mut stack = vec![nodes[0]];
    while let Some(v) = stack.pop() {
        for (_, o) in g.neighbors(v) {
            if set.contains(&o.node) && seen.insert(o.node) {
                stack.push(o.node);
            }
        }
    }
    seen.len() == set.len()
}

/// Labels every half-edge by one VOLUME query each.
pub fn run_volume_all(s: &dyn ProbeStrategy, g: &PortGraph, ctx: &RunContext) -> Result<HalfEdgeLabeling> {
    let mut labels = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let mut out = Vec::with_capacity(g.degree(v));
        for p in 1..=g.degree(v) {
            out.push(run_volume(s, g, HalfEdge::new(v, p), ctx)?.0);
        }
        labels.push(out);
    }
    Ok(HalfEdgeLabeling::new(labels))
}

/// Rebuilds the radius-`t` view of the queried node from a transcript of a
/// tree exploration.
pub fn transcript_view(t: &Transcript, radius: usize, mode: Mode) -> View {
    fn rec(t: &Transcript, idx: usize, r: usize, mode: Mode) -> View {
        let rcd = &t.records[idx];
        let children = (1..=rcd.degree)
            .map(|p| {
                if r == 0 {
                    return None;
                }
                let (j, b) = if Some(p) == rcd.back {
                    let (parent, pp) = t.parent(idx)?;
                    (parent, pp)
                } else {
                    let j = t.probed(idx, p)?;
                    (j, t.records[j].back?)
                };
                Some((b, rec(t, j, r - 1, mode)))
            })
            .collect();
        View {
            inputs: rcd.inputs.clone(),
            outputs: None,
            token: if mode == Mode::PortNumbering { None } else { rcd.id },
            children,
        }
    }
    let mut v = rec(t, 0, radius, mode);
    if mode == Mode::OrderInvariant {
        v.rank_tokens();
    }
    v
}

/// Breadth-first exploration of the ball, then the algorithm's answer.
pub struct BallScan {
    pub algorithm: LocalAlgorithm,
    /// Degree bound used for the probe budget.
    pub delta: usize,
}

/// `Σ_{i=1..t} Δ(Δ−1)^{i−1}`: the number of edges of a radius-`t` ball in a
/// tree of maximum degree Δ.
pub fn ball_scan_bound(delta: usize, t: usize) -> usize {
    (1..=t)
        .map(|i| delta * delta.saturating_sub(1).pow(i as u32 - 1))
        .sum()
}

pub fn ball_scan_strategy(algorithm: LocalAlgorithm, delta: usize) -> Result<BallScan> {
    if algorithm.mode == Mode::Randomized {
        return Err(Error::Algorithm("ball scan needs a deterministic algorithm".into()));
    }
    Ok(BallScan { algorithm, delta })
}

impl ProbeStrategy for BallScan {
    fn name(&self) -> String {
        format!("ball-scan({})", self.algorithm.name)
    }

    fn budget(&self, _ctx: &RunContext) -> usize {
        ball_scan_bound(self.delta, self.algorithm.radius)
    }

    fn step(&self, ctx: &RunContext, t: &Transcript) -> Result<Step> {
        let radius = self.algorithm.radius;
        let mut depth = vec![0usize; t.records.len()];
        for i in 1..t.records.len() {
            depth[i] = depth[t.parent(i).unwrap().0] + 1;
        }
        for (i, r) in t.records.iter().enumerate() {
            if depth[i] >= radius {
                continue;
            }
            for p in 1..=r.degree {
                if Some(p) != r.back && t.probed(i, p).is_none() {
                    return Ok(Step::Probe { idx: i, port: p });
                }
            }
        }
        let view = transcript_view(t, radius, self.algorithm.mode);
        Ok(Step::Answer(self.algorithm.evaluate(&view, ctx)?))
    }
}

/// Runs an order-invariant strategy as if the graph had `n0` nodes, with
/// revealed identifiers replaced by their ranks among the revealed ones.
pub struct LockedStrategy<S> {
    pub inner: S,
    pub n0: usize,
}

pub fn lock_order_invariant_volume<S: ProbeStrategy>(inner: S, n0: usize) -> Result<LockedStrategy<S>> {
    let ctx = RunContext { n: n0 };
    let revealed = inner.budget(&ctx) + 1;
    if revealed >= n0 {
        return Err(Error::Algorithm(format!(
            "n0 = {n0} too small: up to {revealed} revealed nodes need distinct virtual identifiers below n0"
        )));
    }
    Ok(LockedStrategy { inner, n0 })
}

impl<S: ProbeStrategy> ProbeStrategy for LockedStrategy<S> {
    fn name(&self) -> String {
        format!("locked({}, n0={})", self.inner.name(), self.n0)
    }

    fn budget(&self, _ctx: &RunContext) -> usize {
        self.inner.budget(&RunContext { n: self.n0 })
    }

    fn step(&self, _ctx: &RunContext, t: &Transcript) -> Result<Step> {
        let mut ids: Vec<u64> = t.records.iter().filter_map(|r| r.id).collect();
        ids.sort_unstable();
        ids.dedup();
        let mut virt = t.clone();
        for r in &mut virt.records {
            r.id = r.id.map(|x| ids.binary_search(&x).unwrap() as u64 + 1);
        }
        self.inner.step(&RunContext { n: self.n0 }, &virt)
    }
}
