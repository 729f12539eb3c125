//! General LCLs given by an explicit set of accepted labeled balls.
//!
//! File format: the problem header (`delta:`, `input:`, `output:`) plus
//! `radius: r` and one `ball: <encoding>` line per accepted ball, where the
//! encoding carries `input:output` pairs at every half-edge.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::algorithm::all_tuples;
use crate::ball::{extract, Mode, View};
use crate::error::{Error, Result};
use crate::format::{parse_label_list, split_key, strip_comment};
use crate::graph::{HalfEdge, HalfEdgeLabeling, Identity, PortGraph};
use crate::label::{Alphabet, Label};

/// Default cap on the number of labeled balls materialized by enumeration.
pub const DEFAULT_BALL_GUARD: u128 = 1_000_000;

#[derive(Clone, Debug)]
pub struct GeneralLcl {
    pub delta: usize,
    pub sigma_in: Alphabet,
    pub sigma_out: Alphabet,
    pub radius: usize,
    /// Accepted balls keyed by their encoding.
    pub accepted: BTreeMap<String, View>,
}

impl PartialEq for GeneralLcl {
    fn eq(&self, other: &Self) -> bool {
        self.delta == other.delta
            && self.sigma_in == other.sigma_in
            && self.sigma_out == other.sigma_out
            && self.radius == other.radius
            && self.accepted.keys().eq(other.accepted.keys())
    }
}
impl Eq for GeneralLcl {}

impl GeneralLcl {
    pub fn new(delta: usize, sigma_in: Alphabet, sigma_out: Alphabet, radius: usize) -> Self {
        GeneralLcl {
            delta,
            sigma_in,
            sigma_out,
            radius,
            accepted: BTreeMap::new(),
        }
    }

    pub fn accept(&mut self, ball: View) -> Result<()> {
        self.check_ball(&ball)?;
        self.accepted.insert(ball.encode(), ball);
        Ok(())
    }

    pub fn accepts(&self, ball: &View) -> bool {
        self.accepted.contains_key(&ball.encode())
    }

    /// The problem whose accepted set is every ball of radius `radius` on
    /// trees of maximum degree `delta` satisfying `pred`.
    pub fn from_predicate(
        delta: usize,
        sigma_in: Alphabet,
        sigma_out: Alphabet,
        radius: usize,
        guard: u128,
        pred: impl Fn(&View) -> bool,
    ) -> Result<GeneralLcl> {
        let mut l = GeneralLcl::new(delta, sigma_in, sigma_out, radius);
        for b in enumerate_labeled_balls(delta, &l.sigma_in, &l.sigma_out, radius, guard)? {
            if pred(&b) {
                l.accepted.insert(b.encode(), b);
            }
        }
        Ok(l)
    }

    fn check_ball(&self, b: &View) -> Result<()> {
        if b.depth() > self.radius {
            return Err(Error::InvalidProblem(format!(
                "ball {b} deeper than radius {}",
                self.radius
            )));
        }
        check_records(b, self)
    }

    pub fn labeled_ball(&self, g: &PortGraph, v: usize, f: &HalfEdgeLabeling) -> Result<View> {
        extract(g, v, self.radius, Mode::PortNumbering, Some(f))
    }

    pub fn to_text(&self) -> String {
        let join = |a: &Alphabet| {
            a.labels()
                .iter()
                .map(Label::render)
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = String::new();
        writeln!(s, "delta: {}", self.delta).unwrap();
        writeln!(s, "input: {}", join(&self.sigma_in)).unwrap();
        writeln!(s, "output: {}", join(&self.sigma_out)).unwrap();
        writeln!(s, "radius: {}", self.radius).unwrap();
        for enc in self.accepted.keys() {
            writeln!(s, "ball: {enc}").unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<GeneralLcl> {
        let mut delta = None;
        let mut input = None;
        let mut output = None;
        let mut radius = None;
        let mut balls = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let (key, value) = split_key(line, lineno)?;
            let number = |what: &str| {
                value
                    .parse::<usize>()
                    .map_err(|_| Error::syntax(lineno, format!("bad {what} {value:?}")))
            };
            match key {
                "delta" => delta = Some(number("delta")?),
                "radius" => radius = Some(number("radius")?),
                "input" | "output" => {
                    let alpha = Alphabet::new(parse_label_list(value, lineno)?)
                        .map_err(|e| Error::syntax(lineno, e.to_string()))?;
                    if key == "input" {
                        input = Some(alpha);
                    } else {
                        output = Some(alpha);
                    }
                }
                "ball" => {
                    let b = View::parse(value).map_err(|e| Error::syntax(lineno, e.to_string()))?;
                    balls.push((lineno, b));
                }
                _ => return Err(Error::syntax(lineno, format!("unknown section {key:?}"))),
            }
        }
        let delta = delta.ok_or_else(|| Error::syntax(0, "missing `delta:`"))?;
        if delta == 0 {
            return Err(Error::syntax(0, "delta must be positive"));
        }
        let radius = radius.ok_or_else(|| Error::syntax(0, "missing `radius:`"))?;
        let output = output.ok_or_else(|| Error::syntax(0, "missing `output:`"))?;
        let input = input.unwrap_or_else(|| Alphabet::new(vec![Label::bottom()]).unwrap());
        let mut l = GeneralLcl::new(delta, input, output, radius);
        for (lineno, b) in balls {
            l.accept(b).map_err(|e| Error::syntax(lineno, e.to_string()))?;
        }
        Ok(l)
    }
}

fn check_records(b: &View, l: &GeneralLcl) -> Result<()> {
    if b.degree() > l.delta {
        return Err(Error::InvalidProblem(format!("degree {} above delta", b.degree())));
    }
    if let Some(x) = b.inputs.iter().find(|x| !l.sigma_in.contains(x)) {
        return Err(Error::UndeclaredLabel(x.render()));
    }
    match &b.outputs {
        None if b.degree() > 0 => {
            return Err(Error::InvalidProblem(format!("ball record {} lacks outputs", b.encode())))
        }
        Some(out) => {
            if let Some(x) = out.iter().find(|x| !l.sigma_out.contains(x)) {
                return Err(Error::UndeclaredLabel(x.render()));
            }
        }
        None => {}
    }
    b.children
        .iter()
        .flatten()
        .try_for_each(|(_, c)| check_records(c, l))
}

/// Exact number of labeled radius-`r` balls (root degree 0..=Δ) on trees
/// of maximum degree Δ with the given alphabet sizes.
pub fn count_labeled_balls(delta: usize, n_in: usize, n_out: usize, r: usize) -> BigUint {
    let per_port = BigUint::from(n_in) * BigUint::from(n_out);
    // below[k]: ways to fill one port whose neighbor sits k levels above the cut.
    let mut below = BigUint::one();
    for _ in 0..r {
        let mut next = BigUint::from(0u32);
        for d in 1..=delta {
            next += BigUint::from(d) * per_port.pow(d as u32) * below.pow(d as u32 - 1);
        }
        below = next;
    }
    let hang = if r == 0 { BigUint::one() } else { below };
    (0..=delta)
        .map(|d| per_port.pow(d as u32) * hang.pow(d as u32))
        .sum()
}

/// Every labeled radius-`r` ball on trees of maximum degree Δ, sorted by
/// encoding. Aborts with a guard error when the count exceeds `guard`.
pub fn enumerate_labeled_balls(
    delta: usize,
    sigma_in: &Alphabet,
    sigma_out: &Alphabet,
    r: usize,
    guard: u128,
) -> Result<Vec<View>> {
    let count = count_labeled_balls(delta, sigma_in.len(), sigma_out.len(), r);
    if count.to_u128().is_none_or(|c| c > guard) {
        return Err(Error::guard("labeled balls", count, guard));
    }
    let records: Vec<Vec<(Vec<Label>, Vec<Label>)>> = (0..=delta)
        .map(|d| {
            let ins = all_tuples(sigma_in.labels(), d);
            let outs = all_tuples(sigma_out.labels(), d);
            ins.iter()
                .flat_map(|i| outs.iter().map(move |o| (i.clone(), o.clone())))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for d in 0..=delta {
        for (ins, outs) in &records[d] {
            let mut g = PortGraph::new();
            g.add_node(ins.clone());
            let state = Partial {
                g,
                outputs: vec![outs.clone()],
                depth: vec![0],
                pending: (1..=d).map(|p| HalfEdge::new(0, p)).collect(),
            };
            grow(state, delta, r, &records, &mut out)?;
        }
    }
    out.sort_by_cached_key(View::encode);
    Ok(out)
}

/// Every input-labeled radius-`r` view on trees of maximum degree Δ, as
/// an algorithm in `mode` would see it, sorted by encoding. Order-invariant
/// views appear once per rank order of their nodes. Identifier values and
/// random seeds cannot be enumerated.
pub fn enumerate_views(delta: usize, sigma_in: &Alphabet, r: usize, mode: Mode, guard: u128) -> Result<Vec<View>> {
    let per_order = match mode {
        Mode::PortNumbering => BigUint::one(),
        Mode::OrderInvariant => {
            let nodes = 1 + (1..=r).map(|i| delta * delta.saturating_sub(1).pow(i as u32 - 1)).sum::<usize>();
            (1..=nodes).fold(BigUint::one(), |acc, k| acc * k)
        }
        Mode::DeterministicId | Mode::Randomized => {
            return Err(Error::Algorithm(format!("views in {mode} mode cannot be enumerated")))
        }
    };
    let count = count_labeled_balls(delta, sigma_in.len(), 1, r) * per_order;
    if count.to_u128().is_none_or(|c| c > guard) {
        return Err(Error::guard("views", count, guard));
    }
    let balls = enumerate_labeled_balls(delta, sigma_in, &Alphabet::from_symbols(&["X"]), r, guard)?;
    let mut out = BTreeMap::new();
    for b in balls {
        let b = b.without_outputs();
        if mode == Mode::PortNumbering {
            out.insert(b.encode(), b);
            continue;
        }
        let (mut g, _) = b.to_fragment();
        for order in (1..=g.n() as u64).permutations(g.n()) {
            g.identity = Identity::Ids(order);
            let v = extract(&g, 0, r, mode, None)?;
            out.insert(v.encode(), v);
        }
    }
    Ok(out.into_values().collect())
}

#[derive(Clone)]
struct Partial {
    g: PortGraph,
    outputs: Vec<Vec<Label>>,
    depth: Vec<usize>,
    pending: Vec<HalfEdge>,
}

fn grow(
    mut s: Partial,
    delta: usize,
    r: usize,
    records: &[Vec<(Vec<Label>, Vec<Label>)>],
    out: &mut Vec<View>,
) -> Result<()> {
    let Some(h) = s.pending.pop() else {
        let f = HalfEdgeLabeling::new(s.outputs);
        out.push(extract(&s.g, 0, r, Mode::PortNumbering, Some(&f))?);
        return Ok(());
    };
    let dh = s.depth[h.node];
    if dh >= r {
        return grow(s, delta, r, records, out);
    }
    for d in 1..=delta {
        for (ins, outs) in &records[d] {
            for back in 1..=d {
                let mut t = s.clone();
                let w = t.g.add_node(ins.clone());
                t.g.connect(h, HalfEdge::new(w, back))?;
                t.outputs.push(outs.clone());
                t.depth.push(dh + 1);
                t.pending
                    .extend((1..=d).filter(|&p| p != back).map(|p| HalfEdge::new(w, p)));
                grow(t, delta, r, records, out)?;
            }
        }
    }
    Ok(())
}
