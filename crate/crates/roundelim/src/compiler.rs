//! Compiling a general LCL into a node-edge-checkable one, and moving
//! solutions between the two.
//!
//! An output label of the compiled problem is an accepted labeled ball with
//! one marked root port, rendered `@j:<ball encoding>`. A node's labels must
//! be the marks `1..d` of a single ball; the labels across an edge must see
//! each other: the neighbor behind one mark, cut to radius `r-1`, is the
//! other ball cut to radius `r-1`, and the back ports are the marks.

use std::collections::HashMap;

pub use lcl_core::general::DEFAULT_BALL_GUARD;
use lcl_core::{Alphabet, Error, GeneralLcl, HalfEdge, HalfEdgeLabeling, Label, PortGraph, Problem, Result, View};
use lcl_sim::{verify_general, verify_nec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedBall {
    pub ball: View,
    pub mark: usize,
}

impl MarkedBall {
    pub fn label(&self) -> Label {
        marked_label(&self.ball.encode(), self.mark)
    }

    pub fn parse(l: &Label) -> Result<MarkedBall> {
        let Label::Ball(s) = l else {
            return Err(Error::InvalidLabel(l.render()));
        };
        let bad = || Error::InvalidLabel(s.clone());
        let (mark, enc) = s.strip_prefix('@').and_then(|r| r.split_once(':')).ok_or_else(bad)?;
        let mark: usize = mark.parse().map_err(|_| bad())?;
        let ball = View::parse(enc)?;
        if mark == 0 || mark > ball.degree() {
            return Err(bad());
        }
        Ok(MarkedBall { ball, mark })
    }

    /// The marked half-edge's output.
    pub fn output(&self) -> Result<&Label> {
        self.ball
            .outputs
            .as_ref()
            .and_then(|o| o.get(self.mark - 1))
            .ok_or_else(|| Error::InvalidLabel(format!("@{}:{} carries no outputs", self.mark, self.ball.encode())))
    }
}

fn marked_label(enc: &str, mark: usize) -> Label {
    Label::Ball(format!("@{mark}:{enc}"))
}

/// Every accepted ball with root degree at least 1, once per root port, in
/// encoding order.
pub fn enumerate_marked_balls(l: &GeneralLcl, guard: u128) -> Result<Vec<MarkedBall>> {
    let count: usize = l.accepted.values().map(View::degree).sum();
    if count as u128 > guard {
        return Err(Error::guard("marked balls", count, guard));
    }
    Ok(l.accepted
        .values()
        .flat_map(|b| (1..=b.degree()).map(move |mark| MarkedBall { ball: b.clone(), mark }))
        .collect())
}

pub fn compile_general(l: &GeneralLcl, guard: u128) -> Result<Problem> {
    let marked = enumerate_marked_balls(l, guard)?;
    let labels: Vec<Label> = marked.iter().map(MarkedBall::label).collect();
    let sigma_out = Alphabet::new(labels.clone())?;
    let mut p = Problem::empty(l.delta, l.sigma_in.clone(), sigma_out);

    for b in l.accepted.values().filter(|b| b.degree() >= 1) {
        let enc = b.encode();
        p.add_node_config((1..=b.degree()).map(|j| marked_label(&enc, j)).collect());
    }

    let r = l.radius;
    let cut = |v: &View| v.truncate(r.saturating_sub(1)).encode();
    // For each marked ball: its own cut, the neighbor's cut and back port.
    let own: Vec<String> = marked.iter().map(|m| cut(&m.ball)).collect();
    let seen: Vec<Option<(String, usize)>> = marked
        .iter()
        .map(|m| m.ball.child(m.mark).map(|(b, c)| (cut(c), *b)))
        .collect();
    let mut by_own: HashMap<(&str, usize), Vec<usize>> = HashMap::new();
    for (i, m) in marked.iter().enumerate() {
        by_own.entry((own[i].as_str(), m.mark)).or_default().push(i);
    }
    for (i, m) in marked.iter().enumerate() {
        let Some((nb, back)) = &seen[i] else { continue };
        for &k in by_own.get(&(nb.as_str(), *back)).into_iter().flatten() {
            if k < i {
                continue;
            }
            if seen[k].as_ref() == Some(&(own[i].clone(), m.mark)) {
                p.add_edge_config(labels[i].clone(), labels[k].clone());
            }
        }
    }

    for input in l.sigma_in.labels() {
        let img = marked
            .iter()
            .zip(&labels)
            .filter(|(m, _)| &m.ball.inputs[m.mark - 1] == input)
            .map(|(_, lab)| lab.clone())
            .collect();
        p.set_g(input.clone(), img);
    }
    p.normalize();
    Ok(p)
}

/// Relabels each half-edge `(v, j)` with `v`'s labeled ball marked at `j`.
pub fn lift_solution(l: &GeneralLcl, compiled: &Problem, g: &PortGraph, f: &HalfEdgeLabeling) -> Result<HalfEdgeLabeling> {
    if let Some(v) = verify_general(g, f, l).first() {
        return Err(Error::InvalidSolution(v.to_string()));
    }
    let mut out = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let enc = l.labeled_ball(g, v, f)?.encode();
        let labels: Vec<Label> = (1..=g.degree(v)).map(|j| marked_label(&enc, j)).collect();
        if let Some(x) = labels.iter().find(|x| !compiled.sigma_out.contains(x)) {
            return Err(Error::UndeclaredLabel(x.render()));
        }
        out.push(labels);
    }
    Ok(HalfEdgeLabeling::new(out))
}

/// Gives each half-edge the output at the marked half-edge of its label.
pub fn project_solution(compiled: &Problem, g: &PortGraph, f: &HalfEdgeLabeling) -> Result<HalfEdgeLabeling> {
    if let Some(v) = verify_nec(g, f, compiled).first() {
        return Err(Error::InvalidSolution(v.to_string()));
    }
    let mut out = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        out.push(
            (1..=g.degree(v))
                .map(|p| MarkedBall::parse(f.get(HalfEdge::new(v, p)))?.output().cloned())
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(HalfEdgeLabeling::new(out))
}
