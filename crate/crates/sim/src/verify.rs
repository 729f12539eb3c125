//! Checking labelings against node-edge-checkable and general LCLs.

use std::collections::HashSet;
use std::fmt;

use lcl_core::{GeneralLcl, HalfEdge, HalfEdgeLabeling, Label, PortGraph, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    NodeConfig,
    EdgeConfig,
    GMismatch,
    BallNotAccepted,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::NodeConfig => "node-config",
            ViolationKind::EdgeConfig => "edge-config",
            ViolationKind::GMismatch => "g-mismatch",
            ViolationKind::BallNotAccepted => "ball-not-accepted",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    Node(usize),
    Edge(HalfEdge, HalfEdge),
    HalfEdge(HalfEdge),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Node(v) => write!(f, "node {v}"),
            Location::Edge(a, b) => write!(f, "edge {a} {b}"),
            Location::HalfEdge(h) => write!(f, "half-edge {h}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: Location,
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VIOLATION {} at {}: {}", self.kind.name(), self.location, self.witness)
    }
}

fn braces(ls: &[Label]) -> String {
    let parts: Vec<String> = ls.iter().map(Label::render).collect();
    format!("{{{}}}", parts.join(","))
}

pub fn verify_nec(g: &PortGraph, f: &HalfEdgeLabeling, p: &Problem) -> Vec<Violation> {
    let node_sets: Vec<HashSet<&[Label]>> = (1..=p.delta)
        .map(|d| p.node_configs(d).iter().map(|c| c.labels()).collect())
        .collect();
    let edges: HashSet<[&Label; 2]> = p.edge.iter().map(|[a, b]| [a, b]).collect();
    let mut out = Vec::new();
    for v in 0..g.n() {
        let d = g.degree(v);
        if d == 0 {
            continue;
        }
        let mut cfg = f.node(v).to_vec();
        p.sigma_out.sort(&mut cfg);
        let ok = d <= p.delta && node_sets[d - 1].contains(cfg.as_slice());
        if !ok {
            out.push(Violation {
                kind: ViolationKind::NodeConfig,
                location: Location::Node(v),
                witness: braces(&cfg),
            });
        }
        for port in 1..=d {
            let h = HalfEdge::new(v, port);
            let l = f.get(h);
            let allowed = p.g_image(g.input(h)).is_some_and(|img| img.contains(l));
            if !allowed {
                out.push(Violation {
                    kind: ViolationKind::GMismatch,
                    location: Location::HalfEdge(h),
                    witness: format!("input {} output {l}", g.input(h)),
                });
            }
        }
    }
    for (a, b) in g.edges() {
        let mut pair = [f.get(a).clone(), f.get(b).clone()];
        p.sigma_out.sort(&mut pair);
        if !edges.contains(&[&pair[0], &pair[1]]) {
            out.push(Violation {
                kind: ViolationKind::EdgeConfig,
                location: Location::Edge(a, b),
                witness: braces(&pair),
            });
        }
    }
    out
}

pub fn verify_general(g: &PortGraph, f: &HalfEdgeLabeling, l: &GeneralLcl) -> Vec<Violation> {
    let mut out = Vec::new();
    for v in 0..g.n() {
        match l.labeled_ball(g, v, f) {
            Ok(ball) if l.accepts(&ball) => {}
            Ok(ball) => out.push(Violation {
                kind: ViolationKind::BallNotAccepted,
                location: Location::Node(v),
                witness: ball.encode(),
            }),
            Err(e) => out.push(Violation {
                kind: ViolationKind::BallNotAccepted,
                location: Location::Node(v),
                witness: e.to_string(),
            }),
        }
    }
    out
}
