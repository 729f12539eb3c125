//! Port-numbered graphs with half-edge input labels and per-node identity
//! tokens.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::label::Label;

/// A half-edge: node index plus a 1-based port.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub node: usize,
    pub port: usize,
}

impl HalfEdge {
    pub fn new(node: usize, port: usize) -> Self {
        HalfEdge { node, port }
    }
}

impl fmt::Display for HalfEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.node, self.port)
    }
}

/// How nodes are told apart.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Identity {
    /// Port-numbering mode: nothing beyond ports.
    #[default]
    None,
    /// Unique identifiers drawn from `[0, n^k)`.
    Ids(Vec<u64>),
    /// Only the relative order of identifiers: a permutation of `1..=n`.
    Ranks(Vec<u64>),
    /// Per-node random seeds.
    Seeds(Vec<u64>),
}

impl Identity {
    pub fn token(&self, v: usize) -> Option<u64> {
        match self {
            Identity::None => None,
            Identity::Ids(t) | Identity::Ranks(t) | Identity::Seeds(t) => t.get(v).copied(),
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self {
            Identity::None => "port-numbering",
            Identity::Ids(_) => "deterministic-id",
            Identity::Ranks(_) => "order-invariant",
            Identity::Seeds(_) => "randomized",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PortGraph {
    /// `adj[v][p - 1]` is the half-edge paired with `(v, p)`, or `None` for a
    /// dangling half-edge.
    adj: Vec<Vec<Option<HalfEdge>>>,
    inputs: Vec<Vec<Label>>,
    pub identity: Identity,
}

impl PortGraph {
    pub fn new() -> Self {
        PortGraph::default()
    }

    /// Adds a node whose degree is the number of inputs; all ports dangling.
    pub fn add_node(&mut self, inputs: Vec<Label>) -> usize {
        self.adj.push(vec![None; inputs.len()]);
        self.inputs.push(inputs);
        self.adj.len() - 1
    }

    /// Builds a graph from an edge list, assigning ports in the order edges
    /// are listed. Inputs start as `⊥` everywhere.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> PortGraph {
        let mut adj: Vec<Vec<Option<HalfEdge>>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            let pu = adj[u].len() + 1;
            let pv = adj[v].len() + 1 + usize::from(u == v);
            adj[u].push(Some(HalfEdge::new(v, pv)));
            adj[v].push(Some(HalfEdge::new(u, pu)));
        }
        let inputs = adj.iter().map(|a| vec![Label::bottom(); a.len()]).collect();
        PortGraph {
            adj,
            inputs,
            identity: Identity::None,
        }
    }

    pub fn connect(&mut self, a: HalfEdge, b: HalfEdge) -> Result<()> {
        for h in [a, b] {
            if h.node >= self.n() || h.port == 0 || h.port > self.degree(h.node) {
                return Err(Error::InvalidGraph(format!("no half-edge {h}")));
            }
            if self.adj[h.node][h.port - 1].is_some() {
                return Err(Error::InvalidGraph(format!("half-edge {h} already paired")));
            }
        }
        if a == b {
            return Err(Error::InvalidGraph(format!("half-edge {a} paired with itself")));
        }
        self.adj[a.node][a.port - 1] = Some(b);
        self.adj[b.node][b.port - 1] = Some(a);
        Ok(())
    }

    /// Appends a dangling port to `v` and returns its number.
    pub fn add_port(&mut self, v: usize, input: Label) -> usize {
        self.adj[v].push(None);
        self.inputs[v].push(input);
        self.adj[v].len()
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn opposite(&self, h: HalfEdge) -> Option<HalfEdge> {
        self.adj[h.node][h.port - 1]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, HalfEdge)> + '_ {
        self.adj[v]
            .iter()
            .enumerate()
            .filter_map(|(i, h)| h.map(|h| (i + 1, h)))
    }

    pub fn input(&self, h: HalfEdge) -> &Label {
        &self.inputs[h.node][h.port - 1]
    }

    pub fn inputs(&self, v: usize) -> &[Label] {
        &self.inputs[v]
    }

    pub fn set_inputs(&mut self, v: usize, inputs: Vec<Label>) -> Result<()> {
        if inputs.len() != self.degree(v) {
            return Err(Error::InvalidGraph(format!(
                "node {v} has degree {} but {} inputs given",
                self.degree(v),
                inputs.len()
            )));
        }
        self.inputs[v] = inputs;
        Ok(())
    }

    pub fn set_input(&mut self, h: HalfEdge, l: Label) {
        self.inputs[h.node][h.port - 1] = l;
    }

    pub fn token(&self, v: usize) -> Option<u64> {
        self.identity.token(v)
    }

    pub fn half_edges(&self) -> impl Iterator<Item = HalfEdge> + '_ {
        (0..self.n()).flat_map(move |v| (1..=self.degree(v)).map(move |p| HalfEdge::new(v, p)))
    }

    /// Each undirected edge once, as the pair with the smaller half-edge first.
    pub fn edges(&self) -> Vec<(HalfEdge, HalfEdge)> {
        self.half_edges()
            .filter_map(|h| self.opposite(h).filter(|o| h < *o).map(|o| (h, o)))
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.adj.iter().flatten().all(Option::is_some)
    }

    /// Checks port pairing is involutive and, if `complete`, total.
    pub fn check(&self, complete: bool) -> Result<()> {
        for h in self.half_edges() {
            match self.opposite(h) {
                None if complete => {
                    return Err(Error::InvalidGraph(format!("half-edge {h} is dangling")))
                }
                None => {}
                Some(o) => {
                    if o.node >= self.n() || o.port == 0 || o.port > self.degree(o.node) {
                        return Err(Error::InvalidGraph(format!("{h} points at missing {o}")));
                    }
                    if self.opposite(o) != Some(h) {
                        return Err(Error::InvalidGraph(format!("pairing at {h} not involutive")));
                    }
                }
            }
        }
        match &self.identity {
            Identity::None => {}
            Identity::Ids(t) | Identity::Ranks(t) | Identity::Seeds(t) => {
                if t.len() != self.n() {
                    return Err(Error::InvalidGraph("identity token count differs from n".into()));
                }
                if !matches!(self.identity, Identity::Seeds(_)) {
                    let mut s = t.clone();
                    s.sort_unstable();
                    if s.windows(2).any(|w| w[0] == w[1]) {
                        return Err(Error::InvalidGraph("identifiers are not distinct".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Breadth-first distances from `v`, `None` for unreachable nodes.
    pub fn distances(&self, v: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[v] = Some(0);
        let mut q = VecDeque::from([v]);
        while let Some(u) = q.pop_front() {
            let du = dist[u].unwrap();
            for (_, h) in self.neighbors(u) {
                if dist[h.node].is_none() {
                    dist[h.node] = Some(du + 1);
                    q.push_back(h.node);
                }
            }
        }
        dist
    }

    /// True if the graph has no cycles (every component is a tree).
    pub fn is_forest(&self) -> bool {
        let edges = self.edges().len();
        let mut seen = vec![false; self.n()];
        let mut components = 0;
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            components += 1;
            for (v, d) in self.distances(s).iter().enumerate() {
                if d.is_some() {
                    seen[v] = true;
                }
            }
        }
        edges + components == self.n()
    }
}

/// Output label of every half-edge, indexed like the graph's ports.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HalfEdgeLabeling {
    labels: Vec<Vec<Label>>,
}

impl HalfEdgeLabeling {
    pub fn new(labels: Vec<Vec<Label>>) -> Self {
        HalfEdgeLabeling { labels }
    }

    /// Labeling that puts `l` on every half-edge of `g`.
    pub fn constant(g: &PortGraph, l: &Label) -> Self {
        HalfEdgeLabeling {
            labels: (0..g.n()).map(|v| vec![l.clone(); g.degree(v)]).collect(),
        }
    }

    pub fn get(&self, h: HalfEdge) -> &Label {
        &self.labels[h.node][h.port - 1]
    }

    pub fn set(&mut self, h: HalfEdge, l: Label) {
        self.labels[h.node][h.port - 1] = l;
    }

    pub fn node(&self, v: usize) -> &[Label] {
        &self.labels[v]
    }

    pub fn nodes(&self) -> &[Vec<Label>] {
        &self.labels
    }

    pub fn is_total_for(&self, g: &PortGraph) -> bool {
        self.labels.len() == g.n() && (0..g.n()).all(|v| self.labels[v].len() == g.degree(v))
    }

    pub fn map(&self, f: impl Fn(&Label) -> Label) -> Self {
        HalfEdgeLabeling {
            labels: self.labels.iter().map(|v| v.iter().map(&f).collect()).collect(),
        }
    }
}
