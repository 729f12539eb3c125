//! Reproducible random trees and forests.

use lcl_core::{Error, Label, PortGraph, Result};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    UniformRandomTree,
    Path,
    Star,
    Caterpillar,
    /// A forest of this many random trees.
    Forest(usize),
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "tree" | "uniform-random-tree" => Topology::UniformRandomTree,
            "path" => Topology::Path,
            "star" => Topology::Star,
            "caterpillar" => Topology::Caterpillar,
            _ => match s.strip_prefix("forest") {
                Some(k) => Topology::Forest(
                    k.trim_start_matches([':', '(']).trim_end_matches(')').parse().map_err(|_| {
                        Error::Other(format!("bad forest size in {s:?}"))
                    })?,
                ),
                None => return Err(Error::Other(format!("unknown topology {s:?}"))),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputDist {
    Fixed(Label),
    /// Independent and uniform per half-edge.
    Uniform(Vec<Label>),
}

#[derive(Clone, Debug)]
pub struct GenSpec {
    pub n: usize,
    pub delta: usize,
    pub topology: Topology,
    pub inputs: InputDist,
    pub seed: u64,
    /// Permute each node's ports uniformly after construction.
    pub shuffle_ports: bool,
}

impl GenSpec {
    pub fn new(n: usize, delta: usize, topology: Topology, seed: u64) -> Self {
        GenSpec {
            n,
            delta,
            topology,
            inputs: InputDist::Fixed(Label::bottom()),
            seed,
            shuffle_ports: false,
        }
    }

    pub fn with_inputs(mut self, inputs: InputDist) -> Self {
        self.inputs = inputs;
        self
    }

    pub fn shuffled(mut self) -> Self {
        self.shuffle_ports = true;
        self
    }
}

pub fn generate(spec: &GenSpec) -> Result<PortGraph> {
    if spec.n == 0 {
        return Err(Error::InvalidGraph("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let delta = spec.delta;
    let too_small = |what: &str| {
        Err(Error::InvalidGraph(format!(
            "{what} with n = {n} needs a larger degree bound than {delta}"
        )))
    };
    let edges = match spec.topology {
        Topology::Path => {
            if n > 2 && delta < 2 || n > 1 && delta < 1 {
                return too_small("path");
            }
            (1..n).map(|v| (v - 1, v)).collect()
        }
        Topology::Star => {
            if n - 1 > delta {
                return too_small("star");
            }
            (1..n).map(|v| (0, v)).collect()
        }
        Topology::UniformRandomTree => {
            if n > 2 && delta < 2 || n > 1 && delta < 1 {
                return too_small("tree");
            }
            random_tree_edges(&mut rng, 0, n, delta)
        }
        Topology::Forest(k) => {
            if k == 0 || k > n {
                return Err(Error::InvalidGraph(format!("cannot split {n} nodes into {k} trees")));
            }
            let mut cuts: Vec<usize> = rand::seq::index::sample(&mut rng, n - 1, k - 1)
                .into_iter()
                .map(|c| c + 1)
                .collect();
            cuts.sort_unstable();
            cuts.insert(0, 0);
            cuts.push(n);
            let mut edges = Vec::new();
            for w in cuts.windows(2) {
                let size = w[1] - w[0];
                if size > 2 && delta < 2 {
                    return too_small("forest");
                }
                edges.extend(random_tree_edges(&mut rng, w[0], size, delta));
            }
            edges
        }
        Topology::Caterpillar => {
            if n > 2 && delta < 2 {
                return too_small("caterpillar");
            }
            caterpillar_edges(&mut rng, n, delta)
        }
    };
    let mut g = PortGraph::from_edges(n, &edges);
    if spec.shuffle_ports {
        g = shuffle_ports(&g, &mut rng);
    }
    for v in 0..n {
        let ins = (0..g.degree(v))
            .map(|_| match &spec.inputs {
                InputDist::Fixed(l) => l.clone(),
                InputDist::Uniform(ls) => ls.choose(&mut rng).expect("nonempty input set").clone(),
            })
            .collect();
        g.set_inputs(v, ins)?;
    }
    Ok(g)
}

/// Each new node attaches to a uniformly chosen earlier node of degree < Δ.
fn random_tree_edges(rng: &mut ChaCha8Rng, offset: usize, n: usize, delta: usize) -> Vec<(usize, usize)> {
    let mut deg = vec![0usize; n];
    let mut open: Vec<usize> = vec![0];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let i = rng.gen_range(0..open.len());
        let u = open[i];
        deg[u] += 1;
        deg[v] += 1;
        if deg[u] >= delta {
            open.swap_remove(i);
        }
        if deg[v] < delta {
            open.push(v);
        }
        edges.push((offset + u, offset + v));
    }
    edges
}

fn caterpillar_edges(rng: &mut ChaCha8Rng, n: usize, delta: usize) -> Vec<(usize, usize)> {
    let mut deg = vec![0usize; n];
    let mut spine = vec![0usize];
    let mut edges = Vec::new();
    for v in 1..n {
        let tail = *spine.last().unwrap();
        let legs: Vec<usize> = spine
            .iter()
            .copied()
            .filter(|&s| deg[s] + usize::from(s == tail) < delta)
            .collect();
        let grow_spine = legs.is_empty() || rng.gen_bool(0.5);
        let u = if grow_spine { tail } else { *legs.choose(rng).unwrap() };
        deg[u] += 1;
        deg[v] += 1;
        edges.push((u, v));
        if grow_spine {
            spine.push(v);
        }
    }
    edges
}

/// The same graph with every node's ports permuted uniformly at random.
pub fn shuffle_ports(g: &PortGraph, rng: &mut impl Rng) -> PortGraph {
    let perms: Vec<Vec<usize>> = (0..g.n())
        .map(|v| {
            let mut p: Vec<usize> = (1..=g.degree(v)).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    let mut h = PortGraph::new();
    for v in 0..g.n() {
        let mut ins = vec![Label::bottom(); g.degree(v)];
        for (old, &new) in perms[v].iter().enumerate() {
            ins[new - 1] = g.inputs(v)[old].clone();
        }
        h.add_node(ins);
    }
    for (a, b) in g.edges() {
        let a2 = lcl_core::HalfEdge::new(a.node, perms[a.node][a.port - 1]);
        let b2 = lcl_core::HalfEdge::new(b.node, perms[b.node][b.port - 1]);
        h.connect(a2, b2).expect("permuted ports are fresh");
    }
    h.identity = g.identity.clone();
    h
}
