//! Node-edge-checkable LCL problems.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::label::{Alphabet, Label};

/// A node configuration: a multiset of output labels, stored sorted under the
/// owning problem's alphabet order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultisetConfig(pub Vec<Label>);

impl MultisetConfig {
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub delta: usize,
    pub sigma_in: Alphabet,
    pub sigma_out: Alphabet,
    /// `node[d - 1]` holds the allowed configurations around a degree-`d` node.
    pub node: Vec<Vec<MultisetConfig>>,
    /// Unordered pairs, each stored with the smaller label first.
    pub edge: Vec<[Label; 2]>,
    /// Image of every input label, in input-alphabet order.
    pub g: Vec<(Label, Vec<Label>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

impl Problem {
    /// A problem with no allowed configurations and empty `g` images.
    pub fn empty(delta: usize, sigma_in: Alphabet, sigma_out: Alphabet) -> Problem {
        let g = sigma_in.iter().map(|l| (l.clone(), Vec::new())).collect();
        Problem {
            delta,
            sigma_in,
            sigma_out,
            node: vec![Vec::new(); delta],
            edge: Vec::new(),
            g,
        }
    }

    pub fn node_configs(&self, degree: usize) -> &[MultisetConfig] {
        degree
            .checked_sub(1)
            .and_then(|i| self.node.get(i))
            .map_or(&[], Vec::as_slice)
    }

    pub fn g_image(&self, input: &Label) -> Option<&[Label]> {
        self.g
            .iter()
            .find(|(l, _)| l == input)
            .map(|(_, img)| img.as_slice())
    }

    pub fn add_node_config(&mut self, labels: Vec<Label>) {
        let d = labels.len();
        if d == 0 {
            return;
        }
        if self.node.len() < d {
            self.node.resize(d, Vec::new());
        }
        let mut labels = labels;
        self.sigma_out.sort(&mut labels);
        self.node[d - 1].push(MultisetConfig(labels));
    }

    pub fn add_edge_config(&mut self, a: Label, b: Label) {
        let mut pair = [a, b];
        self.sigma_out.sort(&mut pair);
        self.edge.push(pair);
    }

    pub fn set_g(&mut self, input: Label, image: Vec<Label>) {
        match self.g.iter_mut().find(|(l, _)| *l == input) {
            Some((_, img)) => *img = image,
            None => self.g.push((input, image)),
        }
    }

    /// Sorts every configuration list canonically and drops duplicates.
    /// Returns how many duplicates were removed.
    pub fn normalize(&mut self) -> usize {
        let out = &self.sigma_out;
        let mut removed = 0;
        for cfgs in &mut self.node {
            for c in cfgs.iter_mut() {
                out.sort(&mut c.0);
            }
            cfgs.sort_by(|a, b| config_key(out, &a.0).cmp(&config_key(out, &b.0)));
            let before = cfgs.len();
            cfgs.dedup();
            removed += before - cfgs.len();
        }
        for pair in &mut self.edge {
            out.sort(pair);
        }
        self.edge.sort_by(|a, b| config_key(out, a).cmp(&config_key(out, b)));
        let before = self.edge.len();
        self.edge.dedup();
        removed += before - self.edge.len();
        for (_, img) in &mut self.g {
            out.sort(img);
            img.dedup();
        }
        let inp = &self.sigma_in;
        self.g.sort_by(|a, b| inp.rank(&a.0).cmp(&inp.rank(&b.0)));
        removed
    }

    /// Checks every structural invariant. Errors make the problem unusable;
    /// warnings flag degrees whose constraint set is empty.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let mut err = |m: String| {
            diags.push(Diagnostic {
                severity: Severity::Error,
                message: m,
            })
        };
        if self.delta == 0 {
            err("delta must be positive".into());
        }
        if self.sigma_in.is_empty() {
            err("input alphabet is empty".into());
        }
        if self.sigma_out.is_empty() {
            err("output alphabet is empty".into());
        }
        if self.node.len() != self.delta {
            err(format!(
                "node constraints declared for degrees 1..{} but delta is {}",
                self.node.len(),
                self.delta
            ));
        }
        for (i, cfgs) in self.node.iter().enumerate() {
            for c in cfgs {
                if c.arity() != i + 1 {
                    err(format!(
                        "node configuration of arity {} listed under degree {}",
                        c.arity(),
                        i + 1
                    ));
                }
                for l in &c.0 {
                    if !self.sigma_out.contains(l) {
                        err(format!("node {}: label {l} not in output alphabet", i + 1));
                    }
                }
            }
        }
        for pair in &self.edge {
            for l in pair {
                if !self.sigma_out.contains(l) {
                    err(format!("edge: label {l} not in output alphabet"));
                }
            }
        }
        for (input, img) in &self.g {
            if !self.sigma_in.contains(input) {
                err(format!("g defined for undeclared input label {input}"));
            }
            for l in img {
                if !self.sigma_out.contains(l) {
                    err(format!("g({input}): label {l} not in output alphabet"));
                }
            }
        }
        for input in self.sigma_in.iter() {
            let n = self.g.iter().filter(|(l, _)| l == input).count();
            if n == 0 {
                err(format!("g undefined for input label {input}"));
            } else if n > 1 {
                err(format!("g defined {n} times for input label {input}"));
            }
        }
        for (i, cfgs) in self.node.iter().enumerate() {
            if cfgs.is_empty() {
                diags.push(Diagnostic {
                    severity: Severity::Warning,
                    message: format!(
                        "degree {} unsolvable (no node configurations)",
                        i + 1
                    ),
                });
            }
        }
        diags
    }

    pub fn is_valid(&self) -> bool {
        self.validate()
            .iter()
            .all(|d| d.severity != Severity::Error)
    }

    /// Index-based form used by the combinatorial operators and the verifier.
    pub fn indexed(&self) -> Result<Indexed> {
        if let Some(d) = self
            .validate()
            .into_iter()
            .find(|d| d.severity == Severity::Error)
        {
            return Err(Error::InvalidProblem(d.message));
        }
        let out = &self.sigma_out;
        let idx = |l: &Label| out.index_of(l).expect("validated");
        let n_out = out.len();
        let node = self
            .node
            .iter()
            .map(|cfgs| {
                cfgs.iter()
                    .map(|c| {
                        let mut v: Vec<u32> = c.0.iter().map(idx).collect();
                        v.sort_unstable();
                        v
                    })
                    .collect()
            })
            .collect();
        let mut edge = vec![vec![false; n_out]; n_out];
        for [a, b] in &self.edge {
            let (a, b) = (idx(a) as usize, idx(b) as usize);
            edge[a][b] = true;
            edge[b][a] = true;
        }
        let mut g = vec![vec![false; n_out]; self.sigma_in.len()];
        for (input, img) in &self.g {
            let i = self.sigma_in.index_of(input).expect("validated") as usize;
            for l in img {
                g[i][idx(l) as usize] = true;
            }
        }
        Ok(Indexed {
            delta: self.delta,
            n_in: self.sigma_in.len(),
            n_out,
            node,
            edge,
            g,
        })
    }

    /// Removes output labels that can never appear in a correct solution:
    /// labels in no node configuration, and labels compatible with no label
    /// across an edge. Repeats until nothing changes.
    pub fn prune_unusable(&self) -> Problem {
        let mut p = self.clone();
        loop {
            let mut in_node: HashSet<&Label> = HashSet::new();
            for c in p.node.iter().flatten() {
                in_node.extend(c.0.iter());
            }
            let mut in_edge: HashSet<&Label> = HashSet::new();
            for [a, b] in &p.edge {
                in_edge.insert(a);
                in_edge.insert(b);
            }
            let keep: Vec<Label> = p
                .sigma_out
                .iter()
                .filter(|l| in_node.contains(l) && in_edge.contains(l))
                .cloned()
                .collect();
            if keep.len() == p.sigma_out.len() {
                return p;
            }
            let alive: HashSet<Label> = keep.iter().cloned().collect();
            let ok = |l: &Label| alive.contains(l);
            p.sigma_out = Alphabet::new(keep).expect("subset of a valid alphabet");
            for cfgs in &mut p.node {
                cfgs.retain(|c| c.0.iter().all(ok));
            }
            p.edge.retain(|pair| pair.iter().all(ok));
            for (_, img) in &mut p.g {
                img.retain(ok);
            }
        }
    }
}

/// Problem with labels replaced by alphabet positions.
#[derive(Clone, Debug)]
pub struct Indexed {
    pub delta: usize,
    pub n_in: usize,
    pub n_out: usize,
    /// `node[d - 1]`: sorted index tuples.
    pub node: Vec<HashSet<Vec<u32>>>,
    /// Symmetric compatibility matrix.
    pub edge: Vec<Vec<bool>>,
    /// `g[input][output]`.
    pub g: Vec<Vec<bool>>,
}

impl Indexed {
    pub fn node_allows(&self, sorted: &[u32]) -> bool {
        let d = sorted.len();
        d >= 1 && d <= self.node.len() && self.node[d - 1].contains(sorted)
    }

    pub fn edge_allows(&self, a: u32, b: u32) -> bool {
        self.edge[a as usize][b as usize]
    }
}

/// A handful of small problems used throughout tests, examples and the CLI.
pub mod catalog {
    use super::*;

    fn all_multisets(n: usize, k: usize) -> Vec<Vec<u32>> {
        fn rec(n: u32, k: usize, start: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(n, k, i, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n as u32, k, 0, &mut Vec::new(), &mut out);
        out
    }

    /// Problem where every configuration is allowed.
    pub fn unconstrained(delta: usize, sigma_in: Alphabet, sigma_out: Alphabet) -> Problem {
        let mut p = Problem::empty(delta, sigma_in, sigma_out);
        let labels = p.sigma_out.labels().to_vec();
        for d in 1..=delta {
            for m in all_multisets(labels.len(), d) {
                p.add_node_config(m.iter().map(|&i| labels[i as usize].clone()).collect());
            }
        }
        for m in all_multisets(labels.len(), 2) {
            p.add_edge_config(labels[m[0] as usize].clone(), labels[m[1] as usize].clone());
        }
        let ins = p.sigma_in.labels().to_vec();
        for i in ins {
            p.set_g(i, labels.clone());
        }
        p.normalize();
        p
    }

    /// Single output label `X`, everything allowed.
    pub fn trivial(delta: usize) -> Problem {
        unconstrained(
            delta,
            Alphabet::new(vec![Label::bottom()]).unwrap(),
            Alphabet::from_symbols(&["X"]),
        )
    }

    /// Proper 2-coloring of half-edges: both half-edges of a node share a
    /// color, the two sides of an edge differ.
    pub fn two_coloring() -> Problem {
        let a = Label::base("A");
        let b = Label::base("B");
        let mut p = Problem::empty(
            2,
            Alphabet::new(vec![Label::bottom()]).unwrap(),
            Alphabet::from_symbols(&["A", "B"]),
        );
        p.add_node_config(vec![a.clone()]);
        p.add_node_config(vec![b.clone()]);
        p.add_node_config(vec![a.clone(), a.clone()]);
        p.add_node_config(vec![b.clone(), b.clone()]);
        p.add_edge_config(a.clone(), b.clone());
        p.set_g(Label::bottom(), vec![a, b]);
        p.normalize();
        p
    }

    /// Inputs `a`, `b` force outputs `A`, `B`; no node or edge constraint.
    pub fn copy(delta: usize) -> Problem {
        let mut p = unconstrained(
            delta,
            Alphabet::from_symbols(&["a", "b"]),
            Alphabet::from_symbols(&["A", "B"]),
        );
        p.set_g(Label::base("a"), vec![Label::base("A")]);
        p.set_g(Label::base("b"), vec![Label::base("B")]);
        p
    }
}


fn config_key<'a>(out: &Alphabet, ls: &'a [Label]) -> Vec<(usize, Option<&'a Label>)> {
    ls.iter().map(|l| out.rank(l)).collect()
}
