//! Local algorithms as decision tables or rules over views.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::ball::{Mode, View};
use crate::error::{Error, Result};
use crate::format::{split_key, split_label_list, strip_comment};
use crate::label::Label;
use crate::problem::Problem;

/// What an algorithm may know beyond its view.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunContext {
    /// The number of nodes the algorithm is told the graph has.
    pub n: usize,
}

/// Anything an algorithm can be evaluated on.
pub trait BallView {
    fn key(&self) -> String;
    fn root_degree(&self) -> usize;
}

impl BallView for View {
    fn key(&self) -> String {
        self.encode()
    }
    fn root_degree(&self) -> usize {
        self.degree()
    }
}

pub type RuleFn<V> = dyn Fn(&V, &RunContext) -> Result<Vec<Label>> + Send + Sync;

pub enum Body<V> {
    /// Canonical encoding -> output per root port.
    Table(BTreeMap<String, Vec<Label>>),
    Rule(Arc<RuleFn<V>>),
}

impl<V> Clone for Body<V> {
    fn clone(&self) -> Self {
        match self {
            Body::Table(t) => Body::Table(t.clone()),
            Body::Rule(r) => Body::Rule(Arc::clone(r)),
        }
    }
}

pub struct LocalAlgorithm<V = View> {
    pub name: String,
    pub radius: usize,
    pub mode: Mode,
    /// Reference to the problem this algorithm is meant to solve (a path or
    /// a digest); informational.
    pub problem: Option<String>,
    pub body: Body<V>,
}

impl<V> Clone for LocalAlgorithm<V> {
    fn clone(&self) -> Self {
        LocalAlgorithm {
            name: self.name.clone(),
            radius: self.radius,
            mode: self.mode,
            problem: self.problem.clone(),
            body: self.body.clone(),
        }
    }
}

impl<V> fmt::Debug for LocalAlgorithm<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = match &self.body {
            Body::Table(t) => format!("table({} entries)", t.len()),
            Body::Rule(_) => "rule".to_string(),
        };
        f.debug_struct("LocalAlgorithm")
            .field("name", &self.name)
            .field("radius", &self.radius)
            .field("mode", &self.mode)
            .field("body", &body)
            .finish()
    }
}

impl<V: BallView> LocalAlgorithm<V> {
    pub fn from_rule<F>(name: impl Into<String>, radius: usize, mode: Mode, f: F) -> Self
    where
        F: Fn(&V, &RunContext) -> Result<Vec<Label>> + Send + Sync + 'static,
    {
        LocalAlgorithm {
            name: name.into(),
            radius,
            mode,
            problem: None,
            body: Body::Rule(Arc::new(f)),
        }
    }

    pub fn from_table(
        name: impl Into<String>,
        radius: usize,
        mode: Mode,
        table: BTreeMap<String, Vec<Label>>,
    ) -> Self {
        LocalAlgorithm {
            name: name.into(),
            radius,
            mode,
            problem: None,
            body: Body::Table(table),
        }
    }

    pub fn with_problem(mut self, problem: impl Into<String>) -> Self {
        self.problem = Some(problem.into());
        self
    }

    pub fn is_table(&self) -> bool {
        matches!(self.body, Body::Table(_))
    }

    /// Outputs for the root's ports.
    pub fn evaluate(&self, view: &V, ctx: &RunContext) -> Result<Vec<Label>> {
        let out = match &self.body {
            Body::Table(t) => {
                let key = view.key();
                t.get(&key).cloned().ok_or(Error::MissingEntry(key))?
            }
            Body::Rule(f) => f(view, ctx)?,
        };
        if out.len() != view.root_degree() {
            return Err(Error::Algorithm(format!(
                "{} returned {} labels for a degree-{} node",
                self.name,
                out.len(),
                view.root_degree()
            )));
        }
        Ok(out)
    }

    /// Evaluates on every given view and stores the results as a table.
    pub fn materialize<'a>(
        &self,
        views: impl IntoIterator<Item = &'a V>,
        ctx: &RunContext,
    ) -> Result<LocalAlgorithm<V>>
    where
        V: 'a,
    {
        let mut table = BTreeMap::new();
        for v in views {
            table.insert(v.key(), self.evaluate(v, ctx)?);
        }
        Ok(LocalAlgorithm {
            name: self.name.clone(),
            radius: self.radius,
            mode: self.mode,
            problem: self.problem.clone(),
            body: Body::Table(table),
        })
    }
}

impl LocalAlgorithm<View> {
    /// Table file format; fails for rule-backed algorithms.
    pub fn to_text(&self) -> Result<String> {
        let Body::Table(t) = &self.body else {
            return Err(Error::Other(format!(
                "{} is rule-backed; materialize it first",
                self.name
            )));
        };
        let mut s = String::new();
        writeln!(s, "radius: {}", self.radius).unwrap();
        writeln!(s, "mode: {}", self.mode).unwrap();
        if let Some(p) = &self.problem {
            writeln!(s, "problem: {p}").unwrap();
        }
        for (k, out) in t {
            let outs: Vec<String> = out.iter().map(Label::render).collect();
            writeln!(s, "ball {k} -> {}", outs.join(" ")).unwrap();
        }
        Ok(s)
    }

    pub fn from_text(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut radius = None;
        let mut mode = Mode::PortNumbering;
        let mut problem = None;
        let mut table = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("ball ") {
                let (k, out) = rest
                    .rsplit_once("->")
                    .ok_or_else(|| Error::syntax(lineno, "expected `ball <encoding> -> <labels>`"))?;
                let view = View::parse(k.trim()).map_err(|e| Error::syntax(lineno, e.to_string()))?;
                let out = crate::format::parse_label_list(out, lineno)?;
                if out.len() != view.degree() {
                    return Err(Error::syntax(lineno, "output count differs from root degree"));
                }
                table.insert(view.encode(), out);
                continue;
            }
            let (k, v) = split_key(line, lineno)?;
            match k {
                "radius" => {
                    radius = Some(v.parse().map_err(|_| Error::syntax(lineno, "bad radius"))?)
                }
                "mode" => mode = v.parse().map_err(|e: Error| Error::syntax(lineno, e.to_string()))?,
                "problem" => problem = Some(v.to_string()),
                _ => return Err(Error::syntax(lineno, format!("unknown key {k:?}"))),
            }
        }
        let radius = radius.ok_or_else(|| Error::syntax(0, "missing `radius:`"))?;
        for k in table.keys() {
            let depth = View::parse(k).expect("checked").depth();
            if depth > radius {
                return Err(Error::Other(format!("ball {k} deeper than radius {radius}")));
            }
        }
        Ok(LocalAlgorithm {
            name: name.into(),
            radius,
            mode,
            problem,
            body: Body::Table(table),
        })
    }
}

/// Outputs chosen from a node's degree and input tuple alone.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ZeroRoundAlgorithm {
    pub map: BTreeMap<(usize, Vec<Label>), Vec<Label>>,
}

impl ZeroRoundAlgorithm {
    pub fn get(&self, inputs: &[Label]) -> Option<&Vec<Label>> {
        self.map.get(&(inputs.len(), inputs.to_vec()))
    }

    /// Checks the node, `g` and global cross-compatibility conditions against
    /// `p`, and that every key of degree `1..=delta` is present. Returns a
    /// description of the first failure.
    pub fn check(&self, p: &Problem) -> std::result::Result<(), String> {
        let ix = p.indexed().map_err(|e| e.to_string())?;
        let out = |l: &Label| {
            p.sigma_out
                .index_of(l)
                .ok_or_else(|| format!("label {l} not in output alphabet"))
        };
        let mut used = Vec::new();
        for d in 1..=p.delta {
            for sigma in all_tuples(p.sigma_in.labels(), d) {
                let tau = self
                    .get(&sigma)
                    .ok_or_else(|| format!("no entry for d={d} in={}", render(&sigma)))?;
                let mut idx = tau.iter().map(out).collect::<std::result::Result<Vec<_>, _>>()?;
                for (s, t) in sigma.iter().zip(&idx) {
                    let si = p.sigma_in.index_of(s).unwrap() as usize;
                    if !ix.g[si][*t as usize] {
                        return Err(format!("g violated at d={d} in={}", render(&sigma)));
                    }
                }
                used.extend(idx.iter().copied());
                idx.sort_unstable();
                if !ix.node_allows(&idx) {
                    return Err(format!("node configuration violated at d={d} in={}", render(&sigma)));
                }
            }
        }
        used.sort_unstable();
        used.dedup();
        for &a in &used {
            for &b in &used {
                if !ix.edge_allows(a, b) {
                    return Err(format!(
                        "labels {} and {} are used but not edge-compatible",
                        p.sigma_out.get(a as usize),
                        p.sigma_out.get(b as usize)
                    ));
                }
            }
        }
        Ok(())
    }

    /// The corresponding radius-0 local algorithm.
    pub fn to_local(&self, mode: Mode) -> LocalAlgorithm<View> {
        let map = self.map.clone();
        LocalAlgorithm::from_rule("zero-round", 0, mode, move |v: &View, _| {
            if v.degree() == 0 {
                return Ok(Vec::new());
            }
            map.get(&(v.degree(), v.inputs.clone()))
                .cloned()
                .ok_or_else(|| Error::MissingEntry(v.encode()))
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for ((d, sigma), tau) in &self.map {
            writeln!(s, "zr d={d} in={} -> {}", render(sigma), render(tau)).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let bad = || Error::syntax(lineno, "expected `zr d=<d> in=<...> -> <...>`");
            let rest = line.strip_prefix("zr d=").ok_or_else(bad)?;
            let (d, rest) = rest.split_once(" in=").ok_or_else(bad)?;
            let (sigma, tau) = rest.split_once("->").ok_or_else(bad)?;
            let d: usize = d.trim().parse().map_err(|_| bad())?;
            let sigma = split_label_list(sigma.trim(), lineno)?;
            let tau = split_label_list(tau.trim(), lineno)?;
            if sigma.len() != d || tau.len() != d {
                return Err(Error::syntax(lineno, "tuple length differs from d"));
            }
            map.insert((d, sigma), tau);
        }
        Ok(ZeroRoundAlgorithm { map })
    }
}

fn render(ls: &[Label]) -> String {
    ls.iter().map(Label::render).collect::<Vec<_>>().join(",")
}

/// All ordered `d`-tuples over `labels`, lexicographic in alphabet order.
pub fn all_tuples(labels: &[Label], d: usize) -> Vec<Vec<Label>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|t| {
                labels.iter().map(move |l| {
                    let mut t = t.clone();
                    t.push(l.clone());
                    t
                })
            })
            .collect();
    }
    out
}
