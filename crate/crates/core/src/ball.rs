//! Radius-t views of a node and their canonical string encodings.
//!
//! A view is the port-respecting unfolding of the graph around a root: each
//! node record lists its degree, the input (and optionally output) label of
//! every port, and an identity token; below it hang the views of the
//! neighbors at one less radius, tagged with the port through which the
//! neighbor sees us. The encoding is
//!
//! ```text
//! (d;in_1,…,in_d;tok)[c_1,…,c_d]     c_j = `-` | b_j:(…)[…]
//! ```
//!
//! On trees two rooted balls are isomorphic (ports, inputs and identity
//! tokens respected) iff their encodings are equal.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{HalfEdgeLabeling, Identity, PortGraph};
use crate::label::Label;

/// Which identity information a view carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    DeterministicId,
    OrderInvariant,
    PortNumbering,
    Randomized,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::DeterministicId => "deterministic-id",
            Mode::OrderInvariant => "order-invariant",
            Mode::PortNumbering => "port-numbering",
            Mode::Randomized => "randomized",
        }
    }

    pub fn is_deterministic(self) -> bool {
        self != Mode::Randomized
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        Ok(match s {
            "deterministic-id" => Mode::DeterministicId,
            "order-invariant" => Mode::OrderInvariant,
            "port-numbering" => Mode::PortNumbering,
            "randomized" => Mode::Randomized,
            _ => return Err(Error::Other(format!("unknown mode {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct View {
    pub inputs: Vec<Label>,
    pub outputs: Option<Vec<Label>>,
    pub token: Option<u64>,
    /// One entry per port: `None` when the radius is exhausted or the port is
    /// dangling, otherwise the back-port at the neighbor and its view.
    pub children: Vec<Option<(usize, View)>>,
}

impl View {
    pub fn degree(&self) -> usize {
        self.inputs.len()
    }

    /// Leaf record with every port unexplored.
    pub fn record(inputs: Vec<Label>, token: Option<u64>) -> View {
        let d = inputs.len();
        View {
            inputs,
            outputs: None,
            token,
            children: vec![None; d],
        }
    }

    pub fn child(&self, port: usize) -> Option<&(usize, View)> {
        self.children.get(port.checked_sub(1)?)?.as_ref()
    }

    /// Depth of the deepest explored record (0 for a bare record).
    pub fn depth(&self) -> usize {
        self.children
            .iter()
            .flatten()
            .map(|(_, c)| 1 + c.depth())
            .max()
            .unwrap_or(0)
    }

    pub fn encode(&self) -> String {
        let mut s = String::new();
        self.write_encoding(&mut s);
        s
    }

    fn write_encoding(&self, s: &mut String) {
        use std::fmt::Write as _;
        write!(s, "({};", self.degree()).unwrap();
        for (j, l) in self.inputs.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            write!(s, "{l}").unwrap();
            if let Some(out) = &self.outputs {
                write!(s, ":{}", out[j]).unwrap();
            }
        }
        s.push(';');
        if let Some(t) = self.token {
            write!(s, "{t}").unwrap();
        }
        s.push_str(")[");
        for (j, c) in self.children.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            match c {
                None => s.push('-'),
                Some((b, v)) => {
                    write!(s, "{b}:").unwrap();
                    v.write_encoding(s);
                }
            }
        }
        s.push(']');
    }

    pub fn parse(s: &str) -> Result<View> {
        let mut p = ViewParser { s, pos: 0 };
        let v = p.view()?;
        if p.pos != s.len() {
            return Err(p.err("trailing characters"));
        }
        Ok(v)
    }

    /// Cuts the view down to `radius`.
    pub fn truncate(&self, radius: usize) -> View {
        View {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            token: self.token,
            children: self
                .children
                .iter()
                .map(|c| match c {
                    Some((b, v)) if radius > 0 => Some((*b, v.truncate(radius - 1))),
                    _ => None,
                })
                .collect(),
        }
    }

    /// Drops output labels everywhere.
    pub fn without_outputs(&self) -> View {
        View {
            inputs: self.inputs.clone(),
            outputs: None,
            token: self.token,
            children: self
                .children
                .iter()
                .map(|c| c.as_ref().map(|(b, v)| (*b, v.without_outputs())))
                .collect(),
        }
    }

    pub fn tokens(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        self.collect_tokens(&mut out);
        out
    }

    fn collect_tokens(&self, out: &mut BTreeSet<u64>) {
        if let Some(t) = self.token {
            out.insert(t);
        }
        for (_, c) in self.children.iter().flatten() {
            c.collect_tokens(out);
        }
    }

    /// Replaces identity tokens by their 1-based rank among the tokens
    /// present in this view.
    pub fn rank_tokens(&mut self) {
        let sorted: Vec<u64> = self.tokens().into_iter().collect();
        self.map_tokens(&|t| sorted.binary_search(&t).unwrap() as u64 + 1);
    }

    pub fn map_tokens(&mut self, f: &dyn Fn(u64) -> u64) {
        if let Some(t) = self.token {
            self.token = Some(f(t));
        }
        for (_, c) in self.children.iter_mut().flatten() {
            c.map_tokens(f);
        }
    }

    pub fn clear_tokens(&mut self) {
        self.token = None;
        for (_, c) in self.children.iter_mut().flatten() {
            c.clear_tokens();
        }
    }

    /// The neighbor's view behind `port`, re-ranked on its own when `mode`
    /// is order-invariant.
    pub fn subview(&self, port: usize, mode: Mode) -> Option<View> {
        let (_, c) = self.child(port)?;
        let mut c = c.clone();
        if mode == Mode::OrderInvariant {
            c.rank_tokens();
        }
        Some(c)
    }

    /// Rebuilds the tree this view unfolds. Node 0 is the root; ports with
    /// no explored neighbor stay dangling. Identity tokens become
    /// `Identity::Ids` when present. Also returns each node's depth.
    ///
    /// Only meaningful for views of forests, where every non-backtracking
    /// walk reaches a distinct node.
    pub fn to_fragment(&self) -> (PortGraph, Vec<usize>) {
        let mut g = PortGraph::new();
        let mut depth = Vec::new();
        let mut tokens = Vec::new();
        self.build_fragment(&mut g, &mut depth, &mut tokens, None, 0);
        if tokens.iter().all(Option::is_some) && !tokens.is_empty() {
            g.identity = Identity::Ids(tokens.into_iter().map(Option::unwrap).collect());
        }
        (g, depth)
    }

    fn build_fragment(
        &self,
        g: &mut PortGraph,
        depth: &mut Vec<usize>,
        tokens: &mut Vec<Option<u64>>,
        parent: Option<(usize, usize, usize)>,
        d: usize,
    ) -> usize {
        let me = g.add_node(self.inputs.clone());
        depth.push(d);
        tokens.push(self.token);
        let back = parent.map(|(p, pp, b)| {
            g.connect(
                crate::graph::HalfEdge::new(p, pp),
                crate::graph::HalfEdge::new(me, b),
            )
            .expect("fresh ports");
            b
        });
        for (j, c) in self.children.iter().enumerate() {
            let port = j + 1;
            if Some(port) == back {
                continue;
            }
            if let Some((b, v)) = c {
                v.build_fragment(g, depth, tokens, Some((me, port, *b)), d + 1);
            }
        }
        me
    }
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Identity token of `v` as seen in `mode` (before order-invariant ranking).
fn raw_token(g: &PortGraph, v: usize, mode: Mode) -> Result<Option<u64>> {
    match mode {
        Mode::PortNumbering => Ok(None),
        Mode::DeterministicId | Mode::OrderInvariant => match &g.identity {
            Identity::Ids(t) | Identity::Ranks(t) => Ok(Some(t[v])),
            other => Err(Error::Algorithm(format!(
                "{} algorithm needs identifiers, graph is in {} mode",
                mode,
                other.mode_name()
            ))),
        },
        Mode::Randomized => match &g.identity {
            Identity::Seeds(t) => Ok(Some(t[v])),
            other => Err(Error::Algorithm(format!(
                "randomized algorithm needs seeds, graph is in {} mode",
                other.mode_name()
            ))),
        },
    }
}

/// The radius-`t` view of `v` in `g` under `mode`, optionally with outputs.
pub fn extract(
    g: &PortGraph,
    v: usize,
    t: usize,
    mode: Mode,
    outputs: Option<&HalfEdgeLabeling>,
) -> Result<View> {
    fn rec(
        g: &PortGraph,
        v: usize,
        t: usize,
        mode: Mode,
        outputs: Option<&HalfEdgeLabeling>,
    ) -> Result<View> {
        let children = (1..=g.degree(v))
            .map(|p| {
                if t == 0 {
                    return Ok(None);
                }
                match g.opposite(crate::graph::HalfEdge::new(v, p)) {
                    None => Ok(None),
                    Some(o) => Ok(Some((o.port, rec(g, o.node, t - 1, mode, outputs)?))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(View {
            inputs: g.inputs(v).to_vec(),
            outputs: outputs.map(|o| o.node(v).to_vec()),
            token: raw_token(g, v, mode)?,
            children,
        })
    }
    let mut view = rec(g, v, t, mode, outputs)?;
    if mode == Mode::OrderInvariant {
        view.rank_tokens();
    }
    Ok(view)
}

/// Canonical encoding of the radius-`t` ball around `v`.
pub fn canonical_ball(g: &PortGraph, v: usize, t: usize, mode: Mode) -> Result<String> {
    extract(g, v, t, mode, None).map(|b| b.encode())
}

struct ViewParser<'a> {
    s: &'a str,
    pos: usize,
}

impl ViewParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Encoding {
            offset: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(&format!("expected {c:?}")))
        }
    }

    fn number(&mut self) -> Result<u64> {
        let rest = &self.s[self.pos..];
        let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if end == 0 {
            return Err(self.err("expected a number"));
        }
        let n = rest[..end].parse().map_err(|_| self.err("number too large"))?;
        self.pos += end;
        Ok(n)
    }

    /// Reads one label, balancing braces.
    fn label(&mut self) -> Result<Label> {
        let rest = &self.s[self.pos..];
        let mut depth = 0i32;
        let mut end = rest.len();
        for (i, c) in rest.char_indices() {
            match c {
                '{' => depth += 1,
                '}' => depth -= 1,
                ',' | ';' | ':' | ')' if depth == 0 => {
                    end = i;
                    break;
                }
                _ => {}
            }
        }
        let l = Label::parse(&rest[..end]).map_err(|e| self.err(&e.to_string()))?;
        self.pos += end;
        Ok(l)
    }

    fn view(&mut self) -> Result<View> {
        self.expect('(')?;
        let d = self.number()? as usize;
        self.expect(';')?;
        let mut inputs = Vec::with_capacity(d);
        let mut outputs = Vec::with_capacity(d);
        for j in 0..d {
            if j > 0 {
                self.expect(',')?;
            }
            inputs.push(self.label()?);
            if self.peek() == Some(':') {
                self.pos += 1;
                outputs.push(self.label()?);
            }
        }
        if !outputs.is_empty() && outputs.len() != d {
            return Err(self.err("outputs must be given for all ports or none"));
        }
        self.expect(';')?;
        let token = if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            Some(self.number()?)
        } else {
            None
        };
        self.expect(')')?;
        self.expect('[')?;
        let mut children = Vec::with_capacity(d);
        for j in 0..d {
            if j > 0 {
                self.expect(',')?;
            }
            if self.peek() == Some('-') {
                self.pos += 1;
                children.push(None);
            } else {
                let b = self.number()? as usize;
                self.expect(':')?;
                let v = self.view()?;
                if b == 0 || b > v.degree() {
                    return Err(self.err("back-port out of range"));
                }
                children.push(Some((b, v)));
            }
        }
        self.expect(']')?;
        Ok(View {
            inputs,
            outputs: if d > 0 && !outputs.is_empty() {
                Some(outputs)
            } else {
                None
            },
            token,
            children,
        })
    }
}
