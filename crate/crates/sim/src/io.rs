//! Text formats for graphs and labelings.
//!
//! ```text
//! n 3 delta 2 mode deterministic-id
//! node 0 deg 1 inputs a idtok 17
//! node 1 deg 2 inputs a,b idtok 4
//! node 2 deg 1 inputs b idtok 9
//! edge 0:1 1:1
//! edge 1:2 2:1
//! ```
//! Labelings are `out <node>:<port> <label>` lines.

use std::fmt::Write as _;

use lcl_core::format::{split_label_list, strip_comment};
use lcl_core::{Error, HalfEdge, HalfEdgeLabeling, Identity, Label, PortGraph, Result};

fn render_list(ls: &[Label]) -> String {
    if ls.is_empty() {
        return "-".to_string();
    }
    ls.iter().map(Label::render).collect::<Vec<_>>().join(",")
}

pub fn write_graph(g: &PortGraph) -> String {
    let mut s = String::new();
    writeln!(s, "n {} delta {} mode {}", g.n(), g.max_degree(), g.identity.mode_name()).unwrap();
    for v in 0..g.n() {
        let tok = g.identity.token(v).map_or("-".to_string(), |t| t.to_string());
        writeln!(
            s,
            "node {v} deg {} inputs {} idtok {tok}",
            g.degree(v),
            render_list(g.inputs(v))
        )
        .unwrap();
    }
    for (a, b) in g.edges() {
        writeln!(s, "edge {a} {b}").unwrap();
    }
    s
}

pub fn parse_half_edge(s: &str, lineno: usize) -> Result<HalfEdge> {
    let (v, p) = s
        .split_once(':')
        .ok_or_else(|| Error::syntax(lineno, format!("expected <node>:<port>, got {s:?}")))?;
    let bad = || Error::syntax(lineno, format!("bad half-edge {s:?}"));
    let node = v.parse().map_err(|_| bad())?;
    let port: usize = p.parse().map_err(|_| bad())?;
    if port == 0 {
        return Err(bad());
    }
    Ok(HalfEdge::new(node, port))
}

pub fn read_graph(text: &str) -> Result<PortGraph> {
    let mut g = PortGraph::new();
    let mut n = None;
    let mut mode = String::from("port-numbering");
    let mut tokens: Vec<Option<u64>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "n" => {
                if words.len() < 2 {
                    return Err(Error::syntax(lineno, "expected `n <n> delta <d> mode <mode>`"));
                }
                n = Some(
                    words[1]
                        .parse::<usize>()
                        .map_err(|_| Error::syntax(lineno, "bad node count"))?,
                );
                if let Some(pos) = words.iter().position(|w| *w == "mode") {
                    mode = words
                        .get(pos + 1)
                        .ok_or_else(|| Error::syntax(lineno, "missing mode"))?
                        .to_string();
                }
            }
            "node" => {
                let bad = || Error::syntax(lineno, "expected `node <id> deg <d> inputs <l,...> idtok <t>`");
                if words.len() != 8 || words[2] != "deg" || words[4] != "inputs" || words[6] != "idtok" {
                    return Err(bad());
                }
                let id: usize = words[1].parse().map_err(|_| bad())?;
                if id != g.n() {
                    return Err(Error::syntax(lineno, format!("node {id} out of order")));
                }
                let d: usize = words[3].parse().map_err(|_| bad())?;
                let inputs = if words[5] == "-" {
                    Vec::new()
                } else {
                    split_label_list(words[5], lineno)?
                };
                if inputs.len() != d {
                    return Err(Error::syntax(lineno, "input count differs from degree"));
                }
                g.add_node(inputs);
                tokens.push(match words[7] {
                    "-" => None,
                    t => Some(t.parse().map_err(|_| bad())?),
                });
            }
            "edge" => {
                if words.len() != 3 {
                    return Err(Error::syntax(lineno, "expected `edge <u>:<p> <v>:<p>`"));
                }
                let a = parse_half_edge(words[1], lineno)?;
                let b = parse_half_edge(words[2], lineno)?;
                if a.node >= g.n() || b.node >= g.n() {
                    return Err(Error::syntax(lineno, "edge endpoint not declared"));
                }
                g.connect(a, b).map_err(|e| Error::syntax(lineno, e.to_string()))?;
            }
            w => return Err(Error::syntax(lineno, format!("unknown record {w:?}"))),
        }
    }
    if let Some(n) = n {
        if n != g.n() {
            return Err(Error::InvalidGraph(format!("header says {n} nodes, found {}", g.n())));
        }
    }
    let all = || tokens.iter().map(|t| t.ok_or_else(|| Error::InvalidGraph("missing idtok".into()))).collect::<Result<Vec<u64>>>();
    g.identity = match mode.as_str() {
        "port-numbering" => Identity::None,
        "deterministic-id" => Identity::Ids(all()?),
        "order-invariant" => Identity::Ranks(all()?),
        "randomized" => Identity::Seeds(all()?),
        m => return Err(Error::InvalidGraph(format!("unknown mode {m:?}"))),
    };
    g.check(false)?;
    Ok(g)
}

pub fn write_labeling(g: &PortGraph, f: &HalfEdgeLabeling) -> String {
    let mut s = String::new();
    for h in g.half_edges() {
        writeln!(s, "out {h} {}", f.get(h)).unwrap();
    }
    s
}

pub fn read_labeling(g: &PortGraph, text: &str) -> Result<HalfEdgeLabeling> {
    let mut labels: Vec<Vec<Option<Label>>> = (0..g.n()).map(|v| vec![None; g.degree(v)]).collect();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() != 3 || words[0] != "out" {
            return Err(Error::syntax(lineno, "expected `out <node>:<port> <label>`"));
        }
        let h = parse_half_edge(words[1], lineno)?;
        let slot = labels
            .get_mut(h.node)
            .and_then(|l| l.get_mut(h.port - 1))
            .ok_or_else(|| Error::syntax(lineno, format!("no half-edge {h}")))?;
        *slot = Some(Label::parse(words[2]).map_err(|e| Error::syntax(lineno, e.to_string()))?);
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(v, ls)| {
            ls.into_iter()
                .enumerate()
                .map(|(j, l)| l.ok_or_else(|| Error::InvalidSolution(format!("half-edge {v}:{} unlabeled", j + 1))))
                .collect()
        })
        .collect::<Result<Vec<Vec<Label>>>>()?;
    Ok(HalfEdgeLabeling::new(labels))
}
