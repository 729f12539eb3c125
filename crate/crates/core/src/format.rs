//! Line-oriented text format for problems.
//!
//! ```text
//! delta: 3
//! input: x y
//! output: A B C
//! g: x -> A B
//! g: y -> C
//! node 1: A | B
//! node 2: A A | B C
//! edge: A B | C C
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::label::{Alphabet, Label};
use crate::problem::{Problem, Severity};

#[derive(Debug, Clone)]
pub struct Parsed {
    pub problem: Problem,
    pub warnings: Vec<String>,
}

/// Strips a trailing `#` comment and surrounding whitespace.
pub fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_label_list(s: &str, line: usize) -> Result<Vec<Label>> {
    s.split_whitespace()
        .map(|tok| Label::parse(tok).map_err(|e| Error::syntax(line, e.to_string())))
        .collect()
}

/// Splits a comma-separated label list at brace depth 0.
pub fn split_label_list(s: &str, lineno: usize) -> Result<Vec<Label>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(Label::parse(&s[start..i]).map_err(|e| Error::syntax(lineno, e.to_string()))?);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s.is_empty() {
        out.push(Label::parse(&s[start..]).map_err(|e| Error::syntax(lineno, e.to_string()))?);
    }
    Ok(out)
}

fn check_declared(labels: &[Label], alphabet: &Alphabet) -> Result<()> {
    match labels.iter().find(|l| !alphabet.contains(l)) {
        Some(l) => Err(Error::UndeclaredLabel(l.render())),
        None => Ok(()),
    }
}

/// Splits `key: value`; `key` may contain a space (`node 2`).
pub fn split_key(line: &str, lineno: usize) -> Result<(&str, &str)> {
    let (k, v) = line
        .split_once(':')
        .ok_or_else(|| Error::syntax(lineno, format!("expected `key: value`, got {line:?}")))?;
    Ok((k.trim(), v.trim()))
}

pub fn parse_problem(text: &str) -> Result<Problem> {
    parse_problem_with_warnings(text).map(|p| p.problem)
}

pub fn parse_problem_with_warnings(text: &str) -> Result<Parsed> {
    let mut delta = None;
    let mut input = None;
    let mut output = None;
    let mut body = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (key, value) = split_key(line, lineno)?;
        match key {
            "delta" => {
                let d: usize = value
                    .parse()
                    .map_err(|_| Error::syntax(lineno, format!("bad delta {value:?}")))?;
                if d == 0 {
                    return Err(Error::syntax(lineno, "delta must be positive"));
                }
                delta = Some(d);
            }
            "input" | "output" => {
                let labels = parse_label_list(value, lineno)?;
                let alpha = Alphabet::new(labels).map_err(|e| Error::syntax(lineno, e.to_string()))?;
                if key == "input" {
                    input = Some(alpha);
                } else {
                    output = Some(alpha);
                }
            }
            _ => body.push((lineno, key, value)),
        }
    }
    let delta = delta.ok_or_else(|| Error::syntax(0, "missing `delta:`"))?;
    let output = output.ok_or_else(|| Error::syntax(0, "missing `output:`"))?;
    let implicit_input = input.is_none();
    let input = input.unwrap_or_else(|| Alphabet::new(vec![Label::bottom()]).unwrap());

    let mut p = Problem::empty(delta, input, output);
    p.g.clear();
    if implicit_input {
        p.g.push((Label::bottom(), p.sigma_out.labels().to_vec()));
    }
    for (lineno, key, value) in body {
        if key == "g" {
            let (lhs, rhs) = value
                .split_once("->")
                .ok_or_else(|| Error::syntax(lineno, "expected `g: <input> -> <outputs>`"))?;
            let lhs = parse_label_list(lhs, lineno)?;
            if lhs.len() != 1 {
                return Err(Error::syntax(lineno, "g needs exactly one input label"));
            }
            check_declared(&lhs, &p.sigma_in)?;
            let rhs = parse_label_list(rhs, lineno)?;
            check_declared(&rhs, &p.sigma_out)?;
            let input = lhs.into_iter().next().unwrap();
            match p.g.iter_mut().find(|(l, _)| *l == input) {
                Some((_, img)) => img.extend(rhs),
                None => p.g.push((input, rhs)),
            }
        } else if key == "edge" {
            for alt in value.split('|').filter(|a| !a.trim().is_empty()) {
                let ls = parse_label_list(alt, lineno)?;
                if ls.len() != 2 {
                    return Err(Error::syntax(lineno, "edge configurations have two labels"));
                }
                check_declared(&ls, &p.sigma_out)?;
                let mut it = ls.into_iter();
                p.add_edge_config(it.next().unwrap(), it.next().unwrap());
            }
        } else if let Some(d) = key.strip_prefix("node") {
            let d: usize = d
                .trim()
                .parse()
                .map_err(|_| Error::syntax(lineno, format!("bad node degree in {key:?}")))?;
            if d == 0 || d > delta {
                return Err(Error::syntax(lineno, format!("node degree {d} outside 1..{delta}")));
            }
            for alt in value.split('|').filter(|a| !a.trim().is_empty()) {
                let ls = parse_label_list(alt, lineno)?;
                if ls.len() != d {
                    return Err(Error::syntax(
                        lineno,
                        format!("node {d} configuration has {} labels", ls.len()),
                    ));
                }
                check_declared(&ls, &p.sigma_out)?;
                p.add_node_config(ls);
            }
        } else {
            return Err(Error::syntax(lineno, format!("unknown section {key:?}")));
        }
    }
    let dups = p.normalize();
    let mut warnings = Vec::new();
    if dups > 0 {
        warnings.push(format!("{dups} duplicate configuration(s) removed"));
    }
    for d in p.validate() {
        match d.severity {
            Severity::Error => return Err(Error::InvalidProblem(d.message)),
            Severity::Warning => warnings.push(d.message),
        }
    }
    Ok(Parsed {
        problem: p,
        warnings,
    })
}

fn join(labels: &[Label]) -> String {
    labels.iter().map(Label::render).collect::<Vec<_>>().join(" ")
}

/// Canonical rendering. Expects a normalized problem (see
/// [`Problem::normalize`]); every constructor in this crate returns one.
pub fn serialize_problem(p: &Problem) -> String {
    let mut s = String::new();
    writeln!(s, "delta: {}", p.delta).unwrap();
    writeln!(s, "input: {}", join(p.sigma_in.labels())).unwrap();
    writeln!(s, "output: {}", join(p.sigma_out.labels())).unwrap();
    for (input, img) in &p.g {
        if img.is_empty() {
            writeln!(s, "g: {input} ->").unwrap();
        } else {
            writeln!(s, "g: {input} -> {}", join(img)).unwrap();
        }
    }
    for (i, cfgs) in p.node.iter().enumerate() {
        let alts: Vec<String> = cfgs.iter().map(|c| join(&c.0)).collect();
        push_section(&mut s, &format!("node {}", i + 1), &alts);
    }
    let alts: Vec<String> = p.edge.iter().map(|e| join(e)).collect();
    push_section(&mut s, "edge", &alts);
    s
}

fn push_section(s: &mut String, key: &str, alts: &[String]) {
    if alts.is_empty() {
        writeln!(s, "{key}:").unwrap();
    } else {
        writeln!(s, "{key}: {}", alts.join(" | ")).unwrap();
    }
}
