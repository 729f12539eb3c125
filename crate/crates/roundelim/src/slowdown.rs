//! One round slower: from a `(t-1)`-round algorithm for `rere(re(Π))` back
//! to a `t`-round algorithm for Π.
//!
//! Each node evaluates the given algorithm on its own view and on each
//! neighbor's view. Per edge it picks the least compatible pair of
//! `re(Π)` labels, with both endpoints agreeing on which side comes first;
//! per node it then picks the least tuple of Π labels forming an allowed
//! configuration.

use std::cmp::Ordering;

use lcl_core::problem::Indexed;
use lcl_core::{Alphabet, Error, Label, LocalAlgorithm, Mode, Problem, Result, RunContext, View};

use crate::operators::{label_mask, members, subset_key};

/// The members of a `rere(re(Π))` label, as masks over Π's alphabet.
fn outer_masks(out: &Alphabet, l: &Label) -> Result<Vec<u64>> {
    let bad = || Error::Algorithm(format!("{l} is not a set of sets of output labels"));
    let elems = l.elements().ok_or_else(bad)?;
    let mut masks = elems
        .iter()
        .map(|e| label_mask(out, e).ok_or_else(bad))
        .collect::<Result<Vec<_>>>()?;
    masks.sort_by_key(|&m| subset_key(m));
    Ok(masks)
}

fn compatible(ix: &Indexed, a: u64, b: u64) -> bool {
    members(a).all(|x| members(b).all(|y| ix.edge_allows(x, y)))
}

fn render_masks(out: &Alphabet, ms: &[u64]) -> String {
    let parts: Vec<String> = ms
        .iter()
        .map(|&m| crate::operators::subset_label(out, m).render())
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// The agreed pair for an edge; `mine` and `theirs` are the label sets of
/// this side and the other side. Returns this side's member.
fn pick_edge(ix: &Indexed, mine: &[u64], theirs: &[u64], order: Ordering) -> Option<u64> {
    let key = |m: u64| subset_key(m);
    match order {
        Ordering::Equal => mine
            .iter()
            .copied()
            .filter(|&b| compatible(ix, b, b))
            .min_by_key(|&b| key(b)),
        _ => {
            let mut best: Option<((_, _), u64)> = None;
            for &b1 in mine {
                for &b2 in theirs {
                    if !compatible(ix, b1, b2) {
                        continue;
                    }
                    let k = if order == Ordering::Less { (key(b1), key(b2)) } else { (key(b2), key(b1)) };
                    if best.as_ref().is_none_or(|(bk, _)| k < *bk) {
                        best = Some((k, b1));
                    }
                }
            }
            best.map(|(_, b)| b)
        }
    }
}

fn pick_node(ix: &Indexed, sets: &[u64]) -> Option<Vec<u32>> {
    fn rec(ix: &Indexed, sets: &[u64], cur: &mut Vec<u32>) -> bool {
        if cur.len() == sets.len() {
            let mut s = cur.clone();
            s.sort_unstable();
            return ix.node_allows(&s);
        }
        for a in members(sets[cur.len()]) {
            cur.push(a);
            if rec(ix, sets, cur) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::new();
    rec(ix, sets, &mut cur).then_some(cur)
}

fn ranked(v: View, mode: Mode) -> View {
    let mut v = v;
    if mode == Mode::OrderInvariant {
        v.rank_tokens();
    }
    v
}

pub fn derive_slowdown(a: &LocalAlgorithm, p: &Problem) -> Result<LocalAlgorithm> {
    if a.mode == Mode::Randomized {
        return Err(Error::Algorithm("slowdown needs a deterministic algorithm".into()));
    }
    let ix = p.indexed()?;
    let out = p.sigma_out.clone();
    let a = a.clone();
    let t = a.radius + 1;
    let mode = a.mode;
    let name = format!("slowdown({})", a.name);
    Ok(LocalAlgorithm::from_rule(name, t, mode, move |v: &View, ctx: &RunContext| {
        let own_view = ranked(v.truncate(t - 1), mode);
        let own = a.evaluate(&own_view, ctx)?;
        let own_key = own_view.encode();
        let mut chosen = Vec::with_capacity(v.degree());
        for e in 1..=v.degree() {
            let (back, child) = v
                .child(e)
                .ok_or_else(|| Error::Algorithm(format!("port {e} has no neighbor in view")))?;
            let nb_view = ranked(child.truncate(t - 1), mode);
            let theirs = &a.evaluate(&nb_view, ctx)?[back - 1];
            let order = match mode {
                Mode::PortNumbering => (own_key.as_str(), e).cmp(&(nb_view.encode().as_str(), *back)),
                _ => v.token.cmp(&child.token),
            };
            let mine = outer_masks(&out, &own[e - 1])?;
            let theirs_m = outer_masks(&out, theirs)?;
            let b = pick_edge(&ix, &mine, &theirs_m, order).ok_or_else(|| {
                Error::Algorithm(format!(
                    "no compatible pair on port {e}: {} against {}",
                    render_masks(&out, &mine),
                    render_masks(&out, &theirs_m)
                ))
            })?;
            chosen.push(b);
        }
        if chosen.is_empty() {
            return Ok(Vec::new());
        }
        let tuple = pick_node(&ix, &chosen).ok_or_else(|| {
            Error::Algorithm(format!(
                "no allowed selection at a degree-{} node from {}",
                chosen.len(),
                render_masks(&out, &chosen)
            ))
        })?;
        Ok(tuple.iter().map(|&i| out.get(i as usize).clone()).collect())
    }))
}
