//! One round faster: from a `t`-round algorithm for Π to a `(t-1)`-round
//! algorithm for `rere(re(Π))`.
//!
//! For a node `u` with view `B(u, t-1)` and port `e`, the derived output is
//! the set, over every one-hop extension beyond the frontier on `e`'s side,
//! of the set of outputs `a` produces on `(u, e)` over every one-hop
//! extension on the remaining sides. Extensions attach a node of every
//! degree, back port and input tuple (and, in order-invariant mode, every
//! placement in the identifier order) to each open port at distance `t-1`.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use lcl_core::{extract, Error, HalfEdge, Identity, Label, LocalAlgorithm, Mode, PortGraph, Problem, Result, RunContext, View};

use crate::operators::{subset_key, subset_label};

/// A node that may be attached: degree, back port, inputs.
#[derive(Clone, Debug)]
struct Record {
    back: usize,
    inputs: Vec<Label>,
}

fn records(delta: usize, sigma_in: &[Label]) -> Vec<Record> {
    let mut out = Vec::new();
    for d in 1..=delta {
        for inputs in lcl_core::algorithm::all_tuples(sigma_in, d) {
            for back in 1..=d {
                out.push(Record {
                    back,
                    inputs: inputs.clone(),
                });
            }
        }
    }
    out
}

/// Open ports at depth `frontier`, each with the root port its path leaves
/// through (the port itself at the root).
fn open_slots(g: &PortGraph, depth: &[usize], frontier: usize) -> Vec<(HalfEdge, usize)> {
    let mut branch = vec![0usize; g.n()];
    let mut seen = vec![false; g.n()];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for (port, o) in g.neighbors(x) {
            if !seen[o.node] {
                seen[o.node] = true;
                branch[o.node] = if x == 0 { port } else { branch[x] };
                stack.push(o.node);
            }
        }
    }
    let mut out = Vec::new();
    for x in 0..g.n() {
        if depth[x] != frontier {
            continue;
        }
        for p in 1..=g.degree(x) {
            if g.opposite(HalfEdge::new(x, p)).is_none() {
                out.push((HalfEdge::new(x, p), if x == 0 { p } else { branch[x] }));
            }
        }
    }
    out
}

/// Every way of inserting `k` new elements into an existing order of `m`.
/// Each result lists the final position of the existing elements (in their
/// order) followed by those of the new ones.
fn interleavings(m: usize, k: usize) -> Vec<Vec<u64>> {
    fn rec(list: &mut Vec<usize>, next: usize, total: usize, out: &mut Vec<Vec<u64>>) {
        if next == total {
            let mut pos = vec![0u64; total];
            for (i, &e) in list.iter().enumerate() {
                pos[e] = i as u64 + 1;
            }
            out.push(pos);
            return;
        }
        for at in 0..=list.len() {
            list.insert(at, next);
            rec(list, next + 1, total, out);
            list.remove(at);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..m).collect(), m, m + k, &mut out);
    out
}

struct Extender {
    records: Vec<Record>,
    mode: Mode,
}

impl Extender {
    /// Calls `f` on every extension of `g` at `slots`.
    fn for_each(&self, g: &PortGraph, slots: &[HalfEdge], f: &mut dyn FnMut(&PortGraph) -> Result<()>) -> Result<()> {
        let mut choice = vec![0usize; slots.len()];
        loop {
            let mut h = g.clone();
            for (slot, &c) in slots.iter().zip(&choice) {
                let r = &self.records[c];
                let w = h.add_node(r.inputs.clone());
                h.connect(*slot, HalfEdge::new(w, r.back))?;
            }
            if self.mode == Mode::OrderInvariant {
                let old = match &g.identity {
                    Identity::Ids(t) => t.clone(),
                    _ => return Err(Error::Algorithm("order-invariant view without identifiers".into())),
                };
                let mut order: Vec<usize> = (0..old.len()).collect();
                order.sort_by_key(|&v| old[v]);
                for pos in interleavings(old.len(), slots.len()) {
                    let mut ids = vec![0u64; h.n()];
                    for (i, &v) in order.iter().enumerate() {
                        ids[v] = pos[i];
                    }
                    for j in 0..slots.len() {
                        ids[old.len() + j] = pos[old.len() + j];
                    }
                    h.identity = Identity::Ids(ids);
                    f(&h)?;
                }
            } else {
                f(&h)?;
            }
            // Next choice vector, odometer style.
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Ok(());
                }
                choice[i] += 1;
                if choice[i] < self.records.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    fn count(&self, existing: usize, slots: usize) -> f64 {
        let mut c = (self.records.len() as f64).powi(slots as i32);
        if self.mode == Mode::OrderInvariant {
            c *= ((existing + 1)..=(existing + slots)).map(|x| x as f64).product::<f64>();
        }
        c
    }
}

/// Derives the `(t-1)`-round algorithm for `rere(re(p))` from `a`.
pub fn derive_speedup(a: &LocalAlgorithm, p: &Problem, guard: u128) -> Result<LocalAlgorithm> {
    if a.radius == 0 {
        return Err(Error::Algorithm("speedup needs an algorithm with at least one round".into()));
    }
    if !matches!(a.mode, Mode::PortNumbering | Mode::OrderInvariant) {
        return Err(Error::Algorithm(format!(
            "speedup needs a port-numbering or order-invariant algorithm, got {}",
            a.mode
        )));
    }
    let t = a.radius;
    let sigma_out = p.sigma_out.clone();
    let ext = Extender {
        records: records(p.delta, p.sigma_in.labels()),
        mode: a.mode,
    };
    let a = a.clone();
    let memo: Arc<Mutex<HashMap<String, Vec<Label>>>> = Arc::default();
    let name = format!("speedup({})", a.name);
    let mode = a.mode;
    Ok(LocalAlgorithm::from_rule(name, t - 1, mode, move |v: &View, ctx: &RunContext| {
        let key = v.encode();
        if let Some(out) = memo.lock().unwrap().get(&key) {
            return Ok(out.clone());
        }
        let (frag, depth) = v.to_fragment();
        let slots = open_slots(&frag, &depth, t - 1);
        let total = ext.count(frag.n(), slots.len()) * v.degree() as f64;
        if total > guard as f64 {
            return Err(Error::guard("speedup extensions", total, guard));
        }
        let mut out = Vec::with_capacity(v.degree());
        for e in 1..=v.degree() {
            let near: Vec<HalfEdge> = slots.iter().filter(|s| s.1 == e).map(|s| s.0).collect();
            let far: Vec<HalfEdge> = slots.iter().filter(|s| s.1 != e).map(|s| s.0).collect();
            let mut outer: BTreeSet<(u32, Vec<u32>)> = BTreeSet::new();
            ext.for_each(&frag, &near, &mut |g2| {
                let mut inner = 0u64;
                ext.for_each(g2, &far, &mut |g3| {
                    let view = extract(g3, 0, t, mode, None)?;
                    let l = &a.evaluate(&view, ctx)?[e - 1];
                    let i = sigma_out
                        .index_of(l)
                        .ok_or_else(|| Error::Algorithm(format!("{} output {l} is not in the problem's alphabet", a.name)))?;
                    inner |= 1 << i;
                    Ok(())
                })?;
                outer.insert(subset_key(inner));
                Ok(())
            })?;
            let elems = outer
                .into_iter()
                .map(|(_, members)| subset_label(&sigma_out, members.iter().fold(0u64, |m, &i| m | 1 << i)))
                .collect();
            out.push(Label::set(elems));
        }
        memo.lock().unwrap().insert(key, out.clone());
        Ok(out)
    }))
}
