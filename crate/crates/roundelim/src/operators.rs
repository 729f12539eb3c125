//! The round elimination operators `re` and `rere` and iterated speedup.

use std::time::Instant;

use lcl_core::{Alphabet, Error, Label, Problem, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

/// Default cap on materialized labels plus candidate configurations.
pub const DEFAULT_GUARD: u128 = 1 << 20;

/// The guard from `LCL_GUARD` if set and parseable, else [`DEFAULT_GUARD`].
pub fn default_guard() -> u128 {
    std::env::var("LCL_GUARD")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_GUARD)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Quant {
    Exists,
    ForAll,
}

/// Subset masks over `k` labels in canonical order: by size, then by the
/// ascending list of member positions.
pub fn subset_order(k: usize) -> Vec<u64> {
    let mut masks: Vec<u64> = (0..1u64 << k).collect();
    masks.sort_by_key(|&m| subset_key(m));
    masks
}

pub fn subset_key(mask: u64) -> (u32, Vec<u32>) {
    (mask.count_ones(), members(mask).collect())
}

pub fn members(mask: u64) -> impl Iterator<Item = u32> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

/// The set label of `mask`, members in alphabet order.
pub fn subset_label(alphabet: &Alphabet, mask: u64) -> Label {
    Label::set(members(mask).map(|i| alphabet.get(i as usize).clone()).collect())
}

/// Mask of a set label's members, or `None` if it is not a set over
/// `alphabet`.
pub fn label_mask(alphabet: &Alphabet, l: &Label) -> Option<u64> {
    let mut m = 0u64;
    for e in l.elements()? {
        m |= 1 << alphabet.index_of(e)?;
    }
    Some(m)
}

/// The power-set alphabet of `alphabet` in canonical order.
pub fn power_set_alphabet(alphabet: &Alphabet) -> Alphabet {
    let labels = subset_order(alphabet.len())
        .into_iter()
        .map(|m| subset_label(alphabet, m))
        .collect();
    Alphabet::new(labels).expect("distinct subsets")
}

fn binomial(n: u128, k: u128) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Labels plus candidate node and edge configurations of the power-set
/// problem over `k` labels.
pub fn lift_cost(k: usize, delta: usize) -> BigUint {
    if k >= 127 {
        return BigUint::one() << 200u32;
    }
    let l = 1u128 << k;
    let mut total = BigUint::from(l) + binomial(l + 1, 2);
    for i in 1..=delta as u128 {
        total += binomial(l + i - 1, i);
    }
    total
}

fn check_guard(what: &str, p: &Problem, guard: u128) -> Result<()> {
    let k = p.sigma_out.len();
    let cost = lift_cost(k, p.delta);
    if k > 62 || cost > BigUint::from(guard) {
        return Err(Error::guard(what, cost, guard));
    }
    Ok(())
}

/// Non-decreasing index tuples of length `k` over `0..n`.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
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
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Whether some (`Exists`) or every (`ForAll`) selection from `sets` forms
/// an allowed node configuration.
fn node_quantified(q: Quant, sets: &[u64], allowed: &dyn Fn(&[u32]) -> bool) -> bool {
    fn rec(q: Quant, sets: &[u64], cur: &mut Vec<u32>, allowed: &dyn Fn(&[u32]) -> bool) -> bool {
        let Some((&first, rest)) = sets.split_first() else {
            let mut sorted = cur.clone();
            sorted.sort_unstable();
            return allowed(&sorted);
        };
        let mut any = false;
        let mut all = true;
        for a in members(first) {
            cur.push(a);
            let r = rec(q, rest, cur, allowed);
            cur.pop();
            any |= r;
            all &= r;
            if q == Quant::Exists && any || q == Quant::ForAll && !all {
                break;
            }
        }
        match q {
            Quant::Exists => any,
            Quant::ForAll => all,
        }
    }
    rec(q, sets, &mut Vec::with_capacity(sets.len()), allowed)
}

fn lift(p: &Problem, node_q: Quant, edge_q: Quant, what: &str, guard: u128) -> Result<Problem> {
    check_guard(what, p, guard)?;
    let ix = p.indexed()?;
    let k = p.sigma_out.len();
    let order = subset_order(k);
    let sigma_out = power_set_alphabet(&p.sigma_out);
    let mut q = Problem::empty(p.delta, p.sigma_in.clone(), sigma_out.clone());
    let label = |pos: usize| sigma_out.get(pos).clone();

    let compat: Vec<u64> = (0..k)
        .map(|a| (0..k).filter(|&b| ix.edge[a][b]).fold(0, |m, b| m | 1 << b))
        .collect();
    for i in 0..order.len() {
        for j in i..order.len() {
            let (s, t) = (order[i], order[j]);
            let ok = match edge_q {
                Quant::ForAll => members(s).all(|a| t & !compat[a as usize] == 0),
                Quant::Exists => members(s).any(|a| t & compat[a as usize] != 0),
            };
            if ok {
                q.add_edge_config(label(i), label(j));
            }
        }
    }

    let allowed = |sorted: &[u32]| ix.node_allows(sorted);
    for arity in 1..=p.delta {
        for tuple in multisets(order.len(), arity) {
            let sets: Vec<u64> = tuple.iter().map(|&i| order[i]).collect();
            if node_quantified(node_q, &sets, &allowed) {
                q.add_node_config(tuple.iter().map(|&i| label(i)).collect());
            }
        }
    }

    for (input, image) in &p.g {
        let g = label_mask(&p.sigma_out, &Label::set(image.clone())).expect("validated image");
        let img = order
            .iter()
            .enumerate()
            .filter(|(_, &m)| m & !g == 0)
            .map(|(i, _)| label(i))
            .collect();
        q.set_g(input.clone(), img);
    }
    q.normalize();
    Ok(q)
}

/// Power-set labels; a node configuration is allowed when some selection is
/// allowed in `p`, an edge when every selection is.
pub fn re(p: &Problem, guard: u128) -> Result<Problem> {
    lift(p, Quant::Exists, Quant::ForAll, "re", guard)
}

/// Power-set labels; a node configuration is allowed when every selection
/// is allowed in `p`, an edge when some selection is.
pub fn rere(p: &Problem, guard: u128) -> Result<Problem> {
    lift(p, Quant::ForAll, Quant::Exists, "rere", guard)
}

pub fn speedup_problem(p: &Problem, guard: u128) -> Result<Problem> {
    let k = p.sigma_out.len();
    if k >= 6 || lift_cost(1 << k, p.delta) > BigUint::from(guard) {
        let cost = if k >= 6 { BigUint::one() << 64u32 } else { lift_cost(1 << k, p.delta) };
        return Err(Error::guard("speedup-problem", cost, guard));
    }
    rere(&re(p, guard)?, guard)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepStats {
    pub labels: usize,
    /// Node configuration counts for degrees `1..=delta`.
    pub node_configs: Vec<usize>,
    pub edge_configs: usize,
    pub millis: u128,
}

impl StepStats {
    fn of(p: &Problem, millis: u128) -> Self {
        StepStats {
            labels: p.sigma_out.len(),
            node_configs: (1..=p.delta).map(|d| p.node_configs(d).len()).collect(),
            edge_configs: p.edge.len(),
            millis,
        }
    }
}

/// `problems[0]` is the input; `problems[j]` results from `j` speedup steps.
#[derive(Clone, Debug)]
pub struct ProblemSequence {
    pub problems: Vec<Problem>,
    pub stats: Vec<StepStats>,
    /// Set when the guard stopped the sequence early.
    pub truncated: Option<Truncation>,
}

#[derive(Clone, Debug)]
pub struct Truncation {
    pub step: usize,
    /// `log2` of the label count the step would have produced.
    pub next_labels_log2: BigUint,
    pub error: Error,
}

impl ProblemSequence {
    pub fn sizes(&self) -> Vec<usize> {
        self.stats.iter().map(|s| s.labels).collect()
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        for (i, st) in self.stats.iter().enumerate() {
            let nodes: Vec<String> = st.node_configs.iter().map(usize::to_string).collect();
            s += &format!(
                "step {i}: labels {} node_configs {} edge_configs {} millis {}\n",
                st.labels,
                nodes.join(","),
                st.edge_configs,
                st.millis
            );
        }
        match &self.truncated {
            Some(t) => {
                let next = t.next_labels_log2.to_u64().filter(|&b| b < 64).map_or_else(
                    || format!("2^{}", t.next_labels_log2),
                    |b| (1u64 << b).to_string(),
                );
                s += &format!("truncated at step {}: next labels {next}: {}\n", t.step, t.error);
            }
            None => s += "complete\n",
        }
        s
    }
}

pub fn iterate_sequence(p: &Problem, steps: usize, guard: u128) -> ProblemSequence {
    let mut seq = ProblemSequence {
        problems: vec![p.clone()],
        stats: vec![StepStats::of(p, 0)],
        truncated: None,
    };
    for step in 1..=steps {
        let cur = seq.problems.last().unwrap();
        let start = Instant::now();
        match speedup_problem(cur, guard) {
            Ok(next) => {
                seq.stats.push(StepStats::of(&next, start.elapsed().as_millis()));
                seq.problems.push(next);
            }
            Err(error) => {
                seq.truncated = Some(Truncation {
                    step,
                    next_labels_log2: BigUint::one() << cur.sigma_out.len(),
                    error,
                });
                break;
            }
        }
    }
    seq
}
