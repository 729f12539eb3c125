//! Independent oracles, and the checks built on them, shared by the
//! integration tests and the acceptance runner.
#![allow(dead_code)]

pub mod algorithms;
pub mod general;

use std::collections::{BTreeSet, HashSet};

use lcl_core::problem::Indexed;
use lcl_core::{Alphabet, Label, Problem};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// A problem's constraints with configurations as label vectors sorted by
/// the context-free label order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraints {
    pub labels: BTreeSet<String>,
    pub node: Vec<BTreeSet<Vec<String>>>,
    pub edge: BTreeSet<Vec<String>>,
    pub g: Vec<(String, BTreeSet<String>)>,
}

fn sorted(v: Vec<Label>) -> Vec<String> {
    let mut v: Vec<String> = v.iter().map(Label::render).collect();
    v.sort();
    v
}

pub fn constraints(p: &Problem) -> Constraints {
    Constraints {
        labels: p.sigma_out.labels().iter().map(Label::render).collect(),
        node: (1..=p.delta)
            .map(|d| p.node_configs(d).iter().map(|c| sorted(c.0.clone())).collect())
            .collect(),
        edge: p.edge.iter().map(|e| sorted(e.to_vec())).collect(),
        g: p.g.iter().map(|(i, img)| (i.render(), img.iter().map(Label::render).collect())).collect(),
    }
}

/// Every subset of `labels`, members kept in the given order.
fn subsets(labels: &[Label]) -> Vec<Vec<Label>> {
    match labels.split_first() {
        None => vec![vec![]],
        Some((first, rest)) => {
            let without = subsets(rest);
            let mut out = without.clone();
            for s in without {
                let mut with = vec![first.clone()];
                with.extend(s);
                out.push(with);
            }
            out
        }
    }
}

fn multisets<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, x) in items.iter().enumerate() {
        for mut rest in multisets(&items[i..], k - 1) {
            rest.insert(0, x.clone());
            out.push(rest);
        }
    }
    out
}

/// Every way of picking one member from each set.
fn selections(sets: &[Vec<Label>]) -> Vec<Vec<Label>> {
    sets.iter().fold(vec![vec![]], |acc, s| {
        acc.into_iter()
            .flat_map(|prefix| {
                s.iter().map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x.clone());
                    v
                })
            })
            .collect()
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Q {
    Exists,
    ForAll,
}

/// The power-set problem of `p` with the given node and edge quantifiers,
/// built literally from the definition.
pub fn power_oracle(p: &Problem, node_q: Q, edge_q: Q) -> Constraints {
    let base = constraints(p);
    let subs = subsets(p.sigma_out.labels());
    let as_label = |s: &Vec<Label>| Label::set(s.clone());
    let holds = |q: Q, sels: Vec<Vec<Label>>, ok: &dyn Fn(Vec<Label>) -> bool| match q {
        Q::Exists => sels.into_iter().any(ok),
        Q::ForAll => sels.into_iter().all(ok),
    };
    let mut node = Vec::new();
    for d in 1..=p.delta {
        let allowed = &base.node[d - 1];
        let mut set = BTreeSet::new();
        for m in multisets(&subs, d) {
            if holds(node_q, selections(&m), &|sel| allowed.contains(&sorted(sel))) {
                set.insert(sorted(m.iter().map(as_label).collect()));
            }
        }
        node.push(set);
    }
    let mut edge = BTreeSet::new();
    for m in multisets(&subs, 2) {
        if holds(edge_q, selections(&m), &|sel| base.edge.contains(&sorted(sel))) {
            edge.insert(sorted(m.iter().map(as_label).collect()));
        }
    }
    let g = p
        .g
        .iter()
        .map(|(i, img)| {
            let img: Vec<Label> = p.sigma_out.labels().iter().filter(|l| img.contains(l)).cloned().collect();
            (i.render(), subsets(&img).iter().map(|s| as_label(s).render()).collect())
        })
        .collect();
    Constraints {
        labels: subs.iter().map(|s| as_label(s).render()).collect(),
        node,
        edge,
        g,
    }
}

pub fn re_oracle(p: &Problem) -> Constraints {
    power_oracle(p, Q::Exists, Q::ForAll)
}

pub fn rere_oracle(p: &Problem) -> Constraints {
    power_oracle(p, Q::ForAll, Q::Exists)
}

pub fn outputs(k: usize) -> Alphabet {
    Alphabet::from_symbols(&["A", "B", "C", "D"][..k])
}

pub fn inputs(k: usize) -> Alphabet {
    Alphabet::from_symbols(&["a", "b"][..k])
}

/// Problems varying one constraint component exhaustively, the others
/// left empty: every node constraint of each arity, every edge
/// constraint, every `g`.
pub fn component_sweep(delta: usize, n_in: usize, n_out: usize) -> Vec<Problem> {
    let out = outputs(n_out);
    let labels = out.labels().to_vec();
    let empty = Problem::empty(delta, inputs(n_in), out.clone());
    let mut all = Vec::new();
    for d in 1..=delta {
        let ms = multisets(&labels, d);
        for bits in 0..1u64 << ms.len() {
            let mut p = empty.clone();
            for (i, m) in ms.iter().enumerate() {
                if bits >> i & 1 == 1 {
                    p.add_node_config(m.clone());
                }
            }
            p.normalize();
            all.push(p);
        }
    }
    let pairs = multisets(&labels, 2);
    for bits in 0..1u64 << pairs.len() {
        let mut p = empty.clone();
        for (i, m) in pairs.iter().enumerate() {
            if bits >> i & 1 == 1 {
                p.add_edge_config(m[0].clone(), m[1].clone());
            }
        }
        p.normalize();
        all.push(p);
    }
    let ins = inputs(n_in).labels().to_vec();
    for bits in 0..1u64 << (n_in * n_out) {
        let mut p = empty.clone();
        for (j, i) in ins.iter().enumerate() {
            let img = labels
                .iter()
                .enumerate()
                .filter(|(k, _)| bits >> (j * n_out + k) & 1 == 1)
                .map(|(_, l)| l.clone())
                .collect();
            p.set_g(i.clone(), img);
        }
        p.normalize();
        all.push(p);
    }
    all
}

/// A problem with every constraint drawn independently.
pub fn random_problem(rng: &mut impl rand::Rng, delta: usize, n_in: usize, n_out: usize, density: f64) -> Problem {
    let out = outputs(n_out);
    let labels = out.labels().to_vec();
    let mut p = Problem::empty(delta, inputs(n_in), out);
    for d in 1..=delta {
        for m in multisets(&labels, d) {
            if rng.gen_bool(density) {
                p.add_node_config(m);
            }
        }
    }
    for m in multisets(&labels, 2) {
        if rng.gen_bool(density) {
            p.add_edge_config(m[0].clone(), m[1].clone());
        }
    }
    for i in inputs(n_in).labels() {
        let img = labels.iter().filter(|_| rng.gen_bool(density)).cloned().collect();
        p.set_g(i.clone(), img);
    }
    p.normalize();
    p
}

// ---- zero-round oracle ----

fn tuples(n: usize, d: usize) -> Vec<Vec<u32>> {
    (0..d).fold(vec![vec![]], |acc: Vec<Vec<u32>>, _| {
        acc.into_iter()
            .flat_map(|t| {
                (0..n as u32).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect()
    })
}

/// Enumeration tables for one problem shape.
pub struct Shape {
    pub delta: usize,
    pub n_in: usize,
    pub n_out: usize,
    node_ms: Vec<Vec<Vec<u32>>>,
    pairs: Vec<Vec<u32>>,
    keys: Vec<(usize, Vec<u32>)>,
    outs: Vec<Vec<Vec<u32>>>,
}

impl Shape {
    pub fn new(delta: usize, n_in: usize, n_out: usize) -> Shape {
        let idx: Vec<u32> = (0..n_out as u32).collect();
        Shape {
            delta,
            n_in,
            n_out,
            node_ms: (1..=delta).map(|d| multisets(&idx, d)).collect(),
            pairs: multisets(&idx, 2),
            keys: (1..=delta).flat_map(|d| tuples(n_in, d).into_iter().map(move |t| (d, t))).collect(),
            outs: (0..=delta).map(|d| tuples(n_out, d)).collect(),
        }
    }

    pub fn node_widths(&self) -> Vec<usize> {
        self.node_ms.iter().map(Vec::len).collect()
    }

    pub fn edge_width(&self) -> usize {
        self.pairs.len()
    }

    /// An indexed problem from bit fields: node configurations of each
    /// arity, edges, and `g`, each in enumeration order.
    pub fn indexed(&self, node_bits: &[u64], edge_bits: u64, g_bits: u64) -> Indexed {
        let node = self
            .node_ms
            .iter()
            .zip(node_bits)
            .map(|(ms, bits)| ms.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, m)| m.clone()).collect::<HashSet<_>>())
            .collect();
        let mut edge = vec![vec![false; self.n_out]; self.n_out];
        for (i, m) in self.pairs.iter().enumerate() {
            if edge_bits >> i & 1 == 1 {
                edge[m[0] as usize][m[1] as usize] = true;
                edge[m[1] as usize][m[0] as usize] = true;
            }
        }
        let g = (0..self.n_in)
            .map(|i| (0..self.n_out).map(|o| g_bits >> (i * self.n_out + o) & 1 == 1).collect())
            .collect();
        Indexed { delta: self.delta, n_in: self.n_in, n_out: self.n_out, node, edge, g }
    }

    /// Independent check of the three zero-round conditions.
    pub fn valid(&self, ix: &Indexed, f: &std::collections::BTreeMap<(usize, Vec<u32>), Vec<u32>>) -> bool {
        let mut used = BTreeSet::new();
        for key in &self.keys {
            let Some(tau) = f.get(key) else { return false };
            if tau.len() != key.0 || !key_ok(ix, &key.1, tau) {
                return false;
            }
            used.extend(tau.iter().copied());
        }
        f.len() == self.keys.len() && used.iter().all(|&a| used.iter().all(|&b| ix.edge[a as usize][b as usize]))
    }

    /// Counts valid functions `(d, σ) ↦ τ` by backtracking over keys,
    /// stopping after `limit`.
    pub fn count(&self, ix: &Indexed, limit: usize) -> usize {
        let options: Vec<Vec<&Vec<u32>>> = self
            .keys
            .iter()
            .map(|(d, sigma)| self.outs[*d].iter().filter(|tau| key_ok(ix, sigma, tau)).collect())
            .collect();
        if options.iter().any(Vec::is_empty) {
            return 0;
        }
        fn rec(ix: &Indexed, options: &[Vec<&Vec<u32>>], k: usize, used: u64, count: &mut usize, limit: usize) {
            if *count >= limit {
                return;
            }
            if k == options.len() {
                *count += 1;
                return;
            }
            for tau in &options[k] {
                let mut now = used;
                let mut ok = true;
                for &a in tau.iter() {
                    now |= 1 << a;
                }
                for a in 0..ix.n_out {
                    for b in 0..ix.n_out {
                        if now >> a & 1 == 1 && now >> b & 1 == 1 && !ix.edge[a][b] {
                            ok = false;
                        }
                    }
                }
                if ok {
                    rec(ix, options, k + 1, now, count, limit);
                }
            }
        }
        let mut count = 0;
        rec(ix, &options, 0, 0, &mut count, limit);
        count
    }
}

impl Shape {
    /// A uniformly shuffled backtracking search: some valid function,
    /// different runs giving different ones.
    pub fn sample(&self, ix: &Indexed, rng: &mut impl rand::Rng) -> Option<std::collections::BTreeMap<(usize, Vec<u32>), Vec<u32>>> {
        use rand::seq::SliceRandom;
        let mut options: Vec<Vec<&Vec<u32>>> = self
            .keys
            .iter()
            .map(|(d, sigma)| self.outs[*d].iter().filter(|tau| key_ok(ix, sigma, tau)).collect())
            .collect();
        for o in &mut options {
            o.shuffle(rng);
        }
        fn rec<'a>(ix: &Indexed, options: &[Vec<&'a Vec<u32>>], used: u64, chosen: &mut Vec<&'a Vec<u32>>) -> bool {
            let k = chosen.len();
            if k == options.len() {
                return true;
            }
            for tau in &options[k] {
                let now = tau.iter().fold(used, |m, &a| m | 1 << a);
                let ok = (0..ix.n_out).all(|a| now >> a & 1 == 0 || (0..ix.n_out).all(|b| now >> b & 1 == 0 || ix.edge[a][b]));
                if ok {
                    chosen.push(tau);
                    if rec(ix, options, now, chosen) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        let mut chosen = Vec::new();
        rec(ix, &options, 0, &mut chosen).then(|| self.keys.iter().cloned().zip(chosen.into_iter().cloned()).collect())
    }
}

pub fn multiset_count(n: usize, k: usize) -> usize {
    let idx: Vec<u32> = (0..n as u32).collect();
    multisets(&idx, k).len()
}

fn key_ok(ix: &Indexed, sigma: &[u32], tau: &[u32]) -> bool {
    let mut s = tau.to_vec();
    s.sort_unstable();
    sigma.iter().zip(tau).all(|(&i, &o)| ix.g[i as usize][o as usize]) && ix.node[s.len() - 1].contains(&s)
}

// ---- arbitrary-precision positive reals for the budget oracle ----

const PREC: u64 = 640;

/// `m · 2^e`.
#[derive(Clone, Debug)]
pub struct BigReal {
    m: BigUint,
    e: i64,
}

impl BigReal {
    pub fn int(n: BigUint) -> Self {
        BigReal { m: n, e: 0 }.trim()
    }

    pub fn pow2(e: i64) -> Self {
        BigReal { m: BigUint::from(1u32), e }
    }

    fn trim(mut self) -> Self {
        let bits = self.m.bits();
        if bits > PREC {
            let s = bits - PREC;
            self.m >>= s;
            self.e += s as i64;
        }
        self
    }

    pub fn mul(&self, o: &BigReal) -> BigReal {
        BigReal { m: &self.m * &o.m, e: self.e + o.e }.trim()
    }

    pub fn powu(&self, k: u32) -> BigReal {
        (0..k).fold(BigReal::int(BigUint::from(1u32)), |acc, _| acc.mul(self))
    }

    /// The `k`-th root, truncated to working precision.
    pub fn root(&self, k: u32) -> BigReal {
        let k64 = k as i64;
        let mut shift = (PREC * k as u64) as i64 - self.m.bits() as i64;
        if shift < 0 {
            shift = 0;
        }
        shift += (self.e - shift).rem_euclid(k64);
        let m = &self.m << shift as u64;
        let e = self.e - shift;
        BigReal { m: m.nth_root(k), e: e / k64 }.trim()
    }

    pub fn log2(&self) -> f64 {
        assert!(!self.m.is_zero());
        let bits = self.m.bits();
        let s = bits.saturating_sub(64);
        (&self.m >> s).to_f64().unwrap().log2() + s as f64 + self.e as f64
    }
}

/// `2 · (Δ·s·Y)^{Δ/(Δ+1)} · q^{1/(Δ+1)}` evaluated directly.
pub fn budget_step(delta: u32, s: u64, y: &BigUint, q: &BigReal) -> BigReal {
    let base = BigReal::int(BigUint::from(delta) * s * y);
    BigReal::pow2(1).mul(&base.powu(delta).root(delta + 1)).mul(&q.root(delta + 1))
}

/// Runs `re` and `rere` on every problem of the component sweep for
/// `Δ ≤ 3`, `|Σin| ≤ 2`, `|Σout| ≤ 3`, plus `random` whole random
/// problems, comparing against the literal definitions. Returns the number
/// of problems checked.
pub fn check_operators(random: usize, seed: u64) -> Result<usize, String> {
    use lcl_roundelim::operators::{re, rere};
    use rand::SeedableRng;
    let guard = 1u128 << 20;
    let check = |p: &Problem| -> Result<(), String> {
        let got = constraints(&re(p, guard).map_err(|e| e.to_string())?);
        if got != re_oracle(p) {
            return Err(format!("re disagrees on\n{}", lcl_core::serialize_problem(p)));
        }
        let got = constraints(&rere(p, guard).map_err(|e| e.to_string())?);
        if got != rere_oracle(p) {
            return Err(format!("rere disagrees on\n{}", lcl_core::serialize_problem(p)));
        }
        Ok(())
    };
    let mut n = 0;
    for delta in 1..=3 {
        for n_in in 1..=2 {
            for n_out in 1..=3 {
                for p in component_sweep(delta, n_in, n_out) {
                    check(&p)?;
                    n += 1;
                }
            }
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        use rand::Rng;
        let (d, i, o, dens) = (rng.gen_range(1..=3), rng.gen_range(1..=2), rng.gen_range(1..=3), rng.gen_range(0.1..0.9));
        let p = random_problem(&mut rng, d, i, o, dens);
        check(&p)?;
        n += 1;
    }
    Ok(n)
}

/// Compares the zero-round search against backtracking over all functions
/// for every problem with `Δ ≤ 2`, `|Σin| ≤ 2`, `|Σout| ≤ 3`. Returns
/// (problems, solvable).
pub fn check_zero_round_exhaustive() -> Result<(usize, usize), String> {
    use lcl_roundelim::zero_round::find_zero_round_indexed;
    let (mut total, mut solvable) = (0, 0);
    for delta in 1..=2usize {
        for n_in in 1..=2usize {
            for n_out in 1..=3usize {
                let shape = Shape::new(delta, n_in, n_out);
                let node_widths = shape.node_widths();
                let node_total: usize = node_widths.iter().sum();
                let edge_w = shape.edge_width();
                let g_w = n_in * n_out;
                let bits = node_total + edge_w + g_w;
                for x in 0..1u64 << bits {
                    let mut rest = x;
                    let mut node_bits = Vec::new();
                    for w in &node_widths {
                        node_bits.push(rest & ((1 << w) - 1));
                        rest >>= w;
                    }
                    let edge_bits = rest & ((1 << edge_w) - 1);
                    let g_bits = rest >> edge_w;
                    let ix = shape.indexed(&node_bits, edge_bits, g_bits);
                    let expected = shape.count(&ix, 1) > 0;
                    let got = find_zero_round_indexed(&ix);
                    if got.is_some() != expected {
                        return Err(format!("existence differs (expected {expected}) on {ix:?}"));
                    }
                    if let Some(f) = got {
                        if !shape.valid(&ix, &f) {
                            return Err(format!("invalid witness {f:?} for {ix:?}"));
                        }
                        solvable += 1;
                    }
                    total += 1;
                }
            }
        }
    }
    Ok((total, solvable))
}

/// Relative error of the tool's `log2 p''` against the direct evaluation,
/// maximized over `n` random parameter tuples.
pub fn check_budget(n: usize, seed: u64) -> Result<f64, String> {
    use lcl_roundelim::budget::failure_budget;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0f64;
    for _ in 0..n {
        let delta = rng.gen_range(2..=5u32);
        let t = rng.gen_range(0..=6u32);
        let n_in = rng.gen_range(1..=4u64);
        let n_out = rng.gen_range(1..=8u64);
        let n_re = 1u64 << n_out;
        let log2_p = -(rng.gen_range(1..=400i64));
        let b = failure_budget(delta, t, n_in, n_out, n_re, log2_p as f64);
        let y = BigUint::from(n_in).pow(delta.pow(t));
        let p1 = budget_step(delta, n_out, &y, &BigReal::pow2(log2_p));
        let p2 = budget_step(delta, n_re, &y, &p1);
        let (want, got) = (p2.log2(), b.log2_p2);
        let err = (want - got).abs() / want.abs().max(1.0);
        worst = worst.max(err);
        if err > 1e-9 {
            return Err(format!("Δ={delta} T={t} |Σin|={n_in} |Σout|={n_out} log2p={log2_p}: {got} vs {want}"));
        }
    }
    Ok(worst)
}

/// `|re(Π)| = 2^k` and `|rere(re(Π))| = 2^(2^k)` over random problems with
/// `k ≤ 3` output labels, plus one full step on 2-coloring.
pub fn check_power_sizes(count: usize, seed: u64) -> Result<String, String> {
    use lcl_roundelim::operators::{iterate_sequence, re, rere};
    use rand::{Rng, SeedableRng};
    let guard = 1u128 << 20;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let k = 1 + i % 3;
        let delta = if k == 3 { 2 } else { rng.gen_range(1..=3) };
        let n_in = rng.gen_range(1..=2);
        let dens = rng.gen_range(0.2..0.8);
        let p = random_problem(&mut rng, delta, n_in, k, dens);
        let r = re(&p, guard).map_err(|e| e.to_string())?;
        if r.sigma_out.len() != 1 << k {
            return Err(format!("|re| = {} for k = {k}", r.sigma_out.len()));
        }
        let rr = rere(&r, guard).map_err(|e| e.to_string())?;
        if rr.sigma_out.len() != 1 << (1 << k) {
            return Err(format!("|rere(re)| = {} for k = {k}", rr.sigma_out.len()));
        }
    }
    let seq = iterate_sequence(&lcl_core::catalog::two_coloring(), 1, guard);
    if seq.sizes() != [2, 16] {
        return Err(format!("2-coloring sizes {:?}", seq.sizes()));
    }
    Ok(format!("{count} problems, 2-coloring -> 16"))
}

/// `tower` and `log*` against repeated shifting and bit-length iteration.
pub fn check_tower() -> Result<String, String> {
    use lcl_core::arith::{log_star, tower};
    let mut t = BigUint::from(1u32);
    for k in 0..=5u32 {
        if tower(k) != t {
            return Err(format!("tower({k})"));
        }
        // Iterate ceil(log2) on the exact value.
        let mut x = t.clone();
        let mut steps = 0;
        while x > BigUint::from(1u32) {
            x = BigUint::from((&x - 1u32).bits());
            steps += 1;
        }
        if log_star(&t) != k || steps != k {
            return Err(format!("log*(tower({k})) = {}", log_star(&t)));
        }
        t = BigUint::from(1u32) << t.to_u64().unwrap_or(0);
    }
    if tower(3) != BigUint::from(16u32) {
        return Err("tower(3) != 16".into());
    }
    Ok("tower(3) = 16, log*(tower(k)) = k for k <= 5".into())
}
