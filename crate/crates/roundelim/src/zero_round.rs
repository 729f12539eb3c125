//! Deciding whether a problem has a zero-round solution.
//!
//! A zero-round algorithm maps `(degree, input tuple)` to an output tuple.
//! Any two used labels may meet across an edge, so the set `L` of used
//! labels must be pairwise edge-compatible, self-pairs included. Enlarging
//! `L` only adds options, so it suffices to try the maximal such sets.

use std::collections::BTreeMap;

use lcl_core::problem::Indexed;
use lcl_core::{Error, Problem, Result, ZeroRoundAlgorithm};
use num_bigint::BigUint;

/// `(degree, input indices) -> output indices`.
pub type IndexedAssignment = BTreeMap<(usize, Vec<u32>), Vec<u32>>;

/// All index tuples of length `d` over `0..n`, lexicographic.
pub fn index_tuples(n: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n as u32).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// Maximal cliques of the compatibility graph on self-compatible labels,
/// in discovery order of a pivoting Bron–Kerbosch search.
fn maximal_cliques(ix: &Indexed) -> Vec<u64> {
    let n = ix.n_out;
    let adj: Vec<u64> = (0..n)
        .map(|a| (0..n).filter(|&b| b != a && ix.edge[a][b]).fold(0u64, |m, b| m | 1 << b))
        .collect();
    let vertices = (0..n).filter(|&a| ix.edge[a][a]).fold(0u64, |m, a| m | 1 << a);
    fn bk(r: u64, mut p: u64, mut x: u64, adj: &[u64], out: &mut Vec<u64>) {
        if p == 0 && x == 0 {
            out.push(r);
            return;
        }
        let pivot = (p | x).trailing_zeros() as usize;
        let mut cand = p & !adj[pivot];
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            bk(r | 1 << v, p & adj[v], x & adj[v], adj, out);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }
    let adj: Vec<u64> = adj.iter().map(|m| m & vertices).collect();
    let mut out = Vec::new();
    if vertices != 0 {
        bk(0, vertices, 0, &adj, &mut out);
    }
    out
}

/// Lexicographically least output tuple over `allowed`, respecting `g` and
/// the node constraint.
fn best_tuple(ix: &Indexed, sigma: &[u32], allowed: u64) -> Option<Vec<u32>> {
    fn rec(ix: &Indexed, sigma: &[u32], allowed: u64, cur: &mut Vec<u32>) -> bool {
        let j = cur.len();
        if j == sigma.len() {
            let mut s = cur.clone();
            s.sort_unstable();
            return ix.node_allows(&s);
        }
        for a in 0..ix.n_out as u32 {
            if allowed >> a & 1 == 1 && ix.g[sigma[j] as usize][a as usize] {
                cur.push(a);
                if rec(ix, sigma, allowed, cur) {
                    return true;
                }
                cur.pop();
            }
        }
        false
    }
    let mut cur = Vec::with_capacity(sigma.len());
    rec(ix, sigma, allowed, &mut cur).then_some(cur)
}

pub fn find_zero_round_indexed(ix: &Indexed) -> Option<IndexedAssignment> {
    assert!(ix.n_out <= 64, "at most 64 output labels");
    let keys: Vec<(usize, Vec<u32>)> = (1..=ix.delta)
        .flat_map(|d| index_tuples(ix.n_in, d).into_iter().map(move |s| (d, s)))
        .collect();
    'cliques: for clique in maximal_cliques(ix) {
        let mut map = IndexedAssignment::new();
        for (d, sigma) in &keys {
            match best_tuple(ix, sigma, clique) {
                Some(tau) => {
                    map.insert((*d, sigma.clone()), tau);
                }
                None => continue 'cliques,
            }
        }
        return Some(map);
    }
    None
}

/// `|Σin|^Δ · |Σout|^Δ`.
pub fn search_space(p: &Problem) -> BigUint {
    BigUint::from(p.sigma_in.len()).pow(p.delta as u32) * BigUint::from(p.sigma_out.len()).pow(p.delta as u32)
}

pub fn find_zero_round(p: &Problem, guard: u128) -> Result<Option<ZeroRoundAlgorithm>> {
    let space = search_space(p);
    if space > BigUint::from(guard) || p.sigma_out.len() > 64 {
        return Err(Error::guard("zero-round search", space, guard));
    }
    let ix = p.indexed()?;
    Ok(find_zero_round_indexed(&ix).map(|m| ZeroRoundAlgorithm {
        map: m
            .into_iter()
            .map(|((d, s), t)| {
                (
                    (d, s.iter().map(|&i| p.sigma_in.get(i as usize).clone()).collect()),
                    t.iter().map(|&i| p.sigma_out.get(i as usize).clone()).collect(),
                )
            })
            .collect(),
    }))
}
