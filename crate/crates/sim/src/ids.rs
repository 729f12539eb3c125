//! Identifier assignment: unique ids, order ranks and random seeds.

use std::collections::HashSet;

use lcl_core::{Error, Identity, Mode, PortGraph, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_ID_EXPONENT: u32 = 3;

/// `n^k`, saturating at `u64::MAX`.
pub fn id_space(n: usize, k: u32) -> u64 {
    (n as u64).checked_pow(k).unwrap_or(u64::MAX)
}

pub fn assign_ids(g: &PortGraph, mode: Mode, k: u32, seed: u64) -> Result<PortGraph> {
    if k < 1 {
        return Err(Error::InvalidGraph("identifier exponent k must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n();
    let mut h = g.clone();
    h.identity = match mode {
        Mode::PortNumbering => Identity::None,
        Mode::DeterministicId => Identity::Ids(distinct_below(&mut rng, n, id_space(n, k))),
        Mode::OrderInvariant => {
            let mut ranks: Vec<u64> = (1..=n as u64).collect();
            ranks.shuffle(&mut rng);
            Identity::Ranks(ranks)
        }
        Mode::Randomized => Identity::Seeds((0..n).map(|_| rng.gen()).collect()),
    };
    Ok(h)
}

/// `n` distinct values below `bound`, in random order.
pub fn distinct_below(rng: &mut impl Rng, n: usize, bound: u64) -> Vec<u64> {
    assert!(bound >= n as u64, "identifier space too small");
    if bound <= 4 * n as u64 {
        let mut all: Vec<u64> = (0..bound).collect();
        all.shuffle(rng);
        all.truncate(n);
        return all;
    }
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = rng.gen_range(0..bound);
        if seen.insert(x) {
            out.push(x);
        }
    }
    out
}

/// Fresh identifiers with the same relative order as the current ones.
pub fn remap_ids_order_preserving(g: &PortGraph, seed: u64) -> Result<PortGraph> {
    let old = match &g.identity {
        Identity::Ids(t) | Identity::Ranks(t) => t,
        other => {
            return Err(Error::InvalidGraph(format!(
                "order-preserving remap needs identifiers, graph is in {} mode",
                other.mode_name()
            )))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..old.len()).collect();
    order.sort_by_key(|&v| old[v]);
    let mut fresh = vec![0u64; old.len()];
    let mut next = rng.gen_range(0..4u64);
    for &v in &order {
        fresh[v] = next;
        next += rng.gen_range(1..=64u64);
    }
    assert!(
        (0..old.len()).all(|a| (0..old.len()).all(|b| (old[a] < old[b]) == (fresh[a] < fresh[b]))),
        "remap must preserve identifier order"
    );
    let mut h = g.clone();
    h.identity = Identity::Ids(fresh);
    Ok(h)
}

/// Replaces identifiers by their ranks 1..n.
pub fn to_ranks(g: &PortGraph) -> Result<PortGraph> {
    let old = match &g.identity {
        Identity::Ids(t) | Identity::Ranks(t) => t,
        other => {
            return Err(Error::InvalidGraph(format!(
                "ranking needs identifiers, graph is in {} mode",
                other.mode_name()
            )))
        }
    };
    let mut sorted = old.clone();
    sorted.sort_unstable();
    let mut h = g.clone();
    h.identity = Identity::Ranks(
        old.iter()
            .map(|x| sorted.binary_search(x).unwrap() as u64 + 1)
            .collect(),
    );
    Ok(h)
}
