use std::collections::VecDeque;

use lcl_core::{extract, HalfEdge, Identity, Label, LocalAlgorithm, Mode, PortGraph, RunContext, View};
use lcl_sim::local::node_outputs;
use lcl_sim::{assign_ids, generate, GenSpec, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ab;

fn count_label(v: &View, l: &Label) -> usize {
    v.inputs.iter().filter(|x| *x == l).count()
        + v.children.iter().flatten().map(|(_, c)| count_label(c, l)).sum::<usize>()
}

/// Rule algorithms, materialized into tables over the views they meet.
pub fn corpus() -> Vec<LocalAlgorithm> {
    let a = Label::base("a");
    vec![
        LocalAlgorithm::from_rule("parity-a", 2, Mode::PortNumbering, move |v: &View, _| {
            let l = if count_label(v, &a) % 2 == 0 { "E" } else { "O" };
            Ok(vec![Label::base(l); v.degree()])
        }),
        LocalAlgorithm::from_rule("local-max", 1, Mode::OrderInvariant, |v: &View, _| {
            let best = v.tokens().into_iter().max();
            let l = if v.token == best { "M" } else { "N" };
            Ok(vec![Label::base(l); v.degree()])
        }),
        LocalAlgorithm::from_rule("id-parity", 1, Mode::DeterministicId, |v: &View, _| {
            Ok(v.children
                .iter()
                .map(|c| {
                    let t = c.as_ref().and_then(|(_, w)| w.token).unwrap_or(0);
                    Label::base(if (t + v.token.unwrap()) % 2 == 0 { "S" } else { "D" })
                })
                .collect())
        }),
        LocalAlgorithm::from_rule("neighbor-degrees", 2, Mode::PortNumbering, |v: &View, _| {
            Ok(v.children
                .iter()
                .map(|c| Label::base(format!("d{}", c.as_ref().map_or(0, |(_, w)| w.degree()))))
                .collect())
        }),
    ]
}

fn distances(g: &PortGraph, v: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; g.n()];
    d[v] = 0;
    let mut q = VecDeque::from([v]);
    while let Some(u) = q.pop_front() {
        for (_, o) in g.neighbors(u) {
            if d[o.node] == usize::MAX {
                d[o.node] = d[u] + 1;
                q.push_back(o.node);
            }
        }
    }
    d
}

/// Changes inputs and identifiers of, and attaches leaves to, nodes at
/// distance more than `t` from `v`.
pub fn mutate_outside(g: &PortGraph, v: usize, t: usize, delta: usize, rng: &mut ChaCha8Rng) -> PortGraph {
    let dist = distances(g, v);
    let far: Vec<usize> = (0..g.n()).filter(|&u| dist[u] > t).collect();
    let mut h = g.clone();
    for &u in &far {
        let ins = (0..h.degree(u))
            .map(|_| Label::base(if rng.gen_bool(0.5) { "a" } else { "b" }))
            .collect();
        h.set_inputs(u, ins).unwrap();
    }
    let mut leaves = Vec::new();
    for &u in &far {
        if h.degree(u) < delta && rng.gen_bool(0.5) {
            leaves.push(u);
        }
    }
    for u in leaves {
        let p = h.add_port(u, Label::base("b"));
        let w = h.add_node(vec![Label::base("a")]);
        h.connect(HalfEdge::new(u, p), HalfEdge::new(w, 1)).unwrap();
    }
    let mut ids: Vec<u64> = match &g.identity {
        Identity::Ids(t) | Identity::Ranks(t) => t.clone(),
        _ => return h,
    };
    let mut fresh: Vec<u64> = ids.iter().map(|x| x + 1_000_000).collect();
    fresh.extend((0..h.n() - g.n()).map(|i| 5_000_000 + i as u64));
    for &u in &far {
        ids[u] = fresh[u] + rng.gen_range(0..1000) * 2_000_000;
    }
    ids.extend(fresh[g.n()..].iter().copied());
    h.identity = Identity::Ids(ids);
    h
}

/// For every corpus algorithm and `trials` random trees, materializes the
/// algorithm as a table, mutates the graph beyond its radius around a
/// random node and compares that node's outputs.
pub fn check_locality(trials: u64, seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rules = corpus();
    for rule in &rules {
        for trial in 0..trials {
            let spec = GenSpec::new(rng.gen_range(8..25), 3, Topology::UniformRandomTree, trial).with_inputs(ab());
            let g = assign_ids(&generate(&spec).map_err(|e| e.to_string())?, Mode::DeterministicId, 3, trial).map_err(|e| e.to_string())?;
            let ctx = RunContext { n: g.n() };
            let views: Vec<View> = (0..g.n())
                .map(|v| extract(&g, v, rule.radius, rule.mode, None))
                .collect::<lcl_core::Result<_>>()
                .map_err(|e| e.to_string())?;
            let table = rule.materialize(&views, &ctx).map_err(|e| e.to_string())?;
            let v = rng.gen_range(0..g.n());
            let h = mutate_outside(&g, v, rule.radius, 3, &mut rng);
            let before = node_outputs(&table, &g, v, &ctx).map_err(|e| e.to_string())?;
            let after = node_outputs(&table, &h, v, &ctx).map_err(|e| e.to_string())?;
            ensure!(before == after, "{} at node {v}, trial {trial}", rule.name);
        }
    }
    Ok(format!("{} algorithms x {trials} trials", rules.len()))
}
