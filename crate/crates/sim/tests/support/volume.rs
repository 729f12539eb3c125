use std::collections::HashSet;

use lcl_core::{HalfEdge, Label, LocalAlgorithm, Mode, PortGraph, Result, RunContext, View};
use lcl_sim::ramsey::ramsey_params_volume;
use lcl_sim::volume::{ball_scan_bound, ball_scan_strategy, run_volume, run_volume_all, ProbeStrategy, Step, Transcript};
use lcl_sim::{assign_ids, generate, run_local, GenSpec, Topology};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ab;

/// Probes uniformly random ports of revealed records.
struct RandomWalker {
    seed: u64,
    budget: usize,
}

impl ProbeStrategy for RandomWalker {
    fn name(&self) -> String {
        "random".into()
    }
    fn budget(&self, _: &RunContext) -> usize {
        self.budget
    }
    fn step(&self, _: &RunContext, t: &Transcript) -> Result<Step> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (t.probe_count() as u64) << 32);
        if t.probe_count() == self.budget || rng.gen_bool(0.05) {
            return Ok(Step::Answer(vec![Label::base("X"); t.records[0].degree]));
        }
        let live: Vec<usize> = (0..t.records.len()).filter(|&i| t.records[i].degree > 0).collect();
        if live.is_empty() {
            return Ok(Step::Answer(Vec::new()));
        }
        let idx = live[rng.gen_range(0..live.len())];
        Ok(Step::Probe {
            idx,
            port: rng.gen_range(1..=t.records[idx].degree),
        })
    }
}

/// Replays the transcript on the graph and checks the revealed nodes induce
/// a connected subgraph.
fn revealed_connected(g: &PortGraph, t: &Transcript) -> bool {
    let mut nodes = vec![t.query.node];
    for &(idx, port) in &t.probes {
        nodes.push(g.opposite(HalfEdge::new(nodes[idx], port)).unwrap().node);
    }
    let set: HashSet<usize> = nodes.iter().copied().collect();
    let mut seen = HashSet::from([nodes[0]]);
    let mut stack = vec![nodes[0]];
    while let Some(v) = stack.pop() {
        for (_, o) in g.neighbors(v) {
            if set.contains(&o.node) && seen.insert(o.node) {
                stack.push(o.node);
            }
        }
    }
    seen == set
}

/// Random-walk probe runs, each replayed to confirm the revealed set is
/// connected.
pub fn check_connectivity(runs: u64, seed: u64) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes = 0;
    for run in 0..runs {
        let n = rng.gen_range(2..40);
        let g = generate(&GenSpec::new(n, 3, Topology::UniformRandomTree, run)).map_err(|e| e.to_string())?;
        let g = assign_ids(&g, Mode::DeterministicId, 3, run).map_err(|e| e.to_string())?;
        let v = (0..n).find(|&v| g.degree(v) > 0).unwrap();
        let q = HalfEdge::new(v, rng.gen_range(1..=g.degree(v)));
        let s = RandomWalker { seed: run, budget: 30 };
        let (_, t) = run_volume(&s, &g, q, &RunContext { n }).map_err(|e| e.to_string())?;
        probes += t.probe_count();
        ensure!(revealed_connected(&g, &t), "run {run}");
    }
    Ok(format!("{runs} runs, {probes} probes"))
}

pub fn radius_rules() -> Vec<LocalAlgorithm> {
    let sum = |v: &View| -> usize {
        fn rec(v: &View) -> usize {
            v.inputs.iter().filter(|l| l.render() == "a").count()
                + v.children.iter().flatten().map(|(_, c)| rec(c)).sum::<usize>()
        }
        rec(v)
    };
    vec![
        LocalAlgorithm::from_rule("count-a", 2, Mode::PortNumbering, move |v: &View, _| {
            Ok((1..=v.degree()).map(|p| Label::base(format!("c{}", sum(v) * 10 + p))).collect())
        }),
        LocalAlgorithm::from_rule("min-rank", 2, Mode::OrderInvariant, |v: &View, _| {
            let m = v.tokens().into_iter().min().unwrap();
            Ok(v.children
                .iter()
                .map(|c| Label::base(if c.as_ref().and_then(|(_, w)| w.token) == Some(m) { "MIN" } else { "-" }))
                .collect())
        }),
        LocalAlgorithm::from_rule("ids", 1, Mode::DeterministicId, |v: &View, _| {
            Ok(v.children
                .iter()
                .map(|c| Label::base(format!("i{}", c.as_ref().and_then(|(_, w)| w.token).unwrap())))
                .collect())
        }),
    ]
}

/// Ball-scan answers against `run_local` on `instances` random trees and
/// forests, with every probe count within the ball bound.
pub fn check_ball_scan(instances: u64, seed: u64) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rules = radius_rules();
    let mut worst = 0;
    for i in 0..instances {
        let a = &rules[i as usize % rules.len()];
        let delta = rng.gen_range(2..=3);
        let topo = if i % 5 == 0 { Topology::Forest(2) } else { Topology::UniformRandomTree };
        let g = generate(&GenSpec::new(rng.gen_range(2..30), delta, topo, i).with_inputs(ab()).shuffled()).map_err(|e| e.to_string())?;
        let g = assign_ids(&g, Mode::DeterministicId, 3, i).map_err(|e| e.to_string())?;
        let s = ball_scan_strategy(a.clone(), delta).map_err(|e| e.to_string())?;
        let ctx = RunContext { n: g.n() };
        let volume = run_volume_all(&s, &g, &ctx).map_err(|e| e.to_string())?;
        ensure!(volume == run_local(a, &g).map_err(|e| e.to_string())?, "instance {i}: {}", a.name);
        let bound = ball_scan_bound(delta, a.radius);
        for h in g.half_edges() {
            let used = run_volume(&s, &g, h, &ctx).map_err(|e| e.to_string())?.1.probe_count();
            ensure!(used <= bound, "instance {i}: {used} probes > {bound}");
            worst = worst.max(used);
        }
    }
    Ok(format!("{instances} instances, max {worst} probes"))
}

/// `Σ_{i≤t} Δ(Δ-1)^{i-1}` for a few values, then the Ramsey parameters.
pub fn check_volume_formulas() -> std::result::Result<String, String> {
    for delta in 2..=4usize {
        for t in 0..=4usize {
            let direct: usize = (1..=t).map(|i| delta * (delta - 1).pow(i as u32 - 1)).sum();
            ensure!(ball_scan_bound(delta, t) == direct, "bound at Δ={delta}, t={t}");
        }
    }
    let r = ramsey_params_volume(2, 2, 1, 1, 2);
    ensure!(r.p == BigUint::from(3u32), "p = {}", r.p);
    ensure!(r.z.value == Some(BigUint::from(2304u32)), "z = {:?}", r.z.value);
    for tau in 0..6u64 {
        ensure!(ramsey_params_volume(tau, 3, 1, 2, 2).p == BigUint::from(tau + 1), "p at tau={tau}");
    }
    Ok("p = 3, z = 2304".into())
}
