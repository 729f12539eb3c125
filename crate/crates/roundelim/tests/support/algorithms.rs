//! Soundness checks for derived algorithms, all judged by the verifier.

use lcl_core::{catalog, Label, LocalAlgorithm, Mode, PortGraph, Problem, ZeroRoundAlgorithm};
use lcl_roundelim::operators::{speedup_problem, DEFAULT_GUARD};
use lcl_roundelim::pipeline::{first_allowed_algorithm, run_pipeline, PipelineConfig};
use lcl_roundelim::slowdown::derive_slowdown;
use lcl_roundelim::speedup::derive_speedup;
use lcl_roundelim::zero_round::find_zero_round;
use lcl_sim::{assign_ids, generate, run_local, verify_nec, GenSpec, InputDist, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Shape;

pub fn ab() -> InputDist {
    InputDist::Uniform(vec![Label::base("a"), Label::base("b")])
}

/// The two reference problems at `Δ = 3` with their input distributions.
pub fn reference_problems() -> Vec<(&'static str, Problem, InputDist)> {
    vec![
        ("trivial", catalog::trivial(3), InputDist::Fixed(Label::bottom())),
        ("copy", catalog::copy(3), ab()),
    ]
}

/// Random forests (`components > 1` allowed) or trees with `n ≤ 30` and
/// `Δ ≤ 3`, ports shuffled.
pub fn random_graphs(count: u64, inputs: &InputDist, seed: u64, forests: bool) -> Vec<PortGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=30);
            let k = if forests { rng.gen_range(1..=n.min(4)) } else { 1 };
            let delta = rng.gen_range(1..=3).max(if n > 2 { 2 } else { 1 });
            generate(&GenSpec::new(n, delta, Topology::Forest(k), seed * 10_000 + i).with_inputs(inputs.clone()).shuffled())
                .unwrap()
        })
        .collect()
}

fn first_violation(g: &PortGraph, a: &LocalAlgorithm, p: &Problem) -> Result<(), String> {
    let f = run_local(a, g).map_err(|e| e.to_string())?;
    match verify_nec(g, &f, p).first() {
        Some(v) => Err(format!("{}: {v}", a.name)),
        None => Ok(()),
    }
}

/// Speeds up a 1-round algorithm for `p` and verifies the result against
/// `rere(re(p))` on `count` random forests.
pub fn check_speedup(a: &LocalAlgorithm, p: &Problem, inputs: &InputDist, count: u64, seed: u64) -> Result<(), String> {
    let q = speedup_problem(p, DEFAULT_GUARD).map_err(|e| e.to_string())?;
    let fast = derive_speedup(a, p, DEFAULT_GUARD).map_err(|e| e.to_string())?;
    if fast.radius != 0 {
        return Err(format!("radius {}", fast.radius));
    }
    for g in random_graphs(count, inputs, seed, true) {
        first_violation(&g, &fast, &q)?;
    }
    Ok(())
}

/// Zero-round algorithms for `rere(re(p))`: the searched one and `samples`
/// random ones, each confirmed valid independently.
pub fn zero_round_algorithms(p: &Problem, samples: usize, seed: u64) -> Result<Vec<ZeroRoundAlgorithm>, String> {
    let q = speedup_problem(p, DEFAULT_GUARD).map_err(|e| e.to_string())?;
    let ix = q.indexed().map_err(|e| e.to_string())?;
    let shape = Shape::new(ix.delta, ix.n_in, ix.n_out);
    let mut out = vec![find_zero_round(&q, DEFAULT_GUARD).map_err(|e| e.to_string())?.ok_or("no zero-round algorithm")?];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let f = shape.sample(&ix, &mut rng).ok_or("sampler found nothing")?;
        if !shape.valid(&ix, &f) {
            return Err("sampler produced an invalid function".into());
        }
        out.push(ZeroRoundAlgorithm {
            map: f
                .into_iter()
                .map(|((d, s), t)| {
                    (
                        (d, s.iter().map(|&i| q.sigma_in.get(i as usize).clone()).collect()),
                        t.iter().map(|&i| q.sigma_out.get(i as usize).clone()).collect(),
                    )
                })
                .collect(),
        });
    }
    for z in &out {
        z.check(&q)?;
    }
    Ok(out)
}

/// Slows every zero-round algorithm down in both modes, checking the mode
/// flag and verifying on `trees` random trees. Returns the number of runs.
pub fn check_slowdown(p: &Problem, inputs: &InputDist, algorithms: &[ZeroRoundAlgorithm], trees: u64, seed: u64) -> Result<usize, String> {
    let graphs = random_graphs(trees, inputs, seed, false);
    let mut runs = 0;
    for mode in [Mode::OrderInvariant, Mode::PortNumbering] {
        let graphs: Vec<PortGraph> = graphs
            .iter()
            .enumerate()
            .map(|(i, g)| assign_ids(g, mode, 3, seed + i as u64).unwrap())
            .collect();
        for z in algorithms {
            let slow = derive_slowdown(&z.to_local(mode), p).map_err(|e| e.to_string())?;
            if slow.mode != mode || slow.radius != 1 {
                return Err(format!("slowdown changed mode or radius: {:?} {}", slow.mode, slow.radius));
            }
            for g in &graphs {
                first_violation(g, &slow, p)?;
                runs += 1;
            }
        }
    }
    Ok(runs)
}

/// The whole pipeline on the copy problem at its default configuration.
pub fn check_pipeline(cfg: &PipelineConfig) -> Result<String, String> {
    let p = catalog::copy(3);
    let out = run_pipeline(&p, &first_allowed_algorithm(&p), cfg).map_err(|e| e.to_string())?;
    let r = &out.report;
    if out.algorithm.mode != Mode::OrderInvariant {
        return Err(format!("mode {:?}", out.algorithm.mode));
    }
    if r.violations != 0 || r.remap_mismatches != 0 || r.instances != cfg.trials || r.derived_zero_round_valid != Some(true) {
        return Err(r.to_text());
    }
    Ok(format!(
        "radius {}, n0 {}, {} trees, {} nodes, {} remaps, 0 violations",
        r.radius, r.n0, r.instances, r.nodes, r.remap_trials
    ))
}
