//! The end-to-end chain: speed a one-round algorithm up to zero rounds,
//! find a canonical zero-round algorithm, slow it back down
//! order-invariantly, lock it at `n0`, then simulate and verify.

use std::time::Instant;

use lcl_core::{Error, Label, LocalAlgorithm, Mode, Problem, Result, RunContext, View, ZeroRoundAlgorithm};
use lcl_sim::{assign_ids, generate, remap_ids_order_preserving, run_local, verify_nec, GenSpec, InputDist, Topology};

use crate::lock::{lock_order_invariant, min_n0};
use crate::operators::speedup_problem;
use crate::slowdown::derive_slowdown;
use crate::speedup::derive_speedup;
use crate::zero_round::find_zero_round;

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub ns: Vec<usize>,
    /// Trees in total, split evenly over `ns`.
    pub trials: usize,
    pub remaps: usize,
    pub seed: u64,
    pub n0: Option<usize>,
    pub guard: u128,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            ns: vec![10, 100, 1000],
            trials: 1000,
            remaps: 100,
            seed: 0,
            n0: None,
            guard: crate::operators::DEFAULT_GUARD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineReport {
    pub labels: usize,
    pub speedup_labels: usize,
    /// Whether the derived speedup, read as a zero-round map, passes the
    /// zero-round checks for the sped-up problem.
    pub derived_zero_round_valid: Option<bool>,
    pub zero_round: String,
    pub radius: usize,
    pub n0: usize,
    pub instances: usize,
    pub nodes: usize,
    pub violations: usize,
    pub remap_trials: usize,
    pub remap_mismatches: usize,
}

impl PipelineReport {
    pub fn to_text(&self) -> String {
        let derived = self.derived_zero_round_valid.map_or("n/a".to_string(), |b| b.to_string());
        format!(
            "labels: {}\nspeedup_labels: {}\nderived_zero_round_valid: {derived}\nzero_round: {}\nradius: {}\nmode: order-invariant\nn0: {}\ninstances: {}\nnodes: {}\nviolations: {}\nremap_trials: {}\nremap_mismatches: {}\n",
            self.labels,
            self.speedup_labels,
            self.zero_round,
            self.radius,
            self.n0,
            self.instances,
            self.nodes,
            self.violations,
            self.remap_trials,
            self.remap_mismatches
        )
    }
}

/// Reads a radius-0 port-numbering algorithm as a zero-round map.
pub fn as_zero_round(a: &LocalAlgorithm, p: &Problem) -> Result<ZeroRoundAlgorithm> {
    if a.radius != 0 {
        return Err(Error::Algorithm(format!("{} has radius {}", a.name, a.radius)));
    }
    let ctx = RunContext { n: 1 };
    let mut z = ZeroRoundAlgorithm::default();
    for d in 1..=p.delta {
        for sigma in lcl_core::algorithm::all_tuples(p.sigma_in.labels(), d) {
            let out = a.evaluate(&View::record(sigma.clone(), None), &ctx)?;
            z.map.insert((d, sigma), out);
        }
    }
    Ok(z)
}

pub struct PipelineOutput {
    pub report: PipelineReport,
    pub algorithm: LocalAlgorithm,
    pub zero_round: ZeroRoundAlgorithm,
    pub millis: u128,
}

pub fn run_pipeline(p: &Problem, a: &LocalAlgorithm, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let start = Instant::now();
    let q = speedup_problem(p, cfg.guard)?;
    let fast = derive_speedup(a, p, cfg.guard)?;
    let derived_zero_round_valid = if fast.radius == 0 && fast.mode == Mode::PortNumbering {
        Some(as_zero_round(&fast, p)?.check(&q).is_ok())
    } else {
        None
    };
    let z = find_zero_round(&q, cfg.guard)?
        .ok_or_else(|| Error::Algorithm("the sped-up problem has no zero-round algorithm".into()))?;
    let slow = derive_slowdown(&z.to_local(Mode::OrderInvariant), p)?;
    let n0 = cfg.n0.unwrap_or_else(|| min_n0(p.delta, slow.radius, 1));
    let locked = lock_order_invariant(&slow, n0, p.delta, 1)?;

    let inputs = match p.sigma_in.labels() {
        [one] => InputDist::Fixed(one.clone()),
        many => InputDist::Uniform(many.to_vec()),
    };
    let mut report = PipelineReport {
        labels: p.sigma_out.len(),
        speedup_labels: q.sigma_out.len(),
        derived_zero_round_valid,
        zero_round: "found".into(),
        radius: locked.radius,
        n0,
        instances: 0,
        nodes: 0,
        violations: 0,
        remap_trials: 0,
        remap_mismatches: 0,
    };
    let per = cfg.trials / cfg.ns.len().max(1);
    let extra = cfg.trials % cfg.ns.len().max(1);
    let mut seed = cfg.seed.wrapping_mul(1_000_003);
    let mut sample = Vec::new();
    for (i, &n) in cfg.ns.iter().enumerate() {
        for _ in 0..per + usize::from(i < extra) {
            seed += 1;
            let spec = GenSpec::new(n, p.delta, Topology::UniformRandomTree, seed)
                .with_inputs(inputs.clone())
                .shuffled();
            let g = assign_ids(&generate(&spec)?, Mode::DeterministicId, 3, seed)?;
            let f = run_local(&locked, &g)?;
            report.violations += verify_nec(&g, &f, p).len();
            report.instances += 1;
            report.nodes += n;
            if sample.len() < cfg.remaps {
                sample.push((g, f));
            }
        }
    }
    for (i, (g, f)) in sample.iter().enumerate() {
        let h = remap_ids_order_preserving(g, cfg.seed ^ i as u64)?;
        report.remap_trials += 1;
        if run_local(&locked, &h)? != *f {
            report.remap_mismatches += 1;
        }
    }
    Ok(PipelineOutput {
        report,
        algorithm: locked,
        zero_round: z,
        millis: start.elapsed().as_millis(),
    })
}

/// The one-round algorithm in which each half-edge outputs the first label
/// its input allows. For the copy problem this copies the input.
pub fn first_allowed_algorithm(p: &Problem) -> LocalAlgorithm {
    let g = p.g.clone();
    LocalAlgorithm::from_rule("first-allowed", 1, Mode::PortNumbering, move |v: &View, _| {
        v.inputs
            .iter()
            .map(|i| {
                g.iter()
                    .find(|(l, _)| l == i)
                    .and_then(|(_, img)| img.first().cloned())
                    .ok_or_else(|| Error::Algorithm(format!("input {i} allows no output")))
            })
            .collect()
    })
}

/// The one-round algorithm that outputs `l` everywhere.
pub fn constant_algorithm(l: Label) -> LocalAlgorithm {
    LocalAlgorithm::from_rule(format!("const-{l}"), 1, Mode::PortNumbering, move |v: &View, _| {
        Ok(vec![l.clone(); v.degree()])
    })
}
