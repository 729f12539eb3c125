//! One adapter per subcommand: read inputs, call the library, serialize.

use std::fs;
use std::path::{Path, PathBuf};

use lcl_core::format::parse_problem_with_warnings;
use lcl_core::general::enumerate_views;
use lcl_core::problem::Severity;
use lcl_core::{
    catalog, extract, serialize_problem, Alphabet, GeneralLcl, HalfEdgeLabeling, Label, LocalAlgorithm, Mode,
    PortGraph, Problem, RunContext, View, ZeroRoundAlgorithm,
};
use lcl_roundelim::budget::failure_budget;
use lcl_roundelim::compiler::{compile_general, lift_solution, project_solution};
use lcl_roundelim::lock::{lock_order_invariant, min_n0};
use lcl_roundelim::operators::{iterate_sequence, re, rere, speedup_problem};
use lcl_roundelim::pipeline::{as_zero_round, first_allowed_algorithm, run_pipeline, PipelineConfig};
use lcl_roundelim::slowdown::derive_slowdown;
use lcl_roundelim::speedup::derive_speedup;
use lcl_roundelim::zero_round::find_zero_round;
use lcl_sim::grid::{
    assign_prod_ids, combine_ids, gen_grid, orientation_lock, prod_from_local, read_grid, read_prod_ids,
    run_prod_local, write_grid, write_prod_ids, OrientedGrid,
};
use lcl_sim::io::{parse_half_edge, read_graph, read_labeling, write_graph, write_labeling};
use lcl_sim::ramsey::{ramsey_params_grid, ramsey_params_volume};
use lcl_sim::volume::{ball_scan_strategy, lock_order_invariant_volume, run_volume, ProbeStrategy};
use lcl_sim::{
    assign_ids, generate, remap_ids_order_preserving, run_local_with, verify_general, verify_nec, GenSpec,
    InputDist, Violation,
};
use sha2::{Digest, Sha256};

use crate::{Command, Failure, GridCommand, VolumeCommand};

type Res<T> = std::result::Result<T, Failure>;

pub struct Output {
    pub body: String,
    pub outcome: String,
    pub counters: Vec<(&'static str, String)>,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, outcome: "ok".into(), counters: Vec::new() }
    }

    fn outcome(mut self, o: impl Into<String>) -> Self {
        self.outcome = o.into();
        self
    }

    fn count(mut self, key: &'static str, v: impl ToString) -> Self {
        self.counters.push((key, v.to_string()));
        self
    }
}

pub struct Ctx {
    pub seed: u64,
    pub guard: u128,
    hasher: Sha256,
}

impl Ctx {
    pub fn new(seed: u64, guard: u128) -> Self {
        Ctx { seed, guard, hasher: Sha256::new() }
    }

    /// SHA-256 over the contents of every file read, in order.
    pub fn digest(&self) -> String {
        self.hasher.clone().finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn read(&mut self, path: &Path) -> Res<String> {
        let text =
            fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        self.hasher.update((text.len() as u64).to_le_bytes());
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn problem(&mut self, path: &Path) -> Res<Problem> {
        let parsed = parse_problem_with_warnings(&self.read(path)?)?;
        for w in &parsed.warnings {
            eprintln!("warning: {}: {w}", path.display());
        }
        Ok(parsed.problem)
    }

    fn general(&mut self, path: &Path) -> Res<GeneralLcl> {
        Ok(GeneralLcl::parse(&self.read(path)?)?)
    }

    fn graph(&mut self, path: &Path) -> Res<PortGraph> {
        Ok(read_graph(&self.read(path)?)?)
    }

    fn grid(&mut self, path: &Path) -> Res<OrientedGrid> {
        Ok(read_grid(&self.read(path)?)?)
    }

    fn labeling(&mut self, g: &PortGraph, path: &Path) -> Res<HalfEdgeLabeling> {
        Ok(read_labeling(g, &self.read(path)?)?)
    }

    /// A table file, or a zero-round (`zr`) file read in `mode`.
    fn algorithm(&mut self, path: &Path, mode: Mode) -> Res<LocalAlgorithm> {
        let text = self.read(path)?;
        let first = text.lines().map(lcl_core::format::strip_comment).find(|l| !l.is_empty());
        if first.is_some_and(|l| l.starts_with("zr ")) {
            return Ok(ZeroRoundAlgorithm::from_text(&text)?.to_local(mode));
        }
        let name = path.file_stem().map_or("algorithm".into(), |s| s.to_string_lossy().into_owned());
        Ok(LocalAlgorithm::from_text(name, &text)?)
    }

    fn graphs(&mut self, paths: &[PathBuf]) -> Res<Vec<PortGraph>> {
        paths.iter().map(|p| self.graph(p)).collect()
    }
}

fn input_dist(inputs: &[String]) -> Res<InputDist> {
    let labels = inputs.iter().map(|s| Label::parse(s)).collect::<lcl_core::Result<Vec<_>>>()?;
    Ok(match labels.len() {
        0 => InputDist::Fixed(Label::bottom()),
        1 => InputDist::Fixed(labels[0].clone()),
        _ => InputDist::Uniform(labels),
    })
}

/// Every view of `a`'s radius on `graphs`, or on all Δ-bounded trees with
/// inputs from `sigma_in` when no graphs are given.
fn views(a: &LocalAlgorithm, delta: usize, sigma_in: &Alphabet, graphs: &[PortGraph], guard: u128) -> Res<Vec<View>> {
    if graphs.is_empty() {
        return Ok(enumerate_views(delta, sigma_in, a.radius, a.mode, guard)?);
    }
    let mut out = Vec::new();
    for g in graphs {
        for v in 0..g.n() {
            out.push(extract(g, v, a.radius, a.mode, None)?);
        }
    }
    Ok(out)
}

fn tabulate(a: &LocalAlgorithm, views: &[View], n: usize) -> Res<String> {
    Ok(a.materialize(views, &RunContext { n })?.to_text()?)
}

fn table_entries(text: &str) -> usize {
    text.lines().filter(|l| l.starts_with("ball ")).count()
}

/// The views a table algorithm is defined on.
fn table_views(a: &LocalAlgorithm) -> Res<Vec<View>> {
    a.to_text()?
        .lines()
        .filter_map(|l| l.strip_prefix("ball "))
        .map(|l| Ok(View::parse(l.split(" -> ").next().unwrap_or(l))?))
        .collect()
}

fn violations_output(vs: &[Violation], strict: bool) -> Res<Output> {
    let mut body: String = vs.iter().map(|v| format!("{v}\n")).collect();
    body += &format!("violations: {}\n", vs.len());
    let out = Output::ok(body)
        .outcome(if vs.is_empty() { "valid" } else { "invalid" })
        .count("violations", vs.len());
    if strict && !vs.is_empty() {
        return Err(Failure::Partial(out, 1));
    }
    Ok(out)
}

fn problem_output(p: &Problem) -> Output {
    Output::ok(serialize_problem(p)).count("labels", p.sigma_out.len())
}

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Parse { .. } => "parse",
        Command::Validate { .. } => "validate",
        Command::Catalog { .. } => "catalog",
        Command::Compile { .. } => "compile",
        Command::Lift { .. } => "lift",
        Command::Project { .. } => "project",
        Command::Re { .. } => "re",
        Command::Rere { .. } => "rere",
        Command::SpeedupProblem { .. } => "speedup-problem",
        Command::Iterate { .. } => "iterate",
        Command::Budget { .. } => "budget",
        Command::DeriveSpeedup { .. } => "derive-speedup",
        Command::DeriveSlowdown { .. } => "derive-slowdown",
        Command::ZeroRound { .. } => "zero-round",
        Command::Lock { .. } => "lock",
        Command::Gen { .. } => "gen",
        Command::Ids { .. } => "ids",
        Command::Run { .. } => "run",
        Command::Verify { .. } => "verify",
        Command::Remap { .. } => "remap",
        Command::Volume(VolumeCommand::Run { .. }) => "volume run",
        Command::Volume(VolumeCommand::Params { .. }) => "volume params",
        Command::Grid(GridCommand::Gen { .. }) => "grid gen",
        Command::Grid(GridCommand::Ids { .. }) => "grid ids",
        Command::Grid(GridCommand::Combine { .. }) => "grid combine",
        Command::Grid(GridCommand::Run { .. }) => "grid run",
        Command::Grid(GridCommand::Params { .. }) => "grid params",
        Command::Pipeline { .. } => "pipeline",
    }
}

pub fn dispatch(c: &Command, ctx: &mut Ctx) -> Res<Output> {
    let guard = ctx.guard;
    match c {
        Command::Parse { problem } => Ok(problem_output(&ctx.problem(problem)?)),
        Command::Validate { problem } => {
            let p = ctx.problem(problem)?;
            let diags = p.validate();
            let errors = diags.iter().filter(|d| d.severity == Severity::Error).count();
            let body: String = diags.iter().map(|d| format!("{d}\n")).collect();
            let out = Output::ok(body)
                .outcome(if errors == 0 { "valid" } else { "invalid" })
                .count("errors", errors)
                .count("warnings", diags.len() - errors);
            if errors > 0 {
                return Err(Failure::Partial(out, 1));
            }
            Ok(out)
        }
        Command::Catalog { name, delta } => {
            let p = match name.as_str() {
                "trivial" => catalog::trivial(*delta),
                "two-coloring" | "twocol" => catalog::two_coloring(),
                "copy" => catalog::copy(*delta),
                _ => return Err(Failure::Usage(format!("unknown catalog problem {name:?}"))),
            };
            Ok(problem_output(&p))
        }
        Command::Compile { general } => Ok(problem_output(&compile_general(&ctx.general(general)?, guard)?)),
        Command::Lift { general, graph, labeling } => {
            let l = ctx.general(general)?;
            let g = ctx.graph(graph)?;
            let f = ctx.labeling(&g, labeling)?;
            let compiled = compile_general(&l, guard)?;
            Ok(Output::ok(write_labeling(&g, &lift_solution(&l, &compiled, &g, &f)?)))
        }
        Command::Project { general, graph, labeling } => {
            let l = ctx.general(general)?;
            let g = ctx.graph(graph)?;
            let f = ctx.labeling(&g, labeling)?;
            let compiled = compile_general(&l, guard)?;
            Ok(Output::ok(write_labeling(&g, &project_solution(&compiled, &g, &f)?)))
        }
        Command::Re { problem } => Ok(problem_output(&re(&ctx.problem(problem)?, guard)?)),
        Command::Rere { problem } => Ok(problem_output(&rere(&ctx.problem(problem)?, guard)?)),
        Command::SpeedupProblem { problem } => {
            Ok(problem_output(&speedup_problem(&ctx.problem(problem)?, guard)?))
        }
        Command::Iterate { problem, steps } => {
            let seq = iterate_sequence(&ctx.problem(problem)?, *steps, guard);
            let sizes: Vec<String> = seq.sizes().iter().map(usize::to_string).collect();
            let out = Output::ok(seq.report()).count("sizes", sizes.join(","));
            match &seq.truncated {
                None => Ok(out.outcome("complete")),
                Some(t) => {
                    let code = if t.error.is_guard() { 3 } else { 1 };
                    Err(Failure::Partial(out.outcome(format!("truncated at step {}", t.step)), code))
                }
            }
        }
        Command::Budget { delta, horizon, sin, sout, sre, log2p, n } => {
            if *delta < 2 || *sin < 1 || *sout < 1 || *log2p > 0.0 {
                return Err(Failure::Usage("need delta >= 2, sin >= 1, sout >= 1 and log2p <= 0".into()));
            }
            let sre = match sre {
                Some(s) => *s,
                None => 1u64.checked_shl(*sout as u32).filter(|_| *sout < 64).ok_or_else(|| {
                    Failure::Usage("sout too large for the default sre; pass --sre".into())
                })?,
            };
            let b = failure_budget(*delta, *horizon, *sin, *sout, sre, *log2p);
            Ok(Output::ok(b.report(*n)).count("log2_p2", format!("{:.9}", b.log2_p2)))
        }
        Command::DeriveSpeedup { algorithm, problem, on } => {
            let a = ctx.algorithm(algorithm, Mode::PortNumbering)?;
            let p = ctx.problem(problem)?;
            let graphs = ctx.graphs(on)?;
            let fast = derive_speedup(&a, &p, guard)?;
            let body = if fast.radius == 0 && fast.mode == Mode::PortNumbering && on.is_empty() {
                as_zero_round(&fast, &p)?.to_text()
            } else {
                let vs = views(&fast, p.delta, &p.sigma_in, &graphs, guard)?;
                tabulate(&fast, &vs, graphs.iter().map(PortGraph::n).max().unwrap_or(0))?
            };
            Ok(Output::ok(body).count("radius", fast.radius).count("mode", fast.mode))
        }
        Command::DeriveSlowdown { algorithm, problem, mode, on } => {
            let a = ctx.algorithm(algorithm, *mode)?;
            let p = ctx.problem(problem)?;
            let graphs = ctx.graphs(on)?;
            let slow = derive_slowdown(&a, &p)?;
            let vs = views(&slow, p.delta, &p.sigma_in, &graphs, guard)?;
            let body = tabulate(&slow, &vs, graphs.iter().map(PortGraph::n).max().unwrap_or(0))?;
            let entries = table_entries(&body);
            Ok(Output::ok(body)
                .count("radius", slow.radius)
                .count("mode", slow.mode)
                .count("entries", entries))
        }
        Command::ZeroRound { problem } => match find_zero_round(&ctx.problem(problem)?, guard)? {
            Some(z) => Ok(Output::ok(z.to_text()).outcome("found")),
            None => Ok(Output::ok("none\n".into()).outcome("none")),
        },
        Command::Lock { algorithm, delta, n0, r } => {
            let a = ctx.algorithm(algorithm, Mode::OrderInvariant)?;
            let n0 = n0.unwrap_or_else(|| min_n0(*delta, a.radius, *r));
            let locked = lock_order_invariant(&a, n0, *delta, *r)?;
            let body = tabulate(&locked, &table_views(&a)?, n0)?;
            Ok(Output::ok(body).count("n0", n0).count("radius", locked.radius))
        }
        Command::Gen { n, delta, topology, inputs, shuffle } => {
            let mut spec = GenSpec::new(*n, *delta, *topology, ctx.seed).with_inputs(input_dist(inputs)?);
            if *shuffle {
                spec = spec.shuffled();
            }
            let g = generate(&spec)?;
            Ok(Output::ok(write_graph(&g)).count("nodes", g.n()).count("max_degree", g.max_degree()))
        }
        Command::Ids { graph, mode, k } => {
            let g = ctx.graph(graph)?;
            Ok(Output::ok(write_graph(&assign_ids(&g, *mode, *k, ctx.seed)?)))
        }
        Command::Run { algorithm, graph, n } => {
            let a = ctx.algorithm(algorithm, Mode::PortNumbering)?;
            let g = ctx.graph(graph)?;
            let f = run_local_with(&a, &g, &RunContext { n: n.unwrap_or(g.n()) })?;
            Ok(Output::ok(write_labeling(&g, &f)).count("nodes", g.n()).count("radius", a.radius))
        }
        Command::Verify { problem, graph, labeling, general, strict } => {
            let vs = if *general {
                let l = ctx.general(problem)?;
                let g = ctx.graph(graph)?;
                let f = ctx.labeling(&g, labeling)?;
                verify_general(&g, &f, &l)
            } else {
                let p = ctx.problem(problem)?;
                let g = ctx.graph(graph)?;
                let f = ctx.labeling(&g, labeling)?;
                verify_nec(&g, &f, &p)
            };
            violations_output(&vs, *strict)
        }
        Command::Remap { graph } => {
            let g = ctx.graph(graph)?;
            Ok(Output::ok(write_graph(&remap_ids_order_preserving(&g, ctx.seed)?)))
        }
        Command::Volume(v) => volume(v, ctx),
        Command::Grid(g) => grid(g, ctx),
        Command::Pipeline { problem, algorithm, n, trials, remaps, n0, strict } => {
            let p = ctx.problem(problem)?;
            let a = match algorithm {
                Some(path) => ctx.algorithm(path, Mode::PortNumbering)?,
                None => first_allowed_algorithm(&p),
            };
            let cfg = PipelineConfig {
                ns: n.clone(),
                trials: *trials,
                remaps: *remaps,
                seed: ctx.seed,
                n0: *n0,
                guard,
            };
            let r = run_pipeline(&p, &a, &cfg)?.report;
            let clean = r.violations == 0 && r.remap_mismatches == 0;
            let out = Output::ok(r.to_text())
                .outcome(if clean { "valid" } else { "invalid" })
                .count("labels", r.labels)
                .count("speedup_labels", r.speedup_labels)
                .count("radius", r.radius)
                .count("n0", r.n0)
                .count("instances", r.instances)
                .count("nodes", r.nodes)
                .count("violations", r.violations)
                .count("remap_mismatches", r.remap_mismatches);
            if *strict && !clean {
                return Err(Failure::Partial(out, 1));
            }
            Ok(out)
        }
    }
}

fn volume(c: &VolumeCommand, ctx: &mut Ctx) -> Res<Output> {
    match c {
        VolumeCommand::Run { algorithm, graph, query, delta, lock } => {
            let a = ctx.algorithm(algorithm, Mode::PortNumbering)?;
            let g = ctx.graph(graph)?;
            let scan = ball_scan_strategy(a, delta.unwrap_or(g.max_degree()))?;
            let s: Box<dyn ProbeStrategy> = match lock {
                Some(n0) => Box::new(lock_order_invariant_volume(scan, *n0)?),
                None => Box::new(scan),
            };
            let rc = RunContext { n: g.n() };
            if let Some(q) = query {
                let q = parse_half_edge(q, 0).map_err(|e| Failure::Usage(e.to_string()))?;
                let (label, t) = run_volume(&*s, &g, q, &rc)?;
                let body = format!("{}answer {}\n", t.dump(), label.render());
                return Ok(Output::ok(body).count("probes", t.probe_count()));
            }
            let mut labels = Vec::with_capacity(g.n());
            let (mut total, mut max) = (0, 0);
            for v in 0..g.n() {
                let mut out = Vec::with_capacity(g.degree(v));
                for p in 1..=g.degree(v) {
                    let (label, t) = run_volume(&*s, &g, lcl_core::HalfEdge::new(v, p), &rc)?;
                    total += t.probe_count();
                    max = max.max(t.probe_count());
                    out.push(label);
                }
                labels.push(out);
            }
            let f = HalfEdgeLabeling::new(labels);
            Ok(Output::ok(write_labeling(&g, &f))
                .count("probes_total", total)
                .count("probes_max", max)
                .count("budget", s.budget(&rc)))
        }
        VolumeCommand::Params { tau, delta, r, sin, sout } => {
            Ok(Output::ok(ramsey_params_volume(*tau, *delta, *r, *sin, *sout).report()))
        }
    }
}

fn grid(c: &GridCommand, ctx: &mut Ctx) -> Res<Output> {
    match c {
        GridCommand::Gen { sides, d, open, inputs } => {
            if d.is_some_and(|d| d != sides.len()) {
                return Err(Failure::Usage(format!("--d {} but {} sides given", d.unwrap(), sides.len())));
            }
            let g = gen_grid(sides.len(), sides, !open, &input_dist(inputs)?, ctx.seed)?;
            Ok(Output::ok(write_grid(&g)).count("nodes", g.n()))
        }
        GridCommand::Ids { grid, c } => {
            let g = ctx.grid(grid)?;
            Ok(Output::ok(write_prod_ids(&assign_prod_ids(&g, *c, ctx.seed)?)))
        }
        GridCommand::Combine { grid, ids, c } => {
            let g = ctx.grid(grid)?;
            let ids = read_prod_ids(&ctx.read(ids)?)?;
            let combined = combine_ids(&ids, g.n(), *c)?;
            let body: String = combined.iter().enumerate().map(|(v, id)| format!("{v} {id}\n")).collect();
            Ok(Output::ok(body).count("nodes", combined.len()))
        }
        GridCommand::Run { algorithm, grid, ids, c, orientation_lock: orient } => {
            let mode = if *orient { Mode::OrderInvariant } else { Mode::PortNumbering };
            let a = ctx.algorithm(algorithm, mode)?;
            let g = ctx.grid(grid)?;
            let ids = match ids {
                Some(path) => Some(read_prod_ids(&ctx.read(path)?)?),
                None => None,
            };
            let mut w = prod_from_local(a, g.n(), *c);
            if *orient {
                w = orientation_lock(w, &g)?;
            }
            let f = run_prod_local(&w, &g, ids.as_ref())?;
            Ok(Output::ok(write_labeling(&g.to_port_graph(), &f)).count("nodes", g.n()))
        }
        GridCommand::Params { t, d, r, sin, sout } => {
            Ok(Output::ok(ramsey_params_grid(*t, *d, *r, *sin, *sout).report()))
        }
    }
}
