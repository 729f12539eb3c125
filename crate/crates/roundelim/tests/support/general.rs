//! The "monochrome" general LCL and the compile/lift/project round trip.

use std::collections::BTreeSet;

use lcl_core::general::DEFAULT_BALL_GUARD;
use lcl_core::{Alphabet, GeneralLcl, HalfEdge, HalfEdgeLabeling, Label, PortGraph, View};
use lcl_roundelim::compiler::{compile_general, lift_solution, project_solution};
use lcl_sim::{generate, verify_general, verify_nec, GenSpec, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn outputs(v: &View, acc: &mut Vec<Label>) {
    acc.extend(v.outputs.iter().flatten().cloned());
    for (_, c) in v.children.iter().flatten() {
        outputs(c, acc);
    }
}

/// Every visible output of a radius-1 ball agrees.
pub fn monochrome() -> GeneralLcl {
    GeneralLcl::from_predicate(
        2,
        Alphabet::new(vec![Label::bottom()]).unwrap(),
        Alphabet::from_symbols(&["A", "B"]),
        1,
        DEFAULT_BALL_GUARD,
        |b| {
            let mut o = Vec::new();
            outputs(b, &mut o);
            o.windows(2).all(|w| w[0] == w[1])
        },
    )
    .unwrap()
}

/// Radius-1 balls of Δ = 2 trees built as graphs: a root of degree `d`
/// whose neighbors get degree 1 or 2, every back port, and every output
/// labeling of the visible half-edges; kept when all visible outputs agree.
pub fn oracle_monochrome_balls() -> BTreeSet<String> {
    let ab = [Label::base("A"), Label::base("B")];
    let l = GeneralLcl::new(2, Alphabet::new(vec![Label::bottom()]).unwrap(), Alphabet::from_symbols(&["A", "B"]), 1);
    let mut out = BTreeSet::new();
    for d in 0..=2usize {
        // (neighbor degree, back port) per root port
        let shapes: Vec<Vec<(usize, usize)>> = (0..d).fold(vec![vec![]], |acc, _| {
            acc.into_iter()
                .flat_map(|s| {
                    [(1, 1), (2, 1), (2, 2)].into_iter().map(move |x| {
                        let mut s = s.clone();
                        s.push(x);
                        s
                    })
                })
                .collect()
        });
        for shape in shapes {
            let mut g = PortGraph::new();
            let root = g.add_node(vec![Label::bottom(); d]);
            let mut visible = Vec::new();
            for (p, &(deg, back)) in shape.iter().enumerate() {
                let w = g.add_node(vec![Label::bottom(); deg]);
                g.connect(HalfEdge::new(root, p + 1), HalfEdge::new(w, back)).unwrap();
                visible.extend((1..=deg).map(|q| HalfEdge::new(w, q)));
                for q in (1..=deg).filter(|&q| q != back) {
                    let leaf = g.add_node(vec![Label::bottom()]);
                    g.connect(HalfEdge::new(w, q), HalfEdge::new(leaf, 1)).unwrap();
                }
            }
            visible.extend((1..=d).map(|p| HalfEdge::new(root, p)));
            for bits in 0..1u32 << visible.len() {
                let mut f = HalfEdgeLabeling::new((0..g.n()).map(|v| vec![ab[0].clone(); g.degree(v)]).collect());
                for (i, h) in visible.iter().enumerate() {
                    f.set(*h, ab[(bits >> i & 1) as usize].clone());
                }
                let mono = visible.iter().all(|h| f.get(*h) == f.get(visible[0]));
                if mono || visible.is_empty() {
                    out.insert(l.labeled_ball(&g, root, &f).unwrap().encode());
                }
            }
        }
    }
    out
}

pub fn components(g: &PortGraph) -> Vec<usize> {
    let mut c = vec![usize::MAX; g.n()];
    for s in 0..g.n() {
        if c[s] != usize::MAX {
            continue;
        }
        c[s] = s;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for (_, o) in g.neighbors(v) {
                if c[o.node] == usize::MAX {
                    c[o.node] = s;
                    stack.push(o.node);
                }
            }
        }
    }
    c
}

pub fn labeling(g: &PortGraph, f: impl Fn(usize) -> &'static str) -> HalfEdgeLabeling {
    HalfEdgeLabeling::new((0..g.n()).map(|v| vec![Label::base(f(v)); g.degree(v)]).collect())
}

/// Lifts a valid monochrome labeling of `trees` random forests with
/// `n ≤ 12`, checks the lift against the compiled problem, projects back
/// and checks identity. Returns the number of instances checked.
pub fn check_round_trip(trees: usize, seed: u64) -> Result<usize, String> {
    let l = monochrome();
    let p = compile_general(&l, DEFAULT_BALL_GUARD).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut i = 0u64;
    while done < trees {
        i += 1;
        let n = rng.gen_range(2..=12);
        let k = rng.gen_range(1..=(n / 2).max(1));
        let g = generate(&GenSpec::new(n, 2, Topology::Forest(k), seed * 100_000 + i).shuffled()).map_err(|e| e.to_string())?;
        if (0..g.n()).any(|v| g.degree(v) == 0) {
            continue;
        }
        let colors: Vec<&'static str> = (0..g.n()).map(|_| if rng.gen_bool(0.5) { "A" } else { "B" }).collect();
        // Constant per component.
        let comp = components(&g);
        let f = labeling(&g, |v| colors[comp[v]]);
        if let Some(v) = verify_general(&g, &f, &l).first() {
            return Err(format!("input labeling rejected: {v}"));
        }
        let lifted = lift_solution(&l, &p, &g, &f).map_err(|e| e.to_string())?;
        if let Some(v) = verify_nec(&g, &lifted, &p).first() {
            return Err(format!("lift rejected: {v}"));
        }
        let back = project_solution(&p, &g, &lifted).map_err(|e| e.to_string())?;
        if back != f {
            return Err(format!("projection differs on instance {i}"));
        }
        if let Some(v) = verify_general(&g, &back, &l).first() {
            return Err(format!("projection rejected: {v}"));
        }
        done += 1;
    }
    Ok(done)
}
