use std::cmp::Ordering;
use std::collections::HashSet;

use lcl_core::{Identity, Label, LocalAlgorithm, Mode, View};
use lcl_sim::grid::{assign_prod_ids, check_prod_ids, combine_ids, gen_grid, orientation_order, prod_from_local, run_prod_local, OrientedGrid, ProdIds};
use lcl_sim::ramsey::ramsey_params_grid;
use lcl_sim::run_local;
use num_bigint::BigUint;

use super::ab;

fn shapes() -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (2..=25).map(|s| vec![s]).collect();
    for a in 2..=12 {
        for b in 2..=12 {
            if a * b <= 25 {
                out.push(vec![a, b]);
            }
        }
    }
    out.push(vec![2, 2, 2]);
    out.push(vec![2, 3, 2]);
    out
}

/// Independent check: identifier `i` equality matches coordinate `i`
/// equality, with coordinates recomputed from the port structure.
fn coordinates_by_walking(g: &OrientedGrid) -> Vec<Vec<usize>> {
    let pg = g.to_port_graph();
    let mut coords = vec![vec![usize::MAX; g.d]; g.n()];
    coords[0] = vec![0; g.d];
    // Walk dimension by dimension from the origin along outgoing edges.
    let mut frontier = vec![0];
    for i in 0..g.d {
        let mut next = Vec::new();
        for &start in &frontier {
            let mut v = start;
            let mut x = 0;
            loop {
                next.push(v);
                match pg.opposite(lcl_core::HalfEdge::new(v, 2 * i + 1)) {
                    Some(o) if o.node != start && x + 1 < g.sides[i] => {
                        x += 1;
                        let mut c = coords[start].clone();
                        c[i] = x;
                        coords[o.node] = c;
                        v = o.node;
                    }
                    _ => break,
                }
            }
        }
        frontier = next;
    }
    coords
}

/// Every grid of at most 25 nodes, toroidal or not, with `c ∈ {1, 2}`.
pub fn check_iff_invariant() -> Result<String, String> {
    let mut grids = 0;
    for sides in shapes() {
        for toroidal in [true, false] {
            let g = gen_grid(sides.len(), &sides, toroidal, &ab(), 0).map_err(|e| e.to_string())?;
            let coords = coordinates_by_walking(&g);
            ensure!(coords.iter().all(|c| c.iter().all(|&x| x != usize::MAX)), "walk missed nodes of {sides:?}");
            for c in 1..=2 {
                let ids = assign_prod_ids(&g, c, sides.iter().sum::<usize>() as u64).map_err(|e| e.to_string())?;
                ensure!(check_prod_ids(&g, &ids), "{sides:?} rejected");
                for u in 0..g.n() {
                    for v in 0..g.n() {
                        for i in 0..g.d {
                            ensure!((coords[u][i] == coords[v][i]) == (ids.ids[u][i] == ids.ids[v][i]), "{sides:?} at {u},{v}");
                        }
                    }
                }
                grids += 1;
            }
        }
    }
    Ok(format!("{grids} grids"))
}

pub fn check_combine_injective(seeds: u64) -> Result<String, String> {
    for seed in 0..seeds {
        let g = gen_grid(2, &[4, 4], true, &ab(), seed).map_err(|e| e.to_string())?;
        let ids = assign_prod_ids(&g, 1, seed).map_err(|e| e.to_string())?;
        let combined = combine_ids(&ids, g.n(), 1).map_err(|e| e.to_string())?;
        ensure!(combined.iter().collect::<HashSet<_>>().len() == g.n(), "seed {seed}");
    }
    Ok(format!("{seeds} tori"))
}

pub fn check_orientation_order() -> Result<String, String> {
    let mut windows = 0;
    for (d, t) in [(1, 1), (1, 3), (2, 1), (2, 2), (3, 1)] {
        let g = gen_grid(d, &vec![2 * t + 2; d], true, &ab(), 0).map_err(|e| e.to_string())?;
        let o = orientation_order(&g, t).map_err(|e| e.to_string())?;
        let slots = o.slots();
        ensure!(slots.len() == d * (2 * t + 1), "slot count at d={d}, t={t}");
        for &a in &slots {
            ensure!(o.compare(a, a) == Ordering::Equal, "irreflexive");
            for &b in &slots {
                if a != b {
                    ensure!(o.compare(a, b) != Ordering::Equal, "total at d={d}, t={t}");
                    ensure!(o.compare(a, b) == o.compare(b, a).reverse(), "antisymmetric at d={d}, t={t}");
                }
                for &c in &slots {
                    if o.compare(a, b) == Ordering::Less && o.compare(b, c) == Ordering::Less {
                        ensure!(o.compare(a, c) == Ordering::Less, "transitive at d={d}, t={t}");
                    }
                }
            }
        }
        windows += 1;
    }
    Ok(format!("{windows} windows"))
}

fn view_rules() -> Vec<LocalAlgorithm> {
    fn walk(v: &View, f: &mut dyn FnMut(&View)) {
        f(v);
        for (_, c) in v.children.iter().flatten() {
            walk(c, f);
        }
    }
    vec![
        LocalAlgorithm::from_rule("token-sum", 1, Mode::DeterministicId, |v: &View, _| {
            let mut s = 0u64;
            walk(v, &mut |w| s = s.wrapping_add(w.token.unwrap()));
            Ok((1..=v.degree()).map(|p| Label::base(format!("s{}", (s + p as u64) % 7))).collect())
        }),
        LocalAlgorithm::from_rule("rank-of-root", 2, Mode::OrderInvariant, |v: &View, _| {
            Ok(vec![Label::base(format!("r{}", v.token.unwrap())); v.degree()])
        }),
        LocalAlgorithm::from_rule("inputs", 2, Mode::PortNumbering, |v: &View, _| {
            let mut k = 0;
            walk(v, &mut |w| k += w.inputs.iter().filter(|l| l.render() == "a").count());
            Ok(vec![Label::base(format!("k{k}")); v.degree()])
        }),
    ]
}

pub fn check_prod_reduction() -> Result<String, String> {
    let c = 2;
    let mut runs = 0;
    for a in view_rules() {
        for (i, sides) in [vec![5], vec![3, 4], vec![4, 4], vec![2, 5], vec![2, 2, 3]].into_iter().enumerate() {
            for toroidal in [true, false] {
                let g = gen_grid(sides.len(), &sides, toroidal, &ab(), i as u64).map_err(|e| e.to_string())?;
                let ids: ProdIds = assign_prod_ids(&g, c, i as u64 + 7).map_err(|e| e.to_string())?;
                let wrapped = prod_from_local(a.clone(), g.n(), c);
                let via_prod = run_prod_local(&wrapped, &g, Some(&ids)).map_err(|e| e.to_string())?;
                let mut pg = g.to_port_graph();
                let combined = combine_ids(&ids, g.n(), c).map_err(|e| e.to_string())?;
                pg.identity = Identity::Ids(combined.iter().map(|&x| x as u64).collect());
                let direct = run_local(&a, &pg).map_err(|e| e.to_string())?;
                ensure!(via_prod == direct, "{} on {sides:?}", a.name);
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} instances"))
}

pub fn check_grid_ramsey() -> Result<String, String> {
    for d in 1..=3u64 {
        for t in 0..4u64 {
            let p = ramsey_params_grid(t, d, 1, 1, 2).p;
            ensure!(p == BigUint::from(d * (2 * t + 1)), "p = {p} at d={d}, t={t}");
        }
    }
    Ok("p = d(2t+1)".into())
}
