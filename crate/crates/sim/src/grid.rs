//! Oriented d-dimensional grids and the PROD-LOCAL model.
//!
//! Node ports: `2i-1` is the outgoing dimension-`i` edge (towards coordinate
//! +1), `2i` the incoming one.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use lcl_core::format::{split_label_list, strip_comment};
use lcl_core::{
    BallView, Error, HalfEdge, HalfEdgeLabeling, Label, LocalAlgorithm, Mode, PortGraph, Result, RunContext,
    View,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gen::InputDist;
use crate::ids::distinct_below;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedGrid {
    pub d: usize,
    pub sides: Vec<usize>,
    pub toroidal: bool,
    /// Per node, one input per port.
    pub inputs: Vec<Vec<Label>>,
}

impl OrientedGrid {
    pub fn n(&self) -> usize {
        self.sides.iter().product()
    }

    /// Mixed-radix coordinates, dimension 1 varying fastest.
    pub fn coords(&self, mut v: usize) -> Vec<usize> {
        self.sides
            .iter()
            .map(|&s| {
                let c = v % s;
                v /= s;
                c
            })
            .collect()
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.sides)
            .rev()
            .fold(0, |acc, (&c, &s)| acc * s + c)
    }

    /// The node at `offset` from `v`, or `None` off the boundary of a
    /// non-toroidal grid.
    pub fn shift(&self, v: usize, offset: &[i64]) -> Option<usize> {
        let mut c = self.coords(v);
        for (i, &o) in offset.iter().enumerate() {
            let s = self.sides[i] as i64;
            let x = c[i] as i64 + o;
            if self.toroidal {
                c[i] = x.rem_euclid(s) as usize;
            } else if (0..s).contains(&x) {
                c[i] = x as usize;
            } else {
                return None;
            }
        }
        Some(self.index(&c))
    }

    pub fn to_port_graph(&self) -> PortGraph {
        let mut g = PortGraph::new();
        for v in 0..self.n() {
            g.add_node(self.inputs[v].clone());
        }
        for v in 0..self.n() {
            for i in 0..self.d {
                let mut e = vec![0i64; self.d];
                e[i] = 1;
                if let Some(w) = self.shift(v, &e) {
                    g.connect(HalfEdge::new(v, 2 * i + 1), HalfEdge::new(w, 2 * i + 2))
                        .expect("each port is used once");
                }
            }
        }
        g
    }

    /// Dimension (1-based) and direction (+1 outgoing) of a port.
    pub fn port_dim(port: usize) -> (usize, i64) {
        ((port + 1) / 2, if port % 2 == 1 { 1 } else { -1 })
    }
}

pub fn gen_grid(d: usize, sides: &[usize], toroidal: bool, inputs: &InputDist, seed: u64) -> Result<OrientedGrid> {
    if d == 0 || sides.len() != d {
        return Err(Error::InvalidGraph(format!("need {d} side lengths, got {}", sides.len())));
    }
    if sides.iter().any(|&s| s == 0 || toroidal && s < 2) {
        return Err(Error::InvalidGraph("toroidal sides must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: usize = sides.iter().product();
    let inputs = (0..n)
        .map(|_| {
            (0..2 * d)
                .map(|_| match inputs {
                    InputDist::Fixed(l) => l.clone(),
                    InputDist::Uniform(ls) => ls.choose(&mut rng).expect("nonempty inputs").clone(),
                })
                .collect()
        })
        .collect();
    Ok(OrientedGrid {
        d,
        sides: sides.to_vec(),
        toroidal,
        inputs,
    })
}

/// Per node, one identifier per dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProdIds {
    pub ids: Vec<Vec<u64>>,
}

pub fn assign_prod_ids(g: &OrientedGrid, c: u32, seed: u64) -> Result<ProdIds> {
    if c < 1 {
        return Err(Error::InvalidGraph("exponent c must be at least 1".into()));
    }
    let bound = crate::ids::id_space(g.n(), c);
    let max_side = *g.sides.iter().max().unwrap() as u64;
    if bound < max_side {
        return Err(Error::InvalidGraph(format!(
            "identifier space n^c = {bound} smaller than side {max_side}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_dim: Vec<Vec<u64>> = g
        .sides
        .iter()
        .map(|&s| distinct_below(&mut rng, s, bound))
        .collect();
    let ids = (0..g.n())
        .map(|v| {
            g.coords(v)
                .iter()
                .enumerate()
                .map(|(i, &x)| per_dim[i][x])
                .collect()
        })
        .collect();
    Ok(ProdIds { ids })
}

/// Whether nodes agree on their `i`-th identifier exactly when they share
/// their `i`-th coordinate, for every `i`.
pub fn check_prod_ids(g: &OrientedGrid, ids: &ProdIds) -> bool {
    let n = g.n();
    (0..n).all(|u| {
        let cu = g.coords(u);
        (0..n).all(|v| {
            let cv = g.coords(v);
            (0..g.d).all(|i| (cu[i] == cv[i]) == (ids.ids[u][i] == ids.ids[v][i]))
        })
    })
}

/// `I = Σ_i I_i · n^{c(i-1)}`.
pub fn combine(tuple: &[u64], n: usize, c: u32) -> Result<u128> {
    let base = (n as u128)
        .checked_pow(c)
        .ok_or_else(|| Error::Other("n^c overflows".into()))?;
    let mut total: u128 = 0;
    let mut scale: u128 = 1;
    for &x in tuple {
        if x as u128 >= base {
            return Err(Error::InvalidGraph(format!("identifier {x} not below n^c = {base}")));
        }
        total = scale
            .checked_mul(x as u128)
            .and_then(|t| total.checked_add(t))
            .ok_or_else(|| Error::Other("combined identifier overflows".into()))?;
        scale = scale.saturating_mul(base);
    }
    Ok(total)
}

pub fn combine_ids(ids: &ProdIds, n: usize, c: u32) -> Result<Vec<u128>> {
    ids.ids.iter().map(|t| combine(t, n, c)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridCell {
    pub inputs: Vec<Label>,
    pub ids: Option<Vec<u64>>,
}

/// Cells within L1 distance `radius` of the root, keyed by offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridView {
    pub d: usize,
    pub radius: usize,
    pub cells: BTreeMap<Vec<i64>, GridCell>,
}

impl GridView {
    pub fn root(&self) -> &GridCell {
        &self.cells[&vec![0; self.d]]
    }

    pub fn encode(&self) -> String {
        let mut s = format!("grid(d={};t={})", self.d, self.radius);
        for (o, cell) in &self.cells {
            let o: Vec<String> = o.iter().map(i64::to_string).collect();
            let ins: Vec<String> = cell.inputs.iter().map(Label::render).collect();
            let ids = cell.ids.as_ref().map_or(String::new(), |t| {
                t.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
            });
            write!(s, "[{}|{}|{ids}]", o.join(","), ins.join(",")).unwrap();
        }
        s
    }

    /// The port-numbered unfolding of this window, with each cell's
    /// identifier tuple combined into one token.
    pub fn to_view(&self, n: usize, c: u32) -> Result<View> {
        fn rec(w: &GridView, o: &mut Vec<i64>, r: usize, n: usize, c: u32) -> Result<View> {
            let cell = &w.cells[o.as_slice()];
            let token = match &cell.ids {
                Some(t) => Some(
                    u64::try_from(combine(t, n, c)?)
                        .map_err(|_| Error::Other("combined identifier exceeds 64 bits".into()))?,
                ),
                None => None,
            };
            let mut children = Vec::with_capacity(2 * w.d);
            for p in 1..=2 * w.d {
                let (i, dir) = OrientedGrid::port_dim(p);
                o[i - 1] += dir;
                let child = if r > 0 && w.cells.contains_key(o.as_slice()) {
                    let back = if dir == 1 { p + 1 } else { p - 1 };
                    Some((back, rec(w, o, r - 1, n, c)?))
                } else {
                    None
                };
                o[i - 1] -= dir;
                children.push(child);
            }
            Ok(View {
                inputs: cell.inputs.clone(),
                outputs: None,
                token,
                children,
            })
        }
        rec(self, &mut vec![0; self.d], self.radius, n, c)
    }
}

impl BallView for GridView {
    fn key(&self) -> String {
        self.encode()
    }
    fn root_degree(&self) -> usize {
        2 * self.d
    }
}

fn window_offsets(d: usize, t: usize) -> Vec<Vec<i64>> {
    let t = t as i64;
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|o: Vec<i64>| {
                let used: i64 = o.iter().map(|x| x.abs()).sum();
                (-(t - used)..=(t - used)).map(move |x| {
                    let mut o = o.clone();
                    o.push(x);
                    o
                })
            })
            .collect();
    }
    out
}

pub fn grid_view(g: &OrientedGrid, ids: Option<&ProdIds>, v: usize, t: usize, mode: Mode) -> Result<GridView> {
    let mut cells = BTreeMap::new();
    for o in window_offsets(g.d, t) {
        let Some(w) = g.shift(v, &o) else { continue };
        let cell_ids = match mode {
            Mode::PortNumbering => None,
            Mode::DeterministicId | Mode::OrderInvariant => Some(
                ids.ok_or_else(|| Error::Algorithm(format!("{mode} grid algorithm needs identifiers")))?
                    .ids[w]
                    .clone(),
            ),
            Mode::Randomized => {
                return Err(Error::Algorithm("randomized grid algorithms are not supported".into()))
            }
        };
        cells.insert(
            o,
            GridCell {
                inputs: g.inputs[w].clone(),
                ids: cell_ids,
            },
        );
    }
    let mut view = GridView { d: g.d, radius: t, cells };
    if mode == Mode::OrderInvariant {
        rank_per_dimension(&mut view);
    }
    Ok(view)
}

/// Replaces each identifier by its rank among the visible values of the
/// same dimension.
pub fn rank_per_dimension(view: &mut GridView) {
    for i in 0..view.d {
        let mut vals: Vec<u64> = view.cells.values().filter_map(|c| c.ids.as_ref().map(|t| t[i])).collect();
        vals.sort_unstable();
        vals.dedup();
        for c in view.cells.values_mut() {
            if let Some(t) = &mut c.ids {
                t[i] = vals.binary_search(&t[i]).unwrap() as u64 + 1;
            }
        }
    }
}

pub fn run_prod_local(
    a: &LocalAlgorithm<GridView>,
    g: &OrientedGrid,
    ids: Option<&ProdIds>,
) -> Result<HalfEdgeLabeling> {
    let ctx = RunContext { n: g.n() };
    let labels = (0..g.n())
        .map(|v| a.evaluate(&grid_view(g, ids, v, a.radius, a.mode)?, &ctx))
        .collect::<Result<Vec<_>>>()?;
    Ok(HalfEdgeLabeling::new(labels))
}

/// Runs a LOCAL algorithm in PROD-LOCAL: each node combines the identifier
/// tuples it sees into single identifiers and evaluates `a` on the result.
pub fn prod_from_local(a: LocalAlgorithm, n: usize, c: u32) -> LocalAlgorithm<GridView> {
    let name = format!("prod({})", a.name);
    let radius = a.radius;
    // Ranking each dimension keeps the lexicographic order of tuples, so an
    // order-invariant `a` stays order-invariant here.
    let mode = match a.mode {
        Mode::PortNumbering | Mode::OrderInvariant => a.mode,
        _ => Mode::DeterministicId,
    };
    LocalAlgorithm::from_rule(name, radius, mode, move |w: &GridView, ctx| {
        let mut view = w.to_view(n, c)?;
        match a.mode {
            Mode::OrderInvariant => view.rank_tokens(),
            Mode::PortNumbering => view.clear_tokens(),
            _ => {}
        }
        a.evaluate(&view, ctx)
    })
}

/// The order on identifier slots `(dimension, offset along it)` that the
/// orientation provides inside a window: dimension first, then position
/// along the dimension's orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrientationOrder {
    pub d: usize,
    pub t: usize,
}

pub fn orientation_order(g: &OrientedGrid, t: usize) -> Result<OrientationOrder> {
    if !g.toroidal {
        return Err(Error::InvalidGraph("orientation order is defined on toroidal grids only".into()));
    }
    if let Some(s) = g.sides.iter().find(|&&s| s <= 2 * t + 1) {
        return Err(Error::InvalidGraph(format!(
            "window of radius {t} does not fit side {s}; need sides > {}",
            2 * t + 1
        )));
    }
    Ok(OrientationOrder { d: g.d, t })
}

impl OrientationOrder {
    pub fn compare(&self, a: (usize, i64), b: (usize, i64)) -> Ordering {
        a.cmp(&b)
    }

    /// Every slot of the window, 1-based dimensions.
    pub fn slots(&self) -> Vec<(usize, i64)> {
        let t = self.t as i64;
        (1..=self.d).flat_map(|i| (-t..=t).map(move |x| (i, x))).collect()
    }

    /// Per-dimension ranks read off the orientation.
    pub fn virtual_ids(&self, view: &GridView) -> GridView {
        let mut out = view.clone();
        for (o, c) in &mut out.cells {
            c.ids = Some(o.iter().map(|&x| (x + self.t as i64 + 1) as u64).collect());
        }
        rank_per_dimension(&mut out);
        out
    }
}

/// Runs an order-invariant PROD-LOCAL algorithm without identifiers, using
/// the orientation for the order.
pub fn orientation_lock(a: LocalAlgorithm<GridView>, g: &OrientedGrid) -> Result<LocalAlgorithm<GridView>> {
    if a.mode != Mode::OrderInvariant {
        return Err(Error::Algorithm("orientation lock needs an order-invariant algorithm".into()));
    }
    let order = orientation_order(g, a.radius)?;
    let name = format!("oriented({})", a.name);
    Ok(LocalAlgorithm::from_rule(name, a.radius, Mode::PortNumbering, move |w: &GridView, ctx| {
        a.evaluate(&order.virtual_ids(w), ctx)
    }))
}

pub fn write_grid(g: &OrientedGrid) -> String {
    let mut s = String::new();
    let sides: Vec<String> = g.sides.iter().map(usize::to_string).collect();
    writeln!(s, "n {} delta {} mode port-numbering", g.n(), 2 * g.d).unwrap();
    writeln!(s, "grid d {} sides {} toroidal {}", g.d, sides.join(","), g.toroidal).unwrap();
    for v in 0..g.n() {
        let ins: Vec<String> = g.inputs[v].iter().map(Label::render).collect();
        writeln!(s, "node {v} deg {} inputs {} idtok -", 2 * g.d, ins.join(",")).unwrap();
    }
    let pg = g.to_port_graph();
    for (a, b) in pg.edges() {
        let (out, inc) = if a.port % 2 == 1 { (a, b) } else { (b, a) };
        writeln!(s, "edge {out} {inc} dim {} orient +", out.port.div_ceil(2)).unwrap();
    }
    s
}

pub fn read_grid(text: &str) -> Result<OrientedGrid> {
    let mut header = None;
    let mut inputs = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.first() {
            None | Some(&"n") => {}
            Some(&"grid") => {
                let bad = || Error::syntax(lineno, "expected `grid d <d> sides <s,...> toroidal <bool>`");
                if words.len() != 7 {
                    return Err(bad());
                }
                let d: usize = words[2].parse().map_err(|_| bad())?;
                let sides = words[4]
                    .split(',')
                    .map(|x| x.parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                let toroidal: bool = words[6].parse().map_err(|_| bad())?;
                header = Some((d, sides, toroidal));
            }
            Some(&"node") => {
                if words.len() != 8 {
                    return Err(Error::syntax(lineno, "bad node line"));
                }
                inputs.push(split_label_list(words[5], lineno)?);
            }
            Some(&"edge") => {
                if words.len() != 7 || words[3] != "dim" || words[5] != "orient" || words[6] != "+" {
                    return Err(Error::syntax(lineno, "expected `edge <u>:<p> <v>:<q> dim <i> orient +`"));
                }
                let a = crate::io::parse_half_edge(words[1], lineno)?;
                let b = crate::io::parse_half_edge(words[2], lineno)?;
                let dim: usize = words[4].parse().map_err(|_| Error::syntax(lineno, "bad dim"))?;
                edges.push((lineno, a, b, dim));
            }
            Some(w) => return Err(Error::syntax(lineno, format!("unknown record {w:?}"))),
        }
    }
    let (d, sides, toroidal) = header.ok_or_else(|| Error::syntax(0, "missing `grid` header"))?;
    let g = OrientedGrid { d, sides, toroidal, inputs };
    if g.inputs.len() != g.n() || g.inputs.iter().any(|i| i.len() != 2 * d) {
        return Err(Error::InvalidGraph("node records do not match the grid header".into()));
    }
    let expected: Vec<(HalfEdge, HalfEdge)> = g.to_port_graph().edges();
    for (lineno, a, b, dim) in &edges {
        if a.port != 2 * dim - 1 || b.port != 2 * dim || !expected.contains(&(*a, *b)) && !expected.contains(&(*b, *a)) {
            return Err(Error::syntax(*lineno, "edge inconsistent with grid orientation"));
        }
    }
    if edges.len() != expected.len() {
        return Err(Error::InvalidGraph(format!("expected {} edges, found {}", expected.len(), edges.len())));
    }
    Ok(g)
}

pub fn write_prod_ids(ids: &ProdIds) -> String {
    let mut s = String::new();
    for (v, t) in ids.ids.iter().enumerate() {
        let t: Vec<String> = t.iter().map(u64::to_string).collect();
        writeln!(s, "prod {v} {}", t.join(",")).unwrap();
    }
    s
}

pub fn read_prod_ids(text: &str) -> Result<ProdIds> {
    let mut ids = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::syntax(i + 1, "expected `prod <node> <I_1,...,I_d>`");
        if words.len() != 3 || words[0] != "prod" || words[1].parse::<usize>().ok() != Some(ids.len()) {
            return Err(bad());
        }
        ids.push(
            words[2]
                .split(',')
                .map(|x| x.parse::<u64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(ProdIds { ids })
}
