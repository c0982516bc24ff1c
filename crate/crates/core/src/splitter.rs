use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::{CellId, CellRecord, Complex, Tag};
use crate::error::{Error, Result};
use crate::field::{
    critical_cells, extend_function, induced_field, is_injective, is_perfect, make_injective, synthesize_function,
    trace_2path, validate_field, GradientPath, MorseFunction, VectorField,
};
use crate::surgery::{separate_in, BisectionRecord, Work};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitEdges {
    pub low: Vec<CellId>,
    pub high: Vec<CellId>,
}

/// Critical edges ordered by value: the lowest `2*g1` stay with the minimum,
/// the highest `2*g2` go with the critical 2-cell.
pub fn select_split_edges(k: &Complex, f: &MorseFunction, g1: usize, g2: usize) -> Result<SplitEdges> {
    if g1 + g2 == 0 {
        return Err(Error::NothingToDecompose);
    }
    let v = induced_field(k, f)?;
    let (_, crit) = critical_cells(&v, k);
    let mut edges = Vec::new();
    for e in crit.get(1).cloned().unwrap_or_default() {
        let x = f.get(&e).ok_or_else(|| Error::MissingValue(e.clone()))?;
        edges.push((x, e));
    }
    if edges.len() != 2 * (g1 + g2) {
        return Err(Error::WrongCriticalCount { expected: 2 * (g1 + g2), found: edges.len() });
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut low: Vec<CellId> = edges.into_iter().map(|(_, e)| e).collect();
    let high = low.split_off(2 * g1);
    Ok(SplitEdges { low, high })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreRegion {
    pub critical: CellId,
    /// 2-cells of the region, the critical one included.
    pub cells: BTreeSet<CellId>,
    pub high: Vec<CellId>,
    pub paths: Vec<GradientPath>,
    /// (edge, 2-cell) pairs in the order they are removed starting from the high edges.
    pub collapse_order: Vec<(CellId, CellId)>,
}

impl CoreRegion {
    pub fn contains(&self, c: &CellId) -> bool {
        self.cells.contains(c) || self.high.contains(c)
    }

    /// Every region 2-cell other than the critical one traces back to it
    /// through region cells only.
    pub fn paths_consistent(&self, k: &Complex, v: &VectorField) -> bool {
        self.cells.iter().filter(|c| **c != self.critical).all(|c| {
            trace_2path(k, v, c, Some(&self.critical)).is_ok_and(|p| p.taus().all(|t| self.cells.contains(t)))
        })
    }
}

fn critical_2cell(k: &Complex, v: &VectorField) -> Result<CellId> {
    let (_, crit) = critical_cells(v, k);
    match crit.get(2).map(|c| c.as_slice()) {
        Some([t]) => Ok(t.clone()),
        _ => Err(Error::NotPerfectInput),
    }
}

pub fn carve_core(k: &Complex, v: &VectorField, high: &[CellId]) -> Result<CoreRegion> {
    let critical = critical_2cell(k, v)?;
    let mut cells = BTreeSet::from([critical.clone()]);
    let mut paths = Vec::new();
    let mut collapse_order = Vec::new();
    let mut seen = BTreeSet::new();
    for h in high {
        let hi = k.get(h)?;
        if v.is_matched(h) || k.cell_dim(hi) != 1 {
            return Err(Error::InconsistentField(h.clone()));
        }
        for &c in k.cofaces(hi) {
            if *k.id(c) == critical {
                continue;
            }
            let path = trace_2path(k, v, k.id(c), Some(&critical))?;
            let steps = &path.steps;
            for pair in steps.chunks(2).rev() {
                if seen.insert(pair[1].clone()) {
                    collapse_order.push((pair[0].clone(), pair[1].clone()));
                }
            }
            cells.extend(path.taus().cloned());
            paths.push(path);
        }
    }
    Ok(CoreRegion { critical, cells, high: high.to_vec(), paths, collapse_order })
}

fn region_cofaces(k: &Complex, region: &CoreRegion, e: usize) -> usize {
    k.cofaces(e).iter().filter(|&&c| region.cells.contains(k.id(c))).count()
}

/// An edge interior to the thickened region: both cofaces in the region and
/// either a high edge or paired with a region cell.
fn glued(k: &Complex, v: &VectorField, region: &CoreRegion, e: usize) -> bool {
    let id = k.id(e);
    k.cofaces(e).len() == 2
        && region_cofaces(k, region, e) == 2
        && (region.high.contains(id) || v.up(id).is_some_and(|c| region.cells.contains(c)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryClass {
    Circle,
    SingleWedge,
    WedgesWithArcs,
    WedgesWithConnectingCircles,
    DisjointCircles,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryGraph {
    pub edges: BTreeSet<CellId>,
    pub degree: BTreeMap<CellId, usize>,
    /// Vertex sets of the connected pieces of the curve.
    pub components: Vec<BTreeSet<CellId>>,
    pub circle_count: usize,
    pub wedge_vertices: Vec<CellId>,
    pub arcs: Vec<Vec<CellId>>,
    pub class: BoundaryClass,
}

impl BoundaryGraph {
    /// Σ(deg − 2) over curve vertices plus twice the arc count.
    pub fn metric(&self) -> usize {
        self.degree.values().map(|d| d - 2).sum::<usize>() + 2 * self.arcs.len()
    }
}

fn edge_components(k: &Complex, edges: &[usize]) -> Vec<(BTreeSet<CellId>, Vec<CellId>)> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &e in edges {
        let (a, b) = k.endpoints(e);
        adj.entry(a).or_default().push(e);
        adj.entry(b).or_default().push(e);
    }
    let mut done = BTreeSet::new();
    let mut out = Vec::new();
    for &start in adj.keys() {
        if done.contains(&start) {
            continue;
        }
        let mut verts = BTreeSet::new();
        let mut es = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        done.insert(start);
        while let Some(x) = queue.pop_front() {
            verts.insert(k.id(x).clone());
            for &e in &adj[&x] {
                es.insert(k.id(e).clone());
                let y = k.other_endpoint(e, x);
                if done.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        out.push((verts, es.into_iter().collect()));
    }
    out
}

pub fn classify_boundary(k: &Complex, v: &VectorField, region: &CoreRegion) -> BoundaryGraph {
    let mut curve = Vec::new();
    let mut arc_edges = Vec::new();
    for &e in k.cells_of_dim(1) {
        match region_cofaces(k, region, e) {
            1 => curve.push(e),
            2 if !glued(k, v, region, e) => arc_edges.push(e),
            _ => {}
        }
    }
    let mut degree: BTreeMap<CellId, usize> = BTreeMap::new();
    for &e in &curve {
        let (a, b) = k.endpoints(e);
        *degree.entry(k.id(a).clone()).or_default() += 1;
        *degree.entry(k.id(b).clone()).or_default() += 1;
    }
    let comps = edge_components(k, &curve);
    let circle_count = (curve.len() + comps.len()).saturating_sub(degree.len());
    let wedge_vertices: Vec<CellId> = degree.iter().filter(|(_, &d)| d >= 4).map(|(x, _)| x.clone()).collect();
    let arcs: Vec<Vec<CellId>> = edge_components(k, &arc_edges).into_iter().map(|(_, es)| es).collect();
    let class = if !arcs.is_empty() {
        BoundaryClass::WedgesWithArcs
    } else if wedge_vertices.is_empty() {
        if comps.len() == 1 {
            BoundaryClass::Circle
        } else {
            BoundaryClass::DisjointCircles
        }
    } else if wedge_vertices.len() == 1 {
        BoundaryClass::SingleWedge
    } else {
        BoundaryClass::WedgesWithConnectingCircles
    };
    BoundaryGraph {
        edges: curve.iter().map(|&e| k.id(e).clone()).collect(),
        degree,
        components: comps.into_iter().map(|(vs, _)| vs).collect(),
        circle_count,
        wedge_vertices,
        arcs,
        class,
    }
}

/// Region 2-cells around a vertex joined through glued edges, with the free
/// (cell, edge) sides that bound them.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Run {
    vertex: CellId,
    joined: Vec<CellId>,
    cells: Vec<CellId>,
    sides: Vec<(CellId, CellId)>,
}

fn runs_at(k: &Complex, v: &VectorField, region: &CoreRegion, x: usize) -> Vec<Run> {
    let rot = k.rotation(x);
    let n = rot.len();
    let in_r = |i: usize| region.cells.contains(k.id(rot[i % n].1));
    let join = |i: usize| glued(k, v, region, rot[i % n].0);
    if n == 0 || !(0..n).any(in_r) {
        return Vec::new();
    }
    let Some(s) = (0..n).find(|&i| !join(i)) else {
        return vec![Run {
            vertex: k.id(x).clone(),
            joined: rot.iter().map(|&(e, _)| k.id(e).clone()).collect(),
            cells: rot.iter().map(|&(_, c)| k.id(c).clone()).collect(),
            sides: Vec::new(),
        }];
    };
    let mut runs: Vec<Run> = Vec::new();
    let mut open = false;
    for i in s..s + n {
        if !in_r(i) {
            open = false;
            continue;
        }
        let (e, c) = (k.id(rot[i % n].0).clone(), k.id(rot[i % n].1).clone());
        if open && join(i) {
            let run = runs.last_mut().unwrap();
            run.joined.push(e);
            run.cells.push(c);
        } else {
            runs.push(Run { vertex: k.id(x).clone(), joined: Vec::new(), cells: vec![c.clone()], sides: vec![(c, e)] });
            open = true;
        }
        if !join(i + 1) {
            let run = runs.last_mut().unwrap();
            let last = run.cells.last().unwrap().clone();
            run.sides.push((last, k.id(rot[(i + 1) % n].0).clone()));
            open = false;
        }
    }
    runs
}

/// Slides a run of region cells off its vertex onto a new vertex joined by a
/// spoke; each free side gets a parallel copy and a paired prism between them.
fn push_run(work: &mut Work, run: &Run) {
    let x = &run.vertex;
    let swap = |b: &[CellId], to: &CellId| -> Vec<CellId> { b.iter().map(|y| if y == x { to.clone() } else { y.clone() }).collect() };
    let xp = work.table.fresh(x);
    work.table.insert(CellRecord::new(xp.clone(), 0, Vec::new(), Tag::Bisection));
    let spoke = work.table.fresh(x);
    work.table.insert(CellRecord::new(spoke.clone(), 1, vec![x.clone(), xp.clone()], Tag::Bisection));
    for g in &run.joined {
        let nb = swap(work.table.boundary(g), &xp);
        work.table.set_boundary(g, nb);
    }
    let mut new_cells = vec![xp.clone(), spoke.clone()];
    let mut new_pairings = vec![(xp.clone(), spoke.clone())];
    for (c, s) in &run.sides {
        let sp = work.table.fresh(s);
        let sb = swap(work.table.boundary(s), &xp);
        work.table.insert(CellRecord::new(sp.clone(), 1, sb, Tag::Bisection));
        let p = work.table.fresh(s);
        work.table.insert(CellRecord::new(p.clone(), 2, vec![s.clone(), sp.clone(), spoke.clone()], Tag::Bisection));
        let cb: Vec<CellId> = work.table.boundary(c).iter().map(|y| if y == s { sp.clone() } else { y.clone() }).collect();
        work.table.set_boundary(c, cb);
        work.field.pair(sp.clone(), p.clone());
        new_cells.extend([sp.clone(), p.clone()]);
        new_pairings.push((sp, p));
    }
    work.field.pair(xp, spoke);
    work.log.push(BisectionRecord { old_cell: x.clone(), new_cells, new_pairings, successor: x.clone() });
}

fn rebuild(work: Work, region: &CoreRegion) -> Result<(Complex, VectorField, CoreRegion)> {
    Ok((work.build()?, work.field, region.clone()))
}

/// Detaches every run at a wedge vertex except the first.
pub fn resolve_wedge(
    k: &Complex,
    v: &VectorField,
    region: &CoreRegion,
    vertex: &CellId,
) -> Result<(Complex, VectorField, CoreRegion)> {
    let mut work = Work::new(k, v);
    loop {
        let kk = work.build()?;
        let runs = runs_at(&kk, &work.field, region, kk.get(vertex)?);
        if runs.len() < 2 {
            break;
        }
        push_run(&mut work, &runs[1]);
    }
    rebuild(work, region)
}

/// Moves an arc out of the region by detaching, at both ends of every arc
/// edge, the runs of its larger coface.
pub fn resolve_arc(
    k: &Complex,
    v: &VectorField,
    region: &CoreRegion,
    arc: &[CellId],
) -> Result<(Complex, VectorField, CoreRegion)> {
    let mut work = Work::new(k, v);
    for e in arc {
        let ei = k.get(e)?;
        if region_cofaces(k, region, ei) != 2 {
            return Err(Error::InconsistentField(e.clone()));
        }
        let cell = k.id(*k.cofaces(ei).iter().max_by(|a, b| k.id(**a).cmp(k.id(**b))).unwrap()).clone();
        let (a, b) = k.endpoints(ei);
        for x in [k.id(a).clone(), k.id(b).clone()] {
            let kk = work.build()?;
            let runs = runs_at(&kk, &work.field, region, kk.get(&x)?);
            if let Some(run) = runs.into_iter().find(|r| r.cells.contains(&cell)) {
                if !run.sides.is_empty() {
                    push_run(&mut work, &run);
                }
            }
        }
    }
    rebuild(work, region)
}

/// Next repair: the critical vertex or a low edge touching the region, then
/// any vertex with two runs or with an arc as a side.
fn next_push(k: &Complex, v: &VectorField, region: &CoreRegion, low: &[CellId], minimum: &CellId) -> Result<Option<Run>> {
    if let Some(run) = runs_at(k, v, region, k.get(minimum)?).into_iter().next() {
        if run.sides.is_empty() {
            return Err(Error::Unsupported);
        }
        return Ok(Some(run));
    }
    for e in low {
        let ei = k.get(e)?;
        for &c in k.cofaces(ei) {
            if region.cells.contains(k.id(c)) {
                let (a, _) = k.endpoints(ei);
                let run = runs_at(k, v, region, a).into_iter().find(|r| r.cells.contains(k.id(c)));
                return Ok(run);
            }
        }
    }
    for &x in k.cells_of_dim(0) {
        let runs = runs_at(k, v, region, x);
        if runs.len() >= 2 {
            return Ok(Some(runs[1].clone()));
        }
        if let [run] = runs.as_slice() {
            let arc_side = run.sides.iter().any(|(_, s)| k.index_of(s.as_str()).is_some_and(|s| region_cofaces(k, region, s) == 2));
            if arc_side {
                return Ok(Some(run.clone()));
            }
        }
    }
    Ok(None)
}

/// Edges of a simple closed curve in walking order, starting at its smallest
/// vertex towards the smaller neighbour.
fn order_circle(k: &Complex, edges: &BTreeSet<usize>) -> Result<(Vec<CellId>, Vec<CellId>)> {
    let mut at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &e in edges {
        let (a, b) = k.endpoints(e);
        at.entry(a).or_default().push(e);
        at.entry(b).or_default().push(e);
    }
    if at.values().any(|es| es.len() != 2) || edges.is_empty() {
        return Err(Error::NotSeparating);
    }
    let start = *at.keys().min_by(|a, b| k.id(**a).cmp(k.id(**b))).unwrap();
    let inc = &at[&start];
    let pick = |e: usize| k.id(k.other_endpoint(e, start)).clone();
    let mut e = if pick(inc[0]) <= pick(inc[1]) { inc[0] } else { inc[1] };
    let mut x = start;
    let mut verts = Vec::new();
    let mut walk = Vec::new();
    loop {
        verts.push(k.id(x).clone());
        walk.push(k.id(e).clone());
        x = k.other_endpoint(e, x);
        if x == start {
            break;
        }
        let pair = &at[&x];
        e = if pair[0] == e { pair[1] } else { pair[0] };
    }
    if walk.len() != edges.len() {
        return Err(Error::DisjointCircles(edge_components(k, &edges.iter().copied().collect::<Vec<_>>()).len()));
    }
    Ok((walk, verts))
}

#[derive(Debug, Clone)]
pub struct CircleSearch {
    pub complex: Complex,
    pub field: VectorField,
    /// Injective function on the input complex the edges were ranked by.
    pub function: MorseFunction,
    pub circle: Vec<CellId>,
    pub region: CoreRegion,
    pub low: Vec<CellId>,
    pub minimum: CellId,
    pub initial: BoundaryGraph,
    pub log: Vec<BisectionRecord>,
    pub pushes: usize,
}

pub fn find_separating_circle(k: &Complex, f: &MorseFunction, g1: usize, g2: usize) -> Result<CircleSearch> {
    let info = k.verify_closed_surface()?;
    if !info.orientable {
        return Err(Error::NonOrientableInput);
    }
    if g1 + g2 == 0 {
        return Err(Error::NothingToDecompose);
    }
    let f = if is_injective(f) { f.clone() } else { make_injective(k, f)? };
    let v = induced_field(k, &f)?;
    if !is_perfect(k, &v) {
        return Err(Error::NotPerfectInput);
    }
    let split = select_split_edges(k, &f, g1, g2)?;
    let (_, crit) = critical_cells(&v, k);
    let minimum = crit[0].first().cloned().ok_or(Error::NotPerfectInput)?;
    let mut work = Work::new(k, &v);
    separate_in(&mut work)?;
    let low: Vec<CellId> = split.low.iter().map(|e| work.current(e)).collect();
    let high: Vec<CellId> = split.high.iter().map(|e| work.current(e)).collect();
    let kk = work.build()?;
    let region = carve_core(&kk, &work.field, &high)?;
    let initial = classify_boundary(&kk, &work.field, &region);
    let mut pushes = 0;
    loop {
        let kk = work.build()?;
        match next_push(&kk, &work.field, &region, &low, &minimum)? {
            Some(run) => {
                push_run(&mut work, &run);
                pushes += 1;
            }
            None => break,
        }
    }
    let complex = work.build()?;
    let graph = classify_boundary(&complex, &work.field, &region);
    if graph.class != BoundaryClass::Circle {
        return Err(Error::DisjointCircles(graph.components.len()));
    }
    let edges: BTreeSet<usize> = graph.edges.iter().map(|e| complex.get(e)).collect::<Result<_>>()?;
    let (circle, _) = order_circle(&complex, &edges)?;
    Ok(CircleSearch { complex, field: work.field, function: f, circle, region, low, minimum, initial, log: work.log, pushes })
}

#[derive(Debug, Clone)]
pub struct Piece {
    pub complex: Complex,
    pub field: VectorField,
    pub circle: Vec<CellId>,
    /// Circle vertices and edges left unpaired by the restricted field.
    pub boundary_critical: (usize, usize),
}

impl Piece {
    fn new(k: &Complex, v: &VectorField, cells: &BTreeSet<usize>, circle: &[CellId]) -> Result<Piece> {
        let complex = k.subcomplex(cells)?;
        let field = v.restrict(|c| complex.contains(c.as_str()));
        let mut piece = Piece { complex, field, circle: circle.to_vec(), boundary_critical: (0, 0) };
        let verts = piece.circle_vertices();
        let bv = verts.iter().filter(|x| !piece.field.is_matched(x)).count();
        let be = circle.iter().filter(|x| !piece.field.is_matched(x)).count();
        piece.boundary_critical = (bv, be);
        Ok(piece)
    }

    /// Vertices of the circle in walking order, `verts[i]` starting edge `i`.
    pub fn circle_vertices(&self) -> Vec<CellId> {
        let k = &self.complex;
        let n = self.circle.len();
        let edge = |i: usize| k.get(&self.circle[i % n]).expect("circle edge");
        let (a, b) = k.endpoints(edge(0));
        let (c, d) = k.endpoints(edge(1));
        let mut x = if a == c || a == d { b } else { a };
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(k.id(x).clone());
            x = k.other_endpoint(edge(i), x);
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.complex.euler_characteristic()
    }
}

/// Cuts along a separating curve. The side holding the critical 2-cell is
/// the max side; circle cells must not be paired into its interior.
pub fn split_along_circle(k: &Complex, v: &VectorField, circle: &[CellId]) -> Result<(Piece, Piece)> {
    let cut: BTreeSet<usize> = circle.iter().map(|e| k.get(e)).collect::<Result<_>>()?;
    if cut.iter().any(|&e| k.cell_dim(e) != 1 || k.cofaces(e).len() != 2) {
        return Err(Error::NotSeparating);
    }
    let faces = k.cells_of_dim(2);
    let mut side: BTreeMap<usize, usize> = BTreeMap::new();
    let mut count = 0;
    for &start in faces {
        if side.contains_key(&start) {
            continue;
        }
        side.insert(start, count);
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for &e in k.boundary(c) {
                if cut.contains(&e) {
                    continue;
                }
                for &d in k.cofaces(e) {
                    if let alloc::collections::btree_map::Entry::Vacant(slot) = side.entry(d) {
                        slot.insert(count);
                        queue.push_back(d);
                    }
                }
            }
        }
        count += 1;
    }
    if count != 2 {
        return Err(Error::NotSeparating);
    }
    let critical = k.get(&critical_2cell(k, v)?)?;
    let max_label = side[&critical];
    let pick = |label: usize| -> BTreeSet<usize> { side.iter().filter(|(_, &s)| s == label).map(|(&c, _)| c).collect() };
    let (max_cells, min_cells) = (pick(max_label), pick(1 - max_label));
    let close = |cells: &BTreeSet<usize>| -> BTreeSet<usize> { cells.iter().flat_map(|&c| k.closure(c)).collect() };
    let (max_all, min_all) = (close(&max_cells), close(&min_cells));
    let on_circle: BTreeSet<usize> = cut.iter().flat_map(|&e| k.closure(e)).collect();
    let shared: BTreeSet<usize> = max_all.intersection(&min_all).copied().collect();
    if shared != on_circle {
        return Err(Error::NotSeparating);
    }
    for &s in &on_circle {
        if let Some(t) = v.partner(k.id(s)) {
            let ti = k.get(t)?;
            if max_all.contains(&ti) && !on_circle.contains(&ti) {
                return Err(Error::InconsistentField(k.id(s).clone()));
            }
        }
    }
    let min = Piece::new(k, v, &min_cells, circle)?;
    let max = Piece::new(k, v, &max_cells, circle)?;
    Ok((min, max))
}

pub fn cone_apex() -> CellId {
    CellId::new("cone:apex")
}

pub fn cone_over(c: &CellId) -> CellId {
    CellId::new(format!("cone:{c}"))
}

fn add_cone(piece: &Piece) -> Result<Complex> {
    let mut recs = piece.complex.records();
    recs.push(CellRecord::new(cone_apex(), 0, Vec::new(), Tag::Cone));
    for u in piece.circle_vertices() {
        recs.push(CellRecord::new(cone_over(&u), 1, vec![u.clone(), cone_apex()], Tag::Cone));
    }
    for e in &piece.circle {
        let (a, b) = piece.complex.endpoints(piece.complex.get(e)?);
        let (a, b) = (piece.complex.id(a), piece.complex.id(b));
        recs.push(CellRecord::new(cone_over(e), 2, vec![e.clone(), cone_over(a), cone_over(b)], Tag::Cone));
    }
    Complex::from_records(recs)
}

/// Caps the max side with a cone whose apex becomes the critical vertex.
pub fn cap_with_min_cone(piece: &Piece) -> Result<(Complex, VectorField)> {
    let (vertices, edges) = piece.boundary_critical;
    if vertices != edges {
        return Err(Error::UnbalancedBoundaryCriticals { vertices, edges });
    }
    let complex = add_cone(piece)?;
    let mut field = piece.field.clone();
    for c in piece.circle_vertices().iter().chain(&piece.circle) {
        match piece.field.partner(c) {
            None => field.pair(c.clone(), cone_over(c)),
            Some(p) if piece.circle.contains(p) => field.pair(cone_over(c), cone_over(p)),
            Some(_) => {}
        }
    }
    Ok((complex, field))
}

/// Caps the min side with a fan: every radial edge but the last is paired
/// with the cone triangle ahead of it, the apex with the last radial edge,
/// and the last triangle stays critical.
pub fn cap_with_max_cone(piece: &Piece) -> Result<(Complex, VectorField)> {
    let verts = piece.circle_vertices();
    if let Some(c) = verts.iter().chain(&piece.circle).find(|c| !piece.field.is_matched(c)) {
        return Err(Error::BoundaryCriticalPresent(c.clone()));
    }
    let complex = add_cone(piece)?;
    let mut field = piece.field.clone();
    let n = verts.len();
    for i in 0..n - 1 {
        field.pair(cone_over(&verts[i]), cone_over(&piece.circle[i]));
    }
    field.pair(cone_apex(), cone_over(&verts[n - 1]));
    Ok((complex, field))
}

#[derive(Debug, Clone)]
pub struct Capped {
    pub complex: Complex,
    pub field: VectorField,
    pub function: MorseFunction,
    /// Whether the function keeps the input values on retained cells.
    pub extended: bool,
    pub genus: usize,
    pub perfect: bool,
    pub field_valid: bool,
}

fn finish(complex: Complex, field: VectorField, f: &MorseFunction) -> Result<Capped> {
    let fixed: MorseFunction = f.iter().filter(|(c, _)| complex.contains(c.as_str())).map(|(c, x)| (c.clone(), x)).collect();
    let (function, extended) = match extend_function(&complex, &field, &fixed) {
        Ok(g) => (g, true),
        Err(_) => (synthesize_function(&complex, &field)?, false),
    };
    let genus = ((2 - complex.euler_characteristic()) / 2).max(0) as usize;
    Ok(Capped {
        perfect: is_perfect(&complex, &field),
        field_valid: validate_field(&complex, &field).ok,
        complex,
        field,
        function,
        extended,
        genus,
    })
}

#[derive(Debug, Clone)]
pub struct SplitResult {
    /// The input surface after separation and boundary repair.
    pub surface: Complex,
    pub field: VectorField,
    pub circle: Vec<CellId>,
    pub min_side: Piece,
    pub max_side: Piece,
    pub m1: Capped,
    pub m2: Capped,
    pub initial: BoundaryGraph,
    pub bisections: Vec<BisectionRecord>,
    pub pushes: usize,
}

pub fn decompose(k: &Complex, f: &MorseFunction, g1: usize, g2: usize) -> Result<SplitResult> {
    let search = find_separating_circle(k, f, g1, g2)?;
    let (min_side, max_side) = split_along_circle(&search.complex, &search.field, &search.circle)?;
    let (c1, v1) = cap_with_max_cone(&min_side)?;
    let (c2, v2) = cap_with_min_cone(&max_side)?;
    let m1 = finish(c1, v1, &search.function)?;
    let m2 = finish(c2, v2, &search.function)?;
    Ok(SplitResult {
        surface: search.complex,
        field: search.field,
        circle: search.circle,
        min_side,
        max_side,
        m1,
        m2,
        initial: search.initial,
        bisections: search.log,
        pushes: search.pushes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_simplicial;

    fn id(s: &str) -> CellId {
        s.into()
    }

    fn tetra() -> Complex {
        build_simplicial(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]], true).unwrap()
    }

    fn tetra_field() -> VectorField {
        VectorField::from_pairs([
            (id("v1"), id("e0-1")),
            (id("v2"), id("e0-2")),
            (id("v3"), id("e0-3")),
            (id("e1-2"), id("t0-1-2")),
            (id("e1-3"), id("t0-1-3")),
            (id("e2-3"), id("t0-2-3")),
        ])
    }

    #[test]
    fn sphere_has_nothing_to_split() {
        let k = tetra();
        let f = synthesize_function(&k, &tetra_field()).unwrap();
        assert!(matches!(select_split_edges(&k, &f, 0, 0), Err(Error::NothingToDecompose)));
        assert!(matches!(select_split_edges(&k, &f, 1, 0), Err(Error::WrongCriticalCount { expected: 2, found: 0 })));
    }

    #[test]
    fn sphere_cut_along_critical_triangle() {
        let k = tetra();
        let v = tetra_field();
        let region = carve_core(&k, &v, &[]).unwrap();
        assert_eq!(region.cells.len(), 1);
        let graph = classify_boundary(&k, &v, &region);
        assert_eq!(graph.class, BoundaryClass::Circle);
        assert_eq!(graph.circle_count, 1);
        let circle = [id("e1-2"), id("e2-3"), id("e1-3")];
        let (min, max) = split_along_circle(&k, &v, &circle).unwrap();
        assert_eq!(min.euler_characteristic(), 1);
        assert_eq!(max.euler_characteristic(), 1);
        assert_eq!(max.boundary_critical.0, max.boundary_critical.1);
        let (c2, v2) = cap_with_min_cone(&max).unwrap();
        assert!(validate_field(&c2, &v2).ok);
        assert!(is_perfect(&c2, &v2));
        let (c1, v1) = cap_with_max_cone(&min).unwrap();
        assert!(validate_field(&c1, &v1).ok);
        assert!(is_perfect(&c1, &v1));
        assert!(matches!(split_along_circle(&k, &v, &circle[..2]), Err(Error::NotSeparating)));
    }

    #[test]
    fn max_cone_rejects_boundary_critical() {
        let k = tetra();
        let v = tetra_field();
        let circle = [id("e1-2"), id("e2-3"), id("e1-3")];
        let (_, max) = split_along_circle(&k, &v, &circle).unwrap();
        assert!(matches!(cap_with_max_cone(&max), Err(Error::BoundaryCriticalPresent(_))));
    }
}
