use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::{CellId, CellRecord, CellTable, Complex, Tag};
use crate::error::{Error, Result};
use crate::field::{
    critical_cells, extend_function, induced_field, is_perfect, synthesize_function, validate_field,
    validate_function, MorseCounts, MorseFunction, VectorField,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisectionRecord {
    pub old_cell: CellId,
    pub new_cells: Vec<CellId>,
    pub new_pairings: Vec<(CellId, CellId)>,
    /// The new cell that took over the old cell's pair or criticality.
    pub successor: CellId,
}

/// A complex under surgery together with its vector field.
#[derive(Debug, Clone)]
pub(crate) struct Work {
    pub table: CellTable,
    pub field: VectorField,
    pub log: Vec<BisectionRecord>,
}

pub(crate) struct EdgeSplit {
    pub vertex: CellId,
    /// (endpoint, half containing it)
    pub halves: [(CellId, CellId); 2],
}

impl EdgeSplit {
    pub fn half_at(&self, endpoint: &CellId) -> &CellId {
        if self.halves[0].0 == *endpoint {
            &self.halves[0].1
        } else {
            &self.halves[1].1
        }
    }
}

pub(crate) struct CellSplit {
    /// (cell, its boundary vertices)
    pub pieces: [(CellId, Vec<CellId>); 2],
}

impl CellSplit {
    pub fn piece_without(&self, x: &CellId) -> &CellId {
        if self.pieces[0].1.contains(x) {
            &self.pieces[1].0
        } else {
            &self.pieces[0].0
        }
    }
}

impl Work {
    pub fn new(k: &Complex, v: &VectorField) -> Work {
        Work { table: CellTable::from_complex(k), field: v.clone(), log: Vec::new() }
    }

    pub fn build(&self) -> Result<Complex> {
        self.table.build()
    }

    pub fn is_critical(&self, c: &CellId) -> bool {
        !self.field.is_matched(c)
    }

    fn add(&mut self, base: &CellId, dim: usize, boundary: Vec<CellId>) -> CellId {
        let id = self.table.fresh(base);
        self.table.insert(CellRecord::new(id.clone(), dim, boundary, Tag::Bisection));
        id
    }

    /// Splits edge `e` at a new vertex. The half at `keep` inherits the edge's
    /// role unless a vertex pairing forces the other half.
    pub fn split_edge(&mut self, e: &CellId, keep: Option<&CellId>) -> Result<EdgeSplit> {
        if self.table.get(e).map(|r| r.dim) != Some(1) {
            return Err(Error::NotAnEdge(e.clone()));
        }
        let (a, b) = self.table.endpoints(e);
        let owner = self.field.down(e).cloned();
        let near = match (&owner, keep) {
            (Some(u), _) => u.clone(),
            (None, Some(k)) if *k == a || *k == b => k.clone(),
            _ => a.clone(),
        };
        let far = if near == a { b.clone() } else { a.clone() };
        let w = self.add(e, 0, Vec::new());
        let e1 = self.add(e, 1, vec![near.clone(), w.clone()]);
        let e2 = self.add(e, 1, vec![w.clone(), far.clone()]);
        self.table.replace_face(e, &[e1.clone(), e2.clone()]);
        self.table.remove(e);
        match self.field.unpair(e) {
            Some((u, x)) if x == *e => self.field.pair(u, e1.clone()),
            Some((_, t)) => self.field.pair(e1.clone(), t),
            None => {}
        }
        self.field.pair(w.clone(), e2.clone());
        self.log.push(BisectionRecord {
            old_cell: e.clone(),
            new_cells: vec![w.clone(), e1.clone(), e2.clone()],
            new_pairings: vec![(w.clone(), e2.clone())],
            successor: e1.clone(),
        });
        Ok(EdgeSplit { vertex: w, halves: [(near, e1), (far, e2)] })
    }

    /// Cuts 2-cell `c` along a chord from `u` to `w`. The piece containing
    /// `keep` inherits the cell's role unless its pairing forces the choice.
    pub fn split_cell(&mut self, c: &CellId, u: &CellId, w: &CellId, keep: Option<&CellId>) -> Result<CellSplit> {
        if self.table.get(c).map(|r| r.dim) != Some(2) {
            return Err(Error::NotA2Cell(c.clone()));
        }
        let bad = || Error::BadChord { cell: c.clone(), u: u.clone(), w: w.clone() };
        let (verts, edges) = self.table.cycle(c);
        let k = verts.len();
        let iu = verts.iter().position(|x| x == u).ok_or_else(bad)?;
        let iw = verts.iter().position(|x| x == w).ok_or_else(bad)?;
        let gap = (iw + k - iu) % k;
        if gap <= 1 || gap == k - 1 {
            return Err(bad());
        }
        let arc = |from: usize, len: usize| -> (Vec<CellId>, Vec<CellId>) {
            let vs = (0..=len).map(|j| verts[(from + j) % k].clone()).collect();
            let es = (0..len).map(|j| edges[(from + j) % k].clone()).collect();
            (vs, es)
        };
        let (va, ea) = arc(iu, gap);
        let (vb, eb) = arc(iw, k - gap);
        let d = self.add(c, 1, vec![u.clone(), w.clone()]);
        let mut ba = ea.clone();
        ba.push(d.clone());
        let mut bb = eb.clone();
        bb.push(d.clone());
        let c1 = self.add(c, 2, ba);
        let c2 = self.add(c, 2, bb);
        let in_a = |x: &CellId| va.contains(x) || ea.contains(x);
        let old = self.field.unpair(c);
        let succ_is_a = match &old {
            Some((g, x)) if x == c => in_a(g),
            _ => keep.map(in_a).unwrap_or(true),
        };
        let (succ, other) = if succ_is_a { (c1.clone(), c2.clone()) } else { (c2.clone(), c1.clone()) };
        match old {
            Some((g, x)) if x == *c => self.field.pair(g, succ.clone()),
            Some((_, up)) => self.field.pair(succ.clone(), up),
            None => {}
        }
        self.field.pair(d.clone(), other.clone());
        self.table.replace_face(c, &[c1.clone(), c2.clone()]);
        self.table.remove(c);
        self.log.push(BisectionRecord {
            old_cell: c.clone(),
            new_cells: vec![d.clone(), c1.clone(), c2.clone()],
            new_pairings: vec![(d.clone(), other)],
            successor: succ,
        });
        Ok(CellSplit { pieces: [(c1, va), (c2, vb)] })
    }

    /// Follows bisection successors from a cell to its current descendant.
    pub fn current(&self, c: &CellId) -> CellId {
        let mut c = c.clone();
        while !self.table.contains(c.as_str()) {
            match self.log.iter().rev().find(|r| r.old_cell == c) {
                Some(r) => c = r.successor.clone(),
                None => break,
            }
        }
        c
    }
}

pub fn bisect_edge(k: &Complex, v: &VectorField, e: &CellId) -> Result<(Complex, VectorField, BisectionRecord)> {
    let mut w = Work::new(k, v);
    w.split_edge(e, None)?;
    let rec = w.log.pop().expect("record");
    Ok((w.build()?, w.field, rec))
}

pub fn bisect_2cell(
    k: &Complex,
    v: &VectorField,
    c: &CellId,
    u: &CellId,
    w: &CellId,
) -> Result<(Complex, VectorField, BisectionRecord)> {
    let mut work = Work::new(k, v);
    work.split_cell(c, u, w, None)?;
    let rec = work.log.pop().expect("record");
    Ok((work.build()?, work.field, rec))
}

/// Closed star: closures of every cell having `c` as a face.
pub fn closed_star(k: &Complex, c: usize) -> BTreeSet<usize> {
    let mut up = BTreeSet::new();
    let mut stack = vec![c];
    while let Some(x) = stack.pop() {
        if up.insert(x) {
            stack.extend_from_slice(k.cofaces(x));
        }
    }
    let mut out = BTreeSet::new();
    for x in up {
        out.extend(k.closure(x));
    }
    out
}

/// Pairs of critical cells that share a vertex or lie in each other's closed star.
pub fn critical_clashes(k: &Complex, v: &VectorField) -> Vec<(CellId, CellId)> {
    let crit: Vec<usize> = (0..k.len()).filter(|&i| !v.is_matched(k.id(i))).collect();
    let stars: Vec<BTreeSet<usize>> = crit.iter().map(|&c| closed_star(k, c)).collect();
    let verts: Vec<BTreeSet<usize>> = crit.iter().map(|&c| k.vertices_of(c).into_iter().collect()).collect();
    let mut out = Vec::new();
    for i in 0..crit.len() {
        for j in i + 1..crit.len() {
            if stars[i].contains(&crit[j]) || stars[j].contains(&crit[i]) || !verts[i].is_disjoint(&verts[j]) {
                out.push((k.id(crit[i]).clone(), k.id(crit[j]).clone()));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Separation {
    pub complex: Complex,
    pub field: VectorField,
    pub log: Vec<BisectionRecord>,
    /// Critical cell of the input -> its critical descendant.
    pub lineage: BTreeMap<CellId, CellId>,
}

pub fn separate_critical_cells(k: &Complex, v: &VectorField) -> Result<Separation> {
    let mut work = Work::new(k, v);
    separate_in(&mut work)?;
    let complex = work.build()?;
    let (_, crit) = critical_cells(v, k);
    let lineage = crit.into_iter().flatten().map(|c| (c.clone(), work.current(&c))).collect();
    Ok(Separation { complex, field: work.field, log: work.log, lineage })
}

pub(crate) fn separate_in(work: &mut Work) -> Result<()> {
    loop {
        let k = work.build()?;
        let clashes = critical_clashes(&k, &work.field);
        if clashes.is_empty() {
            return Ok(());
        }
        if let Some(next) = cheap_separation(work, &k, clashes.len())? {
            *work = next;
            continue;
        }
        if k.dim() != 2 {
            return Err(Error::Unsupported);
        }
        refine_around_critical(work)?;
        let k = work.build()?;
        if !critical_clashes(&k, &work.field).is_empty() {
            return Err(Error::Unsupported);
        }
        return Ok(());
    }
}

/// Bisects one critical edge so its critical half leaves a shared vertex.
fn cheap_separation(work: &Work, k: &Complex, count: usize) -> Result<Option<Work>> {
    for (a, b) in critical_clashes(k, &work.field) {
        for (e, other) in [(&a, &b), (&b, &a)] {
            let ei = k.get(e)?;
            if k.cell_dim(ei) != 1 {
                continue;
            }
            let (x, y) = k.endpoints(ei);
            let theirs: BTreeSet<usize> = k.vertices_of(k.get(other)?).into_iter().collect();
            let far = match (theirs.contains(&x), theirs.contains(&y)) {
                (true, false) => y,
                (false, true) => x,
                _ => continue,
            };
            let mut trial = work.clone();
            trial.split_edge(e, Some(k.id(far)))?;
            let tk = trial.build()?;
            if critical_clashes(&tk, &trial.field).len() < count {
                return Ok(Some(trial));
            }
        }
    }
    Ok(None)
}

/// Splits every edge into six segments (a critical edge keeps the third one),
/// cuts every corner and every edge cap off each 2-cell, leaving critical
/// cells with closed stars made of fresh non-critical cells.
fn refine_around_critical(work: &mut Work) -> Result<()> {
    let k = work.build()?;
    let edges: Vec<CellId> = k.cells_of_dim(1).iter().map(|&e| k.id(e).clone()).collect();
    let faces: Vec<CellId> = k.cells_of_dim(2).iter().map(|&c| k.id(c).clone()).collect();
    let mut chain: BTreeMap<CellId, Vec<CellId>> = BTreeMap::new();
    for e in &edges {
        let critical = work.is_critical(e);
        let (a, b) = work.table.endpoints(e);
        let mut seq = vec![a.clone()];
        let mut seg = e.clone();
        for step in 0..5 {
            let near = seq.last().unwrap().clone();
            let keep = if critical && step == 2 { near } else { b.clone() };
            let split = work.split_edge(&seg, Some(&keep))?;
            seq.push(split.vertex.clone());
            seg = split.half_at(&b).clone();
        }
        seq.push(b);
        chain.insert(e.clone(), seq);
    }
    for t in &faces {
        let (corners, _) = {
            let (verts, _) = work.table.cycle(t);
            let originals: Vec<CellId> = verts.into_iter().filter(|x| k.contains(x.as_str())).collect();
            (originals, ())
        };
        let sides: Vec<CellId> = k.boundary(k.get(t)?).iter().map(|&e| k.id(e).clone()).collect();
        let mut cur = t.clone();
        for x in &corners {
            let (verts, _) = work.table.cycle(&cur);
            let n = verts.len();
            let i = verts.iter().position(|y| y == x).expect("corner on cell");
            let (p, q) = (verts[(i + n - 1) % n].clone(), verts[(i + 1) % n].clone());
            let keep = verts[(i + 2) % n].clone();
            let split = work.split_cell(&cur, &p, &q, Some(&keep))?;
            cur = split.piece_without(x).clone();
        }
        for e in &sides {
            let seq = &chain[e];
            let (verts, _) = work.table.cycle(&cur);
            let keep = verts.iter().find(|y| !seq.contains(y)).expect("vertex off the cap").clone();
            let split = work.split_cell(&cur, &seq[1], &seq[5], Some(&keep))?;
            cur = split.piece_without(&seq[3]).clone();
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TubeRegion {
    pub base: Vec<CellId>,
    pub top: Vec<CellId>,
    pub prisms: Vec<CellId>,
    pub cells: Vec<CellRecord>,
}

pub fn tube_top(sigma: &CellId) -> CellId {
    CellId::new(format!("tube:{sigma}:top"))
}

pub fn tube_prism(sigma: &CellId) -> CellId {
    CellId::new(format!("tube:{sigma}:prism"))
}

fn tube_over(table: &CellTable, alpha: &CellId) -> TubeRegion {
    let mut base: Vec<CellId> = table.closure(alpha).into_iter().filter(|c| c != alpha).collect();
    base.sort_by(|a, b| table.dim(a).cmp(&table.dim(b)).then(a.cmp(b)));
    let mut cells = Vec::new();
    let mut top = Vec::new();
    let mut prisms = Vec::new();
    for s in &base {
        let faces = table.boundary(s);
        let t = tube_top(s);
        cells.push(CellRecord::new(t.clone(), table.dim(s), faces.iter().map(tube_top).collect(), Tag::Tube));
        let mut pb = vec![s.clone(), t.clone()];
        pb.extend(faces.iter().map(tube_prism));
        let p = tube_prism(s);
        cells.push(CellRecord::new(p.clone(), table.dim(s) + 1, pb, Tag::Tube));
        top.push(t);
        prisms.push(p);
    }
    TubeRegion { base, top, prisms, cells }
}

pub fn build_prism_over_boundary(k: &Complex, alpha: &CellId) -> Result<TubeRegion> {
    let a = k.get(alpha)?;
    if k.cell_dim(a) != k.dim() || k.dim() == 0 {
        return Err(Error::NotTopCell(alpha.clone()));
    }
    Ok(tube_over(&CellTable::from_complex(k), alpha))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerCopy {
    pub j: Vec<CellId>,
    pub j_prime: Vec<CellId>,
    pub j_second: Vec<CellId>,
    pub beta_prime: CellId,
    /// J-cell (other than v) -> J''-cell
    pub correspondence: BTreeMap<CellId, CellId>,
}

pub fn inner_copy(c: &CellId) -> CellId {
    CellId::new(format!("inner:{c}:in"))
}

pub fn inner_prism(c: &CellId) -> CellId {
    CellId::new(format!("inner:{c}"))
}

pub fn shrink_closed_star(k: &Complex, beta: &CellId, v: &CellId) -> Result<(Complex, InnerCopy)> {
    let mut work = Work::new(k, &VectorField::new());
    let copy = shrink_in(&mut work, beta, v)?;
    Ok((work.build()?, copy))
}

pub(crate) fn shrink_in(work: &mut Work, beta: &CellId, v: &CellId) -> Result<InnerCopy> {
    let table = &mut work.table;
    let b = table.get(beta).ok_or_else(|| Error::UnknownCell(beta.clone()))?;
    let n = b.dim;
    let j = table.closure(beta);
    if !j.contains(v) || table.dim(v) != 0 {
        return Err(Error::VertexNotOnCell { cell: beta.clone(), vertex: v.clone() });
    }
    if j.len() != (1usize << (n + 1)) - 1 {
        return Err(Error::NotSimplicial(beta.clone()));
    }
    let has_v: BTreeMap<CellId, bool> = j.iter().map(|c| (c.clone(), table.vertices_of(c).contains(v))).collect();
    let link: Vec<CellId> = j.iter().filter(|c| !has_v[*c]).cloned().collect();
    let mut cone: Vec<CellId> = j.iter().filter(|c| has_v[*c] && *c != v).cloned().collect();
    cone.sort_by(|a, b| table.dim(a).cmp(&table.dim(b)).then(a.cmp(b)));
    let mut opposite = BTreeMap::new();
    for r in &cone {
        let opp: Vec<&CellId> = table.boundary(r).iter().filter(|f| !has_v[*f]).collect();
        if opp.len() != 1 {
            return Err(Error::NotSimplicial(beta.clone()));
        }
        opposite.insert(r.clone(), opp[0].clone());
    }
    let mut j_prime = vec![v.clone()];
    let mut j_second = link.clone();
    let mut correspondence = BTreeMap::new();
    let mut link_sorted = link.clone();
    link_sorted.sort_by(|a, b| table.dim(a).cmp(&table.dim(b)).then(a.cmp(b)));
    for s in &link_sorted {
        let rec = CellRecord::new(
            inner_copy(s),
            table.dim(s),
            table.boundary(s).iter().map(inner_copy).collect(),
            Tag::InnerCopy,
        );
        table.insert(rec);
        j_prime.push(inner_copy(s));
        j_second.push(inner_copy(s));
        correspondence.insert(s.clone(), s.clone());
    }
    for r in &cone {
        let faces = table.boundary(r).to_vec();
        let copy_faces = faces.iter().map(|f| if f == v { v.clone() } else { inner_copy(f) }).collect();
        table.insert(CellRecord::new(inner_copy(r), table.dim(r), copy_faces, Tag::InnerCopy));
        let s = &opposite[r];
        let mut pb = vec![s.clone(), inner_copy(s)];
        pb.extend(faces.iter().filter(|f| *f != v && has_v[*f]).map(inner_prism));
        table.insert(CellRecord::new(inner_prism(r), table.dim(r), pb, Tag::InnerCopy));
        j_prime.push(inner_copy(r));
        j_second.push(inner_prism(r));
        correspondence.insert(r.clone(), inner_prism(r));
    }
    for r in &cone {
        for c in table.cofaces(r) {
            if !j.contains(&c) {
                let mut nb: Vec<CellId> = table.boundary(&c).iter().filter(|x| *x != r).cloned().collect();
                nb.push(inner_copy(r));
                nb.push(inner_prism(r));
                table.set_boundary(&c, nb);
            }
        }
    }
    for r in cone.iter().rev() {
        table.remove(r);
    }
    let touched: Vec<(CellId, CellId)> = work
        .field
        .pairs()
        .filter(|(a, b)| correspondence.contains_key(a) || correspondence.contains_key(b))
        .cloned()
        .collect();
    for (a, b) in touched {
        work.field.unpair(&a);
        let map = |x: &CellId| correspondence.get(x).cloned().unwrap_or_else(|| x.clone());
        work.field.pair(map(&a), map(&b));
    }
    j_prime.sort();
    j_second.sort();
    Ok(InnerCopy { j: j.into_iter().collect(), j_prime, j_second, beta_prime: inner_copy(beta), correspondence })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComposeReport {
    pub counts: MorseCounts,
    pub euler: i64,
    pub perfect: bool,
    pub field_valid: bool,
    pub function_valid: bool,
    /// Whether the returned function is the explicit piecewise formula.
    pub formula_used: bool,
    pub c: f64,
    /// Extra slope per dimension on tube values (zero unless ∂α carries pairs).
    pub tube_slope: f64,
    /// Constant added to the right summand's values.
    pub right_shift: f64,
    pub alpha: CellId,
    pub beta: CellId,
    pub v: CellId,
    pub bisections: Vec<BisectionRecord>,
}

#[derive(Debug, Clone)]
pub struct Composition {
    pub complex: Complex,
    pub field: VectorField,
    pub function: MorseFunction,
    pub report: ComposeReport,
}

fn prefixed(k: &Complex, f: &MorseFunction, p: &str) -> Result<(Complex, MorseFunction)> {
    let recs = k
        .records()
        .into_iter()
        .map(|r| CellRecord {
            id: r.id.prefixed(p),
            dim: r.dim,
            boundary: r.boundary.iter().map(|b| b.prefixed(p)).collect(),
            tag: r.tag,
        })
        .collect();
    Ok((Complex::from_records(recs)?, f.map_ids(|c| c.prefixed(p))))
}

fn refit(work: &Work, f: &MorseFunction) -> Result<(Complex, MorseFunction)> {
    let k = work.build()?;
    let kept: MorseFunction = f.iter().filter(|(c, _)| k.contains(c.as_str())).map(|(c, x)| (c.clone(), x)).collect();
    let g = match extend_function(&k, &work.field, &kept) {
        Ok(g) => g,
        Err(_) => synthesize_function(&k, &work.field)?,
    };
    Ok((k, g))
}

fn single_critical(v: &VectorField, k: &Complex, dim: usize) -> Result<CellId> {
    let (_, crit) = critical_cells(v, k);
    match crit.get(dim).map(|c| c.as_slice()) {
        Some([c]) => Ok(c.clone()),
        _ => Err(Error::NotPerfectInput),
    }
}

/// Connected sum of two closed pseudomanifolds carrying perfect functions.
pub fn compose(m1: &Complex, f1: &MorseFunction, m2: &Complex, f2: &MorseFunction) -> Result<Composition> {
    let n = m1.dim();
    if n != m2.dim() {
        return Err(Error::DimensionMismatch(n, m2.dim()));
    }
    for m in [m1, m2] {
        if !m.flags().pseudomanifold {
            let bad = m.cells_of_dim(n.saturating_sub(1)).iter().copied().find(|&c| m.cofaces(c).len() != 2);
            return Err(Error::NonPseudomanifold(m.id(bad.unwrap_or(0)).clone()));
        }
    }
    let (m1, f1) = prefixed(m1, f1, "m1:")?;
    let (m2, f2) = prefixed(m2, f2, "m2:")?;
    let v1 = induced_field(&m1, &f1)?;
    let v2 = induced_field(&m2, &f2)?;
    if !is_perfect(&m1, &v1) || !is_perfect(&m2, &v2) {
        return Err(Error::NotPerfectInput);
    }
    let mut alpha = single_critical(&v1, &m1, n)?;
    let v = single_critical(&v2, &m2, 0)?;

    let mut w1 = Work::new(&m1, &v1);
    if n == 2 {
        loop {
            let (verts, edges) = w1.table.cycle(&alpha);
            let k = verts.len();
            let Some(i) = edges.iter().position(|e| w1.is_critical(e)) else { break };
            if k == 3 {
                w1.split_edge(&edges[i].clone(), Some(&verts[i].clone()))?;
                continue;
            }
            let (p, x, y) = (verts[(i + k - 1) % k].clone(), verts[i].clone(), verts[(i + 1) % k].clone());
            let keep = verts[(i + 2) % k].clone();
            let split = w1.split_cell(&alpha, &p, &y, Some(&keep))?;
            alpha = split.piece_without(&x).clone();
        }
    }
    let (m1, f1) = if w1.log.is_empty() { (m1, f1) } else { refit(&w1, &f1)? };

    let mut w2 = Work::new(&m2, &v2);
    let candidates: BTreeSet<CellId> = {
        let vi = m2.get(&v)?;
        closed_star(&m2, vi)
            .into_iter()
            .filter(|&c| m2.cell_dim(c) == n && v2.is_matched(m2.id(c)))
            .map(|c| m2.id(c).clone())
            .collect()
    };
    let mut beta = candidates.into_iter().next().ok_or_else(|| Error::NoEligibleBeta(v.clone()))?;
    if n == 2 && w2.table.boundary(&beta).len() > 3 {
        let (verts, _) = w2.table.cycle(&beta);
        let k = verts.len();
        let i = verts.iter().position(|x| *x == v).expect("v on beta");
        let (a, p2) = (verts[(i + 1) % k].clone(), verts[(i + 2) % k].clone());
        let split = w2.split_cell(&beta, &v, &p2, None)?;
        beta = split.pieces.iter().find(|(_, vs)| vs.len() == 3 && vs.contains(&a)).expect("triangle piece").0.clone();
    }
    let (m2, f2) = if w2.log.is_empty() { (m2, f2) } else { refit(&w2, &f2)? };
    let v1 = w1.field.clone();
    let v2 = w2.field.clone();

    let alpha_cells = m1.closure(m1.get(&alpha)?);
    if n != 2 && alpha_cells.len() != (1usize << (n + 1)) - 1 {
        return Err(Error::NotSimplicial(alpha.clone()));
    }
    let orient1 = m1.orientation();
    let orient2 = m2.orientation();
    let alpha_walk: Vec<CellId> = if n == 2 {
        let ai = m1.get(&alpha)?;
        let flip = orient1.as_ref().and_then(|o| o.get(&ai).copied()).unwrap_or(false);
        m1.oriented_cycle(ai, flip).into_iter().map(|x| m1.id(x).clone()).collect()
    } else {
        Vec::new()
    };
    let beta_walk: Vec<CellId> = if n == 2 {
        let bi = m2.get(&beta)?;
        let flip = orient2.as_ref().and_then(|o| o.get(&bi).copied()).unwrap_or(false);
        let mut w: Vec<CellId> = m2.oriented_cycle(bi, flip).into_iter().map(|x| m2.id(x).clone()).collect();
        let i = w.iter().position(|x| *x == v).expect("v on beta");
        w.rotate_left(i);
        w
    } else {
        Vec::new()
    };

    // left side: remove α, attach the tube
    let mut t1 = CellTable::from_complex(&m1);
    let tube = tube_over(&t1, &alpha);
    t1.remove(&alpha);
    for r in &tube.cells {
        t1.insert(r.clone());
    }
    // right side: shrink the closed star of β towards v
    let mut w2 = Work { table: CellTable::from_complex(&m2), field: v2.clone(), log: Vec::new() };
    let copy = shrink_in(&mut w2, &beta, &v)?;
    let bp = copy.beta_prime.clone();
    let mut boundary_bp: BTreeSet<CellId> = w2.table.closure(&bp);
    boundary_bp.remove(&bp);

    let mut ident: BTreeMap<CellId, CellId> = BTreeMap::new();
    if n == 2 {
        let k = alpha_walk.len();
        // stretch the edge of ∂β' opposite v to k-2 segments
        let (y1, y2) = (inner_copy(&beta_walk[1]), inner_copy(&beta_walk[2]));
        let far = w2
            .table
            .boundary(&bp)
            .iter()
            .find(|e| {
                let (a, b) = w2.table.endpoints(e);
                (a == y1 && b == y2) || (a == y2 && b == y1)
            })
            .expect("far edge")
            .clone();
        let mut seg = far;
        for _ in 3..k {
            let split = w2.split_edge(&seg, Some(&y1))?;
            seg = split.half_at(&y2).clone();
        }
        for rec in core::mem::take(&mut w2.log) {
            for (a, _) in rec.new_pairings {
                w2.field.unpair(&a);
            }
        }
        let (mut bverts, _) = w2.table.cycle(&bp);
        let i = bverts.iter().position(|x| *x == v).expect("v on beta'");
        bverts.rotate_left(i);
        if bverts[1] != y1 {
            bverts[1..].reverse();
        }
        boundary_bp = w2.table.closure(&bp);
        boundary_bp.remove(&bp);
        let j0 = (0..k).min_by(|&a, &b| bverts[a].cmp(&bverts[b])).unwrap();
        let i0 = (0..k).min_by(|&a, &b| alpha_walk[a].cmp(&alpha_walk[b])).unwrap();
        let image = |j: usize| alpha_walk[(i0 + k * 2 - (j + k - j0) % k) % k].clone();
        let mut alpha_edge: BTreeMap<(CellId, CellId), CellId> = BTreeMap::new();
        for e in m1.boundary(m1.get(&alpha)?) {
            let (a, b) = m1.endpoints(*e);
            let (a, b) = (m1.id(a).clone(), m1.id(b).clone());
            alpha_edge.insert((a.clone(), b.clone()), m1.id(*e).clone());
            alpha_edge.insert((b, a), m1.id(*e).clone());
        }
        let bpos: BTreeMap<CellId, usize> = bverts.iter().enumerate().map(|(j, x)| (x.clone(), j)).collect();
        for c in &boundary_bp {
            if w2.table.dim(c) == 0 {
                ident.insert(c.clone(), tube_top(&image(bpos[c])));
            } else {
                let (a, b) = w2.table.endpoints(c);
                let key = (image(bpos[&a]), image(bpos[&b]));
                ident.insert(c.clone(), tube_top(&alpha_edge[&key]));
            }
        }
    } else {
        let av: Vec<CellId> = alpha_cells.iter().filter(|&&c| m1.cell_dim(c) == 0).map(|&c| m1.id(c).clone()).collect();
        let bv: Vec<CellId> = boundary_bp.iter().filter(|c| w2.table.dim(c) == 0).cloned().collect();
        let vmap: BTreeMap<CellId, CellId> = bv.into_iter().zip(av).collect();
        let mut by_verts: BTreeMap<BTreeSet<CellId>, CellId> = BTreeMap::new();
        for &c in &alpha_cells {
            let id = m1.id(c).clone();
            if id != alpha {
                let vs = m1.vertices_of(c).into_iter().map(|x| m1.id(x).clone()).collect();
                by_verts.insert(vs, id);
            }
        }
        for c in &boundary_bp {
            let vs: BTreeSet<CellId> = w2.table.vertices_of(c).iter().map(|x| vmap[x].clone()).collect();
            let target = by_verts.get(&vs).ok_or_else(|| Error::NotSimplicial(alpha.clone()))?;
            ident.insert(c.clone(), tube_top(target));
        }
    }

    let mut table = t1;
    let remap = |x: &CellId| ident.get(x).cloned().unwrap_or_else(|| x.clone());
    for r in w2.table.records() {
        if r.id == bp || boundary_bp.contains(&r.id) {
            continue;
        }
        table.insert(CellRecord {
            id: r.id.clone(),
            dim: r.dim,
            boundary: r.boundary.iter().map(remap).collect(),
            tag: r.tag,
        });
    }
    let complex = table.build()?;

    let mut field = v1.clone();
    for (t, p) in tube.top.iter().zip(&tube.prisms) {
        field.pair(t.clone(), p.clone());
    }
    for (a, b) in w2.field.pairs() {
        field.pair(remap(a), remap(b));
    }

    // piecewise function
    let c = f1.get(&alpha).ok_or_else(|| Error::MissingValue(alpha.clone()))? + 2.0;
    let mut slope: f64 = 0.0;
    for s in &tube.base {
        for r in m1.boundary(m1.get(s)?) {
            let (fr, fs) = (f1.get(m1.id(*r)).unwrap(), f1.get(s).unwrap());
            if fr >= fs {
                slope = slope.max(fr - fs + 1.0);
            }
        }
    }
    let mut function = MorseFunction::new();
    let mut tube_max = f64::NEG_INFINITY;
    for (cell, x) in f1.iter() {
        if *cell != alpha {
            function.set(cell.clone(), x);
        }
    }
    for s in &tube.base {
        let x = f1.get(s).unwrap() + c / 2.0 + slope * m1.cell_dim(m1.get(s)?) as f64;
        tube_max = tube_max.max(x);
        function.set(tube_top(s), x);
        function.set(tube_prism(s), x);
    }
    let back: BTreeMap<&CellId, &CellId> = copy.correspondence.iter().map(|(a, b)| (b, a)).collect();
    let right: Vec<(CellId, f64)> = w2
        .table
        .ids()
        .filter(|x| **x != bp && !boundary_bp.contains(*x))
        .map(|x| {
            let src = back.get(x).copied().unwrap_or(x);
            (x.clone(), f2.get(src).expect("value on right summand"))
        })
        .collect();
    let right_min = right.iter().map(|(_, x)| *x).fold(f64::INFINITY, f64::min);
    let right_shift = if right_min + c > tube_max { 0.0 } else { tube_max - right_min - c + 1.0 };
    for (cell, x) in right {
        function.set(cell, x + c + right_shift);
    }

    let field_report = validate_field(&complex, &field);
    let formula_ok = validate_function(&complex, &function)?.ok
        && induced_field(&complex, &function).map(|g| g == field).unwrap_or(false);
    let formula_used = formula_ok;
    let function = if formula_ok { function } else { synthesize_function(&complex, &field)? };
    let function_valid = validate_function(&complex, &function)?.ok;
    let (counts, _) = critical_cells(&field, &complex);
    let bisections = w1.log;
    let report = ComposeReport {
        perfect: is_perfect(&complex, &field),
        euler: complex.euler_characteristic(),
        counts,
        field_valid: field_report.ok,
        function_valid,
        formula_used,
        c,
        tube_slope: slope,
        right_shift,
        alpha,
        beta,
        v,
        bisections,
    };
    Ok(Composition { complex, field, function, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_simplicial, simplicial};
    use crate::field::trace_1path_tree;

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
    fn edge_bisection_rules() {
        let k = tetra();
        let v = tetra_field();
        let (k2, v2, rec) = bisect_edge(&k, &v, &id("e0-1")).unwrap();
        assert_eq!(rec.new_cells.len(), 3);
        assert!(validate_field(&k2, &v2).ok);
        assert_eq!(critical_cells(&v2, &k2).0.m, vec![1, 0, 1]);
        assert!(trace_1path_tree(&k2, &v2).unwrap().reaches_root());
        let (k3, v3, rec) = bisect_edge(&k, &v, &id("e1-2")).unwrap();
        assert!(v3.contains(&rec.successor, &id("t0-1-2")));
        assert!(validate_field(&k3, &v3).ok);
        let crit = VectorField::new();
        let (k4, v4, rec) = bisect_edge(&k, &crit, &id("e0-1")).unwrap();
        assert!(!v4.is_matched(&rec.successor));
        assert_eq!(critical_cells(&v4, &k4).0.m, vec![4, 6, 4]);
        assert!(matches!(bisect_edge(&k, &v, &id("v0")), Err(Error::NotAnEdge(_))));
    }

    #[test]
    fn cell_bisection_rules() {
        let k = tetra();
        let v = tetra_field();
        let (k2, _, _) = bisect_edge(&k, &v, &id("e1-2")).unwrap();
        let v2 = induced_field(&k2, &synthesize_function(&k2, &bisect_edge(&k, &v, &id("e1-2")).unwrap().1).unwrap()).unwrap();
        let (k3, v3, rec) = bisect_2cell(&k2, &v2, &id("t1-2-3"), &id("v3"), &id("e1-2~b0")).unwrap();
        assert!(validate_field(&k3, &v3).ok);
        assert_eq!(critical_cells(&v3, &k3).0.m, vec![1, 0, 1]);
        assert!(!v3.is_matched(&rec.successor));
        assert!(matches!(
            bisect_2cell(&k2, &v2, &id("t1-2-3"), &id("v3"), &id("v1")),
            Err(Error::BadChord { .. })
        ));
    }

    #[test]
    fn tube_counts() {
        let k = tetra();
        let tube = build_prism_over_boundary(&k, &id("t0-1-2")).unwrap();
        assert_eq!(tube.top.len(), 6);
        assert_eq!(tube.prisms.len(), 6);
        let quads = tube.cells.iter().filter(|r| r.dim == 2).count();
        assert_eq!(quads, 3);
        let s3 = simplicial(&[vec![0, 1, 2, 3], vec![0, 1, 2, 4], vec![0, 1, 3, 4], vec![0, 2, 3, 4], vec![1, 2, 3, 4]]).unwrap();
        let tube = build_prism_over_boundary(&s3, &id("s0-1-2-3")).unwrap();
        assert_eq!(tube.prisms.len(), 14);
        let euler: i64 = tube.cells.iter().map(|r| if r.dim % 2 == 0 { 1 } else { -1 }).sum();
        assert_eq!(euler, 0);
        assert!(matches!(build_prism_over_boundary(&k, &id("e0-1")), Err(Error::NotTopCell(_))));
    }

    #[test]
    fn shrink_triangle() {
        let j = build_simplicial(&[[0, 1, 2]], false).unwrap();
        let (k, copy) = shrink_closed_star(&j, &id("t0-1-2"), &id("v0")).unwrap();
        assert_eq!(copy.correspondence[&id("e0-1")], id("inner:e0-1"));
        assert_eq!(copy.correspondence[&id("e1-2")], id("e1-2"));
        let quad = k.get(&id("inner:t0-1-2")).unwrap();
        assert_eq!(k.boundary(quad).len(), 4);
        assert_eq!(k.counts(), vec![5, 6, 2]);
        for (a, b) in &copy.correspondence {
            let ia = j.get(a).unwrap();
            for &f in j.boundary(ia) {
                if let Some(img) = copy.correspondence.get(j.id(f)) {
                    assert!(k.boundary(k.get(b).unwrap()).contains(&k.get(img).unwrap()));
                }
            }
        }
        assert!(matches!(
            shrink_closed_star(&j, &id("t0-1-2"), &id("v7")),
            Err(Error::VertexNotOnCell { .. })
        ));
    }

    #[test]
    fn shrink_tetrahedron_preserves_faces() {
        let j = simplicial(&[vec![0, 1, 2, 3]]).unwrap();
        let (k, copy) = shrink_closed_star(&j, &id("s0-1-2-3"), &id("v0")).unwrap();
        assert_eq!(copy.correspondence.len(), j.len() - 1);
        for (a, b) in &copy.correspondence {
            assert_eq!(j.cell_dim(j.get(a).unwrap()), k.cell_dim(k.get(b).unwrap()));
            for &f in j.boundary(j.get(a).unwrap()) {
                if let Some(img) = copy.correspondence.get(j.id(f)) {
                    assert!(k.boundary(k.get(b).unwrap()).contains(&k.get(img).unwrap()));
                }
            }
        }
    }

    #[test]
    fn sphere_sum() {
        let k = tetra();
        let f = synthesize_function(&k, &tetra_field()).unwrap();
        let out = compose(&k, &f, &k, &f).unwrap();
        assert!(out.report.field_valid);
        assert!(out.report.formula_used);
        assert_eq!(out.report.counts.m, vec![1, 0, 1]);
        assert_eq!(out.report.euler, 2);
        assert!(out.complex.flags().closed_surface);
        assert_eq!(out.complex.flags().oriented, Some(true));
    }
}
