use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(String);

impl CellId {
    pub fn new(s: impl Into<String>) -> Self {
        CellId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Prefixes the id, used to keep two summands apart.
    pub fn prefixed(&self, prefix: &str) -> CellId {
        CellId(format!("{prefix}{}", self.0))
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CellId {
    fn from(s: &str) -> Self {
        CellId(s.to_string())
    }
}

impl From<String> for CellId {
    fn from(s: String) -> Self {
        CellId(s)
    }
}

impl core::borrow::Borrow<str> for CellId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tag {
    #[default]
    Original,
    Tube,
    InnerCopy,
    Cone,
    Bisection,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellRecord {
    pub id: CellId,
    pub dim: usize,
    pub boundary: Vec<CellId>,
    pub tag: Tag,
}

impl CellRecord {
    pub fn new(id: impl Into<CellId>, dim: usize, boundary: Vec<CellId>, tag: Tag) -> Self {
        CellRecord { id: id.into(), dim, boundary, tag }
    }
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub id: CellId,
    pub dim: usize,
    /// Indices of codimension-one faces, ascending.
    pub boundary: Vec<usize>,
    pub tag: Tag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Flags {
    pub pseudomanifold: bool,
    pub closed_surface: bool,
    pub oriented: Option<bool>,
}

/// A finite regular cell complex stored as a face poset.
///
/// Cells are kept sorted by id, so indices follow id order.
#[derive(Debug, Clone)]
pub struct Complex {
    cells: Vec<Cell>,
    index: BTreeMap<CellId, usize>,
    cofaces: Vec<Vec<usize>>,
    by_dim: Vec<Vec<usize>>,
    flags: Flags,
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.cells.len() == other.cells.len()
            && self.cells.iter().zip(&other.cells).all(|(a, b)| {
                a.id == b.id && a.dim == b.dim && a.boundary == b.boundary
            })
    }
}

impl Eq for Complex {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    pub star: BTreeSet<CellId>,
    pub link: BTreeSet<CellId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceInfo {
    /// Orientable genus, or the number of cross-caps when not orientable.
    pub genus: usize,
    pub orientable: bool,
    pub euler: i64,
    pub components: usize,
}

pub fn simplex_id(vertices: &[usize]) -> CellId {
    let body = vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-");
    let head = match vertices.len() {
        1 => "v",
        2 => "e",
        3 => "t",
        _ => "s",
    };
    CellId(format!("{head}{body}"))
}

/// Builds a simplicial complex from its facets (vertex lists of any size).
pub fn simplicial(facets: &[Vec<usize>]) -> Result<Complex> {
    let mut seen = BTreeSet::new();
    let mut simplices: BTreeSet<Vec<usize>> = BTreeSet::new();
    for facet in facets {
        let mut s = facet.clone();
        s.sort_unstable();
        let name = format!("{facet:?}");
        if s.windows(2).any(|w| w[0] == w[1]) || s.is_empty() {
            return Err(Error::DegenerateFacet(name));
        }
        if !seen.insert(s.clone()) {
            return Err(Error::DuplicateFacet(name));
        }
        let n = s.len();
        for mask in 1u32..(1u32 << n) {
            let face: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect();
            simplices.insert(face);
        }
    }
    let records = simplices
        .iter()
        .map(|s| {
            let boundary = if s.len() == 1 {
                Vec::new()
            } else {
                (0..s.len())
                    .map(|skip| {
                        let f: Vec<usize> =
                            s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                        simplex_id(&f)
                    })
                    .collect()
            };
            CellRecord::new(simplex_id(s), s.len() - 1, boundary, Tag::Original)
        })
        .collect();
    Complex::from_records(records)
}

/// Triangle list to complex; `closed` demands every edge sit in exactly two triangles.
pub fn build_simplicial(triangles: &[[usize; 3]], closed: bool) -> Result<Complex> {
    let facets: Vec<Vec<usize>> = triangles.iter().map(|t| t.to_vec()).collect();
    let k = simplicial(&facets)?;
    if closed {
        for &e in k.cells_of_dim(1) {
            if k.cofaces(e).len() != 2 {
                return Err(Error::NonPseudomanifold(k.id(e).clone()));
            }
        }
    }
    Ok(k)
}

pub fn build_poset(records: Vec<CellRecord>) -> Result<Complex> {
    Complex::from_records(records)
}

pub fn euler_characteristic(k: &Complex) -> i64 {
    k.euler_characteristic()
}

pub fn local_neighborhood(k: &Complex, c: &CellId) -> Result<Neighborhood> {
    k.local_neighborhood(c)
}

pub fn verify_closed_surface(k: &Complex) -> Result<SurfaceInfo> {
    k.verify_closed_surface()
}

impl Complex {
    pub fn from_records(mut records: Vec<CellRecord>) -> Result<Complex> {
        records.sort_by(|a, b| a.id.cmp(&b.id));
        let mut index = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            if index.insert(r.id.clone(), i).is_some() {
                return Err(Error::DuplicateCell(r.id.clone()));
            }
        }
        let mut cells = Vec::with_capacity(records.len());
        for r in &records {
            let mut boundary = Vec::with_capacity(r.boundary.len());
            for f in &r.boundary {
                let &j = index.get(f).ok_or_else(|| Error::MissingFace {
                    cell: r.id.clone(),
                    face: f.clone(),
                })?;
                if records[j].dim + 1 != r.dim {
                    return Err(Error::BadDimensionDrop { cell: r.id.clone(), face: f.clone() });
                }
                boundary.push(j);
            }
            boundary.sort_unstable();
            if boundary.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::BoundaryNotCycle(r.id.clone()));
            }
            if r.dim == 0 && !boundary.is_empty() {
                return Err(Error::BadDimensionDrop { cell: r.id.clone(), face: r.boundary[0].clone() });
            }
            if r.dim == 1 && boundary.len() != 2 {
                return Err(Error::MissingFace {
                    cell: r.id.clone(),
                    face: r.boundary.first().cloned().unwrap_or_else(|| r.id.clone()),
                });
            }
            if r.dim >= 2 && boundary.is_empty() {
                return Err(Error::BoundaryNotCycle(r.id.clone()));
            }
            cells.push(Cell { id: r.id.clone(), dim: r.dim, boundary, tag: r.tag });
        }
        let mut cofaces = vec![Vec::new(); cells.len()];
        let mut by_dim: Vec<Vec<usize>> = Vec::new();
        for (i, c) in cells.iter().enumerate() {
            for &f in &c.boundary {
                cofaces[f].push(i);
            }
            if by_dim.len() <= c.dim {
                by_dim.resize(c.dim + 1, Vec::new());
            }
            by_dim[c.dim].push(i);
        }
        let mut k = Complex { cells, index, cofaces, by_dim, flags: Flags::default() };
        for &c in k.cells_of_dim(2) {
            if k.try_cycle(c).is_none() {
                return Err(Error::BoundaryNotCycle(k.id(c).clone()));
            }
        }
        k.flags = k.compute_flags();
        Ok(k)
    }

    fn compute_flags(&self) -> Flags {
        let n = self.dim();
        let pseudomanifold = n >= 1
            && !self.cells_of_dim(n).is_empty()
            && self.cells_of_dim(n - 1).iter().all(|&c| self.cofaces(c).len() == 2);
        let closed_surface = n == 2 && pseudomanifold && self.surface_violation().is_none();
        let oriented = if closed_surface { Some(self.orientation().is_some()) } else { None };
        Flags { pseudomanifold, closed_surface, oriented }
    }

    pub fn records(&self) -> Vec<CellRecord> {
        self.cells
            .iter()
            .map(|c| CellRecord {
                id: c.id.clone(),
                dim: c.dim,
                boundary: c.boundary.iter().map(|&b| self.cells[b].id.clone()).collect(),
                tag: c.tag,
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Top dimension (0 for an empty complex).
    pub fn dim(&self) -> usize {
        self.by_dim.len().saturating_sub(1)
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn id(&self, i: usize) -> &CellId {
        &self.cells[i].id
    }

    pub fn cell_dim(&self, i: usize) -> usize {
        self.cells[i].dim
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &CellId) -> Result<usize> {
        self.index_of(id.as_str()).ok_or_else(|| Error::UnknownCell(id.clone()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn boundary(&self, i: usize) -> &[usize] {
        &self.cells[i].boundary
    }

    pub fn cofaces(&self, i: usize) -> &[usize] {
        &self.cofaces[i]
    }

    pub fn cells_of_dim(&self, d: usize) -> &[usize] {
        self.by_dim.get(d).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn count(&self, d: usize) -> usize {
        self.cells_of_dim(d).len()
    }

    pub fn counts(&self) -> Vec<usize> {
        (0..=self.dim()).map(|d| self.count(d)).collect()
    }

    pub fn closure(&self, i: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![i];
        while let Some(c) = stack.pop() {
            if out.insert(c) {
                stack.extend_from_slice(self.boundary(c));
            }
        }
        out
    }

    pub fn vertices_of(&self, i: usize) -> Vec<usize> {
        self.closure(i).into_iter().filter(|&c| self.cells[c].dim == 0).collect()
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let b = self.boundary(e);
        (b[0], b[1])
    }

    pub fn other_endpoint(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.endpoints(e);
        if a == v {
            b
        } else {
            a
        }
    }

    /// Boundary walk of a 2-cell: vertices `v[i]` and edges `e[i]` joining `v[i]` to `v[i+1]`.
    /// Starts at the smallest vertex and heads to its smaller neighbour.
    pub fn cycle(&self, c: usize) -> (Vec<usize>, Vec<usize>) {
        self.try_cycle(c).expect("2-cell boundary is a cycle")
    }

    fn try_cycle(&self, c: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        let edges = self.boundary(c);
        let mut at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &e in edges {
            if self.cells[e].dim != 1 {
                return None;
            }
            let (a, b) = self.endpoints(e);
            at.entry(a).or_default().push(e);
            at.entry(b).or_default().push(e);
        }
        if edges.len() < 2 || at.values().any(|v| v.len() != 2) {
            return None;
        }
        let (&start, inc) = at.iter().next()?;
        let n0 = self.other_endpoint(inc[0], start);
        let n1 = self.other_endpoint(inc[1], start);
        let mut e = if n0 <= n1 { inc[0] } else { inc[1] };
        let mut verts = vec![start];
        let mut walk = vec![e];
        let mut v = self.other_endpoint(e, start);
        while v != start {
            verts.push(v);
            let pair = &at[&v];
            e = if pair[0] == e { pair[1] } else { pair[0] };
            walk.push(e);
            v = self.other_endpoint(e, v);
            if walk.len() > edges.len() {
                return None;
            }
        }
        if walk.len() != edges.len() {
            return None;
        }
        Some((verts, walk))
    }

    /// Cyclic sequence of (edge, 2-cell) around a vertex of a surface: cell `i`
    /// contains edge `i` and edge `i+1`.
    pub fn rotation(&self, v: usize) -> Vec<(usize, usize)> {
        let edges: Vec<usize> = self.cofaces(v).to_vec();
        let Some(&first) = edges.first() else { return Vec::new() };
        let mut out = Vec::new();
        let mut e = first;
        let Some(&c0) = self.cofaces(e).first() else { return Vec::new() };
        let mut c = c0;
        loop {
            out.push((e, c));
            let next = self
                .boundary(c)
                .iter()
                .copied()
                .find(|&x| x != e && self.boundary(x).contains(&v));
            let Some(next) = next else { break };
            let cf = self.cofaces(next);
            if cf.len() != 2 {
                break;
            }
            let nc = if cf[0] == c { cf[1] } else { cf[0] };
            e = next;
            c = nc;
            if e == first || out.len() > edges.len() {
                break;
            }
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(d, v)| if d % 2 == 0 { v.len() as i64 } else { -(v.len() as i64) })
            .sum()
    }

    pub fn local_neighborhood(&self, c: &CellId) -> Result<Neighborhood> {
        let i = self.get(c)?;
        let mut up = BTreeSet::new();
        let mut stack = vec![i];
        while let Some(x) = stack.pop() {
            if up.insert(x) {
                stack.extend_from_slice(self.cofaces(x));
            }
        }
        let mut star = BTreeSet::new();
        for &x in &up {
            star.extend(self.closure(x));
        }
        let own: BTreeSet<usize> = self.vertices_of(i).into_iter().collect();
        let link = star
            .iter()
            .copied()
            .filter(|&x| self.vertices_of(x).iter().all(|v| !own.contains(v)))
            .map(|x| self.id(x).clone())
            .collect();
        Ok(Neighborhood { star: star.into_iter().map(|x| self.id(x).clone()).collect(), link })
    }

    fn surface_violation(&self) -> Option<usize> {
        if self.dim() != 2 {
            return self.cells.first().map(|_| 0);
        }
        for &e in self.cells_of_dim(1) {
            if self.cofaces(e).len() != 2 {
                return Some(e);
            }
        }
        for &v in self.cells_of_dim(0) {
            let deg = self.cofaces(v).len();
            if deg < 2 || self.rotation(v).len() != deg {
                return Some(v);
            }
        }
        None
    }

    /// Coherent orientation of every 2-cell of a surface: `true` means the
    /// canonical boundary walk is reversed. `None` when impossible.
    pub fn orientation(&self) -> Option<BTreeMap<usize, bool>> {
        let mut flip: BTreeMap<usize, bool> = BTreeMap::new();
        for &root in self.cells_of_dim(2) {
            if flip.contains_key(&root) {
                continue;
            }
            flip.insert(root, false);
            let mut queue = VecDeque::from([root]);
            while let Some(c) = queue.pop_front() {
                let (verts, edges) = self.cycle(c);
                let n = verts.len();
                for (i, &e) in edges.iter().enumerate() {
                    let (mut a, mut b) = (verts[i], verts[(i + 1) % n]);
                    if flip[&c] {
                        core::mem::swap(&mut a, &mut b);
                    }
                    for &d in self.cofaces(e) {
                        if d == c {
                            continue;
                        }
                        let forward = self.traverses(d, e, a, b);
                        // the neighbour must run the edge from b to a
                        let want = forward;
                        match flip.get(&d) {
                            Some(&f) if f != want => return None,
                            Some(_) => {}
                            None => {
                                flip.insert(d, want);
                                queue.push_back(d);
                            }
                        }
                    }
                }
            }
        }
        Some(flip)
    }

    /// Whether the canonical walk of `c` runs edge `e` from `a` to `b`.
    fn traverses(&self, c: usize, e: usize, a: usize, b: usize) -> bool {
        let (verts, edges) = self.cycle(c);
        let n = verts.len();
        let i = edges.iter().position(|&x| x == e).expect("edge on cell");
        verts[i] == a && verts[(i + 1) % n] == b
    }

    /// Boundary walk of `c` respecting an orientation map.
    pub fn oriented_cycle(&self, c: usize, flip: bool) -> Vec<usize> {
        let (mut verts, _) = self.cycle(c);
        if flip {
            verts[1..].reverse();
        }
        verts
    }

    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let n = p[y];
                p[y] = r;
                y = n;
            }
            r
        }
        for i in 0..self.len() {
            for &f in self.boundary(i) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, f));
                parent[a] = b;
            }
        }
        (0..self.len()).filter(|&i| find(&mut parent, i) == i).count()
    }

    pub fn verify_closed_surface(&self) -> Result<SurfaceInfo> {
        if let Some(bad) = self.surface_violation() {
            return Err(Error::NotClosedSurface(self.id(bad).clone()));
        }
        let euler = self.euler_characteristic();
        let components = self.components();
        let orientable = self.orientation().is_some();
        let deficit = (2 * components as i64 - euler).max(0) as usize;
        let genus = if orientable { deficit / 2 } else { deficit };
        Ok(SurfaceInfo { genus, orientable, euler, components })
    }

    /// Sub-poset spanned by the closures of the given cells.
    pub fn subcomplex(&self, cells: &BTreeSet<usize>) -> Result<Complex> {
        let mut keep = BTreeSet::new();
        for &c in cells {
            keep.extend(self.closure(c));
        }
        let records = keep
            .iter()
            .map(|&c| CellRecord {
                id: self.id(c).clone(),
                dim: self.cells[c].dim,
                boundary: self.boundary(c).iter().map(|&b| self.id(b).clone()).collect(),
                tag: self.cells[c].tag,
            })
            .collect();
        Complex::from_records(records)
    }
}

/// Mutable cell table used while performing surgery; keeps coface lists current.
#[derive(Debug, Clone, Default)]
pub struct CellTable {
    cells: BTreeMap<CellId, CellRecord>,
    cof: BTreeMap<CellId, BTreeSet<CellId>>,
}

impl CellTable {
    pub fn from_complex(k: &Complex) -> Self {
        let mut t = CellTable::default();
        for r in k.records() {
            t.insert(r);
        }
        t
    }

    pub fn from_records<I: IntoIterator<Item = CellRecord>>(records: I) -> Self {
        let mut t = CellTable::default();
        for r in records {
            t.insert(r);
        }
        t
    }

    pub fn insert(&mut self, rec: CellRecord) {
        if let Some(old) = self.cells.remove(&rec.id) {
            self.unlink(&old);
        }
        for f in &rec.boundary {
            self.cof.entry(f.clone()).or_default().insert(rec.id.clone());
        }
        self.cells.insert(rec.id.clone(), rec);
    }

    fn unlink(&mut self, rec: &CellRecord) {
        for f in &rec.boundary {
            if let Some(s) = self.cof.get_mut(f) {
                s.remove(&rec.id);
            }
        }
    }

    pub fn remove(&mut self, id: &CellId) -> Option<CellRecord> {
        let rec = self.cells.remove(id)?;
        self.unlink(&rec);
        Some(rec)
    }

    pub fn get(&self, id: &CellId) -> Option<&CellRecord> {
        self.cells.get(id)
    }

    pub fn dim(&self, id: &CellId) -> usize {
        self.cells[id].dim
    }

    pub fn boundary(&self, id: &CellId) -> &[CellId] {
        &self.cells[id].boundary
    }

    pub fn set_boundary(&mut self, id: &CellId, boundary: Vec<CellId>) {
        let mut rec = self.cells[id].clone();
        rec.boundary = boundary;
        self.insert(rec);
    }

    pub fn contains(&self, id: &str) -> bool {
        self.cells.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &CellId> {
        self.cells.keys()
    }

    pub fn records(&self) -> impl Iterator<Item = &CellRecord> {
        self.cells.values()
    }

    pub fn cofaces(&self, id: &CellId) -> Vec<CellId> {
        self.cof.get(id).map(|s| s.iter().cloned().collect()).unwrap_or_default()
    }

    /// A new id `base~b<k>` that no present cell uses as a prefix.
    pub fn fresh(&self, base: &CellId) -> CellId {
        let mut k = 0usize;
        loop {
            let cand = format!("{base}~b{k}");
            let taken = self
                .cells
                .range::<str, _>((core::ops::Bound::Included(cand.as_str()), core::ops::Bound::Unbounded))
                .next()
                .map(|(id, _)| id.as_str().starts_with(cand.as_str()))
                .unwrap_or(false);
            if !taken {
                return CellId(cand);
            }
            k += 1;
        }
    }

    /// Replaces `old` by `new` in the boundary of every coface of `old`.
    pub fn replace_face(&mut self, old: &CellId, new: &[CellId]) {
        for c in self.cofaces(old) {
            let mut b: Vec<CellId> = self.boundary(&c).iter().filter(|x| *x != old).cloned().collect();
            b.extend(new.iter().cloned());
            self.set_boundary(&c, b);
        }
    }

    pub fn endpoints(&self, e: &CellId) -> (CellId, CellId) {
        let b = self.boundary(e);
        (b[0].clone(), b[1].clone())
    }

    pub fn closure(&self, id: &CellId) -> BTreeSet<CellId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![id.clone()];
        while let Some(c) = stack.pop() {
            if !out.contains(&c) {
                stack.extend(self.boundary(&c).iter().cloned());
                out.insert(c);
            }
        }
        out
    }

    pub fn vertices_of(&self, id: &CellId) -> BTreeSet<CellId> {
        self.closure(id).into_iter().filter(|c| self.dim(c) == 0).collect()
    }

    /// Same convention as [`Complex::cycle`].
    pub fn cycle(&self, c: &CellId) -> (Vec<CellId>, Vec<CellId>) {
        let mut at: BTreeMap<CellId, Vec<CellId>> = BTreeMap::new();
        for e in self.boundary(c) {
            let (a, b) = self.endpoints(e);
            at.entry(a).or_default().push(e.clone());
            at.entry(b).or_default().push(e.clone());
        }
        let (start, inc) = at.iter().next().expect("non-empty cycle");
        let other = |e: &CellId, v: &CellId| {
            let (a, b) = self.endpoints(e);
            if a == *v {
                b
            } else {
                a
            }
        };
        let (n0, n1) = (other(&inc[0], start), other(&inc[1], start));
        let mut e = if n0 <= n1 { inc[0].clone() } else { inc[1].clone() };
        let mut verts = vec![start.clone()];
        let mut walk = vec![e.clone()];
        let mut v = other(&e, start);
        while v != *start && walk.len() <= at.len() {
            verts.push(v.clone());
            let pair = &at[&v];
            e = if pair[0] == e { pair[1].clone() } else { pair[0].clone() };
            walk.push(e.clone());
            v = other(&e, &v);
        }
        (verts, walk)
    }

    pub fn build(&self) -> Result<Complex> {
        Complex::from_records(self.cells.values().cloned().collect())
    }
}
