use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use crate::complex::{CellId, Complex};
use crate::error::{Error, Result};
use crate::homology::{betti_mod2, BettiVector};

/// A discrete vector field as a set of (lower, higher) pairs.
///
/// The pair set is kept raw so that invalid matchings can still be
/// represented and reported by [`validate_field`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VectorField {
    pairs: BTreeSet<(CellId, CellId)>,
    up: BTreeMap<CellId, CellId>,
    down: BTreeMap<CellId, CellId>,
}

impl VectorField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (CellId, CellId)>>(pairs: I) -> Self {
        let mut v = VectorField::new();
        for (a, b) in pairs {
            v.pair(a, b);
        }
        v
    }

    pub fn pair(&mut self, low: CellId, high: CellId) {
        if !self.up.contains_key(&low) && !self.down.contains_key(&low) {
            self.up.insert(low.clone(), high.clone());
        }
        if !self.up.contains_key(&high) && !self.down.contains_key(&high) {
            self.down.insert(high.clone(), low.clone());
        }
        self.pairs.insert((low, high));
    }

    /// Removes whatever pair `c` belongs to and returns it.
    pub fn unpair(&mut self, c: &CellId) -> Option<(CellId, CellId)> {
        let found = self.pairs.iter().find(|(a, b)| a == c || b == c).cloned()?;
        self.pairs.remove(&found);
        self.up.remove(&found.0);
        self.down.remove(&found.1);
        Some(found)
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(CellId, CellId)> {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, low: &CellId, high: &CellId) -> bool {
        self.pairs.contains(&(low.clone(), high.clone()))
    }

    pub fn up(&self, c: &CellId) -> Option<&CellId> {
        self.up.get(c)
    }

    pub fn down(&self, c: &CellId) -> Option<&CellId> {
        self.down.get(c)
    }

    pub fn partner(&self, c: &CellId) -> Option<&CellId> {
        self.up(c).or_else(|| self.down(c))
    }

    pub fn is_matched(&self, c: &CellId) -> bool {
        self.partner(c).is_some()
    }

    /// Renames every cell through `f`.
    pub fn map_ids(&self, mut f: impl FnMut(&CellId) -> CellId) -> VectorField {
        VectorField::from_pairs(self.pairs.iter().map(|(a, b)| (f(a), f(b))))
    }

    /// Keeps the pairs whose cells both satisfy `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&CellId) -> bool) -> VectorField {
        VectorField::from_pairs(self.pairs.iter().filter(|(a, b)| keep(a) && keep(b)).cloned())
    }
}

/// Index form of a valid matching on a complex.
#[derive(Debug, Clone)]
pub(crate) struct Matching {
    pub partner: Vec<Option<usize>>,
}

impl Matching {
    pub fn new(k: &Complex, v: &VectorField) -> Result<Matching> {
        let mut partner = vec![None; k.len()];
        for (a, b) in v.pairs() {
            let i = k.get(a)?;
            let j = k.get(b)?;
            if !k.boundary(j).contains(&i) {
                return Err(Error::InvalidField(a.clone()));
            }
            if partner[i].is_some() {
                return Err(Error::InvalidField(a.clone()));
            }
            if partner[j].is_some() {
                return Err(Error::InvalidField(b.clone()));
            }
            partner[i] = Some(j);
            partner[j] = Some(i);
        }
        Ok(Matching { partner })
    }

    pub fn up(&self, k: &Complex, i: usize) -> Option<usize> {
        self.partner[i].filter(|&j| k.cell_dim(j) > k.cell_dim(i))
    }

    pub fn down(&self, k: &Complex, i: usize) -> Option<usize> {
        self.partner[i].filter(|&j| k.cell_dim(j) < k.cell_dim(i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldViolation {
    UnknownCell(CellId),
    NotIncident(CellId, CellId),
    DoublyMatched(CellId),
}

impl fmt::Display for FieldViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldViolation::UnknownCell(c) => write!(f, "unknown cell {c}"),
            FieldViolation::NotIncident(a, b) => write!(f, "{a} is not a facet of {b}"),
            FieldViolation::DoublyMatched(c) => write!(f, "{c} is matched more than once"),
        }
    }
}

/// A V-path `σ0, τ0, σ1, τ1, ...`; it may stop at a τ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientPath {
    pub dim: usize,
    pub steps: Vec<CellId>,
    /// Critical cell whose facet starts the path, when traced back to one.
    pub source: Option<CellId>,
}

impl GradientPath {
    pub fn taus(&self) -> impl Iterator<Item = &CellId> {
        self.steps.iter().skip(1).step_by(2)
    }

    pub fn sigmas(&self) -> impl Iterator<Item = &CellId> {
        self.steps.iter().step_by(2)
    }

    pub fn is_valid(&self, k: &Complex, v: &VectorField) -> bool {
        let idx: Option<Vec<usize>> = self.steps.iter().map(|c| k.index_of(c.as_str())).collect();
        let Some(idx) = idx else { return false };
        for (n, w) in idx.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            if n % 2 == 0 {
                if !v.contains(k.id(a), k.id(b)) || k.cell_dim(b) != self.dim {
                    return false;
                }
            } else if !k.boundary(a).contains(&b) || idx.get(n.wrapping_sub(1)) == Some(&b) {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldReport {
    pub ok: bool,
    pub violations: Vec<FieldViolation>,
    pub cycle_witness: Option<GradientPath>,
}

pub fn validate_field(k: &Complex, v: &VectorField) -> FieldReport {
    let mut violations = Vec::new();
    let mut uses: BTreeMap<&CellId, usize> = BTreeMap::new();
    for (a, b) in v.pairs() {
        let mut known = true;
        for c in [a, b] {
            *uses.entry(c).or_default() += 1;
            if !k.contains(c.as_str()) {
                violations.push(FieldViolation::UnknownCell(c.clone()));
                known = false;
            }
        }
        if known {
            let (i, j) = (k.index_of(a.as_str()).unwrap(), k.index_of(b.as_str()).unwrap());
            if !k.boundary(j).contains(&i) {
                violations.push(FieldViolation::NotIncident(a.clone(), b.clone()));
            }
        }
    }
    for (c, n) in uses {
        if n > 1 {
            violations.push(FieldViolation::DoublyMatched(c.clone()));
        }
    }
    if !violations.is_empty() {
        return FieldReport { ok: false, violations, cycle_witness: None };
    }
    let m = Matching::new(k, v).expect("checked above");
    let cycle_witness = find_closed_path(k, &m);
    FieldReport { ok: cycle_witness.is_none(), violations, cycle_witness }
}

/// DFS over p-cells where σ steps to σ' when σ' is another facet of σ's partner.
fn find_closed_path(k: &Complex, m: &Matching) -> Option<GradientPath> {
    let n = k.len();
    let mut color = vec![0u8; n];
    let mut via = vec![usize::MAX; n];
    let succ = |s: usize| -> Vec<usize> {
        match m.up(k, s) {
            Some(t) => k.boundary(t).iter().copied().filter(|&x| x != s && m.up(k, x).is_some()).collect(),
            None => Vec::new(),
        }
    };
    for root in 0..n {
        if color[root] != 0 || m.up(k, root).is_none() {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
        color[root] = 1;
        while let Some((s, next, pos)) = stack.last_mut() {
            if *pos < next.len() {
                let x = next[*pos];
                *pos += 1;
                let s = *s;
                match color[x] {
                    0 => {
                        color[x] = 1;
                        via[x] = s;
                        let nx = succ(x);
                        stack.push((x, nx, 0));
                    }
                    1 => {
                        let mut chain = vec![x];
                        let mut y = s;
                        while y != x {
                            chain.push(y);
                            y = via[y];
                        }
                        chain.push(x);
                        chain.reverse();
                        let mut steps = Vec::new();
                        for (i, &c) in chain.iter().enumerate() {
                            steps.push(k.id(c).clone());
                            if i + 1 < chain.len() {
                                steps.push(k.id(m.up(k, c).unwrap()).clone());
                            }
                        }
                        let dim = k.cell_dim(x) + 1;
                        return Some(GradientPath { dim, steps, source: None });
                    }
                    _ => {}
                }
            } else {
                color[*s] = 2;
                stack.pop();
            }
        }
    }
    None
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MorseFunction {
    values: BTreeMap<CellId, f64>,
}

impl MorseFunction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, c: CellId, x: f64) {
        self.values.insert(c, x);
    }

    pub fn get(&self, c: &CellId) -> Option<f64> {
        self.values.get(c).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CellId, f64)> {
        self.values.iter().map(|(c, &x)| (c, x))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn remove(&mut self, c: &CellId) -> Option<f64> {
        self.values.remove(c)
    }

    pub fn map_ids(&self, mut f: impl FnMut(&CellId) -> CellId) -> MorseFunction {
        MorseFunction { values: self.values.iter().map(|(c, &x)| (f(c), x)).collect() }
    }

    fn at(&self, k: &Complex, i: usize) -> Result<f64> {
        self.get(k.id(i)).ok_or_else(|| Error::MissingValue(k.id(i).clone()))
    }
}

impl FromIterator<(CellId, f64)> for MorseFunction {
    fn from_iter<I: IntoIterator<Item = (CellId, f64)>>(iter: I) -> Self {
        MorseFunction { values: iter.into_iter().collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionViolation {
    ExceptionalFaces(usize),
    ExceptionalCofaces(usize),
    Exclusivity,
}

impl fmt::Display for FunctionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionViolation::ExceptionalFaces(n) => write!(f, "{n} faces with value at least the cell's"),
            FunctionViolation::ExceptionalCofaces(n) => write!(f, "{n} cofaces with value at most the cell's"),
            FunctionViolation::Exclusivity => f.write_str("both an exceptional face and an exceptional coface"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionReport {
    pub ok: bool,
    pub violations: Vec<(CellId, FunctionViolation)>,
}

pub fn validate_function(k: &Complex, f: &MorseFunction) -> Result<FunctionReport> {
    let mut vals = Vec::with_capacity(k.len());
    for i in 0..k.len() {
        vals.push(f.at(k, i)?);
    }
    let mut violations = Vec::new();
    for t in 0..k.len() {
        let faces = k.boundary(t).iter().filter(|&&s| vals[s] >= vals[t]).count();
        let cofaces = k.cofaces(t).iter().filter(|&&n| vals[n] <= vals[t]).count();
        let id = k.id(t);
        if faces > 1 {
            violations.push((id.clone(), FunctionViolation::ExceptionalFaces(faces)));
        }
        if cofaces > 1 {
            violations.push((id.clone(), FunctionViolation::ExceptionalCofaces(cofaces)));
        }
        if faces == 1 && cofaces == 1 {
            violations.push((id.clone(), FunctionViolation::Exclusivity));
        }
    }
    Ok(FunctionReport { ok: violations.is_empty(), violations })
}

pub fn induced_field(k: &Complex, f: &MorseFunction) -> Result<VectorField> {
    let report = validate_function(k, f)?;
    if let Some((c, _)) = report.violations.first() {
        return Err(Error::InvalidFunction(c.clone()));
    }
    let mut v = VectorField::new();
    for t in 0..k.len() {
        let ft = f.at(k, t)?;
        for &s in k.boundary(t) {
            if f.at(k, s)? >= ft {
                v.pair(k.id(s).clone(), k.id(t).clone());
            }
        }
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseCounts {
    pub m: Vec<usize>,
}

impl MorseCounts {
    pub fn alternating_sum(&self) -> i64 {
        self.m.iter().enumerate().map(|(p, &x)| if p % 2 == 0 { x as i64 } else { -(x as i64) }).sum()
    }

    /// Weak Morse inequalities `m_p >= b_p`.
    pub fn dominates(&self, b: &BettiVector) -> bool {
        self.m.len() == b.b.len() && self.m.iter().zip(&b.b).all(|(m, b)| m >= b)
    }
}

pub fn critical_cells(v: &VectorField, k: &Complex) -> (MorseCounts, Vec<Vec<CellId>>) {
    let mut lists = vec![Vec::new(); k.dim() + 1];
    for (i, c) in k.cells().iter().enumerate() {
        if !v.is_matched(&c.id) {
            lists[k.cell_dim(i)].push(c.id.clone());
        }
    }
    (MorseCounts { m: lists.iter().map(|l| l.len()).collect() }, lists)
}

pub fn is_perfect(k: &Complex, v: &VectorField) -> bool {
    critical_cells(v, k).0.m == betti_mod2(k).b
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnePathTree {
    pub root: CellId,
    /// vertex -> (matched edge, next vertex)
    pub parent: BTreeMap<CellId, (CellId, CellId)>,
}

impl OnePathTree {
    /// Every vertex walks to the root without repeating a vertex.
    pub fn reaches_root(&self) -> bool {
        self.parent.keys().all(|start| {
            let mut x = start;
            for _ in 0..=self.parent.len() {
                match self.parent.get(x) {
                    Some((_, y)) => x = y,
                    None => return *x == self.root,
                }
            }
            false
        })
    }
}

pub fn trace_1path_tree(k: &Complex, v: &VectorField) -> Result<OnePathTree> {
    let m = Matching::new(k, v)?;
    let crit: Vec<usize> = k.cells_of_dim(0).iter().copied().filter(|&x| m.partner[x].is_none()).collect();
    if crit.len() != 1 {
        return Err(Error::MultipleRoots(crit.len()));
    }
    let mut parent = BTreeMap::new();
    for &x in k.cells_of_dim(0) {
        if x == crit[0] {
            continue;
        }
        let e = m.up(k, x).ok_or_else(|| Error::SplitDetected(k.id(x).clone()))?;
        parent.insert(k.id(x).clone(), (k.id(e).clone(), k.id(k.other_endpoint(e, x)).clone()));
    }
    let tree = OnePathTree { root: k.id(crit[0]).clone(), parent };
    if !tree.reaches_root() {
        return Err(Error::CyclicField(tree.root.clone()));
    }
    Ok(tree)
}

/// Traces backwards from a non-critical 2-cell to the critical 2-cell whose
/// facet starts the unique 2-path ending there.
pub fn trace_2path(
    k: &Complex,
    v: &VectorField,
    start: &CellId,
    expected_source: Option<&CellId>,
) -> Result<GradientPath> {
    let s = k.get(start)?;
    if k.cell_dim(s) != 2 {
        return Err(Error::NotA2Cell(start.clone()));
    }
    if !v.is_matched(start) {
        return Err(Error::StartIsCritical(start.clone()));
    }
    let mut rev: Vec<(usize, usize)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut c = s;
    let source = loop {
        if !seen.insert(c) {
            return Err(Error::CyclicField(k.id(c).clone()));
        }
        let e = v
            .down(k.id(c))
            .and_then(|e| k.index_of(e.as_str()))
            .ok_or_else(|| Error::InconsistentField(k.id(c).clone()))?;
        let cf = k.cofaces(e);
        if cf.len() != 2 || !cf.contains(&c) {
            return Err(Error::InconsistentField(k.id(e).clone()));
        }
        rev.push((e, c));
        let other = if cf[0] == c { cf[1] } else { cf[0] };
        if !v.is_matched(k.id(other)) {
            break other;
        }
        c = other;
    };
    let source = k.id(source).clone();
    if let Some(want) = expected_source {
        if *want != source {
            return Err(Error::PathEscapes { start: start.clone(), found: source });
        }
    }
    let steps = rev.iter().rev().flat_map(|&(e, c)| [k.id(e).clone(), k.id(c).clone()]).collect();
    Ok(GradientPath { dim: 2, steps, source: Some(source) })
}

/// Position-index function from a topological order of the Hasse digraph with
/// each pair merged into one node.
pub fn synthesize_function(k: &Complex, v: &VectorField) -> Result<MorseFunction> {
    let m = Matching::new(k, v)?;
    let n = k.len();
    let rep = |i: usize| m.down(k, i).unwrap_or(i);
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for t in 0..n {
        for &s in k.boundary(t) {
            if m.partner[s] == Some(t) {
                continue;
            }
            succ[rep(s)].push(rep(t));
            indeg[rep(t)] += 1;
        }
    }
    let mut heap: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&i| rep(i) == i && indeg[i] == 0).map(Reverse).collect();
    let mut value = vec![f64::NAN; n];
    let mut pos = 0usize;
    while let Some(Reverse(x)) = heap.pop() {
        value[x] = pos as f64;
        pos += 1;
        for &y in &succ[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                heap.push(Reverse(y));
            }
        }
    }
    let mut f = MorseFunction::new();
    for i in 0..n {
        let x = value[rep(i)];
        if x.is_nan() {
            return Err(Error::CyclicField(k.id(i).clone()));
        }
        f.set(k.id(i).clone(), x);
    }
    Ok(f)
}

/// Extends the values of `fixed` to a function inducing `v`, placing free
/// cells strictly between their fixed neighbours in the Hasse digraph.
pub fn extend_function(k: &Complex, v: &VectorField, fixed: &MorseFunction) -> Result<MorseFunction> {
    let m = Matching::new(k, v)?;
    let n = k.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in 0..n {
        for &s in k.boundary(t) {
            let (a, b) = if m.partner[s] == Some(t) { (t, s) } else { (s, t) };
            succ[a].push(b);
            pred[b].push(a);
        }
    }
    let mut indeg: Vec<usize> = pred.iter().map(|p| p.len()).collect();
    let mut heap: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(x)) = heap.pop() {
        order.push(x);
        for &y in &succ[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                heap.push(Reverse(y));
            }
        }
    }
    if order.len() != n {
        let stuck = (0..n).find(|&i| indeg[i] > 0).unwrap_or(0);
        return Err(Error::CyclicField(k.id(stuck).clone()));
    }
    let fx: Vec<Option<f64>> = (0..n).map(|i| fixed.get(k.id(i))).collect();
    let known: Vec<f64> = fx.iter().flatten().copied().collect();
    let span = (n + 1) as f64;
    let lo = known.iter().copied().fold(0.0, f64::min) - span;
    let hi = known.iter().copied().fold(0.0, f64::max) + span;
    let mut above = vec![lo; n];
    let mut d_up = vec![0usize; n];
    for &x in &order {
        if let Some(val) = fx[x] {
            above[x] = val;
            continue;
        }
        let mut a = lo;
        let mut d = 0;
        for &p in &pred[x] {
            a = a.max(above[p]);
            d = d.max(if fx[p].is_some() { 0 } else { d_up[p] });
        }
        above[x] = a;
        d_up[x] = d + 1;
    }
    let mut below = vec![hi; n];
    let mut d_down = vec![0usize; n];
    for &x in order.iter().rev() {
        if let Some(val) = fx[x] {
            below[x] = val;
            continue;
        }
        let mut b = hi;
        let mut d = 0;
        for &s in &succ[x] {
            b = b.min(below[s]);
            d = d.max(if fx[s].is_some() { 0 } else { d_down[s] });
        }
        below[x] = b;
        d_down[x] = d + 1;
    }
    let mut f = MorseFunction::new();
    for i in 0..n {
        let val = match fx[i] {
            Some(val) => val,
            None => {
                if above[i] >= below[i] {
                    return Err(Error::InvalidFunction(k.id(i).clone()));
                }
                let t = d_up[i] as f64 / (d_up[i] + d_down[i]) as f64;
                above[i] + (below[i] - above[i]) * t
            }
        };
        f.set(k.id(i).clone(), val);
    }
    let report = validate_function(k, &f)?;
    if let Some((c, _)) = report.violations.first() {
        return Err(Error::InvalidFunction(c.clone()));
    }
    if induced_field(k, &f)? != *v {
        return Err(Error::InvalidFunction(k.id(0).clone()));
    }
    Ok(f)
}

/// Breaks ties inside each level set: higher dimensions first, then by id,
/// spread over half the smallest gap between distinct values.
pub fn make_injective(k: &Complex, f: &MorseFunction) -> Result<MorseFunction> {
    let mut cells: Vec<(f64, usize, CellId)> = Vec::with_capacity(k.len());
    for i in 0..k.len() {
        cells.push((f.at(k, i)?, k.cell_dim(i), k.id(i).clone()));
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
    let mut gap = f64::INFINITY;
    for w in cells.windows(2) {
        if w[1].0 > w[0].0 {
            gap = gap.min(w[1].0 - w[0].0);
        }
    }
    if !gap.is_finite() {
        gap = 1.0;
    }
    let mut out = MorseFunction::new();
    let mut i = 0;
    while i < cells.len() {
        let mut j = i;
        while j < cells.len() && cells[j].0 == cells[i].0 {
            j += 1;
        }
        let size = (j - i) as f64;
        for (r, c) in cells[i..j].iter().enumerate() {
            out.set(c.2.clone(), c.0 + gap * r as f64 / (2.0 * size));
        }
        i = j;
    }
    Ok(out)
}

pub fn is_injective(f: &MorseFunction) -> bool {
    let mut v: Vec<f64> = f.iter().map(|(_, x)| x).collect();
    v.sort_by(f64::total_cmp);
    v.windows(2).all(|w| w[0] < w[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_poset, build_simplicial, CellRecord, Tag};

    fn tetra() -> Complex {
        build_simplicial(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]], true).unwrap()
    }

    fn id(s: &str) -> CellId {
        s.into()
    }

    fn dim_function(k: &Complex) -> MorseFunction {
        (0..k.len()).map(|i| (k.id(i).clone(), k.cell_dim(i) as f64)).collect()
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
    fn dimension_function() {
        let k = tetra();
        let f = dim_function(&k);
        assert!(validate_function(&k, &f).unwrap().ok);
        assert!(induced_field(&k, &f).unwrap().is_empty());
        let (m, _) = critical_cells(&VectorField::new(), &k);
        assert_eq!(m.m, vec![4, 6, 4]);
        assert!(!is_perfect(&k, &VectorField::new()));
    }

    #[test]
    fn too_many_faces() {
        let k = build_simplicial(&[[0, 1, 2]], false).unwrap();
        let mut f = dim_function(&k);
        f.set(id("t0-1-2"), 0.0);
        for e in ["e0-1", "e0-2", "e1-2"] {
            f.set(id(e), 1.0);
        }
        let r = validate_function(&k, &f).unwrap();
        assert!(r.violations.contains(&(id("t0-1-2"), FunctionViolation::ExceptionalFaces(3))));
        f.remove(&id("v0"));
        assert!(matches!(validate_function(&k, &f), Err(Error::MissingValue(_))));
    }

    #[test]
    fn interval() {
        let recs = alloc::vec![
            CellRecord::new("v0", 0, alloc::vec![], Tag::Original),
            CellRecord::new("v1", 0, alloc::vec![], Tag::Original),
            CellRecord::new("e", 1, alloc::vec![id("v0"), id("v1")], Tag::Original),
        ];
        let k = build_poset(recs).unwrap();
        let f: MorseFunction = [(id("v0"), 0.0), (id("v1"), 1.0), (id("e"), 1.0)].into_iter().collect();
        let v = induced_field(&k, &f).unwrap();
        assert_eq!(v, VectorField::from_pairs([(id("v1"), id("e"))]));
        assert_eq!(critical_cells(&v, &k).1[0], alloc::vec![id("v0")]);
    }

    #[test]
    fn perfect_sphere_field() {
        let k = tetra();
        let v = tetra_field();
        assert!(validate_field(&k, &v).ok);
        assert!(is_perfect(&k, &v));
        let tree = trace_1path_tree(&k, &v).unwrap();
        assert_eq!(tree.root, id("v0"));
        assert_eq!(tree.parent.len(), 3);
        let f = synthesize_function(&k, &v).unwrap();
        assert_eq!(induced_field(&k, &f).unwrap(), v);
        let g = make_injective(&k, &f).unwrap();
        assert!(is_injective(&g));
        assert_eq!(induced_field(&k, &g).unwrap(), v);
        let p = trace_2path(&k, &v, &id("t0-1-2"), Some(&id("t1-2-3"))).unwrap();
        assert_eq!(p.steps, alloc::vec![id("e1-2"), id("t0-1-2")]);
        assert!(p.is_valid(&k, &v));
        assert!(matches!(trace_2path(&k, &v, &id("t1-2-3"), None), Err(Error::StartIsCritical(_))));
    }

    #[test]
    fn matching_violations() {
        let k = tetra();
        let v = VectorField::from_pairs([(id("e0-1"), id("t0-1-2")), (id("e0-2"), id("t0-1-2"))]);
        let r = validate_field(&k, &v);
        assert!(!r.ok);
        assert!(r.violations.contains(&FieldViolation::DoublyMatched(id("t0-1-2"))));
        let v = VectorField::from_pairs([(id("v3"), id("e0-1"))]);
        assert!(validate_field(&k, &v).violations.contains(&FieldViolation::NotIncident(id("v3"), id("e0-1"))));
        let v = VectorField::from_pairs([(id("x"), id("e0-1"))]);
        assert!(!validate_field(&k, &v).ok);
    }

    #[test]
    fn closed_path_on_pillow() {
        let mut recs = Vec::new();
        for i in 0..3 {
            recs.push(CellRecord::new(alloc::format!("v{i}"), 0, alloc::vec![], Tag::Original));
        }
        for (e, a, b) in [("e1", 0, 1), ("e2", 1, 2), ("e3", 0, 2)] {
            recs.push(CellRecord::new(e, 1, alloc::vec![id(&alloc::format!("v{a}")), id(&alloc::format!("v{b}"))], Tag::Original));
        }
        let sides = alloc::vec![id("e1"), id("e2"), id("e3")];
        recs.push(CellRecord::new("tTop", 2, sides.clone(), Tag::Original));
        recs.push(CellRecord::new("tBottom", 2, sides, Tag::Original));
        let k = build_poset(recs).unwrap();
        let v = VectorField::from_pairs([(id("e1"), id("tTop")), (id("e2"), id("tBottom"))]);
        let r = validate_field(&k, &v);
        assert!(!r.ok);
        let w = r.cycle_witness.unwrap();
        assert_eq!(w.steps.first(), w.steps.last());
        assert_eq!(w.steps.len(), 5);
        assert!(matches!(synthesize_function(&k, &v), Err(Error::CyclicField(_))));
    }

    #[test]
    fn two_roots() {
        let k = tetra();
        let mut v = tetra_field();
        v.unpair(&id("v3"));
        assert!(matches!(trace_1path_tree(&k, &v), Err(Error::MultipleRoots(2))));
    }

    #[test]
    fn injective_keeps_pairs_strict() {
        let k = tetra();
        let f = synthesize_function(&k, &tetra_field()).unwrap();
        assert_eq!(f.get(&id("v1")), f.get(&id("e0-1")));
        let g = make_injective(&k, &f).unwrap();
        assert!(g.get(&id("v1")).unwrap() > g.get(&id("e0-1")).unwrap());
        let h = make_injective(&k, &dim_function(&k)).unwrap();
        let max_v = ["v0", "v1", "v2", "v3"].iter().map(|c| h.get(&id(c)).unwrap()).fold(f64::MIN, f64::max);
        let min_e = k.cells_of_dim(1).iter().map(|&e| h.get(k.id(e)).unwrap()).fold(f64::MAX, f64::min);
        assert!(max_v < min_e);
        assert!(is_injective(&h));
    }

    #[test]
    fn extension_respects_fixed_values() {
        let k = tetra();
        let v = tetra_field();
        let mut fixed = MorseFunction::new();
        fixed.set(id("v0"), -5.0);
        fixed.set(id("t1-2-3"), 40.0);
        let f = extend_function(&k, &v, &fixed).unwrap();
        assert_eq!(f.get(&id("v0")), Some(-5.0));
        assert_eq!(f.get(&id("t1-2-3")), Some(40.0));
        fixed.set(id("e0-1"), -100.0);
        assert!(extend_function(&k, &v, &fixed).is_err());
    }
}
