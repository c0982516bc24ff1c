#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use dms_core::complex::{build_simplicial, simplicial};
use dms_core::{CellId, Complex, VectorField};

pub fn tetra() -> Complex {
    build_simplicial(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]], true).unwrap()
}

/// Seven-vertex torus.
pub fn torus7() -> Complex {
    let mut tris = Vec::new();
    for i in 0..7 {
        tris.push([i, (i + 1) % 7, (i + 3) % 7]);
        tris.push([i, (i + 2) % 7, (i + 3) % 7]);
    }
    build_simplicial(&tris, true).unwrap()
}

/// Boundary of the n-simplex.
pub fn sphere_boundary(n: usize) -> Complex {
    let facets: Vec<Vec<usize>> = (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
    simplicial(&facets).unwrap()
}

pub fn id(s: &str) -> CellId {
    CellId::new(s)
}

/// Cone collapse from the smallest vertex: every cell missing it is paired
/// with its join with it, when that join exists.
pub fn cone_field(k: &Complex) -> VectorField {
    let apex = k.cells_of_dim(0)[0];
    let key = |i: usize| -> BTreeSet<usize> { k.vertices_of(i).into_iter().collect() };
    let by_verts: BTreeMap<BTreeSet<usize>, usize> = (0..k.len()).map(|i| (key(i), i)).collect();
    let mut v = VectorField::new();
    for i in 0..k.len() {
        let mut s = key(i);
        if s.contains(&apex) {
            continue;
        }
        s.insert(apex);
        if let Some(&j) = by_verts.get(&s) {
            v.pair(k.id(i).clone(), k.id(j).clone());
        }
    }
    v
}

/// Rank over GF(2) by plain elimination on dense rows.
pub fn rank_gf2(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c]) else { continue };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] {
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn oracle_betti(k: &Complex) -> Vec<usize> {
    let d = k.dim();
    let mut ranks = vec![0; d + 2];
    for p in 1..=d {
        let lower = k.cells_of_dim(p - 1);
        let rows = lower
            .iter()
            .map(|&f| k.cells_of_dim(p).iter().map(|&c| k.boundary(c).contains(&f)).collect())
            .collect();
        ranks[p] = rank_gf2(rows);
    }
    (0..=d).map(|p| k.count(p) - ranks[p] - ranks[p + 1]).collect()
}

/// Kahn's algorithm on the Hasse diagram with matched arrows reversed.
pub fn oracle_acyclic(k: &Complex, v: &VectorField) -> bool {
    let n = k.len();
    let mut out = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for t in 0..n {
        for &s in k.boundary(t) {
            let (a, b) = if v.contains(k.id(s), k.id(t)) { (s, t) } else { (t, s) };
            out[a].push(b);
            indeg[b] += 1;
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(x) = queue.pop() {
        seen += 1;
        for &y in &out[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                queue.push(y);
            }
        }
    }
    seen == n
}

/// Each cell in at most one pair, each pair a facet relation.
pub fn oracle_matching(k: &Complex, v: &VectorField) -> bool {
    let mut used = BTreeSet::new();
    v.pairs().all(|(a, b)| {
        let (Some(i), Some(j)) = (k.index_of(a.as_str()), k.index_of(b.as_str())) else { return false };
        k.boundary(j).contains(&i) && used.insert(i) && used.insert(j)
    })
}

pub fn counts(k: &Complex, v: &VectorField) -> Vec<usize> {
    (0..=k.dim()).map(|p| k.cells_of_dim(p).iter().filter(|&&c| !v.is_matched(k.id(c))).count()).collect()
}

/// Greedy acyclic matching: incidences are tried in the given order.
pub fn greedy_field(k: &Complex, order: impl IntoIterator<Item = usize>) -> VectorField {
    let inc: Vec<(usize, usize)> = (0..k.len()).flat_map(|t| k.boundary(t).iter().map(move |&s| (s, t))).collect();
    let mut v = VectorField::new();
    for p in order {
        let (s, t) = inc[p % inc.len()];
        let (a, b) = (k.id(s).clone(), k.id(t).clone());
        if v.is_matched(&a) || v.is_matched(&b) {
            continue;
        }
        v.pair(a.clone(), b);
        if !oracle_acyclic(k, &v) {
            v.unpair(&a);
        }
    }
    v
}
