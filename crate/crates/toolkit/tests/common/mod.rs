#![allow(dead_code)]

use dms_toolkit::dms_core::{Complex, VectorField};

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
        let rows = k
            .cells_of_dim(p - 1)
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

pub fn counts(k: &Complex, v: &VectorField) -> Vec<usize> {
    (0..=k.dim()).map(|p| k.cells_of_dim(p).iter().filter(|&&c| !v.is_matched(k.id(c))).count()).collect()
}

/// Strong Morse inequalities, with equality in the top degree.
pub fn strong_inequalities(m: &[usize], b: &[usize]) -> bool {
    let mut sm = 0i64;
    let mut sb = 0i64;
    for p in 0..m.len() {
        sm = m[p] as i64 - sm;
        sb = b[p] as i64 - sb;
        if sm < sb {
            return false;
        }
    }
    sm == sb
}
