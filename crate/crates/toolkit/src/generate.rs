//! Field generators used as independent oracles: tree-cotree perfect fields
//! on surfaces and random collapse fields in any dimension.

use std::collections::VecDeque;

use dms_core::{Complex, VectorField};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, ToolError};

/// Perfect field on a closed surface from a breadth-first spanning tree of
/// the 1-skeleton rooted at the smallest vertex and a breadth-first spanning
/// tree of the dual graph rooted at the smallest 2-cell.
pub fn tree_cotree_field(k: &Complex) -> Result<VectorField> {
    build(k, None)
}

/// Same construction with random roots and neighbour orders.
pub fn tree_cotree_field_seeded(k: &Complex, seed: u64) -> Result<VectorField> {
    build(k, Some(&mut ChaCha8Rng::seed_from_u64(seed)))
}

fn build(k: &Complex, mut rng: Option<&mut ChaCha8Rng>) -> Result<VectorField> {
    k.verify_closed_surface()?;
    if k.components() != 1 {
        return Err(ToolError::Disconnected);
    }
    let n = k.len();
    let verts = k.cells_of_dim(0);
    let faces = k.cells_of_dim(2);
    let mut field = VectorField::new();
    let mut in_tree = vec![false; n];

    let root = match rng.as_deref_mut() {
        Some(r) => verts[r.gen_range(0..verts.len())],
        None => verts[0],
    };
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        let mut edges = k.cofaces(x).to_vec();
        if let Some(r) = rng.as_deref_mut() {
            edges.shuffle(r);
        }
        for e in edges {
            let y = k.other_endpoint(e, x);
            if !seen[y] {
                seen[y] = true;
                in_tree[e] = true;
                field.pair(k.id(y).clone(), k.id(e).clone());
                queue.push_back(y);
            }
        }
    }

    let root = match rng.as_deref_mut() {
        Some(r) => faces[r.gen_range(0..faces.len())],
        None => faces[0],
    };
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(c) = queue.pop_front() {
        let mut edges = k.boundary(c).to_vec();
        if let Some(r) = rng.as_deref_mut() {
            edges.shuffle(r);
        }
        for e in edges {
            if in_tree[e] {
                continue;
            }
            for &d in k.cofaces(e) {
                if !seen[d] {
                    seen[d] = true;
                    in_tree[e] = true;
                    field.pair(k.id(e).clone(), k.id(d).clone());
                    queue.push_back(d);
                }
            }
        }
    }
    Ok(field)
}

/// Random acyclic field by greedy elementary collapses; when no free face is
/// left a random maximal cell of top remaining dimension is declared critical.
pub fn collapse_field(k: &Complex, seed: u64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = k.len();
    let mut alive = vec![true; n];
    let mut live_cofaces: Vec<usize> = (0..n).map(|c| k.cofaces(c).len()).collect();
    let mut left = n;
    let mut field = VectorField::new();
    let kill = |c: usize, alive: &mut Vec<bool>, live: &mut Vec<usize>| {
        alive[c] = false;
        for &f in k.boundary(c) {
            live[f] -= 1;
        }
    };
    while left > 0 {
        let free: Vec<(usize, usize)> = (0..n)
            .filter(|&c| alive[c] && live_cofaces[c] == 1)
            .map(|c| (c, *k.cofaces(c).iter().find(|&&t| alive[t]).expect("live coface")))
            .filter(|&(_, t)| live_cofaces[t] == 0)
            .collect();
        if let Some(&(s, t)) = free.choose(&mut rng) {
            field.pair(k.id(s).clone(), k.id(t).clone());
            kill(t, &mut alive, &mut live_cofaces);
            kill(s, &mut alive, &mut live_cofaces);
            left -= 2;
        } else {
            let top = (0..n).filter(|&c| alive[c] && live_cofaces[c] == 0).map(|c| k.cell_dim(c)).max().unwrap_or(0);
            let maximal: Vec<usize> =
                (0..n).filter(|&c| alive[c] && live_cofaces[c] == 0 && k.cell_dim(c) == top).collect();
            let &c = maximal.choose(&mut rng).expect("maximal cell");
            kill(c, &mut alive, &mut live_cofaces);
            left -= 1;
        }
    }
    field
}
