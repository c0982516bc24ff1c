//! Canonical complexes used by the tests and the `fixture` subcommand.

use std::fmt;
use std::str::FromStr;

use dms_core::complex::build_simplicial;
use dms_core::field::synthesize_function;
use dms_core::surgery::compose;
use dms_core::{CellId, CellRecord, Complex, MorseFunction, Tag, VectorField};

use crate::error::{Result, ToolError};
use crate::generate::{tree_cotree_field, tree_cotree_field_seeded};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureKind {
    Sphere,
    Torus7,
    Genus(usize),
    Pillow,
    Rp2,
}

impl fmt::Display for FixtureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureKind::Sphere => f.write_str("sphere"),
            FixtureKind::Torus7 => f.write_str("torus7"),
            FixtureKind::Genus(g) => write!(f, "genus{g}"),
            FixtureKind::Pillow => f.write_str("pillow"),
            FixtureKind::Rp2 => f.write_str("rp2"),
        }
    }
}

impl FromStr for FixtureKind {
    type Err = String;

    /// Accepts `sphere`, `torus7`, `pillow`, `rp2`, `genus<g>` or `genus:<g>`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sphere" => Ok(FixtureKind::Sphere),
            "torus7" | "torus" => Ok(FixtureKind::Torus7),
            "pillow" => Ok(FixtureKind::Pillow),
            "rp2" => Ok(FixtureKind::Rp2),
            _ => s
                .strip_prefix("genus")
                .map(|g| g.trim_start_matches(':'))
                .and_then(|g| g.parse().ok())
                .map(FixtureKind::Genus)
                .ok_or_else(|| format!("unknown fixture `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixtureSpec {
    pub kind: FixtureKind,
    /// Zero gives the canonical breadth-first field; anything else a seeded one.
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub complex: Complex,
    /// Tree-cotree field; `None` on non-orientable fixtures.
    pub field: Option<VectorField>,
    pub function: Option<MorseFunction>,
}

pub const TETRA: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

/// Six-vertex projective plane (antipodal quotient of the icosahedron).
pub const RP2: [[usize; 3]; 10] = [
    [0, 1, 2],
    [0, 2, 3],
    [0, 3, 4],
    [0, 4, 5],
    [0, 5, 1],
    [1, 2, 4],
    [2, 3, 5],
    [3, 4, 1],
    [4, 5, 2],
    [5, 1, 3],
];

pub fn torus7_triangles() -> Vec<[usize; 3]> {
    (0..7).flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]]).collect()
}

pub fn sphere() -> Complex {
    build_simplicial(&TETRA, true).expect("tetrahedron")
}

pub fn torus7() -> Complex {
    build_simplicial(&torus7_triangles(), true).expect("seven-vertex torus")
}

pub fn rp2() -> Complex {
    build_simplicial(&RP2, true).expect("projective plane")
}

/// Two triangles glued along their common boundary.
pub fn pillow() -> Complex {
    let id = |s: &str| CellId::from(s);
    let mut recs: Vec<CellRecord> = ["v0", "v1", "v2"].iter().map(|v| CellRecord::new(*v, 0, vec![], Tag::Original)).collect();
    for (e, a, b) in [("e0-1", "v0", "v1"), ("e0-2", "v0", "v2"), ("e1-2", "v1", "v2")] {
        recs.push(CellRecord::new(e, 1, vec![id(a), id(b)], Tag::Original));
    }
    for f in ["f0", "f1"] {
        recs.push(CellRecord::new(f, 2, vec![id("e0-1"), id("e0-2"), id("e1-2")], Tag::Original));
    }
    Complex::from_records(recs).expect("pillow")
}

/// Perfect function on a surface from its tree-cotree field.
pub fn perfect_function(k: &Complex) -> Result<MorseFunction> {
    Ok(synthesize_function(k, &tree_cotree_field(k)?)?)
}

/// Closed orientable surface of genus `g`: the sphere, torus7, or `g - 1`
/// repeated compositions of torus7 copies.
pub fn genus(g: usize) -> Result<Complex> {
    match g {
        0 => Ok(sphere()),
        1 => Ok(torus7()),
        _ => {
            let t = torus7();
            let ft = perfect_function(&t)?;
            let mut k = t.clone();
            for _ in 1..g {
                let fk = perfect_function(&k)?;
                k = compose(&k, &fk, &t, &ft)?.complex;
            }
            Ok(k)
        }
    }
}

pub fn build(spec: FixtureSpec) -> Result<Fixture> {
    let complex = match spec.kind {
        FixtureKind::Sphere => sphere(),
        FixtureKind::Torus7 => torus7(),
        FixtureKind::Genus(g) => genus(g)?,
        FixtureKind::Pillow => pillow(),
        FixtureKind::Rp2 => rp2(),
    };
    if spec.kind == FixtureKind::Rp2 {
        return Ok(Fixture { complex, field: None, function: None });
    }
    let field = if spec.seed == 0 { tree_cotree_field(&complex)? } else { tree_cotree_field_seeded(&complex, spec.seed)? };
    let function = synthesize_function(&complex, &field).map_err(ToolError::from)?;
    Ok(Fixture { complex, field: Some(field), function: Some(function) })
}
