use std::fmt::Write;

use dms_core::{Complex, VectorField};

/// OFF mesh of the 2-cells. Vertices sit on a spherical spiral in id order;
/// the coordinates are for viewing only.
pub fn to_off(k: &Complex) -> String {
    let verts = k.cells_of_dim(0);
    let faces = k.cells_of_dim(2);
    let n = verts.len().max(1) as f64;
    let mut out = format!("OFF\n{} {} {}\n", verts.len(), faces.len(), k.count(1));
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    for i in 0..verts.len() {
        let z = 1.0 - (2.0 * i as f64 + 1.0) / n;
        let r = (1.0 - z * z).sqrt();
        let th = golden * i as f64;
        let _ = writeln!(out, "{:.6} {:.6} {:.6}", r * th.cos(), r * th.sin(), z);
    }
    for &c in faces {
        let (cyc, _) = k.cycle(c);
        let idx: Vec<String> = cyc.iter().map(|v| verts.binary_search(v).expect("vertex").to_string()).collect();
        let _ = writeln!(out, "{} {}", idx.len(), idx.join(" "));
    }
    out
}

/// Hasse diagram in DOT. Matched pairs are drawn as reversed red arrows and
/// critical cells boxed.
pub fn to_dot(k: &Complex, v: Option<&VectorField>) -> String {
    let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
    for i in 0..k.len() {
        let crit = v.is_some_and(|v| !v.is_matched(k.id(i)));
        let shape = if crit { "box" } else { "ellipse" };
        let _ = writeln!(out, "  \"{}\" [shape={shape}];", k.id(i));
    }
    for i in 0..k.len() {
        for &f in k.boundary(i) {
            let (a, b) = (k.id(f), k.id(i));
            if v.is_some_and(|v| v.contains(a, b)) {
                let _ = writeln!(out, "  \"{b}\" -> \"{a}\" [color=red];");
            } else {
                let _ = writeln!(out, "  \"{a}\" -> \"{b}\";");
            }
        }
    }
    out.push_str("}\n");
    out
}
