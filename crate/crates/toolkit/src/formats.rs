//! Text formats: TRI (triangle lists), CWP (cell posets), DVF (vector
//! fields) and DMF (function values).

use std::collections::BTreeSet;
use std::fmt::Write;

use dms_core::complex::build_simplicial;
use dms_core::{CellId, CellRecord, Complex, MorseFunction, Tag, VectorField};

use crate::error::{parse_err, Result};

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

/// Whether the text starts with a `tri` header.
pub fn is_tri(text: &str) -> bool {
    lines(text).next().is_some_and(|(_, t)| t[0] == "tri")
}

pub fn parse_tri(text: &str) -> Result<Complex> {
    let mut it = lines(text);
    let (line, head) = it.next().ok_or_else(|| parse_err(1, "empty file"))?;
    if head.len() != 2 || head[0] != "tri" {
        return Err(parse_err(line, "expected `tri <nverts>`"));
    }
    let n: usize = head[1].parse().map_err(|_| parse_err(line, "bad vertex count"))?;
    let mut tris = Vec::new();
    for (line, toks) in it {
        if toks[0] != "t" || toks.len() != 4 {
            return Err(parse_err(line, "expected `t <a> <b> <c>`"));
        }
        let mut t = [0usize; 3];
        for (slot, tok) in t.iter_mut().zip(&toks[1..]) {
            *slot = tok.parse().map_err(|_| parse_err(line, format!("bad vertex `{tok}`")))?;
            if *slot >= n {
                return Err(parse_err(line, format!("vertex {slot} out of range")));
            }
        }
        tris.push(t);
    }
    build_simplicial(&tris, false).map_err(|e| parse_err(line, e.to_string()))
}

pub fn write_tri(tris: &[[usize; 3]]) -> String {
    let n = tris.iter().flatten().max().map_or(0, |m| m + 1);
    let mut out = format!("tri {n}\n");
    for t in tris {
        let _ = writeln!(out, "t {} {} {}", t[0], t[1], t[2]);
    }
    out
}

pub fn parse_cwp(text: &str) -> Result<Complex> {
    let mut records: Vec<CellRecord> = Vec::new();
    let mut index = std::collections::BTreeMap::new();
    let mut last = 0;
    for (line, toks) in lines(text) {
        last = line;
        match toks[0] {
            "cell" if toks.len() == 3 => {
                let dim: usize = toks[2].parse().map_err(|_| parse_err(line, "bad dimension"))?;
                let id = CellId::from(toks[1]);
                if index.insert(id.clone(), records.len()).is_some() {
                    return Err(parse_err(line, format!("duplicate cell {id}")));
                }
                records.push(CellRecord::new(id, dim, Vec::new(), Tag::Original));
            }
            "bnd" if toks.len() >= 2 => {
                let &i = index.get(toks[1]).ok_or_else(|| parse_err(line, format!("unknown cell {}", toks[1])))?;
                for f in &toks[2..] {
                    if !index.contains_key(*f) {
                        return Err(parse_err(line, format!("unknown face {f}")));
                    }
                    records[i].boundary.push(CellId::from(*f));
                }
            }
            _ => return Err(parse_err(line, format!("unexpected `{}`", toks.join(" ")))),
        }
    }
    Complex::from_records(records).map_err(|e| parse_err(last, e.to_string()))
}

pub fn write_cwp(k: &Complex) -> String {
    let mut out = String::new();
    let mut order: Vec<usize> = (0..k.len()).collect();
    order.sort_by(|&a, &b| k.cell_dim(a).cmp(&k.cell_dim(b)).then(k.id(a).cmp(k.id(b))));
    for &c in &order {
        let _ = writeln!(out, "cell {} {}", k.id(c), k.cell_dim(c));
    }
    for &c in &order {
        if k.cell_dim(c) > 0 {
            let faces: Vec<&str> = k.boundary(c).iter().map(|&f| k.id(f).as_str()).collect();
            let _ = writeln!(out, "bnd {} {}", k.id(c), faces.join(" "));
        }
    }
    out
}

fn known(k: &Complex, line: usize, tok: &str) -> Result<CellId> {
    if k.contains(tok) {
        Ok(CellId::from(tok))
    } else {
        Err(parse_err(line, format!("unknown cell {tok}")))
    }
}

/// Pairs are taken as written; a cell matched twice is left for
/// `validate_field` to report.
pub fn parse_dvf(text: &str, k: &Complex) -> Result<VectorField> {
    let mut field = VectorField::new();
    let mut crit = Vec::new();
    for (line, toks) in lines(text) {
        match (toks[0], toks.len()) {
            ("pair", 3) => field.pair(known(k, line, toks[1])?, known(k, line, toks[2])?),
            ("crit", 2) => crit.push((line, known(k, line, toks[1])?)),
            _ => return Err(parse_err(line, format!("unexpected `{}`", toks.join(" ")))),
        }
    }
    for (line, c) in crit {
        if field.is_matched(&c) {
            return Err(parse_err(line, format!("{c} is listed critical but matched")));
        }
    }
    Ok(field)
}

pub fn write_dvf(v: &VectorField, k: &Complex) -> String {
    let mut out = String::new();
    for (a, b) in v.pairs() {
        let _ = writeln!(out, "pair {a} {b}");
    }
    let matched: BTreeSet<&CellId> = v.pairs().flat_map(|(a, b)| [a, b]).collect();
    for i in 0..k.len() {
        if !matched.contains(k.id(i)) {
            let _ = writeln!(out, "crit {}", k.id(i));
        }
    }
    out
}

pub fn parse_dmf(text: &str, k: &Complex) -> Result<MorseFunction> {
    let mut f = MorseFunction::new();
    for (line, toks) in lines(text) {
        if toks[0] != "val" || toks.len() != 3 {
            return Err(parse_err(line, format!("unexpected `{}`", toks.join(" "))));
        }
        let x: f64 = toks[2].parse().map_err(|_| parse_err(line, format!("bad value `{}`", toks[2])))?;
        if !x.is_finite() {
            return Err(parse_err(line, "value must be finite"));
        }
        f.set(known(k, line, toks[1])?, x);
    }
    Ok(f)
}

pub fn write_dmf(f: &MorseFunction) -> String {
    let mut out = String::new();
    for (c, x) in f.iter() {
        let _ = writeln!(out, "val {c} {x}");
    }
    out
}

/// Parses either TRI or CWP, chosen by the header.
pub fn parse_complex(text: &str) -> Result<Complex> {
    if is_tri(text) {
        parse_tri(text)
    } else {
        parse_cwp(text)
    }
}
