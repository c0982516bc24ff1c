use std::collections::BTreeSet;

use dms_toolkit::dms_core::field::{induced_field, validate_field, validate_function};
use dms_toolkit::dms_core::homology::betti_mod2;
use dms_toolkit::dms_core::splitter::{decompose, find_separating_circle, SplitResult};
use dms_toolkit::dms_core::surgery::compose;
use dms_toolkit::dms_core::{CellId, Complex, Error, MorseFunction};
use dms_toolkit::fixtures::{genus, perfect_function, rp2, torus7};
use dms_toolkit::report::Report;

fn summed(g1: usize, g2: usize) -> (Complex, MorseFunction) {
    let (a, b) = (genus(g1).unwrap(), genus(g2).unwrap());
    let c = compose(&a, &perfect_function(&a).unwrap(), &b, &perfect_function(&b).unwrap()).unwrap();
    (c.complex, c.function)
}

fn circle_cells(d: &SplitResult) -> BTreeSet<CellId> {
    let k = &d.surface;
    let mut out = BTreeSet::new();
    for e in &d.circle {
        let i = k.index_of(e.as_str()).unwrap();
        out.extend(k.closure(i).into_iter().map(|c| k.id(c).clone()));
    }
    out
}

fn check(d: &SplitResult, g1: usize, g2: usize) {
    let circle = circle_cells(d);
    for c in &circle {
        if let Some(p) = d.field.partner(c) {
            let interior_max = d.max_side.complex.contains(p.as_str()) && !circle.contains(p);
            assert!(!interior_max, "{c} is paired into the max side with {p}");
        }
    }
    let (bv, be) = d.max_side.boundary_critical;
    assert_eq!(bv, be);
    assert_eq!(d.min_side.euler_characteristic(), 1 - 2 * g1 as i64);
    assert_eq!(d.max_side.euler_characteristic(), 1 - 2 * g2 as i64);

    for (m, g) in [(&d.m1, g1), (&d.m2, g2)] {
        assert_eq!(m.complex.euler_characteristic(), 2 - 2 * g as i64);
        assert_eq!(m.genus, g);
        assert!(m.perfect && m.field_valid);
        assert_eq!(betti_mod2(&m.complex).b, vec![1, 2 * g, 1]);
        assert!(m.complex.verify_closed_surface().unwrap().orientable);
        assert!(validate_function(&m.complex, &m.function).unwrap().ok);
        assert_eq!(induced_field(&m.complex, &m.function).unwrap(), m.field);
    }
}

#[test]
fn two_tori() {
    let (k, f) = summed(1, 1);
    let d = decompose(&k, &f, 1, 1).unwrap();
    check(&d, 1, 1);
    assert!(validate_field(&d.surface, &d.field).ok);
    assert!(d.m1.extended && d.m2.extended);
}

#[test]
fn unequal_genera() {
    for (g1, g2) in [(1, 2), (2, 1), (2, 2), (0, 1), (1, 0)] {
        let (k, f) = summed(g1, g2);
        let d = decompose(&k, &f, g1, g2).unwrap();
        check(&d, g1, g2);
    }
}

#[test]
fn extended_values_agree_on_kept_cells() {
    let (k, f) = summed(1, 1);
    let d = decompose(&k, &f, 1, 1).unwrap();
    let search = find_separating_circle(&k, &f, 1, 1).unwrap();
    for m in [&d.m1, &d.m2] {
        for (c, x) in m.function.iter() {
            if let Some(y) = search.function.get(c) {
                assert_eq!(x, y, "{c}");
            }
        }
    }
}

#[test]
fn circle_search_keeps_the_critical_cells() {
    let (k, f) = summed(1, 2);
    let s = find_separating_circle(&k, &f, 1, 2).unwrap();
    assert!(validate_field(&s.complex, &s.field).ok);
    let v = induced_field(&k, &s.function).unwrap();
    assert!(dms_toolkit::dms_core::field::is_perfect(&k, &v));
    assert!(s.low.iter().all(|e| !s.field.is_matched(e)));
    assert_eq!(s.low.len(), 2);
    assert!(s.region.paths_consistent(&s.complex, &s.field));
    assert!(s.circle.len() >= 3);
}

#[test]
fn preconditions() {
    let t = torus7();
    let f = perfect_function(&t).unwrap();
    assert!(matches!(decompose(&t, &f, 0, 0), Err(Error::NothingToDecompose)));
    assert!(matches!(decompose(&t, &f, 1, 1), Err(Error::WrongCriticalCount { expected: 4, found: 2 })));
    let p = rp2();
    let g = dms_toolkit::dms_core::field::synthesize_function(
        &p,
        &dms_toolkit::generate::tree_cotree_field(&p).unwrap(),
    )
    .unwrap();
    assert!(matches!(decompose(&p, &g, 0, 1), Err(Error::NonOrientableInput)));
}

#[test]
fn report_json_has_both_summands() {
    let (k, f) = summed(1, 1);
    let d = decompose(&k, &f, 1, 1).unwrap();
    let json: serde_json::Value = serde_json::from_str(&Report::decompose(&d).to_json()).unwrap();
    assert_eq!(json["chi"]["m1"], 0);
    assert_eq!(json["chi"]["m2"], 0);
    assert_eq!(json["morseCounts"]["m1"], serde_json::json!([1, 2, 1]));
    assert_eq!(json["perfect"]["m2"], true);
    assert_eq!(json["circleLength"], d.circle.len());
}
