use dms_toolkit::dms_core::complex::simplicial;
use dms_toolkit::dms_core::field::{critical_cells, induced_field, is_perfect, validate_field};
use dms_toolkit::dms_core::homology::betti_mod2;
use dms_toolkit::error::ToolError;
use dms_toolkit::fixtures::{build, genus, pillow, rp2, sphere, torus7, FixtureKind, FixtureSpec};
use dms_toolkit::generate::{collapse_field, tree_cotree_field, tree_cotree_field_seeded};

#[test]
fn fixture_names() {
    for (s, k) in [
        ("sphere", FixtureKind::Sphere),
        ("torus7", FixtureKind::Torus7),
        ("genus3", FixtureKind::Genus(3)),
        ("genus:2", FixtureKind::Genus(2)),
        ("pillow", FixtureKind::Pillow),
        ("rp2", FixtureKind::Rp2),
    ] {
        assert_eq!(s.parse::<FixtureKind>().unwrap(), k);
    }
    assert_eq!(FixtureKind::Genus(4).to_string(), "genus4");
    assert!("klein".parse::<FixtureKind>().is_err());
}

#[test]
fn fixture_surfaces() {
    assert_eq!(sphere().euler_characteristic(), 2);
    assert_eq!(torus7().counts(), vec![7, 21, 14]);
    assert_eq!(pillow().counts(), vec![3, 3, 2]);
    let info = rp2().verify_closed_surface().unwrap();
    assert!(!info.orientable);
    assert_eq!(betti_mod2(&rp2()).b, vec![1, 1, 1]);
    for g in 0..=3 {
        let k = genus(g).unwrap();
        let info = k.verify_closed_surface().unwrap();
        assert!(info.orientable);
        assert_eq!(info.genus, g);
        assert_eq!(betti_mod2(&k).b, vec![1, 2 * g, 1]);
    }
}

#[test]
fn tree_cotree_is_perfect() {
    for k in [sphere(), torus7(), pillow(), rp2(), genus(2).unwrap(), genus(3).unwrap()] {
        for seed in [None, Some(1), Some(7), Some(99)] {
            let v = match seed {
                None => tree_cotree_field(&k).unwrap(),
                Some(s) => tree_cotree_field_seeded(&k, s).unwrap(),
            };
            assert!(validate_field(&k, &v).ok);
            assert!(is_perfect(&k, &v), "seed {seed:?}");
        }
    }
}

#[test]
fn generators_are_deterministic() {
    let k = genus(2).unwrap();
    assert_eq!(tree_cotree_field(&k).unwrap(), tree_cotree_field(&k).unwrap());
    assert_eq!(tree_cotree_field_seeded(&k, 5).unwrap(), tree_cotree_field_seeded(&k, 5).unwrap());
    assert_eq!(collapse_field(&k, 5), collapse_field(&k, 5));
    let a = build(FixtureSpec { kind: FixtureKind::Genus(2), seed: 11 }).unwrap();
    let b = build(FixtureSpec { kind: FixtureKind::Genus(2), seed: 11 }).unwrap();
    assert_eq!(a.field, b.field);
    assert_eq!(a.function, b.function);
}

#[test]
fn fixture_functions_induce_their_fields() {
    for kind in [FixtureKind::Sphere, FixtureKind::Torus7, FixtureKind::Genus(2), FixtureKind::Pillow] {
        let fx = build(FixtureSpec { kind, seed: 0 }).unwrap();
        let (v, f) = (fx.field.unwrap(), fx.function.unwrap());
        assert_eq!(induced_field(&fx.complex, &f).unwrap(), v);
    }
    assert!(build(FixtureSpec { kind: FixtureKind::Rp2, seed: 0 }).unwrap().field.is_none());
}

#[test]
fn tree_cotree_needs_a_connected_surface() {
    let open = simplicial(&[vec![0, 1, 2]]).unwrap();
    assert!(matches!(tree_cotree_field(&open), Err(ToolError::Core(_))));
    let two = simplicial(&[
        vec![0, 1, 2],
        vec![0, 1, 3],
        vec![0, 2, 3],
        vec![1, 2, 3],
        vec![4, 5, 6],
        vec![4, 5, 7],
        vec![4, 6, 7],
        vec![5, 6, 7],
    ])
    .unwrap();
    assert!(matches!(tree_cotree_field(&two), Err(ToolError::Disconnected)));
}

#[test]
fn collapse_fields_are_acyclic_in_any_dimension() {
    let facets = |n: usize| -> Vec<Vec<usize>> { (0..=n).map(|s| (0..=n).filter(|&i| i != s).collect()).collect() };
    for n in 2..=5 {
        let k = simplicial(&facets(n)).unwrap();
        let b = betti_mod2(&k);
        for seed in 0..20 {
            let v = collapse_field(&k, seed);
            assert!(validate_field(&k, &v).ok);
            let (m, _) = critical_cells(&v, &k);
            assert!(m.dominates(&b));
            assert_eq!(m.alternating_sum(), k.euler_characteristic());
        }
    }
}
