use std::sync::Arc;

use ainf_core::ainfinity::{coderivation_square, compose, morphism_defect, AInfMorphism};
use ainf_core::coeff::Ring;
use ainf_core::graded::{homology_with_retraction, verify_retraction};
use ainf_core::oracle::{fixture, random_dga};
use ainf_core::transfer::{transfer, transfer_structure};
use ainf_core::{GradedMap, Vector};

#[test]
fn massey5_transfer() {
    let f = fixture("massey5").unwrap();
    let r = homology_with_retraction(&f.algebra.complex().unwrap()).unwrap();
    assert!(verify_retraction(&r).all_pass());
    let a = Arc::new(f.algebra.to_structure(5));
    let t = transfer(&a, &r).unwrap();
    let h = &r.homology;
    let names: Vec<&str> = h.basis().iter().map(|g| g.name.as_str()).collect();
    assert_eq!(names, vec!["[r]", "[x]", "[y]"]);
    let (x, y, rr) = (h.index_of("[x]").unwrap(), h.index_of("[y]").unwrap(), h.index_of("[r]").unwrap());
    let class = t.structure.component(3).value(&[x, y, y]);
    assert_eq!(class.len(), 1);
    assert!(class.get(rr).is_some());
    // ι_2(x, y) = ±s
    let s = a.module().index_of("s").unwrap();
    let iota2 = t.inclusion.component(2).value(&[x, y]);
    assert_eq!(iota2.len(), 1);
    assert!(iota2.get(s).is_some());
    assert!(coderivation_square(&t.structure).is_zero());
    assert!(morphism_defect(&t.inclusion).is_zero());
    assert!(morphism_defect(&t.projection).is_zero());
    assert_eq!(
        compose(&t.projection, &t.inclusion).unwrap(),
        AInfMorphism::identity(t.structure.clone())
    );
}

#[test]
fn zero_differential_transfers_to_itself() {
    let f = fixture("truncpoly").unwrap();
    let r = homology_with_retraction(&f.algebra.complex().unwrap()).unwrap();
    let a = Arc::new(f.algebra.to_structure(5));
    let t = transfer(&a, &r).unwrap();
    // h = 0, so μ^t_2(u, v) = p μ_2(i u, i v) and i identifies it with μ_2
    let dim = r.homology.dim();
    for u in 0..dim {
        for v in 0..dim {
            let lifted = r.i.apply(&t.structure.component(2).value(&[u, v]));
            let (iu, iv) = (r.i.column(u), r.i.column(v));
            let mut direct = Vector::new();
            for (a1, c1) in iu.iter() {
                for (a2, c2) in iv.iter() {
                    direct.add_scaled(&a.component(2).value(&[a1, a2]), &(c1 * c2));
                }
            }
            assert_eq!(lifted, direct);
        }
    }
    assert!(t.structure.higher_support().is_empty());
    for k in 2..=5 {
        assert!(t.inclusion.component(k).is_zero());
        assert!(t.projection.component(k).is_zero());
    }
    assert_eq!(t.inclusion.linear_part(), r.i);
    assert_eq!(t.projection.linear_part(), r.p);
}

#[test]
fn acyclic_complex_has_zero_transfer() {
    let f = fixture("acyclic2").unwrap();
    let r = homology_with_retraction(&f.algebra.complex().unwrap()).unwrap();
    assert_eq!(r.homology.dim(), 0);
    let s = transfer_structure(&f.algebra.to_structure(4), &r, 4).unwrap();
    assert!(s.components().iter().all(|c| c.is_zero()));
}

#[test]
fn transfer_relations_on_random_dgas() {
    for ring in [Ring::Rationals, Ring::PrimeField(5), Ring::LocalIntegers(3)] {
        for seed in 0..30 {
            let dga = random_dga(6, (-3, 3), ring, seed);
            let Ok(r) = homology_with_retraction(&dga.complex().unwrap()) else {
                continue;
            };
            let a = Arc::new(dga.to_structure(5));
            let t = transfer(&a, &r).unwrap();
            assert!(coderivation_square(&t.structure).is_zero(), "{ring} seed {seed}");
            assert!(morphism_defect(&t.inclusion).is_zero(), "{ring} seed {seed}");
            assert!(morphism_defect(&t.projection).is_zero(), "{ring} seed {seed}");
            assert_eq!(
                compose(&t.projection, &t.inclusion).unwrap(),
                AInfMorphism::identity(t.structure.clone())
            );
        }
    }
}

#[test]
fn induced_product_ignores_choice_of_representatives() {
    // moving each lift i(u) by a boundary d(v) leaves μ^t_2 unchanged
    let mut exercised = 0;
    for seed in 0..40 {
        let dga = random_dga(6, (-2, 2), Ring::Rationals, seed);
        let Ok(r) = homology_with_retraction(&dga.complex().unwrap()) else {
            continue;
        };
        let a = dga.to_structure(2);
        let module = a.module();
        let d = dga.differential();
        let base = transfer_structure(&a, &r, 2).unwrap();
        let cols: Vec<Vector> = (0..r.homology.dim())
            .map(|j| {
                let mut v = r.i.column(j).clone();
                for b in module.in_degree(r.homology.degree(j) + 1) {
                    v.add_assign(d.column(b));
                }
                v
            })
            .collect();
        let mut moved = r.clone();
        moved.i = GradedMap::new(r.homology.clone(), module.clone(), 0, cols).unwrap();
        if moved.i != r.i {
            exercised += 1;
        }
        let other = transfer_structure(&a, &moved, 2).unwrap();
        assert_eq!(other.component(2), base.component(2), "seed {seed}");
    }
    assert!(exercised > 0);
}
