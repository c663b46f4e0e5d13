use std::sync::Arc;

use ainf_core::ainfinity::{
    compose_maps, conjugate_structure, morphism_defect, AInfMorphism, CoalgebraMap, MultilinearMap,
};
use ainf_core::coeff::{unit_range, Ring, Scalar, UnitRange};
use ainf_core::formality::{
    compose_tower, induce_s1, key_lemma_step, massey_triple, run_formality, schematic_sum, twisting_map,
    verify_degree_twisting, FormalityError, FormalityFlag, TwistData,
};
use ainf_core::graded::homology_with_retraction;
use ainf_core::oracle::{
    conjugated_formal_instance, fixture, massey5, random_formal_algebra, random_unipotent_map,
};
use ainf_core::transfer::transfer;
use ainf_core::GradedMap;

fn twist_on(h: &ainf_core::dga::Dga, alpha: i64, c: u32) -> TwistData {
    let ring = h.ring();
    TwistData::diagonal(h.module().clone(), Scalar::from_int(ring, alpha), c).unwrap()
}

#[test]
fn strict_automorphism_needs_no_correction() {
    let h = random_formal_algebra(Ring::Rationals, 2, 1, 1);
    let t = twist_on(&h, 2, 1);
    let m = Arc::new(h.to_structure(5));
    let s = AInfMorphism::strict_from_linear(&t.sigma_hat, m.clone(), m.clone()).unwrap();
    let step = key_lemma_step(&m, &s, 2, &t).unwrap();
    assert!(step.f.is_identity());
    assert_eq!(step.structure, m);
    assert_eq!(step.automorphism, s);
}

#[test]
fn key_lemma_on_generated_instances() {
    for (ring, alpha) in [(Ring::Rationals, 2), (Ring::PrimeField(5), 2), (Ring::LocalIntegers(7), 3)] {
        for seed in 0..6 {
            let h = random_formal_algebra(ring, 2, 1, seed);
            let t = twist_on(&h, alpha, 1);
            for n in 1..=3 {
                let (m, s) =
                    conjugated_formal_instance(&h, &t.alpha, 1, seed * 7 + n as u64, n + 3, n + 1).unwrap();
                let step = key_lemma_step(&m, &s, n, &t).unwrap();
                // f supported in arities 1 and n + 1
                for k in 2..=step.f.max_arity() {
                    if k != n + 1 {
                        assert!(step.f.component(k).is_zero());
                    }
                }
                // intertwining: s' ∘ f = f ∘ s
                let left = compose_maps(step.automorphism.map(), &step.f).unwrap();
                let right = compose_maps(&step.f, s.map()).unwrap();
                assert_eq!(left, right, "{ring} seed {seed} n {n}");
                let sum = schematic_sum(&m, &step.f, n);
                assert!(sum.is_zero(), "{ring} seed {seed} n {n}");
            }
        }
    }
}

#[test]
fn schematic_sum_matches_conjugation_for_any_single_component() {
    let ring = Ring::Rationals;
    for seed in 0..8 {
        let h = random_formal_algebra(ring, 2, 2, seed);
        for n in 1..=3 {
            let (m, _) =
                conjugated_formal_instance(&h, &Scalar::from_int(ring, 2), 1, seed + 50, n + 2, n + 1).unwrap();
            let raw = random_unipotent_map(h.module().clone(), n + 2, n + 1, 0.6, seed + 99);
            let comps: Vec<MultilinearMap> = raw
                .components()
                .iter()
                .enumerate()
                .map(|(i, c)| if i == 0 || i == n { c.clone() } else { MultilinearMap::new(i + 1) })
                .collect();
            let f = CoalgebraMap::new(raw.source().clone(), raw.target().clone(), comps).unwrap();
            let conj = conjugate_structure(&f, &m).unwrap();
            assert_eq!(schematic_sum(&m, &f, n), *conj.component(n + 2));
        }
    }
}

#[test]
fn coefficient_divides_by_the_twisting_gap() {
    // α = 3, c = 1, n = 1: f_2 = s_2 / (3^{N+1} − 3^N) on a tuple of total degree N
    let ring = Ring::Rationals;
    let h = random_formal_algebra(ring, 1, 1, 0);
    let t = twist_on(&h, 3, 1);
    let phi = random_unipotent_map(h.module().clone(), 4, 2, 1.0, 5);
    let (m, s) = ainf_core::oracle::conjugated_formal_instance_with(&h, &t.alpha, 1, &phi).unwrap();
    let step = key_lemma_step(&m, &s, 1, &t).unwrap();
    let table = [(-2, (9, 2)), (-3, (27, 2)), (-4, (81, 2))];
    let mut seen = 0;
    for (tuple, v) in s.component(2).iter() {
        let n: i64 = tuple.iter().map(|&i| h.module().degree(i)).sum();
        let (_, (a, b)) = table.iter().find(|(d, _)| *d == n).unwrap();
        let expected = Scalar::from_fraction(ring, *a, *b).unwrap();
        assert_eq!(step.f.component(2).value(tuple), v.scaled(&expected));
        seen += 1;
    }
    assert!(seen > 0);
}

#[test]
fn preconditions_are_enforced() {
    let h = random_formal_algebra(Ring::Rationals, 2, 1, 3);
    let t = twist_on(&h, 2, 1);
    let (m, s) = conjugated_formal_instance(&h, &t.alpha, 1, 4, 5, 2).unwrap();
    assert!(!m.component(3).is_zero());
    let err = key_lemma_step(&m, &s, 2, &t).unwrap_err();
    assert!(matches!(err, FormalityError::PreconditionViolated(_)));
}

#[test]
fn driver_recovers_formality_over_q() {
    for seed in 0..5 {
        let h = random_formal_algebra(Ring::Rationals, 2, 2, seed);
        let t = twist_on(&h, 2, 1);
        let (m, s) = conjugated_formal_instance(&h, &t.alpha, 1, seed + 10, 6, 2).unwrap();
        assert!(!m.higher_support().is_empty());
        let cert = run_formality(&m, &s, &t, 6).unwrap();
        assert!(cert.obstruction.is_none());
        assert!(cert.final_structure.higher_support().is_empty());
        assert_eq!(cert.flag, FormalityFlag::FormalUpToK);
        assert!(morphism_defect(&cert.iso).is_zero());
        assert!(cert.iso.linear_part().inverse().is_ok());
    }
}

#[test]
fn obstruction_boundary_matches_unit_range() {
    for (ring, alpha, k) in [
        (Ring::PrimeField(5), 2, 5),
        (Ring::LocalIntegers(7), 3, 7),
        (Ring::PrimeField(7), 2, 5),
    ] {
        let h = random_formal_algebra(ring, 1, 1, 2);
        let t = twist_on(&h, alpha, 1);
        let (m, s) = conjugated_formal_instance(&h, &t.alpha, 1, 3, k, 2).unwrap();
        let cert = run_formality(&m, &s, &t, k).unwrap();
        let UnitRange::Finite(bound) = unit_range(&t.alpha, 64).unwrap() else {
            panic!("finite order expected")
        };
        let obstruction = cert.obstruction.expect("obstruction within range");
        assert_eq!(obstruction.failed_k, bound + 1);
        assert!(!obstruction.denominator.is_unit());
        assert_eq!(cert.achieved_n, bound as usize);
    }
}

#[test]
fn tower_stabilizes() {
    let h = random_formal_algebra(Ring::Rationals, 2, 1, 8);
    let t = twist_on(&h, 2, 1);
    let (m, s) = conjugated_formal_instance(&h, &t.alpha, 1, 9, 7, 2).unwrap();
    let cert = run_formality(&m, &s, &t, 7).unwrap();
    assert!(cert.steps.len() >= 5);
    let full = compose_tower(m.module(), 7, &cert.steps).unwrap();
    for i in 1..cert.steps.len() {
        let prefix = compose_tower(m.module(), 7, &cert.steps[..i]).unwrap();
        assert_eq!(full.component(i + 1), prefix.component(i + 1), "index {i}");
    }
    assert!(compose_tower(m.module(), 7, &[]).unwrap().is_identity());
    assert_eq!(compose_tower(m.module(), 7, &cert.steps[..1]).unwrap(), cert.steps[0]);
}

fn pipeline(name: &str) -> (ainf_core::oracle::Fixture, Result<ainf_core::formality::FormalityCertificate, FormalityError>) {
    let f = fixture(name).unwrap();
    let run = f.run.unwrap();
    let twist = f.twist.clone().unwrap();
    let r = homology_with_retraction(&f.algebra.complex().unwrap()).unwrap();
    let a = Arc::new(f.algebra.to_structure(run.max_arity));
    let tr = transfer(&a, &r).unwrap();
    let report = verify_degree_twisting(&f.algebra, &twist, &r).unwrap();
    assert_eq!(Some(report.all_pass()), f.expected.twisting_passes, "{name}");
    let s1 = induce_s1(&tr.projection, &twist.sigma_hat, &tr.inclusion).unwrap();
    assert!(morphism_defect(&s1).is_zero());
    let sigma_h = twisting_map(r.homology.clone(), &twist.alpha, twist.c).unwrap();
    assert_eq!(s1.linear_part(), sigma_h);
    let h_twist = TwistData::new(twist.alpha.clone(), twist.c, sigma_h).unwrap();
    let cert = run_formality(&tr.structure, &s1, &h_twist, run.target_n);
    (f, cert)
}

#[test]
fn truncpoly_is_formal_with_identity_certificate() {
    let (f, cert) = pipeline("truncpoly");
    let cert = cert.unwrap();
    assert_eq!(Some(cert.achieved_n), f.expected.achieved_n);
    assert!(cert.iso.map().is_identity());
    assert_eq!(cert.flag, FormalityFlag::Formal);
}

#[test]
fn cpn_fp_reaches_six_formality() {
    let (f, cert) = pipeline("cpn_fp");
    let cert = cert.unwrap();
    assert_eq!(Some(cert.achieved_n), f.expected.achieved_n);
    let o = cert.obstruction.unwrap();
    assert_eq!((o.step, o.failed_k), (8, 4));
    assert_eq!(cert.c as usize * cert.achieved_n, 6);
    assert_eq!(cert.flag, FormalityFlag::Formal);
}

#[test]
fn massey5_triple_and_rejected_twistings() {
    let f = fixture("massey5").unwrap();
    let r = homology_with_retraction(&f.algebra.complex().unwrap()).unwrap();
    let a = Arc::new(f.algebra.to_structure(3));
    let t = transfer(&a, &r).unwrap();
    let h = &r.homology;
    let (x, y, rr) = (h.index_of("[x]").unwrap(), h.index_of("[y]").unwrap(), h.index_of("[r]").unwrap());
    let triple = massey_triple(&t.structure, x, y, y).unwrap();
    assert!(triple.defined);
    assert_eq!(triple.class.len(), 1);
    assert!(triple.class.get(rr).is_some());

    let twist = f.twist.clone().unwrap();
    let report = verify_degree_twisting(&f.algebra, &twist, &r).unwrap();
    assert!(!report.commutes_with_d);
}

#[test]
fn massey_needs_vanishing_products() {
    let h = random_formal_algebra(Ring::Rationals, 1, 1, 1);
    let m = h.to_structure(3);
    if !m.component(2).value(&[0, 0]).is_zero() {
        assert!(matches!(massey_triple(&m, 0, 0, 0), Err(FormalityError::ProductsNonzero(_))));
    }
    let zero = random_formal_algebra(Ring::Rationals, 2, 0, 1).to_structure(3);
    assert!(massey_triple(&zero, 0, 1, 0).unwrap().class.is_zero());
}

#[test]
fn no_diagonal_twisting_of_massey5_over_f5() {
    let ring = Ring::PrimeField(5);
    let a = massey5(ring);
    let r = homology_with_retraction(&a.complex().unwrap()).unwrap();
    let module = a.module().clone();
    for alpha in [2, 3] {
        let alpha = Scalar::from_int(ring, alpha);
        for code in 0..5u32.pow(5) {
            let entries: Vec<(usize, usize, Scalar)> = (0..5)
                .map(|j| (j, j, Scalar::from_int(ring, ((code / 5u32.pow(j as u32)) % 5) as i64)))
                .collect();
            let sigma = GradedMap::from_entries(module.clone(), module.clone(), 0, entries).unwrap();
            let t = TwistData::new(alpha.clone(), 1, sigma).unwrap();
            assert!(!verify_degree_twisting(&a, &t, &r).unwrap().all_pass());
        }
    }
}
