//! Acceptance suite: one PASS/FAIL line per criterion, all checks exact.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use ainf_cli::commands::{cmd_fixture, cmd_massey};
use ainf_cli::document::{parse, serialize, InputDocument};
use ainf_core::ainfinity::{coderivation_square, compose, compose_maps, morphism_defect, AInfMorphism};
use ainf_core::coeff::{unit_range, Ring, Scalar, UnitRange};
use ainf_core::formality::{
    compose_tower, key_lemma_postconditions, key_lemma_step, n_formal_implies_formal_chains,
    n_formal_implies_formal_cochains, run_formality, schematic_sum, verify_degree_twisting, TwistData,
};
use ainf_core::graded::homology_with_retraction;
use ainf_core::oracle::{
    brute_force_stasheff, conjugated_formal_instance, fixture, massey5, random_dga, random_formal_algebra,
    FIXTURE_NAMES,
};
use ainf_core::transfer::transfer;
use ainf_core::GradedMap;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const CORPUS_SEEDS: u64 = 110;

/// Random dgas of dimension ≤ 6 over Q and F_5 with free homology.
fn corpus() -> Vec<(Ring, u64, ainf_core::dga::Dga)> {
    let mut out = Vec::new();
    for ring in [Ring::Rationals, Ring::PrimeField(5)] {
        for seed in 0..CORPUS_SEEDS {
            out.push((ring, seed, random_dga(6, (-3, 3), ring, seed)));
        }
    }
    out
}

fn transfer_validity() -> Outcome {
    let start = Instant::now();
    let mut runs = 0;
    let mut nontrivial = 0;
    for (ring, seed, dga) in corpus() {
        let r = homology_with_retraction(&dga.complex().unwrap()).map_err(|e| format!("{ring} {seed}: {e}"))?;
        let a = Arc::new(dga.to_structure(5));
        let t = transfer(&a, &r).map_err(|e| e.to_string())?;
        let tag = || format!("{ring} seed {seed}");
        ensure(coderivation_square(&t.structure).is_zero(), || format!("{}: Stasheff", tag()))?;
        ensure(morphism_defect(&t.inclusion).is_zero(), || format!("{}: inclusion", tag()))?;
        ensure(morphism_defect(&t.projection).is_zero(), || format!("{}: projection", tag()))?;
        ensure(
            compose(&t.projection, &t.inclusion).unwrap() == AInfMorphism::identity(t.structure.clone()),
            || format!("{}: projection ∘ inclusion", tag()),
        )?;
        if !t.structure.higher_support().is_empty() {
            nontrivial += 1;
        }
        runs += 1;
    }
    ensure(runs >= 200, || format!("only {runs} runs"))?;
    ensure(nontrivial > 0, || "no higher operations anywhere in the corpus".into())?;
    Ok(format!(
        "{runs} dgas, {nontrivial} with higher operations, K = 5, {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn dual_path() -> Outcome {
    let mut runs = 0;
    for (ring, seed, dga) in corpus() {
        let r = homology_with_retraction(&dga.complex().unwrap()).map_err(|e| e.to_string())?;
        let a = dga.to_structure(5);
        let t = transfer(&Arc::new(a.clone()), &r).map_err(|e| e.to_string())?;
        for s in [&a, t.structure.as_ref()] {
            ensure(brute_force_stasheff(s) == coderivation_square(s), || format!("{ring} seed {seed}"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} structures"))
}

fn massey_reproduction() -> Outcome {
    let f = fixture("massey5").unwrap();
    let r = homology_with_retraction(&f.algebra.complex().unwrap()).unwrap();
    let t = transfer(&Arc::new(f.algebra.to_structure(3)), &r).unwrap();
    let h = &r.homology;
    let (x, y, rr) = (h.index_of("[x]").unwrap(), h.index_of("[y]").unwrap(), h.index_of("[r]").unwrap());
    let class = t.structure.component(3).value(&[x, y, y]);
    let one = Scalar::from_int(Ring::Rationals, 1);
    ensure(
        class.len() == 1 && class.get(rr).is_some_and(|c| *c == one || *c == -&one),
        || format!("μ_3([x],[y],[y]) = {}", h.format_vector(&class)),
    )?;
    let report = cmd_massey(&parse(&serialize(&InputDocument::from_fixture(&f))).unwrap().build().unwrap(), "x", "y", "y")
        .map_err(|e| e.to_string())?;
    ensure(report.machine["defined"] == true && report.machine["class_is_zero"] == false, || {
        format!("massey command: {}", report.machine)
    })?;
    ensure(
        report.machine["indeterminacy"].as_array().is_some_and(|a| a.is_empty()),
        || "nonzero indeterminacy".into(),
    )?;

    let ring = Ring::PrimeField(5);
    let a = massey5(ring);
    let r = homology_with_retraction(&a.complex().unwrap()).unwrap();
    let module = a.module().clone();
    let mut tried = 0;
    for alpha in [2, 3] {
        let alpha = Scalar::from_int(ring, alpha);
        for code in 0..5u32.pow(5) {
            let entries: Vec<(usize, usize, Scalar)> = (0..5)
                .map(|j| (j, j, Scalar::from_int(ring, ((code / 5u32.pow(j as u32)) % 5) as i64)))
                .collect();
            let sigma = GradedMap::from_entries(module.clone(), module.clone(), 0, entries).unwrap();
            let t = TwistData::new(alpha.clone(), 1, sigma).unwrap();
            ensure(!verify_degree_twisting(&a, &t, &r).unwrap().all_pass(), || format!("code {code} passes"))?;
            tried += 1;
        }
    }
    Ok(format!("class {}, {tried} diagonal twistings rejected", h.format_vector(&class)))
}

const PAIRS_PER_RING: usize = 100;

/// Runs `check` on oracle-built key-lemma inputs, `PAIRS_PER_RING` per ring.
fn key_lemma_inputs(mut check: impl FnMut(Ring, u64, usize) -> Result<(), String>) -> Outcome {
    let mut total = 0;
    for ring in [Ring::Rationals, Ring::PrimeField(5), Ring::LocalIntegers(7)] {
        let mut count = 0;
        let mut seed = 0;
        while count < PAIRS_PER_RING {
            let n = 1 + (seed as usize % 3);
            check(ring, seed, n)?;
            count += 1;
            seed += 1;
        }
        total += count;
    }
    Ok(format!("{total} pairs over Q, F_5, Z_(7)"))
}

fn alpha_for(ring: Ring) -> i64 {
    match ring {
        Ring::LocalIntegers(_) => 3,
        _ => 2,
    }
}

fn key_lemma() -> Outcome {
    key_lemma_inputs(|ring, seed, n| {
        let tag = || format!("{ring} seed {seed} n {n}");
        let h = random_formal_algebra(ring, 2, 1, seed);
        let t = TwistData::diagonal(h.module().clone(), Scalar::from_int(ring, alpha_for(ring)), 1).unwrap();
        let (m, s) = conjugated_formal_instance(&h, &t.alpha, 1, seed + 1000, n + 3, n + 1).map_err(|e| e.to_string())?;
        let step = key_lemma_step(&m, &s, n, &t).map_err(|e| format!("{}: {e}", tag()))?;
        key_lemma_postconditions(&m, &step, n, &t).map_err(|e| format!("{}: {e}", tag()))?;
        let after = &step.structure;
        ensure(after.component(2) == m.component(2), || format!("{}: μ_2 changed", tag()))?;
        for k in 3..=n + 2 {
            ensure(after.component(k).is_zero(), || format!("{}: μ_{k} ≠ 0", tag()))?;
        }
        ensure(step.automorphism.component(n + 1).is_zero(), || format!("{}: s' index n ≠ 0", tag()))?;
        for k in 2..=step.f.max_arity() {
            ensure(k == n + 1 || step.f.component(k).is_zero(), || format!("{}: f_{k} ≠ 0", tag()))?;
        }
        ensure(step.f.linear_part() == GradedMap::identity(m.module().clone()), || format!("{}: f_1 ≠ id", tag()))?;
        let left = compose_maps(step.automorphism.map(), &step.f).map_err(|e| e.to_string())?;
        let right = compose_maps(&step.f, s.map()).map_err(|e| e.to_string())?;
        ensure(left == right, || format!("{}: intertwining", tag()))
    })
}

fn schematic_identity() -> Outcome {
    key_lemma_inputs(|ring, seed, n| {
        let h = random_formal_algebra(ring, 2, 1, seed);
        let t = TwistData::diagonal(h.module().clone(), Scalar::from_int(ring, alpha_for(ring)), 1).unwrap();
        let (m, s) = conjugated_formal_instance(&h, &t.alpha, 1, seed + 1000, n + 3, n + 1).map_err(|e| e.to_string())?;
        let step = key_lemma_step(&m, &s, n, &t).map_err(|e| e.to_string())?;
        ensure(schematic_sum(&m, &step.f, n).is_zero(), || format!("{ring} seed {seed} n {n}"))
    })
}

fn driver_ground_truth() -> Outcome {
    let mut runs = 0;
    for (a, b) in [(1, 1), (2, 1), (2, 2), (3, 1), (1, 3)] {
        for seed in 0..4 {
            let h = random_formal_algebra(Ring::Rationals, a, b, seed);
            let t = TwistData::diagonal(h.module().clone(), Scalar::from_int(Ring::Rationals, 2), 1).unwrap();
            let (m, s) = conjugated_formal_instance(&h, &t.alpha, 1, seed + 77, 6, 2).map_err(|e| e.to_string())?;
            let cert = run_formality(&m, &s, &t, 6).map_err(|e| e.to_string())?;
            for k in 3..=6 {
                ensure(cert.final_structure.component(k).is_zero(), || format!("({a},{b}) seed {seed}: μ_{k} ≠ 0"))?;
            }
            ensure(morphism_defect(&cert.iso).is_zero(), || format!("({a},{b}) seed {seed}: iso"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} instances, K = 6"))
}

fn obstruction_boundary() -> Outcome {
    let mut lines = Vec::new();
    for (ring, alpha, k, expected) in [(Ring::PrimeField(5), 2, 6, 3), (Ring::LocalIntegers(7), 3, 8, 5)] {
        let h = random_formal_algebra(ring, 1, 1, 0);
        let t = TwistData::diagonal(h.module().clone(), Scalar::from_int(ring, alpha), 1).unwrap();
        let (m, s) = conjugated_formal_instance(&h, &t.alpha, 1, 1, k, 2).map_err(|e| e.to_string())?;
        let cert = run_formality(&m, &s, &t, k).map_err(|e| e.to_string())?;
        let ob = cert.obstruction.clone().ok_or_else(|| format!("{ring}: no obstruction"))?;
        let UnitRange::Finite(bound) = unit_range(&t.alpha, 64).unwrap() else {
            return Err(format!("{ring}: unit range unbounded"));
        };
        ensure(cert.achieved_n == expected && bound as usize == expected, || {
            format!("{ring}: achieved {} unit_range {bound}", cert.achieved_n)
        })?;
        ensure(ob.failed_k as usize == expected + 1 && ob.denominator.is_zero() == matches!(ring, Ring::PrimeField(_)), || {
            format!("{ring}: obstruction k {} value {}", ob.failed_k, ob.denominator)
        })?;
        ensure(!ob.denominator.is_unit(), || format!("{ring}: denominator is a unit"))?;
        lines.push(format!("{ring} α={alpha}: n={} k={} α^k−1={}", cert.achieved_n, ob.failed_k, ob.denominator));
    }
    Ok(lines.join("; "))
}

fn tower_stabilization() -> Outcome {
    let h = random_formal_algebra(Ring::Rationals, 2, 1, 8);
    let t = TwistData::diagonal(h.module().clone(), Scalar::from_int(Ring::Rationals, 2), 1).unwrap();
    let (m, s) = conjugated_formal_instance(&h, &t.alpha, 1, 9, 7, 2).map_err(|e| e.to_string())?;
    let cert = run_formality(&m, &s, &t, 7).map_err(|e| e.to_string())?;
    let steps = cert.steps.len();
    ensure(steps >= 5, || format!("{steps} steps"))?;
    let full = compose_tower(m.module(), 7, &cert.steps).map_err(|e| e.to_string())?;
    for i in 1..steps {
        let prefix = compose_tower(m.module(), 7, &cert.steps[..i]).map_err(|e| e.to_string())?;
        ensure(full.component(i + 1) == prefix.component(i + 1), || format!("index {i}"))?;
    }
    Ok(format!("{steps}-step tower"))
}

fn predicate_upgrades() -> Outcome {
    let set = |v: &[i64]| v.iter().copied().collect::<BTreeSet<i64>>();
    let mut cases = 0;
    for n in 1..=8i64 {
        // support inside [−n−2, −2] with j = 2, q = 2
        let inside: Vec<i64> = (2..=n + 2).map(|d| -d).collect();
        ensure(n_formal_implies_formal_cochains(&set(&inside), n, 2, 2), || format!("n {n}: full window"))?;
        ensure(n_formal_implies_formal_cochains(&set(&[-2]), n, 2, 2), || format!("n {n}: {{-2}}"))?;
        ensure(n_formal_implies_formal_cochains(&set(&[-n - 2]), n, 2, 2), || format!("n {n}: lower end"))?;
        ensure(!n_formal_implies_formal_cochains(&set(&[-n - 3]), n, 2, 2), || format!("n {n}: below"))?;
        ensure(!n_formal_implies_formal_cochains(&set(&[-1, -2]), n, 2, 2), || format!("n {n}: -1"))?;
        ensure(!n_formal_implies_formal_cochains(&set(&[0]), n, 2, 2), || format!("n {n}: 0"))?;
        ensure(n_formal_implies_formal_cochains(&BTreeSet::new(), n, 2, 2), || format!("n {n}: empty"))?;
        let chains: Vec<i64> = (0..=n).collect();
        ensure(n_formal_implies_formal_chains(&set(&chains), n), || format!("n {n}: chains"))?;
        ensure(!n_formal_implies_formal_chains(&set(&[n + 1]), n), || format!("n {n}: chains above"))?;
        ensure(!n_formal_implies_formal_chains(&set(&[-1]), n), || format!("n {n}: chains below"))?;
        cases += 10;
    }
    ensure(n_formal_implies_formal_cochains(&set(&[-2, -3]), 3, 1, 2), || "j = 1 window".into())?;
    ensure(!n_formal_implies_formal_chains(&set(&[0, 1, 2, 3, 4, 5]), 3), || "chains {0..5}".into())?;
    Ok(format!("{} table cases", cases + 2))
}

fn cli_contract() -> Outcome {
    for name in FIXTURE_NAMES {
        let (doc, out) = cmd_fixture(name).map_err(|e| e.to_string())?;
        let back = parse(&out.text).map_err(|e| format!("{name}: {e}"))?;
        ensure(back == doc && serialize(&back) == out.text, || format!("{name}: round trip"))?;
        ensure(back.build().unwrap().algebra == fixture(name).unwrap().algebra, || format!("{name}: algebra"))?;
    }
    let golden = include_str!("data/massey5.json");
    ensure(serialize(&parse(golden).unwrap()) == golden, || "golden massey5".into())?;

    let dir = std::env::temp_dir().join(format!("ainf-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p.display().to_string()
    };
    let fx = |name: &str| write(&format!("{name}.json"), &cmd_fixture(name).unwrap().1.text);
    let obstructed = write(
        "obstructed.json",
        r#"{"ring": {"kind": "Fp", "p": 5}, "basis": [{"name": "x", "degree": -1}],
            "twist": {"alpha": "2", "c": 1}, "run": {"max_arity": 6, "target_n": 5}}"#,
    );
    let bad = write("bad.json", r#"{"ring": {"kind": "Q"}, "basis": [{"name": "x", "degree": 0}], "differential": [{"from": "x", "to": "z", "coeff": "1"}]}"#);
    let matrix: Vec<(Vec<String>, i32)> = vec![
        (vec!["verify".into(), fx("acyclic2")], 0),
        (vec!["transfer".into(), fx("massey5")], 0),
        (vec!["formality".into(), fx("truncpoly")], 0),
        (vec!["formality".into(), fx("cpn_fp")], 0),
        (vec!["massey".into(), fx("massey5"), "x".into(), "y".into(), "y".into()], 0),
        (vec!["formality".into(), obstructed], 2),
        (vec!["formality".into(), fx("massey5")], 3),
        (vec!["massey".into(), fx("truncpoly"), "x".into(), "x".into(), "x".into()], 3),
        (vec!["transfer".into(), bad], 4),
        (vec!["fixture".into(), "unknown".into()], 4),
    ];
    let runs = matrix.len();
    for (args, code) in matrix {
        let out = Command::new(env!("CARGO_BIN_EXE_ainf")).args(&args).output().map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(code), || format!("{args:?} exited {:?}, expected {code}", out.status.code()))?;
    }
    Ok(format!("{} fixtures round-trip, {runs} scripted runs", FIXTURE_NAMES.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("transfer validity", transfer_validity),
        ("dual-path oracle", dual_path),
        ("Massey reproduction", massey_reproduction),
        ("key-lemma postconditions", key_lemma),
        ("four-term identity", schematic_identity),
        ("driver ground truth", driver_ground_truth),
        ("obstruction boundary", obstruction_boundary),
        ("tower stabilization", tower_stabilization),
        ("predicate upgrades", predicate_upgrades),
        ("CLI contract", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match result {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
