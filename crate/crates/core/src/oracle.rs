//! Independent checkers, seeded instance generators and named fixtures.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ainfinity::{
    admissible_tuples, conjugate_morphism, conjugate_structure, AInfError, AInfMorphism, AInfStructure,
    CoalgebraMap, Defect, MultilinearMap,
};
use crate::coeff::{Ring, Scalar};
use crate::dga::Dga;
use crate::formality::{twisting_map, FormalityError, TwistData};
use crate::graded::{Generator, GradedMap, GradedModule};
use crate::matrix::Matrix;
use crate::sparse::{Tensor, Vector};

/// Squares the coderivation as an explicit linear map on `T^{≤K}` and
/// projects to length one.
///
/// Each summand `1^{⊗a} ⊗ μ_s ⊗ 1^{⊗c}` is applied by the general rule
/// `(f_1 ⊗ … ⊗ f_r)(X_1 ⊗ … ⊗ X_r) = (−1)^{Σ_{i<j} |f_j||X_i|} f_1(X_1) ⊗ … ⊗ f_r(X_r)`
/// with shifted degrees `|μ_s| = −1`, `|1| = 0`.
pub fn brute_force_stasheff(m: &AInfStructure) -> Defect {
    let module = m.module();
    let max = m.max_arity();
    let dim = module.dim();
    let shifted: Vec<i64> = module.degrees().iter().map(|d| d + 1).collect();
    let ring = module.ring();

    let mut words: Vec<Vec<usize>> = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..dim).map(move |i| {
                    let mut v = w.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
        words.extend(layer.iter().cloned());
    }

    enum Block<'a> {
        Id,
        Op(&'a MultilinearMap),
    }
    let apply_blocks = |blocks: &[Block], word: &[usize]| -> Tensor {
        let mut pos = 0;
        let mut pieces: Vec<Vector> = Vec::new();
        let mut input_degrees: Vec<i64> = Vec::new();
        let mut map_degrees: Vec<i64> = Vec::new();
        for b in blocks {
            match b {
                Block::Id => {
                    pieces.push(Vector::basis(word[pos], ring));
                    input_degrees.push(shifted[word[pos]]);
                    map_degrees.push(0);
                    pos += 1;
                }
                Block::Op(op) => {
                    let k = op.arity();
                    pieces.push(op.value(&word[pos..pos + k]));
                    input_degrees.push(word[pos..pos + k].iter().map(|&i| shifted[i]).sum());
                    map_degrees.push(-1);
                    pos += k;
                }
            }
        }
        let mut exponent = 0i64;
        for j in 0..blocks.len() {
            for i in 0..j {
                exponent += map_degrees[j] * input_degrees[i];
            }
        }
        let sign = if exponent.rem_euclid(2) == 0 { ring.one() } else { -ring.one() };
        let mut out = Tensor::new();
        let refs: Vec<&Vector> = pieces.iter().collect();
        crate::sparse::accumulate_product(&mut out, &[], &refs, &sign);
        out
    };

    let mut coderivation: BTreeMap<Vec<usize>, Tensor> = BTreeMap::new();
    for w in &words {
        let len = w.len();
        let mut image = Tensor::new();
        for s in 1..=len.min(max) {
            let op = m.component(s);
            if op.is_zero() {
                continue;
            }
            for a in 0..=len - s {
                let mut blocks: Vec<Block> = (0..a).map(|_| Block::Id).collect();
                blocks.push(Block::Op(op));
                blocks.extend((0..len - a - s).map(|_| Block::Id));
                image.add_assign(&apply_blocks(&blocks, w));
            }
        }
        coderivation.insert(w.clone(), image);
    }

    let mut components: Vec<MultilinearMap> = (1..=max).map(MultilinearMap::new).collect();
    for w in &words {
        let mut square = Tensor::new();
        for (t, c) in coderivation[w].iter() {
            square.add_scaled(&coderivation[t], c);
        }
        let v = square.linear_part();
        if !v.is_zero() {
            components[w.len() - 1].insert(w.clone(), v);
        }
    }
    Defect::new(components)
}

fn random_scalar(rng: &mut ChaCha8Rng, ring: Ring) -> Scalar {
    Scalar::from_int(ring, rng.gen_range(-2..=2))
}

fn random_vector(rng: &mut ChaCha8Rng, ring: Ring, candidates: &[usize], density: f64) -> Vector {
    let mut v = Vector::new();
    for &i in candidates {
        if rng.gen_bool(density) {
            v.add_term(i, &random_scalar(rng, ring));
        }
    }
    v
}

/// Degree-homogeneous family with random entries; `shift` is `−2` for
/// structures and `−1` for morphisms. Arities below `start` are left zero.
fn random_family(
    rng: &mut ChaCha8Rng,
    source: &GradedModule,
    target: &GradedModule,
    max_arity: usize,
    start: usize,
    shift: i64,
    density: f64,
) -> Vec<MultilinearMap> {
    let ring = source.ring();
    let degrees = source.degrees();
    let occupied = target.occupied_degrees();
    (1..=max_arity)
        .map(|k| {
            let mut comp = MultilinearMap::new(k);
            if k >= start {
                for tuple in admissible_tuples(&degrees, k, &occupied, shift) {
                    let d: i64 = tuple.iter().map(|&i| source.degree(i)).sum::<i64>() + k as i64 + shift;
                    let v = random_vector(rng, ring, &target.in_degree(d), density);
                    comp.insert(tuple, v);
                }
            }
            comp
        })
        .collect()
}

/// Random, usually invalid, structure; input for dual-path comparisons.
pub fn random_structure(module: Arc<GradedModule>, max_arity: usize, density: f64, seed: u64) -> AInfStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps = random_family(&mut rng, &module, &module, max_arity, 1, -2, density);
    AInfStructure::new(module, comps).expect("generated degree-homogeneously")
}

/// Random coalgebra endomorphism with `f_1 = id` and `f_k = 0` for
/// `2 ≤ k < start`.
pub fn random_unipotent_map(module: Arc<GradedModule>, max_arity: usize, start: usize, density: f64, seed: u64) -> CoalgebraMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comps = random_family(&mut rng, &module, &module, max_arity, start.max(2), -1, density);
    comps[0] = CoalgebraMap::identity(module.clone(), 1).components()[0].clone();
    CoalgebraMap::new(module.clone(), module, comps).expect("generated degree-homogeneously")
}

/// Random coalgebra endomorphism whose linear part is a random
/// block-unitriangular matrix times a random unit diagonal.
pub fn random_invertible_map(module: Arc<GradedModule>, max_arity: usize, density: f64, seed: u64) -> CoalgebraMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ring = module.ring();
    let mut comps = random_family(&mut rng, &module, &module, max_arity, 2, -1, density);
    let mut f1 = MultilinearMap::new(1);
    for j in 0..module.dim() {
        let mut v = Vector::new();
        let unit = loop {
            let c = random_scalar(&mut rng, ring);
            if c.is_unit() {
                break c;
            }
        };
        v.add_term(j, &unit);
        for i in module.in_degree(module.degree(j)) {
            if i < j {
                v.add_term(i, &random_scalar(&mut rng, ring));
            }
        }
        f1.insert(vec![j], v);
    }
    comps[0] = f1;
    CoalgebraMap::new(module.clone(), module, comps).expect("generated degree-homogeneously")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error(transparent)]
    Formality(#[from] FormalityError),
    #[error(transparent)]
    AInf(#[from] AInfError),
}

/// Truncated tensor algebra on weighted generators.
///
/// Basis: words of total weight `≤ L`, product: concatenation (zero past
/// weight `L`). Each `d(g_j)` is a random cycle of weight `≥ wt(g_j)` in the
/// subalgebra on earlier generators, extended by the Leibniz rule; weights
/// never drop, so the truncation ideal is preserved. Finally the basis is
/// changed by a random unimodular degree-preserving matrix.
pub fn random_dga(max_dim: usize, degree_window: (i64, i64), ring: Ring, seed: u64) -> Dga {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if max_dim == 0 {
        return Dga::zero(ring);
    }
    let gens = rng.gen_range(1..=3usize).min(max_dim);
    let weights: Vec<usize> = (0..gens).map(|_| rng.gen_range(1..=2)).collect();
    let words_up_to = |limit: usize| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut frontier: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
        while let Some((w, wt)) = frontier.pop() {
            if !w.is_empty() {
                out.push(w.clone());
            }
            for (g, &gw) in weights.iter().enumerate() {
                if wt + gw <= limit {
                    let mut next = w.clone();
                    next.push(g);
                    frontier.push((next, wt + gw));
                }
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out
    };
    let mut limit = *weights.iter().max().unwrap();
    while limit < 8 && words_up_to(limit + 1).len() <= max_dim {
        limit += 1;
    }
    let words = words_up_to(limit);
    if words.len() > max_dim {
        // drop heavy generators until the basis fits
        return random_dga(max_dim, degree_window, ring, seed.wrapping_add(0x9e37_79b9));
    }
    let weight = |w: &[usize]| w.iter().map(|&g| weights[g]).sum::<usize>();
    let index: BTreeMap<Vec<usize>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();

    let (lo, hi) = degree_window;
    let mut gen_degrees: Vec<i64> = Vec::new();
    for j in 0..gens {
        let earlier: Vec<&Vec<usize>> = words
            .iter()
            .filter(|w| w.iter().all(|&g| g < j) && weight(w) >= weights[j])
            .collect();
        let deg = if !earlier.is_empty() && rng.gen_bool(0.7) {
            let w = earlier[rng.gen_range(0..earlier.len())];
            w.iter().map(|&g| gen_degrees[g]).sum::<i64>() + 1
        } else {
            rng.gen_range(lo..=hi)
        };
        gen_degrees.push(deg);
    }
    let word_degree = |w: &[usize]| w.iter().map(|&g| gen_degrees[g]).sum::<i64>();

    // d on words via Leibniz, given d on generators (as word combinations)
    let mut d_gen: Vec<Vector> = vec![Vector::new(); gens];
    let extend = |d_gen: &[Vector], w: &[usize]| -> Vector {
        let mut out = Vector::new();
        let mut sign_deg = 0i64;
        for (pos, &g) in w.iter().enumerate() {
            let sign = if sign_deg.rem_euclid(2) == 0 { ring.one() } else { -ring.one() };
            for (z, c) in d_gen[g].iter() {
                let mut nw = w[..pos].to_vec();
                nw.extend_from_slice(&words[z]);
                nw.extend_from_slice(&w[pos + 1..]);
                if let Some(&i) = index.get(&nw) {
                    out.add_term(i, &(&sign * c));
                }
            }
            sign_deg += gen_degrees[g];
        }
        out
    };
    for j in 0..gens {
        let candidates: Vec<usize> = words
            .iter()
            .enumerate()
            .filter(|(_, w)| {
                w.iter().all(|&g| g < j) && weight(w) >= weights[j] && word_degree(w) == gen_degrees[j] - 1
            })
            .map(|(i, _)| i)
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let images: Vec<Vector> = candidates.iter().map(|&i| extend(&d_gen, &words[i])).collect();
        let rows: Vec<usize> = images
            .iter()
            .flat_map(|v| v.iter().map(|(i, _)| i))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let cols: Vec<Vec<Scalar>> = images
            .iter()
            .map(|v| rows.iter().map(|&r| v.get(r).cloned().unwrap_or_else(|| ring.zero())).collect())
            .collect();
        let mut cycle = Vector::new();
        if rows.is_empty() {
            for &i in &candidates {
                cycle.add_term(i, &random_scalar(&mut rng, ring));
            }
        } else {
            let (q, _, kernel) = Matrix::from_columns(ring, rows.len(), &cols).column_reduce();
            for &kc in &kernel {
                let coeff = random_scalar(&mut rng, ring);
                for (a, &i) in candidates.iter().enumerate() {
                    cycle.add_term(i, &(q.get(a, kc) * &coeff));
                }
            }
        }
        d_gen[j] = cycle;
    }

    let basis: Vec<(String, i64)> = words
        .iter()
        .map(|w| {
            let name: String = w.iter().map(|&g| ((b'a' + g as u8) as char).to_string()).collect();
            (name, word_degree(w))
        })
        .collect();
    let d_cols: Vec<Vector> = words.iter().map(|w| extend(&d_gen, w)).collect();
    let mut products: BTreeMap<(usize, usize), Vector> = BTreeMap::new();
    for (a, wa) in words.iter().enumerate() {
        for (b, wb) in words.iter().enumerate() {
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            if let Some(&i) = index.get(&w) {
                products.insert((a, b), Vector::basis(i, ring));
            }
        }
    }

    // random unimodular change of basis, block by degree
    let n = words.len();
    let mut change: Vec<Vector> = (0..n).map(|i| Vector::basis(i, ring)).collect();
    if rng.gen_bool(0.5) {
        for j in 0..n {
            for i in 0..j {
                if basis[i].1 == basis[j].1 && rng.gen_bool(0.5) {
                    change[j].add_term(i, &random_scalar(&mut rng, ring));
                }
            }
        }
    }
    let names: Vec<(&str, i64)> = basis.iter().map(|(s, d)| (s.as_str(), *d)).collect();
    let module = Arc::new(GradedModule::from_pairs(ring, &names).expect("distinct words"));
    let p = GradedMap::new(module.clone(), module.clone(), 0, change).expect("degree preserving");
    let p_inv = p.inverse().expect("unitriangular");
    let d = GradedMap::new(module.clone(), module.clone(), -1, d_cols).expect("d has degree -1");
    let d_new = p_inv.compose(&d).and_then(|x| x.compose(&p)).expect("same module");
    let multiply = |x: &Vector, y: &Vector| -> Vector {
        let mut out = Vector::new();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                if let Some(v) = products.get(&(a, b)) {
                    out.add_scaled(v, &(ca * cb));
                }
            }
        }
        out
    };
    let mut new_products = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let v = p_inv.apply(&multiply(p.column(a), p.column(b)));
            if !v.is_zero() {
                new_products.push(((a, b), v));
            }
        }
    }
    Dga::new(d_new, new_products).expect("generated degree-homogeneously")
}

/// Random graded algebra with zero differential on `a` generators in
/// degree −1 and `b` in degree −2, with `x_i x_j` a random combination of
/// the degree −2 generators. Every tuple of degree −1 elements is
/// admissible for every arity, so conjugation produces dense components.
pub fn random_formal_algebra(ring: Ring, a: usize, b: usize, seed: u64) -> Dga {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(String, i64)> = (0..a).map(|i| (format!("x{i}"), -1)).collect();
    pairs.extend((0..b).map(|i| (format!("y{i}"), -2)));
    let names: Vec<(&str, i64)> = pairs.iter().map(|(s, d)| (s.as_str(), *d)).collect();
    let module = Arc::new(GradedModule::from_pairs(ring, &names).expect("distinct names"));
    let targets: Vec<usize> = (a..a + b).collect();
    let mut products = Vec::new();
    for i in 0..a {
        for j in 0..a {
            products.push(((i, j), random_vector(&mut rng, ring, &targets, 0.6)));
        }
    }
    Dga::formal(module, products).expect("degree additive")
}

/// `(m, s)` obtained by conjugating the strict pair `(μ_H, σ)` by `phi`.
pub fn conjugated_formal_instance_with(
    h: &Dga,
    alpha: &Scalar,
    c: u32,
    phi: &CoalgebraMap,
) -> Result<(Arc<AInfStructure>, AInfMorphism), OracleError> {
    let k = phi.max_arity();
    let strict = h.to_structure(k);
    let sigma = twisting_map(h.module().clone(), alpha, c)?;
    let s0 = CoalgebraMap::from_linear(&sigma, k);
    let m = Arc::new(conjugate_structure(phi, &strict)?);
    let s = conjugate_morphism(phi, &s0)?;
    let s = AInfMorphism::new(m.clone(), m.clone(), s)?;
    Ok((m, s))
}

/// Formal-by-construction key-lemma input: the strict pair on `h`
/// conjugated by a random `φ = id + φ_{start} + …`.
pub fn conjugated_formal_instance(
    h: &Dga,
    alpha: &Scalar,
    c: u32,
    seed: u64,
    max_arity: usize,
    start: usize,
) -> Result<(Arc<AInfStructure>, AInfMorphism), OracleError> {
    let phi = random_unipotent_map(h.module().clone(), max_arity, start, 0.5, seed);
    conjugated_formal_instance_with(h, alpha, c, &phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunParameters {
    pub max_arity: usize,
    pub target_n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FixtureExpectation {
    /// `(degree, rank)` for every occupied homology degree, ascending.
    pub homology_ranks: Vec<(i64, usize)>,
    /// Homology classes whose triple Massey product is nonzero.
    pub massey: Option<[&'static str; 3]>,
    /// Class named by the nonzero Massey product, up to sign.
    pub massey_class: Option<&'static str>,
    pub twisting_passes: Option<bool>,
    pub achieved_n: Option<usize>,
    pub formal: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub algebra: Dga,
    pub twist: Option<TwistData>,
    pub run: Option<RunParameters>,
    pub expected: FixtureExpectation,
}

pub const FIXTURE_NAMES: [&str; 4] = ["acyclic2", "truncpoly", "massey5", "cpn_fp"];

fn module(ring: Ring, basis: &[(&str, i64)]) -> Arc<GradedModule> {
    Arc::new(GradedModule::new(
        ring,
        basis.iter().map(|(n, d)| Generator { name: n.to_string(), degree: *d }).collect(),
    )
    .expect("fixture basis"))
}

fn truncated_polynomial(ring: Ring, top: usize) -> Dga {
    let names: Vec<(String, i64)> = (1..=top)
        .map(|k| (if k == 1 { "x".to_string() } else { format!("x{k}") }, -2 * k as i64))
        .collect();
    let pairs: Vec<(&str, i64)> = names.iter().map(|(s, d)| (s.as_str(), *d)).collect();
    let m = module(ring, &pairs);
    let mut products = Vec::new();
    for a in 0..top {
        for b in 0..top {
            if a + b + 1 < top {
                products.push(((a, b), Vector::basis(a + b + 1, ring)));
            }
        }
    }
    Dga::formal(m, products).expect("truncated polynomial algebra")
}

/// Basis `x, y, s` in degree −1 and `w, r` in degree −2 with `ds = w`,
/// `x·y = w`, `s·y = r`; homology `[x], [y]` and `[r]`.
pub fn massey5(ring: Ring) -> Dga {
    let m = module(ring, &[("x", -1), ("y", -1), ("s", -1), ("w", -2), ("r", -2)]);
    let d = GradedMap::from_entries(m.clone(), m, -1, [(2, 3, ring.one())]).expect("ds = w");
    Dga::new(
        d,
        [((0, 1), Vector::basis(3, ring)), ((2, 1), Vector::basis(4, ring))],
    )
    .expect("massey5 products")
}

pub fn fixture(name: &str) -> Result<Fixture, OracleError> {
    let q = Ring::Rationals;
    match name {
        "acyclic2" => {
            let m = module(q, &[("u", 0), ("v", 1)]);
            let d = GradedMap::from_entries(m.clone(), m, -1, [(1, 0, q.one())]).expect("dv = u");
            Ok(Fixture {
                name: "acyclic2",
                algebra: Dga::new(d, []).expect("no products"),
                twist: None,
                run: None,
                expected: FixtureExpectation {
                    formal: Some(true),
                    ..Default::default()
                },
            })
        }
        "truncpoly" => {
            let algebra = truncated_polynomial(q, 3);
            let twist = TwistData::diagonal(algebra.module().clone(), Scalar::from_int(q, 2), 2)?;
            Ok(Fixture {
                name: "truncpoly",
                algebra,
                twist: Some(twist),
                run: Some(RunParameters { max_arity: 4, target_n: 1 }),
                expected: FixtureExpectation {
                    homology_ranks: vec![(-6, 1), (-4, 1), (-2, 1)],
                    twisting_passes: Some(true),
                    achieved_n: Some(1),
                    formal: Some(true),
                    ..Default::default()
                },
            })
        }
        "massey5" => {
            let algebra = massey5(q);
            let twist = TwistData::diagonal(algebra.module().clone(), Scalar::from_int(q, 2), 1)?;
            Ok(Fixture {
                name: "massey5",
                algebra,
                twist: Some(twist),
                run: Some(RunParameters { max_arity: 5, target_n: 4 }),
                expected: FixtureExpectation {
                    homology_ranks: vec![(-2, 1), (-1, 2)],
                    massey: Some(["[x]", "[y]", "[y]"]),
                    massey_class: Some("[r]"),
                    twisting_passes: Some(false),
                    ..Default::default()
                },
            })
        }
        "cpn_fp" => {
            let f5 = Ring::PrimeField(5);
            let algebra = truncated_polynomial(f5, 2);
            let twist = TwistData::diagonal(algebra.module().clone(), Scalar::from_int(f5, 2), 2)?;
            Ok(Fixture {
                name: "cpn_fp",
                algebra,
                twist: Some(twist),
                run: Some(RunParameters { max_arity: 9, target_n: 4 }),
                expected: FixtureExpectation {
                    homology_ranks: vec![(-4, 1), (-2, 1)],
                    twisting_passes: Some(true),
                    achieved_n: Some(3),
                    formal: Some(true),
                    ..Default::default()
                },
            })
        }
        other => Err(OracleError::UnknownFixture(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfinity::coderivation_square;

    #[test]
    fn fixtures_satisfy_dga_axioms() {
        for name in FIXTURE_NAMES {
            let f = fixture(name).unwrap();
            assert!(f.algebra.check().all_pass(), "{name}");
        }
        assert!(matches!(fixture("nope"), Err(OracleError::UnknownFixture(_))));
    }

    #[test]
    fn random_dga_is_reproducible_and_valid() {
        for seed in 0..40 {
            let a = random_dga(6, (-3, 3), Ring::Rationals, seed);
            let b = random_dga(6, (-3, 3), Ring::Rationals, seed);
            assert_eq!(a, b);
            assert!(a.module().dim() <= 6);
            let report = a.check();
            assert!(report.all_pass(), "seed {seed}: {:?}", report.failures);
        }
        assert_eq!(random_dga(0, (0, 0), Ring::Rationals, 1).module().dim(), 0);
    }

    #[test]
    fn brute_force_matches_on_a_strict_algebra() {
        let f = fixture("massey5").unwrap();
        let s = f.algebra.to_structure(4);
        assert!(brute_force_stasheff(&s).is_zero());
        assert!(coderivation_square(&s).is_zero());
    }

    #[test]
    fn trivial_conjugator_returns_strict_pair() {
        let h = random_formal_algebra(Ring::Rationals, 2, 1, 3);
        let id = CoalgebraMap::identity(h.module().clone(), 4);
        let alpha = Scalar::from_int(Ring::Rationals, 2);
        let (m, s) = conjugated_formal_instance_with(&h, &alpha, 1, &id).unwrap();
        assert_eq!(*m, h.to_structure(4));
        assert!(s.map().components()[1..].iter().all(MultilinearMap::is_zero));
    }
}
