//! Degree twisting and the inductive construction of formality
//! isomorphisms.
//!
//! Given a structure `m` on homology (with `μ_1 = 0`) and an
//! ∞-automorphism `s` of it whose linear part acts by `α^{n/c}` in degree
//! `n`, each [`key_lemma_step`] conjugates by `f = id + f_{n+1}` to remove
//! `μ_{n+2}` and `s_{n+1}`, where on inputs of total degree `N`
//! `f_{n+1} = s_{n+1} / (α^{(N+n)/c} − α^{N/c})`.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::ainfinity::{
    admissible_tuples, coderivation_square, compose, compose_maps, conjugate_morphism, conjugate_structure,
    morphism_defect, AInfError, AInfMorphism, AInfStructure, CoalgebraMap, MultilinearMap,
};
use crate::coeff::{CoeffError, Scalar};
use crate::dga::Dga;
use crate::graded::{GradedMap, GradedModule, Retraction};
use crate::sparse::Vector;
use crate::transfer::default_arity_bound;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormalityError {
    #[error("twisting scalar {0} is not a unit")]
    AlphaNotUnit(String),
    #[error("the grading divisor must be positive")]
    ZeroDivisor,
    #[error("degree {degree} is not divisible by c = {c}")]
    DegreeNotDivisible { degree: i64, c: u32 },
    #[error("denominator α^{k} − 1 = {value} is not a unit")]
    NonUnitDenominator { k: u32, value: Scalar },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("postcondition failed: {0}")]
    PostconditionFailed(String),
    #[error("products do not vanish: {0}")]
    ProductsNonzero(String),
    #[error(transparent)]
    AInf(#[from] AInfError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// `α^{n/c}` in degree `n`; fails on degrees not divisible by `c`.
pub fn twisting_map(module: Arc<GradedModule>, alpha: &Scalar, c: u32) -> Result<GradedMap, FormalityError> {
    if c == 0 {
        return Err(FormalityError::ZeroDivisor);
    }
    for n in module.occupied_degrees() {
        if n.rem_euclid(c as i64) != 0 {
            return Err(FormalityError::DegreeNotDivisible { degree: n, c });
        }
    }
    let alpha = alpha.clone();
    Ok(GradedMap::diagonal(module, move |n| {
        alpha.pow(n / c as i64).expect("alpha is a unit")
    }))
}

/// `α`, the grading divisor `c`, and the lift `σ̂` on the algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistData {
    pub alpha: Scalar,
    pub c: u32,
    pub sigma_hat: GradedMap,
}

impl TwistData {
    pub fn new(alpha: Scalar, c: u32, sigma_hat: GradedMap) -> Result<Self, FormalityError> {
        if !alpha.is_unit() {
            return Err(FormalityError::AlphaNotUnit(alpha.to_string()));
        }
        if c == 0 {
            return Err(FormalityError::ZeroDivisor);
        }
        if sigma_hat.degree() != 0 || sigma_hat.source() != sigma_hat.target() {
            return Err(FormalityError::PreconditionViolated(
                "σ̂ must be a degree 0 endomorphism".into(),
            ));
        }
        Ok(TwistData { alpha, c, sigma_hat })
    }

    /// `σ̂ = diag(α^{deg/c})` on the algebra itself.
    pub fn diagonal(module: Arc<GradedModule>, alpha: Scalar, c: u32) -> Result<Self, FormalityError> {
        let sigma_hat = twisting_map(module, &alpha, c)?;
        Self::new(alpha, c, sigma_hat)
    }

    /// `α^{(N+n)/c} − α^{N/c}`, assuming `c | N` and `c | n`.
    pub fn denominator(&self, total_degree: i64, n: usize) -> Scalar {
        let c = self.c as i64;
        let a = self.alpha.pow((total_degree + n as i64) / c).expect("alpha is a unit");
        let b = self.alpha.pow(total_degree / c).expect("alpha is a unit");
        &a - &b
    }
}

/// One flag per condition of [`verify_degree_twisting`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistReport {
    pub commutes_with_d: bool,
    pub multiplicative: bool,
    pub induces_twisting: bool,
    pub failures: Vec<String>,
}

impl TwistReport {
    pub fn all_pass(&self) -> bool {
        self.commutes_with_d && self.multiplicative && self.induces_twisting
    }
}

/// Checks `σ̂ d = d σ̂`, `σ̂(ab) = σ̂(a)σ̂(b)` and `p σ̂ i = α^{n/c}` on `H_n`.
pub fn verify_degree_twisting(a: &Dga, t: &TwistData, r: &Retraction) -> Result<TwistReport, FormalityError> {
    let mut failures = Vec::new();
    let expected = twisting_map(r.homology.clone(), &t.alpha, t.c)?;
    let s = &t.sigma_hat;
    if **s.source() != **a.module() {
        return Err(FormalityError::PreconditionViolated(
            "σ̂ acts on a different module".into(),
        ));
    }
    let d = a.differential();
    let commutes_with_d = match (s.compose(d), d.compose(s)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    };
    if !commutes_with_d {
        failures.push("σ̂∘d ≠ d∘σ̂".to_string());
    }
    let module = a.module();
    let mut multiplicative = true;
    for x in 0..module.dim() {
        for y in 0..module.dim() {
            let lhs = s.apply(&a.basis_product(x, y));
            let rhs = a.multiply(s.column(x), s.column(y));
            if lhs != rhs {
                multiplicative = false;
                failures.push(format!(
                    "σ̂({}·{}) ≠ σ̂({})·σ̂({})",
                    module.name(x),
                    module.name(y),
                    module.name(x),
                    module.name(y)
                ));
            }
        }
    }
    let induced = r
        .p
        .compose(s)
        .and_then(|ps| ps.compose(&r.i))
        .map_err(|e| FormalityError::PreconditionViolated(e.to_string()))?;
    let induces_twisting = induced == expected;
    if !induces_twisting {
        failures.push("p∘σ̂∘i is not multiplication by α^{n/c} on H_n".to_string());
    }
    Ok(TwistReport {
        commutes_with_d,
        multiplicative,
        induces_twisting,
        failures,
    })
}

/// `s^{[1]} = π ∘ σ̂ ∘ ι` as an ∞-endomorphism of the transferred structure.
pub fn induce_s1(
    pi: &AInfMorphism,
    sigma_hat: &GradedMap,
    iota: &AInfMorphism,
) -> Result<AInfMorphism, FormalityError> {
    let strict = AInfMorphism::strict_from_linear(sigma_hat, iota.target().clone(), pi.source().clone())?;
    Ok(compose(pi, &compose(&strict, iota)?)?)
}

/// Output of [`key_lemma_step`]: `f: m → m'` and `s' = F S F^{-1}`.
#[derive(Debug, Clone)]
pub struct KeyLemmaStep {
    pub structure: Arc<AInfStructure>,
    pub automorphism: AInfMorphism,
    pub f: CoalgebraMap,
}

fn total_degree(module: &GradedModule, tuple: &[usize]) -> i64 {
    tuple.iter().map(|&i| module.degree(i)).sum()
}

/// Checks the hypotheses of step `n` and names the first violation.
pub fn key_lemma_preconditions(
    m: &AInfStructure,
    s: &AInfMorphism,
    n: usize,
    t: &TwistData,
) -> Result<(), FormalityError> {
    let violation = |msg: String| Err(FormalityError::PreconditionViolated(msg));
    if n == 0 || n + 1 > m.max_arity() {
        return violation(format!("step {n} outside 1..{}", m.max_arity()));
    }
    if **s.source() != *m || **s.target() != *m {
        return violation("s must be an endomorphism of m".into());
    }
    if !m.component(1).is_zero() {
        return violation("μ_1 ≠ 0".into());
    }
    if let Some(k) = (3..=n + 1).find(|&k| !m.component(k).is_zero()) {
        return violation(format!("μ_{k} ≠ 0"));
    }
    let sigma = twisting_map(m.module().clone(), &t.alpha, t.c)?;
    if s.linear_part() != sigma {
        return violation("s_1 is not the degree twisting".into());
    }
    if let Some(k) = (2..=n).find(|&k| !s.component(k).is_zero()) {
        return violation(format!("s_{k} ≠ 0"));
    }
    Ok(())
}

/// The correction `f = id + f_{n+1}`; `Ok(None)` when `f` is the identity.
fn correction(
    m: &AInfStructure,
    s: &AInfMorphism,
    n: usize,
    t: &TwistData,
) -> Result<Option<CoalgebraMap>, FormalityError> {
    let module = m.module();
    if !n.is_multiple_of(t.c as usize) {
        return Ok(None);
    }
    let k = (n / t.c as usize) as u32;
    let gap = &t.alpha.pow(k as i64)? - &module.ring().one();
    if !gap.is_unit() {
        return Err(FormalityError::NonUnitDenominator { k, value: gap });
    }
    let source = s.component(n + 1);
    if source.is_zero() {
        return Ok(None);
    }
    let mut fn1 = MultilinearMap::new(n + 1);
    for (tuple, v) in source.iter() {
        let den = t.denominator(total_degree(module, tuple), n);
        let inv = den.inv()?;
        fn1.insert(tuple.to_vec(), v.scaled(&inv));
    }
    let mut comps: Vec<MultilinearMap> = CoalgebraMap::identity(module.clone(), m.max_arity())
        .components()
        .to_vec();
    comps[n] = fn1;
    Ok(Some(CoalgebraMap::new(module.clone(), module.clone(), comps)?))
}

/// Checks the step's conclusions as exact equalities.
pub fn key_lemma_postconditions(
    before: &AInfStructure,
    step: &KeyLemmaStep,
    n: usize,
    t: &TwistData,
) -> Result<(), FormalityError> {
    let fail = |msg: String| Err(FormalityError::PostconditionFailed(msg));
    let after = &step.structure;
    if after.component(2) != before.component(2) {
        return fail("μ'_2 ≠ μ_2".into());
    }
    let top = (n + 2).min(after.max_arity());
    if let Some(k) = (3..=top).find(|&k| !after.component(k).is_zero()) {
        return fail(format!("μ'_{k} ≠ 0"));
    }
    let sigma = twisting_map(after.module().clone(), &t.alpha, t.c)?;
    if step.automorphism.linear_part() != sigma {
        return fail("s'_1 is not the twisting".into());
    }
    let top = (n + 1).min(after.max_arity());
    if let Some(k) = (2..=top).find(|&k| !step.automorphism.component(k).is_zero()) {
        return fail(format!("s'_{k} ≠ 0"));
    }
    Ok(())
}

/// One inductive step at index `n` (arity `n + 1`).
pub fn key_lemma_step(
    m: &Arc<AInfStructure>,
    s: &AInfMorphism,
    n: usize,
    t: &TwistData,
) -> Result<KeyLemmaStep, FormalityError> {
    key_lemma_preconditions(m, s, n, t)?;
    let step = match correction(m, s, n, t)? {
        None => KeyLemmaStep {
            structure: m.clone(),
            automorphism: s.clone(),
            f: CoalgebraMap::identity(m.module().clone(), m.max_arity()),
        },
        Some(f) => {
            let structure = Arc::new(conjugate_structure(&f, m)?);
            let s_map = conjugate_morphism(&f, s.map())?;
            let automorphism = AInfMorphism::new(structure.clone(), structure.clone(), s_map)?;
            KeyLemmaStep {
                structure,
                automorphism,
                f,
            }
        }
    };
    key_lemma_postconditions(m, &step, n, t)?;
    Ok(step)
}

/// `μ_{n+2} + Σ ±f_{n+1}(…μ_2…) + Σ μ_2(…g_{n+1}…)` with `g_{n+1} = −f_{n+1}`,
/// the only terms of `F M F^{-1}` in arity `n + 2` when `μ_1 = 0`,
/// `μ_3 … μ_{n+1} = 0` and `f = id + f_{n+1}`.
pub fn schematic_sum(m: &AInfStructure, f: &CoalgebraMap, n: usize) -> MultilinearMap {
    let module = m.module();
    let ring = module.ring();
    let k = n + 2;
    let mut out = MultilinearMap::new(k);
    if k > m.max_arity() {
        return out;
    }
    let fn1 = f.component(n + 1);
    let mu2 = m.component(2);
    let inputs = admissible_tuples(&module.degrees(), k, &module.occupied_degrees(), -2);
    for tuple in inputs {
        let mut v = m.component(k).value(&tuple);
        // f_{n+1} after μ_2 at position a, with the Koszul sign of the prefix
        let mut odd = false;
        for a in 0..=n {
            if let Some(p) = mu2.get(&tuple[a..a + 2]) {
                for (i, c) in p.iter() {
                    let mut inner = tuple[..a].to_vec();
                    inner.push(i);
                    inner.extend_from_slice(&tuple[a + 2..]);
                    if let Some(w) = fn1.get(&inner) {
                        let coeff = if odd { -c } else { c.clone() };
                        v.add_scaled(w, &coeff);
                    }
                }
            }
            odd ^= module.degree(tuple[a]).rem_euclid(2) == 0;
        }
        // μ_2(g_{n+1}(x_1…x_{n+1}), x_{n+2}) and μ_2(x_1, g_{n+1}(x_2…x_{n+2}))
        let minus = -ring.one();
        for (head, tail, left) in [(&tuple[..n + 1], tuple[n + 1], true), (&tuple[1..], tuple[0], false)] {
            if let Some(g) = fn1.get(head) {
                for (i, c) in g.iter() {
                    let pair = if left { [i, tail] } else { [tail, i] };
                    if let Some(p) = mu2.get(&pair) {
                        v.add_scaled(p, &(c * &minus));
                    }
                }
            }
        }
        out.insert(tuple, v);
    }
    out
}

/// `f_L ∘ … ∘ f_1`, or the identity for an empty tower.
pub fn compose_tower(
    module: &Arc<GradedModule>,
    max_arity: usize,
    steps: &[CoalgebraMap],
) -> Result<CoalgebraMap, FormalityError> {
    let mut acc = CoalgebraMap::identity(module.clone(), max_arity);
    for f in steps {
        acc = if acc.is_identity() { f.clone() } else { compose_maps(f, &acc)? };
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormalityFlag {
    /// `μ_k = 0` for `3 ≤ k ≤ achieved_n + 1` only.
    NFormalUpToK,
    /// Every probed step succeeded through arity `K`.
    FormalUpToK,
    /// A degree-support predicate extends the vanishing to all arities.
    Formal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    pub step: usize,
    pub failed_k: u32,
    pub denominator: Scalar,
}

#[derive(Debug, Clone)]
pub struct FormalityCertificate {
    pub achieved_n: usize,
    pub max_arity: usize,
    pub c: u32,
    pub steps_run: usize,
    /// `μ_k = 0` on the final structure for `3 ≤ k ≤ vanishing_through`.
    pub vanishing_through: usize,
    pub final_structure: Arc<AInfStructure>,
    pub final_automorphism: AInfMorphism,
    pub iso: AInfMorphism,
    pub steps: Vec<CoalgebraMap>,
    pub obstruction: Option<Obstruction>,
    pub flag: FormalityFlag,
}

/// `support ⊆ [0, n]`.
pub fn n_formal_implies_formal_chains(support: &BTreeSet<i64>, n: i64) -> bool {
    support.iter().all(|&d| (0..=n).contains(&d))
}

/// `support ⊆ [n − q(n + j − 1), −q]`.
pub fn n_formal_implies_formal_cochains(support: &BTreeSet<i64>, n: i64, j: i64, q: i64) -> bool {
    let lo = n - q * (n + j - 1);
    support.iter().all(|&d| (lo..=-q).contains(&d))
}

fn upgrades_to_formal(support: &BTreeSet<i64>, n: i64) -> bool {
    if n_formal_implies_formal_chains(support, n) {
        return true;
    }
    match support.last() {
        Some(&top) if top <= -1 => n_formal_implies_formal_cochains(support, n, 1, -top),
        _ => false,
    }
}

fn verify_step(before: &Arc<AInfStructure>, step: &KeyLemmaStep) -> Result<(), FormalityError> {
    if !coderivation_square(&step.structure).is_zero() {
        return Err(FormalityError::PostconditionFailed("conjugated structure fails Stasheff".into()));
    }
    if !morphism_defect(&step.automorphism).is_zero() {
        return Err(FormalityError::PostconditionFailed("conjugated automorphism is not a morphism".into()));
    }
    if !step.f.is_identity() {
        let f = AInfMorphism::new(before.clone(), step.structure.clone(), step.f.clone())?;
        if !morphism_defect(&f).is_zero() {
            return Err(FormalityError::PostconditionFailed("step map is not a morphism".into()));
        }
    }
    Ok(())
}

/// Iterates [`key_lemma_step`] for `n = 1, …, min(K − 1, c·target_n)`,
/// stopping early at the first non-unit denominator.
pub fn run_formality(
    m1: &Arc<AInfStructure>,
    s1: &AInfMorphism,
    t: &TwistData,
    target_n: usize,
) -> Result<FormalityCertificate, FormalityError> {
    let max_arity = m1.max_arity();
    let last = (max_arity.saturating_sub(1)).min(t.c as usize * target_n);
    let mut m = m1.clone();
    let mut s = s1.clone();
    let mut steps = Vec::new();
    let mut obstruction = None;
    for n in 1..=last {
        match key_lemma_step(&m, &s, n, t) {
            Ok(step) => {
                verify_step(&m, &step)?;
                m = step.structure;
                s = step.automorphism;
                steps.push(step.f);
            }
            Err(FormalityError::NonUnitDenominator { k, value }) => {
                obstruction = Some(Obstruction {
                    step: n,
                    failed_k: k,
                    denominator: value,
                });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let steps_run = steps.len();
    let achieved_n = match &obstruction {
        Some(o) => o.failed_k as usize - 1,
        None => steps_run / t.c as usize,
    };
    let vanishing_through = if steps_run == 0 {
        (3..=max_arity)
            .take_while(|&k| m.component(k).is_zero())
            .last()
            .unwrap_or(2)
    } else {
        (steps_run + 2).min(max_arity)
    };
    let iso_map = compose_tower(m1.module(), max_arity, &steps)?;
    let iso = AInfMorphism::new(m1.clone(), m.clone(), iso_map)?;
    if !morphism_defect(&iso).is_zero() {
        return Err(FormalityError::PostconditionFailed("composite is not a morphism".into()));
    }
    let mut flag = if obstruction.is_none() && steps_run + 1 >= max_arity {
        FormalityFlag::FormalUpToK
    } else {
        FormalityFlag::NFormalUpToK
    };
    let support = m1.module().occupied_degrees();
    let degree_bound = default_arity_bound(&support).is_some_and(|b| b <= vanishing_through);
    if degree_bound || upgrades_to_formal(&support, (t.c as usize * achieved_n) as i64) {
        flag = FormalityFlag::Formal;
    }
    Ok(FormalityCertificate {
        achieved_n,
        max_arity,
        c: t.c,
        steps_run,
        vanishing_through,
        final_structure: m,
        final_automorphism: s,
        iso,
        steps,
        obstruction,
        flag,
    })
}

/// `⟨x, y, z⟩ = μ_3(x, y, z)` with indeterminacy `μ_2(x, H) + μ_2(H, z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasseyTriple {
    pub class: Vector,
    pub indeterminacy: Vec<Vector>,
    pub defined: bool,
}

pub fn massey_triple(mt: &AInfStructure, x: usize, y: usize, z: usize) -> Result<MasseyTriple, FormalityError> {
    let module = mt.module();
    let mu2 = mt.component(2);
    for (a, b) in [(x, y), (y, z)] {
        if !mu2.value(&[a, b]).is_zero() {
            return Err(FormalityError::ProductsNonzero(format!(
                "μ_2({}, {}) ≠ 0",
                module.name(a),
                module.name(b)
            )));
        }
    }
    let class = mt.component(3).value(&[x, y, z]);
    let mut indeterminacy = Vec::new();
    for b in 0..module.dim() {
        for v in [mu2.value(&[x, b]), mu2.value(&[b, z])] {
            if !v.is_zero() {
                indeterminacy.push(v);
            }
        }
    }
    let defined = indeterminacy.is_empty();
    Ok(MasseyTriple {
        class,
        indeterminacy,
        defined,
    })
}
