//! Coderivations and coalgebra maps on the truncated tensor coalgebra,
//! evaluated on basis tuples and projected back to cogenerators.

use std::sync::Arc;

use super::{admissible_tuples, AInfError, AInfMorphism, AInfStructure, CoalgebraMap, Defect, MultilinearMap};
use crate::graded::GradedModule;
use crate::sparse::{accumulate_product, Tensor, Vector};

fn shifted_odd(degree: i64) -> bool {
    degree.rem_euclid(2) == 0
}

/// Extends `components` to a coderivation and applies it to `t`:
/// `Σ ± x_1 ⊗ … ⊗ μ_s(x_{a+1}, …, x_{a+s}) ⊗ … ⊗ x_m`.
pub fn apply_coderivation(components: &[MultilinearMap], degrees: &[i64], t: &Tensor) -> Tensor {
    let mut out = Tensor::new();
    for (tuple, c) in t.iter() {
        let len = tuple.len();
        let mut odd = false;
        for a in 0..len {
            let coeff = if odd { -c } else { c.clone() };
            for s in 1..=components.len().min(len - a) {
                let Some(v) = components[s - 1].get(&tuple[a..a + s]) else {
                    continue;
                };
                for (i, x) in v.iter() {
                    let mut key = Vec::with_capacity(len - s + 1);
                    key.extend_from_slice(&tuple[..a]);
                    key.push(i);
                    key.extend_from_slice(&tuple[a + s..]);
                    out.add_term(key, &(&coeff * x));
                }
            }
            odd ^= shifted_odd(degrees[tuple[a]]);
        }
    }
    out
}

/// Extends `components` to a coalgebra map and applies it to `t`:
/// `Σ f_{i_1} ⊗ … ⊗ f_{i_r}` over ordered splittings of each tuple.
/// Components have shifted degree 0, so no signs occur.
pub fn apply_coalgebra_map(components: &[MultilinearMap], t: &Tensor) -> Tensor {
    let mut out = Tensor::new();
    for (tuple, c) in t.iter() {
        let mut factors: Vec<&Vector> = Vec::new();
        split(components, tuple, &mut factors, &mut |fs| {
            accumulate_product(&mut out, &[], fs, c);
        });
    }
    out
}

fn split<'a>(
    components: &'a [MultilinearMap],
    rest: &[usize],
    factors: &mut Vec<&'a Vector>,
    emit: &mut dyn FnMut(&[&Vector]),
) {
    if rest.is_empty() {
        emit(factors);
        return;
    }
    for l in 1..=components.len().min(rest.len()) {
        if let Some(v) = components[l - 1].get(&rest[..l]) {
            factors.push(v);
            split(components, &rest[l..], factors, emit);
            factors.pop();
        }
    }
}

/// Projection to cogenerators: `Σ_k f_k` applied to the length-`k` part.
pub fn project(components: &[MultilinearMap], t: &Tensor) -> Vector {
    let mut out = Vector::new();
    for (tuple, c) in t.iter() {
        if let Some(v) = components.get(tuple.len() - 1).and_then(|m| m.get(tuple)) {
            out.add_scaled(v, c);
        }
    }
    out
}

/// Evaluates `eval` on every admissible basis tuple of arities `1..=max_arity`.
fn build_family(
    source: &GradedModule,
    target: &GradedModule,
    max_arity: usize,
    shift: i64,
    mut eval: impl FnMut(&[usize]) -> Vector,
) -> Vec<MultilinearMap> {
    let degrees = source.degrees();
    let occupied = target.occupied_degrees();
    (1..=max_arity)
        .map(|k| {
            let mut comp = MultilinearMap::new(k);
            for tuple in admissible_tuples(&degrees, k, &occupied, shift) {
                let v = eval(&tuple);
                comp.insert(tuple, v);
            }
            comp
        })
        .collect()
}

fn basis_tensor(tuple: &[usize], module: &GradedModule) -> Tensor {
    Tensor::basis(tuple.to_vec(), module.ring())
}

/// Projection of `M ∘ M` to cogenerators, arity by arity up to `K`.
pub fn coderivation_square(m: &AInfStructure) -> Defect {
    let module = m.module();
    let degrees = module.degrees();
    let comps = m.components();
    Defect::new(build_family(module, module, m.max_arity(), -3, |t| {
        project(comps, &apply_coderivation(comps, &degrees, &basis_tensor(t, module)))
    }))
}

/// Projection of `F ∘ M_source − M_target ∘ F` to cogenerators.
pub fn morphism_defect(f: &AInfMorphism) -> Defect {
    let src = f.source();
    let tgt = f.target();
    let degrees = src.module().degrees();
    let fc = f.map().components();
    Defect::new(build_family(src.module(), tgt.module(), f.max_arity(), -2, |t| {
        let x = basis_tensor(t, src.module());
        let mut v = project(fc, &apply_coderivation(src.components(), &degrees, &x));
        v.sub_assign(&project(tgt.components(), &apply_coalgebra_map(fc, &x)));
        v
    }))
}

/// `g ∘ f` on coalgebra components, truncated to the shorter family.
pub fn compose_maps(g: &CoalgebraMap, f: &CoalgebraMap) -> Result<CoalgebraMap, AInfError> {
    if f.target() != g.source() {
        return Err(AInfError::StructureMismatch(
            "inner target and outer source differ".into(),
        ));
    }
    let k = f.max_arity().min(g.max_arity());
    let comps = build_family(f.source(), g.target(), k, -1, |t| {
        project(g.components(), &apply_coalgebra_map(f.components(), &basis_tensor(t, f.source())))
    });
    CoalgebraMap::new(f.source().clone(), g.target().clone(), comps)
}

/// `g ∘ f`; requires `f.target` and `g.source` to be the same structure.
pub fn compose(g: &AInfMorphism, f: &AInfMorphism) -> Result<AInfMorphism, AInfError> {
    if f.target() != g.source() {
        return Err(AInfError::StructureMismatch(
            "inner target structure differs from outer source structure".into(),
        ));
    }
    let map = compose_maps(g.map(), f.map())?;
    AInfMorphism::new(f.source().clone(), g.target().clone(), map)
}

/// Two-sided inverse, solved arity by arity from `g ∘ f = id`:
/// `g_k(v) = −Σ_{r<k} g_r((F((f_1^{-1})^{⊗k} v))_r)`.
pub fn invert_map(f: &CoalgebraMap) -> Result<CoalgebraMap, AInfError> {
    let f1_inv = f
        .linear_part()
        .inverse()
        .map_err(AInfError::NonInvertibleLinearPart)?;
    let source = f.target().clone();
    let target = f.source().clone();
    let ring = source.ring();
    let degrees = source.degrees();
    let occupied = target.occupied_degrees();
    let mut g = vec![CoalgebraMap::from_linear(&f1_inv, 1).components()[0].clone()];
    for k in 2..=f.max_arity() {
        let mut gk = MultilinearMap::new(k);
        for tuple in admissible_tuples(&degrees, k, &occupied, -1) {
            let factors: Vec<&Vector> = tuple.iter().map(|&i| f1_inv.column(i)).collect();
            let mut w = Tensor::new();
            accumulate_product(&mut w, &[], &factors, &ring.one());
            let fw = apply_coalgebra_map(f.components(), &w);
            let mut lower = Tensor::new();
            for (t, c) in fw.iter() {
                if t.len() < k {
                    lower.add_term(t.to_vec(), c);
                }
            }
            gk.insert(tuple, project(&g, &lower).negated());
        }
        g.push(gk);
    }
    CoalgebraMap::new(source, target, g)
}

pub fn invert(f: &AInfMorphism) -> Result<AInfMorphism, AInfError> {
    let g = invert_map(f.map())?;
    AInfMorphism::new(f.target().clone(), f.source().clone(), g)
}

fn check_endomorphism(f: &CoalgebraMap, module: &Arc<GradedModule>) -> Result<(), AInfError> {
    if f.source() != module || f.target() != module {
        return Err(AInfError::StructureMismatch(
            "conjugating map must be an endomorphism of the structure's module".into(),
        ));
    }
    Ok(())
}

/// The structure with coderivation `F ∘ M ∘ F^{-1}`.
pub fn conjugate_structure(f: &CoalgebraMap, m: &AInfStructure) -> Result<AInfStructure, AInfError> {
    check_endomorphism(f, m.module())?;
    let g = invert_map(f)?;
    let module = m.module();
    let degrees = module.degrees();
    let comps = build_family(module, module, m.max_arity(), -2, |t| {
        let gx = apply_coalgebra_map(g.components(), &basis_tensor(t, module));
        project(f.components(), &apply_coderivation(m.components(), &degrees, &gx))
    });
    AInfStructure::new(module.clone(), comps)
}

/// `F ∘ S ∘ F^{-1}` for an endomorphism `s` of the same module.
pub fn conjugate_morphism(f: &CoalgebraMap, s: &CoalgebraMap) -> Result<CoalgebraMap, AInfError> {
    check_endomorphism(f, s.source())?;
    check_endomorphism(s, f.source())?;
    let g = invert_map(f)?;
    let module = s.source();
    let comps = build_family(module, module, s.max_arity(), -1, |t| {
        let gx = apply_coalgebra_map(g.components(), &basis_tensor(t, module));
        project(f.components(), &apply_coalgebra_map(s.components(), &gx))
    });
    CoalgebraMap::new(module.clone(), module.clone(), comps)
}

/// Arities `≤ min(n + 2, K)` of `F M F^{-1}` for `f = id + (terms of
/// arity > n)`, using only single insertions:
/// `μ'_k = μ_k + Σ_{r≥2} f_r(…μ_s…) + Σ_{s≥2} μ_r(…g_s…)` with `g = f^{-1}`.
///
/// Needs `n ≥ 2` or `μ_1 = 0`; otherwise terms with two insertions survive.
pub fn conjugate_structure_fast(
    f: &CoalgebraMap,
    m: &AInfStructure,
    n: usize,
) -> Result<AInfStructure, AInfError> {
    check_endomorphism(f, m.module())?;
    let module = m.module();
    if f.linear_part() != crate::graded::GradedMap::identity(module.clone()) {
        return Err(AInfError::PreconditionViolated("f_1 must be the identity".into()));
    }
    if let Some(k) = (2..=n.min(f.max_arity())).find(|&k| !f.component(k).is_zero()) {
        return Err(AInfError::PreconditionViolated(format!("f_{k} must vanish")));
    }
    if n < 2 && !m.component(1).is_zero() {
        return Err(AInfError::PreconditionViolated(
            "for n < 2 the structure must have μ_1 = 0".into(),
        ));
    }
    let top = (n + 2).min(m.max_arity());
    let g = invert_map(&f.truncated(top))?;
    let degrees = module.degrees();
    let ring = module.ring();
    let higher_f: Vec<MultilinearMap> = f
        .truncated(top)
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| if i == 0 { MultilinearMap::new(1) } else { c.clone() })
        .collect();
    let comps = build_family(module, module, top, -2, |t| {
        let mut v = m.component(t.len()).value(t);
        let x = basis_tensor(t, module);
        // f_r, r ≥ 2, after one μ insertion
        v.add_assign(&project(&higher_f, &apply_coderivation(m.components(), &degrees, &x)));
        // μ_r after one g_s insertion, s ≥ 2
        let k = t.len();
        for s in 2..=k {
            for a in 0..=k - s {
                let Some(gv) = g.component(s).get(&t[a..a + s]) else {
                    continue;
                };
                let mut inner = Tensor::new();
                let before: Vec<Vector> = t[..a].iter().map(|&i| Vector::basis(i, ring)).collect();
                let after: Vec<Vector> = t[a + s..].iter().map(|&i| Vector::basis(i, ring)).collect();
                let mut factors: Vec<&Vector> = before.iter().collect();
                factors.push(gv);
                factors.extend(after.iter());
                accumulate_product(&mut inner, &[], &factors, &ring.one());
                v.add_assign(&project(m.components(), &inner));
            }
        }
        v
    });
    AInfStructure::new(module.clone(), comps)
}
