//! A∞-structures and ∞-morphisms as arity-indexed families of sparse
//! multilinear maps, with the tensor-coalgebra operations built on them.
//!
//! All components are stored in the suspended ("bar") convention: with
//! shifted degree `|x|' = |x| + 1`, every structure component `μ_k` has
//! shifted degree −1 and every morphism component `f_k` shifted degree 0.
//! In unshifted terms `μ_k` has degree `k − 2` and `f_k` degree `k − 1`.
//! The only signs are Koszul signs from moving `μ_s` past the prefix of a
//! tensor: `(−1)^{|x_1|' + … + |x_a|'}`.

mod calculus;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::coeff::Ring;
use crate::graded::{GradedError, GradedMap, GradedModule};
use crate::sparse::Vector;

pub use calculus::{
    apply_coalgebra_map, apply_coderivation, coderivation_square, compose, compose_maps,
    conjugate_morphism, conjugate_structure, conjugate_structure_fast, invert, invert_map,
    morphism_defect, project,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AInfError {
    #[error("{0}")]
    Shape(String),
    #[error("arity {arity} component on {tuple:?} leaves degree {expected}")]
    DegreeViolation {
        arity: usize,
        tuple: Vec<usize>,
        expected: i64,
    },
    #[error("linear component is not invertible ({0})")]
    NonInvertibleLinearPart(GradedError),
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// A multilinear map of fixed arity, stored as basis tuple → output vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearMap {
    arity: usize,
    table: BTreeMap<Vec<usize>, Vector>,
}

impl MultilinearMap {
    pub fn new(arity: usize) -> Self {
        MultilinearMap {
            arity,
            table: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, tuple: &[usize]) -> Option<&Vector> {
        self.table.get(tuple)
    }

    pub fn value(&self, tuple: &[usize]) -> Vector {
        self.get(tuple).cloned().unwrap_or_default()
    }

    /// Replaces the value on `tuple`; zero values are not stored.
    pub fn insert(&mut self, tuple: Vec<usize>, value: Vector) {
        assert_eq!(tuple.len(), self.arity, "tuple length must equal the arity");
        if value.is_zero() {
            self.table.remove(&tuple);
        } else {
            self.table.insert(tuple, value);
        }
    }

    pub fn add_to(&mut self, tuple: &[usize], value: &Vector) {
        let mut v = self.value(tuple);
        v.add_assign(value);
        self.insert(tuple.to_vec(), v);
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], &Vector)> {
        self.table.iter().map(|(t, v)| (t.as_slice(), v))
    }

    pub fn sub(&self, other: &MultilinearMap) -> MultilinearMap {
        let mut out = self.clone();
        for (t, v) in other.iter() {
            out.add_to(t, &v.negated());
        }
        out
    }

    pub fn negated(&self) -> MultilinearMap {
        MultilinearMap {
            arity: self.arity,
            table: self.table.iter().map(|(t, v)| (t.clone(), v.negated())).collect(),
        }
    }

    /// Lines `name(a, b, …) = value` for every stored entry.
    pub fn describe(&self, name: &str, source: &GradedModule, target: &GradedModule) -> Vec<String> {
        self.iter()
            .map(|(t, v)| {
                let args: Vec<&str> = t.iter().map(|&i| source.name(i)).collect();
                format!("{name}({}) = {}", args.join(", "), target.format_vector(v))
            })
            .collect()
    }
}

/// Checks that every stored term of each component lands in degree
/// `N + k + shift`, `N` being the total input degree.
fn check_family(
    source: &GradedModule,
    target: &GradedModule,
    components: &[MultilinearMap],
    shift: i64,
) -> Result<(), AInfError> {
    for (idx, comp) in components.iter().enumerate() {
        let k = idx + 1;
        if comp.arity() != k {
            return Err(AInfError::Shape(format!(
                "component {k} has arity {}",
                comp.arity()
            )));
        }
        for (tuple, v) in comp.iter() {
            if tuple.iter().any(|&i| i >= source.dim()) {
                return Err(AInfError::Shape(format!("input {tuple:?} out of range")));
            }
            let expected = tuple.iter().map(|&i| source.degree(i)).sum::<i64>() + k as i64 + shift;
            for (j, _) in v.iter() {
                if j >= target.dim() || target.degree(j) != expected {
                    return Err(AInfError::DegreeViolation {
                        arity: k,
                        tuple: tuple.to_vec(),
                        expected,
                    });
                }
            }
        }
    }
    Ok(())
}

/// `(V, μ_1, …, μ_K)` with `μ_k` of degree `k − 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AInfStructure {
    module: Arc<GradedModule>,
    components: Vec<MultilinearMap>,
}

impl AInfStructure {
    pub fn new(module: Arc<GradedModule>, components: Vec<MultilinearMap>) -> Result<Self, AInfError> {
        if components.is_empty() {
            return Err(AInfError::Shape("a structure needs at least μ_1".into()));
        }
        check_family(&module, &module, &components, -2)?;
        Ok(AInfStructure { module, components })
    }

    pub fn zero(module: Arc<GradedModule>, max_arity: usize) -> Self {
        AInfStructure {
            module,
            components: (1..=max_arity.max(1)).map(MultilinearMap::new).collect(),
        }
    }

    pub fn module(&self) -> &Arc<GradedModule> {
        &self.module
    }

    pub fn ring(&self) -> Ring {
        self.module.ring()
    }

    pub fn max_arity(&self) -> usize {
        self.components.len()
    }

    /// `μ_k`, 1-based. Arities past the truncation read as zero.
    pub fn component(&self, k: usize) -> &MultilinearMap {
        static EMPTY: std::sync::OnceLock<MultilinearMap> = std::sync::OnceLock::new();
        self.components
            .get(k.wrapping_sub(1))
            .unwrap_or_else(|| EMPTY.get_or_init(|| MultilinearMap::new(0)))
    }

    pub fn components(&self) -> &[MultilinearMap] {
        &self.components
    }

    pub fn truncated(&self, max_arity: usize) -> AInfStructure {
        let mut components = self.components.clone();
        components.truncate(max_arity.max(1));
        while components.len() < max_arity {
            components.push(MultilinearMap::new(components.len() + 1));
        }
        AInfStructure {
            module: self.module.clone(),
            components,
        }
    }

    /// Arities `k ≥ 3` with nonzero `μ_k`.
    pub fn higher_support(&self) -> Vec<usize> {
        (3..=self.max_arity())
            .filter(|&k| !self.component(k).is_zero())
            .collect()
    }

    pub fn describe(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (idx, comp) in self.components.iter().enumerate() {
            out.extend(comp.describe(&format!("μ_{}", idx + 1), &self.module, &self.module));
        }
        out
    }
}

/// Components `f_1, …, f_K` of a map of tensor coalgebras, `f_k` of
/// degree `k − 1`, with no compatibility with any structure assumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalgebraMap {
    source: Arc<GradedModule>,
    target: Arc<GradedModule>,
    components: Vec<MultilinearMap>,
}

impl CoalgebraMap {
    pub fn new(
        source: Arc<GradedModule>,
        target: Arc<GradedModule>,
        components: Vec<MultilinearMap>,
    ) -> Result<Self, AInfError> {
        if components.is_empty() {
            return Err(AInfError::Shape("a morphism needs at least f_1".into()));
        }
        if source.ring() != target.ring() {
            return Err(AInfError::Shape("source and target rings differ".into()));
        }
        check_family(&source, &target, &components, -1)?;
        Ok(CoalgebraMap {
            source,
            target,
            components,
        })
    }

    pub fn identity(module: Arc<GradedModule>, max_arity: usize) -> Self {
        Self::from_linear(&GradedMap::identity(module), max_arity)
    }

    /// Strict map with `f_1 = φ` and no higher components. `φ` must have degree 0.
    pub fn from_linear(phi: &GradedMap, max_arity: usize) -> Self {
        assert_eq!(phi.degree(), 0, "a strict morphism needs a degree 0 linear part");
        let mut f1 = MultilinearMap::new(1);
        for j in 0..phi.source().dim() {
            f1.insert(vec![j], phi.column(j).clone());
        }
        let mut components = vec![f1];
        for k in 2..=max_arity {
            components.push(MultilinearMap::new(k));
        }
        CoalgebraMap {
            source: phi.source().clone(),
            target: phi.target().clone(),
            components,
        }
    }

    pub fn source(&self) -> &Arc<GradedModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedModule> {
        &self.target
    }

    pub fn ring(&self) -> Ring {
        self.source.ring()
    }

    pub fn max_arity(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, k: usize) -> &MultilinearMap {
        &self.components[k - 1]
    }

    pub fn components(&self) -> &[MultilinearMap] {
        &self.components
    }

    pub fn linear_part(&self) -> GradedMap {
        let cols = (0..self.source.dim())
            .map(|j| self.components[0].value(&[j]))
            .collect();
        GradedMap::new(self.source.clone(), self.target.clone(), 0, cols)
            .expect("f_1 is degree checked")
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self.linear_part() == GradedMap::identity(self.source.clone())
            && self.components[1..].iter().all(MultilinearMap::is_zero)
    }

    pub fn truncated(&self, max_arity: usize) -> CoalgebraMap {
        let mut components = self.components.clone();
        components.truncate(max_arity.max(1));
        CoalgebraMap {
            source: self.source.clone(),
            target: self.target.clone(),
            components,
        }
    }

    pub fn describe(&self, name: &str) -> Vec<String> {
        let mut out = Vec::new();
        for (idx, comp) in self.components.iter().enumerate() {
            out.extend(comp.describe(&format!("{name}_{}", idx + 1), &self.source, &self.target));
        }
        out
    }
}

/// An ∞-morphism candidate between two structures. Validity is not
/// assumed; see [`morphism_defect`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AInfMorphism {
    source: Arc<AInfStructure>,
    target: Arc<AInfStructure>,
    map: CoalgebraMap,
}

impl AInfMorphism {
    pub fn new(
        source: Arc<AInfStructure>,
        target: Arc<AInfStructure>,
        map: CoalgebraMap,
    ) -> Result<Self, AInfError> {
        if map.source() != source.module() || map.target() != target.module() {
            return Err(AInfError::StructureMismatch(
                "map modules differ from the structures' modules".into(),
            ));
        }
        if source.max_arity() != target.max_arity() || map.max_arity() != source.max_arity() {
            return Err(AInfError::StructureMismatch(format!(
                "truncation arities differ ({}, {}, {})",
                source.max_arity(),
                map.max_arity(),
                target.max_arity()
            )));
        }
        Ok(AInfMorphism { source, target, map })
    }

    pub fn identity(structure: Arc<AInfStructure>) -> Self {
        let map = CoalgebraMap::identity(structure.module().clone(), structure.max_arity());
        AInfMorphism {
            source: structure.clone(),
            target: structure,
            map,
        }
    }

    /// `f_1 = φ`, `f_{k≥2} = 0`; validity is not assumed.
    pub fn strict_from_linear(
        phi: &GradedMap,
        source: Arc<AInfStructure>,
        target: Arc<AInfStructure>,
    ) -> Result<Self, AInfError> {
        if phi.degree() != 0 {
            return Err(AInfError::Shape("strict morphisms need a degree 0 map".into()));
        }
        let map = CoalgebraMap::from_linear(phi, source.max_arity());
        Self::new(source, target, map)
    }

    pub fn source(&self) -> &Arc<AInfStructure> {
        &self.source
    }

    pub fn target(&self) -> &Arc<AInfStructure> {
        &self.target
    }

    pub fn map(&self) -> &CoalgebraMap {
        &self.map
    }

    pub fn component(&self, k: usize) -> &MultilinearMap {
        self.map.component(k)
    }

    pub fn max_arity(&self) -> usize {
        self.map.max_arity()
    }

    pub fn linear_part(&self) -> GradedMap {
        self.map.linear_part()
    }
}

/// Arity-indexed defect family; entry `k − 1` is the arity-`k` defect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect {
    components: Vec<MultilinearMap>,
}

impl Defect {
    pub fn new(components: Vec<MultilinearMap>) -> Self {
        Defect { components }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(MultilinearMap::is_zero)
    }

    pub fn component(&self, k: usize) -> &MultilinearMap {
        &self.components[k - 1]
    }

    pub fn components(&self) -> &[MultilinearMap] {
        &self.components
    }

    pub fn nonzero_arities(&self) -> Vec<usize> {
        self.components
            .iter()
            .filter(|c| !c.is_zero())
            .map(MultilinearMap::arity)
            .collect()
    }

    pub fn first_nonzero_arity(&self) -> Option<usize> {
        self.nonzero_arities().first().copied()
    }
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.nonzero_arities().as_slice() {
            [] => write!(f, "zero"),
            ks => write!(f, "nonzero in arities {ks:?}"),
        }
    }
}

/// All basis tuples of length `k` over `degrees` whose total degree plus
/// `k + shift` is an occupied target degree, in lexicographic order.
pub(crate) fn admissible_tuples(
    degrees: &[i64],
    k: usize,
    target_degrees: &BTreeSet<i64>,
    shift: i64,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if degrees.is_empty() || target_degrees.is_empty() {
        return out;
    }
    let lo = *target_degrees.first().unwrap();
    let hi = *target_degrees.last().unwrap();
    let dmin = *degrees.iter().min().unwrap();
    let dmax = *degrees.iter().max().unwrap();
    let mut tuple = Vec::with_capacity(k);
    fn rec(
        degrees: &[i64],
        k: usize,
        target: &BTreeSet<i64>,
        offset: i64,
        bounds: (i64, i64, i64, i64),
        tuple: &mut Vec<usize>,
        sum: i64,
        out: &mut Vec<Vec<usize>>,
    ) {
        let (lo, hi, dmin, dmax) = bounds;
        let left = (k - tuple.len()) as i64;
        if sum + left * dmin + offset > hi || sum + left * dmax + offset < lo {
            return;
        }
        if left == 0 {
            if target.contains(&(sum + offset)) {
                out.push(tuple.clone());
            }
            return;
        }
        for (i, &d) in degrees.iter().enumerate() {
            tuple.push(i);
            rec(degrees, k, target, offset, bounds, tuple, sum + d, out);
            tuple.pop();
        }
    }
    rec(
        degrees,
        k,
        target_degrees,
        k as i64 + shift,
        (lo, hi, dmin, dmax),
        &mut tuple,
        0,
        &mut out,
    );
    out
}
