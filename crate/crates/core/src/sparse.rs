//! Sparse vectors and tensors over a [`Ring`], keyed by basis indices.
//!
//! Both types drop zero coefficients eagerly, so structural equality is
//! mathematical equality.

use std::collections::BTreeMap;

use crate::coeff::{Ring, Scalar};

fn accumulate<K: Ord>(map: &mut BTreeMap<K, Scalar>, key: K, coeff: &Scalar) {
    if coeff.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get() + coeff;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(coeff.clone());
        }
    }
}

/// Element of a finitely generated free module.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vector {
    entries: BTreeMap<usize, Scalar>,
}

impl Vector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(index: usize, ring: Ring) -> Self {
        let mut v = Self::new();
        v.add_term(index, &ring.one());
        v
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, Scalar)>>(terms: I) -> Self {
        let mut v = Self::new();
        for (i, c) in terms {
            v.add_term(i, &c);
        }
        v
    }

    pub fn add_term(&mut self, index: usize, coeff: &Scalar) {
        accumulate(&mut self.entries, index, coeff);
    }

    pub fn add_scaled(&mut self, other: &Vector, factor: &Scalar) {
        for (i, c) in &other.entries {
            accumulate(&mut self.entries, *i, &(c * factor));
        }
    }

    pub fn add_assign(&mut self, other: &Vector) {
        for (i, c) in &other.entries {
            accumulate(&mut self.entries, *i, c);
        }
    }

    pub fn sub_assign(&mut self, other: &Vector) {
        for (i, c) in &other.entries {
            accumulate(&mut self.entries, *i, &-c);
        }
    }

    pub fn scaled(&self, factor: &Scalar) -> Vector {
        let mut out = Vector::new();
        out.add_scaled(self, factor);
        out
    }

    pub fn negated(&self) -> Vector {
        Vector {
            entries: self.entries.iter().map(|(i, c)| (*i, -c)).collect(),
        }
    }

    pub fn get(&self, index: usize) -> Option<&Scalar> {
        self.entries.get(&index)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(i, c)| (*i, c))
    }
}

/// Element of a direct sum of tensor powers: keys are basis tuples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tensor {
    entries: BTreeMap<Vec<usize>, Scalar>,
}

impl Tensor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(tuple: Vec<usize>, ring: Ring) -> Self {
        let mut t = Self::new();
        t.add_term(tuple, &ring.one());
        t
    }

    pub fn add_term(&mut self, tuple: Vec<usize>, coeff: &Scalar) {
        accumulate(&mut self.entries, tuple, coeff);
    }

    pub fn add_assign(&mut self, other: &Tensor) {
        for (t, c) in &other.entries {
            accumulate(&mut self.entries, t.clone(), c);
        }
    }

    pub fn add_scaled(&mut self, other: &Tensor, factor: &Scalar) {
        for (t, c) in &other.entries {
            accumulate(&mut self.entries, t.clone(), &(c * factor));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], &Scalar)> {
        self.entries.iter().map(|(t, c)| (t.as_slice(), c))
    }

    /// Length-1 part, read as a vector.
    pub fn linear_part(&self) -> Vector {
        let mut v = Vector::new();
        for (t, c) in &self.entries {
            if t.len() == 1 {
                v.add_term(t[0], c);
            }
        }
        v
    }
}

/// Tensor product of vectors `v_1 ⊗ ... ⊗ v_m`, scaled by `coeff`,
/// accumulated into `out` after the fixed `prefix`.
pub fn accumulate_product(
    out: &mut Tensor,
    prefix: &[usize],
    factors: &[&Vector],
    coeff: &Scalar,
) {
    if coeff.is_zero() || factors.iter().any(|v| v.is_zero()) {
        return;
    }
    let mut tuple = prefix.to_vec();
    fn rec(
        out: &mut Tensor,
        tuple: &mut Vec<usize>,
        factors: &[&Vector],
        coeff: &Scalar,
    ) {
        match factors.split_first() {
            None => out.add_term(tuple.clone(), coeff),
            Some((first, rest)) => {
                for (i, c) in first.iter() {
                    tuple.push(i);
                    rec(out, tuple, rest, &(coeff * c));
                    tuple.pop();
                }
            }
        }
    }
    rec(out, &mut tuple, factors, coeff);
}
