//! Homotopy transfer of a strict dg-algebra structure along a retraction
//! onto homology.
//!
//! With the suspended conventions of [`crate::ainfinity`], `μ_1 = −d` and
//! the retraction satisfies `μ_1 h + h μ_1 = ip − id`. Then
//!
//! - `μ^t_k` is the sum over planar binary trees with `k` leaves of `p` at
//!   the root, `μ_2` at every vertex, `h` on internal edges, `i` on leaves;
//! - `ι_k` is the same sum with `h` in place of `p`, and `ι_1 = i`;
//! - `π_k = p ∘ (δ T_H)^{k−1}` on length-`k` tensors, where `δ` is the
//!   coderivation extending `μ_2` and `T_H = Σ_j 1^{⊗ j−1} ⊗ h ⊗ (ip)^{⊗ m−j}`
//!   with the Koszul sign of `h` passing the first `j − 1` factors.
//!
//! All signs in the tree sums are `+` in this convention.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ainfinity::{
    admissible_tuples, apply_coderivation, AInfError, AInfMorphism, AInfStructure, CoalgebraMap,
    MultilinearMap,
};
use crate::graded::{GradedMap, Retraction};
use crate::sparse::{accumulate_product, Tensor, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("transfer precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    AInf(#[from] AInfError),
}

/// Planar binary tree with ordered leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PlanarBinaryTree {
    Leaf,
    Node(Box<PlanarBinaryTree>, Box<PlanarBinaryTree>),
}

impl PlanarBinaryTree {
    pub fn leaves(&self) -> usize {
        match self {
            PlanarBinaryTree::Leaf => 1,
            PlanarBinaryTree::Node(l, r) => l.leaves() + r.leaves(),
        }
    }
}

impl fmt::Display for PlanarBinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanarBinaryTree::Leaf => write!(f, "•"),
            PlanarBinaryTree::Node(l, r) => write!(f, "({l} {r})"),
        }
    }
}

/// All planar binary trees with `k` leaves, ordered by the size of the
/// left subtree and then recursively. `k = 1` gives the bare leaf.
pub fn planar_trees(k: usize) -> Vec<PlanarBinaryTree> {
    if k == 0 {
        return Vec::new();
    }
    if k == 1 {
        return vec![PlanarBinaryTree::Leaf];
    }
    let mut out = Vec::new();
    for l in 1..k {
        let lefts = planar_trees(l);
        let rights = planar_trees(k - l);
        for a in &lefts {
            for b in &rights {
                out.push(PlanarBinaryTree::Node(Box::new(a.clone()), Box::new(b.clone())));
            }
        }
    }
    out
}

/// Smallest arity bound past which degree reasons force `μ_k = 0` on a
/// module with the given occupied degrees, if any.
///
/// Nonnegative support in `[0, D]` gives `D + 2`; support in `[−D, −q]`
/// with `q ≥ 2` gives `⌊(D − 2)/(q − 1)⌋` (at least 2).
pub fn default_arity_bound(support: &BTreeSet<i64>) -> Option<usize> {
    let (Some(&lo), Some(&hi)) = (support.first(), support.last()) else {
        return Some(2);
    };
    if lo >= 0 {
        return Some((hi + 2) as usize);
    }
    if hi <= -2 {
        let q = -hi;
        let d = -lo;
        return Some((((d - 2) / (q - 1)).max(2)) as usize);
    }
    None
}

fn check_inputs(a: &AInfStructure, r: &Retraction) -> Result<(), TransferError> {
    if **a.module() != **r.complex.module() {
        return Err(TransferError::Precondition(
            "retraction is for a different module".into(),
        ));
    }
    if let Some(k) = a.higher_support().first() {
        return Err(TransferError::Precondition(format!(
            "input must be strict, but μ_{k} ≠ 0"
        )));
    }
    let d = r.complex.differential();
    for j in 0..a.module().dim() {
        if a.component(1).value(&[j]) != d.column(j).negated() {
            return Err(TransferError::Precondition(
                "μ_1 must equal −d for the retraction's differential".into(),
            ));
        }
    }
    Ok(())
}

struct TreeEvaluator<'a> {
    mu2: &'a MultilinearMap,
    r: &'a Retraction,
}

impl TreeEvaluator<'_> {
    fn mu2(&self, u: &Vector, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (a, ca) in u.iter() {
            for (b, cb) in v.iter() {
                if let Some(w) = self.mu2.get(&[a, b]) {
                    out.add_scaled(w, &(ca * cb));
                }
            }
        }
        out
    }

    /// Value of the tree below an internal edge, or at a leaf.
    fn inner(&self, tree: &PlanarBinaryTree, xs: &[usize]) -> Vector {
        match tree {
            PlanarBinaryTree::Leaf => self.r.i.column(xs[0]).clone(),
            node => self.r.h.apply(&self.vertex(node, xs)),
        }
    }

    /// `μ_2` of the two subtrees at the top vertex.
    fn vertex(&self, tree: &PlanarBinaryTree, xs: &[usize]) -> Vector {
        match tree {
            PlanarBinaryTree::Leaf => unreachable!("vertex of a leaf"),
            PlanarBinaryTree::Node(l, rt) => {
                let n = l.leaves();
                let lv = self.inner(l, &xs[..n]);
                if lv.is_zero() {
                    return lv;
                }
                self.mu2(&lv, &self.inner(rt, &xs[n..]))
            }
        }
    }
}

/// Tree sums `Σ_T root(vertex(T)(x))` for every admissible tuple of `H`.
fn tree_family(
    a: &AInfStructure,
    r: &Retraction,
    max_arity: usize,
    root: &GradedMap,
    shift: i64,
) -> Vec<MultilinearMap> {
    let eval = TreeEvaluator {
        mu2: a.component(2),
        r,
    };
    let h_degrees = r.homology.degrees();
    let target_degrees = root.target().occupied_degrees();
    let mut comps = vec![MultilinearMap::new(1)];
    for k in 2..=max_arity {
        let trees = planar_trees(k);
        let mut comp = MultilinearMap::new(k);
        for tuple in admissible_tuples(&h_degrees, k, &target_degrees, shift) {
            let mut acc = Vector::new();
            for t in &trees {
                acc.add_assign(&eval.vertex(t, &tuple));
            }
            comp.insert(tuple, root.apply(&acc));
        }
        comps.push(comp);
    }
    comps
}

/// The transferred structure on `r.homology`; `μ^t_1 = 0`.
pub fn transfer_structure(
    a: &AInfStructure,
    r: &Retraction,
    max_arity: usize,
) -> Result<AInfStructure, TransferError> {
    check_inputs(a, r)?;
    let comps = tree_family(a, r, max_arity, &r.p, -2);
    Ok(AInfStructure::new(r.homology.clone(), comps)?)
}

/// `ι: (H, μ^t) → (A, μ)` with `ι_1 = i`.
pub fn transfer_inclusion(
    a: &Arc<AInfStructure>,
    transferred: &Arc<AInfStructure>,
    r: &Retraction,
) -> Result<AInfMorphism, TransferError> {
    check_inputs(a, r)?;
    let k = transferred.max_arity();
    let mut comps = tree_family(a, r, k, &r.h, -1);
    comps[0] = CoalgebraMap::from_linear(&r.i, 1).components()[0].clone();
    let map = CoalgebraMap::new(r.homology.clone(), a.module().clone(), comps)?;
    Ok(AInfMorphism::new(transferred.clone(), a.clone(), map)?)
}

/// `T_H` on a tensor over `A`.
fn apply_t_h(t: &Tensor, h: &GradedMap, ip: &GradedMap, degrees: &[i64]) -> Tensor {
    let mut out = Tensor::new();
    for (tuple, c) in t.iter() {
        let mut odd = false;
        let ips: Vec<&Vector> = tuple.iter().map(|&x| ip.column(x)).collect();
        for j in 0..tuple.len() {
            let hx = h.column(tuple[j]);
            if !hx.is_zero() {
                let mut factors: Vec<&Vector> = vec![hx];
                factors.extend_from_slice(&ips[j + 1..]);
                let coeff = if odd { -c } else { c.clone() };
                accumulate_product(&mut out, &tuple[..j], &factors, &coeff);
            }
            odd ^= degrees[tuple[j]].rem_euclid(2) == 0;
        }
    }
    out
}

/// `π: (A, μ) → (H, μ^t)` with `π_1 = p`.
pub fn transfer_projection(
    a: &Arc<AInfStructure>,
    transferred: &Arc<AInfStructure>,
    r: &Retraction,
) -> Result<AInfMorphism, TransferError> {
    check_inputs(a, r)?;
    let k = transferred.max_arity();
    let module = a.module();
    let degrees = module.degrees();
    let ip = r.i.compose(&r.p).map_err(|e| TransferError::Precondition(e.to_string()))?;
    let delta = [MultilinearMap::new(1), a.component(2).clone()];
    let h_degrees = r.homology.occupied_degrees();
    let mut comps = vec![CoalgebraMap::from_linear(&r.p, 1).components()[0].clone()];
    for len in 2..=k {
        let mut comp = MultilinearMap::new(len);
        for tuple in admissible_tuples(&degrees, len, &h_degrees, -1) {
            let mut t = Tensor::basis(tuple.clone(), module.ring());
            for _ in 1..len {
                t = apply_coderivation(&delta, &degrees, &apply_t_h(&t, &r.h, &ip, &degrees));
                if t.is_zero() {
                    break;
                }
            }
            comp.insert(tuple, r.p.apply(&t.linear_part()));
        }
        comps.push(comp);
    }
    let map = CoalgebraMap::new(module.clone(), r.homology.clone(), comps)?;
    Ok(AInfMorphism::new(a.clone(), transferred.clone(), map)?)
}

/// Transferred structure with both comparison morphisms.
#[derive(Debug, Clone)]
pub struct Transfer {
    pub structure: Arc<AInfStructure>,
    pub inclusion: AInfMorphism,
    pub projection: AInfMorphism,
}

pub fn transfer(a: &Arc<AInfStructure>, r: &Retraction) -> Result<Transfer, TransferError> {
    let structure = Arc::new(transfer_structure(a, r, a.max_arity())?);
    let inclusion = transfer_inclusion(a, &structure, r)?;
    let projection = transfer_projection(a, &structure, r)?;
    Ok(Transfer {
        structure,
        inclusion,
        projection,
    })
}
