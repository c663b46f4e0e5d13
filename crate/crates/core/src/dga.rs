//! Strict differential graded associative algebras given by a product table.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::ainfinity::{AInfStructure, MultilinearMap};
use crate::coeff::Ring;
use crate::graded::{ChainComplex, GradedError, GradedMap, GradedModule};
use crate::sparse::Vector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DgaError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("product {left}·{right} has a term {term} outside degree {expected}")]
    ProductDegree {
        left: String,
        right: String,
        term: String,
        expected: i64,
    },
    #[error("dg-algebra axiom fails: {0}")]
    Axiom(String),
}

/// `(A, d, ·)` with `d` of degree −1 and a degree-additive bilinear product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dga {
    module: Arc<GradedModule>,
    d: GradedMap,
    product: BTreeMap<(usize, usize), Vector>,
}

/// Which dg-algebra axioms hold; `failures` names each violated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DgaReport {
    pub d_squared_zero: bool,
    pub associative: bool,
    pub leibniz: bool,
    pub failures: Vec<String>,
}

impl DgaReport {
    pub fn all_pass(&self) -> bool {
        self.d_squared_zero && self.associative && self.leibniz
    }
}

impl Dga {
    pub fn new(
        d: GradedMap,
        products: impl IntoIterator<Item = ((usize, usize), Vector)>,
    ) -> Result<Self, DgaError> {
        if d.degree() != -1 || *d.source() != *d.target() {
            return Err(GradedError::Shape("differential must be a degree -1 endomorphism".into()).into());
        }
        let module = d.source().clone();
        let mut product: BTreeMap<(usize, usize), Vector> = BTreeMap::new();
        for ((a, b), v) in products {
            if a >= module.dim() || b >= module.dim() {
                return Err(GradedError::Shape(format!("product index ({a}, {b}) out of range")).into());
            }
            let expected = module.degree(a) + module.degree(b);
            for (i, _) in v.iter() {
                if i >= module.dim() || module.degree(i) != expected {
                    return Err(DgaError::ProductDegree {
                        left: module.name(a).into(),
                        right: module.name(b).into(),
                        term: if i < module.dim() { module.name(i).into() } else { i.to_string() },
                        expected,
                    });
                }
            }
            product.entry((a, b)).or_default().add_assign(&v);
        }
        product.retain(|_, v| !v.is_zero());
        Ok(Dga { module, d, product })
    }

    /// Graded algebra with zero differential.
    pub fn formal(
        module: Arc<GradedModule>,
        products: impl IntoIterator<Item = ((usize, usize), Vector)>,
    ) -> Result<Self, DgaError> {
        let d = GradedMap::zero(module.clone(), module, -1);
        Self::new(d, products)
    }

    pub fn zero(ring: Ring) -> Self {
        let module = Arc::new(GradedModule::zero(ring));
        Dga {
            d: GradedMap::zero(module.clone(), module.clone(), -1),
            module,
            product: BTreeMap::new(),
        }
    }

    pub fn module(&self) -> &Arc<GradedModule> {
        &self.module
    }

    pub fn ring(&self) -> Ring {
        self.module.ring()
    }

    pub fn differential(&self) -> &GradedMap {
        &self.d
    }

    pub fn products(&self) -> impl Iterator<Item = (&(usize, usize), &Vector)> {
        self.product.iter()
    }

    pub fn basis_product(&self, a: usize, b: usize) -> Vector {
        self.product.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn multiply(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::new();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                if let Some(v) = self.product.get(&(a, b)) {
                    out.add_scaled(v, &(ca * cb));
                }
            }
        }
        out
    }

    pub fn complex(&self) -> Result<ChainComplex, GradedError> {
        ChainComplex::new(self.d.clone())
    }

    /// Checks `d² = 0`, associativity and the graded Leibniz rule on basis
    /// elements.
    pub fn check(&self) -> DgaReport {
        let m = &self.module;
        let ring = self.ring();
        let n = m.dim();
        let mut failures = Vec::new();
        let d_squared_zero = match self.d.compose(&self.d) {
            Ok(dd) => dd.is_zero(),
            Err(_) => false,
        };
        if !d_squared_zero {
            failures.push("d∘d ≠ 0".to_string());
        }
        let basis = |i| Vector::basis(i, ring);
        let mut associative = true;
        for a in 0..n {
            for b in 0..n {
                let ab = self.basis_product(a, b);
                for c in 0..n {
                    let left = self.multiply(&ab, &basis(c));
                    let right = self.multiply(&basis(a), &self.basis_product(b, c));
                    if left != right {
                        associative = false;
                        failures.push(format!(
                            "({}·{})·{} ≠ {}·({}·{})",
                            m.name(a), m.name(b), m.name(c), m.name(a), m.name(b), m.name(c)
                        ));
                    }
                }
            }
        }
        let mut leibniz = true;
        for a in 0..n {
            for b in 0..n {
                let lhs = self.d.apply(&self.basis_product(a, b));
                let mut rhs = self.multiply(self.d.column(a), &basis(b));
                let second = self.multiply(&basis(a), self.d.column(b));
                if m.degree(a).rem_euclid(2) == 0 {
                    rhs.add_assign(&second);
                } else {
                    rhs.sub_assign(&second);
                }
                if lhs != rhs {
                    leibniz = false;
                    failures.push(format!("d({}·{}) violates the Leibniz rule", m.name(a), m.name(b)));
                }
            }
        }
        DgaReport {
            d_squared_zero,
            associative,
            leibniz,
            failures,
        }
    }

    /// The algebra as an A∞-structure truncated at `max_arity`, in the
    /// suspended sign convention: `μ_1 = −d`, `μ_2(x, y) = (−1)^{|x|} x·y`.
    pub fn to_structure(&self, max_arity: usize) -> AInfStructure {
        let ring = self.ring();
        let mut mu1 = MultilinearMap::new(1);
        for j in 0..self.module.dim() {
            mu1.insert(vec![j], self.d.column(j).negated());
        }
        let mut mu2 = MultilinearMap::new(2);
        for (&(a, b), v) in &self.product {
            let sign = if self.module.degree(a).rem_euclid(2) == 0 {
                ring.one()
            } else {
                -ring.one()
            };
            mu2.insert(vec![a, b], v.scaled(&sign));
        }
        let mut components = vec![mu1, mu2];
        for k in 3..=max_arity {
            components.push(MultilinearMap::new(k));
        }
        components.truncate(max_arity.max(1));
        AInfStructure::new(self.module.clone(), components)
            .expect("a degree-checked dga is degree homogeneous")
    }
}
