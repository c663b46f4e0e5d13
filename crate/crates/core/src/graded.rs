//! Free graded modules, graded linear maps, chain complexes and homotopy
//! retractions onto homology.
//!
//! Grading is homological: differentials have degree −1. Cochain data is
//! encoded in nonpositive degrees.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::coeff::{Ring, Scalar};
use crate::matrix::Matrix;
use crate::sparse::Vector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradedError {
    #[error("duplicate basis name {0:?}")]
    DuplicateName(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("entry {from} -> {to} does not respect degree {degree}")]
    DegreeViolation {
        from: String,
        to: String,
        degree: i64,
    },
    #[error("differential does not square to zero")]
    NotAComplex,
    #[error("homology is not free in degree {degree} (torsion in the cokernel of the boundary map)")]
    NonFreeHomology { degree: i64 },
    #[error("linear map is not invertible in degree {degree}")]
    NotInvertible { degree: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

/// A finitely generated free graded module with a named, ordered basis.
#[derive(Debug, Clone)]
pub struct GradedModule {
    ring: Ring,
    basis: Vec<Generator>,
    index: HashMap<String, usize>,
}

impl PartialEq for GradedModule {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.basis == other.basis
    }
}

impl Eq for GradedModule {}

impl GradedModule {
    pub fn new(ring: Ring, basis: Vec<Generator>) -> Result<Self, GradedError> {
        let mut index = HashMap::new();
        for (i, g) in basis.iter().enumerate() {
            if index.insert(g.name.clone(), i).is_some() {
                return Err(GradedError::DuplicateName(g.name.clone()));
            }
        }
        Ok(GradedModule { ring, basis, index })
    }

    /// Convenience constructor from `(name, degree)` pairs.
    pub fn from_pairs(ring: Ring, pairs: &[(&str, i64)]) -> Result<Self, GradedError> {
        Self::new(
            ring,
            pairs
                .iter()
                .map(|(n, d)| Generator {
                    name: n.to_string(),
                    degree: *d,
                })
                .collect(),
        )
    }

    pub fn zero(ring: Ring) -> Self {
        GradedModule {
            ring,
            basis: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Generator] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.basis.iter().map(|g| g.degree).collect()
    }

    /// Basis indices in degree `n`, in basis order.
    pub fn in_degree(&self, n: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degree(i) == n).collect()
    }

    pub fn occupied_degrees(&self) -> BTreeSet<i64> {
        self.basis.iter().map(|g| g.degree).collect()
    }

    pub fn rank_in_degree(&self, n: i64) -> usize {
        self.basis.iter().filter(|g| g.degree == n).count()
    }

    /// Degree of a homogeneous vector (`None` for zero or inhomogeneous).
    pub fn degree_of(&self, v: &Vector) -> Option<i64> {
        let mut degs = v.iter().map(|(i, _)| self.degree(i));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn format_vector(&self, v: &Vector) -> String {
        if v.is_zero() {
            return "0".to_string();
        }
        v.iter()
            .map(|(i, c)| {
                if c.is_one() {
                    self.name(i).to_string()
                } else {
                    format!("{c}*{}", self.name(i))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A homogeneous linear map, stored column-wise (image of each source
/// basis element).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMap {
    source: Arc<GradedModule>,
    target: Arc<GradedModule>,
    degree: i64,
    columns: Vec<Vector>,
}

impl GradedMap {
    pub fn new(
        source: Arc<GradedModule>,
        target: Arc<GradedModule>,
        degree: i64,
        columns: Vec<Vector>,
    ) -> Result<Self, GradedError> {
        if columns.len() != source.dim() {
            return Err(GradedError::Shape(format!(
                "{} columns for a source of rank {}",
                columns.len(),
                source.dim()
            )));
        }
        for (j, col) in columns.iter().enumerate() {
            for (i, c) in col.iter() {
                if i >= target.dim() {
                    return Err(GradedError::Shape(format!("row index {i} out of range")));
                }
                if c.ring() != source.ring() || target.ring() != source.ring() {
                    return Err(GradedError::Shape("ring mismatch".into()));
                }
                if target.degree(i) != source.degree(j) + degree {
                    return Err(GradedError::DegreeViolation {
                        from: source.name(j).to_string(),
                        to: target.name(i).to_string(),
                        degree,
                    });
                }
            }
        }
        Ok(GradedMap {
            source,
            target,
            degree,
            columns,
        })
    }

    /// Builds a map from `(source index, target index, coefficient)` triples.
    pub fn from_entries(
        source: Arc<GradedModule>,
        target: Arc<GradedModule>,
        degree: i64,
        entries: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self, GradedError> {
        let mut columns = vec![Vector::new(); source.dim()];
        for (j, i, c) in entries {
            if j >= source.dim() {
                return Err(GradedError::Shape(format!("column index {j} out of range")));
            }
            columns[j].add_term(i, &c);
        }
        Self::new(source, target, degree, columns)
    }

    pub fn zero(source: Arc<GradedModule>, target: Arc<GradedModule>, degree: i64) -> Self {
        let columns = vec![Vector::new(); source.dim()];
        GradedMap {
            source,
            target,
            degree,
            columns,
        }
    }

    pub fn identity(module: Arc<GradedModule>) -> Self {
        let ring = module.ring();
        let columns = (0..module.dim()).map(|i| Vector::basis(i, ring)).collect();
        GradedMap {
            source: module.clone(),
            target: module,
            degree: 0,
            columns,
        }
    }

    /// Degree-zero diagonal map acting by `scale(degree)` on each generator.
    pub fn diagonal(
        module: Arc<GradedModule>,
        scale: impl Fn(i64) -> Scalar,
    ) -> Self {
        let columns = (0..module.dim())
            .map(|i| {
                let mut v = Vector::new();
                v.add_term(i, &scale(module.degree(i)));
                v
            })
            .collect();
        GradedMap {
            source: module.clone(),
            target: module,
            degree: 0,
            columns,
        }
    }

    pub fn source(&self) -> &Arc<GradedModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedModule> {
        &self.target
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn ring(&self) -> Ring {
        self.source.ring()
    }

    /// Image of the `j`-th source basis element.
    pub fn column(&self, j: usize) -> &Vector {
        &self.columns[j]
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (j, c) in v.iter() {
            out.add_scaled(&self.columns[j], c);
        }
        out
    }

    pub fn entry(&self, to: usize, from: usize) -> Scalar {
        self.columns[from]
            .get(to)
            .cloned()
            .unwrap_or_else(|| self.ring().zero())
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vector::is_zero)
    }

    /// `self ∘ inner` (apply `inner` first).
    pub fn compose(&self, inner: &GradedMap) -> Result<GradedMap, GradedError> {
        if *inner.target != *self.source {
            return Err(GradedError::Shape("composition across different modules".into()));
        }
        let columns = inner.columns.iter().map(|c| self.apply(c)).collect();
        Ok(GradedMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            degree: self.degree + inner.degree,
            columns,
        })
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap, GradedError> {
        if *self.source != *other.source
            || *self.target != *other.target
            || self.degree != other.degree
        {
            return Err(GradedError::Shape("sum of incompatible maps".into()));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.add_assign(b);
                c
            })
            .collect();
        Ok(GradedMap {
            columns,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &GradedMap) -> Result<GradedMap, GradedError> {
        self.add(&other.scale(&-self.ring().one()))
    }

    pub fn scale(&self, factor: &Scalar) -> GradedMap {
        GradedMap {
            columns: self.columns.iter().map(|c| c.scaled(factor)).collect(),
            ..self.clone()
        }
    }

    /// Dense block from source degree `n` to target degree `n + degree`.
    pub fn block(&self, n: i64) -> Matrix {
        let cols = self.source.in_degree(n);
        let rows = self.target.in_degree(n + self.degree);
        let mut m = Matrix::zeros(self.ring(), rows.len(), cols.len());
        for (b, &j) in cols.iter().enumerate() {
            for (a, &i) in rows.iter().enumerate() {
                if let Some(c) = self.columns[j].get(i) {
                    m.set(a, b, c.clone());
                }
            }
        }
        m
    }

    /// Inverse of a degree-zero map, computed blockwise over the ring.
    pub fn inverse(&self) -> Result<GradedMap, GradedError> {
        if self.degree != 0 || self.source.degrees() != self.target.degrees() {
            return Err(GradedError::Shape("only degree-0 endomorphism-shaped maps invert".into()));
        }
        let mut columns = vec![Vector::new(); self.target.dim()];
        for n in self.source.occupied_degrees() {
            let block = self.block(n);
            let inv = block.inverse().ok_or(GradedError::NotInvertible { degree: n })?;
            let src = self.target.in_degree(n);
            let tgt = self.source.in_degree(n);
            for (b, &j) in src.iter().enumerate() {
                for (a, &i) in tgt.iter().enumerate() {
                    columns[j].add_term(i, inv.get(a, b));
                }
            }
        }
        Ok(GradedMap {
            source: self.target.clone(),
            target: self.source.clone(),
            degree: 0,
            columns,
        })
    }
}

impl fmt::Display for GradedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, col) in self.columns.iter().enumerate() {
            if !col.is_zero() {
                writeln!(f, "  {} -> {}", self.source.name(j), self.target.format_vector(col))?;
            }
        }
        Ok(())
    }
}

/// A module with a degree −1 differential squaring to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    module: Arc<GradedModule>,
    d: GradedMap,
}

impl ChainComplex {
    pub fn new(d: GradedMap) -> Result<Self, GradedError> {
        if d.degree() != -1 || *d.source() != *d.target() {
            return Err(GradedError::Shape("differential must be a degree -1 endomorphism".into()));
        }
        if !d.compose(&d)?.is_zero() {
            return Err(GradedError::NotAComplex);
        }
        Ok(ChainComplex {
            module: d.source().clone(),
            d,
        })
    }

    pub fn with_zero_differential(module: Arc<GradedModule>) -> Self {
        let d = GradedMap::zero(module.clone(), module.clone(), -1);
        ChainComplex { module, d }
    }

    pub fn module(&self) -> &Arc<GradedModule> {
        &self.module
    }

    pub fn differential(&self) -> &GradedMap {
        &self.d
    }
}

/// Homotopy retraction `(i, p, h)` of a complex onto its homology.
#[derive(Debug, Clone)]
pub struct Retraction {
    pub complex: ChainComplex,
    pub homology: Arc<GradedModule>,
    pub i: GradedMap,
    pub p: GradedMap,
    pub h: GradedMap,
}

/// Result of [`verify_retraction`]; one flag per identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetractionReport {
    pub pi_is_identity: bool,
    pub homotopy_identity: bool,
    pub h_i_zero: bool,
    pub p_h_zero: bool,
    pub h_h_zero: bool,
}

impl RetractionReport {
    pub fn all_pass(&self) -> bool {
        self.pi_is_identity && self.homotopy_identity && self.h_i_zero && self.p_h_zero && self.h_h_zero
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (ok, name) in [
            (self.pi_is_identity, "p∘i = id"),
            (self.homotopy_identity, "dh + hd = id − ip"),
            (self.h_i_zero, "h∘i = 0"),
            (self.p_h_zero, "p∘h = 0"),
            (self.h_h_zero, "h∘h = 0"),
        ] {
            if !ok {
                out.push(name);
            }
        }
        out
    }
}

/// Checks all five retraction identities as literal matrix equalities.
pub fn verify_retraction(r: &Retraction) -> RetractionReport {
    let d = r.complex.differential();
    let module = r.complex.module().clone();
    let check = |lhs: Result<GradedMap, GradedError>, rhs: &GradedMap| -> bool {
        lhs.map(|m| m == *rhs).unwrap_or(false)
    };
    let id_h = GradedMap::identity(r.homology.clone());
    let pi = r.p.compose(&r.i);
    let homotopy = d
        .compose(&r.h)
        .and_then(|dh| dh.add(&r.h.compose(d)?));
    let id_minus_ip = r
        .i
        .compose(&r.p)
        .and_then(|ip| GradedMap::identity(module.clone()).sub(&ip));
    let homotopy_identity = match (homotopy, id_minus_ip) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    };
    let zero_hi = GradedMap::zero(r.homology.clone(), module.clone(), 1);
    let zero_ph = GradedMap::zero(module.clone(), r.homology.clone(), 1);
    let zero_hh = GradedMap::zero(module.clone(), module.clone(), 2);
    RetractionReport {
        pi_is_identity: check(pi, &id_h),
        homotopy_identity,
        h_i_zero: check(r.h.compose(&r.i), &zero_hi),
        p_h_zero: check(r.p.compose(&r.h), &zero_ph),
        h_h_zero: check(r.h.compose(&r.h), &zero_hh),
    }
}

fn column_vector(rows: &[usize], col: &[Scalar]) -> Vector {
    Vector::from_terms(rows.iter().zip(col).map(|(&i, c)| (i, c.clone())))
}

/// Per-degree splitting data: `cycles` in basis coordinates of `A_n`.
struct DegreeSplit {
    basis_idx: Vec<usize>,
    /// complement to the cycles, mapped injectively by `d`
    complement: Matrix,
    /// cycles basis
    kernel: Matrix,
}

/// Computes homology together with a retraction satisfying the side
/// conditions `hi = 0`, `ph = 0`, `hh = 0` by construction.
///
/// In each degree the module splits as `C_n ⊕ B_n ⊕ H_n`, with `d`
/// mapping `C_n` isomorphically onto `B_{n-1}`; `h` inverts that
/// isomorphism and vanishes on `C_n ⊕ H_n`.
pub fn homology_with_retraction(a: &ChainComplex) -> Result<Retraction, GradedError> {
    let module = a.module().clone();
    let ring = module.ring();
    let d = a.differential();
    let degrees: Vec<i64> = module.occupied_degrees().into_iter().collect();

    let mut splits: BTreeMap<i64, DegreeSplit> = BTreeMap::new();
    for &n in &degrees {
        let block = d.block(n);
        let basis_idx = module.in_degree(n);
        let (q, pivots, kernel) = block.column_reduce();
        splits.insert(
            n,
            DegreeSplit {
                basis_idx,
                complement: q.select_columns(&pivots),
                kernel: q.select_columns(&kernel),
            },
        );
    }

    let mut h_basis = Vec::new();
    let mut i_cols: Vec<Vector> = Vec::new();
    // (degree, rows of the inverse basis change that read off H and B coordinates)
    let mut p_rows: Vec<(i64, Vec<Vec<Scalar>>)> = Vec::new();
    let mut h_columns = vec![Vector::new(); module.dim()];

    for &n in &degrees {
        let split = &splits[&n];
        let dim_n = split.basis_idx.len();
        // boundaries b_j = d c_j for c_j in the complement one degree up
        let (boundaries, lifts_above) = match splits.get(&(n + 1)) {
            Some(up) => {
                let dblock = d.block(n + 1);
                (dblock.mul(&up.complement), Some(up))
            }
            None => (Matrix::zeros(ring, dim_n, 0), None),
        };
        let r = boundaries.cols();
        let z = split.kernel.cols();
        let c = split.complement.cols();

        // coordinates of the boundaries in the [complement | kernel] basis
        let q_full = Matrix::hstack(ring, dim_n, &[&split.complement, &split.kernel]);
        let q_inv = q_full.inverse().expect("column reduction is unimodular");
        let coords = q_inv.mul(&boundaries);
        let kernel_rows: Vec<usize> = (c..c + z).collect();
        let m = coords.select_rows(&kernel_rows);

        // row-reduce m to [I; 0] with unit pivots; failure means torsion
        let p_mat = m
            .left_reduce_to_identity().ok_or(GradedError::NonFreeHomology { degree: n })?;
        let p_inv = p_mat.inverse().expect("product of elementary operations");
        let cycle_basis = split.kernel.mul(&p_inv);
        let homology_lifts: Vec<usize> = (r..z).collect();
        let lifts = cycle_basis.select_columns(&homology_lifts);

        let full = Matrix::hstack(ring, dim_n, &[&split.complement, &boundaries, &lifts]);
        let full_inv = full
            .inverse()
            .ok_or(GradedError::NonFreeHomology { degree: n })?;

        for k in 0..lifts.cols() {
            let v = column_vector(&split.basis_idx, &lifts.column(k));
            let name = match v.iter().collect::<Vec<_>>().as_slice() {
                [(idx, coeff)] if coeff.is_one() => format!("[{}]", module.name(*idx)),
                _ => format!("h{n}_{k}"),
            };
            h_basis.push(crate::graded::Generator { name, degree: n });
            i_cols.push(v);
        }
        let h_rows: Vec<usize> = (c + r..c + r + lifts.cols()).collect();
        p_rows.push((n, (0..h_rows.len()).map(|k| {
            (0..dim_n).map(|j| full_inv.get(h_rows[k], j).clone()).collect()
        }).collect()));

        // h on A_n: read the B-coordinates, send b_j to c_j in degree n+1
        if let Some(up) = lifts_above {
            let up_idx = &splits[&(n + 1)].basis_idx;
            for (col_pos, &j) in split.basis_idx.iter().enumerate() {
                let mut image = Vector::new();
                for b in 0..r {
                    let coeff = full_inv.get(c + b, col_pos);
                    if !coeff.is_zero() {
                        let cvec = column_vector(up_idx, &up.complement.column(b));
                        image.add_scaled(&cvec, coeff);
                    }
                }
                h_columns[j] = image;
            }
        }
    }

    let homology = Arc::new(GradedModule::new(ring, h_basis)?);
    let i = GradedMap::new(homology.clone(), module.clone(), 0, i_cols)?;
    let mut p_columns = vec![Vector::new(); module.dim()];
    let mut offset = 0;
    for (n, rows) in &p_rows {
        let idx = &splits[n].basis_idx;
        for (k, row) in rows.iter().enumerate() {
            for (pos, coeff) in row.iter().enumerate() {
                p_columns[idx[pos]].add_term(offset + k, coeff);
            }
        }
        offset += rows.len();
    }
    let p = GradedMap::new(module.clone(), homology.clone(), 0, p_columns)?;
    let h = GradedMap::new(module.clone(), module, 1, h_columns)?;
    Ok(Retraction {
        complex: a.clone(),
        homology,
        i,
        p,
        h,
    })
}
