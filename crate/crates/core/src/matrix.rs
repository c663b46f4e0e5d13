//! Dense matrices over the supported rings, with elimination routines that
//! stay inside the ring (valuation pivoting over `Z_(p)`).

use crate::coeff::{Ring, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(ring: Ring, rows: usize, cols: usize) -> Self {
        Matrix {
            ring,
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_columns(ring: Ring, rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(ring, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let columns: Vec<_> = cols.iter().map(|&j| self.column(j)).collect();
        Matrix::from_columns(self.ring, self.rows, &columns)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.ring, rows.len(), self.cols);
        for (a, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                m.set(a, j, self.get(i, j).clone());
            }
        }
        m
    }

    /// Horizontal concatenation.
    pub fn hstack(ring: Ring, rows: usize, blocks: &[&Matrix]) -> Matrix {
        let mut columns = Vec::new();
        for b in blocks {
            assert_eq!(b.rows, rows);
            for j in 0..b.cols {
                columns.push(b.column(j));
            }
        }
        Matrix::from_columns(ring, rows, &columns)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = Matrix::zeros(self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.ring.zero();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        acc += &(self.get(i, j) * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// `row[target] -= factor * row[source]`
    fn row_axpy(&mut self, target: usize, source: usize, factor: &Scalar) {
        for j in 0..self.cols {
            let s = self.get(source, j);
            if !s.is_zero() {
                let v = self.get(target, j) - &(factor * s);
                self.set(target, j, v);
            }
        }
    }

    /// `col[target] -= factor * col[source]`
    fn col_axpy(&mut self, target: usize, source: usize, factor: &Scalar) {
        for i in 0..self.rows {
            let s = self.get(i, source);
            if !s.is_zero() {
                let v = self.get(i, target) - &(factor * s);
                self.set(i, target, v);
            }
        }
    }

    fn scale_row(&mut self, i: usize, factor: &Scalar) {
        for j in 0..self.cols {
            let v = self.get(i, j) * factor;
            self.set(i, j, v);
        }
    }

    /// Inverse over the ring itself; `None` when the determinant is not a unit.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(self.ring, n);
        for col in 0..n {
            let pivot = (col..n)
                .filter(|&i| a.get(i, col).is_unit())
                .min_by_key(|&i| (a.get(i, col).pivot_rank(), i))?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let s = a.get(col, col).inv().ok()?;
            a.scale_row(col, &s);
            inv.scale_row(col, &s);
            for i in 0..n {
                if i != col && !a.get(i, col).is_zero() {
                    let f = a.get(i, col).clone();
                    a.row_axpy(i, col, &f);
                    inv.row_axpy(i, col, &f);
                }
            }
        }
        Some(inv)
    }

    /// Returns `P` invertible with `P * self = [I; 0]`, pivoting only on
    /// units (first eligible row). `None` when the columns do not extend to
    /// a basis, i.e. the column span is not a direct summand.
    pub fn left_reduce_to_identity(&self) -> Option<Matrix> {
        let rows = self.rows;
        let mut a = self.clone();
        let mut p = Matrix::identity(self.ring, rows);
        for col in 0..self.cols {
            let pivot = (col..rows).find(|&i| a.get(i, col).is_unit())?;
            a.swap_rows(col, pivot);
            p.swap_rows(col, pivot);
            let s = a.get(col, col).inv().ok()?;
            a.scale_row(col, &s);
            p.scale_row(col, &s);
            for i in 0..rows {
                if i != col && !a.get(i, col).is_zero() {
                    let f = a.get(i, col).clone();
                    a.row_axpy(i, col, &f);
                    p.row_axpy(i, col, &f);
                }
            }
        }
        Some(p)
    }

    /// Unimodular column reduction. Returns `(q, pivots, kernel)` where the
    /// columns of `q` form a basis of the source, `self * q` vanishes on the
    /// `kernel` columns and is injective on the span of the `pivots` columns.
    ///
    /// Pivots are minimal-valuation entries, ties broken by position, so
    /// every elimination factor stays inside the ring.
    pub fn column_reduce(&self) -> (Matrix, Vec<usize>, Vec<usize>) {
        let mut a = self.clone();
        let mut q = Matrix::identity(self.ring, self.cols);
        let mut open_cols: Vec<usize> = (0..self.cols).collect();
        let mut open_rows: Vec<usize> = (0..self.rows).collect();
        let mut pivots = Vec::new();
        loop {
            let mut best: Option<(u32, usize, usize)> = None;
            for &i in &open_rows {
                for &j in &open_cols {
                    let rank = a.get(i, j).pivot_rank();
                    if rank != u32::MAX && best.is_none_or(|(r, _, _)| rank < r) {
                        best = Some((rank, i, j));
                    }
                }
            }
            let Some((_, pi, pj)) = best else { break };
            let pivot = a.get(pi, pj).clone();
            for &j in &open_cols {
                if j != pj && !a.get(pi, j).is_zero() {
                    let f = divide_exact(a.get(pi, j), &pivot);
                    a.col_axpy(j, pj, &f);
                    q.col_axpy(j, pj, &f);
                }
            }
            open_cols.retain(|&j| j != pj);
            open_rows.retain(|&i| i != pi);
            pivots.push(pj);
        }
        pivots.sort_unstable();
        (q, pivots, open_cols)
    }

    /// Rank over the fraction field (plain Gaussian elimination).
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&i| !a.get(i, col).is_zero()) else {
                continue;
            };
            a.swap_rows(rank, p);
            for i in rank + 1..self.rows {
                if !a.get(i, col).is_zero() {
                    // cross-multiplication keeps everything in the ring
                    let top = a.get(rank, col).clone();
                    let below = a.get(i, col).clone();
                    a.scale_row(i, &top);
                    a.row_axpy(i, rank, &below);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// `a / b` for `b | a` in the ring (guaranteed by valuation pivoting).
fn divide_exact(a: &Scalar, b: &Scalar) -> Scalar {
    a.try_div(b).expect("pivot divides every entry of its row")
}
