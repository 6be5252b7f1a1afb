//! Dense matrices over a coefficient ring context.
//!
//! `Matrix<RingSpec>` carries differentials over `R`, `Matrix<ResidueField>`
//! their reductions over `k`. Rank is only defined over a [`Field`]; elimination
//! over `R` pivots on units exclusively.

use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{CoeffRing, Field, Residue, ResidueField, RingElement, RingSpec};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<C: CoeffRing> {
    ring: C,
    rows: usize,
    cols: usize,
    data: Vec<C::Elem>,
}

impl<C: CoeffRing> fmt::Debug for Matrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl<C: CoeffRing> Matrix<C> {
    pub fn zeros(ring: C, rows: usize, cols: usize) -> Self {
        Matrix {
            ring,
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: C, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m[(i, i)] = ring.one();
        }
        m
    }

    pub fn from_vec(ring: C, rows: usize, cols: usize, data: Vec<C::Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { ring, rows, cols, data })
    }

    pub fn from_rows(ring: C, cols: usize, rows: Vec<Vec<C::Elem>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix {
            ring,
            rows: n,
            cols,
            data,
        })
    }

    pub fn from_fn(ring: C, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { ring, rows, cols, data }
    }

    pub fn ring(&self) -> C {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn entries(&self) -> &[C::Elem] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| self.ring.is_zero(x))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn map<D: CoeffRing>(&self, ring: D, mut f: impl FnMut(C::Elem) -> D::Elem) -> Matrix<D> {
        Matrix {
            ring,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ring, self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, c: C::Elem) -> Self {
        let ring = self.ring;
        self.map(ring, |x| ring.mul(c, x))
    }

    pub fn neg(&self) -> Self {
        let ring = self.ring;
        self.map(ring, |x| ring.neg(x))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::shape(format!(
                "cannot add {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let ring = self.ring;
        Ok(Matrix {
            ring,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| ring.add(x, y))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Ordinary product `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::shape(format!(
                "matrices over different rings: {:?} vs {:?}",
                self.ring, other.ring
            )));
        }
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ring = self.ring;
        let mut out = Self::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let x = self[(i, l)];
                if ring.is_zero(x) {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = ring.mul_add(out.data[idx], x, other[(l, j)]);
                }
            }
        }
        Ok(out)
    }

    /// `P · self · Q`.
    pub fn apply_basis_change(&self, p: &Self, q: &Self) -> Result<Self> {
        p.matmul(self)?.matmul(q)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C::Elem]) -> Result<Vec<C::Elem>> {
        if v.len() != self.cols {
            return Err(Error::shape(format!(
                "vector of length {} for a {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let ring = self.ring;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(ring.zero(), |acc, (&a, &x)| ring.mul_add(acc, a, x))
            })
            .collect())
    }

    /// Block diagonal `diag(self, other)`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        let mut out = Self::zeros(self.ring, r, c);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    /// Overwrite the block starting at `(row, col)` with `block`.
    pub fn set_block(&mut self, row: usize, col: usize, block: &Self) {
        assert!(row + block.rows <= self.rows && col + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)];
            }
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(self.ring, rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// Kronecker product `self ⊗ other`; row index `i·other.rows + k`.
    pub fn kronecker(&self, other: &Self) -> Self {
        let ring = self.ring;
        Self::from_fn(ring, self.rows * other.rows, self.cols * other.cols, |i, j| {
            ring.mul(
                self[(i / other.rows, j / other.cols)],
                other[(i % other.rows, j % other.cols)],
            )
        })
    }

    // Elementary operations. Each has an inverse of the same kind, so applying
    // them keeps a matrix in the same orbit under GL × GL.

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// `row_dst += c · row_src`
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, c: C::Elem) {
        let ring = self.ring;
        for k in 0..self.cols {
            let v = ring.mul_add(self[(dst, k)], c, self[(src, k)]);
            self[(dst, k)] = v;
        }
    }

    /// `col_dst += c · col_src`
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, c: C::Elem) {
        let ring = self.ring;
        for k in 0..self.rows {
            let v = ring.mul_add(self[(k, dst)], c, self[(k, src)]);
            self[(k, dst)] = v;
        }
    }

    pub fn scale_row(&mut self, i: usize, c: C::Elem) {
        let ring = self.ring;
        for k in 0..self.cols {
            self[(i, k)] = ring.mul(c, self[(i, k)]);
        }
    }

    pub fn scale_col(&mut self, j: usize, c: C::Elem) {
        let ring = self.ring;
        for k in 0..self.rows {
            self[(k, j)] = ring.mul(self[(k, j)], c);
        }
    }

    /// First unit entry in row-major order.
    pub fn find_unit_pivot(&self) -> Option<(usize, usize)> {
        self.find_unit_pivot_in(0, 0)
    }

    /// First unit entry in row-major order within rows `>= row0`, cols `>= col0`.
    pub fn find_unit_pivot_in(&self, row0: usize, col0: usize) -> Option<(usize, usize)> {
        (row0..self.rows)
            .flat_map(|i| (col0..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| self.ring.is_unit(self[(i, j)]))
    }
}

impl<C: CoeffRing> std::ops::Index<(usize, usize)> for Matrix<C> {
    type Output = C::Elem;

    fn index(&self, (i, j): (usize, usize)) -> &C::Elem {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<C: CoeffRing> std::ops::IndexMut<(usize, usize)> for Matrix<C> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C::Elem {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Field> Matrix<F> {
    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let ring = self.ring;
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(piv) = (rank..m.rows).find(|&i| !ring.is_zero(m[(i, col)])) else {
                continue;
            };
            m.swap_rows(rank, piv);
            let inv = ring.inverse(m[(rank, col)]).expect("nonzero in a field");
            m.scale_row(rank, inv);
            for i in rank + 1..m.rows {
                let c = m[(i, col)];
                if !ring.is_zero(c) {
                    m.add_row_multiple(i, rank, ring.neg(c));
                }
            }
            rank += 1;
        }
        rank
    }
}

impl Matrix<RingSpec> {
    /// Entrywise reduction mod `m`.
    pub fn residue(&self) -> Matrix<ResidueField> {
        let spec = self.ring;
        self.map(spec.residue_field(), |x| spec.residue(x))
    }

    /// For a matrix with every entry in `m`, the unique `B` over `k` with
    /// `self = r·B`.
    pub fn divide_by_r(&self) -> Result<Matrix<ResidueField>> {
        if let Some((i, j)) = self.find_unit_pivot() {
            return Err(Error::domain(format!("unit entry at ({i}, {j}) is not divisible by r")));
        }
        let spec = self.ring;
        Ok(self.map(spec.residue_field(), |x: RingElement| {
            spec.residue_field().element(x.b()).expect("b < p")
        }))
    }

    /// A square matrix over a local ring is invertible iff its residue is.
    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.residue().rank() == self.rows
    }

    /// Whether every entry lies in `m`.
    pub fn is_minimal(&self) -> bool {
        self.find_unit_pivot().is_none()
    }
}

impl Matrix<ResidueField> {
    /// Entrywise coefficient section `k → R`.
    pub fn lift(&self, spec: RingSpec) -> Matrix<RingSpec> {
        self.map(spec, |v: Residue| spec.lift(v))
    }

    /// `r · lift(self)`.
    pub fn times_r(&self, spec: RingSpec) -> Matrix<RingSpec> {
        self.map(spec, |v: Residue| spec.times_r(v))
    }
}

/// Normal form `P · A · Q = diag(1,…,1, r,…,r, 0,…)` of a matrix over `R`.
///
/// Unit pivots are cleared first; the remaining block is `r·B` and is reduced by
/// Gaussian elimination of `B` over `k`, lifted back to `R`. All operations are
/// invertible over `R`, and the inverses of the transforms are tracked.
#[derive(Debug, Clone)]
pub struct LocalSmithForm {
    pub p: Matrix<RingSpec>,
    pub p_inv: Matrix<RingSpec>,
    pub q: Matrix<RingSpec>,
    pub q_inv: Matrix<RingSpec>,
    pub diagonal: Matrix<RingSpec>,
    /// Number of unit diagonal entries.
    pub units: usize,
    /// Number of diagonal entries equal to `r`.
    pub r_entries: usize,
}

impl LocalSmithForm {
    pub fn compute(a: &Matrix<RingSpec>) -> Self {
        let spec = a.ring();
        let (m, n) = a.shape();
        let mut d = a.clone();
        let mut p = Matrix::identity(spec, m);
        let mut p_inv = Matrix::identity(spec, m);
        let mut q = Matrix::identity(spec, n);
        let mut q_inv = Matrix::identity(spec, n);

        // Row op E on d: d ← E d, p ← E p, p_inv ← p_inv E⁻¹.
        // Column op F on d: d ← d F, q ← q F, q_inv ← F⁻¹ q_inv.
        let mut step = 0;
        let pivot_loop = |d: &mut Matrix<RingSpec>,
                          p: &mut Matrix<RingSpec>,
                          p_inv: &mut Matrix<RingSpec>,
                          q: &mut Matrix<RingSpec>,
                          q_inv: &mut Matrix<RingSpec>,
                          s: usize,
                          (pi, pj): (usize, usize)| {
            d.swap_rows(s, pi);
            p.swap_rows(s, pi);
            p_inv.swap_cols(s, pi);
            d.swap_cols(s, pj);
            q.swap_cols(s, pj);
            q_inv.swap_rows(s, pj);
            let piv = d[(s, s)];
            let inv = spec.inverse(piv).expect("pivot is a unit");
            d.scale_row(s, inv);
            p.scale_row(s, inv);
            p_inv.scale_col(s, piv);
            for i in 0..d.rows() {
                if i == s {
                    continue;
                }
                let c = d[(i, s)];
                if !spec.is_zero(c) {
                    let neg = spec.neg(c);
                    d.add_row_multiple(i, s, neg);
                    p.add_row_multiple(i, s, neg);
                    p_inv.add_col_multiple(s, i, c);
                }
            }
            for j in 0..d.cols() {
                if j == s {
                    continue;
                }
                let c = d[(s, j)];
                if !spec.is_zero(c) {
                    let neg = spec.neg(c);
                    d.add_col_multiple(j, s, neg);
                    q.add_col_multiple(j, s, neg);
                    q_inv.add_row_multiple(s, j, c);
                }
            }
        };

        while let Some(pos) = d.find_unit_pivot_in(step, step) {
            pivot_loop(&mut d, &mut p, &mut p_inv, &mut q, &mut q_inv, step, pos);
            step += 1;
        }
        let units = step;

        // Remaining block is r·B. Pivot on entries r·c with c a unit in k:
        // scaling by lift(c)⁻¹ turns the pivot into r, and r·x only depends on
        // the residue of x, so elimination mirrors Gaussian elimination of B.
        loop {
            let found = (step..m)
                .flat_map(|i| (step..n).map(move |j| (i, j)))
                .find(|&(i, j)| !spec.is_zero(d[(i, j)]));
            let Some((pi, pj)) = found else { break };
            d.swap_rows(step, pi);
            p.swap_rows(step, pi);
            p_inv.swap_cols(step, pi);
            d.swap_cols(step, pj);
            q.swap_cols(step, pj);
            q_inv.swap_rows(step, pj);
            let c = spec.lift(spec.residue_field().element(d[(step, step)].b()).unwrap());
            let c_inv = spec.inverse(c).expect("nonzero residue");
            d.scale_row(step, c_inv);
            p.scale_row(step, c_inv);
            p_inv.scale_col(step, c);
            for i in step + 1..m {
                let b = d[(i, step)].b();
                if b != 0 {
                    let lam = spec.lift(spec.residue_field().element(b).unwrap());
                    d.add_row_multiple(i, step, spec.neg(lam));
                    p.add_row_multiple(i, step, spec.neg(lam));
                    p_inv.add_col_multiple(step, i, lam);
                }
            }
            for j in step + 1..n {
                let b = d[(step, j)].b();
                if b != 0 {
                    let lam = spec.lift(spec.residue_field().element(b).unwrap());
                    d.add_col_multiple(j, step, spec.neg(lam));
                    q.add_col_multiple(j, step, spec.neg(lam));
                    q_inv.add_row_multiple(step, j, lam);
                }
            }
            step += 1;
        }

        LocalSmithForm {
            p,
            p_inv,
            q,
            q_inv,
            diagonal: d,
            units,
            r_entries: step - units,
        }
    }

    /// Columns of `q` spanning the part of the source killed outright, i.e. the
    /// free summand `R^(n - units - r_entries)` of the kernel.
    pub fn free_kernel_columns(&self) -> std::ops::Range<usize> {
        self.units + self.r_entries..self.q.cols()
    }
}
