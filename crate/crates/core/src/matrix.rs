//! Hermitian operators in an explicit (computational) basis.
//!
//! Storage is either a dense `nalgebra` matrix or a compressed-row sparse
//! matrix, over `f64` when every entry is real and `Complex64` otherwise.
//! Complex input whose imaginary parts are all exactly zero is demoted to
//! real storage on construction.

use std::fmt::Debug;

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Entrywise Hermiticity tolerance applied when a matrix is constructed.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Field of matrix entries: `f64` or `Complex64`.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync + Debug + 'static {
    fn to_c64(self) -> C64;
    fn from_c64_lossy(z: C64) -> Self;
    fn is_exact_zero(self) -> bool;
}

impl Scalar for f64 {
    #[inline]
    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
    #[inline]
    fn from_c64_lossy(z: C64) -> Self {
        z.re
    }
    #[inline]
    fn is_exact_zero(self) -> bool {
        self == 0.0
    }
}

impl Scalar for C64 {
    #[inline]
    fn to_c64(self) -> C64 {
        self
    }
    #[inline]
    fn from_c64_lossy(z: C64) -> Self {
        z
    }
    #[inline]
    fn is_exact_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

/// Compressed sparse row matrix. Never stores exact zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Scalar> Csr<T> {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// entries that sum to exactly zero are dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        triplets.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<T> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        let mut iter = triplets.into_iter().peekable();
        while let Some((i, j, mut v)) = iter.next() {
            while let Some(&(i2, j2, v2)) = iter.peek() {
                if i2 == i && j2 == j {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            if !v.is_exact_zero() {
                rows.push(i);
                cols.push(j);
                vals.push(v);
            }
        }
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Csr {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.vals[range].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[range.clone()].binary_search(&j) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    pub fn matvec_c64(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k].to_c64() * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Op<T: Scalar> {
    Dense(DMatrix<T>),
    Sparse(Csr<T>),
}

impl<T: Scalar> Op<T> {
    pub fn dim(&self) -> usize {
        match self {
            Op::Dense(m) => m.nrows(),
            Op::Sparse(s) => s.dim(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        match self {
            Op::Dense(m) => m[(i, j)],
            Op::Sparse(s) => s.get(i, j),
        }
    }

    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        match self {
            Op::Dense(m) => {
                let n = m.nrows();
                for (i, yi) in y.iter_mut().enumerate().take(n) {
                    let mut acc = T::zero();
                    for (j, xj) in x.iter().enumerate().take(n) {
                        acc += m[(i, j)] * *xj;
                    }
                    *yi = acc;
                }
            }
            Op::Sparse(s) => s.matvec(x, y),
        }
    }

    pub fn matvec_c64(&self, x: &[C64], y: &mut [C64]) {
        match self {
            Op::Dense(m) => {
                let n = m.nrows();
                for (i, yi) in y.iter_mut().enumerate().take(n) {
                    let mut acc = C64::new(0.0, 0.0);
                    for (j, xj) in x.iter().enumerate().take(n) {
                        acc += m[(i, j)].to_c64() * *xj;
                    }
                    *yi = acc;
                }
            }
            Op::Sparse(s) => s.matvec_c64(x, y),
        }
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        match self {
            Op::Dense(m) => m.clone(),
            Op::Sparse(s) => s.to_dense(),
        }
    }

    /// Stored entries (all entries for dense storage, including zeros).
    fn for_each(&self, mut f: impl FnMut(usize, usize, T)) {
        match self {
            Op::Dense(m) => {
                for j in 0..m.ncols() {
                    for i in 0..m.nrows() {
                        f(i, j, m[(i, j)]);
                    }
                }
            }
            Op::Sparse(s) => s.iter().for_each(|(i, j, v)| f(i, j, v)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Entries {
    Real(Op<f64>),
    Complex(Op<C64>),
}

/// A Hermitian operator with optional computational-basis labels.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    entries: Entries,
    labels: Option<Vec<u64>>,
}

impl HermitianMatrix {
    pub fn from_real_dense(m: DMatrix<f64>) -> Result<Self> {
        check_square(m.nrows(), m.ncols())?;
        let h = HermitianMatrix {
            entries: Entries::Real(Op::Dense(m)),
            labels: None,
        };
        h.ensure_hermitian()?;
        Ok(h)
    }

    pub fn from_complex_dense(m: DMatrix<C64>) -> Result<Self> {
        check_square(m.nrows(), m.ncols())?;
        let entries = if m.iter().all(|z| z.im == 0.0) {
            Entries::Real(Op::Dense(m.map(|z| z.re)))
        } else {
            Entries::Complex(Op::Dense(m))
        };
        let h = HermitianMatrix {
            entries,
            labels: None,
        };
        h.ensure_hermitian()?;
        Ok(h)
    }

    pub fn from_real_triplets(dim: usize, triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        let h = HermitianMatrix {
            entries: Entries::Real(Op::Sparse(Csr::from_triplets(dim, triplets))),
            labels: None,
        };
        h.ensure_hermitian()?;
        Ok(h)
    }

    pub fn from_complex_triplets(dim: usize, triplets: Vec<(usize, usize, C64)>) -> Result<Self> {
        let entries = if triplets.iter().all(|t| t.2.im == 0.0) {
            Entries::Real(Op::Sparse(Csr::from_triplets(
                dim,
                triplets.into_iter().map(|(i, j, z)| (i, j, z.re)).collect(),
            )))
        } else {
            Entries::Complex(Op::Sparse(Csr::from_triplets(dim, triplets)))
        };
        let h = HermitianMatrix {
            entries,
            labels: None,
        };
        h.ensure_hermitian()?;
        Ok(h)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        HermitianMatrix {
            entries: Entries::Real(Op::Dense(DMatrix::from_diagonal(
                &nalgebra::DVector::from_column_slice(diag),
            ))),
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "{} basis labels for dimension {}",
                labels.len(),
                self.dim()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[u64]> {
        self.labels.as_deref()
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        match &self.entries {
            Entries::Real(op) => op.dim(),
            Entries::Complex(op) => op.dim(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self.entries, Entries::Real(_))
    }

    pub fn is_dense(&self) -> bool {
        matches!(
            self.entries,
            Entries::Real(Op::Dense(_)) | Entries::Complex(Op::Dense(_))
        )
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match &self.entries {
            Entries::Real(op) => C64::new(op.get(i, j), 0.0),
            Entries::Complex(op) => op.get(i, j),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Calls `f(i, j, H_ij)` for every nonzero entry.
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, C64)) {
        match &self.entries {
            Entries::Real(op) => op.for_each(|i, j, v| {
                if v != 0.0 {
                    f(i, j, C64::new(v, 0.0))
                }
            }),
            Entries::Complex(op) => op.for_each(|i, j, v| {
                if !v.is_exact_zero() {
                    f(i, j, v)
                }
            }),
        }
    }

    /// Calls `f(i, j, H_ij)` for every nonzero entry with `i != j`.
    pub fn for_each_offdiag(&self, mut f: impl FnMut(usize, usize, C64)) {
        match &self.entries {
            Entries::Real(op) => op.for_each(|i, j, v| {
                if i != j && v != 0.0 {
                    f(i, j, C64::new(v, 0.0))
                }
            }),
            Entries::Complex(op) => op.for_each(|i, j, v| {
                if i != j && !v.is_exact_zero() {
                    f(i, j, v)
                }
            }),
        }
    }

    /// Replaces every nonzero off-diagonal entry by `f(H_ij)`, keeping the
    /// diagonal, the storage layout and the sparsity pattern. The result is
    /// real; `f` must be symmetric in the sense `f(conj z) = f(z)`.
    pub fn map_offdiag_real(&self, f: impl Fn(C64) -> f64) -> HermitianMatrix {
        let entries = match &self.entries {
            Entries::Real(Op::Dense(m)) => Entries::Real(Op::Dense(DMatrix::from_fn(
                m.nrows(),
                m.ncols(),
                |i, j| {
                    let v = m[(i, j)];
                    if i == j || v == 0.0 {
                        v
                    } else {
                        f(C64::new(v, 0.0))
                    }
                },
            ))),
            Entries::Complex(Op::Dense(m)) => Entries::Real(Op::Dense(DMatrix::from_fn(
                m.nrows(),
                m.ncols(),
                |i, j| {
                    let v = m[(i, j)];
                    if i == j {
                        v.re
                    } else if v.is_exact_zero() {
                        0.0
                    } else {
                        f(v)
                    }
                },
            ))),
            Entries::Real(Op::Sparse(s)) => Entries::Real(Op::Sparse(map_csr(s, |i, j, v| {
                if i == j {
                    v
                } else {
                    f(C64::new(v, 0.0))
                }
            }))),
            Entries::Complex(Op::Sparse(s)) => Entries::Real(Op::Sparse(map_csr(s, |i, j, v| {
                if i == j {
                    v.re
                } else {
                    f(v)
                }
            }))),
        };
        HermitianMatrix {
            entries,
            labels: self.labels.clone(),
        }
    }

    /// Returns the real dense matrix, or `None` when any entry is complex.
    pub fn to_real_dense(&self) -> Option<DMatrix<f64>> {
        match &self.entries {
            Entries::Real(op) => Some(op.to_dense()),
            Entries::Complex(_) => None,
        }
    }

    pub fn to_complex_dense(&self) -> DMatrix<C64> {
        match &self.entries {
            Entries::Real(op) => op.to_dense().map(|v| C64::new(v, 0.0)),
            Entries::Complex(op) => op.to_dense(),
        }
    }

    /// Same operator in dense storage.
    pub fn densified(&self) -> HermitianMatrix {
        let entries = match &self.entries {
            Entries::Real(op) => Entries::Real(Op::Dense(op.to_dense())),
            Entries::Complex(op) => Entries::Complex(Op::Dense(op.to_dense())),
        };
        HermitianMatrix {
            entries,
            labels: self.labels.clone(),
        }
    }

    /// Same operator in sparse storage.
    pub fn sparsified(&self) -> HermitianMatrix {
        let entries = match &self.entries {
            Entries::Real(Op::Dense(m)) => Entries::Real(Op::Sparse(dense_to_csr(m))),
            Entries::Complex(Op::Dense(m)) => Entries::Complex(Op::Sparse(dense_to_csr(m))),
            other => other.clone(),
        };
        HermitianMatrix {
            entries,
            labels: self.labels.clone(),
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.entries {
            Entries::Real(Op::Sparse(s)) => s.nnz(),
            Entries::Complex(Op::Sparse(s)) => s.nnz(),
            Entries::Real(Op::Dense(m)) => m.iter().filter(|v| **v != 0.0).count(),
            Entries::Complex(Op::Dense(m)) => m.iter().filter(|v| !v.is_exact_zero()).count(),
        }
    }

    pub fn matvec_c64(&self, x: &[C64], y: &mut [C64]) {
        match &self.entries {
            Entries::Real(op) => op.matvec_c64(x, y),
            Entries::Complex(op) => op.matvec_c64(x, y),
        }
    }

    /// Largest entrywise deviation `max |H_ij - conj(H_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        match &self.entries {
            Entries::Real(op) => op.for_each(|i, j, v| {
                worst = worst.max((v - op.get(j, i)).abs());
            }),
            Entries::Complex(op) => op.for_each(|i, j, v| {
                worst = worst.max((v - op.get(j, i).conj()).norm());
            }),
        }
        worst
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0f64; self.dim()];
        match &self.entries {
            Entries::Real(op) => op.for_each(|i, _, v| rows[i] += v.abs()),
            Entries::Complex(op) => op.for_each(|i, _, v| rows[i] += v.norm()),
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Largest off-diagonal entry modulus.
    pub fn max_offdiag_abs(&self) -> f64 {
        let mut m = 0.0f64;
        self.for_each_offdiag(|_, _, v| m = m.max(v.norm()));
        m
    }

    /// `Σ_i c_i M_i`; dense only when every input is dense.
    pub fn linear_combination(terms: &[(f64, &HermitianMatrix)]) -> Result<HermitianMatrix> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?;
        let dim = first.dim();
        if terms.iter().any(|(_, m)| m.dim() != dim) {
            return Err(Error::InvalidArgument("dimension mismatch".into()));
        }
        let all_dense = terms.iter().all(|(_, m)| m.is_dense());
        let all_real = terms.iter().all(|(_, m)| m.is_real());
        let labels = first.labels.clone();
        let entries = if all_real {
            if all_dense {
                let mut acc = DMatrix::<f64>::zeros(dim, dim);
                for (c, m) in terms {
                    acc += m.to_real_dense().unwrap() * *c;
                }
                Entries::Real(Op::Dense(acc))
            } else {
                let mut trips = Vec::new();
                for (c, m) in terms {
                    if let Entries::Real(op) = &m.entries {
                        collect_nonzero(op, *c, &mut trips);
                    }
                }
                Entries::Real(Op::Sparse(Csr::from_triplets(dim, trips)))
            }
        } else if all_dense {
            let mut acc = DMatrix::<C64>::zeros(dim, dim);
            for (c, m) in terms {
                acc += m.to_complex_dense() * C64::new(*c, 0.0);
            }
            Entries::Complex(Op::Dense(acc))
        } else {
            let mut trips = Vec::new();
            for (c, m) in terms {
                match &m.entries {
                    Entries::Real(op) => {
                        let mut t = Vec::new();
                        collect_nonzero(op, *c, &mut t);
                        trips.extend(t.into_iter().map(|(i, j, v)| (i, j, C64::new(v, 0.0))));
                    }
                    Entries::Complex(op) => collect_nonzero(op, C64::new(*c, 0.0), &mut trips),
                }
            }
            Entries::Complex(Op::Sparse(Csr::from_triplets(dim, trips)))
        };
        Ok(HermitianMatrix { entries, labels })
    }

    fn ensure_hermitian(&self) -> Result<()> {
        let defect = self.hermitian_defect();
        let diag_imag = match &self.entries {
            Entries::Real(_) => 0.0,
            Entries::Complex(op) => (0..op.dim())
                .map(|i| op.get(i, i).im.abs())
                .fold(0.0, f64::max),
        };
        if defect > HERMITIAN_TOL || diag_imag > HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!(
                "matrix is not Hermitian (defect {:e})",
                defect.max(diag_imag)
            )));
        }
        Ok(())
    }
}

/// Hermitian matrices on one shared sparsity pattern, combined as
/// `Σ_k w_k M_k` for real weights without re-sorting.
#[derive(Clone, Debug)]
pub struct SparseFamily {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Vec<C64>>,
    real: bool,
    labels: Option<Vec<u64>>,
}

impl SparseFamily {
    pub fn new(parts: &[&HermitianMatrix]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty matrix family".into()))?;
        let dim = first.dim();
        if parts.iter().any(|m| m.dim() != dim) {
            return Err(Error::InvalidArgument("dimension mismatch".into()));
        }
        let mut trips: Vec<(usize, usize, usize, C64)> = Vec::new();
        for (k, m) in parts.iter().enumerate() {
            m.for_each_entry(|i, j, v| trips.push((i, j, k, v)));
        }
        trips.sort_unstable_by_key(|&(i, j, _, _)| (i, j));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::new();
        let mut vals = vec![Vec::new(); parts.len()];
        let mut last = None;
        for (i, j, k, v) in trips {
            if last != Some((i, j)) {
                last = Some((i, j));
                row_ptr[i + 1] += 1;
                cols.push(j);
                for col in vals.iter_mut() {
                    col.push(C64::new(0.0, 0.0));
                }
            }
            let idx = cols.len() - 1;
            vals[k][idx] += v;
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(SparseFamily {
            dim,
            row_ptr,
            cols,
            real: parts.iter().all(|m| m.is_real()),
            vals,
            labels: first.labels.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// `Σ_k w_k M_k` in sparse storage.
    pub fn combine(&self, weights: &[f64]) -> HermitianMatrix {
        assert_eq!(weights.len(), self.vals.len(), "one weight per family member");
        let value = |idx: usize| -> C64 {
            self.vals
                .iter()
                .zip(weights)
                .filter(|(_, w)| **w != 0.0)
                .fold(C64::new(0.0, 0.0), |acc, (v, w)| acc + v[idx] * *w)
        };
        let entries = if self.real {
            Entries::Real(Op::Sparse(self.collect(|idx| value(idx).re)))
        } else {
            Entries::Complex(Op::Sparse(self.collect(value)))
        };
        HermitianMatrix {
            entries,
            labels: self.labels.clone(),
        }
    }

    fn collect<T: Scalar>(&self, value: impl Fn(usize) -> T) -> Csr<T> {
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.cols.len());
        for i in 0..self.dim {
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                let v = value(idx);
                if !v.is_exact_zero() {
                    cols.push(self.cols[idx]);
                    vals.push(v);
                }
            }
            row_ptr[i + 1] = cols.len();
        }
        Csr {
            dim: self.dim,
            row_ptr,
            cols,
            vals,
        }
    }
}

/// True iff every off-diagonal entry has `|Im| <= tol` and `Re <= tol`.
pub fn is_stoquastic(m: &HermitianMatrix, tol: f64) -> bool {
    let mut ok = true;
    m.for_each_offdiag(|_, _, v| {
        if v.im.abs() > tol || v.re > tol {
            ok = false;
        }
    });
    ok
}

fn check_square(r: usize, c: usize) -> Result<()> {
    if r != c || r == 0 {
        return Err(Error::InvalidArgument(format!(
            "expected a non-empty square matrix, got {r}x{c}"
        )));
    }
    Ok(())
}

fn map_csr<T: Scalar>(s: &Csr<T>, f: impl Fn(usize, usize, T) -> f64) -> Csr<f64> {
    Csr::from_triplets(s.dim(), s.iter().map(|(i, j, v)| (i, j, f(i, j, v))).collect())
}

fn dense_to_csr<T: Scalar>(m: &DMatrix<T>) -> Csr<T> {
    let mut trips = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if !v.is_exact_zero() {
                trips.push((i, j, v));
            }
        }
    }
    Csr::from_triplets(m.nrows(), trips)
}

fn collect_nonzero<T: Scalar>(op: &Op<T>, c: T, out: &mut Vec<(usize, usize, T)>) {
    op.for_each(|i, j, v| {
        if !v.is_exact_zero() {
            out.push((i, j, c * v))
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> HermitianMatrix {
        let n = rows.len();
        HermitianMatrix::from_real_dense(DMatrix::from_fn(n, n, |i, j| rows[i][j])).unwrap()
    }

    #[test]
    fn stoquastic_examples() {
        assert!(is_stoquastic(&real(&[&[0.0, -1.0], &[-1.0, 0.0]]), 0.0));
        assert!(!is_stoquastic(&real(&[&[0.0, 1.0], &[1.0, 0.0]]), 0.0));
        assert!(is_stoquastic(&HermitianMatrix::from_diagonal(&[3.0, -2.0]), 0.0));
    }

    #[test]
    fn complex_offdiag_is_not_stoquastic() {
        let i = C64::new(0.0, 1.0);
        let z = C64::new(0.0, 0.0);
        let m = HermitianMatrix::from_complex_dense(DMatrix::from_row_slice(2, 2, &[z, i, -i, z]))
            .unwrap();
        assert!(!m.is_real());
        assert!(!is_stoquastic(&m, 1e-12));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(HermitianMatrix::from_real_dense(m).is_err());
    }

    #[test]
    fn csr_drops_cancelling_entries() {
        let s = Csr::from_triplets(2, vec![(0, 1, 1.0), (0, 1, -1.0), (1, 0, 0.0), (1, 1, 2.0)]);
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.get(1, 1), 2.0);
        assert_eq!(s.get(0, 1), 0.0);
    }

    #[test]
    fn sparse_dense_roundtrip_and_matvec() {
        let m = real(&[&[1.0, 2.0, 0.0], &[2.0, 0.0, -1.0], &[0.0, -1.0, 3.0]]);
        let s = m.sparsified();
        assert!(!s.is_dense());
        assert_eq!(s.nnz(), 6);
        assert_eq!(s.densified(), m);
        let x = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(2.0, 0.0)];
        let mut y1 = [C64::new(0.0, 0.0); 3];
        let mut y2 = y1;
        m.matvec_c64(&x, &mut y1);
        s.matvec_c64(&x, &mut y2);
        assert_eq!(y1, y2);
        assert_eq!(y1[0], C64::new(1.0, 2.0));
    }

    #[test]
    fn linear_combination_mixes_storage() {
        let a = real(&[&[1.0, 1.0], &[1.0, 0.0]]);
        let b = HermitianMatrix::from_diagonal(&[0.0, 2.0]).sparsified();
        let c = HermitianMatrix::linear_combination(&[(2.0, &a), (0.5, &b)]).unwrap();
        assert!(!c.is_dense());
        assert_eq!(c.to_real_dense().unwrap(), DMatrix::from_row_slice(2, 2, &[2.0, 2.0, 2.0, 1.0]));
    }
}
