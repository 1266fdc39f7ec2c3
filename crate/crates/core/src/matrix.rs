//! Dense complex matrices, unit kets and rank-1 projectors.
//!
//! Everything here is plain row-major `Vec<Complex64>` storage with
//! double-precision scalars. Values are immutable after construction and all
//! operations are pure functions, so they can be called freely from multiple
//! threads.
//!
//! Determinism conventions (they matter for reproducible serialization):
//! * a [`StateVector`] is always unit norm, with the first component of
//!   largest modulus made real and nonnegative;
//! * eigensystems (see [`crate::eigen`]) order eigenvalues by angle in
//!   `[0, 2*pi)` and apply the same phase convention per eigenvector.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Default tolerance for all predicates; every predicate takes an explicit
/// `tol` so callers can override per call.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from a closure over `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in &rows {
            if r.len() != ncols {
                return Err(Error::DimensionMismatch(format!(
                    "ragged rows: expected {ncols} columns, got {}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: nrows, cols: ncols, data })
    }

    /// Real matrix shorthand, mostly for tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * v[j])
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let prod = self * &self.adjoint();
        prod.max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// Hermitian, idempotent, and (optionally) rank 1. Rank is read off the
    /// trace, which equals the rank for an exact projector.
    pub fn is_projector(&self, tol: f64, require_rank_one: bool) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        let sq = self * self;
        if sq.max_abs_diff(self) > tol {
            return false;
        }
        if require_rank_one {
            (self.trace() - Complex64::new(1.0, 0.0)).norm() <= tol
        } else {
            true
        }
    }

    /// Hermitian part `(m + m^H)/2`; useful to clean accumulated rounding
    /// before feeding a matrix to Hermitian-only routines.
    pub fn hermitian_part(&self) -> Self {
        debug_assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in +");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in -");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in *");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

/// Trace inner product `<a, b> = Tr(a b^H)`, conjugate-symmetric and linear
/// in the first argument.
pub fn trace_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    a.dim()?;
    b.dim()?;
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "trace_inner: {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    // Tr(a b^H) = sum_ij a_ij conj(b_ij)
    Ok(a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| x * y.conj())
        .sum())
}

/// The matrix-unit basis `E^(kl)` with a single 1 in cell `(k, l)`,
/// linearized as `alpha = k*n + l`. Pairwise orthonormal under
/// [`trace_inner`].
pub fn unit_cell_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            let mut m = ComplexMatrix::zeros(n, n);
            m.set(k, l, Complex64::new(1.0, 0.0));
            out.push(m);
        }
    }
    out
}

/// Kronecker product.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(ra * rb, ca * cb, |i, j| {
        a.get(i / rb, j / cb) * b.get(i % rb, j % cb)
    })
}

/// `m^p` by repeated squaring; `m^0 = Id`.
pub fn matrix_power(m: &ComplexMatrix, p: usize) -> Result<ComplexMatrix> {
    let n = m.dim()?;
    let mut result = ComplexMatrix::identity(n);
    let mut base = m.clone();
    let mut exp = p;
    while exp > 0 {
        if exp & 1 == 1 {
            result = &result * &base;
        }
        exp >>= 1;
        if exp > 0 {
            base = &base * &base;
        }
    }
    Ok(result)
}

/// If `m` is `c * Id` within `tol` (entrywise), returns `c` (the averaged
/// diagonal).
pub fn scalar_multiple_of_identity(m: &ComplexMatrix, tol: f64) -> Option<Complex64> {
    let n = m.dim().ok()?;
    let c = m.trace() / n as f64;
    if m.max_abs_diff(&ComplexMatrix::identity(n).scaled(c)) <= tol {
        Some(c)
    } else {
        None
    }
}

/// Unit-norm complex vector with a canonical global phase.
///
/// Construction normalizes and fixes the phase so that the first component
/// of largest modulus is real and nonnegative; vectors differing only by a
/// global phase therefore collapse to identical representations. A vector
/// that is already canonical passes through bit-for-bit, which keeps JSON
/// round-trips byte-stable.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroVector);
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr.sqrt() < 1e-12 {
            return Err(Error::ZeroVector);
        }
        if (norm_sqr - 1.0).abs() > 1e-12 {
            let inv = 1.0 / norm_sqr.sqrt();
            for a in &mut amplitudes {
                *a *= inv;
            }
        }
        // Canonical phase: first component of largest modulus becomes real
        // and nonnegative. Skip the rotation when it already is, so that
        // canonical input is preserved exactly.
        let pivot = Self::pivot_index(&amplitudes);
        let p = amplitudes[pivot];
        if p.im != 0.0 || p.re < 0.0 {
            let phase = p / p.norm();
            let rot = phase.conj();
            for a in &mut amplitudes {
                *a *= rot;
            }
            amplitudes[pivot] = Complex64::new(p.norm(), 0.0);
        }
        Ok(Self { amplitudes })
    }

    fn pivot_index(amplitudes: &[Complex64]) -> usize {
        let mut best = 0;
        let mut best_norm = amplitudes[0].norm_sqr();
        for (i, a) in amplitudes.iter().enumerate().skip(1) {
            let n = a.norm_sqr();
            if n > best_norm {
                best = i;
                best_norm = n;
            }
        }
        best
    }

    /// Computational basis state `|k>`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Tensor product `|self> (x) |other>`, re-canonicalized.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self::new(amplitudes).expect("tensor of unit vectors is unit")
    }

    /// Squared Frobenius distance between the projectors of two unit
    /// vectors, `|P(v) - P(w)|_F^2` (equal to `2(1 - |<v|w>|^2)`, but summed
    /// entrywise: the overlap form cancels catastrophically right where the
    /// duplicate threshold lives).
    pub fn projector_distance_sqr(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let a = &self.amplitudes;
        let b = &other.amplitudes;
        let mut sum = 0.0;
        for i in 0..a.len() {
            for j in 0..a.len() {
                sum += (a[i] * a[j].conj() - b[i] * b[j].conj()).norm_sqr();
            }
        }
        sum
    }
}

/// Rank-1 projector `|v><v|`. Invariant under the global phase of `v` by the
/// canonical-phase convention of [`StateVector`].
pub fn projector_of(v: &StateVector) -> ComplexMatrix {
    let n = v.dim();
    let a = v.amplitudes();
    ComplexMatrix::from_fn(n, n, |i, j| a[i] * a[j].conj())
}

/// Eigenvalues (unit modulus) and a matching orthonormal eigenbasis of a
/// unitary matrix, in the deterministic order described in [`crate::eigen`].
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Vec<StateVector>,
}

impl Spectrum {
    /// `sum_k lambda_k^p P(mu_k)`; with `p = 1` this reconstructs the source
    /// matrix.
    pub fn power_sum(&self, p: i32) -> ComplexMatrix {
        let n = self.eigenvectors[0].dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            acc = &acc + &projector_of(v).scaled(lambda.powi(p));
        }
        acc
    }
}
