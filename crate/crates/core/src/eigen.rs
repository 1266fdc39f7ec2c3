//! Deterministic eigensystems for unitary and Hermitian matrices.
//!
//! Two routes produce a [`Spectrum`]:
//!
//! * **Known eigenvalues** (the main path): each eigenspace is the null space
//!   of `m - lambda*Id`, computed by Gaussian elimination with full pivoting
//!   and orthonormalized by modified Gram-Schmidt in canonical order. This is
//!   exact about the eigenvalue multiset and never iterates.
//! * **General fallback**: cyclic Jacobi on the commuting Hermitian pair
//!   `H = (m + m^H)/2`, `K = (m - m^H)/(2i)`, refining degenerate `H`
//!   eigenspaces with `K`.
//!
//! Both routes emit the same deterministic conventions: eigenvalues sorted by
//! angle in `[0, 2*pi)`, degenerate eigenspaces ordered by the free columns of
//! the elimination, and each eigenvector phase-fixed so its largest component
//! is real positive.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Spectrum, StateVector};

/// Relative pivot threshold for rank decisions inside the elimination.
const RANK_RTOL: f64 = 1e-8;

/// Orthonormal basis of the null space of `a`, by Gaussian elimination with
/// full pivoting. Basis vectors are ordered by the original column index of
/// their free variable and returned un-normalized.
pub(crate) fn null_space_basis(a: &ComplexMatrix, rtol: f64) -> Vec<Vec<Complex64>> {
    let n = a.dim().expect("null_space_basis needs a square matrix");
    let mut m = a.clone();
    // col_of[t] = original column sitting at position t
    let mut col_of: Vec<usize> = (0..n).collect();
    let scale = m.max_abs();
    if scale == 0.0 {
        return (0..n)
            .map(|k| {
                let mut v = vec![Complex64::new(0.0, 0.0); n];
                v[k] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
    }
    let threshold = rtol * scale;

    let mut rank = 0;
    for t in 0..n {
        // full pivot over the remaining submatrix
        let (mut pi, mut pj, mut best) = (t, t, 0.0f64);
        for i in t..n {
            for j in t..n {
                let v = m.get(i, j).norm();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if best <= threshold {
            break;
        }
        if pi != t {
            for j in 0..n {
                let (x, y) = (m.get(t, j), m.get(pi, j));
                m.set(t, j, y);
                m.set(pi, j, x);
            }
        }
        if pj != t {
            for i in 0..n {
                let (x, y) = (m.get(i, t), m.get(i, pj));
                m.set(i, t, y);
                m.set(i, pj, x);
            }
            col_of.swap(t, pj);
        }
        let pivot = m.get(t, t);
        for i in t + 1..n {
            let f = m.get(i, t) / pivot;
            if f.norm() == 0.0 {
                continue;
            }
            for j in t..n {
                let v = m.get(i, j) - f * m.get(t, j);
                m.set(i, j, v);
            }
            m.set(i, t, Complex64::new(0.0, 0.0));
        }
        rank = t + 1;
    }

    // Back-substitute one basis vector per free position, then map positions
    // back through the column permutation. Order by original column index of
    // the free variable.
    let mut free_positions: Vec<usize> = (rank..n).collect();
    free_positions.sort_by_key(|&f| col_of[f]);

    let mut basis = Vec::with_capacity(n - rank);
    for &f in &free_positions {
        let mut x = vec![Complex64::new(0.0, 0.0); n]; // permuted coordinates
        x[f] = Complex64::new(1.0, 0.0);
        for t in (0..rank).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in t + 1..n {
                s += m.get(t, j) * x[j];
            }
            x[t] = -s / m.get(t, t);
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for (pos, &orig) in col_of.iter().enumerate() {
            v[orig] = x[pos];
        }
        basis.push(v);
    }
    basis
}

/// Modified Gram-Schmidt, in the given order. Panics only on a genuinely
/// dependent input, which the null-space construction cannot produce.
fn orthonormalize(vectors: &mut [Vec<Complex64>]) {
    for j in 0..vectors.len() {
        let (done, rest) = vectors.split_at_mut(j);
        let v = &mut rest[0];
        for u in done.iter() {
            let proj: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u.iter()) {
                *x -= proj * y;
            }
        }
        let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 1e-12, "Gram-Schmidt received dependent vectors");
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// Angle of a unit-modulus complex number in `[0, 2*pi)`, with values within
/// `1e-12` of the upper boundary snapped to zero so that an eigenvalue of
/// `1 - i*eps` still sorts first.
fn canonical_angle(z: Complex64) -> f64 {
    let mut a = z.arg();
    if a < 0.0 {
        a += TAU;
    }
    if TAU - a < 1e-12 {
        a = 0.0;
    }
    a
}

/// The `n` roots of `z^n = c` for unit-modulus `c`, sorted by canonical angle.
pub fn nth_roots_sorted(c: Complex64, n: usize) -> Vec<Complex64> {
    let base = c.arg() / n as f64;
    let mut roots: Vec<(f64, Complex64)> = (0..n)
        .map(|t| {
            let raw = base + TAU * t as f64 / n as f64;
            let z = Complex64::from_polar(1.0, raw);
            (canonical_angle(z), z)
        })
        .collect();
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    roots.into_iter().map(|(_, z)| z).collect()
}

fn group_eigenvalues(values: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    for &v in values {
        match groups.iter_mut().find(|(g, _)| (*g - v).norm() < 1e-9) {
            Some((_, count)) => *count += 1,
            None => groups.push((v, 1)),
        }
    }
    groups.sort_by(|a, b| {
        canonical_angle(a.0)
            .partial_cmp(&canonical_angle(b.0))
            .unwrap()
    });
    groups
}

fn check_unitary(m: &ComplexMatrix, tol: f64) -> Result<usize> {
    let n = m.dim()?;
    let residual = (&(m * &m.adjoint()) - &ComplexMatrix::identity(n)).max_abs();
    if residual > tol {
        return Err(Error::NotUnitary { residual, tol });
    }
    Ok(n)
}

fn assemble_spectrum(
    m: &ComplexMatrix,
    parts: Vec<(Complex64, Vec<Vec<Complex64>>)>,
    tol: f64,
) -> Result<Spectrum> {
    let mut eigenvalues = Vec::new();
    let mut eigenvectors = Vec::new();
    for (lambda, mut vecs) in parts {
        orthonormalize(&mut vecs);
        for v in vecs {
            eigenvalues.push(lambda);
            eigenvectors.push(StateVector::new(v)?);
        }
    }
    let spectrum = Spectrum { eigenvalues, eigenvectors };
    let residual = spectrum.power_sum(1).max_abs_diff(m);
    if residual > tol.max(1e-10) {
        return Err(Error::Numerical(format!(
            "eigensystem reconstruction residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(spectrum)
}

/// Eigensystem of a unitary matrix.
///
/// With `known_eigenvalues` given as the exact multiset, each eigenspace is a
/// null space; a wrong multiset is reported as
/// [`Error::EigenvalueInconsistent`]. Without it the Jacobi fallback runs.
pub fn unitary_eigensystem(
    m: &ComplexMatrix,
    known_eigenvalues: Option<&[Complex64]>,
    tol: f64,
) -> Result<Spectrum> {
    let n = check_unitary(m, tol)?;
    match known_eigenvalues {
        Some(values) => {
            if values.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "expected {n} eigenvalues, got {}",
                    values.len()
                )));
            }
            let mut parts = Vec::new();
            for (lambda, multiplicity) in group_eigenvalues(values) {
                let shifted = m - &ComplexMatrix::identity(n).scaled(lambda);
                let basis = null_space_basis(&shifted, RANK_RTOL);
                if basis.len() != multiplicity {
                    return Err(Error::EigenvalueInconsistent {
                        eigenvalue: format!("{lambda}"),
                        found: basis.len(),
                        expected: multiplicity,
                    });
                }
                parts.push((lambda, basis));
            }
            assemble_spectrum(m, parts, tol)
        }
        None => unitary_eigensystem_general(m, tol),
    }
}

/// Eigensystem of a unitary matrix whose eigenvalues all lie in `candidates`
/// with unknown multiplicities (some candidates may be absent). Used for Weyl
/// monomials in composite dimension, where `m^n = c*Id` pins the candidate
/// roots but not the multiset.
pub fn unitary_eigensystem_candidates(
    m: &ComplexMatrix,
    candidates: &[Complex64],
    tol: f64,
) -> Result<Spectrum> {
    let n = check_unitary(m, tol)?;
    let mut parts = Vec::new();
    let mut total = 0;
    for (lambda, _) in group_eigenvalues(candidates) {
        let shifted = m - &ComplexMatrix::identity(n).scaled(lambda);
        let basis = null_space_basis(&shifted, RANK_RTOL);
        if !basis.is_empty() {
            total += basis.len();
            parts.push((lambda, basis));
        }
    }
    if total != n {
        return Err(Error::EigenvalueInconsistent {
            eigenvalue: "candidate set".into(),
            found: total,
            expected: n,
        });
    }
    assemble_spectrum(m, parts, tol)
}

/// Cyclic complex-Hermitian Jacobi. Returns eigenvalues ascending with the
/// matching orthonormal eigenvector columns.
pub fn hermitian_eigensystem(a: &ComplexMatrix, tol: f64) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = a.dim()?;
    let residual = a.max_abs_diff(&a.adjoint());
    if residual > tol {
        return Err(Error::NotHermitian { residual, tol });
    }
    let mut a = a.hermitian_part();
    let mut q = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for r in p + 1..n {
                off += 2.0 * a.get(p, r).norm_sqr();
            }
        }
        if off.sqrt() <= 1e-13 * scale {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let apr = a.get(p, r);
                let mag = apr.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase_unit = apr / mag;
                let app = a.get(p, p).re;
                let arr = a.get(r, r).re;
                let theta = (arr - app) / (2.0 * mag);
                // small-magnitude root of t^2 - 2*theta*t - 1 = 0
                let t = if theta >= 0.0 {
                    -1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = phase_unit.conj() * (t * c);

                // A <- G^H A G with G = Id except the (p, r) block
                // [[c, -conj(s)], [s, c]]
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akr = a.get(k, r);
                    a.set(k, p, akp * c + akr * s);
                    a.set(k, r, akp * (-s.conj()) + akr * c);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let ark = a.get(r, k);
                    a.set(p, k, apk * c + ark * s.conj());
                    a.set(r, k, apk * (-s) + ark * c);
                }
                for k in 0..n {
                    let qkp = q.get(k, p);
                    let qkr = q.get(k, r);
                    q.set(k, p, qkp * c + qkr * s);
                    q.set(k, r, qkp * (-s.conj()) + qkr * c);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .re
            .partial_cmp(&a.get(j, j).re)
            .unwrap()
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| q.get(i, order[j]));
    Ok((eigenvalues, vectors))
}

/// General unitary eigensolver: co-diagonalize the commuting Hermitian pair
/// `H = (m + m^H)/2` and `K = (m - m^H)/(2i)`.
fn unitary_eigensystem_general(m: &ComplexMatrix, tol: f64) -> Result<Spectrum> {
    let n = m.dim()?;
    let h = m.hermitian_part();
    let k = ComplexMatrix::from_fn(n, n, |i, j| {
        (m.get(i, j) - m.get(j, i).conj()) * Complex64::new(0.0, -0.5)
    });

    let (hvals, mut q) = hermitian_eigensystem(&h, tol)?;

    // Refine clusters of degenerate H-eigenvalues with K.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (hvals[end] - hvals[start]).abs() < 1e-8 {
            end += 1;
        }
        if end - start > 1 {
            let cols: Vec<usize> = (start..end).collect();
            let width = cols.len();
            // K' = Qc^H K Qc
            let mut kp = ComplexMatrix::zeros(width, width);
            for (a_idx, &ca) in cols.iter().enumerate() {
                for (b_idx, &cb) in cols.iter().enumerate() {
                    let mut s = Complex64::new(0.0, 0.0);
                    for i in 0..n {
                        for j in 0..n {
                            s += q.get(i, ca).conj() * k.get(i, j) * q.get(j, cb);
                        }
                    }
                    kp.set(a_idx, b_idx, s);
                }
            }
            let (_, w) = hermitian_eigensystem(&kp, 1e-8)?;
            // Qc <- Qc W
            let mut rotated = vec![vec![Complex64::new(0.0, 0.0); width]; n];
            for i in 0..n {
                for (b_idx, _) in cols.iter().enumerate() {
                    let mut s = Complex64::new(0.0, 0.0);
                    for (a_idx, &ca) in cols.iter().enumerate() {
                        s += q.get(i, ca) * w.get(a_idx, b_idx);
                    }
                    rotated[i][b_idx] = s;
                }
            }
            for i in 0..n {
                for (b_idx, &cb) in cols.iter().enumerate() {
                    q.set(i, cb, rotated[i][b_idx]);
                }
            }
        }
        start = end;
    }

    // Read off eigenvalues as Rayleigh quotients and verify residuals.
    let mut pairs: Vec<(Complex64, Vec<Complex64>)> = Vec::with_capacity(n);
    for j in 0..n {
        let v: Vec<Complex64> = (0..n).map(|i| q.get(i, j)).collect();
        let mv = m.apply(&v);
        let lambda: Complex64 = v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum();
        let residual: f64 = mv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > tol.max(1e-9) {
            return Err(Error::Numerical(format!(
                "unitary eigensolver residual {residual:.3e} for eigenvalue {lambda}"
            )));
        }
        pairs.push((lambda, v));
    }
    pairs.sort_by(|a, b| {
        canonical_angle(a.0)
            .partial_cmp(&canonical_angle(b.0))
            .unwrap()
    });

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for (lambda, v) in pairs {
        eigenvalues.push(lambda);
        eigenvectors.push(StateVector::new(v)?);
    }
    let spectrum = Spectrum { eigenvalues, eigenvectors };
    let residual = spectrum.power_sum(1).max_abs_diff(m);
    if residual > tol.max(1e-9) {
        return Err(Error::Numerical(format!(
            "eigensystem reconstruction residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(spectrum)
}
