//! The shift/clock pair, its monomials, and the constructive discrete
//! von Neumann uniqueness transform.
//!
//! `U` is the cyclic shift (ones on the superdiagonal and in the lower-left
//! corner), `V = diag(1, z, ..., z^(n-1))` with `z = exp(2*pi*i/n)`, and
//! `U V = z V U`. The `n^2` monomials `U^k V^l` are pairwise orthogonal under
//! the trace inner product and therefore span all `n x n` matrices.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::eigen::nth_roots_sorted;
use crate::error::{Error, Result};
use crate::matrix::{matrix_power, scalar_multiple_of_identity, ComplexMatrix, Spectrum};

/// `z^k` for `z = exp(2*pi*i/n)`, computed from the reduced angle so no
/// rounding accumulates across powers.
pub fn root_of_unity(n: usize, k: i64) -> Complex64 {
    let k = k.rem_euclid(n as i64) as usize;
    Complex64::from_polar(1.0, TAU * k as f64 / n as f64)
}

/// Trial-division primality check; dimensions here are desk-scale.
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Modular inverse of `a` mod `n` (requires `gcd(a, n) = 1`).
fn mod_inverse(a: usize, n: usize) -> Option<usize> {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (n as i64, (a % n) as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(n as i64) as usize)
}

/// The shift/clock pair `(U, V)` in dimension `n >= 2`. Both are unitary with
/// `U^n = V^n = Id` and `U V = z V U`.
pub fn weyl_pair(n: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: n });
    }
    let u = ComplexMatrix::from_fn(n, n, |i, j| {
        if j == (i + 1) % n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let v = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            root_of_unity(n, i as i64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok((u, v))
}

/// A monomial `U^k V^l` with its realized matrix.
///
/// The matrix is built from the closed form
/// `(U^k V^l)[i][j] = delta(j, i+k mod n) * z^(l*j)`, which keeps every entry
/// an exactly-reduced root of unity instead of an accumulated product.
#[derive(Debug, Clone)]
pub struct WeylMonomial {
    pub dim: usize,
    pub u_exp: usize,
    pub v_exp: usize,
    pub matrix: ComplexMatrix,
}

impl WeylMonomial {
    pub fn new(n: usize, u_exp: usize, v_exp: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall { min: 2, got: n });
        }
        let (k, l) = (u_exp % n, v_exp % n);
        let matrix = ComplexMatrix::from_fn(n, n, |i, j| {
            if j == (i + k) % n {
                root_of_unity(n, (l * j) as i64)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(Self { dim: n, u_exp: k, v_exp: l, matrix })
    }

    /// The scalar `c` with `matrix^n = c * Id`; its `n`-th roots are the
    /// candidate eigenvalues of the monomial.
    pub fn power_scalar(&self) -> Result<Complex64> {
        let p = matrix_power(&self.matrix, self.dim)?;
        scalar_multiple_of_identity(&p, 1e-10).ok_or_else(|| {
            Error::Numerical("monomial^n is not a scalar multiple of the identity".into())
        })
    }

    /// Eigensystem via the pinned candidate roots of `power_scalar`; exact
    /// multiplicities are discovered by the null-space elimination, which is
    /// what composite dimensions with degenerate monomials need.
    pub fn eigensystem(&self, tol: f64) -> Result<Spectrum> {
        let c = self.power_scalar()?;
        let roots = nth_roots_sorted(c, self.dim);
        crate::eigen::unitary_eigensystem_candidates(&self.matrix, &roots, tol)
    }
}

/// Result of [`commutation_exponent`]: the unique `j` with
/// `a b = z^j b a`, plus `gcd(j, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Commutation {
    pub exponent: usize,
    pub gcd: usize,
}

/// Find the unique `j` in `[0, n)` with `a b = z^j b a` within `tol`.
/// No candidate passing is an error, and so is more than one (the tolerance
/// is then too loose to trust).
pub fn commutation_exponent(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<Commutation> {
    let n = a.dim()?;
    if b.dim()? != n {
        return Err(Error::DimensionMismatch(format!(
            "commutation_exponent: {n} vs {}",
            b.dim()?
        )));
    }
    for (name, m) in [("a", a), ("b", b)] {
        let residual = (&(m * &m.adjoint()) - &ComplexMatrix::identity(n)).max_abs();
        if residual > tol {
            let _ = name;
            return Err(Error::NotUnitary { residual, tol });
        }
    }
    let ab = a * b;
    let ba = b * a;
    let mut found: Option<usize> = None;
    for j in 0..n {
        let residual = ab.max_abs_diff(&ba.scaled(root_of_unity(n, j as i64)));
        if residual <= tol {
            match found {
                None => found = Some(j),
                Some(first) => {
                    return Err(Error::AmbiguousCommutation { first, second: j, tol })
                }
            }
        }
    }
    match found {
        Some(j) => Ok(Commutation { exponent: j, gcd: gcd(j, n) }),
        None => Err(Error::NotWeylCommuting { tol }),
    }
}

/// Output of [`von_neumann_transform`]: a unitary `S` with
/// `S a S^-1 = phase_a * U^j` and `S b S^-1 = phase_b * V`, both exact up to
/// the reported per-matrix phases.
#[derive(Debug, Clone)]
pub struct VonNeumannTransform {
    pub s: ComplexMatrix,
    pub exponent: usize,
    pub phase_a: Complex64,
    pub phase_b: Complex64,
}

/// Constructive discrete von Neumann uniqueness: any unitary pair with
/// `a b = z^j b a` and `gcd(j, n) = 1` is jointly conjugate to
/// `(U^j, V)` up to per-matrix global phases.
///
/// Deterministic construction: `b`'s eigenvectors are ordered so its
/// eigenvalues run `phase_b * z^t` for `t = 0..n`, and their phases are fixed
/// by walking the `j`-shift cycle of `a`, dividing out the principal `n`-th
/// root of `a^n`'s scalar so that `a` acts as a nonnegative-real shift in the
/// new basis. `gcd(j, n) > 1` means the pair is reducible and is refused.
pub fn von_neumann_transform(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: f64,
) -> Result<VonNeumannTransform> {
    let n = a.dim()?;
    let comm = commutation_exponent(a, b, tol)?;
    let j = comm.exponent;
    if j == 0 {
        return Err(Error::CommutingPair);
    }
    if comm.gcd > 1 {
        return Err(Error::ReduciblePair { j, n, gcd: comm.gcd });
    }

    // b^n and a^n are scalars: the commutation relation forces the spectrum
    // of each to be a full orbit under multiplication by z^j.
    let scalar_of = |m: &ComplexMatrix| -> Result<Complex64> {
        scalar_multiple_of_identity(&matrix_power(m, n)?, (tol * 10.0).max(1e-8))
            .ok_or_else(|| Error::Numerical("n-th power is not a scalar".into()))
    };
    let c_b = scalar_of(b)?;
    let c_a = scalar_of(a)?;
    let roots_b = nth_roots_sorted(c_b, n);
    let phase_b = roots_b[0];
    let phase_a = nth_roots_sorted(c_a, n)[0];

    let spec_b = crate::eigen::unitary_eigensystem(b, Some(&roots_b), tol)?;
    // spec_b is ordered by angle, so eigenvalue t is phase_b * z^t.
    let mut basis: Vec<Option<Vec<Complex64>>> = vec![None; n];
    basis[0] = Some(spec_b.eigenvectors[0].amplitudes().to_vec());

    // a maps the z^t eigenspace of b to the z^(t-j) one; walk that cycle,
    // dividing by phase_a at each step so the closed loop is consistent.
    let inv_phase_a = phase_a.conj();
    let mut current = 0usize;
    for _ in 1..n {
        let next = (current + n - j) % n;
        let prev = basis[current].as_ref().expect("cycle order");
        let mut image = a.apply(prev);
        for x in &mut image {
            *x *= inv_phase_a;
        }
        basis[next] = Some(image);
        current = next;
    }

    // S maps the t-th eigenvector to e_t, i.e. row t of S is its bra.
    let rows: Vec<Vec<Complex64>> = basis
        .into_iter()
        .map(|v| v.expect("full cycle").iter().map(Complex64::conj).collect())
        .collect();
    let s = ComplexMatrix::from_rows(rows)?;

    // Verify both conjugations before handing the transform out.
    let s_inv = s.adjoint();
    let (u, v) = weyl_pair(n)?;
    let conj_a = &(&s * a) * &s_inv;
    let conj_b = &(&s * b) * &s_inv;
    let target_a = matrix_power(&u, j)?.scaled(phase_a);
    let target_b = v.scaled(phase_b);
    let check_tol = tol.max(1e-10);
    let res_a = conj_a.max_abs_diff(&target_a);
    let res_b = conj_b.max_abs_diff(&target_b);
    if res_a > check_tol || res_b > check_tol {
        return Err(Error::Numerical(format!(
            "von Neumann conjugation residuals {res_a:.3e} / {res_b:.3e} exceed {check_tol:.3e}"
        )));
    }

    Ok(VonNeumannTransform { s, exponent: j, phase_a, phase_b })
}

/// How a monomial is a phase times a power of one of the `n + 1` generators
/// `U`, `U^m V` (prime dimension only): `U^k V^l = phase^-1 * (U^m V^b)^p`
/// with `b = 1` when `l != 0` and `b = 0` (a plain power of `U`) when `l = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialPower {
    pub base_u_exp: usize,
    pub base_v_exp: usize,
    pub exponent: usize,
    pub phase: Complex64,
}

/// Express `U^k V^l` as a power of a generator, for prime `n`.
///
/// For `l != 0` the base exponent solves `m*l = k (mod n)`, which always has
/// a solution because arithmetic mod a prime is a field; the phase follows
/// from `(U^m V)^p = z^(-m p (p-1)/2) U^(m p) V^p`. The identity is verified
/// by direct matrix products to `1e-12` before returning.
pub fn monomial_as_power(n: usize, k: usize, l: usize) -> Result<MonomialPower> {
    if !is_prime(n) {
        return Err(Error::NotPrime("monomial_as_power", n));
    }
    let (k, l) = (k % n, l % n);
    if k == 0 && l == 0 {
        return Err(Error::InvalidSet(
            "monomial_as_power: the identity monomial (0, 0) has no generator".into(),
        ));
    }
    let result = if l == 0 {
        MonomialPower {
            base_u_exp: 1,
            base_v_exp: 0,
            exponent: k,
            phase: Complex64::new(1.0, 0.0),
        }
    } else {
        let m = (k * mod_inverse(l, n).expect("prime modulus")) % n;
        // (U^m V)^l = z^(-m l (l-1)/2) U^(m l) V^l
        let e = -((m * l * (l - 1) / 2) as i64);
        MonomialPower {
            base_u_exp: m,
            base_v_exp: 1,
            exponent: l,
            phase: root_of_unity(n, e),
        }
    };

    let target = WeylMonomial::new(n, k, l)?.matrix;
    let base = WeylMonomial::new(n, result.base_u_exp, result.base_v_exp)?.matrix;
    let lifted = matrix_power(&base, result.exponent)?.scaled(result.phase.conj());
    let residual = lifted.max_abs_diff(&target);
    if residual > 1e-12 {
        return Err(Error::Numerical(format!(
            "monomial_as_power identity residual {residual:.3e}"
        )));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{trace_inner, DEFAULT_TOL};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn weyl_pair_n2_is_pauli_xz() {
        let (u, v) = weyl_pair(2).unwrap();
        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let sz = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        assert!(u.max_abs_diff(&sx) < 1e-15);
        assert!(v.max_abs_diff(&sz) < 1e-15);
    }

    #[test]
    fn weyl_pair_rejects_dim_one() {
        assert!(weyl_pair(1).is_err());
    }

    #[test]
    fn clock_diagonal_n3() {
        let (_, v) = weyl_pair(3).unwrap();
        for k in 0..3 {
            let expect = Complex64::from_polar(1.0, TAU * k as f64 / 3.0);
            assert!((v.get(k, k) - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn commutation_relation_holds() {
        for n in 2..=11 {
            let (u, v) = weyl_pair(n).unwrap();
            let z = root_of_unity(n, 1);
            let lhs = &u * &v;
            let rhs = (&v * &u).scaled(z);
            assert!(lhs.max_abs_diff(&rhs) < 1e-12, "n={n}");
            assert!(
                matrix_power(&u, n).unwrap().max_abs_diff(&ComplexMatrix::identity(n)) < 1e-11
            );
            assert!(
                matrix_power(&v, n).unwrap().max_abs_diff(&ComplexMatrix::identity(n)) < 1e-11
            );
        }
    }

    #[test]
    fn uv_squared_is_minus_identity() {
        let m = WeylMonomial::new(2, 1, 1).unwrap();
        let sq = matrix_power(&m.matrix, 2).unwrap();
        assert!(sq.max_abs_diff(&ComplexMatrix::identity(2).scaled(c(-1.0, 0.0))) < 1e-14);
    }

    #[test]
    fn monomials_are_trace_orthogonal() {
        for n in 2..=6 {
            let monomials: Vec<WeylMonomial> = (0..n)
                .flat_map(|k| (0..n).map(move |l| (k, l)))
                .map(|(k, l)| WeylMonomial::new(n, k, l).unwrap())
                .collect();
            for (i, a) in monomials.iter().enumerate() {
                for (j, b) in monomials.iter().enumerate() {
                    let g = trace_inner(&a.matrix, &b.matrix).unwrap();
                    let expect = if i == j { n as f64 } else { 0.0 };
                    assert!(
                        (g - c(expect, 0.0)).norm() < 1e-9,
                        "n={n} ({},{}) vs ({},{}): {g}",
                        a.u_exp,
                        a.v_exp,
                        b.u_exp,
                        b.v_exp
                    );
                }
            }
        }
    }

    #[test]
    fn monomial_matches_explicit_product() {
        for n in [2usize, 3, 4, 5, 6] {
            let (u, v) = weyl_pair(n).unwrap();
            for k in 0..n {
                for l in 0..n {
                    let direct = WeylMonomial::new(n, k, l).unwrap().matrix;
                    let product = &matrix_power(&u, k).unwrap() * &matrix_power(&v, l).unwrap();
                    assert!(direct.max_abs_diff(&product) < 1e-12, "n={n} k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn commutation_exponent_examples() {
        let (u, v) = weyl_pair(3).unwrap();
        let comm = commutation_exponent(&u, &v, DEFAULT_TOL).unwrap();
        assert_eq!(comm, Commutation { exponent: 1, gcd: 1 });

        let (u5, v5) = weyl_pair(5).unwrap();
        let u2 = matrix_power(&u5, 2).unwrap();
        let comm = commutation_exponent(&u2, &v5, DEFAULT_TOL).unwrap();
        assert_eq!(comm, Commutation { exponent: 2, gcd: 1 });

        let id = ComplexMatrix::identity(3);
        let comm = commutation_exponent(&id, &v, DEFAULT_TOL).unwrap();
        assert_eq!(comm, Commutation { exponent: 0, gcd: 3 });
    }

    #[test]
    fn commutation_exponent_rejects_non_weyl_pairs() {
        // two generic non-commuting unitaries: eigenvector bases of distinct
        // monomials do not satisfy any z^j relation
        let h = ComplexMatrix::from_real_rows(&[
            &[std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
            &[std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2],
        ])
        .unwrap();
        let t = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), Complex64::from_polar(1.0, 0.7)],
        ])
        .unwrap();
        let m = &h * &t;
        assert!(matches!(
            commutation_exponent(&m, &t, DEFAULT_TOL),
            Err(Error::NotWeylCommuting { .. })
        ));
    }

    #[test]
    fn von_neumann_fixes_canonical_pair() {
        let (u, v) = weyl_pair(3).unwrap();
        let t = von_neumann_transform(&u, &v, DEFAULT_TOL).unwrap();
        assert_eq!(t.exponent, 1);
        assert!(t.s.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
        assert!((t.phase_a - c(1.0, 0.0)).norm() < 1e-12);
        assert!((t.phase_b - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn von_neumann_swapped_pair_is_fourier() {
        // a = V, b = U maps U to V and V to U^-1
        let n = 4;
        let (u, v) = weyl_pair(n).unwrap();
        let t = von_neumann_transform(&v, &u, DEFAULT_TOL).unwrap();
        assert_eq!(t.exponent, n - 1);
        let s_inv = t.s.adjoint();
        let conj_u = &(&t.s * &u) * &s_inv;
        assert!(conj_u.max_abs_diff(&v.scaled(t.phase_b)) < 1e-10);
    }

    #[test]
    fn von_neumann_rejects_reducible_and_commuting() {
        let n = 4;
        let m20 = WeylMonomial::new(n, 2, 0).unwrap().matrix; // U^2: j = 0 vs V^2 gives gcd 2
        let m02 = WeylMonomial::new(n, 0, 2).unwrap().matrix;
        assert!(matches!(
            von_neumann_transform(&m20, &m02, DEFAULT_TOL),
            Err(Error::ReduciblePair { gcd: 2, .. }) | Err(Error::CommutingPair)
        ));
        let (u, _) = weyl_pair(3).unwrap();
        assert!(matches!(
            von_neumann_transform(&u, &u, DEFAULT_TOL),
            Err(Error::CommutingPair)
        ));
    }

    #[test]
    fn von_neumann_conjugate_and_recover() {
        // conjugate (U, V) by a seeded unitary and recover the canonical form
        for n in [3usize, 5] {
            let (u, v) = weyl_pair(n).unwrap();
            for seed in 0..3u64 {
                let g = crate::random::random_unitary(n, 100 + seed);
                let g_inv = g.adjoint();
                let a = &(&g * &u) * &g_inv;
                let b = &(&g * &v) * &g_inv;
                let t = von_neumann_transform(&a, &b, 1e-8).unwrap();
                assert_eq!(t.exponent, 1);
                let s_inv = t.s.adjoint();
                let res = (&(&t.s * &a) * &s_inv)
                    .max_abs_diff(&matrix_power(&u, t.exponent).unwrap().scaled(t.phase_a));
                assert!(res < 1e-8, "n={n} seed={seed}: residual {res}");
            }
        }
    }

    #[test]
    fn monomial_power_examples() {
        let r = monomial_as_power(3, 1, 2).unwrap();
        assert_eq!((r.base_u_exp, r.base_v_exp, r.exponent), (2, 1, 2));

        let r = monomial_as_power(5, 0, 1).unwrap();
        assert_eq!((r.base_u_exp, r.base_v_exp, r.exponent), (0, 1, 1));
        assert!((r.phase - c(1.0, 0.0)).norm() < 1e-15);

        let r = monomial_as_power(2, 1, 1).unwrap();
        assert_eq!((r.base_u_exp, r.base_v_exp, r.exponent), (1, 1, 1));
        assert!((r.phase - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn monomial_power_covers_all_nontrivial_monomials() {
        for n in [2usize, 3, 5, 7] {
            for k in 0..n {
                for l in 0..n {
                    if k == 0 && l == 0 {
                        assert!(monomial_as_power(n, k, l).is_err());
                    } else {
                        monomial_as_power(n, k, l).unwrap();
                    }
                }
            }
        }
        assert!(matches!(
            monomial_as_power(4, 1, 1),
            Err(Error::NotPrime(_, 4))
        ));
    }
}
