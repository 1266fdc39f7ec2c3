//! Seeded random matrices for tests, benchmarks and simulation studies.
//!
//! All generators are deterministic functions of `(dim, seed)`.

use num_complex::Complex64;

use crate::eigen::hermitian_eigensystem;
use crate::matrix::ComplexMatrix;
use crate::rng;

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
fn ginibre(n: usize, seed: u64) -> ComplexMatrix {
    let mut counter = 0u64;
    ComplexMatrix::from_fn(n, n, |_, _| {
        let re = rng::normal_f64(seed, 0x47, counter);
        let im = rng::normal_f64(seed, 0x48, counter);
        counter += 1;
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Random Hermitian matrix with O(1) entries.
pub fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
    ginibre(n, seed).hermitian_part()
}

/// Random density matrix `G G^H / Tr(G G^H)` (Hilbert-Schmidt ensemble).
pub fn random_density(n: usize, seed: u64) -> ComplexMatrix {
    let g = ginibre(n, seed);
    let p = &g * &g.adjoint();
    let t = p.trace().re;
    p.scaled(Complex64::new(1.0 / t, 0.0)).hermitian_part()
}

/// Random unitary: eigenvectors of a seeded Hermitian matrix recombined with
/// uniform unit-modulus eigenvalues.
pub fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    let h = random_hermitian(n, seed);
    let (_, q) = hermitian_eigensystem(&h, 1e-9).expect("seeded Hermitian input");
    let d = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, std::f64::consts::TAU * rng::unit_f64(seed, 0x51, i as u64))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    &(&q * &d) * &q.adjoint()
}
