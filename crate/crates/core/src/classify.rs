//! Classification of projector sets and verification of candidate
//! symmetries.
//!
//! The measurement map realizes each projector as a real row over the
//! orthonormal Hermitian basis `{E^(kk); (E^(kl)+E^(lk))/sqrt(2);
//! i(E^(kl)-E^(lk))/sqrt(2), k < l}`; its rank decides representativity, and
//! the grouping-dependent flags (complete, almost perfect, perfect, mutually
//! unbiased) form an implication chain evaluated against the declared bases
//! only. Recovering a basis cover from a bare vector multiset would be a
//! set-cover search and is deliberately not attempted: grouping-dependent
//! flags of an ungrouped set are reported as unknown, not false.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, StateVector};
use crate::sets::ProjectorSet;
use crate::weyl::{weyl_pair, WeylMonomial};

/// Relative singular-value threshold for rank decisions
/// (`sigma > RANK_RTOL * sigma_max`).
pub const RANK_RTOL: f64 = 1e-8;

/// The orthonormal real basis of Hermitian space used for coordinates:
/// diagonal units first, then the symmetric pairs, then the antisymmetric
/// pairs, pairs in lexicographic order.
pub fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        let mut m = ComplexMatrix::zeros(n, n);
        m.set(k, k, Complex64::new(1.0, 0.0));
        out.push(m);
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..n {
        for l in k + 1..n {
            let mut m = ComplexMatrix::zeros(n, n);
            m.set(k, l, Complex64::new(r, 0.0));
            m.set(l, k, Complex64::new(r, 0.0));
            out.push(m);
        }
    }
    for k in 0..n {
        for l in k + 1..n {
            let mut m = ComplexMatrix::zeros(n, n);
            m.set(k, l, Complex64::new(0.0, r));
            m.set(l, k, Complex64::new(0.0, -r));
            out.push(m);
        }
    }
    out
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`] (read off
/// entrywise; the basis is orthonormal under the trace inner product, so
/// this is an isometry).
pub fn hermitian_coords(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.dim()?;
    let mut coords = Vec::with_capacity(n * n);
    for k in 0..n {
        coords.push(m.get(k, k).re);
    }
    let s = std::f64::consts::SQRT_2;
    for k in 0..n {
        for l in k + 1..n {
            coords.push(s * m.get(k, l).re);
        }
    }
    for k in 0..n {
        for l in k + 1..n {
            coords.push(s * m.get(k, l).im);
        }
    }
    Ok(coords)
}

/// Rebuild the Hermitian matrix from its coordinates.
pub fn hermitian_from_coords(n: usize, coords: &[f64]) -> ComplexMatrix {
    assert_eq!(coords.len(), n * n, "coordinate vector has wrong length");
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        m.set(k, k, Complex64::new(coords[k], 0.0));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut idx = n;
    let pairs = n * (n - 1) / 2;
    for k in 0..n {
        for l in k + 1..n {
            let re = coords[idx] * r;
            let im = coords[idx + pairs] * r;
            m.set(k, l, Complex64::new(re, im));
            m.set(l, k, Complex64::new(re, -im));
            idx += 1;
        }
    }
    m
}

/// The linear map from Hermitian matrices to outcome probabilities, stored
/// as the real `N x n^2` matrix whose row `alpha` holds the coordinates of
/// `P_alpha`.
#[derive(Debug, Clone)]
pub struct MeasurementMap {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
    rank: usize,
}

impl MeasurementMap {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn row(&self, alpha: usize) -> &[f64] {
        &self.data[alpha * self.n_cols..(alpha + 1) * self.n_cols]
    }

    /// Apply to Hermitian coordinates: the formal probability vector.
    pub fn apply(&self, coords: &[f64]) -> Vec<f64> {
        assert_eq!(coords.len(), self.n_cols);
        (0..self.n_rows)
            .map(|a| self.row(a).iter().zip(coords).map(|(x, y)| x * y).sum())
            .collect()
    }

    pub(crate) fn as_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n_rows, self.n_cols, &self.data)
    }
}

fn rank_of(m: &DMatrix<f64>) -> usize {
    let svd = m.clone().svd(false, false);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > RANK_RTOL * sigma_max)
        .count()
}

/// Build the measurement map of a set and compute its rank.
pub fn measurement_map(set: &ProjectorSet) -> MeasurementMap {
    let n = set.dim();
    let n_cols = n * n;
    let rows = crate::par::map_range(set.len(), |alpha| {
        hermitian_coords(&set.projector(alpha)).expect("projectors are square")
    });
    let mut data = Vec::with_capacity(set.len() * n_cols);
    for row in rows {
        data.extend(row);
    }
    let mut map = MeasurementMap { n_rows: set.len(), n_cols, data, rank: 0 };
    map.rank = rank_of(&map.as_dmatrix());
    map
}

/// Where a set sits in the taxonomy. Grouping-dependent flags are `None`
/// when no grouping is declared ("unknown", not false). The implication
/// chain `mutually_unbiased => perfect => almost_perfect => complete =>
/// representative` holds by construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub dim: usize,
    pub n_vectors: usize,
    pub rank: usize,
    pub representative: bool,
    pub minimal_representative: bool,
    pub affine_minimal: bool,
    pub complete: Option<bool>,
    pub almost_perfect: Option<bool>,
    pub perfect: Option<bool>,
    pub mutually_unbiased: Option<bool>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn to_json(&self) -> Result<String> {
        crate::json::to_json_string(self)
    }
}

/// All cross-basis vector index pairs `(i, j)` of a grouped set: pairs of
/// distinct vectors that never share a basis.
fn cross_basis_pairs(set: &ProjectorSet) -> Vec<(usize, usize)> {
    let bases = set.bases().unwrap_or(&[]);
    let mut share = vec![false; set.len() * set.len()];
    for basis in bases {
        for &i in basis {
            for &j in basis {
                share[i * set.len() + j] = true;
            }
        }
    }
    let mut pairs = Vec::new();
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            if !share[i * set.len() + j] {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Classify a set against the full taxonomy.
pub fn classify(set: &ProjectorSet, tol: f64) -> ClassificationReport {
    let n = set.dim();
    let n_sq = n * n;
    let map = measurement_map(set);
    let mut notes = Vec::new();

    let representative = map.rank() == n_sq;
    let minimal_representative = representative && set.len() == n_sq;

    // N = n^2 - 1 vectors plus the unit-trace constraint: append the
    // coordinates of Id as an extra row and ask for full rank.
    let affine_minimal = if set.len() == n_sq - 1 {
        let id_coords = hermitian_coords(&ComplexMatrix::identity(n)).expect("square");
        let mut data = Vec::with_capacity((set.len() + 1) * n_sq);
        for alpha in 0..set.len() {
            data.extend_from_slice(map.row(alpha));
        }
        data.extend(id_coords);
        let aug = DMatrix::from_row_slice(set.len() + 1, n_sq, &data);
        rank_of(&aug) == n_sq
    } else {
        false
    };

    let (complete, almost_perfect, perfect, mutually_unbiased) = match set.bases() {
        None => {
            notes.push("completeness unknown: no grouping declared".into());
            (None, None, None, None)
        }
        Some(bases) => {
            let mut covered = vec![false; set.len()];
            for basis in bases {
                for &i in basis {
                    covered[i] = true;
                }
            }
            let covers_all = covered.iter().all(|&c| c);
            if !covers_all {
                notes.push("grouping does not cover every vector".into());
            }
            let complete = representative && covers_all;
            let almost_perfect = complete && set.is_disjoint();
            let (perfect, unbiased) = if almost_perfect {
                let pairs = cross_basis_pairs(set);
                let overlaps: Vec<f64> = crate::par::map_collect(&pairs, |&(i, j)| {
                    set.vector(i).overlap(set.vector(j)).norm_sqr()
                });
                let perfect = overlaps.iter().all(|&o| o.sqrt() > tol);
                let unbiased = perfect
                    && overlaps
                        .iter()
                        .all(|&o| (o - 1.0 / n as f64).abs() < tol);
                (perfect, unbiased)
            } else {
                (false, false)
            };
            (
                Some(complete),
                Some(almost_perfect),
                Some(perfect),
                Some(unbiased),
            )
        }
    };

    if perfect == Some(true) {
        // lower bound for (almost) perfect sets: N >= n^2 + n
        debug_assert!(set.len() >= n_sq + n);
    }
    notes.push(format!(
        "rank {} of {} Hermitian dimensions over {} projectors",
        map.rank(),
        n_sq,
        set.len()
    ));

    ClassificationReport {
        dim: n,
        n_vectors: set.len(),
        rank: map.rank(),
        representative,
        minimal_representative,
        affine_minimal,
        complete,
        almost_perfect,
        perfect,
        mutually_unbiased,
        notes,
    }
}

/// A certified set automorphism: `P(u v_alpha) = P(v_perm[alpha])` for every
/// `alpha`, plus the induced permutation of bases when the grouping maps onto
/// itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryPermutation {
    pub vector_perm: Vec<usize>,
    pub basis_perm: Option<Vec<usize>>,
}

/// Outcome of [`check_symmetry`]: either a certified automorphism or the
/// first vector whose image is missing from the set.
#[derive(Debug, Clone)]
pub enum SymmetryOutcome {
    Automorphism(SymmetryPermutation),
    Unmatched { vector_index: usize },
}

/// Does the unitary `u` map the projector multiset onto itself? Images are
/// matched against the set by projector Frobenius distance `< tol`.
pub fn check_symmetry(set: &ProjectorSet, u: &ComplexMatrix, tol: f64) -> Result<SymmetryOutcome> {
    let n = set.dim();
    if u.dim()? != n {
        return Err(Error::DimensionMismatch(format!(
            "symmetry candidate is {}x{}, set dimension is {n}",
            u.rows(),
            u.cols()
        )));
    }
    if !u.is_unitary(tol.max(1e-10)) {
        let residual = (&(u * &u.adjoint()) - &ComplexMatrix::identity(n)).max_abs();
        return Err(Error::NotUnitary { residual, tol });
    }

    let matches = crate::par::map_range(set.len(), |alpha| {
        let image = StateVector::new(u.apply(set.vector(alpha).amplitudes()))
            .expect("unitary image of a unit vector");
        (0..set.len()).find(|&beta| image.projector_distance_sqr(set.vector(beta)) < tol * tol)
    });

    let mut vector_perm = Vec::with_capacity(set.len());
    let mut used = vec![false; set.len()];
    for (alpha, m) in matches.into_iter().enumerate() {
        match m {
            None => return Ok(SymmetryOutcome::Unmatched { vector_index: alpha }),
            Some(beta) => {
                if used[beta] {
                    return Err(Error::Numerical(format!(
                        "two projectors map onto vector {beta}; a unitary image of a duplicate-free set cannot do that"
                    )));
                }
                used[beta] = true;
                vector_perm.push(beta);
            }
        }
    }

    let basis_perm = set.bases().and_then(|bases| {
        let sorted: Vec<Vec<usize>> = bases
            .iter()
            .map(|b| {
                let mut s = b.clone();
                s.sort_unstable();
                s
            })
            .collect();
        let mut perm = Vec::with_capacity(bases.len());
        for basis in bases {
            let mut image: Vec<usize> = basis.iter().map(|&i| vector_perm[i]).collect();
            image.sort_unstable();
            perm.push(sorted.iter().position(|s| *s == image)?);
        }
        Some(perm)
    });

    Ok(SymmetryOutcome::Automorphism(SymmetryPermutation { vector_perm, basis_perm }))
}

/// The symmetry generators of a [`crate::sets::mub_prime`] set: the Fourier
/// matrix plus the `p` von Neumann transforms `T_k` taking the eigenbasis of
/// `V U^k` to the canonical basis while fixing `U`. Every returned unitary is
/// verified with [`check_symmetry`] before being handed out; quotients
/// `T_j T_k^-1` then connect any two bases.
pub fn symmetric_witnesses(set: &ProjectorSet, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let p = parse_mub_provenance(set.provenance())
        .ok_or_else(|| Error::NotMubSet(set.provenance().to_string()))?;
    if p != set.dim() {
        return Err(Error::NotMubSet(format!(
            "provenance says dimension {p}, set has {}",
            set.dim()
        )));
    }
    let (u, _) = weyl_pair(p)?;
    let mut witnesses = vec![crate::sets::fourier_matrix(p)?];
    for k in 0..p {
        // V U^k = z^-k U^k V shares eigenvectors with U^k V, so T_k maps
        // basis k+1 of the set onto the canonical basis.
        let b = WeylMonomial::new(p, k, 1)?
            .matrix
            .scaled(crate::weyl::root_of_unity(p, -(k as i64)));
        let t = crate::weyl::von_neumann_transform(&u, &b, tol)?;
        witnesses.push(t.s);
    }
    for (i, w) in witnesses.iter().enumerate() {
        match check_symmetry(set, w, tol.max(1e-8))? {
            SymmetryOutcome::Automorphism(_) => {}
            SymmetryOutcome::Unmatched { vector_index } => {
                return Err(Error::Numerical(format!(
                    "witness {i} fails to map vector {vector_index} into the set"
                )));
            }
        }
    }
    Ok(witnesses)
}

fn parse_mub_provenance(provenance: &str) -> Option<usize> {
    let rest = provenance.strip_prefix("mub-prime(")?;
    let inner = rest.strip_suffix(')')?;
    inner.parse().ok()
}
