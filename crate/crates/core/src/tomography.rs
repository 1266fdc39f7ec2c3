//! Forward probabilities, linear-inversion reconstruction, finite-shot
//! simulation, and projection onto the density-matrix cone.
//!
//! Sampling is keyed, not streamed: each shot draws from a counter RNG keyed
//! by `(seed, basis index, shot index)`, so counts are bitwise reproducible
//! for a fixed seed no matter how the loop is chunked or parallelized.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::classify::{hermitian_from_coords, measurement_map};
use crate::eigen::hermitian_eigensystem;
use crate::error::{Error, Result};
use crate::matrix::{projector_of, trace_inner, ComplexMatrix, StateVector};
use crate::rng;
use crate::sets::ProjectorSet;

/// Formal probability vector, index-aligned with the set's vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbabilityVector {
    pub set_provenance: String,
    pub values: Vec<f64>,
}

impl ProbabilityVector {
    pub fn to_json(&self) -> Result<String> {
        crate::json::to_json_string(self)
    }
}

/// Multinomial counts per declared basis, aligned with each basis's member
/// order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountsRecord {
    pub set_provenance: String,
    pub shots_per_basis: u64,
    pub counts: Vec<Vec<u64>>,
    pub seed: u64,
}

impl CountsRecord {
    pub fn to_json(&self) -> Result<String> {
        crate::json::to_json_string(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        crate::json::from_json_str(s)
    }
}

/// Check Hermiticity, unit trace and positive semidefiniteness within `tol`.
pub fn assert_density_matrix(rho: &ComplexMatrix, tol: f64) -> Result<()> {
    let n = rho.dim()?;
    if !rho.is_hermitian(tol) {
        let residual = rho.max_abs_diff(&rho.adjoint());
        return Err(Error::NotHermitian { residual, tol });
    }
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > tol * n as f64 {
        return Err(Error::NotDensity(format!("trace is {trace}, expected 1")));
    }
    let (eigenvalues, _) = hermitian_eigensystem(rho, tol)?;
    if let Some(min) = eigenvalues.first() {
        if *min < -tol {
            return Err(Error::NotDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
    }
    Ok(())
}

/// `p_alpha = Tr(P_alpha rho)` for a density matrix, clipped to `[0, 1]`.
pub fn probabilities(set: &ProjectorSet, rho: &ComplexMatrix, tol: f64) -> Result<ProbabilityVector> {
    assert_density_matrix(rho, tol)?;
    let mut p = raw_values(set, rho)?;
    for x in &mut p {
        *x = x.clamp(0.0, 1.0);
    }
    Ok(ProbabilityVector {
        set_provenance: set.provenance().to_string(),
        values: p,
    })
}

/// The unclipped formal vector `Tr(P_alpha h)` for any Hermitian `h`; signed
/// values are meaningful here and must not be clamped.
pub fn probabilities_raw(set: &ProjectorSet, h: &ComplexMatrix, tol: f64) -> Result<ProbabilityVector> {
    if !h.is_hermitian(tol) {
        let residual = h.max_abs_diff(&h.adjoint());
        return Err(Error::NotHermitian { residual, tol });
    }
    Ok(ProbabilityVector {
        set_provenance: set.provenance().to_string(),
        values: raw_values(set, h)?,
    })
}

fn raw_values(set: &ProjectorSet, h: &ComplexMatrix) -> Result<Vec<f64>> {
    if h.dim()? != set.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs set dimension {}",
            h.dim()?,
            set.dim()
        )));
    }
    Ok(crate::par::map_range(set.len(), |alpha| {
        trace_inner(&set.projector(alpha), h)
            .expect("same dimension")
            .re
    }))
}

/// Minimum-norm least-squares reconstruction: the Hermitian `H` minimizing
/// `|Lin_S(H) - p|`, mapped back from Hermitian coordinates. Requires a
/// representative set (rank `n^2`); with exact probabilities of a unit-trace
/// input this is a right inverse of [`probabilities`].
pub fn reconstruct(set: &ProjectorSet, values: &[f64]) -> Result<ComplexMatrix> {
    let n = set.dim();
    if values.len() != set.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for {} projectors",
            values.len(),
            set.len()
        )));
    }
    let map = measurement_map(set);
    if map.rank() < n * n {
        return Err(Error::NotRepresentative { rank: map.rank(), required: n * n });
    }
    let a = map.as_dmatrix();
    let b = DVector::from_row_slice(values);
    let svd = a.svd(true, true);
    let coords = svd
        .solve(&b, crate::classify::RANK_RTOL)
        .map_err(|e| Error::Numerical(format!("least-squares solve failed: {e}")))?;
    Ok(hermitian_from_coords(n, coords.as_slice()))
}

/// Multinomial sampling of `shots_per_basis` outcomes in every declared
/// basis. Requires a disjoint grouping (shared vectors would double-count).
/// Basis `b` draws shot `s` from the keyed stream `(seed, b, s)`.
pub fn sample_counts(
    set: &ProjectorSet,
    rho: &ComplexMatrix,
    shots_per_basis: u64,
    seed: u64,
    tol: f64,
) -> Result<CountsRecord> {
    let bases = set
        .bases()
        .ok_or_else(|| Error::GroupingRequired("sample_counts".into()))?;
    if !set.is_disjoint() {
        return Err(Error::NonDisjointGrouping(
            "sample_counts needs each vector in exactly one basis".into(),
        ));
    }
    let p = probabilities(set, rho, tol)?;
    let mut counts = Vec::with_capacity(bases.len());
    for (b, basis) in bases.iter().enumerate() {
        let member_p: Vec<f64> = basis.iter().map(|&i| p.values[i]).collect();
        let total: f64 = member_p.iter().sum();
        if total <= 0.0 {
            return Err(Error::Numerical(format!(
                "basis {b} has zero total probability"
            )));
        }
        // cumulative thresholds on [0, 1)
        let mut cumulative = Vec::with_capacity(member_p.len());
        let mut acc = 0.0;
        for &x in &member_p {
            acc += x / total;
            cumulative.push(acc);
        }
        let last = cumulative.len() - 1;
        let draw = |shot: u64| -> usize {
            let u = rng::unit_f64(seed, b as u64, shot);
            cumulative.iter().position(|&c| u < c).unwrap_or(last)
        };
        counts.push(crate::par::histogram_sum(shots_per_basis, basis.len(), draw));
    }
    Ok(CountsRecord {
        set_provenance: set.provenance().to_string(),
        shots_per_basis,
        counts,
        seed,
    })
}

/// Plug-in estimator: frequencies -> [`reconstruct`] -> [`project_to_density`].
pub fn estimate(set: &ProjectorSet, counts: &CountsRecord, tol: f64) -> Result<ComplexMatrix> {
    let bases = set
        .bases()
        .ok_or_else(|| Error::GroupingRequired("estimate".into()))?;
    if counts.counts.len() != bases.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} count rows for {} bases",
            counts.counts.len(),
            bases.len()
        )));
    }
    let mut values = vec![0.0; set.len()];
    for (b, basis) in bases.iter().enumerate() {
        if counts.counts[b].len() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "basis {b}: {} counts for {} members",
                counts.counts[b].len(),
                basis.len()
            )));
        }
        if counts.shots_per_basis > 0 {
            let total: u64 = counts.counts[b].iter().sum();
            if total != counts.shots_per_basis {
                return Err(Error::InvalidSet(format!(
                    "basis {b} counts sum to {total}, expected {}",
                    counts.shots_per_basis
                )));
            }
        }
        for (t, &i) in basis.iter().enumerate() {
            values[i] = if counts.shots_per_basis == 0 {
                0.0
            } else {
                counts.counts[b][t] as f64 / counts.shots_per_basis as f64
            };
        }
    }
    let h = reconstruct(set, &values)?;
    project_to_density(&h, tol)
}

/// Euclidean projection of the eigenvalues onto the probability simplex,
/// keeping the eigenvectors: the closest density matrix in Frobenius norm.
pub fn project_to_density(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let n = h.dim()?;
    if !h.is_hermitian(tol.max(1e-8)) {
        let residual = h.max_abs_diff(&h.adjoint());
        return Err(Error::NotHermitian { residual, tol });
    }
    let (eigenvalues, q) = hermitian_eigensystem(h, tol.max(1e-8))?;
    let projected = project_to_simplex(&eigenvalues);
    let mut out = ComplexMatrix::zeros(n, n);
    for (j, &lambda) in projected.iter().enumerate() {
        if lambda == 0.0 {
            continue;
        }
        let col: Vec<_> = (0..n).map(|i| q.get(i, j)).collect();
        let v = StateVector::new(col)?;
        out = &out + &projector_of(&v).scaled(lambda.into());
    }
    Ok(out.hermitian_part())
}

/// Euclidean projection onto `{x >= 0, sum x = 1}` by the sort-and-shift
/// rule: find the largest k with `x_(k) - (sum_(i<=k) x_(i) - 1)/k > 0`.
fn project_to_simplex(values: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        acc += x;
        let candidate = (acc - 1.0) / (k + 1) as f64;
        if x - candidate > 0.0 {
            theta = candidate;
        }
    }
    values.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Trace distance `0.5 * sum |eig(a - b)|`.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let diff = a - b;
    let (eigenvalues, _) = hermitian_eigensystem(&diff.hermitian_part(), 1e-6)?;
    Ok(0.5 * eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
}
