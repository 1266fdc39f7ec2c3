//! Constructive separable decompositions over tensor-product frames.
//!
//! Any density matrix on a composite space decomposes as
//! `rho = alpha * rho_s - beta * Id` with `rho_s` an explicit convex mixture
//! of product projectors: expand `rho` with real coefficients over a complete
//! product set, then trade every negative term `k P` for
//! `k * Id + (-k)(Id - P)`, expanding `Id - P` over the siblings of a basis
//! containing `P`. Taking traces gives the bookkeeping law
//! `alpha - beta * n_total = 1`.
//!
//! [`minimize_beta_lp`] sharpens the constructive `beta` to the optimum over
//! the fixed product-projector set by linear programming; dividing the
//! optimal `beta` by nothing but the identity normalization
//! (`t = beta * n_total`) gives the robustness against the maximally mixed
//! state, relative to this frame.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::classify::{hermitian_coords, measurement_map};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::sets::{ProductLabel, ProjectorSet};
use crate::tomography::assert_density_matrix;

/// The decomposition `rho = alpha * rho_s - beta * Id`, with
/// `rho_s = sum (weights/alpha) P_label` a convex combination of product
/// projectors.
#[derive(Debug, Clone)]
pub struct SeparableForm {
    pub alpha: f64,
    pub beta: f64,
    pub weights: Vec<f64>,
    pub labels: Vec<ProductLabel>,
    pub total_dim: usize,
}

impl SeparableForm {
    /// Robustness in the maximally-mixed normalization: the `t` with
    /// `(rho + t * Id/n) / (1 + t)` separable over this frame,
    /// i.e. `t = beta * n_total`.
    pub fn robustness_normalized(&self) -> f64 {
        self.beta * self.total_dim as f64
    }

    pub fn to_json(&self) -> Result<String> {
        let weights = self
            .labels
            .iter()
            .zip(&self.weights)
            .map(|(label, &weight)| WeightEntry { label: label.0.clone(), weight })
            .collect();
        crate::json::to_json_string(&FormJson {
            alpha: self.alpha,
            beta: self.beta,
            total_dim: self.total_dim,
            robustness_normalized: self.robustness_normalized(),
            weights,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct WeightEntry {
    label: Vec<usize>,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    alpha: f64,
    beta: f64,
    total_dim: usize,
    robustness_normalized: f64,
    weights: Vec<WeightEntry>,
}

/// Real coefficients `k` with `sum k_alpha P_alpha = rho`, the minimum-norm
/// solution (coefficients of either sign). Needs a representative set.
pub fn real_decomposition(set: &ProjectorSet, rho: &ComplexMatrix, tol: f64) -> Result<Vec<f64>> {
    let n = set.dim();
    if rho.dim()? != n {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs set dimension {n}",
            rho.dim()?
        )));
    }
    if !rho.is_hermitian(tol) {
        let residual = rho.max_abs_diff(&rho.adjoint());
        return Err(Error::NotHermitian { residual, tol });
    }
    let map = measurement_map(set);
    if map.rank() < n * n {
        return Err(Error::NotRepresentative { rank: map.rank(), required: n * n });
    }
    // coefficients solve A^T k = coords(rho); minimum-norm via SVD
    let at = map.as_dmatrix().transpose();
    let y = DVector::from_row_slice(&hermitian_coords(rho)?);
    let svd = at.svd(true, true);
    let k = svd
        .solve(&y, crate::classify::RANK_RTOL)
        .map_err(|e| Error::Numerical(format!("decomposition solve failed: {e}")))?;
    let k = k.as_slice().to_vec();

    let residual = decomposition_residual(set, &k, 0.0, rho);
    if residual > 1e-9 {
        return Err(Error::Numerical(format!(
            "real decomposition residual {residual:.3e}"
        )));
    }
    Ok(k)
}

/// Frobenius norm of `sum k_alpha P_alpha - shift * Id - rho`.
fn decomposition_residual(set: &ProjectorSet, k: &[f64], shift: f64, rho: &ComplexMatrix) -> f64 {
    let n = set.dim();
    let mut acc = ComplexMatrix::zeros(n, n);
    for (alpha, &w) in k.iter().enumerate() {
        if w != 0.0 {
            acc = &acc + &set.projector(alpha).scaled(w.into());
        }
    }
    if shift != 0.0 {
        acc = &acc - &ComplexMatrix::identity(n).scaled(shift.into());
    }
    (&acc - rho).frobenius_norm()
}

/// Trade negative coefficients for an identity shift: each negative `k P`
/// becomes `k * Id + (-k) * sum(siblings of P)` over the lowest-indexed basis
/// containing `P`. Returns the nonnegative coefficients and
/// `shift = sum |negative k|`, with
/// `sum k' P - shift * Id = sum k P` exactly.
pub fn positive_shift(set: &ProjectorSet, k: &[f64]) -> Result<(Vec<f64>, f64)> {
    if k.len() != set.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} projectors",
            k.len(),
            set.len()
        )));
    }
    if set.bases().is_none() {
        return Err(Error::GroupingRequired("positive_shift".into()));
    }
    let bases = set.bases().unwrap();
    let mut k_shifted = k.to_vec();
    let mut shift = 0.0;
    for (alpha, &coefficient) in k.iter().enumerate() {
        if coefficient >= 0.0 {
            continue;
        }
        let basis = set
            .first_basis_of(alpha)
            .ok_or(Error::VectorWithoutBasis(alpha))?;
        let magnitude = -coefficient;
        k_shifted[alpha] -= coefficient; // exact cancellation to zero
        for &sibling in &bases[basis] {
            if sibling != alpha {
                k_shifted[sibling] += magnitude;
            }
        }
        shift += magnitude;
    }
    debug_assert!(k_shifted.iter().all(|&x| x >= 0.0));
    Ok((k_shifted, shift))
}

fn require_product_grouping(set: &ProjectorSet) -> Result<()> {
    if set.product().is_none() {
        return Err(Error::NotProductSet);
    }
    if set.bases().is_none() {
        return Err(Error::GroupingRequired("separable decomposition".into()));
    }
    Ok(())
}

fn assemble_form(
    set: &ProjectorSet,
    rho: &ComplexMatrix,
    weights: Vec<f64>,
    beta: f64,
    residual_tol: f64,
) -> Result<SeparableForm> {
    let n = set.dim();
    let alpha: f64 = weights.iter().sum();
    let residual = decomposition_residual(set, &weights, beta, rho);
    if residual > residual_tol {
        return Err(Error::Numerical(format!(
            "separable form residual {residual:.3e} exceeds {residual_tol:.3e}"
        )));
    }
    let trace_law = (alpha - beta * n as f64 - 1.0).abs();
    if trace_law > 1e-9 {
        return Err(Error::Numerical(format!(
            "trace law alpha - beta*n = 1 violated by {trace_law:.3e}"
        )));
    }
    let labels = set.product().expect("checked by caller").labels.clone();
    Ok(SeparableForm { alpha, beta, weights, labels, total_dim: n })
}

/// Constructive decomposition over a composed complete set:
/// [`real_decomposition`] then [`positive_shift`]. All weights are
/// nonnegative and each `P_label` is a tensor product of per-factor rank-1
/// projectors (pure product states), so `rho_s` is separable by
/// construction.
pub fn separable_form(set: &ProjectorSet, rho: &ComplexMatrix, tol: f64) -> Result<SeparableForm> {
    require_product_grouping(set)?;
    assert_density_matrix(rho, tol)?;
    let k = real_decomposition(set, rho, tol)?;
    let (weights, shift) = positive_shift(set, &k)?;
    assemble_form(set, rho, weights, shift, 1e-8)
}

/// Minimize `beta` subject to `sum w_alpha P_alpha = rho + beta * Id`,
/// `w >= 0`, `beta >= 0`, over the fixed product set: a linear program in the
/// real Hermitian coordinates. Feasibility is guaranteed by the constructive
/// form, so an infeasible LP is an internal inconsistency. The optimal value
/// never exceeds the constructive shift.
pub fn minimize_beta_lp(set: &ProjectorSet, rho: &ComplexMatrix, tol: f64) -> Result<SeparableForm> {
    require_product_grouping(set)?;
    assert_density_matrix(rho, tol)?;
    let n = set.dim();
    let map = measurement_map(set);
    if map.rank() < n * n {
        return Err(Error::NotRepresentative { rank: map.rank(), required: n * n });
    }
    let rho_coords = hermitian_coords(rho)?;
    let id_coords = hermitian_coords(&ComplexMatrix::identity(n))?;

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let weight_vars: Vec<_> = (0..set.len())
        .map(|_| problem.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let beta_var = problem.add_var(1.0, (0.0, f64::INFINITY));
    for coord in 0..n * n {
        let mut terms: Vec<(microlp::Variable, f64)> = Vec::new();
        for (alpha, &var) in weight_vars.iter().enumerate() {
            let c = map.row(alpha)[coord];
            if c != 0.0 {
                terms.push((var, c));
            }
        }
        if id_coords[coord] != 0.0 {
            terms.push((beta_var, -id_coords[coord]));
        }
        problem.add_constraint(&terms, ComparisonOp::Eq, rho_coords[coord]);
    }
    let solution = problem
        .solve()
        .map_err(|e| Error::LpInfeasible(format!("{e:?}")))?;

    let beta = solution[beta_var].max(0.0);
    let mut weights: Vec<f64> = weight_vars.iter().map(|&v| solution[v]).collect();
    for w in &mut weights {
        if *w < 0.0 {
            if *w < -1e-12 {
                return Err(Error::Numerical(format!(
                    "LP weight {w:.3e} below the feasibility floor"
                )));
            }
            *w = 0.0;
        }
    }
    // The simplex solution satisfies the equalities to solver precision;
    // polish the weights by re-solving on the LP support so the reconstruction
    // meets the library-wide 1e-8 residual.
    let weights = polish_weights(set, &weights, beta, rho)?;
    assemble_form(set, rho, weights, beta, 1e-8)
}

/// Minimum-norm correction of the weights on their support so that
/// `sum w P = rho + beta * Id` holds to least-squares accuracy.
fn polish_weights(
    set: &ProjectorSet,
    weights: &[f64],
    beta: f64,
    rho: &ComplexMatrix,
) -> Result<Vec<f64>> {
    let n = set.dim();
    let support: Vec<usize> = (0..set.len()).filter(|&a| weights[a] > 1e-10).collect();
    if support.is_empty() {
        return Ok(weights.to_vec());
    }
    let target = rho + &ComplexMatrix::identity(n).scaled(beta.into());
    let target_coords = hermitian_coords(&target)?;
    let map = measurement_map(set);
    let mut data = Vec::with_capacity(support.len() * n * n);
    for coord in 0..n * n {
        for &alpha in &support {
            data.push(map.row(alpha)[coord]);
        }
    }
    let a = nalgebra::DMatrix::from_row_slice(n * n, support.len(), &data);
    let b = DVector::from_row_slice(&target_coords);
    let svd = a.svd(true, true);
    let solved = svd
        .solve(&b, crate::classify::RANK_RTOL)
        .map_err(|e| Error::Numerical(format!("weight polish failed: {e}")))?;
    let mut polished = weights.to_vec();
    for (idx, &alpha) in support.iter().enumerate() {
        polished[alpha] = solved[idx];
    }
    // keep the polish only if it stayed inside the nonnegativity cone
    if polished.iter().all(|&w| w >= -1e-12) {
        for w in &mut polished {
            *w = w.max(0.0);
        }
        Ok(polished)
    } else {
        Ok(weights.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{projector_of, DEFAULT_TOL};
    use crate::sets::{compose, mub_prime, standard_complete};
    use crate::tomography::trace_distance;

    fn pauli_pair_set() -> ProjectorSet {
        let two = mub_prime(2, DEFAULT_TOL).unwrap();
        compose(&two, &two, DEFAULT_TOL).unwrap()
    }

    fn bell_state() -> ComplexMatrix {
        let mut bell = ComplexMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell.set(i, j, 0.5.into());
        }
        bell
    }

    fn maximally_mixed(n: usize) -> ComplexMatrix {
        ComplexMatrix::identity(n).scaled((1.0 / n as f64).into())
    }

    #[test]
    fn pauli_decomposition_of_maximally_mixed_is_uniform() {
        // the six Pauli projectors sum to 3*Id, so the min-norm coefficients
        // of Id/2 are all 1/6
        let s = mub_prime(2, DEFAULT_TOL).unwrap();
        let k = real_decomposition(&s, &maximally_mixed(2), DEFAULT_TOL).unwrap();
        for &x in &k {
            assert!((x - 1.0 / 6.0).abs() < 1e-12, "{k:?}");
        }
    }

    #[test]
    fn decomposition_of_member_projector() {
        let s = mub_prime(3, DEFAULT_TOL).unwrap();
        let rho = projector_of(s.vector(4));
        let k = real_decomposition(&s, &rho, DEFAULT_TOL).unwrap();
        assert!(decomposition_residual(&s, &k, 0.0, &rho) < 1e-9);

        // min-norm output agrees with the pseudo-inverse oracle
        // k = A (A^T A)^-1 y for a full-column-rank A^T
        let map = measurement_map(&s).as_dmatrix();
        let y = nalgebra::DVector::from_row_slice(&hermitian_coords(&rho).unwrap());
        let ata = map.transpose() * &map;
        let oracle = &map * ata.lu().solve(&y).unwrap();
        for (a, b) in k.iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn ground_state_coefficients_mix_signs() {
        // E^(11) = (Id + sigma_z)/2 needs negative weight on x/y projectors
        let s = mub_prime(2, DEFAULT_TOL).unwrap();
        let mut rho = ComplexMatrix::zeros(2, 2);
        rho.set(0, 0, 1.0.into());
        let k = real_decomposition(&s, &rho, DEFAULT_TOL).unwrap();
        assert!(k.iter().any(|&x| x < 0.0));
        assert!(k.iter().any(|&x| x > 0.0));
    }

    #[test]
    fn positive_shift_identities() {
        let s = mub_prime(2, DEFAULT_TOL).unwrap();

        // all-nonnegative input is untouched
        let k = vec![0.1; 6];
        let (k2, shift) = positive_shift(&s, &k).unwrap();
        assert_eq!(k2, k);
        assert_eq!(shift, 0.0);

        // a single negative coefficient moves to the basis sibling
        let mut k = vec![0.0; 6];
        k[0] = -0.25;
        let (k2, shift) = positive_shift(&s, &k).unwrap();
        assert_eq!(shift, 0.25);
        assert_eq!(k2[0], 0.0);
        assert_eq!(k2[1], 0.25); // sibling in the same basis
    }

    #[test]
    fn positive_shift_preserves_the_operator() {
        let s = mub_prime(2, DEFAULT_TOL).unwrap();
        let mut rho = ComplexMatrix::zeros(2, 2);
        rho.set(0, 0, 1.0.into());
        let k = real_decomposition(&s, &rho, DEFAULT_TOL).unwrap();
        let (k2, shift) = positive_shift(&s, &k).unwrap();
        assert!(k2.iter().all(|&x| x >= 0.0));
        assert!(decomposition_residual(&s, &k2, shift, &rho) < 1e-9);
    }

    #[test]
    fn product_state_can_have_zero_beta() {
        let set = pauli_pair_set();
        // |z+> (x) |z+>: itself one of the product projectors
        let two = mub_prime(2, DEFAULT_TOL).unwrap();
        let z_plus = projector_of(two.vector(two.bases().unwrap()[1][0]));
        let rho = crate::matrix::tensor_product(&z_plus, &z_plus);
        let form = minimize_beta_lp(&set, &rho, DEFAULT_TOL).unwrap();
        assert!(form.beta < 1e-9, "beta {}", form.beta);
        let constructive = separable_form(&set, &rho, DEFAULT_TOL).unwrap();
        assert!(constructive.beta >= form.beta - 1e-12);
    }

    #[test]
    fn maximally_mixed_has_zero_beta() {
        let set = pauli_pair_set();
        let rho = maximally_mixed(4);
        let form = minimize_beta_lp(&set, &rho, DEFAULT_TOL).unwrap();
        assert!(form.beta < 1e-9);
        assert!((form.alpha - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bell_state_constructive_form_holds() {
        let set = pauli_pair_set();
        let rho = bell_state();
        let form = separable_form(&set, &rho, DEFAULT_TOL).unwrap();
        assert!(form.beta > 0.0);
        assert!((form.alpha - form.beta * 4.0 - 1.0).abs() < 1e-9);
        // rho_s is PSD with unit trace
        let n = set.dim();
        let mut rho_s = ComplexMatrix::zeros(n, n);
        for (alpha_idx, &w) in form.weights.iter().enumerate() {
            if w > 0.0 {
                rho_s = &rho_s + &set.projector(alpha_idx).scaled((w / form.alpha).into());
            }
        }
        assert!((rho_s.trace().re - 1.0).abs() < 1e-9);
        let (vals, _) = crate::eigen::hermitian_eigensystem(&rho_s, 1e-8).unwrap();
        assert!(vals[0] > -1e-10);
    }

    #[test]
    fn bell_state_lp_beats_construction_and_hits_half() {
        let set = pauli_pair_set();
        let rho = bell_state();
        let constructive = separable_form(&set, &rho, DEFAULT_TOL).unwrap();
        let optimal = minimize_beta_lp(&set, &rho, DEFAULT_TOL).unwrap();
        assert!(optimal.beta <= constructive.beta + 1e-9);
        assert!(optimal.beta < constructive.beta - 1e-3, "strictly smaller on the Bell state");
        // the Werner mixing threshold: beta* = 1/2, robustness t = 2
        assert!((optimal.beta - 0.5).abs() < 1e-6, "beta* {}", optimal.beta);
        assert!((optimal.robustness_normalized() - 2.0).abs() < 1e-5);
    }

    #[test]
    fn lp_form_reconstructs_random_states() {
        let set = pauli_pair_set();
        for seed in 0..10 {
            let rho = crate::random::random_density(4, 1000 + seed);
            let form = minimize_beta_lp(&set, &rho, DEFAULT_TOL).unwrap();
            assert!(form.weights.iter().all(|&w| w >= 0.0));
            let constructive = separable_form(&set, &rho, DEFAULT_TOL).unwrap();
            assert!(form.beta <= constructive.beta + 1e-8, "seed {seed}");
        }
    }

    #[test]
    fn zero_beta_on_sampled_product_mixtures() {
        // convex combinations of product projectors are separable as-is
        let set = pauli_pair_set();
        for seed in 0..5u64 {
            let mut rho = ComplexMatrix::zeros(4, 4);
            let mut total = 0.0;
            for t in 0..6 {
                let w = crate::rng::unit_f64(seed, 0x77, t) + 0.05;
                let alpha_idx = (crate::rng::mix3(seed, 0x78, t) % set.len() as u64) as usize;
                rho = &rho + &set.projector(alpha_idx).scaled(w.into());
                total += w;
            }
            rho = rho.scaled((1.0 / total).into()).hermitian_part();
            let form = minimize_beta_lp(&set, &rho, DEFAULT_TOL).unwrap();
            assert!(form.beta < 1e-7, "seed {seed}: beta {}", form.beta);
        }
    }

    #[test]
    fn requires_product_structure() {
        let s = standard_complete(2, DEFAULT_TOL).unwrap();
        let rho = maximally_mixed(2);
        assert!(matches!(
            separable_form(&s, &rho, DEFAULT_TOL),
            Err(Error::NotProductSet)
        ));
    }

    #[test]
    fn separable_form_roundtrip_json() {
        let set = pauli_pair_set();
        let form = minimize_beta_lp(&set, &bell_state(), DEFAULT_TOL).unwrap();
        let json = form.to_json().unwrap();
        assert!(json.contains("robustness_normalized"));
        assert!(json.ends_with('\n'));
    }

    #[test]
    fn estimate_then_decompose_pipeline() {
        // a mildly mixed two-qubit state survives the full pipeline
        let set = pauli_pair_set();
        let rho = &bell_state().scaled(0.5.into()) + &maximally_mixed(4).scaled(0.5.into());
        let rho = rho.hermitian_part();
        let form = separable_form(&set, &rho, DEFAULT_TOL).unwrap();
        let lp = minimize_beta_lp(&set, &rho, DEFAULT_TOL).unwrap();
        assert!(lp.beta <= form.beta + 1e-9);
        let d = trace_distance(&rho, &rho).unwrap();
        assert!(d < 1e-12);
    }
}
