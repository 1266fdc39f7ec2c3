//! Projector families and their composition across tensor factors.
//!
//! A [`ProjectorSet`] is a dimension, a list of unit kets (each standing for
//! the rank-1 projector it generates), and an optional grouping of the kets
//! into orthonormal bases. Groupings may share kets; a grouping in which
//! every ket sits in exactly one basis is flagged `disjoint`.
//!
//! Shipped constructors:
//! * [`standard_representative`] — the `n^2` kets `|k>`, `(|k>+|l>)/sqrt(2)`,
//!   `(|k>+i|l>)/sqrt(2)`;
//! * [`standard_complete`] — the above plus the `-` and `-i` partners,
//!   grouped into `n^2-n+1` substitution bases;
//! * [`mub_prime`] — for prime `p`, the `p+1` mutually unbiased eigenbases of
//!   the shift `U` and of `U^m V`, `m = 0..p`;
//! * [`weyl_complete`] — eigenbases of all nontrivial monomials `U^k V^l` in
//!   any dimension, with duplicate bases merged;
//! * [`compose`] — tensor products of two sets, carrying per-factor labels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, StateVector};
use crate::weyl::{is_prime, root_of_unity, WeylMonomial};

/// Frobenius-distance threshold under which two rank-1 projectors are
/// considered the same (vectors differing by a global phase must collapse).
pub const DUPLICATE_PROJECTOR_TOL: f64 = 1e-8;

/// Identifies a product projector by its per-factor vector indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductLabel(pub Vec<usize>);

/// Tensor-product bookkeeping carried by composed sets (in memory only; the
/// file format stores the flattened set).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductStructure {
    pub factor_dims: Vec<usize>,
    pub labels: Vec<ProductLabel>,
}

/// A set of rank-1 projectors on an `n`-dimensional space, with an optional
/// grouping into orthonormal bases.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    dim: usize,
    vectors: Vec<StateVector>,
    bases: Option<Vec<Vec<usize>>>,
    disjoint: bool,
    provenance: String,
    product: Option<ProductStructure>,
}

impl ProjectorSet {
    /// Validating constructor: checks vector dimensions, rejects duplicate
    /// projectors, and checks that every declared basis has exactly `dim`
    /// pairwise-orthonormal members. The `disjoint` flag is computed, never
    /// trusted.
    pub fn new(
        dim: usize,
        vectors: Vec<StateVector>,
        bases: Option<Vec<Vec<usize>>>,
        provenance: impl Into<String>,
        tol: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionTooSmall { min: 1, got: 0 });
        }
        if vectors.is_empty() {
            return Err(Error::InvalidSet("a projector set needs at least one vector".into()));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.dim() != dim {
                return Err(Error::InvalidSet(format!(
                    "vector {i} has dimension {}, set has {dim}",
                    v.dim()
                )));
            }
        }
        for i in 0..vectors.len() {
            for j in i + 1..vectors.len() {
                if vectors[i].projector_distance_sqr(&vectors[j])
                    < DUPLICATE_PROJECTOR_TOL * DUPLICATE_PROJECTOR_TOL
                {
                    return Err(Error::DuplicateProjector { first: i, second: j });
                }
            }
        }
        if let Some(bases) = &bases {
            if bases.is_empty() {
                return Err(Error::InvalidSet("declared grouping has no bases".into()));
            }
            for (b, basis) in bases.iter().enumerate() {
                if basis.len() != dim {
                    return Err(Error::InvalidSet(format!(
                        "basis {b} has {} members, expected {dim}",
                        basis.len()
                    )));
                }
                for &i in basis {
                    if i >= vectors.len() {
                        return Err(Error::InvalidSet(format!(
                            "basis {b} references vector {i} out of {}",
                            vectors.len()
                        )));
                    }
                }
                for (s, &i) in basis.iter().enumerate() {
                    for &j in &basis[s + 1..] {
                        if i == j {
                            return Err(Error::InvalidSet(format!(
                                "basis {b} lists vector {i} twice"
                            )));
                        }
                        let ov = vectors[i].overlap(&vectors[j]).norm();
                        if ov > tol {
                            return Err(Error::InvalidSet(format!(
                                "basis {b}: vectors {i} and {j} overlap by {ov:.3e}"
                            )));
                        }
                    }
                }
            }
        }
        let disjoint = Self::compute_disjoint(vectors.len(), bases.as_deref());
        Ok(Self {
            dim,
            vectors,
            bases,
            disjoint,
            provenance: provenance.into(),
            product: None,
        })
    }

    fn compute_disjoint(n_vectors: usize, bases: Option<&[Vec<usize>]>) -> bool {
        let Some(bases) = bases else { return false };
        let mut count = vec![0usize; n_vectors];
        for basis in bases {
            for &i in basis {
                count[i] += 1;
            }
        }
        count.iter().all(|&c| c == 1)
    }

    /// The one-projector set on a one-dimensional space; the neutral element
    /// of [`compose`].
    pub fn trivial() -> Self {
        Self {
            dim: 1,
            vectors: vec![StateVector::basis_state(1, 0)],
            bases: Some(vec![vec![0]]),
            disjoint: true,
            provenance: "trivial(1)".into(),
            product: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of vectors (the `N` of the set).
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn vector(&self, alpha: usize) -> &StateVector {
        &self.vectors[alpha]
    }

    /// `P_alpha = |v_alpha><v_alpha|`.
    pub fn projector(&self, alpha: usize) -> ComplexMatrix {
        crate::matrix::projector_of(&self.vectors[alpha])
    }

    pub fn bases(&self) -> Option<&[Vec<usize>]> {
        self.bases.as_deref()
    }

    pub fn is_disjoint(&self) -> bool {
        self.disjoint
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn product(&self) -> Option<&ProductStructure> {
        self.product.as_ref()
    }

    /// Lowest-indexed basis containing vector `alpha`, if any.
    pub fn first_basis_of(&self, alpha: usize) -> Option<usize> {
        self.bases
            .as_ref()?
            .iter()
            .position(|basis| basis.contains(&alpha))
    }

    pub fn to_json(&self) -> Result<String> {
        let repr = SetJson {
            dim: self.dim,
            vectors: self
                .vectors
                .iter()
                .map(|v| v.amplitudes().iter().map(|a| [a.re, a.im]).collect())
                .collect(),
            bases: self.bases.clone(),
            disjoint: self.disjoint,
            provenance: self.provenance.clone(),
        };
        crate::json::to_json_string(&repr)
    }

    /// Parse and fully validate. The stored `disjoint` flag must agree with
    /// the recomputed one.
    pub fn from_json(s: &str, tol: f64) -> Result<Self> {
        let repr: SetJson = crate::json::from_json_str(s)?;
        let vectors = repr
            .vectors
            .into_iter()
            .map(|v| {
                StateVector::new(v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        let set = Self::new(repr.dim, vectors, repr.bases, repr.provenance, tol)?;
        if set.disjoint != repr.disjoint {
            return Err(Error::InvalidSet(format!(
                "stored disjoint flag {} contradicts the grouping",
                repr.disjoint
            )));
        }
        Ok(set)
    }
}

#[derive(Serialize, Deserialize)]
struct SetJson {
    dim: usize,
    vectors: Vec<Vec<[f64; 2]>>,
    bases: Option<Vec<Vec<usize>>>,
    disjoint: bool,
    provenance: String,
}

fn ket(dim: usize, k: usize) -> StateVector {
    StateVector::basis_state(dim, k)
}

fn two_term(dim: usize, k: usize, l: usize, second: Complex64) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[k] = Complex64::new(1.0, 0.0);
    amps[l] = second;
    StateVector::new(amps).expect("nonzero by construction")
}

/// The representative set of `n^2` kets: `|k>`, `(|k>+|l>)/sqrt(2)` and
/// `(|k>+i|l>)/sqrt(2)` for `k < l`. No grouping.
pub fn standard_representative(n: usize, tol: f64) -> Result<ProjectorSet> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: n });
    }
    let mut vectors: Vec<StateVector> = (0..n).map(|k| ket(n, k)).collect();
    for k in 0..n {
        for l in k + 1..n {
            vectors.push(two_term(n, k, l, Complex64::new(1.0, 0.0)));
        }
    }
    for k in 0..n {
        for l in k + 1..n {
            vectors.push(two_term(n, k, l, Complex64::new(0.0, 1.0)));
        }
    }
    ProjectorSet::new(n, vectors, None, format!("standard-representative({n})"), tol)
}

/// Linearized index of the pair `(k, l)`, `k < l`, in lexicographic order.
fn pair_index(n: usize, k: usize, l: usize) -> usize {
    debug_assert!(k < l && l < n);
    k * (2 * n - k - 1) / 2 + (l - k - 1)
}

/// The complete set of `(2n-1)n` kets: the representative set plus the
/// `(|k>-|l>)/sqrt(2)` and `(|k>-i|l>)/sqrt(2)` partners, grouped into the
/// initial basis plus one substitution basis per pair and per sign family
/// (`n^2-n+1` bases; they share the kets `|m>` for `n > 2`).
pub fn standard_complete(n: usize, tol: f64) -> Result<ProjectorSet> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: n });
    }
    let pairs = n * (n - 1) / 2;
    let mut vectors: Vec<StateVector> = (0..n).map(|k| ket(n, k)).collect();
    let blocks = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    for second in blocks {
        for k in 0..n {
            for l in k + 1..n {
                vectors.push(two_term(n, k, l, second));
            }
        }
    }
    let plus = |k, l| n + pair_index(n, k, l);
    let plus_i = |k, l| n + pairs + pair_index(n, k, l);
    let minus = |k, l| n + 2 * pairs + pair_index(n, k, l);
    let minus_i = |k, l| n + 3 * pairs + pair_index(n, k, l);

    let mut bases: Vec<Vec<usize>> = vec![(0..n).collect()];
    for k in 0..n {
        for l in k + 1..n {
            let mut basis: Vec<usize> = (0..n).collect();
            basis[k] = plus(k, l);
            basis[l] = minus(k, l);
            bases.push(basis);
        }
    }
    for k in 0..n {
        for l in k + 1..n {
            let mut basis: Vec<usize> = (0..n).collect();
            basis[k] = plus_i(k, l);
            basis[l] = minus_i(k, l);
            bases.push(basis);
        }
    }
    ProjectorSet::new(n, vectors, Some(bases), format!("standard-complete({n})"), tol)
}

/// The mutually unbiased set in prime dimension `p`: the `p+1` disjoint
/// eigenbases of `U` and of `U^m V` for `m = 0..p` (the canonical basis
/// appears as the eigenbasis of `U^0 V = V`), `N = p(p+1)` vectors.
pub fn mub_prime(p: usize, tol: f64) -> Result<ProjectorSet> {
    if !is_prime(p) {
        return Err(Error::NotPrime("mub_prime", p));
    }
    let mut generators = vec![WeylMonomial::new(p, 1, 0)?];
    for m in 0..p {
        generators.push(WeylMonomial::new(p, m, 1)?);
    }
    let spectra = crate::par::map_collect(&generators, |g| g.eigensystem(tol));
    let mut vectors = Vec::with_capacity(p * (p + 1));
    let mut bases = Vec::with_capacity(p + 1);
    for spectrum in spectra {
        let spectrum = spectrum?;
        let start = vectors.len();
        vectors.extend(spectrum.eigenvectors);
        bases.push((start..start + p).collect());
    }
    ProjectorSet::new(p, vectors, Some(bases), format!("mub-prime({p})"), tol)
}

/// Complete set from the eigenbases of all `n^2 - 1` nontrivial monomials
/// `U^k V^l` plus the canonical basis, valid in any dimension `n >= 2`.
/// Bases realizing identical projector multisets are merged, and shared
/// eigenvectors are stored once. In composite dimension degenerate monomial
/// spectra make the grouping less regular (it need not be disjoint); no
/// perfectness is claimed.
pub fn weyl_complete(n: usize, tol: f64) -> Result<ProjectorSet> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: n });
    }
    let monomials: Vec<WeylMonomial> = (0..n)
        .flat_map(|k| (0..n).map(move |l| (k, l)))
        .filter(|&(k, l)| !(k == 0 && l == 0))
        .map(|(k, l)| WeylMonomial::new(n, k, l))
        .collect::<Result<Vec<_>>>()?;
    let spectra = crate::par::map_collect(&monomials, |m| m.eigensystem(tol));

    let mut pool: Vec<StateVector> = (0..n).map(|k| ket(n, k)).collect();
    let mut bases: Vec<Vec<usize>> = vec![(0..n).collect()];
    let dup = DUPLICATE_PROJECTOR_TOL * DUPLICATE_PROJECTOR_TOL;

    for spectrum in spectra {
        let spectrum = spectrum?;
        let mut basis = Vec::with_capacity(n);
        for v in spectrum.eigenvectors {
            let idx = match pool.iter().position(|w| v.projector_distance_sqr(w) < dup) {
                Some(i) => i,
                None => {
                    pool.push(v);
                    pool.len() - 1
                }
            };
            basis.push(idx);
        }
        let mut sorted = basis.clone();
        sorted.sort_unstable();
        let duplicate = bases.iter().any(|b| {
            let mut s = b.clone();
            s.sort_unstable();
            s == sorted
        });
        if !duplicate {
            bases.push(basis);
        }
    }

    ProjectorSet::new(
        n,
        pool,
        Some(bases),
        format!("weyl-complete({n}): complete (constructed grouping)"),
        tol,
    )
}

/// Tensor product of two sets: all `N_a * N_b` product kets, labeled by their
/// per-factor indices. When both inputs are grouped, the output grouping is
/// all pairs of bases; a tensor product of disjoint groupings is disjoint.
/// (Products of perfect sets are only almost perfect: vectors from different
/// product bases can be orthogonal.)
pub fn compose(a: &ProjectorSet, b: &ProjectorSet, tol: f64) -> Result<ProjectorSet> {
    let dim = a.dim() * b.dim();
    let mut vectors = Vec::with_capacity(a.len() * b.len());
    let mut labels = Vec::with_capacity(a.len() * b.len());
    let label_of = |set: &ProjectorSet, i: usize| -> Vec<usize> {
        match set.product() {
            Some(p) => p.labels[i].0.clone(),
            None => vec![i],
        }
    };
    for ia in 0..a.len() {
        for ib in 0..b.len() {
            vectors.push(a.vector(ia).tensor(b.vector(ib)));
            let mut label = label_of(a, ia);
            label.extend(label_of(b, ib));
            labels.push(ProductLabel(label));
        }
    }
    let bases = match (a.bases(), b.bases()) {
        (Some(ba), Some(bb)) => {
            let mut bases = Vec::with_capacity(ba.len() * bb.len());
            for basis_a in ba {
                for basis_b in bb {
                    let mut basis = Vec::with_capacity(dim);
                    for &ia in basis_a {
                        for &ib in basis_b {
                            basis.push(ia * b.len() + ib);
                        }
                    }
                    bases.push(basis);
                }
            }
            Some(bases)
        }
        _ => None,
    };
    let factor_dims: Vec<usize> = {
        let dims_of = |set: &ProjectorSet| match set.product() {
            Some(p) => p.factor_dims.clone(),
            None => vec![set.dim()],
        };
        let mut d = dims_of(a);
        d.extend(dims_of(b));
        d
    };
    let provenance = format!("compose({}, {})", a.provenance(), b.provenance());
    let mut set = ProjectorSet::new(dim, vectors, bases, provenance, tol)?;
    set.product = Some(ProductStructure { factor_dims, labels });
    Ok(set)
}

/// The discrete Fourier matrix `F[j][k] = z^(jk)/sqrt(n)`. Conjugating the
/// monomial algebra by `F^-1` maps `U^k V^l` to `V^k U^(-l)`, so `F` is an
/// automorphism of every monomial eigenbasis family.
pub fn fourier_matrix(n: usize) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: n });
    }
    let scale = 1.0 / (n as f64).sqrt();
    Ok(ComplexMatrix::from_fn(n, n, |j, k| {
        root_of_unity(n, (j * k) as i64) * scale
    }))
}
