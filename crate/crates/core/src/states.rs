//! Density operators and their spectral and Schatten decompositions.
//!
//! A Schatten decomposition splits every degenerate eigenspace into rank-one
//! projectors. Under degeneracy the split is not unique: each degenerate
//! block of dimension `d` carries a `d x d` unitary of freedom, which is what
//! [`schatten_decomposition`] takes as `block_rotations` and what
//! [`sample_schatten`] draws Haar-randomly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    frobenius_distance, hermitian_eig, re, ComplexMatrix, HermitianEig, C64, DEFAULT_ZERO_TOL,
};
use crate::random::{flat_dirichlet, haar_unitary, rng, stream_rng};
use crate::tol::Tolerances;

/// Default absolute gap below which eigenvalues are clustered as degenerate.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

/// Tolerance used when checking decomposition invariants.
pub const DECOMPOSITION_TOL: f64 = 1e-9;

/// A validated density matrix: Hermitian, PSD and unit trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        validate_density(&m)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(d: DensityMatrix) -> Self {
        d.matrix
    }
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// |k⟩⟨k| in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = re(1.0);
        Self { matrix: m }
    }

    /// |ψ⟩⟨ψ| for a nonzero vector, normalized here.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n = crate::linalg::vec_norm(psi);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::TraceNotOne { trace: n * n });
        }
        let v: Vec<C64> = psi.iter().map(|z| z / n).collect();
        Ok(Self {
            matrix: ComplexMatrix::outer(&v),
        })
    }

    pub fn diagonal(p: &[f64]) -> Result<Self> {
        validate_density(&ComplexMatrix::diag(p))
    }

    /// Σ w_k ρ_k for a probability vector `w`.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        check_distribution(weights, 1e-12)?;
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::LengthMismatch {
                context: "mixture".into(),
                expected: states.len(),
                found: weights.len(),
            });
        }
        let dim = states[0].dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != dim {
                return Err(Error::DimMismatch {
                    context: "mixture".into(),
                    expected: dim,
                    found: s.dim(),
                });
            }
            acc = &acc + &s.matrix.scale_real(*w);
        }
        Ok(Self::from_trusted(acc))
    }

    /// Wraps a matrix produced by a trusted construction (convex mixture,
    /// CPTP image) after symmetrizing it. Callers guarantee validity up to
    /// rounding.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self {
            matrix: m.hermitian_part(),
        }
    }

    pub fn eig(&self) -> HermitianEig {
        hermitian_eig(&self.matrix).expect("density matrices are Hermitian")
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eig().eigenvalues
    }

    pub fn purity(&self) -> f64 {
        self.matrix.data().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }
}

/// Checks the density-matrix invariants with the default tolerances.
pub fn validate_density(m: &ComplexMatrix) -> Result<DensityMatrix> {
    validate_density_with(m, &Tolerances::default())
}

pub fn validate_density_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let defect = m.hermitian_defect();
    if defect > tol.hermitian_tol {
        return Err(Error::NotHermitian { defect });
    }
    let h = m.hermitian_part();
    let eig = hermitian_eig(&h)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -tol.positivity_tol {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    let tr = h.trace()?.re;
    if (tr - 1.0).abs() > tol.trace_tol {
        return Err(Error::TraceNotOne { trace: tr });
    }
    Ok(DensityMatrix { matrix: h })
}

/// Checks that `p` is a probability vector: nonnegative within 1e-12 and
/// summing to one within `sum_tol`.
pub fn check_distribution(p: &[f64], sum_tol: f64) -> Result<()> {
    if p.is_empty() {
        return Err(Error::NotDistribution {
            reason: "empty vector".into(),
        });
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < -1e-12) {
        return Err(Error::NotDistribution {
            reason: format!("entry {x} is negative or non-finite"),
        });
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > sum_tol {
        return Err(Error::NotDistribution {
            reason: format!("entries sum to {s}"),
        });
    }
    Ok(())
}

/// Eigenvalues clustered into degenerate blocks.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Distinct eigenvalues, descending (block means).
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    /// Orthonormal eigenvectors spanning each block.
    pub block_vectors: Vec<Vec<Vec<C64>>>,
    pub dim: usize,
}

impl SpectralDecomposition {
    pub fn projector(&self, k: usize) -> ComplexMatrix {
        let mut p = ComplexMatrix::zeros(self.dim, self.dim);
        for v in &self.block_vectors[k] {
            p = &p + &ComplexMatrix::outer(v);
        }
        p
    }

    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        (0..self.eigenvalues.len()).map(|k| self.projector(k)).collect()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            m = &m + &self.projector(k).scale_real(l);
        }
        m
    }

    /// Indices of blocks that carry unitary freedom in a Schatten
    /// decomposition: multiplicity above one and eigenvalue above `zero_tol`.
    pub fn degenerate_blocks(&self, zero_tol: f64) -> Vec<usize> {
        (0..self.eigenvalues.len())
            .filter(|&k| self.multiplicities[k] > 1 && self.eigenvalues[k] > zero_tol)
            .collect()
    }

    pub fn is_nondegenerate(&self, zero_tol: f64) -> bool {
        self.degenerate_blocks(zero_tol).is_empty()
    }
}

/// Clusters the spectrum of `rho` into degenerate blocks: consecutive sorted
/// eigenvalues closer than `gap_tol` share a block.
pub fn spectral_decomposition(rho: &DensityMatrix, gap_tol: f64) -> SpectralDecomposition {
    let eig = rho.eig();
    let n = eig.dim();
    let mut eigenvalues = Vec::new();
    let mut multiplicities = Vec::new();
    let mut block_vectors: Vec<Vec<Vec<C64>>> = Vec::new();
    let mut members: Vec<f64> = Vec::new();
    for i in 0..n {
        let l = eig.eigenvalues[i];
        let starts_new = i == 0 || eig.eigenvalues[i - 1] - l >= gap_tol;
        if starts_new {
            if !members.is_empty() {
                eigenvalues.push(members.iter().sum::<f64>() / members.len() as f64);
                multiplicities.push(members.len());
                members.clear();
            }
            block_vectors.push(Vec::new());
        }
        members.push(l);
        block_vectors.last_mut().unwrap().push(eig.vector(i));
    }
    eigenvalues.push(members.iter().sum::<f64>() / members.len() as f64);
    multiplicities.push(members.len());
    SpectralDecomposition {
        eigenvalues,
        multiplicities,
        block_vectors,
        dim: n,
    }
}

/// ρ = Σ_k λ_k |e_k⟩⟨e_k| with orthonormal e_k and weights λ_k > 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchattenDecomposition {
    pub weights: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

impl SchattenDecomposition {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn projector(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vectors[k])
    }

    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        (0..self.len()).map(|k| self.projector(k)).collect()
    }

    pub fn element(&self, k: usize) -> DensityMatrix {
        DensityMatrix::from_trusted(self.projector(k))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for k in 0..self.len() {
            m = &m + &self.projector(k).scale_real(self.weights[k]);
        }
        m
    }

    /// Largest |⟨e_j|e_k⟩| over j ≠ k.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.len() {
            for k in (j + 1)..self.len() {
                worst = worst.max(crate::linalg::inner(&self.vectors[j], &self.vectors[k]).norm());
            }
        }
        worst
    }

    /// Frobenius distance between Σ λ_k E_k and ρ.
    pub fn reconstruction_defect(&self, rho: &DensityMatrix) -> f64 {
        frobenius_distance(&self.reconstruct(), rho.matrix())
    }

    pub fn to_orthogonal(&self) -> OrthogonalDecomposition {
        OrthogonalDecomposition {
            weights: self.weights.clone(),
            parts: (0..self.len()).map(|k| self.element(k)).collect(),
        }
    }
}

/// Builds a Schatten decomposition from a spectral one.
///
/// `block_rotations`, when given, holds one unitary per entry of
/// [`SpectralDecomposition::degenerate_blocks`] (at the default zero
/// tolerance), in order; block `k`'s rank-one vectors become the columns of
/// `V_k · U_k`. Eigenvalues at or below 1e-12 are dropped.
pub fn schatten_decomposition(
    spec: &SpectralDecomposition,
    block_rotations: Option<&[ComplexMatrix]>,
) -> Result<SchattenDecomposition> {
    schatten_with_zero_tol(spec, block_rotations, DEFAULT_ZERO_TOL)
}

pub fn schatten_with_zero_tol(
    spec: &SpectralDecomposition,
    block_rotations: Option<&[ComplexMatrix]>,
    zero_tol: f64,
) -> Result<SchattenDecomposition> {
    let degenerate = spec.degenerate_blocks(zero_tol);
    if let Some(rots) = block_rotations {
        if rots.len() != degenerate.len() {
            return Err(Error::LengthMismatch {
                context: "block rotations".into(),
                expected: degenerate.len(),
                found: rots.len(),
            });
        }
        for (i, (&b, r)) in degenerate.iter().zip(rots).enumerate() {
            let d = spec.multiplicities[b];
            if r.rows() != d || r.cols() != d {
                return Err(Error::BlockShapeMismatch {
                    block: i,
                    expected: d,
                    found: r.rows().max(r.cols()),
                });
            }
        }
    }
    let mut weights = Vec::new();
    let mut vectors = Vec::new();
    for (k, &l) in spec.eigenvalues.iter().enumerate() {
        if l <= zero_tol {
            continue;
        }
        let block = &spec.block_vectors[k];
        let rotation = block_rotations.and_then(|rots| {
            degenerate.iter().position(|&b| b == k).map(|i| &rots[i])
        });
        match rotation {
            Some(u) => {
                for j in 0..block.len() {
                    let mut v = vec![C64::default(); spec.dim];
                    for (i, bv) in block.iter().enumerate() {
                        let coeff = u[(i, j)];
                        for (x, y) in v.iter_mut().zip(bv) {
                            *x += coeff * y;
                        }
                    }
                    weights.push(l);
                    vectors.push(v);
                }
            }
            None => {
                for v in block {
                    weights.push(l);
                    vectors.push(v.clone());
                }
            }
        }
    }
    // dropped kernel mass and block averaging leave the sum slightly off one
    let s: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= s;
    }
    Ok(SchattenDecomposition { weights, vectors })
}

/// Haar-random unitaries, one per degenerate block of `spec`.
pub fn random_block_rotations<R: Rng + ?Sized>(
    spec: &SpectralDecomposition,
    zero_tol: f64,
    rng: &mut R,
) -> Vec<ComplexMatrix> {
    spec.degenerate_blocks(zero_tol)
        .into_iter()
        .map(|b| haar_unitary(spec.multiplicities[b], rng))
        .collect()
}

/// Schatten decomposition with an independent Haar rotation in every
/// degenerate block. Deterministic in `seed`.
pub fn sample_schatten(spec: &SpectralDecomposition, seed: u64) -> SchattenDecomposition {
    let mut r = rng(seed);
    let rots = random_block_rotations(spec, DEFAULT_ZERO_TOL, &mut r);
    schatten_decomposition(spec, Some(&rots)).expect("rotation shapes match their blocks")
}

/// Random state of the given rank: flat Dirichlet spectrum on `rank` levels
/// in a Haar-random frame.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::RankOutOfRange { dim, rank });
    }
    let mut r = rng(seed);
    let mut spectrum = flat_dirichlet(rank, &mut r);
    spectrum.resize(dim, 0.0);
    let u = haar_unitary(dim, &mut r);
    Ok(state_from_frame(&spectrum, &u))
}

/// U · diag(spectrum) · U† for a probability vector `spectrum`.
pub fn state_from_frame(spectrum: &[f64], frame: &ComplexMatrix) -> DensityMatrix {
    let d = ComplexMatrix::diag(spectrum);
    DensityMatrix::from_trusted(frame.conjugate(&d).expect("square frame"))
}

/// A state with exactly repeated eigenvalues: `spectrum` in a random frame
/// drawn from `seed`.
pub fn density_with_spectrum(spectrum: &[f64], seed: u64) -> Result<DensityMatrix> {
    check_distribution(spectrum, 1e-12)?;
    let u = haar_unitary(spectrum.len(), &mut stream_rng(seed, 17));
    Ok(state_from_frame(spectrum, &u))
}

/// ρ = Σ λ_k ρ_k with pairwise orthogonal ranges.
#[derive(Debug, Clone)]
pub struct OrthogonalDecomposition {
    pub weights: Vec<f64>,
    pub parts: Vec<DensityMatrix>,
}

impl OrthogonalDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.parts[0].dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (w, p) in self.weights.iter().zip(&self.parts) {
            m = &m + &p.matrix().scale_real(*w);
        }
        m
    }

    /// Largest ‖ρ_j ρ_k‖_F over j ≠ k.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.parts.len() {
            for k in (j + 1)..self.parts.len() {
                let prod = self.parts[j].matrix().matmul(self.parts[k].matrix()).unwrap();
                worst = worst.max(prod.frobenius_norm());
            }
        }
        worst
    }

    /// Checks orthogonality and reconstruction of `rho` at 1e-9.
    pub fn check(&self, rho: &DensityMatrix) -> Result<()> {
        if self.parts.is_empty() || self.weights.len() != self.parts.len() {
            return Err(Error::LengthMismatch {
                context: "orthogonal decomposition".into(),
                expected: self.parts.len(),
                found: self.weights.len(),
            });
        }
        let defect = frobenius_distance(&self.reconstruct(), rho.matrix())
            .max(self.orthogonality_defect());
        if defect > DECOMPOSITION_TOL {
            return Err(Error::DecompositionMismatch { defect });
        }
        Ok(())
    }

    /// Splits each part into its own Schatten decomposition and flattens the
    /// result, giving a Schatten decomposition of the whole state.
    pub fn refine(&self, gap_tol: f64) -> SchattenDecomposition {
        let mut weights = Vec::new();
        let mut vectors = Vec::new();
        for (w, part) in self.weights.iter().zip(&self.parts) {
            let s = schatten_decomposition(&spectral_decomposition(part, gap_tol), None)
                .expect("no rotations given");
            for (mu, v) in s.weights.into_iter().zip(s.vectors) {
                weights.push(w * mu);
                vectors.push(v);
            }
        }
        SchattenDecomposition { weights, vectors }
    }
}

/// Groups the terms of a Schatten decomposition into `groups` (a partition
/// of its indices), giving an orthogonal decomposition with mixed parts.
pub fn coarse_grain(s: &SchattenDecomposition, groups: &[Vec<usize>]) -> OrthogonalDecomposition {
    let d = s.dim();
    let mut weights = Vec::new();
    let mut parts = Vec::new();
    for g in groups.iter().filter(|g| !g.is_empty()) {
        let w: f64 = g.iter().map(|&k| s.weights[k]).sum();
        let mut m = ComplexMatrix::zeros(d, d);
        for &k in g {
            m = &m + &s.projector(k).scale_real(s.weights[k] / w);
        }
        weights.push(w);
        parts.push(DensityMatrix::from_trusted(m));
    }
    OrthogonalDecomposition { weights, parts }
}

/// Random partition of the Schatten terms into at most `max_groups` groups.
pub fn random_coarse_graining<R: Rng + ?Sized>(
    s: &SchattenDecomposition,
    max_groups: usize,
    rng: &mut R,
) -> OrthogonalDecomposition {
    let g = max_groups.clamp(1, s.len().max(1));
    let mut groups = vec![Vec::new(); g];
    for k in 0..s.len() {
        groups[rng.random_range(0..g)].push(k);
    }
    coarse_grain(s, &groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, unitarity_defect};

    fn hadamard() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real_rows(&[vec![s, s], vec![s, -s]]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(validate_density(&ComplexMatrix::identity(2).scale_real(0.5)).is_ok());
        match validate_density(&ComplexMatrix::diag(&[0.7, 0.4])) {
            Err(Error::TraceNotOne { trace }) => assert!((trace - 1.1).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            validate_density(&ComplexMatrix::diag(&[1.2, -0.2])),
            Err(Error::NotPositive { .. })
        ));
        let nh = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.1, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.0)],
        ])
        .unwrap();
        assert!(matches!(validate_density(&nh), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn spectral_examples() {
        let s = spectral_decomposition(&DensityMatrix::maximally_mixed(3), DEFAULT_GAP_TOL);
        assert_eq!(s.multiplicities, vec![3]);
        assert!((s.eigenvalues[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!(frobenius_distance(&s.projector(0), &ComplexMatrix::identity(3)) < 1e-14);

        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let s = spectral_decomposition(&rho, DEFAULT_GAP_TOL);
        assert_eq!(s.multiplicities, vec![1, 1, 1]);
        assert!(frobenius_distance(&s.reconstruct(), rho.matrix()) < 1e-14);

        let rho = DensityMatrix::diagonal(&[0.4, 0.4 - 1e-14, 0.2]).unwrap();
        let s = spectral_decomposition(&rho, 1e-8);
        assert_eq!(s.multiplicities, vec![2, 1]);
        assert!((s.eigenvalues[0] - 0.4).abs() < 1e-13);
    }

    #[test]
    fn projectors_idempotent_and_orthogonal() {
        let rho = density_with_spectrum(&[0.3, 0.3, 0.2, 0.2], 9).unwrap();
        let s = spectral_decomposition(&rho, DEFAULT_GAP_TOL);
        assert_eq!(s.multiplicities, vec![2, 2]);
        let ps = s.projectors();
        for (i, p) in ps.iter().enumerate() {
            assert!(frobenius_distance(&p.matmul(p).unwrap(), p) < 1e-9);
            for q in &ps[i + 1..] {
                assert!(p.matmul(q).unwrap().frobenius_norm() < 1e-9);
            }
        }
        assert!(frobenius_distance(&s.reconstruct(), rho.matrix()) < 1e-9);
    }

    #[test]
    fn schatten_nondegenerate_is_unique() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let spec = spectral_decomposition(&rho, DEFAULT_GAP_TOL);
        let a = schatten_decomposition(&spec, None).unwrap();
        let b = schatten_decomposition(&spec, Some(&[])).unwrap();
        let c = sample_schatten(&spec, 42);
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.weights, vec![0.5, 0.3, 0.2]);
    }

    #[test]
    fn schatten_rotations_of_maximally_mixed_qubit() {
        let spec = spectral_decomposition(&DensityMatrix::maximally_mixed(2), DEFAULT_GAP_TOL);
        let id = schatten_decomposition(&spec, Some(&[ComplexMatrix::identity(2)])).unwrap();
        assert!(frobenius_distance(&id.projector(0), &ComplexMatrix::diag(&[1.0, 0.0])) < 1e-14);
        assert!(frobenius_distance(&id.projector(1), &ComplexMatrix::diag(&[0.0, 1.0])) < 1e-14);

        let had = schatten_decomposition(&spec, Some(&[hadamard()])).unwrap();
        let plus = ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let minus = ComplexMatrix::from_real_rows(&[vec![0.5, -0.5], vec![-0.5, 0.5]]).unwrap();
        assert!(frobenius_distance(&had.projector(0), &plus) < 1e-14);
        assert!(frobenius_distance(&had.projector(1), &minus) < 1e-14);
        assert_eq!(had.weights, vec![0.5, 0.5]);
    }

    #[test]
    fn schatten_rejects_bad_rotation() {
        let spec = spectral_decomposition(&DensityMatrix::maximally_mixed(2), DEFAULT_GAP_TOL);
        assert!(matches!(
            schatten_decomposition(&spec, Some(&[ComplexMatrix::identity(3)])),
            Err(Error::BlockShapeMismatch { expected: 2, found: 3, .. })
        ));
    }

    #[test]
    fn sampled_decompositions_of_mixed_states() {
        let half = DensityMatrix::maximally_mixed(2);
        let spec = spectral_decomposition(&half, DEFAULT_GAP_TOL);
        for seed in [1, 2] {
            let s = sample_schatten(&spec, seed);
            assert!(s.reconstruction_defect(&half) < 1e-9);
        }
        assert_ne!(sample_schatten(&spec, 1), sample_schatten(&spec, 2));

        let quarter = DensityMatrix::maximally_mixed(4);
        let s = sample_schatten(&spectral_decomposition(&quarter, DEFAULT_GAP_TOL), 5);
        assert_eq!(s.len(), 4);
        assert!(s.weights.iter().all(|&w| (w - 0.25).abs() < 1e-14));
        assert!(s.orthogonality_defect() < 1e-9);
        for k in 0..4 {
            let p = s.projector(k);
            assert!(frobenius_distance(&p.matmul(&p).unwrap(), &p) < 1e-9);
        }
    }

    #[test]
    fn random_density_examples() {
        let pure = random_density(2, 1, 0).unwrap();
        let ev = pure.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-12 && ev[1].abs() < 1e-12);

        let full = random_density(4, 4, 3).unwrap();
        assert!((full.matrix().trace().unwrap().re - 1.0).abs() < 1e-12);
        assert!(full.eigenvalues().iter().all(|&l| l > 1e-12));
        assert_eq!(full, random_density(4, 4, 3).unwrap());

        assert!(matches!(random_density(3, 4, 0), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(random_density(3, 0, 0), Err(Error::RankOutOfRange { .. })));
    }

    #[test]
    fn zero_eigenvalues_are_dropped() {
        let rho = random_density(4, 2, 8).unwrap();
        let s = schatten_decomposition(&spectral_decomposition(&rho, DEFAULT_GAP_TOL), None).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.reconstruction_defect(&rho) < 1e-9);
    }

    #[test]
    fn coarse_grain_and_refine() {
        let rho = random_density(4, 4, 21).unwrap();
        let s = schatten_decomposition(&spectral_decomposition(&rho, DEFAULT_GAP_TOL), None).unwrap();
        let d = coarse_grain(&s, &[vec![0, 3], vec![1, 2]]);
        d.check(&rho).unwrap();
        let r = d.refine(DEFAULT_GAP_TOL);
        assert!(r.reconstruction_defect(&rho) < 1e-9);
        assert!(r.orthogonality_defect() < 1e-9);
    }

    #[test]
    fn block_rotation_helpers() {
        let rho = density_with_spectrum(&[0.25; 4], 3).unwrap();
        let spec = spectral_decomposition(&rho, DEFAULT_GAP_TOL);
        let rots = random_block_rotations(&spec, DEFAULT_ZERO_TOL, &mut rng(1));
        assert_eq!(rots.len(), 1);
        assert!(unitarity_defect(&rots[0]) < 1e-12);
    }
}
