//! Quantum mutual entropy of a state and a channel.
//!
//! For a Schatten decomposition E = {λ_k, E_k} of ρ the compound state is
//! σ_E = Σ λ_k E_k ⊗ Λ*E_k, and the mutual entropy is the supremum of
//! S(σ_E, ρ ⊗ Λ*ρ) = Σ λ_k S(Λ*E_k, Λ*ρ) over all Schatten decompositions.
//! Non-degenerate spectra admit exactly one decomposition and the value is
//! exact; degenerate spectra are searched over the unitary freedom inside
//! each degenerate eigenspace and reported as a lower bound.
//!
//! The same module holds the orthogonal-decomposition form, the classical
//! input forms (relative-entropy sum and entropy difference), and the pseudo
//! mutual entropy whose supremum runs over non-orthogonal pure
//! decompositions.

use serde::{Deserialize, Serialize};

use crate::channels::{QuantumChannel, QuantumCoding};
use crate::entropy::{
    relative_entropy_operators, von_neumann, EntropyValue, RelativeTo,
};
use crate::error::{Error, Result};
use crate::linalg::{
    frobenius_distance, inner, partial_trace_first, partial_trace_second, tensor, ComplexMatrix, C64,
};
use crate::random::{haar_unitary, stream_rng};
use crate::search::{
    best_of, coordinate_ascent, generator_dim, identity_rotations, rotate_left, rotate_right,
    SearchParams,
};
use crate::states::{
    check_distribution, random_block_rotations, schatten_with_zero_tol, spectral_decomposition,
    DensityMatrix, OrthogonalDecomposition, SchattenDecomposition, SpectralDecomposition,
    DECOMPOSITION_TOL,
};

/// σ_E on the input ⊗ output space, with the decomposition it was built from.
#[derive(Debug, Clone)]
pub struct CompoundState {
    pub state: DensityMatrix,
    pub decomposition: SchattenDecomposition,
    pub dim_in: usize,
    pub dim_out: usize,
}

impl CompoundState {
    pub fn input_marginal(&self) -> ComplexMatrix {
        partial_trace_second(self.state.matrix(), self.dim_in, self.dim_out)
    }

    pub fn output_marginal(&self) -> ComplexMatrix {
        partial_trace_first(self.state.matrix(), self.dim_in, self.dim_out)
    }
}

/// A pure, not necessarily orthogonal, decomposition ρ = Σ λ_k |ψ_k⟩⟨ψ_k|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureDecomposition {
    pub weights: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

impl PureDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.vectors[0].len();
        let mut m = ComplexMatrix::zeros(d, d);
        for (w, v) in self.weights.iter().zip(&self.vectors) {
            m = &m + &ComplexMatrix::outer(v).scale_real(*w);
        }
        m
    }
}

impl From<SchattenDecomposition> for PureDecomposition {
    fn from(s: SchattenDecomposition) -> Self {
        Self {
            weights: s.weights,
            vectors: s.vectors,
        }
    }
}

/// The decomposition attaining a reported value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Schatten(SchattenDecomposition),
    Pure(PureDecomposition),
}

/// Best value of a supremum search.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub value: EntropyValue,
    pub witness: Witness,
    pub evaluations: usize,
    /// The search domain was a single point.
    pub is_exact: bool,
    /// `value` is the best found, a lower bound on the supremum.
    pub lower_bound: bool,
    /// Index of a decomposition term whose relative entropy was infinite.
    pub infinite_term: Option<usize>,
}

pub(crate) fn check_channel_input(rho: &DensityMatrix, ch: &QuantumChannel) -> Result<()> {
    if rho.dim() != ch.dim_in() {
        return Err(Error::DimMismatch {
            context: "channel input".into(),
            expected: ch.dim_in(),
            found: rho.dim(),
        });
    }
    Ok(())
}

fn check_decomposes(rho: &DensityMatrix, e: &SchattenDecomposition) -> Result<()> {
    if e.dim() != rho.dim() {
        return Err(Error::DimMismatch {
            context: "decomposition".into(),
            expected: rho.dim(),
            found: e.dim(),
        });
    }
    let defect = e.reconstruction_defect(rho);
    if defect > DECOMPOSITION_TOL {
        return Err(Error::DecompositionMismatch { defect });
    }
    Ok(())
}

/// σ_E = Σ λ_k E_k ⊗ Λ*E_k.
pub fn compound_state(rho: &DensityMatrix, ch: &QuantumChannel, e: &SchattenDecomposition) -> Result<CompoundState> {
    check_channel_input(rho, ch)?;
    check_decomposes(rho, e)?;
    let (din, dout) = (ch.dim_in(), ch.dim_out());
    let mut acc = ComplexMatrix::zeros(din * dout, din * dout);
    for k in 0..e.len() {
        let ek = e.projector(k);
        let out = ch.map_operator(&ek);
        acc = &acc + &tensor(&ek, &out).scale_real(e.weights[k]);
    }
    Ok(CompoundState {
        state: DensityMatrix::from_trusted(acc),
        decomposition: e.clone(),
        dim_in: din,
        dim_out: dout,
    })
}

/// Weighted sum Σ λ_k S(Λ*ρ_k, Λ*ρ) with the index of the first infinite
/// term, if any. `parts` are PSD operators on the input space.
pub(crate) fn weighted_relative_sum(
    ch: &QuantumChannel,
    reference: &RelativeTo,
    weights: &[f64],
    parts: impl Iterator<Item = ComplexMatrix>,
) -> Result<(f64, Option<usize>)> {
    let mut acc = 0.0;
    for (k, (w, part)) in weights.iter().zip(parts).enumerate() {
        if *w <= 0.0 {
            continue;
        }
        let r = reference.of(&ch.map_operator(&part))?;
        if r.value.is_infinite() {
            return Ok((f64::INFINITY, Some(k)));
        }
        acc += w * r.value.nats();
    }
    Ok((acc, None))
}

pub(crate) fn output_reference(rho: &DensityMatrix, ch: &QuantumChannel, search: &SearchParams) -> Result<RelativeTo> {
    RelativeTo::new(
        ch.image(rho).matrix(),
        search.zero_tol,
        search.support_tol,
    )
}

pub(crate) fn schatten_value(
    ch: &QuantumChannel,
    reference: &RelativeTo,
    e: &SchattenDecomposition,
) -> Result<(f64, Option<usize>)> {
    weighted_relative_sum(ch, reference, &e.weights, (0..e.len()).map(|k| e.projector(k)))
}

/// Σ_k λ_k S(Λ*E_k, Λ*ρ) for one Schatten decomposition.
pub fn mutual_for_decomposition(
    rho: &DensityMatrix,
    ch: &QuantumChannel,
    e: &SchattenDecomposition,
) -> Result<EntropyValue> {
    check_channel_input(rho, ch)?;
    check_decomposes(rho, e)?;
    let reference = output_reference(rho, ch, &SearchParams::default())?;
    let (v, _) = schatten_value(ch, &reference, e)?;
    Ok(EntropyValue::new(v))
}

/// S(σ_E, ρ ⊗ Λ*ρ) evaluated on the compound state directly.
pub fn mutual_via_compound(
    rho: &DensityMatrix,
    ch: &QuantumChannel,
    e: &SchattenDecomposition,
) -> Result<EntropyValue> {
    let compound = compound_state(rho, ch, e)?;
    let product = tensor(rho.matrix(), ch.image(rho).matrix());
    let r = relative_entropy_operators(compound.state.matrix(), &product, 1e-12, 1e-10)?;
    Ok(EntropyValue::new(r.value.nats()))
}

/// Both forms of the per-decomposition value.
#[derive(Debug, Clone, Copy)]
pub struct FormCheck {
    pub decomposition_form: EntropyValue,
    pub compound_form: EntropyValue,
}

impl FormCheck {
    pub fn difference(&self) -> f64 {
        let (a, b) = (self.decomposition_form.nats(), self.compound_form.nats());
        if a.is_infinite() && b.is_infinite() {
            0.0
        } else {
            (a - b).abs()
        }
    }

    pub fn agrees(&self, tol: f64) -> bool {
        self.difference() <= tol
    }
}

/// Verification mode: evaluates the decomposition sum and the compound-state
/// relative entropy side by side.
pub fn cross_check_forms(
    rho: &DensityMatrix,
    ch: &QuantumChannel,
    e: &SchattenDecomposition,
) -> Result<FormCheck> {
    Ok(FormCheck {
        decomposition_form: mutual_for_decomposition(rho, ch, e)?,
        compound_form: mutual_via_compound(rho, ch, e)?,
    })
}

struct DegenerateSearch<'a> {
    spec: &'a SpectralDecomposition,
    block_dims: Vec<usize>,
    zero_tol: f64,
}

impl DegenerateSearch<'_> {
    fn n_params(&self) -> usize {
        self.block_dims.iter().map(|&d| generator_dim(d)).sum()
    }

    fn decomposition(&self, base: &[ComplexMatrix], params: &[f64]) -> SchattenDecomposition {
        let mut offset = 0;
        let rots: Vec<ComplexMatrix> = base
            .iter()
            .zip(&self.block_dims)
            .map(|(u, &d)| {
                let n = generator_dim(d);
                let r = rotate_right(u, &params[offset..offset + n]);
                offset += n;
                r
            })
            .collect();
        schatten_with_zero_tol(self.spec, Some(&rots), self.zero_tol).expect("rotation shapes match")
    }
}

/// I(ρ; Λ*): supremum over Schatten decompositions.
///
/// Restart 0 starts from the canonical eigenbasis; restarts 1..=R draw
/// Haar rotations in every degenerate block. Each start is refined by
/// coordinate ascent over the off-diagonal block generators.
pub fn mutual_entropy(rho: &DensityMatrix, ch: &QuantumChannel, search: &SearchParams) -> Result<SearchOutcome> {
    check_channel_input(rho, ch)?;
    let spec = spectral_decomposition(rho, search.gap_tol);
    let reference = output_reference(rho, ch, search)?;
    let blocks = spec.degenerate_blocks(search.zero_tol);

    if blocks.is_empty() {
        let e = schatten_with_zero_tol(&spec, None, search.zero_tol)?;
        let (v, inf) = schatten_value(ch, &reference, &e)?;
        return Ok(SearchOutcome {
            value: EntropyValue::new(v),
            witness: Witness::Schatten(e),
            evaluations: 1,
            is_exact: true,
            lower_bound: false,
            infinite_term: inf,
        });
    }

    let ds = DegenerateSearch {
        spec: &spec,
        block_dims: blocks.iter().map(|&b| spec.multiplicities[b]).collect(),
        zero_tol: search.zero_tol,
    };
    let n_params = ds.n_params();
    let best = best_of(search.restarts + 1, |r| {
        let base = if r == 0 {
            identity_rotations(&ds.block_dims)
        } else {
            random_block_rotations(&spec, search.zero_tol, &mut stream_rng(search.seed, r as u64))
        };
        let mut objective = |x: &[f64]| {
            schatten_value(ch, &reference, &ds.decomposition(&base, x))
                .map(|(v, _)| v)
                .unwrap_or(f64::NEG_INFINITY)
        };
        let refined = coordinate_ascent(
            &mut objective,
            vec![0.0; n_params],
            search.step_start,
            search.step_min,
            search.refine_max_iters,
        );
        let e = ds.decomposition(&base, &refined.x);
        (e, refined.value, refined.evaluations)
    })
    .expect("at least one restart");
    let (e, _, evaluations) = best;
    let (v, inf) = schatten_value(ch, &reference, &e)?;
    Ok(SearchOutcome {
        value: EntropyValue::new(v),
        witness: Witness::Schatten(e),
        evaluations,
        is_exact: false,
        lower_bound: true,
        infinite_term: inf,
    })
}

/// Σ λ_k S(Λ*ρ_k, Λ*ρ) for an orthogonal decomposition ρ = Σ λ_k ρ_k.
pub fn mutual_orthogonal(
    rho: &DensityMatrix,
    ch: &QuantumChannel,
    d: &OrthogonalDecomposition,
) -> Result<EntropyValue> {
    check_channel_input(rho, ch)?;
    d.check(rho)?;
    let reference = output_reference(rho, ch, &SearchParams::default())?;
    let (v, _) = weighted_relative_sum(
        ch,
        &reference,
        &d.weights,
        d.parts.iter().map(|p| p.matrix().clone()),
    )?;
    Ok(EntropyValue::new(v))
}

fn check_codes(lambda: &[f64], codes: &QuantumCoding, ch: &QuantumChannel) -> Result<()> {
    if lambda.len() != codes.n_symbols() {
        return Err(Error::LengthMismatch {
            context: "input distribution vs coding".into(),
            expected: codes.n_symbols(),
            found: lambda.len(),
        });
    }
    if codes.dim() != ch.dim_in() {
        return Err(Error::DimMismatch {
            context: "coding vs channel input".into(),
            expected: ch.dim_in(),
            found: codes.dim(),
        });
    }
    check_distribution(lambda, 1e-10)
}

/// Σ λ_k S(Λ*σ_k, Λ*σ) with σ = Σ λ_k σ_k: the mutual entropy of a
/// classical input realized through code states.
pub fn classical_input_mutual(lambda: &[f64], codes: &QuantumCoding, ch: &QuantumChannel) -> Result<EntropyValue> {
    check_codes(lambda, codes, ch)?;
    let sigma = DensityMatrix::mixture(lambda, codes.states())?;
    let reference = output_reference(&sigma, ch, &SearchParams::default())?;
    let (v, _) = weighted_relative_sum(
        ch,
        &reference,
        lambda,
        codes.states().iter().map(|s| s.matrix().clone()),
    )?;
    Ok(EntropyValue::new(v))
}

/// S(Λ*σ) − Σ λ_k S(Λ*σ_k).
///
/// In finite dimensions every S(Λ*σ_k) is finite, so the difference is
/// always defined and agrees with [`classical_input_mutual`].
pub fn shannon_form(lambda: &[f64], codes: &QuantumCoding, ch: &QuantumChannel) -> Result<EntropyValue> {
    check_codes(lambda, codes, ch)?;
    let sigma = DensityMatrix::mixture(lambda, codes.states())?;
    let out = von_neumann(&ch.image(&sigma)).nats();
    let cond: f64 = lambda
        .iter()
        .zip(codes.states())
        .map(|(l, s)| l * von_neumann(&ch.image(s)).nats())
        .sum();
    Ok(EntropyValue::new(out - cond))
}

/// Pure decompositions of ρ = Σ_i p_i |u_i⟩⟨u_i| indexed by m×m unitaries:
/// √λ_k |ψ_k⟩ = Σ_i W_ki √p_i |u_i⟩, using the support columns of W.
pub(crate) struct PseudoSpace {
    frame: Vec<Vec<C64>>,
    sqrt_p: Vec<f64>,
    m: usize,
}

impl PseudoSpace {
    pub(crate) fn new(p: &[f64], frame: &ComplexMatrix, m_max: usize, zero_tol: f64) -> Self {
        let support: Vec<usize> = (0..p.len()).filter(|&i| p[i] > zero_tol).collect();
        Self {
            frame: support.iter().map(|&i| frame.column(i)).collect(),
            sqrt_p: support.iter().map(|&i| p[i].sqrt()).collect(),
            m: m_max.max(support.len()),
        }
    }

    fn of_state(rho: &DensityMatrix, m_max: usize, zero_tol: f64) -> Self {
        let eig = rho.eig();
        Self::new(&eig.eigenvalues, &eig.eigenvectors, m_max, zero_tol)
    }

    pub(crate) fn decomposition(&self, w: &ComplexMatrix) -> PureDecomposition {
        let d = self.frame.first().map_or(0, Vec::len);
        let mut weights = Vec::new();
        let mut vectors = Vec::new();
        for k in 0..self.m {
            let mut v = vec![C64::default(); d];
            for (i, u) in self.frame.iter().enumerate() {
                let coeff = w[(k, i)] * self.sqrt_p[i];
                for (x, y) in v.iter_mut().zip(u) {
                    *x += coeff * y;
                }
            }
            let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if norm2 <= 1e-15 {
                continue;
            }
            let n = norm2.sqrt();
            weights.push(norm2);
            vectors.push(v.into_iter().map(|z| z / n).collect());
        }
        let s: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= s;
        }
        PureDecomposition { weights, vectors }
    }

    /// A unitary reproducing the orthonormal decomposition `e` of the same
    /// state: W_ki = ⟨u_i|v_k⟩ on the support block, identity elsewhere.
    pub(crate) fn unitary_for(&self, e: &SchattenDecomposition) -> ComplexMatrix {
        let mut w = ComplexMatrix::identity(self.m);
        for k in 0..self.frame.len().min(e.len()) {
            for (i, u) in self.frame.iter().enumerate() {
                w[(k, i)] = inner(u, &e.vectors[k]);
            }
        }
        w
    }
}

pub(crate) fn pure_value(
    ch: &QuantumChannel,
    reference: &RelativeTo,
    d: &PureDecomposition,
) -> Result<(f64, Option<usize>)> {
    weighted_relative_sum(ch, reference, &d.weights, d.vectors.iter().map(|v| ComplexMatrix::outer(v)))
}

pub(crate) fn pseudo_m(dim: usize, search: &SearchParams) -> usize {
    search.m_max.unwrap_or(dim * dim).max(1)
}

/// I_p(ρ; Λ*): best found Σ λ_k S(Λ*ρ_k, Λ*ρ) over pure decompositions of
/// at most `m_max` (default dim²) terms.
///
/// The search is warm-started at the witness of [`mutual_entropy`], so the
/// result never falls below it.
pub fn pseudo_mutual_entropy(
    rho: &DensityMatrix,
    ch: &QuantumChannel,
    search: &SearchParams,
) -> Result<SearchOutcome> {
    check_channel_input(rho, ch)?;
    let schatten = mutual_entropy(rho, ch, &search.nested(1))?;
    let Witness::Schatten(warm) = &schatten.witness else {
        unreachable!("mutual_entropy returns Schatten witnesses")
    };
    let mut out = pseudo_from(rho, ch, search, warm)?;
    out.evaluations += schatten.evaluations;
    Ok(out)
}

/// Pseudo-mutual search warm-started at a given Schatten decomposition.
pub(crate) fn pseudo_from(
    rho: &DensityMatrix,
    ch: &QuantumChannel,
    search: &SearchParams,
    warm: &SchattenDecomposition,
) -> Result<SearchOutcome> {
    let space = PseudoSpace::of_state(rho, pseudo_m(rho.dim(), search), search.zero_tol);
    let reference = output_reference(rho, ch, search)?;
    let warm_w = space.unitary_for(warm);
    let warm_decomp = space.decomposition(&warm_w);
    let warm_value = pure_value(ch, &reference, &warm_decomp)?.0;

    let n_params = generator_dim(space.m);
    let (w, v, evals) = best_of(search.restarts + 1, |r| {
        let base = if r == 0 {
            warm_w.clone()
        } else {
            haar_unitary(space.m, &mut stream_rng(search.seed, r as u64))
        };
        let mut objective = |x: &[f64]| {
            pure_value(ch, &reference, &space.decomposition(&rotate_left(&base, x)))
                .map(|(v, _)| v)
                .unwrap_or(f64::NEG_INFINITY)
        };
        let refined = coordinate_ascent(
            &mut objective,
            vec![0.0; n_params],
            search.step_start,
            search.step_min,
            search.refine_max_iters,
        );
        (rotate_left(&base, &refined.x), refined.value, refined.evaluations)
    })
    .expect("at least one restart");

    let decomp = if v >= warm_value { space.decomposition(&w) } else { warm_decomp };
    let (value, inf) = pure_value(ch, &reference, &decomp)?;
    Ok(SearchOutcome {
        value: EntropyValue::new(value),
        witness: Witness::Pure(decomp),
        evaluations: evals + 1,
        is_exact: false,
        lower_bound: true,
        infinite_term: inf,
    })
}

/// Re-evaluates a witness: Σ λ_k S(Λ*ψ_k, Λ*ρ) for any decomposition.
pub fn evaluate_witness(rho: &DensityMatrix, ch: &QuantumChannel, w: &Witness) -> Result<EntropyValue> {
    check_channel_input(rho, ch)?;
    let (weights, vectors) = match w {
        Witness::Schatten(s) => (&s.weights, &s.vectors),
        Witness::Pure(p) => (&p.weights, &p.vectors),
    };
    let d = PureDecomposition {
        weights: weights.clone(),
        vectors: vectors.clone(),
    };
    let defect = frobenius_distance(&d.reconstruct(), rho.matrix());
    if defect > DECOMPOSITION_TOL {
        return Err(Error::DecompositionMismatch { defect });
    }
    let reference = output_reference(rho, ch, &SearchParams::default())?;
    Ok(EntropyValue::new(pure_value(ch, &reference, &d)?.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{channel_zoo, completely_depolarizing, qubit_vector};
    use crate::states::{random_density, sample_schatten, schatten_decomposition, DEFAULT_GAP_TOL};
    use std::f64::consts::LN_2;

    fn canonical(rho: &DensityMatrix) -> SchattenDecomposition {
        schatten_decomposition(&spectral_decomposition(rho, DEFAULT_GAP_TOL), None).unwrap()
    }

    #[test]
    fn compound_state_examples() {
        let psi = DensityMatrix::pure(&qubit_vector(0.4, 1.1)).unwrap();
        let e = canonical(&psi);
        let cs = compound_state(&psi, &QuantumChannel::identity(2), &e).unwrap();
        let expect = tensor(psi.matrix(), psi.matrix());
        assert!(frobenius_distance(cs.state.matrix(), &expect) < 1e-12);

        let half = DensityMatrix::maximally_mixed(2);
        let e = canonical(&half);
        let cs = compound_state(&half, &QuantumChannel::identity(2), &e).unwrap();
        assert!(frobenius_distance(cs.state.matrix(), &ComplexMatrix::diag(&[0.5, 0.0, 0.0, 0.5])) < 1e-14);

        let cs = compound_state(&half, &completely_depolarizing(2), &e).unwrap();
        assert!(frobenius_distance(cs.state.matrix(), &ComplexMatrix::identity(4).scale_real(0.25)) < 1e-14);
    }

    #[test]
    fn compound_marginals() {
        let rho = random_density(3, 3, 2).unwrap();
        let ch = channel_zoo("depolarizing", &[0.3, 3.0]).unwrap();
        let cs = compound_state(&rho, &ch, &canonical(&rho)).unwrap();
        assert!(frobenius_distance(&cs.input_marginal(), rho.matrix()) < 1e-9);
        assert!(frobenius_distance(&cs.output_marginal(), ch.image(&rho).matrix()) < 1e-9);
    }

    #[test]
    fn compound_rejects_foreign_decomposition() {
        let rho = random_density(2, 2, 2).unwrap();
        let other = canonical(&random_density(2, 2, 3).unwrap());
        assert!(matches!(
            compound_state(&rho, &QuantumChannel::identity(2), &other),
            Err(Error::DecompositionMismatch { .. })
        ));
    }

    #[test]
    fn per_decomposition_examples() {
        let rho = random_density(3, 3, 6).unwrap();
        let s = von_neumann(&rho).nats();
        let v = mutual_for_decomposition(&rho, &QuantumChannel::identity(3), &canonical(&rho)).unwrap();
        assert!((v.nats() - s).abs() < 1e-9);

        let v = mutual_for_decomposition(&rho, &completely_depolarizing(3), &canonical(&rho)).unwrap();
        assert!(v.nats().abs() < 1e-12);

        let rho = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let ch = channel_zoo("depolarizing", &[0.5]).unwrap();
        let e = canonical(&rho);
        let v = mutual_for_decomposition(&rho, &ch, &e).unwrap().nats();
        // direct evaluation: outputs are diagonal, so each term is a KL divergence
        let out = [0.6, 0.4];
        let e0 = [0.75, 0.25];
        let e1 = [0.25, 0.75];
        let kl = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(a, b)| a * (a / b).ln()).sum::<f64>();
        let oracle = 0.7 * kl(&e0, &out) + 0.3 * kl(&e1, &out);
        assert!((v - oracle).abs() < 1e-13);
        assert!(v >= 0.0 && v <= von_neumann(&rho).nats());
        let fc = cross_check_forms(&rho, &ch, &e).unwrap();
        assert!(fc.agrees(1e-8));
    }

    #[test]
    fn mutual_entropy_examples() {
        let rho = random_density(4, 4, 12).unwrap();
        let out = mutual_entropy(&rho, &QuantumChannel::identity(4), &SearchParams::default()).unwrap();
        assert!(out.is_exact && !out.lower_bound);
        assert!((out.value.nats() - von_neumann(&rho).nats()).abs() < 1e-9);

        let out = mutual_entropy(&rho, &completely_depolarizing(4), &SearchParams::default()).unwrap();
        assert!(out.value.nats().abs() < 1e-12);
    }

    #[test]
    fn degenerate_dephasing_search_finds_basis() {
        // I/2 through a dephasing channel: the best basis is the dephasing basis
        let half = DensityMatrix::maximally_mixed(2);
        let ch = channel_zoo("dephasing", &[0.6]).unwrap();
        let params = SearchParams::default().with_restarts(4);
        let out = mutual_entropy(&half, &ch, &params).unwrap();
        assert!(out.lower_bound && !out.is_exact);
        assert!((out.value.nats() - LN_2).abs() < 1e-6, "{}", out.value.nats());
        let w = evaluate_witness(&half, &ch, &out.witness).unwrap();
        assert!((w.nats() - out.value.nats()).abs() < 1e-10);
    }

    #[test]
    fn orthogonal_form_examples() {
        let rho = random_density(3, 3, 5).unwrap();
        let ch = channel_zoo("depolarizing", &[0.2, 3.0]).unwrap();
        let trivial = OrthogonalDecomposition {
            weights: vec![1.0],
            parts: vec![rho.clone()],
        };
        assert!(mutual_orthogonal(&rho, &ch, &trivial).unwrap().nats().abs() < 1e-12);

        let e = canonical(&rho);
        let a = mutual_orthogonal(&rho, &ch, &e.to_orthogonal()).unwrap();
        let b = mutual_for_decomposition(&rho, &ch, &e).unwrap();
        assert!((a.nats() - b.nats()).abs() < 1e-12);
    }

    #[test]
    fn classical_input_examples() {
        let ch = QuantumChannel::identity(3);
        let one = QuantumCoding::new(vec![random_density(3, 2, 1).unwrap()]).unwrap();
        assert!(classical_input_mutual(&[1.0], &one, &ch).unwrap().nats().abs() < 1e-12);

        let basis = QuantumCoding::basis(3);
        let u = [1.0 / 3.0; 3];
        assert!((classical_input_mutual(&u, &basis, &ch).unwrap().nats() - 3f64.ln()).abs() < 1e-12);
        assert!((shannon_form(&u, &basis, &ch).unwrap().nats() - 3f64.ln()).abs() < 1e-12);

        let theta: f64 = 0.9;
        let codes = QuantumCoding::from_vectors(&[qubit_vector(0.0, 0.0), qubit_vector(2.0 * theta, 0.0)]).unwrap();
        // overlap cos θ: σ has eigenvalues (1 ± cos θ)/2
        let l = [(1.0 + theta.cos()) / 2.0, (1.0 - theta.cos()) / 2.0];
        let oracle = -l.iter().map(|x| x * x.ln()).sum::<f64>();
        let id2 = QuantumChannel::identity(2);
        let v = classical_input_mutual(&[0.5, 0.5], &codes, &id2).unwrap().nats();
        assert!((v - oracle).abs() < 1e-10);
        assert!((shannon_form(&[0.5, 0.5], &codes, &id2).unwrap().nats() - oracle).abs() < 1e-10);

        let same = QuantumCoding::new(vec![DensityMatrix::basis(2, 0); 2]).unwrap();
        assert!(shannon_form(&[0.4, 0.6], &same, &id2).unwrap().nats().abs() < 1e-12);

        assert!(matches!(
            classical_input_mutual(&[1.0], &codes, &id2),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            classical_input_mutual(&[0.5, 0.5], &codes, &ch),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn shannon_form_agrees_through_noise() {
        let ch = channel_zoo("depolarizing", &[0.3]).unwrap();
        let mut r = crate::random::rng(8);
        let codes = QuantumCoding::from_vectors(&[
            crate::random::random_pure_vector(2, &mut r),
            crate::random::random_pure_vector(2, &mut r),
        ])
        .unwrap();
        let l = [0.35, 0.65];
        let a = classical_input_mutual(&l, &codes, &ch).unwrap().nats();
        let b = shannon_form(&l, &codes, &ch).unwrap().nats();
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn pseudo_examples() {
        let params = SearchParams::default().with_restarts(2).with_refine_iters(30);
        let rho = random_density(2, 2, 31).unwrap();
        let s = von_neumann(&rho).nats();
        let out = pseudo_mutual_entropy(&rho, &QuantumChannel::identity(2), &params).unwrap();
        assert!(out.lower_bound);
        assert!(out.value.nats() >= s - 1e-8);

        let out = pseudo_mutual_entropy(&rho, &completely_depolarizing(2), &params).unwrap();
        assert!(out.value.nats().abs() < 1e-12);

        let half = DensityMatrix::maximally_mixed(2);
        let ch = channel_zoo("depolarizing", &[0.5]).unwrap();
        let i = mutual_entropy(&half, &ch, &params).unwrap().value.nats();
        let out = pseudo_mutual_entropy(&half, &ch, &params).unwrap();
        assert!(out.value.nats() >= i - 1e-8);
        let w = evaluate_witness(&half, &ch, &out.witness).unwrap();
        assert!((w.nats() - out.value.nats()).abs() < 1e-10);
    }

    #[test]
    fn sampled_schatten_values_reproduce() {
        let rho = crate::states::density_with_spectrum(&[0.4, 0.4, 0.2], 3).unwrap();
        let ch = channel_zoo("depolarizing", &[0.4, 3.0]).unwrap();
        let spec = spectral_decomposition(&rho, DEFAULT_GAP_TOL);
        for seed in 0..5 {
            let e = sample_schatten(&spec, seed);
            let fc = cross_check_forms(&rho, &ch, &e).unwrap();
            assert!(fc.agrees(1e-8), "{fc:?}");
        }
    }
}
