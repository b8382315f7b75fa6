//! Capacity functionals.
//!
//! * C^{S0}: supremum of the mutual entropy over a set of input states.
//! * C_p: the same with the pseudo-mutual entropy.
//! * C^{P0}: supremum of the end-to-end mutual information of a fixed
//!   coding/channel/decoding pipeline over input distributions.
//! * C_c, C_cd: additionally maximized over a family of codings, and over
//!   codings and decodings.
//!
//! Searches over states, codings or decodings report lower bounds with a
//! witness; maxima over explicit finite lists are exact when every inner
//! value is. The simplex maximization for a fixed pipeline is a concave
//! problem on a classical channel and is solved by Blahut–Arimoto iteration
//! with a KKT gap certificate.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{ClassicalChannel, MeasurementDecoding, QuantumChannel, QuantumCoding};
use crate::cqc::{build_pipeline, induced_classical_channel, CqcPipeline};
use crate::entropy::{classical_relative, shannon, von_neumann, EntropyValue, RelativeTo};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, C64};
use crate::mutual::{
    check_channel_input, evaluate_witness, mutual_entropy, pseudo_from, pseudo_m, pure_value, schatten_value,
    shannon_form, PseudoSpace, Witness,
};
use crate::random::{haar_unitary, stream_rng};
use crate::search::{
    best_of, coordinate_ascent, generator_dim, logits, rotate_left, rotate_right, softmax, SearchParams,
};
use crate::states::{
    check_distribution, state_from_frame, DensityMatrix, SchattenDecomposition,
};

/// Iteration cap for the simplex solver.
pub const SIMPLEX_MAX_ITERS: usize = 20_000;
/// KKT gap below which the simplex solution is certified optimal.
pub const SIMPLEX_GAP_TOL: f64 = 1e-9;
/// Slack allowed when checking the inequality chains.
pub const CHAIN_TOL: f64 = 1e-8;

const INNER_SIMPLEX_ITERS: usize = 2_000;

/// Input states over which C^{S0} is taken.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSet {
    FullSpace(usize),
    Explicit(Vec<DensityMatrix>),
    /// States diagonal in the computational basis.
    DiagonalSimplex(usize),
}

impl StateSet {
    pub fn explicit(members: Vec<DensityMatrix>) -> Result<Self> {
        let d = members.first().ok_or(Error::EmptyStateSet)?.dim();
        if let Some(bad) = members.iter().find(|m| m.dim() != d) {
            return Err(Error::DimMismatch {
                context: "state set member".into(),
                expected: d,
                found: bad.dim(),
            });
        }
        Ok(Self::Explicit(members))
    }

    pub fn dim(&self) -> Result<usize> {
        match self {
            Self::FullSpace(d) | Self::DiagonalSimplex(d) => Ok(*d),
            Self::Explicit(m) => Ok(m.first().ok_or(Error::EmptyStateSet)?.dim()),
        }
    }

    /// sup S(ρ) over the set.
    pub fn max_entropy(&self) -> Result<f64> {
        match self {
            Self::FullSpace(d) | Self::DiagonalSimplex(d) => Ok((*d as f64).ln()),
            Self::Explicit(m) => {
                if m.is_empty() {
                    return Err(Error::EmptyStateSet);
                }
                Ok(m.iter().map(|s| von_neumann(s).nats()).fold(0.0, f64::max))
            }
        }
    }
}

/// Input distributions over which C-Q-C capacities are taken.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSet {
    FullSimplex(usize),
    Explicit(Vec<Vec<f64>>),
}

impl DistributionSet {
    pub fn explicit(members: Vec<Vec<f64>>) -> Result<Self> {
        let n = members
            .first()
            .ok_or_else(|| Error::NotDistribution {
                reason: "empty distribution set".into(),
            })?
            .len();
        for m in &members {
            if m.len() != n {
                return Err(Error::LengthMismatch {
                    context: "distribution set member".into(),
                    expected: n,
                    found: m.len(),
                });
            }
            check_distribution(m, 1e-10)?;
        }
        Ok(Self::Explicit(members))
    }

    pub fn n_symbols(&self) -> usize {
        match self {
            Self::FullSimplex(n) => *n,
            Self::Explicit(m) => m.first().map_or(0, Vec::len),
        }
    }

    /// Shannon entropy supremum over the set.
    pub fn max_entropy(&self) -> f64 {
        match self {
            Self::FullSimplex(n) => (*n as f64).ln(),
            Self::Explicit(m) => m
                .iter()
                .map(|p| shannon(p).map(|h| h.nats()).unwrap_or(0.0))
                .fold(0.0, f64::max),
        }
    }

    fn check_symbols(&self, n: usize) -> Result<()> {
        if self.n_symbols() != n {
            return Err(Error::LengthMismatch {
                context: "input distributions vs coding".into(),
                expected: n,
                found: self.n_symbols(),
            });
        }
        Ok(())
    }
}

/// Codings over which C_c is taken: the explicit members, plus every
/// constellation of `constellation` pure states when set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CodingFamily {
    pub members: Vec<QuantumCoding>,
    pub constellation: Option<usize>,
}

impl CodingFamily {
    pub fn single(coding: QuantumCoding) -> Self {
        Self {
            members: vec![coding],
            constellation: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty() && self.constellation.is_none()
    }

    /// Adds `coding` to the members unless already present.
    pub fn including(mut self, coding: &QuantumCoding) -> Self {
        if !self.members.contains(coding) {
            self.members.insert(0, coding.clone());
        }
        self
    }
}

/// Decodings over which C_cd is taken: the explicit members, plus every
/// rank-one projective measurement when `projective` is set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecodingFamily {
    pub members: Vec<MeasurementDecoding>,
    pub projective: bool,
}

impl DecodingFamily {
    pub fn single(decoding: MeasurementDecoding) -> Self {
        Self {
            members: vec![decoding],
            projective: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty() && !self.projective
    }

    pub fn including(mut self, decoding: &MeasurementDecoding) -> Self {
        if !self.members.contains(decoding) {
            self.members.insert(0, decoding.clone());
        }
        self
    }
}

/// The point attaining a reported capacity.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CapacityWitness {
    State {
        state: DensityMatrix,
        decomposition: Witness,
    },
    Input {
        coding: QuantumCoding,
        decoding: MeasurementDecoding,
        lambda: Vec<f64>,
    },
}

impl CapacityWitness {
    /// Recomputes the functional at the witness.
    pub fn evaluate(&self, ch: &QuantumChannel) -> Result<EntropyValue> {
        match self {
            Self::State { state, decomposition } => evaluate_witness(state, ch, decomposition),
            Self::Input {
                coding,
                decoding,
                lambda,
            } => cqc_mutual(&build_pipeline(coding.clone(), ch.clone(), decoding.clone())?, lambda),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityReport {
    pub value: EntropyValue,
    pub witness: CapacityWitness,
    /// Named intermediate values, e.g. `holevo_bound` at the witness.
    pub components: BTreeMap<String, f64>,
    pub lower_bound: bool,
    pub is_exact: bool,
    pub evaluations: usize,
}

/// Orthonormal frame whose leading columns are `vectors`, completed with
/// computational basis vectors.
pub(crate) fn complete_frame(vectors: &[Vec<C64>], d: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    let basis = (0..d).map(|j| {
        let mut e = vec![C64::default(); d];
        e[j] = c(1.0, 0.0);
        e
    });
    for mut v in vectors.iter().cloned().chain(basis) {
        if cols.len() == d {
            break;
        }
        for _ in 0..2 {
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, ui) in v.iter_mut().zip(u) {
                    *x -= proj * ui;
                }
            }
        }
        let n = crate::linalg::vec_norm(&v);
        if n > 1e-6 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    let mut m = ComplexMatrix::zeros(d, d);
    for (j, col) in cols.iter().enumerate() {
        m.set_column(j, col);
    }
    m
}

/// Real chart on states: softmax eigenvalues, plus a unitary frame moved by
/// off-diagonal generators unless the frame is fixed.
struct StateChart {
    dim: usize,
    fixed_frame: bool,
}

impl StateChart {
    fn n_params(&self) -> usize {
        self.dim + if self.fixed_frame { 0 } else { generator_dim(self.dim) }
    }

    fn point(&self, base: &ComplexMatrix, x: &[f64]) -> (Vec<f64>, ComplexMatrix) {
        let p = softmax(&x[..self.dim]);
        let u = if self.fixed_frame {
            base.clone()
        } else {
            rotate_right(base, &x[self.dim..])
        };
        (p, u)
    }

    /// Chart coordinates and base frame reproducing a Schatten decomposition.
    fn warm(&self, e: &SchattenDecomposition) -> (ComplexMatrix, Vec<f64>) {
        let frame = if self.fixed_frame {
            ComplexMatrix::identity(self.dim)
        } else {
            complete_frame(&e.vectors, self.dim)
        };
        let mut p = vec![0.0; self.dim];
        if self.fixed_frame {
            // diagonal states: weights sit on the diagonal
            let rho = e.reconstruct();
            for (i, pi) in p.iter_mut().enumerate() {
                *pi = rho[(i, i)].re.max(0.0);
            }
        } else {
            p[..e.len()].copy_from_slice(&e.weights);
        }
        let mut x = logits(&p);
        x.resize(self.n_params(), 0.0);
        (frame, x)
    }
}

fn frame_decomposition(p: &[f64], u: &ComplexMatrix, zero_tol: f64) -> SchattenDecomposition {
    let mut weights = Vec::new();
    let mut vectors = Vec::new();
    for (i, &pi) in p.iter().enumerate() {
        if pi > zero_tol {
            weights.push(pi);
            vectors.push(u.column(i));
        }
    }
    let s: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= s;
    }
    SchattenDecomposition { weights, vectors }
}

fn frame_value(ch: &QuantumChannel, p: &[f64], u: &ComplexMatrix, search: &SearchParams) -> Option<(f64, DensityMatrix, SchattenDecomposition)> {
    let rho = state_from_frame(p, u);
    let e = frame_decomposition(p, u, search.zero_tol);
    let reference = RelativeTo::new(ch.image(&rho).matrix(), search.zero_tol, search.support_tol).ok()?;
    let v = schatten_value(ch, &reference, &e).ok()?.0;
    Some((v, rho, e))
}

fn state_report(
    ch: &QuantumChannel,
    state: DensityMatrix,
    decomposition: Witness,
    lower_bound: bool,
    is_exact: bool,
    evaluations: usize,
) -> Result<CapacityReport> {
    let value = evaluate_witness(&state, ch, &decomposition)?;
    let mut components = BTreeMap::new();
    components.insert("input_entropy".into(), von_neumann(&state).nats());
    Ok(CapacityReport {
        value,
        witness: CapacityWitness::State { state, decomposition },
        components,
        lower_bound,
        is_exact,
        evaluations,
    })
}

fn check_set_dim(ch: &QuantumChannel, s0: &StateSet) -> Result<usize> {
    let d = s0.dim()?;
    if d != ch.dim_in() {
        return Err(Error::DimMismatch {
            context: "state set vs channel input".into(),
            expected: ch.dim_in(),
            found: d,
        });
    }
    Ok(d)
}

/// C^{S0}(Γ*) = sup { I(ρ; Γ*) : ρ ∈ S0 }.
pub fn quantum_capacity(ch: &QuantumChannel, s0: &StateSet, search: &SearchParams) -> Result<CapacityReport> {
    let d = check_set_dim(ch, s0)?;
    let chart = match s0 {
        StateSet::Explicit(members) => return explicit_quantum_capacity(ch, members, search),
        StateSet::FullSpace(_) => StateChart { dim: d, fixed_frame: false },
        StateSet::DiagonalSimplex(_) => StateChart { dim: d, fixed_frame: true },
    };

    let ((best_rho, best_e), _, evaluations) = best_of(search.restarts + 1, |r| {
        let base = if r == 0 || chart.fixed_frame {
            ComplexMatrix::identity(d)
        } else {
            haar_unitary(d, &mut stream_rng(search.seed, r as u64))
        };
        // restart 0 is the maximally mixed state; others start from random spectra
        let mut x0 = vec![0.0; chart.n_params()];
        if r > 0 {
            let p = crate::random::flat_dirichlet(d, &mut stream_rng(search.seed, 1_000 + r as u64));
            x0[..d].copy_from_slice(&logits(&p));
        }
        let mut objective = |x: &[f64]| {
            let (p, u) = chart.point(&base, x);
            frame_value(ch, &p, &u, search).map_or(f64::NEG_INFINITY, |t| t.0)
        };
        let refined = coordinate_ascent(&mut objective, x0, search.step_start, search.step_min, search.refine_max_iters);
        let (p, u) = chart.point(&base, &refined.x);
        let (_, rho, e) = frame_value(ch, &p, &u, search).expect("refined point evaluates");
        ((rho, e), refined.value, refined.evaluations)
    })
    .expect("at least one restart");

    // the frame decomposition is one Schatten decomposition of the best
    // state; a degenerate spectrum admits others
    let inner = mutual_entropy(&best_rho, ch, &search.nested(7))?;
    let frame_v = evaluate_witness(&best_rho, ch, &Witness::Schatten(best_e.clone()))?.nats();
    let decomposition = if inner.value.nats() > frame_v {
        inner.witness
    } else {
        Witness::Schatten(best_e)
    };
    state_report(ch, best_rho, decomposition, true, false, evaluations + inner.evaluations)
}

fn explicit_quantum_capacity(ch: &QuantumChannel, members: &[DensityMatrix], search: &SearchParams) -> Result<CapacityReport> {
    let outcomes: Vec<_> = members
        .par_iter()
        .enumerate()
        .map(|(i, rho)| mutual_entropy(rho, ch, &search.nested(100 + i as u64)))
        .collect::<Result<_>>()?;
    let best = argmax(outcomes.iter().map(|o| o.value.nats()));
    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    let exact = outcomes.iter().all(|o| o.is_exact);
    let o = &outcomes[best];
    state_report(ch, members[best].clone(), o.witness.clone(), !exact, exact, evaluations)
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// C_p(Γ*): the pseudo-mutual entropy maximized over S0.
pub fn pseudo_capacity(ch: &QuantumChannel, s0: &StateSet, search: &SearchParams) -> Result<CapacityReport> {
    let base = quantum_capacity(ch, s0, search)?;
    pseudo_capacity_from(ch, s0, search, &base)
}

/// [`pseudo_capacity`] warm-started at the witness of a C^{S0} report.
pub fn pseudo_capacity_from(
    ch: &QuantumChannel,
    s0: &StateSet,
    search: &SearchParams,
    base: &CapacityReport,
) -> Result<CapacityReport> {
    let d = check_set_dim(ch, s0)?;
    let CapacityWitness::State {
        decomposition: Witness::Schatten(warm_e),
        ..
    } = &base.witness
    else {
        return Err(Error::DecompositionMismatch { defect: f64::INFINITY });
    };

    if let StateSet::Explicit(members) = s0 {
        let outcomes: Vec<_> = members
            .par_iter()
            .enumerate()
            .map(|(i, rho)| {
                let params = search.nested(100 + i as u64);
                let schatten = mutual_entropy(rho, ch, &params)?;
                let Witness::Schatten(e) = &schatten.witness else { unreachable!() };
                pseudo_from(rho, ch, &params.nested(3), e)
            })
            .collect::<Result<_>>()?;
        let best = argmax(outcomes.iter().map(|o| o.value.nats()));
        let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
        return state_report(ch, members[best].clone(), outcomes[best].witness.clone(), true, false, evaluations);
    }

    let chart = StateChart {
        dim: d,
        fixed_frame: matches!(s0, StateSet::DiagonalSimplex(_)),
    };
    let m = pseudo_m(d, search);
    let n_state = chart.n_params();
    let n_w = generator_dim(m.max(d));
    let (warm_frame, warm_x) = chart.warm(warm_e);

    let evaluate = |frame: &ComplexMatrix, w_base: &ComplexMatrix, x: &[f64]| {
        let (p, u) = chart.point(frame, &x[..n_state]);
        let space = PseudoSpace::new(&p, &u, m, search.zero_tol);
        let w = rotate_left(w_base, &x[n_state..]);
        let decomp = space.decomposition(&w);
        let rho = state_from_frame(&p, &u);
        let value = RelativeTo::new(ch.image(&rho).matrix(), search.zero_tol, search.support_tol)
            .and_then(|r| pure_value(ch, &r, &decomp))
            .map_or(f64::NEG_INFINITY, |t| t.0);
        (value, rho, decomp)
    };

    let ((rho, decomp), _, evaluations) = best_of(search.restarts + 1, |r| {
        let (frame, mut x0, w_base) = if r == 0 {
            let (p, u) = chart.point(&warm_frame, &warm_x);
            let space = PseudoSpace::new(&p, &u, m, search.zero_tol);
            let w = space.unitary_for(&frame_decomposition(&p, &u, search.zero_tol));
            (warm_frame.clone(), warm_x.clone(), w)
        } else {
            let mut rng = stream_rng(search.seed, 2_000 + r as u64);
            let frame = if chart.fixed_frame {
                ComplexMatrix::identity(d)
            } else {
                haar_unitary(d, &mut rng)
            };
            let mut x0 = vec![0.0; n_state];
            x0[..d].copy_from_slice(&logits(&crate::random::flat_dirichlet(d, &mut rng)));
            (frame, x0, haar_unitary(m.max(d), &mut rng))
        };
        x0.resize(n_state + n_w, 0.0);
        let mut objective = |x: &[f64]| evaluate(&frame, &w_base, x).0;
        let refined = coordinate_ascent(&mut objective, x0, search.step_start, search.step_min, search.refine_max_iters);
        let (v, rho, decomp) = evaluate(&frame, &w_base, &refined.x);
        ((rho, decomp), v, refined.evaluations)
    })
    .expect("at least one restart");

    let candidate = state_report(ch, rho, Witness::Pure(decomp), true, false, evaluations)?;
    // the C^{S0} witness itself, reached through the pure-decomposition form
    if candidate.value.nats() >= base.value.nats() {
        Ok(candidate)
    } else {
        let CapacityWitness::State { state, decomposition } = &base.witness else { unreachable!() };
        state_report(ch, state.clone(), decomposition.clone(), true, false, evaluations)
    }
}

/// Σ_k λ_k KL(Ξ̃*Γ*σ_k ‖ Ξ̃*Γ*σ).
pub fn cqc_mutual(pipe: &CqcPipeline, lambda: &[f64]) -> Result<EntropyValue> {
    pipe.check_lambda(lambda)?;
    let sigma = DensityMatrix::mixture(lambda, pipe.coding().states())?;
    let q = crate::channels::decode(pipe.decoding(), &pipe.channel().image(&sigma))?;
    let mut acc = 0.0;
    for (l, s) in lambda.iter().zip(pipe.coding().states()) {
        if *l <= 0.0 {
            continue;
        }
        let p = crate::channels::decode(pipe.decoding(), &pipe.channel().image(s))?;
        acc += l * classical_relative(&p, &q)?.nats();
    }
    Ok(EntropyValue::new(acc))
}

/// Per-input divergences D_k = KL(T_·k ‖ T p) and the mutual information.
fn divergences(t: &ClassicalChannel, p: &[f64]) -> (Vec<f64>, f64) {
    let q = t.push_forward(p);
    let d: Vec<f64> = (0..t.n_in())
        .map(|k| {
            (0..t.n_out())
                .map(|j| {
                    let tjk = t.entry(j, k);
                    if tjk > 0.0 {
                        tjk * (tjk / q[j]).ln()
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect();
    let i = p.iter().zip(&d).map(|(a, b)| a * b).sum();
    (d, i)
}

/// Result of the simplex solver on a classical channel.
#[derive(Debug, Clone)]
pub struct SimplexSolution {
    pub distribution: Vec<f64>,
    pub value: f64,
    /// max_k D_k − I(p): an upper bound on the distance to the capacity.
    pub gap: f64,
    pub iterations: usize,
}

/// Blahut–Arimoto iteration p_k ← p_k exp(D_k) / Z from the uniform input.
pub fn simplex_capacity(t: &ClassicalChannel, gap_tol: f64, max_iters: usize) -> SimplexSolution {
    let n = t.n_in();
    let mut p = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    loop {
        let (d, i) = divergences(t, &p);
        let gap = d.iter().copied().fold(f64::NEG_INFINITY, f64::max) - i;
        if gap <= gap_tol || iterations >= max_iters {
            return SimplexSolution {
                distribution: p,
                value: i,
                gap,
                iterations,
            };
        }
        let dmax = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (pk, dk) in p.iter_mut().zip(&d) {
            *pk *= (dk - dmax).exp();
        }
        let z: f64 = p.iter().sum();
        for pk in p.iter_mut() {
            *pk /= z;
        }
        iterations += 1;
    }
}

fn input_report(pipe: &CqcPipeline, lambda: Vec<f64>, lower_bound: bool, is_exact: bool, evaluations: usize) -> Result<CapacityReport> {
    let value = cqc_mutual(pipe, &lambda)?;
    let mut components = BTreeMap::new();
    components.insert(
        "holevo_bound".into(),
        holevo_bound(&lambda, pipe.coding(), pipe.channel())?.nats(),
    );
    components.insert("input_entropy".into(), shannon(&lambda)?.nats());
    Ok(CapacityReport {
        value,
        witness: CapacityWitness::Input {
            coding: pipe.coding().clone(),
            decoding: pipe.decoding().clone(),
            lambda,
        },
        components,
        lower_bound,
        is_exact,
        evaluations,
    })
}

fn best_distribution(pipe: &CqcPipeline, p0: &DistributionSet, max_iters: usize) -> Result<(Vec<f64>, f64, Option<f64>)> {
    p0.check_symbols(pipe.n_symbols())?;
    match p0 {
        DistributionSet::FullSimplex(_) => {
            let sol = simplex_capacity(&induced_classical_channel(pipe), SIMPLEX_GAP_TOL, max_iters);
            Ok((sol.distribution, sol.value, Some(sol.gap)))
        }
        DistributionSet::Explicit(members) => {
            let values: Vec<f64> = members
                .iter()
                .map(|l| cqc_mutual(pipe, l).map(EntropyValue::nats))
                .collect::<Result<_>>()?;
            let best = argmax(values.iter().copied());
            Ok((members[best].clone(), values[best], None))
        }
    }
}

/// C^{P0}: sup over λ ∈ P0 of [`cqc_mutual`].
pub fn cqc_capacity(pipe: &CqcPipeline, p0: &DistributionSet, _search: &SearchParams) -> Result<CapacityReport> {
    let (lambda, _, gap) = best_distribution(pipe, p0, SIMPLEX_MAX_ITERS)?;
    let exact = gap.is_none_or(|g| g <= SIMPLEX_GAP_TOL);
    let mut r = input_report(pipe, lambda, !exact, exact, 1)?;
    if let Some(g) = gap {
        r.components.insert("kkt_gap".into(), g);
    }
    Ok(r)
}

fn leading_vector(s: &DensityMatrix) -> Option<Vec<C64>> {
    (s.purity() > 1.0 - 1e-9).then(|| s.eig().vector(0))
}

/// Constellations of `n` pure states, one unitary frame per symbol; the code
/// vector is the frame's first column.
struct ConstellationChart {
    n: usize,
    dim: usize,
}

impl ConstellationChart {
    fn n_params(&self) -> usize {
        self.n * generator_dim(self.dim)
    }

    fn coding(&self, bases: &[ComplexMatrix], x: &[f64]) -> QuantumCoding {
        let g = generator_dim(self.dim);
        let vectors: Vec<Vec<C64>> = bases
            .iter()
            .enumerate()
            .map(|(k, b)| rotate_right(b, &x[k * g..(k + 1) * g]).column(0))
            .collect();
        QuantumCoding::from_vectors(&vectors).expect("unit vectors")
    }

    fn warm(&self, coding: &QuantumCoding) -> Option<Vec<ComplexMatrix>> {
        if coding.n_symbols() != self.n || coding.dim() != self.dim {
            return None;
        }
        coding
            .states()
            .iter()
            .map(|s| leading_vector(s).map(|v| complete_frame(&[v], self.dim)))
            .collect()
    }

    fn canonical(&self) -> Vec<ComplexMatrix> {
        (0..self.n)
            .map(|k| {
                let mut e = vec![C64::default(); self.dim];
                e[k % self.dim] = c(1.0, 0.0);
                complete_frame(&[e], self.dim)
            })
            .collect()
    }

    fn random(&self, seed: u64, stream: u64) -> Vec<ComplexMatrix> {
        let mut rng = stream_rng(seed, stream);
        (0..self.n).map(|_| haar_unitary(self.dim, &mut rng)).collect()
    }
}

/// Frame of a rank-one projective decoding, if it is one.
fn projective_frame(dec: &MeasurementDecoding) -> Option<ComplexMatrix> {
    let d = dec.dim_in();
    if dec.n_outcomes() != d {
        return None;
    }
    let vectors: Option<Vec<Vec<C64>>> = dec
        .elements()
        .iter()
        .map(|m| {
            let s = DensityMatrix::try_from(m.clone()).ok()?;
            leading_vector(&s)
        })
        .collect();
    Some(complete_frame(&vectors?, d))
}

struct FamilyBest {
    coding: QuantumCoding,
    decoding: MeasurementDecoding,
    value: f64,
    evaluations: usize,
    all_exact: bool,
}

fn evaluate_pipeline(ch: &QuantumChannel, coding: &QuantumCoding, dec: &MeasurementDecoding, p0: &DistributionSet) -> f64 {
    build_pipeline(coding.clone(), ch.clone(), dec.clone())
        .and_then(|pipe| best_distribution(&pipe, p0, INNER_SIMPLEX_ITERS))
        .map_or(f64::NEG_INFINITY, |t| t.1)
}

/// Best over explicit codings, then constellation search warm-started from
/// the best member and every pure member.
fn best_coding(
    ch: &QuantumChannel,
    dec: &MeasurementDecoding,
    p0: &DistributionSet,
    family: &CodingFamily,
    search: &SearchParams,
) -> Result<FamilyBest> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut best: Option<FamilyBest> = None;
    let mut evaluations = 0;
    let mut all_exact = family.constellation.is_none();
    for coding in &family.members {
        let pipe = build_pipeline(coding.clone(), ch.clone(), dec.clone())?;
        let r = cqc_capacity(&pipe, p0, search)?;
        evaluations += r.evaluations;
        all_exact &= r.is_exact;
        if best.as_ref().is_none_or(|b| r.value.nats() > b.value) {
            best = Some(FamilyBest {
                coding: coding.clone(),
                decoding: dec.clone(),
                value: r.value.nats(),
                evaluations: 0,
                all_exact: true,
            });
        }
    }

    if let Some(n) = family.constellation {
        let chart = ConstellationChart { n, dim: ch.dim_in() };
        p0.check_symbols(n)?;
        let mut starts: Vec<Vec<ComplexMatrix>> = family.members.iter().filter_map(|m| chart.warm(m)).collect();
        starts.push(chart.canonical());
        let n_warm = starts.len();
        let (coding, _, evals) = best_of(n_warm + search.restarts, |r| {
            let bases = if r < n_warm {
                starts[r].clone()
            } else {
                chart.random(search.seed, 3_000 + r as u64)
            };
            let mut objective = |x: &[f64]| evaluate_pipeline(ch, &chart.coding(&bases, x), dec, p0);
            let refined = coordinate_ascent(
                &mut objective,
                vec![0.0; chart.n_params()],
                search.step_start,
                search.step_min,
                search.refine_max_iters,
            );
            (chart.coding(&bases, &refined.x), refined.value, refined.evaluations)
        })
        .expect("at least one start");
        evaluations += evals;
        let pipe = build_pipeline(coding.clone(), ch.clone(), dec.clone())?;
        let value = cqc_capacity(&pipe, p0, search)?.value.nats();
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(FamilyBest {
                coding,
                decoding: dec.clone(),
                value,
                evaluations: 0,
                all_exact: false,
            });
        }
    }
    let mut b = best.expect("nonempty family");
    b.evaluations = evaluations;
    b.all_exact = all_exact;
    Ok(b)
}

fn family_report(ch: &QuantumChannel, b: FamilyBest, p0: &DistributionSet, search: &SearchParams) -> Result<CapacityReport> {
    let pipe = build_pipeline(b.coding, ch.clone(), b.decoding)?;
    let mut r = cqc_capacity(&pipe, p0, search)?;
    r.lower_bound = !b.all_exact;
    r.is_exact = b.all_exact;
    r.evaluations = b.evaluations;
    Ok(r)
}

/// C_c: sup over the coding family and P0 with a fixed decoding.
pub fn coding_capacity(
    ch: &QuantumChannel,
    dec: &MeasurementDecoding,
    p0: &DistributionSet,
    family: &CodingFamily,
    search: &SearchParams,
) -> Result<CapacityReport> {
    let b = best_coding(ch, dec, p0, family, search)?;
    family_report(ch, b, p0, search)
}

/// C_cd: sup over the coding family, the decoding family and P0.
///
/// Each explicit decoding is scored by [`coding_capacity`]; when projective
/// decodings are included, a joint search over constellation and
/// measurement frame is warm-started from the best pair found so far.
pub fn coding_decoding_capacity(
    ch: &QuantumChannel,
    p0: &DistributionSet,
    codings: &CodingFamily,
    decodings: &DecodingFamily,
    search: &SearchParams,
) -> Result<CapacityReport> {
    if codings.is_empty() || decodings.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let per_member: Vec<FamilyBest> = decodings
        .members
        .iter()
        .map(|dec| best_coding(ch, dec, p0, codings, search))
        .collect::<Result<_>>()?;
    let mut evaluations: usize = per_member.iter().map(|b| b.evaluations).sum();
    let mut all_exact = !decodings.projective && per_member.iter().all(|b| b.all_exact);
    let mut best: Option<FamilyBest> = None;
    for b in per_member {
        if best.as_ref().is_none_or(|x| b.value > x.value) {
            best = Some(b);
        }
    }

    if decodings.projective {
        all_exact = false;
        let d_out = ch.dim_out();
        let g_out = generator_dim(d_out);
        let chart = codings.constellation.map(|n| ConstellationChart { n, dim: ch.dim_in() });
        let n_code = chart.as_ref().map_or(0, ConstellationChart::n_params);
        // explicit codings are scanned with the frame search alone
        let fixed: Vec<QuantumCoding> = if chart.is_some() { vec![] } else { codings.members.clone() };

        let warm_frame = best
            .as_ref()
            .and_then(|b| projective_frame(&b.decoding))
            .unwrap_or_else(|| ComplexMatrix::identity(d_out));
        let warm_bases = match (&chart, &best) {
            (Some(ch_), Some(b)) => ch_.warm(&b.coding).unwrap_or_else(|| ch_.canonical()),
            (Some(ch_), None) => ch_.canonical(),
            _ => vec![],
        };
        let n_fixed = fixed.len().max(1);
        let evaluate = |k: usize, bases: &[ComplexMatrix], frame: &ComplexMatrix, x: &[f64]| {
            let coding = match &chart {
                Some(c) => c.coding(bases, &x[..n_code]),
                None => fixed[k].clone(),
            };
            let dec = MeasurementDecoding::projective(&rotate_right(frame, &x[n_code..])).expect("unitary frame");
            (evaluate_pipeline(ch, &coding, &dec, p0), coding, dec)
        };
        let (pair, _, evals) = best_of(n_fixed * (search.restarts + 1), |r| {
            let (k, restart) = (r % n_fixed, r / n_fixed);
            let (bases, frame) = if restart == 0 {
                (warm_bases.clone(), warm_frame.clone())
            } else {
                let bases = chart
                    .as_ref()
                    .map_or_else(Vec::new, |c| c.random(search.seed, 4_000 + r as u64));
                (bases, haar_unitary(d_out, &mut stream_rng(search.seed, 5_000 + r as u64)))
            };
            let mut objective = |x: &[f64]| evaluate(k, &bases, &frame, x).0;
            let refined = coordinate_ascent(
                &mut objective,
                vec![0.0; n_code + g_out],
                search.step_start,
                search.step_min,
                search.refine_max_iters,
            );
            let (_, coding, dec) = evaluate(k, &bases, &frame, &refined.x);
            ((coding, dec), refined.value, refined.evaluations)
        })
        .expect("at least one start");
        evaluations += evals;
        let (coding, dec) = pair;
        let pipe = build_pipeline(coding.clone(), ch.clone(), dec.clone())?;
        let value = cqc_capacity(&pipe, p0, search)?.value.nats();
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(FamilyBest {
                coding,
                decoding: dec,
                value,
                evaluations: 0,
                all_exact: false,
            });
        }
    }
    let mut b = best.expect("nonempty families");
    b.evaluations = evaluations;
    b.all_exact = all_exact;
    family_report(ch, b, p0, search)
}

/// S(Γ*σ) − Σ λ_k S(Γ*σ_k).
pub fn holevo_bound(lambda: &[f64], codes: &QuantumCoding, ch: &QuantumChannel) -> Result<EntropyValue> {
    shannon_form(lambda, codes, ch)
}

/// Everything needed to evaluate both capacity chains on one instance.
#[derive(Debug, Clone)]
pub struct ChainScenario {
    pub id: String,
    pub channel: QuantumChannel,
    pub states: StateSet,
    pub coding: QuantumCoding,
    pub decoding: MeasurementDecoding,
    pub inputs: DistributionSet,
    pub coding_family: CodingFamily,
    pub decoding_family: DecodingFamily,
    pub search: SearchParams,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub scenario: String,
    pub relation: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ChainReport {
    pub checks: Vec<InequalityCheck>,
    /// Scenarios whose evaluation failed, with the error.
    pub errors: Vec<(String, String)>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InequalityCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

fn le(scenario: &str, relation: &str, lhs: f64, rhs: f64) -> InequalityCheck {
    InequalityCheck {
        scenario: scenario.into(),
        relation: relation.into(),
        lhs,
        rhs,
        holds: lhs <= rhs + CHAIN_TOL,
    }
}

fn chain_checks(s: &ChainScenario) -> Result<Vec<InequalityCheck>> {
    check_channel_input(&DensityMatrix::maximally_mixed(s.states.dim()?), &s.channel)?;
    let id = s.id.as_str();
    let cs0 = quantum_capacity(&s.channel, &s.states, &s.search)?;
    let cp = pseudo_capacity_from(&s.channel, &s.states, &s.search, &cs0)?;
    let sup_s = s.states.max_entropy()?;

    let pipe = build_pipeline(s.coding.clone(), s.channel.clone(), s.decoding.clone())?;
    let cp0 = cqc_capacity(&pipe, &s.inputs, &s.search)?;
    let codings = s.coding_family.clone().including(&s.coding);
    let decodings = s.decoding_family.clone().including(&s.decoding);
    let cc = coding_capacity(&s.channel, &s.decoding, &s.inputs, &codings, &s.search)?;
    let ccd = coding_decoding_capacity(&s.channel, &s.inputs, &codings, &decodings, &s.search)?;
    let sup_h = s.inputs.max_entropy();

    let (a, b, p, q, r) = (cs0.value.nats(), cp.value.nats(), cp0.value.nats(), cc.value.nats(), ccd.value.nats());
    let mut checks = vec![
        le(id, "0 <= C^S0", 0.0, a),
        le(id, "C^S0 <= C_p", a, b),
        le(id, "C_p <= sup S", b, sup_s),
        le(id, "0 <= C^P0", 0.0, p),
        le(id, "C^P0 <= C_c", p, q),
        le(id, "C_c <= C_cd", q, r),
        le(id, "C_cd <= sup H", r, sup_h),
    ];

    let mut lambdas = vec![vec![1.0 / pipe.n_symbols() as f64; pipe.n_symbols()]];
    if let CapacityWitness::Input { lambda, .. } = &cp0.witness {
        lambdas.push(lambda.clone());
    }
    if let DistributionSet::Explicit(m) = &s.inputs {
        lambdas.extend(m.iter().cloned());
    }
    for dec in &decodings.members {
        let Ok(pipe) = build_pipeline(s.coding.clone(), s.channel.clone(), dec.clone()) else { continue };
        for l in &lambdas {
            let h = holevo_bound(l, &s.coding, &s.channel)?.nats();
            let m = cqc_mutual(&pipe, l)?.nats();
            checks.push(le(id, "cqc_mutual <= holevo_bound", m, h));
        }
    }
    Ok(checks)
}

/// Evaluates every capacity on each scenario and checks
/// 0 ≤ C^{S0} ≤ C_p ≤ sup S, 0 ≤ C^{P0} ≤ C_c ≤ C_cd ≤ sup H and Holevo
/// domination. The scenario's own coding and decoding are added to its
/// families. Results are ordered by scenario id.
pub fn verify_chains(instances: &[ChainScenario]) -> ChainReport {
    let mut results: Vec<(String, Result<Vec<InequalityCheck>>)> =
        instances.par_iter().map(|s| (s.id.clone(), chain_checks(s))).collect();
    results.sort_by(|a, b| a.0.cmp(&b.0));
    let mut report = ChainReport::default();
    for (id, r) in results {
        match r {
            Ok(c) => report.checks.extend(c),
            Err(e) => report.errors.push((id, e.to_string())),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{channel_zoo, completely_depolarizing, qubit_vector};
    use std::f64::consts::LN_2;

    fn quick() -> SearchParams {
        SearchParams::default().with_restarts(3).with_refine_iters(60)
    }

    fn h2(p: f64) -> f64 {
        -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
    }

    #[test]
    fn quantum_capacity_examples() {
        for d in [2, 3] {
            let r = quantum_capacity(&QuantumChannel::identity(d), &StateSet::FullSpace(d), &quick()).unwrap();
            assert!(((r.value.nats()) - (d as f64).ln()).abs() < 1e-8, "{}", r.value.nats());
            assert!(r.lower_bound);
            assert!((r.witness.evaluate(&QuantumChannel::identity(d)).unwrap().nats() - r.value.nats()).abs() < 1e-9);
        }
        let r = quantum_capacity(&completely_depolarizing(2), &StateSet::FullSpace(2), &quick()).unwrap();
        assert!(r.value.nats().abs() < 1e-12);
    }

    #[test]
    fn explicit_set_is_exact_max() {
        let ch = channel_zoo("depolarizing", &[0.3]).unwrap();
        let members = vec![
            DensityMatrix::diagonal(&[0.9, 0.1]).unwrap(),
            DensityMatrix::diagonal(&[0.6, 0.4]).unwrap(),
        ];
        let r = quantum_capacity(&ch, &StateSet::explicit(members.clone()).unwrap(), &quick()).unwrap();
        assert!(r.is_exact && !r.lower_bound);
        let direct = members
            .iter()
            .map(|m| mutual_entropy(m, &ch, &quick()).unwrap().value.nats())
            .fold(0.0, f64::max);
        assert!((r.value.nats() - direct).abs() < 1e-12);

        let degenerate = StateSet::explicit(vec![DensityMatrix::maximally_mixed(2)]).unwrap();
        let r = quantum_capacity(&ch, &degenerate, &quick()).unwrap();
        assert!(!r.is_exact);

        assert!(matches!(StateSet::explicit(vec![]), Err(Error::EmptyStateSet)));
        assert!(matches!(
            quantum_capacity(&ch, &StateSet::FullSpace(3), &quick()),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn pseudo_capacity_examples() {
        let p = SearchParams::default().with_restarts(1).with_refine_iters(25);
        let r = pseudo_capacity(&QuantumChannel::identity(2), &StateSet::FullSpace(2), &p).unwrap();
        assert!(r.value.nats() >= LN_2 - 1e-6 && r.lower_bound);
        let r = pseudo_capacity(&completely_depolarizing(2), &StateSet::FullSpace(2), &p).unwrap();
        assert!(r.value.nats().abs() < 1e-12);

        let ch = channel_zoo("amplitude-damping", &[0.4]).unwrap();
        for set in [StateSet::FullSpace(2), StateSet::DiagonalSimplex(2)] {
            let q = quantum_capacity(&ch, &set, &p).unwrap();
            let r = pseudo_capacity_from(&ch, &set, &p, &q).unwrap();
            assert!(r.value.nats() >= q.value.nats() - 1e-8);
            assert!((r.witness.evaluate(&ch).unwrap().nats() - r.value.nats()).abs() < 1e-9);
        }
    }

    fn bsc(p: f64) -> CqcPipeline {
        build_pipeline(
            QuantumCoding::basis(2),
            channel_zoo("bit-flip", &[p]).unwrap(),
            MeasurementDecoding::basis(2),
        )
        .unwrap()
    }

    #[test]
    fn cqc_mutual_examples() {
        let pipe = build_pipeline(QuantumCoding::basis(3), QuantumChannel::identity(3), MeasurementDecoding::basis(3)).unwrap();
        assert!((cqc_mutual(&pipe, &[1.0 / 3.0; 3]).unwrap().nats() - 3f64.ln()).abs() < 1e-12);

        let pipe = build_pipeline(QuantumCoding::basis(2), QuantumChannel::identity(2), MeasurementDecoding::trivial(2)).unwrap();
        assert_eq!(cqc_mutual(&pipe, &[0.3, 0.7]).unwrap().nats(), 0.0);

        let v = cqc_mutual(&bsc(0.1), &[0.5, 0.5]).unwrap().nats();
        let classical = crate::entropy::classical_mutual(&[0.5, 0.5], &induced_classical_channel(&bsc(0.1))).unwrap();
        assert!((v - classical.nats()).abs() < 1e-10);
        assert!((v - (LN_2 - h2(0.1))).abs() < 1e-12);

        assert!(matches!(cqc_mutual(&bsc(0.1), &[1.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn cqc_capacity_examples() {
        let pipe = build_pipeline(QuantumCoding::basis(4), QuantumChannel::identity(4), MeasurementDecoding::basis(4)).unwrap();
        let r = cqc_capacity(&pipe, &DistributionSet::FullSimplex(4), &quick()).unwrap();
        assert!((r.value.nats() - 4f64.ln()).abs() < 1e-10 && r.is_exact);

        let pipe = build_pipeline(QuantumCoding::basis(2), QuantumChannel::identity(2), MeasurementDecoding::trivial(2)).unwrap();
        assert_eq!(cqc_capacity(&pipe, &DistributionSet::FullSimplex(2), &quick()).unwrap().value.nats(), 0.0);

        let r = cqc_capacity(&bsc(0.1), &DistributionSet::FullSimplex(2), &quick()).unwrap();
        assert!((r.value.nats() - (LN_2 - h2(0.1))).abs() < 1e-9);
        let CapacityWitness::Input { lambda, .. } = &r.witness else { panic!() };
        assert!((lambda[0] - 0.5).abs() < 1e-9);
        assert!(r.components["holevo_bound"] >= r.value.nats() - 1e-8);
    }

    #[test]
    fn simplex_solver_on_asymmetric_channel() {
        // Z-channel: capacity ln(1 + (1−p) p^{p/(1−p)})
        let p: f64 = 0.3;
        let z = ClassicalChannel::new(vec![vec![1.0, p], vec![0.0, 1.0 - p]]).unwrap();
        let sol = simplex_capacity(&z, 1e-12, 100_000);
        let oracle = (1.0 + (1.0 - p) * p.powf(p / (1.0 - p))).ln();
        assert!((sol.value - oracle).abs() < 1e-10, "{} vs {oracle}", sol.value);
    }

    #[test]
    fn holevo_examples() {
        let id = QuantumChannel::identity(3);
        assert!((holevo_bound(&[1.0 / 3.0; 3], &QuantumCoding::basis(3), &id).unwrap().nats() - 3f64.ln()).abs() < 1e-12);
        let same = QuantumCoding::new(vec![DensityMatrix::basis(2, 1); 3]).unwrap();
        assert!(holevo_bound(&[0.2, 0.3, 0.5], &same, &QuantumChannel::identity(2)).unwrap().nats().abs() < 1e-12);

        let theta: f64 = 0.7;
        let codes = QuantumCoding::from_vectors(&[qubit_vector(0.0, 0.0), qubit_vector(2.0 * theta, 0.4)]).unwrap();
        let v = holevo_bound(&[0.5, 0.5], &codes, &QuantumChannel::identity(2)).unwrap().nats();
        assert!((v - h2((1.0 + theta.cos()) / 2.0)).abs() < 1e-10);
    }

    #[test]
    fn coding_capacity_examples() {
        let id = QuantumChannel::identity(2);
        let dec = MeasurementDecoding::basis(2);
        let p0 = DistributionSet::FullSimplex(2);
        let single = CodingFamily::single(QuantumCoding::basis(2));
        let r = coding_capacity(&id, &dec, &p0, &single, &quick()).unwrap();
        assert!((r.value.nats() - LN_2).abs() < 1e-10 && r.is_exact);

        let fam = CodingFamily {
            members: vec![],
            constellation: Some(2),
        };
        let r = coding_capacity(&id, &dec, &p0, &fam, &quick()).unwrap();
        assert!((r.value.nats() - LN_2).abs() < 1e-8 && r.lower_bound);

        assert!(matches!(
            coding_capacity(&id, &dec, &p0, &CodingFamily::default(), &quick()),
            Err(Error::EmptyFamily)
        ));
    }

    #[test]
    fn coding_decoding_contains_coding() {
        let ch = channel_zoo("depolarizing", &[0.2]).unwrap();
        let p0 = DistributionSet::FullSimplex(2);
        let fam = CodingFamily {
            members: vec![],
            constellation: Some(2),
        };
        let basis = MeasurementDecoding::basis(2);
        let cc = coding_capacity(&ch, &basis, &p0, &fam, &quick()).unwrap();
        let decs = DecodingFamily {
            members: vec![basis],
            projective: true,
        };
        let ccd = coding_decoding_capacity(&ch, &p0, &fam, &decs, &quick()).unwrap();
        assert!(ccd.value.nats() >= cc.value.nats() - 1e-8);
        assert!((ccd.witness.evaluate(&ch).unwrap().nats() - ccd.value.nats()).abs() < 1e-9);
    }

    #[test]
    fn chain_examples() {
        let p = SearchParams::default().with_restarts(1).with_refine_iters(25);
        let noiseless = ChainScenario {
            id: "noiseless".into(),
            channel: QuantumChannel::identity(2),
            states: StateSet::FullSpace(2),
            coding: QuantumCoding::basis(2),
            decoding: MeasurementDecoding::basis(2),
            inputs: DistributionSet::FullSimplex(2),
            coding_family: CodingFamily::default(),
            decoding_family: DecodingFamily::default(),
            search: p,
        };
        let mut blind = noiseless.clone();
        blind.id = "blind".into();
        blind.decoding = MeasurementDecoding::trivial(2);
        let report = verify_chains(&[noiseless, blind]);
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
        assert_eq!(report.checks[0].scenario, "blind");
    }
}
