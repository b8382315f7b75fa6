//! CPTP channels in Kraus form, classical channels, quantum codings and
//! measurement decodings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, frobenius_distance, hermitian_eig, re, tensor, ComplexMatrix, C64};
use crate::states::{check_distribution, validate_density, DensityMatrix};

/// Trace-preservation tolerance on ‖Σ K†K − I‖_F.
pub const TP_TOL: f64 = 1e-10;

/// A completely positive trace-preserving map ρ ↦ Σ K ρ K†.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::NoKraus)?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        for k in &kraus {
            if k.cols() != dim_in {
                return Err(Error::DimMismatch {
                    context: "Kraus input dimension".into(),
                    expected: dim_in,
                    found: k.cols(),
                });
            }
            if k.rows() != dim_out {
                return Err(Error::DimMismatch {
                    context: "Kraus output dimension".into(),
                    expected: dim_out,
                    found: k.rows(),
                });
            }
        }
        let ch = Self {
            dim_in,
            dim_out,
            kraus,
        };
        let defect = ch.trace_preservation_defect();
        if defect > TP_TOL {
            return Err(Error::NotTracePreserving { defect });
        }
        Ok(ch)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim_in: dim,
            dim_out: dim,
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// ‖Σ K†K − I‖_F.
    pub fn trace_preservation_defect(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            acc = &acc + &k.adjoint().matmul(k).expect("kraus shapes checked");
        }
        frobenius_distance(&acc, &ComplexMatrix::identity(self.dim_in))
    }

    /// Σ K X K† on an arbitrary square operator, without validation.
    pub fn map_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = &out + &k.conjugate(x).expect("dimension checked by caller");
        }
        out
    }

    /// Output state Λ*ρ for a trusted input, skipping the post-hoc check.
    pub(crate) fn image(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_trusted(self.map_operator(rho.matrix()))
    }

    /// Choi matrix Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|).
    pub fn choi(&self) -> ComplexMatrix {
        let (din, dout) = (self.dim_in, self.dim_out);
        let mut j = ComplexMatrix::zeros(din * dout, din * dout);
        for a in 0..din {
            for b in 0..din {
                let mut eab = ComplexMatrix::zeros(din, din);
                eab[(a, b)] = re(1.0);
                let img = self.map_operator(&eab);
                j = &j + &tensor(&eab, &img);
            }
        }
        j
    }

    /// Kraus operators from a Choi matrix laid out as in [`QuantumChannel::choi`].
    pub fn from_choi(choi: &ComplexMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        if choi.rows() != dim_in * dim_out || !choi.is_square() {
            return Err(Error::DimMismatch {
                context: "Choi matrix".into(),
                expected: dim_in * dim_out,
                found: choi.rows(),
            });
        }
        let eig = hermitian_eig(choi)?;
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        let mut kraus = Vec::new();
        for (k, &mu) in eig.eigenvalues.iter().enumerate() {
            if mu <= 1e-14 {
                continue;
            }
            let v = eig.vector(k);
            let s = mu.sqrt();
            let mut op = ComplexMatrix::zeros(dim_out, dim_in);
            for i in 0..dim_in {
                for a in 0..dim_out {
                    op[(a, i)] = v[i * dim_out + a] * s;
                }
            }
            kraus.push(op);
        }
        Self::new(kraus)
    }
}

/// Λ*ρ, validated as a density matrix.
pub fn apply(ch: &QuantumChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != ch.dim_in {
        return Err(Error::DimMismatch {
            context: "channel input".into(),
            expected: ch.dim_in,
            found: rho.dim(),
        });
    }
    validate_density(&ch.map_operator(rho.matrix()).hermitian_part())
}

/// `after ∘ before`, with Kraus set {A_i B_j}.
pub fn compose(after: &QuantumChannel, before: &QuantumChannel) -> Result<QuantumChannel> {
    if before.dim_out != after.dim_in {
        return Err(Error::DimMismatch {
            context: "channel composition".into(),
            expected: after.dim_in,
            found: before.dim_out,
        });
    }
    let mut kraus = Vec::with_capacity(after.kraus.len() * before.kraus.len());
    for a in &after.kraus {
        for b in &before.kraus {
            kraus.push(a.matmul(b)?);
        }
    }
    QuantumChannel::new(kraus)
}

/// Column-stochastic matrix: `matrix[j][k]` is P(output j | input k).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalChannel {
    matrix: Vec<Vec<f64>>,
}

impl ClassicalChannel {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n_out = matrix.len();
        let n_in = matrix.first().map_or(0, Vec::len);
        if n_out == 0 || n_in == 0 || matrix.iter().any(|r| r.len() != n_in) {
            return Err(Error::NotStochastic {
                reason: "ragged or empty matrix".into(),
            });
        }
        if matrix.iter().flatten().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::NotStochastic {
                reason: "entry outside [0, 1]".into(),
            });
        }
        for k in 0..n_in {
            let s: f64 = matrix.iter().map(|r| r[k]).sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::NotStochastic {
                    reason: format!("column {k} sums to {s}"),
                });
            }
        }
        Ok(Self { matrix })
    }

    pub fn n_in(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn n_out(&self) -> usize {
        self.matrix.len()
    }

    pub fn entry(&self, j: usize, k: usize) -> f64 {
        self.matrix[j][k]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.matrix.iter().map(|r| r[k]).collect()
    }

    /// T·p.
    pub fn push_forward(&self, p: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|r| r.iter().zip(p).map(|(t, x)| t * x).sum())
            .collect()
    }

    /// Binary symmetric channel with flip probability `p`.
    pub fn binary_symmetric(p: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }
}

/// Quantum channel diag(p) ↦ diag(T·p) with Kraus set {√T_jk |j⟩⟨k|}.
pub fn embed_classical(t: &ClassicalChannel) -> QuantumChannel {
    let (n_out, n_in) = (t.n_out(), t.n_in());
    let mut kraus = Vec::new();
    for j in 0..n_out {
        for k in 0..n_in {
            let w = t.entry(j, k);
            if w > 0.0 {
                let mut m = ComplexMatrix::zeros(n_out, n_in);
                m[(j, k)] = re(w.sqrt());
                kraus.push(m);
            }
        }
    }
    QuantumChannel {
        dim_in: n_in,
        dim_out: n_out,
        kraus,
    }
}

/// The map k ↦ σ_k from message indices to code states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumCoding {
    code_states: Vec<DensityMatrix>,
}

impl QuantumCoding {
    pub fn new(code_states: Vec<DensityMatrix>) -> Result<Self> {
        let dim = code_states.first().ok_or(Error::InvalidCoding)?.dim();
        if code_states.iter().any(|s| s.dim() != dim) {
            return Err(Error::InvalidCoding);
        }
        Ok(Self { code_states })
    }

    /// Pure code states |ψ_k⟩⟨ψ_k| from (not necessarily normalized) vectors.
    pub fn from_vectors(vectors: &[Vec<C64>]) -> Result<Self> {
        Self::new(
            vectors
                .iter()
                .map(|v| DensityMatrix::pure(v))
                .collect::<Result<_>>()?,
        )
    }

    /// |k⟩⟨k| for k = 0..dim.
    pub fn basis(dim: usize) -> Self {
        Self {
            code_states: (0..dim).map(|k| DensityMatrix::basis(dim, k)).collect(),
        }
    }

    pub fn n_symbols(&self) -> usize {
        self.code_states.len()
    }

    pub fn dim(&self) -> usize {
        self.code_states[0].dim()
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.code_states
    }
}

/// σ = Σ_k λ_k σ_k.
pub fn coding_channel(coding: &QuantumCoding, lambda: &[f64]) -> Result<DensityMatrix> {
    if lambda.len() != coding.n_symbols() {
        return Err(Error::LengthMismatch {
            context: "coding input distribution".into(),
            expected: coding.n_symbols(),
            found: lambda.len(),
        });
    }
    check_distribution(lambda, 1e-12)?;
    DensityMatrix::mixture(lambda, &coding.code_states)
}

/// A POVM read out as a classical distribution p_j = tr(M_j ρ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDecoding {
    dim_in: usize,
    povm: Vec<ComplexMatrix>,
}

impl MeasurementDecoding {
    pub fn new(povm: Vec<ComplexMatrix>) -> Result<Self> {
        let first = povm.first().ok_or_else(|| Error::InvalidPovm {
            reason: "no elements".into(),
        })?;
        let d = first.rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (j, m) in povm.iter().enumerate() {
            if m.rows() != d || m.cols() != d {
                return Err(Error::InvalidPovm {
                    reason: format!("element {j} has shape {}x{}", m.rows(), m.cols()),
                });
            }
            let eig = hermitian_eig(m).map_err(|e| Error::InvalidPovm {
                reason: format!("element {j}: {e}"),
            })?;
            let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
            if min < -1e-12 {
                return Err(Error::InvalidPovm {
                    reason: format!("element {j} has eigenvalue {min:.3e}"),
                });
            }
            sum = &sum + m;
        }
        let defect = frobenius_distance(&sum, &ComplexMatrix::identity(d));
        if defect > 1e-10 {
            return Err(Error::InvalidPovm {
                reason: format!("elements sum to identity only within {defect:.3e}"),
            });
        }
        Ok(Self { dim_in: d, povm })
    }

    /// Computational-basis measurement.
    pub fn basis(dim: usize) -> Self {
        Self {
            dim_in: dim,
            povm: (0..dim)
                .map(|k| DensityMatrix::basis(dim, k).into_matrix())
                .collect(),
        }
    }

    /// The single-outcome POVM {I}.
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim_in: dim,
            povm: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// Rank-one projective measurement onto the columns of a unitary.
    pub fn projective(frame: &ComplexMatrix) -> Result<Self> {
        Self::new((0..frame.cols()).map(|j| ComplexMatrix::outer(&frame.column(j))).collect())
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn n_outcomes(&self) -> usize {
        self.povm.len()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.povm
    }

    /// The measure-and-prepare channel ρ ↦ Σ_j tr(M_j ρ) |j⟩⟨j|.
    pub fn as_channel(&self) -> QuantumChannel {
        let n = self.povm.len();
        let mut kraus = Vec::new();
        for (j, m) in self.povm.iter().enumerate() {
            let eig = hermitian_eig(m).expect("validated POVM");
            for (k, &mu) in eig.eigenvalues.iter().enumerate() {
                if mu <= 0.0 {
                    continue;
                }
                let v = eig.vector(k);
                let mut op = ComplexMatrix::zeros(n, self.dim_in);
                for (i, vi) in v.iter().enumerate() {
                    op[(j, i)] = vi.conj() * mu.sqrt();
                }
                kraus.push(op);
            }
        }
        QuantumChannel {
            dim_in: self.dim_in,
            dim_out: n,
            kraus,
        }
    }

    pub(crate) fn probabilities(&self, rho: &ComplexMatrix) -> Vec<f64> {
        let mut probs: Vec<f64> = self
            .povm
            .iter()
            .map(|m| {
                let p: f64 = (0..self.dim_in)
                    .flat_map(|i| (0..self.dim_in).map(move |j| (i, j)))
                    .map(|(i, j)| (m[(i, j)] * rho[(j, i)]).re)
                    .sum();
                p.clamp(0.0, 1.0)
            })
            .collect();
        // rounding can push a sharp outcome just past 1
        let total: f64 = probs.iter().sum();
        if total > 0.0 {
            probs.iter_mut().for_each(|p| *p /= total);
        }
        probs
    }
}

/// p_j = tr(M_j ρ).
pub fn decode(dec: &MeasurementDecoding, rho: &DensityMatrix) -> Result<Vec<f64>> {
    if rho.dim() != dec.dim_in {
        return Err(Error::DimMismatch {
            context: "decoding input".into(),
            expected: dec.dim_in,
            found: rho.dim(),
        });
    }
    Ok(dec.probabilities(rho.matrix()))
}

fn check_probability(channel: &str, name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::ParamOutOfRange {
            channel: channel.into(),
            reason: format!("{name} = {p} is not in [0, 1]"),
        });
    }
    Ok(())
}

fn dim_param(channel: &str, params: &[f64], idx: usize, default: usize) -> Result<usize> {
    match params.get(idx) {
        None => Ok(default),
        Some(&d) if d >= 1.0 && d.fract() == 0.0 && d <= 64.0 => Ok(d as usize),
        Some(&d) => Err(Error::ParamOutOfRange {
            channel: channel.into(),
            reason: format!("dimension {d} is not an integer in [1, 64]"),
        }),
    }
}

fn qubit_only(channel: &str, params: &[f64], max: usize) -> Result<()> {
    if params.len() > max {
        return Err(Error::ParamOutOfRange {
            channel: channel.into(),
            reason: format!("expected at most {max} parameters, got {}", params.len()),
        });
    }
    Ok(())
}

/// Weyl (clock-and-shift) operator X^a Z^b in dimension `d`.
fn weyl(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let phase = 2.0 * std::f64::consts::PI * (b * k) as f64 / d as f64;
        m[((k + a) % d, k)] = C64::from_polar(1.0, phase);
    }
    m
}

/// Named fixture channels.
///
/// | name | params | action |
/// |---|---|---|
/// | `identity` | `[d]` (default 2) | ρ |
/// | `depolarizing` | `[p]` or `[p, d]` | (1−p)ρ + p·I/d |
/// | `dephasing` | `[p]` or `[p, d]` | (1−p)ρ + p·diag(ρ) |
/// | `bit-flip` | `[p]` | (1−p)ρ + p·XρX |
/// | `phase-flip` | `[p]` | (1−p)ρ + p·ZρZ |
/// | `amplitude-damping` | `[γ]` | decay |1⟩ → |0⟩ with probability γ |
pub fn channel_zoo(name: &str, params: &[f64]) -> Result<QuantumChannel> {
    let need = |n: usize| -> Result<f64> {
        params.get(n).copied().ok_or_else(|| Error::ParamOutOfRange {
            channel: name.into(),
            reason: "missing probability parameter".into(),
        })
    };
    match name {
        "identity" => {
            qubit_only(name, params, 1)?;
            Ok(QuantumChannel::identity(dim_param(name, params, 0, 2)?))
        }
        "depolarizing" => {
            qubit_only(name, params, 2)?;
            let p = need(0)?;
            check_probability(name, "p", p)?;
            let d = dim_param(name, params, 1, 2)?;
            let d2 = (d * d) as f64;
            let mut kraus = vec![ComplexMatrix::identity(d).scale_real((1.0 - p + p / d2).sqrt())];
            if p > 0.0 {
                for a in 0..d {
                    for b in 0..d {
                        if a == 0 && b == 0 {
                            continue;
                        }
                        kraus.push(weyl(d, a, b).scale_real((p / d2).sqrt()));
                    }
                }
            }
            QuantumChannel::new(kraus)
        }
        "dephasing" => {
            qubit_only(name, params, 2)?;
            let p = need(0)?;
            check_probability(name, "p", p)?;
            let d = dim_param(name, params, 1, 2)?;
            let mut kraus = vec![ComplexMatrix::identity(d).scale_real((1.0 - p).sqrt())];
            if p > 0.0 {
                for k in 0..d {
                    kraus.push(DensityMatrix::basis(d, k).into_matrix().scale_real(p.sqrt()));
                }
            }
            QuantumChannel::new(kraus)
        }
        "bit-flip" | "phase-flip" => {
            qubit_only(name, params, 1)?;
            let p = need(0)?;
            check_probability(name, "p", p)?;
            let pauli = if name == "bit-flip" {
                ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])?
            } else {
                ComplexMatrix::diag(&[1.0, -1.0])
            };
            QuantumChannel::new(vec![
                ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
                pauli.scale_real(p.sqrt()),
            ])
        }
        "amplitude-damping" => {
            qubit_only(name, params, 1)?;
            let g = need(0)?;
            check_probability(name, "gamma", g)?;
            let k0 = ComplexMatrix::from_rows(&[
                vec![re(1.0), re(0.0)],
                vec![re(0.0), re((1.0 - g).sqrt())],
            ])?;
            let k1 = ComplexMatrix::from_rows(&[vec![re(0.0), re(g.sqrt())], vec![re(0.0), re(0.0)]])?;
            QuantumChannel::new(vec![k0, k1])
        }
        other => Err(Error::UnknownChannel(other.into())),
    }
}

/// Completely depolarizing channel ρ ↦ I/d.
pub fn completely_depolarizing(d: usize) -> QuantumChannel {
    channel_zoo("depolarizing", &[1.0, d as f64]).expect("valid parameters")
}

/// |+⟩ and |−⟩ style helper: (|0⟩ + e^{iφ}|1⟩)/√2 rotated by θ.
pub fn qubit_vector(theta: f64, phi: f64) -> Vec<C64> {
    vec![
        re((theta / 2.0).cos()),
        c(0.0, phi).exp() * (theta / 2.0).sin(),
    ]
}
