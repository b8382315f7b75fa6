//! Entropy functionals, all in nats.
//!
//! Quantum side: von Neumann entropy and Umegaki relative entropy with the
//! range-containment condition (in finite dimensions ranges are closed, so
//! plain range containment is the condition). Classical side: Shannon
//! entropy, Kullback–Leibler divergence and mutual information of a finite
//! channel. For finite spaces the supremum over finite partitions is attained
//! by the partition into atoms, so these are closed-form sums.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channels::ClassicalChannel;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64, DEFAULT_ZERO_TOL};
use crate::states::{check_distribution, DensityMatrix};

/// Default largest weight of ρ on ker σ that still counts as ran ρ ⊂ ran σ.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-10;

/// Kernel weights in (support_tol, NEAR_VIOLATION_TOL) are reported as
/// infinite but flagged borderline.
pub const NEAR_VIOLATION_TOL: f64 = 1e-6;

/// Negative round-off above this magnitude is kept rather than clamped.
const CLAMP_TOL: f64 = 1e-10;

/// An entropy in nats; may be `+inf` for relative entropies.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EntropyValue(f64);

impl EntropyValue {
    pub const ZERO: Self = Self(0.0);
    pub const INFINITY: Self = Self(f64::INFINITY);

    /// Wraps a value in nats, clamping round-off in (−1e-10, 0) to zero.
    pub fn new(nats: f64) -> Self {
        assert!(!nats.is_nan(), "entropy value is NaN");
        if nats < 0.0 && nats > -CLAMP_TOL {
            Self(0.0)
        } else {
            Self(nats)
        }
    }

    /// Unclamped value; used for differences of entropies.
    pub fn raw(nats: f64) -> Self {
        assert!(!nats.is_nan(), "entropy value is NaN");
        Self(nats)
    }

    pub fn nats(self) -> f64 {
        self.0
    }

    pub fn bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "+inf")
        } else {
            write!(f, "{:.9} nats", self.0)
        }
    }
}

/// −Σ λ ln λ over the eigenvalues above `zero_tol`.
pub fn spectrum_entropy(eigenvalues: &[f64], zero_tol: f64) -> f64 {
    -eigenvalues
        .iter()
        .filter(|&&l| l > zero_tol)
        .map(|&l| l * l.ln())
        .sum::<f64>()
}

/// S(ρ) = −tr ρ ln ρ.
pub fn von_neumann(rho: &DensityMatrix) -> EntropyValue {
    EntropyValue::new(spectrum_entropy(&rho.eigenvalues(), DEFAULT_ZERO_TOL))
}

/// Relative entropy together with its support diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeEntropy {
    pub value: EntropyValue,
    /// tr(ρ K_σ), K_σ the projector onto ker σ.
    pub kernel_weight: f64,
    /// Set when the kernel weight is between the support tolerance and 1e-6,
    /// i.e. the infinite verdict sits close to the finite/infinite boundary.
    pub borderline: bool,
}

/// tr A(ln A − ln B) for PSD operators of any trace.
///
/// Only the scaling/additivity identities and the orthogonal-decomposition
/// machinery call this on unnormalized operators.
pub(crate) fn relative_entropy_operators(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    zero_tol: f64,
    support_tol: f64,
) -> Result<RelativeEntropy> {
    if a.rows() != b.rows() || !a.is_square() || !b.is_square() {
        return Err(Error::DimMismatch {
            context: "relative entropy".into(),
            expected: a.rows(),
            found: b.rows(),
        });
    }
    let ea = hermitian_eig(a)?;
    let eb = hermitian_eig(b)?;
    for min in [ea.eigenvalues.last(), eb.eigenvalues.last()].into_iter().flatten() {
        if *min < -zero_tol.max(1e-12) {
            return Err(Error::NegativeEigenvalue { eigenvalue: *min });
        }
    }
    let self_term: f64 = ea
        .eigenvalues
        .iter()
        .filter(|&&l| l > zero_tol)
        .map(|&l| l * l.ln())
        .sum();

    let mut kernel_weight = 0.0;
    let mut cross_term = 0.0;
    for (k, &mu) in eb.eigenvalues.iter().enumerate() {
        let w = eb.vector(k);
        let aw = a.mat_vec(&w);
        let weight: f64 = w.iter().zip(&aw).map(|(x, y)| (x.conj() * y).re).sum::<f64>();
        if mu > zero_tol {
            cross_term += weight * mu.ln();
        } else {
            kernel_weight += weight;
        }
    }
    let kernel_weight = kernel_weight.max(0.0);
    if kernel_weight > support_tol {
        return Ok(RelativeEntropy {
            value: EntropyValue::INFINITY,
            kernel_weight,
            borderline: kernel_weight < NEAR_VIOLATION_TOL,
        });
    }
    Ok(RelativeEntropy {
        value: EntropyValue::raw(self_term - cross_term),
        kernel_weight,
        borderline: false,
    })
}

/// Umegaki relative entropy S(ρ, σ) with support diagnostics.
pub fn umegaki_relative_detailed(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    support_tol: f64,
) -> Result<RelativeEntropy> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch {
            context: "relative entropy".into(),
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let mut r = relative_entropy_operators(rho.matrix(), sigma.matrix(), DEFAULT_ZERO_TOL, support_tol)?;
    r.value = EntropyValue::new(r.value.nats());
    Ok(r)
}

/// S(ρ, σ) = tr ρ(ln ρ − ln σ) when ran ρ ⊂ ran σ, +∞ otherwise.
pub fn umegaki_relative(rho: &DensityMatrix, sigma: &DensityMatrix, support_tol: f64) -> Result<EntropyValue> {
    Ok(umegaki_relative_detailed(rho, sigma, support_tol)?.value)
}

/// −Σ p ln p.
pub fn shannon(p: &[f64]) -> Result<EntropyValue> {
    check_distribution(p, 1e-10)?;
    Ok(EntropyValue::new(
        -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>(),
    ))
}

/// Σ p ln(p/q), with 0 ln(0/q) = 0 and +∞ when some p_k > 0 has q_k = 0.
pub fn classical_relative(p: &[f64], q: &[f64]) -> Result<EntropyValue> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            context: "classical relative entropy".into(),
            expected: p.len(),
            found: q.len(),
        });
    }
    let mut acc = 0.0;
    for (&pk, &qk) in p.iter().zip(q) {
        if pk <= 0.0 {
            continue;
        }
        if qk <= 0.0 {
            return Ok(EntropyValue::INFINITY);
        }
        acc += pk * (pk / qk).ln();
    }
    Ok(EntropyValue::new(acc))
}

/// Joint law Φ(j, k) = T_jk μ_k of input k and output j.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    /// `n_out x n_in`.
    pub matrix: Vec<Vec<f64>>,
}

impl JointDistribution {
    pub fn new(mu: &[f64], t: &ClassicalChannel) -> Result<Self> {
        if mu.len() != t.n_in() {
            return Err(Error::LengthMismatch {
                context: "input distribution".into(),
                expected: t.n_in(),
                found: mu.len(),
            });
        }
        check_distribution(mu, 1e-10)?;
        let matrix = (0..t.n_out())
            .map(|j| (0..t.n_in()).map(|k| t.entry(j, k) * mu[k]).collect())
            .collect();
        Ok(Self { matrix })
    }

    pub fn input_marginal(&self) -> Vec<f64> {
        let n_in = self.matrix[0].len();
        (0..n_in).map(|k| self.matrix.iter().map(|r| r[k]).sum()).collect()
    }

    pub fn output_marginal(&self) -> Vec<f64> {
        self.matrix.iter().map(|r| r.iter().sum()).collect()
    }
}

/// I(μ; T) = S(Φ, μ ⊗ Tμ).
pub fn classical_mutual(mu: &[f64], t: &ClassicalChannel) -> Result<EntropyValue> {
    let joint = JointDistribution::new(mu, t)?;
    let out = t.push_forward(mu);
    let mut phi = Vec::new();
    let mut product = Vec::new();
    for (j, row) in joint.matrix.iter().enumerate() {
        for (k, &x) in row.iter().enumerate() {
            phi.push(x);
            product.push(out[j] * mu[k]);
        }
    }
    classical_relative(&phi, &product)
}

/// Returns `(S(aρ, bσ), a·S(ρ, σ) − a·ln(b/a))`, the left side evaluated
/// directly on the scaled operators.
pub fn relative_entropy_scaling_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    a: f64,
    b: f64,
) -> Result<(EntropyValue, EntropyValue)> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::NotDistribution {
            reason: format!("scale factors must be positive (a = {a}, b = {b})"),
        });
    }
    let lhs = relative_entropy_operators(
        &rho.matrix().scale_real(a),
        &sigma.matrix().scale_real(b),
        DEFAULT_ZERO_TOL,
        DEFAULT_SUPPORT_TOL * a,
    )?
    .value;
    let base = umegaki_relative(rho, sigma, DEFAULT_SUPPORT_TOL)?;
    let rhs = if base.is_infinite() {
        EntropyValue::INFINITY
    } else {
        EntropyValue::raw(a * base.nats() - a * (b / a).ln())
    };
    Ok((lhs, rhs))
}

/// For PSD `rho1`, `rho2` with orthogonal ranges, returns
/// `(S(ρ1 + ρ2, σ), S(ρ1, σ) + S(ρ2, σ))`.
pub fn orthogonal_additivity_check(
    rho1: &ComplexMatrix,
    rho2: &ComplexMatrix,
    sigma: &DensityMatrix,
) -> Result<(EntropyValue, EntropyValue)> {
    let overlap = rho1.matmul(rho2)?.frobenius_norm();
    if overlap > 1e-9 {
        return Err(Error::DecompositionMismatch { defect: overlap });
    }
    let rel = |x: &ComplexMatrix| {
        relative_entropy_operators(x, sigma.matrix(), DEFAULT_ZERO_TOL, DEFAULT_SUPPORT_TOL).map(|r| r.value)
    };
    let joint = rel(&(rho1 + rho2))?;
    let (s1, s2) = (rel(rho1)?, rel(rho2)?);
    Ok((joint, EntropyValue::raw(s1.nats() + s2.nats())))
}

/// S(·, σ) with the spectral data of a fixed σ precomputed, for sums of many
/// relative entropies against the same second argument.
pub(crate) struct RelativeTo {
    log_sigma: ComplexMatrix,
    kernel: Vec<Vec<C64>>,
    zero_tol: f64,
    support_tol: f64,
}

impl RelativeTo {
    pub(crate) fn new(sigma: &ComplexMatrix, zero_tol: f64, support_tol: f64) -> Result<Self> {
        let eig = hermitian_eig(sigma)?;
        let kernel = (0..eig.dim())
            .filter(|&k| eig.eigenvalues[k] <= zero_tol)
            .map(|k| eig.vector(k))
            .collect();
        let log_sigma = crate::linalg::log_from_eig(&eig, zero_tol.max(1e-12))?;
        Ok(Self {
            log_sigma,
            kernel,
            zero_tol,
            support_tol,
        })
    }

    /// S(a, σ) for a PSD operator `a`.
    pub(crate) fn of(&self, a: &ComplexMatrix) -> Result<RelativeEntropy> {
        let kernel_weight = self
            .kernel
            .iter()
            .map(|w| expectation(a, w))
            .sum::<f64>()
            .max(0.0);
        if kernel_weight > self.support_tol {
            return Ok(RelativeEntropy {
                value: EntropyValue::INFINITY,
                kernel_weight,
                borderline: kernel_weight < NEAR_VIOLATION_TOL,
            });
        }
        let ea = hermitian_eig(a)?;
        let self_term: f64 = ea
            .eigenvalues
            .iter()
            .filter(|&&l| l > self.zero_tol)
            .map(|&l| l * l.ln())
            .sum();
        let n = a.rows();
        let mut cross = 0.0;
        for i in 0..n {
            for j in 0..n {
                cross += (a[(i, j)] * self.log_sigma[(j, i)]).re;
            }
        }
        Ok(RelativeEntropy {
            value: EntropyValue::raw(self_term - cross),
            kernel_weight,
            borderline: false,
        })
    }
}

pub(crate) fn expectation(m: &ComplexMatrix, v: &[C64]) -> f64 {
    let mv = m.mat_vec(v);
    v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum()
}
