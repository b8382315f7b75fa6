//! Numerical tolerance profiles.

use serde::{Deserialize, Serialize};

/// Tolerances shared by the state, entropy and search layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Eigenvalues at or below this count as zero.
    pub zero_tol: f64,
    /// Consecutive eigenvalues closer than this are one degenerate block.
    pub gap_tol: f64,
    /// Largest weight of ρ on ker σ still treated as range containment.
    pub support_tol: f64,
    /// Kernel weights between `support_tol` and this are flagged borderline.
    pub near_violation_tol: f64,
    /// ‖M − M†‖_F bound for density matrices.
    pub hermitian_tol: f64,
    /// Minimum eigenvalue bound (as −tol) for density matrices.
    pub positivity_tol: f64,
    /// |tr ρ − 1| bound for density matrices.
    pub trace_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero_tol: 1e-12,
            gap_tol: 1e-8,
            support_tol: 1e-10,
            near_violation_tol: 1e-6,
            hermitian_tol: 1e-10,
            positivity_tol: 1e-12,
            trace_tol: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn strict() -> Self {
        Self {
            zero_tol: 1e-14,
            gap_tol: 1e-10,
            support_tol: 1e-12,
            near_violation_tol: 1e-6,
            hermitian_tol: 1e-12,
            positivity_tol: 1e-13,
            trace_tol: 1e-12,
        }
    }
}
