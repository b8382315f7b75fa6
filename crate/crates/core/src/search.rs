//! Restart-and-refine maximization on products of unitary groups.
//!
//! Suprema over decompositions or states are searched with seeded restarts,
//! each refined by coordinate ascent with step halving. Restarts are
//! independent given their derived seeds and run in parallel; the best value
//! is taken with ties broken by restart index, so the result does not depend
//! on scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{c, exp_i_hermitian, ComplexMatrix};
use crate::tol::Tolerances;

/// Search configuration shared by every supremum computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchParams {
    /// Random restarts (the canonical start is always evaluated as well).
    pub restarts: usize,
    /// Maximum coordinate sweeps per refinement.
    pub refine_max_iters: usize,
    pub step_start: f64,
    pub step_min: f64,
    /// Degeneracy clustering gap for spectra.
    pub gap_tol: f64,
    pub zero_tol: f64,
    pub support_tol: f64,
    /// Number of terms in pseudo-mutual decompositions; `None` means dim².
    pub m_max: Option<usize>,
    pub seed: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            restarts: 32,
            refine_max_iters: 200,
            step_start: 0.1,
            step_min: 1e-5,
            gap_tol: 1e-8,
            zero_tol: 1e-12,
            support_tol: 1e-10,
            m_max: None,
            seed: 0,
        }
    }
}

impl SearchParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_refine_iters(mut self, iters: usize) -> Self {
        self.refine_max_iters = iters;
        self
    }

    /// Copies the spectral and support tolerances of a profile.
    pub fn with_tolerances(mut self, tol: &Tolerances) -> Self {
        self.gap_tol = tol.gap_tol;
        self.zero_tol = tol.zero_tol;
        self.support_tol = tol.support_tol;
        self
    }

    /// Parameters for nested searches: derived seed, same tolerances.
    pub(crate) fn nested(&self, salt: u64) -> Self {
        let mut p = *self;
        p.seed = self
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(salt.wrapping_mul(0xBF58_476D_1CE4_E5B9))
            .rotate_left(17);
        p
    }
}

/// Result of a local refinement.
#[derive(Debug, Clone)]
pub struct Refined {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Coordinate ascent from `x0`: each sweep tries ±step on every coordinate,
/// the step halves after a sweep without improvement, and the loop ends when
/// the step falls below `step_min` or after `max_iters` sweeps. An infinite
/// value ends the search immediately.
pub fn coordinate_ascent(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: Vec<f64>,
    step_start: f64,
    step_min: f64,
    max_iters: usize,
) -> Refined {
    let mut x = x0;
    let mut best = f(&x);
    let mut evaluations = 1;
    let mut step = step_start;
    let mut sweeps = 0;
    while step >= step_min && sweeps < max_iters && best < f64::INFINITY && !x.is_empty() {
        sweeps += 1;
        let mut improved = false;
        for i in 0..x.len() {
            let orig = x[i];
            for dir in [1.0, -1.0] {
                x[i] = orig + dir * step;
                let v = f(&x);
                evaluations += 1;
                if v > best + 1e-15 {
                    best = v;
                    improved = true;
                    break;
                }
                x[i] = orig;
            }
            if best == f64::INFINITY {
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Refined {
        x,
        value: best,
        evaluations,
    }
}

/// Number of real parameters for the off-diagonal generators of U(d).
pub fn generator_dim(d: usize) -> usize {
    d * (d - 1)
}

/// Hermitian matrix Σ_{i<j} a_ij (E_ij + E_ji) + b_ij (−i E_ij + i E_ji).
pub fn off_diagonal_hermitian(d: usize, params: &[f64]) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(d, d);
    let mut idx = 0;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = c(params[idx], params[idx + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            idx += 2;
        }
    }
    h
}

/// base · exp(i H(params)). Diagonal generators are omitted: they only
/// rephase columns, which leaves rank-one projectors unchanged.
pub fn rotate_right(base: &ComplexMatrix, params: &[f64]) -> ComplexMatrix {
    let d = base.cols();
    if params.iter().all(|&p| p == 0.0) {
        return base.clone();
    }
    let u = exp_i_hermitian(&off_diagonal_hermitian(d, params)).expect("Hermitian generator");
    base.matmul(&u).expect("square")
}

/// exp(i H(params)) · base.
pub fn rotate_left(base: &ComplexMatrix, params: &[f64]) -> ComplexMatrix {
    let d = base.rows();
    if params.iter().all(|&p| p == 0.0) {
        return base.clone();
    }
    let u = exp_i_hermitian(&off_diagonal_hermitian(d, params)).expect("Hermitian generator");
    u.matmul(base).expect("square")
}

/// Softmax map from unconstrained reals to the probability simplex.
pub fn softmax(x: &[f64]) -> Vec<f64> {
    let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Inverse of [`softmax`] up to an additive constant; zero entries map to a
/// large negative logit.
pub fn logits(p: &[f64]) -> Vec<f64> {
    p.iter().map(|&v| if v > 1e-300 { v.ln() } else { -700.0 }).collect()
}

/// Runs `task(i)` for every restart index in parallel and returns the best
/// result, ties going to the smaller index, plus the total evaluation count.
pub fn best_of<T, F>(n: usize, task: F) -> Option<(T, f64, usize)>
where
    T: Send,
    F: Fn(usize) -> (T, f64, usize) + Sync,
{
    let results: Vec<(T, f64, usize)> = (0..n).into_par_iter().map(&task).collect();
    let evaluations = results.iter().map(|r| r.2).sum();
    let mut best: Option<(T, f64)> = None;
    for (t, v, _) in results {
        match &best {
            Some((_, bv)) if v.partial_cmp(bv) != Some(std::cmp::Ordering::Greater) => {}
            _ => best = Some((t, v)),
        }
    }
    best.map(|(t, v)| (t, v, evaluations))
}

pub(crate) fn identity_rotations(dims: &[usize]) -> Vec<ComplexMatrix> {
    dims.iter().map(|&d| ComplexMatrix::identity(d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_defect;

    #[test]
    fn ascent_finds_quadratic_max() {
        let mut f = |x: &[f64]| -(x[0] - 0.3).powi(2) - (x[1] + 0.2).powi(2);
        let r = coordinate_ascent(&mut f, vec![0.0, 0.0], 0.1, 1e-6, 500);
        assert!((r.x[0] - 0.3).abs() < 1e-5 && (r.x[1] + 0.2).abs() < 1e-5);
    }

    #[test]
    fn rotations_stay_unitary() {
        let p: Vec<f64> = (0..generator_dim(3)).map(|k| 0.1 * k as f64).collect();
        let u = rotate_right(&ComplexMatrix::identity(3), &p);
        assert!(unitarity_defect(&u) < 1e-12);
        let u = rotate_left(&u, &p);
        assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn best_of_breaks_ties_by_index() {
        let (t, v, n) = best_of(8, |i| (i, if i % 3 == 1 { 5.0 } else { 1.0 }, 2)).unwrap();
        assert_eq!((t, v, n), (1, 5.0, 16));
    }

    #[test]
    fn softmax_round_trip() {
        let p = [0.2, 0.5, 0.3];
        let q = softmax(&logits(&p));
        for (a, b) in p.iter().zip(q) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
