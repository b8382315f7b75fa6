//! Seeded random generators for states, unitaries and distributions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::linalg::{c, vec_norm, ComplexMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for sub-task `stream` of a master seed.
pub fn stream_rng(seed: u64, stream: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream.wrapping_add(1));
    r
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    c(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, data).expect("finite gaussian entries")
}

/// Haar-random unitary: QR of a Ginibre matrix by modified Gram–Schmidt,
/// which leaves R with a positive real diagonal.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let g = ginibre(n, n, rng);
        if let Some(q) = gram_schmidt(&g) {
            return q;
        }
    }
}

/// Orthonormalizes the columns of `m` in order. `None` if they are
/// numerically dependent.
pub fn gram_schmidt(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let mut q = m.clone();
    for j in 0..m.cols() {
        let mut v = q.column(j);
        for _ in 0..2 {
            for i in 0..j {
                let u = q.column(i);
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, ui) in v.iter_mut().zip(&u) {
                    *x -= proj * ui;
                }
            }
        }
        let n = vec_norm(&v);
        if n < 1e-10 {
            return None;
        }
        for x in v.iter_mut() {
            *x /= n;
        }
        q.set_column(j, &v);
    }
    Some(q)
}

/// Uniformly random unit vector in C^n.
pub fn random_pure_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let nv = vec_norm(&v);
        if nv > 1e-12 {
            return v.into_iter().map(|z| z / nv).collect();
        }
    }
}

/// Flat Dirichlet sample on the (n-1)-simplex.
pub fn flat_dirichlet<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
        let s: f64 = x.iter().sum();
        if s > 0.0 {
            return x.into_iter().map(|v| v / s).collect();
        }
    }
}

/// Column-stochastic `n_out x n_in` matrix with flat Dirichlet columns.
pub fn random_stochastic<R: Rng + ?Sized>(n_out: usize, n_in: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let cols: Vec<Vec<f64>> = (0..n_in).map(|_| flat_dirichlet(n_out, rng)).collect();
    (0..n_out)
        .map(|j| (0..n_in).map(|k| cols[k][j]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_defect;

    #[test]
    fn haar_is_unitary_and_deterministic() {
        for n in 1..7 {
            let u = haar_unitary(n, &mut rng(11));
            assert!(unitarity_defect(&u) < 1e-12);
            assert_eq!(u, haar_unitary(n, &mut rng(11)));
        }
    }

    #[test]
    fn streams_differ() {
        let a: u64 = stream_rng(3, 0).random();
        let b: u64 = stream_rng(3, 1).random();
        assert_ne!(a, b);
    }

    #[test]
    fn dirichlet_on_simplex() {
        let p = flat_dirichlet(5, &mut rng(2));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(p.iter().all(|&x| x >= 0.0));
    }
}
