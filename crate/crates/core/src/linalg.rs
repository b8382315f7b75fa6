//! Dense complex-matrix kernels.
//!
//! Everything downstream (states, channels, entropies) is built on the
//! row-major [`ComplexMatrix`] defined here. Sizes in this crate stay small
//! (compound states of two qudits, at most a few dozen rows), so all kernels
//! are straightforward dense loops; the Hermitian eigensolver is a cyclic
//! complex Jacobi iteration, which gives eigenvalues with absolute accuracy
//! close to machine precision relative to the matrix norm.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default absolute threshold below which an eigenvalue counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

/// Relative tolerance for the Hermiticity check in [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// A dense complex matrix stored in row-major order.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from a row-major buffer, checking shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::BadShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(idx) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: idx / cols,
                col: idx % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = re(1.0);
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = re(v);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let cdim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != cdim) {
            return Err(Error::BadShape {
                rows: r,
                cols: cdim,
                len: rows.iter().map(Vec::len).sum(),
            });
        }
        Self::new(r, cdim, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| re(x)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// The projector |v⟩⟨v| (not normalized).
    pub fn outer(v: &[C64]) -> Self {
        Self::outer_pair(v, v)
    }

    /// |u⟩⟨v|.
    pub fn outer_pair(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, &ui) in u.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    /// Nested row vectors, the shape used by the scenario format.
    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.cols).map(<[C64]>::to_vec).collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(re(s))
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimMismatch {
                context: "matrix product".into(),
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::default() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// A X A† for square X.
    pub fn conjugate(&self, x: &Self) -> Result<Self> {
        self.matmul(x)?.matmul(&self.adjoint())
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Hermitian part (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        let mut out = self.clone();
        for (o, a) in out.data.iter_mut().zip(adj.data) {
            *o = (*o + a) * 0.5;
        }
        out
    }

    /// ‖A − A†‖_F.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    fn check_same_shape(&self, other: &Self, context: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimMismatch {
                context: context.into(),
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "matrix sum")?;
        Ok(self + other)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

pub fn trace(m: &ComplexMatrix) -> Result<C64> {
    m.trace()
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

/// Frobenius distance ‖A − B‖_F; infinite when the shapes differ.
pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    if a.rows != b.rows || a.cols != b.cols {
        return f64::INFINITY;
    }
    a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Kronecker product; the index of `a` is the slow one, so entry
/// `(i*rb + k, j*cb + l)` equals `a[i,j] * b[k,l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == C64::default() {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Partial trace over the second factor of a `(da*db) x (da*db)` operator.
pub fn partial_trace_second(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(da, da);
    for i in 0..da {
        for j in 0..da {
            out[(i, j)] = (0..db).map(|k| m[(i * db + k, j * db + k)]).sum();
        }
    }
    out
}

/// Partial trace over the first factor of a `(da*db) x (da*db)` operator.
pub fn partial_trace_first(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(db, db);
    for k in 0..db {
        for l in 0..db {
            out[(k, l)] = (0..da).map(|i| m[(i * db + k, i * db + l)]).sum();
        }
    }
    out
}

pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted in descending order and `eigenvectors` holds the
/// matching orthonormal columns. Each eigenvector is phase-normalized so that
/// its first non-negligible component is real and positive.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// V · diag(f(λ)) · V†, applied over the whole spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::default();
                for k in 0..n {
                    if fl[k] != C64::default() {
                        acc += v[(i, k)] * fl[k] * v[(j, k)].conj();
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(re)
    }
}

/// Hermitian eigendecomposition via cyclic complex Jacobi rotations.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let norm = m.frobenius_norm();
    let defect = m.hermitian_defect();
    if norm > 0.0 && defect > HERMITIAN_TOL * norm {
        return Err(Error::NotHermitian {
            defect: defect / norm,
        });
    }
    Ok(jacobi_eig(m.hermitian_part()))
}

fn jacobi_eig(mut a: ComplexMatrix) -> HermitianEig {
    let n = a.rows;
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b <= 1e-300 {
                    continue;
                }
                let w = apq / b;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * b);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                let wc = w.conj();

                // A <- A J with J = [[c, s], [-s w̄, c w̄]] on (p, q).
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs - akq * wc * sn;
                    a[(k, q)] = akp * sn + akq * wc * cs;
                }
                // A <- J† A.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs - aqk * w * sn;
                    a[(q, k)] = apk * sn + aqk * w * cs;
                }
                a[(p, q)] = C64::default();
                a[(q, p)] = C64::default();
                a[(p, p)] = re(app - t * b);
                a[(q, q)] = re(aqq + t * b);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cs - vkq * wc * sn;
                    v[(k, q)] = vkp * sn + vkq * wc * cs;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        fix_phase(&mut col);
        vecs.set_column(dst, &col);
    }
    HermitianEig {
        eigenvalues,
        eigenvectors: vecs,
    }
}

/// Rotates the global phase so the first component with modulus above 1e-12
/// is real and positive.
pub fn fix_phase(v: &mut [C64]) {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let ph = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

/// Natural logarithm on the support of a PSD matrix, zero on its kernel.
pub fn matrix_log_on_support(m: &ComplexMatrix, zero_tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    log_from_eig(&eig, zero_tol)
}

pub(crate) fn log_from_eig(eig: &HermitianEig, zero_tol: f64) -> Result<ComplexMatrix> {
    if let Some(&min) = eig.eigenvalues.last() {
        if min < -zero_tol {
            return Err(Error::NegativeEigenvalue { eigenvalue: min });
        }
    }
    Ok(eig.map_spectrum(|l| if l > zero_tol { re(l.ln()) } else { C64::default() }))
}

/// Exponential on the support: Σ_{λ ≠ 0} e^λ v v† for Hermitian input, the
/// inverse of [`matrix_log_on_support`] on operators whose kernel is marked
/// by exact zeros of the logarithm.
pub fn exp_on_support(m: &ComplexMatrix, zero_tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    Ok(eig.map_spectrum(|l| if l.abs() > zero_tol { re(l.exp()) } else { C64::default() }))
}

/// exp(iH) for Hermitian H.
pub fn exp_i_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    Ok(eig.map_spectrum(|l| C64::from_polar(1.0, l)))
}

/// ‖U†U − I‖_F.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let g = u.adjoint().matmul(u).expect("adjoint product");
    frobenius_distance(&g, &ComplexMatrix::identity(u.cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hadamard() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real_rows(&[vec![s, s], vec![s, -s]]).unwrap()
    }

    #[test]
    fn eig_of_degenerate_diagonal() {
        let e = hermitian_eig(&ComplexMatrix::diag(&[0.5, 0.5])).unwrap();
        assert_eq!(e.eigenvalues, vec![0.5, 0.5]);
        assert!(unitarity_defect(&e.eigenvectors) < 1e-14);
    }

    #[test]
    fn eig_of_pauli_x() {
        let x = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = hermitian_eig(&x).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-14);
        let h = hadamard();
        assert!(vec_norm(
            &e.vector(0)
                .iter()
                .zip(h.column(0))
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>()
        ) < 1e-12);
        // |−⟩ up to the phase convention: first component positive
        let minus = e.vector(1);
        assert!((minus[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((minus[1].re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect), Err(Error::NotSquare { .. })));
        let nh = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eig(&nh), Err(Error::NotHermitian { .. })));
        // the zero matrix is exempt from the relative check
        let z = hermitian_eig(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(z.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn complex_entries_diagonalize() {
        let m = ComplexMatrix::from_rows(&[
            vec![re(2.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), re(2.0)],
        ])
        .unwrap();
        let e = hermitian_eig(&m).unwrap();
        assert!((e.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(frobenius_distance(&e.reconstruct(), &m) < 1e-13);
    }

    #[test]
    fn log_on_support_examples() {
        let l = matrix_log_on_support(&ComplexMatrix::identity(3), DEFAULT_ZERO_TOL).unwrap();
        assert!(l.frobenius_norm() < 1e-15);

        let e = std::f64::consts::E;
        let l = matrix_log_on_support(&ComplexMatrix::diag(&[e, 1.0, 0.0]), DEFAULT_ZERO_TOL).unwrap();
        assert!(frobenius_distance(&l, &ComplexMatrix::diag(&[1.0, 0.0, 0.0])) < 1e-14);

        let l = matrix_log_on_support(&ComplexMatrix::diag(&[0.5, 0.5]), DEFAULT_ZERO_TOL).unwrap();
        let h = 0.5f64.ln();
        assert!(frobenius_distance(&l, &ComplexMatrix::diag(&[h, h])) < 1e-14);
        assert!((h + std::f64::consts::LN_2).abs() < 1e-15);

        assert!(matches!(
            matrix_log_on_support(&ComplexMatrix::diag(&[1.0, -0.1]), DEFAULT_ZERO_TOL),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }

    #[test]
    fn tensor_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
        let d = tensor(&ComplexMatrix::diag(&[1.0, 0.0]), &ComplexMatrix::diag(&[0.0, 1.0]));
        assert_eq!(d, ComplexMatrix::diag(&[0.0, 1.0, 0.0, 0.0]));

        let a = ComplexMatrix::new(2, 2, (0..4).map(|k| c(k as f64, 1.0)).collect()).unwrap();
        let b = ComplexMatrix::new(3, 3, (0..9).map(|k| c(1.0, k as f64)).collect()).unwrap();
        let t = tensor(&a, &b);
        assert_eq!((t.rows(), t.cols()), (6, 6));
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..3 {
                    for l in 0..3 {
                        assert_eq!(t[(i * 3 + k, j * 3 + l)], a[(i, j)] * b[(k, l)]);
                    }
                }
            }
        }
    }

    #[test]
    fn plumbing_examples() {
        assert_eq!(trace(&ComplexMatrix::identity(4)).unwrap(), re(4.0));
        assert!(matches!(trace(&ComplexMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
        let m = ComplexMatrix::new(2, 3, (0..6).map(|k| c(k as f64, -(k as f64))).collect()).unwrap();
        assert_eq!(adjoint(&adjoint(&m)), m);
        assert_eq!(frobenius_distance(&m, &m), 0.0);
    }

    #[test]
    fn partial_traces_of_product() {
        let a = ComplexMatrix::diag(&[0.25, 0.75]);
        let b = ComplexMatrix::diag(&[0.1, 0.2, 0.7]);
        let ab = tensor(&a, &b);
        assert!(frobenius_distance(&partial_trace_second(&ab, 2, 3), &a) < 1e-15);
        assert!(frobenius_distance(&partial_trace_first(&ab, 2, 3), &b) < 1e-15);
    }

    #[test]
    fn constructor_checks() {
        assert!(matches!(ComplexMatrix::new(2, 2, vec![re(0.0); 3]), Err(Error::BadShape { .. })));
        let mut d = vec![re(0.0); 4];
        d[3] = re(f64::NAN);
        assert!(matches!(ComplexMatrix::new(2, 2, d), Err(Error::NonFinite { row: 1, col: 1 })));
    }

    #[test]
    fn exp_i_hermitian_is_unitary() {
        let h = ComplexMatrix::from_rows(&[
            vec![re(0.3), c(0.2, -0.7)],
            vec![c(0.2, 0.7), re(-1.1)],
        ])
        .unwrap();
        let u = exp_i_hermitian(&h).unwrap();
        assert!(unitarity_defect(&u) < 1e-13);
    }
}
