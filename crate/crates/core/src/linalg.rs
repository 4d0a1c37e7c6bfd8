//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on `nalgebra` dynamic matrices. The Hermitian
//! eigendecomposition is the one primitive whose numerical details matter
//! downstream: it is deterministic for a fixed input, and callers must not
//! depend on the particular eigenvectors chosen inside degenerate eigenspaces.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Rebuilds `Q f(Λ) Q†` for a real function of the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..n {
            let s = f(self.values[k]);
            scaled.column_mut(k).scale_mut(s);
        }
        &scaled * self.vectors.adjoint()
    }

    /// Same as [`map`](Self::map) for a complex-valued function.
    pub fn map_complex(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..n {
            let s = f(self.values[k]);
            for v in scaled.column_mut(k).iter_mut() {
                *v *= s;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    idx
}

/// Full eigendecomposition of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let raw: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = descending_order(&raw);
    let values = order.iter().map(|&k| raw[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermitianEigen { values, vectors }
}

/// Eigenvalues of the Hermitian part of `m`, descending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut values: Vec<f64> = match n {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
            let mean = 0.5 * (a + d);
            let half = 0.5 * (a - d);
            let r = (half * half + b.norm_sqr()).sqrt();
            vec![mean + r, mean - r]
        }
        _ => hermitian_part(m).symmetric_eigenvalues().iter().copied().collect(),
    };
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

/// `(m + m†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest elementwise deviation `|m - m†|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    frobenius_norm(&(a - b))
}

/// Sum of singular values. Hermitian inputs take the eigenvalue route.
pub fn trace_norm_of(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    if m.is_square() && hermitian_defect(m) <= 1e-14 * scale {
        hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
    } else {
        m.singular_values().iter().sum()
    }
}

/// `‖u u† − I‖_F`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    frobenius_norm(&(u * u.adjoint() - CMatrix::identity(n, n)))
}

/// `exp(i h)` for Hermitian `h`, through its eigendecomposition.
pub fn expm_i_hermitian(h: &CMatrix) -> CMatrix {
    let eig = hermitian_eigen(h);
    eig.map_complex(|x| Complex64::from_polar(1.0, x))
}

/// `u m u†`.
pub fn conjugate_by(u: &CMatrix, m: &CMatrix) -> CMatrix {
    u * m * u.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// `|v⟩⟨v|`.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_hermitian(n: usize, salt: f64) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let x = ((i * 7 + j * 3) as f64 + salt).sin();
                let y = ((i * 5 + j * 11) as f64 * 0.37 + salt).cos();
                m[(i, j)] = c(x, y);
            }
        }
        hermitian_part(&m)
    }

    #[test]
    fn eigen_reconstructs_complex_hermitian() {
        for n in 1..=9 {
            let m = sample_hermitian(n, n as f64);
            let eig = hermitian_eigen(&m);
            let back = eig.map(|x| x);
            assert!(frobenius_distance(&back, &m) < 1e-12, "n = {n}");
            assert!(unitarity_defect(&eig.vectors) < 1e-12);
            assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
            let fast = hermitian_eigenvalues(&m);
            for (a, b) in fast.iter().zip(&eig.values) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn expm_is_unitary_and_identity_at_zero() {
        let h = sample_hermitian(4, 0.3).scale(2.5);
        assert!(unitarity_defect(&expm_i_hermitian(&h)) < 1e-12);
        let z = CMatrix::zeros(3, 3);
        assert!(frobenius_distance(&expm_i_hermitian(&z), &CMatrix::identity(3, 3)) < 1e-15);
    }

    #[test]
    fn trace_norm_of_general_matrix_uses_singular_values() {
        // [[0, 2], [0, 0]] has singular values {2, 0}.
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(2.0, 0.0);
        assert!((trace_norm_of(&m) - 2.0).abs() < 1e-14);
        assert_eq!(trace_norm_of(&CMatrix::zeros(3, 3)), 0.0);
    }
}
