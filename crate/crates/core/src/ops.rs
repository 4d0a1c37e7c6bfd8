//! Reductions, partial transposition, norms and entropies.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::{same_dims, BipartiteDims, DensityMatrix, Subsystem, STATE_TOL};

/// σ eigenvalues below this count as outside the support.
pub const SUPPORT_EIGEN_FLOOR: f64 = 1e-12;
/// ρ weight above this on σ's kernel makes the relative entropy infinite.
pub const SUPPORT_OVERLAP_FLOOR: f64 = 1e-10;

/// Traces out `traced`, returning the state of the other party as a `d × 1`
/// bipartition.
pub fn partial_trace(rho: &DensityMatrix, traced: Subsystem) -> DensityMatrix {
    let dims = rho.dims();
    let m = rho.matrix();
    let (d_a, d_b) = (dims.d_a(), dims.d_b());
    let out = match traced {
        Subsystem::B => CMatrix::from_fn(d_a, d_a, |a, a2| {
            (0..d_b).map(|b| m[(dims.index(a, b), dims.index(a2, b))]).sum()
        }),
        Subsystem::A => CMatrix::from_fn(d_b, d_b, |b, b2| {
            (0..d_a).map(|a| m[(dims.index(a, b), dims.index(a, b2))]).sum()
        }),
    };
    let d = out.nrows();
    DensityMatrix::from_parts_unchecked(BipartiteDims::reduced(d), out)
}

/// Partial transpose of a raw operator on `dims`. Exact index permutation,
/// hence an involution.
pub fn partial_transpose_matrix(
    m: &CMatrix,
    dims: BipartiteDims,
    subsystem: Subsystem,
) -> Result<CMatrix> {
    crate::state::check_shape(dims, m)?;
    let (d_a, d_b) = (dims.d_a(), dims.d_b());
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for a in 0..d_a {
        for b in 0..d_b {
            for a2 in 0..d_a {
                for b2 in 0..d_b {
                    let (src_row, src_col) = match subsystem {
                        Subsystem::A => (dims.index(a2, b), dims.index(a, b2)),
                        Subsystem::B => (dims.index(a, b2), dims.index(a2, b)),
                    };
                    out[(dims.index(a, b), dims.index(a2, b2))] = m[(src_row, src_col)];
                }
            }
        }
    }
    Ok(out)
}

/// `ρ^{T_A}` or `ρ^{T_B}`; Hermitian with unit trace but not necessarily PSD.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: Subsystem) -> CMatrix {
    partial_transpose_matrix(rho.matrix(), rho.dims(), subsystem)
        .expect("density matrix shape already validated")
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Structural(format!("trace norm of {}x{} matrix", m.nrows(), m.ncols())));
    }
    if !linalg::all_finite(m) {
        return Err(Error::Numeric("trace norm of matrix with non-finite entries".into()));
    }
    Ok(linalg::trace_norm_of(m))
}

/// `−Σ λ log₂ λ` over clamped eigenvalues, `0·log 0 = 0`.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values
        .iter()
        .map(|&v| v.clamp(0.0, 1.0))
        .filter(|&v| v > 0.0)
        .map(|v| -v * v.log2())
        .sum()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(rho.spectrum().values()).max(0.0)
}

/// `S(ρ‖σ) = tr ρ log₂ ρ − tr ρ log₂ σ`, or `f64::INFINITY` when the support
/// of ρ is not contained in that of σ.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dims(rho.dims(), sigma.dims())?;
    let neg_entropy = -entropy_of_spectrum(rho.spectrum().values());
    Ok(relative_entropy_with(neg_entropy, rho.matrix(), sigma.matrix()))
}

/// Relative entropy given `tr ρ log₂ ρ` precomputed, for solver hot loops.
pub(crate) fn relative_entropy_with(rho_log_rho: f64, rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let eig = linalg::hermitian_eigen(sigma);
    cross_term(rho, &eig).map_or(f64::INFINITY, |cross| (rho_log_rho + cross).max(0.0))
}

/// `−tr ρ log₂ σ` from σ's eigendecomposition; `None` on support mismatch.
pub(crate) fn cross_term(rho: &CMatrix, sigma_eig: &linalg::HermitianEigen) -> Option<f64> {
    let q = &sigma_eig.vectors;
    let mut acc = 0.0;
    for (k, &mu) in sigma_eig.values.iter().enumerate() {
        let col = q.column(k);
        let overlap = (col.adjoint() * rho * col)[(0, 0)].re;
        if mu < SUPPORT_EIGEN_FLOOR {
            if overlap > SUPPORT_OVERLAP_FLOOR {
                return None;
            }
            continue;
        }
        acc -= overlap * mu.log2();
    }
    Some(acc)
}

/// Trace distance `‖a − b‖₁` between two states.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dims(a.dims(), b.dims())?;
    trace_norm(&(a.matrix() - b.matrix()))
}

/// Clamps eigenvalues in `[−STATE_TOL, 0)` to zero; anything more negative
/// is a validation error.
pub fn clamp_eigenvalue(v: f64) -> Result<f64> {
    if v < -STATE_TOL {
        return Err(Error::Invariant(format!("eigenvalue {v:.3e} is below -{STATE_TOL:e}")));
    }
    Ok(v.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CVector};
    use crate::state::PureState;

    fn phi_plus() -> DensityMatrix {
        let dims = BipartiteDims::square(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        PureState::new(dims, v).unwrap().density_matrix()
    }

    #[test]
    fn partial_trace_examples() {
        let dims = BipartiteDims::square(2).unwrap();
        let r = partial_trace(&PureState::basis(dims, 0, 0).unwrap().density_matrix(), Subsystem::B);
        let mut expect = CMatrix::zeros(2, 2);
        expect[(0, 0)] = c(1.0, 0.0);
        assert!(linalg::frobenius_distance(r.matrix(), &expect) < 1e-15);

        // Hand expansion: the 4x4 Bell projector has 1/2 at (0,0),(0,3),(3,0),(3,3);
        // summing the diagonal 2x2 blocks over b gives diag(1/2, 1/2).
        let r = partial_trace(&phi_plus(), Subsystem::B);
        let half = CMatrix::identity(2, 2).scale(0.5);
        assert!(linalg::frobenius_distance(r.matrix(), &half) < 1e-15);

        let mut rho_a = CMatrix::zeros(2, 2);
        rho_a[(0, 0)] = c(0.7, 0.0);
        rho_a[(1, 1)] = c(0.3, 0.0);
        rho_a[(0, 1)] = c(0.1, 0.2);
        rho_a[(1, 0)] = c(0.1, -0.2);
        let third = CMatrix::identity(3, 3).unscale(3.0);
        let prod = DensityMatrix::product(&rho_a, &third).unwrap();
        assert!(linalg::frobenius_distance(partial_trace(&prod, Subsystem::A).matrix(), &third) < 1e-15);
        assert!(linalg::frobenius_distance(partial_trace(&prod, Subsystem::B).matrix(), &rho_a) < 1e-15);
    }

    #[test]
    fn partial_transpose_examples() {
        let pt = partial_transpose(&phi_plus(), Subsystem::A);
        // Equals SWAP/2: eigenvalues {1/2, 1/2, 1/2, -1/2}.
        let vals = linalg::hermitian_eigenvalues(&pt);
        for (v, e) in vals.iter().zip([0.5, 0.5, 0.5, -0.5]) {
            assert!((v - e).abs() < 1e-14);
        }
        assert!((trace_norm(&pt).unwrap() - 2.0).abs() < 1e-14);

        let dims = BipartiteDims::new(2, 3).unwrap();
        let m = CMatrix::from_fn(6, 6, |i, j| c((i * 6 + j) as f64, (i as f64) - (j as f64)));
        for s in [Subsystem::A, Subsystem::B] {
            let once = partial_transpose_matrix(&m, dims, s).unwrap();
            assert_eq!(partial_transpose_matrix(&once, dims, s).unwrap(), m);
        }
    }

    #[test]
    fn product_partial_transpose_is_factor_transpose() {
        let mut rho_a = CMatrix::zeros(2, 2);
        rho_a[(0, 0)] = c(0.6, 0.0);
        rho_a[(1, 1)] = c(0.4, 0.0);
        rho_a[(0, 1)] = c(0.2, 0.1);
        rho_a[(1, 0)] = c(0.2, -0.1);
        let mut rho_b = CMatrix::zeros(3, 3);
        rho_b[(0, 0)] = c(0.5, 0.0);
        rho_b[(1, 1)] = c(0.3, 0.0);
        rho_b[(2, 2)] = c(0.2, 0.0);
        rho_b[(0, 2)] = c(0.0, 0.1);
        rho_b[(2, 0)] = c(0.0, -0.1);
        let rho = DensityMatrix::product(&rho_a, &rho_b).unwrap();
        let expect = linalg::kron(&rho_a.transpose(), &rho_b);
        assert!(linalg::frobenius_distance(&partial_transpose(&rho, Subsystem::A), &expect) < 1e-15);
    }

    #[test]
    fn trace_norm_edge_cases() {
        assert_eq!(trace_norm(&CMatrix::zeros(4, 4)).unwrap(), 0.0);
        let mut bad = CMatrix::zeros(2, 2);
        bad[(0, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(trace_norm(&bad), Err(Error::Numeric(_))));
        assert!((trace_norm(phi_plus().matrix()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn entropy_examples() {
        let dims = BipartiteDims::square(2).unwrap();
        assert!(von_neumann_entropy(&phi_plus()).abs() < 1e-12);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(dims)) - 2.0).abs() < 1e-14);
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(0.5, 0.0);
        m[(1, 1)] = c(0.5, 0.0);
        let rho = DensityMatrix::new(dims, m).unwrap();
        assert!((von_neumann_entropy(&rho) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn relative_entropy_examples() {
        let dims = BipartiteDims::square(2).unwrap();
        let rho = phi_plus();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-10);

        let p00 = PureState::basis(dims, 0, 0).unwrap().density_matrix();
        let mixed = DensityMatrix::maximally_mixed(dims);
        assert!((relative_entropy(&p00, &mixed).unwrap() - 2.0).abs() < 1e-12);

        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(0.5, 0.0);
        m[(3, 3)] = c(0.5, 0.0);
        let classical = DensityMatrix::new(dims, m).unwrap();
        assert!((relative_entropy(&rho, &classical).unwrap() - 1.0).abs() < 1e-12);

        // |01⟩ lies outside the support of the classical mixture.
        let p01 = PureState::basis(dims, 0, 1).unwrap().density_matrix();
        assert_eq!(relative_entropy(&p01, &classical).unwrap(), f64::INFINITY);

        let other = DensityMatrix::maximally_mixed(BipartiteDims::new(2, 3).unwrap());
        assert!(matches!(relative_entropy(&rho, &other), Err(Error::Structural(_))));
    }

    #[test]
    fn eigenvalue_clamping_rule() {
        assert_eq!(clamp_eigenvalue(-5e-11).unwrap(), 0.0);
        assert_eq!(clamp_eigenvalue(0.25).unwrap(), 0.25);
        assert!(clamp_eigenvalue(-1e-9).is_err());
    }
}
