//! Measures with closed forms: negativity, logarithmic negativity and the
//! two-qubit concurrence / entanglement of formation.

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::ops::{partial_transpose, trace_norm};
use crate::state::{DensityMatrix, Subsystem};

/// `‖ρ^{T_s}‖₁`.
pub fn partial_transpose_trace_norm(rho: &DensityMatrix, subsystem: Subsystem) -> f64 {
    trace_norm(&partial_transpose(rho, subsystem)).expect("finite square matrix")
}

/// `(‖ρ^{T_A}‖₁ − 1)/2`.
pub fn negativity(rho: &DensityMatrix) -> f64 {
    negativity_wrt(rho, Subsystem::A)
}

/// Negativity computed from the transpose of the given party.
pub fn negativity_wrt(rho: &DensityMatrix, subsystem: Subsystem) -> f64 {
    ((partial_transpose_trace_norm(rho, subsystem) - 1.0) / 2.0).max(0.0)
}

/// `log₂ ‖ρ^{T_A}‖₁`.
pub fn log_negativity(rho: &DensityMatrix) -> f64 {
    partial_transpose_trace_norm(rho, Subsystem::A).log2().max(0.0)
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    let dims = rho.dims();
    if dims.d_a() != 2 || dims.d_b() != 2 {
        return Err(Error::Unsupported(format!("two-qubit formula applied to {dims} state")));
    }
    Ok(())
}

/// `σ_y ⊗ σ_y`.
fn sigma_yy() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 3)] = c(-1.0, 0.0);
    m[(1, 2)] = c(1.0, 0.0);
    m[(2, 1)] = c(1.0, 0.0);
    m[(3, 0)] = c(-1.0, 0.0);
    m
}

/// Wootters concurrence `max(0, μ₁ − μ₂ − μ₃ − μ₄)`, with `μᵢ` the
/// descending square roots of the eigenvalues of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
///
/// The `μᵢ` are taken as the singular values of `√ρ (σ_y⊗σ_y) √ρ*`, whose
/// Gram matrix is `√ρ ρ̃ √ρ`. Square roots of near-zero eigenvalues would
/// turn rounding noise of order 1e-16 into errors of order 1e-8.
pub fn concurrence_2q(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let yy = sigma_yy();
    let sqrt_rho = rho.eigen().map(|v| v.max(0.0).sqrt());
    let a = &sqrt_rho * yy * sqrt_rho.conjugate();
    let mut mu: Vec<f64> = a.singular_values().iter().copied().collect();
    mu.sort_by(|x, y| y.total_cmp(x));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0))
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(x) + term(1.0 - x)
}

/// `h((1 + √(1 − C²))/2)`.
pub fn eof_from_concurrence(concurrence: f64) -> f64 {
    let c = concurrence.clamp(0.0, 1.0);
    binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0)
}

/// Two-qubit entanglement of formation through the concurrence.
pub fn eof_2q(rho: &DensityMatrix) -> Result<f64> {
    Ok(eof_from_concurrence(concurrence_2q(rho)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named::{named_state, NamedState};
    use crate::state::{BipartiteDims, PureState};

    fn two() -> BipartiteDims {
        BipartiteDims::square(2).unwrap()
    }

    #[test]
    fn bell_state_anchors() {
        let bell = named_state(NamedState::BellPhiPlus, two()).unwrap();
        assert!((negativity(&bell) - 0.5).abs() < 1e-12);
        assert!((log_negativity(&bell) - 1.0).abs() < 1e-12);
        assert!((concurrence_2q(&bell).unwrap() - 1.0).abs() < 1e-9);
        assert!((eof_2q(&bell).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn werner_family() {
        for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let w = named_state(NamedState::Werner(p), two()).unwrap();
            let neg: f64 = (3.0 * p - 1.0) / 4.0;
            let conc: f64 = (3.0 * p - 1.0) / 2.0;
            assert!((negativity(&w) - neg.max(0.0)).abs() < 1e-12, "p = {p}");
            assert!((concurrence_2q(&w).unwrap() - conc.max(0.0)).abs() < 1e-9, "p = {p}");
        }
        let w = named_state(NamedState::Werner(2.0 / 3.0), two()).unwrap();
        assert!((log_negativity(&w) - 1.5f64.log2()).abs() < 1e-12);
        assert!((eof_2q(&named_state(NamedState::Werner(1.0), two()).unwrap()).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn separable_inputs_vanish() {
        let p = PureState::basis(two(), 0, 1).unwrap().density_matrix();
        assert_eq!(negativity(&p), 0.0);
        assert_eq!(log_negativity(&p), 0.0);
        assert!(concurrence_2q(&p).unwrap() < 1e-9);
        let mixed = named_state(NamedState::MaxMixed, two()).unwrap();
        assert_eq!(concurrence_2q(&mixed).unwrap(), 0.0);
        assert_eq!(eof_2q(&mixed).unwrap(), 0.0);
    }

    #[test]
    fn eof_curve_endpoints() {
        assert!((eof_from_concurrence(1.0) - 1.0).abs() < 1e-15);
        assert_eq!(eof_from_concurrence(0.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wrong_dims_are_rejected() {
        let rho = named_state(NamedState::MaxMixed, BipartiteDims::square(3).unwrap()).unwrap();
        assert!(matches!(concurrence_2q(&rho), Err(Error::Unsupported(_))));
        assert!(eof_2q(&rho).is_err());
    }
}
