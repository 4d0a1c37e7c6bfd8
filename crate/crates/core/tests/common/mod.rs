#![allow(dead_code)]

use pi_entangle::linalg::{self, c, CMatrix, CVector};
use pi_entangle::state::{BipartiteDims, DensityMatrix, PureState};
use pi_entangle::symmetrization::LocalBasis;
use proptest::prelude::*;

pub fn dims(d_a: usize, d_b: usize) -> BipartiteDims {
    BipartiteDims::new(d_a, d_b).unwrap()
}

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * n)
}

/// Full-rank-ish mixed state `GG†/tr` from a random square `G`.
pub fn density(dims: BipartiteDims) -> impl Strategy<Value = DensityMatrix> {
    let n = dims.total();
    complex_entries(n * n)
        .prop_filter("degenerate draw", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(move |v| {
            let g = CMatrix::from_fn(n, n, |i, j| c(v[2 * (i * n + j)], v[2 * (i * n + j) + 1]));
            DensityMatrix::from_psd_unnormalized(dims, &g * g.adjoint()).unwrap()
        })
}

/// Strictly positive definite: mixed with a little of `I/n`.
pub fn full_support(dims: BipartiteDims) -> impl Strategy<Value = DensityMatrix> {
    density(dims).prop_map(move |rho| {
        DensityMatrix::mix(0.95, &rho, &DensityMatrix::maximally_mixed(dims)).unwrap()
    })
}

pub fn pure(dims: BipartiteDims) -> impl Strategy<Value = PureState> {
    let n = dims.total();
    complex_entries(n)
        .prop_filter("zero vector", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(move |v| {
            let amps = CVector::from_fn(n, |i, _| c(v[2 * i], v[2 * i + 1]));
            PureState::normalized(dims, amps).unwrap()
        })
}

/// `exp(iH)` for a random Hermitian `H`.
pub fn unitary(d: usize) -> impl Strategy<Value = CMatrix> {
    complex_entries(d * d).prop_map(move |v| {
        let g = CMatrix::from_fn(d, d, |i, j| c(3.0 * v[2 * (i * d + j)], 3.0 * v[2 * (i * d + j) + 1]));
        linalg::expm_i_hermitian(&linalg::hermitian_part(&g))
    })
}

pub fn local_basis(d: usize) -> impl Strategy<Value = LocalBasis> {
    (unitary(d), unitary(d)).prop_map(|(a, b)| LocalBasis::new(a, b).unwrap())
}

/// Probability vector of length `n`.
pub fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n)
        .prop_filter("all zero", |v| v.iter().sum::<f64>() > 1e-6)
        .prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        })
}
