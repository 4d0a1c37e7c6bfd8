//! Random states and unitaries for campaigns and tests.

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};
use crate::rng::{rng_from_seed, Rng};
use crate::state::{BipartiteDims, DensityMatrix, PureState};

fn complex_normal(rng: &mut Rng) -> num_complex::Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

pub fn complex_normal_vector(n: usize, rng: &mut Rng) -> CVector {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

pub fn complex_normal_matrix(rows: usize, cols: usize, rng: &mut Rng) -> CMatrix {
    // Row-major fill keeps the draw order independent of storage layout.
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Haar-random unit vector of length `n`.
pub fn random_unit_vector(n: usize, rng: &mut Rng) -> CVector {
    loop {
        let v = complex_normal_vector(n, rng);
        let norm = v.norm();
        if norm > 1e-300 {
            return v.unscale(norm);
        }
    }
}

/// Haar-random `d × d` unitary (QR of a Ginibre matrix with the phases of
/// `R`'s diagonal divided out).
pub fn random_unitary(d: usize, rng: &mut Rng) -> CMatrix {
    let g = complex_normal_matrix(d, d, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        let diag = r[(k, k)];
        let norm = diag.norm();
        let phase = if norm > 0.0 { diag / norm } else { c(1.0, 0.0) };
        for v in q.column_mut(k).iter_mut() {
            *v *= phase;
        }
    }
    q
}

/// Haar-random pure state, deterministic in `seed`.
pub fn sample_haar_pure(dims: BipartiteDims, seed: u64) -> PureState {
    let mut rng = rng_from_seed(seed);
    let v = random_unit_vector(dims.total(), &mut rng);
    PureState::normalized(dims, v).expect("nonzero random vector")
}

/// Induced-measure mixed state `G G† / tr(G G†)` with `G` a
/// `(d_a·d_b) × rank` complex Ginibre matrix.
pub fn sample_ginibre_mixed(dims: BipartiteDims, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let n = dims.total();
    if rank == 0 || rank > n {
        return Err(Error::InvalidParameter(format!("rank {rank} outside 1..={n}")));
    }
    let mut rng = rng_from_seed(seed);
    let g = complex_normal_matrix(n, rank, &mut rng);
    DensityMatrix::from_psd_unnormalized(dims, &g * g.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_defect;
    use crate::ops::partial_trace;
    use crate::state::Subsystem;

    #[test]
    fn haar_pure_is_deterministic_and_normalized() {
        let dims = BipartiteDims::square(3).unwrap();
        let a = sample_haar_pure(dims, 42);
        let b = sample_haar_pure(dims, 42);
        assert_eq!(a, b);
        assert!((a.amplitudes().norm() - 1.0).abs() < 1e-12);
        assert_ne!(a, sample_haar_pure(dims, 43));
    }

    #[test]
    fn haar_mean_purity_matches_induced_measure() {
        // Independent numpy run with 10^6 samples: 0.80011 ± 0.00013,
        // matching (d_a + d_b)/(d_a d_b + 1) = 4/5.
        let dims = BipartiteDims::square(2).unwrap();
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|i| {
                let rho = sample_haar_pure(dims, 1000 + i).density_matrix();
                partial_trace(&rho, Subsystem::B).purity()
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.8).abs() < 0.01, "mean purity {mean}");
    }

    #[test]
    fn ginibre_rank_and_trace() {
        let dims = BipartiteDims::square(2).unwrap();
        let pure = sample_ginibre_mixed(dims, 1, 9).unwrap();
        assert!((pure.spectrum().max() - 1.0).abs() < 1e-10);
        let full = sample_ginibre_mixed(dims, 4, 9).unwrap();
        let tr: f64 = (0..4).map(|i| full.matrix()[(i, i)].re).sum();
        assert!((tr - 1.0).abs() < 1e-12);
        assert_eq!(full.rank(), 4);
        assert_eq!(sample_ginibre_mixed(dims, 2, 5).unwrap().rank(), 2);
        assert_eq!(sample_ginibre_mixed(dims, 3, 11).unwrap(), sample_ginibre_mixed(dims, 3, 11).unwrap());
        assert!(sample_ginibre_mixed(dims, 0, 1).is_err());
        assert!(sample_ginibre_mixed(dims, 5, 1).is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = rng_from_seed(3);
        for d in 1..6 {
            assert!(unitarity_defect(&random_unitary(d, &mut rng)) < 1e-12);
        }
    }
}
