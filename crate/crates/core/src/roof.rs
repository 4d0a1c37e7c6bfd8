//! Convex-roof extension of a pure-state seed to mixed states.
//!
//! Every size-`m` pure-state decomposition of a rank-`r` state
//! `ρ = Σⱼ λⱼ |eⱼ⟩⟨eⱼ|` has the form `|ψ̃ᵢ⟩ = Σⱼ V*ᵢⱼ √λⱼ |eⱼ⟩` for an
//! `m × r` isometry `V`, with weights `pᵢ = ‖ψ̃ᵢ‖²`. The roof is minimized
//! over `V`, parameterized by exponential-map coordinates on the Stiefel
//! manifold around a moving base point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{self, MeasureOptions};
use crate::error::{Error, Result};
use crate::io::{PureStateJson, WeightedStateJson};
use crate::linalg::{self, c, CMatrix};
use crate::measures::{pure_measure, SpectralFunction};
use crate::optim::NelderMead;
use crate::rng::{derive_indexed, rng_from_seed, STREAM_RESTART};
use crate::sampling::random_unitary;
use crate::state::{BipartiteDims, DensityMatrix, Ensemble, PureState, RANK_THRESHOLD};

/// Ensemble members lighter than this are dropped.
pub const WEIGHT_PRUNE: f64 = 1e-12;

const INITIAL_STEP: f64 = 0.4;
const MIN_STEP: f64 = 0.02;

/// `min(r², r + 4)`.
pub fn default_ensemble_size(rank: usize) -> usize {
    (rank * rank).min(rank + 4).max(1)
}

/// Real coordinates of the Stiefel manifold of `m × r` isometries: `2mr − r²`.
pub fn stiefel_param_count(m: usize, r: usize) -> usize {
    2 * m * r - r * r
}

/// Hermitian generator whose first `r` columns carry the coordinates. The
/// trailing `(m − r)` block only rotates the discarded columns and is fixed
/// at zero.
fn stiefel_generator(coords: &[f64], m: usize, r: usize) -> CMatrix {
    debug_assert_eq!(coords.len(), stiefel_param_count(m, r));
    let mut h = CMatrix::zeros(m, m);
    let mut k = 0;
    for i in 0..r {
        h[(i, i)] = c(coords[k], 0.0);
        k += 1;
    }
    for i in 0..r {
        for j in i + 1..m {
            let z = c(coords[k], coords[k + 1]);
            k += 2;
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofProblem {
    pub rho: DensityMatrix,
    pub seed_function: SpectralFunction,
    pub ensemble_size: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl RoofProblem {
    /// Problem with default ensemble size and optimizer settings.
    pub fn new(rho: DensityMatrix, seed_function: SpectralFunction) -> Self {
        let m = default_ensemble_size(rho.rank());
        Self {
            rho,
            seed_function,
            ensemble_size: m,
            restarts: config::ROOF_RESTARTS,
            max_iters: config::ROOF_MAX_ITERS,
            tol: config::ROOF_TOL,
        }
    }

    pub fn from_options(rho: DensityMatrix, f: SpectralFunction, opts: &MeasureOptions) -> Result<Self> {
        let m = opts.ensemble_size.unwrap_or_else(|| default_ensemble_size(rho.rank()));
        let p = Self {
            rho,
            seed_function: f,
            ensemble_size: m,
            restarts: opts.roof_restarts,
            max_iters: opts.roof_max_iters,
            tol: opts.roof_tol,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let rank = self.rho.rank();
        if self.ensemble_size < rank {
            return Err(Error::InvalidParameter(format!(
                "ensemble size {} below rank {rank}",
                self.ensemble_size
            )));
        }
        if self.restarts == 0 || self.max_iters == 0 || !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(
                "roof restarts, max_iters and tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofSolution {
    pub value: f64,
    pub ensemble: Ensemble,
    pub converged: bool,
    /// Optimizer iterations of the winning restart.
    pub iterations_used: usize,
    pub best_restart: usize,
}

impl RoofSolution {
    pub fn to_json(&self) -> RoofSolutionJson {
        RoofSolutionJson {
            value: self.value,
            converged: self.converged,
            iterations: self.iterations_used,
            ensemble: self
                .ensemble
                .members()
                .iter()
                .map(|(w, psi)| WeightedStateJson { weight: *w, state: PureStateJson::from_state(psi) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoofSolutionJson {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub ensemble: Vec<WeightedStateJson>,
}

/// Square roots of the eigen-ensemble and the map from isometries to
/// decompositions.
struct Decomposer {
    dims: BipartiteDims,
    rank: usize,
    m: usize,
    /// `n × r`, column `j` is `√λⱼ |eⱼ⟩`.
    weighted: CMatrix,
}

impl Decomposer {
    fn new(rho: &DensityMatrix, m: usize) -> Result<Self> {
        let eig = rho.eigen();
        let rank = eig.values.iter().filter(|&&v| v > RANK_THRESHOLD).count().max(1);
        if m < rank {
            return Err(Error::InvalidParameter(format!("ensemble size {m} below rank {rank}")));
        }
        let n = rho.dims().total();
        let mut weighted = CMatrix::zeros(n, rank);
        for j in 0..rank {
            let s = eig.values[j].max(0.0).sqrt();
            weighted.set_column(j, &eig.vectors.column(j).scale(s));
        }
        Ok(Self { dims: rho.dims(), rank, m, weighted })
    }

    fn param_count(&self) -> usize {
        stiefel_param_count(self.m, self.rank)
    }

    /// First `r` columns of `base · exp(i H(coords))`.
    fn isometry(&self, base: &CMatrix, coords: &[f64]) -> CMatrix {
        let local = if coords.iter().all(|&x| x == 0.0) {
            CMatrix::identity(self.m, self.m)
        } else {
            linalg::expm_i_hermitian(&stiefel_generator(coords, self.m, self.rank))
        };
        base * local.columns(0, self.rank)
    }

    /// Unnormalized members as columns: `Ψ = S V†`, column `i` is `ψ̃ᵢ`.
    fn members(&self, isometry: &CMatrix) -> CMatrix {
        &self.weighted * isometry.adjoint()
    }

    fn average(&self, f: SpectralFunction, members: &CMatrix) -> f64 {
        let (d_a, d_b) = (self.dims.d_a(), self.dims.d_b());
        let small = d_a.min(d_b);
        let mut gram = CMatrix::zeros(small, small);
        let mut total = 0.0;
        for col in members.column_iter() {
            let p: f64 = col.iter().map(|z| z.norm_sqr()).sum();
            if p < WEIGHT_PRUNE {
                continue;
            }
            // Reduced state on the smaller party, unnormalized.
            for x in 0..small {
                for y in x..small {
                    let mut acc = linalg::ZERO;
                    if d_a <= d_b {
                        for b in 0..d_b {
                            acc += col[x * d_b + b] * col[y * d_b + b].conj();
                        }
                    } else {
                        for a in 0..d_a {
                            acc += col[a * d_b + x] * col[a * d_b + y].conj();
                        }
                    }
                    gram[(x, y)] = acc;
                    gram[(y, x)] = acc.conj();
                }
            }
            let mut spectrum = linalg::hermitian_eigenvalues(&gram);
            spectrum.iter_mut().for_each(|v| *v /= p);
            total += p * f.eval_values(&spectrum);
        }
        total
    }

    fn ensemble(&self, isometry: &CMatrix) -> Ensemble {
        let members = self.members(isometry);
        let kept: Vec<(f64, PureState)> = members
            .column_iter()
            .filter_map(|col| {
                let p: f64 = col.iter().map(|z| z.norm_sqr()).sum();
                (p >= WEIGHT_PRUNE).then(|| {
                    (p, PureState::normalized(self.dims, col.into_owned()).expect("nonzero member"))
                })
            })
            .collect();
        let total: f64 = kept.iter().map(|(w, _)| w).sum();
        Ensemble::new(kept.into_iter().map(|(w, psi)| (w / total, psi)).collect())
            .expect("weights renormalized")
    }
}

/// Ensemble realized by Stiefel coordinates around the eigen-ensemble
/// (zero coordinates give the eigen-ensemble padded with empty members).
pub fn decompose(rho: &DensityMatrix, isometry_params: &[f64], m: usize) -> Result<Ensemble> {
    let dec = Decomposer::new(rho, m)?;
    if isometry_params.len() != dec.param_count() {
        return Err(Error::InvalidParameter(format!(
            "expected {} isometry coordinates for m = {m}, rank = {}, got {}",
            dec.param_count(),
            dec.rank,
            isometry_params.len()
        )));
    }
    if isometry_params.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("non-finite isometry coordinate".into()));
    }
    let base = CMatrix::identity(m, m);
    Ok(dec.ensemble(&dec.isometry(&base, isometry_params)))
}

struct RestartOutcome {
    value: f64,
    isometry: CMatrix,
    iterations: usize,
    converged: bool,
}

fn run_restart(dec: &Decomposer, problem: &RoofProblem, start: CMatrix) -> RestartOutcome {
    let f = problem.seed_function;
    let zeros = vec![0.0; dec.param_count()];
    let mut base = start;
    let mut best = dec.average(f, &dec.members(&dec.isometry(&base, &zeros)));
    let mut step = INITIAL_STEP;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < problem.max_iters {
        let nm = NelderMead {
            max_iters: problem.max_iters - iterations,
            tol: problem.tol,
            patience: config::ROOF_PATIENCE,
            initial_step: step,
        };
        let res = nm.minimize(|x| dec.average(f, &dec.members(&dec.isometry(&base, x))), &zeros);
        iterations += res.iterations;
        let gain = best - res.value;
        if gain > 0.0 {
            base = &base * linalg::expm_i_hermitian(&stiefel_generator(&res.x, dec.m, dec.rank));
            best = res.value;
        }
        if !res.converged {
            break;
        }
        if gain <= problem.tol {
            converged = true;
            break;
        }
        step = (step * 0.5).max(MIN_STEP);
    }
    RestartOutcome { value: best, isometry: base.columns(0, dec.rank).into_owned(), iterations, converged }
}

/// Minimizes the ensemble average of the seed function over decompositions
/// of `problem.rho`.
///
/// Restart 0 starts at the eigen-ensemble; restart `k > 0` starts at a Haar
/// random isometry seeded by `(seed, k)`. Restarts run in parallel and the
/// lowest value wins (ties go to the lower index), so the result does not
/// depend on the thread count.
pub fn minimize_roof(problem: &RoofProblem, seed: u64) -> Result<RoofSolution> {
    problem.validate()?;
    let m = problem.ensemble_size;
    let dec = Decomposer::new(&problem.rho, m)?;
    let f = problem.seed_function;

    if dec.rank == 1 {
        let psi = PureState::normalized(dec.dims, dec.weighted.column(0).into_owned())?;
        let value = pure_measure(f, &psi);
        return Ok(RoofSolution {
            value,
            ensemble: Ensemble::new(vec![(1.0, psi)])?,
            converged: true,
            iterations_used: 0,
            best_restart: 0,
        });
    }

    let outcomes: Vec<RestartOutcome> = (0..problem.restarts)
        .into_par_iter()
        .map(|k| {
            let start = if k == 0 {
                CMatrix::identity(m, m)
            } else {
                let mut rng = rng_from_seed(derive_indexed(seed, STREAM_RESTART, k as u64));
                random_unitary(m, &mut rng)
            };
            run_restart(&dec, problem, start)
        })
        .collect();

    let (best_restart, best) = outcomes
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .expect("at least one restart");

    let ensemble = dec.ensemble(&best.isometry);
    let value = ensemble.members().iter().map(|(w, psi)| w * pure_measure(f, psi)).sum();
    Ok(RoofSolution {
        value,
        ensemble,
        converged: best.converged,
        iterations_used: best.iterations,
        best_restart,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named::{named_state, NamedState};
    use crate::sampling::sample_ginibre_mixed;

    fn two() -> BipartiteDims {
        BipartiteDims::square(2).unwrap()
    }

    #[test]
    fn parameter_count_matches_generator_layout() {
        for (m, r) in [(1, 1), (4, 2), (7, 3), (8, 4)] {
            let n = stiefel_param_count(m, r);
            let coords: Vec<f64> = (0..n).map(|i| 0.1 * i as f64).collect();
            let h = stiefel_generator(&coords, m, r);
            assert_eq!(linalg::hermitian_defect(&h), 0.0);
        }
        assert_eq!(default_ensemble_size(1), 1);
        assert_eq!(default_ensemble_size(2), 4);
        assert_eq!(default_ensemble_size(4), 8);
    }

    #[test]
    fn pure_state_forces_single_member() {
        let bell = named_state(NamedState::BellPhiPlus, two()).unwrap();
        let e = decompose(&bell, &[0.7], 1).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e.members()[0].0 - 1.0).abs() < 1e-15);
        assert!(e.reconstruction_error(&bell) < 1e-12);
    }

    #[test]
    fn zero_coordinates_give_eigen_ensemble() {
        let mut m = CMatrix::zeros(4, 4);
        for (i, v) in [0.4, 0.3, 0.2, 0.1].iter().enumerate() {
            m[(i, i)] = c(*v, 0.0);
        }
        let rho = DensityMatrix::new(two(), m).unwrap();
        let coords = vec![0.0; stiefel_param_count(8, 4)];
        let e = decompose(&rho, &coords, 8).unwrap();
        assert_eq!(e.len(), 4);
        let weights: Vec<f64> = e.members().iter().map(|(w, _)| *w).collect();
        for (w, want) in weights.iter().zip([0.4, 0.3, 0.2, 0.1]) {
            assert!((w - want).abs() < 1e-14);
        }
    }

    #[test]
    fn random_coordinates_reconstruct_rho() {
        let rho = sample_ginibre_mixed(BipartiteDims::new(2, 3).unwrap(), 3, 8).unwrap();
        let n = stiefel_param_count(7, 3);
        let coords: Vec<f64> = (0..n).map(|i| ((i as f64) * 1.7).sin()).collect();
        let e = decompose(&rho, &coords, 7).unwrap();
        assert!(e.reconstruction_error(&rho) < 1e-10);
        assert!(decompose(&rho, &coords[1..], 7).is_err());
        assert!(decompose(&rho, &[], 2).is_err());
    }

    #[test]
    fn rank_one_needs_no_iterations() {
        let bell = named_state(NamedState::BellPhiPlus, two()).unwrap();
        let p = RoofProblem::new(bell, SpectralFunction::EntropyOfEntanglement);
        let s = minimize_roof(&p, 1).unwrap();
        assert_eq!(s.iterations_used, 0);
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn never_worse_than_eigen_ensemble_and_self_consistent() {
        let rho = sample_ginibre_mixed(two(), 2, 21).unwrap();
        let mut p = RoofProblem::new(rho.clone(), SpectralFunction::EntropyOfEntanglement);
        p.restarts = 3;
        let eigen = decompose(&rho, &vec![0.0; stiefel_param_count(4, 2)], 4).unwrap();
        let eigen_avg: f64 = eigen
            .members()
            .iter()
            .map(|(w, psi)| w * pure_measure(SpectralFunction::EntropyOfEntanglement, psi))
            .sum();
        let s = minimize_roof(&p, 5).unwrap();
        assert!(s.value <= eigen_avg + 1e-12);
        assert!(s.ensemble.reconstruction_error(&rho) < 1e-8);
        let recomputed: f64 = s
            .ensemble
            .members()
            .iter()
            .map(|(w, psi)| w * pure_measure(SpectralFunction::EntropyOfEntanglement, psi))
            .sum();
        assert!((recomputed - s.value).abs() < 1e-10);
    }

    #[test]
    fn identical_seed_is_bit_identical() {
        let rho = sample_ginibre_mixed(two(), 3, 2).unwrap();
        let mut p = RoofProblem::new(rho, SpectralFunction::GeometricPure);
        p.restarts = 2;
        p.max_iters = 300;
        assert_eq!(minimize_roof(&p, 9).unwrap(), minimize_roof(&p, 9).unwrap());
    }

    #[test]
    fn problem_validation() {
        let rho = sample_ginibre_mixed(two(), 3, 2).unwrap();
        let mut p = RoofProblem::new(rho, SpectralFunction::GeometricPure);
        p.ensemble_size = 2;
        assert!(minimize_roof(&p, 0).is_err());
        p.ensemble_size = 3;
        p.restarts = 0;
        assert!(p.validate().is_err());
    }
}
