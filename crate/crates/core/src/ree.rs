//! Upper bounds on the relative entropy of entanglement
//! `E_R(ρ) = min_{σ separable} S(ρ‖σ)`.
//!
//! The separable candidate is a fixed-size product ensemble
//! `σ = Σₖ wₖ |aₖbₖ⟩⟨aₖbₖ|`, separable by construction. Each sweep
//! alternates two blocks, the weights and then the factor vectors, and
//! moves each block along a search direction with a golden-section line
//! search on the true objective. Directions come from the Fréchet derivative
//! of `log σ`: with `G = D log σ[ρ]`, the weight direction is the
//! multiplicative update `wₖ(⟨xₖ|G|xₖ⟩ − 1)` and each factor moves along the
//! tangent projection of `G|xₖ⟩`. Candidates whose support misses part of ρ
//! score `+∞` and are never accepted.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::MeasureOptions;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::measures::{MeasureId, MeasureResult, Semantics};
use crate::ops::{cross_term, entropy_of_spectrum, relative_entropy};
use crate::optim::golden_section;
use crate::rng::{derive_indexed, rng_from_seed, Rng, STREAM_RESTART};
use crate::sampling::random_unit_vector;
use crate::state::{same_dims, BipartiteDims, DensityMatrix, STATE_TOL};
use crate::symmetrization::pi_part;

const LINE_SEARCH_EVALS: usize = 24;
/// Sweeps over which the improvement must stay below `tol` to stop.
const STALL_WINDOW: usize = 25;
const EIGEN_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductMember {
    pub w: f64,
    pub a: CVector,
    pub b: CVector,
}

/// `σ = Σₖ wₖ |aₖ⟩⟨aₖ| ⊗ |bₖ⟩⟨bₖ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductEnsemble {
    dims: BipartiteDims,
    members: Vec<ProductMember>,
}

impl ProductEnsemble {
    pub fn new(dims: BipartiteDims, members: Vec<ProductMember>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter("product ensemble has no members".into()));
        }
        let mut total = 0.0;
        for m in &members {
            if m.a.len() != dims.d_a() || m.b.len() != dims.d_b() {
                return Err(Error::Structural(format!("product member does not fit {dims}")));
            }
            if !(0.0..=1.0).contains(&m.w) {
                return Err(Error::Invariant(format!("weight {} outside [0, 1]", m.w)));
            }
            for v in [&m.a, &m.b] {
                if (v.norm() - 1.0).abs() > 1e-10 {
                    return Err(Error::Invariant("product factor is not a unit vector".into()));
                }
            }
            total += m.w;
        }
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::Invariant(format!("product weights sum to {total}")));
        }
        Ok(Self { dims, members })
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn members(&self) -> &[ProductMember] {
        &self.members
    }

    pub fn sigma_matrix(&self) -> CMatrix {
        let n = self.dims.total();
        let mut sigma = CMatrix::zeros(n, n);
        for m in &self.members {
            add_projector(&mut sigma, m.w, &linalg::kron_vec(&m.a, &m.b));
        }
        sigma
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix::from_parts_unchecked(self.dims, linalg::hermitian_part(&self.sigma_matrix()))
    }

    /// Every member with its factors exchanged: realizes `ΠσΠ†`.
    pub fn swapped(&self) -> Self {
        Self {
            dims: self.dims.swapped(),
            members: self
                .members
                .iter()
                .map(|m| ProductMember { w: m.w, a: m.b.clone(), b: m.a.clone() })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Vec<ProductMemberJson> {
        let pairs = |v: &CVector| v.iter().map(|z| [z.re, z.im]).collect();
        self.members
            .iter()
            .map(|m| ProductMemberJson { w: m.w, a: pairs(&m.a), b: pairs(&m.b) })
            .collect()
    }

    pub fn from_json(dims: BipartiteDims, members: &[ProductMemberJson]) -> Result<Self> {
        let vec = |pairs: &[[f64; 2]]| CVector::from_iterator(pairs.len(), pairs.iter().map(|p| c(p[0], p[1])));
        Self::new(
            dims,
            members
                .iter()
                .map(|m| ProductMember { w: m.w, a: vec(&m.a), b: vec(&m.b) })
                .collect(),
        )
    }
}

/// `{"w": float, "a": [[re, im], ...], "b": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductMemberJson {
    pub w: f64,
    pub a: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
}

fn add_projector(acc: &mut CMatrix, w: f64, x: &CVector) {
    let n = x.len();
    for i in 0..n {
        let xi = x[i] * w;
        for j in 0..n {
            acc[(i, j)] += xi * x[j].conj();
        }
    }
}

/// Outcome of a solver run: the bound and the separable state achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReeSolution {
    pub result: MeasureResult,
    pub sigma: ProductEnsemble,
}

struct Candidate {
    w: Vec<f64>,
    a: Vec<CVector>,
    b: Vec<CVector>,
}

impl Candidate {
    fn products(&self) -> Vec<CVector> {
        self.a.iter().zip(&self.b).map(|(a, b)| linalg::kron_vec(a, b)).collect()
    }

    fn into_ensemble(self, dims: BipartiteDims) -> ProductEnsemble {
        let total: f64 = self.w.iter().sum();
        let members = self
            .w
            .into_iter()
            .zip(self.a.into_iter().zip(self.b))
            .filter(|(w, _)| *w > 0.0)
            .map(|(w, (a, b))| ProductMember { w: w / total, a, b })
            .collect();
        ProductEnsemble::new(dims, members).expect("candidate stays on the simplex")
    }
}

struct Solver<'a> {
    dims: BipartiteDims,
    rho: &'a CMatrix,
    rho_log_rho: f64,
    k: usize,
    max_sweeps: usize,
    tol: f64,
}

fn sigma_of(n: usize, w: &[f64], xs: &[CVector]) -> CMatrix {
    let mut s = CMatrix::zeros(n, n);
    for (wk, x) in w.iter().zip(xs) {
        if *wk > 0.0 {
            add_projector(&mut s, *wk, x);
        }
    }
    s
}

impl Solver<'_> {
    fn n(&self) -> usize {
        self.dims.total()
    }

    /// `S(ρ‖σ)` in bits, with σ's eigendecomposition for reuse.
    fn score(&self, sigma: &CMatrix) -> (f64, linalg::HermitianEigen) {
        let eig = linalg::hermitian_eigen(sigma);
        let value = cross_term(self.rho, &eig).map_or(f64::INFINITY, |x| (self.rho_log_rho + x).max(0.0));
        (value, eig)
    }

    fn value(&self, w: &[f64], xs: &[CVector]) -> f64 {
        self.score(&sigma_of(self.n(), w, xs)).0
    }

    /// `D log σ [ρ]` (natural log) from σ's eigendecomposition.
    fn log_derivative(&self, eig: &linalg::HermitianEigen) -> CMatrix {
        let q = &eig.vectors;
        let mut inner = q.adjoint() * self.rho * q;
        let lam: Vec<f64> = eig.values.iter().map(|v| v.max(EIGEN_FLOOR)).collect();
        let n = lam.len();
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (lam[i], lam[j]);
                let gamma = if (x - y).abs() <= 1e-12 * x.max(y) {
                    2.0 / (x + y)
                } else {
                    (x.ln() - y.ln()) / (x - y)
                };
                inner[(i, j)] *= gamma;
            }
        }
        q * inner * q.adjoint()
    }

    fn start(&self, restart: usize, rng: &mut Rng) -> Candidate {
        let (d_a, d_b, n, k) = (self.dims.d_a(), self.dims.d_b(), self.n(), self.k);
        let basis = |i: usize, d: usize| {
            let mut v = CVector::zeros(d);
            v[i] = linalg::ONE;
            v
        };
        // Computational product basis cycled over all members: exactly I/n.
        let mixed = |range: std::ops::Range<usize>, mass: f64| {
            let slots = range.len();
            let mut counts = vec![0usize; n];
            for m in 0..slots {
                counts[m % n] += 1;
            }
            let mut w = Vec::with_capacity(slots);
            let mut a = Vec::with_capacity(slots);
            let mut b = Vec::with_capacity(slots);
            for m in 0..slots {
                let idx = m % n;
                w.push(mass / (n as f64 * counts[idx] as f64));
                a.push(basis(idx / d_b, d_a));
                b.push(basis(idx % d_b, d_b));
            }
            (w, a, b)
        };
        match restart {
            0 => {
                let (w, a, b) = mixed(0..k.max(n), 1.0);
                Candidate { w, a, b }
            }
            1 if k >= 2 * n => {
                // Leading Schmidt factors of the eigenvectors of ρ^PI (of ρ
                // for rectangular dims), blended half-and-half with I/n.
                let rho = DensityMatrix::from_parts_unchecked(self.dims, self.rho.clone());
                let source = pi_part(&rho).unwrap_or(rho);
                let eig = source.eigen();
                let mut cand = {
                    let (w, a, b) = mixed(0..k - n, 0.5);
                    Candidate { w, a, b }
                };
                let total: f64 = eig.values.iter().map(|v| v.max(0.0)).sum();
                for j in 0..n {
                    let col = eig.vectors.column(j).into_owned();
                    let m = crate::state::coefficient_matrix(self.dims, &col);
                    let svd = m.svd(true, true);
                    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
                    let top = (0..svd.singular_values.len())
                        .max_by(|&x, &y| svd.singular_values[x].total_cmp(&svd.singular_values[y]))
                        .unwrap_or(0);
                    let a = u.column(top).into_owned();
                    // M = U S V†, so the B factor of the top term is row `top` of V†.
                    let b = v_t.row(top).transpose();
                    cand.w.push(0.5 * eig.values[j].max(0.0) / total);
                    cand.a.push(a.unscale(a.norm()));
                    cand.b.push(b.unscale(b.norm()));
                }
                cand
            }
            _ => {
                let mut w: Vec<f64> = (0..k).map(|_| rand::Rng::random_range(rng, 0.05..1.0)).collect();
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= total);
                let a = (0..k).map(|_| random_unit_vector(d_a, rng)).collect();
                let b = (0..k).map(|_| random_unit_vector(d_b, rng)).collect();
                Candidate { w, a, b }
            }
        }
    }

    fn run(&self, mut cand: Candidate) -> (f64, Candidate, usize, bool) {
        let n = self.n();
        let (d_a, d_b) = (self.dims.d_a(), self.dims.d_b());
        let mut xs = cand.products();
        let (mut best, mut eig) = self.score(&sigma_of(n, &cand.w, &xs));
        let mut history = vec![best];
        let mut vec_scale = 0.5;
        let mut sweeps = 0;
        let mut converged = false;

        while sweeps < self.max_sweeps && best.is_finite() {
            sweeps += 1;

            // Weight block.
            let g_mat = self.log_derivative(&eig);
            let g: Vec<f64> = xs.iter().map(|x| (x.adjoint() * &g_mat * x)[(0, 0)].re).collect();
            let dir: Vec<f64> = cand.w.iter().zip(&g).map(|(w, gk)| w * (gk - 1.0)).collect();
            let mut t_max: f64 = 4.0;
            for (w, d) in cand.w.iter().zip(&dir) {
                if *d < 0.0 {
                    t_max = t_max.min(-w / d);
                }
            }
            let step_weights = |t: f64| -> Vec<f64> {
                let mut w: Vec<f64> = cand.w.iter().zip(&dir).map(|(w, d)| (w + t * d).max(0.0)).collect();
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= total);
                w
            };
            if t_max > 0.0 && dir.iter().any(|d| *d != 0.0) {
                let (t, v) = golden_section(|t| self.value(&step_weights(t), &xs), 0.0, t_max, LINE_SEARCH_EVALS);
                if v < best {
                    cand.w = step_weights(t);
                    best = v;
                    eig = self.score(&sigma_of(n, &cand.w, &xs)).1;
                }
            }

            // Factor block.
            let g_mat = self.log_derivative(&eig);
            let mut da = Vec::with_capacity(self.k);
            let mut db = Vec::with_capacity(self.k);
            let mut max_norm: f64 = 0.0;
            for (idx, x) in xs.iter().enumerate() {
                let y = &g_mat * x;
                let (a, b, w) = (&cand.a[idx], &cand.b[idx], cand.w[idx]);
                let mut ga = CVector::zeros(d_a);
                let mut gb = CVector::zeros(d_b);
                for i in 0..d_a {
                    for j in 0..d_b {
                        let yij = y[i * d_b + j];
                        ga[i] += yij * b[j].conj();
                        gb[j] += yij * a[i].conj();
                    }
                }
                let gx = a.dotc(&ga);
                let step_a = (ga - a * gx).scale(w);
                let step_b = (gb - b * gx).scale(w);
                max_norm = max_norm.max(step_a.norm()).max(step_b.norm());
                da.push(step_a);
                db.push(step_b);
            }
            if max_norm > 0.0 {
                let moved = |t: f64| -> (Vec<CVector>, Vec<CVector>) {
                    let a = cand
                        .a
                        .iter()
                        .zip(&da)
                        .map(|(v, d)| {
                            let u = v + d.scale(t);
                            u.unscale(u.norm())
                        })
                        .collect();
                    let b = cand
                        .b
                        .iter()
                        .zip(&db)
                        .map(|(v, d)| {
                            let u = v + d.scale(t);
                            u.unscale(u.norm())
                        })
                        .collect();
                    (a, b)
                };
                let t_max = vec_scale / max_norm;
                let (t, v) = golden_section(
                    |t| {
                        let (a, b) = moved(t);
                        let xs: Vec<CVector> = a.iter().zip(&b).map(|(a, b)| linalg::kron_vec(a, b)).collect();
                        self.value(&cand.w, &xs)
                    },
                    0.0,
                    t_max,
                    LINE_SEARCH_EVALS,
                );
                if v < best {
                    let (a, b) = moved(t);
                    cand.a = a;
                    cand.b = b;
                    xs = cand.products();
                    best = v;
                    eig = self.score(&sigma_of(n, &cand.w, &xs)).1;
                    let used = t * max_norm;
                    vec_scale = if used > 0.6 * vec_scale {
                        (vec_scale * 2.0).min(2.0)
                    } else {
                        (used * 3.0).clamp(1e-9, 2.0)
                    };
                } else {
                    vec_scale = (vec_scale * 0.25).max(1e-9);
                }
            }

            history.push(best);
            let len = history.len();
            if len > STALL_WINDOW && history[len - 1 - STALL_WINDOW] - best <= self.tol {
                converged = true;
                break;
            }
        }
        (best, cand, sweeps, converged)
    }
}

/// Runs the REE solver and keeps the separable argmin.
pub fn ree_solve(rho: &DensityMatrix, opts: &MeasureOptions) -> Result<ReeSolution> {
    let dims = rho.dims();
    let n = dims.total();
    let k = opts.ree_members.unwrap_or(n * n);
    if k == 0 {
        return Err(Error::InvalidParameter("product ensemble size must be at least 1".into()));
    }
    if opts.ree_restarts == 0 || opts.ree_max_iters == 0 || !(opts.ree_tol > 0.0) {
        return Err(Error::InvalidParameter("REE restarts, max_iters and tol must be positive".into()));
    }
    let rho_m = linalg::hermitian_part(rho.matrix());
    let solver = Solver {
        dims,
        rho: &rho_m,
        rho_log_rho: -entropy_of_spectrum(rho.spectrum().values()),
        k,
        max_sweeps: opts.ree_max_iters,
        tol: opts.ree_tol,
    };
    let outcomes: Vec<(f64, Candidate, usize, bool)> = (0..opts.ree_restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from_seed(derive_indexed(opts.seed, STREAM_RESTART, r as u64));
            solver.run(solver.start(r, &mut rng))
        })
        .collect();
    let (_, (_, cand, sweeps, converged)) = outcomes
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.0.total_cmp(&b.0).then(i.cmp(j)))
        .expect("at least one restart");
    let sigma = cand.into_ensemble(dims);
    let value = relative_entropy(rho, &sigma.density_matrix())?;
    Ok(ReeSolution {
        result: MeasureResult {
            measure: MeasureId::Ree,
            value,
            semantics: Semantics::UpperBound,
            converged,
            iterations: sweeps,
            seed: opts.seed,
        },
        sigma,
    })
}

/// Upper bound on the relative entropy of entanglement.
pub fn ree_upper_bound(rho: &DensityMatrix, opts: &MeasureOptions) -> Result<MeasureResult> {
    Ok(ree_solve(rho, opts)?.result)
}

/// The separable state behind a completed [`ree_solve`] run. Fails if it
/// does not reproduce the reported value on `rho`.
pub fn closest_separable_candidate(rho: &DensityMatrix, solution: &ReeSolution) -> Result<ProductEnsemble> {
    same_dims(rho.dims(), solution.sigma.dims())?;
    let value = relative_entropy(rho, &solution.sigma.density_matrix())?;
    if (value - solution.result.value).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "candidate gives {value}, solution reports {}",
            solution.result.value
        )));
    }
    Ok(solution.sigma.clone())
}
