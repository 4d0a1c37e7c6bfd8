//! Random-state campaigns and their reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{verify_state, BasisSearch, StateRef, VerificationRecord, Verdict, VerifySettings};
use crate::config::{MeasureOptions, BASIS_MAX_ITERS, BASIS_RESTARTS, TOL_VIOLATION_EXACT, TOL_VIOLATION_OPTIMIZED};
use crate::error::{Error, Result};
use crate::measures::MeasureId;
use crate::named::NamedState;
use crate::rng::{derive_indexed, STREAM_BASIS, STREAM_MEASURE, STREAM_STATE};
use crate::sampling::{sample_ginibre_mixed, sample_haar_pure};
use crate::state::{BipartiteDims, DensityMatrix};

/// Where campaign states are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateFamily {
    HaarPure,
    /// Ginibre-induced mixed states; `rank` defaults to full rank.
    Ginibre {
        #[serde(default)]
        rank: Option<usize>,
    },
    /// Werner states at `n_states` evenly spaced `p ∈ [0, 1]`.
    WernerGrid,
    /// The listed states, once each; `n_states` is ignored.
    NamedList { names: Vec<NamedState> },
}

impl StateFamily {
    fn label(&self) -> String {
        match self {
            StateFamily::HaarPure => "haar_pure".into(),
            StateFamily::Ginibre { rank: Some(r) } => format!("ginibre({r})"),
            StateFamily::Ginibre { rank: None } => "ginibre".into(),
            StateFamily::WernerGrid => "werner_grid".into(),
            StateFamily::NamedList { .. } => "named_list".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub dims: BipartiteDims,
    pub measures: Vec<MeasureId>,
    pub n_states: usize,
    pub state_family: StateFamily,
    pub basis_restarts: usize,
    pub basis_max_iters: usize,
    /// Violation tolerance when both sides are exact.
    pub tol_violation: f64,
    /// Violation tolerance when either side is optimized.
    pub tol_optimized: f64,
    pub master_seed: u64,
    /// Append the analytic anchor states after the family states.
    pub include_anchors: bool,
    pub measure_options: MeasureOptions,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            dims: BipartiteDims::square(2).expect("2x2"),
            measures: vec![MeasureId::Negativity, MeasureId::LogNegativity],
            n_states: 100,
            state_family: StateFamily::HaarPure,
            basis_restarts: BASIS_RESTARTS,
            basis_max_iters: BASIS_MAX_ITERS,
            tol_violation: TOL_VIOLATION_EXACT,
            tol_optimized: TOL_VIOLATION_OPTIMIZED,
            master_seed: 0,
            include_anchors: true,
            measure_options: MeasureOptions::default(),
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let (d_a, d_b) = (self.dims.d_a(), self.dims.d_b());
        if d_a < 2 || d_b < 2 {
            return bad(format!("subsystem dimensions must be at least 2, got {d_a}x{d_b}"));
        }
        if d_a != d_b {
            return bad(format!("PI part needs d_a = d_b, got {d_a}x{d_b}"));
        }
        if self.n_states == 0 {
            return bad("n_states must be at least 1".into());
        }
        if self.measures.is_empty() {
            return bad("no measures selected".into());
        }
        if !(self.tol_violation > 0.0) || !(self.tol_optimized > 0.0) {
            return bad("violation tolerances must be positive".into());
        }
        if self.basis_restarts == 0 || self.basis_max_iters == 0 {
            return bad("basis_restarts and basis_max_iters must be positive".into());
        }
        match &self.state_family {
            StateFamily::Ginibre { rank: Some(r) } if *r == 0 || *r > self.dims.total() => {
                bad(format!("ginibre rank {r} outside 1..={}", self.dims.total()))
            }
            StateFamily::NamedList { names } if names.is_empty() => bad("named_list has no names".into()),
            _ => Ok(()),
        }
    }

    fn family_states(&self) -> Result<Vec<(StateRef, DensityMatrix)>> {
        let family = self.state_family.label();
        let sampled = |index: usize| derive_indexed(self.master_seed, STREAM_STATE, index as u64);
        let named = |index: usize, name: NamedState, family: &str| -> Result<(StateRef, DensityMatrix)> {
            let state_ref = StateRef { index, family: family.into(), seed: None, name: Some(name.to_string()) };
            Ok((state_ref, name.density_matrix(self.dims)?))
        };
        match &self.state_family {
            StateFamily::HaarPure => Ok((0..self.n_states)
                .map(|i| {
                    let seed = sampled(i);
                    let state_ref = StateRef { index: i, family: family.clone(), seed: Some(seed), name: None };
                    (state_ref, sample_haar_pure(self.dims, seed).density_matrix())
                })
                .collect()),
            StateFamily::Ginibre { rank } => {
                let rank = rank.unwrap_or(self.dims.total());
                (0..self.n_states)
                    .map(|i| {
                        let seed = sampled(i);
                        let state_ref = StateRef { index: i, family: family.clone(), seed: Some(seed), name: None };
                        Ok((state_ref, sample_ginibre_mixed(self.dims, rank, seed)?))
                    })
                    .collect()
            }
            StateFamily::WernerGrid => (0..self.n_states)
                .map(|i| {
                    let p = if self.n_states == 1 { 1.0 } else { i as f64 / (self.n_states - 1) as f64 };
                    named(i, NamedState::Werner(p), &family)
                })
                .collect(),
            StateFamily::NamedList { names } => {
                names.iter().enumerate().map(|(i, n)| named(i, *n, &family)).collect()
            }
        }
    }

    /// Family states followed by the anchors, indexed consecutively.
    pub fn states(&self) -> Result<Vec<(StateRef, DensityMatrix)>> {
        let mut states = self.family_states()?;
        if self.include_anchors {
            let start = states.len();
            for (k, name) in anchors(self.dims).into_iter().enumerate() {
                let state_ref =
                    StateRef { index: start + k, family: "anchor".into(), seed: None, name: Some(name.to_string()) };
                states.push((state_ref, name.density_matrix(self.dims)?));
            }
        }
        Ok(states)
    }

    fn settings(&self, index: usize, measure: MeasureId) -> VerifySettings {
        let tag = MeasureId::ALL.iter().position(|m| *m == measure).expect("listed") as u64;
        let per_state = |stream| derive_indexed(derive_indexed(self.master_seed, stream, index as u64), stream, tag);
        VerifySettings {
            search: BasisSearch { restarts: self.basis_restarts, max_iters: self.basis_max_iters },
            measure_options: self.measure_options,
            tol_violation: self.tol_violation,
            tol_optimized: self.tol_optimized,
            basis_seed: per_state(STREAM_BASIS),
            measure_seed: per_state(STREAM_MEASURE),
        }
    }
}

fn anchors(dims: BipartiteDims) -> Vec<NamedState> {
    let mut out: Vec<NamedState> = [0.0, 1.0 / 3.0, 0.5, 0.8, 1.0].into_iter().map(NamedState::Werner).collect();
    out.extend([NamedState::Isotropic(0.9), NamedState::Product00, NamedState::MaxMixed]);
    if dims.d_a() == 2 && dims.d_b() == 2 {
        out.extend([NamedState::BellPhiPlus, NamedState::BellPsiMinus]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub holds: usize,
    pub holds_within_tol: usize,
    pub flagged: usize,
    /// Records with a non-converged side.
    pub unreliable: usize,
    pub min_margin: BTreeMap<MeasureId, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub records: Vec<VerificationRecord>,
    pub summary: Summary,
    pub runtime_ms: u64,
}

const CSV_HEADER: &str = "state_index,family,seed,name,measure,e_rho,e_rho_semantics,e_rho_converged,\
e_pi_max,e_pi_max_semantics,e_pi_max_converged,margin,verdict,reliable,rerun,basis_seed,measure_seed";

impl CampaignReport {
    /// One row per record.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        let semantics = |r: &crate::measures::MeasureResult| if r.is_exact() { "EXACT" } else { "UPPER_BOUND" };
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.state_ref.index,
                r.state_ref.family,
                r.state_ref.seed.map(|s| s.to_string()).unwrap_or_default(),
                r.state_ref.name.as_deref().unwrap_or(""),
                r.measure,
                r.e_rho.value,
                semantics(&r.e_rho),
                r.e_rho.converged,
                r.e_pi_max.value,
                semantics(&r.e_pi_max),
                r.e_pi_max.converged,
                r.margin,
                r.verdict.as_str(),
                r.reliable,
                r.rerun,
                r.basis_seed,
                r.measure_seed,
            );
        }
        out
    }

    pub fn has_flags(&self) -> bool {
        self.summary.flagged > 0
    }
}

fn summarize(records: &[VerificationRecord]) -> Summary {
    let mut summary = Summary { holds: 0, holds_within_tol: 0, flagged: 0, unreliable: 0, min_margin: BTreeMap::new() };
    for r in records {
        match r.verdict {
            Verdict::Holds => summary.holds += 1,
            Verdict::HoldsWithinTol => summary.holds_within_tol += 1,
            Verdict::Flagged => summary.flagged += 1,
        }
        if !r.reliable {
            summary.unreliable += 1;
        }
        summary
            .min_margin
            .entry(r.measure)
            .and_modify(|m| *m = m.min(r.margin))
            .or_insert(r.margin);
    }
    summary
}

/// Verifies every (state, measure) pair. Records come back ordered by
/// state index, then by the order of `config.measures`, whatever the
/// thread count.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    let started = Instant::now();
    config.validate()?;
    let states = config.states()?;
    let tasks: Vec<(usize, MeasureId)> = (0..states.len())
        .flat_map(|s| config.measures.iter().map(move |m| (s, *m)))
        .collect();
    let records = tasks
        .into_par_iter()
        .map(|(s, measure)| {
            let (state_ref, rho) = &states[s];
            verify_state(rho, measure, &config.settings(state_ref.index, measure), state_ref.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&records);
    Ok(CampaignReport {
        config: config.clone(),
        records,
        summary,
        runtime_ms: started.elapsed().as_millis() as u64,
    })
}
