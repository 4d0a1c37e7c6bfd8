//! The catalog of entanglement measures and the dispatcher that evaluates
//! any of them on a mixed state.

mod closed_form;
mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use closed_form::{
    binary_entropy, concurrence_2q, eof_2q, eof_from_concurrence, log_negativity, negativity,
    negativity_wrt, partial_transpose_trace_norm,
};
pub use spectral::{pure_measure, SpectralFunction};

use crate::config::MeasureOptions;
use crate::error::{Error, Result};
use crate::ree::ree_upper_bound;
use crate::roof::{minimize_roof, RoofProblem};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureId {
    Negativity,
    LogNegativity,
    Concurrence,
    Eof,
    Geometric,
    Cren,
    LogCren,
    Ree,
}

impl MeasureId {
    pub const ALL: [MeasureId; 8] = [
        MeasureId::Negativity,
        MeasureId::LogNegativity,
        MeasureId::Concurrence,
        MeasureId::Eof,
        MeasureId::Geometric,
        MeasureId::Cren,
        MeasureId::LogCren,
        MeasureId::Ree,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureId::Negativity => "negativity",
            MeasureId::LogNegativity => "log_negativity",
            MeasureId::Concurrence => "concurrence",
            MeasureId::Eof => "eof",
            MeasureId::Geometric => "geometric",
            MeasureId::Cren => "cren",
            MeasureId::LogCren => "log_cren",
            MeasureId::Ree => "ree",
        }
    }

    /// Pure-state seed of the convex roof behind this measure, if any.
    pub fn seed_function(&self) -> Option<SpectralFunction> {
        match self {
            MeasureId::Concurrence => Some(SpectralFunction::LinearEntropyConcurrence),
            MeasureId::Eof => Some(SpectralFunction::EntropyOfEntanglement),
            MeasureId::Geometric => Some(SpectralFunction::GeometricPure),
            MeasureId::Cren | MeasureId::LogCren => Some(SpectralFunction::NegativityPure),
            _ => None,
        }
    }

    /// Whether the value on a state of these dims is computed in closed form.
    pub fn is_exact_for(&self, dims: crate::state::BipartiteDims) -> bool {
        match self {
            MeasureId::Negativity | MeasureId::LogNegativity => true,
            MeasureId::Concurrence | MeasureId::Eof => dims.d_a() == 2 && dims.d_b() == 2,
            _ => false,
        }
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown measure '{s}'")))
    }
}

/// Which side of the true value a reported number sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Semantics {
    #[serde(rename = "EXACT")]
    Exact,
    /// Produced by a minimization over a restricted family, so never below
    /// the true value.
    #[serde(rename = "UPPER_BOUND")]
    UpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub measure: MeasureId,
    pub value: f64,
    pub semantics: Semantics,
    pub converged: bool,
    pub iterations: usize,
    pub seed: u64,
}

impl MeasureResult {
    pub fn exact(measure: MeasureId, value: f64) -> Self {
        Self { measure, value, semantics: Semantics::Exact, converged: true, iterations: 0, seed: 0 }
    }

    pub fn is_exact(&self) -> bool {
        self.semantics == Semantics::Exact
    }
}

/// Evaluates `id` on `rho`.
///
/// Negativity and log-negativity are always closed form, as are concurrence
/// and EoF on two qubits. Everything else is an optimizer output carrying
/// [`Semantics::UpperBound`]; a run that hits its iteration budget comes
/// back with `converged = false` rather than an error.
pub fn mixed_measure(id: MeasureId, rho: &DensityMatrix, opts: &MeasureOptions) -> Result<MeasureResult> {
    let dims = rho.dims();
    match id {
        MeasureId::Negativity => Ok(MeasureResult::exact(id, negativity(rho))),
        MeasureId::LogNegativity => Ok(MeasureResult::exact(id, log_negativity(rho))),
        MeasureId::Concurrence if id.is_exact_for(dims) => Ok(MeasureResult::exact(id, concurrence_2q(rho)?)),
        MeasureId::Eof if id.is_exact_for(dims) => Ok(MeasureResult::exact(id, eof_2q(rho)?)),
        MeasureId::Ree => ree_upper_bound(rho, opts),
        MeasureId::Concurrence
        | MeasureId::Eof
        | MeasureId::Geometric
        | MeasureId::Cren
        | MeasureId::LogCren => {
            let f = id.seed_function().expect("roof measure");
            let problem = RoofProblem::from_options(rho.clone(), f, opts)?;
            let solution = minimize_roof(&problem, opts.seed)?;
            let value = if id == MeasureId::LogCren {
                (solution.value + 1.0).log2()
            } else {
                solution.value
            };
            Ok(MeasureResult {
                measure: id,
                value,
                semantics: Semantics::UpperBound,
                converged: solution.converged,
                iterations: solution.iterations_used,
                seed: opts.seed,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named::{named_state, NamedState};
    use crate::state::BipartiteDims;

    #[test]
    fn measure_ids_round_trip_through_strings_and_json() {
        for id in MeasureId::ALL {
            assert_eq!(id.as_str().parse::<MeasureId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{id}\""));
        }
        assert!("squashed".parse::<MeasureId>().is_err());
    }

    #[test]
    fn result_json_schema() {
        let r = MeasureResult::exact(MeasureId::Negativity, 0.5);
        let v: serde_json::Value = serde_json::to_value(r).unwrap();
        assert_eq!(v["measure"], "negativity");
        assert_eq!(v["semantics"], "EXACT");
        assert_eq!(v["value"], 0.5);
        assert_eq!(v["converged"], true);
        assert_eq!(v["iterations"], 0);
        assert_eq!(v["seed"], 0);
    }

    #[test]
    fn dispatch_examples() {
        let two = BipartiteDims::square(2).unwrap();
        let bell = named_state(NamedState::BellPhiPlus, two).unwrap();
        let opts = MeasureOptions::default();
        let r = mixed_measure(MeasureId::Negativity, &bell, &opts).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12 && r.is_exact());

        // Pure Bell state: roof collapses to the pure negativity 1/2.
        let r = mixed_measure(MeasureId::LogCren, &bell, &opts).unwrap();
        assert!((r.value - 1.5f64.log2()).abs() < 1e-10);
        assert_eq!(r.semantics, Semantics::UpperBound);

        let mixed = named_state(NamedState::MaxMixed, two).unwrap();
        let r = mixed_measure(MeasureId::Eof, &mixed, &opts).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.is_exact());
    }
}
