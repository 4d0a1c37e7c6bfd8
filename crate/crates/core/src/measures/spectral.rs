//! Pure-state seeds: symmetric concave functions of the reduced spectrum.

use serde::{Deserialize, Serialize};

use crate::ops::entropy_of_spectrum;
use crate::state::{PureState, Spectrum, Subsystem};

/// A unitarily invariant concave function of a reduced state, written as a
/// symmetric concave function of its eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralFunction {
    /// `−Σ λ log₂ λ`; its roof is the entanglement of formation.
    EntropyOfEntanglement,
    /// `√(2(1 − Σ λ²))`; its roof is the (generalized) concurrence.
    LinearEntropyConcurrence,
    /// `((Σ √λ)² − 1)/2`; its roof is the convex-roof extended negativity.
    NegativityPure,
    /// `1 − λ_max`; its roof is the geometric measure.
    GeometricPure,
}

impl SpectralFunction {
    pub const ALL: [SpectralFunction; 4] = [
        SpectralFunction::EntropyOfEntanglement,
        SpectralFunction::LinearEntropyConcurrence,
        SpectralFunction::NegativityPure,
        SpectralFunction::GeometricPure,
    ];

    pub fn eval(&self, spectrum: &Spectrum) -> f64 {
        self.eval_values(spectrum.values())
    }

    /// Evaluates on raw eigenvalues; entries are clamped to `[0, 1]` and the
    /// order does not matter.
    pub fn eval_values(&self, values: &[f64]) -> f64 {
        let clamped = values.iter().map(|v| v.clamp(0.0, 1.0));
        let out = match self {
            SpectralFunction::EntropyOfEntanglement => entropy_of_spectrum(values),
            SpectralFunction::LinearEntropyConcurrence => {
                let purity: f64 = clamped.map(|v| v * v).sum();
                (2.0 * (1.0 - purity)).max(0.0).sqrt()
            }
            SpectralFunction::NegativityPure => {
                let s: f64 = clamped.map(f64::sqrt).sum();
                (s * s - 1.0) / 2.0
            }
            SpectralFunction::GeometricPure => 1.0 - clamped.fold(0.0, f64::max),
        };
        out.max(0.0)
    }
}

impl std::fmt::Display for SpectralFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SpectralFunction::EntropyOfEntanglement => "entropy_of_entanglement",
            SpectralFunction::LinearEntropyConcurrence => "linear_entropy_concurrence",
            SpectralFunction::NegativityPure => "negativity_pure",
            SpectralFunction::GeometricPure => "geometric_pure",
        };
        f.write_str(name)
    }
}

/// `E_f(|ψ⟩) = f(spectrum of tr_B |ψ⟩⟨ψ|)`.
pub fn pure_measure(f: SpectralFunction, psi: &PureState) -> f64 {
    f.eval(&psi.reduced_spectrum(Subsystem::A))
}
