//! Entanglement measures and the permutationally invariant (PI) part of
//! bipartite density matrices, plus a verifier that searches for local bases
//! in which a measure of the PI part exceeds the measure of the state.

pub mod config;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod named;
pub mod ops;
pub mod optim;
pub mod ree;
pub mod rng;
pub mod roof;
pub mod sampling;
pub mod state;
pub mod symmetrization;
pub mod verifier;

pub use error::{Error, Result};
pub use measures::{mixed_measure, MeasureId, MeasureResult, Semantics};
pub use state::{BipartiteDims, DensityMatrix, PureState};
