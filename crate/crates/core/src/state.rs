//! Bipartite states: dimensions, density matrices, pure states, ensembles
//! and spectra.
//!
//! Basis kets `|a⟩⊗|b⟩` are indexed A-major, `i = a·d_b + b`, everywhere in
//! the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

/// Hermiticity, trace and positivity tolerance for density matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Unit-norm tolerance for pure states.
pub const NORM_TOL: f64 = 1e-12;
/// Eigenvalues at or below this are treated as zero when counting rank.
pub const RANK_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteDims {
    d_a: usize,
    d_b: usize,
}

impl BipartiteDims {
    pub fn new(d_a: usize, d_b: usize) -> Result<Self> {
        if d_a < 2 || d_b < 2 {
            return Err(Error::InvalidParameter(format!(
                "subsystem dimensions must be at least 2, got {d_a}x{d_b}"
            )));
        }
        Ok(Self { d_a, d_b })
    }

    pub fn square(d: usize) -> Result<Self> {
        Self::new(d, d)
    }

    /// Dims of a reduced single-party state, written as the trivial
    /// bipartition `d × 1`.
    pub fn reduced(d: usize) -> Self {
        Self { d_a: d, d_b: 1 }
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn total(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn is_square(&self) -> bool {
        self.d_a == self.d_b
    }

    pub fn swapped(&self) -> Self {
        Self { d_a: self.d_b, d_b: self.d_a }
    }

    #[inline]
    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.d_b + b
    }
}

impl std::fmt::Display for BipartiteDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.d_a, self.d_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts `values` descending.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|x, y| y.total_cmp(x));
        Self { values }
    }

    /// Sorts descending and clamps entries to `[0, 1]`.
    pub fn clamped(values: Vec<f64>) -> Self {
        Self::new(values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Number of entries above [`RANK_THRESHOLD`].
    pub fn rank(&self) -> usize {
        self.values.iter().filter(|&&v| v > RANK_THRESHOLD).count()
    }
}

/// A positive semidefinite unit-trace operator on a bipartite space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: BipartiteDims,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates shape, Hermiticity, trace and positivity.
    pub fn new(dims: BipartiteDims, entries: CMatrix) -> Result<Self> {
        check_shape(dims, &entries)?;
        if !linalg::all_finite(&entries) {
            return Err(Error::Numeric("density matrix has non-finite entries".into()));
        }
        let herm = linalg::hermitian_defect(&entries);
        if herm > STATE_TOL {
            return Err(Error::Invariant(format!("not Hermitian (defect {herm:.3e})")));
        }
        let tr = linalg::trace(&entries);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Invariant(format!("trace is {tr}, expected 1")));
        }
        let min_eig = linalg::hermitian_eigenvalues(&entries).last().copied().unwrap_or(0.0);
        if min_eig < -STATE_TOL {
            return Err(Error::Invariant(format!(
                "not positive semidefinite (min eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Self { dims, entries })
    }

    /// Wraps a matrix that is valid by construction. Only the shape is checked
    /// in debug builds.
    pub(crate) fn from_parts_unchecked(dims: BipartiteDims, entries: CMatrix) -> Self {
        debug_assert_eq!(entries.nrows(), dims.total());
        Self { dims, entries }
    }

    /// Normalizes a PSD matrix by its trace, for constructions like `G G†`.
    pub fn from_psd_unnormalized(dims: BipartiteDims, entries: CMatrix) -> Result<Self> {
        check_shape(dims, &entries)?;
        let tr = linalg::trace(&entries).re;
        if !(tr > 0.0 && tr.is_finite()) {
            return Err(Error::Numeric(format!("cannot normalize matrix with trace {tr}")));
        }
        Self::new(dims, linalg::hermitian_part(&entries).unscale(tr))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { dims: psi.dims, entries: linalg::outer(&psi.amplitudes) }
    }

    pub fn maximally_mixed(dims: BipartiteDims) -> Self {
        let n = dims.total();
        Self { dims, entries: CMatrix::identity(n, n).unscale(n as f64) }
    }

    /// `p·a + (1 − p)·b`.
    pub fn mix(p: f64, a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("mixing weight {p} outside [0, 1]")));
        }
        same_dims(a.dims, b.dims)?;
        Ok(Self { dims: a.dims, entries: a.entries.scale(p) + b.entries.scale(1.0 - p) })
    }

    /// `ρ_A ⊗ ρ_B` from two single-party states given as matrices.
    pub fn product(rho_a: &CMatrix, rho_b: &CMatrix) -> Result<Self> {
        let dims = BipartiteDims::new(rho_a.nrows(), rho_b.nrows())?;
        Self::new(dims, linalg::kron(rho_a, rho_b))
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::new(linalg::hermitian_eigenvalues(&self.entries))
    }

    pub fn eigen(&self) -> linalg::HermitianEigen {
        linalg::hermitian_eigen(&self.entries)
    }

    pub fn rank(&self) -> usize {
        self.spectrum().rank()
    }

    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        linalg::frobenius_distance(&self.entries, &other.entries)
    }
}

/// A unit vector on a bipartite space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: BipartiteDims,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(dims: BipartiteDims, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::Structural(format!(
                "{} amplitudes for dims {dims}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() {
            return Err(Error::Numeric("pure state has non-finite amplitudes".into()));
        }
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Invariant(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(dims: BipartiteDims, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Numeric(format!("cannot normalize vector of norm {norm}")));
        }
        Self::new(dims, amplitudes.unscale(norm))
    }

    /// `|a⟩ ⊗ |b⟩` basis ket.
    pub fn basis(dims: BipartiteDims, a: usize, b: usize) -> Result<Self> {
        if a >= dims.d_a() || b >= dims.d_b() {
            return Err(Error::InvalidParameter(format!("basis ket |{a}{b}⟩ outside {dims}")));
        }
        let mut v = CVector::zeros(dims.total());
        v[dims.index(a, b)] = linalg::ONE;
        Ok(Self { dims, amplitudes: v })
    }

    pub fn product(a: &CVector, b: &CVector) -> Result<Self> {
        let dims = BipartiteDims::new(a.len(), b.len())?;
        Self::normalized(dims, linalg::kron_vec(a, b))
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// Coefficient matrix `M[a][b] = ⟨ab|ψ⟩`, of shape `d_a × d_b`.
    pub fn coefficient_matrix(&self) -> CMatrix {
        coefficient_matrix(self.dims, &self.amplitudes)
    }

    /// Spectrum of the reduced state on `keep`: squared singular values of
    /// the coefficient matrix, padded with exact zeros to the dimension of
    /// `keep`. Going through singular values keeps tiny Schmidt
    /// coefficients accurate, which matters for functions of `√λ`.
    pub fn reduced_spectrum(&self, keep: Subsystem) -> Spectrum {
        let mut values: Vec<f64> = self
            .coefficient_matrix()
            .singular_values()
            .iter()
            .map(|s| s * s)
            .collect();
        let d = match keep {
            Subsystem::A => self.dims.d_a(),
            Subsystem::B => self.dims.d_b(),
        };
        values.resize(d, 0.0);
        Spectrum::clamped(values)
    }

    /// Squared Schmidt coefficients (the reduced spectrum of the smaller side).
    pub fn schmidt_spectrum(&self) -> Spectrum {
        if self.dims.d_a() <= self.dims.d_b() {
            self.reduced_spectrum(Subsystem::A)
        } else {
            self.reduced_spectrum(Subsystem::B)
        }
    }

    /// `Π|ψ⟩`, exchanging the two tensor factors.
    pub fn swapped(&self) -> Self {
        let dims = self.dims;
        let out_dims = dims.swapped();
        let mut v = CVector::zeros(dims.total());
        for a in 0..dims.d_a() {
            for b in 0..dims.d_b() {
                v[out_dims.index(b, a)] = self.amplitudes[dims.index(a, b)];
            }
        }
        Self { dims: out_dims, amplitudes: v }
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

pub(crate) fn coefficient_matrix(dims: BipartiteDims, amplitudes: &CVector) -> CMatrix {
    CMatrix::from_fn(dims.d_a(), dims.d_b(), |a, b| amplitudes[dims.index(a, b)])
}

/// Weighted pure-state decomposition of a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(Error::InvalidParameter("ensemble has no members".into()));
        };
        let dims = first.dims();
        let mut total = 0.0;
        for (w, psi) in &members {
            if !(0.0..=1.0).contains(w) {
                return Err(Error::Invariant(format!("ensemble weight {w} outside [0, 1]")));
            }
            same_dims(dims, psi.dims())?;
            total += w;
        }
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::Invariant(format!("ensemble weights sum to {total}")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dims(&self) -> BipartiteDims {
        self.members[0].1.dims()
    }

    /// `Σᵢ wᵢ |ψᵢ⟩⟨ψᵢ|`.
    pub fn density_matrix(&self) -> DensityMatrix {
        let n = self.dims().total();
        let mut acc = CMatrix::zeros(n, n);
        for (w, psi) in &self.members {
            acc += linalg::outer(psi.amplitudes()).scale(*w);
        }
        DensityMatrix::from_parts_unchecked(self.dims(), acc)
    }

    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        self.density_matrix().frobenius_distance(rho)
    }
}

pub(crate) fn check_shape(dims: BipartiteDims, entries: &CMatrix) -> Result<()> {
    let n = dims.total();
    if entries.nrows() != n || entries.ncols() != n {
        return Err(Error::Structural(format!(
            "matrix is {}x{}, dims {dims} need {n}x{n}",
            entries.nrows(),
            entries.ncols()
        )));
    }
    Ok(())
}

pub(crate) fn same_dims(a: BipartiteDims, b: BipartiteDims) -> Result<()> {
    if a != b {
        return Err(Error::Structural(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}
