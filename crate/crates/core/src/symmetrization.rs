//! The particle swap, the permutationally-invariant (PI) part of a state and
//! single-particle basis changes.
//!
//! For `d × d` systems the PI part is `ρ^PI = (ρ + ΠρΠ†)/2`, the average over
//! the two-element symmetric group `{I, Π}`. A basis change `B = (U_A, U_B)`
//! acts as `ρ ↦ (U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`; the PI part "in basis B" is the
//! PI part of the rotated state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::ComplexMatrixJson;
use crate::linalg::{self, c, CMatrix, CVector};
use crate::state::{BipartiteDims, DensityMatrix};

/// Unitarity tolerance for basis factors.
pub const UNITARY_TOL: f64 = 1e-10;

fn require_square(dims: BipartiteDims) -> Result<usize> {
    if !dims.is_square() {
        return Err(Error::Unsupported(format!("PI operations need d_a = d_b, got {dims}")));
    }
    Ok(dims.d_a())
}

/// `Π(|a⟩⊗|b⟩) = |b⟩⊗|a⟩` on `C^d ⊗ C^d`, applied as an index permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapOperator {
    d: usize,
}

impl SwapOperator {
    pub fn new(dims: BipartiteDims) -> Result<Self> {
        Ok(Self { d: require_square(dims)? })
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn permute(&self, i: usize) -> usize {
        (i % self.d) * self.d + i / self.d
    }

    /// `Π|v⟩`.
    pub fn apply(&self, v: &CVector) -> CVector {
        CVector::from_fn(v.len(), |i, _| v[self.permute(i)])
    }

    /// `Π m Π†`. Exact: entries are only moved.
    pub fn conjugate(&self, m: &CMatrix) -> CMatrix {
        CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(self.permute(i), self.permute(j))])
    }

    /// The explicit permutation matrix.
    pub fn matrix(&self) -> CMatrix {
        let n = self.d * self.d;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(self.permute(i), i)] = linalg::ONE;
        }
        m
    }
}

fn pi_average(swap: SwapOperator, m: &CMatrix) -> CMatrix {
    (m + swap.conjugate(m)).scale(0.5)
}

/// `(ρ + ΠρΠ†)/2`.
pub fn pi_part(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let swap = SwapOperator::new(rho.dims())?;
    Ok(DensityMatrix::from_parts_unchecked(rho.dims(), pi_average(swap, rho.matrix())))
}

/// A pair of local unitaries `(U_A, U_B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBasis {
    u_a: CMatrix,
    u_b: CMatrix,
}

impl LocalBasis {
    pub fn new(u_a: CMatrix, u_b: CMatrix) -> Result<Self> {
        for (name, u) in [("u_a", &u_a), ("u_b", &u_b)] {
            if !u.is_square() {
                return Err(Error::Structural(format!("{name} is not square")));
            }
            let defect = linalg::unitarity_defect(u);
            if !(defect <= UNITARY_TOL) {
                return Err(Error::Invariant(format!("{name} is not unitary (defect {defect:.3e})")));
            }
        }
        Ok(Self { u_a, u_b })
    }

    pub fn identity(dims: BipartiteDims) -> Self {
        Self {
            u_a: CMatrix::identity(dims.d_a(), dims.d_a()),
            u_b: CMatrix::identity(dims.d_b(), dims.d_b()),
        }
    }

    pub fn u_a(&self) -> &CMatrix {
        &self.u_a
    }

    pub fn u_b(&self) -> &CMatrix {
        &self.u_b
    }

    /// `U_A ⊗ U_B`.
    pub fn operator(&self) -> CMatrix {
        linalg::kron(&self.u_a, &self.u_b)
    }

    fn check(&self, dims: BipartiteDims) -> Result<()> {
        if self.u_a.nrows() != dims.d_a() || self.u_b.nrows() != dims.d_b() {
            return Err(Error::Structural(format!(
                "basis of size {}x{} for state dims {dims}",
                self.u_a.nrows(),
                self.u_b.nrows()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> LocalBasisJson {
        LocalBasisJson {
            u_a: ComplexMatrixJson::from_matrix(&self.u_a),
            u_b: ComplexMatrixJson::from_matrix(&self.u_b),
        }
    }
}

/// One matrix object per factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalBasisJson {
    pub u_a: ComplexMatrixJson,
    pub u_b: ComplexMatrixJson,
}

impl LocalBasisJson {
    pub fn to_basis(&self) -> Result<LocalBasis> {
        let u_a = self.u_a.to_matrix(self.u_a.order())?;
        let u_b = self.u_b.to_matrix(self.u_b.order())?;
        LocalBasis::new(u_a, u_b)
    }
}

/// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`.
pub fn apply_local_basis(rho: &DensityMatrix, basis: &LocalBasis) -> Result<DensityMatrix> {
    basis.check(rho.dims())?;
    let rotated = linalg::conjugate_by(&basis.operator(), rho.matrix());
    Ok(DensityMatrix::from_parts_unchecked(rho.dims(), rotated))
}

/// PI part of the state seen in `basis`: `pi_part(apply_local_basis(ρ, B))`.
pub fn pi_part_in_basis(rho: &DensityMatrix, basis: &LocalBasis) -> Result<DensityMatrix> {
    require_square(rho.dims())?;
    pi_part(&apply_local_basis(rho, basis)?)
}

/// Coordinates of `exp(i·H(θ))`, `H(θ) = Σ θ_k G_k` over the generalized
/// Gell-Mann matrices followed by the identity (`d²` reals).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryParams {
    theta: Vec<f64>,
}

impl UnitaryParams {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        let d = (theta.len() as f64).sqrt().round() as usize;
        if d == 0 || d * d != theta.len() {
            return Err(Error::InvalidParameter(format!(
                "{} unitary parameters is not a square count",
                theta.len()
            )));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Numeric("non-finite unitary parameter".into()));
        }
        Ok(Self { theta })
    }

    pub fn zeros(d: usize) -> Self {
        Self { theta: vec![0.0; d * d] }
    }

    pub fn dim(&self) -> usize {
        (self.theta.len() as f64).sqrt().round() as usize
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }
}

/// Hermitian generators of `U(d)`: off-diagonal symmetric/antisymmetric
/// pairs in `(j, k)` order, then the diagonal ones, then the identity.
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    d: usize,
    generators: Vec<CMatrix>,
}

impl GeneratorBasis {
    pub fn new(d: usize) -> Self {
        let mut generators = Vec::with_capacity(d * d);
        for j in 0..d {
            for k in j + 1..d {
                let mut sym = CMatrix::zeros(d, d);
                sym[(j, k)] = c(1.0, 0.0);
                sym[(k, j)] = c(1.0, 0.0);
                generators.push(sym);
                let mut anti = CMatrix::zeros(d, d);
                anti[(j, k)] = c(0.0, -1.0);
                anti[(k, j)] = c(0.0, 1.0);
                generators.push(anti);
            }
        }
        for l in 1..d {
            let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
            let mut diag = CMatrix::zeros(d, d);
            for j in 0..l {
                diag[(j, j)] = c(norm, 0.0);
            }
            diag[(l, l)] = c(-(l as f64) * norm, 0.0);
            generators.push(diag);
        }
        generators.push(CMatrix::identity(d, d));
        Self { d, generators }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn hamiltonian(&self, theta: &[f64]) -> CMatrix {
        debug_assert_eq!(theta.len(), self.generators.len());
        let mut h = CMatrix::zeros(self.d, self.d);
        for (t, g) in theta.iter().zip(&self.generators) {
            if *t != 0.0 {
                h += g.scale(*t);
            }
        }
        h
    }

    /// `exp(i·H(θ))`.
    pub fn unitary(&self, theta: &[f64]) -> CMatrix {
        if theta.iter().all(|&t| t == 0.0) {
            return CMatrix::identity(self.d, self.d);
        }
        linalg::expm_i_hermitian(&self.hamiltonian(theta))
    }
}

/// Maps two coordinate vectors to a [`LocalBasis`].
pub fn params_to_basis(p_a: &UnitaryParams, p_b: &UnitaryParams) -> Result<LocalBasis> {
    let u_a = GeneratorBasis::new(p_a.dim()).unitary(p_a.as_slice());
    let u_b = GeneratorBasis::new(p_b.dim()).unitary(p_b.as_slice());
    LocalBasis::new(u_a, u_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_distance;
    use crate::named::{named_state, NamedState};
    use crate::sampling::sample_ginibre_mixed;
    use crate::state::PureState;

    fn two() -> BipartiteDims {
        BipartiteDims::square(2).unwrap()
    }

    fn pauli_x() -> CMatrix {
        let mut x = CMatrix::zeros(2, 2);
        x[(0, 1)] = linalg::ONE;
        x[(1, 0)] = linalg::ONE;
        x
    }

    #[test]
    fn swap_is_an_involutive_symmetric_permutation() {
        for d in 2..5 {
            let swap = SwapOperator::new(BipartiteDims::square(d).unwrap()).unwrap();
            let p = swap.matrix();
            let n = d * d;
            assert_eq!(&p * &p, CMatrix::identity(n, n));
            assert_eq!(p.transpose(), p);
            assert_eq!(p.adjoint(), p);
        }
        assert!(SwapOperator::new(BipartiteDims::new(2, 3).unwrap()).is_err());
    }

    #[test]
    fn pi_part_of_01_is_symmetric_mixture() {
        let rho = PureState::basis(two(), 0, 1).unwrap().density_matrix();
        let pi = pi_part(&rho).unwrap();
        let mut expect = CMatrix::zeros(4, 4);
        expect[(1, 1)] = c(0.5, 0.0);
        expect[(2, 2)] = c(0.5, 0.0);
        assert_eq!(pi.matrix(), &expect);
    }

    #[test]
    fn singlet_is_a_fixed_point() {
        let singlet = named_state(NamedState::BellPsiMinus, two()).unwrap();
        let pi = pi_part(&singlet).unwrap();
        assert!(frobenius_distance(pi.matrix(), singlet.matrix()) < 1e-15);
    }

    #[test]
    fn pi_part_is_idempotent_and_rejects_rectangular() {
        let rho = sample_ginibre_mixed(BipartiteDims::square(3).unwrap(), 9, 4).unwrap();
        let once = pi_part(&rho).unwrap();
        let twice = pi_part(&once).unwrap();
        assert!(frobenius_distance(once.matrix(), twice.matrix()) < 1e-15);
        let rect = sample_ginibre_mixed(BipartiteDims::new(2, 3).unwrap(), 2, 4).unwrap();
        assert!(matches!(pi_part(&rect), Err(Error::Unsupported(_))));
    }

    #[test]
    fn bit_flip_basis() {
        let rho = PureState::basis(two(), 0, 0).unwrap().density_matrix();
        let basis = LocalBasis::new(pauli_x(), pauli_x()).unwrap();
        let out = apply_local_basis(&rho, &basis).unwrap();
        let expect = PureState::basis(two(), 1, 1).unwrap().density_matrix();
        assert!(frobenius_distance(out.matrix(), expect.matrix()) < 1e-15);
        let id = apply_local_basis(&rho, &LocalBasis::identity(two())).unwrap();
        assert!(frobenius_distance(id.matrix(), rho.matrix()) < 1e-14);
        let wrong = LocalBasis::identity(BipartiteDims::square(3).unwrap());
        assert!(apply_local_basis(&rho, &wrong).is_err());
    }

    #[test]
    fn basis_rejects_non_unitary() {
        let m = CMatrix::identity(2, 2).scale(1.1);
        assert!(matches!(LocalBasis::new(m, CMatrix::identity(2, 2)), Err(Error::Invariant(_))));
    }

    #[test]
    fn generator_basis_shapes() {
        for d in 2..5 {
            let g = GeneratorBasis::new(d);
            assert_eq!(g.len(), d * d);
            for m in g.generators() {
                assert!(linalg::hermitian_defect(m) == 0.0);
            }
            // Gell-Mann part is trace-orthogonal with tr(G_i G_j) = 2 δ_ij.
            let gm = &g.generators()[..d * d - 1];
            for (i, x) in gm.iter().enumerate() {
                for (j, y) in gm.iter().enumerate() {
                    let t = linalg::trace(&(x * y)).re;
                    let want = if i == j { 2.0 } else { 0.0 };
                    assert!((t - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sigma_y_quarter_turn_flips_zero_to_one() {
        // exp(i π/2 σ_y) = i σ_y maps |0⟩ to -|1⟩.
        let theta = vec![0.0, std::f64::consts::FRAC_PI_2, 0.0, 0.0];
        let u = GeneratorBasis::new(2).unitary(&theta);
        assert!((u[(1, 0)].norm_sqr() - 1.0).abs() < 1e-14);
        assert!(u[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn params_validation_and_zero_identity() {
        assert!(UnitaryParams::new(vec![0.0; 5]).is_err());
        assert!(UnitaryParams::new(vec![f64::NAN, 0.0, 0.0, 0.0]).is_err());
        let basis = params_to_basis(&UnitaryParams::zeros(3), &UnitaryParams::zeros(3)).unwrap();
        assert_eq!(basis, LocalBasis::identity(BipartiteDims::square(3).unwrap()));
    }

    #[test]
    fn shared_basis_commutes_with_swap() {
        // Π (U⊗U) = (U⊗U) Π, so on a swap-symmetric state the PI part in basis
        // (U, U) is just the rotated state.
        let rho = named_state(NamedState::Werner(0.7), two()).unwrap();
        let theta = UnitaryParams::new(vec![0.3, -1.1, 0.4, 0.2]).unwrap();
        let basis = params_to_basis(&theta, &theta).unwrap();
        let uu = basis.operator();
        let swap = SwapOperator::new(two()).unwrap().matrix();
        assert!(frobenius_distance(&(&swap * &uu), &(&uu * &swap)) < 1e-14);
        let got = pi_part_in_basis(&rho, &basis).unwrap();
        let want = &uu * rho.matrix() * uu.adjoint();
        assert!(frobenius_distance(got.matrix(), &want) < 1e-14);
    }

    #[test]
    fn basis_json_round_trip() {
        let theta = UnitaryParams::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let basis = params_to_basis(&theta, &UnitaryParams::zeros(2)).unwrap();
        let text = serde_json::to_string(&basis.to_json()).unwrap();
        let back: LocalBasisJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_basis().unwrap(), basis);
    }
}
