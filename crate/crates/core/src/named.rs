//! Closed-form fixture states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};
use crate::state::{BipartiteDims, DensityMatrix, PureState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedState {
    /// `(|00⟩ + |11⟩)/√2`, two qubits only.
    BellPhiPlus,
    /// `(|01⟩ − |10⟩)/√2`, two qubits only.
    BellPsiMinus,
    /// `p·P_anti/tr(P_anti) + (1 − p)·I/d²`; for qubits `p|Ψ⁻⟩⟨Ψ⁻| + (1 − p)I/4`.
    Werner(f64),
    /// `F|Φ⁺_d⟩⟨Φ⁺_d| + (1 − F)(I − |Φ⁺_d⟩⟨Φ⁺_d|)/(d² − 1)`.
    Isotropic(f64),
    MaxMixed,
    Product00,
}

impl NamedState {
    pub fn density_matrix(&self, dims: BipartiteDims) -> Result<DensityMatrix> {
        match *self {
            NamedState::BellPhiPlus | NamedState::BellPsiMinus => {
                if dims.d_a() != 2 || dims.d_b() != 2 {
                    return Err(Error::Unsupported(format!("{self} needs 2x2 dims, got {dims}")));
                }
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let amps = if *self == NamedState::BellPhiPlus {
                    [s, 0.0, 0.0, s]
                } else {
                    [0.0, s, -s, 0.0]
                };
                let v = CVector::from_iterator(4, amps.iter().map(|&x| c(x, 0.0)));
                Ok(PureState::new(dims, v)?.density_matrix())
            }
            NamedState::Werner(p) => {
                check_unit(p, "werner p")?;
                square(dims, self)?;
                let d = dims.d_a();
                let n = dims.total();
                let anti = antisymmetric_projector(dims);
                let anti_dim = (d * (d - 1) / 2) as f64;
                let m = anti.unscale(anti_dim).scale(p)
                    + CMatrix::identity(n, n).scale((1.0 - p) / n as f64);
                DensityMatrix::new(dims, m)
            }
            NamedState::Isotropic(f) => {
                check_unit(f, "isotropic F")?;
                square(dims, self)?;
                let d = dims.d_a();
                let n = dims.total();
                let mut v = CVector::zeros(n);
                for k in 0..d {
                    v[dims.index(k, k)] = c(1.0 / (d as f64).sqrt(), 0.0);
                }
                let proj = &v * v.adjoint();
                let rest = CMatrix::identity(n, n) - &proj;
                DensityMatrix::new(dims, proj.scale(f) + rest.scale((1.0 - f) / (n as f64 - 1.0)))
            }
            NamedState::MaxMixed => Ok(DensityMatrix::maximally_mixed(dims)),
            NamedState::Product00 => Ok(PureState::basis(dims, 0, 0)?.density_matrix()),
        }
    }
}

/// `(I − Π)/2` as an explicit matrix.
fn antisymmetric_projector(dims: BipartiteDims) -> CMatrix {
    let n = dims.total();
    let d = dims.d_a();
    let mut m = CMatrix::identity(n, n).scale(0.5);
    for a in 0..d {
        for b in 0..d {
            m[(dims.index(a, b), dims.index(b, a))] -= c(0.5, 0.0);
        }
    }
    m
}

fn check_unit(x: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("{what} = {x} outside [0, 1]")));
    }
    Ok(())
}

fn square(dims: BipartiteDims, name: &NamedState) -> Result<()> {
    if !dims.is_square() {
        return Err(Error::Unsupported(format!("{name} needs d_a = d_b, got {dims}")));
    }
    Ok(())
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedState::BellPhiPlus => write!(f, "bell_phi_plus"),
            NamedState::BellPsiMinus => write!(f, "bell_psi_minus"),
            NamedState::Werner(p) => write!(f, "werner({p})"),
            NamedState::Isotropic(x) => write!(f, "isotropic({x})"),
            NamedState::MaxMixed => write!(f, "max_mixed"),
            NamedState::Product00 => write!(f, "product_00"),
        }
    }
}

impl FromStr for NamedState {
    type Err = Error;

    /// Accepts `bell_phi_plus`, `werner(0.5)`, `isotropic(0.9)`, ...
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.find('(') {
            Some(open) if s.ends_with(')') => (&s[..open], Some(&s[open + 1..s.len() - 1])),
            _ => (s, None),
        };
        let param = || -> Result<f64> {
            let raw = arg.ok_or_else(|| Error::InvalidParameter(format!("{name} needs a parameter")))?;
            raw.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad parameter '{raw}' for {name}")))
        };
        let state = match name {
            "bell_phi_plus" => NamedState::BellPhiPlus,
            "bell_psi_minus" => NamedState::BellPsiMinus,
            "werner" => NamedState::Werner(param()?),
            "isotropic" => NamedState::Isotropic(param()?),
            "max_mixed" => NamedState::MaxMixed,
            "product_00" => NamedState::Product00,
            _ => return Err(Error::InvalidParameter(format!("unknown named state '{s}'"))),
        };
        if arg.is_some() && !matches!(state, NamedState::Werner(_) | NamedState::Isotropic(_)) {
            return Err(Error::InvalidParameter(format!("{name} takes no parameter")));
        }
        Ok(state)
    }
}

impl Serialize for NamedState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NamedState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Convenience wrapper over [`NamedState::density_matrix`].
pub fn named_state(name: NamedState, dims: BipartiteDims) -> Result<DensityMatrix> {
    name.density_matrix(dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_distance;

    fn two() -> BipartiteDims {
        BipartiteDims::square(2).unwrap()
    }

    #[test]
    fn werner_endpoints() {
        let singlet = named_state(NamedState::BellPsiMinus, two()).unwrap();
        let w1 = named_state(NamedState::Werner(1.0), two()).unwrap();
        assert!(frobenius_distance(w1.matrix(), singlet.matrix()) < 1e-15);
        let w0 = named_state(NamedState::Werner(0.0), two()).unwrap();
        assert!(frobenius_distance(w0.matrix(), DensityMatrix::maximally_mixed(two()).matrix()) < 1e-15);
    }

    #[test]
    fn product_00_and_parameters() {
        let p = named_state(NamedState::Product00, two()).unwrap();
        assert_eq!(p.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(p.purity(), 1.0);
        assert!(named_state(NamedState::Werner(1.2), two()).is_err());
        assert!(named_state(NamedState::BellPhiPlus, BipartiteDims::square(3).unwrap()).is_err());
        assert!(named_state(NamedState::Isotropic(0.5), BipartiteDims::new(2, 3).unwrap()).is_err());
        let iso = named_state(NamedState::Isotropic(1.0), BipartiteDims::square(3).unwrap()).unwrap();
        assert!((iso.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["bell_phi_plus", "werner(0.25)", "isotropic(0.9)", "max_mixed", "product_00"] {
            assert_eq!(s.parse::<NamedState>().unwrap().to_string(), s);
        }
        assert!("werner".parse::<NamedState>().is_err());
        assert!("max_mixed(1)".parse::<NamedState>().is_err());
        assert!("ghz".parse::<NamedState>().is_err());
    }
}
