//! Laboratory fields to the dimensionless double-crossing model.
//!
//! A quadratic bias `B_z(t)` with magnitude `B_z0` at its midpoint and ramp
//! rate `Ḃ` at the crossings, plus a transverse field `B_x`, act on the spin
//! through `−g_F μ_B B·F`. Matching to the scaled Hamiltonian
//! uses the coupling `v = |g_F| μ_B B_x / 2` and times `τ = v t / ħ`:
//!
//! ```text
//! μ  = B_z0 / B_x
//! εμ = (ħ Ḃ / (|g_F| μ_B B_x²))²
//! t_c = 4 B_z0 / Ḃ
//! ```
//!
//! Lab-unit Zener times follow the usual estimates `B_x/(2Ḃ)` (adiabatic)
//! and `√(ħ/(|g_F| μ_B Ḃ))` (sudden). These are shorter than the scaled
//! Zener time converted with `τ = vt/ħ` by [`zener_time_lab_factor`].

use serde::{Deserialize, Serialize};

use crate::constants::{BOHR_MAGNETON_J_PER_G, HBAR};
use crate::crossing::{self, ParabolicParams, Regime, ICA_WARN_MARGIN};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabFields {
    /// Transverse coupling field, G.
    #[serde(rename = "B_x_gauss")]
    pub b_x: f64,
    /// Bias magnitude at the midpoint between crossings, G.
    #[serde(rename = "B_z0_gauss")]
    pub b_z0: f64,
    /// Bias ramp rate at the crossings, G/s.
    #[serde(rename = "Bdot_gauss_per_s")]
    pub bdot: f64,
    #[serde(rename = "g_F")]
    pub g_f: f64,
}

impl LabFields {
    pub fn new(b_x: f64, b_z0: f64, bdot: f64, g_f: f64) -> Result<Self> {
        let f = Self { b_x, b_z0, bdot, g_f };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("B_x", self.b_x),
            ("B_z0", self.b_z0),
            ("Bdot", self.bdot),
            ("g_F", self.g_f),
        ] {
            if !v.is_finite() || v.abs() == 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be finite and nonzero")));
            }
        }
        Ok(())
    }

    /// Reads a TOML file with keys `B_x_gauss`, `B_z0_gauss`,
    /// `Bdot_gauss_per_s`, `g_F`.
    pub fn from_toml(text: &str) -> Result<Self> {
        let f: Self = toml::from_str(text).map_err(|e| Error::Config(format!("lab config: {e}")))?;
        f.validate()?;
        Ok(f)
    }

    /// Coupling energy `v = |g_F| μ_B B_x / 2`, J.
    pub fn coupling_energy(&self) -> f64 {
        0.5 * self.g_f.abs() * BOHR_MAGNETON_J_PER_G * self.b_x.abs()
    }

    /// Seconds per unit of scaled time.
    pub fn time_unit(&self) -> f64 {
        HBAR / self.coupling_energy()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MappedParams {
    pub epsilon: f64,
    pub mu: f64,
    pub eps_mu: f64,
    /// Time between the crossings, s.
    pub t_c: f64,
    /// Zener time, s.
    pub t_z: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub phi: f64,
    pub sigma: f64,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub regime: Regime,
    /// Seconds per unit of scaled time.
    pub time_unit: f64,
}

impl MappedParams {
    pub fn parabolic(&self) -> Result<ParabolicParams> {
        ParabolicParams::new(self.epsilon, self.mu)
    }
}

/// Ratio of the scaled Zener time (converted to seconds) to the lab-unit
/// estimate: `√2` in the sudden regime, `2` in the adiabatic regime.
pub fn zener_time_lab_factor(regime: Regime) -> f64 {
    match regime {
        Regime::Sudden => std::f64::consts::SQRT_2,
        Regime::Adiabatic => 2.0,
    }
}

pub fn map_fields(f: &LabFields) -> Result<MappedParams> {
    f.validate()?;
    let (b_x, b_z0, bdot, g) = (f.b_x.abs(), f.b_z0.abs(), f.bdot.abs(), f.g_f.abs());
    let mu = b_z0 / b_x;
    let root = HBAR * bdot / (g * BOHR_MAGNETON_J_PER_G * b_x * b_x);
    let eps_mu = root * root;
    let params = ParabolicParams::new(eps_mu / mu, mu)?;
    let lambda = params.lambda();
    let regime = Regime::from_lambda(lambda);
    let t_z = match regime {
        Regime::Adiabatic => b_x / (2.0 * bdot),
        Regime::Sudden => (HBAR / (g * BOHR_MAGNETON_J_PER_G * bdot)).sqrt(),
    };
    Ok(MappedParams {
        epsilon: params.epsilon,
        mu,
        eps_mu,
        t_c: 4.0 * b_z0 / bdot,
        t_z,
        r: crossing::lz_amplitude(lambda)?,
        phi: crossing::lz_phase(lambda)?,
        sigma: crossing::dynamical_phase_sigma(&params)?,
        lambda,
        regime,
        time_unit: f.time_unit(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IcaCheck {
    pub passes: bool,
    /// `t_c / t_z`.
    pub ratio: f64,
    pub margin: f64,
}

/// Whether the crossings are well separated, `t_c / t_z ≥ margin`.
pub fn validate_ica(m: &MappedParams, margin: f64) -> Result<IcaCheck> {
    if !(margin > 1.0 && margin.is_finite()) {
        return Err(Error::InvalidParameter(format!("ICA margin must exceed 1, got {margin}")));
    }
    let ratio = m.t_c / m.t_z;
    Ok(IcaCheck {
        passes: ratio >= margin,
        ratio,
        margin,
    })
}

pub fn validate_ica_default(m: &MappedParams) -> Result<IcaCheck> {
    validate_ica(m, ICA_WARN_MARGIN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference() -> LabFields {
        LabFields::new(0.060, 0.300, 5e4, 0.5).unwrap()
    }

    #[test]
    fn reference_fields() {
        let m = map_fields(&reference()).unwrap();
        assert!((m.mu - 5.0).abs() < 1e-12);
        assert!((m.eps_mu - 10.0).abs() < 0.5);
        assert!((m.epsilon - 2.0).abs() < 0.1);
        assert!((m.t_c - 24e-6).abs() < 1e-15);
        assert!((m.t_z - 2e-6).abs() < 0.3e-6);
        assert!((m.r - 0.78).abs() < 0.0078);
        assert_eq!(m.regime, Regime::Sudden);
        // 4ħḂ/(μ_B B_x²) = 1/Λ
        assert!((1.0 / m.lambda - 6.32).abs() < 0.01);
    }

    #[test]
    fn independent_arithmetic() {
        // g_F = 1/2 forms: εμ = (2ħḂ/(μ_B B_x²))², t_z = √(2ħ/(μ_B Ḃ))
        let m = map_fields(&reference()).unwrap();
        let mub = 9.2740100783e-28_f64;
        let hbar = 1.054571817e-34_f64;
        let eps_mu = (2.0 * hbar * 5e4 / (mub * 0.0036)).powi(2);
        assert!((m.eps_mu - eps_mu).abs() < 1e-12 * eps_mu);
        let t_z = (2.0 * hbar / (mub * 5e4)).sqrt();
        assert!((m.t_z - t_z).abs() < 1e-12 * t_z);
    }

    #[test]
    fn round_trip_through_scaled_times() {
        let f = reference();
        let m = map_fields(&f).unwrap();
        let d = crossing::crossing_diagnostics(&m.parabolic().unwrap());
        let t_c = d.tau_c * f.time_unit();
        assert!((t_c - m.t_c).abs() < 1e-10 * m.t_c);
        let t_z = d.tau_z * f.time_unit() / zener_time_lab_factor(d.regime);
        assert!((t_z - m.t_z).abs() < 1e-10 * m.t_z);
    }

    #[test]
    fn adiabatic_branch() {
        // strong coupling, slow ramp
        let f = LabFields::new(1.0, 5.0, 1e3, 0.5).unwrap();
        let m = map_fields(&f).unwrap();
        assert_eq!(m.regime, Regime::Adiabatic);
        assert!((m.t_z - 1.0 / 2e3).abs() < 1e-15);
        let d = crossing::crossing_diagnostics(&m.parabolic().unwrap());
        let t_z = d.tau_z * f.time_unit() / zener_time_lab_factor(d.regime);
        assert!((t_z - m.t_z).abs() < 1e-10 * m.t_z);
    }

    #[test]
    fn ica_validation() {
        let m = map_fields(&reference()).unwrap();
        let check = validate_ica_default(&m).unwrap();
        assert!(check.passes);
        assert!((check.ratio - 11.26).abs() < 0.05, "{}", check.ratio);
        assert!(validate_ica(&m, 1.0).is_err());

        // weak bias: the crossings merge into a single Zener window
        let slow = map_fields(&LabFields::new(0.060, 0.005, 5e4, 0.5).unwrap()).unwrap();
        assert!(!validate_ica_default(&slow).unwrap().passes);
    }

    #[test]
    fn sign_of_g_factor_is_irrelevant() {
        let a = map_fields(&reference()).unwrap();
        let b = map_fields(&LabFields::new(0.060, 0.300, 5e4, -0.5).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(LabFields::new(0.0, 0.3, 5e4, 0.5).is_err());
        assert!(LabFields::new(0.06, f64::NAN, 5e4, 0.5).is_err());
        assert!(LabFields::from_toml("B_x_gauss = 0.06\n").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let text = "B_x_gauss = 0.060\nB_z0_gauss = 0.300\nBdot_gauss_per_s = 5e4\ng_F = 0.5\n";
        assert_eq!(LabFields::from_toml(text).unwrap(), reference());
    }

    proptest! {
        #[test]
        fn scaling_laws(bx in 0.01f64..1.0, bz in 0.01f64..5.0, bdot in 1e3f64..1e6) {
            let base = map_fields(&LabFields::new(bx, bz, bdot, 0.5).unwrap()).unwrap();
            let doubled = map_fields(&LabFields::new(2.0 * bx, 2.0 * bz, bdot, 0.5).unwrap()).unwrap();
            prop_assert!((doubled.mu - base.mu).abs() < 1e-12 * base.mu);
            prop_assert!((doubled.eps_mu * 16.0 - base.eps_mu).abs() < 1e-10 * base.eps_mu);
        }

        #[test]
        fn crossing_time_round_trip(bx in 0.01f64..1.0, bz in 0.01f64..5.0, bdot in 1e3f64..1e6, g in 0.1f64..2.0) {
            let f = LabFields::new(bx, bz, bdot, g).unwrap();
            let m = map_fields(&f).unwrap();
            let d = crossing::crossing_diagnostics(&m.parabolic().unwrap());
            prop_assert!((d.tau_c * f.time_unit() - m.t_c).abs() < 1e-10 * m.t_c);
            let t_z = d.tau_z * f.time_unit() / zener_time_lab_factor(d.regime);
            prop_assert!((t_z - m.t_z).abs() < 1e-10 * m.t_z);
        }
    }
}
