//! Analytic crossing propagators.
//!
//! A single linear (Landau–Zener) crossing is described, in the adiabatic
//! basis and interaction picture, by the amplitude `R = exp(−πΛ/2)` and the
//! Stokes-type phase `φ(Λ)`. The parabolic model with `b > 0` crosses twice;
//! under the independent crossing approximation (ICA) its propagator is
//! `U_LZᵀ · U_ph(σ) · U_LZ`, the transpose accounting for the sign change of
//! one adiabatic state after the first crossing.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::lift::TwoLevelPropagator;
use crate::quadrature::{self, QuadOptions};
use crate::special::ln_gamma;
use crate::{Error, Result};

/// ICA margin `τ_c / τ_Z` below which a warning is emitted.
pub const ICA_WARN_MARGIN: f64 = 5.0;

/// Relative accuracy of the dynamical phase quadrature.
pub const SIGMA_REL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Adiabatic,
    Sudden,
}

impl Regime {
    /// Crossover convention: adiabatic for `Λ > 1`.
    pub fn from_lambda(lambda: f64) -> Self {
        if lambda > 1.0 {
            Regime::Adiabatic
        } else {
            Regime::Sudden
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Adiabatic => "adiabatic",
            Regime::Sudden => "sudden",
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() {
        return Err(Error::NonFinite("Landau-Zener parameter"));
    }
    if lambda < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Landau-Zener parameter must be non-negative, got {lambda}"
        )));
    }
    Ok(())
}

/// Linear crossing `H = [[λt, V₀], [V₀, −λt]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LzParams {
    /// Diabatic slope λ (energy/time).
    pub slope: f64,
    /// Coupling V₀ (energy).
    pub coupling: f64,
    pub hbar: f64,
}

impl LzParams {
    /// Parameters in units where ħ = 1.
    pub fn new(slope: f64, coupling: f64) -> Result<Self> {
        Self::with_hbar(slope, coupling, 1.0)
    }

    pub fn with_hbar(slope: f64, coupling: f64, hbar: f64) -> Result<Self> {
        if !(slope > 0.0 && coupling > 0.0 && hbar > 0.0) || !(slope.is_finite() && coupling.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "slope, coupling and hbar must be positive and finite (got {slope}, {coupling}, {hbar})"
            )));
        }
        Ok(Self { slope, coupling, hbar })
    }

    /// `Λ = V₀² / (ħλ)`.
    pub fn lambda(&self) -> f64 {
        self.coupling * self.coupling / (self.hbar * self.slope)
    }
}

/// `R = exp(−πΛ/2)`, the amplitude for staying diabatic.
pub fn lz_amplitude(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok((-PI * lambda / 2.0).exp())
}

/// `φ = π/4 + (Λ/2)·ln(Λ/2e) + arg Γ(1 − iΛ/2)`, falling from π/4 at Λ=0 to 0.
pub fn lz_phase(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let y = lambda / 2.0;
    if y == 0.0 {
        return Ok(FRAC_PI_4);
    }
    if y >= 20.0 {
        // asymptotic expansion; the exact form cancels two O(y ln y) terms
        let inv = 1.0 / y;
        let inv2 = inv * inv;
        let coeffs = [1.0 / 12.0, 1.0 / 360.0, 1.0 / 1260.0, 1.0 / 1680.0, 1.0 / 1188.0];
        let mut power = inv;
        let mut phi = 0.0;
        for c in coeffs {
            phi += c * power;
            power *= inv2;
        }
        return Ok(phi);
    }
    let arg_gamma = ln_gamma(Complex64::new(1.0, -y)).im;
    Ok(FRAC_PI_4 + y * (y.ln() - 1.0) + arg_gamma)
}

/// Single-crossing propagator `[[√(1−R²)e^{−iφ}, −R], [R, √(1−R²)e^{iφ}]]`.
pub fn lz_propagator(lambda: f64) -> Result<TwoLevelPropagator> {
    let r = lz_amplitude(lambda)?;
    let phi = lz_phase(lambda)?;
    Ok(lz_propagator_from_parts(r, phi))
}

pub(crate) fn lz_propagator_from_parts(r: f64, phi: f64) -> TwoLevelPropagator {
    TwoLevelPropagator {
        alpha: Complex64::from_polar((1.0 - r * r).max(0.0).sqrt(), -phi),
        beta: Complex64::new(-r, 0.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZenerTime {
    pub time: f64,
    pub regime: Regime,
}

/// Zener time: `V₀/λ` in the adiabatic regime, `√(ħ/λ)` in the sudden one.
pub fn zener_time_lz(params: &LzParams) -> ZenerTime {
    let regime = Regime::from_lambda(params.lambda());
    let time = match regime {
        Regime::Adiabatic => params.coupling / params.slope,
        Regime::Sudden => (params.hbar / params.slope).sqrt(),
    };
    ZenerTime { time, regime }
}

/// Scaled parabolic model `[[ετ²−μ, 1], [1, −ετ²+μ]]`, double-crossing regime.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParabolicParams {
    pub epsilon: f64,
    pub mu: f64,
}

impl ParabolicParams {
    pub fn new(epsilon: f64, mu: f64) -> Result<Self> {
        if !(epsilon.is_finite() && mu.is_finite()) {
            return Err(Error::NonFinite("parabolic parameters"));
        }
        if epsilon <= 0.0 {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        if mu <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mu must be positive (double crossing), got {mu}"
            )));
        }
        Ok(Self { epsilon, mu })
    }

    /// From `H = [[at²−b, v], [v, −at²+b]]`: `ε = ħ²a/v³`, `μ = b/v`.
    pub fn from_raw(a: f64, b: f64, v: f64, hbar: f64) -> Result<Self> {
        if !(a > 0.0 && v > 0.0 && hbar > 0.0) {
            return Err(Error::InvalidParameter("a, v and hbar must be positive".into()));
        }
        Self::new(hbar * hbar * a / (v * v * v), b / v)
    }

    /// Effective Landau–Zener parameter of each crossing, `1/(2√(εμ))`.
    pub fn lambda(&self) -> f64 {
        1.0 / (2.0 * (self.epsilon * self.mu).sqrt())
    }

    /// Scaled crossing times `±√(μ/ε)`.
    pub fn crossing_time(&self) -> f64 {
        (self.mu / self.epsilon).sqrt()
    }

    /// Scaled separation of the crossings, `τ_c = 2√(μ/ε)`.
    pub fn crossing_separation(&self) -> f64 {
        2.0 * self.crossing_time()
    }

    /// Diabatic energy `ετ² − μ`.
    pub fn detuning(&self, tau: f64) -> f64 {
        self.epsilon * tau * tau - self.mu
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossingDiagnostics {
    pub tau_c: f64,
    pub tau_z: f64,
    pub lambda_eff: f64,
    /// `τ_c / τ_Z`; the ICA needs this to be large.
    pub ica_margin: f64,
    pub regime: Regime,
}

impl CrossingDiagnostics {
    pub fn ica_ok(&self, margin: f64) -> bool {
        self.ica_margin >= margin
    }
}

/// Linearises each crossing (slope `2√(εμ)`, unit coupling) to get the
/// Zener time and compares it with the crossing separation.
pub fn crossing_diagnostics(p: &ParabolicParams) -> CrossingDiagnostics {
    let slope = 2.0 * (p.epsilon * p.mu).sqrt();
    let lambda_eff = 1.0 / slope;
    let regime = Regime::from_lambda(lambda_eff);
    let tau_z = match regime {
        Regime::Adiabatic => 1.0 / slope,
        Regime::Sudden => (1.0 / slope).sqrt(),
    };
    let tau_c = p.crossing_separation();
    CrossingDiagnostics {
        tau_c,
        tau_z,
        lambda_eff,
        ica_margin: tau_c / tau_z,
        regime,
    }
}

/// Adiabatic phase difference accumulated between the crossings,
/// `σ = 4∫₀^{√(μ/ε)} √((ετ²−μ)²+1) dτ`.
pub fn dynamical_phase_sigma(p: &ParabolicParams) -> Result<f64> {
    let opts = QuadOptions {
        rel_tol: SIGMA_REL_TOL,
        ..QuadOptions::default()
    };
    let r = quadrature::integrate(
        |tau| {
            let d = p.detuning(tau);
            (d * d + 1.0).sqrt()
        },
        0.0,
        p.crossing_time(),
        opts,
    )?;
    Ok(4.0 * r.value)
}

/// Large-μ (diabatic) limit `8μ^{3/2}/(3√ε)`.
pub fn sigma_diabatic(p: &ParabolicParams) -> f64 {
    8.0 * p.mu.powf(1.5) / (3.0 * p.epsilon.sqrt())
}

/// `U_LZᵀ · diag(e^{−iσ/2}, e^{iσ/2}) · U_LZ`, assembled as a matrix product.
pub fn compose_double_crossing(r: f64, phi: f64, sigma: f64) -> TwoLevelPropagator {
    let lz = lz_propagator_from_parts(r, phi);
    let phase = TwoLevelPropagator {
        alpha: Complex64::from_polar(1.0, -sigma / 2.0),
        beta: Complex64::new(0.0, 0.0),
    };
    lz.transpose().compose(&phase).compose(&lz)
}

/// Closed form of the double-crossing pair:
/// `α = e^{iσ/2}[R² + e^{−i(σ+2φ)}(1−R²)]`, `β = 2iR√(1−R²) sin(φ+σ/2)`.
pub fn double_crossing_closed_form(r: f64, phi: f64, sigma: f64) -> TwoLevelPropagator {
    let alpha = Complex64::from_polar(1.0, sigma / 2.0)
        * (Complex64::new(r * r, 0.0) + Complex64::from_polar(1.0 - r * r, -(sigma + 2.0 * phi)));
    let beta = Complex64::new(0.0, 2.0 * r * (1.0 - r * r).sqrt() * (phi + sigma / 2.0).sin());
    TwoLevelPropagator { alpha, beta }
}

/// ICA propagator of the parabolic double crossing.
pub fn composite_alpha_beta(p: &ParabolicParams) -> Result<TwoLevelPropagator> {
    let diag = crossing_diagnostics(p);
    if !diag.ica_ok(ICA_WARN_MARGIN) {
        log::warn!(
            "ICA margin {:.3} below {ICA_WARN_MARGIN} for eps={}, mu={}",
            diag.ica_margin,
            p.epsilon,
            p.mu
        );
    }
    let lambda = p.lambda();
    let r = lz_amplitude(lambda)?;
    let phi = lz_phase(lambda)?;
    let sigma = dynamical_phase_sigma(p)?;
    Ok(compose_double_crossing(r, phi, sigma))
}

/// `4R²(1−R²) sin²(σ/2+φ)`.
pub fn transition_prob_closed_form(r: f64, phi: f64, sigma: f64) -> f64 {
    4.0 * r * r * (1.0 - r * r) * (sigma / 2.0 + phi).sin().powi(2)
}

/// Two-level transition probability `|β|²` after both crossings.
pub fn transition_prob_2level(p: &ParabolicParams) -> Result<f64> {
    Ok(composite_alpha_beta(p)?.transition_probability())
}

/// Three-level `1 → 3` probability, `|β|⁴`.
pub fn transition_prob_1_to_3(p: &ParabolicParams) -> Result<f64> {
    Ok(transition_prob_2level(p)?.powi(2))
}
