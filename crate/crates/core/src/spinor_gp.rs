//! Spin-1 condensate dynamics between crossings in the uniform single-mode
//! approximation.
//!
//! With kinetic and trap energy dropped, the order parameter reduces to three
//! amplitudes `ζ = (ζ₁, ζ₀, ζ₋₁)` at a fixed density `n`:
//!
//! ```text
//! iħ ζ̇₁  = λs n ζ₁  + λa n (ζ₀² ζ₋₁* + (|ζ₁|² + |ζ₀|² − |ζ₋₁|²) ζ₁)
//! iħ ζ̇₀  = λs n ζ₀  + λa n (2 ζ₁ ζ₋₁ ζ₀* + (|ζ₁|² + |ζ₋₁|²) ζ₀)
//! iħ ζ̇₋₁ = λs n ζ₋₁ + λa n (ζ₀² ζ₁* + (|ζ₋₁|² + |ζ₀|² − |ζ₁|²) ζ₋₁)
//! ```
//!
//! Over the short time between crossings populations barely move and the
//! evolution collapses to the phase propagator `diag(e^{iθ₁}, 1, e^{−iθ₋₁})`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{BOHR_RADIUS, HBAR, PER_CM3_TO_PER_M3};
use crate::linalg::Matrix;
use crate::ode::{dopri5, OdeOptions};
use crate::{Error, Result};

/// Bundled species table.
pub const DEFAULT_SPECIES_TOML: &str = include_str!("../data/species.toml");

/// Largest population change for which the phase propagator is accepted.
pub const MAX_POPULATION_CHANGE: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeciesParams {
    /// Scattering length in the total-spin-0 channel, Bohr radii.
    pub a0: f64,
    /// Scattering length in the total-spin-2 channel, Bohr radii.
    pub a2: f64,
    #[serde(rename = "mass_kg")]
    pub mass: f64,
    #[serde(rename = "g_F")]
    pub g_f: f64,
    /// Peak density, cm⁻³.
    #[serde(rename = "n_max_cm3")]
    pub n_max: f64,
    #[serde(default)]
    pub citation: String,
}

impl SpeciesParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.a0, self.a2, self.mass, self.g_f, self.n_max].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite("species parameters"));
        }
        if self.mass <= 0.0 || self.n_max <= 0.0 {
            return Err(Error::InvalidParameter("species mass and n_max must be positive".into()));
        }
        Ok(())
    }

    pub fn with_n_max(mut self, n_max: f64) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn rb87() -> Self {
        default_species("rb87").expect("bundled species table")
    }

    pub fn na23() -> Self {
        default_species("na23").expect("bundled species table")
    }
}

/// Parses a species table: one TOML table per species.
pub fn parse_species_table(text: &str) -> Result<BTreeMap<String, SpeciesParams>> {
    let table: BTreeMap<String, SpeciesParams> =
        toml::from_str(text).map_err(|e| Error::Config(format!("species file: {e}")))?;
    for (name, species) in &table {
        species
            .validate()
            .map_err(|e| Error::Config(format!("species {name}: {e}")))?;
    }
    Ok(table)
}

pub fn default_species(name: &str) -> Result<SpeciesParams> {
    parse_species_table(DEFAULT_SPECIES_TOML)?
        .remove(&name.to_ascii_lowercase())
        .ok_or_else(|| Error::InvalidParameter(format!("unknown species {name}")))
}

/// `(λs, λa)` in J·m³.
pub fn coupling_constants(s: &SpeciesParams) -> Result<(f64, f64)> {
    s.validate()?;
    let prefactor = 4.0 * PI * HBAR * HBAR * BOHR_RADIUS / (3.0 * s.mass);
    Ok((prefactor * (s.a0 + 2.0 * s.a2), prefactor * (s.a2 - s.a0)))
}

/// Spin-mixing rate bound `γ = 4|λa| n_max / ħ` in s⁻¹.
pub fn spin_mixing_rate_bound(s: &SpeciesParams) -> Result<f64> {
    let (_, lambda_a) = coupling_constants(s)?;
    Ok(4.0 * lambda_a.abs() * s.n_max * PER_CM3_TO_PER_M3 / HBAR)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmaState {
    /// Amplitudes ordered `(m = +1, 0, −1)`.
    pub zeta: [Complex64; 3],
    /// Density, cm⁻³.
    pub density: f64,
    /// Time, s.
    pub time: f64,
}

impl SmaState {
    pub fn new(zeta: [Complex64; 3], density: f64) -> Result<Self> {
        if !(density > 0.0 && density.is_finite()) {
            return Err(Error::InvalidParameter("density must be positive".into()));
        }
        let state = Self {
            zeta,
            density,
            time: 0.0,
        };
        if (state.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "SMA state must be normalised (norm {})",
                state.norm()
            )));
        }
        Ok(state)
    }

    /// State with the given populations and phases.
    pub fn from_populations(populations: [f64; 3], phases: [f64; 3], density: f64) -> Result<Self> {
        if populations.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidParameter("populations must be non-negative".into()));
        }
        let zeta = std::array::from_fn(|i| Complex64::from_polar(populations[i].sqrt(), phases[i]));
        Self::new(zeta, density)
    }

    pub fn populations(&self) -> [f64; 3] {
        self.zeta.map(|z| z.norm_sqr())
    }

    pub fn norm(&self) -> f64 {
        self.populations().iter().sum()
    }

    /// `|ζ₁|² − |ζ₋₁|²`.
    pub fn magnetization(&self) -> f64 {
        let p = self.populations();
        p[0] - p[2]
    }
}

fn rhs(zeta: &[Complex64; 3], lambda_s_n: f64, lambda_a_n: f64) -> [Complex64; 3] {
    let [z1, z0, zm] = *zeta;
    let (n1, n0, nm) = (z1.norm_sqr(), z0.norm_sqr(), zm.norm_sqr());
    let e1 = lambda_s_n * z1 + lambda_a_n * (z0 * z0 * zm.conj() + (n1 + n0 - nm) * z1);
    let e0 = lambda_s_n * z0 + lambda_a_n * (2.0 * z1 * zm * z0.conj() + (n1 + nm) * z0);
    let em = lambda_s_n * zm + lambda_a_n * (z0 * z0 * z1.conj() + (nm + n0 - n1) * zm);
    let minus_i_over_hbar = Complex64::new(0.0, -1.0 / HBAR);
    [e1 * minus_i_over_hbar, e0 * minus_i_over_hbar, em * minus_i_over_hbar]
}

fn energies_times_density(state: &SmaState, s: &SpeciesParams) -> Result<(f64, f64)> {
    let (ls, la) = coupling_constants(s)?;
    let n = state.density * PER_CM3_TO_PER_M3;
    Ok((ls * n, la * n))
}

/// Time derivative `dζ/dt` in s⁻¹.
pub fn sma_rhs(state: &SmaState, s: &SpeciesParams) -> Result<[Complex64; 3]> {
    let (ls, la) = energies_times_density(state, s)?;
    Ok(rhs(&state.zeta, ls, la))
}

/// Population rates `dNₘ/dt = 2 Re(ζₘ* ζ̇ₘ)` evaluated from the equations of
/// motion.
pub fn population_rates(state: &SmaState, s: &SpeciesParams) -> Result<[f64; 3]> {
    let d = sma_rhs(state, s)?;
    Ok(std::array::from_fn(|i| 2.0 * (state.zeta[i].conj() * d[i]).re))
}

#[derive(Clone, Debug, Serialize)]
pub struct SmaTrajectory {
    pub states: Vec<SmaState>,
    pub gamma: f64,
    pub max_norm_drift: f64,
    pub max_magnetization_drift: f64,
    /// Largest `|dN₀/dt| − γ(n)N₀` over accepted steps, with `γ(n)` the
    /// bound at the trajectory density (non-positive when the bound holds).
    pub max_rate_bound_excess: f64,
}

impl SmaTrajectory {
    pub fn initial(&self) -> &SmaState {
        &self.states[0]
    }

    pub fn last(&self) -> &SmaState {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// Largest population change of any component relative to the start.
    pub fn max_population_change(&self) -> f64 {
        let p0 = self.initial().populations();
        self.states
            .iter()
            .flat_map(|s| s.populations().into_iter().zip(p0).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max)
    }
}

/// Integrates the single-mode equations for `duration` seconds.
///
/// The density term is a common phase and is applied analytically; only the
/// spin-dependent part is integrated numerically.
pub fn integrate_sma(initial: &SmaState, s: &SpeciesParams, duration: f64, rel_tol: f64) -> Result<SmaTrajectory> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParameter("duration must be positive".into()));
    }
    if (initial.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter("initial SMA state must be normalised".into()));
    }
    let (ls, la) = energies_times_density(initial, s)?;
    let gamma = spin_mixing_rate_bound(s)?;
    // the bound at the actual density, never looser than γ when n ≤ n_max
    let local_gamma = 4.0 * la.abs() / HBAR;
    let opts = OdeOptions {
        rel_tol,
        abs_tol: rel_tol * 1e-3,
        // keep per-step phase increments well inside (−π, π] for unwrapping
        max_step: Some(1.0 / ((ls.abs() + 2.0 * la.abs()) / HBAR).max(1.0 / duration)),
        ..OdeOptions::default()
    };

    let norm0 = initial.norm();
    let mag0 = initial.magnetization();
    let mut states = Vec::new();
    let (mut norm_drift, mut mag_drift, mut excess) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    let t0 = initial.time;
    dopri5(
        |_, xi| rhs(xi, 0.0, la),
        t0,
        initial.zeta,
        t0 + duration,
        &opts,
        |t, xi| {
            let common = Complex64::from_polar(1.0, -ls * (t - t0) / HBAR);
            let z = &xi.map(|x| x * common);
            let state = SmaState {
                zeta: *z,
                density: initial.density,
                time: t,
            };
            norm_drift = norm_drift.max((state.norm() - norm0).abs());
            mag_drift = mag_drift.max((state.magnetization() - mag0).abs());
            let d = rhs(z, ls, la);
            let dn0 = 2.0 * (z[1].conj() * d[1]).re;
            excess = excess.max(dn0.abs() - local_gamma * state.populations()[1]);
            states.push(state);
        },
    )?;
    Ok(SmaTrajectory {
        states,
        gamma,
        max_norm_drift: norm_drift,
        max_magnetization_drift: mag_drift,
        max_rate_bound_excess: excess,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GpPhases {
    pub theta1: f64,
    pub theta_m1: f64,
}

#[derive(Clone, Debug)]
pub struct GpPropagator {
    pub phases: GpPhases,
    /// `diag(e^{iθ₁}, 1, e^{−iθ₋₁})`.
    pub matrix: Matrix,
}

impl GpPhases {
    pub fn matrix(&self) -> Matrix {
        Matrix::from_diagonal(&[
            Complex64::from_polar(1.0, self.theta1),
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, -self.theta_m1),
        ])
    }
}

fn unwrapped_phase_change(states: &[SmaState], component: usize) -> f64 {
    let mut total = 0.0;
    for pair in states.windows(2) {
        let step = (pair[1].zeta[component] * pair[0].zeta[component].conj()).arg();
        total += step;
    }
    total
}

/// Phases relative to `m = 0`, unwrapped along the trajectory.
pub fn extract_gp_propagator(trajectory: &SmaTrajectory) -> Result<GpPropagator> {
    let change = trajectory.max_population_change();
    if change > MAX_POPULATION_CHANGE {
        return Err(Error::PopulationChange { change });
    }
    let tiny = 1e-150;
    for state in &trajectory.states {
        for (i, z) in state.zeta.iter().enumerate() {
            if z.norm() < tiny {
                return Err(Error::UndefinedPhase { component: 1 - i as i32 });
            }
        }
    }
    let d1 = unwrapped_phase_change(&trajectory.states, 0);
    let d0 = unwrapped_phase_change(&trajectory.states, 1);
    let dm = unwrapped_phase_change(&trajectory.states, 2);
    let phases = GpPhases {
        theta1: d1 - d0,
        theta_m1: -(dm - d0),
    };
    Ok(GpPropagator {
        matrix: phases.matrix(),
        phases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rb87_gamma_near_ninety() {
        let rb = SpeciesParams::rb87();
        let (ls, la) = coupling_constants(&rb).unwrap();
        assert!(la < 0.0 && ls > 0.0);
        assert!(la.abs() > 1e-54 && la.abs() < 1e-52);
        let gamma = spin_mixing_rate_bound(&rb).unwrap();
        // 4·4πħ(a2−a0)a_B n/(3m), evaluated independently
        let oracle = 16.0 * PI * 1.054571817e-34 * 1.4 * 5.29177210903e-11 * 1e20 / (3.0 * 1.443160648e-25);
        assert!((gamma - oracle).abs() < 1e-9 * oracle);
        assert!((gamma - 90.73).abs() < 0.05, "{gamma}");
        assert!(gamma * 100e-6 < 0.01);
    }

    #[test]
    fn sodium_is_antiferromagnetic() {
        let (_, la) = coupling_constants(&SpeciesParams::na23()).unwrap();
        assert!(la > 0.0);
    }

    #[test]
    fn equal_scattering_lengths_disable_mixing() {
        let mut s = SpeciesParams::rb87();
        s.a2 = s.a0;
        assert_eq!(coupling_constants(&s).unwrap().1, 0.0);
        assert_eq!(spin_mixing_rate_bound(&s).unwrap(), 0.0);
    }

    #[test]
    fn species_table_validation() {
        assert!(parse_species_table("[x]\na0=1\na2=2\nmass_kg=-1\ng_F=0.5\nn_max_cm3=1e14\n").is_err());
        assert!(parse_species_table("[x]\na0=1\n").is_err());
        let t = parse_species_table(DEFAULT_SPECIES_TOML).unwrap();
        assert!(t["rb87"].citation.contains("van Kempen"));
        assert!(default_species("Cs133").is_err());
    }

    #[test]
    fn single_component_only_rotates() {
        let rb = SpeciesParams::rb87();
        let s = SmaState::new([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 1e14).unwrap();
        let d = sma_rhs(&s, &rb).unwrap();
        assert_eq!(d[1], c(0.0, 0.0));
        assert_eq!(d[2], c(0.0, 0.0));
        assert!(d[0].re.abs() < 1e-12 * d[0].im.abs());
    }

    #[test]
    fn pure_zero_state_has_no_population_rates() {
        let rb = SpeciesParams::rb87();
        let s = SmaState::new([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], 1e14).unwrap();
        for r in population_rates(&s, &rb).unwrap() {
            assert_eq!(r, 0.0);
        }
    }

    #[test]
    fn rate_identity_generic_state() {
        let rb = SpeciesParams::rb87();
        let s = SmaState::from_populations([0.2, 0.5, 0.3], [0.3, -1.1, 2.0], 1e14).unwrap();
        let r = population_rates(&s, &rb).unwrap();
        assert!(r[1].abs() > 1.0);
        assert!((r[0] - r[2]).abs() < 1e-12 * r[1].abs());
        assert!((r[0] + 0.5 * r[1]).abs() < 1e-12 * r[1].abs());
    }

    #[test]
    fn equal_populations_barely_move_over_crossing_time() {
        let rb = SpeciesParams::rb87();
        let s = SmaState::from_populations([1.0 / 3.0; 3], [0.0, 0.4, 0.0], 1e14).unwrap();
        let traj = integrate_sma(&s, &rb, 24e-6, 1e-12).unwrap();
        assert!(traj.max_population_change() < 0.003);
        assert!(traj.max_norm_drift < 1e-9);
        assert!(traj.max_magnetization_drift < 1e-9);
        assert!(traj.max_rate_bound_excess <= 0.0);
    }

    #[test]
    fn no_interactions_gives_identity() {
        let mut s = SpeciesParams::rb87();
        s.a0 = 0.0;
        s.a2 = 0.0;
        let state = SmaState::from_populations([0.5, 0.3, 0.2], [0.1, 0.2, 0.3], 1e14).unwrap();
        let traj = integrate_sma(&state, &s, 1e-4, 1e-12).unwrap();
        let gp = extract_gp_propagator(&traj).unwrap();
        assert!(gp.phases.theta1.abs() < 1e-14 && gp.phases.theta_m1.abs() < 1e-14);
        assert!(gp.matrix.max_abs_diff(&Matrix::identity(3)) < 1e-14);
    }

    #[test]
    fn density_term_is_a_common_phase() {
        let mut s = SpeciesParams::rb87();
        s.a2 = s.a0;
        let state = SmaState::from_populations([0.5, 0.3, 0.2], [0.1, 0.2, 0.3], 1e14).unwrap();
        let traj = integrate_sma(&state, &s, 1e-3, 1e-12).unwrap();
        assert!(traj.max_population_change() < 1e-15);
        let gp = extract_gp_propagator(&traj).unwrap();
        assert!(gp.phases.theta1.abs() < 1e-8 && gp.phases.theta_m1.abs() < 1e-8, "{:?}", gp.phases);
        // the common phase itself advances linearly: −λs n t/ħ
        let (ls, _) = coupling_constants(&s).unwrap();
        let expected = -ls * 1e20 * 1e-3 / HBAR;
        let got = unwrapped_phase_change(&traj.states, 1);
        assert!((got - expected).abs() < 1e-8 * expected.abs());
    }

    #[test]
    fn phases_converge_under_tolerance_refinement() {
        let rb = SpeciesParams::rb87();
        let state = SmaState::from_populations([0.5, 0.3, 0.2], [0.0, 0.7, -0.4], 1e14).unwrap();
        let coarse = extract_gp_propagator(&integrate_sma(&state, &rb, 100e-6, 1e-9).unwrap()).unwrap();
        let fine = extract_gp_propagator(&integrate_sma(&state, &rb, 100e-6, 1e-12).unwrap()).unwrap();
        assert!(coarse.phases.theta1.abs().max(coarse.phases.theta_m1.abs()) > 1e-3);
        assert!((coarse.phases.theta1 - fine.phases.theta1).abs() < 1e-8);
        assert!((coarse.phases.theta_m1 - fine.phases.theta_m1).abs() < 1e-8);
    }

    #[test]
    fn global_phase_does_not_change_gp_phases() {
        let rb = SpeciesParams::rb87();
        let a = SmaState::from_populations([0.5, 0.3, 0.2], [0.0, 0.7, -0.4], 1e14).unwrap();
        let b = SmaState::from_populations([0.5, 0.3, 0.2], [2.0, 2.7, 1.6], 1e14).unwrap();
        let pa = extract_gp_propagator(&integrate_sma(&a, &rb, 100e-6, 1e-12).unwrap()).unwrap();
        let pb = extract_gp_propagator(&integrate_sma(&b, &rb, 100e-6, 1e-12).unwrap()).unwrap();
        assert!((pa.phases.theta1 - pb.phases.theta1).abs() < 1e-9);
        assert!((pa.phases.theta_m1 - pb.phases.theta_m1).abs() < 1e-9);
    }

    #[test]
    fn phase_matrix_reproduces_relative_evolution() {
        let rb = SpeciesParams::rb87();
        let state = SmaState::from_populations([0.5, 0.3, 0.2], [0.0, 0.7, -0.4], 1e14).unwrap();
        let traj = integrate_sma(&state, &rb, 100e-6, 1e-12).unwrap();
        let gp = extract_gp_propagator(&traj).unwrap();
        let (z_start, z_end) = (traj.initial().zeta, traj.last().zeta);
        let ref_phase = (z_end[1] / z_start[1]).arg();
        for k in [0, 2] {
            let rel = (z_end[k] / z_start[k]).arg() - ref_phase;
            let diag = gp.matrix[(k, k)].arg();
            let d = (rel - diag + PI).rem_euclid(2.0 * PI) - PI;
            assert!(d.abs() < 1e-9, "{k}: {rel} vs {diag}");
        }
    }

    #[test]
    fn phase_extraction_preconditions() {
        let rb = SpeciesParams::rb87().with_n_max(1e16);
        let state = SmaState::from_populations([0.25, 0.5, 0.25], [0.0, 1.2, 0.0], 1e16).unwrap();
        let traj = integrate_sma(&state, &rb, 2e-3, 1e-10).unwrap();
        assert!(matches!(extract_gp_propagator(&traj), Err(Error::PopulationChange { .. })));

        let lone = SmaState::new([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 1e14).unwrap();
        let traj = integrate_sma(&lone, &SpeciesParams::rb87(), 1e-5, 1e-10).unwrap();
        assert!(matches!(
            extract_gp_propagator(&traj),
            Err(Error::UndefinedPhase { component: 0 })
        ));
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(SmaState::new([c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], 1e14).is_err());
        assert!(SmaState::new([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 0.0).is_err());
        let s = SmaState::new([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 1e14).unwrap();
        assert!(integrate_sma(&s, &SpeciesParams::rb87(), 0.0, 1e-10).is_err());
    }
}
