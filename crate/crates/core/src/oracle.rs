//! Brute-force time-dependent Schrödinger integration for crossing models.
//!
//! The Hamiltonian is always of linear-Zeeman form `2·V·Sx + 2·d(τ)·Sz` with
//! `d(τ) = λτ` (Landau–Zener) or `ετ² − μ` (scaled parabolic model), so the
//! `n`-level runs are independent of the Majorana lift they are used to check.
//!
//! Integration uses a fourth-order Magnus step, `ψ ← exp(Ω)ψ` with an
//! anti-Hermitian `Ω`, so every accepted step is unitary to rounding. The
//! local error is estimated by step doubling.
//!
//! States are prepared and read out at the edges of a finite window, either
//! in the diabatic basis or in the instantaneous eigenbasis. Far from the crossings the two coincide, so populations
//! (not interaction-picture phases) are comparable with the analytic
//! propagators. The adiabatic readout removes the switch-on transient and
//! converges much faster with the window width.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::crossing::{self, LzParams, ParabolicParams};
use crate::lift::{lift, TwoLevelPropagator};
use crate::optimize::golden_section_min;
use crate::linalg::{expm, hermitian_eigen, make_spin_operators, Matrix, SpinOperators, StateVector};
use crate::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Default half-width of the window in units of the crossing separation.
pub const DEFAULT_WINDOW_MULTIPLES: f64 = 8.0;
pub const DEFAULT_MAX_STEPS: usize = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    LandauZener { slope: f64, coupling: f64, hbar: f64 },
    Parabolic { epsilon: f64, mu: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HamiltonianSpec {
    pub model: Model,
    pub levels: usize,
}

impl HamiltonianSpec {
    pub fn parabolic(params: ParabolicParams, levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidLevelCount(levels));
        }
        Ok(Self {
            model: Model::Parabolic {
                epsilon: params.epsilon,
                mu: params.mu,
            },
            levels,
        })
    }

    pub fn landau_zener(params: LzParams, levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidLevelCount(levels));
        }
        Ok(Self {
            model: Model::LandauZener {
                slope: params.slope,
                coupling: params.coupling,
                hbar: params.hbar,
            },
            levels,
        })
    }

    pub fn parabolic_params(&self) -> Option<ParabolicParams> {
        match self.model {
            Model::Parabolic { epsilon, mu } => Some(ParabolicParams { epsilon, mu }),
            Model::LandauZener { .. } => None,
        }
    }

    /// Times at which the diabatic levels cross.
    pub fn crossing_times(&self) -> Vec<f64> {
        match self.model {
            Model::LandauZener { .. } => vec![0.0],
            Model::Parabolic { epsilon, mu } => {
                let t = (mu / epsilon).sqrt();
                vec![-t, t]
            }
        }
    }

    /// `(coupling, detuning)` at `tau`, already divided by ħ.
    fn coefficients(&self, tau: f64) -> (f64, f64) {
        match self.model {
            Model::LandauZener { slope, coupling, hbar } => (coupling / hbar, slope * tau / hbar),
            Model::Parabolic { epsilon, mu } => (1.0, epsilon * tau * tau - mu),
        }
    }
}

/// Precomputed spin operators for repeated Hamiltonian evaluation.
struct Generator {
    spec: HamiltonianSpec,
    ops: SpinOperators,
}

impl Generator {
    fn new(spec: HamiltonianSpec) -> Result<Self> {
        Ok(Self {
            ops: make_spin_operators(spec.levels)?,
            spec,
        })
    }

    fn hamiltonian(&self, tau: f64) -> Matrix {
        let (coupling, detuning) = self.spec.coefficients(tau);
        self.ops
            .sx
            .scale(Complex64::new(2.0 * coupling, 0.0))
            .add(&self.ops.sz.scale(Complex64::new(2.0 * detuning, 0.0)))
    }

    /// Fourth-order Magnus propagator over `[tau, tau + h]`.
    fn magnus_step(&self, tau: f64, h: f64) -> Matrix {
        const OFFSET: f64 = 0.288_675_134_594_812_9; // √3/6
        let h1 = self.hamiltonian(tau + (0.5 - OFFSET) * h);
        let h2 = self.hamiltonian(tau + (0.5 + OFFSET) * h);
        // Ω = −i h/2 (H1+H2) − (√3/12) h² [H2, H1]
        let commutator = (&h2 * &h1).sub(&(&h1 * &h2));
        let omega = h1
            .add(&h2)
            .scale(Complex64::new(0.0, -0.5 * h))
            .sub(&commutator.scale(Complex64::new(3f64.sqrt() / 12.0 * h * h, 0.0)));
        expm(&omega)
    }
}

/// Build the Hamiltonian matrix (ħ = 1 scaled units for the parabolic model).
pub fn build_hamiltonian(spec: &HamiltonianSpec, tau: f64) -> Result<Matrix> {
    Ok(Generator::new(*spec)?.hamiltonian(tau))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegrationWindow {
    pub tau_start: f64,
    pub tau_end: f64,
}

impl IntegrationWindow {
    pub fn new(tau_start: f64, tau_end: f64) -> Result<Self> {
        if !(tau_start.is_finite() && tau_end.is_finite()) || tau_end <= tau_start {
            return Err(Error::InvalidParameter(format!(
                "integration window must satisfy start < end (got {tau_start}, {tau_end})"
            )));
        }
        Ok(Self { tau_start, tau_end })
    }

    pub fn symmetric(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width)
    }

    /// `±multiples·τ_c` around the midpoint of a parabolic double crossing.
    pub fn around_crossings(params: &ParabolicParams, multiples: f64) -> Result<Self> {
        Self::symmetric(multiples * params.crossing_separation())
    }

    pub fn contains(&self, tau: f64) -> bool {
        tau > self.tau_start && tau < self.tau_end
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointBasis {
    Diabatic,
    /// Instantaneous eigenstates at the window edges, labelled by the
    /// diabatic state each one approaches.
    #[default]
    Adiabatic,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    pub rel_tol: f64,
    pub max_steps: usize,
    /// Accept initial states that are not a single basis vector.
    pub allow_superposition: bool,
    pub basis: EndpointBasis,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            max_steps: DEFAULT_MAX_STEPS,
            allow_superposition: false,
            basis: EndpointBasis::default(),
        }
    }
}

impl OracleOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Propagation {
    pub propagator: Matrix,
    pub step_count: usize,
    pub rejected_steps: usize,
    pub window_contains_crossings: bool,
}

/// Instantaneous eigenvectors of `H(tau)` as columns, each placed in the
/// column of the diabatic state it overlaps most and phased so that this
/// component is real and positive. Fails if two eigenvectors claim the same
/// diabatic state, which happens only close to a crossing.
pub fn adiabatic_frame(spec: &HamiltonianSpec, tau: f64) -> Result<Matrix> {
    let h = build_hamiltonian(spec, tau)?;
    let (_, vectors) = hermitian_eigen(&h);
    let n = vectors.dim();
    let mut frame = Matrix::zeros(n);
    let mut taken = vec![false; n];
    for k in 0..n {
        let pivot = (0..n)
            .max_by(|&i, &j| vectors[(i, k)].norm().total_cmp(&vectors[(j, k)].norm()))
            .unwrap_or(0);
        if std::mem::replace(&mut taken[pivot], true) {
            return Err(Error::InvalidParameter(format!(
                "adiabatic states at tau = {tau} are not resolved; widen the window"
            )));
        }
        let phase = vectors[(pivot, k)].conj() / vectors[(pivot, k)].norm();
        for row in 0..n {
            frame[(row, pivot)] = vectors[(row, k)] * phase;
        }
    }
    Ok(frame)
}

/// Integrates the full propagator `U(τ_end, τ_start)`, expressed in the
/// endpoint basis selected by `opts`.
pub fn propagate(spec: &HamiltonianSpec, window: &IntegrationWindow, opts: &OracleOptions) -> Result<Propagation> {
    if !(1e-12..=1e-6).contains(&opts.rel_tol) {
        return Err(Error::InvalidParameter(format!(
            "rel_tol must lie in [1e-12, 1e-6], got {}",
            opts.rel_tol
        )));
    }
    let generator = Generator::new(*spec)?;
    let contains = spec.crossing_times().iter().all(|&t| window.contains(t));
    if !contains {
        log::warn!(
            "window [{}, {}] does not contain every crossing of {:?}",
            window.tau_start,
            window.tau_end,
            spec.model
        );
    }

    let mut u = Matrix::identity(spec.levels);
    let mut tau = window.tau_start;
    let span = window.tau_end - window.tau_start;
    let mut h = (span * 1e-4).min(0.01);
    let (mut steps, mut rejected) = (0usize, 0usize);

    while tau < window.tau_end {
        if steps + rejected >= opts.max_steps {
            return Err(Error::TooManySteps { steps: opts.max_steps });
        }
        let last = tau + h >= window.tau_end;
        if last {
            h = window.tau_end - tau;
        }
        let full = generator.magnus_step(tau, h);
        let first_half = generator.magnus_step(tau, 0.5 * h);
        let second_half = generator.magnus_step(tau + 0.5 * h, 0.5 * h);
        let halves = &second_half * &first_half;
        let err = halves.max_abs_diff(&full) / 15.0;

        if err <= opts.rel_tol || h <= f64::EPSILON * tau.abs().max(1.0) * 16.0 {
            if err > opts.rel_tol {
                return Err(Error::StepSizeUnderflow { tau });
            }
            u = &halves * &u;
            tau = if last { window.tau_end } else { tau + h };
            steps += 1;
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 {
            2.0
        } else {
            (0.9 * (opts.rel_tol / err).powf(0.2)).clamp(0.2, 2.0)
        };
        h *= factor;
    }

    if opts.basis == EndpointBasis::Adiabatic {
        let start = adiabatic_frame(spec, window.tau_start)?;
        let end = adiabatic_frame(spec, window.tau_end)?;
        u = &(&end.adjoint() * &u) * &start;
    }

    Ok(Propagation {
        propagator: u,
        step_count: steps,
        rejected_steps: rejected,
        window_contains_crossings: contains,
    })
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub final_state: StateVector,
    pub populations: Vec<f64>,
    pub norm_drift: f64,
    pub step_count: usize,
    pub window_contains_crossings: bool,
}

fn is_basis_vector(state: &StateVector) -> bool {
    let pops = state.populations();
    pops.iter().filter(|&&p| p > 1e-14).count() == 1
}

/// Integrates the Schrödinger equation from `initial` over `window`.
pub fn integrate(
    spec: &HamiltonianSpec,
    window: &IntegrationWindow,
    initial: &StateVector,
    rel_tol: f64,
) -> Result<OracleResult> {
    integrate_with(spec, window, initial, &OracleOptions::with_rel_tol(rel_tol))
}

pub fn integrate_with(
    spec: &HamiltonianSpec,
    window: &IntegrationWindow,
    initial: &StateVector,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    if initial.dim() != spec.levels {
        return Err(Error::DimensionMismatch {
            left: spec.levels,
            right: initial.dim(),
        });
    }
    if (initial.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter("initial state must be normalised".into()));
    }
    if !opts.allow_superposition && !is_basis_vector(initial) {
        return Err(Error::InvalidParameter(
            "superposition initial states diverge in phase; set allow_superposition to acknowledge".into(),
        ));
    }
    let prop = propagate(spec, window, opts)?;
    let final_state = prop.propagator.apply(initial);
    let norm_drift = (final_state.norm() - 1.0).abs();
    Ok(OracleResult {
        populations: final_state.populations(),
        final_state,
        norm_drift,
        step_count: prop.step_count,
        window_contains_crossings: prop.window_contains_crossings,
    })
}

/// Analytic (ICA) probability of the `1 → n` transition, `|β|^{2(n−1)}`.
pub fn ica_end_to_end_probability(params: &ParabolicParams, levels: usize) -> Result<f64> {
    let pair = crossing::composite_alpha_beta(params)?;
    let lifted = lift(&pair, levels)?;
    Ok(lifted[(levels - 1, 0)].norm_sqr())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IcaComparison {
    pub epsilon: f64,
    pub mu: f64,
    pub levels: usize,
    pub sigma: f64,
    pub p_oracle: f64,
    pub p_ica: f64,
    pub abs_error: f64,
    pub ica_margin: f64,
    /// Set when the ICA margin is below the warning threshold.
    pub ica_flagged: bool,
    pub norm_drift: f64,
    pub step_count: usize,
}

/// Compares the oracle `1 → n` probability with the ICA closed form.
pub fn compare_with_ica(spec: &HamiltonianSpec, window: &IntegrationWindow) -> Result<IcaComparison> {
    compare_with_ica_tol(spec, window, DEFAULT_REL_TOL)
}

pub fn compare_with_ica_tol(spec: &HamiltonianSpec, window: &IntegrationWindow, rel_tol: f64) -> Result<IcaComparison> {
    let params = spec
        .parabolic_params()
        .ok_or_else(|| Error::InvalidParameter("ICA comparison needs a parabolic model".into()))?;
    let n = spec.levels;
    let result = integrate(spec, window, &StateVector::basis(n, 0)?, rel_tol)?;
    let p_oracle = result.populations[n - 1];
    let p_ica = ica_end_to_end_probability(&params, n)?;
    let diag = crossing::crossing_diagnostics(&params);
    Ok(IcaComparison {
        epsilon: params.epsilon,
        mu: params.mu,
        levels: n,
        sigma: crossing::dynamical_phase_sigma(&params)?,
        p_oracle,
        p_ica,
        abs_error: (p_oracle - p_ica).abs(),
        ica_margin: diag.ica_margin,
        ica_flagged: !diag.ica_ok(crossing::ICA_WARN_MARGIN),
        norm_drift: result.norm_drift,
        step_count: result.step_count,
    })
}

/// Two-level propagator extracted from an oracle run, as an SU(2) pair.
pub fn oracle_two_level_propagator(
    params: &ParabolicParams,
    window: &IntegrationWindow,
    rel_tol: f64,
) -> Result<TwoLevelPropagator> {
    let spec = HamiltonianSpec::parabolic(*params, 2)?;
    let prop = propagate(&spec, window, &OracleOptions::with_rel_tol(rel_tol))?;
    TwoLevelPropagator::from_matrix(&prop.propagator, 1e-7)
}

/// Settings for locating fringe minima along a family of constant `εμ`
/// (fixed `R`, `φ`) while `μ` sweeps `σ` through several fringes.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FringeScanSettings {
    /// Fixed product `εμ`.
    pub eps_mu: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub points: usize,
    pub levels: usize,
    pub window_multiples: f64,
    pub rel_tol: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FringeMinimum {
    pub mu: f64,
    pub sigma_oracle: f64,
    pub sigma_ica: f64,
    pub p_oracle: f64,
    /// `(σ_oracle − σ_ica) / 2π`: offset as a fraction of the fringe period.
    pub period_fraction: f64,
}

fn oracle_end_to_end(settings: &FringeScanSettings, mu: f64) -> Result<f64> {
    let params = ParabolicParams::new(settings.eps_mu / mu, mu)?;
    let spec = HamiltonianSpec::parabolic(params, settings.levels)?;
    let window = IntegrationWindow::around_crossings(&params, settings.window_multiples)?;
    let r = integrate(&spec, &window, &StateVector::basis(settings.levels, 0)?, settings.rel_tol)?;
    Ok(r.populations[settings.levels - 1])
}

/// Locates oracle fringe minima in `σ` and pairs each with the nearest ICA
/// minimum `σ = 2kπ − 2φ`. The grid is evaluated in parallel; each bracketed
/// minimum is refined by golden-section search.
pub fn fringe_minima_scan(settings: &FringeScanSettings) -> Result<Vec<FringeMinimum>> {
    if settings.points < 3 || !(settings.mu_max > settings.mu_min && settings.mu_min > 0.0) {
        return Err(Error::BadGrid);
    }
    let grid: Vec<f64> = (0..settings.points)
        .map(|k| settings.mu_min + (settings.mu_max - settings.mu_min) * k as f64 / (settings.points - 1) as f64)
        .collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&mu| oracle_end_to_end(settings, mu))
        .collect::<Result<_>>()?;

    let lambda = 1.0 / (2.0 * settings.eps_mu.sqrt());
    let phi = crossing::lz_phase(lambda)?;
    let brackets: Vec<(f64, f64)> = (1..grid.len() - 1)
        .filter(|&i| values[i] <= values[i - 1] && values[i] <= values[i + 1])
        .map(|i| (grid[i - 1], grid[i + 1]))
        .collect();

    brackets
        .par_iter()
        .map(|&(lo, hi)| {
            let (mu, p_oracle) = golden_section_min(|mu| oracle_end_to_end(settings, mu), lo, hi, 1e-7)?;
            let params = ParabolicParams::new(settings.eps_mu / mu, mu)?;
            let sigma_oracle = crossing::dynamical_phase_sigma(&params)?;
            let period = 2.0 * std::f64::consts::PI;
            let k = ((sigma_oracle + 2.0 * phi) / period).round();
            let sigma_ica = k * period - 2.0 * phi;
            Ok(FringeMinimum {
                mu,
                sigma_oracle,
                sigma_ica,
                p_oracle,
                period_fraction: (sigma_oracle - sigma_ica) / period,
            })
        })
        .collect()
}
