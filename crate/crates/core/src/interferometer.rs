//! Three-arm spin-1 interferometer: two crossings with phase evolution in
//! between.
//!
//! The total propagator is
//! `U = lift(U_LZᵀ) · diag(e^{−iσm}) · diag(e^{iθ₁}, 1, e^{−iθ₋₁}) · lift(U_LZ)`
//! and the `|1⟩ → |−1⟩` population has the closed form
//! `16R⁴(1−R²)² (sin⁴χ + cos2χ sin²Ψ)` with `χ = σ/2 + φ − (θ₁+θ₋₁)/4` and
//! `Ψ = (θ₁−θ₋₁)/4`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crossing::{self, lz_propagator_from_parts, ParabolicParams};
use crate::lift::{lift, lift_diagonal_phase};
use crate::linalg::{compose_all, Matrix};
use crate::optimize::golden_section_min;
use crate::spinor_gp::GpPhases;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    #[serde(rename = "R")]
    pub r: f64,
    pub phi: f64,
    pub sigma: f64,
    pub theta1: f64,
    pub theta_m1: f64,
}

impl InterferometerConfig {
    pub fn new(r: f64, phi: f64, sigma: f64, theta1: f64, theta_m1: f64) -> Result<Self> {
        let c = Self {
            r,
            phi,
            sigma,
            theta1,
            theta_m1,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.r, self.phi, self.sigma, self.theta1, self.theta_m1]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::NonFinite("interferometer configuration"));
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::InvalidParameter(format!("R must lie in (0, 1), got {}", self.r)));
        }
        Ok(())
    }

    /// Configuration for a parabolic sweep with GP phases between crossings.
    pub fn from_parabolic(params: &ParabolicParams, phases: GpPhases) -> Result<Self> {
        let lambda = params.lambda();
        Self::new(
            crossing::lz_amplitude(lambda)?,
            crossing::lz_phase(lambda)?,
            crossing::dynamical_phase_sigma(params)?,
            phases.theta1,
            phases.theta_m1,
        )
    }

    pub fn gp_phases(&self) -> GpPhases {
        GpPhases {
            theta1: self.theta1,
            theta_m1: self.theta_m1,
        }
    }

    /// Copy with `σ` chosen so that `χ` takes the given value.
    pub fn with_chi(&self, chi: f64) -> Self {
        Self {
            sigma: 2.0 * (chi - self.phi + 0.25 * (self.theta1 + self.theta_m1)),
            ..*self
        }
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self { sigma, ..*self }
    }
}

/// `(χ, Ψ)`.
pub fn chi_psi(c: &InterferometerConfig) -> (f64, f64) {
    (
        0.5 * c.sigma + c.phi - 0.25 * (c.theta1 + c.theta_m1),
        0.25 * (c.theta1 - c.theta_m1),
    )
}

/// Full 3×3 propagator, basis ordered `(m = +1, 0, −1)`.
pub fn total_propagator(c: &InterferometerConfig) -> Result<Matrix> {
    c.validate()?;
    let lz = lz_propagator_from_parts(c.r, c.phi);
    compose_all(&[
        lift(&lz.transpose(), 3)?,
        lift_diagonal_phase(c.sigma, 3)?,
        c.gp_phases().matrix(),
        lift(&lz, 3)?,
    ])
}

/// `16R⁴(1−R²)²`, the fringe amplitude.
pub fn visibility_prefactor(r: f64) -> f64 {
    16.0 * r.powi(4) * (1.0 - r * r).powi(2)
}

/// Closed-form `|1⟩ → |−1⟩` population.
pub fn population_1_to_m1(c: &InterferometerConfig) -> Result<f64> {
    c.validate()?;
    let (chi, psi) = chi_psi(c);
    Ok(visibility_prefactor(c.r) * (chi.sin().powi(4) + (2.0 * chi).cos() * psi.sin().powi(2)))
}

/// The same population read off the composed propagator.
pub fn population_1_to_m1_composed(c: &InterferometerConfig) -> Result<f64> {
    Ok(total_propagator(c)?[(2, 0)].norm_sqr())
}

/// Locates the `R` maximising the fringe amplitude.
pub fn optimal_splitting_amplitude() -> Result<f64> {
    let (r, _) = golden_section_min(|r| Ok(-visibility_prefactor(r)), 0.0, 1.0, 1e-12)?;
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    Sigma,
    Chi,
}

impl Sweep {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sweep::Sigma => "sigma",
            Sweep::Chi => "chi",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FringeScan {
    pub swept_parameter: Sweep,
    pub grid: Vec<f64>,
    pub chi: Vec<f64>,
    pub psi: f64,
    pub populations: Vec<f64>,
    pub visibility: f64,
    /// Grid indices of interior local minima.
    pub minima: Vec<usize>,
    /// Grid indices of interior local maxima.
    pub maxima: Vec<usize>,
}

impl FringeScan {
    pub fn min(&self) -> f64 {
        self.populations.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.populations.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn visibility(populations: &[f64]) -> f64 {
    let max = populations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = populations.iter().copied().fold(f64::INFINITY, f64::min);
    if max + min > 0.0 {
        (max - min) / (max + min)
    } else {
        0.0
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::BadGrid);
    }
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::BadGrid);
    }
    Ok(())
}

/// `n` evenly spaced points from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !from.is_finite() || !to.is_finite() || (n > 1 && from == to) {
        return Err(Error::BadGrid);
    }
    if n == 1 {
        return Ok(vec![from]);
    }
    Ok((0..n).map(|k| from + (to - from) * k as f64 / (n - 1) as f64).collect())
}

/// Evaluates the closed-form population along `grid`, sweeping `σ` or `χ`.
pub fn fringe_scan(c: &InterferometerConfig, sweep: Sweep, grid: &[f64]) -> Result<FringeScan> {
    c.validate()?;
    check_grid(grid)?;
    let configs: Vec<InterferometerConfig> = grid
        .iter()
        .map(|&v| match sweep {
            Sweep::Sigma => c.with_sigma(v),
            Sweep::Chi => c.with_chi(v),
        })
        .collect();
    let populations: Vec<f64> = configs
        .par_iter()
        .map(population_1_to_m1)
        .collect::<Result<_>>()?;
    let chi = configs.iter().map(|k| chi_psi(k).0).collect();
    let interior = 1..grid.len().saturating_sub(1);
    let minima = interior
        .clone()
        .filter(|&i| populations[i] < populations[i - 1] && populations[i] <= populations[i + 1])
        .collect();
    let maxima = interior
        .filter(|&i| populations[i] > populations[i - 1] && populations[i] >= populations[i + 1])
        .collect();
    Ok(FringeScan {
        swept_parameter: sweep,
        grid: grid.to_vec(),
        chi,
        psi: chi_psi(c).1,
        visibility: visibility(&populations),
        populations,
        minima,
        maxima,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SharpnessComparison {
    /// FWHM of the spin-1 fringe in `χ`.
    pub fwhm_spin1: f64,
    /// FWHM of a two-arm `sin²χ` fringe on the same grid.
    pub fwhm_two_arm: f64,
    pub ratio: f64,
}

/// Width at half maximum of the peak of `values` containing its maximum,
/// with linear interpolation of the crossings.
pub fn full_width_half_max(grid: &[f64], values: &[f64]) -> Result<f64> {
    if grid.len() != values.len() || grid.len() < 3 {
        return Err(Error::BadGrid);
    }
    let (peak, &max) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::BadGrid)?;
    let half = 0.5 * max;
    let cross = |i: usize, j: usize| grid[i] + (half - values[i]) * (grid[j] - grid[i]) / (values[j] - values[i]);
    let left = (1..=peak)
        .rev()
        .find(|&i| values[i - 1] < half)
        .map(|i| cross(i - 1, i))
        .ok_or(Error::BadGrid)?;
    let right = (peak..values.len() - 1)
        .find(|&i| values[i + 1] < half)
        .map(|i| cross(i, i + 1))
        .ok_or(Error::BadGrid)?;
    Ok(right - left)
}

/// Compares the width of the spin-1 fringe over one period in `χ` with a
/// two-arm `sin²χ` fringe. Requires `Ψ = 0`.
pub fn sharper_fringes_check(c: &InterferometerConfig) -> Result<SharpnessComparison> {
    let (_, psi) = chi_psi(c);
    if psi.abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("sharpness check needs Psi = 0, got {psi}")));
    }
    let grid = linspace(0.0, std::f64::consts::PI, 20_001)?;
    let scan = fringe_scan(c, Sweep::Chi, &grid)?;
    let two_arm: Vec<f64> = grid.iter().map(|x| x.sin().powi(2)).collect();
    let fwhm_spin1 = full_width_half_max(&grid, &scan.populations)?;
    let fwhm_two_arm = full_width_half_max(&grid, &two_arm)?;
    Ok(SharpnessComparison {
        fwhm_spin1,
        fwhm_two_arm,
        ratio: fwhm_spin1 / fwhm_two_arm,
    })
}
