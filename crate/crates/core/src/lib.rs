//! Multilevel level-crossing interferometry in spinor condensates.
//!
//! A spinor condensate driven through two avoided crossings by a
//! quadratically ramped bias field behaves like a multi-arm Mach-Zehnder
//! interferometer: each crossing acts as a beam splitter, and the phases
//! accumulated between them show up in the final Zeeman populations.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices, spin operators, exponentials.
//! * [`lift`]: maps an SU(2) propagator `(α, β)` onto `2F+1` levels.
//! * [`crossing`]: Landau-Zener and parabolic double-crossing propagators.
//! * [`oracle`]: brute-force Schrödinger integration used as ground truth.
//! * [`spinor_gp`]: spin-1 single-mode phase dynamics between crossings.
//! * [`interferometer`]: the composed three-arm signal and fringe scans.
//! * [`field_mapping`]: laboratory fields to dimensionless parameters.
//! * [`run`]: command-line front end and reproduction report.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod constants;
pub mod crossing;
pub mod field_mapping;
pub mod interferometer;
pub mod lift;
pub mod linalg;
pub mod ode;
pub mod optimize;
pub mod oracle;
pub mod quadrature;
pub mod report;
pub mod run;
pub mod special;
pub mod spinor_gp;

pub use crossing::{LzParams, ParabolicParams, Regime};
pub use interferometer::InterferometerConfig;
pub use lift::{lift, lift_diagonal_phase, TwoLevelPropagator};
pub use linalg::{Matrix, StateVector};
pub use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("level count must be at least 2, got {0}")]
    InvalidLevelCount(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("propagator is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("step size underflow at tau = {tau}")]
    StepSizeUnderflow { tau: f64 },
    #[error("integration exceeded {steps} steps")]
    TooManySteps { steps: usize },
    #[error("quadrature did not converge (estimated error {error:.3e})")]
    QuadratureNotConverged { error: f64 },
    #[error("population changed by {change:.3e}; pure-phase propagator model is invalid")]
    PopulationChange { change: f64 },
    #[error("phase of component m={component} is undefined (zero amplitude)")]
    UndefinedPhase { component: i32 },
    #[error("grid must be non-empty and monotone")]
    BadGrid,
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the failure is numerical rather than a bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepSizeUnderflow { .. }
                | Error::TooManySteps { .. }
                | Error::QuadratureNotConverged { .. }
                | Error::PopulationChange { .. }
                | Error::NotUnitary { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
