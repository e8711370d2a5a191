//! Error types for the whole library.
//!
//! Each solver family has its own enum so callers can match on the failure
//! class that concerns them; [`CoreError`] unifies them for frontends that
//! only need to distinguish "bad input" from "solver failure".

use thiserror::Error;

/// Rejected deformation-parameter input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    /// A Wigner parameter γ is outside the open interval (−1, 1); values with
    /// |γ| ≥ 1 − margin are rejected to keep 1/(1−γ²) finite.
    #[error("gamma{axis} = {value} is outside (-1, 1) (rejection margin {margin:.1e}); the derived parameters would diverge")]
    GammaOutOfRange { axis: u8, value: f64, margin: f64 },
    /// A reflection eigenvalue other than +1 or −1 was supplied.
    #[error("reflection eigenvalue r{axis} must be +1 or -1, got {value}")]
    InvalidReflection { axis: u8, value: i8 },
}

/// Failure of the closed-form azimuthal solution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AzimuthalError {
    /// The radicand of k_i = √((1−2ξᵢ)² − 4μᵢ − 4νᵢrᵢ) is negative, so the
    /// modified angular quantum number is complex for this sector.
    #[error("k{axis} is complex in sector (r1={r1:+}, r2={r2:+}): radicand {radicand} < 0")]
    ComplexK {
        axis: u8,
        radicand: f64,
        r1: i8,
        r2: i8,
    },
}

/// Failure of the closed-form harmonic radial solution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarmonicError {
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("oscillator frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("oscillator deformation a = {0} must satisfy |a| < 1")]
    DeformationOutOfRange(f64),
    /// m′² < 0 makes the centrifugal index √(m′² + (ξ₁+ξ₂)²) imaginary once
    /// it crosses −(ξ₁+ξ₂)²; the library rejects the whole m′² < 0 regime.
    #[error("m'^2 = {0} < 0: imaginary centrifugal index regime is not supported")]
    NegativeMPrimeSq(f64),
    /// A trial energy below −m leaves the E + m > 0 branch of the
    /// quantization condition.
    #[error("trial energy E = {energy} is below -m = {minus_m}; outside the E + m > 0 branch")]
    EnergyBelowBranch { energy: f64, minus_m: f64 },
    /// The bracketing scan found no quantization root.
    #[error("no quantization root in ({lo}, {hi}] after scanning {panels} panels")]
    NoRootFound { lo: f64, hi: f64, panels: usize },
}

/// Failure of the quasi-exactly-solvable anharmonic construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QesError {
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
    /// B = √(−λ₅)/2 would be imaginary: λ₅ = −η(E+m)/2 ≥ 0, i.e. η(E+m) ≤ 0.
    /// Only B > 0 yields a normalizable gauge factor exp(−BZ²).
    #[error("gauge undefined: lambda5 = {l5} >= 0 (eta*(E+m) = {eta_epm} <= 0), B would not be real positive")]
    GaugeDomain { l5: f64, eta_epm: f64 },
    /// The sl(2) reconstruction disagreed with the directly transformed
    /// operator. This is an internal algebra check; seeing it means a bug,
    /// not bad data.
    #[error("sl(2) operator reconstruction mismatch: {detail}")]
    Consistency { detail: String },
    /// The energy-constraint scan found no root.
    #[error("no QES energy root in ({lo}, {hi}] after scanning {panels} panels; {hint}")]
    NoRootFound {
        lo: f64,
        hi: f64,
        panels: usize,
        hint: String,
    },
    /// One-dimensional calibration of the designated free parameter failed.
    /// `trace` holds (parameter value, truncation residual) probes.
    #[error("calibration of {parameter} failed: {reason} ({} probes recorded)", trace.len())]
    CalibrationFailed {
        parameter: String,
        reason: String,
        trace: Vec<(f64, f64)>,
    },
}

/// Failure of the grid-based reference eigensolvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid grid: {0}")]
    BadGrid(String),
    /// The two-resolution Richardson estimate exceeded the accuracy target.
    #[error("eigenvalue {index} failed convergence: relative estimate {estimate:.3e} > {threshold:.1e} (coarse {coarse}, fine {fine})")]
    Convergence {
        index: usize,
        estimate: f64,
        threshold: f64,
        coarse: f64,
        fine: f64,
    },
    /// The secant iteration on the nonlinear eigenvalue parameter E stalled.
    #[error("nonlinear eigenvalue iteration did not converge in {max_iter} iterations (last E = {last_e}, |g| = {residual:.3e})")]
    IterationCap {
        max_iter: usize,
        last_e: f64,
        residual: f64,
    },
    /// No eigenvalue of the linearized operator crosses E² − m² in the
    /// scanned energy window.
    #[error("no nonlinear eigenvalue crossing in ({lo}, {hi}) for level {level}")]
    NoCrossing { lo: f64, hi: f64, level: usize },
}

/// Any library error, for frontends that need a single error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Azimuthal(#[from] AzimuthalError),
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
    #[error(transparent)]
    Qes(#[from] QesError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl CoreError {
    /// True when the error reflects rejected user input rather than a solver
    /// breakdown. Frontends map this to their "validation error" exit path.
    pub fn is_validation(&self) -> bool {
        match self {
            CoreError::Param(_) | CoreError::Azimuthal(_) => true,
            CoreError::Harmonic(e) => !matches!(e, HarmonicError::NoRootFound { .. }),
            CoreError::Qes(QesError::Harmonic(e)) => {
                !matches!(e, HarmonicError::NoRootFound { .. })
            }
            CoreError::Qes(_) | CoreError::Oracle(_) => false,
        }
    }
}
