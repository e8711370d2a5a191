//! Deformation parameters of the two-dimensional generalized Dunkl operator.
//!
//! Each Cartesian axis i ∈ {1, 2} carries a three-parameter deformation
//! (αᵢ, βᵢ, γᵢ) of the derivative,
//!
//! ```text
//! D_i = d/dx_i + alpha_i/x_i + (beta_i/x_i) R_i + gamma_i (d/dx_i) R_i,
//! ```
//!
//! with R_i the reflection of the i-th coordinate and −1 < γᵢ < 1. After the
//! plane is separated in the stretched polar coordinates
//! x = √(1−γ₁²) ρ cosφ, y = √(1−γ₂²) ρ sinφ, the Laplacian built from D₁, D₂
//! depends on the Wigner parameters only through six combinations per axis:
//!
//! ```text
//! xi_i = (alpha_i − beta_i·gamma_i) / (1 − gamma_i²)
//! mu_i = (alpha_i² − beta_i² − alpha_i + beta_i·gamma_i) / (1 − gamma_i²)
//! nu_i = −(beta_i − alpha_i·gamma_i) / (1 − gamma_i²)
//! ```
//!
//! computed here, together with the parity sector (joint eigenvalues of
//! R₁, R₂) on which the reflections act as scalars.

use crate::error::ParamError;
use serde::{Deserialize, Serialize};

/// Rejection margin for the Wigner parameters γ: values with
/// |γ| ≥ 1 − `GAMMA_MARGIN` are refused so 1/(1−γ²) stays finite.
pub const GAMMA_MARGIN: f64 = 1e-12;

/// Raw Wigner deformation parameters (α, β, γ) for both axes.
///
/// Axis 1 is the cos side of the polar angle, axis 2 the sin side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerParams {
    pub alpha1: f64,
    pub beta1: f64,
    pub gamma1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub gamma2: f64,
}

impl WignerParams {
    /// The undeformed operator: all Wigner parameters zero.
    pub fn standard() -> Self {
        WignerParams {
            alpha1: 0.0,
            beta1: 0.0,
            gamma1: 0.0,
            alpha2: 0.0,
            beta2: 0.0,
            gamma2: 0.0,
        }
    }

    /// Same (α, β, γ) on both axes.
    pub fn symmetric(alpha: f64, beta: f64, gamma: f64) -> Self {
        WignerParams {
            alpha1: alpha,
            beta1: beta,
            gamma1: gamma,
            alpha2: alpha,
            beta2: beta,
            gamma2: gamma,
        }
    }

    /// (α, β, γ) of one axis; `axis` is 1 or 2.
    pub fn axis(&self, axis: u8) -> (f64, f64, f64) {
        match axis {
            1 => (self.alpha1, self.beta1, self.gamma1),
            2 => (self.alpha2, self.beta2, self.gamma2),
            _ => panic!("axis must be 1 or 2, got {axis}"),
        }
    }
}

/// A joint reflection-parity sector: the scalar eigenvalues (r₁, r₂) ∈ {±1}²
/// that R₁, R₂ take on wavefunctions of definite parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSector", into = "RawSector")]
pub struct ParitySector {
    r1: i8,
    r2: i8,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawSector {
    r1: i8,
    r2: i8,
}

impl TryFrom<RawSector> for ParitySector {
    type Error = ParamError;
    fn try_from(raw: RawSector) -> Result<Self, ParamError> {
        ParitySector::new(raw.r1, raw.r2)
    }
}

impl From<ParitySector> for RawSector {
    fn from(s: ParitySector) -> RawSector {
        RawSector { r1: s.r1, r2: s.r2 }
    }
}

impl ParitySector {
    /// (+1, +1)
    pub const PP: ParitySector = ParitySector { r1: 1, r2: 1 };
    /// (+1, −1)
    pub const PM: ParitySector = ParitySector { r1: 1, r2: -1 };
    /// (−1, +1)
    pub const MP: ParitySector = ParitySector { r1: -1, r2: 1 };
    /// (−1, −1)
    pub const MM: ParitySector = ParitySector { r1: -1, r2: -1 };

    /// All four sectors in the fixed enumeration order
    /// (+1,+1), (+1,−1), (−1,+1), (−1,−1).
    pub const ALL: [ParitySector; 4] = [Self::PP, Self::PM, Self::MP, Self::MM];

    /// Checked constructor; each value must be +1 or −1.
    pub fn new(r1: i8, r2: i8) -> Result<Self, ParamError> {
        if r1 != 1 && r1 != -1 {
            return Err(ParamError::InvalidReflection { axis: 1, value: r1 });
        }
        if r2 != 1 && r2 != -1 {
            return Err(ParamError::InvalidReflection { axis: 2, value: r2 });
        }
        Ok(ParitySector { r1, r2 })
    }

    /// r₁ as a float (±1.0).
    pub fn r1(&self) -> f64 {
        f64::from(self.r1)
    }

    /// r₂ as a float (±1.0).
    pub fn r2(&self) -> f64 {
        f64::from(self.r2)
    }

    /// r₁ as the stored integer (±1).
    pub fn r1_int(&self) -> i8 {
        self.r1
    }

    /// r₂ as the stored integer (±1).
    pub fn r2_int(&self) -> i8 {
        self.r2
    }

    /// Reflection eigenvalue of one axis; `axis` is 1 or 2.
    pub fn r(&self, axis: u8) -> f64 {
        match axis {
            1 => self.r1(),
            2 => self.r2(),
            _ => panic!("axis must be 1 or 2, got {axis}"),
        }
    }
}

impl std::fmt::Display for ParitySector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:+},{:+})", self.r1, self.r2)
    }
}

/// The derived per-axis combinations (ξᵢ, μᵢ, νᵢ) the separated operator
/// actually depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub xi1: f64,
    pub mu1: f64,
    pub nu1: f64,
    pub xi2: f64,
    pub mu2: f64,
    pub nu2: f64,
}

impl DerivedParams {
    /// All six combinations zero (the undeformed operator).
    pub fn zero() -> Self {
        DerivedParams {
            xi1: 0.0,
            mu1: 0.0,
            nu1: 0.0,
            xi2: 0.0,
            mu2: 0.0,
            nu2: 0.0,
        }
    }

    /// ξ₁ + ξ₂, the combination the radial equations depend on.
    pub fn xi_sum(&self) -> f64 {
        self.xi1 + self.xi2
    }

    /// (ξ, μ, ν) of one axis; `axis` is 1 or 2.
    pub fn axis(&self, axis: u8) -> (f64, f64, f64) {
        match axis {
            1 => (self.xi1, self.mu1, self.nu1),
            2 => (self.xi2, self.mu2, self.nu2),
            _ => panic!("axis must be 1 or 2, got {axis}"),
        }
    }
}

fn check_gamma(axis: u8, gamma: f64) -> Result<(), ParamError> {
    if !gamma.is_finite() || gamma.abs() >= 1.0 - GAMMA_MARGIN {
        return Err(ParamError::GammaOutOfRange {
            axis,
            value: gamma,
            margin: GAMMA_MARGIN,
        });
    }
    Ok(())
}

fn derive_axis(alpha: f64, beta: f64, gamma: f64) -> (f64, f64, f64) {
    let den = 1.0 - gamma * gamma;
    let xi = (alpha - beta * gamma) / den;
    let mu = (alpha * alpha - beta * beta - alpha + beta * gamma) / den;
    let nu = -(beta - alpha * gamma) / den;
    (xi, mu, nu)
}

/// Computes the derived combinations (ξᵢ, μᵢ, νᵢ) from raw Wigner parameters.
///
/// Rejects γᵢ outside the open interval (−1, 1) (with the [`GAMMA_MARGIN`]
/// buffer); all other parameter values are accepted.
pub fn derive_params(w: &WignerParams) -> Result<DerivedParams, ParamError> {
    check_gamma(1, w.gamma1)?;
    check_gamma(2, w.gamma2)?;
    let (xi1, mu1, nu1) = derive_axis(w.alpha1, w.beta1, w.gamma1);
    let (xi2, mu2, nu2) = derive_axis(w.alpha2, w.beta2, w.gamma2);
    Ok(DerivedParams {
        xi1,
        mu1,
        nu1,
        xi2,
        mu2,
        nu2,
    })
}

/// Radicand of the modified angular quantum number
/// kᵢ² = (1 − 2ξᵢ)² − 4μᵢ − 4νᵢrᵢ for one axis.
pub(crate) fn k_radicand(xi: f64, mu: f64, nu: f64, r: f64) -> f64 {
    let t = 1.0 - 2.0 * xi;
    t * t - 4.0 * mu - 4.0 * nu * r
}

/// Non-throwing health report for a parameter set: γ-range admissibility,
/// reality of the angular quantum numbers in the requested sector, and the
/// sign of m′² for the requested azimuthal level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// Whether γ₁ / γ₂ lie inside the accepted open interval.
    pub gamma1_ok: bool,
    pub gamma2_ok: bool,
    /// Derived combinations, present when both γ are admissible.
    pub derived: Option<DerivedParams>,
    /// Radicands of k₁², k₂² in the requested sector (present with `derived`).
    pub k1_radicand: Option<f64>,
    pub k2_radicand: Option<f64>,
    /// Whether each kᵢ is real (radicand ≥ 0).
    pub k1_real: Option<bool>,
    pub k2_real: Option<bool>,
    /// Closed-form m′² for the requested n_φ, present when both k are real.
    pub m_prime_sq: Option<f64>,
    /// Whether m′² ≥ 0 (the supported centrifugal regime).
    pub m_prime_sq_nonnegative: Option<bool>,
}

impl ValidationReport {
    /// True when every check passed: γ in range, both k real, m′² ≥ 0.
    pub fn all_ok(&self) -> bool {
        self.gamma1_ok
            && self.gamma2_ok
            && self.k1_real == Some(true)
            && self.k2_real == Some(true)
            && self.m_prime_sq_nonnegative == Some(true)
    }
}

/// Validates a parameter set for a given sector and azimuthal level without
/// throwing; every failure mode is reported as data.
pub fn validate(w: &WignerParams, sector: ParitySector, n_phi: u32) -> ValidationReport {
    let gamma1_ok = check_gamma(1, w.gamma1).is_ok();
    let gamma2_ok = check_gamma(2, w.gamma2).is_ok();
    let mut report = ValidationReport {
        gamma1_ok,
        gamma2_ok,
        derived: None,
        k1_radicand: None,
        k2_radicand: None,
        k1_real: None,
        k2_real: None,
        m_prime_sq: None,
        m_prime_sq_nonnegative: None,
    };
    if !(gamma1_ok && gamma2_ok) {
        return report;
    }
    let d = derive_params(w).expect("gamma range already checked");
    let rad1 = k_radicand(d.xi1, d.mu1, d.nu1, sector.r1());
    let rad2 = k_radicand(d.xi2, d.mu2, d.nu2, sector.r2());
    report.derived = Some(d);
    report.k1_radicand = Some(rad1);
    report.k2_radicand = Some(rad2);
    report.k1_real = Some(rad1 >= 0.0);
    report.k2_real = Some(rad2 >= 0.0);
    if rad1 >= 0.0 && rad2 >= 0.0 {
        let m2 =
            crate::azimuthal::m_prime_squared_given_k(rad1.sqrt(), rad2.sqrt(), &d, sector, n_phi);
        report.m_prime_sq = Some(m2);
        report.m_prime_sq_nonnegative = Some(m2 >= 0.0);
    }
    report
}
