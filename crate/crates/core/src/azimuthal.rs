//! Angular (azimuthal) sector of the two-dimensional deformed oscillator.
//!
//! After separating variables in polar coordinates, the angular equation in a
//! fixed parity sector (r₁, r₂) carries the reflection data through the
//! derived parameters (ξᵢ, μᵢ, νᵢ). Its closed-form solution is expressed
//! through the per-axis indices
//!
//!   kᵢ = √((1 − 2ξᵢ)² − 4μᵢ − 4νᵢrᵢ)
//!
//! and the separation constant m′² given by the closed-form relation
//! implemented in [`m_prime_squared`]. In the zero-deformation limit
//! k₁ = k₂ = 1 and m′² = 4(n_φ + 1)², so m′ takes even integer values.
//!
//! The closed form is algebraically equal to
//!
//!   m′² = (1 + (k₁ + k₂)/2 + 2n_φ)² − (ξ₁ + ξ₂)²,
//!
//! the principal spectrum of a Pöschl–Teller-type angular operator; the grid
//! oracle (see `numerical_oracle`) is the arbiter of which self-adjoint
//! extension that corresponds to when kᵢ < 2, so m′² may also be sourced from
//! the oracle. The [`AzimuthalSolution::source`] field records the choice.

use serde::{Deserialize, Serialize};

use crate::error::AzimuthalError;
use crate::operator_params::{
    derive_params, k_radicand, DerivedParams, ParitySector, WignerParams,
};
use crate::special_functions::{laguerre, trapezoid};
use crate::CoreError;

/// Where an m′² value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MPrimeSource {
    ClosedForm,
    Oracle,
}

impl std::fmt::Display for MPrimeSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MPrimeSource::ClosedForm => write!(f, "closed_form"),
            MPrimeSource::Oracle => write!(f, "oracle"),
        }
    }
}

/// Solved angular sector: the indices kᵢ and the separation constant m′².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AzimuthalSolution {
    pub sector: ParitySector,
    pub n_phi: u32,
    pub k1: f64,
    pub k2: f64,
    pub m_prime_sq: f64,
    pub source: MPrimeSource,
}

/// Relative slack granted to a radicand before it is declared negative:
/// cancellation among O(scale) terms legitimately leaves O(ε·scale) noise.
const RADICAND_SLACK: f64 = 1e-12;

fn k_from_radicand(
    radicand: f64,
    scale: f64,
    axis: u8,
    s: ParitySector,
) -> Result<f64, AzimuthalError> {
    if radicand >= 0.0 {
        return Ok(radicand.sqrt());
    }
    if -radicand <= RADICAND_SLACK * scale.max(1.0) {
        return Ok(0.0);
    }
    Err(AzimuthalError::ComplexK {
        axis,
        radicand,
        r1: s.r1_int(),
        r2: s.r2_int(),
    })
}

/// The per-axis indices kᵢ = √((1−2ξᵢ)² − 4μᵢ − 4νᵢrᵢ), nonnegative branch.
///
/// A radicand that is negative by no more than a rounding-level fraction of
/// its constituent terms is clamped to zero; a genuinely negative radicand is
/// a domain error carrying the offending axis and value.
pub fn compute_k(d: &DerivedParams, s: ParitySector) -> Result<(f64, f64), AzimuthalError> {
    let rad1 = k_radicand(d.xi1, d.mu1, d.nu1, s.r1());
    let rad2 = k_radicand(d.xi2, d.mu2, d.nu2, s.r2());
    let scale1 = (1.0 - 2.0 * d.xi1).powi(2) + 4.0 * d.mu1.abs() + 4.0 * d.nu1.abs();
    let scale2 = (1.0 - 2.0 * d.xi2).powi(2) + 4.0 * d.mu2.abs() + 4.0 * d.nu2.abs();
    let k1 = k_from_radicand(rad1, scale1, 1, s)?;
    let k2 = k_from_radicand(rad2, scale2, 2, s)?;
    Ok((k1, k2))
}

/// The closed-form m′² with the kᵢ supplied by the caller.
///
/// Split out from [`m_prime_squared`] so diagnostics can evaluate the formula
/// on raw radicand square roots without re-deriving parameters.
pub fn m_prime_squared_given_k(
    k1: f64,
    k2: f64,
    d: &DerivedParams,
    s: ParitySector,
    n_phi: u32,
) -> f64 {
    let n = f64::from(n_phi);
    2.0 * n * (2.0 * n + 2.0 + k1 + k2) + 1.5 - (d.mu1 + d.mu2) + (k1 + k2 + 0.5 * k1 * k2)
        - (d.xi1 + d.xi2 + 2.0 * d.xi1 * d.xi2)
        - (d.nu1 * s.r1() + d.nu2 * s.r2())
}

/// The closed-form angular separation constant m′² for quantum number n_φ.
pub fn m_prime_squared(
    d: &DerivedParams,
    s: ParitySector,
    n_phi: u32,
) -> Result<f64, AzimuthalError> {
    let (k1, k2) = compute_k(d, s)?;
    Ok(m_prime_squared_given_k(k1, k2, d, s, n_phi))
}

/// Derives parameters from `w` and solves the angular sector in closed form.
pub fn solve(
    w: &WignerParams,
    s: ParitySector,
    n_phi: u32,
) -> Result<AzimuthalSolution, CoreError> {
    let d = derive_params(w)?;
    let (k1, k2) = compute_k(&d, s)?;
    Ok(AzimuthalSolution {
        sector: s,
        n_phi,
        k1,
        k2,
        m_prime_sq: m_prime_squared_given_k(k1, k2, &d, s, n_phi),
        source: MPrimeSource::ClosedForm,
    })
}

/// The closed-form angular eigenfunction, unnormalized:
///
///   Φ(φ) = exp(−cos²φ·(2 − 2ξ₁ − 2ξ₂ + k₁ + k₂)/4)
///          · (cos φ)^{(1 − 2ξ₁ + k₁)/2}
///          · L_{n_φ}^{k₁/2}((4 + k₁ + k₂)/2 · cos²φ).
///
/// Implemented exactly in this form; the grid oracle decides how faithful it
/// is to the angular operator away from the zero-deformation limit, and that
/// comparison is reported rather than assumed.
pub fn azimuthal_wavefunction(
    d: &DerivedParams,
    s: ParitySector,
    n_phi: u32,
    phi: f64,
) -> Result<f64, AzimuthalError> {
    let (k1, k2) = compute_k(d, s)?;
    let c = phi.cos();
    let c2 = c * c;
    let expo = (-c2 * (2.0 - 2.0 * d.xi1 - 2.0 * d.xi2 + k1 + k2) / 4.0).exp();
    let power = c.powf((1.0 - 2.0 * d.xi1 + k1) / 2.0);
    let lag = laguerre(n_phi, k1 / 2.0, (4.0 + k1 + k2) / 2.0 * c2);
    Ok(expo * power * lag)
}

/// Default node count for the angular normalization quadrature.
pub const NORMALIZATION_POINTS: usize = 10_000;

/// L² norm of an angular function over (0, π/2) with the similarity weight
/// (sin φ)^{2ξ₂}(cos φ)^{2ξ₁} that makes the angular operator symmetric.
/// Trapezoid rule with [`NORMALIZATION_POINTS`] panels; non-finite endpoint
/// values (possible when an exponent is negative) are dropped by the rule.
pub fn angular_norm(d: &DerivedParams, f: impl Fn(f64) -> f64) -> f64 {
    let (xi1, xi2) = (d.xi1, d.xi2);
    trapezoid(
        |phi| {
            let v = f(phi);
            v * v * phi.sin().powf(2.0 * xi2) * phi.cos().powf(2.0 * xi1)
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        NORMALIZATION_POINTS,
    )
    .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_params::{derive_params, ParitySector, WignerParams};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn standard_derived() -> DerivedParams {
        derive_params(&WignerParams::symmetric(0.5, 0.5, -0.6)).unwrap()
    }

    #[test]
    fn zero_deformation_k_is_unity() {
        let d = DerivedParams::zero();
        for s in ParitySector::ALL {
            let (k1, k2) = compute_k(&d, s).unwrap();
            assert_eq!((k1, k2), (1.0, 1.0));
        }
    }

    #[test]
    fn frozen_k_values_for_standard_params() {
        let d = standard_derived();
        let (k1, k2) = compute_k(&d, ParitySector::PP).unwrap();
        assert_relative_eq!(k1, 3.5, max_relative = 1e-13);
        assert_relative_eq!(k2, 3.5, max_relative = 1e-13);
        let (k1, k2) = compute_k(&d, ParitySector::MM).unwrap();
        assert_relative_eq!(k1, 1.5, max_relative = 1e-13);
        assert_relative_eq!(k2, 1.5, max_relative = 1e-13);
        let (k1, k2) = compute_k(&d, ParitySector::PM).unwrap();
        assert_relative_eq!(k1, 3.5, max_relative = 1e-13);
        assert_relative_eq!(k2, 1.5, max_relative = 1e-13);
    }

    #[test]
    fn complex_k_reports_axis_and_radicand() {
        // Hand-built derived parameters outside the image of derive_params:
        // ξ=0, μ=1, ν=0 gives radicand 1−4 = −3 on that axis.
        let d = DerivedParams {
            xi1: 0.0,
            mu1: 1.0,
            nu1: 0.0,
            xi2: 0.0,
            mu2: 0.0,
            nu2: 0.0,
        };
        match compute_k(&d, ParitySector::PP) {
            Err(AzimuthalError::ComplexK {
                axis,
                radicand,
                r1,
                r2,
            }) => {
                assert_eq!(axis, 1);
                assert_relative_eq!(radicand, -3.0, max_relative = 1e-14);
                assert_eq!((r1, r2), (1, 1));
            }
            other => panic!("expected ComplexK, got {other:?}"),
        }
        let d = DerivedParams {
            mu1: 0.0,
            mu2: 1.0,
            ..d
        };
        match compute_k(&d, ParitySector::MM) {
            Err(AzimuthalError::ComplexK { axis, .. }) => assert_eq!(axis, 2),
            other => panic!("expected ComplexK, got {other:?}"),
        }
    }

    #[test]
    fn rounding_level_negative_radicand_clamps_to_zero() {
        // (1−2ξ)² = 0 exactly at ξ = 0.5; a 1e−16 residue in μ drives the
        // radicand to −4e−16, which is rounding noise, not a domain error.
        let d = DerivedParams {
            xi1: 0.5,
            mu1: 1e-16,
            nu1: 0.0,
            xi2: 0.0,
            mu2: 0.0,
            nu2: 0.0,
        };
        let (k1, k2) = compute_k(&d, ParitySector::PP).unwrap();
        assert_eq!(k1, 0.0);
        assert_eq!(k2, 1.0);
    }

    #[test]
    fn zero_deformation_m_prime_sq_is_exact() {
        let d = DerivedParams::zero();
        for s in ParitySector::ALL {
            for n_phi in 0..6u32 {
                let want = 4.0 * f64::from(n_phi + 1) * f64::from(n_phi + 1);
                let got = m_prime_squared(&d, s, n_phi).unwrap();
                assert!(
                    (got - want).abs() <= want * f64::EPSILON,
                    "n_phi={n_phi}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn frozen_m_prime_sq_for_standard_params() {
        let d = standard_derived();
        // (+,+): k₁=k₂=3.5, ξ₁+ξ₂=2.5 → m′² = (4.5+2n)² − 6.25.
        assert_relative_eq!(
            m_prime_squared(&d, ParitySector::PP, 0).unwrap(),
            14.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            m_prime_squared(&d, ParitySector::PP, 1).unwrap(),
            36.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn closed_form_matches_poeschl_teller_principal_spectrum() {
        // m′² ≡ (1 + (k₁+k₂)/2 + 2n_φ)² − (ξ₁+ξ₂)², an algebraic identity of
        // the printed relation; checked over a deformed parameter grid.
        for &(a1, b1, g1) in &[(0.5, 0.5, -0.6), (0.3, -0.2, 0.4), (1.1, 0.7, 0.25)] {
            for &(a2, b2, g2) in &[(0.5, 0.5, -0.6), (0.8, 0.1, -0.35)] {
                let w = WignerParams {
                    alpha1: a1,
                    beta1: b1,
                    gamma1: g1,
                    alpha2: a2,
                    beta2: b2,
                    gamma2: g2,
                };
                let d = derive_params(&w).unwrap();
                for s in ParitySector::ALL {
                    let (k1, k2) = compute_k(&d, s).unwrap();
                    for n_phi in [0u32, 1, 3] {
                        let got = m_prime_squared(&d, s, n_phi).unwrap();
                        let pt = (1.0 + 0.5 * (k1 + k2) + 2.0 * f64::from(n_phi)).powi(2)
                            - (d.xi1 + d.xi2).powi(2);
                        assert_relative_eq!(got, pt, max_relative = 1e-12, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn m_prime_sq_is_linear_in_nu_terms_at_fixed_k() {
        // ∂(m′²)/∂(ν₁r₁) = −1 holding kᵢ fixed, as an algebraic property of
        // the printed relation.
        let base = standard_derived();
        let s = ParitySector::PM;
        let (k1, k2) = compute_k(&base, s).unwrap();
        let f0 = m_prime_squared_given_k(k1, k2, &base, s, 2);
        for h in [0.25, -1.5, 3.0] {
            let bumped = DerivedParams {
                nu1: base.nu1 + h,
                ..base
            };
            let f1 = m_prime_squared_given_k(k1, k2, &bumped, s, 2);
            assert_relative_eq!(f1 - f0, -h * s.r1(), max_relative = 1e-12, epsilon = 1e-12);
            let bumped = DerivedParams {
                nu2: base.nu2 + h,
                ..base
            };
            let f1 = m_prime_squared_given_k(k1, k2, &bumped, s, 2);
            assert_relative_eq!(f1 - f0, -h * s.r2(), max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn m_prime_sq_increases_with_n_phi() {
        let d = standard_derived();
        for s in ParitySector::ALL {
            let mut prev = m_prime_squared(&d, s, 0).unwrap();
            for n_phi in 1..8u32 {
                let next = m_prime_squared(&d, s, n_phi).unwrap();
                assert!(next > prev, "sector {s}: not increasing at n_phi={n_phi}");
                prev = next;
            }
        }
    }

    #[test]
    fn solve_produces_closed_form_solution() {
        let w = WignerParams::symmetric(0.5, 0.5, -0.6);
        let sol = solve(&w, ParitySector::PP, 0).unwrap();
        assert_eq!(sol.source, MPrimeSource::ClosedForm);
        assert_eq!(sol.n_phi, 0);
        assert_relative_eq!(sol.k1, 3.5, max_relative = 1e-13);
        assert_relative_eq!(sol.m_prime_sq, 14.0, max_relative = 1e-13);
    }

    #[test]
    fn solve_rejects_invalid_gamma() {
        let w = WignerParams {
            gamma1: 1.0,
            ..WignerParams::standard()
        };
        assert!(solve(&w, ParitySector::PP, 0).is_err());
    }

    #[test]
    fn frozen_wavefunction_value_at_pi_over_four() {
        // Zero deformation, n_φ = 0: Φ(π/4) = e^{−1/2}·(√2/2).
        let d = DerivedParams::zero();
        let got =
            azimuthal_wavefunction(&d, ParitySector::PP, 0, std::f64::consts::FRAC_PI_4).unwrap();
        let want = (-0.5f64).exp() * std::f64::consts::SQRT_2 / 2.0;
        assert_relative_eq!(got, want, max_relative = 1e-14);
    }

    #[test]
    fn wavefunction_vanishes_at_pi_over_two_for_positive_power() {
        let d = standard_derived();
        let got =
            azimuthal_wavefunction(&d, ParitySector::PP, 0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(got.abs() < 1e-15, "got {got}");
    }

    #[test]
    fn first_excited_wavefunction_has_node_at_pi_over_four_for_equal_axes() {
        // With k₁ = k₂ the n_φ = 1 Laguerre factor vanishes at φ = π/4.
        let d = standard_derived();
        let got =
            azimuthal_wavefunction(&d, ParitySector::PP, 1, std::f64::consts::FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(got, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn angular_norm_matches_independent_simpson_rule() {
        // Zero deformation, n_φ = 0: weight ≡ 1 and Φ = e^{−cos²φ}·cos φ.
        let d = DerivedParams::zero();
        let f = |phi: f64| azimuthal_wavefunction(&d, ParitySector::PP, 0, phi).unwrap();
        let got = angular_norm(&d, f);
        // Simpson's rule, coded independently.
        let n = 2_000usize;
        let h = std::f64::consts::FRAC_PI_2 / n as f64;
        let g = |phi: f64| {
            let c = phi.cos();
            (-(c * c)).exp().powi(2) * c * c
        };
        let mut s = g(0.0) + g(std::f64::consts::FRAC_PI_2);
        for i in 1..n {
            s += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let want = (s * h / 3.0).sqrt();
        assert_relative_eq!(got, want, max_relative = 1e-7);
    }

    #[test]
    fn angular_norm_is_finite_for_deformed_weight() {
        let d = standard_derived();
        let f = |phi: f64| azimuthal_wavefunction(&d, ParitySector::PP, 2, phi).unwrap();
        let n = angular_norm(&d, f);
        assert!(n.is_finite() && n > 0.0);
    }
}
