//! Radial bound states of the deformed harmonic oscillator branch.
//!
//! With equal scalar and vector couplings the radial equation for ψ(ρ) in a
//! sector with angular constant m′² reads (X = ξ₁ + ξ₂)
//!
//!   ψ'' + (1 + 2X)/ρ · ψ' + [E² − m² − c²ρ² − m′²/ρ²] ψ = 0,
//!
//! where c² = mω(E + m)(1 − a²) couples the trial energy into the effective
//! oscillator strength. Substituting s = ρ² and peeling the asymptotic
//! factors maps this onto the associated Laguerre equation, giving the
//! quantization condition
//!
//!   E² − m² = 4M·c,   M = 1/2 + n + q/2,   q = √(m′² + X²),
//!
//! or equivalently the cubic residual (E − m)²(E + m) − 16M²mω(1 − a²) = 0,
//! which this module brackets and bisects on the physical branch E > m.
//! A nested-radical closed form for E also circulates; it is evaluated here
//! only as a logged cross-check ([`printed_energy_formula`]) because it does
//! not satisfy the quantization residual away from special points.

use serde::{Deserialize, Serialize};

use crate::error::HarmonicError;
use crate::operator_params::{DerivedParams, GAMMA_MARGIN};
use crate::special_functions::{
    find_roots, laguerre, laguerre_deriv, laguerre_second_deriv, ROOT_TOL, SCAN_PANELS,
};

/// Relative tolerance on the quantization residual for stored energies,
/// scaled by max(1, |E|³).
pub const RESIDUAL_BOUND: f64 = 1e-8;

/// A validated harmonic-branch problem: oscillator data plus the angular
/// constant it inherits from the azimuthal solve.
///
/// Fields are private so every instance — including ones deserialized from
/// configuration files — has passed the same checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHarmonicConfig", into = "RawHarmonicConfig")]
pub struct HarmonicConfig {
    mass: f64,
    omega: f64,
    a: f64,
    derived: DerivedParams,
    m_prime_sq: f64,
    n: u32,
}

#[derive(Serialize, Deserialize)]
struct RawHarmonicConfig {
    mass: f64,
    omega: f64,
    a: f64,
    derived: DerivedParams,
    m_prime_sq: f64,
    n: u32,
}

impl From<HarmonicConfig> for RawHarmonicConfig {
    fn from(c: HarmonicConfig) -> Self {
        RawHarmonicConfig {
            mass: c.mass,
            omega: c.omega,
            a: c.a,
            derived: c.derived,
            m_prime_sq: c.m_prime_sq,
            n: c.n,
        }
    }
}

impl TryFrom<RawHarmonicConfig> for HarmonicConfig {
    type Error = HarmonicError;
    fn try_from(r: RawHarmonicConfig) -> Result<Self, HarmonicError> {
        HarmonicConfig::new(r.mass, r.omega, r.a, r.derived, r.m_prime_sq, r.n)
    }
}

impl HarmonicConfig {
    /// Checked constructor: mass > 0, ω > 0, |a| < 1 (same margin as the
    /// reflection deformations), m′² ≥ 0.
    pub fn new(
        mass: f64,
        omega: f64,
        a: f64,
        derived: DerivedParams,
        m_prime_sq: f64,
        n: u32,
    ) -> Result<Self, HarmonicError> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(HarmonicError::NonPositiveMass(mass));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(HarmonicError::NonPositiveFrequency(omega));
        }
        if !a.is_finite() || a.abs() >= 1.0 - GAMMA_MARGIN {
            return Err(HarmonicError::DeformationOutOfRange(a));
        }
        if !(m_prime_sq >= 0.0) {
            return Err(HarmonicError::NegativeMPrimeSq(m_prime_sq));
        }
        Ok(HarmonicConfig {
            mass,
            omega,
            a,
            derived,
            m_prime_sq,
            n,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn derived(&self) -> &DerivedParams {
        &self.derived
    }
    pub fn m_prime_sq(&self) -> f64 {
        self.m_prime_sq
    }
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Effective coupling mω(1 − a²) > 0.
    pub fn coupling(&self) -> f64 {
        self.mass * self.omega * (1.0 - self.a * self.a)
    }

    /// X = ξ₁ + ξ₂.
    pub fn xi_sum(&self) -> f64 {
        self.derived.xi1 + self.derived.xi2
    }

    /// Centrifugal index q = √(m′² + X²).
    pub fn laguerre_order(&self) -> f64 {
        (self.m_prime_sq + self.xi_sum() * self.xi_sum()).sqrt()
    }

    /// M = 1/2 + n + q/2, the quantization multiplier.
    pub fn big_m(&self) -> f64 {
        0.5 + f64::from(self.n) + 0.5 * self.laguerre_order()
    }

    /// Gaussian scale c(E) = √(mω(E + m)(1 − a²)) at trial energy E.
    pub fn gaussian_scale(&self, e: f64) -> f64 {
        (self.coupling() * (e + self.mass)).sqrt()
    }
}

/// Shape of a closed-form radial eigenfunction ψ(ρ) = s^p·e^{−cs/2}·L_n^q(cs)
/// with s = ρ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavefnDescriptor {
    /// Power exponent p = −X/2 + q/2 on s.
    pub power_exponent: f64,
    /// Scale c in the Gaussian factor e^{−c·s/2}.
    pub gaussian_scale: f64,
    /// Laguerre degree n.
    pub laguerre_degree: u32,
    /// Laguerre order q = √(m′² + X²).
    pub laguerre_order: f64,
    /// Scale c in the Laguerre argument c·s.
    pub laguerre_scale: f64,
}

/// A solved harmonic level: quantization roots plus the printed-closed-form
/// cross-check and the wavefunction shape for the lowest root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicLevel {
    pub n: u32,
    pub m_prime_sq: f64,
    /// M = 1/2 + n + q/2.
    pub big_m: f64,
    /// Physical roots (E > m) of the quantization condition, ascending.
    pub energies: Vec<f64>,
    /// The circulated nested-radical closed form, when it evaluates to a
    /// finite real number; retained as a logged comparison only.
    pub printed_energy: Option<f64>,
    /// |printed_energy − energies[0]| when both exist.
    pub printed_discrepancy: Option<f64>,
    /// Shape of ψ for the lowest energy.
    pub wavefn: WavefnDescriptor,
}

impl HarmonicLevel {
    /// The lowest (generically unique) physical energy.
    pub fn energy(&self) -> f64 {
        self.energies[0]
    }
}

/// The quantization residual (E − m)²(E + m) − 16M²mω(1 − a²).
///
/// Zero exactly at energies satisfying E² − m² = 4M·c(E). Negative at E = m,
/// strictly increasing for E > m, so the physical branch carries exactly one
/// root. Trial energies below −m are outside the E + m ≥ 0 branch.
pub fn quantization_residual(cfg: &HarmonicConfig, e: f64) -> Result<f64, HarmonicError> {
    if e < -cfg.mass() {
        return Err(HarmonicError::EnergyBelowBranch {
            energy: e,
            minus_m: -cfg.mass(),
        });
    }
    let m = cfg.mass();
    let big_m = cfg.big_m();
    Ok((e - m) * (e - m) * (e + m) - 16.0 * big_m * big_m * cfg.coupling())
}

/// The circulated nested-radical closed form for E, evaluated literally:
///
///   𝓜 = m·[3√3·M²ω²·√((a²−1)(2m²+27(a²−1))) − (m² + 27(a²−1)M²ω²)],
///   E = (1/3)·[m + 2m²/𝓜^{1/3} + 2𝓜]^{1/3}.
///
/// Returns `None` when any intermediate fails to be finite and real (negative
/// square-root radicand, 𝓜 = 0). The value generally does **not** satisfy
/// [`quantization_residual`]; it exists so frontends can report the
/// discrepancy, not for use as an energy.
pub fn printed_energy_formula(cfg: &HarmonicConfig) -> Option<f64> {
    let m = cfg.mass();
    let w = cfg.omega();
    let a2m1 = cfg.a() * cfg.a() - 1.0;
    let big_m = cfg.big_m();
    let radicand = a2m1 * (2.0 * m * m + 27.0 * a2m1);
    if radicand < 0.0 {
        return None;
    }
    let mcal = m
        * (3.0 * 3.0_f64.sqrt() * big_m * big_m * w * w * radicand.sqrt()
            - (m * m + 27.0 * a2m1 * big_m * big_m * w * w));
    let inner = m + 2.0 * m * m / mcal.cbrt() + 2.0 * mcal;
    let e = inner.cbrt() / 3.0;
    e.is_finite().then_some(e)
}

fn descriptor_for(cfg: &HarmonicConfig, e: f64) -> WavefnDescriptor {
    let q = cfg.laguerre_order();
    let c = cfg.gaussian_scale(e);
    WavefnDescriptor {
        power_exponent: 0.5 * (q - cfg.xi_sum()),
        gaussian_scale: c,
        laguerre_degree: cfg.n(),
        laguerre_order: q,
        laguerre_scale: c,
    }
}

/// Brackets and bisects the quantization residual on the physical branch.
///
/// The scan window is (m, E_max] with E_max = m + 20·√(mω(1−a²))·(M+1); if no
/// sign change is found there the window is doubled a few times before
/// reporting failure, so extreme parameter corners degrade loudly rather than
/// silently. Every returned energy is re-checked against the residual bound
/// [`RESIDUAL_BOUND`]·max(1, |E|³).
pub fn solve_levels(cfg: &HarmonicConfig) -> Result<HarmonicLevel, HarmonicError> {
    let m = cfg.mass();
    let big_m = cfg.big_m();
    let mut span = 20.0 * cfg.coupling().sqrt() * (big_m + 1.0);
    let mut roots = Vec::new();
    for _ in 0..6 {
        roots = find_roots(
            |e| quantization_residual(cfg, e).unwrap_or(f64::NAN),
            m,
            m + span,
            SCAN_PANELS,
            ROOT_TOL,
        );
        roots.retain(|&e| {
            e > m
                && quantization_residual(cfg, e)
                    .map(|r| r.abs() <= RESIDUAL_BOUND * 1.0_f64.max(e.abs().powi(3)))
                    .unwrap_or(false)
        });
        if !roots.is_empty() {
            break;
        }
        span *= 2.0;
    }
    if roots.is_empty() {
        return Err(HarmonicError::NoRootFound {
            lo: m,
            hi: m + span,
            panels: SCAN_PANELS,
        });
    }
    let printed = printed_energy_formula(cfg);
    Ok(HarmonicLevel {
        n: cfg.n(),
        m_prime_sq: cfg.m_prime_sq(),
        big_m,
        printed_discrepancy: printed.map(|p| (p - roots[0]).abs()),
        printed_energy: printed,
        wavefn: descriptor_for(cfg, roots[0]),
        energies: roots,
    })
}

/// The unnormalized radial eigenfunction ψ(ρ) = s^p·e^{−cs/2}·L_n^q(cs),
/// s = ρ², for the level's lowest energy.
pub fn harmonic_wavefunction(level: &HarmonicLevel, rho: f64) -> f64 {
    let d = &level.wavefn;
    let s = rho * rho;
    let power = if d.power_exponent == 0.0 {
        1.0
    } else {
        s.powf(d.power_exponent)
    };
    power
        * (-0.5 * d.gaussian_scale * s).exp()
        * laguerre(d.laguerre_degree, d.laguerre_order, d.laguerre_scale * s)
}

/// ψ, dψ/dρ, d²ψ/dρ² by analytic differentiation of the closed form.
pub fn harmonic_wavefunction_derivs(level: &HarmonicLevel, rho: f64) -> (f64, f64, f64) {
    let d = &level.wavefn;
    let s = rho * rho;
    let c = d.gaussian_scale;
    let p = d.power_exponent;
    let l0 = laguerre(d.laguerre_degree, d.laguerre_order, c * s);
    let l1 = laguerre_deriv(d.laguerre_degree, d.laguerre_order, c * s);
    let l2 = laguerre_second_deriv(d.laguerre_degree, d.laguerre_order, c * s);
    let pref = s.powf(p) * (-0.5 * c * s).exp();
    // d/ds of ψ = pref·L:  pref·[(p/s − c/2)·L + c·L′]
    let g = p / s - 0.5 * c;
    let psi = pref * l0;
    let psi_s = pref * (g * l0 + c * l1);
    let psi_ss = pref * ((g * g - p / (s * s)) * l0 + 2.0 * g * c * l1 + c * c * l2);
    // Chain rule to ρ: ψ_ρ = 2ρ·ψ_s, ψ_ρρ = 4s·ψ_ss + 2·ψ_s.
    (psi, 2.0 * rho * psi_s, 4.0 * s * psi_ss + 2.0 * psi_s)
}

/// Pointwise residual of the radial equation at the level's lowest energy:
///
///   R(ρ) = ψ'' + (1+2X)/ρ·ψ' + [E² − m² − c²ρ² − m′²/ρ²]·ψ,
///
/// returned together with the local scale max(|ψ''|, mω·|ψ|) against which it
/// should be judged.
pub fn ode_residual(level: &HarmonicLevel, cfg: &HarmonicConfig, rho: f64) -> (f64, f64) {
    let e = level.energy();
    let m = cfg.mass();
    let c = level.wavefn.gaussian_scale;
    let x = cfg.xi_sum();
    let (psi, d1, d2) = harmonic_wavefunction_derivs(level, rho);
    let potential = e * e - m * m - c * c * rho * rho - level.m_prime_sq / (rho * rho);
    let residual = d2 + (1.0 + 2.0 * x) / rho * d1 + potential * psi;
    let scale = d2.abs().max(cfg.mass() * cfg.omega() * psi.abs());
    (residual, scale)
}

/// Classical turning point ρ_t = √(E² − m²)/c of the lowest energy, used to
/// size evaluation grids.
pub fn turning_point(level: &HarmonicLevel, cfg: &HarmonicConfig) -> f64 {
    let e = level.energy();
    ((e * e - cfg.mass() * cfg.mass()).max(0.0)).sqrt() / level.wavefn.gaussian_scale
}

/// Counts strict sign changes of ψ on a uniform ρ-grid over (lo, hi).
pub fn node_count(level: &HarmonicLevel, lo: f64, hi: f64, panels: usize) -> usize {
    assert!(panels >= 2 && lo < hi && lo > 0.0);
    let h = (hi - lo) / panels as f64;
    let mut count = 0;
    let mut prev = harmonic_wavefunction(level, lo);
    for i in 1..=panels {
        let v = harmonic_wavefunction(level, lo + i as f64 * h);
        if prev != 0.0 && v != 0.0 && (prev < 0.0) != (v < 0.0) {
            count += 1;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::azimuthal::m_prime_squared;
    use crate::operator_params::{derive_params, ParitySector, WignerParams};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Zero Wigner deformation, m = ω = 1, given a; m′² = 4(n_φ+1)².
    fn isotropic(a: f64, n_phi: u32, n: u32) -> HarmonicConfig {
        let m_prime_sq = 4.0 * f64::from(n_phi + 1) * f64::from(n_phi + 1);
        HarmonicConfig::new(1.0, 1.0, a, DerivedParams::zero(), m_prime_sq, n).unwrap()
    }

    /// The deformed family used in the energy-vs-a figures: α = β = 0.5 on
    /// both axes, γ₁ = γ₂ = a.
    fn deformed(a: f64, sector: ParitySector, n_phi: u32, n: u32) -> HarmonicConfig {
        let d = derive_params(&WignerParams::symmetric(0.5, 0.5, a)).unwrap();
        let mps = m_prime_squared(&d, sector, n_phi).unwrap();
        HarmonicConfig::new(1.0, 1.0, a, d, mps, n).unwrap()
    }

    #[test]
    fn config_rejects_bad_inputs() {
        let d = DerivedParams::zero();
        assert!(matches!(
            HarmonicConfig::new(0.0, 1.0, 0.0, d, 4.0, 0),
            Err(HarmonicError::NonPositiveMass(_))
        ));
        assert!(matches!(
            HarmonicConfig::new(1.0, -2.0, 0.0, d, 4.0, 0),
            Err(HarmonicError::NonPositiveFrequency(_))
        ));
        assert!(matches!(
            HarmonicConfig::new(1.0, 1.0, 1.0, d, 4.0, 0),
            Err(HarmonicError::DeformationOutOfRange(_))
        ));
        assert!(matches!(
            HarmonicConfig::new(1.0, 1.0, 0.0, d, -1.0, 0),
            Err(HarmonicError::NegativeMPrimeSq(_))
        ));
        assert!(HarmonicConfig::new(1.0, 1.0, 0.99, d, 0.0, 3).is_ok());
    }

    #[test]
    fn serde_round_trip_revalidates() {
        let cfg = isotropic(0.3, 1, 2);
        let json = serde_json::to_string(&cfg).unwrap();
        let back: HarmonicConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
        let bad = json.replace("\"mass\":1.0", "\"mass\":-1.0");
        assert!(serde_json::from_str::<HarmonicConfig>(&bad).is_err());
    }

    #[test]
    fn residual_sign_anchors() {
        let cfg = isotropic(0.0, 0, 0);
        // At E = m the cubic term vanishes: residual = −16M²mω(1−a²) exactly.
        let big_m = cfg.big_m();
        assert_eq!(
            quantization_residual(&cfg, 1.0).unwrap(),
            -16.0 * big_m * big_m
        );
        assert!(matches!(
            quantization_residual(&cfg, -1.5),
            Err(HarmonicError::EnergyBelowBranch { .. })
        ));
    }

    #[test]
    fn anchor_energy_for_isotropic_ground_state() {
        // m = ω = 1, a = 0, m′ = 2, n = 0: M = 3/2 and (E−1)²(E+1) = 36.
        let cfg = isotropic(0.0, 0, 0);
        assert_relative_eq!(cfg.big_m(), 1.5, max_relative = 1e-15);
        let level = solve_levels(&cfg).unwrap();
        assert_eq!(level.energies.len(), 1);
        assert_abs_diff_eq!(level.energy(), 3.752_317_474_967_829, epsilon = 1e-9);
    }

    #[test]
    fn stored_energies_satisfy_residual_bound() {
        for cfg in [
            isotropic(0.0, 0, 0),
            isotropic(0.6, 2, 3),
            deformed(-0.6, ParitySector::PP, 1, 2),
            deformed(0.3, ParitySector::MM, 2, 1),
        ] {
            let level = solve_levels(&cfg).unwrap();
            for &e in &level.energies {
                assert!(e > cfg.mass());
                let r = quantization_residual(&cfg, e).unwrap().abs();
                assert!(
                    r <= RESIDUAL_BOUND * 1.0_f64.max(e.abs().powi(3)),
                    "residual {r} too large at E = {e}"
                );
            }
        }
    }

    #[test]
    fn printed_formula_is_recorded_with_discrepancy() {
        let cfg = isotropic(0.0, 0, 0);
        let level = solve_levels(&cfg).unwrap();
        // Literal evaluation of the circulated nested-radical form.
        let printed = level.printed_energy.expect("finite printed value");
        assert_relative_eq!(printed, 2.065_199_993_720_431, max_relative = 1e-12);
        let disc = level.printed_discrepancy.unwrap();
        assert_relative_eq!(disc, (printed - level.energy()).abs(), max_relative = 1e-15);
    }

    #[test]
    fn energy_approaches_rest_mass_as_coupling_vanishes() {
        let tight = isotropic(0.999_999, 0, 0);
        let level = solve_levels(&tight).unwrap();
        assert!(level.energy() > 1.0);
        assert!(level.energy() - 1.0 < 0.2, "E = {}", level.energy());
    }

    #[test]
    fn energy_monotone_decreasing_in_a_and_gap_shrinks() {
        let e_at = |a: f64, n: u32| {
            solve_levels(&deformed(a, ParitySector::PP, 2, n))
                .unwrap()
                .energy()
        };
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let a = 0.99 * i as f64 / 19.0;
            let e = e_at(a, 0);
            assert!(e < prev, "E not decreasing at a = {a}");
            prev = e;
        }
        let gap0 = e_at(0.0, 1) - e_at(0.0, 0);
        let gap99 = e_at(0.99, 1) - e_at(0.99, 0);
        assert!(gap99 < gap0);
        assert!(gap99 > 0.0);
    }

    #[test]
    fn parity_sectors_split_the_spectrum() {
        let pp = deformed(0.5, ParitySector::PP, 2, 0);
        let mm = deformed(0.5, ParitySector::MM, 2, 0);
        assert!((pp.m_prime_sq() - mm.m_prime_sq()).abs() > 1.0);
        let e_pp = solve_levels(&pp).unwrap().energy();
        let e_mm = solve_levels(&mm).unwrap().energy();
        assert!((e_pp - e_mm).abs() > 1e-2);
    }

    #[test]
    fn wavefunction_vanishes_at_origin_and_decays() {
        let cfg = deformed(-0.6, ParitySector::PP, 1, 0);
        let level = solve_levels(&cfg).unwrap();
        assert!(level.wavefn.power_exponent > 0.0);
        assert_eq!(harmonic_wavefunction(&level, 0.0), 0.0);
        let far = turning_point(&level, &cfg) + 8.0 / level.wavefn.gaussian_scale.sqrt();
        assert!(harmonic_wavefunction(&level, far).abs() < 1e-6);
    }

    #[test]
    fn excited_state_node_counts() {
        for n in 0..3u32 {
            let cfg = deformed(-0.6, ParitySector::PP, 1, n);
            let level = solve_levels(&cfg).unwrap();
            let hi = turning_point(&level, &cfg) + 5.0 / level.wavefn.gaussian_scale.sqrt();
            assert_eq!(node_count(&level, 1e-3, hi, 4000), n as usize);
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let cfg = deformed(0.3, ParitySector::PM, 1, 2);
        let level = solve_levels(&cfg).unwrap();
        for rho in [0.3, 0.9, 1.7, 2.8] {
            let h = 1e-5;
            let f = |r: f64| harmonic_wavefunction(&level, r);
            let (psi, d1, d2) = harmonic_wavefunction_derivs(&level, rho);
            assert_relative_eq!(psi, f(rho), max_relative = 1e-14);
            let fd1 = (f(rho + h) - f(rho - h)) / (2.0 * h);
            let fd2 = (f(rho + h) - 2.0 * f(rho) + f(rho - h)) / (h * h);
            assert_relative_eq!(d1, fd1, max_relative = 1e-7, epsilon = 1e-9);
            assert_relative_eq!(d2, fd2, max_relative = 1e-4, epsilon = 1e-6);
        }
    }

    #[test]
    fn closed_form_satisfies_the_radial_equation_pointwise() {
        // The strongest single check of the harmonic pipeline: ψ with its
        // paired E solves the ρ-form equation to near machine precision on a
        // 10³-point grid.
        for (cfg_idx, cfg) in [
            isotropic(0.0, 0, 0),
            deformed(-0.6, ParitySector::PP, 1, 0),
            deformed(-0.6, ParitySector::PP, 1, 1),
            deformed(-0.6, ParitySector::PP, 1, 2),
            deformed(0.8, ParitySector::MM, 2, 1),
        ]
        .into_iter()
        .enumerate()
        {
            let level = solve_levels(&cfg).unwrap();
            let hi = turning_point(&level, &cfg) + 5.0 / level.wavefn.gaussian_scale.sqrt();
            let mut worst: f64 = 0.0;
            for i in 0..1000 {
                let rho = 0.05 + (hi - 0.05) * i as f64 / 999.0;
                let (res, scale) = ode_residual(&level, &cfg, rho);
                if scale > 1e-300 {
                    worst = worst.max(res.abs() / scale.max(1e-300));
                }
            }
            assert!(
                worst <= 1e-6,
                "config {cfg_idx}: worst residual ratio {worst}"
            );
        }
    }
}
