//! Quasi-exactly-solvable sextic anharmonic branch.
//!
//! The radial equation with potential V(ρ) = wρ² + λρ⁴ + ηρ⁶ (effective
//! couplings w = (1−a²)Ω, λ = (1−a²)²Λ, η = (1−a²)³Γ) is mapped, via
//! Z = ρ² and the gauge factor Z^A·exp(−BZ² − DZ), onto an operator inside
//! the degree-n module of the sl(2) generators
//!
//!   J⁺ = Z²d/dZ − nZ,   J⁰ = Z·d/dZ − n/2,   J⁻ = d/dZ.
//!
//! A polynomial eigenfunction of degree n exists when two conditions meet:
//! the energy constraint F(E) = 4nB − λ₃ + 4AB + 4B − D² = 0 (which places
//! the gauge-transformed operator inside the module) and the truncation
//! condition a_{n+1} = 0 on the three-term coefficient recursion (which the
//! source material leaves implicit; [`calibrate_truncation`] enforces it by
//! tuning one designated parameter).
//!
//! λ-coefficients at trial energy E (X = ξ₁ + ξ₂):
//!   λ₁ = −(m′² + X²)/4, λ₂ = (E² − m²)/4, λ₃ = −w(E+m)/2,
//!   λ₄ = −λ(E+m)/2, λ₅ = −η(E+m)/2,
//! with gauge A = √(−λ₁), B = √(−λ₅)/2 (positive branch for
//! normalizability), D = −λ₄/(4B).

use serde::{Deserialize, Serialize};

use crate::error::{HarmonicError, QesError};
use crate::operator_params::{
    derive_params, DerivedParams, ParitySector, WignerParams, GAMMA_MARGIN,
};
use crate::special_functions::{find_roots, ROOT_TOL, SCAN_PANELS};
use crate::CoreError;

/// |a_{n+1}| required of a calibrated quasi-exact solution.
pub const TRUNCATION_TOL: f64 = 1e-10;

/// Relative bound on the energy-constraint residual of stored solutions.
pub const CONSTRAINT_BOUND: f64 = 1e-8;

/// A validated sextic-oscillator problem.
///
/// The bare couplings Ω, Λ, Γ may have either sign at construction; a
/// non-normalizable regime (η(E+m) ≤ 0) surfaces later as a
/// [`QesError::GaugeDomain`] from [`gauge_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAnharmonicConfig", into = "RawAnharmonicConfig")]
pub struct AnharmonicConfig {
    mass: f64,
    big_omega: f64,
    big_lambda: f64,
    big_gamma: f64,
    a: f64,
    derived: DerivedParams,
    m_prime_sq: f64,
    n: u32,
}

#[derive(Serialize, Deserialize)]
struct RawAnharmonicConfig {
    mass: f64,
    big_omega: f64,
    big_lambda: f64,
    big_gamma: f64,
    a: f64,
    derived: DerivedParams,
    m_prime_sq: f64,
    n: u32,
}

impl From<AnharmonicConfig> for RawAnharmonicConfig {
    fn from(c: AnharmonicConfig) -> Self {
        RawAnharmonicConfig {
            mass: c.mass,
            big_omega: c.big_omega,
            big_lambda: c.big_lambda,
            big_gamma: c.big_gamma,
            a: c.a,
            derived: c.derived,
            m_prime_sq: c.m_prime_sq,
            n: c.n,
        }
    }
}

impl TryFrom<RawAnharmonicConfig> for AnharmonicConfig {
    type Error = QesError;
    fn try_from(r: RawAnharmonicConfig) -> Result<Self, QesError> {
        AnharmonicConfig::new(
            r.mass,
            r.big_omega,
            r.big_lambda,
            r.big_gamma,
            r.a,
            r.derived,
            r.m_prime_sq,
            r.n,
        )
    }
}

impl AnharmonicConfig {
    /// Checked constructor: mass > 0, |a| < 1, m′² ≥ 0; couplings are free.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mass: f64,
        big_omega: f64,
        big_lambda: f64,
        big_gamma: f64,
        a: f64,
        derived: DerivedParams,
        m_prime_sq: f64,
        n: u32,
    ) -> Result<Self, QesError> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(HarmonicError::NonPositiveMass(mass).into());
        }
        if !a.is_finite() || a.abs() >= 1.0 - GAMMA_MARGIN {
            return Err(HarmonicError::DeformationOutOfRange(a).into());
        }
        if !(m_prime_sq >= 0.0) {
            return Err(HarmonicError::NegativeMPrimeSq(m_prime_sq).into());
        }
        if !big_omega.is_finite() || !big_lambda.is_finite() || !big_gamma.is_finite() {
            return Err(QesError::Consistency {
                detail: format!(
                    "non-finite couplings Omega={big_omega}, Lambda={big_lambda}, Gamma={big_gamma}"
                ),
            });
        }
        Ok(AnharmonicConfig {
            mass,
            big_omega,
            big_lambda,
            big_gamma,
            a,
            derived,
            m_prime_sq,
            n,
        })
    }

    /// Builds the config from the reflection-deformation data: γ₁ = γ₂ = a,
    /// per-axis (αᵢ, βᵢ), with m′² from the closed-form angular solve.
    #[allow(clippy::too_many_arguments)]
    pub fn from_deformation(
        alphas: (f64, f64),
        betas: (f64, f64),
        a: f64,
        sector: ParitySector,
        n_phi: u32,
        mass: f64,
        big_omega: f64,
        big_lambda: f64,
        big_gamma: f64,
        n: u32,
    ) -> Result<Self, CoreError> {
        let w = WignerParams {
            alpha1: alphas.0,
            beta1: betas.0,
            gamma1: a,
            alpha2: alphas.1,
            beta2: betas.1,
            gamma2: a,
        };
        let d = derive_params(&w)?;
        let m_prime_sq = crate::azimuthal::m_prime_squared(&d, sector, n_phi)?;
        Ok(AnharmonicConfig::new(
            mass, big_omega, big_lambda, big_gamma, a, d, m_prime_sq, n,
        )?)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn big_omega(&self) -> f64 {
        self.big_omega
    }
    pub fn big_lambda(&self) -> f64 {
        self.big_lambda
    }
    pub fn big_gamma(&self) -> f64 {
        self.big_gamma
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

    /// Effective quadratic coupling w = (1 − a²)Ω.
    pub fn w_eff(&self) -> f64 {
        (1.0 - self.a * self.a) * self.big_omega
    }

    /// Effective quartic coupling λ = (1 − a²)²Λ.
    pub fn lam_eff(&self) -> f64 {
        (1.0 - self.a * self.a).powi(2) * self.big_lambda
    }

    /// Effective sextic coupling η = (1 − a²)³Γ.
    pub fn eta_eff(&self) -> f64 {
        (1.0 - self.a * self.a).powi(3) * self.big_gamma
    }

    /// X = ξ₁ + ξ₂.
    pub fn xi_sum(&self) -> f64 {
        self.derived.xi1 + self.derived.xi2
    }

    /// The gauge index A = √(m′² + X²)/2 — independent of the trial energy.
    pub fn big_a(&self) -> f64 {
        (self.m_prime_sq + self.xi_sum() * self.xi_sum()).sqrt() / 2.0
    }

    /// V(ρ) = wρ² + λρ⁴ + ηρ⁶ with the effective couplings.
    pub fn potential(&self, rho: f64) -> f64 {
        let r2 = rho * rho;
        r2 * (self.w_eff() + r2 * (self.lam_eff() + r2 * self.eta_eff()))
    }
}

/// The five λ-coefficients at trial energy E.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaCoeffs {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub l5: f64,
}

/// λ₁ = −(m′²+X²)/4, λ₂ = (E²−m²)/4, λ₃ = −w(E+m)/2, λ₄ = −λ(E+m)/2,
/// λ₅ = −η(E+m)/2.
pub fn lambda_coeffs(cfg: &AnharmonicConfig, e: f64) -> LambdaCoeffs {
    let x = cfg.xi_sum();
    let epm = e + cfg.mass();
    LambdaCoeffs {
        l1: -(cfg.m_prime_sq() + x * x) / 4.0,
        l2: (e * e - cfg.mass() * cfg.mass()) / 4.0,
        l3: -cfg.w_eff() * epm / 2.0,
        l4: -cfg.lam_eff() * epm / 2.0,
        l5: -cfg.eta_eff() * epm / 2.0,
    }
}

/// Gauge-factor parameters (A, B, D) of Z^A·exp(−BZ² − DZ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeTriple {
    /// A = √(−λ₁) ≥ 0.
    pub a: f64,
    /// B = √(−λ₅)/2 > 0 — the decaying branch.
    pub b: f64,
    /// D = −λ₄/(4B); carries the sign of λ (quartic coupling).
    pub d: f64,
}

/// A = √(−λ₁), B = +√(−λ₅)/2, D = −λ₄/(4B); fails when λ₅ ≥ 0, i.e. when
/// η(E+m) ≤ 0 makes exp(−BZ²) non-decaying.
pub fn gauge_params(l: &LambdaCoeffs) -> Result<GaugeTriple, QesError> {
    if l.l5 >= 0.0 {
        return Err(QesError::GaugeDomain {
            l5: l.l5,
            eta_epm: -2.0 * l.l5,
        });
    }
    let b = (-l.l5).sqrt() / 2.0;
    Ok(GaugeTriple {
        a: (-l.l1).max(0.0).sqrt(),
        b,
        d: -l.l4 / (4.0 * b),
    })
}

/// The nonzero structure coefficients expressing the gauge-transformed
/// operator as C₀₋·J⁰J⁻ + C₊·J⁺ + C₀·J⁰ + C₋·J⁻ + C (all quadratic
/// coefficients other than C₀₋ vanish).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sl2Coeffs {
    pub c_pp: f64,
    pub c_p0: f64,
    pub c_pm: f64,
    pub c_0m: f64,
    pub c_mm: f64,
    pub c_p: f64,
    pub c_0: f64,
    pub c_m: f64,
    pub c_const: f64,
}

// ---- polynomial helpers (coefficient vectors, index = power of Z) ----

fn poly_deriv(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    (1..p.len()).map(|k| p[k] * k as f64).collect()
}

fn poly_shift(p: &[f64], up: usize) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + up];
    out[up..].copy_from_slice(p);
    out
}

fn poly_add_scaled(acc: &mut Vec<f64>, p: &[f64], c: f64) {
    if acc.len() < p.len() {
        acc.resize(p.len(), 0.0);
    }
    for (a, &v) in acc.iter_mut().zip(p) {
        *a += c * v;
    }
}

/// J⁻ p = dp/dZ.
pub fn apply_jm(p: &[f64], _n: u32) -> Vec<f64> {
    poly_deriv(p)
}

/// J⁰ p = Z·dp/dZ − (n/2)·p.
pub fn apply_j0(p: &[f64], n: u32) -> Vec<f64> {
    p.iter()
        .enumerate()
        .map(|(k, &c)| c * (k as f64 - f64::from(n) / 2.0))
        .collect()
}

/// J⁺ p = Z²·dp/dZ − n·Z·p.
pub fn apply_jp(p: &[f64], n: u32) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + 1];
    for (k, &c) in p.iter().enumerate() {
        out[k + 1] += c * (k as f64 - f64::from(n));
    }
    out
}

fn poly_max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    (0..len)
        .map(|k| {
            let x = a.get(k).copied().unwrap_or(0.0);
            let y = b.get(k).copied().unwrap_or(0.0);
            (x - y).abs()
        })
        .fold(0.0, f64::max)
}

/// Builds the structure-coefficient table and verifies, by acting on the
/// monomials Z^j (j ≤ n + 4), that the sl(2) combination reproduces the
/// gauge-transformed operator
///
///   Z·v'' + (−4BZ² − 2DZ + 2A + 1)·v' + (4nBZ + λ₂ − 2AD − D)·v
///
/// coefficientwise. A mismatch beyond 10⁻¹² (relative to the coefficient
/// scale) is an internal algebra failure, reported as
/// [`QesError::Consistency`].
pub fn sl2_match(
    cfg: &AnharmonicConfig,
    gauge: &GaugeTriple,
    l: &LambdaCoeffs,
) -> Result<Sl2Coeffs, QesError> {
    let n = cfg.n();
    let nf = f64::from(n);
    let (a, b, d) = (gauge.a, gauge.b, gauge.d);
    let c = Sl2Coeffs {
        c_pp: 0.0,
        c_p0: 0.0,
        c_pm: 0.0,
        c_0m: 1.0,
        c_mm: 0.0,
        c_p: -4.0 * b,
        c_0: -2.0 * d,
        c_m: nf / 2.0 + 2.0 * a + 1.0,
        c_const: -nf * d - 2.0 * a * d - d + l.l2,
    };

    let scale = 1.0_f64
        .max(b.abs())
        .max(d.abs())
        .max(a.abs())
        .max(l.l2.abs());
    for j in 0..=(n as usize + 4) {
        let mut mono = vec![0.0; j + 1];
        mono[j] = 1.0;

        // sl(2) side: C₀₋·J⁰J⁻ + C₊·J⁺ + C₀·J⁰ + C₋·J⁻ + C.
        let mut lhs = Vec::new();
        poly_add_scaled(&mut lhs, &apply_j0(&apply_jm(&mono, n), n), c.c_0m);
        poly_add_scaled(&mut lhs, &apply_jp(&mono, n), c.c_p);
        poly_add_scaled(&mut lhs, &apply_j0(&mono, n), c.c_0);
        poly_add_scaled(&mut lhs, &apply_jm(&mono, n), c.c_m);
        poly_add_scaled(&mut lhs, &mono, c.c_const);

        // Direct differential-operator side.
        let d1 = poly_deriv(&mono);
        let d2 = poly_deriv(&d1);
        let mut rhs = poly_shift(&d2, 1);
        poly_add_scaled(&mut rhs, &poly_shift(&d1, 2), -4.0 * b);
        poly_add_scaled(&mut rhs, &poly_shift(&d1, 1), -2.0 * d);
        poly_add_scaled(&mut rhs, &d1, 2.0 * a + 1.0);
        poly_add_scaled(&mut rhs, &poly_shift(&mono, 1), 4.0 * nf * b);
        poly_add_scaled(&mut rhs, &mono, l.l2 - 2.0 * a * d - d);

        let diff = poly_max_abs_diff(&lhs, &rhs);
        let tol = 1e-12 * scale * (1.0 + j as f64);
        if diff > tol {
            return Err(QesError::Consistency {
                detail: format!(
                    "generator reconstruction differs from the transformed operator on Z^{j}: max coefficient gap {diff:.3e} (tolerance {tol:.3e})"
                ),
            });
        }
    }
    Ok(c)
}

/// The energy constraint F(E) = 4nB − λ₃ + 4AB + 4B − D², whose zeros place
/// the transformed operator inside the degree-n sl(2) module.
pub fn constraint_residual(cfg: &AnharmonicConfig, e: f64) -> Result<f64, QesError> {
    let l = lambda_coeffs(cfg, e);
    let g = gauge_params(&l)?;
    let nf = f64::from(cfg.n());
    Ok(4.0 * nf * g.b - l.l3 + 4.0 * g.a * g.b + 4.0 * g.b - g.d * g.d)
}

/// The closed form the constraint root takes when λ² > 4ηw (in effective
/// couplings), written exactly in its circulated two-fraction shape:
///
///   E = [−mλ⁴ + 32η³(m′² + 4(1+n)² + X² + 4√(m′²+X²)(1+n))]/(λ²−4ηw)²
///       + 8mηw(λ²−2ηw)/(λ²−4ηw)².
///
/// Algebraically identical to E = −m + 128η³(n+A+1)²/(λ²−4ηw)². Returns
/// `None` when it fails to evaluate finitely (λ² = 4ηw). Note it produces a
/// number even when the constraint has no root (λ² < 4ηw); frontends log it
/// next to the authoritative root-found energies.
pub fn printed_energy_formula(cfg: &AnharmonicConfig) -> Option<f64> {
    let m = cfg.mass();
    let (w, lam, eta) = (cfg.w_eff(), cfg.lam_eff(), cfg.eta_eff());
    let x2 = cfg.xi_sum() * cfg.xi_sum();
    let mp2 = cfg.m_prime_sq();
    let np1 = f64::from(cfg.n()) + 1.0;
    let denom = (lam * lam - 4.0 * eta * w).powi(2);
    let e = (-m * lam.powi(4)
        + 32.0 * eta.powi(3) * (mp2 + 4.0 * np1 * np1 + x2 + 4.0 * (mp2 + x2).sqrt() * np1))
        / denom
        + 8.0 * m * eta * w * (lam * lam - 2.0 * eta * w) / denom;
    e.is_finite().then_some(e)
}

fn polish_root(f: impl Fn(f64) -> Option<f64>, mut e0: f64, mut e1: f64) -> f64 {
    // A few secant steps to push a bisected root to machine precision.
    let (mut f0, mut f1) = match (f(e0), f(e1)) {
        (Some(a), Some(b)) => (a, b),
        _ => return e1,
    };
    for _ in 0..8 {
        if f1 == f0 {
            break;
        }
        let e2 = e1 - f1 * (e1 - e0) / (f1 - f0);
        if !e2.is_finite() {
            break;
        }
        let f2 = match f(e2) {
            Some(v) if v.is_finite() => v,
            _ => break,
        };
        e0 = e1;
        f0 = f1;
        e1 = e2;
        f1 = f2;
        if f1 == 0.0 {
            break;
        }
    }
    e1
}

/// Solves the energy constraint F(E) = 0 on the branch E > −m by bracketed
/// scanning, polishing each root by secant iteration. Every returned energy
/// admits a valid gauge triple and satisfies the constraint to
/// [`CONSTRAINT_BOUND`] × scale.
pub fn qes_energy(cfg: &AnharmonicConfig) -> Result<Vec<f64>, QesError> {
    let m = cfg.mass();
    if cfg.eta_eff() <= 0.0 {
        // No E on the branch yields λ₅ < 0; report with λ₅ at E + m = 1.
        return Err(QesError::GaugeDomain {
            l5: -cfg.eta_eff() / 2.0,
            eta_epm: cfg.eta_eff(),
        });
    }
    let f = |e: f64| constraint_residual(cfg, e).ok();
    let eps = 1e-9 * m.max(1.0);

    // Size the window from the closed form when it exists, else expand.
    let discr = cfg.lam_eff().powi(2) - 4.0 * cfg.eta_eff() * cfg.w_eff();
    let mut span = if discr > 0.0 {
        let t = 128.0 * cfg.eta_eff().powi(3) * (f64::from(cfg.n()) + cfg.big_a() + 1.0).powi(2)
            / (discr * discr);
        (4.0 * t).max(1.0)
    } else {
        10.0 * m.max(1.0)
    };

    let mut roots = Vec::new();
    for _ in 0..6 {
        roots = find_roots(
            |e| f(e).unwrap_or(f64::NAN),
            -m + eps,
            -m + span,
            SCAN_PANELS,
            ROOT_TOL,
        );
        if !roots.is_empty() {
            break;
        }
        span *= 4.0;
    }
    let mut out = Vec::new();
    for &r in &roots {
        let delta = 1e-6 * r.abs().max(1.0);
        let e = polish_root(f, (r - delta).max(-m + eps / 2.0), r);
        if let Ok(res) = constraint_residual(cfg, e) {
            let l = lambda_coeffs(cfg, e);
            let g = gauge_params(&l)?;
            let scale = 1.0_f64
                .max(l.l3.abs())
                .max(g.d * g.d)
                .max(4.0 * g.b * (f64::from(cfg.n()) + g.a + 1.0));
            if res.abs() <= CONSTRAINT_BOUND * scale {
                out.push(e);
            }
        }
    }
    if out.is_empty() {
        let hint = if discr <= 0.0 {
            format!(
                "effective lambda^2 = {:.6e} <= 4*eta*w = {:.6e}: the constraint F(E) is positive on the whole branch; lower Omega (e.g. via calibration) or raise Lambda",
                cfg.lam_eff().powi(2),
                4.0 * cfg.eta_eff() * cfg.w_eff()
            )
        } else {
            "no sign change found in the scanned window".to_string()
        };
        return Err(QesError::NoRootFound {
            lo: -m + eps,
            hi: -m + span,
            panels: SCAN_PANELS,
            hint,
        });
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// Coefficients a₀ … a_{n_terms} of the polynomial part by the three-term
/// recursion derived from coefficient matching in the transformed operator:
///
///   a_{k+1}·(k+1)(2A+1+k) = −[λ₂ − 2AD − D(2k+1)]·a_k − 4B(n−k+1)·a_{k−1},
///
/// with a₀ = 1 and the a_{k−1} term absent at k = 0. (A circulated variant
/// prints the last numerator as −8Bk; coefficient matching gives
/// −4B(n−k+1), which coincides with it only at n = 2 seeds — the derived
/// form is used throughout.)
pub fn recursion_coeffs(
    cfg: &AnharmonicConfig,
    e: f64,
    gauge: &GaugeTriple,
    n_terms: usize,
) -> Vec<f64> {
    let l2 = lambda_coeffs(cfg, e).l2;
    let (a, b, d) = (gauge.a, gauge.b, gauge.d);
    let nf = f64::from(cfg.n());
    let mut coeffs = vec![1.0];
    for k in 0..n_terms {
        let kf = k as f64;
        let mut num = -(l2 - 2.0 * a * d - d * (2.0 * kf + 1.0)) * coeffs[k];
        if k >= 1 {
            num -= 4.0 * b * (nf - kf + 1.0) * coeffs[k - 1];
        }
        coeffs.push(num / ((kf + 1.0) * (2.0 * a + 1.0 + kf)));
    }
    coeffs
}

/// A fully assembled quasi-exact solution at one energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QesSolution {
    pub config: AnharmonicConfig,
    pub energy: f64,
    pub gauge: GaugeTriple,
    /// a₀ … a_{n+1}; the last entry is the truncation residual's source.
    pub coeffs: Vec<f64>,
    /// |a_{n+1}|: zero (≤ [`TRUNCATION_TOL`]) iff the polynomial terminates
    /// at degree n as the construction requires.
    pub truncation_residual: f64,
    pub sl2: Sl2Coeffs,
    /// The circulated closed-form energy, for logging.
    pub printed_energy: Option<f64>,
    /// |printed_energy − energy| when the former exists.
    pub printed_discrepancy: Option<f64>,
}

/// Runs the whole chain at the lowest constraint root: λ-coefficients,
/// gauge, sl(2) verification, recursion. The result's
/// `truncation_residual` is whatever the configuration produces; only
/// calibrated configurations drive it below [`TRUNCATION_TOL`].
pub fn solve_qes(cfg: &AnharmonicConfig) -> Result<QesSolution, QesError> {
    let energy = qes_energy(cfg)?[0];
    solve_qes_at(cfg, energy)
}

/// As [`solve_qes`] but at a caller-supplied energy (used by calibration,
/// which determines the energy from the truncation condition first).
pub fn solve_qes_at(cfg: &AnharmonicConfig, energy: f64) -> Result<QesSolution, QesError> {
    let l = lambda_coeffs(cfg, energy);
    let gauge = gauge_params(&l)?;
    let sl2 = sl2_match(cfg, &gauge, &l)?;
    let coeffs = recursion_coeffs(cfg, energy, &gauge, cfg.n() as usize + 1);
    let truncation_residual = coeffs[cfg.n() as usize + 1].abs();
    let printed = printed_energy_formula(cfg);
    Ok(QesSolution {
        config: *cfg,
        energy,
        gauge,
        truncation_residual,
        sl2,
        printed_discrepancy: printed.map(|p| (p - energy).abs()),
        printed_energy: printed,
        coeffs,
    })
}

/// The assembled radial eigenfunction
///
///   ψ(ρ) = Z^{−X/2} · Z^A · exp(−BZ² − DZ) · Σ_{k=0}^n a_k Z^k,  Z = ρ²,
///
/// unnormalized. Meaningful as an eigenfunction only when
/// `truncation_residual` ≤ [`TRUNCATION_TOL`]; the sum runs over the stored
/// coefficients through degree n regardless.
pub fn qes_wavefunction(sol: &QesSolution, rho: f64) -> f64 {
    let z = rho * rho;
    let p = sol.gauge.a - sol.config.xi_sum() / 2.0;
    let power = if p == 0.0 { 1.0 } else { z.powf(p) };
    let mut s = 0.0;
    for k in (0..=sol.config.n() as usize).rev() {
        s = s * z + sol.coeffs[k];
    }
    power * (-sol.gauge.b * z * z - sol.gauge.d * z).exp() * s
}

/// ψ, dψ/dρ, d²ψ/dρ² by analytic differentiation.
pub fn qes_wavefunction_derivs(sol: &QesSolution, rho: f64) -> (f64, f64, f64) {
    let z = rho * rho;
    let p = sol.gauge.a - sol.config.xi_sum() / 2.0;
    let (b, d) = (sol.gauge.b, sol.gauge.d);
    let n = sol.config.n() as usize;
    // Polynomial part and its Z-derivatives by Horner evaluation.
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for k in (0..=n).rev() {
        s2 = s2 * z + s1 * 2.0;
        s1 = s1 * z + s0;
        s0 = s0 * z + sol.coeffs[k];
    }
    let w = z.powf(p) * (-b * z * z - d * z).exp();
    let g = p / z - 2.0 * b * z - d; // W'/W
    let gp = -p / (z * z) - 2.0 * b; // g'
    let psi = w * s0;
    let psi_z = w * (g * s0 + s1);
    let psi_zz = w * ((g * g + gp) * s0 + 2.0 * g * s1 + s2);
    (psi, 2.0 * rho * psi_z, 4.0 * z * psi_zz + 2.0 * psi_z)
}

/// Pointwise residual of the radial equation
///
///   ψ'' + (1+2X)/ρ·ψ' + [E² − m² − 2(E+m)V(ρ) − m′²/ρ²]·ψ = 0
///
/// at the solution's energy, with the local scale (largest constituent term)
/// to judge it against.
pub fn ode_residual(sol: &QesSolution, rho: f64) -> (f64, f64) {
    let cfg = &sol.config;
    let e = sol.energy;
    let m = cfg.mass();
    let (psi, d1, d2) = qes_wavefunction_derivs(sol, rho);
    let drift = (1.0 + 2.0 * cfg.xi_sum()) / rho * d1;
    let pot =
        (e * e - m * m - 2.0 * (e + m) * cfg.potential(rho) - cfg.m_prime_sq() / (rho * rho)) * psi;
    let residual = d2 + drift + pot;
    let scale = d2.abs().max(drift.abs()).max(pot.abs());
    (residual, scale)
}

/// Which parameter [`calibrate_truncation`] may adjust.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeParameter {
    /// Bare quadratic coupling Ω (default; decouples, solved directly).
    Omega,
    /// Bare quartic coupling Λ (nested scan).
    Lambda,
    /// Second-axis deformation strength α₂ (nested scan; re-derives the
    /// angular constant).
    Alpha2,
    /// The angular constant m′² itself, detached from any deformation data.
    MPrimeSq,
}

impl std::fmt::Display for FreeParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FreeParameter::Omega => write!(f, "Omega"),
            FreeParameter::Lambda => write!(f, "Lambda"),
            FreeParameter::Alpha2 => write!(f, "alpha2"),
            FreeParameter::MPrimeSq => write!(f, "m_prime_sq"),
        }
    }
}

/// A calibration request: the full deformation context plus the designated
/// free parameter and an optional search interval for the nested scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationProblem {
    pub alphas: (f64, f64),
    pub betas: (f64, f64),
    pub a: f64,
    pub sector: ParitySector,
    pub n_phi: u32,
    pub mass: f64,
    pub big_omega: f64,
    pub big_lambda: f64,
    pub big_gamma: f64,
    pub n: u32,
    pub free: FreeParameter,
    /// Search interval for nested free parameters; defaults depend on the
    /// parameter. Ignored for `Omega`.
    pub search: Option<(f64, f64)>,
    /// When set, overrides the closed-form angular constant.
    pub m_prime_sq_override: Option<f64>,
}

impl CalibrationProblem {
    /// The problem's current configuration (free parameter at its stored
    /// value).
    pub fn config(&self) -> Result<AnharmonicConfig, CoreError> {
        let w = WignerParams {
            alpha1: self.alphas.0,
            beta1: self.betas.0,
            gamma1: self.a,
            alpha2: self.alphas.1,
            beta2: self.betas.1,
            gamma2: self.a,
        };
        let d = derive_params(&w)?;
        let m_prime_sq = match self.m_prime_sq_override {
            Some(v) => v,
            None => crate::azimuthal::m_prime_squared(&d, self.sector, self.n_phi)?,
        };
        Ok(AnharmonicConfig::new(
            self.mass,
            self.big_omega,
            self.big_lambda,
            self.big_gamma,
            self.a,
            d,
            m_prime_sq,
            self.n,
        )?)
    }

    /// Copy with the free parameter set to `v`.
    pub fn with_free_value(&self, v: f64) -> Self {
        let mut p = *self;
        match self.free {
            FreeParameter::Omega => p.big_omega = v,
            FreeParameter::Lambda => p.big_lambda = v,
            FreeParameter::Alpha2 => p.alphas.1 = v,
            FreeParameter::MPrimeSq => p.m_prime_sq_override = Some(v),
        }
        p
    }

    /// Current value of the free parameter.
    pub fn free_value(&self) -> Option<f64> {
        match self.free {
            FreeParameter::Omega => Some(self.big_omega),
            FreeParameter::Lambda => Some(self.big_lambda),
            FreeParameter::Alpha2 => Some(self.alphas.1),
            FreeParameter::MPrimeSq => self.m_prime_sq_override,
        }
    }

    fn default_search(&self) -> (f64, f64) {
        match self.free {
            FreeParameter::Omega => (0.0, 0.0), // unused
            FreeParameter::Lambda => (1e-3, 30.0),
            FreeParameter::Alpha2 => (0.05, 12.0),
            FreeParameter::MPrimeSq => (1e-6, 200.0),
        }
    }
}

/// A calibrated configuration with its quasi-exact solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibrated {
    /// The problem with the free parameter at its calibrated value.
    pub problem: CalibrationProblem,
    pub config: AnharmonicConfig,
    pub solution: QesSolution,
    pub free_value: f64,
}

/// Number of positive real roots of the polynomial part, by sign scan — the
/// radial node count contributed by Σ aₖZᵏ.
fn polynomial_node_count(coeffs: &[f64], n: usize) -> usize {
    let horner = |z: f64| {
        let mut s = 0.0;
        for k in (0..=n).rev() {
            s = s * z + coeffs[k];
        }
        s
    };
    let mut count = 0;
    let mut prev = horner(1e-9);
    for i in 1..=2000 {
        let z = 1e-9 + 50.0 * f64::from(i) / 2000.0;
        let v = horner(z);
        if prev != 0.0 && v != 0.0 && (prev < 0.0) != (v < 0.0) {
            count += 1;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    count
}

/// a_{n+1} as a function of trial energy alone (Ω-independent: the recursion
/// involves only A, B(E), D(E), λ₂(E)).
fn truncation_fn(cfg: &AnharmonicConfig, e: f64) -> Option<f64> {
    let l = lambda_coeffs(cfg, e);
    let g = gauge_params(&l).ok()?;
    let coeffs = recursion_coeffs(cfg, e, &g, cfg.n() as usize + 1);
    Some(coeffs[cfg.n() as usize + 1])
}

fn calibrate_omega(prob: &CalibrationProblem) -> Result<Calibrated, QesError> {
    let base = prob.config().map_err(|e| QesError::CalibrationFailed {
        parameter: prob.free.to_string(),
        reason: format!("base configuration invalid: {e}"),
        trace: vec![],
    })?;
    if base.eta_eff() <= 0.0 {
        return Err(QesError::GaugeDomain {
            l5: -base.eta_eff() / 2.0,
            eta_epm: base.eta_eff(),
        });
    }
    let m = base.mass();
    let f = |e: f64| truncation_fn(&base, e);
    // Scan the truncation condition a_{n+1}(E) = 0 over the branch. Every
    // window is scanned and the roots merged: the physically selected root
    // can sit far above the branch floor while spurious low-lying roots sit
    // inside the first window, so stopping at the first hit would miss it.
    let lo = -m + 1e-9 * m.max(1.0);
    let mut span = 10.0 * m.max(1.0);
    let mut raw = Vec::new();
    let mut trace = Vec::new();
    for _ in 0..7 {
        raw.extend(find_roots(
            |e| f(e).unwrap_or(f64::NAN),
            lo,
            -m + span,
            2 * SCAN_PANELS,
            ROOT_TOL,
        ));
        trace.push((-m + span, f(-m + span).unwrap_or(f64::NAN)));
        span *= 4.0;
    }
    // Polish, deduplicate (coarse windows re-find the fine-window roots),
    // then apply the branch policy: prefer energies whose polynomial part
    // carries exactly n nodes; break ties toward larger E.
    let mut polished: Vec<f64> = raw
        .iter()
        .map(|&r| {
            let delta = 1e-6 * r.abs().max(1.0);
            polish_root(f, (r - delta).max(-m + 1e-10), r)
        })
        .filter(|e| e.is_finite() && *e > -m)
        .collect();
    polished.sort_by(|a, b| a.partial_cmp(b).unwrap());
    polished.dedup_by(|a, b| (*a - *b).abs() <= 1e-7 * b.abs().max(1.0));
    if polished.is_empty() {
        return Err(QesError::CalibrationFailed {
            parameter: prob.free.to_string(),
            reason: "truncation condition a_{n+1}(E) = 0 has no root on the branch".into(),
            trace,
        });
    }
    let mut candidates = Vec::new();
    for &e in &polished {
        let l = lambda_coeffs(&base, e);
        if let Ok(g) = gauge_params(&l) {
            let coeffs = recursion_coeffs(&base, e, &g, base.n() as usize + 1);
            // Keep only genuinely truncating roots; a badly polished
            // coarse-window crossing must not steer the branch choice.
            let scale = coeffs[..=base.n() as usize]
                .iter()
                .fold(1.0_f64, |acc, c| acc.max(c.abs()));
            if coeffs[base.n() as usize + 1].abs() > 1e-6 * scale {
                continue;
            }
            let nodes = polynomial_node_count(&coeffs, base.n() as usize);
            candidates.push((e, nodes));
        }
    }
    if candidates.is_empty() {
        return Err(QesError::CalibrationFailed {
            parameter: prob.free.to_string(),
            reason: "no scanned root of a_{n+1}(E) = 0 survived polishing".into(),
            trace,
        });
    }
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let matching_max = candidates
        .iter()
        .filter(|(_, nodes)| *nodes == base.n() as usize)
        .map(|&(e, _)| e)
        .fold(f64::NAN, f64::max);
    let e_star = if matching_max.is_finite() {
        matching_max
    } else {
        candidates.last().map(|&(e, _)| e).unwrap()
    };

    // With E fixed, Ω follows from the constraint in closed form:
    // w = λ²/(4η) − 8B(n+A+1)/(E+m).
    let l = lambda_coeffs(&base, e_star);
    let g = gauge_params(&l)?;
    let w_eff = base.lam_eff().powi(2) / (4.0 * base.eta_eff())
        - 8.0 * g.b * (f64::from(base.n()) + g.a + 1.0) / (e_star + m);
    let big_omega = w_eff / (1.0 - base.a() * base.a());
    let calibrated_prob = prob.with_free_value(big_omega);
    finish_calibration(calibrated_prob, big_omega)
}

fn finish_calibration(prob: CalibrationProblem, value: f64) -> Result<Calibrated, QesError> {
    let config = prob.config().map_err(|e| QesError::CalibrationFailed {
        parameter: prob.free.to_string(),
        reason: format!("calibrated configuration invalid: {e}"),
        trace: vec![],
    })?;
    let solution = solve_qes(&config)?;
    if solution.truncation_residual > TRUNCATION_TOL {
        return Err(QesError::CalibrationFailed {
            parameter: prob.free.to_string(),
            reason: format!(
                "achieved |a_(n+1)| = {:.3e} exceeds {TRUNCATION_TOL:.1e} at {} = {value}",
                solution.truncation_residual, prob.free
            ),
            trace: vec![(value, solution.truncation_residual)],
        });
    }
    Ok(Calibrated {
        problem: prob,
        config,
        solution,
        free_value: value,
    })
}

/// Adjusts the designated free parameter so the recursion terminates:
/// |a_{n+1}| ≤ [`TRUNCATION_TOL`] at the constraint energy.
///
/// `Omega` decouples (the recursion does not involve w), so the truncation
/// condition is solved for E first and Ω recovered in closed form — the
/// calibrated configuration is then automatically inside the solvable regime
/// λ² > 4ηw. The other parameters nest a scan of the full chain.
pub fn calibrate_truncation(prob: &CalibrationProblem) -> Result<Calibrated, QesError> {
    if let FreeParameter::Omega = prob.free {
        return calibrate_omega(prob);
    }
    let (lo, hi) = prob.search.unwrap_or_else(|| prob.default_search());
    if !(lo < hi) {
        return Err(QesError::CalibrationFailed {
            parameter: prob.free.to_string(),
            reason: format!("empty search interval [{lo}, {hi}]"),
            trace: vec![],
        });
    }
    let mut trace = Vec::new();
    let h = |p: f64| -> Option<f64> {
        let cfg = prob.with_free_value(p).config().ok()?;
        let e = qes_energy(&cfg).ok()?[0];
        truncation_fn(&cfg, e)
    };
    let roots = find_roots(|p| h(p).unwrap_or(f64::NAN), lo, hi, SCAN_PANELS, ROOT_TOL);
    for &p in &roots {
        trace.push((p, h(p).unwrap_or(f64::NAN)));
    }
    let Some(&p0) = roots.first() else {
        // Record a few probes so the failure is diagnosable.
        for i in 0..8 {
            let p = lo + (hi - lo) * f64::from(i) / 7.0;
            trace.push((p, h(p).unwrap_or(f64::NAN)));
        }
        return Err(QesError::CalibrationFailed {
            parameter: prob.free.to_string(),
            reason: format!("no truncation root in search interval [{lo}, {hi}]"),
            trace,
        });
    };
    let p_star = polish_root(h, p0 * (1.0 - 1e-7) - 1e-9, p0);
    finish_calibration(prob.with_free_value(p_star), p_star)
}
