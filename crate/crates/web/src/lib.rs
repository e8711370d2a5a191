//! JSON-string bindings for the single-page browser demo. Each function
//! takes a JSON request and returns a JSON response; on wasm32 they are
//! exported through wasm-bindgen, natively they are ordinary functions and
//! unit-tested as such. Errors come back as `{"error": "..."}` rather than
//! exceptions so the page can render them inline.

use dunklosc::anharmonic_qes::{
    calibrate_truncation, qes_wavefunction, CalibrationProblem, FreeParameter,
};
use dunklosc::azimuthal;
use dunklosc::harmonic_radial::{solve_levels, HarmonicConfig};
use dunklosc::operator_params::derive_params;
use dunklosc::{ParitySector, WignerParams};
use serde::Deserialize;
use serde_json::json;

#[cfg(target_arch = "wasm32")]
use wasm_bindgen::prelude::wasm_bindgen;

fn fail(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn sector_of(r1: i8, r2: i8) -> Result<ParitySector, String> {
    ParitySector::new(r1, r2).map_err(|e| e.to_string())
}

fn dragged(a: f64, alpha: f64, beta: f64) -> WignerParams {
    WignerParams {
        alpha1: alpha,
        beta1: beta,
        gamma1: a,
        alpha2: alpha,
        beta2: beta,
        gamma2: a,
    }
}

#[derive(Deserialize)]
struct CurvesRequest {
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    beta: Option<f64>,
    #[serde(default)]
    r1: Option<i8>,
    #[serde(default)]
    r2: Option<i8>,
    #[serde(default)]
    n_phi: Option<u32>,
    #[serde(default)]
    mass: Option<f64>,
    #[serde(default)]
    omega: Option<f64>,
    #[serde(default)]
    levels: Option<u32>,
    #[serde(default)]
    a_min: Option<f64>,
    #[serde(default)]
    a_max: Option<f64>,
    #[serde(default)]
    count: Option<usize>,
}

/// Harmonic-branch energy curves E(a) for n = 0..levels, with the reflection
/// deformations dragged by a. Points where the configuration is invalid
/// (|a| too close to 1) come back as null so the plot can show gaps.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn energy_curves(request: &str) -> String {
    let req: CurvesRequest = match serde_json::from_str(request) {
        Ok(r) => r,
        Err(e) => return fail(format!("bad request: {e}")),
    };
    let alpha = req.alpha.unwrap_or(0.5);
    let beta = req.beta.unwrap_or(0.5);
    let n_phi = req.n_phi.unwrap_or(2);
    let mass = req.mass.unwrap_or(1.0);
    let omega = req.omega.unwrap_or(1.0);
    let levels = req.levels.unwrap_or(3).clamp(1, 8);
    let a_min = req.a_min.unwrap_or(0.0);
    let a_max = req.a_max.unwrap_or(0.99);
    let count = req.count.unwrap_or(60).clamp(2, 400);
    let sector = match sector_of(req.r1.unwrap_or(1), req.r2.unwrap_or(1)) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if !(a_min.is_finite() && a_max.is_finite() && a_min < a_max) {
        return fail("need finite a_min < a_max");
    }

    let a_grid: Vec<f64> = (0..count)
        .map(|i| a_min + (a_max - a_min) * i as f64 / (count - 1) as f64)
        .collect();
    let mut curves = Vec::new();
    for n in 0..levels {
        let es: Vec<Option<f64>> = a_grid
            .iter()
            .map(|&a| {
                let w = dragged(a, alpha, beta);
                let d = derive_params(&w).ok()?;
                let m_prime_sq = azimuthal::m_prime_squared(&d, sector, n_phi).ok()?;
                let cfg = HarmonicConfig::new(mass, omega, a, d, m_prime_sq, n).ok()?;
                Some(solve_levels(&cfg).ok()?.energy())
            })
            .collect();
        curves.push(json!({ "n": n, "e": es }));
    }
    json!({ "a": a_grid, "curves": curves }).to_string()
}

#[derive(Deserialize)]
struct AngularRequest {
    #[serde(default)]
    alpha1: Option<f64>,
    #[serde(default)]
    beta1: Option<f64>,
    #[serde(default)]
    gamma1: Option<f64>,
    #[serde(default)]
    alpha2: Option<f64>,
    #[serde(default)]
    beta2: Option<f64>,
    #[serde(default)]
    gamma2: Option<f64>,
    #[serde(default)]
    n_phi_max: Option<u32>,
}

/// Angular constants for all four parity sectors of one deformation:
/// per sector the barrier strengths k₁, k₂ and m′² for n_φ = 0..n_phi_max.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn angular_modes(request: &str) -> String {
    let req: AngularRequest = match serde_json::from_str(request) {
        Ok(r) => r,
        Err(e) => return fail(format!("bad request: {e}")),
    };
    let w = WignerParams {
        alpha1: req.alpha1.unwrap_or(0.5),
        beta1: req.beta1.unwrap_or(0.5),
        gamma1: req.gamma1.unwrap_or(-0.6),
        alpha2: req.alpha2.unwrap_or(0.5),
        beta2: req.beta2.unwrap_or(0.5),
        gamma2: req.gamma2.unwrap_or(-0.6),
    };
    let n_max = req.n_phi_max.unwrap_or(4).min(12);
    let mut sectors = Vec::new();
    for (r1, r2) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
        let sector = match sector_of(r1, r2) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        let label = format!(
            "({},{})",
            if r1 == 1 { "+" } else { "-" },
            if r2 == 1 { "+" } else { "-" }
        );
        match azimuthal::solve(&w, sector, 0) {
            Ok(first) => {
                let mut ms = vec![Some(first.m_prime_sq)];
                for n_phi in 1..=n_max {
                    ms.push(
                        azimuthal::solve(&w, sector, n_phi)
                            .ok()
                            .map(|s| s.m_prime_sq),
                    );
                }
                sectors.push(json!({
                    "r1": r1, "r2": r2, "label": label,
                    "k1": first.k1, "k2": first.k2,
                    "m_prime_sq": ms,
                }));
            }
            Err(e) => {
                sectors.push(json!({
                    "r1": r1, "r2": r2, "label": label,
                    "error": e.to_string(),
                }));
            }
        }
    }
    json!({ "sectors": sectors }).to_string()
}

#[derive(Deserialize)]
struct SexticRequest {
    #[serde(default)]
    alpha1: Option<f64>,
    #[serde(default)]
    beta1: Option<f64>,
    #[serde(default)]
    alpha2: Option<f64>,
    #[serde(default)]
    beta2: Option<f64>,
    #[serde(default)]
    a: Option<f64>,
    #[serde(default)]
    r1: Option<i8>,
    #[serde(default)]
    r2: Option<i8>,
    #[serde(default)]
    n_phi: Option<u32>,
    #[serde(default)]
    mass: Option<f64>,
    #[serde(default, rename = "Lambda")]
    big_lambda: Option<f64>,
    #[serde(default, rename = "Gamma")]
    big_gamma: Option<f64>,
    #[serde(default)]
    n: Option<u32>,
    #[serde(default)]
    samples: Option<usize>,
}

/// Sextic branch: calibrate the quadratic coupling Ω so the n-th level is
/// exactly solvable, and return Ω*, the energy, the truncation residual,
/// and a sup-normalized radial profile ψ(ρ) for plotting.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn sextic_calibrated(request: &str) -> String {
    let req: SexticRequest = match serde_json::from_str(request) {
        Ok(r) => r,
        Err(e) => return fail(format!("bad request: {e}")),
    };
    let sector = match sector_of(req.r1.unwrap_or(1), req.r2.unwrap_or(1)) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let prob = CalibrationProblem {
        alphas: (req.alpha1.unwrap_or(0.5), req.alpha2.unwrap_or(6.908326)),
        betas: (req.beta1.unwrap_or(1.0), req.beta2.unwrap_or(1.0)),
        a: req.a.unwrap_or(-0.5),
        sector,
        n_phi: req.n_phi.unwrap_or(1),
        mass: req.mass.unwrap_or(1.0),
        big_omega: 1.0,
        big_lambda: req.big_lambda.unwrap_or(3.0),
        big_gamma: req.big_gamma.unwrap_or(1.0),
        n: req.n.unwrap_or(1).min(6),
        free: FreeParameter::Omega,
        search: None,
        m_prime_sq_override: None,
    };
    let cal = match calibrate_truncation(&prob) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let samples = req.samples.unwrap_or(200).clamp(16, 2000);
    let b = cal.solution.gauge.b;
    let rho_max = (25.0 / b).powf(0.25);
    let rho: Vec<f64> = (0..samples)
        .map(|i| rho_max * (i + 1) as f64 / samples as f64)
        .collect();
    let mut psi: Vec<f64> = rho
        .iter()
        .map(|&r| qes_wavefunction(&cal.solution, r))
        .collect();
    let sup = psi.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if sup > 0.0 {
        for v in &mut psi {
            *v /= sup;
        }
    }
    json!({
        "omega_star": cal.free_value,
        "energy": cal.solution.energy,
        "truncation_residual": cal.solution.truncation_residual,
        "rho": rho,
        "psi": psi,
    })
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn energy_curves_hit_the_undeformed_anchor() {
        let out = energy_curves(
            r#"{"alpha": 0, "beta": 0, "n_phi": 0, "levels": 1, "a_min": 0, "a_max": 0.5, "count": 3}"#,
        );
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        let e0 = v["curves"][0]["e"][0].as_f64().unwrap();
        assert!((e0 - 3.752317474967829).abs() < 1e-9, "anchor: {e0}");
        let last = v["curves"][0]["e"][2].as_f64().unwrap();
        assert!(last < e0, "E(a) decreases over [0, 0.5]");
    }

    #[test]
    fn angular_modes_standard_limit_is_exact() {
        let out = angular_modes(
            r#"{"alpha1":0,"beta1":0,"gamma1":0,"alpha2":0,"beta2":0,"gamma2":0,"n_phi_max":3}"#,
        );
        let v: Value = serde_json::from_str(&out).unwrap();
        let sectors = v["sectors"].as_array().unwrap();
        assert_eq!(sectors.len(), 4);
        let pp = &sectors[0];
        assert_eq!(pp["label"], "(+,+)");
        for (i, want) in [4.0, 16.0, 36.0, 64.0].iter().enumerate() {
            let got = pp["m_prime_sq"][i].as_f64().unwrap();
            assert!((got - want).abs() < 1e-12, "n_phi={i}: {got} vs {want}");
        }
    }

    #[test]
    fn sextic_calibration_matches_frozen_solution() {
        let out = sextic_calibrated(
            r#"{"alpha1":0,"alpha2":0,"beta1":0,"beta2":0,"a":0,"n_phi":0,"Lambda":2,"Gamma":1,"n":1,"samples":64}"#,
        );
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        let omega = v["omega_star"].as_f64().unwrap();
        let energy = v["energy"].as_f64().unwrap();
        assert!((omega - -2.0).abs() < 1e-9, "Omega* = {omega}");
        assert!((energy - 7.0).abs() < 1e-9, "E = {energy}");
        assert!(v["truncation_residual"].as_f64().unwrap() <= 1e-10);
        let psi = v["psi"].as_array().unwrap();
        assert_eq!(psi.len(), 64);
        let sup = psi
            .iter()
            .map(|x| x.as_f64().unwrap().abs())
            .fold(0.0, f64::max);
        assert!((sup - 1.0).abs() < 1e-12, "profile is sup-normalized");
    }

    #[test]
    fn errors_come_back_as_json() {
        let v: Value = serde_json::from_str(&energy_curves("not json")).unwrap();
        assert!(v["error"].as_str().unwrap().contains("bad request"));
        let v: Value = serde_json::from_str(&energy_curves(r#"{"a_min": 1, "a_max": 0}"#)).unwrap();
        assert!(v.get("error").is_some());
        let v: Value = serde_json::from_str(&angular_modes(r#"{"gamma1": 1.5}"#)).unwrap();
        let sectors = v["sectors"].as_array().unwrap();
        assert!(sectors.iter().all(|s| s.get("error").is_some()));
    }
}
