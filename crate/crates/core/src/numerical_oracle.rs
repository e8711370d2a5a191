//! Grid-based eigensolvers used to cross-check every closed form.
//!
//! Both the angular and the radial problems are brought to Liouville normal
//! form −χ'' + q(x)·χ = λ·χ on an interval, discretized by the standard
//! central second difference on an inclusive node grid, and solved with a
//! hand-rolled symmetric-tridiagonal eigensolver (Sturm-sequence bisection
//! plus inverse iteration). Every eigenvalue is computed on the grid and on
//! its midpoint refinement (2n − 1 nodes), Richardson-extrapolated
//! (4λ_fine − λ_coarse)/3, and the gap |λ_fine − λ_coarse|/3 is kept as the
//! convergence estimate.
//!
//! The radial problem is nonlinear in the energy (the coupling to the
//! potential carries a factor E + m), so radial energies come from a secant
//! iteration on g(E) = μ_j(E) − (E² − m²), where μ_j is the j-th grid
//! eigenvalue of the fixed-E operator.

use serde::{Deserialize, Serialize};

use crate::anharmonic_qes::AnharmonicConfig;
use crate::azimuthal::compute_k;
use crate::error::OracleError;
use crate::harmonic_radial::HarmonicConfig;
use crate::operator_params::{DerivedParams, ParitySector};
use crate::CoreError;

/// Fewest nodes a grid may carry.
pub const MIN_POINTS: usize = 64;

/// Relative Richardson-gap tolerance above which a spectrum is rejected.
pub const RICHARDSON_REL_TOL: f64 = 1e-4;

/// Default node count for the angular problem.
pub const DEFAULT_ANGULAR_POINTS: usize = 2048;

/// Default node count for the radial problem.
pub const DEFAULT_RADIAL_POINTS: usize = 4096;

/// Default distance the angular grid keeps from each singular endpoint.
pub const ANGULAR_OFFSET: f64 = 1e-4;

/// Default distance the radial grid keeps from the origin.
pub const RADIAL_OFFSET: f64 = 1e-4;

/// Secant iteration cap for the nonlinear radial solve.
pub const SECANT_MAX_ITER: usize = 50;

/// Endpoint condition imposed on χ at a grid edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// χ = 0 at the endpoint (the endpoint node is removed).
    Dirichlet,
    /// χ' = 0 at the endpoint, via a reflected ghost node; the resulting
    /// row asymmetry is removed by a diagonal 1/√2 similarity.
    Neumann,
}

/// An inclusive node grid: x_i = x_min + i·h, h = (x_max − x_min)/(n − 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub left: Boundary,
    pub right: Boundary,
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), OracleError> {
        if !self.x_min.is_finite() || !self.x_max.is_finite() || !(self.x_min < self.x_max) {
            return Err(OracleError::BadGrid(format!(
                "need finite x_min < x_max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.n_points < MIN_POINTS {
            return Err(OracleError::BadGrid(format!(
                "n_points = {} below the minimum {MIN_POINTS}",
                self.n_points
            )));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    /// Same interval and conditions at half the spacing (2n − 1 nodes).
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            n_points: 2 * self.n_points - 1,
            ..*self
        }
    }

    /// The nodes that carry unknowns (endpoint nodes drop under Dirichlet).
    pub fn interior_nodes(&self) -> Vec<f64> {
        let h = self.h();
        let start = usize::from(self.left == Boundary::Dirichlet);
        let end = self.n_points - 1 - usize::from(self.right == Boundary::Dirichlet);
        (start..=end).map(|i| self.x_min + i as f64 * h).collect()
    }
}

/// A symmetric tridiagonal matrix (diagonal + one off-diagonal).
#[derive(Debug, Clone)]
pub struct SymTri {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTri {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x`, by the Sturm sequence of
    /// the shifted LDLᵀ factorization.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            let e = self.off[i - 1];
            let denom = if q.abs() < 1e-300 {
                if q < 0.0 {
                    -1e-300
                } else {
                    1e-300
                }
            } else {
                q
            };
            q = (self.diag[i] - x) - e * e / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The k-th smallest eigenvalue (k = 0 is the lowest), by bisection
    /// between the Gershgorin bounds.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.dim() {
            let r = self.off.get(i).map_or(0.0, |e| e.abs())
                + if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= k + 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn eigenvalues(&self, count: usize) -> Vec<f64> {
        (0..count).map(|k| self.eigenvalue(k)).collect()
    }

    /// Normalized eigenvector for an eigenvalue estimate, by inverse
    /// iteration with a partial-pivoting tridiagonal solve. Deterministic:
    /// starts from the constant vector, fixes the sign so the largest
    /// component is positive.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..4 {
            let w = self.solve_shifted(lambda, &v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                break;
            }
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / norm;
            }
        }
        let mut imax = 0;
        for i in 1..n {
            if v[i].abs() > v[imax].abs() {
                imax = i;
            }
        }
        if v[imax] < 0.0 {
            for vi in &mut v {
                *vi = -*vi;
            }
        }
        v
    }

    /// Solves (T − λI)x = b by Gaussian elimination with partial pivoting
    /// (the shifted system is near-singular by design; the pivoting keeps
    /// the solve stable and the inverse iteration snaps to the eigenvector).
    fn solve_shifted(&self, lambda: f64, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut d: Vec<f64> = self.diag.iter().map(|x| x - lambda).collect();
        let mut c = self.off.clone(); // superdiagonal
        let mut s2 = vec![0.0; n]; // second superdiagonal fill-in
        let mut r = b.to_vec();
        for i in 0..n - 1 {
            let sub = self.off[i];
            if d[i].abs() >= sub.abs() {
                let piv = if d[i] == 0.0 { 1e-300 } else { d[i] };
                let m = sub / piv;
                d[i + 1] -= m * c[i];
                if i + 1 < n - 1 {
                    // c[i + 1] untouched; no fill beyond it
                }
                r[i + 1] -= m * r[i];
                s2[i] = 0.0;
            } else {
                // Swap rows i and i+1, then eliminate.
                let (di, ci) = (d[i], c[i]);
                d[i] = sub;
                c[i] = d[i + 1];
                s2[i] = if i + 1 < n - 1 { c[i + 1] } else { 0.0 };
                let m = di / d[i];
                d[i + 1] = ci - m * c[i];
                if i + 1 < n - 1 {
                    c[i + 1] = -m * s2[i];
                }
                r.swap(i, i + 1);
                r[i + 1] -= m * r[i];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = r[i];
            if i + 1 < n {
                acc -= c[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= s2[i] * x[i + 2];
            }
            let piv = if d[i] == 0.0 { 1e-300 } else { d[i] };
            x[i] = acc / piv;
        }
        x
    }
}

/// Central-difference discretization of −χ'' + q(x)χ on the grid's interior
/// nodes; symmetric by construction (Neumann ghost rows are symmetrized by
/// the 1/√2 similarity).
pub fn discretize(grid: &GridSpec, q: &dyn Fn(f64) -> f64) -> Result<SymTri, OracleError> {
    grid.validate()?;
    let nodes = grid.interior_nodes();
    let dim = nodes.len();
    if dim < 3 {
        return Err(OracleError::BadGrid(format!(
            "only {dim} interior nodes remain"
        )));
    }
    let h2 = grid.h() * grid.h();
    let mut diag = Vec::with_capacity(dim);
    for &x in &nodes {
        let v = q(x);
        if !v.is_finite() {
            return Err(OracleError::BadGrid(format!(
                "potential not finite at x = {x}"
            )));
        }
        diag.push(2.0 / h2 + v);
    }
    let mut off = vec![-1.0 / h2; dim - 1];
    if grid.left == Boundary::Neumann {
        off[0] = -std::f64::consts::SQRT_2 / h2;
    }
    if grid.right == Boundary::Neumann {
        off[dim - 2] = -std::f64::consts::SQRT_2 / h2;
    }
    Ok(SymTri { diag, off })
}

/// Undoes the Neumann similarity on an eigenvector of the discretized
/// operator, returning χ values at the grid's interior nodes.
pub fn recover_chi(grid: &GridSpec, mut v: Vec<f64>) -> Vec<f64> {
    let s = std::f64::consts::SQRT_2;
    if grid.left == Boundary::Neumann {
        v[0] *= s;
    }
    if grid.right == Boundary::Neumann {
        let last = v.len() - 1;
        v[last] *= s;
    }
    v
}

/// A converged spectrum: Richardson-extrapolated eigenvalues, the gap-based
/// error estimates, and the fine grid they were computed on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub estimates: Vec<f64>,
    pub grid: GridSpec,
}

/// Coarse + refined eigensolves with Richardson extrapolation. When
/// `enforce` is set, a relative gap above [`RICHARDSON_REL_TOL`] is a
/// [`OracleError::Convergence`] failure.
fn extrapolated_eigenvalues(
    grid: &GridSpec,
    q: &dyn Fn(f64) -> f64,
    count: usize,
    enforce: bool,
) -> Result<SpectrumResult, OracleError> {
    let coarse = discretize(grid, q)?;
    let fine_grid = grid.refined();
    let fine = discretize(&fine_grid, q)?;
    let mut eigenvalues = Vec::with_capacity(count);
    let mut estimates = Vec::with_capacity(count);
    for k in 0..count {
        let lc = coarse.eigenvalue(k);
        let lf = fine.eigenvalue(k);
        let ext = (4.0 * lf - lc) / 3.0;
        let est = (lf - lc).abs() / 3.0;
        if enforce && est > RICHARDSON_REL_TOL * ext.abs().max(1.0) {
            return Err(OracleError::Convergence {
                index: k,
                estimate: est,
                threshold: RICHARDSON_REL_TOL * ext.abs().max(1.0),
                coarse: lc,
                fine: lf,
            });
        }
        eigenvalues.push(ext);
        estimates.push(est);
    }
    Ok(SpectrumResult {
        eigenvalues,
        estimates,
        grid: fine_grid,
    })
}

/// Below this, a barrier coefficient (k² − 1)/4 counts as exactly zero and
/// its endpoint as regular.
const BARRIER_EPS: f64 = 1e-14;

/// The symmetrized angular potential: both 1/cos² and 1/sin² barriers from
/// the reflection data, with the −(ξ₁+ξ₂)² shift folded in so the
/// eigenvalues are directly m′² values. Vanishing barrier coefficients are
/// dropped outright, keeping the potential finite at a regular endpoint.
pub fn angular_potential(d: &DerivedParams, k1: f64, k2: f64) -> impl Fn(f64) -> f64 {
    let x = d.xi1 + d.xi2;
    let clip = |c: f64| if c.abs() < BARRIER_EPS { 0.0 } else { c };
    let (c1, c2) = (clip((k1 * k1 - 1.0) / 4.0), clip((k2 * k2 - 1.0) / 4.0));
    move |phi: f64| {
        let (s, c) = phi.sin_cos();
        let b1 = if c1 == 0.0 { 0.0 } else { c1 / (c * c) };
        let b2 = if c2 == 0.0 { 0.0 } else { c2 / (s * s) };
        b1 + b2 - x * x
    }
}

/// The default angular grid on (0, π/2) with the sector's natural
/// conditions — even reflection parity on an axis keeps the derivative,
/// odd parity kills the value (axis 1 is the φ = π/2 end, axis 2 is φ = 0).
/// An endpoint with a genuine barrier is kept at distance δ; a regular one
/// (vanishing barrier coefficient) is reached exactly.
pub fn default_angular_grid(
    d: &DerivedParams,
    sector: ParitySector,
) -> Result<GridSpec, CoreError> {
    let (k1, k2) = compute_k(d, sector)?;
    let bc = |r: i8| {
        if r > 0 {
            Boundary::Neumann
        } else {
            Boundary::Dirichlet
        }
    };
    let offset = |k: f64| {
        if ((k * k - 1.0) / 4.0).abs() < BARRIER_EPS {
            0.0
        } else {
            ANGULAR_OFFSET
        }
    };
    Ok(GridSpec {
        x_min: offset(k2),
        x_max: std::f64::consts::FRAC_PI_2 - offset(k1),
        n_points: DEFAULT_ANGULAR_POINTS,
        left: bc(sector.r2_int()),
        right: bc(sector.r1_int()),
    })
}

/// Grid spectrum of the angular operator: the lowest `count` m′² values in
/// the given sector. A caller-supplied grid overrides both the interval and
/// the boundary conditions (useful when a strong barrier forces the
/// wavefunction to zero regardless of parity).
pub fn angular_spectrum(
    d: &DerivedParams,
    sector: ParitySector,
    count: usize,
    grid: Option<GridSpec>,
) -> Result<SpectrumResult, CoreError> {
    let (k1, k2) = compute_k(d, sector)?;
    let grid = match grid {
        Some(g) => g,
        None => default_angular_grid(d, sector)?,
    };
    let q = angular_potential(d, k1, k2);
    Ok(extrapolated_eigenvalues(&grid, &q, count, true)?)
}

/// m′² for one angular mode from the grid rather than the closed form.
/// Mode indexing follows the grid operator; for weak barriers (k < 2) the
/// self-adjoint extension the grid conditions select can differ from the
/// closed form's, which is reported by the verification layer rather than
/// treated as an error.
pub fn oracle_m_prime_sq(
    d: &DerivedParams,
    sector: ParitySector,
    n_phi: u32,
) -> Result<f64, CoreError> {
    let spec = angular_spectrum(d, sector, n_phi as usize + 1, None)?;
    Ok(spec.eigenvalues[n_phi as usize])
}

/// Which radial problem the oracle is checking.
#[derive(Debug, Clone, Copy)]
pub enum RadialProblem {
    Harmonic(HarmonicConfig),
    Anharmonic(AnharmonicConfig),
}

impl RadialProblem {
    pub fn mass(&self) -> f64 {
        match self {
            RadialProblem::Harmonic(c) => c.mass(),
            RadialProblem::Anharmonic(c) => c.mass(),
        }
    }

    pub fn m_prime_sq(&self) -> f64 {
        match self {
            RadialProblem::Harmonic(c) => c.m_prime_sq(),
            RadialProblem::Anharmonic(c) => c.m_prime_sq(),
        }
    }

    pub fn xi_sum(&self) -> f64 {
        match self {
            RadialProblem::Harmonic(c) => c.xi_sum(),
            RadialProblem::Anharmonic(c) => c.xi_sum(),
        }
    }

    /// The confining potential V(ρ).
    pub fn potential(&self, rho: f64) -> f64 {
        match self {
            RadialProblem::Harmonic(c) => {
                0.5 * c.mass() * c.omega() * (1.0 - c.a() * c.a()) * rho * rho
            }
            RadialProblem::Anharmonic(c) => c.potential(rho),
        }
    }

    /// The Liouville-form coefficient at trial energy E:
    /// q(ρ) = (m′² + X² − ¼)/ρ² + 2(E + m)V(ρ), so that the eigenvalue
    /// plays the role of E² − m².
    pub fn liouville_q(&self, e: f64) -> impl Fn(f64) -> f64 + '_ {
        let cent = self.m_prime_sq() + self.xi_sum().powi(2) - 0.25;
        let m = self.mass();
        move |rho: f64| cent / (rho * rho) + 2.0 * (e + m) * self.potential(rho)
    }
}

/// Default radial grid for a problem near reference energy `e_ref`:
/// (δ, R) with Dirichlet walls. R is doubled until the potential wall
/// clears ten times the eigenvalue target, then doubled further until the
/// WKB decay integral over the outer classically forbidden region exceeds
/// 20 (tail amplitude below ~2e-9 at the wall). The second pass matters
/// because domain truncation error is invisible to grid-refinement checks:
/// both grids share the same wall.
pub fn default_radial_grid(p: &RadialProblem, e_ref: f64) -> GridSpec {
    let m = p.mass();
    let target = 10.0 * (e_ref * e_ref - m * m).max(1.0);
    let mut r = 1.0;
    while 2.0 * (e_ref + m) * p.potential(r) < target && r < 1e6 {
        r *= 2.0;
    }
    let mu = (e_ref * e_ref - m * m).max(0.0);
    let q = p.liouville_q(e_ref);
    while r < 1e6 && wkb_tail_action(&q, mu, RADIAL_OFFSET, r) < 20.0 {
        r *= 2.0;
    }
    GridSpec {
        x_min: RADIAL_OFFSET,
        x_max: r,
        n_points: DEFAULT_RADIAL_POINTS,
        left: Boundary::Dirichlet,
        right: Boundary::Dirichlet,
    }
}

/// Trapezoid estimate of ∫ √(q − μ) from the outermost classical turning
/// point to `r`. When no sample is classically allowed (q ≤ μ nowhere),
/// integration starts at the minimum of q so the centrifugal spike at the
/// origin cannot masquerade as outer-tail decay.
fn wkb_tail_action(q: &impl Fn(f64) -> f64, mu: f64, x_min: f64, r: f64) -> f64 {
    const SAMPLES: usize = 2048;
    let h = (r - x_min) / SAMPLES as f64;
    let qs: Vec<f64> = (0..=SAMPLES).map(|i| q(x_min + i as f64 * h)).collect();
    let start = match qs.iter().rposition(|&v| v <= mu) {
        Some(i) => i,
        None => {
            let mut arg = 0;
            for (i, &v) in qs.iter().enumerate() {
                if v < qs[arg] {
                    arg = i;
                }
            }
            arg
        }
    };
    let mut action = 0.0;
    for i in start..SAMPLES {
        let fa = (qs[i] - mu).max(0.0).sqrt();
        let fb = (qs[i + 1] - mu).max(0.0).sqrt();
        action += 0.5 * (fa + fb) * h;
    }
    action
}

fn mu_extrapolated(
    p: &RadialProblem,
    grid: &GridSpec,
    e: f64,
    j: usize,
    enforce: bool,
) -> Result<f64, OracleError> {
    let q = p.liouville_q(e);
    let spec = extrapolated_eigenvalues(grid, &q, j + 1, enforce)?;
    Ok(spec.eigenvalues[j])
}

/// Solves the nonlinear radial eigenproblem for the level nearest a seed
/// energy: the level index is fixed by matching μ_j(E_seed) to
/// E_seed² − m², then g(E) = μ_j(E) − (E² − m²) is driven to zero by secant
/// iteration. The converged energy is re-checked at the Richardson
/// tolerance.
pub fn radial_level_near(
    p: &RadialProblem,
    e_seed: f64,
    grid: Option<GridSpec>,
) -> Result<f64, OracleError> {
    let m = p.mass();
    let grid = grid.unwrap_or_else(|| default_radial_grid(p, e_seed));

    // Classify the level index at the seed.
    let q = p.liouville_q(e_seed);
    let probe = extrapolated_eigenvalues(&grid, &q, 12, false)?;
    let target = e_seed * e_seed - m * m;
    let mut j = 0;
    for (i, &mu) in probe.eigenvalues.iter().enumerate() {
        if (mu - target).abs() < (probe.eigenvalues[j] - target).abs() {
            j = i;
        }
    }

    let g = |e: f64| -> Result<f64, OracleError> {
        Ok(mu_extrapolated(p, &grid, e, j, false)? - (e * e - m * m))
    };
    let mut e0 = e_seed;
    let mut f0 = g(e0)?;
    let mut e1 = e_seed + 1e-4 * e_seed.abs().max(1.0);
    let mut f1 = g(e1)?;
    let mut converged = None;
    for _ in 0..SECANT_MAX_ITER {
        if f1 == f0 {
            break;
        }
        let e2 = e1 - f1 * (e1 - e0) / (f1 - f0);
        if !e2.is_finite() || e2 <= -m {
            break;
        }
        let f2 = g(e2)?;
        e0 = e1;
        f0 = f1;
        e1 = e2;
        f1 = f2;
        if (e1 - e0).abs() <= 1e-10 * e1.abs().max(1.0) {
            converged = Some(e1);
            break;
        }
    }
    let Some(e) = converged else {
        return Err(OracleError::IterationCap {
            max_iter: SECANT_MAX_ITER,
            last_e: e1,
            residual: f1,
        });
    };
    // Final validation at the converged energy enforces the Richardson gap.
    mu_extrapolated(p, &grid, e, j, true)?;
    Ok(e)
}

/// The grid eigenvector of the fixed-E radial operator for the level whose
/// eigenvalue sits nearest E² − m², on the refined grid: returns the node
/// positions and the χ samples (sign-fixed, ℓ²-normalized).
pub fn radial_eigenvector(
    p: &RadialProblem,
    e: f64,
    grid: Option<GridSpec>,
) -> Result<(Vec<f64>, Vec<f64>), OracleError> {
    let m = p.mass();
    let grid = grid.unwrap_or_else(|| default_radial_grid(p, e));
    let fine = grid.refined();
    let q = p.liouville_q(e);
    let t = discretize(&fine, &q)?;
    let target = e * e - m * m;
    let mut j = 0;
    let mut best = f64::INFINITY;
    for k in 0..12 {
        let mu = t.eigenvalue(k);
        if (mu - target).abs() < best {
            best = (mu - target).abs();
            j = k;
        }
    }
    let lambda = t.eigenvalue(j);
    let v = recover_chi(&fine, t.eigenvector(lambda));
    Ok((fine.interior_nodes(), v))
}

/// The lowest `count` radial energies, each found by bracketing
/// g_j(E) = μ_j(E) − (E² − m²) over the physical branch E > −m and
/// polishing by secant through [`radial_level_near`]-style iteration.
pub fn radial_spectrum(
    p: &RadialProblem,
    count: usize,
    grid: Option<GridSpec>,
) -> Result<SpectrumResult, OracleError> {
    let m = p.mass();
    let mut energies = Vec::with_capacity(count);
    let mut estimates = Vec::with_capacity(count);
    let mut fine_grid = None;
    for j in 0..count {
        // Bracket the crossing by doubling the upper end.
        let e_lo = -m + 1e-6 * m.max(1.0);
        let mut e_hi = m.abs().max(1.0) + 1.0;
        let g = |e: f64, gr: &GridSpec| -> Result<f64, OracleError> {
            Ok(mu_extrapolated(p, gr, e, j, false)? - (e * e - m * m))
        };
        let mut found = None;
        for _ in 0..14 {
            let working_grid = grid.unwrap_or_else(|| default_radial_grid(p, e_hi));
            if g(e_hi, &working_grid)? < 0.0 {
                found = Some(working_grid);
                break;
            }
            e_hi *= 2.0;
        }
        let Some(working_grid) = found else {
            return Err(OracleError::NoCrossing {
                lo: e_lo,
                hi: e_hi,
                level: j,
            });
        };
        // Bisect to a tight bracket, then hand off to the secant solver.
        let (mut lo, mut hi) = (e_lo, e_hi);
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            if g(mid, &working_grid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let seed = 0.5 * (lo + hi);
        let e = radial_level_near(p, seed, Some(working_grid))?;
        let q = p.liouville_q(e);
        let spec = extrapolated_eigenvalues(&working_grid, &q, j + 1, true)?;
        energies.push(e);
        estimates.push(spec.estimates[j]);
        fine_grid = Some(spec.grid);
    }
    Ok(SpectrumResult {
        eigenvalues: energies,
        estimates,
        grid: fine_grid.unwrap_or_else(|| grid.unwrap_or_else(|| default_radial_grid(p, m + 1.0))),
    })
}

/// |⟨u, v⟩| / (‖u‖‖v‖) for two sampled functions on the same nodes.
pub fn overlap(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot.abs() / (nu * nv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic_radial::{harmonic_wavefunction, solve_levels};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn plain_grid(a: f64, b: f64, n: usize, left: Boundary, right: Boundary) -> GridSpec {
        GridSpec {
            x_min: a,
            x_max: b,
            n_points: n,
            left,
            right,
        }
    }

    #[test]
    fn grid_validation_rejects_bad_input() {
        assert!(matches!(
            plain_grid(0.0, 1.0, 10, Boundary::Dirichlet, Boundary::Dirichlet).validate(),
            Err(OracleError::BadGrid(_))
        ));
        assert!(matches!(
            plain_grid(2.0, 1.0, 128, Boundary::Dirichlet, Boundary::Dirichlet).validate(),
            Err(OracleError::BadGrid(_))
        ));
        assert!(
            plain_grid(0.0, 1.0, 64, Boundary::Dirichlet, Boundary::Dirichlet)
                .validate()
                .is_ok()
        );
    }

    #[test]
    fn free_particle_box_spectrum() {
        // −χ'' = λχ on (0, π), χ(0) = χ(π) = 0: λ = 1, 4, 9, 16.
        let grid = plain_grid(
            0.0,
            std::f64::consts::PI,
            501,
            Boundary::Dirichlet,
            Boundary::Dirichlet,
        );
        let spec = extrapolated_eigenvalues(&grid, &|_| 0.0, 4, true).unwrap();
        for (j, &l) in spec.eigenvalues.iter().enumerate() {
            let exact = ((j + 1) * (j + 1)) as f64;
            assert_relative_eq!(l, exact, max_relative = 1e-7);
        }
    }

    #[test]
    fn free_particle_neumann_spectrum_and_vector() {
        // χ'(0) = χ'(π) = 0: λ = 0, 1, 4, 9 with χ = cos(jx).
        let grid = plain_grid(
            0.0,
            std::f64::consts::PI,
            501,
            Boundary::Neumann,
            Boundary::Neumann,
        );
        let spec = extrapolated_eigenvalues(&grid, &|_| 0.0, 4, true).unwrap();
        assert_abs_diff_eq!(spec.eigenvalues[0], 0.0, epsilon = 1e-9);
        for j in 1..4 {
            assert_relative_eq!(spec.eigenvalues[j], (j * j) as f64, max_relative = 1e-6);
        }
        // Eigenvector of the first excited mode matches cos(x).
        let t = discretize(&grid, &|_| 0.0).unwrap();
        let v = recover_chi(&grid, t.eigenvector(t.eigenvalue(1)));
        let nodes = grid.interior_nodes();
        let exact: Vec<f64> = nodes.iter().map(|&x| x.cos()).collect();
        assert!(overlap(&v, &exact) > 0.999_999);
    }

    #[test]
    fn quantum_harmonic_oscillator_levels() {
        // −χ'' + x²χ = λχ on the line: λ = 1, 3, 5, 7.
        let grid = plain_grid(-9.0, 9.0, 901, Boundary::Dirichlet, Boundary::Dirichlet);
        let spec = extrapolated_eigenvalues(&grid, &|x| x * x, 4, true).unwrap();
        for (j, &l) in spec.eigenvalues.iter().enumerate() {
            assert_relative_eq!(l, (2 * j + 1) as f64, max_relative = 1e-7);
        }
    }

    #[test]
    fn sturm_count_and_inverse_iteration_agree() {
        let grid = plain_grid(0.0, 4.0, 201, Boundary::Dirichlet, Boundary::Dirichlet);
        let t = discretize(&grid, &|x| 3.0 * x).unwrap();
        let l2 = t.eigenvalue(2);
        assert_eq!(t.count_below(l2 - 1e-6), 2);
        assert_eq!(t.count_below(l2 + 1e-6), 3);
        let v = t.eigenvector(l2);
        // Residual ‖(T − λ)v‖ small relative to ‖T‖-scale.
        let mut worst: f64 = 0.0;
        for i in 0..t.dim() {
            let mut r = (t.diag[i] - l2) * v[i];
            if i > 0 {
                r += t.off[i - 1] * v[i - 1];
            }
            if i + 1 < t.dim() {
                r += t.off[i] * v[i + 1];
            }
            worst = worst.max(r.abs());
        }
        assert!(
            worst <= 1e-7 * t.diag[0].abs().max(l2.abs()),
            "residual {worst}"
        );
    }

    #[test]
    fn angular_standard_sectors_match_free_spectra() {
        // Zero deformation makes both barriers vanish (k = 1), leaving a
        // free particle on (0, π/2) whose spectrum is set by the parity
        // conditions alone.
        let d = DerivedParams::zero();
        let pp = angular_spectrum(&d, ParitySector::PP, 4, None).unwrap();
        for (l, want) in pp.eigenvalues.iter().zip([0.0, 4.0, 16.0, 36.0]) {
            if want == 0.0 {
                assert_abs_diff_eq!(*l, 0.0, epsilon = 1e-6);
            } else {
                assert_relative_eq!(*l, want, max_relative = 1e-4);
            }
        }
        let mm = angular_spectrum(&d, ParitySector::MM, 4, None).unwrap();
        for (l, want) in mm.eigenvalues.iter().zip([4.0, 16.0, 36.0, 64.0]) {
            assert_relative_eq!(*l, want, max_relative = 1e-4);
        }
        let pm = angular_spectrum(&d, ParitySector::PM, 3, None).unwrap();
        for (l, want) in pm.eigenvalues.iter().zip([1.0, 9.0, 25.0]) {
            assert_relative_eq!(*l, want, max_relative = 1e-4);
        }
    }

    #[test]
    fn angular_deformed_barrier_matches_poschl_teller() {
        // α = β = 0.5, γ = 0 gives k = 2 on both axes in the even sector:
        // m′² = (3 + 2n)² − 1 = 8, 24, 48. The barrier forces χ → 0 at the
        // walls, so explicit Dirichlet conditions pick the right extension.
        let w = crate::operator_params::WignerParams::symmetric(0.5, 0.5, 0.0);
        let d = crate::operator_params::derive_params(&w).unwrap();
        let grid = GridSpec {
            left: Boundary::Dirichlet,
            right: Boundary::Dirichlet,
            ..default_angular_grid(&d, ParitySector::PP).unwrap()
        };
        let spec = angular_spectrum(&d, ParitySector::PP, 3, Some(grid)).unwrap();
        for (l, want) in spec.eigenvalues.iter().zip([8.0, 24.0, 48.0]) {
            assert_relative_eq!(*l, want, max_relative = 1e-4);
        }
        // And the closed form agrees for this strong-barrier case.
        for n_phi in 0..3u32 {
            let closed = crate::azimuthal::m_prime_squared(&d, ParitySector::PP, n_phi).unwrap();
            assert_relative_eq!(
                spec.eigenvalues[n_phi as usize],
                closed,
                max_relative = 1e-4
            );
        }
    }

    #[test]
    fn coarse_grid_fails_convergence_check() {
        let d = DerivedParams::zero();
        let grid = GridSpec {
            n_points: 64,
            ..default_angular_grid(&d, ParitySector::MM).unwrap()
        };
        match angular_spectrum(&d, ParitySector::MM, 4, Some(grid)) {
            Err(CoreError::Oracle(OracleError::Convergence { index, .. })) => {
                assert!(index >= 1);
            }
            other => panic!("expected Convergence error, got {other:?}"),
        }
    }

    fn isotropic_harmonic(n: u32) -> HarmonicConfig {
        HarmonicConfig::new(1.0, 1.0, 0.0, DerivedParams::zero(), 4.0, n).unwrap()
    }

    #[test]
    fn radial_oracle_reproduces_harmonic_anchor() {
        let cfg = isotropic_harmonic(0);
        let closed = solve_levels(&cfg).unwrap().energy();
        let p = RadialProblem::Harmonic(cfg);
        let e = radial_level_near(&p, 3.7, None).unwrap();
        assert_relative_eq!(e, closed, max_relative = 1e-5);
        // A sloppier seed still lands on the same level.
        let e2 = radial_level_near(&p, 3.3, None).unwrap();
        assert_relative_eq!(e2, e, max_relative = 1e-9);
    }

    #[test]
    fn radial_oracle_eigenvector_matches_closed_form() {
        let cfg = isotropic_harmonic(0);
        let level = solve_levels(&cfg).unwrap();
        let e = level.energy();
        let p = RadialProblem::Harmonic(cfg);
        let (nodes, chi) = radial_eigenvector(&p, e, None).unwrap();
        let x = cfg.xi_sum();
        let closed: Vec<f64> = nodes
            .iter()
            .map(|&rho| rho.powf(0.5 + x) * harmonic_wavefunction(&level, rho))
            .collect();
        assert!(overlap(&chi, &closed) > 0.9999);
    }

    #[test]
    fn radial_spectrum_scan_matches_closed_levels() {
        let p = RadialProblem::Harmonic(isotropic_harmonic(0));
        let spec = radial_spectrum(&p, 2, None).unwrap();
        for (j, &e) in spec.eigenvalues.iter().enumerate() {
            let cfg_j = isotropic_harmonic(j as u32);
            let closed = solve_levels(&cfg_j).unwrap().energy();
            assert_relative_eq!(e, closed, max_relative = 1e-4);
        }
        assert!(spec.eigenvalues[0] < spec.eigenvalues[1]);
    }

    #[test]
    fn radial_oracle_confirms_reduced_sextic_case() {
        // The exactly solvable sextic configuration with E = 1.
        let cfg =
            AnharmonicConfig::new(1.0, -4.0, 0.0, 1.0, 0.0, DerivedParams::zero(), 4.0, 0).unwrap();
        let p = RadialProblem::Anharmonic(cfg);
        let e = radial_level_near(&p, 1.1, None).unwrap();
        assert_relative_eq!(e, 1.0, max_relative = 1e-4);
        // Eigenvector against χ = ρ^{1/2}·ρ²·exp(−ρ⁴/2).
        let (nodes, chi) = radial_eigenvector(&p, e, None).unwrap();
        let closed: Vec<f64> = nodes
            .iter()
            .map(|&rho| rho.powf(2.5) * (-0.5 * rho.powi(4)).exp())
            .collect();
        assert!(overlap(&chi, &closed) > 0.999);
    }
}
