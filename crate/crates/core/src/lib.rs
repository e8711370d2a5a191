//! Spectra and eigenfunctions of two-dimensional Klein-Gordon oscillators
//! built on generalized Dunkl derivatives.
//!
//! The derivative on each Cartesian axis carries a three-parameter Wigner
//! deformation,
//!
//! ```text
//! D_i = d/dx_i + alpha_i/x_i + (beta_i/x_i) R_i + gamma_i (d/dx_i) R_i,
//! ```
//!
//! where `R_i` reflects the i-th coordinate. In stretched polar coordinates
//! the Klein-Gordon problem separates into an azimuthal equation (solved in
//! closed form, module [`azimuthal`]) and a radial equation, solved in closed
//! form for the harmonic oscillator ([`harmonic_radial`]) and by a
//! quasi-exactly-solvable gauge-transformation construction for the sextic
//! anharmonic oscillator ([`anharmonic_qes`]). Every closed form is checked
//! against independent finite-difference eigensolvers ([`numerical_oracle`]).
//!
//! Conventions used throughout:
//! * axis 1 is the cos side of the polar angle (endpoint φ = π/2), axis 2 the
//!   sin side (endpoint φ = 0);
//! * a parity sector fixes the reflection eigenvalues (r₁, r₂) ∈ {±1}²;
//! * `a` denotes the common oscillator deformation γ₁ = γ₂ = a, |a| < 1.

pub mod anharmonic_qes;
pub mod azimuthal;
pub mod error;
pub mod harmonic_radial;
pub mod numerical_oracle;
pub mod operator_params;
pub mod special_functions;

pub use error::{AzimuthalError, CoreError, HarmonicError, OracleError, ParamError, QesError};
pub use operator_params::{DerivedParams, ParitySector, ValidationReport, WignerParams};
