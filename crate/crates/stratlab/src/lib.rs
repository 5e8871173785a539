//! Numerical laboratory for stratified Couette flow in the 2D Boussinesq system.
//!
//! The crate is organized around the moving-frame, symmetrized formulation of
//! the perturbation equations:
//!
//! * [`params`] — physical parameters (ν, κ, R, ε), the derived diffusion
//!   scale μ, and the weight constants of the hypocoercive energy together
//!   with their smallness conditions.
//! * [`multipliers`] — every Fourier multiplier and time weight used by the
//!   energy method: p, ∂ₜp, λ, α, β, N, 𝔍 and the correction factor M.
//! * [`mode`] — the decoupled per-frequency linear system for (Z, Q), an
//!   adaptive integrator with exact diffusive integrating factor, the
//!   pointwise energy/dissipation functionals, Lyapunov certification over
//!   frequency grids, and decay-rate sweeps.
//! * [`spectral`] — a desk-scale nonlinear pseudo-spectral solver for the
//!   moving-frame system (Ω, Θ) with 2/3-rule dealiasing, the nonlinear
//!   energy ledger, and the bootstrap monotonicity monitor.
//! * [`norms`] — the anisotropic norm families V, W and H̃ evaluated on
//!   truncated wavenumber lattices, plus rate fitting.
//! * [`harness`] — configuration files, scenario orchestration, CSV and
//!   snapshot persistence, and run manifests.

// `!(x > 0.0)` guards intentionally treat NaN as out of range
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod mode;
pub mod multipliers;
pub mod norms;
pub mod params;
pub mod spectral;

pub use error::Error;
pub use params::{HypoConstants, PhysParams};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex scalar used for all spectral coefficients.
pub type Complex = num_complex::Complex<f64>;
