//! The decoupled per-frequency linear system: integration, energy
//! functionals, Lyapunov certification and rate measurement.

pub mod certify;
pub mod energy;
pub mod integrate;
pub mod rates;
pub mod state;

pub use certify::{certify_grid, CertificationReport, CertifyOptions, PointCertificate};
pub use energy::{denergy_dt, dissipation_k, energy_k, DissipationParts};
pub use integrate::{integrate_mode, mode_rhs, p_integral, IntegrateOpts};
pub use rates::{inviscid_equivalence, sweep_rates, RateSweepRow};
pub use state::{symmetrize_pair, unsymmetrize_pair, ModeState, ModeTrajectory, Symmetrization};
