//! Pointwise-in-frequency energy and dissipation functionals.
//!
//! The energy couples |Z|², |Q|² and Re(Z·conj Q) through the weights
//! N + c_τ𝔍 and the low/high-frequency factors α, β. Its analytic time
//! derivative along the linear flow is assembled term by term here so the
//! certification never needs numerical differentiation.

use serde::{Deserialize, Serialize};

use crate::mode::integrate::mode_rhs;
use crate::mode::state::ModeState;
use crate::multipliers::{
    eval_alpha_beta, eval_g, eval_j_weight, eval_lambda, eval_n_weight, eval_p,
};
use crate::{Error, HypoConstants, PhysParams, Result};

/// The seven raw dissipation components, before their weight constants.
///
/// The total is γ + c_τ·τ + c_α·α + c_τc_α·τα + (1/√R)·ρ + (c_α/√R)·ρα +
/// c_β·β.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct DissipationParts {
    pub gamma: f64,
    pub tau: f64,
    pub alpha: f64,
    pub tau_alpha: f64,
    pub rho: f64,
    pub rho_alpha: f64,
    pub beta: f64,
}

impl DissipationParts {
    /// Weighted total dissipation D_k.
    pub fn total(&self, consts: &HypoConstants, richardson: f64) -> f64 {
        let c_rho = 1.0 / richardson.sqrt();
        self.gamma
            + consts.c_tau * self.tau
            + consts.c_alpha * self.alpha
            + consts.c_tau * consts.c_alpha * self.tau_alpha
            + c_rho * self.rho
            + consts.c_alpha * c_rho * self.rho_alpha
            + consts.c_beta * self.beta
    }
}

fn check_mode(state: &ModeState) -> Result<()> {
    if state.k == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    if !state.is_finite() {
        return Err(Error::domain("non-finite mode state".to_string()));
    }
    Ok(())
}

/// Pointwise energy E_k[Z, Q].
pub fn energy_k(state: &ModeState, consts: &HypoConstants, params: &PhysParams) -> Result<f64> {
    check_mode(state)?;
    let pt = state.point();
    let g = eval_g(pt)?;
    let n = eval_n_weight(pt, params.richardson)?;
    let j = eval_j_weight(pt)?;
    let (alpha, beta) = eval_alpha_beta(params.mu, state.k);
    let xi = pt.xi();
    let w = state.k * xi;
    let s = state.quad();
    let x = (state.z * state.q.conj()).re;
    let big_g = n + consts.c_tau * j;
    let isr = 0.5 / params.richardson.sqrt();

    let gamma_block = big_g * s + isr * g * big_g * x;
    let alpha_block = consts.c_alpha * alpha * (big_g * xi * xi * s + isr * g * big_g * xi * xi * x);
    let beta_block = consts.c_beta * beta * (w * s - isr * g * w * x);
    Ok(gamma_block + alpha_block + beta_block)
}

/// Raw dissipation components D_{k,*}.
pub fn dissipation_k(
    state: &ModeState,
    _consts: &HypoConstants,
    params: &PhysParams,
) -> Result<DissipationParts> {
    check_mode(state)?;
    let pt = state.point();
    let (p, _) = eval_p(pt);
    let (alpha, beta) = eval_alpha_beta(params.mu, state.k);
    let xi = pt.xi();
    let xi2 = xi * xi;
    let k2 = state.k * state.k;
    let k3 = state.k.abs().powi(3);
    let s = state.quad();

    Ok(DissipationParts {
        gamma: params.mu * p * s,
        tau: k2 / p * s,
        alpha: alpha * params.mu * p * xi2 * s,
        tau_alpha: alpha * k2 * xi2 / p * s,
        rho: k3 * p.powf(-1.5) * s,
        rho_alpha: alpha * k3 * xi2 * p.powf(-1.5) * s,
        beta: beta * k2 * s,
    })
}

/// Analytic d/dt of [`energy_k`] along the linear flow.
///
/// Uses ∂ₜN = −N·(2|k|³p^{−3/2})/(2√R−1), ∂ₜ𝔍 = −k²/(2p), ∂ₜ(η−kt)² =
/// −2k(η−kt) and the chain rule over the state equations.
pub fn denergy_dt(state: &ModeState, consts: &HypoConstants, params: &PhysParams) -> Result<f64> {
    check_mode(state)?;
    let pt = state.point();
    let (p, dp) = eval_p(pt);
    let g = eval_g(pt)?;
    let n = eval_n_weight(pt, params.richardson)?;
    let j = eval_j_weight(pt)?;
    let (alpha, beta) = eval_alpha_beta(params.mu, state.k);
    let sqrt_r = params.richardson.sqrt();
    let isr = 0.5 / sqrt_r;
    let xi = pt.xi();
    let xi2 = xi * xi;
    let w = state.k * xi;
    let k2 = state.k * state.k;
    let k3 = state.k.abs().powi(3);
    let s = state.quad();
    let x = (state.z * state.q.conj()).re;
    let delta = state.z.norm_sqr() - state.q.norm_sqr();

    let big_g = n + consts.c_tau * j;
    let dg_dt = 2.0 * k3 * p.powf(-1.5);
    let dn_dt = -n * dg_dt / (2.0 * sqrt_r - 1.0);
    let dj_dt = -0.5 * k2 / p;
    let dbig_g = dn_dt + consts.c_tau * dj_dt;

    let a = 0.25 * dp / p;
    let b = sqrt_r * state.k.abs() / p.sqrt();
    let ds_dt = -2.0 * a * delta
        - 2.0 * p * (params.nu * state.z.norm_sqr() + params.kappa * state.q.norm_sqr());
    let dx_dt = b * delta - (params.nu + params.kappa) * p * x;

    let gamma_block =
        dbig_g * s + big_g * ds_dt + isr * (dg_dt * big_g * x + g * dbig_g * x + g * big_g * dx_dt);

    let alpha_block = consts.c_alpha
        * alpha
        * (dbig_g * xi2 * s - 2.0 * w * big_g * s + big_g * xi2 * ds_dt
            + isr
                * (dg_dt * big_g * xi2 * x + g * dbig_g * xi2 * x - 2.0 * w * g * big_g * x
                    + g * big_g * xi2 * dx_dt));

    let beta_block = consts.c_beta
        * beta
        * (-k2 * s + w * ds_dt - isr * (dg_dt * w * x - g * k2 * x + g * w * dx_dt));

    Ok(gamma_block + alpha_block + beta_block)
}

/// λ(μ, k) for the state's parameters.
pub fn lambda_for(state: &ModeState, params: &PhysParams) -> f64 {
    eval_lambda(params.mu, params.nu, state.k)
}

/// Finite-difference step sized to the local stiffness, balancing the
/// O(h²) truncation of the central difference against roundoff.
pub fn suggested_fd_step(state: &ModeState, params: &PhysParams) -> f64 {
    let (p, _) = eval_p(state.point());
    let stiff = (params.nu + params.kappa) * p + 4.0;
    (1e-3 / stiff).min(1e-5)
}

/// Central finite difference of E_k along the flow, the oracle for
/// [`denergy_dt`]. Steps the state with RK4 micro-steps of size `h`
/// (`h <= 0` picks [`suggested_fd_step`]).
pub fn denergy_dt_fd(
    state: &ModeState,
    consts: &HypoConstants,
    params: &PhysParams,
    h: f64,
) -> Result<f64> {
    let h = if h > 0.0 { h } else { suggested_fd_step(state, params) };
    let fwd = crate::mode::integrate::rk4_step(state, params, h)?;
    let bwd = crate::mode::integrate::rk4_step(state, params, -h)?;
    Ok((energy_k(&fwd, consts, params)? - energy_k(&bwd, consts, params)?) / (2.0 * h))
}

/// Residual of the quadratic energy identity along the flow:
/// d/dt(|Z|²+|Q|²) + 2p(ν|Z|²+κ|Q|²) + (∂ₜp/2p)(|Z|²−|Q|²) = 0.
pub fn quad_identity_residual(state: &ModeState, params: &PhysParams) -> Result<f64> {
    let (dz, dq) = mode_rhs(state, params)?;
    let (p, dp) = eval_p(state.point());
    let d_quad = 2.0 * (state.z.conj() * dz + state.q.conj() * dq).re;
    let diffusive = 2.0 * p * (params.nu * state.z.norm_sqr() + params.kappa * state.q.norm_sqr());
    let breathing = 0.5 * dp / p * (state.z.norm_sqr() - state.q.norm_sqr());
    Ok(d_quad + diffusive + breathing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::default_constants;
    use crate::Complex;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn setup() -> (HypoConstants, PhysParams) {
        (default_constants(1.0, 0.1).unwrap(), PhysParams::new(0.01, 0.01, 1.0, 0.1).unwrap())
    }

    #[test]
    fn energy_at_critical_time_is_plain_quad() {
        let (consts, params) = setup();
        // η = kt: cross, α and β blocks vanish, N = 1, 𝔍 = 0
        let s = ModeState::new(1.0, 2.0, 2.0, c(1.0, 0.0), c(0.0, 0.0));
        assert!((energy_k(&s, &consts, &params).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_state_gives_zero_energy_and_dissipation() {
        let (consts, params) = setup();
        let s = ModeState::new(1.0, 5.0, 1.0, c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(energy_k(&s, &consts, &params).unwrap(), 0.0);
        let d = dissipation_k(&s, &consts, &params).unwrap();
        assert_eq!(d.total(&consts, params.richardson), 0.0);
        assert_eq!(denergy_dt(&s, &consts, &params).unwrap(), 0.0);
    }

    #[test]
    fn dissipation_components_at_critical_time() {
        let (consts, params) = setup();
        let s = ModeState::new(1.0, 3.0, 3.0, c(1.0, 0.0), c(0.0, 0.0));
        let d = dissipation_k(&s, &consts, &params).unwrap();
        assert!((d.gamma - 0.005).abs() < 1e-15);
        assert!((d.tau - 1.0).abs() < 1e-15);
        assert!((d.rho - 1.0).abs() < 1e-15);
        assert!((d.beta - eval_lambda(params.mu, params.nu, 1.0)).abs() < 1e-15);
        assert_eq!(d.alpha, 0.0);
        assert_eq!(d.tau_alpha, 0.0);
        assert_eq!(d.rho_alpha, 0.0);
    }

    #[test]
    fn rejects_zero_frequency() {
        let (consts, params) = setup();
        let s = ModeState::new(0.0, 1.0, 0.0, c(1.0, 0.0), c(0.0, 0.0));
        assert!(energy_k(&s, &consts, &params).is_err());
        assert!(dissipation_k(&s, &consts, &params).is_err());
        assert!(denergy_dt(&s, &consts, &params).is_err());
    }

    #[test]
    fn analytic_derivative_matches_finite_difference_single_point() {
        let (consts, params) = setup();
        let s = ModeState::new(1.0, 3.0, 1.0, c(0.3, 0.1), c(-0.2, 0.0));
        let analytic = denergy_dt(&s, &consts, &params).unwrap();
        let fd = denergy_dt_fd(&s, &consts, &params, 1e-5).unwrap();
        assert!(
            (analytic - fd).abs() < 1e-6 * (1.0 + analytic.abs()),
            "analytic {analytic} fd {fd}"
        );
    }

    #[test]
    fn analytic_derivative_matches_finite_difference_many_states() {
        let (consts, params) = setup();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let k: f64 = if rng.random_bool(0.5) {
                rng.random_range(0.05..8.0)
            } else {
                -rng.random_range(0.05..8.0)
            };
            let eta: f64 = rng.random_range(-30.0..30.0);
            let t: f64 = rng.random_range(0.0..50.0);
            let s = ModeState::new(
                k,
                eta,
                t,
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            );
            let analytic = denergy_dt(&s, &consts, &params).unwrap();
            let fd = denergy_dt_fd(&s, &consts, &params, 0.0).unwrap();
            assert!(
                (analytic - fd).abs() < 1e-6 * (1.0 + analytic.abs()),
                "k={k} eta={eta} t={t}: analytic {analytic} fd {fd}"
            );
        }
    }

    #[test]
    fn derivative_at_critical_time_inviscid_hand_expression() {
        // η = kt with ν = κ = 0: only weight derivatives act
        let consts = default_constants(1.0, 0.1).unwrap();
        let params = PhysParams::inviscid(1.0, 0.1).unwrap();
        let (k, t) = (2.0f64, 1.5f64);
        let s = ModeState::new(k, k * t, t, c(0.4, -0.3), c(0.1, 0.2), );
        let sq = s.quad();
        let x = (s.z * s.q.conj()).re;
        let sqrt_r = 1.0;
        // p = k², ∂ₜg = 2/|k|? no: 2|k|³/p^{3/2} = 2|k|³/|k|³ = 2
        let dn_dt = -2.0 / (2.0 * sqrt_r - 1.0);
        let dj_dt = -0.5;
        // β, α blocks: μ = 0 in inviscid runs, so they vanish entirely
        let hand = (dn_dt + consts.c_tau * dj_dt) * sq + 0.5 * 2.0 * 1.0 * x;
        let code = denergy_dt(&s, &consts, &params).unwrap();
        assert!((code - hand).abs() < 1e-13 * (1.0 + hand.abs()), "code {code} hand {hand}");
    }

    #[test]
    fn energy_is_coercive_on_sampled_grid() {
        // measured floor: E ≥ 0.06·(|Z|²+|Q|²)(1 + c_α α ξ²); the analytic
        // infimum of the γ block alone is e^{−2}(1 − 1/2) ≈ 0.0677 at R = 1
        let (consts, params) = setup();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut min_ratio = f64::INFINITY;
        for _ in 0..4000 {
            let k: f64 = rng.random_range(-10.0f64..10.0);
            if k.abs() < 1e-3 {
                continue;
            }
            let eta: f64 = rng.random_range(-50.0..50.0);
            let t: f64 = rng.random_range(0.0..200.0);
            let s = ModeState::new(
                k,
                eta,
                t,
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            );
            if s.quad() < 1e-6 {
                continue;
            }
            let e = energy_k(&s, &consts, &params).unwrap();
            let (alpha, _) = eval_alpha_beta(params.mu, k);
            let floor = s.quad() * (1.0 + consts.c_alpha * alpha * s.point().xi().powi(2));
            let ratio = e / floor;
            min_ratio = min_ratio.min(ratio);
            assert!(ratio > 0.06, "coercivity ratio {ratio} at k={k}, eta={eta}, t={t}");
        }
        // and the floor really is approached
        assert!(min_ratio < 0.5, "sampled minimum ratio {min_ratio}");
    }
}
