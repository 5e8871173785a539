//! Decay-rate sweeps over x-frequency and the inviscid norm equivalence.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::mode::energy::energy_k;
use crate::mode::integrate::{integrate_mode, IntegrateOpts};
use crate::mode::state::{unsymmetrize_pair, ModeState, ModeTrajectory, Symmetrization};
use crate::multipliers::{eval_lambda, eval_p};
use crate::norms::fit::{fit_exponential, RateFit};
use crate::{Complex, Error, HypoConstants, PhysParams, Result};

/// Fitted envelope rate for one x-frequency.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateSweepRow {
    pub k: f64,
    pub eta0: f64,
    pub lambda: f64,
    pub rate: f64,
    pub rate_over_lambda: f64,
    pub std_err: f64,
    pub window: (f64, f64),
}

/// Fits the exponential envelope rate of E_k(t) for each listed k.
///
/// The mode starts from (Z, Q) = (1, 0) at (k, η₀) and the fit runs over the
/// tail window [t_end/2, t_end]; early times carry the transient ⟨t⟩^{1/2}
/// growth mechanism and are excluded. A fit whose rate is nonpositive or
/// drowned by its own standard error is reported as a per-k failure.
pub fn sweep_rates(
    params: &PhysParams,
    consts: &HypoConstants,
    k_list: &[f64],
    eta0: f64,
    t_end: f64,
    tol: f64,
) -> Vec<(f64, Result<RateSweepRow>)> {
    k_list
        .par_iter()
        .map(|&k| (k, sweep_one(params, consts, k, eta0, t_end, tol)))
        .collect()
}

fn sweep_one(
    params: &PhysParams,
    consts: &HypoConstants,
    k: f64,
    eta0: f64,
    t_end: f64,
    tol: f64,
) -> Result<RateSweepRow> {
    if !params.is_admissible() {
        return Err(Error::domain(
            "rate sweeps need viscous admissible parameters".to_string(),
        ));
    }
    if k == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let init = ModeState::new(k, eta0, 0.0, Complex::new(1.0, 0.0), Complex::new(0.0, 0.0));
    // cap steps so the tail window holds enough samples for the fit
    let opts = IntegrateOpts { tol, max_step: Some(t_end / 128.0) };
    let traj = integrate_mode(&init, params, t_end, opts)?;
    let series: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .map(|s| Ok((s.t, energy_k(s, consts, params)?)))
        .collect::<Result<_>>()?;
    let window = (0.5 * t_end, t_end);
    let fit: RateFit = fit_exponential(&series, window)?;
    let lambda = eval_lambda(params.mu, params.nu, k);
    if fit.exponent <= 0.0 {
        return Err(Error::Fit(format!(
            "envelope not decaying over the fit window at k = {k} (rate {})",
            fit.exponent
        )));
    }
    if fit.std_err > 0.5 * fit.exponent.abs() {
        return Err(Error::Fit(format!(
            "envelope not in the asymptotic regime at k = {k} (rate {} ± {})",
            fit.exponent, fit.std_err
        )));
    }
    Ok(RateSweepRow {
        k,
        eta0,
        lambda,
        rate: fit.exponent,
        rate_over_lambda: fit.exponent / lambda,
        std_err: fit.std_err,
        window,
    })
}

/// Extremal ratios of |p^{−1/4}Ω_k|² + |p^{1/4}Θ_k|² against its t = 0
/// value along an inviscid trajectory.
pub fn inviscid_equivalence(traj: &ModeTrajectory, richardson: f64) -> Result<(f64, f64)> {
    if traj.nu != 0.0 || traj.kappa != 0.0 {
        return Err(Error::domain(
            "inviscid equivalence requires a trajectory with nu = kappa = 0".to_string(),
        ));
    }
    let quantity = |s: &ModeState| -> Result<f64> {
        let (omega, theta) =
            unsymmetrize_pair(Symmetrization::Main, s.z, s.q, s.k, s.eta, s.t, richardson)?;
        let (p, _) = eval_p(s.point());
        let p4 = p.sqrt().sqrt();
        Ok((omega / p4).norm_sqr() + (theta * p4).norm_sqr())
    };
    let q0 = quantity(&traj.samples[0])?;
    if q0 <= 0.0 {
        return Err(Error::domain("zero initial state has no equivalence ratio".to_string()));
    }
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    for s in &traj.samples {
        let r = quantity(s)? / q0;
        min_ratio = min_ratio.min(r);
        max_ratio = max_ratio.max(r);
    }
    Ok((min_ratio, max_ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::default_constants;

    #[test]
    fn inviscid_equivalence_stays_bounded() {
        let params = PhysParams::inviscid(1.0, 0.1).unwrap();
        for &eta in &[0.0, 5.0, 20.0] {
            let init =
                ModeState::new(1.0, eta, 0.0, Complex::new(1.0, 0.0), Complex::new(0.0, 0.0));
            let traj =
                integrate_mode(&init, &params, 200.0, IntegrateOpts::with_tol(1e-10)).unwrap();
            let (lo, hi) = inviscid_equivalence(&traj, 1.0).unwrap();
            assert!(lo > 0.1 && hi < 10.0, "eta = {eta}: ratios [{lo}, {hi}]");
            // t = 0 ratio is included and equals 1
            assert!(lo <= 1.0 && hi >= 1.0);
        }
    }

    #[test]
    fn stronger_stratification_tightens_equivalence() {
        let spread = |r: f64| -> f64 {
            let params = PhysParams::inviscid(r, 0.1).unwrap();
            let init =
                ModeState::new(1.0, 5.0, 0.0, Complex::new(1.0, 0.0), Complex::new(0.0, 0.0));
            let traj =
                integrate_mode(&init, &params, 200.0, IntegrateOpts::with_tol(1e-10)).unwrap();
            let (lo, hi) = inviscid_equivalence(&traj, r).unwrap();
            hi / lo
        };
        let tight = spread(10.0);
        let loose = spread(0.3);
        assert!(tight < loose, "R=10 spread {tight} vs R=0.3 spread {loose}");
    }

    #[test]
    fn equivalence_rejects_viscous_trajectories() {
        let params = PhysParams::new(0.01, 0.01, 1.0, 0.1).unwrap();
        let init = ModeState::new(1.0, 0.0, 0.0, Complex::new(1.0, 0.0), Complex::new(0.0, 0.0));
        let traj = integrate_mode(&init, &params, 5.0, IntegrateOpts::with_tol(1e-8)).unwrap();
        assert!(inviscid_equivalence(&traj, 1.0).is_err());
    }

    #[test]
    fn enhanced_branch_rate_is_order_lambda() {
        let params = PhysParams::new(0.01, 0.01, 1.0, 0.1).unwrap();
        let consts = default_constants(1.0, 0.1).unwrap();
        let k = 1.0;
        let lambda = eval_lambda(params.mu, params.nu, k);
        let t_end = 2.0 / lambda;
        let rows = sweep_rates(&params, &consts, &[k], 0.0, t_end, 1e-9);
        let row = rows[0].1.as_ref().unwrap();
        assert!(
            row.rate_over_lambda > 0.2 && row.rate_over_lambda < 20.0,
            "r/lambda = {}",
            row.rate_over_lambda
        );
    }

    #[test]
    fn sweep_rejects_inviscid_parameters() {
        let params = PhysParams::inviscid(1.0, 0.1).unwrap();
        let consts = default_constants(1.0, 0.1).unwrap();
        let rows = sweep_rates(&params, &consts, &[1.0], 0.0, 10.0, 1e-8);
        assert!(rows[0].1.is_err());
    }
}
