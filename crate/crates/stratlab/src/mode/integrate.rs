//! Adaptive integration of the per-frequency linear system.
//!
//! The system for a mode at (k, η), written with g = ∂ₜp/(|k|p^{1/2}),
//! a = ∂ₜp/(4p) and b = √R·|k|·p^{−1/2}:
//!
//! ```text
//!   dZ/dt = −a Z − b Q − ν p Z
//!   dQ/dt = +a Q + b Z − κ p Q
//! ```
//!
//! The antisymmetric coupling conserves |Z|² + |Q|² up to the ±a breathing
//! and the diffusive decay. The diffusive part is removed exactly with the
//! integrating factor exp(−ν∫p ds), ∫₀ᵗ p ds = k²t + (η³ − (η−kt)³)/(3k),
//! applied per step; an embedded Dormand–Prince 5(4) pair integrates the
//! remaining bounded rotation.

use crate::mode::state::{ModeState, ModeTrajectory};
use crate::multipliers::eval_p;
use crate::{Complex, Error, PhysParams, Result};

/// Right-hand side of the linear system at the state's own (k, η, t).
///
/// Rejects k = 0 and non-finite states.
pub fn mode_rhs(state: &ModeState, params: &PhysParams) -> Result<(Complex, Complex)> {
    if state.k == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    if !state.is_finite() {
        return Err(Error::domain("non-finite mode state".to_string()));
    }
    let (p, dp) = eval_p(state.point());
    let a = 0.25 * dp / p;
    let b = params.richardson.sqrt() * state.k.abs() / p.sqrt();
    let dz = state.z * (-a - params.nu * p) - state.q * b;
    let dq = state.q * (a - params.kappa * p) + state.z * b;
    Ok((dz, dq))
}

/// One classical RK4 step of the full system (used as a finite-difference
/// oracle for the analytic energy derivative; not the production path).
pub fn rk4_step(state: &ModeState, params: &PhysParams, h: f64) -> Result<ModeState> {
    let eval = |t: f64, z: Complex, q: Complex| -> Result<(Complex, Complex)> {
        mode_rhs(&ModeState::new(state.k, state.eta, t, z, q), params)
    };
    let (k1z, k1q) = eval(state.t, state.z, state.q)?;
    let (k2z, k2q) = eval(state.t + 0.5 * h, state.z + k1z * (0.5 * h), state.q + k1q * (0.5 * h))?;
    let (k3z, k3q) = eval(state.t + 0.5 * h, state.z + k2z * (0.5 * h), state.q + k2q * (0.5 * h))?;
    let (k4z, k4q) = eval(state.t + h, state.z + k3z * h, state.q + k3q * h)?;
    Ok(ModeState::new(
        state.k,
        state.eta,
        state.t + h,
        state.z + (k1z + (k2z + k3z) * 2.0 + k4z) * (h / 6.0),
        state.q + (k1q + (k2q + k3q) * 2.0 + k4q) * (h / 6.0),
    ))
}

/// ∫_{t0}^{t1} p ds in closed form (k ≠ 0).
pub fn p_integral(k: f64, eta: f64, t0: f64, t1: f64) -> f64 {
    let xi0 = eta - k * t0;
    let xi1 = eta - k * t1;
    k * k * (t1 - t0) + (xi0.powi(3) - xi1.powi(3)) / (3.0 * k)
}

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct IntegrateOpts {
    /// Local error tolerance (absolute and relative).
    pub tol: f64,
    /// Optional cap on the step size (also the margin-sampling density for
    /// certification runs).
    pub max_step: Option<f64>,
}

impl IntegrateOpts {
    pub fn with_tol(tol: f64) -> Self {
        IntegrateOpts { tol, max_step: None }
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct StepResult {
    z: Complex,
    q: Complex,
    err: f64,
}

/// One DP54 step of the interaction-picture variables over [t0, t0 + h].
///
/// W_Z = e^{ν ΔP} Z, W_Q = e^{κ ΔP} Q with ΔP measured from t0, so the stage
/// equations keep only the bounded rotation plus the factor
/// e^{±(ν−κ)ΔP(s)} on the coupling.
#[allow(clippy::too_many_arguments)]
fn dp54_step(
    k: f64,
    eta: f64,
    nu: f64,
    kappa: f64,
    sqrt_r: f64,
    t0: f64,
    h: f64,
    z0: Complex,
    q0: Complex,
) -> StepResult {
    let rhs = |s: f64, wz: Complex, wq: Complex| -> (Complex, Complex) {
        let (p, dp) = eval_p(crate::multipliers::FrequencyPoint::new(k, eta, s));
        let a = 0.25 * dp / p;
        let b = sqrt_r * k.abs() / p.sqrt();
        let dpp = p_integral(k, eta, t0, s);
        let fwd = ((nu - kappa) * dpp).exp();
        let dwz = wz * (-a) - wq * (b * fwd);
        let dwq = wq * a + wz * (b / fwd);
        (dwz, dwq)
    };

    let mut kz = [Complex::new(0.0, 0.0); 7];
    let mut kq = [Complex::new(0.0, 0.0); 7];
    let (d0z, d0q) = rhs(t0, z0, q0);
    kz[0] = d0z;
    kq[0] = d0q;
    for i in 1..7 {
        let mut wz = z0;
        let mut wq = q0;
        for (j, a_ij) in A[i - 1].iter().enumerate().take(i) {
            wz += kz[j] * (h * a_ij);
            wq += kq[j] * (h * a_ij);
        }
        let (dz, dq) = rhs(t0 + C[i] * h, wz, wq);
        kz[i] = dz;
        kq[i] = dq;
    }

    let mut w5z = z0;
    let mut w5q = q0;
    let mut w4z = z0;
    let mut w4q = q0;
    for i in 0..7 {
        w5z += kz[i] * (h * B5[i]);
        w5q += kq[i] * (h * B5[i]);
        w4z += kz[i] * (h * B4[i]);
        w4q += kq[i] * (h * B4[i]);
    }

    // undo the interaction picture at the step end
    let dpp = p_integral(k, eta, t0, t0 + h);
    let fz = (-nu * dpp).exp();
    let fq = (-kappa * dpp).exp();
    let z1 = w5z * fz;
    let q1 = w5q * fq;
    let ez = (w5z - w4z) * fz;
    let eq = (w5q - w4q) * fq;
    let err = ez.norm().hypot(eq.norm());
    StepResult { z: z1, q: q1, err }
}

/// Integrates a mode from `init.t` to `t_end` (forward or backward),
/// recording a sample at every accepted step.
pub fn integrate_mode(
    init: &ModeState,
    params: &PhysParams,
    t_end: f64,
    opts: IntegrateOpts,
) -> Result<ModeTrajectory> {
    if init.k == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    if !init.is_finite() {
        return Err(Error::domain("non-finite initial state".to_string()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::domain(format!("tolerance {} must be positive", opts.tol)));
    }
    if t_end == init.t {
        return Err(Error::domain("empty time span".to_string()));
    }

    let (k, eta) = (init.k, init.eta);
    let (nu, kappa) = (params.nu, params.kappa);
    let sqrt_r = params.richardson.sqrt();
    let dir = (t_end - init.t).signum();
    let span = (t_end - init.t).abs();

    let mut samples = Vec::with_capacity(256);
    samples.push(*init);

    let mut t = init.t;
    let mut z = init.z;
    let mut q = init.q;

    let mut h = (span / 100.0).min(opts.max_step.unwrap_or(f64::INFINITY)).min(0.1);
    if h <= 0.0 {
        h = span / 100.0;
    }

    let max_fwd = |t0: f64, h: f64| -> f64 {
        // p is unimodal in t, so its max on a step is at an endpoint
        let (p0, _) = eval_p(crate::multipliers::FrequencyPoint::new(k, eta, t0));
        let (p1, _) = eval_p(crate::multipliers::FrequencyPoint::new(k, eta, t0 + h));
        p0.max(p1)
    };

    loop {
        let remaining = (t_end - t).abs();
        if remaining <= 1e-14 * (1.0 + t.abs()) {
            break;
        }
        h = h.min(remaining);
        if let Some(mx) = opts.max_step {
            h = h.min(mx);
        }
        // keep the unequal-diffusivity coupling factor bounded within a step
        if nu != kappa {
            let cap = 4.0 / ((nu - kappa).abs() * max_fwd(t, dir * h).max(1e-300));
            h = h.min(cap.max(1e-12));
        }
        if h < 1e-13 * (1.0 + t.abs()) {
            return Err(Error::StepUnderflow { t, k, eta });
        }

        let step = dp54_step(k, eta, nu, kappa, sqrt_r, t, dir * h, z, q);
        let scale = opts.tol * (1.0 + z.norm().hypot(q.norm()).max(step.z.norm().hypot(step.q.norm())));
        let ratio = step.err / scale;

        if ratio <= 1.0 {
            t += dir * h;
            z = step.z;
            q = step.q;
            if !z.re.is_finite() || !q.re.is_finite() || !z.im.is_finite() || !q.im.is_finite() {
                return Err(Error::domain(format!(
                    "integration diverged at t = {t} (k = {k}, eta = {eta})"
                )));
            }
            samples.push(ModeState::new(k, eta, t, z, q));
            let grow = if ratio > 0.0 { 0.9 * ratio.powf(-0.2) } else { 5.0 };
            h *= grow.clamp(0.2, 5.0);
        } else {
            h *= (0.9 * ratio.powf(-0.2)).clamp(0.2, 1.0).min(0.9);
        }
    }

    Ok(ModeTrajectory {
        k,
        eta,
        nu,
        kappa,
        richardson: params.richardson,
        tol: opts.tol,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::state::ModeState;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn inviscid() -> PhysParams {
        PhysParams::inviscid(1.0, 0.1).unwrap()
    }

    fn viscous() -> PhysParams {
        PhysParams::new(0.01, 0.01, 1.0, 0.1).unwrap()
    }

    #[test]
    fn rhs_zero_state_is_zero() {
        let s = ModeState::new(1.0, 2.0, 0.0, c(0.0, 0.0), c(0.0, 0.0));
        let (dz, dq) = mode_rhs(&s, &viscous()).unwrap();
        assert_eq!(dz, c(0.0, 0.0));
        assert_eq!(dq, c(0.0, 0.0));
    }

    #[test]
    fn rhs_at_critical_time() {
        // η = kt: ∂ₜp = 0, p = k², so with ν = κ = 0 and (Z, Q) = (1, 0)
        // only the coupling acts: dZ/dt = 0, dQ/dt = +√R·Z = 1
        let s = ModeState::new(1.0, 1.0, 1.0, c(1.0, 0.0), c(0.0, 0.0));
        let (dz, dq) = mode_rhs(&s, &inviscid()).unwrap();
        assert!(dz.norm() < 1e-15);
        assert!((dq - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rhs_rejects_zero_k_and_nonfinite() {
        let s = ModeState::new(0.0, 1.0, 0.0, c(1.0, 0.0), c(0.0, 0.0));
        assert!(mode_rhs(&s, &viscous()).is_err());
        let s = ModeState::new(1.0, 1.0, 0.0, c(f64::NAN, 0.0), c(0.0, 0.0));
        assert!(mode_rhs(&s, &viscous()).is_err());
    }

    #[test]
    fn rhs_energy_identity_inviscid() {
        // d/dt(|Z|²+|Q|²) = −(1/2)(∂ₜp/p)(|Z|²−|Q|²) with ν = κ = 0:
        // the coupling is antisymmetric and drops out
        let params = inviscid();
        for &(k, eta, t, zr, zi, qr, qi) in &[
            (1.0, 3.0, 0.5, 0.3, -0.2, 0.9, 0.1),
            (2.0, -1.0, 2.0, 1.0, 0.0, 0.0, 1.0),
            (-0.7, 4.0, 1.0, 0.2, 0.8, -0.5, 0.3),
        ] {
            let s = ModeState::new(k, eta, t, c(zr, zi), c(qr, qi));
            let (dz, dq) = mode_rhs(&s, &params).unwrap();
            let lhs = 2.0 * (s.z.conj() * dz + s.q.conj() * dq).re;
            let (p, dp) = eval_p(s.point());
            let rhs = -0.5 * dp / p * (s.z.norm_sqr() - s.q.norm_sqr());
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()), "lhs {lhs} rhs {rhs}");
        }
    }

    #[test]
    fn p_integral_matches_quadrature() {
        let (k, eta) = (1.3, -2.0);
        let (t0, t1) = (0.7, 5.3);
        let n = 20_000;
        let h = (t1 - t0) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let tm = t0 + (i as f64 + 0.5) * h;
            let (p, _) = eval_p(crate::multipliers::FrequencyPoint::new(k, eta, tm));
            acc += p * h;
        }
        let exact = p_integral(k, eta, t0, t1);
        assert!((acc - exact).abs() < 1e-6 * exact.abs());
    }

    #[test]
    fn pure_decay_uses_exact_factor() {
        // with R ≈ 0 decoupling is not available (R > 1/4 required), so check
        // the factor against heavy decay with coupling intact: the solution
        // magnitude must track exp(−ν∫p) within tolerance for ν = κ
        let params = PhysParams::new(0.2, 0.2, 1.0, 0.1).unwrap();
        let init = ModeState::new(1.0, 0.0, 0.0, c(1.0, 0.0), c(0.0, 0.0));
        let traj =
            integrate_mode(&init, &params, 6.0, IntegrateOpts::with_tol(1e-10)).unwrap();
        let last = traj.last();
        let decay = (-params.nu * p_integral(1.0, 0.0, 0.0, 6.0)).exp();
        let amp = last.quad().sqrt();
        // |Z,Q| = decay · |rotation of initial| and the rotation is an
        // isometry up to the bounded ±a breathing (factor ≤ p^{1/2}-ish);
        // at η = 0, k = 1 the breathing is mild
        assert!(amp < 2.0 * decay && amp > 0.1 * decay, "amp {amp} decay {decay}");
    }

    #[test]
    fn tolerance_controls_error() {
        // short horizon: by t = 50 the diffusive factor has already crushed
        // the solution below roundoff and comparisons degenerate
        let params = viscous();
        let init = ModeState::new(1.0, 5.0, 0.0, c(0.6, 0.1), c(-0.3, 0.2));
        let reference =
            integrate_mode(&init, &params, 5.0, IntegrateOpts::with_tol(1e-13)).unwrap();
        let zr = reference.last().z;
        let mut errs = Vec::new();
        for tol in [1e-6, 1e-8, 1e-10] {
            let traj = integrate_mode(&init, &params, 5.0, IntegrateOpts::with_tol(tol)).unwrap();
            errs.push((traj.last().z - zr).norm());
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "errors not decreasing: {errs:?}");
        assert!(errs[2] < 1e-9);
    }

    #[test]
    fn time_reversal_returns_initial_state() {
        let params = viscous();
        let tol = 1e-10;
        let init = ModeState::new(1.0, 2.0, 0.0, c(0.8, -0.1), c(0.2, 0.4));
        let fwd = integrate_mode(&init, &params, 10.0, IntegrateOpts::with_tol(tol)).unwrap();
        let back =
            integrate_mode(fwd.last(), &params, 0.0, IntegrateOpts::with_tol(tol)).unwrap();
        let end = back.last();
        assert!((end.z - init.z).norm() < 10.0 * tol * (1.0 + init.z.norm()));
        assert!((end.q - init.q).norm() < 10.0 * tol * (1.0 + init.q.norm()));
        assert!(fwd.times_strictly_monotone());
        assert!(back.times_strictly_monotone());
    }

    #[test]
    fn unequal_diffusivities_integrate_cleanly() {
        let params = PhysParams::new(0.01, 0.025, 1.0, 0.1).unwrap();
        assert!(params.is_admissible());
        let init = ModeState::new(1.0, 4.0, 0.0, c(1.0, 0.0), c(0.0, 0.5));
        let traj = integrate_mode(&init, &params, 30.0, IntegrateOpts::with_tol(1e-9)).unwrap();
        assert!(traj.last().is_finite());
        assert!(traj.last().quad() < init.quad() * 4.0);
    }

    #[test]
    fn quad_identity_holds_along_trajectories() {
        // d/dt(|Z|²+|Q|²) + (∂ₜp/2p)(|Z|²−|Q|²) = 0 for ν = κ = 0, checked
        // at every accepted sample
        let params = inviscid();
        let init = ModeState::new(1.0, 4.0, 0.0, c(0.7, 0.2), c(-0.1, 0.5));
        let traj = integrate_mode(&init, &params, 30.0, IntegrateOpts::with_tol(1e-10)).unwrap();
        for s in &traj.samples {
            let r = crate::mode::energy::quad_identity_residual(s, &params).unwrap();
            assert!(r.abs() < 1e-12 * (1.0 + s.quad()), "residual {r} at t = {}", s.t);
        }
    }

    #[test]
    fn empty_span_is_rejected() {
        let init = ModeState::new(1.0, 0.0, 3.0, c(1.0, 0.0), c(0.0, 0.0));
        assert!(integrate_mode(&init, &viscous(), 3.0, IntegrateOpts::with_tol(1e-8)).is_err());
    }
}
