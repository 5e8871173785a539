//! Numerical certification of the Lyapunov inequality over frequency grids.
//!
//! For every grid point (k, η) and a basis of initial states, the mode is
//! integrated over the time span while the analytic derivative of E_k is
//! compared against −8c(D_k + λ_k E_k). The margin is linear in c, so each
//! trajectory yields an exact admissible-c ceiling; a bisection over
//! [c_lo, c_hi] then pins the largest c certifying every point, and the
//! integrated decay estimate is re-checked at that c.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::mode::energy::{denergy_dt, dissipation_k, energy_k, lambda_for};
use crate::mode::integrate::{integrate_mode, IntegrateOpts};
use crate::mode::state::ModeState;
use crate::{Complex, Error, HypoConstants, PhysParams, Result};

/// Controls for [`certify_grid`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CertifyOptions {
    /// Lower end of the c search interval.
    pub c_lo: f64,
    /// Upper end of the c search interval.
    pub c_hi: f64,
    /// Number of bisections of the c interval.
    pub bisections: u32,
    /// Integrator tolerance.
    pub tol: f64,
    /// Step-size cap; doubles as the margin sampling density.
    pub max_step: f64,
    /// Random unit states sampled per grid point, in addition to the four
    /// corner states.
    pub n_random_states: usize,
    pub seed: u64,
    /// Margins are accepted up to slack·(1 + |E_k|).
    pub slack: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            c_lo: 1e-6,
            c_hi: 1.0,
            bisections: 40,
            tol: 1e-8,
            max_step: 0.25,
            n_random_states: 8,
            seed: 12345,
            slack: 1e-10,
        }
    }
}

/// Per-point outcome at the certified c.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PointCertificate {
    pub k: f64,
    pub eta: f64,
    /// Largest c admissible at this point alone.
    pub c_max: f64,
    /// Whether the margins pass in the c → 0 limit.
    pub feasible: bool,
    /// Worst margin dE/dt + 8c(D + λE) over states and times, at the
    /// certified c.
    pub worst_margin: f64,
    /// Whether all margins stay within slack·(1+|E|) at the certified c.
    pub margins_ok: bool,
    /// Whether the integrated estimate holds at the certified c.
    pub integrated_ok: bool,
}

/// Outcome of a certification sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificationReport {
    pub points: Vec<PointCertificate>,
    /// Largest c in [c_lo, c_hi] with all margins within slack; 0 if none.
    pub c_certified: f64,
    pub all_feasible: bool,
    pub all_margins_ok: bool,
    pub integrated_all_ok: bool,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.c_certified > 0.0 && self.all_margins_ok && self.integrated_all_ok
    }
}

/// The four corner states plus seeded random unit states.
fn initial_states(n_random: usize, seed: u64) -> Vec<(Complex, Complex)> {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let mut states = vec![
        (Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)),
        (Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)),
        (Complex::new(inv, 0.0), Complex::new(inv, 0.0)),
        (Complex::new(inv, 0.0), Complex::new(0.0, inv)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_random {
        let v: [f64; 4] = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let norm = (v.iter().map(|x| x * x).sum::<f64>()).sqrt().max(1e-9);
        states.push((
            Complex::new(v[0] / norm, v[1] / norm),
            Complex::new(v[2] / norm, v[3] / norm),
        ));
    }
    states
}

struct TrajectorySummary {
    /// Largest admissible c for this trajectory (may be +∞).
    c_max: f64,
    feasible: bool,
}

fn summarize_trajectory(
    init: &ModeState,
    params: &PhysParams,
    consts: &HypoConstants,
    t1: f64,
    opts: &CertifyOptions,
) -> Result<TrajectorySummary> {
    let traj = integrate_mode(
        init,
        params,
        t1,
        IntegrateOpts { tol: opts.tol, max_step: Some(opts.max_step) },
    )?;
    let lambda = lambda_for(init, params);
    let mut c_max = f64::INFINITY;
    let mut feasible = true;
    for s in &traj.samples {
        let e = energy_k(s, consts, params)?;
        let d = dissipation_k(s, consts, params)?.total(consts, params.richardson);
        let de = denergy_dt(s, consts, params)?;
        let slack = opts.slack * (1.0 + e.abs());
        if de > slack {
            feasible = false;
            c_max = 0.0;
            break;
        }
        let b = 8.0 * (d + lambda * e);
        if b > 0.0 {
            c_max = c_max.min((slack - de) / b);
        }
    }
    Ok(TrajectorySummary { c_max, feasible })
}

struct MarginCheck {
    worst_margin: f64,
    margins_ok: bool,
    integrated_ok: bool,
}

fn check_at_c(
    init: &ModeState,
    params: &PhysParams,
    consts: &HypoConstants,
    t1: f64,
    c: f64,
    opts: &CertifyOptions,
) -> Result<MarginCheck> {
    let traj = integrate_mode(
        init,
        params,
        t1,
        IntegrateOpts { tol: opts.tol, max_step: Some(opts.max_step) },
    )?;
    let lambda = lambda_for(init, params);
    let e0 = energy_k(&traj.samples[0], consts, params)?;
    let mut worst = f64::NEG_INFINITY;
    let mut margins_ok = true;
    let mut integrated_ok = true;

    // running trapezoid integrals of the two weighted dissipation pieces
    let mut i_tau = 0.0;
    let mut i_rho = 0.0;
    let mut prev: Option<(f64, f64, f64)> = None;
    for s in &traj.samples {
        let e = energy_k(s, consts, params)?;
        let d = dissipation_k(s, consts, params)?;
        let de = denergy_dt(s, consts, params)?;
        let slack = opts.slack * (1.0 + e.abs());
        let margin = de + 8.0 * c * (d.total(consts, params.richardson) + lambda * e);
        worst = worst.max(margin);
        if margin > slack {
            margins_ok = false;
        }

        let w = (2.0 * c * lambda * s.t).exp();
        // k²p⁻¹(|Z|²+|Q|²) and |k|³p^{−3/2}(|Z|²+|Q|²) are exactly the raw
        // τ and ρ dissipation components
        let f_tau = w * d.tau;
        let f_rho = w * d.rho;
        if let Some((tp, ftp, frp)) = prev {
            let h = s.t - tp;
            i_tau += 0.5 * h * (ftp + f_tau);
            i_rho += 0.5 * h * (frp + f_rho);
        }
        prev = Some((s.t, f_tau, f_rho));

        let lhs = w * e
            + 0.25 * consts.c_tau * i_tau
            + 0.5 / params.richardson * i_rho;
        if lhs > e0 * (1.0 + 1e-8) + opts.slack {
            integrated_ok = false;
        }
    }
    Ok(MarginCheck { worst_margin: worst, margins_ok, integrated_ok })
}

fn point_seed(base: u64, ik: usize, ie: usize) -> u64 {
    // splitmix-style mixing keeps the per-point streams independent of the
    // parallel schedule
    let mut x = base ^ ((ik as u64) << 32) ^ (ie as u64 + 0x9e37_79b9_7f4a_7c15);
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Certifies dE_k/dt + 8c·D_k + 8c·λ_k·E_k ≤ 0 over the grid and verifies
/// the integrated decay estimate at the certified c.
pub fn certify_grid(
    params: &PhysParams,
    consts: &HypoConstants,
    k_grid: &[f64],
    eta_grid: &[f64],
    t_span: (f64, f64),
    opts: &CertifyOptions,
) -> Result<CertificationReport> {
    if k_grid.is_empty() || eta_grid.is_empty() {
        return Err(Error::domain("certification grids must be nonempty".to_string()));
    }
    if k_grid.contains(&0.0) {
        return Err(Error::ZeroFrequency);
    }
    if !(t_span.1 > t_span.0) {
        return Err(Error::domain("empty time span".to_string()));
    }

    let points: Vec<(usize, usize, f64, f64)> = k_grid
        .iter()
        .enumerate()
        .flat_map(|(ik, &k)| {
            eta_grid.iter().enumerate().map(move |(ie, &eta)| (ik, ie, k, eta))
        })
        .collect();

    // pass 1: per-point admissible-c ceilings
    let ceilings: Vec<Result<(f64, bool)>> = points
        .par_iter()
        .map(|&(ik, ie, k, eta)| {
            let states = initial_states(opts.n_random_states, point_seed(opts.seed, ik, ie));
            let mut c_max = f64::INFINITY;
            let mut feasible = true;
            for (z, q) in states {
                let init = ModeState::new(k, eta, t_span.0, z, q);
                let summary = summarize_trajectory(&init, params, consts, t_span.1, opts)?;
                c_max = c_max.min(summary.c_max);
                feasible &= summary.feasible;
            }
            Ok((c_max, feasible))
        })
        .collect();

    let mut c_grid_max = f64::INFINITY;
    let mut all_feasible = true;
    let mut raw = Vec::with_capacity(points.len());
    for r in ceilings {
        let (c_max, feasible) = r?;
        c_grid_max = c_grid_max.min(c_max);
        all_feasible &= feasible;
        raw.push((c_max, feasible));
    }

    // bisect the largest certifying c within [c_lo, c_hi]
    let admissible = |c: f64| all_feasible && c <= c_grid_max;
    let c_certified = if !admissible(opts.c_lo) {
        0.0
    } else if admissible(opts.c_hi) {
        opts.c_hi
    } else {
        let mut lo = opts.c_lo;
        let mut hi = opts.c_hi;
        for _ in 0..opts.bisections {
            let mid = 0.5 * (lo + hi);
            if admissible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };

    // pass 2: margins and integrated estimate at the certified c
    let checks: Vec<Result<PointCertificate>> = points
        .par_iter()
        .map(|&(ik, ie, k, eta)| {
            let states = initial_states(opts.n_random_states, point_seed(opts.seed, ik, ie));
            let mut worst = f64::NEG_INFINITY;
            let mut integrated_ok = true;
            let mut margins_ok = true;
            for (z, q) in states {
                let init = ModeState::new(k, eta, t_span.0, z, q);
                let check = check_at_c(&init, params, consts, t_span.1, c_certified, opts)?;
                worst = worst.max(check.worst_margin);
                margins_ok &= check.margins_ok;
                integrated_ok &= check.integrated_ok;
            }
            let idx = ik * eta_grid.len() + ie;
            let (c_max, feasible) = raw[idx];
            Ok(PointCertificate {
                k,
                eta,
                c_max,
                feasible,
                worst_margin: worst,
                margins_ok,
                integrated_ok,
            })
        })
        .collect();

    let mut out = Vec::with_capacity(points.len());
    let mut all_margins_ok = c_certified > 0.0;
    let mut integrated_all_ok = true;
    for c in checks {
        let pc = c?;
        all_margins_ok &= pc.margins_ok;
        integrated_all_ok &= pc.integrated_ok;
        out.push(pc);
    }

    Ok(CertificationReport {
        points: out,
        c_certified,
        all_feasible,
        all_margins_ok,
        integrated_all_ok,
    })
}

/// Log-spaced grid helper for certification sweeps.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Uniform grid helper.
pub fn lin_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi > lo && n >= 2);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
