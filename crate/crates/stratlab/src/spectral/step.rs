//! IMEX time stepping of the moving-frame system.
//!
//! The diffusive part is integrated exactly per mode with the factor
//! exp(−ν∫p ds) over the step; the buoyancy coupling and the advection are
//! explicit in a two-stage second-order (Heun) integrating-factor scheme:
//!
//! ```text
//!   Ω* = E_ν(Ω + dt·F(t, Ω, Θ))
//!   Ω(t+dt) = E_ν(Ω + dt/2·F(t, Ω, Θ)) + dt/2·F(t+dt, Ω*, Θ*)
//! ```
//!
//! with E_ν the per-mode diffusion factor and F the non-diffusive tendency.

use crate::spectral::field::SpectralField;
use crate::spectral::nonlinear::{nonlinear_term, SpectralWorkspace};
use crate::{Complex, Error, Result};

pub struct Stepper {
    ws: SpectralWorkspace,
    /// Advective CFL number.
    pub cfl_number: f64,
    /// Aliasing-guard energy fraction.
    pub alias_limit: f64,
    /// Advection switched off integrates the linearized system mode by mode.
    pub nonlinear: bool,
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepInfo {
    pub max_u1: f64,
    pub max_u2: f64,
    pub k_extent: f64,
    pub xi_extent: f64,
    pub cfl_bound: f64,
}

/// ∫_{t0}^{t1} p ds for one mode, valid for k = 0 as well.
fn delta_p(k: f64, eta: f64, t0: f64, t1: f64) -> f64 {
    if k == 0.0 {
        eta * eta * (t1 - t0)
    } else {
        crate::mode::integrate::p_integral(k, eta, t0, t1)
    }
}

impl Stepper {
    pub fn new(field: &SpectralField) -> Self {
        Stepper {
            ws: SpectralWorkspace::new(&field.grid),
            cfl_number: 0.7,
            alias_limit: 0.25,
            nonlinear: true,
        }
    }

    /// Non-diffusive tendencies at the given field state.
    fn explicit_tendency(
        &mut self,
        field: &SpectralField,
    ) -> Result<(Vec<Complex>, Vec<Complex>, StepInfo)> {
        let g = field.grid.clone();
        let (mut f_o, mut f_t, info) = if self.nonlinear {
            let conv = nonlinear_term(field, &mut self.ws, self.alias_limit)?;
            let info = StepInfo {
                max_u1: conv.max_u1,
                max_u2: conv.max_u2,
                k_extent: conv.k_extent,
                xi_extent: conv.xi_extent,
                cfl_bound: 0.0,
            };
            let mut f_o = conv.omega;
            let mut f_t = conv.theta;
            // tendency = −convolution
            f_o.iter_mut().for_each(|v| *v = -*v);
            f_t.iter_mut().for_each(|v| *v = -*v);
            (f_o, f_t, info)
        } else {
            (
                vec![Complex::new(0.0, 0.0); g.len()],
                vec![Complex::new(0.0, 0.0); g.len()],
                StepInfo::default(),
            )
        };

        let i = Complex::new(0.0, 1.0);
        let r = field.params.richardson;
        for ik in 0..g.nk {
            let k = g.k_at(ik);
            if k == 0.0 {
                continue;
            }
            for ie in 0..g.neta {
                let idx = g.idx(ik, ie);
                let p = field.p_at(ik, ie);
                f_o[idx] += -i * (r * k) * field.theta[idx];
                f_t[idx] += -i * (k / p) * field.omega[idx];
            }
        }
        Ok((f_o, f_t, info))
    }

    /// Advances the field by one step of size `dt`.
    pub fn step(&mut self, field: &mut SpectralField, dt: f64) -> Result<StepInfo> {
        if !(dt > 0.0) {
            return Err(Error::domain(format!("step size {dt} must be positive")));
        }
        let g = field.grid.clone();
        let t0 = field.t;
        let t1 = t0 + dt;

        let (f1_o, f1_t, mut info) = self.explicit_tendency(field)?;

        // advective CFL from the physical velocity extrema and the spectral
        // extents of the content being advected (the shifted η of the
        // content grows by k·dt per step)
        if self.nonlinear {
            let k_active = info.k_extent;
            let xi_active = info.xi_extent + k_active * dt;
            let rate = info.max_u1 * k_active + info.max_u2 * xi_active;
            if rate > 0.0 {
                let bound = self.cfl_number / rate;
                info.cfl_bound = bound;
                if dt > bound {
                    return Err(Error::Cfl { t: t0, dt, bound });
                }
            }
        }

        let decay_nu: Vec<f64> = (0..g.len())
            .map(|idx| {
                let (ik, ie) = (idx / g.neta, idx % g.neta);
                (-field.params.nu * delta_p(g.k_at(ik), g.eta_at(ie), t0, t1)).exp()
            })
            .collect();
        let decay_kappa: Vec<f64> = (0..g.len())
            .map(|idx| {
                let (ik, ie) = (idx / g.neta, idx % g.neta);
                (-field.params.kappa * delta_p(g.k_at(ik), g.eta_at(ie), t0, t1)).exp()
            })
            .collect();

        // predictor at t1
        let mut stage = field.clone();
        stage.t = t1;
        for idx in 0..g.len() {
            stage.omega[idx] = (field.omega[idx] + f1_o[idx] * dt) * decay_nu[idx];
            stage.theta[idx] = (field.theta[idx] + f1_t[idx] * dt) * decay_kappa[idx];
        }

        let (f2_o, f2_t, info2) = self.explicit_tendency(&stage)?;
        info.max_u1 = info.max_u1.max(info2.max_u1);
        info.max_u2 = info.max_u2.max(info2.max_u2);

        let half = 0.5 * dt;
        for idx in 0..g.len() {
            field.omega[idx] =
                (field.omega[idx] + f1_o[idx] * half) * decay_nu[idx] + f2_o[idx] * half;
            field.theta[idx] =
                (field.theta[idx] + f1_t[idx] * half) * decay_kappa[idx] + f2_t[idx] * half;
        }
        field.t = t1;
        field.enforce_hermitian();

        for idx in 0..g.len() {
            if !field.omega[idx].re.is_finite()
                || !field.omega[idx].im.is_finite()
                || !field.theta[idx].re.is_finite()
                || !field.theta[idx].im.is_finite()
            {
                return Err(Error::NonFinite { t: field.t, ik: idx / g.neta, ieta: idx % g.neta });
            }
        }
        Ok(info)
    }
}
