//! Anisotropic norm families evaluated on the moving-frame lattice.
//!
//! All evaluations are lattice Riemann sums standing in for the whole-plane
//! integrals. Moving-frame coefficients are used throughout: the stationary
//! derivative ∂_y becomes multiplication by i(η − kt), while the sheared
//! combination ∂_y + t∂_x stays at plain η. Families:
//!
//! * `V` — ⟨k,η⟩ⁿ |k,η|^{−1/2} ⟨k⟩^{m+1/2} ⟨cλt⟩^J ⟨k/μ⟩^{−j/3} ∂_y^j.
//! * `W` — |k|^{1/2}⟨k⟩^m replaces ⟨k⟩^{m+1/2}, plus a sup-in-k L²_η piece.
//! * `Htilde` — ⟨cλt⟩^J ⟨k,η⟩ⁿ ⟨k⟩^m ⟨k/μ⟩^{−j/3} (∂_y − t∂_x... )^j on the
//!   symmetrized pair; no inverse-power weights.
//! * `HtildeAlt` — `Htilde` plus the sup-in-k component ‖⟨k,η⟩ⁿ F̂‖_{L∞_k L²_η}.

pub mod fit;

pub use fit::{fit_exponential, fit_power, RateFit};

use serde::{Deserialize, Serialize};

use crate::spectral::field::SpectralField;
use crate::spectral::grid::Grid;
use crate::multipliers::eval_lambda;
use crate::{Complex, Error, Result};

/// Norm family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormFamily {
    V,
    W,
    Htilde,
    HtildeAlt,
}

/// Everything needed to evaluate one norm at one time.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NormSpec {
    pub family: NormFamily,
    pub n: f64,
    pub m: f64,
    pub big_j: f64,
    /// Decay constant inside ⟨cλ_k t⟩^J.
    pub c: f64,
    /// μ inside λ and the ⟨k/μ⟩^{−j/3} factor.
    pub mu: f64,
    /// ν for the |k| < μ branch of λ.
    pub nu: f64,
    /// Evaluate the j = 1 term. Must be false when μ = 0.
    pub include_j1: bool,
    /// Resolves the ⟨∂_X, ∂_Y⟩ⁿ ambiguity for the H̃ families: false keeps
    /// the literal moving-frame ⟨k, η⟩ⁿ, true uses ⟨k, η−kt⟩ⁿ.
    pub stationary_envelope: bool,
}

impl NormSpec {
    fn envelope(&self, k: f64, eta: f64, xi: f64) -> f64 {
        if self.stationary_envelope {
            (1.0 + k * k + xi * xi).sqrt()
        } else {
            (1.0 + k * k + eta * eta).sqrt()
        }
    }

    fn decay(&self, k: f64, t: f64) -> f64 {
        let x = self.c * eval_lambda(self.mu, self.nu, k) * t;
        (1.0 + x * x).sqrt().powf(self.big_j)
    }

    fn j_factor(&self, k: f64, xi: f64) -> f64 {
        let r = k / self.mu;
        (1.0 + r * r).powf(-1.0 / 6.0) * xi.abs()
    }
}

fn l2_weight(spec: &NormSpec, k: f64, eta: f64, t: f64, j: usize) -> f64 {
    let xi = eta - k * t;
    let env = spec.envelope(k, eta, xi).powf(spec.n);
    let base = match spec.family {
        NormFamily::V => {
            let inv = (k * k + eta * eta).powf(-0.25);
            env * inv * (1.0 + k * k).sqrt().powf(spec.m + 0.5)
        }
        NormFamily::W => {
            let inv = (k * k + eta * eta).powf(-0.25);
            env * inv * (1.0 + k * k).sqrt().powf(spec.m) * k.abs().sqrt()
        }
        NormFamily::Htilde | NormFamily::HtildeAlt => {
            env * (1.0 + k * k).sqrt().powf(spec.m)
        }
    };
    let w = base * spec.decay(k, t);
    if j == 0 {
        w
    } else {
        w * spec.j_factor(k, xi)
    }
}

/// Sup-piece weight (no decay factor, no j-sum), or None for families
/// without one.
fn sup_weight(spec: &NormSpec, k: f64, eta: f64, t: f64) -> Option<f64> {
    let xi = eta - k * t;
    match spec.family {
        NormFamily::W => {
            let env = spec.envelope(k, eta, xi).powf(spec.n);
            Some(env * k.abs().sqrt() * (k * k + eta * eta).powf(-0.25))
        }
        NormFamily::HtildeAlt => {
            let env = spec.envelope(k, eta, xi).powf(spec.n);
            Some(env)
        }
        _ => None,
    }
}

/// True when the family's weights are singular at this lattice point.
fn excluded(spec: &NormSpec, k: f64, eta: f64) -> bool {
    match spec.family {
        NormFamily::V | NormFamily::W => k == 0.0 && eta == 0.0,
        _ => false,
    }
}

/// Evaluates one norm on a coefficient array over the lattice.
///
/// Rejects arrays holding more than 1e−14 of their energy at frequencies the
/// family excludes.
pub fn eval_norm(grid: &Grid, t: f64, coeffs: &[Complex], spec: &NormSpec) -> Result<f64> {
    if coeffs.len() != grid.len() {
        return Err(Error::Grid(format!(
            "coefficient array length {} does not match the {}x{} lattice",
            coeffs.len(),
            grid.nk,
            grid.neta
        )));
    }
    if spec.include_j1 && spec.mu == 0.0 {
        return Err(Error::domain(
            "the j = 1 weight needs mu > 0; inviscid norms use include_j1 = false".to_string(),
        ));
    }

    let total: f64 = coeffs.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let mut excluded_energy = 0.0;
    for ik in 0..grid.nk {
        let k = grid.k_at(ik);
        for ie in 0..grid.neta {
            if excluded(spec, k, grid.eta_at(ie)) {
                excluded_energy += coeffs[grid.idx(ik, ie)].norm_sqr();
            }
        }
    }
    if excluded_energy > 1e-14 * total {
        return Err(Error::domain(format!(
            "field carries {:.3e} of its energy at frequencies excluded by the norm family",
            excluded_energy / total
        )));
    }

    let cell = grid.cell_area();
    let js: &[usize] = if spec.include_j1 { &[0, 1] } else { &[0] };
    let mut value = 0.0;
    for &j in js {
        let mut acc = 0.0;
        for ik in 0..grid.nk {
            let k = grid.k_at(ik);
            for ie in 0..grid.neta {
                let eta = grid.eta_at(ie);
                if excluded(spec, k, eta) {
                    continue;
                }
                let a = coeffs[grid.idx(ik, ie)].norm_sqr();
                if a > 0.0 {
                    let w = l2_weight(spec, k, eta, t, j);
                    acc += w * w * a;
                }
            }
        }
        value += (acc * cell).sqrt();
    }

    if matches!(spec.family, NormFamily::W | NormFamily::HtildeAlt) {
        let mut sup = 0.0f64;
        for ik in 0..grid.nk {
            let k = grid.k_at(ik);
            let mut acc = 0.0;
            for ie in 0..grid.neta {
                let eta = grid.eta_at(ie);
                if excluded(spec, k, eta) {
                    continue;
                }
                let a = coeffs[grid.idx(ik, ie)].norm_sqr();
                if a > 0.0 {
                    if let Some(w) = sup_weight(spec, k, eta, t) {
                        acc += w * w * a;
                    }
                }
            }
            sup = sup.max((acc * grid.deta).sqrt());
        }
        value += sup;
    }

    Ok(value)
}

/// The sup-in-k component alone (for families that carry one).
pub fn sup_component(grid: &Grid, t: f64, coeffs: &[Complex], spec: &NormSpec) -> Result<f64> {
    if sup_weight(spec, 1.0, 0.0, 0.0).is_none() {
        return Err(Error::domain("this family has no sup-in-k component".to_string()));
    }
    let mut sup = 0.0f64;
    for ik in 0..grid.nk {
        let k = grid.k_at(ik);
        let mut acc = 0.0;
        for ie in 0..grid.neta {
            let eta = grid.eta_at(ie);
            if excluded(spec, k, eta) {
                continue;
            }
            let a = coeffs[grid.idx(ik, ie)].norm_sqr();
            if a > 0.0 {
                if let Some(w) = sup_weight(spec, k, eta, t) {
                    acc += w * w * a;
                }
            }
        }
        sup = sup.max((acc * grid.deta).sqrt());
    }
    Ok(sup)
}

/// Left-hand sides of the main decay estimates, evaluated on one field.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecayQuantities {
    /// ‖ω‖_{V(t)} + √R‖∇θ‖_{V(t)} — grows like ⟨t⟩^{1/2}.
    pub growth: f64,
    /// ‖∂ₓu¹‖_{V(t)} + √R‖∂ₓθ‖_{V(t)} — decays like ⟨t⟩^{−1/2}.
    pub damping_u1: f64,
    /// ‖∂ₓ|∂ₓ, ∂_y+t∂ₓ|⁻¹∂ₓu²‖_{V(t)} — decays like ⟨t⟩^{−3/2}.
    pub damping_u2: f64,
    /// ‖∂ₓu²‖²_{V(t)}, the integrand of the flux term ∫⟨s⟩‖∂ₓu²‖²ds.
    pub flux_integrand: f64,
}

/// Evaluates the four decay-estimate quantities on a field snapshot.
pub fn decay_quantities(field: &SpectralField) -> Result<DecayQuantities> {
    let g = &field.grid;
    let spec = field.v_norm_spec();
    let t = field.t;

    let mut dx_u1 = vec![Complex::new(0.0, 0.0); g.len()];
    let mut dx_theta = vec![Complex::new(0.0, 0.0); g.len()];
    let mut u2_smoothed = vec![Complex::new(0.0, 0.0); g.len()];
    let mut dx_u2 = vec![Complex::new(0.0, 0.0); g.len()];
    for ik in 0..g.nk {
        let k = g.k_at(ik);
        for ie in 0..g.neta {
            let idx = g.idx(ik, ie);
            let eta = g.eta_at(ie);
            let p = field.p_at(ik, ie);
            if k == 0.0 || p == 0.0 {
                continue;
            }
            let om = field.omega[idx];
            let th = field.theta[idx];
            let xi = eta - k * t;
            // ∂ₓu¹ = ik·i(η−kt)Ω̂/p = −k(η−kt)Ω̂/p
            dx_u1[idx] = om * (-k * xi / p);
            dx_theta[idx] = th * Complex::new(0.0, k);
            // ∂ₓ|∇ₜ|⁻¹∂ₓu² = ik³(k²+η²)^{−1/2}Ω̂/p
            let stat = (k * k + eta * eta).sqrt();
            u2_smoothed[idx] = om * Complex::new(0.0, k * k * k / (stat * p));
            dx_u2[idx] = om * (k * k / p);
        }
    }

    let sqrt_r = field.params.richardson.sqrt();
    let growth = eval_norm(g, t, &field.omega, &spec)?
        + sqrt_r * eval_norm(g, t, &field.grad_theta_magnitude(), &spec)?;
    let damping_u1 =
        eval_norm(g, t, &dx_u1, &spec)? + sqrt_r * eval_norm(g, t, &dx_theta, &spec)?;
    let damping_u2 = eval_norm(g, t, &u2_smoothed, &spec)?;
    let flux = eval_norm(g, t, &dx_u2, &spec)?;

    Ok(DecayQuantities {
        growth,
        damping_u1,
        damping_u2,
        flux_integrand: flux * flux,
    })
}
