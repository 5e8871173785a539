//! Physical parameters and hypocoercive weight constants.
//!
//! Everything here is nondimensional. The diffusion comparability condition
//! ties the viscosity ν and the thermal dissipation κ to the Richardson
//! number R, and the derived scale μ sets both the enhanced-dissipation rate
//! and the stability threshold μ^{1/2+δ*}.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Physical parameters of a run, with the derived diffusion scale μ cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    /// Viscosity ν ∈ (0,1); 0 only for inviscid runs.
    pub nu: f64,
    /// Thermal dissipation κ ∈ (0,1); 0 only for inviscid runs.
    pub kappa: f64,
    /// Richardson number R > 1/4 (Miles–Howard criterion).
    pub richardson: f64,
    /// Margin ε ∈ (0, 1/2) in the diffusion comparability condition.
    pub epsilon: f64,
    /// Derived scale μ = min(ν,κ)·(1 − 1/(4√R) − max(ν,κ)/(4√R·min(ν,κ))).
    pub mu: f64,
}

impl PhysParams {
    /// Builds viscous parameters, checking ranges and caching μ.
    ///
    /// Range violations are domain errors; an inadmissible diffusivity ratio
    /// is not (it is reported by [`validate_diffusion`] and shows up as a
    /// non-positive μ from [`compute_mu`]).
    pub fn new(nu: f64, kappa: f64, richardson: f64, epsilon: f64) -> Result<Self> {
        check_ranges(nu, kappa, richardson, epsilon)?;
        let mu = mu_formula(nu, kappa, richardson);
        Ok(PhysParams { nu, kappa, richardson, epsilon, mu })
    }

    /// Parameters for an inviscid run (ν = κ = 0, μ = 0).
    pub fn inviscid(richardson: f64, epsilon: f64) -> Result<Self> {
        if !(richardson > 0.25) {
            return Err(Error::domain(format!(
                "richardson = {richardson} must exceed 1/4"
            )));
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::domain(format!("epsilon = {epsilon} outside (0, 1/2)")));
        }
        Ok(PhysParams { nu: 0.0, kappa: 0.0, richardson, epsilon, mu: 0.0 })
    }

    /// True when both diffusivities vanish.
    pub fn is_inviscid(&self) -> bool {
        self.nu == 0.0 && self.kappa == 0.0
    }

    /// True when the diffusion comparability condition holds and μ > 0.
    pub fn is_admissible(&self) -> bool {
        !self.is_inviscid()
            && validate_diffusion(self.nu, self.kappa, self.richardson, self.epsilon)
                .unwrap_or(false)
            && self.mu > 0.0
    }

    pub fn sqrt_r(&self) -> f64 {
        self.richardson.sqrt()
    }
}

fn check_ranges(nu: f64, kappa: f64, richardson: f64, epsilon: f64) -> Result<()> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::domain(format!("nu = {nu} outside (0,1)")));
    }
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::domain(format!("kappa = {kappa} outside (0,1)")));
    }
    if !(richardson > 0.25) {
        return Err(Error::domain(format!("richardson = {richardson} must exceed 1/4")));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::domain(format!("epsilon = {epsilon} outside (0, 1/2)")));
    }
    Ok(())
}

fn mu_formula(nu: f64, kappa: f64, richardson: f64) -> f64 {
    let lo = nu.min(kappa);
    let hi = nu.max(kappa);
    let inv = 1.0 / (4.0 * richardson.sqrt());
    lo * (1.0 - inv - inv * hi / lo)
}

/// Checks the diffusion comparability condition
/// max(ν,κ)/min(ν,κ) ≤ 4√R − 1 − ε. The boundary case counts as admissible.
pub fn validate_diffusion(nu: f64, kappa: f64, richardson: f64, epsilon: f64) -> Result<bool> {
    check_ranges(nu, kappa, richardson, epsilon)?;
    let ratio = nu.max(kappa) / nu.min(kappa);
    Ok(ratio <= 4.0 * richardson.sqrt() - 1.0 - epsilon)
}

/// Computes μ, failing if the parameters are not admissible (μ ≤ 0).
pub fn compute_mu(params: &PhysParams) -> Result<f64> {
    if !validate_diffusion(params.nu, params.kappa, params.richardson, params.epsilon)? {
        return Err(Error::domain(
            "diffusion comparability condition fails; mu would not be positive".to_string(),
        ));
    }
    let mu = mu_formula(params.nu, params.kappa, params.richardson);
    if mu <= 0.0 {
        return Err(Error::domain(format!("derived mu = {mu} is not positive")));
    }
    Ok(mu)
}

/// Weight constants of the hypocoercive energy and the norm indices.
///
/// `c`, `c0`, `c1` have no closed forms; they start at zero and are filled in
/// by the certification sweep. `admissible` records whether the three
/// smallness conditions have been verified for (c_τ, c_α, c_β).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypoConstants {
    pub c_tau: f64,
    pub c_alpha: f64,
    pub c_beta: f64,
    /// Certified decay constant (largest c with all margins ≤ 0).
    pub c: f64,
    /// Certified coefficient of λ_k E_k in the pointwise inequality.
    pub c0: f64,
    /// Certified coefficient of D_k in the pointwise inequality.
    pub c1: f64,
    /// Isotropic Sobolev index n ≥ 0.
    pub n: f64,
    /// x-regularity index m (> 1/2 for the physical-variable estimates).
    pub m: f64,
    /// Decay power J ≥ 1.
    pub big_j: f64,
    /// Threshold exponent δ* ∈ (0, 1/12).
    pub delta_star: f64,
    pub admissible: bool,
}

/// Report of the three smallness conditions on (c_τ, c_α, c_β).
///
/// Each margin is bound minus value, so a satisfied condition has a
/// nonnegative margin (the first condition is non-strict, the other two
/// strict).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SmallnessReport {
    /// c_τ ≤ (1/32π)·min{1/8, ε/R}.
    pub tau_margin: f64,
    /// c_α(1 + 1/(2√R))e^{2/(2√R−1)} < min{c_β/25, 1/(2π)}.
    pub alpha_margin: f64,
    /// c_β²/c_α < min{ε²/(1024R²), 1/16}.
    pub beta_margin: f64,
}

impl SmallnessReport {
    pub fn all_pass(&self) -> bool {
        self.tau_margin >= 0.0 && self.alpha_margin > 0.0 && self.beta_margin > 0.0
    }

    pub fn margins(&self) -> [f64; 3] {
        [self.tau_margin, self.alpha_margin, self.beta_margin]
    }
}

/// Upper bound for c_τ in the first smallness condition.
pub fn c_tau_bound(richardson: f64, epsilon: f64) -> f64 {
    (0.125f64).min(epsilon / richardson) / (32.0 * std::f64::consts::PI)
}

/// Explicit weight constants satisfying all three smallness conditions for
/// every R > 1/4 and ε ∈ (0, 1/2).
///
/// c_τ sits exactly on its (non-strict) bound. c_β carries the factor
/// e^{−2/(2√R−1)} so that c_β²/c_α is independent of the exponential and the
/// third condition reduces to (1/20)·(ε²/1024R²)·(1 + 1/(2√R)), strictly
/// below its bound. Near R = 1/4 the exponentials underflow to zero in
/// double precision; the constants remain finite and nonnegative there but
/// the smallness report flags them as unusable.
pub fn default_constants(richardson: f64, epsilon: f64) -> Result<HypoConstants> {
    if !(richardson > 0.25) {
        return Err(Error::domain(format!("richardson = {richardson} must exceed 1/4")));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::domain(format!("epsilon = {epsilon} outside (0, 1/2)")));
    }
    let sqrt_r = richardson.sqrt();
    let a = epsilon * epsilon / (1024.0 * richardson * richardson);
    let b = 1.0 + 1.0 / (2.0 * sqrt_r);
    let x = 1.0 / (2.0 * sqrt_r - 1.0);

    let c_tau = c_tau_bound(richardson, epsilon);
    let c_alpha = a / 50_000.0 * b.powi(-2) * (-4.0 * x).exp();
    let c_beta = a / 1_000.0 * b.powf(-0.5) * (-2.0 * x).exp();

    Ok(HypoConstants {
        c_tau,
        c_alpha,
        c_beta,
        c: 0.0,
        c0: 0.0,
        c1: 0.0,
        n: 1.0,
        m: 1.0,
        big_j: 1.0,
        delta_star: 0.05,
        admissible: check_smallness(c_tau, c_alpha, c_beta, richardson, epsilon).all_pass(),
    })
}

/// The three (value, bound) pairs behind [`check_smallness`], in condition
/// order.
pub fn smallness_terms(
    c_tau: f64,
    c_alpha: f64,
    c_beta: f64,
    richardson: f64,
    epsilon: f64,
) -> [(f64, f64); 3] {
    let sqrt_r = richardson.sqrt();
    let b = 1.0 + 1.0 / (2.0 * sqrt_r);
    let x = 1.0 / (2.0 * sqrt_r - 1.0);
    [
        (c_tau, c_tau_bound(richardson, epsilon)),
        (
            c_alpha * b * (2.0 * x).exp(),
            (c_beta / 25.0).min(1.0 / (2.0 * std::f64::consts::PI)),
        ),
        (
            c_beta * c_beta / c_alpha,
            (epsilon * epsilon / (1024.0 * richardson * richardson)).min(1.0 / 16.0),
        ),
    ]
}

/// Evaluates the three smallness conditions, returning per-condition margins.
pub fn check_smallness(
    c_tau: f64,
    c_alpha: f64,
    c_beta: f64,
    richardson: f64,
    epsilon: f64,
) -> SmallnessReport {
    let [(v1, b1), (v2, b2), (v3, b3)] =
        smallness_terms(c_tau, c_alpha, c_beta, richardson, epsilon);
    SmallnessReport { tau_margin: b1 - v1, alpha_margin: b2 - v2, beta_margin: b3 - v3 }
}
