//! Fourier multipliers and time-dependent weights of the energy method.
//!
//! All of these act mode-by-mode on the moving-frame lattice. The shifted
//! frequency η − kt appears throughout; `p` is the (positive) symbol of the
//! moving-frame Laplacian, `λ` the enhanced-dissipation/Taylor-dispersion
//! rate, `α`/`β` the low/high frequency weights, `N` the stratification
//! weight, `𝔍` the inviscid damping weight and `M` the decay-correction
//! factor.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A single point of the (k, η, t) phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPoint {
    /// x-wavenumber. Operations dividing by |k| reject k = 0.
    pub k: f64,
    /// y-wavenumber in the moving frame.
    pub eta: f64,
    /// Time ≥ 0.
    pub t: f64,
}

impl FrequencyPoint {
    pub fn new(k: f64, eta: f64, t: f64) -> Self {
        FrequencyPoint { k, eta, t }
    }

    /// Shifted frequency η − kt.
    pub fn xi(&self) -> f64 {
        self.eta - self.k * self.t
    }
}

/// p = k² + (η − kt)² and its time derivative ∂ₜp = −2k(η − kt).
pub fn eval_p(pt: FrequencyPoint) -> (f64, f64) {
    let xi = pt.xi();
    (pt.k * pt.k + xi * xi, -2.0 * pt.k * xi)
}

/// Decay rate λ(μ, k): μ^{1/3}|k|^{2/3} on |k| ≥ μ, k²/ν below.
///
/// The boundary |k| = μ is assigned to the high branch. k = 0 returns 0, and
/// μ = 0 (inviscid) returns 0 for every k.
pub fn eval_lambda(mu: f64, nu: f64, k: f64) -> f64 {
    let ak = k.abs();
    if ak == 0.0 {
        return 0.0;
    }
    if ak >= mu {
        mu.cbrt() * ak.powf(2.0 / 3.0)
    } else {
        k * k / nu
    }
}

/// Low/high-frequency weights (α_k, β_k).
///
/// α = 1, β = μ⁻¹ for |k| < μ; α = μ^{2/3}|k|^{−2/3}, β = μ^{1/3}|k|^{−4/3}
/// for |k| ≥ μ. With μ = 0 both vanish identically (the α/β blocks of the
/// energy are absent in inviscid runs).
pub fn eval_alpha_beta(mu: f64, k: f64) -> (f64, f64) {
    let ak = k.abs();
    if ak < mu {
        (1.0, 1.0 / mu)
    } else if mu == 0.0 {
        (0.0, 0.0)
    } else {
        (mu.powf(2.0 / 3.0) * ak.powf(-2.0 / 3.0), mu.cbrt() * ak.powf(-4.0 / 3.0))
    }
}

/// Ratio ∂ₜp/(|k|·p^{1/2}), the argument of the stratification weight.
///
/// Bounded by 2 in absolute value; its own time derivative is 2|k|³p^{−3/2}.
pub fn eval_g(pt: FrequencyPoint) -> Result<f64> {
    if pt.k == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let (p, dp) = eval_p(pt);
    Ok(dp / (pt.k.abs() * p.sqrt()))
}

/// Stratification weight N_k = exp(−∂ₜp/(|k|p^{1/2}) · 1/(2√R − 1)).
///
/// Always ≥ exp(−2/(2√R−1)). The symbol exceeds 1 where k(η − kt) > 0; only
/// the lower bound is asserted anywhere in this crate.
pub fn eval_n_weight(pt: FrequencyPoint, richardson: f64) -> Result<f64> {
    let g = eval_g(pt)?;
    Ok((-g / (2.0 * richardson.sqrt() - 1.0)).exp())
}

/// Inviscid damping weight 𝔍_k = (1/2)·arctan(η/k − t).
///
/// Satisfies ∂ₜ𝔍_k = −k²/(2p) and |𝔍_k| ≤ π/4.
pub fn eval_j_weight(pt: FrequencyPoint) -> Result<f64> {
    if pt.k == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    Ok(0.5 * (pt.eta / pt.k - pt.t).atan())
}

/// F(x) = ∫₀ˣ s²(1+s²)⁻² ds = (arctan x − x/(1+x²))/2.
fn m_kernel(x: f64) -> f64 {
    0.5 * (x.atan() - x / (1.0 + x * x))
}

/// Decay-correction factor M_k(t) = exp(J²·F(cλt)).
///
/// Closed-form solution of Ṁ = cJ²λ (cλt)²⟨cλt⟩⁻⁴ M, M(0) = 1; increasing
/// in t with limit exp(J²π/4).
pub fn eval_m_correction(c: f64, big_j: f64, lambda: f64, t: f64) -> f64 {
    (big_j * big_j * m_kernel(c * lambda * t)).exp()
}

/// All multipliers evaluated at one phase-space point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MultiplierBundle {
    pub p: f64,
    pub dp_dt: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub n_weight: f64,
    pub j_weight: f64,
    pub m_corr: f64,
}

impl MultiplierBundle {
    /// Evaluates every multiplier at `pt`. Rejects k = 0 (N and 𝔍 divide by
    /// |k|).
    pub fn evaluate(
        pt: FrequencyPoint,
        mu: f64,
        nu: f64,
        richardson: f64,
        c: f64,
        big_j: f64,
    ) -> Result<Self> {
        let (p, dp_dt) = eval_p(pt);
        let lambda = eval_lambda(mu, nu, pt.k);
        let (alpha, beta) = eval_alpha_beta(mu, pt.k);
        let n_weight = eval_n_weight(pt, richardson)?;
        let j_weight = eval_j_weight(pt)?;
        let m_corr = eval_m_correction(c, big_j, lambda, pt.t);
        Ok(MultiplierBundle { p, dp_dt, lambda, alpha, beta, n_weight, j_weight, m_corr })
    }
}
