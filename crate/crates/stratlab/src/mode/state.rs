//! Per-frequency state and trajectories of the symmetrized pair (Z, Q).

use crate::multipliers::{eval_p, FrequencyPoint};
use crate::{Complex, Error, Result};

/// Which symmetrization relates (Ω, Θ) to (Z, Q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Symmetrization {
    /// Z = ⟨k⟩^{1/2} p^{−1/4} Ω, Q = √R·i·sgn(k)·⟨k⟩^{1/2} p^{1/4} Θ.
    #[default]
    Main,
    /// |k|^{1/2} replaces ⟨k⟩^{1/2} in both weights.
    Alt,
}

fn k_weight(kind: Symmetrization, k: f64) -> f64 {
    match kind {
        Symmetrization::Main => (1.0 + k * k).sqrt().sqrt(),
        Symmetrization::Alt => k.abs().sqrt(),
    }
}

/// Maps one moving-frame coefficient pair (Ω̂, Θ̂) to (Z, Q). Requires k ≠ 0.
pub fn symmetrize_pair(
    kind: Symmetrization,
    omega: Complex,
    theta: Complex,
    k: f64,
    eta: f64,
    t: f64,
    richardson: f64,
) -> Result<(Complex, Complex)> {
    if k == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let (p, _) = eval_p(FrequencyPoint::new(k, eta, t));
    let kw = k_weight(kind, k);
    let p4 = p.sqrt().sqrt();
    let z = omega * (kw / p4);
    // ∂_X |∂_X|^{-1} is the multiplier i·sgn(k)
    let i_sgn = Complex::new(0.0, k.signum());
    let q = theta * i_sgn * (richardson.sqrt() * kw * p4);
    Ok((z, q))
}

/// Inverse of [`symmetrize_pair`].
pub fn unsymmetrize_pair(
    kind: Symmetrization,
    z: Complex,
    q: Complex,
    k: f64,
    eta: f64,
    t: f64,
    richardson: f64,
) -> Result<(Complex, Complex)> {
    if k == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let (p, _) = eval_p(FrequencyPoint::new(k, eta, t));
    let kw = k_weight(kind, k);
    let p4 = p.sqrt().sqrt();
    let omega = z * (p4 / kw);
    let neg_i_sgn = Complex::new(0.0, -k.signum());
    let theta = q * neg_i_sgn / (richardson.sqrt() * kw * p4);
    Ok((omega, theta))
}

/// Complex pair (Z, Q) at a single frequency and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub k: f64,
    pub eta: f64,
    pub t: f64,
    pub z: Complex,
    pub q: Complex,
}

impl ModeState {
    pub fn new(k: f64, eta: f64, t: f64, z: Complex, q: Complex) -> Self {
        ModeState { k, eta, t, z, q }
    }

    pub fn point(&self) -> FrequencyPoint {
        FrequencyPoint::new(self.k, self.eta, self.t)
    }

    /// |Z|² + |Q|².
    pub fn quad(&self) -> f64 {
        self.z.norm_sqr() + self.q.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.z.re.is_finite()
            && self.z.im.is_finite()
            && self.q.re.is_finite()
            && self.q.im.is_finite()
    }
}

/// Time-ordered samples of one mode, tagged with the diffusivities and
/// tolerance the integrator used.
#[derive(Debug, Clone)]
pub struct ModeTrajectory {
    pub k: f64,
    pub eta: f64,
    pub nu: f64,
    pub kappa: f64,
    pub richardson: f64,
    pub tol: f64,
    pub samples: Vec<ModeState>,
}

impl ModeTrajectory {
    /// Last recorded state.
    pub fn last(&self) -> &ModeState {
        self.samples.last().expect("trajectory has at least the initial sample")
    }

    /// Checks strict monotonicity of sample times in the integration
    /// direction.
    pub fn times_strictly_monotone(&self) -> bool {
        let n = self.samples.len();
        if n < 2 {
            return true;
        }
        let forward = self.samples[n - 1].t > self.samples[0].t;
        self.samples.windows(2).all(|w| {
            if forward {
                w[1].t > w[0].t
            } else {
                w[1].t < w[0].t
            }
        })
    }
}
