//! Moving-frame spectral field (Ω̂, Θ̂) and initial-data construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::mode::state::{symmetrize_pair, unsymmetrize_pair, Symmetrization};
use crate::norms::{eval_norm, NormFamily, NormSpec};
use crate::spectral::grid::Grid;
use crate::{Complex, Error, HypoConstants, PhysParams, Result};

/// Fourier coefficients of (Ω, Θ) on the lattice at one time.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub grid: Grid,
    pub t: f64,
    pub omega: Vec<Complex>,
    pub theta: Vec<Complex>,
    pub params: PhysParams,
    pub consts: HypoConstants,
}

impl SpectralField {
    pub fn zero(grid: Grid, params: PhysParams, consts: HypoConstants) -> Self {
        let n = grid.len();
        SpectralField {
            grid,
            t: 0.0,
            omega: vec![Complex::new(0.0, 0.0); n],
            theta: vec![Complex::new(0.0, 0.0); n],
            params,
            consts,
        }
    }

    /// Shifted frequency η − kt of a mode at the field's current time.
    #[inline]
    pub fn xi(&self, ik: usize, ie: usize) -> f64 {
        self.grid.eta_at(ie) - self.grid.k_at(ik) * self.t
    }

    /// p evaluated at a mode, at the field's current time.
    #[inline]
    pub fn p_at(&self, ik: usize, ie: usize) -> f64 {
        let k = self.grid.k_at(ik);
        let xi = self.xi(ik, ie);
        k * k + xi * xi
    }

    /// Projects both arrays onto Hermitian symmetry (real physical fields)
    /// and zeroes the partnerless Nyquist rows.
    pub fn enforce_hermitian(&mut self) {
        enforce_hermitian(&self.grid, &mut self.omega);
        enforce_hermitian(&self.grid, &mut self.theta);
    }

    /// Largest relative deviation from Hermitian symmetry over both arrays.
    pub fn max_hermitian_asymmetry(&self) -> f64 {
        hermitian_asymmetry(&self.grid, &self.omega)
            .max(hermitian_asymmetry(&self.grid, &self.theta))
    }

    /// Streamfunction coefficients from −pΨ = Ω; the (0,0) mode is gauged
    /// to zero.
    pub fn psi_hat(&self) -> Vec<Complex> {
        let g = &self.grid;
        let mut psi = vec![Complex::new(0.0, 0.0); g.len()];
        for ik in 0..g.nk {
            for ie in 0..g.neta {
                let p = self.p_at(ik, ie);
                if p > 0.0 {
                    psi[g.idx(ik, ie)] = -self.omega[g.idx(ik, ie)] / p;
                }
            }
        }
        psi
    }

    /// Velocity coefficients U = ∇ₜ^⊥Ψ: U¹ = i(η−kt)Ω̂/p, U² = −ikΩ̂/p.
    ///
    /// These are also the stationary-frame velocity components expressed in
    /// moving-frame coefficients.
    pub fn velocity_hat(&self) -> (Vec<Complex>, Vec<Complex>) {
        let g = &self.grid;
        let mut u1 = vec![Complex::new(0.0, 0.0); g.len()];
        let mut u2 = vec![Complex::new(0.0, 0.0); g.len()];
        let i = Complex::new(0.0, 1.0);
        for ik in 0..g.nk {
            let k = g.k_at(ik);
            for ie in 0..g.neta {
                let p = self.p_at(ik, ie);
                if p > 0.0 {
                    let om = self.omega[g.idx(ik, ie)];
                    let xi = self.xi(ik, ie);
                    u1[g.idx(ik, ie)] = i * xi * om / p;
                    u2[g.idx(ik, ie)] = -i * k * om / p;
                }
            }
        }
        (u1, u2)
    }

    /// Symmetrized coefficient arrays (Z, Q); the k = 0 column is excluded
    /// and returned as zeros.
    pub fn symmetrize(&self, kind: Symmetrization) -> Result<(Vec<Complex>, Vec<Complex>)> {
        let g = &self.grid;
        let mut z = vec![Complex::new(0.0, 0.0); g.len()];
        let mut q = vec![Complex::new(0.0, 0.0); g.len()];
        for ik in 0..g.nk {
            let k = g.k_at(ik);
            if k == 0.0 {
                continue;
            }
            for ie in 0..g.neta {
                let idx = g.idx(ik, ie);
                let (zz, qq) = symmetrize_pair(
                    kind,
                    self.omega[idx],
                    self.theta[idx],
                    k,
                    g.eta_at(ie),
                    self.t,
                    self.params.richardson,
                )?;
                z[idx] = zz;
                q[idx] = qq;
            }
        }
        Ok((z, q))
    }

    /// Rebuilds (Ω, Θ) from symmetrized arrays on the k ≠ 0 columns.
    pub fn unsymmetrize_arrays(
        &self,
        kind: Symmetrization,
        z: &[Complex],
        q: &[Complex],
    ) -> Result<(Vec<Complex>, Vec<Complex>)> {
        let g = &self.grid;
        let mut omega = vec![Complex::new(0.0, 0.0); g.len()];
        let mut theta = vec![Complex::new(0.0, 0.0); g.len()];
        for ik in 0..g.nk {
            let k = g.k_at(ik);
            if k == 0.0 {
                continue;
            }
            for ie in 0..g.neta {
                let idx = g.idx(ik, ie);
                let (om, th) = unsymmetrize_pair(
                    kind,
                    z[idx],
                    q[idx],
                    k,
                    g.eta_at(ie),
                    self.t,
                    self.params.richardson,
                )?;
                omega[idx] = om;
                theta[idx] = th;
            }
        }
        Ok((omega, theta))
    }

    /// Initial-data size ζ = ‖ω‖_{V(0)} + √R‖∇θ‖_{V(0)}.
    pub fn v0_size(&self) -> Result<f64> {
        let spec = self.v_norm_spec();
        let omega_norm = eval_norm(&self.grid, self.t, &self.omega, &spec)?;
        let grad: Vec<Complex> = self.grad_theta_magnitude();
        let grad_norm = eval_norm(&self.grid, self.t, &grad, &spec)?;
        Ok(omega_norm + self.params.richardson.sqrt() * grad_norm)
    }

    /// Per-mode magnitude of the stationary gradient of θ: √p·|Θ̂| stored as
    /// a real-valued coefficient array.
    pub fn grad_theta_magnitude(&self) -> Vec<Complex> {
        let g = &self.grid;
        let mut out = vec![Complex::new(0.0, 0.0); g.len()];
        for ik in 0..g.nk {
            for ie in 0..g.neta {
                let idx = g.idx(ik, ie);
                out[idx] = Complex::new(self.p_at(ik, ie).sqrt() * self.theta[idx].norm(), 0.0);
            }
        }
        out
    }

    /// V-family norm spec bound to this field's parameters. Inviscid runs
    /// drop the j = 1 term (its ⟨k/μ⟩^{−1/3} weight degenerates at μ = 0).
    pub fn v_norm_spec(&self) -> NormSpec {
        NormSpec {
            family: NormFamily::V,
            n: self.consts.n,
            m: self.consts.m,
            big_j: self.consts.big_j,
            c: self.consts.c,
            mu: self.params.mu,
            nu: self.params.nu,
            include_j1: !self.params.is_inviscid(),
            stationary_envelope: false,
        }
    }
}

fn enforce_hermitian(grid: &Grid, data: &mut [Complex]) {
    for ik in 0..grid.nk {
        for ie in 0..grid.neta {
            match grid.conj_idx(ik, ie) {
                None => data[grid.idx(ik, ie)] = Complex::new(0.0, 0.0),
                Some((cik, cie)) => {
                    if (cik, cie) == (ik, ie) {
                        let v = data[grid.idx(ik, ie)];
                        data[grid.idx(ik, ie)] = Complex::new(v.re, 0.0);
                    } else if (cik, cie) > (ik, ie) {
                        let a = data[grid.idx(ik, ie)];
                        let b = data[grid.idx(cik, cie)];
                        let avg = (a + b.conj()) * 0.5;
                        data[grid.idx(ik, ie)] = avg;
                        data[grid.idx(cik, cie)] = avg.conj();
                    }
                }
            }
        }
    }
}

fn hermitian_asymmetry(grid: &Grid, data: &[Complex]) -> f64 {
    let scale = data.iter().map(|v| v.norm()).fold(0.0f64, f64::max).max(1e-300);
    let mut worst = 0.0f64;
    for ik in 0..grid.nk {
        for ie in 0..grid.neta {
            match grid.conj_idx(ik, ie) {
                None => worst = worst.max(data[grid.idx(ik, ie)].norm() / scale),
                Some((cik, cie)) => {
                    let d = (data[grid.idx(ik, ie)] - data[grid.idx(cik, cie)].conj()).norm();
                    worst = worst.max(d / scale);
                }
            }
        }
    }
    worst
}

/// Initial-data recipes. All are built at t = 0, symmetrized to Hermitian
/// form, then rescaled so the V(0)-size equals the requested ζ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum InitialRecipe {
    Zero,
    /// One wavevector plus its conjugate partner.
    SingleMode { k: f64, eta: f64, omega_amp: (f64, f64), theta_amp: (f64, f64) },
    /// Gaussian envelope exp(−(k−k₀)²/2σ_k² − (η−η₀)²/2σ_η²) on both signs
    /// of k₀, with Θ = ratio·Ω.
    GaussianBump { k_center: f64, eta_center: f64, sigma_k: f64, sigma_eta: f64, theta_ratio: f64 },
    /// Seeded random phases on the band k ∈ ±[k_min, k_max], |η| ≤ eta_max.
    RandomBand { k_min: f64, k_max: f64, eta_max: f64, theta_ratio: f64, seed: u64 },
}

/// Builds a field whose V(0)-size is `zeta` to within 1e−10 relative.
pub fn init_field(
    grid: Grid,
    params: PhysParams,
    consts: HypoConstants,
    recipe: &InitialRecipe,
    zeta: f64,
) -> Result<SpectralField> {
    let mut field = SpectralField::zero(grid, params, consts);
    match recipe {
        InitialRecipe::Zero => {
            if zeta != 0.0 {
                return Err(Error::InitialData(
                    "zero recipe cannot be scaled to a nonzero zeta".to_string(),
                ));
            }
            return Ok(field);
        }
        InitialRecipe::SingleMode { k, eta, omega_amp, theta_amp } => {
            if *k == 0.0 {
                return Err(Error::InitialData("single mode must have k != 0".to_string()));
            }
            let (ik, ie) = field.grid.nearest_mode(*k, *eta)?;
            let idx = field.grid.idx(ik, ie);
            field.omega[idx] = Complex::new(omega_amp.0, omega_amp.1);
            field.theta[idx] = Complex::new(theta_amp.0, theta_amp.1);
        }
        InitialRecipe::GaussianBump { k_center, eta_center, sigma_k, sigma_eta, theta_ratio } => {
            if !(*sigma_k > 0.0 && *sigma_eta > 0.0) {
                return Err(Error::InitialData("gaussian widths must be positive".to_string()));
            }
            // demand the bump core fits in the dealiased band
            field.grid.nearest_mode(k_center.abs(), *eta_center)?;
            let g = field.grid.clone();
            for ik in 0..g.nk {
                let k = g.k_at(ik);
                if k == 0.0 || !g.in_band(ik, 0) {
                    continue;
                }
                for ie in 0..g.neta {
                    if !g.in_band(ik, ie) {
                        continue;
                    }
                    let eta = g.eta_at(ie);
                    let sk = (k.abs() - k_center.abs()) / sigma_k;
                    let se = (eta - eta_center * k.signum()) / sigma_eta;
                    let amp = (-0.5 * (sk * sk + se * se)).exp();
                    if amp > 1e-14 {
                        let idx = g.idx(ik, ie);
                        field.omega[idx] = Complex::new(amp, 0.0);
                        field.theta[idx] = Complex::new(theta_ratio * amp, 0.0);
                    }
                }
            }
        }
        InitialRecipe::RandomBand { k_min, k_max, eta_max, theta_ratio, seed } => {
            if !(k_max > k_min && *k_min >= 0.0) {
                return Err(Error::InitialData("need 0 <= k_min < k_max".to_string()));
            }
            let g = field.grid.clone();
            if *k_max > g.k_max() || *eta_max > g.eta_max() {
                return Err(Error::InitialData(format!(
                    "band (k <= {k_max}, |eta| <= {eta_max}) exceeds the lattice extents"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for ik in 0..g.nk {
                let k = g.k_at(ik);
                if k == 0.0 || !g.in_band(ik, 0) {
                    continue;
                }
                for ie in 0..g.neta {
                    if !g.in_band(ik, ie) {
                        continue;
                    }
                    let eta = g.eta_at(ie);
                    if k.abs() < *k_min || k.abs() > *k_max || eta.abs() > *eta_max {
                        continue;
                    }
                    let idx = g.idx(ik, ie);
                    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    let amp: f64 = rng.random_range(0.5..1.0);
                    field.omega[idx] = Complex::new(amp * phase.cos(), amp * phase.sin());
                    let phase2: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    field.theta[idx] =
                        Complex::new(theta_ratio * amp * phase2.cos(), theta_ratio * amp * phase2.sin());
                }
            }
        }
    }

    field.enforce_hermitian();
    let raw = field.v0_size()?;
    if !(raw > 0.0) {
        return Err(Error::InitialData(
            "recipe produced an empty field; the lattice cannot represent it".to_string(),
        ));
    }
    let scale = zeta / raw;
    field.omega.iter_mut().for_each(|v| *v *= scale);
    field.theta.iter_mut().for_each(|v| *v *= scale);
    let achieved = field.v0_size()?;
    if (achieved - zeta).abs() > 1e-10 * zeta.max(1.0) {
        return Err(Error::InitialData(format!(
            "normalization failed: requested zeta = {zeta}, achieved {achieved}"
        )));
    }
    Ok(field)
}
