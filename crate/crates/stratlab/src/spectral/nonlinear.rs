//! Dealiased pseudo-spectral evaluation of the advection terms U·∇ₜΩ and
//! U·∇ₜΘ.

use crate::spectral::fft::Fft2;
use crate::spectral::field::SpectralField;
use crate::spectral::grid::Grid;
use crate::{Complex, Error, Result};

/// Reusable FFT plans and physical-space buffers.
pub struct SpectralWorkspace {
    pub fft: Fft2,
    bufs: Vec<Vec<Complex>>,
}

impl SpectralWorkspace {
    pub fn new(grid: &Grid) -> Self {
        SpectralWorkspace {
            fft: Fft2::new(grid.nk, grid.neta),
            bufs: (0..6).map(|_| vec![Complex::new(0.0, 0.0); grid.len()]).collect(),
        }
    }
}

/// Both convolution outputs plus the physical velocity extrema and the
/// spectral extents of the energy-carrying modes, for the CFL bound.
#[derive(Debug)]
pub struct Convolution {
    pub omega: Vec<Complex>,
    pub theta: Vec<Complex>,
    pub max_u1: f64,
    pub max_u2: f64,
    /// Largest |k| over modes holding appreciable content.
    pub k_extent: f64,
    /// Largest |η − kt| over modes holding appreciable content.
    pub xi_extent: f64,
}

fn outer_band_fraction(grid: &Grid, coeffs: &[Complex]) -> f64 {
    // energy in the top quarter of the kept band signals an under-resolved
    // cascade about to alias
    let (ck, ce) = grid.dealias_cut();
    let (tk, te) = (3 * ck / 4, 3 * ce / 4);
    let mut outer = 0.0;
    let mut total = 0.0;
    for ik in 0..grid.nk {
        let sk = Grid::signed(ik, grid.nk).abs();
        for ie in 0..grid.neta {
            let se = Grid::signed(ie, grid.neta).abs();
            let a = coeffs[grid.idx(ik, ie)].norm_sqr();
            total += a;
            if sk > tk || se > te {
                outer += a;
            }
        }
    }
    if total > 0.0 {
        outer / total
    } else {
        0.0
    }
}

fn dealias_and_clean(grid: &Grid, coeffs: &mut [Complex]) {
    for ik in 0..grid.nk {
        let k = grid.k_at(ik);
        for ie in 0..grid.neta {
            // the k = 0 column receives no nonlinear feedback by design
            if !grid.in_band(ik, ie) || k == 0.0 {
                coeffs[grid.idx(ik, ie)] = Complex::new(0.0, 0.0);
            }
        }
    }
}

/// Evaluates the two advection convolutions at the field's current time.
///
/// Errors if either input array holds more than `alias_limit` of its energy
/// in the outer half of the kept band (resolution exhausted).
pub fn nonlinear_term(
    field: &SpectralField,
    ws: &mut SpectralWorkspace,
    alias_limit: f64,
) -> Result<Convolution> {
    let g = &field.grid;
    for (name, arr) in [("omega", &field.omega), ("theta", &field.theta)] {
        let frac = outer_band_fraction(g, arr);
        if frac > alias_limit {
            let _ = name;
            return Err(Error::AliasGuard { t: field.t, fraction: frac, limit: alias_limit });
        }
    }

    let (u1, u2) = field.velocity_hat();
    let i = Complex::new(0.0, 1.0);

    // spectral extents of the advected content (for the advective CFL)
    let mag_floor = {
        let m = field
            .omega
            .iter()
            .chain(&field.theta)
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        1e-8 * m
    };
    let mut k_extent = 0.0f64;
    let mut xi_extent = 0.0f64;
    for ik in 0..g.nk {
        let k = g.k_at(ik);
        for ie in 0..g.neta {
            let idx = g.idx(ik, ie);
            if field.omega[idx].norm() > mag_floor || field.theta[idx].norm() > mag_floor {
                k_extent = k_extent.max(k.abs());
                xi_extent = xi_extent.max(field.xi(ik, ie).abs());
            }
        }
    }

    let mut bufs = std::mem::take(&mut ws.bufs);
    {
        let [b_u1, b_u2, b_gxo, b_gyo, b_gxt, b_gyt] = &mut bufs[..] else { unreachable!() };
        for ik in 0..g.nk {
            let k = g.k_at(ik);
            for ie in 0..g.neta {
                let idx = g.idx(ik, ie);
                let xi = field.xi(ik, ie);
                b_u1[idx] = u1[idx];
                b_u2[idx] = u2[idx];
                b_gxo[idx] = i * k * field.omega[idx];
                b_gyo[idx] = i * xi * field.omega[idx];
                b_gxt[idx] = i * k * field.theta[idx];
                b_gyt[idx] = i * xi * field.theta[idx];
            }
        }
        for b in bufs.iter_mut() {
            ws.fft.to_physical(b);
        }
    }

    let max_u1 = bufs[0].iter().map(|v| v.re.abs()).fold(0.0f64, f64::max);
    let max_u2 = bufs[1].iter().map(|v| v.re.abs()).fold(0.0f64, f64::max);

    let mut conv_o = vec![Complex::new(0.0, 0.0); g.len()];
    let mut conv_t = vec![Complex::new(0.0, 0.0); g.len()];
    for idx in 0..g.len() {
        conv_o[idx] = bufs[0][idx] * bufs[2][idx] + bufs[1][idx] * bufs[3][idx];
        conv_t[idx] = bufs[0][idx] * bufs[4][idx] + bufs[1][idx] * bufs[5][idx];
    }
    ws.fft.to_spectral(&mut conv_o);
    ws.fft.to_spectral(&mut conv_t);
    dealias_and_clean(g, &mut conv_o);
    dealias_and_clean(g, &mut conv_t);
    ws.bufs = bufs;

    Ok(Convolution { omega: conv_o, theta: conv_t, max_u1, max_u2, k_extent, xi_extent })
}

/// Direct O(N⁴) double-sum convolution over the dealiased band, the oracle
/// for the FFT path on small grids.
pub fn nonlinear_term_direct(field: &SpectralField) -> Result<Convolution> {
    let g = &field.grid;
    let (u1, u2) = field.velocity_hat();
    let i = Complex::new(0.0, 1.0);
    let (ck, ce) = g.dealias_cut();
    let in_band = |sk: isize, se: isize| sk.abs() <= ck && se.abs() <= ce;
    let to_idx = |sk: isize, se: isize| -> usize {
        let ik = if sk >= 0 { sk as usize } else { (g.nk as isize + sk) as usize };
        let ie = if se >= 0 { se as usize } else { (g.neta as isize + se) as usize };
        g.idx(ik, ie)
    };

    let mut conv_o = vec![Complex::new(0.0, 0.0); g.len()];
    let mut conv_t = vec![Complex::new(0.0, 0.0); g.len()];
    for sk in -ck..=ck {
        for se in -ce..=ce {
            if sk == 0 {
                continue; // no nonlinear feedback into k = 0
            }
            let out = to_idx(sk, se);
            let mut acc_o = Complex::new(0.0, 0.0);
            let mut acc_t = Complex::new(0.0, 0.0);
            // split (sk, se) = ξ1 + ξ2 with both factors in band
            for sk1 in -ck..=ck {
                let sk2 = sk - sk1;
                for se1 in -ce..=ce {
                    let se2 = se - se1;
                    if !in_band(sk2, se2) {
                        continue;
                    }
                    let i1 = to_idx(sk1, se1);
                    let i2 = to_idx(sk2, se2);
                    let k2 = sk2 as f64 * g.dk;
                    let xi2 = se2 as f64 * g.deta - k2 * field.t;
                    let gx_o = i * k2 * field.omega[i2];
                    let gy_o = i * xi2 * field.omega[i2];
                    let gx_t = i * k2 * field.theta[i2];
                    let gy_t = i * xi2 * field.theta[i2];
                    acc_o += u1[i1] * gx_o + u2[i1] * gy_o;
                    acc_t += u1[i1] * gx_t + u2[i1] * gy_t;
                }
            }
            conv_o[out] = acc_o;
            conv_t[out] = acc_t;
        }
    }
    Ok(Convolution {
        omega: conv_o,
        theta: conv_t,
        max_u1: 0.0,
        max_u2: 0.0,
        k_extent: 0.0,
        xi_extent: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::default_constants;
    use crate::spectral::field::{init_field, InitialRecipe};
    use crate::PhysParams;

    fn small_field(seed: u64) -> SpectralField {
        let grid = Grid::new(8, 8, 0.5, 0.5).unwrap();
        let params = PhysParams::new(0.01, 0.01, 1.0, 0.1).unwrap();
        let consts = default_constants(1.0, 0.1).unwrap();
        let recipe = InitialRecipe::RandomBand {
            k_min: 0.0,
            k_max: 1.0,
            eta_max: 1.0,
            theta_ratio: 0.7,
            seed,
        };
        init_field(grid, params, consts, &recipe, 0.01).unwrap()
    }

    #[test]
    fn fft_convolution_matches_direct_sum() {
        let mut field = small_field(42);
        field.t = 1.3;
        let mut ws = SpectralWorkspace::new(&field.grid);
        let fft_conv = nonlinear_term(&field, &mut ws, 1.0).unwrap();
        let direct = nonlinear_term_direct(&field).unwrap();
        let scale = direct
            .omega
            .iter()
            .chain(&direct.theta)
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        for idx in 0..field.grid.len() {
            assert!(
                (fft_conv.omega[idx] - direct.omega[idx]).norm() < 1e-12 * scale,
                "omega mismatch at {idx}"
            );
            assert!(
                (fft_conv.theta[idx] - direct.theta[idx]).norm() < 1e-12 * scale,
                "theta mismatch at {idx}"
            );
        }
    }

    #[test]
    fn single_wavevector_convolution_vanishes() {
        let grid = Grid::new(16, 16, 0.5, 0.5).unwrap();
        let params = PhysParams::new(0.01, 0.01, 1.0, 0.1).unwrap();
        let consts = default_constants(1.0, 0.1).unwrap();
        let recipe = InitialRecipe::SingleMode {
            k: 1.0,
            eta: 0.5,
            omega_amp: (1.0, 0.3),
            theta_amp: (0.2, -0.4),
        };
        let field = init_field(grid, params, consts, &recipe, 0.05).unwrap();
        let mut ws = SpectralWorkspace::new(&field.grid);
        let conv = nonlinear_term(&field, &mut ws, 1.0).unwrap();
        let worst =
            conv.omega.iter().chain(&conv.theta).map(|v| v.norm()).fold(0.0f64, f64::max);
        assert!(worst < 1e-15, "nonlinearity should vanish exactly, got {worst}");
    }

    #[test]
    fn zero_theta_keeps_theta_convolution_zero() {
        let grid = Grid::new(8, 8, 0.5, 0.5).unwrap();
        let params = PhysParams::new(0.01, 0.01, 1.0, 0.1).unwrap();
        let consts = default_constants(1.0, 0.1).unwrap();
        let recipe = InitialRecipe::RandomBand {
            k_min: 0.0,
            k_max: 1.0,
            eta_max: 1.0,
            theta_ratio: 0.0,
            seed: 9,
        };
        let field = init_field(grid, params, consts, &recipe, 0.01).unwrap();
        let mut ws = SpectralWorkspace::new(&field.grid);
        let conv = nonlinear_term(&field, &mut ws, 1.0).unwrap();
        assert!(conv.theta.iter().all(|v| v.norm() < 1e-18));
    }

    #[test]
    fn alias_guard_trips_on_saturated_band() {
        let grid = Grid::new(12, 12, 0.5, 0.5).unwrap();
        let params = PhysParams::new(0.01, 0.01, 1.0, 0.1).unwrap();
        let consts = default_constants(1.0, 0.1).unwrap();
        let mut field = SpectralField::zero(grid, params, consts);
        // put all the energy at the edge of the kept band
        let (ck, _) = field.grid.dealias_cut();
        let idx = field.grid.idx(ck as usize, 0);
        field.omega[idx] = Complex::new(1.0, 0.0);
        field.enforce_hermitian();
        let mut ws = SpectralWorkspace::new(&field.grid);
        let err = nonlinear_term(&field, &mut ws, 0.5).unwrap_err();
        assert!(matches!(err, Error::AliasGuard { .. }));
    }
}
