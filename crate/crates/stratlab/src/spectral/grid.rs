//! Truncated wavenumber lattice for the moving-frame fields.
//!
//! Coefficients are stored k-major: flat index = ik·nη + iη. FFT index i
//! maps to the signed index i (i < n/2) or i − n (i ≥ n/2), and wavenumbers
//! are Δ·signed. The 2/3-rule band keeps |signed| ≤ n/3; the Nyquist row
//! always falls outside it.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nk: usize,
    pub neta: usize,
    pub dk: f64,
    pub deta: f64,
}

impl Grid {
    pub fn new(nk: usize, neta: usize, dk: f64, deta: f64) -> Result<Self> {
        if nk < 4 || neta < 4 || !nk.is_multiple_of(2) || !neta.is_multiple_of(2) {
            return Err(Error::Grid(format!(
                "lattice sizes must be even and at least 4, got {nk} x {neta}"
            )));
        }
        if !(dk > 0.0 && deta > 0.0) {
            return Err(Error::Grid(format!("spacings must be positive, got {dk}, {deta}")));
        }
        Ok(Grid { nk, neta, dk, deta })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nk * self.neta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, ik: usize, ie: usize) -> usize {
        ik * self.neta + ie
    }

    #[inline]
    pub fn signed(i: usize, n: usize) -> isize {
        if i < n / 2 {
            i as isize
        } else {
            i as isize - n as isize
        }
    }

    #[inline]
    pub fn k_at(&self, ik: usize) -> f64 {
        Self::signed(ik, self.nk) as f64 * self.dk
    }

    #[inline]
    pub fn eta_at(&self, ie: usize) -> f64 {
        Self::signed(ie, self.neta) as f64 * self.deta
    }

    pub fn k_max(&self) -> f64 {
        (self.nk as f64 / 2.0 - 1.0) * self.dk
    }

    pub fn eta_max(&self) -> f64 {
        (self.neta as f64 / 2.0 - 1.0) * self.deta
    }

    /// Index of the conjugate mode (−k, −η), when it exists on the lattice.
    ///
    /// The Nyquist rows have no partner; they are kept identically zero.
    pub fn conj_idx(&self, ik: usize, ie: usize) -> Option<(usize, usize)> {
        if ik == self.nk / 2 || ie == self.neta / 2 {
            return None;
        }
        let cik = if ik == 0 { 0 } else { self.nk - ik };
        let cie = if ie == 0 { 0 } else { self.neta - ie };
        Some((cik, cie))
    }

    /// 2/3-rule cutoffs in signed-index units.
    pub fn dealias_cut(&self) -> (isize, isize) {
        ((self.nk / 3) as isize, (self.neta / 3) as isize)
    }

    /// True when the mode survives 2/3-rule truncation.
    #[inline]
    pub fn in_band(&self, ik: usize, ie: usize) -> bool {
        let (ck, ce) = self.dealias_cut();
        Self::signed(ik, self.nk).abs() <= ck && Self::signed(ie, self.neta).abs() <= ce
    }

    pub fn cell_area(&self) -> f64 {
        self.dk * self.deta
    }

    /// Nearest lattice indices for a physical wavevector.
    pub fn nearest_mode(&self, k: f64, eta: f64) -> Result<(usize, usize)> {
        let sk = (k / self.dk).round() as isize;
        let se = (eta / self.deta).round() as isize;
        let (ck, ce) = self.dealias_cut();
        if sk.abs() > ck || se.abs() > ce {
            return Err(Error::Grid(format!(
                "wavevector ({k}, {eta}) falls outside the dealiased band"
            )));
        }
        let ik = if sk >= 0 { sk as usize } else { (self.nk as isize + sk) as usize };
        let ie = if se >= 0 { se as usize } else { (self.neta as isize + se) as usize };
        Ok((ik, ie))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_indices_round_trip() {
        let g = Grid::new(8, 8, 0.5, 1.0).unwrap();
        let ks: Vec<f64> = (0..8).map(|i| g.k_at(i)).collect();
        assert_eq!(ks, vec![0.0, 0.5, 1.0, 1.5, -2.0, -1.5, -1.0, -0.5]);
        assert_eq!(g.nearest_mode(1.0, -2.0).unwrap(), (2, 6));
    }

    #[test]
    fn conjugate_indices_pair_up() {
        let g = Grid::new(8, 6, 1.0, 1.0).unwrap();
        assert_eq!(g.conj_idx(2, 1), Some((6, 5)));
        assert_eq!(g.conj_idx(0, 2), Some((0, 4)));
        assert_eq!(g.conj_idx(4, 1), None); // k Nyquist
        assert_eq!(g.conj_idx(1, 3), None); // eta Nyquist
    }

    #[test]
    fn dealias_band_is_two_thirds() {
        let g = Grid::new(12, 12, 1.0, 1.0).unwrap();
        assert!(g.in_band(4, 0)); // signed 4 = 12/3
        assert!(!g.in_band(5, 0));
        assert!(g.in_band(12 - 4, 0)); // signed -4
        assert!(!g.in_band(6, 0)); // Nyquist
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(Grid::new(5, 8, 1.0, 1.0).is_err());
        assert!(Grid::new(8, 8, 0.0, 1.0).is_err());
        assert!(Grid::new(2, 8, 1.0, 1.0).is_err());
    }
}
