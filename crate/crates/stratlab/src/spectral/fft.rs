//! 2D complex FFT on the k-major lattice layout.
//!
//! Spectral → physical is the unnormalized inverse transform; physical →
//! spectral divides by nk·nη, so coefficients are the amplitudes of
//! e^{i(kX + ηY)} directly.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::Complex;

pub struct Fft2 {
    nk: usize,
    neta: usize,
    fwd_eta: Arc<dyn Fft<f64>>,
    inv_eta: Arc<dyn Fft<f64>>,
    fwd_k: Arc<dyn Fft<f64>>,
    inv_k: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(nk: usize, neta: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            nk,
            neta,
            fwd_eta: planner.plan_fft_forward(neta),
            inv_eta: planner.plan_fft_inverse(neta),
            fwd_k: planner.plan_fft_forward(nk),
            inv_k: planner.plan_fft_inverse(nk),
        }
    }

    /// Below this size the thread-pool wakeups cost more than the work.
    const PAR_THRESHOLD: usize = 16_384;

    fn rows(&self, data: &mut [Complex], fft: &Arc<dyn Fft<f64>>) {
        if self.nk * self.neta < Self::PAR_THRESHOLD {
            let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for row in data.chunks_mut(self.neta) {
                fft.process_with_scratch(row, &mut scratch);
            }
        } else {
            data.par_chunks_mut(self.neta).for_each_init(
                || vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()],
                |scratch, row| fft.process_with_scratch(row, scratch),
            );
        }
    }

    fn cols(&self, data: &mut [Complex], fft: &Arc<dyn Fft<f64>>) {
        let nk = self.nk;
        let neta = self.neta;
        if nk * neta < Self::PAR_THRESHOLD {
            let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            let mut col = vec![Complex::new(0.0, 0.0); nk];
            for ie in 0..neta {
                for ik in 0..nk {
                    col[ik] = data[ik * neta + ie];
                }
                fft.process_with_scratch(&mut col, &mut scratch);
                for ik in 0..nk {
                    data[ik * neta + ie] = col[ik];
                }
            }
            return;
        }
        // gather each eta-column into a contiguous buffer, transform, scatter
        let cols: Vec<Vec<Complex>> = (0..neta)
            .into_par_iter()
            .map_init(
                || vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()],
                |scratch, ie| {
                    let mut col: Vec<Complex> = (0..nk).map(|ik| data[ik * neta + ie]).collect();
                    fft.process_with_scratch(&mut col, scratch);
                    col
                },
            )
            .collect();
        for (ie, col) in cols.iter().enumerate() {
            for (ik, v) in col.iter().enumerate() {
                data[ik * neta + ie] = *v;
            }
        }
    }

    /// Spectral coefficients → physical samples (in place).
    pub fn to_physical(&self, data: &mut [Complex]) {
        debug_assert_eq!(data.len(), self.nk * self.neta);
        self.rows(data, &self.inv_eta);
        self.cols(data, &self.inv_k);
    }

    /// Physical samples → spectral coefficients (in place).
    pub fn to_spectral(&self, data: &mut [Complex]) {
        debug_assert_eq!(data.len(), self.nk * self.neta);
        self.rows(data, &self.fwd_eta);
        self.cols(data, &self.fwd_k);
        let scale = 1.0 / (self.nk * self.neta) as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }
}
