//! Power-law and exponential rate fitting by least squares on log data.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fitted rate with its uncertainty.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RateFit {
    /// Power-law exponent, or decay rate for exponential fits.
    pub exponent: f64,
    pub std_err: f64,
    pub window: (f64, f64),
    pub residual_norm: f64,
    pub n_samples: usize,
}

fn windowed(series: &[(f64, f64)], window: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    if !(window.1 > window.0) {
        return Err(Error::Fit(format!("degenerate window [{}, {}]", window.0, window.1)));
    }
    let pts: Vec<(f64, f64)> =
        series.iter().copied().filter(|(t, _)| *t >= window.0 && *t <= window.1).collect();
    if pts.len() < 8 {
        return Err(Error::Fit(format!("only {} samples in window, need at least 8", pts.len())));
    }
    if pts.iter().any(|(_, v)| !(*v > 0.0)) {
        return Err(Error::Fit("nonpositive values in fit window".to_string()));
    }
    Ok(pts)
}

fn linear_fit(xy: &[(f64, f64)], window: (f64, f64)) -> RateFit {
    let n = xy.len() as f64;
    let xbar = xy.iter().map(|(x, _)| x).sum::<f64>() / n;
    let ybar = xy.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|(x, _)| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xy.iter().map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = xy.iter().map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let dof = (xy.len().max(3) - 2) as f64;
    let std_err = (ss_res / dof / sxx).sqrt();
    RateFit {
        exponent: slope,
        std_err,
        window,
        residual_norm: ss_res.sqrt(),
        n_samples: xy.len(),
    }
}

/// Fits v ≈ a·t^b over the window and returns b.
pub fn fit_power(series: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit> {
    let pts = windowed(series, window)?;
    if pts.iter().any(|(t, _)| !(*t > 0.0)) {
        return Err(Error::Fit("power fit needs strictly positive times".to_string()));
    }
    let xy: Vec<(f64, f64)> = pts.iter().map(|(t, v)| (t.ln(), v.ln())).collect();
    Ok(linear_fit(&xy, window))
}

/// Fits v ≈ a·e^{−rt} over the window and returns the decay rate r
/// (positive for decaying series).
pub fn fit_exponential(series: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit> {
    let pts = windowed(series, window)?;
    let xy: Vec<(f64, f64)> = pts.iter().map(|(t, v)| (*t, v.ln())).collect();
    let mut fit = linear_fit(&xy, window);
    fit.exponent = -fit.exponent;
    fit
        .exponent
        .is_finite()
        .then_some(fit)
        .ok_or_else(|| Error::Fit("non-finite exponential fit".to_string()))
}
