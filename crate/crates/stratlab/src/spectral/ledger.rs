//! Nonlinear energy/dissipation ledger and the bootstrap monotonicity
//! monitor.
//!
//! ℰ and the seven 𝒟 components are lattice Riemann sums of the pointwise
//! functionals under the weight ⟨cλ_k t⟩^{2J} M_k^{−1} ⟨k,η⟩^{2n} ⟨k⟩^{2m};
//! the k = 0 column is excluded. The running ∫𝒟 ds uses the trapezoid rule
//! over ledger rows, and the monitored quantity is G(t) = ℰ(t) + c∫𝒟 ds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::mode::energy::{dissipation_k, energy_k};
use crate::mode::state::{ModeState, Symmetrization};
use crate::multipliers::{eval_lambda, eval_m_correction};
use crate::spectral::field::SpectralField;
use crate::Result;

/// Weights of the nonlinear energy, frozen per run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WeightSpec {
    pub n: f64,
    pub m: f64,
    pub big_j: f64,
    /// Decay constant c in ⟨cλ_k t⟩ and M_k; normally the certified value.
    pub c: f64,
}

impl WeightSpec {
    pub fn from_consts(consts: &crate::HypoConstants) -> Self {
        WeightSpec { n: consts.n, m: consts.m, big_j: consts.big_j, c: consts.c }
    }
}

/// One sampled row of the energy ledger. Column order matches the exported
/// CSV: (t, E, D_gamma, D_tau, D_alpha, D_taualpha, D_beta, D_rho,
/// D_rhoalpha, intD, G).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LedgerRow {
    pub t: f64,
    pub energy: f64,
    pub d_gamma: f64,
    pub d_tau: f64,
    pub d_alpha: f64,
    pub d_taualpha: f64,
    pub d_beta: f64,
    pub d_rho: f64,
    pub d_rhoalpha: f64,
    pub int_d: f64,
    pub g_value: f64,
}

impl LedgerRow {
    /// Total weighted dissipation 𝒟 of this row.
    pub fn d_total(&self) -> f64 {
        self.d_gamma
            + self.d_tau
            + self.d_alpha
            + self.d_taualpha
            + self.d_beta
            + self.d_rho
            + self.d_rhoalpha
    }
}

/// Time series of ledger rows for one run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub rows: Vec<LedgerRow>,
    /// The c used for the G column.
    pub c: f64,
    /// Initial-data size ζ recorded at construction.
    pub zeta: f64,
}

impl EnergyLedger {
    pub fn new(c: f64, zeta: f64) -> Self {
        EnergyLedger { rows: Vec::new(), c, zeta }
    }

    /// Appends a row, accumulating ∫𝒟 by the trapezoid rule and filling G.
    pub fn push(&mut self, mut row: LedgerRow) {
        if let Some(prev) = self.rows.last() {
            assert!(row.t > prev.t, "ledger times must increase");
            row.int_d = prev.int_d + 0.5 * (row.t - prev.t) * (prev.d_total() + row.d_total());
        } else {
            row.int_d = 0.0;
        }
        row.g_value = row.energy + self.c * row.int_d;
        self.rows.push(row);
    }
}

/// Evaluates ℰ and the 𝒟 components on the current field state.
///
/// The `int_d` and `g_value` fields of the returned row are filled by
/// [`EnergyLedger::push`].
pub fn ledger_update(field: &SpectralField, weights: &WeightSpec) -> Result<LedgerRow> {
    let g = &field.grid;
    let (z, q) = field.symmetrize(Symmetrization::Main)?;
    let params = &field.params;
    let consts = &field.consts;
    let cell = g.cell_area();
    let c_rho = 1.0 / params.richardson.sqrt();

    // per-column partial sums keep the reduction order fixed
    let partials: Vec<Result<[f64; 8]>> = (0..g.nk)
        .into_par_iter()
        .map(|ik| {
            let k = g.k_at(ik);
            let mut acc = [0.0f64; 8];
            if k == 0.0 {
                return Ok(acc);
            }
            let lambda = eval_lambda(params.mu, params.nu, k);
            let km = (1.0 + k * k).powf(weights.m);
            for ie in 0..g.neta {
                let idx = g.idx(ik, ie);
                let (zz, qq) = (z[idx], q[idx]);
                if zz.norm_sqr() + qq.norm_sqr() == 0.0 {
                    continue;
                }
                let eta = g.eta_at(ie);
                let state = ModeState::new(k, eta, field.t, zz, qq);
                let e_k = energy_k(&state, consts, params)?;
                let d = dissipation_k(&state, consts, params)?;
                let x = weights.c * lambda * field.t;
                let decay = (1.0 + x * x).powf(weights.big_j);
                let m_corr = eval_m_correction(weights.c, weights.big_j, lambda, field.t);
                let kn = (1.0 + k * k + eta * eta).powf(weights.n);
                let w = decay / m_corr * kn * km * cell;
                acc[0] += w * e_k;
                acc[1] += w * d.gamma;
                acc[2] += w * consts.c_tau * d.tau;
                acc[3] += w * consts.c_alpha * d.alpha;
                acc[4] += w * consts.c_tau * consts.c_alpha * d.tau_alpha;
                acc[5] += w * consts.c_beta * d.beta;
                acc[6] += w * c_rho * d.rho;
                acc[7] += w * consts.c_alpha * c_rho * d.rho_alpha;
            }
            Ok(acc)
        })
        .collect();

    let mut sums = [0.0f64; 8];
    for p in partials {
        let p = p?;
        for (s, v) in sums.iter_mut().zip(p.iter()) {
            *s += v;
        }
    }

    Ok(LedgerRow {
        t: field.t,
        energy: sums[0],
        d_gamma: sums[1],
        d_tau: sums[2],
        d_alpha: sums[3],
        d_taualpha: sums[4],
        d_beta: sums[5],
        d_rho: sums[6],
        d_rhoalpha: sums[7],
        int_d: 0.0,
        g_value: 0.0,
    })
}

/// Sup-in-k component of the alternate nonlinear energy:
/// sup_k Σ_η ⟨k,η⟩^{2n}·(N + c_τ𝔍)·(|Z|² + |Q|² + (1/2√R)·g·Re(Z·conj Q))·Δη.
pub fn sup_energy_component(field: &SpectralField, n: f64) -> Result<f64> {
    let g = &field.grid;
    let (z, q) = field.symmetrize(Symmetrization::Main)?;
    let params = &field.params;
    let consts = &field.consts;
    let mut sup = 0.0f64;
    for ik in 0..g.nk {
        let k = g.k_at(ik);
        if k == 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for ie in 0..g.neta {
            let idx = g.idx(ik, ie);
            let (zz, qq) = (z[idx], q[idx]);
            if zz.norm_sqr() + qq.norm_sqr() == 0.0 {
                continue;
            }
            let eta = g.eta_at(ie);
            let pt = crate::multipliers::FrequencyPoint::new(k, eta, field.t);
            let gg = crate::multipliers::eval_g(pt)?;
            let nw = crate::multipliers::eval_n_weight(pt, params.richardson)?;
            let jw = crate::multipliers::eval_j_weight(pt)?;
            let weight = (1.0 + k * k + eta * eta).powf(n);
            let x = (zz * qq.conj()).re;
            let density = (nw + consts.c_tau * jw)
                * (zz.norm_sqr() + qq.norm_sqr() + 0.5 / params.richardson.sqrt() * gg * x);
            acc += weight * density * g.deta;
        }
        sup = sup.max(acc);
    }
    Ok(sup)
}

/// Running sup-in-k dissipation of the alternate norms:
/// sup_k ∫₀ᵀ Σ_η ⟨k,η⟩^{2n}·(D_γ + c_τ(1/2 − 1/4√R)·D_τ + (1/2)c_ρ·D_ρ) dη dt,
/// with the supremum taken after the time integration.
#[derive(Debug, Clone)]
pub struct SupDissipation {
    n: f64,
    per_k: Vec<f64>,
    prev: Option<(f64, Vec<f64>)>,
}

impl SupDissipation {
    pub fn new(field: &SpectralField, n: f64) -> Self {
        SupDissipation { n, per_k: vec![0.0; field.grid.nk], prev: None }
    }

    /// Accumulates the per-column integrals up to the field's current time.
    pub fn update(&mut self, field: &SpectralField) -> Result<()> {
        let g = &field.grid;
        let (z, q) = field.symmetrize(Symmetrization::Main)?;
        let params = &field.params;
        let consts = &field.consts;
        let sqrt_r = params.richardson.sqrt();
        let tau_coeff = consts.c_tau * (0.5 - 0.25 / sqrt_r);
        let rho_coeff = 0.5 / sqrt_r;

        let mut column = vec![0.0f64; g.nk];
        for ik in 0..g.nk {
            let k = g.k_at(ik);
            if k == 0.0 {
                continue;
            }
            let mut acc = 0.0;
            for ie in 0..g.neta {
                let idx = g.idx(ik, ie);
                let (zz, qq) = (z[idx], q[idx]);
                if zz.norm_sqr() + qq.norm_sqr() == 0.0 {
                    continue;
                }
                let eta = g.eta_at(ie);
                let state = ModeState::new(k, eta, field.t, zz, qq);
                let d = dissipation_k(&state, consts, params)?;
                let weight = (1.0 + k * k + eta * eta).powf(self.n);
                acc += weight * (d.gamma + tau_coeff * d.tau + rho_coeff * d.rho) * g.deta;
            }
            column[ik] = acc;
        }

        if let Some((tp, prev_col)) = &self.prev {
            let h = field.t - tp;
            for ik in 0..g.nk {
                self.per_k[ik] += 0.5 * h * (prev_col[ik] + column[ik]);
            }
        }
        self.prev = Some((field.t, column));
        Ok(())
    }

    /// sup over k of the accumulated integrals.
    pub fn value(&self) -> f64 {
        self.per_k.iter().cloned().fold(0.0, f64::max)
    }
}

/// Monitor verdict for G(t) = ℰ(t) + c∫𝒟 ds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MonitorReport {
    pub pass: bool,
    pub first_violation: Option<f64>,
    /// Largest c' ≥ 0 for which G_{c'} stays non-increasing within the same
    /// slack (0 when ℰ itself rises beyond slack somewhere).
    pub largest_monotone_c: f64,
}

/// Checks that G is non-increasing up to a relative slack.
///
/// Violations are data, not errors: the report carries the first violation
/// time and the largest monotone c'.
pub fn bootstrap_monitor(ledger: &EnergyLedger, c: f64, rel_slack: f64) -> MonitorReport {
    let rows = &ledger.rows;
    let mut pass = true;
    let mut first_violation = None;
    let mut largest = f64::INFINITY;

    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let g0 = a.energy + c * a.int_d;
        let g1 = b.energy + c * b.int_d;
        if g1 > g0 * (1.0 + rel_slack) && pass {
            pass = false;
            first_violation = Some(b.t);
        }
        let de = b.energy - a.energy;
        let di = b.int_d - a.int_d;
        let budget = rel_slack * a.energy.abs();
        if de > budget {
            largest = 0.0;
        } else if di > 0.0 {
            largest = largest.min((budget - de) / di);
        }
    }
    if !largest.is_finite() {
        largest = c;
    }
    MonitorReport { pass, first_violation, largest_monotone_c: largest.max(0.0) }
}
