//! Self-interference saturation constraints and their redundancy tests.
//!
//! A full-duplex device must keep its own transmit signal from saturating its
//! receive chain. Working in unitless form (`η = saturation power / transmit
//! power / channel gain²`), the two constraints on the digital precoder
//! `F_BB` are spectral-norm bounds:
//!
//! * LNA (per receive antenna): `(1/ns)·σ_max²(H_ii·F_RF·F_BB) ≤ η_LNA`
//! * ADC (per receive RF chain): `(1/ns)·σ_max²(W_RF*·H_ii·F_RF·F_BB) ≤ η_ADC`
//!
//! The element-wise per-antenna/per-chain powers (diagonal of the same
//! covariances) are also provided; the spectral norm dominates them, so the
//! σ-form constraints are conservative. Redundancy tests identify when a
//! constraint is already implied by the unit transmit-power budget
//! `‖F_BB‖_F² ≤ 1` (or by the other constraint), letting the solver drop it.

use crate::codebook::CandidateSet;
use crate::error::{Error, Result};
use crate::numerics::{sigma_max_sq, Mat};

/// Relative slack at which a constraint counts as active (tight).
pub const TIGHT_REL_TOL: f64 = 1e-6;

/// Unitless saturation limits at the receiving device, plus its stream count.
/// `f64::INFINITY` means "no limit".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationLimits {
    pub eta_lna: f64,
    pub eta_adc: f64,
    pub ns: usize,
}

impl SaturationLimits {
    pub fn new(eta_lna: f64, eta_adc: f64, ns: usize) -> Self {
        assert!(eta_lna >= 0.0, "eta_lna must be >= 0 (or infinite)");
        assert!(eta_adc >= 0.0, "eta_adc must be >= 0 (or infinite)");
        assert!(ns >= 1, "stream count must be >= 1");
        Self {
            eta_lna,
            eta_adc,
            ns,
        }
    }

    /// No saturation limits at all (half-duplex-like operation).
    pub fn unbounded(ns: usize) -> Self {
        Self::new(f64::INFINITY, f64::INFINITY, ns)
    }
}

/// Converts raw powers to the unitless limit `η = p_si_max/(p_tx·gain_sq)`.
pub fn eta_from_powers(p_si_max_watts: f64, p_tx_watts: f64, gain_sq: f64) -> Result<f64> {
    if !(p_tx_watts > 0.0) || !(gain_sq > 0.0) {
        return Err(Error::Parameter {
            op: "eta_from_powers",
            details: format!(
                "transmit power and gain² must be positive, got {p_tx_watts} and {gain_sq}"
            ),
        });
    }
    if !(p_si_max_watts >= 0.0) {
        return Err(Error::Parameter {
            op: "eta_from_powers",
            details: format!("saturation power must be >= 0, got {p_si_max_watts}"),
        });
    }
    Ok(p_si_max_watts / (p_tx_watts * gain_sq))
}

/// LNA-side constraint value `(1/ns)·σ_max²(H_ii·F_RF·F_BB)`.
pub fn lna_constraint_value(h_ii: &Mat, f_rf: &Mat, f_bb: &Mat, ns: usize) -> Result<f64> {
    let si_tx = h_ii.mul(f_rf).mul(f_bb);
    Ok(sigma_max_sq(&si_tx)? / ns as f64)
}

/// ADC-side constraint value `(1/ns)·σ_max²(W_RF*·H_ii·F_RF·F_BB)`.
pub fn adc_constraint_value(
    w_rf: &Mat,
    h_ii: &Mat,
    f_rf: &Mat,
    f_bb: &Mat,
    ns: usize,
) -> Result<f64> {
    let si_chain = w_rf.adjoint_mul(&h_ii.mul(f_rf).mul(f_bb));
    Ok(sigma_max_sq(&si_chain)? / ns as f64)
}

/// Expected self-interference power into each receive antenna's LNA:
/// `(1/ns)·‖row ℓ of H_ii·F_RF·F_BB‖²`.
pub fn per_antenna_powers(h_ii: &Mat, f_rf: &Mat, f_bb: &Mat, ns: usize) -> Vec<f64> {
    let si_tx = h_ii.mul(f_rf).mul(f_bb);
    (0..si_tx.rows())
        .map(|i| si_tx.row_norm_sq(i) / ns as f64)
        .collect()
}

/// Expected self-interference power into each receive RF chain's ADC:
/// `(1/ns)·‖row ℓ of W_RF*·H_ii·F_RF·F_BB‖²`.
pub fn per_chain_powers(w_rf: &Mat, h_ii: &Mat, f_rf: &Mat, f_bb: &Mat, ns: usize) -> Vec<f64> {
    let si_chain = w_rf.adjoint_mul(&h_ii.mul(f_rf).mul(f_bb));
    (0..si_chain.rows())
        .map(|i| si_chain.row_norm_sq(i) / ns as f64)
        .collect()
}

/// True when the LNA constraint is implied by the unit power budget:
/// `η_LNA ≥ (1/ns)·σ_max²(H_ii·F_RF)`.
pub fn lna_redundant(h_ii: &Mat, f_rf: &Mat, ns: usize, eta_lna: f64) -> Result<bool> {
    let s = sigma_max_sq(&h_ii.mul(f_rf))?;
    Ok(eta_lna >= s / ns as f64)
}

/// True when the ADC constraint is implied by the unit power budget:
/// `η_ADC ≥ (1/ns)·σ_max²(W_RF*·H_ii·F_RF)`.
pub fn adc_redundant_by_power(
    w_rf: &Mat,
    h_ii: &Mat,
    f_rf: &Mat,
    ns: usize,
    eta_adc: f64,
) -> Result<bool> {
    let s = sigma_max_sq(&w_rf.adjoint_mul(&h_ii.mul(f_rf)))?;
    Ok(eta_adc >= s / ns as f64)
}

/// True when satisfying the LNA constraint already satisfies the ADC one:
/// `η_ADC ≥ η_LNA·σ_max²(W_RF*)`.
pub fn adc_redundant_by_lna(w_rf: &Mat, eta_lna: f64, eta_adc: f64) -> Result<bool> {
    let s = sigma_max_sq(w_rf)?;
    if s == 0.0 || eta_lna == 0.0 {
        // Covers the 0·∞ corner: a zero limit or zero combiner implies a
        // zero bound, met by any η_ADC ≥ 0.
        return Ok(true);
    }
    Ok(eta_adc >= eta_lna * s)
}

/// Relative slack `(limit − value)/limit`; infinite limits have infinite
/// slack, and a zero limit has zero slack exactly when the value is zero.
pub fn relative_slack(value: f64, limit: f64) -> f64 {
    if limit.is_infinite() {
        f64::INFINITY
    } else if limit > 0.0 {
        (limit - value) / limit
    } else if value <= 0.0 {
        0.0
    } else {
        f64::NEG_INFINITY
    }
}

/// All constraint values for one `(F_RF, W_RF, F_BB)` triple.
#[derive(Debug, Clone)]
pub struct ConstraintReport {
    /// `‖F_BB‖_F²` against the unit budget.
    pub power_value: f64,
    pub lna_value: f64,
    pub adc_value: f64,
    pub per_antenna_values: Vec<f64>,
    pub per_chain_values: Vec<f64>,
    /// Which of (power, LNA, ADC) is within relative slack 1e−6 of its limit.
    pub tight_flags: [bool; 3],
}

impl ConstraintReport {
    pub fn evaluate(
        h_ii: &Mat,
        f_rf: &Mat,
        w_rf: &Mat,
        f_bb: &Mat,
        limits: &SaturationLimits,
    ) -> Result<Self> {
        let t_lna = h_ii.mul(f_rf);
        let t_adc = w_rf.adjoint_mul(&t_lna);
        Self::from_si_products(&t_lna, &t_adc, f_bb, limits)
    }

    /// Same report, but from the precomputed per-antenna operator
    /// `t_lna = H_ii·F_RF` and per-chain operator `t_adc = W_RF*·H_ii·F_RF`.
    pub fn from_si_products(
        t_lna: &Mat,
        t_adc: &Mat,
        f_bb: &Mat,
        limits: &SaturationLimits,
    ) -> Result<Self> {
        let ns = limits.ns as f64;
        let si_ant = t_lna.mul(f_bb);
        let si_chain = t_adc.mul(f_bb);
        let power_value = f_bb.frob_norm_sq();
        let lna_value = sigma_max_sq(&si_ant)? / ns;
        let adc_value = sigma_max_sq(&si_chain)? / ns;
        let tight = |value: f64, limit: f64| -> bool {
            limit.is_finite() && relative_slack(value, limit) <= TIGHT_REL_TOL
        };
        Ok(Self {
            power_value,
            lna_value,
            adc_value,
            per_antenna_values: (0..si_ant.rows()).map(|i| si_ant.row_norm_sq(i) / ns).collect(),
            per_chain_values: (0..si_chain.rows()).map(|i| si_chain.row_norm_sq(i) / ns).collect(),
            tight_flags: [
                tight(power_value, 1.0),
                tight(lna_value, limits.eta_lna),
                tight(adc_value, limits.eta_adc),
            ],
        })
    }

    /// All three constraints hold. Comparisons allow a ~1e−12 relative
    /// cushion so floating-point round-trips through the projection cannot
    /// flip a mathematically feasible point to infeasible.
    pub fn is_feasible(&self, limits: &SaturationLimits) -> bool {
        let ok = |value: f64, limit: f64| -> bool {
            limit.is_infinite() || value <= limit + 1e-12 * limit + 1e-18
        };
        ok(self.power_value, 1.0)
            && ok(self.lna_value, limits.eta_lna)
            && ok(self.adc_value, limits.eta_adc)
    }

    /// At least one constraint is tight (non-trivial solutions should always
    /// end on a constraint boundary).
    pub fn any_tight(&self) -> bool {
        self.tight_flags.iter().any(|&t| t)
    }
}

/// Redundancy annotation for one `(transmit candidate, receive candidate)`
/// combination at the full-duplex device.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrescreenEntry {
    /// Index into the transmit-link candidate set (supplies `F_RF`).
    pub tx_candidate: usize,
    /// Index into the receive-link candidate set (supplies `W_RF`).
    pub rx_candidate: usize,
    /// LNA constraint implied by the power budget.
    pub lna_redundant: bool,
    /// ADC constraint implied by the power budget.
    pub adc_redundant: bool,
    /// ADC constraint implied by LNA satisfaction.
    pub adc_redundant_by_lna: bool,
}

/// Annotates every transmit×receive candidate combination with redundancy
/// flags. With `filter_fully_constrained`, combinations where neither the
/// LNA nor the ADC constraint is redundant are dropped.
pub fn prescreen_candidates(
    t_ij: &CandidateSet,
    t_ki: &CandidateSet,
    h_ii: &Mat,
    limits: &SaturationLimits,
    filter_fully_constrained: bool,
) -> Result<Vec<PrescreenEntry>> {
    if t_ij.is_empty() || t_ki.is_empty() {
        return Err(Error::Parameter {
            op: "prescreen_candidates",
            details: "candidate sets must be non-empty".into(),
        });
    }
    let mut out = Vec::with_capacity(t_ij.len() * t_ki.len());
    for (ti, (f_rf, _)) in t_ij.pairs.iter().enumerate() {
        let lna = lna_redundant(h_ii, f_rf, limits.ns, limits.eta_lna)?;
        for (ri, (_, w_rf)) in t_ki.pairs.iter().enumerate() {
            let adc = adc_redundant_by_power(w_rf, h_ii, f_rf, limits.ns, limits.eta_adc)?;
            let adc_by_lna = adc_redundant_by_lna(w_rf, limits.eta_lna, limits.eta_adc)?;
            if !filter_fully_constrained || lna || adc {
                out.push(PrescreenEntry {
                    tx_candidate: ti,
                    rx_candidate: ri,
                    lna_redundant: lna,
                    adc_redundant: adc,
                    adc_redundant_by_lna: adc_by_lna,
                });
            }
        }
    }
    Ok(out)
}
