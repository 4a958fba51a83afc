//! Final spectral efficiencies for both links and the codebook-restricted
//! half-duplex capacities used as baselines.
//!
//! The achieved rates evaluate the links end to end, with the noise shaped
//! through both the RF and digital combiners (`Q_n = (W_RF·W_BB)*(W_RF·W_BB)`)
//! and, on the local receive link, the residual quantization interference
//! `Q_int` treated as extra colored noise. The capacity baselines answer
//! "what could this link do alone": the best water-filled value over the
//! same beam candidates the full-duplex solver searched, so the comparison
//! stays codebook-consistent.

use crate::codebook::CandidateSet;
use crate::constraints::{relative_slack, ConstraintReport, SaturationLimits};
use crate::error::{Error, Result};
use crate::link::LinkDesign;
use crate::numerics::{log2det_pd, svd, Mat};
use crate::solver::{mutual_info_ij, waterfilled_eigen_precoder, SolvePath};

/// Everything one Monte Carlo trial reports.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    /// Achieved transmit-link spectral efficiency, bits/s/Hz.
    pub r_ij: f64,
    /// Achieved receive-link spectral efficiency, bits/s/Hz.
    pub r_ki: f64,
    /// Half-duplex (codebook-restricted) capacity of the transmit link.
    pub c_ij: f64,
    /// Half-duplex capacity of the receive link.
    pub c_ki: f64,
    /// `r_ij + r_ki`.
    pub sum_se: f64,
    /// `max(c_ij, c_ki)`: the best either link could do alone.
    pub hd_baseline: f64,
    /// Relative slacks of the power / LNA / ADC constraints at the solution.
    pub power_slack: f64,
    pub lna_slack: f64,
    pub adc_slack: f64,
    /// Which constraints ended tight.
    pub tight_power: bool,
    pub tight_lna: bool,
    pub tight_adc: bool,
    /// Winning candidate indices from the beam search.
    pub tx_candidate: usize,
    pub rx_candidate: usize,
    /// Which solver route produced the transmit precoder.
    pub solve_path: SolvePath,
}

impl TrialMetrics {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        r_ij: f64,
        r_ki: f64,
        c_ij: f64,
        c_ki: f64,
        report: &ConstraintReport,
        limits: &SaturationLimits,
        tx_candidate: usize,
        rx_candidate: usize,
        solve_path: SolvePath,
    ) -> Self {
        Self {
            r_ij,
            r_ki,
            c_ij,
            c_ki,
            sum_se: r_ij + r_ki,
            hd_baseline: c_ij.max(c_ki),
            power_slack: relative_slack(report.power_value, 1.0),
            lna_slack: relative_slack(report.lna_value, limits.eta_lna),
            adc_slack: relative_slack(report.adc_value, limits.eta_adc),
            tight_power: report.tight_flags[0],
            tight_lna: report.tight_flags[1],
            tight_adc: report.tight_flags[2],
            tx_candidate,
            rx_candidate,
            solve_path,
        }
    }

    /// Structural invariants every trial must satisfy.
    pub fn validate(&self) -> Result<()> {
        let ok = self.r_ij >= 0.0
            && self.r_ki >= 0.0
            && self.c_ij >= 0.0
            && self.c_ki >= 0.0
            && self.r_ij <= self.c_ij + 1e-9
            && (self.sum_se - (self.r_ij + self.r_ki)).abs() <= 1e-12
            && (self.hd_baseline - self.c_ij.max(self.c_ki)).abs() <= 1e-12;
        if ok {
            Ok(())
        } else {
            Err(Error::Numeric {
                op: "TrialMetrics::validate",
                details: format!("inconsistent trial metrics: {self:?}"),
            })
        }
    }
}

/// Spectral efficiency of a fully combined link:
/// `log2 det(I + (snr/ns)·(Q_n + Q_int)^{−1}·G·G*)` with
/// `G = W_BB*·h_eff·F_BB`, evaluated as a difference of positive-definite
/// log-determinants. `Q_int = None` means no quantization interference.
pub fn combined_rate(
    w_bb: &Mat,
    h_eff: &Mat,
    f_bb: &Mat,
    q_n: &Mat,
    q_int: Option<&Mat>,
    snr: f64,
    ns: usize,
) -> Result<f64> {
    if !(snr > 0.0) || ns < 1 {
        return Err(Error::Parameter {
            op: "combined_rate",
            details: format!("require snr > 0 and ns >= 1, got {snr}, {ns}"),
        });
    }
    if w_bb.rows() != h_eff.rows() || h_eff.cols() != f_bb.rows() {
        return Err(Error::Shape {
            op: "combined_rate",
            details: format!(
                "combiner {}x{}, channel {}x{}, precoder {}x{} do not chain",
                w_bb.rows(),
                w_bb.cols(),
                h_eff.rows(),
                h_eff.cols(),
                f_bb.rows(),
                f_bb.cols()
            ),
        });
    }
    let mut noise = q_n.clone();
    if let Some(q) = q_int {
        noise = noise.add_mat(q);
    }
    let g = w_bb.adjoint_mul(&h_eff.mul(f_bb));
    if g.frob_norm_sq() == 0.0 {
        // Nothing reaches the digital output (e.g. a shut-down transmit
        // link, where Q_n is also singular): the rate is zero by definition.
        return Ok(0.0);
    }
    // Water-filling and the penalized solver can leave (near-)zero precoder
    // columns, and through an MMSE combiner those become output coordinates
    // that are noiseless copies of the others: the noise covariance turns
    // numerically singular even though the extra coordinates carry no
    // information. Work in the noise eigenbasis: discard directions whose
    // noise eigenvalue is negligible — erroring if meaningful signal would
    // be lost with them — and whiten the rest, after which the determinant
    // argument `I + c·G̃G̃*` is positive definite by construction.
    let eig = svd(&noise.hermitian_part())?;
    let lambda_max = eig.s.first().copied().unwrap_or(0.0);
    if lambda_max <= 0.0 {
        return Err(Error::Degenerate {
            op: "combined_rate",
            details: "zero noise covariance with nonzero signal".into(),
        });
    }
    let keep: Vec<usize> = (0..eig.s.len())
        .filter(|&a| eig.s[a] > lambda_max * 1e-12)
        .collect();
    let g_kept = eig.v.select_cols(&keep).adjoint_mul(&g);
    let leak = g.frob_norm_sq() - g_kept.frob_norm_sq();
    if leak > g.frob_norm_sq() * 1e-9 {
        return Err(Error::Degenerate {
            op: "combined_rate",
            details: "signal present in a (numerically) noise-free output direction".into(),
        });
    }
    let mut g_white = g_kept;
    for (row, &a) in keep.iter().enumerate() {
        let inv_sqrt = 1.0 / eig.s[a].sqrt();
        for j in 0..g_white.cols() {
            *g_white.at_mut(row, j) *= inv_sqrt;
        }
    }
    let signal = g_white.mul(&g_white.adjoint()).scale(snr / ns as f64);
    let total = Mat::identity(keep.len()).add_mat(&signal).hermitian_part();
    Ok(log2det_pd(&total)?.max(0.0))
}

/// Transmit-link spectral efficiency of a completed design. No quantization
/// is modeled at the remote receiver j.
pub fn rate_ij(design: &LinkDesign, h_eff_ij: &Mat, snr_ij: f64, ns: usize) -> Result<f64> {
    combined_rate(
        &design.w_bb_j,
        h_eff_ij,
        &design.f_bb_i,
        &design.q_n_j,
        None,
        snr_ij,
        ns,
    )
}

/// Receive-link spectral efficiency of a completed design, with the
/// post-cancellation quantization interference `q_int` treated as noise.
pub fn rate_ki(
    design: &LinkDesign,
    h_eff_ki: &Mat,
    snr_ki: f64,
    ns: usize,
    q_int: &Mat,
) -> Result<f64> {
    combined_rate(
        &design.w_bb_i,
        h_eff_ki,
        &design.f_bb_k,
        &design.q_n_i,
        Some(q_int),
        snr_ki,
        ns,
    )
}

/// Best water-filled value of one candidate's effective channel, with the
/// candidate's own combiner coloring. A zero effective channel contributes
/// zero.
fn candidate_waterfilled_value(h_eff: &Mat, w_rf: &Mat, snr: f64, ns: usize) -> Result<f64> {
    if h_eff.frob_norm_sq() == 0.0 {
        return Ok(0.0);
    }
    let w_gram = w_rf.gram();
    let f = waterfilled_eigen_precoder(h_eff, &w_gram, snr, ns)?;
    mutual_info_ij(h_eff, &f, snr, ns, &w_gram)
}

/// Codebook-restricted half-duplex capacity of the transmit link: the best
/// water-filled value over its beam candidates. `eff_ij[t]` must be the
/// effective channel of candidate `t`.
pub fn capacity_ij(cands: &CandidateSet, eff_ij: &[Mat], snr: f64, ns: usize) -> Result<f64> {
    if cands.is_empty() {
        return Err(Error::Parameter {
            op: "capacity_ij",
            details: "candidate set is empty".into(),
        });
    }
    if eff_ij.len() != cands.len() {
        return Err(Error::Shape {
            op: "capacity_ij",
            details: format!(
                "expected {} effective channels, got {}",
                cands.len(),
                eff_ij.len()
            ),
        });
    }
    let mut best: f64 = 0.0;
    for (t, (_, w_rf)) in cands.pairs.iter().enumerate() {
        best = best.max(candidate_waterfilled_value(&eff_ij[t], w_rf, snr, ns)?);
    }
    Ok(best)
}

/// Codebook-restricted half-duplex capacity of the receive link, using the
/// noise-colored form with each candidate's local RF combiner.
pub fn capacity_ki(t_ki: &CandidateSet, h_ki: &Mat, snr: f64, ns: usize) -> Result<f64> {
    if t_ki.is_empty() {
        return Err(Error::Parameter {
            op: "capacity_ki",
            details: "candidate set is empty".into(),
        });
    }
    let eff = crate::codebook::effective_channels(h_ki, t_ki)?;
    let mut best: f64 = 0.0;
    for (r, (_, w_rf)) in t_ki.pairs.iter().enumerate() {
        best = best.max(candidate_waterfilled_value(&eff[r], w_rf, snr, ns)?);
    }
    Ok(best)
}
