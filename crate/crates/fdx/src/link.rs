//! Remainder of the two-link design and the receiver hardware models.
//!
//! Once the analog beams and the transmit-side digital precoder are fixed,
//! the design is completed with three baseband blocks: the LMMSE combiner at
//! the remote receiver j, the water-filled digital precoder at the remote
//! transmitter k (which sees colored noise through the local combiner), and
//! the quantization-aware MMSE combiner at the local receiver i. This module
//! also carries the receiver hardware stand-ins: the piecewise LNA
//! (linear gain below saturation, hard magnitude clip above), the uniform
//! mid-riser ADC quantization-noise formulas, and exact digital
//! self-interference cancellation.
//!
//! Unit convention: noise power is `σ² = 1` per receive antenna per symbol,
//! so linear link SNRs play the role of `P_tx·G²`. Symbol covariances are
//! identity; a transmit link with `ns` streams radiates `snr/ns` per stream
//! through its unit-power precoders.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{solve_pd, Mat};

/// Receive low-noise amplifier: linear gain up to an input-power saturation
/// threshold, hard magnitude clipping beyond it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnaModel {
    /// Saturation threshold on per-sample input power.
    pub p_lna_max: f64,
    /// Linear gain applied below saturation (abstracted to 1 by default).
    pub gain: f64,
}

impl LnaModel {
    pub fn new(p_lna_max: f64, gain: f64) -> Result<Self> {
        if !(p_lna_max > 0.0) || !(gain > 0.0) {
            return Err(Error::Parameter {
                op: "LnaModel::new",
                details: format!(
                    "require p_lna_max > 0 and gain > 0, got {p_lna_max} and {gain}"
                ),
            });
        }
        Ok(Self { p_lna_max, gain })
    }

    pub fn with_unit_gain(p_lna_max: f64) -> Result<Self> {
        Self::new(p_lna_max, 1.0)
    }
}

/// Uniform mid-riser analog-to-digital converter with `bits` of resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdcModel {
    pub bits: u32,
}

impl AdcModel {
    pub fn new(bits: u32) -> Result<Self> {
        if bits < 1 {
            return Err(Error::Parameter {
                op: "AdcModel::new",
                details: "ADC resolution must be at least 1 bit".into(),
            });
        }
        Ok(Self { bits })
    }

    /// Quantization-noise scale `8/(12·2^{2b})` mapping a per-chain input
    /// power to the quantization-noise power on that chain.
    pub fn quant_scale(&self) -> f64 {
        8.0 / (12.0 * 2.0f64.powi(2 * self.bits as i32))
    }
}

/// The completed eight-matrix design for one full-duplex trial, with the
/// chosen candidate indices and the noise-shaping matrices used by the rate
/// expressions.
#[derive(Debug, Clone)]
pub struct LinkDesign {
    pub f_rf_i: Mat,
    pub f_bb_i: Mat,
    pub w_rf_j: Mat,
    pub w_bb_j: Mat,
    pub f_rf_k: Mat,
    pub f_bb_k: Mat,
    pub w_rf_i: Mat,
    pub w_bb_i: Mat,
    /// Winning candidate index into the transmit link's candidate set.
    pub tx_candidate: usize,
    /// Winning candidate index into the receive link's candidate set.
    pub rx_candidate: usize,
    /// `(W_RF(j)·W_BB(j))*·(W_RF(j)·W_BB(j))` — combined noise shaping at j.
    pub q_n_j: Mat,
    /// Same at receiver i.
    pub q_n_i: Mat,
    /// Quantization interference shaped by the digital combiner at i:
    /// `W_BB(i)*·R_quant·W_BB(i)` in noise-power units.
    pub q_int_i: Mat,
    /// Diagonal quantization-noise covariance at the ADC outputs of i.
    pub r_quant: Mat,
}

impl LinkDesign {
    /// Checks the power budgets on both transmit sides.
    pub fn validate(&self) -> Result<()> {
        for (name, f) in [("transmit link", &self.f_bb_i), ("receive link", &self.f_bb_k)] {
            let p = f.frob_norm_sq();
            if p > 1.0 + 1e-9 {
                return Err(Error::Parameter {
                    op: "LinkDesign::validate",
                    details: format!("{name} digital precoder power {p} exceeds the unit budget"),
                });
            }
        }
        Ok(())
    }
}

fn check_combiner_shapes(op: &'static str, h_tilde: &Mat, w_rf: &Mat) -> Result<()> {
    if h_tilde.rows() != w_rf.cols() {
        return Err(Error::Shape {
            op,
            details: format!(
                "effective channel has {} rows but the RF combiner has {} chains",
                h_tilde.rows(),
                w_rf.cols()
            ),
        });
    }
    Ok(())
}

/// LMMSE baseband combiner at the remote receiver j:
/// `(1/amp)·(h̃·h̃* + (ns/snr)·W_RF*W_RF)^{−1}·h̃`
/// where `h̃` is the fully precoded effective channel (RF and baseband) and
/// `amp = sqrt(snr/ns)` makes the output the exact MSE minimizer for
/// unit-power symbols and unit noise.
pub fn lmmse_combiner_j(
    h_tilde_ij: &Mat,
    w_rf_j: &Mat,
    snr_ij: f64,
    ns: usize,
    amp: f64,
) -> Result<Mat> {
    check_combiner_shapes("lmmse_combiner_j", h_tilde_ij, w_rf_j)?;
    if !(snr_ij > 0.0) || ns < 1 || !(amp > 0.0) {
        return Err(Error::Parameter {
            op: "lmmse_combiner_j",
            details: format!("require snr > 0, ns >= 1, amp > 0; got {snr_ij}, {ns}, {amp}"),
        });
    }
    let inner = h_tilde_ij
        .mul(&h_tilde_ij.adjoint())
        .add_mat(&w_rf_j.gram().scale(ns as f64 / snr_ij));
    Ok(solve_pd(&inner, h_tilde_ij)?.scale(1.0 / amp))
}

/// Water-filled digital precoder at the remote transmitter k, accounting for
/// the noise coloring `W_RF(i)*W_RF(i)` seen after the local RF combiner:
/// right singular vectors of `(W*W)^{−1/2}·h̃_ki` powered by water-filling
/// over `(snr/ns)·σ_k²`. Unit Frobenius norm.
pub fn receive_precoder_k(h_tilde_ki: &Mat, w_rf_i: &Mat, snr_ki: f64, ns: usize) -> Result<Mat> {
    check_combiner_shapes("receive_precoder_k", h_tilde_ki, w_rf_i)?;
    crate::solver::waterfilled_eigen_precoder(h_tilde_ki, &w_rf_i.gram(), snr_ki, ns)
}

/// Covariance of the symbols reaching the ADCs of receiver i: desired-link
/// term + self-interference term + thermal noise term,
/// `(snr_ki/ns_ki)·h̃_ki·h̃_ki* + (snr_ii/ns_ij)·h̃_ii·h̃_ii* + σ²·W_RF*W_RF`,
/// where both effective channels include their digital precoders.
#[allow(clippy::too_many_arguments)]
pub fn adc_input_cov(
    h_tilde_ki_full: &Mat,
    h_tilde_ii_full: &Mat,
    w_rf_i: &Mat,
    snr_ki: f64,
    snr_ii: f64,
    ns_ki: usize,
    ns_ij: usize,
    noise_power: f64,
) -> Result<Mat> {
    let chains = w_rf_i.cols();
    if h_tilde_ki_full.rows() != chains || h_tilde_ii_full.rows() != chains {
        return Err(Error::Shape {
            op: "adc_input_cov",
            details: format!(
                "effective channels have {} / {} rows but the RF combiner has {chains} chains",
                h_tilde_ki_full.rows(),
                h_tilde_ii_full.rows()
            ),
        });
    }
    if !(snr_ki >= 0.0) || !(snr_ii >= 0.0) || !(noise_power >= 0.0) || ns_ki < 1 || ns_ij < 1 {
        return Err(Error::Parameter {
            op: "adc_input_cov",
            details: "SNRs and noise power must be nonnegative, stream counts at least 1".into(),
        });
    }
    let desired = h_tilde_ki_full
        .mul(&h_tilde_ki_full.adjoint())
        .scale(snr_ki / ns_ki as f64);
    let si = h_tilde_ii_full
        .mul(&h_tilde_ii_full.adjoint())
        .scale(snr_ii / ns_ij as f64);
    Ok(desired
        .add_mat(&si)
        .add_mat(&w_rf_i.gram().scale(noise_power))
        .hermitian_part())
}

/// Diagonal quantization-noise covariance: entry ℓ is
/// `8/(12·2^{2b})` times the ℓ-th diagonal entry of the ADC input
/// covariance. Off-diagonals are exactly zero.
pub fn quant_noise_cov(adc_cov: &Mat, adc: &AdcModel) -> Result<Mat> {
    if adc_cov.rows() != adc_cov.cols() {
        return Err(Error::Shape {
            op: "quant_noise_cov",
            details: format!("covariance must be square, got {}x{}", adc_cov.rows(), adc_cov.cols()),
        });
    }
    let scale = adc.quant_scale();
    let diag: Vec<f64> = (0..adc_cov.rows())
        .map(|l| scale * adc_cov.at(l, l).re)
        .collect();
    Ok(Mat::from_diag(&diag))
}

/// Quantization-aware MMSE combiner at receiver i for the post-cancellation
/// observation:
/// `(1/amp)·(h̃·h̃* + (ns/snr)·W_RF*W_RF + (ns/ptx_gain_sq)·R_quant)^{−1}·h̃`.
/// `ptx_gain_sq` is the desired link's `P_tx·G²` in noise-power units (its
/// linear SNR under the σ² = 1 convention); with `amp = sqrt(snr/ns)` the
/// output is the exact MSE minimizer.
#[allow(clippy::too_many_arguments)]
pub fn mmse_combiner_i(
    h_tilde_ki: &Mat,
    w_rf_i: &Mat,
    snr_ki: f64,
    ns: usize,
    r_quant: &Mat,
    amp: f64,
    ptx_gain_sq: f64,
) -> Result<Mat> {
    check_combiner_shapes("mmse_combiner_i", h_tilde_ki, w_rf_i)?;
    if r_quant.rows() != w_rf_i.cols() || r_quant.cols() != w_rf_i.cols() {
        return Err(Error::Shape {
            op: "mmse_combiner_i",
            details: format!(
                "quantization covariance is {}x{} but there are {} chains",
                r_quant.rows(),
                r_quant.cols(),
                w_rf_i.cols()
            ),
        });
    }
    if !(snr_ki > 0.0) || ns < 1 || !(amp > 0.0) || !(ptx_gain_sq > 0.0) {
        return Err(Error::Parameter {
            op: "mmse_combiner_i",
            details: format!(
                "require snr > 0, ns >= 1, amp > 0, ptx_gain_sq > 0; got {snr_ki}, {ns}, {amp}, {ptx_gain_sq}"
            ),
        });
    }
    let inner = h_tilde_ki
        .mul(&h_tilde_ki.adjoint())
        .add_mat(&w_rf_i.gram().scale(ns as f64 / snr_ki))
        .add_mat(&r_quant.scale(ns as f64 / ptx_gain_sq));
    Ok(solve_pd(&inner, h_tilde_ki)?.scale(1.0 / amp))
}

/// Digital self-interference cancellation: subtracts the reconstructed
/// self-interference from the digital observation. With exact knowledge the
/// interference term vanishes, leaving desired + noise + quantization parts.
pub fn digital_si_cancel(y_dig: &Mat, known_si: &Mat) -> Result<Mat> {
    if y_dig.cols() != 1 || known_si.cols() != 1 || y_dig.rows() != known_si.rows() {
        return Err(Error::Shape {
            op: "digital_si_cancel",
            details: format!(
                "need equal-length column vectors, got {}x{} and {}x{}",
                y_dig.rows(),
                y_dig.cols(),
                known_si.rows(),
                known_si.cols()
            ),
        });
    }
    Ok(y_dig.sub_mat(known_si))
}

/// Per-element LNA: linear gain when the input power is at or below the
/// saturation threshold, otherwise the magnitude is hard-limited to
/// `sqrt(p_lna_max)` with the phase preserved. Returns the output samples
/// and how many saturated.
pub fn lna_apply(x: &[Complex64], model: &LnaModel) -> (Vec<Complex64>, usize) {
    let mut saturated = 0;
    let out = x
        .iter()
        .map(|&v| {
            if v.norm_sqr() <= model.p_lna_max {
                v * model.gain
            } else {
                saturated += 1;
                Complex64::from_polar(model.p_lna_max.sqrt(), v.arg())
            }
        })
        .collect();
    (out, saturated)
}

/// Quantization step size squared for a `bits`-bit mid-riser converter
/// driven by a sinusoid of power `p`: `q² = 8·p/2^{2b}`.
pub fn quant_step_sq(p: f64, bits: u32) -> f64 {
    assert!(p >= 0.0, "input power must be nonnegative");
    8.0 * p / 2.0f64.powi(2 * bits as i32)
}

/// Quantization noise power of a uniform quantizer with squared step `q²`:
/// `q²/12`.
pub fn quant_power(q_sq: f64) -> f64 {
    assert!(q_sq >= 0.0, "squared step must be nonnegative");
    q_sq / 12.0
}

/// Maximum self-interference power the ADC can absorb while degrading the
/// desired link's effective SNR by at most the factor `delta_des`:
/// `P_noise·(2^{2b}·1.5/B_ADC·(1−Δ)/Δ − SNR_in − 1)`.
/// May be negative for infeasible parameter combinations; callers clamp to
/// zero.
pub fn max_si_adc(
    p_noise_adc: f64,
    bits: u32,
    delta_des: f64,
    snr_in: f64,
    b_adc: f64,
) -> Result<f64> {
    if !(delta_des > 0.0 && delta_des <= 1.0) {
        return Err(Error::Parameter {
            op: "max_si_adc",
            details: format!("delta_des must be in (0, 1], got {delta_des}"),
        });
    }
    if !(p_noise_adc > 0.0) || !(b_adc > 0.0) || !(snr_in >= 0.0) || bits < 1 {
        return Err(Error::Parameter {
            op: "max_si_adc",
            details: format!(
                "require p_noise_adc > 0, b_adc > 0, snr_in >= 0, bits >= 1; got {p_noise_adc}, {b_adc}, {snr_in}, {bits}"
            ),
        });
    }
    let headroom = 2.0f64.powi(2 * bits as i32) * 1.5 / b_adc * (1.0 - delta_des) / delta_des;
    Ok(p_noise_adc * (headroom - snr_in - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::TrialRng;
    use crate::solver::mutual_info_ij;

    fn random_mat(rng: &mut TrialRng, m: usize, n: usize) -> Mat {
        Mat::from_fn(m, n, |_, _| rng.cn01())
    }

    /// Symbol-estimate MSE of a combiner under the analytic signal model
    /// `y = sqrt(snr/ns)·h̃·s + (colored noise with covariance W*W) [+ e_q]`.
    fn symbol_mse(
        w_bb: &Mat,
        h_tilde: &Mat,
        w_gram: &Mat,
        r_quant: Option<&Mat>,
        snr: f64,
        ns: usize,
    ) -> f64 {
        let c = snr / ns as f64;
        let mut r_y = h_tilde.mul(&h_tilde.adjoint()).scale(c).add_mat(w_gram);
        if let Some(rq) = r_quant {
            r_y = r_y.add_mat(rq);
        }
        let cross = w_bb.adjoint_mul(h_tilde);
        let mut re_tr = 0.0;
        for d in 0..cross.rows().min(cross.cols()) {
            re_tr += cross.at(d, d).re;
        }
        let quad = w_bb.adjoint_mul(&r_y.mul(w_bb));
        let mut tr_quad = 0.0;
        for d in 0..quad.rows() {
            tr_quad += quad.at(d, d).re;
        }
        ns as f64 - 2.0 * c.sqrt() * re_tr + tr_quad
    }

    #[test]
    fn lmmse_scalar_case() {
        let one = Mat::identity(1);
        let w = lmmse_combiner_j(&one, &one, 1.0, 1, 1.0).unwrap();
        assert!((w.at(0, 0).re - 0.5).abs() < 1e-12);
        assert!(w.at(0, 0).im.abs() < 1e-15);
    }

    #[test]
    fn lmmse_zero_forcing_limit() {
        let mut rng = TrialRng::new(101);
        let h = random_mat(&mut rng, 3, 3);
        let w_rf = random_mat(&mut rng, 6, 3);
        let w = lmmse_combiner_j(&h, &w_rf, 1e9, 3, 1.0).unwrap();
        // (h̃*)^{-1} limit ⟺ W*·h̃ → I.
        let prod = w.adjoint_mul(&h);
        assert!(prod.approx_eq(&Mat::identity(3), 1e-3), "W*h̃ far from identity");
    }

    #[test]
    fn lmmse_perturbations_never_reduce_mse() {
        let mut rng = TrialRng::new(103);
        let ns = 2;
        let snr = 3.0;
        let h = random_mat(&mut rng, 3, ns);
        let w_rf = random_mat(&mut rng, 5, 3);
        let amp = (snr / ns as f64).sqrt();
        let w = lmmse_combiner_j(&h, &w_rf, snr, ns, amp).unwrap();
        let w_gram = w_rf.gram();
        let base = symbol_mse(&w, &h, &w_gram, None, snr, ns);
        for _ in 0..1000 {
            let scale = rng.uniform(1e-4, 1e-1);
            let mut perturbed = w.clone();
            perturbed.axpy(Complex64::new(scale, 0.0), &random_mat(&mut rng, 3, ns));
            let mse = symbol_mse(&perturbed, &h, &w_gram, None, snr, ns);
            assert!(mse >= base - 1e-12, "perturbation reduced MSE: {mse} < {base}");
        }
    }

    #[test]
    fn lmmse_rejects_mismatched_shapes() {
        let h = Mat::identity(2);
        let w_rf = Mat::identity(3);
        assert!(matches!(
            lmmse_combiner_j(&h, &w_rf, 1.0, 2, 1.0),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn receive_precoder_equal_modes_split_evenly_and_unit_norm() {
        let h = Mat::identity(2);
        let w_rf = Mat::identity(2);
        let f = receive_precoder_k(&h, &w_rf, 1.0, 2).unwrap();
        let p0 = f.col(0).frob_norm_sq();
        let p1 = f.col(1).frob_norm_sq();
        assert!((p0 - p1).abs() < 1e-9);
        assert!((f.frob_norm_sq() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn receive_precoder_unit_norm_on_random_instances() {
        let mut rng = TrialRng::new(107);
        for _ in 0..50 {
            let h = random_mat(&mut rng, 2, 3);
            let w_rf = random_mat(&mut rng, 4, 2);
            let f = receive_precoder_k(&h, &w_rf, rng.uniform(0.1, 10.0), 2).unwrap();
            assert!((f.frob_norm_sq() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn receive_precoder_beats_random_search() {
        let mut rng = TrialRng::new(109);
        let h = random_mat(&mut rng, 3, 3);
        let w_rf = random_mat(&mut rng, 5, 3);
        let w_gram = w_rf.gram();
        let snr = 4.0;
        let f = receive_precoder_k(&h, &w_rf, snr, 2).unwrap();
        let best = mutual_info_ij(&h, &f, snr, 2, &w_gram).unwrap();
        for _ in 0..10_000 {
            let cand = random_mat(&mut rng, 3, 2);
            let cand = cand.scale(1.0 / cand.frob_norm_sq().sqrt());
            let v = mutual_info_ij(&h, &cand, snr, 2, &w_gram).unwrap();
            assert!(v <= best + 1e-9, "random precoder beat water-filling: {v} > {best}");
        }
    }

    #[test]
    fn receive_precoder_rejects_zero_channel() {
        assert!(matches!(
            receive_precoder_k(&Mat::zeros(2, 2), &Mat::identity(2), 1.0, 2),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn adc_cov_reduces_to_noise_term_without_signals() {
        let mut rng = TrialRng::new(113);
        let w_rf = random_mat(&mut rng, 4, 2);
        let cov = adc_input_cov(
            &Mat::zeros(2, 2),
            &Mat::zeros(2, 2),
            &w_rf,
            1.0,
            1.0,
            2,
            2,
            1.0,
        )
        .unwrap();
        assert!(cov.approx_eq(&w_rf.gram().hermitian_part(), 1e-12));
    }

    #[test]
    fn adc_cov_hermitian_psd_on_random_instances() {
        let mut rng = TrialRng::new(127);
        for _ in 0..1000 {
            let chains = 2;
            let h_ki = random_mat(&mut rng, chains, 2);
            let h_ii = random_mat(&mut rng, chains, 2);
            let w_rf = random_mat(&mut rng, 4, chains);
            let cov = adc_input_cov(&h_ki, &h_ii, &w_rf, 2.0, 5.0, 2, 2, 1.0).unwrap();
            assert!(cov.approx_eq(&cov.adjoint(), 1e-12), "not Hermitian");
            for _ in 0..4 {
                let x = random_mat(&mut rng, chains, 1);
                let q = x.adjoint_mul(&cov.mul(&x)).at(0, 0).re;
                assert!(q >= -1e-10, "negative quadratic form {q}");
            }
        }
    }

    #[test]
    fn adc_cov_matches_symbol_level_sample_covariance() {
        let mut rng = TrialRng::new(131);
        let chains = 2;
        let (ns_ki, ns_ij) = (2, 2);
        let (snr_ki, snr_ii) = (2.0, 8.0);
        let h_ki = random_mat(&mut rng, chains, ns_ki);
        let h_ii = random_mat(&mut rng, chains, ns_ij);
        let w_rf = random_mat(&mut rng, 4, chains);
        let analytic =
            adc_input_cov(&h_ki, &h_ii, &w_rf, snr_ki, snr_ii, ns_ki, ns_ij, 1.0).unwrap();

        let a_ki = h_ki.scale((snr_ki / ns_ki as f64).sqrt());
        let a_ii = h_ii.scale((snr_ii / ns_ij as f64).sqrt());
        let n_draws = 100_000;
        let mut acc = Mat::zeros(chains, chains);
        for _ in 0..n_draws {
            let s_k = Mat::from_fn(ns_ki, 1, |_, _| rng.cn01());
            let s_i = Mat::from_fn(ns_ij, 1, |_, _| rng.cn01());
            let n = Mat::from_fn(w_rf.rows(), 1, |_, _| rng.cn01());
            let y = a_ki.mul(&s_k).add_mat(&a_ii.mul(&s_i)).add_mat(&w_rf.adjoint_mul(&n));
            acc = acc.add_mat(&y.mul(&y.adjoint()));
        }
        let sample = acc.scale(1.0 / n_draws as f64);
        let err = sample.sub_mat(&analytic).frob_norm_sq().sqrt();
        let rel = err / analytic.frob_norm_sq().sqrt();
        assert!(rel < 0.02, "sample covariance off by {rel:.4}");
    }

    #[test]
    fn quant_cov_formula_and_diagonality() {
        let adc = AdcModel::new(12).unwrap();
        assert!((adc.quant_scale() - 8.0 / (12.0 * 2.0f64.powi(24))).abs() < 1e-30);
        let cov = Mat::from_fn(3, 3, |i, j| Complex64::new((i + j) as f64 + 1.0, (i as f64) - (j as f64)));
        let rq = quant_noise_cov(&cov, &adc).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    let expected = adc.quant_scale() * cov.at(i, i).re;
                    assert!((rq.at(i, j).re - expected).abs() < 1e-30);
                    assert_eq!(rq.at(i, j).im, 0.0);
                } else {
                    assert_eq!(rq.at(i, j), Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn quant_cov_extra_bit_quarters_every_entry() {
        let cov = Mat::from_diag(&[3.0, 7.0]);
        for b in 1..=11 {
            let r1 = quant_noise_cov(&cov, &AdcModel::new(b).unwrap()).unwrap();
            let r2 = quant_noise_cov(&cov, &AdcModel::new(b + 1).unwrap()).unwrap();
            for i in 0..2 {
                assert!((r1.at(i, i).re / r2.at(i, i).re - 4.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mmse_scalar_case_all_ones() {
        let one = Mat::identity(1);
        // h̃h̃* = 1, (ns/snr)·gram = 1, (ns/ptx)·R_quant = 1 → 1/3.
        let w = mmse_combiner_i(&one, &one, 1.0, 1, &one, 1.0, 1.0).unwrap();
        assert!((w.at(0, 0).re - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn mmse_without_quantization_matches_lmmse_formula() {
        let mut rng = TrialRng::new(137);
        let h = random_mat(&mut rng, 3, 2);
        let w_rf = random_mat(&mut rng, 5, 3);
        let zeros = Mat::zeros(3, 3);
        let a = mmse_combiner_i(&h, &w_rf, 2.5, 2, &zeros, 1.3, 7.0).unwrap();
        let b = lmmse_combiner_j(&h, &w_rf, 2.5, 2, 1.3).unwrap();
        assert!(a.approx_eq(&b, 1e-12));
    }

    #[test]
    fn mmse_perturbations_never_reduce_mse() {
        let mut rng = TrialRng::new(139);
        let ns = 2;
        let snr = 2.0;
        let h = random_mat(&mut rng, 3, ns);
        let w_rf = random_mat(&mut rng, 5, 3);
        let w_gram = w_rf.gram();
        // Quantization covariance consistent with the signal model's units:
        // ptx_gain_sq equals the link SNR under σ² = 1.
        let base_cov = adc_input_cov(&h, &random_mat(&mut rng, 3, 2), &w_rf, snr, 4.0, ns, 2, 1.0)
            .unwrap();
        let r_quant = quant_noise_cov(&base_cov, &AdcModel::new(4).unwrap()).unwrap();
        let amp = (snr / ns as f64).sqrt();
        let w = mmse_combiner_i(&h, &w_rf, snr, ns, &r_quant, amp, snr).unwrap();
        let base = symbol_mse(&w, &h, &w_gram, Some(&r_quant), snr, ns);
        for _ in 0..1000 {
            let scale = rng.uniform(1e-4, 1e-1);
            let mut perturbed = w.clone();
            perturbed.axpy(Complex64::new(scale, 0.0), &random_mat(&mut rng, 3, ns));
            let mse = symbol_mse(&perturbed, &h, &w_gram, Some(&r_quant), snr, ns);
            assert!(mse >= base - 1e-12, "perturbation reduced MSE: {mse} < {base}");
        }
    }

    #[test]
    fn cancellation_identities_and_shape_error() {
        let y = Mat::from_real_row_slice(3, 1, &[1.0, 2.0, 3.0]);
        let zero = Mat::zeros(3, 1);
        assert!(digital_si_cancel(&y, &zero).unwrap().approx_eq(&y, 0.0));
        assert_eq!(digital_si_cancel(&y, &y).unwrap().frob_norm_sq(), 0.0);
        assert!(matches!(
            digital_si_cancel(&y, &Mat::zeros(2, 1)),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn cancellation_removes_si_from_residual_covariance() {
        let mut rng = TrialRng::new(149);
        let chains = 2;
        let h_ki = random_mat(&mut rng, chains, 2);
        let h_ii = random_mat(&mut rng, chains, 2);
        let w_rf = random_mat(&mut rng, 4, chains);
        let (snr_ki, snr_ii) = (2.0f64, 50.0f64);
        let a_ki = h_ki.scale((snr_ki / 2.0).sqrt());
        let a_ii = h_ii.scale((snr_ii / 2.0).sqrt());
        let n_draws = 100_000;
        let mut acc = Mat::zeros(chains, chains);
        for _ in 0..n_draws {
            let s_k = Mat::from_fn(2, 1, |_, _| rng.cn01());
            let s_i = Mat::from_fn(2, 1, |_, _| rng.cn01());
            let n = Mat::from_fn(w_rf.rows(), 1, |_, _| rng.cn01());
            let si = a_ii.mul(&s_i);
            let y = a_ki.mul(&s_k).add_mat(&si).add_mat(&w_rf.adjoint_mul(&n));
            let resid = digital_si_cancel(&y, &si).unwrap();
            acc = acc.add_mat(&resid.mul(&resid.adjoint()));
        }
        let sample = acc.scale(1.0 / n_draws as f64);
        // SI-free analytic covariance: desired + noise only.
        let si_free =
            adc_input_cov(&h_ki, &Mat::zeros(chains, 2), &w_rf, snr_ki, 0.0, 2, 2, 1.0).unwrap();
        let rel = sample.sub_mat(&si_free).frob_norm_sq().sqrt() / si_free.frob_norm_sq().sqrt();
        assert!(rel < 0.02, "residual covariance still holds interference: {rel:.4}");
    }

    #[test]
    fn lna_linear_case_scales_by_gain() {
        let model = LnaModel::new(4.0, 2.0).unwrap();
        let x = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.5)];
        let (y, saturated) = lna_apply(&x, &model);
        assert_eq!(saturated, 0);
        assert_eq!(y[0], Complex64::new(2.0, 0.0));
        assert_eq!(y[1], Complex64::new(0.0, -3.0));
    }

    #[test]
    fn lna_clips_magnitude_and_counts() {
        let model = LnaModel::with_unit_gain(1.0).unwrap();
        let x = vec![
            Complex64::new(0.5, 0.5),      // |x|² = 0.5 → linear
            Complex64::new(3.0, 4.0),      // |x|² = 25 → clipped
            Complex64::new(1.0, 0.0),      // boundary |x|² = 1 → linear
        ];
        let (y, saturated) = lna_apply(&x, &model);
        assert_eq!(saturated, 1);
        assert_eq!(y[0], x[0]);
        assert!((y[1].norm() - 1.0).abs() < 1e-12);
        assert!((y[1].arg() - x[1].arg()).abs() < 1e-12);
        assert_eq!(y[2], x[2]);
    }

    #[test]
    fn quant_formulas_exact() {
        assert_eq!(quant_step_sq(1.0, 1), 2.0);
        assert_eq!(quant_step_sq(2.0, 1), 4.0);
        for b in 1..=20 {
            let ratio = quant_step_sq(3.7, b) / quant_step_sq(3.7, b + 1);
            assert!((ratio - 4.0).abs() < 1e-12);
        }
        assert_eq!(quant_power(12.0), 1.0);
        assert_eq!(quant_power(0.0), 0.0);
        // Chained: q²/12 = 8P/(12·2^{2b}) = scale·P.
        let adc = AdcModel::new(7).unwrap();
        let chained = quant_power(quant_step_sq(5.0, 7));
        assert!((chained - adc.quant_scale() * 5.0).abs() < 1e-18);
    }

    #[test]
    fn max_si_adc_examples() {
        assert!((max_si_adc(1.0, 1, 0.5, 1.0, 1.0).unwrap() - 4.0).abs() < 1e-12);
        // No degradation budget: Δ = 1 → −P_noise·(SNR_in + 1).
        let v = max_si_adc(2.0, 3, 1.0, 5.0, 1.0).unwrap();
        assert!((v + 2.0 * 6.0).abs() < 1e-12);
        // Extra bit quadruples the headroom term.
        let lo = max_si_adc(1.0, 4, 0.5, 0.0, 1.0).unwrap() + 1.0;
        let hi = max_si_adc(1.0, 5, 0.5, 0.0, 1.0).unwrap() + 1.0;
        assert!((hi / lo - 4.0).abs() < 1e-12);
        assert!(matches!(
            max_si_adc(1.0, 1, 0.0, 1.0, 1.0),
            Err(Error::Parameter { .. })
        ));
        assert!(matches!(
            max_si_adc(1.0, 1, 1.5, 1.0, 1.0),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn models_validate_parameters() {
        assert!(LnaModel::new(0.0, 1.0).is_err());
        assert!(LnaModel::new(1.0, 0.0).is_err());
        assert!(AdcModel::new(0).is_err());
        assert!(AdcModel::new(1).is_ok());
    }
}
