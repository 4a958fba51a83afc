//! One end-to-end Monte Carlo trial: channel draw, beam acquisition,
//! constrained transmit design, remainder-of-design blocks, and metrics.

use std::time::Instant;

use crate::codebook::{acquire_candidates, dft_codebook, effective_channels, measure};
use crate::channel::{ChannelSet, UlaGeometry};
use crate::error::Result;
use crate::link::{
    adc_input_cov, lmmse_combiner_j, mmse_combiner_i, quant_noise_cov, receive_precoder_k,
    AdcModel, LinkDesign,
};
use crate::metrics::{capacity_ij, capacity_ki, rate_ij, rate_ki, TrialMetrics};
use crate::numerics::TrialRng;
use crate::sim::config::SystemConfig;
use crate::solver::outer_search;

/// Vertical separation between the transmit and receive arrays of device i,
/// in wavelengths.
const SI_SEPARATION_WAVELENGTHS: f64 = 10.0;

/// Scenario coordinates a record was produced at (the swept values).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPoint {
    pub snr_ij_db: f64,
    pub snr_ki_db: f64,
    pub snr_ii_db: f64,
    pub eta_lna_db: Option<f64>,
    pub eta_adc_db: Option<f64>,
    pub kappa_db: f64,
    pub bits: u32,
    pub k_ij: usize,
    pub k_ki: usize,
}

impl ScenarioPoint {
    pub fn from_config(config: &SystemConfig) -> Self {
        Self {
            snr_ij_db: config.snr_ij_db,
            snr_ki_db: config.snr_ki_db,
            snr_ii_db: config.snr_ii_db,
            eta_lna_db: config.eta_lna_db,
            eta_adc_db: config.eta_adc_db,
            kappa_db: config.kappa_db,
            bits: config.bits,
            k_ij: config.k_ij,
            k_ki: config.k_ki,
        }
    }
}

/// One row of simulator output.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    /// Index of the sweep point this trial belongs to (0 for plain runs).
    pub sweep_index: usize,
    pub trial_index: u64,
    /// Seed the trial's generator was created from.
    pub seed: u64,
    pub scenario: ScenarioPoint,
    pub metrics: TrialMetrics,
    pub bisection_saturated: bool,
    pub inner_converged: bool,
    /// Wall-clock seconds this trial took (diagnostic; not emitted to CSV).
    pub wall_time_s: f64,
}

/// Runs one full trial at `config` with the generator derived from
/// `config.seed` and `trial_index`. Deterministic for fixed inputs; errors
/// are annotated with the trial index.
pub fn run_trial(config: &SystemConfig, trial_index: u64) -> Result<TrialRecord> {
    run_trial_at(config, 0, trial_index)
}

/// [`run_trial`] with an explicit sweep-point index recorded in the output.
pub fn run_trial_at(
    config: &SystemConfig,
    sweep_index: usize,
    trial_index: u64,
) -> Result<TrialRecord> {
    trial_body(config, sweep_index, trial_index).map_err(|e| e.in_trial(trial_index))
}

fn trial_body(
    config: &SystemConfig,
    sweep_index: usize,
    trial_index: u64,
) -> Result<TrialRecord> {
    let start = Instant::now();
    let mut rng = TrialRng::for_trial(config.seed, trial_index);

    // Channel realization. Device i's arrays are vertically separated; the
    // other geometries only shape the far-field array responses.
    let tx_i = UlaGeometry::half_wavelength(config.nt_i);
    let rx_j = UlaGeometry::half_wavelength(config.nr_j);
    let tx_k = UlaGeometry::half_wavelength(config.nt_k);
    let rx_i = UlaGeometry::new(config.nr_i, 0.5, SI_SEPARATION_WAVELENGTHS);
    let channels = ChannelSet::generate(tx_i, rx_j, tx_k, rx_i, config.kappa(), &mut rng)?;

    // Beam training and candidate acquisition on both links.
    let f_train_ij = dft_codebook(config.nt_i, config.mt_ij(), 1.0)?;
    let w_train_ij = dft_codebook(config.nr_j, config.mr_ij(), 1.0)?;
    let f_train_ki = dft_codebook(config.nt_k, config.mt_ki(), 1.0)?;
    let w_train_ki = dft_codebook(config.nr_i, config.mr_ki(), 1.0)?;
    let m_ij = measure(&channels.h_ij, &f_train_ij, &w_train_ij, 1.0)?;
    let t_ij = acquire_candidates(&m_ij, &f_train_ij, &w_train_ij, config.l_ij, config.k_ij)?;
    let m_ki = measure(&channels.h_ki, &f_train_ki, &w_train_ki, 1.0)?;
    let t_ki = acquire_candidates(&m_ki, &f_train_ki, &w_train_ki, config.l_ki, config.k_ki)?;
    let eff_ij = effective_channels(&channels.h_ij, &t_ij)?;
    let eff_ki = effective_channels(&channels.h_ki, &t_ki)?;

    // Constrained transmit design over all candidate combinations.
    let limits = config.limits();
    let snr_ij = config.snr_ij();
    let snr_ki = config.snr_ki();
    let outer = outer_search(
        &t_ij,
        &eff_ij,
        &t_ki,
        &channels.h_ii,
        &limits,
        snr_ij,
        &config.solver,
    )?;
    let (t, r) = (outer.tx_candidate, outer.rx_candidate);
    let (f_rf_i, w_rf_j) = t_ij.pairs[t].clone();
    let (f_rf_k, w_rf_i) = t_ki.pairs[r].clone();
    let f_bb_i = outer.solution.f_bb.clone();

    // Remainder of the design.
    let h_tilde_ij_full = eff_ij[t].mul(&f_bb_i);
    let amp_ij = (snr_ij / config.ns_ij as f64).sqrt();
    let w_bb_j = lmmse_combiner_j(&h_tilde_ij_full, &w_rf_j, snr_ij, config.ns_ij, amp_ij)?;

    let h_eff_ki = eff_ki[r].clone();
    let f_bb_k = receive_precoder_k(&h_eff_ki, &w_rf_i, snr_ki, config.ns_ki)?;
    let h_tilde_ki_full = h_eff_ki.mul(&f_bb_k);
    let h_tilde_ii_full = w_rf_i
        .adjoint_mul(&channels.h_ii.mul(&f_rf_i))
        .mul(&f_bb_i);
    let adc_cov = adc_input_cov(
        &h_tilde_ki_full,
        &h_tilde_ii_full,
        &w_rf_i,
        snr_ki,
        config.snr_ii(),
        config.ns_ki,
        config.ns_ij,
        1.0,
    )?;
    let r_quant = quant_noise_cov(&adc_cov, &AdcModel::new(config.bits)?)?;
    let amp_ki = (snr_ki / config.ns_ki as f64).sqrt();
    let w_bb_i = mmse_combiner_i(
        &h_tilde_ki_full,
        &w_rf_i,
        snr_ki,
        config.ns_ki,
        &r_quant,
        amp_ki,
        snr_ki,
    )?;

    let q_n_j = w_rf_j.mul(&w_bb_j).gram();
    let q_n_i = w_rf_i.mul(&w_bb_i).gram();
    let q_int_i = w_bb_i.adjoint_mul(&r_quant.mul(&w_bb_i));
    let design = LinkDesign {
        f_rf_i,
        f_bb_i,
        w_rf_j,
        w_bb_j,
        f_rf_k,
        f_bb_k,
        w_rf_i,
        w_bb_i,
        tx_candidate: t,
        rx_candidate: r,
        q_n_j,
        q_n_i,
        q_int_i: q_int_i.clone(),
        r_quant,
    };
    design.validate()?;

    // Rates and half-duplex baselines.
    let r_ij = rate_ij(&design, &eff_ij[t], snr_ij, config.ns_ij)?;
    let r_ki = rate_ki(&design, &h_eff_ki, snr_ki, config.ns_ki, &q_int_i)?;
    let c_ij = capacity_ij(&t_ij, &eff_ij, snr_ij, config.ns_ij)?;
    let c_ki = capacity_ki(&t_ki, &channels.h_ki, snr_ki, config.ns_ki)?;

    let metrics = TrialMetrics::from_parts(
        r_ij,
        r_ki,
        c_ij,
        c_ki,
        &outer.solution.report,
        &limits,
        t,
        r,
        outer.solution.path,
    );
    metrics.validate()?;

    Ok(TrialRecord {
        sweep_index,
        trial_index,
        seed: config.seed.wrapping_add(trial_index),
        scenario: ScenarioPoint::from_config(config),
        metrics,
        bisection_saturated: outer.solution.bisection_saturated,
        inner_converged: outer.solution.inner_converged,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
