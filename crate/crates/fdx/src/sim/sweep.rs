//! Parameter sweeps: Cartesian grids over scenario variables, the named
//! presets matching the reference evaluation figures, and parallel
//! execution with deterministic ordering.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sim::config::SystemConfig;
use crate::sim::trial::{run_trial_at, TrialRecord};

/// One sweep point: the scenario values it overrides on the base config.
/// `None` leaves the base value untouched; for the saturation limits the
/// inner `Option` distinguishes "set to this dB value" from "unbounded".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioOverride {
    /// Sets both links' SNR (the figures sweep them together).
    pub snr_db: Option<f64>,
    pub eta_lna_db: Option<Option<f64>>,
    pub eta_adc_db: Option<Option<f64>>,
    pub kappa_db: Option<f64>,
    pub bits: Option<u32>,
    pub k_ij: Option<usize>,
    pub k_ki: Option<usize>,
}

impl ScenarioOverride {
    pub fn apply(&self, base: &SystemConfig) -> SystemConfig {
        let mut cfg = base.clone();
        if let Some(snr) = self.snr_db {
            cfg.snr_ij_db = snr;
            cfg.snr_ki_db = snr;
        }
        if let Some(eta) = self.eta_lna_db {
            cfg.eta_lna_db = eta;
        }
        if let Some(eta) = self.eta_adc_db {
            cfg.eta_adc_db = eta;
        }
        if let Some(kappa) = self.kappa_db {
            cfg.kappa_db = kappa;
        }
        if let Some(bits) = self.bits {
            cfg.bits = bits;
        }
        if let Some(k) = self.k_ij {
            cfg.k_ij = k;
        }
        if let Some(k) = self.k_ki {
            cfg.k_ki = k;
        }
        cfg
    }
}

/// A swept scenario variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    /// Both links' SNR in dB.
    Snr,
    /// LNA limit in dB.
    EtaLna,
    /// ADC limit in dB.
    EtaAdc,
    /// ADC resolution (values are rounded to integers).
    Bits,
    /// Rician factor in dB.
    Kappa,
    /// Transmit-link candidate count.
    KIj,
    /// Receive-link candidate count.
    KKi,
}

impl SweepVar {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "snr" => SweepVar::Snr,
            "eta_lna" => SweepVar::EtaLna,
            "eta_adc" => SweepVar::EtaAdc,
            "bits" => SweepVar::Bits,
            "kappa" => SweepVar::Kappa,
            "k_ij" => SweepVar::KIj,
            "k_ki" => SweepVar::KKi,
            other => {
                return Err(Error::Config(format!("unknown sweep variable '{other}'")))
            }
        })
    }

    fn set(&self, point: &mut ScenarioOverride, value: f64) {
        match self {
            SweepVar::Snr => point.snr_db = Some(value),
            SweepVar::EtaLna => point.eta_lna_db = Some(Some(value)),
            SweepVar::EtaAdc => point.eta_adc_db = Some(Some(value)),
            SweepVar::Bits => point.bits = Some(value.round().max(1.0) as u32),
            SweepVar::Kappa => point.kappa_db = Some(value),
            SweepVar::KIj => point.k_ij = Some(value.round().max(1.0) as usize),
            SweepVar::KKi => point.k_ki = Some(value.round().max(1.0) as usize),
        }
    }
}

/// Expands axes into their Cartesian product, later axes varying fastest.
/// No axes ⇒ the single base point.
pub fn expand_axes(axes: &[(SweepVar, Vec<f64>)]) -> Vec<ScenarioOverride> {
    let mut points = vec![ScenarioOverride::default()];
    for (var, values) in axes {
        let mut next = Vec::with_capacity(points.len() * values.len());
        for p in &points {
            for &v in values {
                let mut q = p.clone();
                var.set(&mut q, v);
                next.push(q);
            }
        }
        points = next;
    }
    points
}

/// Inclusive dB grid `start, start+step, …, end`.
fn db_grid(start: f64, step: f64, end: f64) -> Vec<f64> {
    let n = ((end - start) / step).round() as usize;
    (0..=n).map(|k| start + step * k as f64).collect()
}

/// Named sweep presets reproducing the reference evaluation axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Sum spectral efficiency vs SNR for LNA limits {−20…20} dB with the
    /// ADC limit tied 20 dB below, 3×3 candidates.
    FigSeSnr,
    /// Transmit-link rate vs SNR across candidate-count pairs.
    FigCandSnr,
    /// Sum spectral efficiency over the ADC-limit axis for several LNA
    /// limits, single candidates.
    FigSeEta,
    /// Receive-link rate over the ADC-limit axis across ADC resolutions.
    FigSeEtaBits,
    /// Sum spectral efficiency vs the self-interference Rician factor.
    FigSeKappa,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::FigSeSnr,
        Preset::FigCandSnr,
        Preset::FigSeEta,
        Preset::FigSeEtaBits,
        Preset::FigSeKappa,
    ];

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "fig_se_snr" => Preset::FigSeSnr,
            "fig_cand_snr" => Preset::FigCandSnr,
            "fig_se_eta" => Preset::FigSeEta,
            "fig_se_eta_bits" => Preset::FigSeEtaBits,
            "fig_se_kappa" => Preset::FigSeKappa,
            other => return Err(Error::Config(format!("unknown preset '{other}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::FigSeSnr => "fig_se_snr",
            Preset::FigCandSnr => "fig_cand_snr",
            Preset::FigSeEta => "fig_se_eta",
            Preset::FigSeEtaBits => "fig_se_eta_bits",
            Preset::FigSeKappa => "fig_se_kappa",
        }
    }

    /// The sweep points, outer variable (figure curve) first, x-axis fastest.
    pub fn points(&self) -> Vec<ScenarioOverride> {
        let snr_grid = db_grid(-20.0, 5.0, 10.0);
        let adc_grid = db_grid(-30.0, 5.0, 10.0);
        let mut points = Vec::new();
        match self {
            Preset::FigSeSnr => {
                for &eta_lna in &[-20.0, -10.0, 0.0, 10.0, 20.0] {
                    for &snr in &snr_grid {
                        points.push(ScenarioOverride {
                            snr_db: Some(snr),
                            eta_lna_db: Some(Some(eta_lna)),
                            eta_adc_db: Some(Some(eta_lna - 20.0)),
                            k_ij: Some(3),
                            k_ki: Some(3),
                            ..Default::default()
                        });
                    }
                }
            }
            Preset::FigCandSnr => {
                for &(k_ij, k_ki) in &[(1, 1), (3, 1), (1, 3), (3, 2), (3, 3)] {
                    for &snr in &snr_grid {
                        points.push(ScenarioOverride {
                            snr_db: Some(snr),
                            eta_lna_db: Some(Some(15.0)),
                            eta_adc_db: Some(Some(-5.0)),
                            k_ij: Some(k_ij),
                            k_ki: Some(k_ki),
                            ..Default::default()
                        });
                    }
                }
            }
            Preset::FigSeEta => {
                for &eta_lna in &[-10.0, 0.0, 10.0, 20.0] {
                    for &eta_adc in &adc_grid {
                        points.push(ScenarioOverride {
                            snr_db: Some(-10.0),
                            eta_lna_db: Some(Some(eta_lna)),
                            eta_adc_db: Some(Some(eta_adc)),
                            k_ij: Some(1),
                            k_ki: Some(1),
                            ..Default::default()
                        });
                    }
                }
            }
            Preset::FigSeEtaBits => {
                for &bits in &[4, 6, 8, 10, 12] {
                    for &eta_adc in &adc_grid {
                        points.push(ScenarioOverride {
                            snr_db: Some(-10.0),
                            eta_lna_db: Some(Some(20.0)),
                            eta_adc_db: Some(Some(eta_adc)),
                            bits: Some(bits),
                            k_ij: Some(1),
                            k_ki: Some(1),
                            ..Default::default()
                        });
                    }
                }
            }
            Preset::FigSeKappa => {
                for &eta_lna in &[0.0, 10.0, 20.0] {
                    for &kappa in &db_grid(-10.0, 5.0, 20.0) {
                        points.push(ScenarioOverride {
                            snr_db: Some(-10.0),
                            eta_lna_db: Some(Some(eta_lna)),
                            eta_adc_db: Some(Some(eta_lna - 20.0)),
                            kappa_db: Some(kappa),
                            k_ij: Some(1),
                            k_ki: Some(1),
                            ..Default::default()
                        });
                    }
                }
            }
        }
        points
    }
}

/// Runs `config.trials` trials at every sweep point. Rows are ordered by
/// (sweep index, trial index) regardless of how many threads execute them;
/// trial t reuses the same derived seed at every point, pairing the channel
/// draws across scenarios. An empty point list runs the base config alone.
pub fn run_sweep(config: &SystemConfig, points: &[ScenarioOverride]) -> Result<Vec<TrialRecord>> {
    let base = ScenarioOverride::default();
    let effective: &[ScenarioOverride] = if points.is_empty() {
        std::slice::from_ref(&base)
    } else {
        points
    };
    let configs: Vec<SystemConfig> = effective.iter().map(|p| p.apply(config)).collect();
    for cfg in &configs {
        cfg.validate()?;
    }
    let jobs: Vec<(usize, u64)> = (0..configs.len())
        .flat_map(|s| (0..config.trials as u64).map(move |t| (s, t)))
        .collect();
    jobs.into_par_iter()
        .map(|(s, t)| run_trial_at(&configs[s], s, t))
        .collect()
}
