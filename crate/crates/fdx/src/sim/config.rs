//! Simulation configuration: JSON-backed, defaulting to the reference
//! full-duplex scenario (32-element half-wavelength arrays, 2 RF chains and
//! streams per link, 30 dBm transmit power against −85 dBm noise).

use serde::{Deserialize, Serialize};

use crate::constraints::SaturationLimits;
use crate::error::{Error, Result};
use crate::solver::SolverSettings;

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Full description of one simulated scenario. Unknown JSON keys are
/// rejected; missing keys fall back to the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    /// Transmit antennas at device i (the transmit link's source).
    pub nt_i: usize,
    /// Receive antennas at device i (the receive link's destination).
    pub nr_i: usize,
    /// Transmit antennas at device k.
    pub nt_k: usize,
    /// Receive antennas at device j.
    pub nr_j: usize,
    /// RF chains per candidate on the transmit link (i → j).
    pub l_ij: usize,
    /// Streams on the transmit link.
    pub ns_ij: usize,
    /// RF chains per candidate on the receive link (k → i).
    pub l_ki: usize,
    /// Streams on the receive link.
    pub ns_ki: usize,
    /// Transmit-link SNR in dB.
    pub snr_ij_db: f64,
    /// Receive-link SNR in dB.
    pub snr_ki_db: f64,
    /// Self-interference SNR in dB: `P_tx(i)·G_ii²/σ²`, the absolute scale
    /// the quantization-noise model needs.
    pub snr_ii_db: f64,
    /// LNA saturation limit η_LNA in dB; `null` means unconstrained.
    pub eta_lna_db: Option<f64>,
    /// ADC saturation limit η_ADC in dB; `null` means unconstrained.
    pub eta_adc_db: Option<f64>,
    /// Rician factor of the self-interference channel, dB.
    pub kappa_db: f64,
    /// ADC resolution in bits.
    pub bits: u32,
    /// Beam candidates kept on the transmit link.
    pub k_ij: usize,
    /// Beam candidates kept on the receive link.
    pub k_ki: usize,
    /// Training codebook sizes (tx/rx, per link); `null` means one beam per
    /// antenna.
    pub mt_ij: Option<usize>,
    pub mr_ij: Option<usize>,
    pub mt_ki: Option<usize>,
    pub mr_ki: Option<usize>,
    /// Informational power bookkeeping used only by the unit converters.
    pub ptx_dbm: f64,
    pub noise_dbm: f64,
    pub bandwidth_hz: f64,
    /// Inner-solver tunables.
    pub solver: SolverSettings,
    /// Base seed; trial t uses seed + t.
    pub seed: u64,
    /// Monte Carlo trials per sweep point.
    pub trials: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            nt_i: 32,
            nr_i: 32,
            nt_k: 32,
            nr_j: 32,
            l_ij: 2,
            ns_ij: 2,
            l_ki: 2,
            ns_ki: 2,
            snr_ij_db: -10.0,
            snr_ki_db: -10.0,
            snr_ii_db: 60.0,
            eta_lna_db: Some(15.0),
            eta_adc_db: Some(-5.0),
            kappa_db: 10.0,
            bits: 12,
            k_ij: 1,
            k_ki: 1,
            mt_ij: None,
            mr_ij: None,
            mt_ki: None,
            mr_ki: None,
            ptx_dbm: 30.0,
            noise_dbm: -85.0,
            bandwidth_hz: 1.0,
            solver: SolverSettings::default(),
            seed: 1,
            trials: 1000,
        }
    }
}

impl SystemConfig {
    /// Loads and validates a JSON config file.
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("nt_i", self.nt_i),
            ("nr_i", self.nr_i),
            ("nt_k", self.nt_k),
            ("nr_j", self.nr_j),
            ("l_ij", self.l_ij),
            ("ns_ij", self.ns_ij),
            ("l_ki", self.l_ki),
            ("ns_ki", self.ns_ki),
            ("k_ij", self.k_ij),
            ("k_ki", self.k_ki),
            ("trials", self.trials),
        ];
        for (name, v) in positive {
            if v < 1 {
                return Err(Error::Config(format!("{name} must be at least 1, got {v}")));
            }
        }
        if self.bits < 1 {
            return Err(Error::Config("bits must be at least 1".into()));
        }
        for (name, v) in [
            ("eta_lna_db", self.eta_lna_db),
            ("eta_adc_db", self.eta_adc_db),
        ] {
            if let Some(db) = v {
                if !db.is_finite() {
                    return Err(Error::Config(format!(
                        "{name} must be finite or null, got {db}"
                    )));
                }
            }
        }
        if !self.kappa_db.is_finite() {
            return Err(Error::Config("kappa_db must be finite".into()));
        }
        for (name, m, n) in [
            ("mt_ij", self.mt_ij, self.nt_i),
            ("mr_ij", self.mr_ij, self.nr_j),
            ("mt_ki", self.mt_ki, self.nt_k),
            ("mr_ki", self.mr_ki, self.nr_i),
        ] {
            if let Some(m) = m {
                if m < 1 || m > n {
                    return Err(Error::Config(format!(
                        "{name} must be between 1 and the antenna count {n}, got {m}"
                    )));
                }
            }
        }
        self.solver.validate()?;
        Ok(())
    }

    pub fn snr_ij(&self) -> f64 {
        db_to_linear(self.snr_ij_db)
    }

    pub fn snr_ki(&self) -> f64 {
        db_to_linear(self.snr_ki_db)
    }

    pub fn snr_ii(&self) -> f64 {
        db_to_linear(self.snr_ii_db)
    }

    pub fn kappa(&self) -> f64 {
        db_to_linear(self.kappa_db)
    }

    /// Saturation limits in linear units; absent limits are unbounded.
    pub fn limits(&self) -> SaturationLimits {
        let eta = |db: Option<f64>| db.map_or(f64::INFINITY, db_to_linear);
        SaturationLimits::new(eta(self.eta_lna_db), eta(self.eta_adc_db), self.ns_ij)
    }

    pub fn mt_ij(&self) -> usize {
        self.mt_ij.unwrap_or(self.nt_i)
    }

    pub fn mr_ij(&self) -> usize {
        self.mr_ij.unwrap_or(self.nr_j)
    }

    pub fn mt_ki(&self) -> usize {
        self.mt_ki.unwrap_or(self.nt_k)
    }

    pub fn mr_ki(&self) -> usize {
        self.mr_ki.unwrap_or(self.nr_i)
    }

    /// Link SNR in dB implied by the informational power bookkeeping and a
    /// large-scale gain, via the converter chain (dBm → watts, dB → ratio).
    pub fn converter_snr_db(&self, gain_db: f64) -> Result<f64> {
        let dbm_to_watts = |dbm: f64| 10f64.powf((dbm - 30.0) / 10.0);
        let snr = crate::channel::snr_from_powers(
            dbm_to_watts(self.ptx_dbm),
            db_to_linear(gain_db),
            dbm_to_watts(self.noise_dbm) / self.bandwidth_hz,
            self.bandwidth_hz,
        )?;
        Ok(10.0 * snr.log10())
    }
}
