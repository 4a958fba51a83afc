//! CSV emission for trial records. Columns are fixed and the encoding is
//! deterministic, so identical runs produce byte-identical files.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::trial::TrialRecord;

/// Column order of the emitted CSV. Wall-clock time is intentionally
/// excluded so reruns of the same seed are byte-identical.
pub const CSV_COLUMNS: [&str; 26] = [
    "sweep_index",
    "trial",
    "seed",
    "snr_ij_db",
    "snr_ki_db",
    "snr_ii_db",
    "eta_lna_db",
    "eta_adc_db",
    "kappa_db",
    "bits",
    "k_ij",
    "k_ki",
    "r_ij",
    "r_ki",
    "sum_se",
    "c_ij",
    "c_ki",
    "hd_baseline",
    "tx_candidate",
    "rx_candidate",
    "tight_power",
    "tight_lna",
    "tight_adc",
    "path",
    "bisection_saturated",
    "inner_converged",
];

/// Shortest round-trip float encoding; `inf`/`-inf` parse back via
/// `f64::from_str`.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Unbounded limits are written as `inf`.
fn fmt_limit_db(db: Option<f64>) -> String {
    match db {
        Some(v) => fmt_f64(v),
        None => "inf".to_string(),
    }
}

fn record_row(rec: &TrialRecord) -> Vec<String> {
    let m = &rec.metrics;
    let s = &rec.scenario;
    vec![
        rec.sweep_index.to_string(),
        rec.trial_index.to_string(),
        rec.seed.to_string(),
        fmt_f64(s.snr_ij_db),
        fmt_f64(s.snr_ki_db),
        fmt_f64(s.snr_ii_db),
        fmt_limit_db(s.eta_lna_db),
        fmt_limit_db(s.eta_adc_db),
        fmt_f64(s.kappa_db),
        s.bits.to_string(),
        s.k_ij.to_string(),
        s.k_ki.to_string(),
        fmt_f64(m.r_ij),
        fmt_f64(m.r_ki),
        fmt_f64(m.sum_se),
        fmt_f64(m.c_ij),
        fmt_f64(m.c_ki),
        fmt_f64(m.hd_baseline),
        m.tx_candidate.to_string(),
        m.rx_candidate.to_string(),
        (m.tight_power as u8).to_string(),
        (m.tight_lna as u8).to_string(),
        (m.tight_adc as u8).to_string(),
        m.solve_path.as_str().to_string(),
        (rec.bisection_saturated as u8).to_string(),
        (rec.inner_converged as u8).to_string(),
    ]
}

/// Writes records to any sink in the fixed column order.
pub fn write_csv<W: Write>(sink: W, records: &[TrialRecord]) -> Result<()> {
    write_csv_labeled(sink, records, "<csv sink>")
}

fn write_csv_labeled<W: Write>(sink: W, records: &[TrialRecord], label: &str) -> Result<()> {
    let io_err = |e: csv::Error| Error::Io {
        path: label.to_string(),
        source: std::io::Error::other(e),
    };
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(CSV_COLUMNS).map_err(io_err)?;
    for rec in records {
        writer.write_record(record_row(rec)).map_err(io_err)?;
    }
    writer.flush().map_err(|e| Error::Io {
        path: label.to_string(),
        source: e,
    })?;
    Ok(())
}

/// Writes records to a file, creating or truncating it.
pub fn write_csv_file(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let label = path.display().to_string();
    let file = std::fs::File::create(path).map_err(|e| Error::Io {
        path: label.clone(),
        source: e,
    })?;
    write_csv_labeled(std::io::BufWriter::new(file), records, &label)
}
