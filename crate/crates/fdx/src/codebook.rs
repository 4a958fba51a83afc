//! DFT beam codebooks, training measurements, and greedy candidate selection.
//!
//! The analog front end can only point beams drawn from a finite codebook, so
//! link setup proceeds in two steps: sound every training-beam pair to get
//! the measurement matrix `M`, then greedily pick `K` candidate beam sets of
//! `L` transmit/receive beam pairs each. Candidate `k` is seeded with the
//! k-th strongest measurement entry; its remaining beams are the strongest
//! entries that reuse neither a transmit nor a receive beam within the
//! candidate. All indices are 0-based.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::Mat;

/// Beam codebook: `beams` is `N × M` with one beam per column, every column
/// having squared norm `norm_target` (the RF-chain count for precoders, the
/// antenna count for combiners).
#[derive(Debug, Clone)]
pub struct Codebook {
    pub beams: Mat,
    pub norm_target: f64,
}

/// `K` candidate analog beam sets for one link, plus the codebook indices
/// that produced them.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    /// `(F_RF, W_RF)` per candidate: `N_t × L` and `N_r × L`.
    pub pairs: Vec<(Mat, Mat)>,
    /// Transmit-codebook indices per candidate, in beam order.
    pub tx_indices: Vec<Vec<usize>>,
    /// Receive-codebook indices per candidate, in beam order.
    pub rx_indices: Vec<Vec<usize>>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// `m`-beam DFT codebook on `n` antennas: column `k` has entries
/// `sqrt(norm_target/n)·exp(j·2π·p·k/m)`, `p = 0..n−1`, so each column's
/// squared norm is exactly `norm_target`.
pub fn dft_codebook(n: usize, m: usize, norm_target: f64) -> Result<Codebook> {
    if m < 1 || m > n {
        return Err(Error::Config(format!(
            "codebook size must satisfy 1 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    let scale = (norm_target / n as f64).sqrt();
    let beams = Mat::from_fn(n, m, |p, k| {
        Complex64::from_polar(
            scale,
            2.0 * std::f64::consts::PI * (p as f64) * (k as f64) / m as f64,
        )
    });
    Ok(Codebook { beams, norm_target })
}

/// Noiseless training measurements: `M = amplitude · W_tr* · H · F_tr`,
/// shape `M_r × M_t` (receive beams × transmit beams).
pub fn measure(h: &Mat, f_train: &Codebook, w_train: &Codebook, amplitude: f64) -> Result<Mat> {
    if w_train.beams.rows() != h.rows() || f_train.beams.rows() != h.cols() {
        return Err(Error::Shape {
            op: "measure",
            details: format!(
                "H is {}x{} but combining beams have {} antennas and precoding beams {}",
                h.rows(),
                h.cols(),
                w_train.beams.rows(),
                f_train.beams.rows()
            ),
        });
    }
    Ok(w_train
        .beams
        .adjoint_mul(&h.mul(&f_train.beams))
        .scale(amplitude))
}

/// Measurement entries sorted strongest-first. Ties break toward the lower
/// transmit index, then the lower receive index.
fn sorted_entries(m: &Mat) -> Vec<(usize, usize, f64)> {
    let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(m.rows() * m.cols());
    for r in 0..m.rows() {
        for t in 0..m.cols() {
            entries.push((t, r, m.at(r, t).norm()));
        }
    }
    entries.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap()
            .then(a.0.cmp(&b.0))
            .then(a.1.cmp(&b.1))
    });
    entries
}

/// Greedy beam-candidate acquisition from a measurement matrix.
///
/// Candidate `k` (of `K`) is seeded with the k-th strongest `|M|` entry;
/// the remaining `L−1` beams are the strongest entries whose transmit AND
/// receive indices are both unused within that candidate.
pub fn acquire_candidates(
    m: &Mat,
    f_train: &Codebook,
    w_train: &Codebook,
    l: usize,
    k: usize,
) -> Result<CandidateSet> {
    let (m_r, m_t) = (m.rows(), m.cols());
    if l < 1 || k < 1 {
        return Err(Error::Parameter {
            op: "acquire_candidates",
            details: format!("need L >= 1 and K >= 1, got L = {l}, K = {k}"),
        });
    }
    if l > m_t.min(m_r) {
        return Err(Error::AcquisitionExhausted(format!(
            "cannot pick {l} beams from {m_t} transmit x {m_r} receive measurements \
             without reusing an index"
        )));
    }
    if k > m_t * m_r {
        return Err(Error::AcquisitionExhausted(format!(
            "cannot seed {k} candidates from only {} measurement entries",
            m_t * m_r
        )));
    }
    if f_train.beams.cols() != m_t || w_train.beams.cols() != m_r {
        return Err(Error::Shape {
            op: "acquire_candidates",
            details: format!(
                "measurement matrix is {m_r}x{m_t} but codebooks hold {} transmit and {} \
                 receive beams",
                f_train.beams.cols(),
                w_train.beams.cols()
            ),
        });
    }

    let entries = sorted_entries(m);
    let mut tx_indices = Vec::with_capacity(k);
    let mut rx_indices = Vec::with_capacity(k);
    for seed in entries.iter().take(k) {
        let mut tx = vec![seed.0];
        let mut rx = vec![seed.1];
        for &(t, r, _) in &entries {
            if tx.len() == l {
                break;
            }
            if !tx.contains(&t) && !rx.contains(&r) {
                tx.push(t);
                rx.push(r);
            }
        }
        if tx.len() < l {
            return Err(Error::AcquisitionExhausted(format!(
                "ran out of measurement entries after {} of {l} beams",
                tx.len()
            )));
        }
        tx_indices.push(tx);
        rx_indices.push(rx);
    }

    let pairs = tx_indices
        .iter()
        .zip(&rx_indices)
        .map(|(tx, rx)| {
            (
                f_train.beams.select_cols(tx),
                w_train.beams.select_cols(rx),
            )
        })
        .collect();
    Ok(CandidateSet {
        pairs,
        tx_indices,
        rx_indices,
    })
}

/// Digital-domain effective channel per candidate: `W_RF,k* · H · F_RF,k`,
/// shape `L_r × L_t`.
pub fn effective_channels(h: &Mat, cands: &CandidateSet) -> Result<Vec<Mat>> {
    cands
        .pairs
        .iter()
        .map(|(f_rf, w_rf)| {
            if w_rf.rows() != h.rows() || f_rf.rows() != h.cols() {
                return Err(Error::Shape {
                    op: "effective_channels",
                    details: format!(
                        "H is {}x{} but candidate beams are {}x{} / {}x{}",
                        h.rows(),
                        h.cols(),
                        w_rf.rows(),
                        w_rf.cols(),
                        f_rf.rows(),
                        f_rf.cols()
                    ),
                });
            }
            Ok(w_rf.adjoint_mul(&h.mul(f_rf)))
        })
        .collect()
}
