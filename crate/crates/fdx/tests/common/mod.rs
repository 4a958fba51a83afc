//! Helpers shared by the integration suites, including an independent
//! re-implementation of greedy beam-candidate selection used as an oracle.

use fdx::numerics::{Mat, TrialRng};

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_cmat(rng: &mut TrialRng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rng.cn01())
}

/// Visit order over all measurement cells, strongest magnitude first, built
/// by repeatedly scanning for the largest remaining entry (no sort). Ties
/// prefer the lower transmit index, then the lower receive index. Returns
/// `(tx, rx)` pairs.
pub fn strongest_first_order(m: &Mat) -> Vec<(usize, usize)> {
    let (m_r, m_t) = (m.rows(), m.cols());
    let mut taken = vec![false; m_r * m_t];
    let mut order = Vec::with_capacity(m_r * m_t);
    for _ in 0..m_r * m_t {
        let mut best: Option<(usize, usize, f64)> = None;
        // Scanning in (tx, rx) lexicographic order and replacing only on a
        // strictly larger magnitude implements the tie rule for free.
        for t in 0..m_t {
            for r in 0..m_r {
                if taken[r * m_t + t] {
                    continue;
                }
                let mag = m.at(r, t).norm();
                if best.map_or(true, |(_, _, b)| mag > b) {
                    best = Some((t, r, mag));
                }
            }
        }
        let (t, r, _) = best.expect("grid not exhausted");
        taken[r * m_t + t] = true;
        order.push((t, r));
    }
    order
}

/// Reference greedy acquisition. Candidate `c` seeds from the c-th entry of
/// the strongest-first order; each later beam takes the strongest remaining
/// entry whose transmit AND receive indices are both unused within that
/// candidate (the scan restarts from the top, so entries stronger than the
/// seed are eligible). Returns per-candidate `(tx_indices, rx_indices)`, or
/// `None` when the request cannot be filled.
pub fn reference_acquire(
    m: &Mat,
    l: usize,
    k: usize,
) -> Option<(Vec<Vec<usize>>, Vec<Vec<usize>>)> {
    if l > m.rows().min(m.cols()) || k > m.rows() * m.cols() {
        return None;
    }
    let order = strongest_first_order(m);
    let mut tx_all = Vec::with_capacity(k);
    let mut rx_all = Vec::with_capacity(k);
    for c in 0..k {
        let (t0, r0) = order[c];
        let mut tx = vec![t0];
        let mut rx = vec![r0];
        for &(t, r) in &order {
            if tx.len() == l {
                break;
            }
            if !tx.contains(&t) && !rx.contains(&r) {
                tx.push(t);
                rx.push(r);
            }
        }
        if tx.len() < l {
            return None;
        }
        tx_all.push(tx);
        rx_all.push(rx);
    }
    Some((tx_all, rx_all))
}
