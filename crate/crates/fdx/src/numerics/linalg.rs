//! Complex decompositions and allocation routines.
//!
//! * [`svd`] — one-sided Jacobi singular value decomposition. Deterministic,
//!   dependency-free, and accurate to near machine precision at the ≤ 64
//!   dimensions used here. Rotations are capped at `10·max(rows,cols)²`; the
//!   cap being hit raises a numeric-failure error instead of returning a
//!   silently unconverged factorization.
//! * [`water_fill`] — sum-power allocation across parallel channel gains by
//!   bisection on the water level.
//! * [`gram_inv_sqrt`] — `(W*W)^{−1/2}` for whitening colored noise.
//! * [`cholesky`] / [`solve_pd`] / [`log2det_pd`] — Hermitian positive
//!   definite factorization used by combiners and log-det rate evaluations.

use num_complex::Complex64;

use super::mat::Mat;
use crate::error::{Error, Result};

/// Thin singular value decomposition `A = U · diag(S) · V*`.
///
/// `U` is rows×k and `V` is cols×k with `k = min(rows, cols)`; both have
/// orthonormal columns and `S` is sorted descending.
pub struct Svd {
    pub u: Mat,
    pub s: Vec<f64>,
    pub v: Mat,
}

/// One-sided Jacobi SVD. See module docs for the convergence contract.
pub fn svd(a: &Mat) -> Result<Svd> {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        // Factor the adjoint (tall) and swap the roles of U and V:
        // A* = U Σ V*  ⇒  A = V Σ U*.
        let t = svd_tall(&a.adjoint())?;
        Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        })
    }
}

fn svd_tall(a: &Mat) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);
    let mut w = a.clone(); // working copy whose columns are rotated to orthogonality
    let mut v = Mat::identity(n);

    let rotation_cap = 10 * m.max(n) * m.max(n);
    let mut rotations = 0usize;
    let tol = 1e-15;

    loop {
        let mut off_diag_found = false;
        for p in 0..n {
            for q in (p + 1)..n {
                // 2×2 Gram block of columns p and q.
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    let wp = w.at(i, p);
                    let wq = w.at(i, q);
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                if gamma.norm_sqr() <= tol * tol * alpha * beta {
                    continue;
                }
                off_diag_found = true;
                rotations += 1;
                if rotations > rotation_cap {
                    return Err(Error::Numeric {
                        op: "svd",
                        details: format!(
                            "Jacobi sweep did not converge within {rotation_cap} rotations \
                             for a {m}x{n} matrix"
                        ),
                    });
                }
                // Absorb the phase of gamma into column q, then apply the real
                // rotation that annihilates the off-diagonal Gram entry.
                let g_abs = gamma.norm();
                let phase = gamma / g_abs; // e^{i arg gamma}
                let zeta = (beta - alpha) / (2.0 * g_abs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Net column transform: [wp, wq] ← [wp, wq]·R with
                // R = [[c, s], [−s·conj(phase), c·conj(phase)]].
                let r10 = -s * phase.conj();
                let r11 = c * phase.conj();
                for i in 0..m {
                    let wp = w.at(i, p);
                    let wq = w.at(i, q);
                    *w.at_mut(i, p) = wp * c + wq * r10;
                    *w.at_mut(i, q) = wp * s + wq * r11;
                }
                for i in 0..n {
                    let vp = v.at(i, p);
                    let vq = v.at(i, q);
                    *v.at_mut(i, p) = vp * c + vq * r10;
                    *v.at_mut(i, q) = vp * s + vq * r11;
                }
            }
        }
        if !off_diag_found {
            break;
        }
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w.at(i, j).norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap().then(x.cmp(&y)));

    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let v_sorted = v.select_cols(&order);
    let mut u = Mat::zeros(m, n);
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let rank_tol = sigma_max * 1e-14;
    let mut completed: Vec<usize> = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        if s[k] > rank_tol && s[k] > 0.0 {
            for i in 0..m {
                *u.at_mut(i, k) = w.at(i, j) / s[k];
            }
        } else {
            completed.push(k);
        }
    }
    // Orthonormal completion for (numerically) zero singular directions so U
    // always has orthonormal columns.
    for &k in &completed {
        fill_orthonormal_column(&mut u, k);
    }

    Ok(Svd { u, s, v: v_sorted })
}

/// Replaces column `k` of `u` with a unit vector orthogonal to all other
/// non-zero columns, chosen deterministically from the canonical basis.
fn fill_orthonormal_column(u: &mut Mat, k: usize) {
    let m = u.rows();
    for cand in 0..m {
        let mut col: Vec<Complex64> = (0..m)
            .map(|i| Complex64::new(if i == cand { 1.0 } else { 0.0 }, 0.0))
            .collect();
        for j in 0..u.cols() {
            if j == k {
                continue;
            }
            let proj: Complex64 = (0..m).map(|i| u.at(i, j).conj() * col[i]).sum();
            for i in 0..m {
                let uij = u.at(i, j);
                col[i] -= proj * uij;
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.5 {
            for i in 0..m {
                *u.at_mut(i, k) = col[i] / norm;
            }
            return;
        }
    }
    // Unreachable for k < m: the canonical basis always contains a vector with
    // a large component outside any (m−1)-dimensional subspace.
    unreachable!("orthonormal completion failed");
}

/// Largest eigenvalue and eigenvector of a 2×2 Hermitian matrix
/// `[[a, b], [conj(b), c]]` given as `(a, b, c)`.
fn eig_max_2x2(a: f64, b: Complex64, c: f64) -> (f64, [Complex64; 2]) {
    let half_tr = 0.5 * (a + c);
    let half_diff = 0.5 * (a - c);
    let lambda = half_tr + (half_diff * half_diff + b.norm_sqr()).sqrt();
    if b.norm_sqr() <= f64::MIN_POSITIVE {
        if a >= c {
            (lambda, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
        } else {
            (lambda, [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
        }
    } else {
        let v0 = b;
        let v1 = Complex64::new(lambda - a, 0.0);
        let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
        (lambda, [v0 / norm, v1 / norm])
    }
}

/// Squared spectral norm `σ_max²(A)`.
///
/// Uses a closed form on the smaller-side Gram matrix when that side has
/// dimension ≤ 2 (the common case for the per-stream products in this crate),
/// otherwise the full Jacobi SVD.
pub fn sigma_max_sq(a: &Mat) -> Result<f64> {
    let (m, n) = (a.rows(), a.cols());
    let small = m.min(n);
    if small == 1 {
        // Rank-limited by the vector side: σ_max² = ‖A‖_F².
        return Ok(a.frob_norm_sq());
    }
    if small == 2 {
        let g = if n <= m { a.gram() } else { a.mul(&a.adjoint()) };
        let (lambda, _) = eig_max_2x2(g.at(0, 0).re, g.at(0, 1), g.at(1, 1).re);
        return Ok(lambda.max(0.0));
    }
    let f = svd(a)?;
    Ok(f.s[0] * f.s[0])
}

/// Leading singular triple `(σ_max, u, v)` with `A·v = σ_max·u`.
///
/// For a zero matrix the triple is `(0, e_1, e_1)`.
pub fn top_singular_triple(a: &Mat) -> Result<(f64, Mat, Mat)> {
    let (m, n) = (a.rows(), a.cols());
    let small = m.min(n);
    if small <= 2 {
        if n <= m {
            let g = a.gram();
            let (lambda, vv) = if n == 1 {
                (g.at(0, 0).re, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            } else {
                eig_max_2x2(g.at(0, 0).re, g.at(0, 1), g.at(1, 1).re)
            };
            let sigma = lambda.max(0.0).sqrt();
            let v = Mat::from_fn(n, 1, |i, _| vv[i]);
            let u = if sigma > 0.0 {
                a.mul(&v).scale(1.0 / sigma)
            } else {
                Mat::from_fn(m, 1, |i, _| Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0))
            };
            Ok((sigma, u, v))
        } else {
            let (sigma, v, u) = top_singular_triple(&a.adjoint())?;
            Ok((sigma, u, v))
        }
    } else {
        let f = svd(a)?;
        Ok((f.s[0], f.u.col(0), f.v.col(0)))
    }
}

/// Orthonormal basis of the (right) null space of `A`, or `None` when the
/// null space is trivial. `rel_tol` scales the rank cutoff by `σ_max`.
pub fn nullspace(a: &Mat, rel_tol: f64) -> Result<Option<Mat>> {
    let n = a.cols();
    let f = svd(a)?;
    let sigma_max = f.s.first().copied().unwrap_or(0.0);
    let cutoff = sigma_max * rel_tol;
    let mut basis: Vec<usize> = Vec::new();
    for (k, &sk) in f.s.iter().enumerate() {
        if sk <= cutoff {
            basis.push(k);
        }
    }
    let mut cols: Vec<Mat> = basis.iter().map(|&k| f.v.col(k)).collect();
    // Wide matrices have n − min(m,n) null directions beyond the thin V.
    let extra = n - f.v.cols();
    if extra > 0 {
        let mut vfull = Mat::zeros(n, f.v.cols() + extra);
        for j in 0..f.v.cols() {
            for i in 0..n {
                *vfull.at_mut(i, j) = f.v.at(i, j);
            }
        }
        for j in 0..extra {
            fill_orthonormal_column(&mut vfull, f.v.cols() + j);
            cols.push(vfull.col(f.v.cols() + j));
        }
    }
    if cols.is_empty() {
        return Ok(None);
    }
    let mut out = Mat::zeros(n, cols.len());
    for (j, cvec) in cols.iter().enumerate() {
        for i in 0..n {
            *out.at_mut(i, j) = cvec.at(i, 0);
        }
    }
    Ok(Some(out))
}

/// Water-filling power allocation: `p_i = max(0, μ − 1/g_i)` with
/// `Σ p_i = budget`, found by bisection on the water level `μ`.
///
/// Non-positive gains receive zero power. Errors if no gain is positive or
/// the budget is not positive.
pub fn water_fill(gains: &[f64], budget: f64) -> Result<Vec<f64>> {
    if !(budget > 0.0) {
        return Err(Error::Parameter {
            op: "water_fill",
            details: format!("budget must be positive, got {budget}"),
        });
    }
    let inv: Vec<Option<f64>> = gains
        .iter()
        .map(|&g| if g > 0.0 { Some(1.0 / g) } else { None })
        .collect();
    let active: Vec<f64> = inv.iter().flatten().copied().collect();
    if active.is_empty() {
        return Err(Error::Degenerate {
            op: "water_fill",
            details: "all gains are zero or negative".into(),
        });
    }
    let mut lo = active.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = active.iter().cloned().fold(0.0f64, f64::max) + budget;
    let allocated = |mu: f64| -> f64 {
        inv.iter()
            .flatten()
            .map(|&r| (mu - r).max(0.0))
            .sum::<f64>()
    };
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if allocated(mid) < budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let mut powers: Vec<f64> = inv
        .iter()
        .map(|r| match r {
            Some(r) => (mu - r).max(0.0),
            None => 0.0,
        })
        .collect();
    // The bisection tolerance leaves the sum within ~1e-12·μ of the budget;
    // rescale so callers can rely on hitting it exactly (the active set and
    // common water level move by the same, negligible, relative amount).
    let total: f64 = powers.iter().sum();
    if total > 0.0 && total != budget {
        let fix = budget / total;
        for p in &mut powers {
            *p *= fix;
        }
    }
    Ok(powers)
}

/// `(W*W)^{−1/2}` via the SVD of `W`: `V·diag(1/σ)·V*`.
///
/// Errors when the Gram matrix is numerically singular
/// (`σ_min ≤ 1e−12·σ_max`).
pub fn gram_inv_sqrt(w: &Mat) -> Result<Mat> {
    let f = svd(w)?;
    if f.v.cols() < w.cols() {
        return Err(Error::RankDeficient {
            op: "gram_inv_sqrt",
            details: "W has fewer rows than columns; W*W cannot be positive definite".into(),
        });
    }
    let sigma_max = f.s[0];
    let sigma_min = *f.s.last().unwrap();
    if sigma_min <= 1e-12 * sigma_max || sigma_min == 0.0 {
        return Err(Error::RankDeficient {
            op: "gram_inv_sqrt",
            details: format!("singular Gram: sigma_min = {sigma_min:.3e}, sigma_max = {sigma_max:.3e}"),
        });
    }
    let n = w.cols();
    let mut out = Mat::zeros(n, n);
    for k in 0..n {
        let scale = 1.0 / f.s[k];
        for i in 0..n {
            for j in 0..n {
                *out.at_mut(i, j) += f.v.at(i, k) * scale * f.v.at(j, k).conj();
            }
        }
    }
    Ok(out)
}

/// Lower-triangular Cholesky factor `L` with `A = L·L*` for Hermitian
/// positive definite `A`.
pub fn cholesky(a: &Mat) -> Result<Mat> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Shape {
            op: "cholesky",
            details: format!("matrix must be square, got {}x{}", a.rows(), a.cols()),
        });
    }
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = a.at(j, j).re;
        for k in 0..j {
            d -= l.at(j, k).norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::RankDeficient {
                op: "cholesky",
                details: format!("matrix not positive definite at pivot {j} (d = {d:.3e})"),
            });
        }
        let djj = d.sqrt();
        *l.at_mut(j, j) = Complex64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut v = a.at(i, j);
            for k in 0..j {
                v -= l.at(i, k) * l.at(j, k).conj();
            }
            *l.at_mut(i, j) = v / djj;
        }
    }
    Ok(l)
}

/// Solves `A·X = B` for Hermitian positive definite `A`.
pub fn solve_pd(a: &Mat, b: &Mat) -> Result<Mat> {
    let l = cholesky(a)?;
    let n = a.rows();
    assert_eq!(b.rows(), n, "solve_pd: right-hand side row count mismatch");
    let mut x = b.clone();
    // Forward substitution: L·Y = B.
    for col in 0..x.cols() {
        for i in 0..n {
            let mut v = x.at(i, col);
            for k in 0..i {
                v -= l.at(i, k) * x.at(k, col);
            }
            *x.at_mut(i, col) = v / l.at(i, i).re;
        }
        // Back substitution: L*·X = Y.
        for i in (0..n).rev() {
            let mut v = x.at(i, col);
            for k in (i + 1)..n {
                v -= l.at(k, i).conj() * x.at(k, col);
            }
            *x.at_mut(i, col) = v / l.at(i, i).re;
        }
    }
    Ok(x)
}

/// `A^{-1}` for Hermitian positive definite `A`.
pub fn inverse_pd(a: &Mat) -> Result<Mat> {
    solve_pd(a, &Mat::identity(a.rows()))
}

/// `log2 det A` for Hermitian positive definite `A`.
pub fn log2det_pd(a: &Mat) -> Result<f64> {
    let l = cholesky(a)?;
    Ok((0..a.rows()).map(|j| 2.0 * l.at(j, j).re.log2()).sum())
}
