//! Geometric MIMO channel generation.
//!
//! Three channels drive each Monte Carlo trial: the desired transmit link
//! `H_ij`, the desired receive link `H_ki` (both multi-ray geometric models),
//! and the device's own self-interference channel `H_ii`, a Rician mix of a
//! deterministic near-field spherical-wave component and a far-field ray
//! component. The Rician factor `κ` sets the fraction `κ/(κ+1)` of
//! self-interference energy carried by the near field.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{Mat, TrialRng};

/// Uniform linear array: `n_elements` isotropic elements on a horizontal
/// line, `spacing` apart (in wavelengths), the whole line raised by
/// `vertical_offset` wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlaGeometry {
    pub n_elements: usize,
    pub spacing: f64,
    pub vertical_offset: f64,
}

impl UlaGeometry {
    pub fn new(n_elements: usize, spacing: f64, vertical_offset: f64) -> Self {
        assert!(n_elements >= 1, "array needs at least one element");
        assert!(spacing > 0.0, "element spacing must be positive");
        Self {
            n_elements,
            spacing,
            vertical_offset,
        }
    }

    /// Half-wavelength-spaced array at height zero.
    pub fn half_wavelength(n_elements: usize) -> Self {
        Self::new(n_elements, 0.5, 0.0)
    }
}

/// Ray statistics for a geometric channel draw: the ray count is uniform on
/// the inclusive integer range `[n_rays_min, n_rays_max]`, and each ray's
/// departure/arrival angles are uniform on `[angle_min, angle_max)` radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayParams {
    pub n_rays_min: u64,
    pub n_rays_max: u64,
    pub angle_min: f64,
    pub angle_max: f64,
}

impl RayParams {
    pub fn new(n_rays_min: u64, n_rays_max: u64) -> Self {
        assert!(
            1 <= n_rays_min && n_rays_min <= n_rays_max,
            "ray count range must satisfy 1 <= min <= max"
        );
        Self {
            n_rays_min,
            n_rays_max,
            angle_min: -std::f64::consts::FRAC_PI_2,
            angle_max: std::f64::consts::FRAC_PI_2,
        }
    }

    /// Ray statistics for the desired links: 4–15 rays.
    pub fn desired_link() -> Self {
        Self::new(4, 15)
    }

    /// Ray statistics for the far-field part of self-interference: 1–15 rays.
    pub fn si_far_field() -> Self {
        Self::new(1, 15)
    }
}

/// The three channels of one trial, all in the same normalization
/// (`E‖H‖_F² = Nt·Nr`).
#[derive(Debug, Clone)]
pub struct ChannelSet {
    /// Desired transmit channel, device i → device j: `Nr(j) × Nt(i)`.
    pub h_ij: Mat,
    /// Desired receive channel, device k → device i: `Nr(i) × Nt(k)`.
    pub h_ki: Mat,
    /// Self-interference channel at device i: `Nr(i) × Nt(i)`.
    pub h_ii: Mat,
    /// Linear Rician factor used for `h_ii`.
    pub kappa: f64,
}

impl ChannelSet {
    /// Draws all three channels. The draw order is fixed (`h_ij`, `h_ki`,
    /// `h_ii`) so a given seed always produces the same set.
    pub fn generate(
        tx_i: UlaGeometry,
        rx_j: UlaGeometry,
        tx_k: UlaGeometry,
        rx_i: UlaGeometry,
        kappa: f64,
        rng: &mut TrialRng,
    ) -> Result<Self> {
        let desired = RayParams::desired_link();
        let h_ij = gen_sv_channel(tx_i, rx_j, desired, rng);
        let h_ki = gen_sv_channel(tx_k, rx_i, desired, rng);
        let h_ii = gen_si_channel(kappa, tx_i, rx_i, RayParams::si_far_field(), rng)?;
        Ok(Self {
            h_ij,
            h_ki,
            h_ii,
            kappa,
        })
    }
}

/// Array response column for a plane wave at `angle` radians off broadside:
/// element `n` is `exp(j·2π·spacing·n·sin angle)`, so `‖a‖² = N`.
pub fn array_response(geom: UlaGeometry, angle: f64) -> Mat {
    let phase_step = 2.0 * std::f64::consts::PI * geom.spacing * angle.sin();
    Mat::from_fn(geom.n_elements, 1, |n, _| {
        Complex64::from_polar(1.0, phase_step * n as f64)
    })
}

/// Channel assembled from explicit rays `(aod, aoa, beta)`:
/// `H = sqrt(1/N_rays)·Σ_u β_u·a_rx(aoa_u)·a_tx(aod_u)*`.
pub fn sv_from_rays(tx: UlaGeometry, rx: UlaGeometry, rays: &[(f64, f64, Complex64)]) -> Mat {
    assert!(!rays.is_empty(), "at least one ray required");
    let mut h = Mat::zeros(rx.n_elements, tx.n_elements);
    for &(aod, aoa, beta) in rays {
        let a_tx = array_response(tx, aod);
        let a_rx = array_response(rx, aoa);
        h.axpy(beta, &a_rx.mul(&a_tx.adjoint()));
    }
    h.scale(1.0 / (rays.len() as f64).sqrt())
}

/// Random multi-ray channel draw. Per draw: the ray count, then per ray the
/// departure angle, arrival angle, and complex gain `β ~ CN(0,1)`.
/// `E‖H‖_F² = Nt·Nr` and `rank(H) ≤ N_rays`.
pub fn gen_sv_channel(tx: UlaGeometry, rx: UlaGeometry, rays: RayParams, rng: &mut TrialRng) -> Mat {
    let n_rays = rng.uniform_int_inclusive(rays.n_rays_min, rays.n_rays_max);
    let drawn: Vec<(f64, f64, Complex64)> = (0..n_rays)
        .map(|_| {
            let aod = rng.uniform(rays.angle_min, rays.angle_max);
            let aoa = rng.uniform(rays.angle_min, rays.angle_max);
            let beta = rng.cn01();
            (aod, aoa, beta)
        })
        .collect();
    sv_from_rays(tx, rx, &drawn)
}

/// Deterministic near-field spherical-wave channel between two parallel
/// ULAs. Entry `(v, u)` is `(γ/r_{u,v})·exp(−j·2π·r_{u,v})` with `r_{u,v}`
/// the element distance in wavelengths, and `γ` normalizes `‖H‖_F²` to
/// exactly `Nt·Nr`.
pub fn gen_nearfield(tx: UlaGeometry, rx: UlaGeometry) -> Result<Mat> {
    let dy = rx.vertical_offset - tx.vertical_offset;
    let nt = tx.n_elements;
    let nr = rx.n_elements;
    let mut inv_r_sq_sum = 0.0;
    let mut dist = vec![0.0f64; nr * nt];
    for v in 0..nr {
        for u in 0..nt {
            let dx = v as f64 * rx.spacing - u as f64 * tx.spacing;
            let r = (dy * dy + dx * dx).sqrt();
            if r <= 0.0 {
                return Err(Error::Parameter {
                    op: "gen_nearfield",
                    details: format!("coincident antennas: tx element {u} and rx element {v}"),
                });
            }
            dist[v * nt + u] = r;
            inv_r_sq_sum += 1.0 / (r * r);
        }
    }
    let gamma = ((nt * nr) as f64 / inv_r_sq_sum).sqrt();
    Ok(Mat::from_fn(nr, nt, |v, u| {
        let r = dist[v * nt + u];
        Complex64::from_polar(gamma / r, -2.0 * std::f64::consts::PI * r)
    }))
}

/// Self-interference channel: Rician mix
/// `H_ii = sqrt(κ/(κ+1))·H_NF + sqrt(1/(κ+1))·H_FF`
/// of the deterministic near field and a random far-field ray component.
pub fn gen_si_channel(
    kappa: f64,
    tx: UlaGeometry,
    rx: UlaGeometry,
    rays: RayParams,
    rng: &mut TrialRng,
) -> Result<Mat> {
    if !(kappa >= 0.0) {
        return Err(Error::Parameter {
            op: "gen_si_channel",
            details: format!("Rician factor must be >= 0, got {kappa}"),
        });
    }
    let h_ff = gen_sv_channel(tx, rx, rays, rng);
    let h_nf = gen_nearfield(tx, rx)?;
    let w_nf = (kappa / (kappa + 1.0)).sqrt();
    let w_ff = (1.0 / (kappa + 1.0)).sqrt();
    Ok(h_nf.scale(w_nf).add_mat(&h_ff.scale(w_ff)))
}

/// Linear SNR from raw link-budget quantities:
/// `ptx_watts · gain_sq / (noise_psd_w_per_hz · bandwidth_hz)`.
pub fn snr_from_powers(
    ptx_watts: f64,
    gain_sq: f64,
    noise_psd_w_per_hz: f64,
    bandwidth_hz: f64,
) -> Result<f64> {
    for (name, v) in [
        ("ptx_watts", ptx_watts),
        ("gain_sq", gain_sq),
        ("noise_psd_w_per_hz", noise_psd_w_per_hz),
        ("bandwidth_hz", bandwidth_hz),
    ] {
        if !(v > 0.0) {
            return Err(Error::Parameter {
                op: "snr_from_powers",
                details: format!("{name} must be positive, got {v}"),
            });
        }
    }
    Ok(ptx_watts * gain_sq / (noise_psd_w_per_hz * bandwidth_hz))
}
