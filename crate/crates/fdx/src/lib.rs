//! Full-duplex mmWave hybrid beamforming designer and Monte Carlo link simulator.
//!
//! A full-duplex millimeter-wave device `i` transmits to a device `j` while
//! simultaneously receiving from a device `k`. Each array uses hybrid
//! (analog RF + digital baseband) beamforming, and device `i`'s own transmit
//! signal leaks into its receiver through a self-interference channel. The
//! receiver's analog front end imposes two hardware limits that the transmit
//! design must respect:
//!
//! * a per-antenna cap on average self-interference power so the LNAs stay
//!   linear (unitless limit `eta_lna`), and
//! * a per-RF-chain cap at the ADCs so quantization noise does not swamp the
//!   desired receive signal (unitless limit `eta_adc`).
//!
//! The crate provides, bottom-up:
//!
//! * [`numerics`] — dense complex matrices, Jacobi SVD / Hermitian eigen /
//!   Cholesky, water-filling, and seeded reproducible randomness;
//! * [`channel`] — geometric ray-cluster channels for the two desired links
//!   and a Rician near-field/far-field self-interference channel;
//! * [`codebook`] — DFT beam codebooks, training measurements, and greedy
//!   beam-candidate acquisition;
//! * [`constraints`] — spectral-norm forms of the LNA/ADC limits plus the
//!   redundancy tests that let candidates skip constrained solves;
//! * [`solver`] — penalized subgradient descent with a bisected penalty scale
//!   and a final power projection, maximizing transmit mutual information
//!   subject to the three constraints;
//! * [`link`] — LMMSE/MMSE baseband combiners, the water-filled receive
//!   precoder, ADC quantization-noise covariance, and digital SI cancellation;
//! * [`metrics`] — spectral efficiencies and codebook-restricted capacities;
//! * [`sim`] — configuration, the per-trial pipeline, figure-style parameter
//!   sweeps, and CSV emission for the `fdx` command-line tool.

pub mod channel;
pub mod codebook;
pub mod constraints;
pub mod error;
pub mod link;
pub mod metrics;
pub mod numerics;
pub mod sim;
pub mod solver;

pub use error::{Error, Result};
pub use numerics::Mat;
