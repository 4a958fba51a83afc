//! Dense complex linear algebra and seeded randomness.
//!
//! The matrix dimensions in this crate are small (at most the antenna count,
//! 32 by default), so a straightforward row-major dense type plus a Jacobi
//! SVD is both fast enough and fully deterministic — important because
//! identical configs and seeds must produce byte-identical output files.

mod linalg;
mod mat;
pub mod rng;

pub use linalg::{
    cholesky, gram_inv_sqrt, inverse_pd, log2det_pd, nullspace, sigma_max_sq, solve_pd, svd,
    top_singular_triple, water_fill, Svd,
};
pub use mat::Mat;
pub use rng::TrialRng;
