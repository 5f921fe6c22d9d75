//! Shared numerical kernels: Gauss–Legendre quadrature, a Brent-style
//! bracketing root finder, special functions, and deterministic RNG streams.
//!
//! Everything here is pure given its inputs and safe to call concurrently;
//! a single [`RngStream`]'s generator must not be shared across threads.

pub mod quad;
pub mod rng;
pub mod root;
pub mod special;

pub use quad::GaussLegendre;
pub use rng::RngStream;
pub use root::find_root;
pub use special::{
    chi2_quantile_1df, euler_gamma, log_gamma, std_normal_cdf, std_normal_pdf, std_normal_quantile,
    EULER_GAMMA,
};
