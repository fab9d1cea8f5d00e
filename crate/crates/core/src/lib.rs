//! Message importance measures over finite alphabets.
//!
//! The measure `L(w, X) = sum_i p_i e^{w (1 - p_i)}` weights symbols by an
//! exponential of their improbability, so rare events dominate as the
//! coefficient `w` grows. For `w <= 2 / max_i p_i` it behaves like Shannon
//! entropy (concave, uniform-maximal), which gives the classical coding
//! quantities importance-weighted analogues:
//!
//! - [`capacity`] — the largest importance loss a transfer matrix can induce
//!   over input distributions, with closed forms for the binary symmetric,
//!   binary erasure, and K-ary strongly symmetric families;
//! - [`distortion`] — the smallest importance loss compatible with an average
//!   distortion budget, with the Bernoulli/Hamming closed form and optimal
//!   test channel;
//! - [`constrained_rate`] — maximum mutual information subject to an
//!   importance-loss budget, with exact bisection solutions and closed-form
//!   approximations for the two binary families;
//! - [`oracle`] — exhaustive grid searches that every closed form and every
//!   numeric optimizer is validated against.
//!
//! All inputs are immutable and every operation is a pure function. With the
//! default `parallel` feature the grid oracles, multi-start optimizers, and
//! sweeps fan out over a rayon pool; disable default features for fully
//! sequential execution.
//!
//! ```
//! use mim_core::*;
//!
//! # fn main() -> Result<()> {
//! let w = ImportanceParam::new(1.0)?;
//! let px = Distribution::uniform(2);
//! let ch = Channel::binary_symmetric(0.1)?;
//!
//! // importance lost crossing the channel, maximal at the uniform input
//! let report = importance_loss(&px, &ch, w)?;
//! let cap = milc_binary_symmetric(w, 0.1)?.capacity;
//! assert!((report.loss - cap).abs() < 1e-12);
//! # Ok(())
//! # }
//! ```

pub mod capacity;
pub mod constrained_rate;
pub mod distortion;
pub mod error;
pub mod exec;
pub mod mim;
mod optimize;
pub mod oracle;
pub mod probability;

pub use capacity::{
    milc_binary_erasure, milc_binary_symmetric, milc_numeric, milc_strongly_symmetric, MilcResult,
    SolveMethod,
};
pub use constrained_rate::{
    approx_p_bec, approx_p_bsc, max_rate_bec, max_rate_bsc, max_rate_numeric, solve_loss_equation,
    ApproxP, LossFamily, LossRoot, RateResult, Regime,
};
pub use distortion::{
    distortion_domain, midf_bernoulli_hamming, midf_numeric, optimal_test_channel, DistortionSpec,
    RdMethod, RdResult,
};
pub use error::{MimError, Result};
pub use mim::{
    cmim, cmim_forward, importance_loss, mim, mim_binary, self_scoring, ImportanceParam,
    LossReport,
};
pub use optimize::OptimizerOptions;
pub use oracle::{grid_max_loss, grid_max_mi_under_loss, grid_min_rd, GridSpec, RdGridPoint};
pub use probability::{
    binary_entropy, mutual_information, output_marginal, posterior, shannon_entropy, Channel,
    Distribution, Posterior,
};
