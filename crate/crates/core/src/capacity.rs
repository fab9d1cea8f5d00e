//! Message importance loss capacity (MILC): the maximum importance loss a
//! transfer matrix can induce over all input distributions.
//!
//! Closed forms cover the three standard families (binary symmetric, binary
//! erasure, K-ary strongly symmetric); `milc_numeric` handles arbitrary
//! channels by multi-start projected-gradient ascent over the input simplex.

use crate::error::{MimError, Result};
use crate::mim::{importance_loss_raw, mim_binary, ImportanceParam};
use crate::optimize::{maximize_blocks, simplex_starts, OptimizerOptions};
use crate::probability::{Channel, Distribution};

/// How a result was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ClosedForm,
    Numeric,
}

/// A capacity value together with the input distribution achieving it.
#[derive(Debug, Clone)]
pub struct MilcResult {
    pub capacity: f64,
    pub argmax_input: Distribution,
    pub method: SolveMethod,
    /// False only when the numeric path exhausted its iteration budget
    /// without meeting the stationarity tolerance; the result is then the
    /// best value found.
    pub converged: bool,
}

fn check_varpi_closed(w: ImportanceParam) -> Result<()> {
    // the closed forms remain valid at the boundary varpi = 2
    if w.varpi() > 2.0 {
        return Err(MimError::OutOfRange(format!(
            "importance coefficient {} above 2; capacity results need varpi <= 2",
            w.varpi()
        )));
    }
    Ok(())
}

fn check_beta(name: &str, beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
        return Err(MimError::OutOfRange(format!("{name} = {beta} outside [0, 1]")));
    }
    Ok(())
}

/// Capacity of the binary symmetric family:
/// `C(w, b) = e^{w/2} - [b e^{w(1-b)} + (1-b) e^{w b}]`, achieved at the
/// uniform input.
pub fn milc_binary_symmetric(w: ImportanceParam, beta_s: f64) -> Result<MilcResult> {
    check_varpi_closed(w)?;
    check_beta("beta_s", beta_s)?;
    let capacity = (w.varpi() / 2.0).exp() - mim_binary(beta_s, w);
    Ok(MilcResult {
        capacity,
        argmax_input: Distribution::uniform(2),
        method: SolveMethod::ClosedForm,
        converged: true,
    })
}

/// Capacity of the binary erasure family: `C(w, b) = (1-b) (e^{w/2} - 1)`.
pub fn milc_binary_erasure(w: ImportanceParam, beta_e: f64) -> Result<MilcResult> {
    check_varpi_closed(w)?;
    check_beta("beta_e", beta_e)?;
    let capacity = (1.0 - beta_e) * ((w.varpi() / 2.0).exp() - 1.0);
    Ok(MilcResult {
        capacity,
        argmax_input: Distribution::uniform(2),
        method: SolveMethod::ClosedForm,
        converged: true,
    })
}

/// Capacity of the K-ary strongly symmetric family:
/// `C(w, b) = e^{w(K-1)/K} - [(1-b) e^{w b} + b e^{w(1 - b/(K-1))}]`.
///
/// Convex in `b` with minimum 0 at `b = (K-1)/K`; achieved at the uniform
/// input over the K symbols.
pub fn milc_strongly_symmetric(w: ImportanceParam, beta_k: f64, k: usize) -> Result<MilcResult> {
    check_varpi_closed(w)?;
    check_beta("beta_k", beta_k)?;
    if k < 2 {
        return Err(MimError::OutOfRange(format!("k = {k}, need k >= 2")));
    }
    let v = w.varpi();
    let kf = k as f64;
    let cond = (1.0 - beta_k) * (v * beta_k).exp()
        + beta_k * (v * (1.0 - beta_k / (kf - 1.0))).exp();
    let capacity = (v * (kf - 1.0) / kf).exp() - cond;
    Ok(MilcResult {
        capacity,
        argmax_input: Distribution::uniform(k),
        method: SolveMethod::ClosedForm,
        converged: true,
    })
}

/// Numeric MILC for an arbitrary channel: multi-start projected-gradient
/// ascent of the importance loss over the input simplex, refined by a
/// simplex-grid polish.
pub fn milc_numeric(ch: &Channel, w: ImportanceParam, opts: &OptimizerOptions) -> Result<MilcResult> {
    check_varpi_closed(w)?;
    let k = ch.rows();
    let objective = |px: &[f64]| importance_loss_raw(px, ch, w.varpi());
    let starts = simplex_starts(k, opts);
    let best = maximize_blocks(&[k], &objective, &starts, opts);
    Ok(MilcResult {
        capacity: best.value,
        argmax_input: Distribution::new(best.x)
            .expect("optimizer output stays on the simplex"),
        method: SolveMethod::Numeric,
        converged: best.converged,
    })
}
