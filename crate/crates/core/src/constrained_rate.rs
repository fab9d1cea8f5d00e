//! Maximum mutual information under an importance-loss budget.
//!
//! For the binary symmetric and erasure families the solution splits into two
//! regimes: once the budget meets the family's loss capacity the constraint
//! goes slack and the rate sits at Shannon capacity; below that, the optimal
//! input is the root of `loss(p) = eps`, found here by bisection (the loss is
//! monotone increasing on [0, 1/2]). Second-order closed-form approximations
//! of that root are provided as labeled approximations, never silently
//! substituted for the exact solve.

use crate::capacity::{milc_binary_erasure, milc_binary_symmetric};
use crate::error::{MimError, Result};
use crate::mim::{importance_loss, importance_loss_raw, mim_binary, ImportanceParam};
use crate::optimize::{maximize_blocks, simplex_starts, OptimizerOptions};
use crate::probability::{binary_entropy, mutual_information_raw, Channel, Distribution};

/// Which side of the turning point a solution landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Budget at or above the loss capacity: rate equals Shannon capacity.
    CapacityPlateau,
    /// Budget binds: the input is pinned to the loss equation's root.
    LossLimited,
}

/// Solution of the constrained bitrate problem.
#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    /// Maximum mutual information in bits.
    pub rate: f64,
    /// The optimal source parameter, in [0, 1/2] for the symmetric families
    /// (the mirrored `1 - p` input is equivalent).
    pub optimal_p: f64,
    pub regime: Regime,
    /// Closed-form approximation of the optimal p, when its discriminant
    /// admits one; `None` on the plateau or when the formula falls back.
    pub p_approx: Option<f64>,
}

/// The two channel families with closed-regime solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossFamily {
    Bsc { beta_s: f64 },
    Bec { beta_e: f64 },
}

impl LossFamily {
    /// The family's loss capacity (maximum importance loss over inputs).
    pub fn milc(&self, w: ImportanceParam) -> Result<f64> {
        match *self {
            LossFamily::Bsc { beta_s } => Ok(milc_binary_symmetric(w, beta_s)?.capacity),
            LossFamily::Bec { beta_e } => Ok(milc_binary_erasure(w, beta_e)?.capacity),
        }
    }

    /// Exact importance loss of a Bernoulli(p) input through the family.
    pub fn loss_at(&self, p: f64, w: ImportanceParam) -> Result<f64> {
        match *self {
            LossFamily::Bsc { beta_s } => {
                let px = Distribution::bernoulli(p)?;
                let ch = Channel::binary_symmetric(beta_s)?;
                Ok(importance_loss(&px, &ch, w)?.loss)
            }
            LossFamily::Bec { beta_e } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(MimError::OutOfRange(format!("p = {p} outside [0, 1]")));
                }
                Ok((1.0 - beta_e) * (mim_binary(p, w) - 1.0))
            }
        }
    }
}

/// Root of the loss equation, plus whether the budget was already slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRoot {
    pub p: f64,
    /// True when `eps` met or exceeded the family capacity, in which case
    /// `p` is pinned at 1/2.
    pub plateau: bool,
}

/// Solves `loss(p) = eps` for `p` in [0, 1/2] by bisection.
///
/// The loss is 0 at p = 0, the family capacity at p = 1/2, and monotone
/// increasing in between, so the bracket is immediate. The residual
/// `|loss(p) - eps|` is driven below 1e-12.
pub fn solve_loss_equation(family: LossFamily, w: ImportanceParam, eps: f64) -> Result<LossRoot> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(MimError::OutOfRange(format!("loss budget {eps} must be positive")));
    }
    let cap = family.milc(w)?;
    if eps >= cap {
        return Ok(LossRoot { p: 0.5, plateau: true });
    }
    let mut lo = 0.0f64;
    let mut hi = 0.5f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval exhausted at f64 resolution
        }
        if family.loss_at(mid, w)? < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick the endpoint with the smaller residual
    let (rlo, rhi) = (
        (family.loss_at(lo, w)? - eps).abs(),
        (family.loss_at(hi, w)? - eps).abs(),
    );
    Ok(LossRoot {
        p: if rlo <= rhi { lo } else { hi },
        plateau: false,
    })
}

/// A closed-form approximate root, or the exact root when the formula's
/// discriminant fails (`fallback` set).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxP {
    pub p: f64,
    pub fallback: bool,
}

/// Second-order approximation of the binary-symmetric loss root:
/// `p ~= (1 - sqrt(Theta))/2` with
/// `Theta = 1 - 4e/A - 4 sqrt((1-2b)^2 e^2 + 2 A b(1-b) e) / (A |1-2b|)`,
/// `A = 4w + w^2`.
pub fn approx_p_bsc(w: ImportanceParam, beta_s: f64, eps: f64) -> Result<ApproxP> {
    if !(0.0..=1.0).contains(&beta_s) {
        return Err(MimError::OutOfRange(format!("beta_s = {beta_s} outside [0, 1]")));
    }
    if eps < 0.0 {
        return Err(MimError::OutOfRange(format!("loss budget {eps} negative")));
    }
    if eps == 0.0 {
        return Ok(ApproxP { p: 0.0, fallback: false });
    }
    let v = w.varpi();
    let a = 4.0 * v + v * v;
    let skew = (1.0 - 2.0 * beta_s).abs();
    if skew > 0.0 {
        let inner = skew * skew * eps * eps + 2.0 * a * beta_s * (1.0 - beta_s) * eps;
        let theta = 1.0 - 4.0 * eps / a - 4.0 * inner.sqrt() / (a * skew);
        if theta >= 0.0 {
            return Ok(ApproxP { p: (1.0 - theta.sqrt()) / 2.0, fallback: false });
        }
    }
    // degenerate skew or negative discriminant: fall back to the exact root
    let root = solve_loss_equation(LossFamily::Bsc { beta_s }, w, eps)?;
    Ok(ApproxP { p: root.p, fallback: true })
}

/// Second-order approximation of the binary-erasure loss root:
/// `p ~= (1 - sqrt(1 - 8e / ((1-b)(4w + w^2)))) / 2`.
pub fn approx_p_bec(w: ImportanceParam, beta_e: f64, eps: f64) -> Result<ApproxP> {
    if !(0.0..=1.0).contains(&beta_e) {
        return Err(MimError::OutOfRange(format!("beta_e = {beta_e} outside [0, 1]")));
    }
    if eps < 0.0 {
        return Err(MimError::OutOfRange(format!("loss budget {eps} negative")));
    }
    if eps == 0.0 {
        return Ok(ApproxP { p: 0.0, fallback: false });
    }
    let v = w.varpi();
    if beta_e < 1.0 {
        let disc = 1.0 - 8.0 * eps / ((1.0 - beta_e) * (4.0 * v + v * v));
        if disc >= 0.0 {
            return Ok(ApproxP { p: (1.0 - disc.sqrt()) / 2.0, fallback: false });
        }
    }
    let root = solve_loss_equation(LossFamily::Bec { beta_e }, w, eps)?;
    Ok(ApproxP { p: root.p, fallback: true })
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(MimError::OutOfRange(format!("loss budget {eps} must be positive")));
    }
    Ok(())
}

/// Constrained maximum rate through a binary symmetric channel: the Shannon
/// capacity `1 - H(b)` once the budget is slack, otherwise
/// `H(p(1-b) + (1-p)b) - H(b)` at the loss equation's root.
pub fn max_rate_bsc(w: ImportanceParam, beta_s: f64, eps: f64) -> Result<RateResult> {
    check_eps(eps)?;
    let cap = milc_binary_symmetric(w, beta_s)?.capacity;
    if eps >= cap {
        return Ok(RateResult {
            rate: 1.0 - binary_entropy(beta_s),
            optimal_p: 0.5,
            regime: Regime::CapacityPlateau,
            p_approx: None,
        });
    }
    let root = solve_loss_equation(LossFamily::Bsc { beta_s }, w, eps)?;
    let p = root.p;
    let out = p * (1.0 - beta_s) + (1.0 - p) * beta_s;
    let approx = approx_p_bsc(w, beta_s, eps)?;
    Ok(RateResult {
        rate: binary_entropy(out) - binary_entropy(beta_s),
        optimal_p: p,
        regime: Regime::LossLimited,
        p_approx: (!approx.fallback).then_some(approx.p),
    })
}

/// Constrained maximum rate through a binary erasure channel: `1 - b` on the
/// plateau, otherwise `(1-b) H(p)` at the loss equation's root.
pub fn max_rate_bec(w: ImportanceParam, beta_e: f64, eps: f64) -> Result<RateResult> {
    check_eps(eps)?;
    let cap = milc_binary_erasure(w, beta_e)?.capacity;
    if eps >= cap {
        return Ok(RateResult {
            rate: 1.0 - beta_e,
            optimal_p: 0.5,
            regime: Regime::CapacityPlateau,
            p_approx: None,
        });
    }
    let root = solve_loss_equation(LossFamily::Bec { beta_e }, w, eps)?;
    let approx = approx_p_bec(w, beta_e, eps)?;
    Ok(RateResult {
        rate: (1.0 - beta_e) * binary_entropy(root.p),
        optimal_p: root.p,
        regime: Regime::LossLimited,
        p_approx: (!approx.fallback).then_some(approx.p),
    })
}

const RATE_PENALTY_ROUNDS: usize = 6;
const RATE_PENALTY_INITIAL: f64 = 10.0;

/// Numeric constrained rate for an arbitrary binary-input channel:
/// maximizes mutual information over the input simplex with a quadratic
/// penalty on loss above the budget, then pins the iterate to the loss
/// boundary by bisection.
pub fn max_rate_numeric(
    ch: &Channel,
    w: ImportanceParam,
    eps: f64,
    opts: &OptimizerOptions,
) -> Result<RateResult> {
    check_eps(eps)?;
    if ch.rows() != 2 {
        return Err(MimError::ShapeMismatch {
            context: "constrained rate needs a binary-input channel",
            expected: 2,
            actual: ch.rows(),
        });
    }
    let varpi = w.varpi();
    let mi_of = |p0: f64| mutual_information_raw(&[p0, 1.0 - p0], ch);
    let loss_of = |p0: f64| importance_loss_raw(&[p0, 1.0 - p0], ch, varpi);

    // unconstrained capacity first; mutual information is concave in the input
    let starts = simplex_starts(2, opts);
    let unconstrained = maximize_blocks(&[2], &|x: &[f64]| mutual_information_raw(x, ch), &starts, opts);
    let p_cap = unconstrained.x[0];
    if loss_of(p_cap) <= eps {
        return Ok(RateResult {
            rate: unconstrained.value,
            optimal_p: p_cap,
            regime: Regime::CapacityPlateau,
            p_approx: None,
        });
    }

    // budget binds: penalized ascent, warm-started across rounds
    let mut mu = RATE_PENALTY_INITIAL;
    let mut warm = starts.clone();
    let mut best = None;
    for _ in 0..RATE_PENALTY_ROUNDS {
        let objective = |x: &[f64]| {
            let excess = (importance_loss_raw(x, ch, varpi) - eps).max(0.0);
            mutual_information_raw(x, ch) - mu * excess * excess
        };
        let got = maximize_blocks(&[2], &objective, &warm, opts);
        warm = vec![got.x.clone(), vec![0.5, 0.5], vec![0.0, 1.0]];
        best = Some(got);
        mu *= 10.0;
    }
    let best = best.expect("penalty rounds ran");

    // the optimum sits on the loss boundary; bisect the crossing nearest the
    // capacity point on each side and keep the better feasible one
    let mut candidates: Vec<f64> = Vec::new();
    for (lo0, hi0) in [(0.0, p_cap), (1.0, p_cap)] {
        // loss(lo0) = 0 <= eps < loss(p_cap)
        let mut feas = lo0;
        let mut infeas = hi0;
        for _ in 0..200 {
            let mid = 0.5 * (feas + infeas);
            if mid == feas || mid == infeas {
                break;
            }
            if loss_of(mid) <= eps {
                feas = mid;
            } else {
                infeas = mid;
            }
        }
        candidates.push(feas);
    }
    let p_pen = best.x[0];
    if loss_of(p_pen) <= eps {
        candidates.push(p_pen);
    }
    let best_p = candidates
        .into_iter()
        .max_by(|a, b| mi_of(*a).partial_cmp(&mi_of(*b)).unwrap())
        .expect("bisection always yields candidates");
    Ok(RateResult {
        rate: mi_of(best_p),
        optimal_p: best_p,
        regime: Regime::LossLimited,
        p_approx: None,
    })
}
