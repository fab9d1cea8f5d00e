//! Exhaustive grid-search oracles.
//!
//! These scan the full feasible set at a fixed resolution and exist to
//! cross-check the closed forms and the numeric optimizers at desk scale.
//! Grids live exactly on the simplex (integer compositions over a common
//! denominator), so oracle maxima are always lower bounds of true maxima and
//! oracle minima upper bounds of true minima.

use crate::error::{MimError, Result};
use crate::exec;
use crate::mim::{importance_loss_raw, ImportanceParam};
use crate::probability::{mutual_information_raw, Channel, Distribution};

/// Scan geometry: step size plus the number of simplex coordinates being
/// swept (1 for the scalar scans).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    resolution: f64,
    dimension: usize,
}

impl GridSpec {
    pub fn new(resolution: f64, dimension: usize) -> Result<Self> {
        if !(resolution > 0.0 && resolution <= 0.5) {
            return Err(MimError::OutOfRange(format!(
                "grid resolution {resolution} outside (0, 0.5]"
            )));
        }
        if dimension == 0 {
            return Err(MimError::OutOfRange("grid dimension must be positive".into()));
        }
        Ok(Self { resolution, dimension })
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    fn denominator(&self) -> usize {
        (1.0 / self.resolution).round().max(2.0) as usize
    }
}

/// Largest input alphabet the loss oracle will enumerate.
const MAX_ORACLE_ALPHABET: usize = 4;
/// Hard cap on grid points, to keep desk-scale runs desk-scale.
const MAX_GRID_POINTS: u128 = 20_000_000;

fn composition_count(n: usize, k: usize) -> u128 {
    // C(n + k - 1, k - 1)
    let mut num: u128 = 1;
    for i in 0..(k - 1) {
        num = num.saturating_mul((n + k - 1 - i) as u128);
    }
    let mut den: u128 = 1;
    for i in 1..k {
        den *= i as u128;
    }
    num / den
}

/// Evaluates `eval` on every composition of `n` into `k` parts that starts
/// with `first`, returning the best `(value, point)` under `better`.
fn scan_compositions<F>(k: usize, n: usize, first: usize, eval: &F) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64,
{
    let scale = 1.0 / n as f64;
    let mut point = vec![0.0; k];
    point[0] = first as f64 * scale;
    let mut best = (f64::NEG_INFINITY, vec![]);
    fill_rest(&mut point, 1, n - first, scale, eval, &mut best);
    best
}

fn fill_rest<F>(
    point: &mut Vec<f64>,
    pos: usize,
    remaining: usize,
    scale: f64,
    eval: &F,
    best: &mut (f64, Vec<f64>),
) where
    F: Fn(&[f64]) -> f64,
{
    if pos == point.len() - 1 {
        point[pos] = remaining as f64 * scale;
        let v = eval(point);
        if v > best.0 {
            *best = (v, point.clone());
        }
        return;
    }
    for c in 0..=remaining {
        point[pos] = c as f64 * scale;
        fill_rest(point, pos + 1, remaining - c, scale, eval, best);
    }
}

/// Exact maximum of the importance loss over the simplex grid, with the
/// maximizing input. Limited to input alphabets of size at most 4.
pub fn grid_max_loss(
    ch: &Channel,
    w: ImportanceParam,
    g: &GridSpec,
) -> Result<(f64, Distribution)> {
    let k = ch.rows();
    if k > MAX_ORACLE_ALPHABET {
        return Err(MimError::OutOfRange(format!(
            "oracle limited to alphabets of size {MAX_ORACLE_ALPHABET}, got {k}"
        )));
    }
    if g.dimension() != k {
        return Err(MimError::ShapeMismatch {
            context: "grid dimension vs channel input alphabet",
            expected: k,
            actual: g.dimension(),
        });
    }
    let n = g.denominator();
    if composition_count(n, k) > MAX_GRID_POINTS {
        return Err(MimError::OutOfRange(format!(
            "grid of {} points exceeds the {MAX_GRID_POINTS} cap; coarsen the resolution",
            composition_count(n, k)
        )));
    }
    let varpi = w.varpi();
    let eval = |px: &[f64]| importance_loss_raw(px, ch, varpi);
    if k == 1 {
        // single-symbol source: the only grid point is the point mass
        return Ok((eval(&[1.0]), Distribution::uniform(1)));
    }

    // parallelize over the first coordinate, enumerate the rest in place
    let (best_val, best_first) = exec::max_by(n + 1, |first| {
        scan_compositions(k, n, first, &eval).0
    })
    .expect("grid is nonempty");
    let (_, point) = scan_compositions(k, n, best_first, &eval);
    Ok((best_val, Distribution::new(point).expect("grid point is on the simplex")))
}

/// One scanned point of the two-parameter rate-distortion search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdGridPoint {
    pub value: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Exact minimum of the importance loss over binary channels meeting the
/// distortion budget with equality, for a Bernoulli(p) source under Hamming
/// distortion.
///
/// The channel is parametrized by its two error probabilities
/// `alpha = p(y_1|x_0)` and `beta = p(y_0|x_1)`, tied by
/// `p alpha + (1-p) beta = D`; the scan walks `alpha` over its feasible
/// interval at the grid resolution.
pub fn grid_min_rd(
    p: f64,
    w: ImportanceParam,
    d_target: f64,
    g: &GridSpec,
) -> Result<RdGridPoint> {
    if !(p > 0.0 && p < 1.0) {
        return Err(MimError::OutOfRange(format!("bernoulli parameter {p} outside (0, 1)")));
    }
    if g.dimension() != 1 {
        return Err(MimError::ShapeMismatch {
            context: "rate-distortion scan is one-dimensional",
            expected: 1,
            actual: g.dimension(),
        });
    }
    let dmax = p.min(1.0 - p);
    if !(0.0..=dmax + 1e-12).contains(&d_target) {
        return Err(MimError::OutOfRange(format!(
            "distortion {d_target} outside the feasible [0, {dmax}]"
        )));
    }
    let alpha_lo = (1.0 + (d_target - 1.0) / p).max(0.0);
    let alpha_hi = (d_target / p).min(1.0);
    let res = g.resolution();
    let steps = ((alpha_hi - alpha_lo) / res).ceil() as usize;
    let varpi = w.varpi();
    let px = [p, 1.0 - p];

    let eval = |i: usize| {
        let alpha = (alpha_lo + i as f64 * res).min(alpha_hi);
        let beta = ((d_target - p * alpha) / (1.0 - p)).clamp(0.0, 1.0);
        let ch = Channel::from_unchecked(2, 2, vec![1.0 - alpha, alpha, beta, 1.0 - beta]);
        importance_loss_raw(&px, &ch, varpi)
    };
    let (value, idx) = exec::min_by(steps + 1, eval).expect("scan is nonempty");
    let alpha = (alpha_lo + idx as f64 * res).min(alpha_hi);
    let beta = ((d_target - p * alpha) / (1.0 - p)).clamp(0.0, 1.0);
    Ok(RdGridPoint { value, alpha, beta })
}

/// Exact maximum of mutual information over the Bernoulli input grid
/// `p in [0, 1/2]`, keeping only inputs whose importance loss stays within
/// the budget. Returns `(rate, argmax p)`.
pub fn grid_max_mi_under_loss(
    ch: &Channel,
    w: ImportanceParam,
    eps: f64,
    g: &GridSpec,
) -> Result<(f64, f64)> {
    if ch.rows() != 2 {
        return Err(MimError::ShapeMismatch {
            context: "constrained-rate oracle needs a binary-input channel",
            expected: 2,
            actual: ch.rows(),
        });
    }
    if g.dimension() != 1 {
        return Err(MimError::ShapeMismatch {
            context: "constrained-rate scan is one-dimensional",
            expected: 1,
            actual: g.dimension(),
        });
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(MimError::OutOfRange(format!("loss budget {eps} must be positive")));
    }
    let res = g.resolution();
    let steps = (0.5 / res).ceil() as usize;
    let varpi = w.varpi();
    let p_at = |i: usize| (i as f64 * res).min(0.5);

    let (rate, idx) = exec::max_by(steps + 1, |i| {
        let p = p_at(i);
        let px = [p, 1.0 - p];
        if importance_loss_raw(&px, ch, varpi) <= eps {
            mutual_information_raw(&px, ch)
        } else {
            f64::NEG_INFINITY
        }
    })
    .expect("scan is nonempty");
    // p = 0 is always feasible (zero loss), so a finite maximum exists
    Ok((rate, p_at(idx)))
}
