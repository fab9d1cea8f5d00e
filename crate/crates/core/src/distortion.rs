//! The importance distortion function R_w(D): the smallest importance loss a
//! transfer matrix can achieve while keeping average distortion within D.
//!
//! The Bernoulli/Hamming case has a closed form,
//! `R_w(D) = L(w, p) - L(w, D)` with an explicit optimal test channel whose
//! posterior error is exactly D per output symbol. `midf_numeric` solves the
//! general finite case by a quadratic-penalty method over row-stochastic
//! matrices.

use crate::error::{MimError, Result};
use crate::mim::{mim_binary, mim_slice, ImportanceParam};
use crate::optimize::{minimize_blocks, random_simplex_point, OptimizerOptions};
use crate::probability::{output_marginal, Channel, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A nonnegative distortion matrix d(x, y).
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSpec {
    rows: usize,
    cols: usize,
    matrix: Vec<f64>,
}

impl DistortionSpec {
    pub fn new(rows: usize, cols: usize, matrix: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(MimError::OutOfRange("empty distortion matrix".into()));
        }
        if matrix.len() != rows * cols {
            return Err(MimError::ShapeMismatch {
                context: "distortion entries",
                expected: rows * cols,
                actual: matrix.len(),
            });
        }
        if matrix.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(MimError::OutOfRange("distortion entries must be nonnegative".into()));
        }
        Ok(Self { rows, cols, matrix })
    }

    /// Hamming distortion on `n` symbols: 0 on the diagonal, 1 elsewhere.
    pub fn hamming(n: usize) -> Self {
        let mut matrix = vec![1.0; n * n];
        for i in 0..n {
            matrix[i * n + i] = 0.0;
        }
        Self { rows: n, cols: n, matrix }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.cols + j]
    }
}

/// Allowable distortion interval `[D_min, D_max]`: D_min is 0 (the
/// distortionless case) and D_max is the smallest column average
/// `min_j sum_i p_i d(i, j)`, beyond which independence is optimal.
pub fn distortion_domain(px: &Distribution, d: &DistortionSpec) -> Result<(f64, f64)> {
    if px.alphabet_size() != d.rows() {
        return Err(MimError::ShapeMismatch {
            context: "source vs distortion rows",
            expected: d.rows(),
            actual: px.alphabet_size(),
        });
    }
    let dmax = (0..d.cols())
        .map(|j| (0..d.rows()).map(|i| px[i] * d.get(i, j)).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok((0.0, dmax))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdMethod {
    ClosedForm,
    Numeric,
    Endpoint,
}

/// A rate-distortion point: the minimum loss, the channel achieving it, and
/// the distortion it actually incurs.
#[derive(Debug, Clone)]
pub struct RdResult {
    pub rate: f64,
    pub argmin_channel: Channel,
    pub achieved_distortion: f64,
    pub method: RdMethod,
    /// Whether the coefficient respects `w <= 2 min_j p(y_j) / max_i p(x_i)`
    /// on the returned channel (minimum over reachable outputs). Checked
    /// after the fact; a false value marks the result as outside the regime
    /// where the loss interpretation is guaranteed.
    pub varpi_bound_ok: bool,
    pub converged: bool,
}

fn varpi_bound_ok(px: &Distribution, ch: &Channel, w: ImportanceParam) -> bool {
    let py = match output_marginal(px, ch) {
        Ok(py) => py,
        Err(_) => return false,
    };
    let min_reachable = py
        .probs()
        .iter()
        .cloned()
        .filter(|&p| p > 0.0)
        .fold(f64::INFINITY, f64::min);
    w.varpi() <= 2.0 * min_reachable / px.max_prob()
}

fn check_varpi(w: ImportanceParam) -> Result<()> {
    if w.varpi() > 2.0 {
        return Err(MimError::OutOfRange(format!(
            "importance coefficient {} above 2; distortion results need varpi <= 2",
            w.varpi()
        )));
    }
    Ok(())
}

fn check_bernoulli_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(MimError::OutOfRange(format!(
            "bernoulli parameter {p} must lie strictly inside (0, 1)"
        )));
    }
    Ok(())
}

/// The transfer matrix achieving R_w(D) for a Bernoulli(p) source under
/// Hamming distortion:
///
/// ```text
/// [ (1-D)(p-D)/(p(1-2D))    (1-p-D)D/(p(1-2D))     ]
/// [ D(p-D)/((1-p)(1-2D))    (1-p-D)(1-D)/((1-p)(1-2D)) ]
/// ```
///
/// Its posterior puts mass exactly D off the diagonal in each output row, and
/// its average distortion is exactly D. Valid for `0 <= D <= min(p, 1-p)`
/// with `D < 1/2` (the denominator vanishes at D = 1/2).
pub fn optimal_test_channel(p: f64, d_target: f64) -> Result<Channel> {
    check_bernoulli_p(p)?;
    let dmax = p.min(1.0 - p);
    if !(0.0..=dmax + 1e-12).contains(&d_target) {
        return Err(MimError::OutOfRange(format!(
            "distortion {d_target} outside [0, {dmax}]"
        )));
    }
    if d_target >= 0.5 {
        return Err(MimError::OutOfRange(
            "distortion 0.5 is singular for the optimal test channel".into(),
        ));
    }
    // values inside the 1e-12 acceptance band can still overshoot dmax in
    // the last bit, which would flip the sign of p - d
    let d = d_target.clamp(0.0, dmax);
    let den = 1.0 - 2.0 * d;
    Channel::new(
        2,
        2,
        vec![
            (1.0 - d) * (p - d) / (p * den),
            (1.0 - p - d) * d / (p * den),
            d * (p - d) / ((1.0 - p) * den),
            (1.0 - p - d) * (1.0 - d) / ((1.0 - p) * den),
        ],
    )
}

/// Closed-form R_w(D) for a Bernoulli(p) source under Hamming distortion:
/// `R_w(D) = L(w, p) - L(w, D)` on `0 <= D <= min(p, 1-p)`.
pub fn midf_bernoulli_hamming(p: f64, w: ImportanceParam, d_target: f64) -> Result<RdResult> {
    check_varpi(w)?;
    check_bernoulli_p(p)?;
    let dmax = p.min(1.0 - p);
    if !(0.0..=dmax + 1e-12).contains(&d_target) {
        return Err(MimError::OutOfRange(format!(
            "distortion {d_target} outside [0, {dmax}]"
        )));
    }
    let d = d_target.clamp(0.0, dmax);
    let rate = mim_binary(p, w) - mim_binary(d, w);
    let px = Distribution::bernoulli(p).expect("validated");
    // D = 1/2 only happens at p = 1/2, where the optimum degenerates to the
    // rank-1 coin-flip channel
    let argmin_channel = if d >= 0.5 {
        Channel::identical_rows(2, &Distribution::uniform(2))
    } else {
        optimal_test_channel(p, d)?
    };
    let ok = varpi_bound_ok(&px, &argmin_channel, w);
    Ok(RdResult {
        rate,
        argmin_channel,
        achieved_distortion: d,
        method: RdMethod::ClosedForm,
        varpi_bound_ok: ok,
        converged: true,
    })
}

/// Importance loss of a raw (possibly slightly off-simplex) channel matrix
/// under a fixed source.
fn loss_of_channel_raw(px: &[f64], q: &[f64], cols: usize, varpi: f64) -> f64 {
    let n = px.len();
    let mim_value = mim_slice(px, varpi);
    let mut cmim_value = 0.0;
    for j in 0..cols {
        let pyj: f64 = (0..n).map(|i| px[i] * q[i * cols + j]).sum();
        if pyj <= 0.0 {
            continue;
        }
        let row: f64 = (0..n)
            .map(|i| {
                let post = px[i] * q[i * cols + j] / pyj;
                post * (varpi * (1.0 - post)).exp()
            })
            .sum();
        cmim_value += pyj * row;
    }
    mim_value - cmim_value
}

fn average_distortion_raw(px: &[f64], q: &[f64], d: &DistortionSpec) -> f64 {
    let cols = d.cols();
    let mut total = 0.0;
    for (i, &pi) in px.iter().enumerate() {
        for j in 0..cols {
            total += pi * q[i * cols + j] * d.get(i, j);
        }
    }
    total
}

/// A channel with zero average distortion: each input maps to its first
/// zero-distortion column. Errors when some row has none.
fn zero_distortion_channel(d: &DistortionSpec) -> Result<Channel> {
    let mut matrix = vec![0.0; d.rows() * d.cols()];
    for i in 0..d.rows() {
        let j = (0..d.cols())
            .find(|&j| d.get(i, j) == 0.0)
            .ok_or_else(|| {
                MimError::OutOfRange(format!("row {i} has no zero-distortion output"))
            })?;
        matrix[i * d.cols() + j] = 1.0;
    }
    Ok(Channel::new(d.rows(), d.cols(), matrix).expect("rows are point masses"))
}

const PENALTY_ROUNDS: usize = 6;
const PENALTY_INITIAL: f64 = 10.0;

/// Numeric R_w(D) for an arbitrary finite source and distortion matrix.
///
/// Minimizes the importance loss over row-stochastic channels with a
/// quadratic penalty targeting average distortion exactly D (the optimum
/// saturates the budget below D_max), then corrects any residual
/// infeasibility by blending toward a zero-distortion channel. For
/// `D >= D_max` the unconstrained independent (rank-1) solution is returned
/// directly.
pub fn midf_numeric(
    px: &Distribution,
    d: &DistortionSpec,
    d_target: f64,
    w: ImportanceParam,
    opts: &OptimizerOptions,
) -> Result<RdResult> {
    check_varpi(w)?;
    if px.alphabet_size() != d.rows() {
        return Err(MimError::ShapeMismatch {
            context: "source vs distortion rows",
            expected: d.rows(),
            actual: px.alphabet_size(),
        });
    }
    if d_target.is_nan() || d_target < 0.0 {
        return Err(MimError::OutOfRange(format!("distortion budget {d_target} negative")));
    }
    let (_, dmax) = distortion_domain(px, d)?;
    let n = d.rows();
    let m = d.cols();
    let varpi = w.varpi();

    // budget at or above D_max: independence is optimal
    if d_target >= dmax - 1e-12 {
        let best_col = (0..m)
            .map(|j| (0..n).map(|i| px[i] * d.get(i, j)).sum::<f64>())
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(j, _)| j)
            .expect("nonempty");
        let ch = Channel::identical_rows(n, &Distribution::degenerate(m, best_col));
        let rate = crate::mim::importance_loss(px, &ch, w)?.loss;
        let ok = varpi_bound_ok(px, &ch, w);
        return Ok(RdResult {
            rate,
            achieved_distortion: dmax,
            argmin_channel: ch,
            method: RdMethod::Endpoint,
            varpi_bound_ok: ok,
            converged: true,
        });
    }

    // distortionless endpoint
    if d_target == 0.0 {
        let ch = zero_distortion_channel(d)?;
        let rate = crate::mim::importance_loss(px, &ch, w)?.loss;
        let ok = varpi_bound_ok(px, &ch, w);
        return Ok(RdResult {
            rate,
            achieved_distortion: 0.0,
            argmin_channel: ch,
            method: RdMethod::Endpoint,
            varpi_bound_ok: ok,
            converged: true,
        });
    }

    let block_sizes = vec![m; n];
    let pxs = px.probs();

    // diverse starts: zero-distortion, independence on the cheapest column,
    // uniform rows, then random rows
    let mut starts: Vec<Vec<f64>> = Vec::new();
    if let Ok(ch) = zero_distortion_channel(d) {
        starts.push((0..n).flat_map(|i| ch.row(i).to_vec()).collect());
    }
    let best_col = (0..m)
        .map(|j| (0..n).map(|i| px[i] * d.get(i, j)).sum::<f64>())
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .map(|(j, _)| j)
        .unwrap();
    let mut independent = vec![0.0; n * m];
    for i in 0..n {
        independent[i * m + best_col] = 1.0;
    }
    starts.push(independent);
    starts.push(vec![1.0 / m as f64; n * m]);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while starts.len() < opts.starts.max(4) {
        let mut q = Vec::with_capacity(n * m);
        for _ in 0..n {
            q.extend(random_simplex_point(m, &mut rng));
        }
        starts.push(q);
    }

    let mut mu = PENALTY_INITIAL;
    let mut best_x: Option<Vec<f64>> = None;
    let mut converged = true;
    for round in 0..PENALTY_ROUNDS {
        let objective = |q: &[f64]| {
            let gap = average_distortion_raw(pxs, q, d) - d_target;
            loss_of_channel_raw(pxs, q, m, varpi) + mu * gap * gap
        };
        let round_starts: Vec<Vec<f64>> = match &best_x {
            None => starts.clone(),
            Some(warm) => {
                let mut s = vec![warm.clone()];
                s.extend(starts.iter().take(2).cloned());
                s
            }
        };
        let got = minimize_blocks(&block_sizes, &objective, &round_starts, opts);
        if round == PENALTY_ROUNDS - 1 {
            converged = got.converged;
        }
        best_x = Some(got.x);
        mu *= 10.0;
    }
    let mut q = best_x.expect("at least one round ran");

    // pull back inside the budget if the penalty left us slightly above it
    let mut dbar = average_distortion_raw(pxs, &q, d);
    if dbar > d_target {
        if let Ok(zero_ch) = zero_distortion_channel(d) {
            let q0: Vec<f64> = (0..n).flat_map(|i| zero_ch.row(i).to_vec()).collect();
            // average distortion is linear in the channel, so the exact blend
            // weight is available in closed form
            let lambda = ((dbar - d_target) / dbar).clamp(0.0, 1.0);
            for (qi, q0i) in q.iter_mut().zip(&q0) {
                *qi = (1.0 - lambda) * *qi + lambda * q0i;
            }
            dbar = average_distortion_raw(pxs, &q, d);
        }
    }

    let rate = loss_of_channel_raw(pxs, &q, m, varpi);
    let argmin_channel = Channel::new(n, m, q)?;
    let ok = varpi_bound_ok(px, &argmin_channel, w);
    Ok(RdResult {
        rate,
        argmin_channel,
        achieved_distortion: dbar,
        method: RdMethod::Numeric,
        varpi_bound_ok: ok,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: f64) -> ImportanceParam {
        ImportanceParam::new(v).unwrap()
    }

    #[test]
    fn domain_of_bernoulli_hamming() {
        let d = DistortionSpec::hamming(2);
        let px = Distribution::bernoulli(0.3).unwrap();
        assert_eq!(distortion_domain(&px, &d).unwrap(), (0.0, 0.3));
        let px = Distribution::uniform(2);
        assert_eq!(distortion_domain(&px, &d).unwrap(), (0.0, 0.5));
    }

    #[test]
    fn domain_of_ternary_hamming() {
        let d = DistortionSpec::hamming(3);
        let px = Distribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let (lo, hi) = distortion_domain(&px, &d).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 0.5).abs() < 1e-12); // 1 - max p
    }

    #[test]
    fn closed_form_golden_values() {
        // distortionless rates over p at w = 0.2
        let cases = [
            (0.1, 0.0379),
            (0.2, 0.0674),
            (0.3, 0.0884),
            (0.4, 0.1010),
            (0.5, 0.1052),
        ];
        for (p, want) in cases {
            let got = midf_bernoulli_hamming(p, w(0.2), 0.0).unwrap();
            assert!((got.rate - want).abs() < 5e-4, "p={p}: {}", got.rate);
        }
        // turning point: rate hits zero when D = p
        for p in [0.1, 0.25, 0.5] {
            let got = midf_bernoulli_hamming(p, w(0.2), p.min(0.5)).unwrap();
            assert!(got.rate.abs() < 1e-12);
        }
        // direct evaluation
        let got = midf_bernoulli_hamming(0.3, w(0.2), 0.1).unwrap();
        assert!((got.rate - 0.05046477990265852).abs() < 1e-12);
    }

    #[test]
    fn closed_form_rejects_out_of_domain() {
        assert!(midf_bernoulli_hamming(0.3, w(0.2), 0.31).is_err());
        assert!(midf_bernoulli_hamming(0.0, w(0.2), 0.0).is_err());
        assert!(midf_bernoulli_hamming(1.0, w(0.2), 0.0).is_err());
        assert!(midf_bernoulli_hamming(0.3, w(2.5), 0.1).is_err());
    }

    #[test]
    fn test_channel_known_values() {
        let ch = optimal_test_channel(0.3, 0.1).unwrap();
        assert!((ch.get(0, 0) - 0.75).abs() < 1e-12);
        assert!((ch.get(0, 1) - 0.25).abs() < 1e-12);
        assert!((ch.get(1, 0) - 0.03571428571428572).abs() < 1e-12);
        assert!((ch.get(1, 1) - 0.9642857142857143).abs() < 1e-12);
    }

    #[test]
    fn test_channel_identity_at_zero_distortion() {
        for p in [0.2, 0.5, 0.7] {
            let ch = optimal_test_channel(p, 0.0).unwrap();
            assert_eq!(ch.get(0, 0), 1.0);
            assert_eq!(ch.get(1, 1), 1.0);
        }
    }

    #[test]
    fn test_channel_symmetric_source_reduces_to_symmetric_flip() {
        // at p = 1/2 the channel flips with probability exactly D
        for d in [0.2, 0.25, 0.4] {
            let ch = optimal_test_channel(0.5, d).unwrap();
            assert!((ch.get(0, 0) - (1.0 - d)).abs() < 1e-12);
            assert!((ch.get(0, 1) - d).abs() < 1e-12);
            assert!((ch.get(1, 0) - d).abs() < 1e-12);
            assert!((ch.get(1, 1) - (1.0 - d)).abs() < 1e-12);
        }
        assert!(optimal_test_channel(0.5, 0.5).is_err());
    }

    #[test]
    fn test_channel_hits_distortion_exactly() {
        let d = DistortionSpec::hamming(2);
        for (p, dd) in [(0.3, 0.1), (0.4, 0.25), (0.2, 0.19)] {
            let ch = optimal_test_channel(p, dd).unwrap();
            let px = Distribution::bernoulli(p).unwrap();
            let dbar: f64 = (0..2)
                .map(|i| (0..2).map(|j| px[i] * ch.get(i, j) * d.get(i, j)).sum::<f64>())
                .sum();
            assert!((dbar - dd).abs() < 1e-14, "p={p} D={dd}: {dbar}");
        }
    }

    #[test]
    fn numeric_matches_closed_form() {
        let px = Distribution::bernoulli(0.3).unwrap();
        let d = DistortionSpec::hamming(2);
        let got = midf_numeric(&px, &d, 0.1, w(0.2), &OptimizerOptions::default()).unwrap();
        let want = midf_bernoulli_hamming(0.3, w(0.2), 0.1).unwrap();
        assert!(
            (got.rate - want.rate).abs() < 1e-5,
            "numeric {} vs closed {}",
            got.rate,
            want.rate
        );
        assert!(got.achieved_distortion <= 0.1 + 1e-9);
    }

    #[test]
    fn reported_channel_reproduces_rate() {
        use crate::mim::importance_loss;
        let px = Distribution::bernoulli(0.3).unwrap();
        let d = DistortionSpec::hamming(2);
        for (result, label) in [
            (midf_bernoulli_hamming(0.3, w(0.2), 0.12).unwrap(), "closed"),
            (
                midf_numeric(&px, &d, 0.12, w(0.2), &OptimizerOptions::default()).unwrap(),
                "numeric",
            ),
            (
                midf_numeric(&px, &d, 0.4, w(0.2), &OptimizerOptions::default()).unwrap(),
                "endpoint",
            ),
        ] {
            let loss = importance_loss(&px, &result.argmin_channel, w(0.2)).unwrap().loss;
            assert!(
                (loss - result.rate).abs() < 1e-8,
                "{label}: loss {loss} vs rate {}",
                result.rate
            );
            assert!(result.rate >= -1e-10);
        }
    }

    #[test]
    fn numeric_endpoints() {
        let px = Distribution::bernoulli(0.3).unwrap();
        let d = DistortionSpec::hamming(2);
        // D = D_max: zero rate on a rank-1 channel
        let got = midf_numeric(&px, &d, 0.3, w(0.2), &OptimizerOptions::default()).unwrap();
        assert!(got.rate.abs() < 1e-12);
        assert_eq!(got.method, RdMethod::Endpoint);
        // D = 0: full loss
        let got = midf_numeric(&px, &d, 0.0, w(0.2), &OptimizerOptions::default()).unwrap();
        let want = crate::mim::mim(&px, w(0.2)) - 1.0;
        assert!((got.rate - want).abs() < 1e-12);
    }
}
