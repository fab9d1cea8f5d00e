//! Finite distributions, transfer matrices, Bayes posteriors, and the Shannon
//! quantities built on them.
//!
//! All values are immutable after construction and all operations are pure,
//! so everything here is safe to share across threads. Entropies are in bits.

use crate::error::{MimError, Result};

/// Largest |sum - 1| a constructor will silently renormalize away.
const NORMALIZE_TOL: f64 = 1e-9;

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Builds a distribution, renormalizing when the sum deviates from 1 by
    /// at most 1e-9 and rejecting anything worse.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(MimError::InvalidDistribution("empty probability vector".into()));
        }
        let mut probs = probs;
        clean_dust(&mut probs);
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0 || **p > 1.0 + NORMALIZE_TOL) {
            return Err(MimError::InvalidDistribution(format!("entry {p} outside [0, 1]")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZE_TOL {
            return Err(MimError::InvalidDistribution(format!(
                "entries sum to {sum}, too far from 1 to renormalize"
            )));
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(Self { probs })
    }

    /// Uniform distribution over `k` symbols.
    pub fn uniform(k: usize) -> Self {
        assert!(k >= 1, "alphabet must be nonempty");
        Self { probs: vec![1.0 / k as f64; k] }
    }

    /// Two-point distribution `(p, 1-p)`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(MimError::OutOfRange(format!("bernoulli parameter {p} outside [0, 1]")));
        }
        Ok(Self { probs: vec![p, 1.0 - p] })
    }

    /// Point mass on symbol `i` of a `k`-symbol alphabet.
    pub fn degenerate(k: usize, i: usize) -> Self {
        assert!(i < k);
        let mut probs = vec![0.0; k];
        probs[i] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().cloned().fold(0.0, f64::max)
    }

    /// Used internally by solvers that already maintain the simplex invariant.
    pub(crate) fn from_unchecked(probs: Vec<f64>) -> Self {
        Self { probs }
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

/// A row-stochastic transfer matrix p(y|x): `rows` input symbols by `cols`
/// output symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    rows: usize,
    cols: usize,
    matrix: Vec<f64>, // row-major
}

impl Channel {
    /// Builds a channel from row-major entries, renormalizing each row under
    /// the same 1e-9 policy as [`Distribution::new`].
    pub fn new(rows: usize, cols: usize, matrix: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(MimError::InvalidChannel("empty channel".into()));
        }
        if matrix.len() != rows * cols {
            return Err(MimError::ShapeMismatch {
                context: "channel entries",
                expected: rows * cols,
                actual: matrix.len(),
            });
        }
        let mut matrix = matrix;
        clean_dust(&mut matrix);
        for r in 0..rows {
            let row = &mut matrix[r * cols..(r + 1) * cols];
            if let Some(p) = row.iter().find(|p| !p.is_finite() || **p < 0.0 || **p > 1.0 + NORMALIZE_TOL) {
                return Err(MimError::InvalidChannel(format!("row {r} entry {p} outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > NORMALIZE_TOL {
                return Err(MimError::InvalidChannel(format!("row {r} sums to {sum}")));
            }
            row.iter_mut().for_each(|p| *p /= sum);
        }
        Ok(Self { rows, cols, matrix })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != m) {
            return Err(MimError::InvalidChannel("ragged rows".into()));
        }
        Self::new(n, m, rows.into_iter().flatten().collect())
    }

    /// 2x2 symmetric channel: flips each bit with probability `beta_s`.
    pub fn binary_symmetric(beta_s: f64) -> Result<Self> {
        check_unit("beta_s", beta_s)?;
        Self::new(2, 2, vec![1.0 - beta_s, beta_s, beta_s, 1.0 - beta_s])
    }

    /// 2x3 erasure channel: erases to a third symbol with probability `beta_e`.
    pub fn binary_erasure(beta_e: f64) -> Result<Self> {
        check_unit("beta_e", beta_e)?;
        Self::new(2, 3, vec![1.0 - beta_e, 0.0, beta_e, 0.0, 1.0 - beta_e, beta_e])
    }

    /// KxK symmetric channel: keeps a symbol with probability `1 - beta_k`,
    /// otherwise moves uniformly to one of the `k - 1` others.
    ///
    /// Under a uniform input this matrix is its own Bayes posterior, which is
    /// what makes it the forward form of the strongly symmetric family.
    pub fn k_symmetric(k: usize, beta_k: f64) -> Result<Self> {
        if k < 2 {
            return Err(MimError::OutOfRange(format!("k = {k}, need k >= 2")));
        }
        check_unit("beta_k", beta_k)?;
        let off = beta_k / (k - 1) as f64;
        let mut matrix = vec![off; k * k];
        for i in 0..k {
            matrix[i * k + i] = 1.0 - beta_k;
        }
        Self::new(k, k, matrix)
    }

    pub fn identity(n: usize) -> Self {
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            matrix[i * n + i] = 1.0;
        }
        Self { rows: n, cols: n, matrix }
    }

    /// Rank-1 channel: every input maps to the same output distribution,
    /// making output independent of input.
    pub fn identical_rows(rows: usize, out: &Distribution) -> Self {
        let cols = out.alphabet_size();
        let mut matrix = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            matrix.extend_from_slice(out.probs());
        }
        Self { rows, cols, matrix }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row `i` as a slice: the output distribution given input symbol `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.matrix[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.cols + j]
    }

    pub(crate) fn from_unchecked(rows: usize, cols: usize, matrix: Vec<f64>) -> Self {
        Self { rows, cols, matrix }
    }
}

/// Zeroes the negative rounding dust that arithmetic like `p - d` leaves
/// behind when the exact result is 0.
fn clean_dust(values: &mut [f64]) {
    for v in values {
        if *v < 0.0 && *v >= -1e-12 {
            *v = 0.0;
        }
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || !v.is_finite() {
        return Err(MimError::OutOfRange(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

/// Bayes posterior p(x|y) for a source/channel pair, row-indexed by output
/// symbol, together with the output marginal.
///
/// Outputs with zero marginal are unreachable: their rows are all-zero and
/// they contribute nothing to downstream sums.
#[derive(Debug, Clone)]
pub struct Posterior {
    matrix: Vec<f64>, // cols x rows, row-major by output symbol
    output_marginal: Distribution,
    inputs: usize,
}

impl Posterior {
    /// Posterior row for output `j`: the distribution over inputs given `j`.
    pub fn row(&self, j: usize) -> &[f64] {
        &self.matrix[j * self.inputs..(j + 1) * self.inputs]
    }

    pub fn output_marginal(&self) -> &Distribution {
        &self.output_marginal
    }

    pub fn outputs(&self) -> usize {
        self.output_marginal.alphabet_size()
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn is_reachable(&self, j: usize) -> bool {
        self.output_marginal[j] > 0.0
    }
}

fn check_dims(px: &Distribution, ch: &Channel) -> Result<()> {
    if px.alphabet_size() != ch.rows() {
        return Err(MimError::ShapeMismatch {
            context: "input distribution vs channel rows",
            expected: ch.rows(),
            actual: px.alphabet_size(),
        });
    }
    Ok(())
}

/// Output marginal p(y), with p(y_j) = sum_i p(x_i) p(y_j|x_i).
pub fn output_marginal(px: &Distribution, ch: &Channel) -> Result<Distribution> {
    check_dims(px, ch)?;
    Ok(Distribution::from_unchecked(output_marginal_raw(px.probs(), ch)))
}

/// Same product without the Distribution wrapper; tolerates unnormalized
/// nonnegative inputs, which the finite-difference optimizers rely on.
pub(crate) fn output_marginal_raw(px: &[f64], ch: &Channel) -> Vec<f64> {
    let mut py = vec![0.0; ch.cols()];
    for (i, &pi) in px.iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        for (j, &q) in ch.row(i).iter().enumerate() {
            py[j] += pi * q;
        }
    }
    py
}

/// Bayes posterior p(x_i|y_j) = p(x_i) p(y_j|x_i) / p(y_j).
pub fn posterior(px: &Distribution, ch: &Channel) -> Result<Posterior> {
    check_dims(px, ch)?;
    let py = output_marginal_raw(px.probs(), ch);
    let n = ch.rows();
    let m = ch.cols();
    let mut matrix = vec![0.0; m * n];
    for j in 0..m {
        if py[j] == 0.0 {
            continue; // unreachable output, row stays zero
        }
        for i in 0..n {
            matrix[j * n + i] = px[i] * ch.get(i, j) / py[j];
        }
    }
    Ok(Posterior {
        matrix,
        output_marginal: Distribution::from_unchecked(py),
        inputs: n,
    })
}

/// Shannon entropy in bits, with 0 log 0 := 0.
pub fn shannon_entropy(d: &Distribution) -> f64 {
    entropy_slice(d.probs())
}

/// Binary entropy H(p) in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

pub(crate) fn entropy_slice(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// Mutual information I(X;Y) = H(Y) - sum_x p(x) H(Y|X=x), in bits.
pub fn mutual_information(px: &Distribution, ch: &Channel) -> Result<f64> {
    check_dims(px, ch)?;
    Ok(mutual_information_raw(px.probs(), ch))
}

pub(crate) fn mutual_information_raw(px: &[f64], ch: &Channel) -> f64 {
    let py = output_marginal_raw(px, ch);
    let h_y = entropy_slice(&py);
    let h_y_given_x: f64 = px
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| p * entropy_slice(ch.row(i)))
        .sum();
    // cancellation can leave a tiny negative residue
    (h_y - h_y_given_x).max(0.0)
}
