//! Multi-start projected-gradient ascent over products of probability
//! simplices, with finite-difference gradients and a coordinate-pair polish.
//!
//! Every numeric solver in the crate (loss capacity, distortion, constrained
//! rate) is a maximization or minimization over one simplex or over the rows
//! of a transfer matrix, so they all share this engine. Objectives must be
//! evaluable on nonnegative vectors slightly off the simplex; the gradient
//! probe perturbs one coordinate at a time.

use crate::exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Knobs shared by all numeric solvers. Also surfaced as CLI flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    /// Iteration cap per start.
    pub max_iters: usize,
    /// Number of starting points (uniform, then vertices, then random).
    pub starts: usize,
    /// Seed for the random starts; runs are deterministic given a seed.
    pub seed: u64,
    /// Stop once the simplex-projected gradient norm drops below this.
    pub tolerance: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            starts: 8,
            seed: 0,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BlockOptimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

/// Euclidean projection onto the probability simplex.
pub(crate) fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumsum += uk;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&vi| (vi - theta).max(0.0)).collect()
}

/// Uniform (Dirichlet(1)) sample from the `k`-simplex.
pub(crate) fn random_simplex_point(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let sum: f64 = v.iter().sum();
    if sum <= 0.0 {
        return vec![1.0 / k as f64; k];
    }
    v.iter_mut().for_each(|e| *e /= sum);
    v
}

/// Standard start set for a single simplex: uniform, the vertices, the
/// prefix-subset uniforms (symmetry-broken landscapes often peak at
/// uniform-over-a-subset points), then seeded random points up to
/// `opts.starts`.
pub(crate) fn simplex_starts(k: usize, opts: &OptimizerOptions) -> Vec<Vec<f64>> {
    let mut starts = vec![vec![1.0 / k as f64; k]];
    for i in 0..k {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        starts.push(v);
    }
    for s in 2..k {
        let mut v = vec![0.0; k];
        v[..s].iter_mut().for_each(|e| *e = 1.0 / s as f64);
        starts.push(v);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while starts.len() < opts.starts.max(2) {
        starts.push(random_simplex_point(k, &mut rng));
    }
    starts
}

fn block_offsets(block_sizes: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(block_sizes.len());
    let mut off = 0;
    for &len in block_sizes {
        out.push((off, len));
        off += len;
    }
    out
}

const FD_STEP: f64 = 1e-6;

fn fd_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &mut [f64], fx: f64) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() {
        let xi = x[i];
        if xi >= FD_STEP {
            x[i] = xi + FD_STEP;
            let fp = f(x);
            x[i] = xi - FD_STEP;
            let fm = f(x);
            g[i] = (fp - fm) / (2.0 * FD_STEP);
        } else {
            // one-sided at the boundary so coordinates stay nonnegative
            x[i] = xi + FD_STEP;
            let fp = f(x);
            g[i] = (fp - fx) / FD_STEP;
        }
        x[i] = xi;
    }
    g
}

fn projected_direction(x: &[f64], g: &[f64], blocks: &[(usize, usize)]) -> Vec<f64> {
    let mut d = vec![0.0; x.len()];
    for &(off, len) in blocks {
        let stepped: Vec<f64> = (0..len).map(|i| x[off + i] + g[off + i]).collect();
        let proj = project_to_simplex(&stepped);
        for i in 0..len {
            d[off + i] = proj[i] - x[off + i];
        }
    }
    d
}

fn ascend_from<F>(
    f: &F,
    start: &[f64],
    blocks: &[(usize, usize)],
    opts: &OptimizerOptions,
) -> BlockOptimum
where
    F: Fn(&[f64]) -> f64,
{
    let mut x: Vec<f64> = Vec::with_capacity(start.len());
    for &(off, len) in blocks {
        x.extend(project_to_simplex(&start[off..off + len]));
    }
    let mut fx = f(&x);
    let mut converged = false;

    for _ in 0..opts.max_iters {
        let g = fd_gradient(f, &mut x, fx);
        let d = projected_direction(&x, &g, blocks);
        let dnorm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if dnorm < opts.tolerance {
            converged = true;
            break;
        }
        let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        // x + t*d is a convex combination of x and the projected target, so
        // every trial point stays on the simplex product
        let mut t = 1.0;
        let mut improved = false;
        while t > 1e-14 {
            let cand: Vec<f64> = x
                .iter()
                .zip(&d)
                .map(|(xi, di)| (xi + t * di).max(0.0))
                .collect();
            let fc = f(&cand);
            if fc > fx + 1e-4 * t * slope {
                x = cand;
                fx = fc;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }

    BlockOptimum { x, value: fx, converged }
}

const POLISH_STEPS: [f64; 6] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7];

/// Hill-climb over coordinate-pair transfers within each block with a
/// shrinking step, refining the ascent result to grid resolution 1e-7.
fn polish<F>(f: &F, x: &mut Vec<f64>, fx: &mut f64, blocks: &[(usize, usize)])
where
    F: Fn(&[f64]) -> f64,
{
    for &step in &POLISH_STEPS {
        loop {
            let mut improved = false;
            for &(off, len) in blocks {
                for j in 0..len {
                    if x[off + j] < step {
                        continue;
                    }
                    for i in 0..len {
                        if i == j {
                            continue;
                        }
                        let mut cand = x.clone();
                        cand[off + i] += step;
                        cand[off + j] -= step;
                        let fc = f(&cand);
                        if fc > *fx {
                            *x = cand;
                            *fx = fc;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
}

/// Maximizes `f` over a product of simplices with the given block sizes,
/// trying every start and polishing the best.
pub(crate) fn maximize_blocks<F>(
    block_sizes: &[usize],
    f: &F,
    starts: &[Vec<f64>],
    opts: &OptimizerOptions,
) -> BlockOptimum
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let blocks = block_offsets(block_sizes);
    assert!(!starts.is_empty());
    let results = exec::map_collect(starts.len(), |s| ascend_from(f, &starts[s], &blocks, opts));
    let (_, best_idx) = exec::max_by_seq(results.len(), |i| results[i].value).unwrap();
    let mut best = results.into_iter().nth(best_idx).unwrap();

    polish(f, &mut best.x, &mut best.value, &blocks);

    if !best.converged {
        // post-polish stationarity check, loose enough to absorb FD noise
        let g = fd_gradient(f, &mut best.x, best.value);
        let d = projected_direction(&best.x, &g, &blocks);
        let dnorm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        best.converged = dnorm < 1e-7;
    }
    best
}

/// Minimizes `f` over a product of simplices; thin wrapper over
/// [`maximize_blocks`] on `-f`.
pub(crate) fn minimize_blocks<F>(
    block_sizes: &[usize],
    f: &F,
    starts: &[Vec<f64>],
    opts: &OptimizerOptions,
) -> BlockOptimum
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let neg = |x: &[f64]| -f(x);
    let mut out = maximize_blocks(block_sizes, &neg, starts, opts);
    out.value = -out.value;
    out
}
