//! Data-parallel map/reduce primitives with a sequential fallback.
//!
//! Everything hot in this crate (grid scans, multi-start optimizers, sweeps)
//! is an independent evaluation over an index range, so it funnels through
//! these helpers. With the default `parallel` feature the work is spread over
//! a rayon pool; without it the same loops run sequentially. Reductions
//! tie-break on the lower index, so both paths return identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f` on `0..n` and collects results in index order.
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_collect_par(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_collect_seq(n, f)
    }
}

pub fn map_collect_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_collect_par<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Maximizes `f` over `0..n`, returning `(value, index)`.
///
/// Ties resolve to the lowest index; `None` iff `n == 0`.
pub fn max_by<F>(n: usize, f: F) -> Option<(f64, usize)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        max_by_par(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        max_by_seq(n, f)
    }
}

pub fn max_by_seq<F>(n: usize, f: F) -> Option<(f64, usize)>
where
    F: Fn(usize) -> f64,
{
    (0..n).map(|i| (f(i), i)).fold(None, |acc, cand| Some(better_max(acc, cand)))
}

#[cfg(feature = "parallel")]
pub fn max_by_par<F>(n: usize, f: F) -> Option<(f64, usize)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(|i| (f(i), i))
        .fold(|| None, |acc, cand| Some(better_max(acc, cand)))
        .reduce(
            || None,
            |a, b| match (a, b) {
                (Some(a), Some(b)) => Some(better_max(Some(a), b)),
                (x, None) | (None, x) => x,
            },
        )
}

/// Minimizes `f` over `0..n`, returning `(value, index)`; lowest index wins ties.
pub fn min_by<F>(n: usize, f: F) -> Option<(f64, usize)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    max_by(n, |i| -f(i)).map(|(v, i)| (-v, i))
}

pub fn min_by_seq<F>(n: usize, f: F) -> Option<(f64, usize)>
where
    F: Fn(usize) -> f64,
{
    max_by_seq(n, |i| -f(i)).map(|(v, i)| (-v, i))
}

#[cfg(feature = "parallel")]
pub fn min_by_par<F>(n: usize, f: F) -> Option<(f64, usize)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    max_by_par(n, |i| -f(i)).map(|(v, i)| (-v, i))
}

fn better_max(acc: Option<(f64, usize)>, cand: (f64, usize)) -> (f64, usize) {
    match acc {
        None => cand,
        Some(best) => {
            if cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                cand
            } else {
                best
            }
        }
    }
}
