//! Deterministic data-parallel reductions.
//!
//! Every reduction is split into fixed blocks of [`BLOCK`] indices. Each block
//! is summed sequentially in ascending order and the block partials are then
//! combined in ascending block order. The result therefore depends only on the
//! input, never on the thread count or on whether the `parallel` feature is
//! compiled in.

use std::sync::atomic::{AtomicBool, Ordering};

pub const BLOCK: usize = 256;

static PARALLEL: AtomicBool = AtomicBool::new(true);

/// Runtime switch for the rayon path. Has no effect without the `parallel` feature.
pub fn set_parallel(enabled: bool) {
    PARALLEL.store(enabled, Ordering::Relaxed);
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel") && PARALLEL.load(Ordering::Relaxed)
}

fn block_sum<F: Fn(usize) -> f64>(start: usize, end: usize, f: &F) -> f64 {
    let mut acc = 0.0;
    for i in start..end {
        acc += f(i);
    }
    acc
}

/// `sum_{i < len} f(i)` in the fixed blocked order.
pub fn sum_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let blocks = len.div_ceil(BLOCK);
    let partials = map_indexed(blocks, |b| block_sum(b * BLOCK, ((b + 1) * BLOCK).min(len), &f));
    partials.iter().sum()
}

/// Order-preserving map over `0..len`.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    {
        if parallel_enabled() && len > 1 {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(&f).collect();
        }
    }
    (0..len).map(f).collect()
}

/// Maximum of `f(i)` over `0..len`; `f64::NEG_INFINITY` for an empty range.
pub fn max_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let blocks = len.div_ceil(BLOCK);
    let partials = map_indexed(blocks, |b| {
        let mut m = f64::NEG_INFINITY;
        for i in b * BLOCK..((b + 1) * BLOCK).min(len) {
            m = m.max(f(i));
        }
        m
    });
    partials.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Minimum of `f(i)` over `0..len`; `f64::INFINITY` for an empty range.
pub fn min_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    -max_indexed(len, |i| -f(i))
}
