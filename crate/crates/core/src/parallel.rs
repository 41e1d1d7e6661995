//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the helpers dispatch to rayon;
//! without it they run on the calling thread. Outputs are always assembled in
//! index order and block reductions are folded sequentially, so the numeric
//! result is identical for any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Samples per block in blocked reductions. Fixed so that the reduction tree
/// never depends on the thread count.
pub const BLOCK: usize = 2048;

pub fn num_threads() -> usize {
    #[cfg(feature = "parallel")]
    return rayon::current_num_threads();

    #[cfg(not(feature = "parallel"))]
    return 1;
}

/// `(0..n).map(f).collect()`, evaluated in parallel when enabled.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    return (0..n).into_par_iter().map(f).collect();

    #[cfg(not(feature = "parallel"))]
    return (0..n).map(f).collect();
}

/// Maps over a slice, preserving order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();

    #[cfg(not(feature = "parallel"))]
    return items.iter().map(f).collect();
}

/// Splits `0..n` into blocks of [`BLOCK`], evaluates `partial` on each block
/// (in parallel when enabled) and folds the partials left to right.
pub fn blocked_reduce<T, P, C>(n: usize, identity: T, partial: P, combine: C) -> T
where
    T: Send,
    P: Fn(std::ops::Range<usize>) -> T + Send + Sync,
    C: Fn(T, T) -> T,
{
    let blocks = n.div_ceil(BLOCK);
    let partials = map_indexed(blocks, |b| {
        let start = b * BLOCK;
        partial(start..(start + BLOCK).min(n))
    });
    partials.into_iter().fold(identity, combine)
}

/// Runs `f` on the calling thread with every helper in this module forced
/// sequential, regardless of the feature flag.
pub fn sequential<R: Send, F: FnOnce() -> R + Send>(f: F) -> R {
    with_threads(1, f)
}

/// Runs `f` inside a dedicated pool of `threads` workers. Without the
/// `parallel` feature the thread count is ignored.
pub fn with_threads<R: Send, F: FnOnce() -> R + Send>(threads: usize, f: F) -> R {
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .expect("thread pool");
        pool.install(f)
    }

    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocked_sum_matches_sequential() {
        let n = 3 * BLOCK + 17;
        let f = |r: std::ops::Range<usize>| r.map(|i| (i as f64).sqrt()).sum::<f64>();
        let par = blocked_reduce(n, 0.0, f, |a, b| a + b);
        let seq = sequential(|| blocked_reduce(n, 0.0, f, |a, b| a + b));
        assert_eq!(par.to_bits(), seq.to_bits());
    }

    #[test]
    fn map_preserves_order() {
        let v = map_indexed(1000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }
}
