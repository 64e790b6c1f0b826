//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature these run on rayon; without it they are plain
//! iterator loops. Results never depend on which path ran: callers only use
//! order-preserving maps and associative, commutative reductions.

/// Worker count to use when the caller does not specify one.
pub fn default_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map_collect<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Runs `f` on a pool of exactly `workers` threads (or inline when
/// `workers <= 1` or the `parallel` feature is off).
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if workers > 1 {
            return rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .expect("thread pool")
                .install(f);
        }
    }
    let _ = workers;
    f()
}

/// Sums `f(chunk)` over `0..n` split into `chunks` contiguous ranges.
pub fn sum_over_chunks<F>(n: u64, chunks: u64, f: F) -> u64
where
    F: Fn(std::ops::Range<u64>) -> u64 + Sync + Send,
{
    let chunks = chunks.clamp(1, n.max(1));
    let ranges: Vec<_> = (0..chunks)
        .map(|c| (n * c / chunks)..(n * (c + 1) / chunks))
        .collect();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        ranges.into_par_iter().map(f).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ranges.into_iter().map(f).sum()
    }
}
