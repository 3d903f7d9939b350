//! Execution strategy for the embarrassingly parallel sweeps.
//!
//! With the `parallel` feature (default) the `Threads` variant fans work out
//! over a rayon pool; without it every strategy degrades to the sequential
//! path. Mapping preserves input order, so results are identical for any
//! thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    Threads(usize),
}

impl Parallelism {
    /// One worker per logical CPU.
    pub fn available() -> Self {
        let n = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1);
        Parallelism::Threads(n)
    }
}

/// Runs `f`, installing a dedicated thread pool for `Threads(k)`.
#[cfg(feature = "parallel")]
pub fn with_pool<R: Send>(pll: Parallelism, f: impl FnOnce() -> R + Send) -> R {
    match pll {
        Parallelism::Sequential => f(),
        Parallelism::Threads(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
            .install(f),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_pool<R: Send>(_pll: Parallelism, f: impl FnOnce() -> R + Send) -> R {
    f()
}

/// Order-preserving map over a slice; parallel inside the ambient pool when
/// requested and available.
#[cfg(feature = "parallel")]
pub fn map_collect<T: Sync, R: Send>(
    items: &[T],
    pll: Parallelism,
    f: impl Fn(&T) -> R + Sync + Send,
) -> Vec<R> {
    match pll {
        Parallelism::Sequential => items.iter().map(f).collect(),
        Parallelism::Threads(_) => items.par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T: Sync, R: Send>(
    items: &[T],
    _pll: Parallelism,
    f: impl Fn(&T) -> R + Sync + Send,
) -> Vec<R> {
    items.iter().map(f).collect()
}
