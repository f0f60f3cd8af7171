//! Minimal data-parallel dispatch.
//!
//! Batch work in this crate (measure suites, Bloch-grid oracles, divisibility
//! grids) consists of independent evaluations whose results are reassembled
//! in input order, so parallel and sequential execution produce identical
//! output. The `parallel` cargo feature (default on) compiles the rayon
//! path; [`Parallelism`] selects between the two at runtime so benchmarks can
//! compare both from a single build, and so `--jobs 1` style invocations stay
//! strictly sequential.

/// Runtime choice of execution strategy for embarrassingly parallel batches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    /// Plain in-order iteration on the calling thread.
    Sequential,
    /// Dispatch through rayon's global pool (falls back to sequential when
    /// the `parallel` feature is compiled out).
    Rayon,
}

impl Default for Parallelism {
    fn default() -> Self {
        Parallelism::Rayon
    }
}

/// Map `f` over `items`, collecting results in input order.
pub fn map_collect<I, O, F>(items: &[I], par: Parallelism, f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par == Parallelism::Rayon {
        use rayon::prelude::*;
        return items.par_iter().map(&f).collect();
    }
    let _ = par;
    items.iter().map(f).collect()
}

/// Map `f` over an index range `0..n`, collecting results in index order.
pub fn map_range<O, F>(n: usize, par: Parallelism, f: F) -> Vec<O>
where
    O: Send,
    F: Fn(usize) -> O + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par == Parallelism::Rayon {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(&f).collect();
    }
    let _ = par;
    (0..n).map(f).collect()
}
