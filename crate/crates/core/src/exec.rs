//! Trial-level execution: rayon when the `parallel` feature is on, a plain
//! loop otherwise or on request.
//!
//! Reductions must be associative and exact (integer sums); the crate never
//! reduces floating-point values across trials, so the schedule cannot change
//! a result.

/// How independent trials are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon's current pool. Falls back to sequential without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// `threads == 1` selects the bit-exact sequential path.
    pub fn from_threads(threads: usize) -> Self {
        if threads == 1 {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }

    /// Maps `f` over `0..n` and folds the results with `combine`.
    pub fn map_reduce<T, F, C>(self, n: u64, identity: T, f: F, combine: C) -> T
    where
        T: Send + Sync + Clone,
        F: Fn(u64) -> T + Sync + Send,
        C: Fn(T, T) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n)
                    .into_par_iter()
                    .map(&f)
                    .reduce(|| identity.clone(), &combine)
            }
            _ => (0..n).map(f).fold(identity, combine),
        }
    }

    /// Like [`map_reduce`](Self::map_reduce) for fallible trials; the error of
    /// the lowest failing index is not guaranteed, only that some error is returned.
    pub fn try_map_reduce<T, E, F, C>(self, n: u64, identity: T, f: F, combine: C) -> Result<T, E>
    where
        T: Send + Sync + Clone,
        E: Send,
        F: Fn(u64) -> Result<T, E> + Sync + Send,
        C: Fn(T, T) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n)
                    .into_par_iter()
                    .map(&f)
                    .try_reduce(|| identity.clone(), |a, b| Ok(combine(a, b)))
            }
            _ => {
                let mut acc = identity;
                for i in 0..n {
                    acc = combine(acc, f(i)?);
                }
                Ok(acc)
            }
        }
    }
}

/// Configures the global rayon pool. Has no effect without the `parallel` feature
/// or when `threads` is 0 (use the hardware count).
pub fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    if threads > 1 {
        // A second call (tests, embedding) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}
