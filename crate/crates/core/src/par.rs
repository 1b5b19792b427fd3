//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) the [`Strategy::Parallel`]
//! variant runs on the rayon thread pool; without it every strategy runs
//! sequentially. Results are always returned in input order.

/// How to evaluate independent work items.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    #[default]
    Parallel,
}

impl Strategy {
    /// Whether this strategy actually runs in parallel in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }
}

/// `items.map(f)` in input order.
pub fn map<T, U, F>(strategy: Strategy, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = strategy;
    items.iter().map(f).collect()
}

/// `items.map(f)`, stopping at the first error.
pub fn try_map<T, U, E, F>(strategy: Strategy, items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = strategy;
    items.iter().map(f).collect()
}

/// Index of some item satisfying `f`, preferring the smallest index.
pub fn find_first<T, F>(strategy: Strategy, items: &[T], f: F) -> Option<usize>
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().position_first(f);
    }
    let _ = strategy;
    items.iter().position(f)
}
