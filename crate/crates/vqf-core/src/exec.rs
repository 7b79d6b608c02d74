//! Deterministic data-parallel helpers.
//!
//! Every parallel site in this crate maps an index range to a vector and
//! reduces it in index order, so results are identical with and without
//! the `parallel` feature (and for any rayon pool size).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `0..count` through `f`, preserving index order in the output.
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Maps items through `f` in parallel, preserving input order.
pub(crate) fn map_items<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
