//! Data-parallel helpers.
//!
//! With the `parallel` feature (the default) the loops below fan out over a
//! rayon pool; without it they run sequentially. Both paths produce results
//! in index order, and callers reduce those results sequentially, so outputs
//! are bit-identical whichever path is compiled in and however many worker
//! threads rayon happens to use.

/// Fixed work-unit size for chunked reductions. Chunk boundaries depend only
/// on this constant, never on thread count.
pub(crate) const CHUNK: usize = 4096;

/// Maps `f` over `0..n`, collecting results in index order.
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Maps `f` over the [`CHUNK`]-sized index ranges covering `0..n`, collecting
/// one accumulator per chunk in chunk order. Callers fold the returned
/// accumulators sequentially.
pub(crate) fn map_chunks<A, F>(n: usize, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(std::ops::Range<usize>) -> A + Sync + Send,
{
    let ranges: Vec<_> = (0..n.div_ceil(CHUNK))
        .map(|c| (c * CHUNK)..((c + 1) * CHUNK).min(n))
        .collect();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        ranges.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ranges.into_iter().map(f).collect()
    }
}
