//! Thin dispatch layer between rayon and sequential iteration.
//!
//! Every call site is data-parallel with order-independent accumulation, so
//! both backends produce bitwise-identical results; the `parallel` feature
//! only changes how the work is scheduled.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Ordered map over a slice.
#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Ordered map over an index range.
#[cfg(feature = "parallel")]
pub(crate) fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Sum `f(i)` elementwise into a `Vec<u64>` histogram of length `buckets`.
/// Addition of counts is exact and commutative, so chunking cannot change
/// the result.
#[cfg(feature = "parallel")]
pub(crate) fn histogram_sum<F>(n: u64, buckets: usize, f: F) -> Vec<u64>
where
    F: Fn(u64) -> usize + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; buckets],
            |mut acc, i| {
                acc[f(i)] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; buckets],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn histogram_sum<F>(n: u64, buckets: usize, f: F) -> Vec<u64>
where
    F: Fn(u64) -> usize,
{
    let mut acc = vec![0u64; buckets];
    for i in 0..n {
        acc[f(i)] += 1;
    }
    acc
}
