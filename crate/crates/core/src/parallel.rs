//! Index-ordered batch mapping.
//!
//! With the `parallel` feature and `workers > 1`, items run on a dedicated
//! rayon pool of `workers` threads; otherwise they run in order on the
//! calling thread. Results are always returned in index order, and each item
//! sees only its own index, so output never depends on the worker count.

/// True when the crate was built with the `parallel` feature.
pub const PARALLEL: bool = cfg!(feature = "parallel");

#[cfg(feature = "parallel")]
fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .thread_name(|i| format!("keeporig-worker-{i}"))
        .build()
        .expect("thread pool")
}

pub fn map_indexed<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers > 1 && n > 1 {
        use rayon::prelude::*;
        return pool(workers).install(|| (0..n).into_par_iter().map(&f).collect());
    }
    let _ = workers;
    (0..n).map(f).collect()
}

/// Like [`map_indexed`], stopping at an error. The sequential path returns
/// the lowest-index error; the parallel path returns whichever error
/// surfaced first.
pub fn try_map_indexed<T, E, F>(n: usize, workers: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers > 1 && n > 1 {
        use rayon::prelude::*;
        return pool(workers).install(|| (0..n).into_par_iter().map(&f).collect());
    }
    let _ = workers;
    (0..n).map(f).collect()
}
