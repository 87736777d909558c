//! Node-parallel evaluation with a sequential fallback.
//!
//! Results are always collected in index order and reduced by a fixed
//! pairwise tree, so parallel and sequential runs agree bit for bit.

use std::cell::Cell;

/// Execution policy for [`map`] and [`sum`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

thread_local! {
    static OVERRIDE: Cell<Option<Exec>> = const { Cell::new(None) };
}

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "ALE_LAB_THREADS";

/// Policy in effect on the calling thread.
pub fn current() -> Exec {
    OVERRIDE
        .with(Cell::get)
        .unwrap_or(if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        })
}

/// Runs `f` with the given policy on this thread.
pub fn with_exec<R>(exec: Exec, f: impl FnOnce() -> R) -> R {
    struct Restore(Option<Exec>);
    impl Drop for Restore {
        fn drop(&mut self) {
            OVERRIDE.with(|c| c.set(self.0));
        }
    }
    let _restore = Restore(OVERRIDE.with(|c| c.replace(Some(exec))));
    f()
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    match current() {
        Exec::Sequential => (0..n).map(f).collect(),
        Exec::Parallel => parallel_map(n, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    use rayon::prelude::*;
    pool().install(|| (0..n).into_par_iter().map(f).collect())
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
fn pool() -> &'static rayon::ThreadPool {
    use std::sync::OnceLock;
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = thread_cap() {
            builder = builder.num_threads(n);
        }
        builder.build().expect("thread pool construction")
    })
}

/// Worker cap read from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Fixed-shape pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        xs.iter().fold(0.0, |acc, x| acc + x)
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Sum of `f(0..n)` under the current policy with a deterministic reduction.
pub fn sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    pairwise_sum(&map(n, f))
}

/// Fallible variant of [`sum`]; the first error in index order wins.
pub fn try_sum<E, F>(n: usize, f: F) -> Result<f64, E>
where
    E: Send,
    F: Fn(usize) -> Result<f64, E> + Send + Sync,
{
    let vals = map(n, f).into_iter().collect::<Result<Vec<_>, E>>()?;
    Ok(pairwise_sum(&vals))
}
