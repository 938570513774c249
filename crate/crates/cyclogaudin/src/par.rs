//! Thin shim over rayon so the data-parallel inner loops (partition/phase
//! sums, commutator trials, multistart Newton) fall back to sequential
//! iteration when the `parallel` feature is disabled.

#[cfg(feature = "parallel")]
use std::sync::OnceLock;

/// Honors `CYCLOGAUDIN_THREADS` the first time any parallel loop runs.
#[cfg(feature = "parallel")]
pub fn init_thread_pool() {
    static INIT: OnceLock<()> = OnceLock::new();
    INIT.get_or_init(|| {
        if let Ok(v) = std::env::var("CYCLOGAUDIN_THREADS") {
            if let Ok(n) = v.parse::<usize>() {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
            }
        }
    });
}

#[cfg(not(feature = "parallel"))]
pub fn init_thread_pool() {}

/// Map each item and fold the results with an associative reduction.
#[cfg(feature = "parallel")]
pub fn map_reduce<T, R, F, I, G>(items: Vec<T>, map: F, identity: I, reduce: G) -> R
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
    I: Fn() -> R + Sync + Send,
    G: Fn(R, R) -> R + Sync + Send,
{
    use rayon::prelude::*;
    init_thread_pool();
    items.into_par_iter().map(map).reduce(&identity, &reduce)
}

#[cfg(not(feature = "parallel"))]
pub fn map_reduce<T, R, F, I, G>(items: Vec<T>, map: F, identity: I, reduce: G) -> R
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
    I: Fn() -> R + Sync + Send,
    G: Fn(R, R) -> R + Sync + Send,
{
    items.into_iter().map(map).fold(identity(), reduce)
}

/// Map items to a Vec, in parallel when enabled, preserving order.
#[cfg(feature = "parallel")]
pub fn map_collect<T, R, F>(items: Vec<T>, map: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    init_thread_pool();
    items.into_par_iter().map(map).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, R, F>(items: Vec<T>, map: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    items.into_iter().map(map).collect()
}
