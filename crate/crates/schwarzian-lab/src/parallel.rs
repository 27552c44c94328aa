//! Data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (default) grid work fans out over a rayon
//! pool; `SCHWARZIAN_LAB_THREADS` caps the worker count. Results are
//! collected in input order, so both code paths produce identical output.

#[cfg(feature = "parallel")]
mod imp {
    use std::sync::OnceLock;

    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();

    fn pool() -> &'static Option<rayon::ThreadPool> {
        POOL.get_or_init(|| {
            std::env::var("SCHWARZIAN_LAB_THREADS")
                .ok()
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&n| n >= 1)
                .map(|n| {
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(n)
                        .build()
                        .expect("failed to build the capped thread pool")
                })
        })
    }

    pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        use rayon::prelude::*;
        match pool() {
            Some(p) => p.install(|| items.par_iter().map(&f).collect()),
            None => items.par_iter().map(&f).collect(),
        }
    }
}

#[cfg(not(feature = "parallel"))]
mod imp {
    pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        items.iter().map(f).collect()
    }
}

pub use imp::par_map;

/// Always-sequential map, kept as the benchmark baseline regardless of the
/// feature set.
pub fn seq_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
