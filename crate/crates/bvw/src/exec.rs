//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature, maps run on the rayon pool unless
//! [`set_sequential`] was called. Results are always returned in input order,
//! so reductions downstream are deterministic.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Forces sequential execution even when the `parallel` feature is enabled.
pub fn set_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::Relaxed);
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

/// Caps the global worker pool from the `BVW_THREADS` environment variable.
/// Returns the cap that was applied, if any.
pub fn init_from_env() -> Option<usize> {
    let n = std::env::var("BVW_THREADS")
        .ok()?
        .trim()
        .parse::<usize>()
        .ok()?;
    if n == 0 {
        return None;
    }
    if n == 1 {
        set_sequential(true);
    }
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Some(n)
}

pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}
