//! Bounded worker pool.

use rayon::{ThreadPool, ThreadPoolBuilder};

/// Environment variable capping the number of workers.
pub const THREADS_ENV: &str = "SOLITON_FORGE_THREADS";

/// Worker count: the available parallelism, capped by `SOLITON_FORGE_THREADS`.
pub fn worker_count() -> usize {
    let avail = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(cap) if cap > 0 => cap.min(avail),
        _ => avail,
    }
}

pub fn build() -> ThreadPool {
    ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .expect("thread pool")
}
