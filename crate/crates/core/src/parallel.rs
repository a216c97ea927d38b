//! Thread-pool selection. `GLSCOV_THREADS` caps the worker count; results
//! never depend on it.

pub(crate) fn install<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let threads = std::env::var("GLSCOV_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}
