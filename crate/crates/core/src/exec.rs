//! Chunked execution for the simulator.
//!
//! Work is split into fixed-size chunks keyed by index; results are
//! merged in chunk order, so the outcome is identical whether chunks run
//! sequentially or on a thread pool.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How to evaluate independent chunks. `Parallel` uses the current rayon
/// thread pool when the `parallel` feature is enabled and quietly falls
/// back to sequential execution otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    #[default]
    Parallel,
    Sequential,
}

pub(crate) fn map_chunks<T, F>(mode: ExecMode, chunks: u64, body: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..chunks).map(body).collect(),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                (0..chunks).into_par_iter().map(body).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..chunks).map(body).collect()
            }
        }
    }
}
