//! Rayon-backed slice executor.

use bmm_core::SliceExecutor;
use rayon::prelude::*;

/// Runs slice maps on a dedicated thread pool. `collect` on an indexed
/// parallel iterator keeps input order, so results do not depend on the
/// number of workers.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// `None` uses every available core.
    pub fn new(workers: Option<usize>) -> Self {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = workers {
            builder = builder.num_threads(n);
        }
        Self { pool: builder.build().expect("thread pool") }
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl SliceExecutor for RayonExecutor {
    fn map<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(&self, items: &[T], f: F) -> Vec<R> {
        self.pool.install(|| items.par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_order() {
        let items: Vec<u64> = (0..1000).collect();
        let out = RayonExecutor::new(Some(4)).map(&items, |x| x * x);
        assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
    }
}
