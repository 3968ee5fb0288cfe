use rayon::prelude::*;

use crate::{Error, Result};

/// Fixed-size worker pool that splits replica indices into contiguous ranges, one per thread,
/// and returns results in replica order.
#[derive(Clone, Debug)]
pub struct Pool {
    threads: usize,
}

impl Pool {
    pub fn new(threads: usize) -> Self {
        Pool { threads: threads.max(1) }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn map<T, F>(&self, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync,
    {
        if self.threads == 1 || count <= 1 {
            return (0..count).map(&f).collect();
        }
        let parts = self.threads.min(count);
        let chunk = count.div_ceil(parts);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parts)
            .build()
            .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
        let chunks: Vec<Result<Vec<T>>> = pool.install(|| {
            (0..parts)
                .into_par_iter()
                .map(|c| (c * chunk..((c + 1) * chunk).min(count)).map(&f).collect())
                .collect()
        });
        let mut out = Vec::with_capacity(count);
        for c in chunks {
            out.extend(c?);
        }
        Ok(out)
    }
}
