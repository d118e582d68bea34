use std::ops::Range;
#[cfg(feature = "parallel")]
use std::sync::Arc;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
use crate::error::Error;
use crate::error::Result;

/// Where independent work items run. Results are always returned in item
/// order, so the choice never changes what a simulation computes.
#[derive(Clone, Default)]
pub enum Executor {
    #[default]
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel(Arc<rayon::ThreadPool>),
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Executor::Sequential => write!(f, "Sequential"),
            #[cfg(feature = "parallel")]
            Executor::Parallel(pool) => write!(f, "Parallel({})", pool.current_num_threads()),
        }
    }
}

impl Executor {
    /// `workers == 1` is sequential; `0` means one worker per core. Without
    /// the `parallel` feature every request is served sequentially.
    pub fn with_workers(workers: usize) -> Result<Self> {
        if workers == 1 {
            return Ok(Executor::Sequential);
        }
        #[cfg(feature = "parallel")]
        {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(Executor::Parallel(Arc::new(pool)))
        }
        #[cfg(not(feature = "parallel"))]
        {
            Ok(Executor::Sequential)
        }
    }

    pub fn workers(&self) -> usize {
        match self {
            Executor::Sequential => 1,
            #[cfg(feature = "parallel")]
            Executor::Parallel(pool) => pool.current_num_threads(),
        }
    }

    pub fn map<T, F>(&self, items: Range<u64>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            Executor::Sequential => items.map(f).collect(),
            #[cfg(feature = "parallel")]
            Executor::Parallel(pool) => pool.install(|| items.into_par_iter().map(f).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let seq = Executor::Sequential.map(0..100, |i| i * i);
        let par = Executor::with_workers(4).unwrap().map(0..100, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);
    }
}
