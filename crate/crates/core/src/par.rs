//! Order-preserving map over independent work items, backed by rayon when
//! the `parallel` feature is on and by a plain loop otherwise.

use crate::error::Result;

/// How grid points are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// `workers: None` uses the global pool size.
    #[default]
    Parallel,
    ParallelWith {
        workers: usize,
    },
}

impl Execution {
    pub fn from_workers(workers: Option<usize>) -> Self {
        match workers {
            None => Execution::Parallel,
            Some(0) | Some(1) => Execution::Sequential,
            Some(n) => Execution::ParallelWith { workers: n },
        }
    }
}

/// Applies `f` to every item and returns the results in input order.
/// Without the `parallel` feature every mode runs sequentially.
pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Execution::Sequential => Ok(items.iter().map(f).collect()),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            Ok(items.par_iter().map(f).collect())
        }
        #[cfg(feature = "parallel")]
        Execution::ParallelWith { workers } => {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| crate::error::LquError::InvalidConfig(format!("cannot start {workers} workers: {e}")))?;
            Ok(pool.install(|| items.par_iter().map(f).collect()))
        }
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel | Execution::ParallelWith { .. } => Ok(items.iter().map(f).collect()),
    }
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
