//! Per-vertex fan-out. Every task is a pure function of its index and the
//! results are gathered back in index order, so outputs do not depend on
//! the number of worker threads.

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon's current thread pool.
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub(crate) fn try_map<T, F>(self, items: &[usize], f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        let results: Vec<Result<T>> = match self {
            Execution::Sequential => items.iter().map(|&i| f(i)).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(|&i| f(i)).collect()
            }
        };
        // first failure in index order, independent of scheduling
        results.into_iter().collect()
    }
}
