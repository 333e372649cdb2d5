//! Index-parallel map with a sequential fallback.
//!
//! Results are always collected in index order, so output never depends on
//! the number of worker threads.

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    /// Parallel when the `parallel` feature is enabled, sequential otherwise.
    #[default]
    Auto,
    Sequential,
}

/// `(0..len).map(f)` evaluated under `mode`, collected in index order.
pub fn map_indexed<T, F>(len: usize, mode: Execution, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Execution::Auto => {
            use rayon::prelude::*;
            (0..len).into_par_iter().map(f).collect()
        }
        _ => (0..len).map(f).collect(),
    }
}
