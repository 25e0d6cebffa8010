//! Execution mode for the data-parallel loops.
//!
//! With the `parallel` feature disabled, [`Exec::Parallel`] silently runs
//! sequentially, so callers never need their own `cfg` gates.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    pub fn map_range<R, F>(self, range: Range<usize>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }

    /// Map-reduce over an index range. `identity` must be a true identity for `op`.
    pub fn fold_range<R, F, Id, Op>(self, range: Range<usize>, identity: Id, f: F, op: Op) -> R
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
        Id: Fn() -> R + Sync + Send,
        Op: Fn(R, R) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return range.into_par_iter().map(f).reduce(&identity, &op);
        }
        range.map(f).fold(identity(), op)
    }
}
