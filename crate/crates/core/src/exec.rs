//! Fan-out of independent tasks.
//!
//! Estimators split their work into a fixed number of shards, each driven
//! by its own forked [`RngStream`](crate::rng::RngStream). An [`Executor`]
//! only decides where the shards run; results always come back in shard
//! order, so reductions over them do not depend on the worker count.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Evaluates `task(0..count)` and returns the results in index order.
    fn map_indexed<T, F>(&self, count: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs every task on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_indexed<T, F>(&self, count: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(task).collect()
    }
}

/// Number of fixed-size shards needed to cover `total` items.
pub(crate) fn shard_count(total: usize, shard_size: usize) -> usize {
    total.div_ceil(shard_size).max(1)
}
