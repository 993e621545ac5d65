//! Order-preserving maps over independent work items.
//!
//! Tightening applies Ψ to every slice independently. Implementations may run
//! items in any order or on any number of threads but must return results in
//! input order, which keeps every downstream reduction deterministic.

use alloc::vec::Vec;

pub trait SliceExecutor: Sync {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send;
}

/// Runs every item on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl SliceExecutor for Sequential {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        items.iter().map(f).collect()
    }
}
