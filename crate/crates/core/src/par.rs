//! Order-preserving data-parallel helpers.
//!
//! With the `parallel` feature (default) these fan out over rayon's global
//! pool; without it they run sequentially. Results are always returned in
//! input order, so callers stay deterministic either way.

use std::cell::Cell;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runtime choice between the parallel and the sequential path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

thread_local! {
    static MODE: Cell<Execution> = const { Cell::new(Execution::Parallel) };
}

/// The execution mode `map` uses on this thread.
pub fn current() -> Execution {
    MODE.with(Cell::get)
}

/// Runs `f` with `map` pinned to `exec` on the calling thread.
///
/// A sequential scope never leaves the calling thread, so it covers every
/// nested `map` as well.
pub fn with_execution<R>(exec: Execution, f: impl FnOnce() -> R) -> R {
    struct Restore(Execution);
    impl Drop for Restore {
        fn drop(&mut self) {
            MODE.with(|m| m.set(self.0));
        }
    }
    let _restore = Restore(MODE.with(|m| m.replace(exec)));
    f()
}

pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_with(current(), items, f)
}

pub fn map_with<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel if items.len() > 1 => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Whether the parallel path is compiled in.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
