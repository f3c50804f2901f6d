//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the `Parallel` mode runs on rayon; without it
//! both modes run sequentially. Results are always in input order.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
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
        if self.is_parallel() {
            use rayon::prelude::*;
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
        if self.is_parallel() {
            use rayon::prelude::*;
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }

    /// Like [`Exec::map_range`], with one scratch value per worker.
    pub fn map_range_with<S, R, I, F>(self, range: Range<usize>, init: I, f: F) -> Vec<R>
    where
        R: Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return range.into_par_iter().map_init(&init, &f).collect();
        }
        let mut scratch = init();
        range.map(|i| f(&mut scratch, i)).collect()
    }
}

/// Runs `f` on a pool of `threads` workers (the global pool when `None`).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(k) = threads {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            return pool.install(f);
        }
    }
    let _ = threads;
    f()
}
