//! Execution strategy for the crate's data-parallel loops.
//!
//! Every parallel loop in the crate maps an index range to a `Vec` whose
//! order is the index order, so reductions done afterwards are independent
//! of the thread schedule.

/// How independent work items are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the rayon global pool. Without the `parallel` feature this
    /// behaves like [`Execution::Sequential`].
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Evaluates `f(0), …, f(n-1)` and returns the results in index order.
    pub fn map_indexed<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Like [`map_indexed`](Self::map_indexed) over a slice.
    pub fn map_slice<'a, I, T, F>(self, items: &'a [I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&'a I) -> T + Sync + Send,
    {
        self.map_indexed(items.len(), |i| f(&items[i]))
    }
}

/// Configures the global worker pool. A `None` or zero cap leaves rayon's
/// default. Returns `false` if the pool had already been initialised.
pub fn init_threads(cap: Option<usize>) -> bool {
    #[cfg(feature = "parallel")]
    {
        match cap {
            Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .is_ok(),
            _ => true,
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = cap;
        true
    }
}
