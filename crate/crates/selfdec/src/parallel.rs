//! Switch between rayon and serial execution for the grid sweeps and
//! samplers.
//!
//! With the `parallel` feature enabled (the default) the helpers below use
//! rayon unless the caller is inside a [`sequential`] scope; without the
//! feature they are always serial. Work is split so that reduction order is
//! identical either way: maps preserve index order and samplers fill
//! fixed-size chunks from independent RNG substreams, so results are
//! bit-for-bit the same in both modes.

use std::cell::Cell;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Run `f` with the rayon paths disabled on this thread, e.g. to benchmark
/// the serial implementation against the parallel one in a single build.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    FORCE_SEQUENTIAL.with(|flag| {
        let prev = flag.replace(true);
        let out = f();
        flag.set(prev);
        out
    })
}

/// True when the next helper call on this thread would use rayon.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.with(Cell::get)
}

/// Index-order-preserving map over a slice.
pub(crate) fn map_slice<T, F>(items: &[T], f: F) -> Vec<f64>
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        return items.par_iter().map(&f).collect();
    }
    items.iter().map(&f).collect()
}

/// Build `count` blocks with `make_block(i)` and concatenate them in index
/// order. Used by the samplers, where block i draws from RNG substream i.
pub(crate) fn collect_blocks<F>(count: usize, make_block: F) -> Vec<f64>
where
    F: Fn(usize) -> Vec<f64> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        let blocks: Vec<Vec<f64>> = (0..count).into_par_iter().map(&make_block).collect();
        return blocks.concat();
    }
    let blocks: Vec<Vec<f64>> = (0..count).map(&make_block).collect();
    blocks.concat()
}
