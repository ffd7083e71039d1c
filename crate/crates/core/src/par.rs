//! Data-parallel helpers.
//!
//! With the `parallel` feature the helpers fan out over rayon's pool; without
//! it (or after [`set_parallel(false)`](set_parallel)) they run sequentially.
//! Results are identical either way: every helper preserves input order.

use std::sync::atomic::{AtomicBool, Ordering};

static DISABLED: AtomicBool = AtomicBool::new(false);

/// Switch the parallel paths on or off at runtime. Has no effect when the
/// crate is built without the `parallel` feature.
pub fn set_parallel(on: bool) {
    DISABLED.store(!on, Ordering::Relaxed);
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel") && !DISABLED.load(Ordering::Relaxed)
}

/// Order-preserving map.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Order-preserving map over an index range.
pub fn map_range<R, F>(range: std::ops::Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).collect();
    }
    range.map(f).collect()
}

/// First index in `range` (lowest) for which `pred` holds.
pub fn find_first<F>(range: std::ops::Range<usize>, pred: F) -> Option<usize>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return range.into_par_iter().find_first(|&i| pred(i));
    }
    range.into_iter().find(|&i| pred(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved_in_both_modes() {
        let items: Vec<u64> = (0..1000).collect();
        let par = map(&items, |x| x * x);
        set_parallel(false);
        let seq = map(&items, |x| x * x);
        set_parallel(true);
        assert_eq!(par, seq);
        assert_eq!(find_first(0..1000, |i| i * i > 500), Some(23));
    }
}
