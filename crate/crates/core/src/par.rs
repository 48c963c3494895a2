//! Data-parallel helpers. With the `parallel` feature they fan out over rayon;
//! without it they run the same closures sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Smallest `mask < limit` satisfying `pred`.
pub fn find_first_mask<F>(limit: u32, pred: F) -> Option<u32>
where
    F: Fn(&u32) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        // small searches are not worth the scheduling; large ones are split
        // into blocks scanned sequentially so each task does real work
        const BLOCK: u32 = 1 << 12;
        if limit >= BLOCK {
            return (0..limit.div_ceil(BLOCK)).into_par_iter().find_map_first(|block| {
                let start = block * BLOCK;
                (start..limit.min(start + BLOCK)).find(|m| pred(m))
            });
        }
    }
    (0..limit).find(|m| pred(m))
}

/// Always sequential; the benchmark baseline.
pub fn find_first_mask_sequential<F>(limit: u32, pred: F) -> Option<u32>
where
    F: Fn(&u32) -> bool,
{
    (0..limit).find(|m| pred(m))
}

/// `items.map(f)` preserving order.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Always sequential; the benchmark baseline.
pub fn map_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
