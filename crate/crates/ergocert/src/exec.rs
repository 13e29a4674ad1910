//! Data-parallel loop helpers.
//!
//! With the default `parallel` feature these dispatch to rayon; without it
//! they fall back to plain sequential loops. Reductions always combine in a
//! fixed binary-tree order so the result is bit-identical regardless of
//! thread schedule — the sequential fallback produces exactly the same
//! floating-point output as the parallel path.

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Tree-shaped map-reduce over `0..n` (`n >= 1`).
///
/// The tree splits at the midpoint at every level, so the merge order is a
/// pure function of `n`.
pub fn tree_reduce<T, L, M>(n: usize, leaf: &L, merge: &M) -> T
where
    T: Send,
    L: Fn(usize) -> T + Sync,
    M: Fn(T, T) -> T + Sync,
{
    assert!(n >= 1);
    reduce_range(0, n, leaf, merge)
}

#[cfg(feature = "parallel")]
fn reduce_range<T, L, M>(lo: usize, hi: usize, leaf: &L, merge: &M) -> T
where
    T: Send,
    L: Fn(usize) -> T + Sync,
    M: Fn(T, T) -> T + Sync,
{
    if hi - lo == 1 {
        return leaf(lo);
    }
    let mid = lo + (hi - lo) / 2;
    let (a, b) = rayon::join(|| reduce_range(lo, mid, leaf, merge), || reduce_range(mid, hi, leaf, merge));
    merge(a, b)
}

#[cfg(not(feature = "parallel"))]
fn reduce_range<T, L, M>(lo: usize, hi: usize, leaf: &L, merge: &M) -> T
where
    T: Send,
    L: Fn(usize) -> T + Sync,
    M: Fn(T, T) -> T + Sync,
{
    if hi - lo == 1 {
        return leaf(lo);
    }
    let mid = lo + (hi - lo) / 2;
    let a = reduce_range(lo, mid, leaf, merge);
    let b = reduce_range(mid, hi, leaf, merge);
    merge(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_reduce_is_index_complete() {
        let total: u64 = tree_reduce(100, &|i| i as u64, &|a, b| a + b);
        assert_eq!(total, 4950);
    }

    #[test]
    fn map_indexed_preserves_order() {
        let v = map_indexed(10, |i| i * i);
        assert_eq!(v, vec![0, 1, 4, 9, 16, 25, 36, 49, 64, 81]);
    }
}
