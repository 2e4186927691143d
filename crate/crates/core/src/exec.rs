//! Data-parallel map helpers. Sweeps over (instance, parameter) grids are
//! embarrassingly parallel; results are collected in task order so parallel
//! and sequential execution produce identical output.

/// Maps `f` over `0..count`, in parallel when the `parallel` feature is on.
/// Output order is by index either way.
#[cfg(feature = "parallel")]
pub fn map_indexed<R: Send, F: Fn(usize) -> R + Sync + Send>(count: usize, f: F) -> Vec<R> {
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<R: Send, F: Fn(usize) -> R + Sync>(count: usize, f: F) -> Vec<R> {
    (0..count).map(f).collect()
}

/// Sequential reference path, available regardless of features; the bench
/// suite compares it against `map_indexed`.
pub fn map_indexed_sequential<R, F: Fn(usize) -> R>(count: usize, f: F) -> Vec<R> {
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let f = |i: usize| (i as f64).sqrt() * 3.0 + i as f64;
        let a = map_indexed(500, f);
        let b = map_indexed_sequential(500, f);
        assert_eq!(a, b);
    }
}
