//! Batch evaluation over many points. With the `parallel` feature (default)
//! the batch entry points fan out over rayon; the `_seq` variants always run
//! sequentially and back the benchmark comparison.

use num_complex::Complex64;

use crate::error::Result;
use crate::series::{eval_series, Evaluation, SeriesSolution};

/// Evaluate a solution at each point, sequentially, preserving input order.
pub fn eval_many_seq(sol: &SeriesSolution, zs: &[Complex64]) -> Vec<Result<Evaluation>> {
    zs.iter().map(|&z| eval_series(sol, z)).collect()
}

/// Evaluate a solution at each point, in parallel when the `parallel` feature
/// is enabled; output order matches input order either way.
#[cfg(feature = "parallel")]
pub fn eval_many(sol: &SeriesSolution, zs: &[Complex64]) -> Vec<Result<Evaluation>> {
    use rayon::prelude::*;
    zs.par_iter().map(|&z| eval_series(sol, z)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn eval_many(sol: &SeriesSolution, zs: &[Complex64]) -> Vec<Result<Evaluation>> {
    eval_many_seq(sol, zs)
}

/// Map an indexed job over 0..n, in parallel when available, collecting in
/// index order.
#[cfg(feature = "parallel")]
pub fn par_map_indexed<T: Send, F: Fn(usize) -> T + Send + Sync>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map_indexed<T: Send, F: Fn(usize) -> T + Send + Sync>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}
