//! Ensemble plumbing. Per-path work is pure and results are collected in path
//! order, so the worker count never changes what is computed.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Runs `f` inside a pool of `workers` threads (`None` uses the global pool).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::Usage("worker count must be ≥ 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// `f(i, derive_seed(master, i))` for `i < n_paths`, in index order.
pub fn map_paths<T: Send>(
    master_seed: u64,
    n_paths: usize,
    f: impl Fn(usize, u64) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    (0..n_paths)
        .into_par_iter()
        .map(|i| f(i, derive_seed(master_seed, i as u64)))
        .collect()
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worker_count_does_not_change_results() {
        let run = |w| with_workers(w, || map_paths(9, 50, |i, s| Ok(s.wrapping_mul(i as u64 + 1))).unwrap()).unwrap();
        assert_eq!(run(Some(1)), run(Some(3)));
        assert_eq!(run(None), run(Some(2)));
        assert!(with_workers(Some(0), || ()).is_err());
    }

    #[test]
    fn mean_and_stderr() {
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }
}
