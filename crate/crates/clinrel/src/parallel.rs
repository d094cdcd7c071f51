//! Worker-pool helpers. Parallel results are reduced in index order, so they
//! are bit-identical to the sequential routines in `clinrel_core`.

use clinrel_core::kid::{effective_subset_sizes, kid_repetition, KidConfig, KidEstimate};
use clinrel_core::FeatureSet;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const THREADS_ENV: &str = "CLINREL_THREADS";

/// Thread count from `CLINREL_THREADS`; `None` when unset (use all cores).
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got \"{v}\""))),
        },
    }
}

pub fn build_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// [`clinrel_core::kid::kid_estimate`] with repetitions spread over the pool.
pub fn kid_estimate_par(x: &FeatureSet, y: &FeatureSet, cfg: &KidConfig) -> Result<KidEstimate> {
    let values = (0..cfg.n_subsets as u64)
        .into_par_iter()
        .map(|r| kid_repetition(x, y, cfg, r))
        .collect::<Result<Vec<f64>, _>>()?;
    let (sx, sy) = effective_subset_sizes(x, y, cfg);
    Ok(KidEstimate::from_values(&values, sx, sy))
}
