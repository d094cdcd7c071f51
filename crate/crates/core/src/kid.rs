//! Kernel Inception Distance.
//!
//! KID is the unbiased U-statistic estimate of squared MMD under the cubic
//! polynomial kernel `k(x, y) = (gamma * <x, y> + coef)^degree`, averaged over
//! random subsets and reported as mean with the population std across subsets.
//!
//! Kernel values of each of the three MMD terms are gathered and summed by
//! [`canonical_sum`], so the estimate is exactly symmetric in `(X, Y)` and
//! exactly invariant to row order. Subsets for repetition `r` come from a
//! [`Pcg32`] seeded with `splitmix64(seed) ^ r`: the X subset is drawn first,
//! then the Y subset, each by partial Fisher-Yates. Repetitions are therefore
//! independent of each other and of scheduling.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::linalg::canonical_sum;
use crate::rng::{repetition_seed, Pcg32};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default))]
pub struct KernelConfig {
    pub degree: u32,
    /// `None` means `1 / dim`.
    pub gamma: Option<f64>,
    pub coef: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { degree: 3, gamma: None, coef: 1.0 }
    }
}

impl KernelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(Error::InvalidConfig("kernel degree must be >= 1".into()));
        }
        if let Some(g) = self.gamma {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::InvalidConfig(format!("kernel gamma must be > 0, got {g}")));
            }
        }
        if !(self.coef.is_finite() && self.coef >= 0.0) {
            return Err(Error::InvalidConfig(format!("kernel coef must be >= 0, got {}", self.coef)));
        }
        Ok(())
    }

    /// Gamma actually used for vectors of length `dim`.
    pub fn gamma_for(&self, dim: usize) -> f64 {
        self.gamma.unwrap_or(1.0 / dim as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default))]
pub struct KidConfig {
    pub subset_size: usize,
    pub n_subsets: usize,
    pub seed: u64,
    pub kernel: KernelConfig,
}

impl Default for KidConfig {
    fn default() -> Self {
        Self { subset_size: 100, n_subsets: 100, seed: 0, kernel: KernelConfig::default() }
    }
}

impl KidConfig {
    pub fn validate(&self) -> Result<()> {
        if self.subset_size < 2 {
            return Err(Error::InvalidConfig("subset_size must be >= 2".into()));
        }
        if self.n_subsets < 1 {
            return Err(Error::InvalidConfig("n_subsets must be >= 1".into()));
        }
        self.kernel.validate()
    }
}

/// KID over `n_subsets` repetitions, reported as mean (population std).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KidEstimate {
    pub mean: f64,
    pub std: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub n_subsets: usize,
    /// Rows drawn from the first set per repetition.
    #[cfg_attr(feature = "serde", serde(default))]
    pub subset_size_x: usize,
    /// Rows drawn from the second set per repetition.
    #[cfg_attr(feature = "serde", serde(default))]
    pub subset_size_y: usize,
}

impl KidEstimate {
    /// Reduces per-repetition values in index order.
    pub fn from_values(values: &[f64], subset_size_x: usize, subset_size_y: usize) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self {
            mean,
            std: libm::sqrt(var),
            n_subsets: values.len(),
            subset_size_x,
            subset_size_y,
        }
    }
}

#[inline]
fn powu(mut base: f64, mut exp: u32) -> f64 {
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

#[inline]
fn dot_f32(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum()
}

/// `(gamma * <x, y> + coef)^degree`, with `gamma` defaulting to `1 / len`.
pub fn poly_kernel(x: &[f64], y: &[f64], cfg: &KernelConfig) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
    }
    if x.is_empty() {
        return Err(Error::Empty("kernel input vectors"));
    }
    cfg.validate()?;
    let gamma = cfg.gamma_for(x.len());
    let d: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    Ok(powu(gamma * d + cfg.coef, cfg.degree))
}

/// Resolved kernel parameters for one dimension.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    gamma: f64,
    coef: f64,
    degree: u32,
}

impl Kernel {
    fn new(cfg: &KernelConfig, dim: usize) -> Self {
        Self { gamma: cfg.gamma_for(dim), coef: cfg.coef, degree: cfg.degree }
    }

    #[inline]
    fn eval(&self, a: &[f32], b: &[f32]) -> f64 {
        powu(self.gamma * dot_f32(a, b) + self.coef, self.degree)
    }
}

fn check_pair(x: &FeatureSet, y: &FeatureSet) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimMismatch { left: x.dim(), right: y.dim() });
    }
    for s in [x, y] {
        if s.count() < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: s.count() });
        }
    }
    Ok(())
}

/// Unbiased MMD² over the rows `xi` of `x` and `yi` of `y`.
fn mmd2_rows(x: &FeatureSet, xi: &[usize], y: &FeatureSet, yi: &[usize], k: Kernel, buf: &mut Vec<f64>) -> f64 {
    let (m, n) = (xi.len(), yi.len());

    let self_term = |s: &FeatureSet, idx: &[usize], buf: &mut Vec<f64>| {
        buf.clear();
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                buf.push(k.eval(s.row(i), s.row(j)));
            }
        }
        let l = idx.len() as f64;
        2.0 * canonical_sum(buf) / (l * (l - 1.0))
    };
    let kxx = self_term(x, xi, buf);
    let kyy = self_term(y, yi, buf);

    buf.clear();
    for &i in xi {
        for &j in yi {
            buf.push(k.eval(x.row(i), y.row(j)));
        }
    }
    let kxy = 2.0 * canonical_sum(buf) / (m as f64 * n as f64);

    (kxx + kyy) - kxy
}

/// Unbiased U-statistic estimate of MMD² between all rows of `x` and `y`.
pub fn mmd2_unbiased(x: &FeatureSet, y: &FeatureSet, kernel: &KernelConfig) -> Result<f64> {
    check_pair(x, y)?;
    kernel.validate()?;
    let xi: Vec<usize> = (0..x.count()).collect();
    let yi: Vec<usize> = (0..y.count()).collect();
    let mut buf = Vec::new();
    Ok(mmd2_rows(x, &xi, y, &yi, Kernel::new(kernel, x.dim()), &mut buf))
}

/// Per-set subset sizes actually drawn: `min(subset_size, count)` for each set.
pub fn effective_subset_sizes(x: &FeatureSet, y: &FeatureSet, cfg: &KidConfig) -> (usize, usize) {
    (cfg.subset_size.min(x.count()), cfg.subset_size.min(y.count()))
}

/// MMD² of repetition `rep` alone. `kid_estimate` is the ordered reduction of
/// `kid_repetition(.., r)` for `r in 0..n_subsets`, which lets callers run
/// repetitions on any number of threads and still get identical results.
pub fn kid_repetition(x: &FeatureSet, y: &FeatureSet, cfg: &KidConfig, rep: u64) -> Result<f64> {
    check_pair(x, y)?;
    cfg.validate()?;
    let (sx, sy) = effective_subset_sizes(x, y, cfg);
    let mut rng = Pcg32::new(repetition_seed(cfg.seed, rep));
    let xi = rng.sample_indices(x.count(), sx);
    let yi = rng.sample_indices(y.count(), sy);
    let mut buf = Vec::with_capacity(sx.max(sy) * sx.max(sy));
    Ok(mmd2_rows(x, &xi, y, &yi, Kernel::new(&cfg.kernel, x.dim()), &mut buf))
}

pub fn kid_estimate(x: &FeatureSet, y: &FeatureSet, cfg: &KidConfig) -> Result<KidEstimate> {
    check_pair(x, y)?;
    cfg.validate()?;
    let values = (0..cfg.n_subsets as u64)
        .map(|r| kid_repetition(x, y, cfg, r))
        .collect::<Result<Vec<_>>>()?;
    let (sx, sy) = effective_subset_sizes(x, y, cfg);
    Ok(KidEstimate::from_values(&values, sx, sy))
}
