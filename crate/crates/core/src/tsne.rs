//! Exact t-SNE.
//!
//! Gaussian input affinities are calibrated per point by bisection on the
//! precision so that each conditional distribution reaches the target
//! perplexity, then symmetrized. The 2-D embedding minimizes KL(P || Q) with
//! Student-t output affinities by plain momentum gradient descent (no adaptive
//! gains) with early exaggeration. All loops run in index order, so the
//! output depends only on the input and the configuration.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::linalg::Matrix;
use crate::rng::Pcg32;

/// Floor applied to `p_ij` and `q_ij` inside logarithms.
pub const PROB_FLOOR: f64 = 1e-12;

/// Standard deviation of the Gaussian initial layout.
pub const INIT_STD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default))]
pub struct TsneConfig {
    pub perplexity: f64,
    pub max_iter: usize,
    pub exaggeration: f64,
    pub exagg_iters: usize,
    pub learning_rate: f64,
    pub momentum_early: f64,
    pub momentum_late: f64,
    /// First iteration using `momentum_late`.
    pub momentum_switch: usize,
    pub seed: u64,
    pub calib_tol: f64,
    pub calib_max_steps: usize,
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            perplexity: 30.0,
            max_iter: 1000,
            exaggeration: 12.0,
            exagg_iters: 250,
            learning_rate: 200.0,
            momentum_early: 0.5,
            momentum_late: 0.8,
            momentum_switch: 250,
            seed: 0,
            calib_tol: 1e-5,
            calib_max_steps: 64,
        }
    }
}

impl TsneConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("perplexity", self.perplexity),
            ("exaggeration", self.exaggeration),
            ("learning_rate", self.learning_rate),
            ("calib_tol", self.calib_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be > 0, got {v}")));
            }
        }
        for (name, v) in [("momentum_early", self.momentum_early), ("momentum_late", self.momentum_late)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must be in [0, 1), got {v}")));
            }
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidConfig("max_iter must be >= 1".into()));
        }
        if self.calib_max_steps < 1 {
            return Err(Error::InvalidConfig("calib_max_steps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Perplexity used for `n` points: the request capped at `(n - 1) / 3`, but
/// never below 2, and never above `n - 1` (the largest reachable value).
pub fn effective_perplexity(requested: f64, n: usize) -> f64 {
    let n1 = n.saturating_sub(1) as f64;
    requested.min((n1 / 3.0).max(2.0)).min(n1)
}

/// Per-point outcome of the affinity calibration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationReport {
    pub target_perplexity: f64,
    /// Precision `beta_i` of each conditional Gaussian.
    pub beta: Vec<f64>,
    /// Shannon entropy (nats) of each conditional row.
    pub entropy: Vec<f64>,
    /// `false` where the tolerance was not met within the step budget.
    pub converged: Vec<bool>,
}

impl CalibrationReport {
    pub fn achieved_perplexity(&self, i: usize) -> f64 {
        libm::exp(self.entropy[i])
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Affinities {
    /// Symmetric joint affinities with zero diagonal, summing to 1.
    pub p: Matrix,
    pub report: CalibrationReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsneResult {
    /// `n x 2` embedding.
    pub coords: Matrix,
    pub final_kl: f64,
    /// KL(P || Q) of the layout entering each iteration.
    pub kl_trace: Vec<f64>,
    pub calibration: CalibrationReport,
}

/// Squared Euclidean distances between all rows.
pub fn pairwise_sq_dists(x: &FeatureSet) -> Matrix {
    let n = x.count();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let s: f64 = x
                .row(i)
                .iter()
                .zip(x.row(j))
                .map(|(&a, &b)| {
                    let t = f64::from(a) - f64::from(b);
                    t * t
                })
                .sum();
            d.set(i, j, s);
            d.set(j, i, s);
        }
    }
    d
}

/// Fills `row` with `exp(-beta * (D_ij - D_min))` for `j != i` and returns
/// `(sum, entropy)` of the normalized row.
fn conditional_row(dist: &[f64], i: usize, dmin: f64, beta: f64, row: &mut [f64]) -> (f64, f64) {
    let mut sum = 0.0;
    let mut weighted = 0.0;
    for (j, (&dj, r)) in dist.iter().zip(row.iter_mut()).enumerate() {
        if j == i {
            *r = 0.0;
            continue;
        }
        let shifted = dj - dmin;
        let e = libm::exp(-beta * shifted);
        *r = e;
        sum += e;
        weighted += shifted * e;
    }
    let entropy = libm::log(sum) + beta * weighted / sum;
    (sum, entropy)
}

/// Calibrates conditional Gaussians to `cfg.perplexity` (capped for small `n`)
/// and returns the symmetrized joint affinities.
pub fn perplexity_calibration(d: &Matrix, cfg: &TsneConfig) -> Result<Affinities> {
    cfg.validate()?;
    let n = d.rows();
    if n != d.cols() {
        return Err(Error::LengthMismatch { expected: n, got: d.cols() });
    }
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let target = effective_perplexity(cfg.perplexity, n);
    let log_target = libm::log(target);

    let mut cond = Matrix::zeros(n, n);
    let mut report = CalibrationReport {
        target_perplexity: target,
        beta: vec![0.0; n],
        entropy: vec![0.0; n],
        converged: vec![false; n],
    };

    for i in 0..n {
        let dist = d.row(i);
        let others = dist.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v);
        let dmin = others.clone().fold(f64::INFINITY, f64::min);
        let mean_gap = others.map(|v| v - dmin).sum::<f64>() / (n - 1) as f64;
        let mut beta = if mean_gap > 0.0 { 1.0 / mean_gap } else { 1.0 };
        let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);

        let row = cond.row_mut(i);
        let (mut sum, mut entropy) = conditional_row(dist, i, dmin, beta, row);
        for _ in 0..cfg.calib_max_steps {
            if (libm::exp(entropy) - target).abs() < cfg.calib_tol {
                report.converged[i] = true;
                break;
            }
            if entropy > log_target {
                lo = beta;
                beta = if hi.is_infinite() { beta * 2.0 } else { 0.5 * (beta + hi) };
            } else {
                hi = beta;
                beta = 0.5 * (beta + lo);
            }
            (sum, entropy) = conditional_row(dist, i, dmin, beta, row);
        }
        if !report.converged[i] && (libm::exp(entropy) - target).abs() < cfg.calib_tol {
            report.converged[i] = true;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
        report.beta[i] = beta;
        report.entropy[i] = entropy;
    }

    let mut p = Matrix::zeros(n, n);
    let scale = 1.0 / (2.0 * n as f64);
    for i in 0..n {
        for j in i + 1..n {
            let v = (cond.get(i, j) + cond.get(j, i)) * scale;
            p.set(i, j, v);
            p.set(j, i, v);
        }
    }
    Ok(Affinities { p, report })
}

fn check_shapes(p: &Matrix, y: &Matrix) -> Result<()> {
    if p.rows() != p.cols() || p.rows() != y.rows() {
        return Err(Error::LengthMismatch { expected: p.rows(), got: y.rows() });
    }
    Ok(())
}

/// Student-t kernel `w_ij = 1 / (1 + |y_i - y_j|^2)` (zero diagonal) and its
/// off-diagonal sum.
fn student_weights(y: &Matrix) -> (Matrix, f64) {
    let n = y.rows();
    let mut w = Matrix::zeros(n, n);
    let mut half = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let s: f64 = y.row(i).iter().zip(y.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            let v = 1.0 / (1.0 + s);
            w.set(i, j, v);
            w.set(j, i, v);
            half += v;
        }
    }
    (w, 2.0 * half)
}

fn kl_from_weights(p: &Matrix, w: &Matrix, z: f64) -> f64 {
    let n = p.rows();
    let mut kl = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let pij = p.get(i, j);
            if pij == 0.0 {
                continue;
            }
            let qij = w.get(i, j) / z;
            kl += pij * libm::log(pij.max(PROB_FLOOR) / qij.max(PROB_FLOOR));
        }
    }
    kl
}

/// `4 * sum_j (scale * p_ij - q_ij) * w_ij * (y_i - y_j)`.
fn gradient_from_weights(p: &Matrix, y: &Matrix, w: &Matrix, z: f64, scale: f64) -> Matrix {
    let n = p.rows();
    let dims = y.cols();
    let mut g = Matrix::zeros(n, dims);
    for i in 0..n {
        let yi = y.row(i);
        let gi = g.row_mut(i);
        for j in 0..n {
            if i == j {
                continue;
            }
            let wij = w.get(i, j);
            let mult = 4.0 * (scale * p.get(i, j) - wij / z) * wij;
            for (k, gk) in gi.iter_mut().enumerate() {
                *gk += mult * (yi[k] - y.get(j, k));
            }
        }
    }
    g
}

/// `KL(P || Q)` with Student-t `Q` over the layout `y`.
pub fn kl_objective(p: &Matrix, y: &Matrix) -> Result<f64> {
    check_shapes(p, y)?;
    if p.rows() < 2 {
        return Ok(0.0);
    }
    let (w, z) = student_weights(y);
    Ok(kl_from_weights(p, &w, z))
}

/// Analytic gradient of [`kl_objective`] with respect to `y`, for symmetric
/// `P` summing to one.
pub fn kl_gradient(p: &Matrix, y: &Matrix) -> Result<Matrix> {
    check_shapes(p, y)?;
    if p.rows() < 2 {
        return Ok(Matrix::zeros(p.rows(), y.cols()));
    }
    let (w, z) = student_weights(y);
    Ok(gradient_from_weights(p, y, &w, z, 1.0))
}

fn initial_layout(n: usize, seed: u64) -> Matrix {
    let mut rng = Pcg32::new(seed);
    let data = (0..n * 2).map(|_| INIT_STD * rng.next_gaussian()).collect();
    Matrix::from_vec(n, 2, data)
}

fn center(y: &mut Matrix) {
    let n = y.rows() as f64;
    for k in 0..y.cols() {
        let mean = (0..y.rows()).map(|i| y.get(i, k)).sum::<f64>() / n;
        for i in 0..y.rows() {
            y.set(i, k, y.get(i, k) - mean);
        }
    }
}

/// Embeds `x` in two dimensions. Fewer than three points return the seeded
/// initial layout unchanged.
pub fn tsne_embed(x: &FeatureSet, cfg: &TsneConfig) -> Result<TsneResult> {
    cfg.validate()?;
    let n = x.count();
    let mut y = initial_layout(n, cfg.seed);

    if n < 3 {
        let (p, calibration) = if n == 2 {
            let aff = perplexity_calibration(&pairwise_sq_dists(x), cfg)?;
            (aff.p, aff.report)
        } else {
            let empty = CalibrationReport {
                target_perplexity: 0.0,
                beta: vec![0.0],
                entropy: vec![0.0],
                converged: vec![true],
            };
            (Matrix::zeros(1, 1), empty)
        };
        let final_kl = kl_objective(&p, &y)?;
        return Ok(TsneResult { coords: y, final_kl, kl_trace: Vec::new(), calibration });
    }

    let Affinities { p, report } = perplexity_calibration(&pairwise_sq_dists(x), cfg)?;
    let mut update = Matrix::zeros(n, 2);
    let mut kl_trace = Vec::with_capacity(cfg.max_iter);

    for it in 0..cfg.max_iter {
        let scale = if it < cfg.exagg_iters { cfg.exaggeration } else { 1.0 };
        let momentum = if it < cfg.momentum_switch { cfg.momentum_early } else { cfg.momentum_late };

        let (w, z) = student_weights(&y);
        kl_trace.push(kl_from_weights(&p, &w, z));
        let grad = gradient_from_weights(&p, &y, &w, z, scale);

        for ((u, g), yv) in update
            .as_mut_slice()
            .iter_mut()
            .zip(grad.as_slice())
            .zip(y.as_mut_slice())
        {
            *u = momentum * *u - cfg.learning_rate * g;
            *yv += *u;
        }
        center(&mut y);
    }

    let final_kl = kl_objective(&p, &y)?;
    if y.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("t-SNE diverged; lower the learning rate".into()));
    }
    Ok(TsneResult { coords: y, final_kl, kl_trace, calibration: report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_four_five() {
        let x = FeatureSet::from_rows("x", &[[0.0f32, 0.0], [3.0, 4.0]]).unwrap();
        let d = pairwise_sq_dists(&x);
        assert_eq!(d.as_slice(), &[0.0, 25.0, 25.0, 0.0]);
    }

    #[test]
    fn identical_rows_have_zero_distance() {
        let x = FeatureSet::from_rows("x", &[[1.5f32, -2.0]; 4]).unwrap();
        assert!(pairwise_sq_dists(&x).as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn equidistant_triangle_is_uniform() {
        let mut d = Matrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    d.set(i, j, 4.0);
                }
            }
        }
        let cfg = TsneConfig { perplexity: 2.0, ..Default::default() };
        let a = perplexity_calibration(&d, &cfg).unwrap();
        assert_eq!(a.report.target_perplexity, 2.0);
        assert!(a.report.all_converged());
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 0.0 } else { 1.0 / 6.0 };
                assert!((a.p.get(i, j) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn perplexity_cap() {
        assert_eq!(effective_perplexity(30.0, 150), 30.0);
        assert_eq!(effective_perplexity(30.0, 31), 10.0);
        assert_eq!(effective_perplexity(30.0, 4), 2.0);
        assert_eq!(effective_perplexity(2.0, 3), 2.0);
        assert_eq!(effective_perplexity(30.0, 2), 1.0);
    }

    #[test]
    fn two_points_are_degenerate() {
        let p = Matrix::from_vec(2, 2, alloc::vec![0.0, 0.5, 0.5, 0.0]);
        let y = Matrix::from_vec(2, 2, alloc::vec![0.3, -1.0, 2.0, 5.0]);
        assert!(kl_objective(&p, &y).unwrap().abs() < 1e-15);
        assert!(kl_gradient(&p, &y).unwrap().as_slice().iter().all(|g| g.abs() < 1e-15));
    }

    #[test]
    fn coincident_points_have_zero_gradient() {
        let n = 5;
        let mut p = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    p.set(i, j, 1.0 / (n * (n - 1)) as f64);
                }
            }
        }
        let y = Matrix::zeros(n, 2);
        assert!(kl_gradient(&p, &y).unwrap().as_slice().iter().all(|&g| g == 0.0));
        assert!(kl_objective(&p, &y).unwrap().abs() < 1e-12);
    }

    #[test]
    fn small_inputs_return_initial_layout() {
        let x = FeatureSet::from_rows("x", &[[0.0f32, 1.0], [2.0, 3.0]]).unwrap();
        let cfg = TsneConfig::default();
        let r = tsne_embed(&x, &cfg).unwrap();
        assert_eq!(r.coords, initial_layout(2, cfg.seed));
        assert!(r.final_kl.abs() < 1e-15);
        let one = FeatureSet::from_rows("x", &[[0.0f32]]).unwrap();
        assert_eq!(tsne_embed(&one, &cfg).unwrap().coords.rows(), 1);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = TsneConfig { max_iter: 0, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = TsneConfig { momentum_late: 1.0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
