//! L2-regularized logistic regression on standardized features, fitted by
//! full-batch gradient descent with Armijo backtracking from the origin.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// Per-feature z-scoring fitted on training rows. Zero-variance features keep
/// a unit scale, so they are only shifted by their mean.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn standardize_fit(x: &Matrix) -> Result<Standardizer> {
    let (n, d) = (x.rows(), x.cols());
    if n == 0 {
        return Err(Error::Empty("training matrix"));
    }
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, v) in mean.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut var = vec![0.0; d];
    for i in 0..n {
        for ((s, v), m) in var.iter_mut().zip(x.row(i)).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let std = var
        .into_iter()
        .map(|s| {
            let sd = libm::sqrt(s / n as f64);
            if sd > 0.0 { sd } else { 1.0 }
        })
        .collect();
    Ok(Standardizer { mean, std })
}

impl Standardizer {
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.mean.len() {
            return Err(Error::DimMismatch { left: self.mean.len(), right: x.cols() });
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.mean).zip(&self.std) {
                *v = (*v - m) / s;
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default))]
pub struct LogRegConfig {
    /// Ridge penalty on the weights; the bias is not penalized.
    pub l2: f64,
    pub max_epochs: usize,
    /// Stop once the gradient's infinity norm falls below this.
    pub grad_tol: f64,
    pub init_step: f64,
    pub armijo_c: f64,
    /// Loss weights `[negative, positive]`.
    pub class_weights: Option<[f64; 2]>,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            max_epochs: 2000,
            grad_tol: 1e-6,
            init_step: 1.0,
            armijo_c: 1e-4,
            class_weights: None,
        }
    }
}

impl LogRegConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64, strict: bool| {
            if !v.is_finite() || v < 0.0 || (strict && v == 0.0) {
                Err(Error::InvalidConfig(format!("{name} must be {}, got {v}", if strict { "> 0" } else { ">= 0" })))
            } else {
                Ok(())
            }
        };
        check("l2", self.l2, false)?;
        check("grad_tol", self.grad_tol, true)?;
        check("init_step", self.init_step, true)?;
        check("armijo_c", self.armijo_c, true)?;
        if self.armijo_c >= 1.0 {
            return Err(Error::InvalidConfig("armijo_c must be < 1".into()));
        }
        if let Some(w) = self.class_weights {
            check("class weight", w[0], true)?;
            check("class weight", w[1], true)?;
        }
        if self.max_epochs == 0 {
            return Err(Error::InvalidConfig("max_epochs must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainDiagnostics {
    pub epochs: usize,
    pub converged: bool,
    pub final_grad_inf: f64,
    /// Objective before training and after every accepted step.
    pub loss_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub standardizer: Standardizer,
    pub diagnostics: TrainDiagnostics,
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    z.max(0.0) + libm::log1p(libm::exp(-z.abs()))
}

/// Training objective over already standardized rows:
/// `(1/n) sum_i c_i [log(1 + e^{z_i}) - y_i z_i] + (l2/2) |w|^2`.
#[derive(Debug, Clone, Copy)]
pub struct LogisticObjective<'a> {
    pub x: &'a Matrix,
    pub y: &'a [u8],
    pub l2: f64,
    pub class_weights: [f64; 2],
}

impl<'a> LogisticObjective<'a> {
    pub fn new(x: &'a Matrix, y: &'a [u8], cfg: &LogRegConfig) -> Self {
        Self { x, y, l2: cfg.l2, class_weights: cfg.class_weights.unwrap_or([1.0, 1.0]) }
    }

    pub fn loss(&self, w: &[f64], b: f64) -> f64 {
        let n = self.x.rows() as f64;
        let data: f64 = (0..self.x.rows())
            .map(|i| {
                let z = dot(w, self.x.row(i)) + b;
                let yi = self.y[i];
                self.class_weights[yi as usize] * (softplus(z) - f64::from(yi) * z)
            })
            .sum();
        data / n + 0.5 * self.l2 * dot(w, w)
    }

    /// Gradient `(d/dw, d/db)`.
    pub fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let n = self.x.rows() as f64;
        let mut gw = vec![0.0; w.len()];
        let mut gb = 0.0;
        for i in 0..self.x.rows() {
            let row = self.x.row(i);
            let yi = self.y[i];
            let r = self.class_weights[yi as usize] * (sigmoid(dot(w, row) + b) - f64::from(yi));
            gb += r;
            for (g, v) in gw.iter_mut().zip(row) {
                *g += r * v;
            }
        }
        for (g, wv) in gw.iter_mut().zip(w) {
            *g = *g / n + self.l2 * wv;
        }
        (gw, gb / n)
    }
}

fn check_labels(x: &Matrix, y: &[u8]) -> Result<()> {
    if x.rows() != y.len() {
        return Err(Error::LengthMismatch { expected: x.rows(), got: y.len() });
    }
    if let Some(&bad) = y.iter().find(|&&v| v > 1) {
        return Err(Error::InvalidConfig(format!("labels must be 0 or 1, got {bad}")));
    }
    let pos = y.iter().filter(|&&v| v == 1).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Fits a model on raw features `x` with labels `y` (1 = positive class).
pub fn train_logreg(x: &Matrix, y: &[u8], cfg: &LogRegConfig) -> Result<LogRegModel> {
    cfg.validate()?;
    check_labels(x, y)?;
    let standardizer = standardize_fit(x)?;
    let xs = standardizer.apply(x)?;
    let obj = LogisticObjective::new(&xs, y, cfg);

    let d = x.cols();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut loss = obj.loss(&w, b);
    let mut loss_trace = vec![loss];
    let mut converged = false;
    let mut epochs = 0;
    let mut grad_inf;

    loop {
        let (gw, gb) = obj.gradient(&w, b);
        grad_inf = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()));
        if grad_inf < cfg.grad_tol {
            converged = true;
            break;
        }
        if epochs == cfg.max_epochs {
            break;
        }
        let gsq = dot(&gw, &gw) + gb * gb;
        let mut step = cfg.init_step;
        let mut accepted = None;
        while step > f64::EPSILON * 1e-4 {
            let w_new: Vec<f64> = w.iter().zip(&gw).map(|(wv, g)| wv - step * g).collect();
            let b_new = b - step * gb;
            let l_new = obj.loss(&w_new, b_new);
            if l_new <= loss - cfg.armijo_c * step * gsq {
                accepted = Some((w_new, b_new, l_new));
                break;
            }
            step *= 0.5;
        }
        // No decrease representable at this precision: we are at the minimum.
        let Some((w_new, b_new, l_new)) = accepted else { break };
        w = w_new;
        b = b_new;
        loss = l_new;
        loss_trace.push(loss);
        epochs += 1;
    }

    Ok(LogRegModel {
        weights: w,
        bias: b,
        standardizer,
        diagnostics: TrainDiagnostics { epochs, converged, final_grad_inf: grad_inf, loss_trace },
    })
}

impl LogRegModel {
    /// `w . x' + b` for every row of the raw matrix `x`.
    pub fn decision_function(&self, x: &Matrix) -> Result<Vec<f64>> {
        let xs = self.standardizer.apply(x)?;
        Ok((0..xs.rows()).map(|i| dot(&self.weights, xs.row(i)) + self.bias).collect())
    }

    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        Ok(self.decision_function(x)?.into_iter().map(sigmoid).collect())
    }

    /// Label 1 iff `w . x' + b >= 0`, i.e. `sigmoid >= 0.5`.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<u8>> {
        Ok(self.decision_function(x)?.into_iter().map(|z| u8::from(z >= 0.0)).collect())
    }
}
