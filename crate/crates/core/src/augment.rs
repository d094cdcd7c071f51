//! Augmentation experiment: the same classifier is trained on real features
//! alone and on real plus synthetic features, then both are scored on one
//! real test split.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::linalg::Matrix;
use crate::logreg::{train_logreg, LogRegConfig, LogRegModel};
use crate::metrics::{confusion, metrics, stacked_labels, ClassificationReport};

/// Rows with binary labels (1 = positive class).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeatures {
    pub x: Matrix,
    pub y: Vec<u8>,
}

impl LabeledFeatures {
    pub fn empty(dim: usize) -> Self {
        Self { x: Matrix::zeros(0, dim), y: Vec::new() }
    }

    /// Positive rows first, then negative rows, each group in the given order.
    pub fn from_classes(positive: &[&FeatureSet], negative: &[&FeatureSet]) -> Result<Self> {
        let dim = positive
            .iter()
            .chain(negative)
            .map(|s| s.dim())
            .next()
            .ok_or(Error::Empty("no feature sets"))?;
        let mut data = Vec::new();
        let mut counts = [0usize; 2];
        for (group, sets) in [(0, positive), (1, negative)] {
            for s in sets.iter() {
                if s.dim() != dim {
                    return Err(Error::DimMismatch { left: dim, right: s.dim() });
                }
                data.extend(s.data().iter().map(|&v| f64::from(v)));
                counts[group] += s.count();
            }
        }
        let rows = counts[0] + counts[1];
        Ok(Self { x: Matrix::from_vec(rows, dim, data), y: stacked_labels(counts[0], counts[1]) })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    /// `(positive, negative)` counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.y.iter().filter(|&&v| v == 1).count();
        (pos, self.y.len() - pos)
    }

    /// `self` rows followed by `other` rows.
    pub fn stack(&self, other: &LabeledFeatures) -> Result<Self> {
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch { left: self.dim(), right: other.dim() });
        }
        let mut data = self.x.as_slice().to_vec();
        data.extend_from_slice(other.x.as_slice());
        let mut y = self.y.clone();
        y.extend_from_slice(&other.y);
        Ok(Self { x: Matrix::from_vec(y.len(), self.dim(), data), y })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleCounts {
    pub positive: usize,
    pub negative: usize,
}

impl From<(usize, usize)> for SampleCounts {
    fn from((positive, negative): (usize, usize)) -> Self {
        Self { positive, negative }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AugReport {
    pub real_only: ClassificationReport,
    pub real_plus_synth: ClassificationReport,
    pub real_train: SampleCounts,
    pub synthetic_train: SampleCounts,
    pub test: SampleCounts,
}

fn evaluate(model: &LogRegModel, test: &LabeledFeatures) -> Result<ClassificationReport> {
    let pred = model.predict(&test.x)?;
    Ok(metrics(&confusion(&test.y, &pred)?))
}

/// Trains on `real_train`, then on `real_train` followed by `synthetic_train`,
/// and scores both models on `test`.
pub fn augmentation_experiment(
    real_train: &LabeledFeatures,
    synthetic_train: &LabeledFeatures,
    test: &LabeledFeatures,
    cfg: &LogRegConfig,
) -> Result<AugReport> {
    if test.is_empty() {
        return Err(Error::Empty("test split"));
    }
    let (tp, tn) = test.class_counts();
    if tp == 0 || tn == 0 {
        return Err(Error::SingleClass);
    }
    let real_model = train_logreg(&real_train.x, &real_train.y, cfg)?;
    let real_only = evaluate(&real_model, test)?;
    let real_plus_synth = if synthetic_train.is_empty() {
        real_only
    } else {
        let combined = real_train.stack(synthetic_train)?;
        evaluate(&train_logreg(&combined.x, &combined.y, cfg)?, test)?
    };
    Ok(AugReport {
        real_only,
        real_plus_synth,
        real_train: real_train.class_counts().into(),
        synthetic_train: synthetic_train.class_counts().into(),
        test: test.class_counts().into(),
    })
}
