//! Binary confusion counts and per-class scores. The positive class (label 1)
//! is the adenoma class; the negative class uses the mirrored counts.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    pub true_pos: usize,
    pub false_neg: usize,
    pub false_pos: usize,
    pub true_neg: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_neg + self.false_pos + self.true_neg
    }
}

pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch { expected: y_true.len(), got: y_pred.len() });
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t != 0, p != 0) {
            (true, true) => cm.true_pos += 1,
            (true, false) => cm.false_neg += 1,
            (false, true) => cm.false_pos += 1,
            (false, false) => cm.true_neg += 1,
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassificationReport {
    pub positive: ClassMetrics,
    pub negative: ClassMetrics,
    pub balanced_accuracy: f64,
    /// Set when any ratio had a zero denominator and was reported as 0.
    pub zero_division: bool,
    pub confusion: ConfusionMatrix,
}

fn ratio(num: usize, den: usize, flag: &mut bool) -> f64 {
    if den == 0 {
        *flag = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn class_metrics(hit: usize, missed: usize, wrong: usize, flag: &mut bool) -> ClassMetrics {
    let precision = ratio(hit, hit + wrong, flag);
    let recall = ratio(hit, hit + missed, flag);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    ClassMetrics { precision, recall, f1, support: hit + missed }
}

pub fn metrics(cm: &ConfusionMatrix) -> ClassificationReport {
    let mut zero_division = false;
    let positive = class_metrics(cm.true_pos, cm.false_neg, cm.false_pos, &mut zero_division);
    let negative = class_metrics(cm.true_neg, cm.false_pos, cm.false_neg, &mut zero_division);
    ClassificationReport {
        positive,
        negative,
        balanced_accuracy: 0.5 * (positive.recall + negative.recall),
        zero_division,
        confusion: *cm,
    }
}

/// Fraction of matching labels.
pub fn accuracy(y_true: &[u8], y_pred: &[u8]) -> f64 {
    let hits = y_true.iter().zip(y_pred).filter(|(a, b)| a == b).count();
    hits as f64 / y_true.len().max(1) as f64
}

/// Label vector with `pos` ones followed by `neg` zeros.
pub fn stacked_labels(pos: usize, neg: usize) -> Vec<u8> {
    let mut y = alloc::vec![1u8; pos];
    y.resize(pos + neg, 0);
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_count() {
        let cm = confusion(&[1, 1, 0], &[1, 0, 0]).unwrap();
        assert_eq!(cm, ConfusionMatrix { true_pos: 1, false_neg: 1, false_pos: 0, true_neg: 1 });
        assert_eq!(cm.total(), 3);
        assert!(confusion(&[1], &[1, 0]).is_err());
    }

    #[test]
    fn perfect_classifier() {
        let r = metrics(&confusion(&[1, 0, 1, 0], &[1, 0, 1, 0]).unwrap());
        for c in [r.positive, r.negative] {
            assert_eq!((c.precision, c.recall, c.f1), (1.0, 1.0, 1.0));
        }
        assert_eq!(r.balanced_accuracy, 1.0);
        assert!(!r.zero_division);
    }

    #[test]
    fn all_negative_predictor() {
        let cm = ConfusionMatrix { true_pos: 0, false_neg: 77, false_pos: 0, true_neg: 36 };
        let r = metrics(&cm);
        assert_eq!(r.positive.recall, 0.0);
        assert_eq!(r.positive.precision, 0.0);
        assert_eq!(r.positive.f1, 0.0);
        assert_eq!(r.negative.recall, 1.0);
        assert_eq!(r.balanced_accuracy, 0.5);
        assert!(r.zero_division);
    }

    #[test]
    fn stacked() {
        assert_eq!(stacked_labels(2, 1), [1, 1, 0]);
        assert_eq!(accuracy(&[1, 0], &[1, 1]), 0.5);
    }
}
