//! Directional KID protocol over generator checkpoints.
//!
//! For each checkpoint the synthetic set of each class is compared against the
//! real set of the same class (should be close, lower is better) and against
//! the real set of the other class (should be far, higher is better). A sweep
//! collects one [`ComparisonRow`] per checkpoint and marks, per column, every
//! checkpoint attaining that column's best mean.
//!
//! Column names use the positive/negative pathology convention: `ad` is the
//! positive class, `nonad` the negative one.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::kid::{kid_estimate, KidConfig, KidEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum Column {
    /// Synthetic positive vs. real positive.
    SameAd,
    /// Synthetic positive vs. real negative.
    CrossAd,
    /// Synthetic negative vs. real negative.
    SameNonad,
    /// Synthetic negative vs. real positive.
    CrossNonad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

impl Column {
    pub const ALL: [Column; 4] = [Column::SameAd, Column::CrossAd, Column::SameNonad, Column::CrossNonad];

    pub fn objective(self) -> Objective {
        match self {
            Column::SameAd | Column::SameNonad => Objective::Minimize,
            Column::CrossAd | Column::CrossNonad => Objective::Maximize,
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Column::SameAd => "same_ad",
            Column::CrossAd => "cross_ad",
            Column::SameNonad => "same_nonad",
            Column::CrossNonad => "cross_nonad",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonRow {
    pub iteration: u64,
    pub same_ad: KidEstimate,
    pub cross_ad: KidEstimate,
    pub same_nonad: KidEstimate,
    pub cross_nonad: KidEstimate,
}

impl ComparisonRow {
    pub fn get(&self, col: Column) -> &KidEstimate {
        match col {
            Column::SameAd => &self.same_ad,
            Column::CrossAd => &self.cross_ad,
            Column::SameNonad => &self.same_nonad,
            Column::CrossNonad => &self.cross_nonad,
        }
    }

    pub fn same_class_sum(&self) -> f64 {
        self.same_ad.mean + self.same_nonad.mean
    }

    pub fn cross_class_sum(&self) -> f64 {
        self.cross_ad.mean + self.cross_nonad.mean
    }
}

/// The four feature sets compared at one checkpoint.
#[derive(Debug, Clone, Copy)]
pub struct DirectionalSets<'a> {
    pub real_ad: &'a FeatureSet,
    pub real_nonad: &'a FeatureSet,
    pub synthetic_ad: &'a FeatureSet,
    pub synthetic_nonad: &'a FeatureSet,
}

impl<'a> DirectionalSets<'a> {
    /// `(synthetic, real)` pair behind each column.
    pub fn pair(&self, col: Column) -> (&'a FeatureSet, &'a FeatureSet) {
        match col {
            Column::SameAd => (self.synthetic_ad, self.real_ad),
            Column::CrossAd => (self.synthetic_ad, self.real_nonad),
            Column::SameNonad => (self.synthetic_nonad, self.real_nonad),
            Column::CrossNonad => (self.synthetic_nonad, self.real_ad),
        }
    }
}

/// Four KID estimates with a shared configuration.
pub fn directional_row(iteration: u64, sets: &DirectionalSets<'_>, cfg: &KidConfig) -> Result<ComparisonRow> {
    let est = |col| {
        let (synthetic, real) = sets.pair(col);
        kid_estimate(synthetic, real, cfg)
    };
    Ok(ComparisonRow {
        iteration,
        same_ad: est(Column::SameAd)?,
        cross_ad: est(Column::CrossAd)?,
        same_nonad: est(Column::SameNonad)?,
        cross_nonad: est(Column::CrossNonad)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    rows: Vec<ComparisonRow>,
    markers: [Vec<u64>; 4],
}

impl SweepTable {
    /// Sorts rows by iteration and marks each column's extremum; ties are all
    /// marked. Means are compared exactly.
    pub fn from_rows(mut rows: Vec<ComparisonRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("sweep has no iterations"));
        }
        rows.sort_by_key(|r| r.iteration);
        if rows.windows(2).any(|w| w[0].iteration == w[1].iteration) {
            return Err(Error::InvalidConfig("duplicate iteration in sweep".into()));
        }
        let markers = Column::ALL.map(|col| {
            let means = rows.iter().map(|r| r.get(col).mean);
            let best = match col.objective() {
                Objective::Minimize => means.fold(f64::INFINITY, f64::min),
                Objective::Maximize => means.fold(f64::NEG_INFINITY, f64::max),
            };
            rows.iter()
                .filter(|r| r.get(col).mean == best)
                .map(|r| r.iteration)
                .collect()
        });
        Ok(Self { rows, markers })
    }

    pub fn rows(&self) -> &[ComparisonRow] {
        &self.rows
    }

    /// Iterations marked best in `col`, ascending.
    pub fn markers(&self, col: Column) -> &[u64] {
        &self.markers[col.index()]
    }

    pub fn is_marked(&self, iteration: u64, col: Column) -> bool {
        self.markers(col).contains(&iteration)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionResult {
    pub chosen_iteration: u64,
    pub lambda: f64,
    /// `(iteration, score)` in ascending iteration order.
    pub scores: Vec<(u64, f64)>,
}

impl SelectionResult {
    pub fn score(&self, iteration: u64) -> Option<f64> {
        self.scores.iter().find(|(it, _)| *it == iteration).map(|&(_, s)| s)
    }
}

/// `score = same_class_sum - lambda * cross_class_sum`; lowest score wins,
/// earliest iteration on ties.
pub fn selection_score(row: &ComparisonRow, lambda: f64) -> f64 {
    row.same_class_sum() - lambda * row.cross_class_sum()
}

pub fn select_iteration(table: &SweepTable, lambda: f64) -> SelectionResult {
    let scores: Vec<(u64, f64)> = table
        .rows()
        .iter()
        .map(|r| (r.iteration, selection_score(r, lambda)))
        .collect();
    let mut chosen = scores[0];
    for &s in &scores[1..] {
        if s.1 < chosen.1 {
            chosen = s;
        }
    }
    SelectionResult { chosen_iteration: chosen.0, lambda, scores }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn est(mean: f64) -> KidEstimate {
        KidEstimate { mean, std: 0.0, n_subsets: 1, subset_size_x: 2, subset_size_y: 2 }
    }

    fn row(iteration: u64, m: [f64; 4]) -> ComparisonRow {
        ComparisonRow {
            iteration,
            same_ad: est(m[0]),
            cross_ad: est(m[1]),
            same_nonad: est(m[2]),
            cross_nonad: est(m[3]),
        }
    }

    #[test]
    fn single_iteration_is_marked_everywhere() {
        let t = SweepTable::from_rows(vec![row(500, [0.1, 0.2, 0.3, 0.4])]).unwrap();
        for c in Column::ALL {
            assert_eq!(t.markers(c), &[500]);
        }
        assert_eq!(select_iteration(&t, 1.0).chosen_iteration, 500);
    }

    #[test]
    fn ties_mark_all_and_selection_prefers_earlier() {
        let t = SweepTable::from_rows(vec![
            row(2000, [0.1, 0.5, 0.2, 0.4]),
            row(1000, [0.1, 0.5, 0.2, 0.4]),
        ])
        .unwrap();
        assert_eq!(t.rows()[0].iteration, 1000);
        for c in Column::ALL {
            assert_eq!(t.markers(c), &[1000, 2000]);
        }
        assert_eq!(select_iteration(&t, 1.0).chosen_iteration, 1000);
    }

    #[test]
    fn rejects_empty_and_duplicate() {
        assert!(SweepTable::from_rows(vec![]).is_err());
        assert!(SweepTable::from_rows(vec![row(1, [0.0; 4]), row(1, [0.0; 4])]).is_err());
    }

    #[test]
    fn directional_row_on_duplicated_reals_is_zero_same_class() {
        let ad = FeatureSet::from_rows("ad", &[[1.0f32, 0.5], [1.0, 0.5]]).unwrap();
        let nonad = FeatureSet::from_rows("nonad", &[[-1.0f32, 2.0], [-1.0, 2.0]]).unwrap();
        let sets = DirectionalSets { real_ad: &ad, real_nonad: &nonad, synthetic_ad: &ad, synthetic_nonad: &nonad };
        let r = directional_row(3, &sets, &KidConfig::default()).unwrap();
        assert_eq!(r.same_ad.mean, 0.0);
        assert_eq!(r.same_nonad.mean, 0.0);
        assert!(r.cross_ad.mean > 0.0 && r.cross_nonad.mean > 0.0);
    }
}
