//! Registry-level operations: resolving the data roles each evaluation needs
//! and running the directional sweep, t-SNE and augmentation experiment.
//!
//! Roles, for class `c`:
//! * real reference for KID and t-SNE: real entries of `c` not marked `test`;
//! * synthetic at iteration `i`: synthetic entries of `c` with `iteration == i`;
//! * classifier training: real entries of `c` marked `train`, plus synthetic
//!   entries of `c` at the augmentation iteration not marked `test`;
//! * classifier test: real entries of `c` marked `test`.
//!
//! Several entries filling one role are stacked in manifest order.

use std::collections::BTreeSet;

use clinrel_core::augment::{augmentation_experiment, AugReport, LabeledFeatures};
use clinrel_core::kid::KidConfig;
use clinrel_core::logreg::LogRegConfig;
use clinrel_core::protocol::{Column, ComparisonRow, DirectionalSets, SweepTable};
use clinrel_core::tsne::{tsne_embed, TsneConfig, TsneResult};
use clinrel_core::FeatureSet;
use rayon::prelude::*;

use crate::config::ClassNames;
use crate::error::{Error, Result};
use crate::parallel::kid_estimate_par;
use crate::registry::{DatasetEntry, DatasetRegistry, FeatureStore, Source, Split};

/// Per-point provenance used to style scatter plots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointLabel {
    pub source: Source,
    pub class: String,
}

/// A registry with its feature sets loaded.
#[derive(Debug, Clone)]
pub struct Workspace {
    registry: DatasetRegistry,
    store: FeatureStore,
    classes: ClassNames,
}

impl Workspace {
    pub fn open(registry: DatasetRegistry, classes: ClassNames) -> Result<Self> {
        let store = registry.load_all()?;
        Ok(Self { registry, store, classes })
    }

    pub fn registry(&self) -> &DatasetRegistry {
        &self.registry
    }

    pub fn classes(&self) -> &ClassNames {
        &self.classes
    }

    pub fn store(&self) -> &FeatureStore {
        &self.store
    }

    fn entries(&self, pred: impl Fn(&DatasetEntry) -> bool) -> Vec<&DatasetEntry> {
        self.registry.entries().iter().filter(|e| pred(e)).collect()
    }

    fn stack_role(&self, name: String, entries: Vec<&DatasetEntry>) -> Result<FeatureSet> {
        if entries.is_empty() {
            return Err(Error::MissingRole(format!("no {name}")));
        }
        self.store.stack(&name, &entries)
    }

    pub fn real_reference(&self, class: &str) -> Result<FeatureSet> {
        let e = self.entries(|e| e.source == Source::Real && e.class_label == class && e.split != Split::Test);
        self.stack_role(format!("real/{class}"), e)
    }

    pub fn synthetic_at(&self, class: &str, iteration: u64) -> Result<FeatureSet> {
        let e = self.entries(|e| e.source == Source::Synthetic && e.class_label == class && e.iteration == Some(iteration));
        self.stack_role(format!("synthetic/{class}@{iteration}"), e)
    }

    fn real_split(&self, class: &str, split: Split) -> Result<FeatureSet> {
        let e = self.entries(|e| e.source == Source::Real && e.class_label == class && e.split == split);
        let tag = if split == Split::Train { "train" } else { "test" };
        self.stack_role(format!("real/{class} {tag} split"), e)
    }

    fn synthetic_train(&self, class: &str, iteration: u64) -> Vec<&DatasetEntry> {
        self.entries(|e| {
            e.source == Source::Synthetic
                && e.class_label == class
                && e.iteration == Some(iteration)
                && e.split != Split::Test
        })
    }

    /// Synthetic iterations available for both classes, ascending. Fails if a
    /// synthetic entry of either class has no iteration.
    pub fn synthetic_iterations(&self) -> Result<Vec<u64>> {
        let mut per_class = [BTreeSet::new(), BTreeSet::new()];
        for e in self.registry.entries() {
            let slot = if e.class_label == self.classes.positive {
                0
            } else if e.class_label == self.classes.negative {
                1
            } else {
                continue;
            };
            if e.source != Source::Synthetic {
                continue;
            }
            let it = e
                .iteration
                .ok_or_else(|| Error::MissingRole(format!("synthetic entry \"{}\" has no iteration", e.id)))?;
            per_class[slot].insert(it);
        }
        Ok(per_class[0].intersection(&per_class[1]).copied().collect())
    }

    /// Iterations to sweep: the configured list, or every synthetic iteration.
    pub fn sweep_iterations(&self, configured: &[u64]) -> Result<Vec<u64>> {
        let found = self.synthetic_iterations()?;
        if configured.is_empty() {
            if found.is_empty() {
                return Err(Error::MissingRole("no synthetic iterations in manifest".into()));
            }
            return Ok(found);
        }
        let mut its = configured.to_vec();
        its.sort_unstable();
        its.dedup();
        Ok(its)
    }

    /// Four directional KID estimates at one checkpoint.
    pub fn directional_matrix(&self, iteration: u64, cfg: &KidConfig) -> Result<ComparisonRow> {
        let ClassNames { positive, negative } = &self.classes;
        let real_ad = self.real_reference(positive)?;
        let real_nonad = self.real_reference(negative)?;
        let synthetic_ad = self.synthetic_at(positive, iteration)?;
        let synthetic_nonad = self.synthetic_at(negative, iteration)?;
        let sets = DirectionalSets {
            real_ad: &real_ad,
            real_nonad: &real_nonad,
            synthetic_ad: &synthetic_ad,
            synthetic_nonad: &synthetic_nonad,
        };
        let est: Vec<_> = Column::ALL
            .par_iter()
            .map(|&col| {
                let (synthetic, real) = sets.pair(col);
                kid_estimate_par(synthetic, real, cfg)
            })
            .collect::<Result<_>>()?;
        Ok(ComparisonRow { iteration, same_ad: est[0], cross_ad: est[1], same_nonad: est[2], cross_nonad: est[3] })
    }

    pub fn iteration_sweep(&self, iterations: &[u64], cfg: &KidConfig) -> Result<SweepTable> {
        if iterations.is_empty() {
            return Err(Error::Config("empty iteration list".into()));
        }
        cfg.validate()?;
        let rows = iterations
            .par_iter()
            .map(|&it| self.directional_matrix(it, cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(SweepTable::from_rows(rows)?)
    }

    /// Real positive, real negative, synthetic positive and synthetic negative
    /// points of one checkpoint, stacked in that order.
    pub fn tsne_inputs(&self, iteration: u64) -> Result<(FeatureSet, Vec<PointLabel>)> {
        let ClassNames { positive, negative } = &self.classes;
        let parts = [
            (Source::Real, positive, self.real_reference(positive)?),
            (Source::Real, negative, self.real_reference(negative)?),
            (Source::Synthetic, positive, self.synthetic_at(positive, iteration)?),
            (Source::Synthetic, negative, self.synthetic_at(negative, iteration)?),
        ];
        stack_labeled(&format!("tsne@{iteration}"), &parts)
    }

    /// Points of the listed entries, in the given order.
    pub fn tsne_inputs_for(&self, ids: &[String]) -> Result<(FeatureSet, Vec<PointLabel>)> {
        let mut parts = Vec::with_capacity(ids.len());
        for id in ids {
            let e = self
                .registry
                .entry(id)
                .ok_or_else(|| Error::MissingRole(format!("unknown entry id \"{id}\"")))?;
            parts.push((e.source, &e.class_label, self.store.stack(id, &[e])?));
        }
        if parts.is_empty() {
            return Err(Error::Config("no entries given".into()));
        }
        stack_labeled("tsne", &parts)
    }

    pub fn tsne(&self, iteration: u64, cfg: &TsneConfig) -> Result<(TsneResult, Vec<PointLabel>)> {
        let (x, labels) = self.tsne_inputs(iteration)?;
        Ok((tsne_embed(&x, cfg)?, labels))
    }

    /// Real-only vs. real+synthetic classifier; `iteration = None` trains the
    /// second run without synthetic data.
    pub fn augmentation(&self, iteration: Option<u64>, cfg: &LogRegConfig) -> Result<AugReport> {
        let ClassNames { positive, negative } = &self.classes;
        let train = LabeledFeatures::from_classes(
            &[&self.real_split(positive, Split::Train)?],
            &[&self.real_split(negative, Split::Train)?],
        )?;
        let test = LabeledFeatures::from_classes(
            &[&self.real_split(positive, Split::Test)?],
            &[&self.real_split(negative, Split::Test)?],
        )?;
        let synthetic = match iteration {
            None => LabeledFeatures::empty(train.dim()),
            Some(it) => {
                let pos = self.synthetic_train(positive, it);
                let neg = self.synthetic_train(negative, it);
                if pos.is_empty() && neg.is_empty() {
                    return Err(Error::MissingRole(format!("no synthetic training sets at iteration {it}")));
                }
                let load = |es: &[&DatasetEntry]| {
                    es.iter().map(|e| self.store.stack(&e.id, &[e])).collect::<Result<Vec<_>>>()
                };
                let (pos, neg) = (load(&pos)?, load(&neg)?);
                LabeledFeatures::from_classes(&pos.iter().collect::<Vec<_>>(), &neg.iter().collect::<Vec<_>>())?
            }
        };
        Ok(augmentation_experiment(&train, &synthetic, &test, cfg)?)
    }
}

fn stack_labeled(id: &str, parts: &[(Source, &String, FeatureSet)]) -> Result<(FeatureSet, Vec<PointLabel>)> {
    let sets: Vec<&FeatureSet> = parts.iter().map(|p| &p.2).collect();
    let labels = parts
        .iter()
        .flat_map(|(source, class, set)| {
            std::iter::repeat_with(move || PointLabel { source: *source, class: (*class).clone() }).take(set.count())
        })
        .collect();
    Ok((FeatureSet::concat(id, &sets)?, labels))
}
