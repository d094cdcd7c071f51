//! Dataset manifest and registry.
//!
//! A manifest is a JSON array of entries:
//!
//! ```json
//! [
//!   {"id": "real_ad", "path": "real_ad.fvec", "source": "real", "class": "AD", "split": "train"},
//!   {"id": "syn_ad_8k", "path": "syn_ad_8k.fvec", "source": "synthetic", "class": "AD", "iteration": 8000}
//! ]
//! ```
//!
//! Relative paths resolve against the manifest's directory. Loading a manifest
//! does not open any feature file; [`validate_registry`] and
//! [`DatasetRegistry::load_sets`] do.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use clinrel_core::FeatureSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fvec::load_feature_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Real,
    Synthetic,
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Source::Real => "real",
            Source::Synthetic => "synthetic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
    #[default]
    Unsplit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub id: String,
    pub path: PathBuf,
    pub source: Source,
    #[serde(rename = "class")]
    pub class_label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iteration: Option<u64>,
    #[serde(default)]
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRegistry {
    entries: Vec<DatasetEntry>,
    base_dir: PathBuf,
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetRegistry> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_manifest(&text, base).map_err(|msg| Error::Manifest { path: path.into(), msg })
}

/// Parses manifest text; relative entry paths resolve against `base_dir`.
pub fn parse_manifest(text: &str, base_dir: impl Into<PathBuf>) -> std::result::Result<DatasetRegistry, String> {
    let entries: Vec<DatasetEntry> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    DatasetRegistry::new(entries, base_dir)
}

impl DatasetRegistry {
    pub fn new(entries: Vec<DatasetEntry>, base_dir: impl Into<PathBuf>) -> std::result::Result<Self, String> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.id.as_str()) {
                return Err(format!("duplicate id \"{}\"", e.id));
            }
            if e.source == Source::Real && e.iteration.is_some() {
                return Err(format!("entry \"{}\": iteration is only allowed on synthetic entries", e.id));
            }
        }
        Ok(Self { entries, base_dir: base_dir.into() })
    }

    pub fn entries(&self) -> &[DatasetEntry] {
        &self.entries
    }

    pub fn entry(&self, id: &str) -> Option<&DatasetEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn resolve(&self, entry: &DatasetEntry) -> PathBuf {
        if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            self.base_dir.join(&entry.path)
        }
    }

    pub fn filter<'a>(&'a self, pred: impl Fn(&DatasetEntry) -> bool + 'a) -> impl Iterator<Item = &'a DatasetEntry> + 'a {
        self.entries.iter().filter(move |e| pred(e))
    }

    /// Loads the feature files of `ids` (in parallel) into a map keyed by id.
    pub fn load_sets<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> Result<FeatureStore> {
        let mut wanted: Vec<&DatasetEntry> = Vec::new();
        for id in ids {
            let e = self.entry(id).ok_or_else(|| Error::MissingRole(format!("unknown entry id \"{id}\"")))?;
            if !wanted.iter().any(|w| w.id == e.id) {
                wanted.push(e);
            }
        }
        let loaded: Vec<(String, FeatureSet)> = wanted
            .par_iter()
            .map(|e| load_feature_file(self.resolve(e)).map(|s| (e.id.clone(), s)))
            .collect::<Result<_>>()?;
        Ok(FeatureStore { sets: loaded.into_iter().collect() })
    }

    pub fn load_all(&self) -> Result<FeatureStore> {
        self.load_sets(self.entries.iter().map(|e| e.id.as_str()))
    }
}

/// Feature sets loaded from a registry, keyed by entry id.
#[derive(Debug, Clone, Default)]
pub struct FeatureStore {
    sets: HashMap<String, FeatureSet>,
}

impl FeatureStore {
    pub fn get(&self, id: &str) -> Option<&FeatureSet> {
        self.sets.get(id)
    }

    /// Stacks the sets of `entries` in the given order under a new id.
    pub fn stack(&self, id: &str, entries: &[&DatasetEntry]) -> Result<FeatureSet> {
        let parts = entries
            .iter()
            .map(|e| self.get(&e.id).ok_or_else(|| Error::MissingRole(format!("entry \"{}\" not loaded", e.id))))
            .collect::<Result<Vec<_>>>()?;
        Ok(FeatureSet::concat(id, &parts)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    /// Shared dimension (most common across readable files).
    pub dim: Option<usize>,
    pub issues: Vec<Issue>,
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.ok {
            match self.dim {
                Some(d) => writeln!(f, "ok: all feature files readable, dim {d}"),
                None => writeln!(f, "ok: registry is empty"),
            }
        } else {
            for i in &self.issues {
                writeln!(f, "{}: {}", i.id, i.message)?;
            }
            writeln!(f, "{} issue(s)", self.issues.len())
        }
    }
}

/// Opens every referenced file and reports unreadable, malformed, empty or
/// dimension-mismatched entries. Never fails; never writes.
pub fn validate_registry(registry: &DatasetRegistry) -> ValidationReport {
    let results: Vec<(String, std::result::Result<usize, String>)> = registry
        .entries
        .par_iter()
        .map(|e| {
            let path = registry.resolve(e);
            let outcome = if !path.exists() {
                Err(format!("file not found: {}", path.display()))
            } else {
                match load_feature_file(&path) {
                    Ok(set) => Ok(set.dim()),
                    Err(Error::Core(clinrel_core::Error::EmptySet { .. })) => Err("empty set".to_string()),
                    Err(err) => Err(err.to_string()),
                }
            };
            (e.id.clone(), outcome)
        })
        .collect();

    // Majority dimension; ties go to the first one seen.
    let mut tally: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (pos, (_, r)) in results.iter().enumerate() {
        if let Ok(d) = r {
            let t = tally.entry(*d).or_insert((0, pos));
            t.0 += 1;
        }
    }
    let dim = tally
        .iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
        .map(|(&d, _)| d);

    let mut issues = Vec::new();
    for (id, r) in results {
        match r {
            Err(message) => issues.push(Issue { id, message }),
            Ok(d) if Some(d) != dim => issues.push(Issue {
                id,
                message: format!("dim mismatch {d} \u{2260} {}", dim.unwrap_or_default()),
            }),
            Ok(_) => {}
        }
    }
    ValidationReport { ok: issues.is_empty(), dim, issues }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries_with_defaults() {
        let reg = parse_manifest(
            r#"[
                {"id": "real_ad", "path": "a.fvec", "source": "real", "class": "AD", "split": "train"},
                {"id": "syn", "path": "b.fvec", "source": "synthetic", "class": "NonAD", "iteration": 8000}
            ]"#,
            "/data",
        )
        .unwrap();
        assert_eq!(reg.entries().len(), 2);
        let syn = reg.entry("syn").unwrap();
        assert_eq!(syn.iteration, Some(8000));
        assert_eq!(syn.split, Split::Unsplit);
        assert_eq!(reg.resolve(syn), PathBuf::from("/data/b.fvec"));
    }

    #[test]
    fn duplicate_id_is_named() {
        let err = parse_manifest(
            r#"[{"id": "real_ad", "path": "a", "source": "real", "class": "AD"},
                {"id": "real_ad", "path": "b", "source": "real", "class": "AD"}]"#,
            ".",
        )
        .unwrap_err();
        assert!(err.contains("real_ad"), "{err}");
    }

    #[test]
    fn rejects_iteration_on_real_and_bad_source() {
        assert!(parse_manifest(r#"[{"id": "r", "path": "a", "source": "real", "class": "AD", "iteration": 3}]"#, ".").is_err());
        assert!(parse_manifest(r#"[{"id": "r", "path": "a", "source": "fake", "class": "AD"}]"#, ".").is_err());
        assert!(parse_manifest("not json", ".").is_err());
    }
}
