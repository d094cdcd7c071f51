//! Run configuration (JSON). Every field has a default; command-line flags
//! override file values.

use std::fs;
use std::path::{Path, PathBuf};

use clinrel_core::kid::KidConfig;
use clinrel_core::logreg::LogRegConfig;
use clinrel_core::tsne::TsneConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Md,
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Md => "md",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Labels of the positive (adenoma-like) and negative class in the manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassNames {
    pub positive: String,
    pub negative: String,
}

impl Default for ClassNames {
    fn default() -> Self {
        Self { positive: "AD".into(), negative: "NonAD".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Manifest path; relative paths resolve against the config file.
    pub manifest: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// Checkpoints to sweep; empty means every synthetic iteration in the
    /// manifest.
    pub iterations: Vec<u64>,
    pub classes: ClassNames,
    pub kid: KidConfig,
    pub tsne: TsneConfig,
    pub logreg: LogRegConfig,
    pub lambda: f64,
    pub formats: Vec<Format>,
    /// Synthetic checkpoint added in the augmentation run; `None` uses the
    /// sweep's selected iteration.
    pub augment_iteration: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifest: None,
            out_dir: PathBuf::from("out"),
            iterations: Vec::new(),
            classes: ClassNames::default(),
            kid: KidConfig::default(),
            tsne: TsneConfig::default(),
            logreg: LogRegConfig::default(),
            lambda: 1.0,
            formats: vec![Format::Md, Format::Csv, Format::Json],
            augment_iteration: None,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let (Some(m), Some(dir)) = (&cfg.manifest, path.parent()) {
            if m.is_relative() {
                cfg.manifest = Some(dir.join(m));
            }
        }
        Ok(cfg)
    }

    /// Sets both the KID and t-SNE seeds.
    pub fn set_seed(&mut self, seed: u64) {
        self.kid.seed = seed;
        self.tsne.seed = seed;
    }

    pub fn validate(&self) -> Result<()> {
        self.kid.validate()?;
        self.tsne.validate()?;
        self.logreg.validate()?;
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.classes.positive == self.classes.negative {
            return Err(Error::Config("positive and negative class labels must differ".into()));
        }
        Ok(())
    }

    pub fn manifest_path(&self) -> Result<&Path> {
        self.manifest
            .as_deref()
            .ok_or_else(|| Error::Config("no manifest given (use --manifest or the config file)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_fills_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"kid": {"subset_size": 50}, "lambda": 0.5}"#).unwrap();
        assert_eq!(cfg.kid.subset_size, 50);
        assert_eq!(cfg.kid.n_subsets, 100);
        assert_eq!(cfg.kid.kernel.degree, 3);
        assert_eq!(cfg.tsne.perplexity, 30.0);
        assert_eq!(cfg.lambda, 0.5);
        assert_eq!(cfg.classes.positive, "AD");
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"lamda": 1}"#).is_err());
    }

    #[test]
    fn seed_override_reaches_both_stages() {
        let mut cfg = RunConfig::default();
        cfg.set_seed(17);
        assert_eq!((cfg.kid.seed, cfg.tsne.seed), (17, 17));
    }
}
