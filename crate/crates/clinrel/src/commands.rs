//! The `validate`, `sweep`, `tsne`, `classify` and `report` commands.
//!
//! Work items run on the current rayon pool; files are written afterwards,
//! one at a time, in a fixed order.

use std::fs;
use std::path::{Path, PathBuf};

use clinrel_core::augment::AugReport;
use clinrel_core::protocol::{select_iteration, SelectionResult, SweepTable};
use clinrel_core::tsne::TsneResult;
use rayon::prelude::*;

use crate::config::{Format, RunConfig};
use crate::error::{Error, Result};
use crate::registry::{load_manifest, validate_registry, ValidationReport};
use crate::report::{render_aug_report, render_combined, render_sweep_report, SweepJson, TsneSummary};
use crate::svg::{coords_csv, kl_trace_csv, render_scatter};
use crate::workflow::{PointLabel, Workspace};

/// Files written by a command, in write order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
}

fn write_all(out_dir: &Path, files: Vec<(String, String)>) -> Result<Outcome> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(Outcome { written })
}

pub fn cmd_validate(manifest: &Path) -> Result<ValidationReport> {
    Ok(validate_registry(&load_manifest(manifest)?))
}

fn open_workspace(cfg: &RunConfig) -> Result<Workspace> {
    cfg.validate()?;
    let registry = load_manifest(cfg.manifest_path()?)?;
    let report = validate_registry(&registry);
    if !report.ok {
        return Err(Error::InvalidRegistry(report.to_string()));
    }
    Workspace::open(registry, cfg.classes.clone())
}

fn sweep_files(table: &SweepTable, sel: &SelectionResult, cfg: &RunConfig) -> Vec<(String, String)> {
    cfg.formats
        .iter()
        .map(|&f| (format!("sweep.{}", f.extension()), render_sweep_report(table, sel, &cfg.classes, f)))
        .collect()
}

fn compute_sweep(ws: &Workspace, cfg: &RunConfig) -> Result<(SweepTable, SelectionResult)> {
    let iterations = ws.sweep_iterations(&cfg.iterations)?;
    let table = ws.iteration_sweep(&iterations, &cfg.kid)?;
    let selection = select_iteration(&table, cfg.lambda);
    Ok((table, selection))
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome> {
    let ws = open_workspace(cfg)?;
    let (table, selection) = compute_sweep(&ws, cfg)?;
    write_all(&cfg.out_dir, sweep_files(&table, &selection, cfg))
}

/// Re-marks and re-renders the rows of a saved `sweep.json` without touching
/// any feature file.
pub fn cmd_sweep_from(cfg: &RunConfig, sweep_json: &Path) -> Result<Outcome> {
    cfg.validate()?;
    let text = fs::read_to_string(sweep_json).map_err(|e| Error::io(sweep_json, e))?;
    let saved: SweepJson =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", sweep_json.display())))?;
    let table = SweepTable::from_rows(saved.rows)?;
    let selection = select_iteration(&table, cfg.lambda);
    write_all(&cfg.out_dir, sweep_files(&table, &selection, cfg))
}

struct Embedding {
    name: String,
    iteration: Option<u64>,
    result: TsneResult,
    labels: Vec<PointLabel>,
}

impl Embedding {
    fn files(&self) -> Result<Vec<(String, String)>> {
        let title = match self.iteration {
            Some(it) => format!("t-SNE, iteration {}", crate::report::iteration_label(it)),
            None => "t-SNE".to_string(),
        };
        Ok(vec![
            (format!("{}.svg", self.name), render_scatter(&self.result.coords, &self.labels, &title)?),
            (format!("{}.csv", self.name), coords_csv(&self.result.coords, &self.labels)),
            (format!("{}_kl.csv", self.name), kl_trace_csv(&self.result.kl_trace, self.result.final_kl)),
        ])
    }

    fn summary(&self, iteration: u64) -> TsneSummary {
        let cal = &self.result.calibration;
        TsneSummary {
            iteration,
            svg_file: format!("{}.svg", self.name),
            final_kl: self.result.final_kl,
            calibrated_points: cal.converged.iter().filter(|&&c| c).count(),
            points: cal.converged.len(),
        }
    }
}

fn embed_iterations(ws: &Workspace, cfg: &RunConfig, iterations: &[u64]) -> Result<Vec<Embedding>> {
    iterations
        .par_iter()
        .map(|&it| {
            let (result, labels) = ws.tsne(it, &cfg.tsne)?;
            Ok(Embedding { name: format!("tsne_{it}"), iteration: Some(it), result, labels })
        })
        .collect()
}

/// One plot per sweep iteration, or a single plot of `entries` when given.
pub fn cmd_tsne(cfg: &RunConfig, entries: Option<&[String]>) -> Result<Outcome> {
    let ws = open_workspace(cfg)?;
    let embeddings = match entries {
        Some(ids) => {
            let (x, labels) = ws.tsne_inputs_for(ids)?;
            let result = clinrel_core::tsne::tsne_embed(&x, &cfg.tsne)?;
            vec![Embedding { name: "tsne_custom".into(), iteration: None, result, labels }]
        }
        None => embed_iterations(&ws, cfg, &ws.sweep_iterations(&cfg.iterations)?)?,
    };
    let mut files = Vec::new();
    for e in &embeddings {
        files.extend(e.files()?);
    }
    write_all(&cfg.out_dir, files)
}

fn augmentation_files(report: &AugReport, iteration: Option<u64>, cfg: &RunConfig) -> Vec<(String, String)> {
    cfg.formats
        .iter()
        .map(|&f| (format!("augmentation.{}", f.extension()), render_aug_report(report, iteration, &cfg.classes, f)))
        .collect()
}

/// Synthetic checkpoint for the augmentation run: explicit override, then the
/// config, then the sweep's selection (if the manifest has synthetic data).
fn augmentation_iteration(ws: &Workspace, cfg: &RunConfig, explicit: Option<u64>) -> Result<Option<u64>> {
    if let Some(it) = explicit.or(cfg.augment_iteration) {
        return Ok(Some(it));
    }
    if ws.synthetic_iterations()?.is_empty() {
        return Ok(None);
    }
    let (_, selection) = compute_sweep(ws, cfg)?;
    Ok(Some(selection.chosen_iteration))
}

pub fn cmd_classify(cfg: &RunConfig, iteration: Option<u64>) -> Result<Outcome> {
    let ws = open_workspace(cfg)?;
    let it = augmentation_iteration(&ws, cfg, iteration)?;
    let report = ws.augmentation(it, &cfg.logreg)?;
    write_all(&cfg.out_dir, augmentation_files(&report, it, cfg))
}

/// Runs all three evaluations and writes their outputs plus `report.md`.
pub fn cmd_report(cfg: &RunConfig) -> Result<Outcome> {
    let ws = open_workspace(cfg)?;
    let (table, selection) = compute_sweep(&ws, cfg)?;
    let same_only = select_iteration(&table, 0.0);
    let iterations: Vec<u64> = table.rows().iter().map(|r| r.iteration).collect();
    let embeddings = embed_iterations(&ws, cfg, &iterations)?;
    let aug_iteration = cfg.augment_iteration.or(Some(selection.chosen_iteration));
    let aug = ws.augmentation(aug_iteration, &cfg.logreg)?;

    let mut files = sweep_files(&table, &selection, cfg);
    let mut summaries = Vec::new();
    for e in &embeddings {
        files.extend(e.files()?);
        summaries.push(e.summary(e.iteration.unwrap_or_default()));
    }
    files.extend(augmentation_files(&aug, aug_iteration, cfg));
    files.push((
        "report.md".into(),
        render_combined(&table, &selection, &same_only, &summaries, Some((&aug, aug_iteration)), &cfg.classes),
    ));
    write_all(&cfg.out_dir, files)
}

/// Formats requested on the command line replace the configured list.
pub fn apply_formats(cfg: &mut RunConfig, formats: &[Format]) {
    if !formats.is_empty() {
        let mut f = formats.to_vec();
        f.sort_unstable();
        f.dedup();
        cfg.formats = f;
    }
}
