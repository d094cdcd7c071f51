//! Text renderings of sweeps and augmentation results.
//!
//! Markdown rounds for display (3 decimals for KID, 4 for classifier scores,
//! half away from zero) and bolds the best cells; CSV and JSON keep full
//! precision.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clinrel_core::augment::AugReport;
use clinrel_core::kid::KidEstimate;
use clinrel_core::metrics::ClassificationReport;
use clinrel_core::protocol::{Column, ComparisonRow, SelectionResult, SweepTable};
use serde::{Deserialize, Serialize};

use crate::config::{ClassNames, Format};

/// Rounds half away from zero, then prints exactly `decimals` places.
pub fn fmt_fixed(x: f64, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    let r = (x * scale).round() / scale;
    // Avoid "-0.000".
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.decimals$}")
}

/// `8000 -> "8k"`; other values print as-is.
pub fn iteration_label(it: u64) -> String {
    if it > 0 && it % 1000 == 0 {
        format!("{}k", it / 1000)
    } else {
        it.to_string()
    }
}

fn kid_cell(e: &KidEstimate) -> String {
    format!("{} ({})", fmt_fixed(e.mean, 3), fmt_fixed(e.std, 3))
}

fn bold(s: String, on: bool) -> String {
    if on {
        format!("**{s}**")
    } else {
        s
    }
}

/// Header text of a sweep column, e.g. `Synthetic AD vs Real NonAD ↑`.
pub fn column_header(col: Column, classes: &ClassNames) -> String {
    let (p, n) = (&classes.positive, &classes.negative);
    let (syn, real) = match col {
        Column::SameAd => (p, p),
        Column::CrossAd => (p, n),
        Column::SameNonad => (n, n),
        Column::CrossNonad => (n, p),
    };
    let arrow = match col.objective() {
        clinrel_core::protocol::Objective::Minimize => '\u{2193}',
        clinrel_core::protocol::Objective::Maximize => '\u{2191}',
    };
    format!("Synthetic {syn} vs Real {real} {arrow}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionJson {
    pub chosen: u64,
    pub lambda: f64,
    pub scores: BTreeMap<u64, f64>,
}

/// JSON form of a sweep. `sweep --from` reads back `rows` (and ignores the
/// rest), so a saved or hand-written file can be re-marked and re-rendered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepJson {
    #[serde(default)]
    pub classes: ClassNames,
    pub rows: Vec<ComparisonRow>,
    #[serde(default)]
    pub markers: BTreeMap<String, Vec<u64>>,
    #[serde(default)]
    pub selection: Option<SelectionJson>,
}

impl SweepJson {
    pub fn new(table: &SweepTable, selection: &SelectionResult, classes: &ClassNames) -> Self {
        Self {
            classes: classes.clone(),
            rows: table.rows().to_vec(),
            markers: Column::ALL
                .iter()
                .map(|&c| (c.key().to_string(), table.markers(c).to_vec()))
                .collect(),
            selection: Some(SelectionJson {
                chosen: selection.chosen_iteration,
                lambda: selection.lambda,
                scores: selection.scores.iter().copied().collect(),
            }),
        }
    }
}

pub fn render_sweep_report(table: &SweepTable, selection: &SelectionResult, classes: &ClassNames, format: Format) -> String {
    match format {
        Format::Md => sweep_markdown(table, selection, classes),
        Format::Csv => sweep_csv(table, selection),
        Format::Json => to_json(&SweepJson::new(table, selection, classes)),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn sweep_markdown(table: &SweepTable, sel: &SelectionResult, classes: &ClassNames) -> String {
    let mut s = String::new();
    let _ = write!(s, "| Iteration |");
    for c in Column::ALL {
        let _ = write!(s, " {} |", column_header(c, classes));
    }
    let _ = writeln!(s, " Score (\u{3bb}={}) |", sel.lambda);
    let _ = writeln!(s, "|---|---|---|---|---|---|");
    for (row, &(_, score)) in table.rows().iter().zip(&sel.scores) {
        let _ = write!(s, "| {} |", iteration_label(row.iteration));
        for c in Column::ALL {
            let _ = write!(s, " {} |", bold(kid_cell(row.get(c)), table.is_marked(row.iteration, c)));
        }
        let chosen = row.iteration == sel.chosen_iteration;
        let _ = writeln!(s, " {} |", bold(fmt_fixed(score, 3), chosen));
    }
    let chosen_score = sel.score(sel.chosen_iteration).unwrap_or_default();
    let _ = writeln!(
        s,
        "\nSelected iteration: {} (score {}; score = same-class KID sum \u{2212} \u{3bb} \u{b7} cross-class KID sum)",
        iteration_label(sel.chosen_iteration),
        fmt_fixed(chosen_score, 3)
    );
    s
}

fn sweep_csv(table: &SweepTable, sel: &SelectionResult) -> String {
    let mut s = String::from("iteration");
    for c in Column::ALL {
        let k = c.key();
        let _ = write!(s, ",{k}_mean,{k}_std,{k}_best");
    }
    s.push_str(",score,chosen\n");
    for (row, &(_, score)) in table.rows().iter().zip(&sel.scores) {
        let _ = write!(s, "{}", row.iteration);
        for c in Column::ALL {
            let e = row.get(c);
            let _ = write!(s, ",{},{},{}", e.mean, e.std, table.is_marked(row.iteration, c));
        }
        let _ = writeln!(s, ",{},{}", score, row.iteration == sel.chosen_iteration);
    }
    s
}

const METRIC_KEYS: [&str; 7] = [
    "pos_precision",
    "pos_recall",
    "pos_f1",
    "neg_precision",
    "neg_recall",
    "neg_f1",
    "balanced_accuracy",
];

fn metric_values(r: &ClassificationReport) -> [f64; 7] {
    [
        r.positive.precision,
        r.positive.recall,
        r.positive.f1,
        r.negative.precision,
        r.negative.recall,
        r.negative.f1,
        r.balanced_accuracy,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AugmentationJson<'a> {
    pub classes: &'a ClassNames,
    /// Synthetic checkpoint used in the second run, if any.
    pub synthetic_iteration: Option<u64>,
    #[serde(flatten)]
    pub report: &'a AugReport,
}

pub fn render_aug_report(report: &AugReport, iteration: Option<u64>, classes: &ClassNames, format: Format) -> String {
    let rows = [("Real", &report.real_only), ("Real+Synthetic", &report.real_plus_synth)];
    match format {
        Format::Md => {
            let (p, n) = (&classes.positive, &classes.negative);
            let mut s = format!(
                "| Training images | {p} Precision | {p} Recall | {p} F1-score | {n} Precision | {n} Recall | {n} F1-score | Balanced Accuracy |\n"
            );
            s.push_str("|---|---|---|---|---|---|---|---|\n");
            let vals = [metric_values(rows[0].1), metric_values(rows[1].1)];
            for (k, (name, _)) in rows.iter().enumerate() {
                let _ = write!(s, "| {name} |");
                for (m, &v) in vals[k].iter().enumerate() {
                    let shown = fmt_fixed(v, 4);
                    let best = shown == fmt_fixed(vals[0][m].max(vals[1][m]), 4);
                    let _ = write!(s, " {} |", bold(shown, best));
                }
                s.push('\n');
            }
            let _ = writeln!(
                s,
                "\nTraining: {} real {p} + {} real {n}; synthetic added: {} {p} + {} {n}{}. Test: {} {p} + {} {n}.",
                report.real_train.positive,
                report.real_train.negative,
                report.synthetic_train.positive,
                report.synthetic_train.negative,
                iteration.map(|it| format!(" (iteration {})", iteration_label(it))).unwrap_or_default(),
                report.test.positive,
                report.test.negative,
            );
            for (name, r) in rows {
                if r.zero_division {
                    let _ = writeln!(s, "Note: {name} run had a zero denominator; affected scores are reported as 0.");
                }
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("training");
            for k in METRIC_KEYS {
                let _ = write!(s, ",{k}");
            }
            s.push_str(",tp,fn,fp,tn,zero_division\n");
            for (name, r) in rows {
                let _ = write!(s, "{name}");
                for v in metric_values(r) {
                    let _ = write!(s, ",{v}");
                }
                let c = r.confusion;
                let _ = writeln!(s, ",{},{},{},{},{}", c.true_pos, c.false_neg, c.false_pos, c.true_neg, r.zero_division);
            }
            s
        }
        Format::Json => to_json(&AugmentationJson { classes, synthetic_iteration: iteration, report }),
    }
}

/// One checkpoint's t-SNE outcome as referenced from the combined report.
#[derive(Debug, Clone, PartialEq)]
pub struct TsneSummary {
    pub iteration: u64,
    pub svg_file: String,
    pub final_kl: f64,
    pub calibrated_points: usize,
    pub points: usize,
}

/// Markdown report putting KID, t-SNE and the classifier side by side for
/// every checkpoint.
pub fn render_combined(
    table: &SweepTable,
    selection: &SelectionResult,
    same_class_only: &SelectionResult,
    tsne: &[TsneSummary],
    augmentation: Option<(&AugReport, Option<u64>)>,
    classes: &ClassNames,
) -> String {
    let mut s = String::from("# Clinical relevance of synthetic checkpoints\n\n");
    s.push_str("## Per-checkpoint summary\n\n");
    let _ = writeln!(
        s,
        "| Iteration | Same-class KID sum \u{2193} | Cross-class KID sum \u{2191} | Score (\u{3bb}={}) | t-SNE | t-SNE KL |",
        selection.lambda
    );
    s.push_str("|---|---|---|---|---|---|\n");
    for (row, &(_, score)) in table.rows().iter().zip(&selection.scores) {
        let plot = tsne.iter().find(|t| t.iteration == row.iteration);
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} |",
            iteration_label(row.iteration),
            fmt_fixed(row.same_class_sum(), 3),
            fmt_fixed(row.cross_class_sum(), 3),
            bold(fmt_fixed(score, 3), row.iteration == selection.chosen_iteration),
            plot.map(|t| format!("[{0}]({0})", t.svg_file)).unwrap_or_else(|| "-".into()),
            plot.map(|t| fmt_fixed(t.final_kl, 4)).unwrap_or_else(|| "-".into()),
        );
    }
    s.push_str("\n## Directional KID\n\n");
    s.push_str(&sweep_markdown(table, selection, classes));
    let _ = writeln!(
        s,
        "\nSame-class criterion alone (\u{3bb}=0) selects {}; the combined criterion selects {}.",
        iteration_label(same_class_only.chosen_iteration),
        iteration_label(selection.chosen_iteration)
    );
    if tsne.iter().any(|t| t.calibrated_points < t.points) {
        s.push_str("\nSome t-SNE points did not reach the target perplexity; see the coordinate files.\n");
    }
    if let Some((aug, it)) = augmentation {
        s.push_str("\n## Augmentation experiment\n\n");
        s.push_str(&render_aug_report(aug, it, classes, Format::Md));
    }
    s
}
