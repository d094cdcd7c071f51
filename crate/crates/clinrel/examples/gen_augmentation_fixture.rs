//! Regenerates `tests/fixtures/augmentation`: an imbalanced two-Gaussian
//! problem with two synthetic training sets.
//!
//! * iteration 1: extra minority (NonAD) rows from the true NonAD distribution
//! * iteration 2: both synthetic classes drawn from the other class's distribution
//!
//! `golden.json` holds the classification reports for both iterations.
//!
//!     cargo run -p clinrel --example gen_augmentation_fixture

use std::fs;
use std::path::Path;

use clinrel::config::{ClassNames, RunConfig};
use clinrel::fvec::write_feature_file;
use clinrel::registry::load_manifest;
use clinrel::workflow::Workspace;
use clinrel_core::rng::Pcg32;
use clinrel_core::FeatureSet;

const DIM: usize = 8;
const SEED: u64 = 20240611;
const SHIFT: f64 = 0.5;

fn gaussian(rng: &mut Pcg32, id: &str, count: usize, mean: f64) -> FeatureSet {
    let data = (0..count * DIM).map(|_| (mean + rng.next_gaussian()) as f32).collect();
    FeatureSet::new(id, count, DIM, data).expect("finite")
}

fn main() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/augmentation");
    fs::create_dir_all(&dir)?;
    let mut rng = Pcg32::new(SEED);

    // (id, count, mean, manifest fields)
    let sets: [(&str, usize, f64, &str); 7] = [
        ("real_ad_train", 120, 0.0, r#""source": "real", "class": "AD", "split": "train""#),
        ("real_nonad_train", 20, SHIFT, r#""source": "real", "class": "NonAD", "split": "train""#),
        ("real_ad_test", 77, 0.0, r#""source": "real", "class": "AD", "split": "test""#),
        ("real_nonad_test", 36, SHIFT, r#""source": "real", "class": "NonAD", "split": "test""#),
        ("syn_nonad_same", 100, SHIFT, r#""source": "synthetic", "class": "NonAD", "iteration": 1, "split": "train""#),
        ("syn_ad_swapped", 100, SHIFT, r#""source": "synthetic", "class": "AD", "iteration": 2, "split": "train""#),
        ("syn_nonad_swapped", 100, 0.0, r#""source": "synthetic", "class": "NonAD", "iteration": 2, "split": "train""#),
    ];
    let mut entries = Vec::new();
    for (id, count, mean, fields) in sets {
        let set = gaussian(&mut rng, id, count, mean);
        write_feature_file(&set, dir.join(format!("{id}.fvec")))?;
        entries.push(format!(r#"  {{"id": "{id}", "path": "{id}.fvec", {fields}}}"#));
    }
    let manifest = dir.join("manifest.json");
    fs::write(&manifest, format!("[\n{}\n]\n", entries.join(",\n")))?;

    let cfg = RunConfig::default();
    let ws = Workspace::open(load_manifest(&manifest)?, ClassNames::default())?;
    let golden = serde_json::json!({
        "same_distribution": ws.augmentation(Some(1), &cfg.logreg)?,
        "class_swapped": ws.augmentation(Some(2), &cfg.logreg)?,
    });
    fs::write(dir.join("golden.json"), serde_json::to_string_pretty(&golden)? + "\n")?;
    println!("wrote {}", dir.display());
    Ok(())
}
