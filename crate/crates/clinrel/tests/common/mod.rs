#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clinrel::fvec::write_feature_file;
use clinrel_core::rng::Pcg32;
use clinrel_core::FeatureSet;

pub fn gaussian_set(rng: &mut Pcg32, id: &str, count: usize, dim: usize, mean: f64) -> FeatureSet {
    let data = (0..count * dim).map(|_| (mean + rng.next_gaussian()) as f32).collect();
    FeatureSet::new(id, count, dim, data).unwrap()
}

/// Small two-class registry with real train/test splits and synthetic sets at
/// iterations 1000 and 2000. Returns the manifest path.
pub fn write_small_registry(dir: &Path, seed: u64) -> PathBuf {
    const DIM: usize = 12;
    let mut rng = Pcg32::new(seed);
    let specs: &[(&str, usize, f64, &str)] = &[
        ("real_ad_train", 40, 0.0, r#""source":"real","class":"AD","split":"train""#),
        ("real_nonad_train", 25, 0.8, r#""source":"real","class":"NonAD","split":"train""#),
        ("real_ad_test", 20, 0.0, r#""source":"real","class":"AD","split":"test""#),
        ("real_nonad_test", 15, 0.8, r#""source":"real","class":"NonAD","split":"test""#),
        ("syn_ad_1k", 25, 0.3, r#""source":"synthetic","class":"AD","iteration":1000"#),
        ("syn_nonad_1k", 25, 0.4, r#""source":"synthetic","class":"NonAD","iteration":1000"#),
        ("syn_ad_2k", 25, 0.1, r#""source":"synthetic","class":"AD","iteration":2000"#),
        ("syn_nonad_2k", 25, 0.7, r#""source":"synthetic","class":"NonAD","iteration":2000"#),
    ];
    let mut entries = Vec::new();
    for &(id, count, mean, fields) in specs {
        let set = gaussian_set(&mut rng, id, count, DIM, mean);
        write_feature_file(&set, dir.join(format!("{id}.fvec"))).unwrap();
        entries.push(format!(r#"{{"id":"{id}","path":"{id}.fvec",{fields}}}"#));
    }
    let manifest = dir.join("manifest.json");
    std::fs::write(&manifest, format!("[\n{}\n]\n", entries.join(",\n"))).unwrap();
    manifest
}

/// Run config sized for tests: small KID subsets and a short t-SNE run.
pub fn write_fast_config(dir: &Path, manifest: &Path) -> PathBuf {
    let cfg = serde_json::json!({
        "manifest": manifest,
        "kid": {"subset_size": 20, "n_subsets": 20, "seed": 5},
        "tsne": {"perplexity": 10.0, "max_iter": 300, "seed": 5},
    });
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

pub fn clinrel(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_clinrel"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("CLINREL_THREADS", t),
        None => cmd.env_remove("CLINREL_THREADS"),
    };
    cmd.output().expect("spawn clinrel")
}

pub fn fixture_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}
