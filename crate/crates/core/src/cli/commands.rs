use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::classifiers::{accuracy, load_model, train, Algorithm, FeatureMask, ModelFile, ProbabilisticClassifier};
use crate::cli::config::AuditConfig;
use crate::cli::manifest::{sha256_hex, OutputWriter, RunManifest};
use crate::cli::report::{render_markdown, to_json, AuditDocument};
use crate::data::{generate_planted_bias, load_csv, load_csv_with_schema, split_train_test, write_csv_to, Dataset, FeatureStats};
use crate::error::{Error, Result};
use crate::fairness::{run_audit, SensitiveSet};
use crate::lime::{explain_instance, render, SurrogateConfig};
use crate::rng;

/// What a command wrote and a short human summary for stdout.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub output_dir: PathBuf,
    pub manifest: RunManifest,
    pub summary: String,
}

fn read_data(cfg: &AuditConfig) -> Result<(Dataset, String)> {
    let path = cfg.require_data()?;
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let data = load_csv(path, &cfg.target, &cfg.kind_overrides)?;
    Ok((data, sha256_hex(&bytes)))
}

fn model_text<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializes");
    s.push('\n');
    s
}

/// Audits every configured algorithm and writes `report.md`, `report.json`,
/// the fitted models and the manifest.
pub fn cmd_audit(config: &Path, seed: Option<u64>) -> Result<CommandOutput> {
    let cfg = AuditConfig::load(config, seed)?;
    let (data, digest) = read_data(&cfg)?;
    let sensitive = SensitiveSet::new(&cfg.sensitive, data.schema())?;
    let mut out = OutputWriter::new(&cfg.output_dir)?;
    let mut audits = Vec::new();
    let mut summary = String::new();
    for &alg in &cfg.algorithms {
        let outcome = run_audit(&cfg.spec(alg)?, &data, &sensitive, &cfg.settings)?;
        let stats = &outcome.stats;
        out.write(
            &format!("models/{}.original.json", alg.name()),
            ModelFile::new(outcome.original.clone(), Some(stats.clone())).to_text().as_bytes(),
        )?;
        if let Some(ens) = &outcome.ensemble {
            for (k, m) in ens.pool.members.iter().enumerate() {
                out.write(
                    &format!("models/{}.lime_out.{k}.json", alg.name()),
                    ModelFile::new(m.clone(), Some(stats.clone())).to_text().as_bytes(),
                )?;
            }
        }
        let r = &outcome.report;
        write!(summary, "{}: accuracy {:.4}", alg.short_name(), r.original_accuracy).unwrap();
        match &r.ensemble {
            Some(e) => writeln!(summary, " -> {:.4} (unfair, ensemble built)", e.accuracy).unwrap(),
            None => writeln!(summary, " (fair, no action)").unwrap(),
        }
        audits.push(outcome.report);
    }
    let doc = AuditDocument {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        data: cfg.data_label(),
        data_sha256: digest,
        target: cfg.target.clone(),
        sensitive: sensitive.features().to_vec(),
        seed: cfg.seed,
        config: cfg.text.clone(),
        audits,
    };
    out.write("report.md", render_markdown(&doc).as_bytes())?;
    out.write("report.json", to_json(&doc).as_bytes())?;
    let manifest = out.finish("audit", &cfg.text, cfg.seed_overridden, cfg.seeds())?;
    Ok(CommandOutput { output_dir: cfg.output_dir, manifest, summary })
}

/// Explains one data row with a saved model; writes `explanation.txt`
/// (bar chart and table) and `explanation.json`.
pub fn cmd_explain(config: &Path, seed: Option<u64>, model: Option<&Path>, row: Option<usize>) -> Result<CommandOutput> {
    let cfg = AuditConfig::load(config, seed)?;
    let model_path = model
        .map(Path::to_path_buf)
        .or_else(|| cfg.model.clone())
        .ok_or_else(|| Error::Config("`model` is required (config key or --model)".into()))?;
    let row = row.or(cfg.row).ok_or_else(|| Error::Config("`row` is required (config key or --row)".into()))?;
    let file = load_model(&model_path)?;
    let data = load_csv_with_schema(cfg.require_data()?, file.model.schema())?;
    if row >= data.n_rows() {
        return Err(Error::InvalidArgument(format!("row {row} out of range: data has {} rows", data.n_rows())));
    }
    let stats = match file.stats {
        Some(s) => s,
        None => FeatureStats::compute(&data, cfg.settings.bins)?,
    };
    let lime = SurrogateConfig {
        seed: rng::derive_named(cfg.seed, "explain"),
        ..cfg.settings.surrogate()
    };
    let e = explain_instance(&file.model, data.row(row), &stats, &lime, &cfg.settings.kernel(data.n_features())?)?;
    let mut text = render::to_bar_chart(&e);
    text.push('\n');
    text.push_str(&render::to_text_table(&e));
    let mut out = OutputWriter::new(&cfg.output_dir)?;
    out.write("explanation.txt", text.as_bytes())?;
    let mut json = render::to_json(&e)?;
    json.push('\n');
    out.write("explanation.json", json.as_bytes())?;
    let mut seeds = cfg.seeds();
    seeds.insert("explain".into(), lime.seed);
    let manifest = out.finish("explain", &cfg.text, cfg.seed_overridden, seeds)?;
    Ok(CommandOutput { output_dir: cfg.output_dir, manifest, summary: text })
}

#[derive(Debug, Serialize)]
struct TrainingRecord {
    algorithm: String,
    model_file: String,
    masked: Vec<String>,
    train_accuracy: f64,
    test_accuracy: f64,
}

/// Trains each configured algorithm on the train split and saves it.
pub fn cmd_train(config: &Path, seed: Option<u64>) -> Result<CommandOutput> {
    let cfg = AuditConfig::load(config, seed)?;
    let (data, _) = read_data(&cfg)?;
    let mask = FeatureMask::new(&cfg.mask, data.schema())?;
    let split = split_train_test(&data, cfg.settings.train_fraction, cfg.settings.split_seed())?;
    let stats = FeatureStats::compute(&split.train, cfg.settings.bins)?;
    let mut out = OutputWriter::new(&cfg.output_dir)?;
    let mut records = Vec::new();
    let mut summary = String::new();
    for &alg in &cfg.algorithms {
        let model = train(&cfg.spec(alg)?, &split.train, &mask)?;
        let rel = format!("models/{}.json", alg.name());
        out.write(&rel, ModelFile::new(model.clone(), Some(stats.clone())).to_text().as_bytes())?;
        let rec = TrainingRecord {
            algorithm: alg.name().into(),
            model_file: rel,
            masked: mask.dropped().iter().cloned().collect(),
            train_accuracy: accuracy(&model, &split.train)?,
            test_accuracy: accuracy(&model, &split.test)?,
        };
        writeln!(summary, "{}: train {:.4} test {:.4}", alg.short_name(), rec.train_accuracy, rec.test_accuracy).unwrap();
        records.push(rec);
    }
    out.write("training.json", model_text(&records).as_bytes())?;
    let manifest = out.finish("train", &cfg.text, cfg.seed_overridden, cfg.seeds())?;
    Ok(CommandOutput { output_dir: cfg.output_dir, manifest, summary })
}

/// Writes a planted-bias CSV.
pub fn cmd_synth(config: &Path, seed: Option<u64>) -> Result<CommandOutput> {
    let cfg = AuditConfig::load(config, seed)?;
    let data = generate_planted_bias(&cfg.synth)?;
    let mut buf = Vec::new();
    write_csv_to(&data, &mut buf)?;
    let mut out = OutputWriter::new(&cfg.output_dir)?;
    out.write(&cfg.synth_file, &buf)?;
    let manifest = out.finish("synth", &cfg.text, cfg.seed_overridden, cfg.seeds())?;
    let summary = format!(
        "wrote {} rows to {}\n",
        data.n_rows(),
        cfg.output_dir.join(&cfg.synth_file).display()
    );
    Ok(CommandOutput { output_dir: cfg.output_dir, manifest, summary })
}

/// Names accepted by `algorithms`.
pub fn algorithm_names() -> Vec<&'static str> {
    Algorithm::ALL.iter().map(|a| a.name()).collect()
}
