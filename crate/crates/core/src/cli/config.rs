//! Flat `key = value` configuration shared by every command.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are comma
//! separated. Relative paths resolve against the config file's directory.
//! Hyperparameters are set as `<algorithm>.<name> = value`, generator knobs
//! as `synth.<name> = value`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::classifiers::{Algorithm, ClassifierSpec};
use crate::data::{KindOverride, PlantedBiasConfig};
use crate::error::{Error, Result};
use crate::fairness::AuditSettings;
use crate::rng;

/// Every accepted key besides `<algorithm>.<name>` hyperparameters.
pub const KEYS: &[(&str, &str)] = &[
    ("seed", "master seed; mandatory (or --seed)"),
    ("data", "input CSV"),
    ("target", "label column (default `label`)"),
    ("sensitive", "comma-separated sensitive feature names"),
    ("algorithms", "subset of logistic, tree, random_forest, bagging, adaboost"),
    ("output_dir", "where reports, models and the manifest go (default `out`)"),
    ("train_fraction", "stratified train share (default 0.7)"),
    ("bins", "quantile bins per numeric feature (default 4)"),
    ("n_samples", "perturbations per explanation (default 5000)"),
    ("lambda", "surrogate ridge penalty (default 0.001)"),
    ("k", "features reported per local explanation (default 10)"),
    ("sigma", "kernel width (default 0.75*sqrt(d))"),
    ("budget", "instances picked for the global view (default 15)"),
    ("max_candidates", "candidate instances from the test split (default 200)"),
    ("top_k", "rank cutoff for the fairness verdict (default 10)"),
    ("categorical", "columns forced categorical"),
    ("numeric", "columns forced numeric"),
    ("mask", "features dropped when training (train command)"),
    ("model", "model file to explain (explain command)"),
    ("row", "0-based data row to explain (explain command)"),
    ("synth.n_rows", "generated rows (default 1000)"),
    ("synth.n_noise_features", "independent N(0,1) columns (default 3)"),
    ("synth.bias_strength", "logit weight of `s` (default 2)"),
    ("synth.redundancy", "correlation of `u` with `s` (default 0.5)"),
    ("synth.extra_sensitive", "logit weights of extra sensitive columns s_1, s_2, ..."),
    ("synth.file", "generated file name inside output_dir (default planted_bias.csv)"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    /// The file exactly as read, echoed into reports.
    pub text: String,
    pub seed: u64,
    pub seed_overridden: bool,
    pub data: Option<PathBuf>,
    /// `data` as written in the file, used in reports so they do not depend
    /// on the working directory.
    pub data_display: Option<String>,
    pub target: String,
    pub sensitive: Vec<String>,
    pub algorithms: Vec<Algorithm>,
    pub output_dir: PathBuf,
    pub settings: AuditSettings,
    pub kind_overrides: BTreeMap<String, KindOverride>,
    pub mask: Vec<String>,
    pub hyperparameters: Vec<(Algorithm, String, String)>,
    pub model: Option<PathBuf>,
    pub row: Option<usize>,
    pub synth: PlantedBiasConfig,
    pub synth_file: String,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{v}`")))
}

fn parse_list(v: &str) -> Vec<String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

/// Raw key/value pairs with line numbers; duplicates are an error.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
        let k = k.trim().to_string();
        if out.insert(k.clone(), (i + 1, v.trim().to_string())).is_some() {
            return Err(Error::Config(format!("line {}: key `{k}` set twice", i + 1)));
        }
    }
    Ok(out)
}

impl AuditConfig {
    pub fn load(path: impl AsRef<Path>, seed_override: Option<u64>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        Self::parse(&text, &base, seed_override)
    }

    pub fn parse(text: &str, base_dir: &Path, seed_override: Option<u64>) -> Result<Self> {
        let pairs = parse_pairs(text)?;
        let resolve = |v: &str| base_dir.join(v);
        let mut seed = None;
        let mut cfg = AuditConfig {
            text: text.to_string(),
            seed: 0,
            seed_overridden: seed_override.is_some(),
            data: None,
            data_display: None,
            target: "label".into(),
            sensitive: Vec::new(),
            algorithms: vec![Algorithm::Logistic, Algorithm::RandomForest, Algorithm::Bagging, Algorithm::Adaboost],
            output_dir: resolve("out"),
            settings: AuditSettings::with_seed(0),
            kind_overrides: BTreeMap::new(),
            mask: Vec::new(),
            hyperparameters: Vec::new(),
            model: None,
            row: None,
            synth: PlantedBiasConfig::default(),
            synth_file: "planted_bias.csv".into(),
        };
        for (key, (line, v)) in &pairs {
            let v = v.as_str();
            let at = |e: Error| match e {
                Error::Config(m) => Error::Config(format!("line {line}: {m}")),
                other => Error::Config(format!("line {line}: `{key}`: {other}")),
            };
            let s = &mut cfg.settings;
            match key.as_str() {
                "seed" => seed = Some(parse_num(key, v).map_err(at)?),
                "data" => {
                    cfg.data = Some(resolve(v));
                    cfg.data_display = Some(v.to_string());
                }
                "target" => cfg.target = v.to_string(),
                "sensitive" => cfg.sensitive = parse_list(v),
                "algorithms" => {
                    cfg.algorithms = parse_list(v).iter().map(|a| a.parse()).collect::<Result<_>>().map_err(at)?;
                    if cfg.algorithms.is_empty() {
                        return Err(at(Error::Config("`algorithms` is empty".into())));
                    }
                }
                "output_dir" => cfg.output_dir = resolve(v),
                "train_fraction" => s.train_fraction = parse_num(key, v).map_err(at)?,
                "bins" => s.bins = parse_num(key, v).map_err(at)?,
                "n_samples" => s.n_samples = parse_num(key, v).map_err(at)?,
                "lambda" => s.lambda = parse_num(key, v).map_err(at)?,
                "k" => s.k = parse_num(key, v).map_err(at)?,
                "sigma" => s.sigma = Some(parse_num(key, v).map_err(at)?),
                "budget" => s.budget = parse_num(key, v).map_err(at)?,
                "max_candidates" => s.max_candidates = parse_num(key, v).map_err(at)?,
                "top_k" => s.top_k = parse_num(key, v).map_err(at)?,
                "categorical" | "numeric" => {
                    let kind = if key == "numeric" { KindOverride::Numeric } else { KindOverride::Categorical };
                    for c in parse_list(v) {
                        if cfg.kind_overrides.insert(c.clone(), kind).is_some() {
                            return Err(at(Error::Config(format!("column `{c}` forced both numeric and categorical"))));
                        }
                    }
                }
                "mask" => cfg.mask = parse_list(v),
                "model" => cfg.model = Some(resolve(v)),
                "row" => cfg.row = Some(parse_num(key, v).map_err(at)?),
                "synth.n_rows" => cfg.synth.n_rows = parse_num(key, v).map_err(at)?,
                "synth.n_noise_features" => cfg.synth.n_noise_features = parse_num(key, v).map_err(at)?,
                "synth.bias_strength" => cfg.synth.bias_strength = parse_num(key, v).map_err(at)?,
                "synth.redundancy" => cfg.synth.redundancy = parse_num(key, v).map_err(at)?,
                "synth.extra_sensitive" => {
                    cfg.synth.extra_sensitive =
                        parse_list(v).iter().map(|x| parse_num(key, x)).collect::<Result<_>>().map_err(at)?
                }
                "synth.file" => cfg.synth_file = v.to_string(),
                other => match other.split_once('.') {
                    Some((alg, name)) if alg != "synth" => {
                        let alg: Algorithm = alg.parse().map_err(at)?;
                        ClassifierSpec::new(alg, 0).with(name, v).map_err(at)?;
                        cfg.hyperparameters.push((alg, name.to_string(), v.to_string()));
                    }
                    _ => return Err(at(Error::Config(format!("unknown key `{other}`")))),
                },
            }
        }
        cfg.seed = seed_override
            .or(seed)
            .ok_or_else(|| Error::Config("`seed` is mandatory (set it in the config or pass --seed)".into()))?;
        cfg.settings.seed = cfg.seed;
        cfg.synth.seed = rng::derive_named(cfg.seed, "synth");
        if !(cfg.settings.train_fraction > 0.0 && cfg.settings.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "`train_fraction` must lie in (0, 1), got {}",
                cfg.settings.train_fraction
            )));
        }
        for (key, bad) in [
            ("budget", cfg.settings.budget == 0),
            ("max_candidates", cfg.settings.max_candidates == 0),
            ("top_k", cfg.settings.top_k == 0),
            ("k", cfg.settings.k == 0),
            ("n_samples", cfg.settings.n_samples < 2),
            ("bins", cfg.settings.bins < 2),
            ("lambda", !(cfg.settings.lambda >= 0.0 && cfg.settings.lambda.is_finite())),
            ("sigma", cfg.settings.sigma.is_some_and(|s| !(s > 0.0 && s.is_finite()))),
        ] {
            if bad {
                return Err(Error::Config(format!("`{key}` is out of range")));
            }
        }
        Ok(cfg)
    }

    /// Classifier spec for one algorithm: configured hyperparameters and a
    /// seed derived from the master seed and the algorithm name.
    pub fn spec(&self, alg: Algorithm) -> Result<ClassifierSpec> {
        let mut spec = ClassifierSpec::new(alg, self.train_seed(alg));
        for (a, k, v) in &self.hyperparameters {
            if *a == alg {
                spec = spec.with(k, v)?;
            }
        }
        Ok(spec)
    }

    pub fn train_seed(&self, alg: Algorithm) -> u64 {
        rng::derive_named(self.seed, &format!("train:{}", alg.name()))
    }

    pub fn require_data(&self) -> Result<&Path> {
        self.data.as_deref().ok_or_else(|| Error::Config("`data` is required".into()))
    }

    pub fn data_label(&self) -> String {
        self.data_display.clone().unwrap_or_default()
    }

    /// Every stage seed, by stage name.
    pub fn seeds(&self) -> BTreeMap<String, u64> {
        let mut m = BTreeMap::new();
        m.insert("master".into(), self.seed);
        m.insert("split".into(), self.settings.split_seed());
        m.insert("candidates".into(), self.settings.candidate_seed());
        m.insert("lime".into(), self.settings.lime_seed());
        m.insert("synth".into(), self.synth.seed);
        for &a in &self.algorithms {
            m.insert(format!("train:{}", a.name()), self.train_seed(a));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<AuditConfig> {
        AuditConfig::parse(text, Path::new("/base"), None)
    }

    #[test]
    fn full_config() {
        let c = parse(
            "# audit\nseed = 7\ndata = d.csv\nsensitive = s, s_1\nalgorithms = tree, random_forest\n\
             random_forest.tree_count = 20\nbudget = 5\nsigma = 1.5\ncategorical = c\n",
        )
        .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.data, Some(PathBuf::from("/base/d.csv")));
        assert_eq!(c.sensitive, vec!["s", "s_1"]);
        assert_eq!(c.algorithms, vec![Algorithm::Tree, Algorithm::RandomForest]);
        assert_eq!(c.settings.budget, 5);
        assert_eq!(c.settings.sigma, Some(1.5));
        assert_eq!(c.output_dir, PathBuf::from("/base/out"));
        assert_eq!(c.kind_overrides["c"], KindOverride::Categorical);
        assert_eq!(c.spec(Algorithm::RandomForest).unwrap(), ClassifierSpec::new(Algorithm::RandomForest, c.train_seed(Algorithm::RandomForest)).with("tree_count", "20").unwrap());
    }

    #[test]
    fn seed_is_mandatory() {
        assert!(matches!(parse("data = x.csv"), Err(Error::Config(m)) if m.contains("seed")));
        let c = AuditConfig::parse("data = x.csv", Path::new(""), Some(3)).unwrap();
        assert_eq!(c.seed, 3);
        let c = AuditConfig::parse("seed = 1", Path::new(""), Some(3)).unwrap();
        assert!(c.seed_overridden && c.seed == 3);
    }

    #[test]
    fn errors_name_the_line_and_key() {
        let e = parse("seed = 1\nbogus = 2").unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("bogus"), "{e}");
        let e = parse("seed = x").unwrap_err().to_string();
        assert!(e.contains("`seed`"), "{e}");
        let e = parse("seed = 1\nalgorithms = svm").unwrap_err().to_string();
        assert!(e.contains("svm"), "{e}");
        assert!(parse("seed = 1\nseed = 2").is_err());
        assert!(parse("seed = 1\nrandom_forest.depth_limit = 3").is_err());
        assert!(parse("seed = 1\ntrain_fraction = 1.5").is_err());
        assert!(parse("seed = 1\njunk line").is_err());
        assert!(parse("seed = 1\ncategorical = a\nnumeric = a").is_err());
    }
}
