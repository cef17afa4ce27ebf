//! Run configuration: a TOML file with strict keys plus CLI overrides.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use tser_core::learn::{GbdtLearner, KnnLearner, Learner, Regime, RidgeLearner};
use tser_core::normalize::ScaleFit;
use tser_core::resample::ResampleMethod;

use crate::{BenchError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    /// Output directory; the `--out` flag overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub data: DataConfig,
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub learner: LearnerConfig,
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodConfig>,
    #[serde(default)]
    pub comparison: ComparisonConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// Long-format delimited file (`unique_id,ds,y`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Synthetic collection instead of a file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub n_series: usize,
    pub length: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_heterogeneity")]
    pub heterogeneity: f64,
}

fn default_heterogeneity() -> f64 {
    0.8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Lag count q of the time delay embedding.
    #[serde(default = "default_lags")]
    pub lags: usize,
    pub horizon: usize,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_frequency")]
    pub frequency: String,
    /// Seasonal period of the MASE naive reference.
    #[serde(default = "default_season")]
    pub season_period: usize,
    #[serde(default)]
    pub scale_fit: ScaleFitConfig,
}

fn default_lags() -> usize {
    10
}

fn default_train_fraction() -> f64 {
    0.7
}

fn default_frequency() -> String {
    "unknown".into()
}

fn default_season() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleFitConfig {
    #[default]
    Train,
    Full,
}

impl From<ScaleFitConfig> for ScaleFit {
    fn from(value: ScaleFitConfig) -> Self {
        match value {
            ScaleFitConfig::Train => ScaleFit::Train,
            ScaleFitConfig::Full => ScaleFit::Full,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum LearnerConfig {
    Knn {
        #[serde(default = "default_neighbors")]
        k: usize,
        #[serde(default)]
        weighted: bool,
    },
    Ridge {
        #[serde(default = "default_lambda")]
        lambda: f64,
    },
    Gbdt {
        #[serde(default = "default_rounds")]
        rounds: usize,
        #[serde(default = "default_depth")]
        max_depth: usize,
        #[serde(default = "default_learning_rate")]
        learning_rate: f64,
        #[serde(default = "default_min_child")]
        min_child_samples: usize,
        #[serde(default = "default_lambda_l2")]
        lambda_l2: f64,
    },
}

fn default_neighbors() -> usize {
    10
}

fn default_lambda() -> f64 {
    1e-3
}

fn default_rounds() -> usize {
    50
}

fn default_depth() -> usize {
    3
}

fn default_learning_rate() -> f64 {
    0.1
}

fn default_min_child() -> usize {
    7
}

fn default_lambda_l2() -> f64 {
    1.0
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig::Knn {
            k: default_neighbors(),
            weighted: false,
        }
    }
}

impl LearnerConfig {
    pub fn build(&self) -> Box<dyn Learner> {
        match *self {
            LearnerConfig::Knn { k, weighted } => Box::new(KnnLearner { k, weighted }),
            LearnerConfig::Ridge { lambda } => Box::new(RidgeLearner { lambda }),
            LearnerConfig::Gbdt {
                rounds,
                max_depth,
                learning_rate,
                min_child_samples,
                lambda_l2,
            } => Box::new(GbdtLearner {
                rounds,
                max_depth,
                learning_rate,
                min_child_samples,
                lambda_l2,
            }),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            LearnerConfig::Knn { k, weighted } => format!("knn(k={k}, weighted={weighted})"),
            LearnerConfig::Ridge { lambda } => format!("ridge(lambda={lambda})"),
            LearnerConfig::Gbdt {
                rounds,
                max_depth,
                learning_rate,
                min_child_samples,
                lambda_l2,
            } => {
                format!(
                    "gbdt(rounds={rounds}, max_depth={max_depth}, learning_rate={learning_rate}, min_child_samples={min_child_samples}, lambda_l2={lambda_l2})"
                )
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub regime: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resampler: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn default_methods() -> Vec<MethodConfig> {
    let tser = |resampler: &str| MethodConfig {
        regime: "tser".into(),
        resampler: Some(resampler.into()),
        k: None,
        ratio: None,
        label: None,
    };
    vec![
        MethodConfig {
            regime: "global".into(),
            resampler: None,
            k: None,
            ratio: None,
            label: None,
        },
        MethodConfig {
            regime: "local".into(),
            resampler: None,
            k: None,
            ratio: None,
            label: None,
        },
        tser("smote"),
        tser("adasyn"),
        tser("bsmote"),
        tser("nearmiss"),
    ]
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonConfig {
    #[serde(default = "default_rope")]
    pub rope: [f64; 2],
    #[serde(default = "default_draws")]
    pub draws: usize,
}

fn default_rope() -> [f64; 2] {
    [-5.0, 5.0]
}

fn default_draws() -> usize {
    50_000
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self {
            rope: default_rope(),
            draws: default_draws(),
        }
    }
}

/// Ratio-sweep grid: fractions of the gap between a dataset's natural
/// minority share and a balanced one. The runner prepends the no-resampling
/// endpoint, so the default 19-point grid yields 20 variants.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
}

fn default_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 19.0).collect()
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid: default_grid(),
        }
    }
}

/// A resolved method: what one column of the report means.
#[derive(Debug, Clone)]
pub struct MethodSpec {
    pub label: String,
    pub regime: Regime,
    pub resampler: ResampleMethod,
    pub k: usize,
    pub ratio: f64,
    /// Sweep variants carry the balance fraction instead of a fixed ratio.
    pub ratio_lambda: Option<f64>,
}

impl MethodSpec {
    pub fn plain(label: &str, regime: Regime) -> Self {
        Self {
            label: label.into(),
            regime,
            resampler: ResampleMethod::None,
            k: default_neighbors(),
            ratio: 1.0,
            ratio_lambda: None,
        }
    }
}

fn default_label(regime: Regime, resampler: ResampleMethod) -> String {
    let tag = match resampler {
        ResampleMethod::Smote => "SMOTE",
        ResampleMethod::Adasyn => "ADASYN",
        ResampleMethod::BorderlineSmote => "BSMOTE",
        ResampleMethod::NearMiss => "NM",
        ResampleMethod::None => "none",
    };
    match regime {
        Regime::Global => "Global".into(),
        Regime::Local => "Local".into(),
        Regime::Tser => format!("TSER({tag})"),
        Regime::TserLocal => "TSER(Local)".into(),
        Regime::TserAll => "TSER(all)".into(),
    }
}

impl MethodConfig {
    pub fn resolve(&self) -> Result<MethodSpec> {
        let regime = Regime::from_str(&self.regime)
            .map_err(|_| BenchError::Config(format!("unknown regime '{}'", self.regime)))?;
        if !regime.needs_plan()
            && (self.resampler.is_some() || self.k.is_some() || self.ratio.is_some())
        {
            return Err(BenchError::Config(format!(
                "regime '{}' carries no resampler settings",
                self.regime
            )));
        }
        let resampler = match &self.resampler {
            Some(name) => ResampleMethod::from_str(name)
                .map_err(|_| BenchError::Config(format!("unknown resampler '{name}'")))?,
            None if regime.needs_plan() => ResampleMethod::Smote,
            None => ResampleMethod::None,
        };
        let ratio = self.ratio.unwrap_or(1.0);
        if regime.needs_plan() && !(ratio > 0.0 && ratio <= 1.0) {
            return Err(BenchError::Config(format!(
                "ratio {ratio} must lie in (0, 1]"
            )));
        }
        Ok(MethodSpec {
            label: self
                .label
                .clone()
                .unwrap_or_else(|| default_label(regime, resampler)),
            regime,
            resampler,
            k: self.k.unwrap_or_else(default_neighbors),
            ratio,
            ratio_lambda: None,
        })
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(BenchError::io(path))?;
        let config: ExperimentConfig =
            toml::from_str(&text).map_err(|e| BenchError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.data.path, &self.data.generator) {
            (Some(_), Some(_)) => {
                return Err(BenchError::Config(
                    "data.path and data.generator are mutually exclusive".into(),
                ))
            }
            (None, None) => {
                return Err(BenchError::Config(
                    "one of data.path or data.generator is required".into(),
                ))
            }
            _ => {}
        }
        if self.protocol.lags == 0 || self.protocol.horizon == 0 {
            return Err(BenchError::Config(
                "lags and horizon must be at least 1".into(),
            ));
        }
        if !(self.protocol.train_fraction > 0.0 && self.protocol.train_fraction < 1.0) {
            return Err(BenchError::Config(
                "train_fraction must lie in (0, 1)".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(BenchError::Config("methods list must not be empty".into()));
        }
        let mut labels = std::collections::BTreeSet::new();
        for method in self.resolved_methods()? {
            if !labels.insert(method.label.clone()) {
                return Err(BenchError::Config(format!(
                    "duplicate method label '{}'",
                    method.label
                )));
            }
        }
        let rope = self.comparison.rope;
        if rope[0].is_nan() || rope[1].is_nan() || rope[0] >= rope[1] {
            return Err(BenchError::Config(
                "comparison.rope must be an ordered pair".into(),
            ));
        }
        let grid = &self.sweep.grid;
        if grid.is_empty()
            || grid.iter().any(|g| !(*g > 0.0 && *g <= 1.0))
            || grid.windows(2).any(|w| w[0] >= w[1])
            || *grid.last().expect("non-empty") != 1.0
        {
            return Err(BenchError::Config(
                "sweep.grid must be strictly increasing within (0, 1] and end at 1.0".into(),
            ));
        }
        Ok(())
    }

    pub fn resolved_methods(&self) -> Result<Vec<MethodSpec>> {
        self.methods.iter().map(MethodConfig::resolve).collect()
    }

    /// Stable digest of the run-relevant configuration (the output directory
    /// does not participate).
    pub fn config_hash(&self) -> String {
        let mut hashed = self.clone();
        hashed.out = None;
        let canonical = toml::to_string(&hashed).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Applies CLI overrides.
    pub fn with_overrides(mut self, seed: Option<u64>, out: Option<PathBuf>) -> Self {
        if let Some(seed) = seed {
            self.seed = seed;
        }
        if let Some(out) = out {
            self.out = Some(out);
        }
        self
    }

    pub fn output_dir(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| BenchError::Config("no output directory (config `out` or --out)".into()))
    }
}
