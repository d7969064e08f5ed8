use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::TemporalModel;
use crate::embed::{BaseMethod, FusionMode, FusionParams};
use crate::error::{Error, Result};
use crate::eval::{LogisticParams, ProtocolParams};
use crate::models::{TsgParams, WtrgOptions};
use crate::stream::{EdgeListFormat, ParseOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub path: PathBuf,
    /// Reported dataset name; the file stem when absent.
    pub name: Option<String>,
    pub format: EdgeListFormat,
    pub directed: bool,
    pub skip_malformed: bool,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            path: PathBuf::new(),
            name: None,
            format: EdgeListFormat::Auto,
            directed: false,
            skip_malformed: false,
        }
    }
}

impl DatasetConfig {
    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into())
        })
    }

    pub fn parse_options(&self) -> ParseOptions {
        ParseOptions {
            format: self.format,
            directed: self.directed,
            skip_malformed: self.skip_malformed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Snapshot span in the dataset's time unit. Required.
    pub tau: f64,
    pub train_count: usize,
    /// First training tau-snapshot (0-based); `floor(T/3)` when absent.
    pub start_offset: Option<usize>,
    /// Share of the labeled hold-out pairs used to fit the classifier; the
    /// rest are scored. The split is stratified.
    pub classifier_train_fraction: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            tau: 0.0,
            train_count: 6,
            start_offset: None,
            classifier_train_fraction: 0.5,
        }
    }
}

impl ProtocolConfig {
    pub fn params(&self) -> ProtocolParams {
        ProtocolParams {
            tau: self.tau,
            train_count: self.train_count,
            start_offset: self.start_offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelsConfig {
    pub names: Vec<String>,
    pub alpha: f64,
    /// Builds a TSG time-series with this lag instead of one summary graph.
    pub tsg_lag: Option<usize>,
    pub rescale_time: bool,
}

impl Default for ModelsConfig {
    fn default() -> Self {
        Self {
            names: TemporalModel::ALL
                .iter()
                .map(|m| m.name().to_owned())
                .collect(),
            alpha: 0.8,
            tsg_lag: None,
            rescale_time: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingConfig {
    pub methods: Vec<String>,
    /// Width of the fused node embedding.
    pub dim: usize,
    pub fusion: FusionMode,
    pub theta: f64,
    /// Per-snapshot widths for concatenation; an even split when absent.
    pub concat_dims: Option<Vec<usize>>,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            methods: BaseMethod::ALL
                .iter()
                .map(|m| m.name().to_owned())
                .collect(),
            dim: 128,
            fusion: FusionMode::Smooth,
            theta: 0.8,
            concat_dims: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedConfig {
    pub sampling: u64,
    pub embedding: u64,
    pub split: u64,
}

impl Default for SeedConfig {
    fn default() -> Self {
        Self::all(0)
    }
}

impl SeedConfig {
    pub fn all(seed: u64) -> Self {
        Self {
            sampling: seed,
            embedding: seed,
            split: seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Unknown {
                kind: "report format",
                name: s.to_owned(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: ReportFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("results"),
            format: ReportFormat::Csv,
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    pub protocol: ProtocolConfig,
    pub models: ModelsConfig,
    pub embedding: EmbeddingConfig,
    pub classifier: LogisticParams,
    pub seeds: SeedConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    /// Parses a TOML document. Relative paths stay as written.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a TOML file; relative dataset and output paths are resolved
    /// against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if config.dataset.path.is_relative() {
            config.dataset.path = base.join(&config.dataset.path);
        }
        if config.output.dir.is_relative() {
            config.output.dir = base.join(&config.output.dir);
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn model_list(&self) -> Result<Vec<TemporalModel>> {
        parse_unique(&self.models.names, "model")
    }

    pub fn method_list(&self) -> Result<Vec<BaseMethod>> {
        parse_unique(&self.embedding.methods, "method")
    }

    pub fn tsg_params(&self) -> TsgParams {
        TsgParams {
            alpha: self.models.alpha,
            lag: self.models.tsg_lag,
        }
    }

    pub fn wtrg_options(&self) -> WtrgOptions {
        WtrgOptions {
            rescale_time: self.models.rescale_time,
        }
    }

    pub fn fusion_params(&self) -> FusionParams {
        FusionParams {
            mode: self.embedding.fusion,
            theta: self.embedding.theta,
            dims_per_snapshot: self.embedding.concat_dims.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dataset.path.as_os_str().is_empty() {
            return Err(Error::Config("dataset.path is required".into()));
        }
        self.validate_parameters()
    }

    /// Every check of [`validate`](Self::validate) except the dataset path.
    pub fn validate_parameters(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let p = &self.protocol;
        if !(p.tau.is_finite() && p.tau > 0.0) {
            return bad(format!("protocol.tau must be positive, got {}", p.tau));
        }
        if p.train_count == 0 {
            return bad("protocol.train_count must be at least 1".into());
        }
        if !(p.classifier_train_fraction > 0.0 && p.classifier_train_fraction < 1.0) {
            return bad(format!(
                "protocol.classifier_train_fraction must lie in (0, 1), got {}",
                p.classifier_train_fraction
            ));
        }
        if !(self.models.alpha > 0.0 && self.models.alpha < 1.0) {
            return bad(format!(
                "models.alpha must lie in (0, 1), got {}",
                self.models.alpha
            ));
        }
        if self.models.tsg_lag == Some(0) {
            return bad("models.tsg_lag must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.embedding.theta) {
            return bad(format!(
                "embedding.theta must lie in [0, 1], got {}",
                self.embedding.theta
            ));
        }
        if self.embedding.dim < 4 {
            return bad(format!(
                "embedding.dim must be at least 4, got {}",
                self.embedding.dim
            ));
        }
        let c = &self.classifier;
        if !(c.reg_strength >= 0.0 && c.tol > 0.0 && c.max_iter > 0) {
            return bad("classifier needs reg_strength >= 0, tol > 0 and max_iter > 0".into());
        }
        if self.model_list()?.is_empty() || self.method_list()?.is_empty() {
            return bad("at least one model and one method are required".into());
        }
        Ok(())
    }
}

fn parse_unique<T>(names: &[String], kind: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr<Err = Error> + PartialEq,
{
    let mut out: Vec<T> = Vec::with_capacity(names.len());
    for n in names {
        let v: T = n.parse()?;
        if out.contains(&v) {
            return Err(Error::Config(format!("{kind} `{n}` listed twice")));
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_sections() {
        let c = ExperimentConfig::from_toml("[dataset]\npath = \"x.tsv\"\n[protocol]\ntau = 2.5\n")
            .unwrap();
        c.validate().unwrap();
        assert_eq!(c.embedding.theta, 0.8);
        assert_eq!(c.models.alpha, 0.8);
        assert_eq!(c.embedding.dim, 128);
        assert_eq!(c.protocol.train_count, 6);
        assert_eq!(c.classifier.reg_strength, 1.0);
        assert_eq!(c.classifier.tol, 1e-4);
        assert_eq!(c.model_list().unwrap().len(), 9);
        assert_eq!(c.method_list().unwrap().len(), 2);
    }

    #[test]
    fn toml_round_trip() {
        let mut c = ExperimentConfig::default();
        c.dataset.path = "data/a.tsv".into();
        c.protocol.tau = 3.0;
        c.models.tsg_lag = Some(2);
        let back = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn invalid_values_are_rejected() {
        let base = || {
            let mut c = ExperimentConfig::default();
            c.dataset.path = "a".into();
            c.protocol.tau = 1.0;
            c
        };
        base().validate().unwrap();
        type Mutation = Box<dyn Fn(&mut ExperimentConfig)>;
        let cases: Vec<Mutation> = vec![
            Box::new(|c| c.embedding.theta = 1.5),
            Box::new(|c| c.models.alpha = 1.0),
            Box::new(|c| c.models.alpha = 0.0),
            Box::new(|c| c.embedding.dim = 3),
            Box::new(|c| c.protocol.tau = 0.0),
            Box::new(|c| c.models.names = vec!["SG-tau".into(), "node2vec".into()]),
            Box::new(|c| c.embedding.methods = vec!["line".into()]),
            Box::new(|c| c.models.names = vec!["Static".into(), "static".into()]),
            Box::new(|c| c.models.names.clear()),
        ];
        for f in cases {
            let mut c = base();
            f(&mut c);
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_toml("[protocol]\ntua = 1.0\n").is_err());
    }
}
