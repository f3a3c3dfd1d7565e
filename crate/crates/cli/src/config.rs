use std::path::{Path, PathBuf};

use qkern_core::encoding::{DataPoint, EncodingSpec};
use qkern_core::training::LossSpec;
use qkern_core::variational::{Ansatz, TrainingParams};
use qkern_core::Dataset;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    KernelMatrix,
    Fourier,
    TrainKernel,
    TrainVariational,
    Compare,
    Landscape,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::KernelMatrix => "kernel-matrix",
            Task::Fourier => "fourier",
            Task::TrainKernel => "train-kernel",
            Task::TrainVariational => "train-variational",
            Task::Compare => "compare",
            Task::Landscape => "landscape",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnsatzConfig {
    /// `"reference"`: the single-qubit `R_Z R_Y R_Z` ansatz.
    Named(String),
    Custom(Ansatz),
}

impl AnsatzConfig {
    pub fn build(&self) -> Result<Ansatz, CliError> {
        match self {
            AnsatzConfig::Named(n) if n == "reference" => Ok(Ansatz::reference()),
            AnsatzConfig::Named(n) => Err(CliError::Usage(format!("unknown ansatz '{n}'"))),
            AnsatzConfig::Custom(a) => Ok(a.clone()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineDataset {
    pub inputs: Vec<DataPoint>,
    pub labels: Vec<f64>,
}

/// One grid axis: `n` points `lo + k (hi − lo) / n`, `k = 0..n` (upper end excluded).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridAxis {
    pub fn points(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| self.lo + k as f64 * (self.hi - self.lo) / self.n as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// The fixed first kernel argument.
    pub reference: Vec<f64>,
    pub axes: Vec<GridAxis>,
}

pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub encoding: EncodingSpec,
    /// CSV file, relative to the config file.
    #[serde(default)]
    pub dataset_path: Option<PathBuf>,
    #[serde(default)]
    pub dataset: Option<InlineDataset>,
    #[serde(default)]
    pub loss: Option<LossSpec>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub c_box: Option<f64>,
    #[serde(default)]
    pub lr: Option<f64>,
    #[serde(default)]
    pub epochs: Option<usize>,
    #[serde(default)]
    pub restarts: Option<usize>,
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Random input pairs for the series-vs-simulation check.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub enumeration_cap: Option<usize>,
    #[serde(default)]
    pub ansatz: Option<AnsatzConfig>,
    #[serde(default)]
    pub observable_qubit: Option<usize>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| usage(format!("invalid config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or(0.0)
    }

    pub fn loss(&self) -> LossSpec {
        self.loss.unwrap_or(LossSpec::SquaredError)
    }

    pub fn c_box(&self) -> f64 {
        self.c_box.unwrap_or(10.0)
    }

    pub fn training_params(&self) -> TrainingParams {
        let d = TrainingParams::default();
        TrainingParams {
            lr: self.lr.unwrap_or(d.lr),
            epochs: self.epochs.unwrap_or(d.epochs),
            restarts: self.restarts.unwrap_or(d.restarts),
            seed: self.seed(),
            c_box: self.c_box(),
        }
    }

    /// Range checks and per-task required parameters.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(l) = self.lambda {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(usage(format!("lambda must be >= 0, got {l}")));
            }
        }
        if let Some(c) = self.c_box {
            if !(c > 0.0 && c.is_finite()) {
                return Err(usage(format!("c_box must be > 0, got {c}")));
            }
        }
        if let Some(lr) = self.lr {
            if !(lr > 0.0 && lr.is_finite()) {
                return Err(usage(format!("lr must be > 0, got {lr}")));
            }
        }
        if self.epochs == Some(0) {
            return Err(usage("epochs must be >= 1"));
        }
        if self.restarts == Some(0) {
            return Err(usage("restarts must be >= 1"));
        }
        if self.shots == Some(0) {
            return Err(usage("shots must be >= 1"));
        }
        if self.samples == Some(0) {
            return Err(usage("samples must be >= 1"));
        }
        if self.dataset_path.is_some() && self.dataset.is_some() {
            return Err(usage("give either dataset_path or dataset, not both"));
        }
        let needs_data = matches!(
            self.task,
            Task::KernelMatrix | Task::TrainKernel | Task::TrainVariational | Task::Compare
        );
        if needs_data && self.dataset_path.is_none() && self.dataset.is_none() {
            return Err(usage(format!("task {} needs dataset_path or dataset", self.task.name())));
        }
        match self.task {
            Task::Fourier => {
                if !matches!(self.encoding, EncodingSpec::GeneralEvolution(_)) {
                    return Err(usage("task fourier needs a general_evolution encoding"));
                }
            }
            Task::TrainVariational | Task::Compare => {
                if self.lr.is_none() || self.epochs.is_none() {
                    return Err(usage(format!("task {} needs lr and epochs", self.task.name())));
                }
            }
            Task::Landscape => {
                let grid = self.grid.as_ref().ok_or_else(|| usage("task landscape needs grid"))?;
                if grid.axes.len() != grid.reference.len() || grid.axes.is_empty() {
                    return Err(usage("grid needs one axis per reference coordinate"));
                }
                let mut total = 1usize;
                for a in &grid.axes {
                    if a.n == 0 || !(a.lo.is_finite() && a.hi.is_finite()) {
                        return Err(usage("grid axes need n >= 1 and finite bounds"));
                    }
                    total = total.saturating_mul(a.n);
                }
                if total > MAX_GRID_POINTS {
                    return Err(usage(format!("grid has {total} points, limit is {MAX_GRID_POINTS}")));
                }
            }
            Task::KernelMatrix | Task::TrainKernel => {}
        }
        Ok(())
    }

    /// The dataset, reading `dataset_path` relative to `base_dir`.
    pub fn dataset(&self, base_dir: &Path) -> Result<Dataset, CliError> {
        if let Some(d) = &self.dataset {
            return Ok(Dataset::new(d.inputs.clone(), d.labels.clone())?);
        }
        let rel = self
            .dataset_path
            .as_ref()
            .ok_or_else(|| usage(format!("task {} needs a dataset", self.task.name())))?;
        let path = if rel.is_absolute() { rel.clone() } else { base_dir.join(rel) };
        Ok(load_dataset(&path)?)
    }
}

/// Reads a `x_1,…,x_N,y` CSV file.
pub fn load_dataset(path: &Path) -> qkern_core::Result<Dataset> {
    Dataset::load(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> Result<ExperimentConfig, CliError> {
        let c: ExperimentConfig = serde_json::from_str(json).map_err(|e| CliError::Usage(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    const RX: &str = r#"{"strategy": "rotation", "params": {"axis": "X"}}"#;

    #[test]
    fn minimal_landscape() {
        let c = parse(&format!(
            r#"{{"task": "landscape", "encoding": {RX}, "grid": {{"reference": [0], "axes": [{{"lo": -1, "hi": 1, "n": 4}}]}}}}"#
        ))
        .unwrap();
        assert_eq!(c.grid.unwrap().axes[0].points(), vec![-1.0, -0.5, 0.0, 0.5]);
    }

    #[test]
    fn range_checks() {
        for bad in [
            r#""lambda": -1"#,
            r#""epochs": 0, "lr": 0.1"#,
            r#""shots": 0"#,
            r#""c_box": 0"#,
        ] {
            let json = format!(
                r#"{{"task": "kernel-matrix", "encoding": {RX}, "dataset": {{"inputs": [[0]], "labels": [1]}}, {bad}}}"#
            );
            assert!(matches!(parse(&json), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn required_parameters() {
        assert!(parse(&format!(r#"{{"task": "kernel-matrix", "encoding": {RX}}}"#)).is_err());
        assert!(parse(&format!(r#"{{"task": "fourier", "encoding": {RX}}}"#)).is_err());
        assert!(parse(&format!(
            r#"{{"task": "compare", "encoding": {RX}, "dataset": {{"inputs": [[0]], "labels": [1]}}}}"#
        ))
        .is_err());
        assert!(parse(&format!(r#"{{"task": "kernel-matrix", "encoding": {RX}, "typo": 1}}"#)).is_err());
    }

    #[test]
    fn ansatz_forms() {
        assert_eq!(AnsatzConfig::Named("reference".into()).build().unwrap(), Ansatz::reference());
        assert!(AnsatzConfig::Named("other".into()).build().is_err());
        let custom: AnsatzConfig = serde_json::from_str(
            r#"{"n_qubits": 1, "n_params": 1, "gates": [{"gate": "rotation", "axis": "Y", "qubit": 0, "param": 0}]}"#,
        )
        .unwrap();
        assert_eq!(custom.build().unwrap().n_params(), 1);
    }
}
