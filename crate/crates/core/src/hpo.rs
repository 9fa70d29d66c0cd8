//! Hyperparameter grid enumeration and per-trial config files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HpoError {
    #[error("grid dimension `{0}` is empty")]
    EmptyDimension(&'static str),
    #[error("grid dimension `{dimension}` has invalid value {value}")]
    InvalidValue {
        dimension: &'static str,
        value: String,
    },
    #[error("template already defines `{0}`")]
    TemplateKeyCollision(String),
    #[error("template must be a JSON object")]
    TemplateNotObject,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = HpoError> = std::result::Result<T, E>;

/// Candidate values for each tuned hyperparameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperparameterGrid {
    pub epochs: Vec<u32>,
    pub batch_size: Vec<u32>,
    #[serde(alias = "gradient_accumulation_steps")]
    pub grad_accum_steps: Vec<u32>,
    pub learning_rate: Vec<f64>,
    pub weight_decay: Vec<f64>,
    pub mixed_precision: Vec<bool>,
    /// Reserved for a random-search mode; grid enumeration ignores it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl HyperparameterGrid {
    /// Search space used for fine-tuning NLLB on EN↔GA and EN↔MR.
    pub fn nllb_search_space() -> Self {
        Self {
            epochs: vec![1, 3, 5],
            batch_size: vec![8, 12, 16],
            grad_accum_steps: vec![2, 4, 8],
            learning_rate: vec![1e-5, 3e-5, 9e-5],
            weight_decay: vec![0.01, 0.1, 1.0, 2.0],
            mixed_precision: vec![false, true],
            seed: None,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| HpoError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let grid: Self = serde_json::from_str(&text).map_err(|source| HpoError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        let non_empty = [
            ("epochs", self.epochs.is_empty()),
            ("batch_size", self.batch_size.is_empty()),
            ("grad_accum_steps", self.grad_accum_steps.is_empty()),
            ("learning_rate", self.learning_rate.is_empty()),
            ("weight_decay", self.weight_decay.is_empty()),
            ("mixed_precision", self.mixed_precision.is_empty()),
        ];
        if let Some((name, _)) = non_empty.iter().find(|(_, empty)| *empty) {
            return Err(HpoError::EmptyDimension(name));
        }
        let positive_int = [
            ("epochs", &self.epochs),
            ("batch_size", &self.batch_size),
            ("grad_accum_steps", &self.grad_accum_steps),
        ];
        for (dimension, values) in positive_int {
            if let Some(v) = values.iter().find(|&&v| v == 0) {
                return Err(HpoError::InvalidValue {
                    dimension,
                    value: v.to_string(),
                });
            }
        }
        if let Some(v) = self
            .learning_rate
            .iter()
            .find(|v| !(v.is_finite() && **v > 0.0))
        {
            return Err(HpoError::InvalidValue {
                dimension: "learning_rate",
                value: v.to_string(),
            });
        }
        if let Some(v) = self
            .weight_decay
            .iter()
            .find(|v| !(v.is_finite() && **v >= 0.0))
        {
            return Err(HpoError::InvalidValue {
                dimension: "weight_decay",
                value: v.to_string(),
            });
        }
        Ok(())
    }

    pub fn trial_count(&self) -> usize {
        self.epochs.len()
            * self.batch_size.len()
            * self.grad_accum_steps.len()
            * self.learning_rate.len()
            * self.weight_decay.len()
            * self.mixed_precision.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trial_index: usize,
    pub epochs: u32,
    pub batch_size: u32,
    #[serde(rename = "gradient_accumulation_steps")]
    pub grad_accum_steps: u32,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub mixed_precision: bool,
}

/// Cartesian product of the grid, first dimension varying slowest.
pub fn enumerate_grid(grid: &HyperparameterGrid) -> Result<Vec<TrialConfig>> {
    grid.validate()?;
    let mut trials = Vec::with_capacity(grid.trial_count());
    for &epochs in &grid.epochs {
        for &batch_size in &grid.batch_size {
            for &grad_accum_steps in &grid.grad_accum_steps {
                for &learning_rate in &grid.learning_rate {
                    for &weight_decay in &grid.weight_decay {
                        for &mixed_precision in &grid.mixed_precision {
                            trials.push(TrialConfig {
                                trial_index: trials.len(),
                                epochs,
                                batch_size,
                                grad_accum_steps,
                                learning_rate,
                                weight_decay,
                                mixed_precision,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(trials)
}

/// Writes `trial_{index}.json` for each trial, with the trial's values laid
/// over `template`. Returns the number of files written.
pub fn emit_configs(trials: &[TrialConfig], out_dir: &Path, template: &Value) -> Result<usize> {
    let template = template.as_object().ok_or(HpoError::TemplateNotObject)?;
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| HpoError::Io { path, source }
    };
    // every trial has the same keys, so checking one covers all
    if let Some(first) = trials.first() {
        let keys = trial_object(first);
        if let Some(k) = keys.keys().find(|k| template.contains_key(*k)) {
            return Err(HpoError::TemplateKeyCollision(k.clone()));
        }
    }
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    for trial in trials {
        let mut merged: Map<String, Value> = template.clone();
        merged.extend(trial_object(trial));
        let path = out_dir.join(format!("trial_{}.json", trial.trial_index));
        let text = serde_json::to_string_pretty(&Value::Object(merged)).expect("json value");
        fs::write(&path, text + "\n").map_err(io_err(&path))?;
    }
    Ok(trials.len())
}

fn trial_object(trial: &TrialConfig) -> Map<String, Value> {
    match serde_json::to_value(trial).expect("trial serializes") {
        Value::Object(map) => map,
        _ => unreachable!("trial serializes to an object"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn singleton() -> HyperparameterGrid {
        HyperparameterGrid {
            epochs: vec![5],
            batch_size: vec![16],
            grad_accum_steps: vec![8],
            learning_rate: vec![3e-5],
            weight_decay: vec![0.1],
            mixed_precision: vec![true],
            seed: None,
        }
    }

    #[test]
    fn singleton_grid_has_one_trial() {
        let trials = enumerate_grid(&singleton()).unwrap();
        assert_eq!(trials.len(), 1);
        assert_eq!(trials[0].trial_index, 0);
    }

    #[test]
    fn lexicographic_order() {
        let mut g = singleton();
        g.epochs = vec![1, 3];
        g.mixed_precision = vec![false, true];
        let t = enumerate_grid(&g).unwrap();
        let keys: Vec<(u32, bool)> = t.iter().map(|t| (t.epochs, t.mixed_precision)).collect();
        assert_eq!(keys, [(1, false), (1, true), (3, false), (3, true)]);
    }

    #[test]
    fn empty_dimension() {
        let mut g = singleton();
        g.weight_decay.clear();
        assert!(matches!(
            enumerate_grid(&g),
            Err(HpoError::EmptyDimension("weight_decay"))
        ));
        let mut g = singleton();
        g.learning_rate = vec![0.0];
        assert!(matches!(
            enumerate_grid(&g),
            Err(HpoError::InvalidValue { .. })
        ));
        let mut g = singleton();
        g.batch_size = vec![0];
        assert!(matches!(
            enumerate_grid(&g),
            Err(HpoError::InvalidValue { .. })
        ));
    }

    #[test]
    fn grid_file_accepts_long_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.json");
        fs::write(
            &path,
            r#"{"epochs":[1],"batch_size":[8],"gradient_accumulation_steps":[2],"learning_rate":[1e-5],"weight_decay":[0],"mixed_precision":[false]}"#,
        )
        .unwrap();
        let g = HyperparameterGrid::from_file(&path).unwrap();
        assert_eq!(g.grad_accum_steps, [2]);
    }

    #[test]
    fn emits_merged_configs() {
        let dir = tempfile::tempdir().unwrap();
        let trials = enumerate_grid(&singleton()).unwrap();
        let n = emit_configs(&trials, dir.path(), &json!({"model": "nllb-200-3.3B"})).unwrap();
        assert_eq!(n, 1);
        let v: Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("trial_0.json")).unwrap())
                .unwrap();
        assert_eq!(v["model"], "nllb-200-3.3B");
        assert_eq!(v["gradient_accumulation_steps"], 8);
        assert_eq!(v["learning_rate"], 3e-5);
        assert_eq!(v["mixed_precision"], true);
    }

    #[test]
    fn empty_trial_list_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        assert_eq!(emit_configs(&[], &out, &json!({})).unwrap(), 0);
        assert_eq!(fs::read_dir(&out).unwrap().count(), 0);
    }

    #[test]
    fn template_collision() {
        let dir = tempfile::tempdir().unwrap();
        let trials = enumerate_grid(&singleton()).unwrap();
        assert!(matches!(
            emit_configs(&trials, dir.path(), &json!({"epochs": 3})),
            Err(HpoError::TemplateKeyCollision(k)) if k == "epochs"
        ));
        assert!(matches!(
            emit_configs(&trials, dir.path(), &json!([1])),
            Err(HpoError::TemplateNotObject)
        ));
    }
}
