use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::PolicyKind;
use crate::error::{Error, Result};
use crate::qagent::{DiscretizationScheme, Hyperparams};
use crate::sim::SimConfig;
use crate::workload::{self, generate_synthetic, SynthParams, Workload};

/// Where an experiment's tasks come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WorkloadSpec {
    /// A trace CSV. Relative paths resolve against the config file's directory.
    Trace(PathBuf),
    Synthetic(SynthParams),
    /// The bundled 200-task sample trace.
    Sample,
}

/// JSON experiment description. Unknown keys are rejected.
///
/// ```json
/// {
///   "fleet": { "machines": 8, "cpu_capacity": 8, "mem_capacity": 16 },
///   "workload": { "synthetic": { "task_count": 200, "arrival_rate": 0.5,
///                 "duration_range": [5, 30], "cpu_range": [1, 6],
///                 "mem_range": [1, 12], "seed": 7 } },
///   "policies": ["round-robin", "priority", "dra", "q-greedy"],
///   "hyperparams": { "alpha": 0.1, "episodes": 200 },
///   "seed": 42
/// }
/// ```
///
/// `hyperparams` and `discretization` accept any subset of their fields;
/// `seed` drives agent exploration, replay sampling, and evaluation episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub fleet: SimConfig,
    pub workload: WorkloadSpec,
    #[serde(default = "all_policies")]
    pub policies: Vec<PolicyKind>,
    #[serde(default)]
    pub hyperparams: Hyperparams,
    #[serde(default)]
    pub discretization: DiscretizationScheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

fn all_policies() -> Vec<PolicyKind> {
    PolicyKind::ALL.to_vec()
}

impl ExperimentConfig {
    /// The bundled benchmark: 200 short synthetic tasks arriving in bursts on
    /// 8 machines, 200 training episodes. Tasks range up to a whole machine,
    /// so placement order matters.
    pub fn benchmark() -> Self {
        ExperimentConfig {
            fleet: SimConfig::new(8, 8.0, 16.0),
            workload: WorkloadSpec::Synthetic(SynthParams {
                task_count: 200,
                arrival_rate: 4.0,
                duration_range: (1, 3),
                cpu_range: (1, 8),
                mem_range: (1, 16),
                priority_weights: [1.0; 5],
                seed: 7,
            }),
            policies: all_policies(),
            hyperparams: Hyperparams::default(),
            discretization: DiscretizationScheme::default(),
            output_dir: None,
            seed: 42,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file, resolving a relative trace path against the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = ExperimentConfig::from_json(&text)?;
        if let WorkloadSpec::Trace(trace) = &mut config.workload {
            if trace.is_relative() {
                if let Some(dir) = path.parent() {
                    *trace = dir.join(&*trace);
                }
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.fleet.validate()?;
        self.hyperparams.validate()?;
        self.discretization.validate()?;
        if self.policies.is_empty() {
            return Err(Error::Config("policy list is empty".into()));
        }
        if let WorkloadSpec::Synthetic(p) = &self.workload {
            p.validate()?;
        }
        Ok(())
    }

    /// Hyperparameters with the experiment seed applied.
    pub fn training_hyperparams(&self) -> Hyperparams {
        Hyperparams {
            seed: self.seed,
            ..self.hyperparams.clone()
        }
    }

    pub fn load_workload(&self) -> Result<Workload> {
        match &self.workload {
            WorkloadSpec::Trace(path) => workload::parse_trace(path),
            WorkloadSpec::Synthetic(p) => generate_synthetic(p),
            WorkloadSpec::Sample => Ok(Workload::bundled_sample()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn checksum(&self) -> String {
        workload::checksum_of(&serde_json::to_string(self).expect("config serializes"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"fleet": {"machines": 2, "cpu_capacity": 4, "mem_capacity": 8}, "workload": "sample", "seed": 1}"#,
        )
        .unwrap();
        assert_eq!(c.policies, PolicyKind::ALL.to_vec());
        assert_eq!(c.hyperparams, Hyperparams::default());
        assert_eq!(c.fleet.max_attempts_per_tick, 8);
        assert_eq!(c.training_hyperparams().seed, 1);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for text in [
            r#"{"fleet": {"machines": 2, "cpu_capacity": 4, "mem_capacity": 8}, "workload": "sample", "seed": 1, "extra": 0}"#,
            r#"{"fleet": {"machines": 2, "cpu_capacity": 4, "mem_capacity": 8, "gpus": 1}, "workload": "sample", "seed": 1}"#,
            r#"{"fleet": {"machines": 2, "cpu_capacity": 4, "mem_capacity": 8}, "workload": "sample", "seed": 1, "hyperparams": {"lr": 0.1}}"#,
        ] {
            assert!(matches!(ExperimentConfig::from_json(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn invalid_values_are_rejected() {
        let text = r#"{"fleet": {"machines": 0, "cpu_capacity": 4, "mem_capacity": 8}, "workload": "sample", "seed": 1}"#;
        assert!(matches!(ExperimentConfig::from_json(text), Err(Error::Config(_))));
        let text = r#"{"fleet": {"machines": 1, "cpu_capacity": 4, "mem_capacity": 8}, "workload": "sample", "seed": 1, "hyperparams": {"alpha": 2.0}}"#;
        assert!(matches!(ExperimentConfig::from_json(text), Err(Error::Config(_))));
    }

    #[test]
    fn json_round_trip() {
        let c = ExperimentConfig::benchmark();
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn bundled_benchmark_file_matches_constructor() {
        let text = include_str!("../../configs/benchmark.json");
        assert_eq!(ExperimentConfig::from_json(text).unwrap(), ExperimentConfig::benchmark());
    }
}
