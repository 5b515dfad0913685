use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::extract::ExtractRule;
use super::mock::MockKind;
use super::HarnessError;
use crate::serialize::{enumerate_specs, full_grid, Ablation, EncodingSpec};
use crate::tasks::{self, CheckConfig, SolveConfig, TaskSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_run_id")]
    pub run_id: String,
    pub models: Vec<ModelConfig>,
    #[serde(default)]
    pub tasks: TaskSelection,
    #[serde(default)]
    pub encodings: EncodingSelection,
    #[serde(default = "default_seeds")]
    pub relabel_seeds: Vec<u64>,
    /// When false the seeds only drive edge shuffles and graphs keep their labels.
    #[serde(default = "yes")]
    pub relabel: bool,
    #[serde(default)]
    pub dataset: DatasetConfig,
    #[serde(default = "EncodingSpec::erdos")]
    pub baseline_encoding: EncodingSpec,
    #[serde(default)]
    pub check: CheckConfig,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default = "default_rules")]
    pub extraction: Vec<ExtractRule>,
    pub output: PathBuf,
}

fn default_run_id() -> String {
    "run".into()
}

fn default_seeds() -> Vec<u64> {
    (0..10).collect()
}

fn yes() -> bool {
    true
}

fn default_rules() -> Vec<ExtractRule> {
    ExtractRule::DEFAULT.to_vec()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.relabel_seeds.is_empty() {
            return Err(HarnessError::Config("relabel_seeds is empty".into()));
        }
        let mut names = std::collections::BTreeSet::new();
        for m in &self.models {
            if !names.insert(&m.name) {
                return Err(HarnessError::Config(format!("duplicate model name {:?}", m.name)));
            }
            m.backend()?;
            if m.max_in_flight == 0 {
                return Err(HarnessError::Config(format!("{}: max_in_flight must be positive", m.name)));
            }
        }
        self.task_specs()?;
        for spec in self.encoding_specs() {
            spec.validate()?;
        }
        Ok(())
    }

    pub fn task_specs(&self) -> Result<Vec<&'static TaskSpec>, HarnessError> {
        self.tasks.resolve()
    }

    pub fn encoding_specs(&self) -> Vec<EncodingSpec> {
        self.encodings.resolve()
    }

    pub fn records_path(&self) -> PathBuf {
        self.output.join(format!("{}.records.jsonl", self.run_id))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    /// An OpenAI-compatible base URL, or `mock://oracle`, `mock://mean_baseline`,
    /// `mock://noisy?sigma=0.05&seed=1`.
    pub endpoint: String,
    /// Model id sent to the endpoint; defaults to `name`.
    #[serde(default)]
    pub model: Option<String>,
    /// Environment variable holding the API key.
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub max_tokens: Option<u32>,
    #[serde(default)]
    pub reasoning_effort: Option<String>,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_attempts")]
    pub attempts: u32,
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
}

fn default_in_flight() -> usize {
    4
}

fn default_timeout() -> u64 {
    600
}

fn default_attempts() -> u32 {
    3
}

fn default_backoff() -> u64 {
    500
}

impl ModelConfig {
    pub fn new(name: &str, endpoint: &str) -> Self {
        ModelConfig {
            name: name.into(),
            endpoint: endpoint.into(),
            model: None,
            api_key_env: None,
            temperature: 0.0,
            max_tokens: None,
            reasoning_effort: None,
            max_in_flight: default_in_flight(),
            timeout_secs: default_timeout(),
            attempts: default_attempts(),
            backoff_ms: default_backoff(),
        }
    }

    pub fn mock(name: &str, kind: MockKind) -> Self {
        Self::new(name, &kind.endpoint())
    }

    pub fn backend(&self) -> Result<Backend, HarnessError> {
        if let Some(rest) = self.endpoint.strip_prefix("mock://") {
            return MockKind::parse(rest).map(Backend::Mock).ok_or_else(|| {
                HarnessError::Config(format!("{}: unknown mock endpoint {:?}", self.name, self.endpoint))
            });
        }
        if self.endpoint.starts_with("http://") || self.endpoint.starts_with("https://") {
            return Ok(Backend::Http);
        }
        Err(HarnessError::Config(format!("{}: endpoint must be http(s):// or mock://", self.name)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    Http,
    Mock(MockKind),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaskSelection {
    Group(TaskGroup),
    List(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskGroup {
    All,
    /// Tasks with a built-in solver.
    Core,
    Topological,
    Spectral,
}

impl Default for TaskSelection {
    fn default() -> Self {
        TaskSelection::Group(TaskGroup::All)
    }
}

impl TaskSelection {
    pub fn resolve(&self) -> Result<Vec<&'static TaskSpec>, HarnessError> {
        use crate::tasks::Family;
        match self {
            TaskSelection::Group(g) => Ok(tasks::catalog()
                .iter()
                .filter(|t| match g {
                    TaskGroup::All => true,
                    TaskGroup::Core => t.core,
                    TaskGroup::Topological => t.family == Family::Topological,
                    TaskGroup::Spectral => t.family == Family::Spectral,
                })
                .collect()),
            TaskSelection::List(ids) => ids
                .iter()
                .map(|id| tasks::lookup(id).ok_or_else(|| HarnessError::Config(format!("unknown task {id:?}"))))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EncodingSelection {
    Set(EncodingSet),
    Specs(Vec<EncodingSpec>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodingSet {
    Erdos,
    StructureSorted,
    Shuffles,
    Replication,
    Syntaxes,
    FullGrid,
}

impl Default for EncodingSelection {
    fn default() -> Self {
        EncodingSelection::Set(EncodingSet::Erdos)
    }
}

impl EncodingSelection {
    pub fn resolve(&self) -> Vec<EncodingSpec> {
        match self {
            EncodingSelection::Specs(v) => v.clone(),
            EncodingSelection::Set(set) => match set {
                EncodingSet::Erdos => vec![EncodingSpec::erdos()],
                EncodingSet::StructureSorted => enumerate_specs(Ablation::StructureSorted),
                EncodingSet::Shuffles => enumerate_specs(Ablation::Shuffles),
                EncodingSet::Replication => enumerate_specs(Ablation::Replication),
                EncodingSet::Syntaxes => enumerate_specs(Ablation::Syntaxes),
                EncodingSet::FullGrid => full_grid(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetConfig {
    /// Seeded random instances per task.
    Synthetic {
        #[serde(default = "default_per_task")]
        instances_per_task: usize,
        #[serde(default)]
        seed: u64,
    },
    /// A JSON-lines dataset in the ingest schema.
    Erdos { path: PathBuf },
}

fn default_per_task() -> usize {
    10
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig::Synthetic { instances_per_task: default_per_task(), seed: 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"models": [{"name": "o", "endpoint": "mock://oracle"}], "output": "out"}"#)
                .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.relabel_seeds, (0..10).collect::<Vec<_>>());
        assert_eq!(cfg.models[0].temperature, 0.0);
        assert_eq!(cfg.encoding_specs(), vec![EncodingSpec::erdos()]);
        assert_eq!(cfg.task_specs().unwrap().len(), tasks::catalog().len());
        assert_eq!(cfg.records_path(), PathBuf::from("out/run.records.jsonl"));
    }

    #[test]
    fn selections_parse() {
        let t: TaskSelection = serde_json::from_str(r#"["density", "academic_adm_index"]"#).unwrap();
        assert_eq!(t.resolve().unwrap()[1].id, "adamic_adar_index");
        let t: TaskSelection = serde_json::from_str(r#""spectral""#).unwrap();
        assert_eq!(t.resolve().unwrap().len(), 12);
        assert!(TaskSelection::List(vec!["nope".into()]).resolve().is_err());
        let e: EncodingSelection = serde_json::from_str(r#""full_grid""#).unwrap();
        assert_eq!(e.resolve(), full_grid());
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut cfg: RunConfig =
            serde_json::from_str(r#"{"models": [{"name": "o", "endpoint": "ftp://x"}], "output": "o"}"#).unwrap();
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
        cfg.models[0].endpoint = "mock://psychic".into();
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
        cfg.models[0].endpoint = "mock://noisy?sigma=0.1&seed=2".into();
        cfg.validate().unwrap();
        assert!(serde_json::from_str::<RunConfig>(r#"{"models": [], "output": "o", "typo": 1}"#).is_err());
    }
}
