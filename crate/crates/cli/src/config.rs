//! Problem configuration: a TOML file, command-line overrides, and the
//! resolved problem they describe.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, ValueEnum};
use nsyn::dataset::load_dataset;
use nsyn::dsl::{toy_grammar, StringDsl, Token};
use nsyn::{BuildOptions, CostTable, DataSet, Grammar, Objective, PerExampleLoss, ValueKind, Weight};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DslKind {
    Toy,
    String,
}

/// Everything needed to pose a synthesis problem. Relative paths in a
/// config file are resolved against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default = "default_dsl")]
    pub dsl: DslKind,
    #[serde(default)]
    pub dataset: Option<PathBuf>,
    #[serde(default)]
    pub constants: Vec<String>,
    #[serde(default)]
    pub ks: Option<Vec<i64>>,
    #[serde(default)]
    pub tokens: Option<Vec<String>>,
    #[serde(default = "default_height")]
    pub height: usize,
    #[serde(default = "default_len_slack")]
    pub len_slack: usize,
    #[serde(default = "default_loss")]
    pub loss: String,
    /// `size`, or the path of a cost table.
    #[serde(default = "default_complexity")]
    pub complexity: String,
    #[serde(default = "default_objective")]
    pub objective: String,
    #[serde(default)]
    pub bound: Option<f64>,
    #[serde(default)]
    pub trusted_indices: Option<Vec<usize>>,
    /// Seconds allowed for automaton construction.
    #[serde(default)]
    pub timeout: Option<f64>,
}

fn default_dsl() -> DslKind {
    DslKind::String
}
fn default_height() -> usize {
    3
}
fn default_len_slack() -> usize {
    1
}
fn default_loss() -> String {
    "01".into()
}
fn default_complexity() -> String {
    "size".into()
}
fn default_objective() -> String {
    "lex".into()
}

impl Default for ProblemConfig {
    fn default() -> Self {
        toml::from_str("").expect("all fields have defaults")
    }
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        let mut cfg: ProblemConfig =
            toml::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(d) = &cfg.dataset {
            cfg.dataset = Some(base.join(d));
        }
        if cfg.complexity != "size" {
            cfg.complexity = base.join(&cfg.complexity).to_string_lossy().into_owned();
        }
        Ok(cfg)
    }

    pub fn value_kind(&self) -> ValueKind {
        match self.dsl {
            DslKind::Toy => ValueKind::Int,
            DslKind::String => ValueKind::Str,
        }
    }

    pub fn grammar(&self) -> Result<Grammar, Failure> {
        match self.dsl {
            DslKind::Toy => Ok(toy_grammar()),
            DslKind::String => {
                let mut dsl = StringDsl::new(self.constants.iter().cloned());
                if let Some(ks) = &self.ks {
                    dsl.ks = ks.clone();
                }
                if let Some(tokens) = &self.tokens {
                    dsl.tokens = tokens
                        .iter()
                        .map(|t| t.parse::<Token>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| Failure::usage(e.to_string()))?;
                }
                dsl.grammar().map_err(|e| Failure::usage(e.to_string()))
            }
        }
    }

    /// Checks the invariants and loads everything the problem refers to.
    pub fn resolve(&self) -> Result<Problem, Failure> {
        if self.height == 0 {
            return Err(Failure::usage("height must be at least 1"));
        }
        let loss = PerExampleLoss::from_name(&self.loss).map_err(|e| Failure::usage(e.to_string()))?;
        let objective: Objective = self.objective.parse().map_err(Failure::usage)?;
        let costs = if self.complexity == "size" {
            CostTable::unit()
        } else {
            let text = std::fs::read_to_string(&self.complexity)
                .map_err(|e| Failure::io(format!("{}: {e}", self.complexity)))?;
            CostTable::parse(&text).map_err(|e| Failure::usage(e.to_string()))?
        };
        let bound = self
            .bound
            .map(|b| Weight::try_finite(b).ok_or_else(|| Failure::usage(format!("invalid bound {b}"))))
            .transpose()?;
        let timeout = self
            .timeout
            .map(|t| Duration::try_from_secs_f64(t).map_err(|_| Failure::usage(format!("invalid timeout {t}"))))
            .transpose()?;
        let path = self.dataset.as_ref().ok_or_else(|| Failure::usage("no dataset given"))?;
        let data = load_dataset(path, self.value_kind()).map_err(|e| Failure::io(e.to_string()))?;
        if let Some(idx) = &self.trusted_indices {
            if let Some(&i) = idx.iter().find(|&&i| i >= data.len()) {
                return Err(Failure::usage(format!(
                    "trusted index {i} out of range for {} examples",
                    data.len()
                )));
            }
        }
        Ok(Problem {
            grammar: Arc::new(self.grammar()?),
            data,
            loss,
            costs,
            objective,
            options: BuildOptions::new(self.height).with_len_slack(Some(self.len_slack)),
            bound,
            trusted: self.trusted_indices.clone(),
            timeout,
        })
    }
}

/// A configuration with its files loaded and names checked.
pub struct Problem {
    pub grammar: Arc<Grammar>,
    pub data: DataSet,
    pub loss: PerExampleLoss,
    pub costs: CostTable,
    pub objective: Objective,
    pub options: BuildOptions,
    pub bound: Option<Weight>,
    pub trusted: Option<Vec<usize>>,
    pub timeout: Option<Duration>,
}

/// Command-line mirror of [`ProblemConfig`]; any flag given overrides the
/// config file.
#[derive(Debug, Clone, Default, Args)]
pub struct ProblemArgs {
    /// TOML problem configuration.
    pub config: Option<PathBuf>,
    /// Dataset JSON file.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub dsl: Option<DslKind>,
    /// String constant available to ConstStr (repeatable).
    #[arg(long = "constant")]
    pub constants: Vec<String>,
    /// Occurrence indices for Pos, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ks: Option<Vec<i64>>,
    /// Token classes, comma separated (Digits, Alphabets, Lowercase,
    /// Uppercase, Whitespace, or a quoted character such as '-').
    #[arg(long, value_delimiter = ',')]
    pub tokens: Option<Vec<String>>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub len_slack: Option<usize>,
    /// One of 01, 0inf, dl, 1del, nsub, sq.
    #[arg(long)]
    pub loss: Option<String>,
    /// `size` or a cost-table file.
    #[arg(long)]
    pub complexity: Option<String>,
    /// `lex` or `tradeoff:<lambda>`.
    #[arg(long)]
    pub objective: Option<String>,
    /// Accuracy bound on the dataset loss (or on the trusted rows).
    #[arg(long)]
    pub bound: Option<f64>,
    /// Rows that must be fit within the bound, comma separated.
    #[arg(long = "trusted", value_delimiter = ',')]
    pub trusted_indices: Option<Vec<usize>>,
    /// Seconds allowed for automaton construction.
    #[arg(long)]
    pub timeout: Option<f64>,
}

impl ProblemArgs {
    pub fn config(&self) -> Result<ProblemConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => ProblemConfig::load(path)?,
            None => ProblemConfig::default(),
        };
        if let Some(v) = &self.dataset {
            cfg.dataset = Some(v.clone());
        }
        if let Some(v) = self.dsl {
            cfg.dsl = v;
        }
        if !self.constants.is_empty() {
            cfg.constants = self.constants.clone();
        }
        if self.ks.is_some() {
            cfg.ks = self.ks.clone();
        }
        if self.tokens.is_some() {
            cfg.tokens = self.tokens.clone();
        }
        if let Some(v) = self.height {
            cfg.height = v;
        }
        if let Some(v) = self.len_slack {
            cfg.len_slack = v;
        }
        if let Some(v) = &self.loss {
            cfg.loss = v.clone();
        }
        if let Some(v) = &self.complexity {
            cfg.complexity = v.clone();
        }
        if let Some(v) = &self.objective {
            cfg.objective = v.clone();
        }
        if self.bound.is_some() {
            cfg.bound = self.bound;
        }
        if self.trusted_indices.is_some() {
            cfg.trusted_indices = self.trusted_indices.clone();
        }
        if self.timeout.is_some() {
            cfg.timeout = self.timeout;
        }
        Ok(cfg)
    }
}
