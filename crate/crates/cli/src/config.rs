//! Run configuration. Values come from built-in defaults, then the TOML
//! config file, then command-line flags; later sources win.

use std::path::PathBuf;

use clap::ValueEnum;
use lgt_core::builder::PowerScheme;
use lgt_core::eigen::SolverConfig;
use lgt_core::model::Statistics;
use lgt_core::Representation;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Plaquette expectation over a coupling and truncation grid.
    ScanPlaquette,
    /// Overlap of magnetic and Fourier-transformed electric ground states.
    FourierFidelity,
    /// Infidelity between ground states at l-1 and l.
    SequenceFidelity,
    /// Optimal group resolution per coupling and truncation.
    LOpt,
    /// Coupling where the two representations agree best.
    #[serde(rename = "g-m")]
    #[value(name = "g-m")]
    GM,
    /// Plaquette with dynamical fermions.
    MatterScan,
    /// Symbolic term list for a periodic torus.
    TorusGen,
    /// Sparse Hamiltonian in Matrix Market format.
    ExportOperator,
    /// Ground-state shell profiles with and without the cyclic wrap.
    TruncationAnalysis,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ScanPlaquette => "scan-plaquette",
            Command::FourierFidelity => "fourier-fidelity",
            Command::SequenceFidelity => "sequence-fidelity",
            Command::LOpt => "l-opt",
            Command::GM => "g-m",
            Command::MatterScan => "matter-scan",
            Command::TorusGen => "torus-gen",
            Command::ExportOperator => "export-operator",
            Command::TruncationAnalysis => "truncation-analysis",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub representation: Representation,
    pub inv_g2: Vec<f64>,
    pub l: Vec<usize>,
    /// Group resolutions. Empty means L_opt (or l+1 ..= l+`l_span` where a
    /// curve over L is needed).
    pub big_l: Vec<usize>,
    pub l_span: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            representation: Representation::Magnetic,
            inv_g2: vec![0.1, 0.3, 1.0, 3.0, 10.0],
            l: vec![1, 2],
            big_l: Vec::new(),
            l_span: 64,
        }
    }
}

impl GridConfig {
    /// Explicit L values above `l`, or the default window.
    pub fn big_l_for(&self, l: usize) -> Vec<usize> {
        if self.big_l.is_empty() {
            (l + 1..=l + self.l_span).collect()
        } else {
            self.big_l.iter().copied().filter(|&x| x > l).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatterConfig {
    pub m: f64,
    pub kappa: f64,
    pub static_charges: [f64; 4],
}

impl Default for MatterConfig {
    fn default() -> Self {
        Self { m: 10.0, kappa: 10.0, static_charges: [0.0; 4] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TorusConfig {
    pub nx: usize,
    pub ny: usize,
    pub statistics: Statistics,
    pub static_charges: Vec<i64>,
    /// Also assemble the matrix at l = `grid.l[0]` when it fits the cap.
    pub matrix: bool,
}

impl Default for TorusConfig {
    fn default() -> Self {
        Self { nx: 2, ny: 2, statistics: Statistics::Fermion, static_charges: Vec::new(), matrix: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    PureGauge,
    Matter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Part {
    Total,
    Electric,
    Magnetic,
    Kinetic,
    Mass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorConfig {
    pub system: SystemKind,
    pub part: Part,
    pub l: usize,
    /// Defaults to `l`.
    pub big_l: Option<usize>,
    pub inv_g2: f64,
    pub cyclic: bool,
    pub scheme: PowerScheme,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            system: SystemKind::PureGauge,
            part: Part::Total,
            l: 1,
            big_l: None,
            inv_g2: 1.0,
            cyclic: false,
            scheme: PowerScheme::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub output: PathBuf,
    pub force: bool,
    /// Reuse finished points from an earlier scan-plaquette output.
    pub resume: bool,
    /// Largest Hilbert-space dimension any build may reach.
    pub cap: usize,
    /// Worker threads; 1 runs sequentially.
    pub threads: usize,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub matter: MatterConfig,
    pub torus: TorusConfig,
    pub operator: OperatorConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            output: PathBuf::from("lgt-out"),
            force: false,
            resume: false,
            cap: 2_000_000,
            threads: 1,
            grid: GridConfig::default(),
            solver: SolverConfig::default(),
            matter: MatterConfig::default(),
            torus: TorusConfig::default(),
            operator: OperatorConfig::default(),
        }
    }
}

/// Invalid configuration, with the offending field path.
#[derive(Debug)]
pub struct UsageError {
    pub field: String,
    pub message: String,
}

impl std::error::Error for UsageError {}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.field.is_empty() {
            write!(f, "invalid configuration: {}", self.message)
        } else {
            write!(f, "invalid configuration at `{}`: {}", self.field, self.message)
        }
    }
}

fn usage<T>(field: &str, message: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError { field: field.into(), message: message.into() })
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, UsageError> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let field = e.span().map(|s| field_at(text, s.start)).unwrap_or_default();
            UsageError { field, message }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        if self.command.is_none() {
            return usage("command", "no command given on the command line or in the config");
        }
        if self.threads == 0 {
            return usage("threads", "must be at least 1");
        }
        if self.cap == 0 {
            return usage("cap", "must be positive");
        }
        if self.grid.inv_g2.is_empty() {
            return usage("grid.inv_g2", "empty");
        }
        if let Some(x) = self.grid.inv_g2.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return usage("grid.inv_g2", format!("{x} is not a positive finite coupling"));
        }
        if self.grid.l.is_empty() {
            return usage("grid.l", "empty");
        }
        if self.grid.l.contains(&0) {
            return usage("grid.l", "truncations start at 1");
        }
        if self.grid.l_span == 0 {
            return usage("grid.l_span", "must be positive");
        }
        if self.solver.tol.is_nan() || self.solver.tol <= 0.0 {
            return usage("solver.tol", "must be positive");
        }
        if self.solver.krylov_dim < 2 {
            return usage("solver.krylov_dim", "must be at least 2");
        }
        if self.torus.nx < 2 || self.torus.ny < 2 {
            return usage("torus", "nx and ny must be at least 2");
        }
        if self.operator.l == 0 {
            return usage("operator.l", "must be at least 1");
        }
        if self.operator.big_l.is_some_and(|b| b < self.operator.l) {
            return usage("operator.big_l", "must be at least operator.l");
        }
        if !(self.operator.inv_g2.is_finite() && self.operator.inv_g2 > 0.0) {
            return usage("operator.inv_g2", "must be a positive finite coupling");
        }
        Ok(())
    }
}

/// Dotted key path of the table entry containing byte offset `pos`.
fn field_at(text: &str, pos: usize) -> String {
    let mut table = String::new();
    let mut key = String::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let t = line.trim();
        if t.starts_with('[') && !t.starts_with("[[") {
            table = t.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            key.clear();
        } else if let Some((k, _)) = t.split_once('=') {
            key = k.trim().to_string();
        }
        offset += line.len();
        if offset > pos {
            break;
        }
    }
    match (table.is_empty(), key.is_empty()) {
        (true, _) => key,
        (false, true) => table,
        (false, false) => format!("{table}.{key}"),
    }
}
