use std::fmt;
use std::path::{Path, PathBuf};

use hardy_choquard::dynamics::SimControls;
use hardy_choquard::groundstate::SolverOptions;
use hardy_choquard::Grading;
use serde::{Deserialize, Serialize};

/// Invalid or unreadable configuration; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub model: ModelConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub dynamics: DynamicsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datum: Option<Datum>,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub d: u32,
    pub alpha: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub r_max: f64,
    #[serde(default)]
    pub grading: Grading,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub init: InitGuess,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolverOptions::default();
        SolverConfig {
            tol: d.tol,
            max_iter: d.max_iter,
            init: InitGuess::Gaussian,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitGuess {
    Gaussian,
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    pub dt0: f64,
    pub t_end: f64,
    pub blowup_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_interval: Option<f64>,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            dt0: 1e-3,
            t_end: 1.0,
            blowup_factor: SimControls::default().blowup_factor,
            snapshot_interval: None,
        }
    }
}

impl DynamicsConfig {
    pub fn controls(&self) -> SimControls {
        SimControls {
            blowup_factor: self.blowup_factor,
            snapshot_interval: self.snapshot_interval,
            ..SimControls::default()
        }
    }
}

/// Initial datum for `simulate` and `classify`, in the physical variable
/// unless stated otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Datum {
    /// `v(r) = amplitude exp(-r^2/(2 width^2) + i chirp r^2)` in the transformed variable.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        chirp: f64,
    },
    /// `scale * Q`.
    GroundState { scale: f64 },
    /// The explicit minimal-mass blow-up solution at `t = 0`.
    Pseudoconformal {
        blowup_time: f64,
        lambda: f64,
        #[serde(default)]
        gamma: f64,
    },
    /// A field file written by `ground-state` or `simulate`.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Random trial fields in the `hgn` suite.
    pub trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { trials: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    JsonLines,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::JsonLines => "jsonl",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: PathBuf::from("out"),
            formats: vec![Format::Csv],
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(format!("invalid configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical text form: every default filled in, fixed key order.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
        }
    }
}
