//! Scenario configuration: a TOML file whose every section is optional.
//!
//! ```toml
//! [model]
//! n = 0
//! k = 0.0
//! x_max = 20.0
//! grid = 801
//!
//! [bc]
//! kind = "robin"        # dirichlet | neumann | robin | multiplier | wentzell_laplace
//! alpha = -1.0
//!
//! [quadrature]
//! xi_max = 40.0
//! nodes = 4000
//! # window = { kind = "hann" }   # default: hann for kernels, exponential for fields
//!
//! [grids]
//! t = { start = 0.0, stop = 2.0, points = 21 }       # kernel time axis
//! x = { start = 0.2, stop = 3.0, points = 20 }       # kernel x axis
//! # y = ...                                          # defaults to x
//! evolve_t = { start = 0.0, stop = 4.0, points = 401 }
//!
//! [spectrum]
//! lambda = { start = -3.0, stop = -0.001, points = 3000 }
//! # k_range = [0.0, 2.0]                             # default: the single mode model.k
//!
//! [source]
//! kind = "gaussian"     # zero | gaussian
//! t0 = 1.0
//! x0 = 3.0
//! sigma_t = 0.3
//! sigma_x = 0.3
//! amplitude = 1.0
//!
//! [evolve]
//! kind = "retarded"     # retarded | advanced | causal
//! compare_leapfrog = true
//!
//! [verify]
//! checks = []           # empty: every check
//! tamper_alpha = false
//!
//! [outputs]
//! dir = "out"
//! formats = ["csv", "binary"]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use triplewave::propagator::GreenKind;
use triplewave::{BoundaryCondition, Grid1, HalfSpaceModel, Quadrature, Window};

use crate::error::CliError;

/// Environment variable that overrides `outputs.dir`.
pub const OUT_DIR_ENV: &str = "TRIPLEWAVE_OUT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_model")]
    pub model: HalfSpaceModel<f64>,
    #[serde(default = "default_bc")]
    pub bc: BoundaryCondition<f64>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub grids: GridsConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub source: SourceConfig,
    #[serde(default)]
    pub evolve: EvolveConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

fn default_model() -> HalfSpaceModel<f64> {
    HalfSpaceModel {
        n: 0,
        k: 0.0,
        x_max: 20.0,
        grid: 801,
    }
}

fn default_bc() -> BoundaryCondition<f64> {
    BoundaryCondition::Dirichlet
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            model: default_model(),
            bc: default_bc(),
            quadrature: QuadratureConfig::default(),
            grids: GridsConfig::default(),
            spectrum: SpectrumConfig::default(),
            source: SourceConfig::default(),
            evolve: EvolveConfig::default(),
            verify: VerifyConfig::default(),
            outputs: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub xi_max: f64,
    pub nodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let q = Quadrature::<f64>::default();
        Self {
            xi_max: q.xi_max,
            nodes: q.nodes,
            window: None,
        }
    }
}

/// `points` samples from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl AxisSpec {
    pub const fn new(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => vec![],
            1 => vec![self.start],
            n => Grid1::linspace(self.start, self.stop, n).points(),
        }
    }

    /// A uniform grid with at least two points and a positive step.
    pub fn grid(&self, field: &str) -> Result<Grid1<f64>, CliError> {
        if self.points < 2
            || !(self.stop > self.start)
            || !self.start.is_finite()
            || !self.stop.is_finite()
        {
            return Err(CliError::Config(format!(
                "{field}: need points >= 2 and start < stop, got {self:?}"
            )));
        }
        Ok(Grid1::linspace(self.start, self.stop, self.points))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridsConfig {
    pub t: AxisSpec,
    pub x: AxisSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<AxisSpec>,
    pub evolve_t: AxisSpec,
}

impl Default for GridsConfig {
    fn default() -> Self {
        Self {
            t: AxisSpec::new(0.0, 2.0, 21),
            x: AxisSpec::new(0.2, 3.0, 20),
            y: None,
            evolve_t: AxisSpec::new(0.0, 4.0, 401),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub lambda: AxisSpec,
    /// Transverse wavenumber interval; absent means the single mode `model.k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_range: Option<[f64; 2]>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            lambda: AxisSpec::new(-3.0, -0.001, 3000),
            k_range: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    Zero,
    Gaussian {
        t0: f64,
        x0: f64,
        sigma_t: f64,
        sigma_x: f64,
        amplitude: f64,
    },
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self::Gaussian {
            t0: 1.0,
            x0: 3.0,
            sigma_t: 0.3,
            sigma_x: 0.3,
            amplitude: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub kind: GreenKind,
    pub compare_leapfrog: bool,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            kind: GreenKind::Retarded,
            compare_leapfrog: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Negative control: feeds the boundary check a field with the wrong
    /// Robin sign, so the suite must fail.
    #[serde(default)]
    pub tamper_alpha: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Binary],
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

impl ScenarioConfig {
    /// Parses TOML; errors carry the line, column and field.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable in TOML")
    }

    /// Accepts either a config object or a sidecar with a `config` member.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let mut v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("JSON: {e}")))?;
        if let Some(inner) = v.get_mut("config") {
            v = inner.take();
        }
        serde_json::from_value(v).map_err(|e| CliError::Config(format!("JSON: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        };
        parsed.map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.model
            .validate()
            .map_err(|e| CliError::Config(format!("model: {e}")))?;
        let q = &self.quadrature;
        Quadrature::<f64>::new(q.xi_max, q.nodes, Window::Sharp)
            .map_err(|e| CliError::Config(format!("quadrature: {e}")))?;
        if self.spectrum.lambda.values().iter().any(|l| !(*l < 0.0)) {
            return Err(CliError::Config(format!(
                "spectrum.lambda: the scan must stay below 0, got {:?}",
                self.spectrum.lambda
            )));
        }
        if let Some([lo, hi]) = self.spectrum.k_range {
            if !(lo <= hi) {
                return Err(CliError::Config(format!(
                    "spectrum.k_range: need lo <= hi, got [{lo}, {hi}]"
                )));
            }
        }
        if self.outputs.formats.is_empty() {
            return Err(CliError::Config(
                "outputs.formats: at least one format is required".into(),
            ));
        }
        Ok(())
    }

    /// The quadrature with `fallback` as the window unless one is configured.
    pub fn quadrature(&self, fallback: Window) -> Quadrature<f64> {
        Quadrature {
            xi_max: self.quadrature.xi_max,
            nodes: self.quadrature.nodes,
            window: self.quadrature.window.unwrap_or(fallback),
        }
    }
}
