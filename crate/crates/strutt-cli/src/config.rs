//! Run configuration: JSON file merged with command-line overrides.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use strutt::kernels::Mode;
use strutt::quadrature::{Backend, QuadratureSpec, Shift};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Path to the kernel definition JSON.
    pub kernel: Option<String>,
    /// Solution family: "periodic" or "antiperiodic".
    pub mode: String,
    /// Truncation halfwidth N >= 1.
    pub order: usize,
    /// Coefficient backend: "closed", "quad", or "auto" (closed where the
    /// kernel admits it).
    pub backend: String,
    pub quadrature: QuadCfg,
    pub theta: f64,
    pub a0: f64,
    pub a1: f64,
    pub omega: f64,
    pub lambda: f64,
    /// Floquet shift as [re, im].
    pub gamma: [f64; 2],
    /// Branch kind for the boundary command.
    pub branch: Option<String>,
    pub ranges: Ranges,
    /// Chart resolution [n_theta, n_a1].
    pub scan_resolution: [usize; 2],
    /// Runge-Kutta steps per period for scans.
    pub scan_steps: usize,
    /// Residual / admissibility tolerance.
    pub tolerance: f64,
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kernel: None,
            mode: "periodic".into(),
            order: 1,
            backend: "auto".into(),
            quadrature: QuadCfg::default(),
            theta: 2.0,
            a0: 1.0,
            a1: 0.0,
            omega: 0.0,
            lambda: 0.5,
            gamma: [0.0, 0.0],
            branch: None,
            ranges: Ranges::default(),
            scan_resolution: [200, 200],
            scan_steps: 1024,
            tolerance: 1e-8,
            out: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadCfg {
    pub nodes: usize,
    pub panels: usize,
    /// "auto" or a positive number.
    pub v: serde_json::Value,
}

impl Default for QuadCfg {
    fn default() -> Self {
        Self {
            nodes: 32,
            panels: 64,
            v: serde_json::Value::String("auto".into()),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        if self.count == 0 {
            return Err(CliError::input("grid count must be positive"));
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        if !(self.stop > self.start) {
            return Err(CliError::input("grid stop must exceed start"));
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.start + step * i as f64).collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Ranges {
    pub theta: Grid,
    pub a1: Grid,
    pub omega: Grid,
}

impl Default for Ranges {
    fn default() -> Self {
        Self {
            theta: Grid {
                start: 1.5,
                stop: 2.5,
                count: 41,
            },
            a1: Grid {
                start: 0.0,
                stop: 0.5,
                count: 21,
            },
            omega: Grid {
                start: 0.0,
                stop: 1.0,
                count: 11,
            },
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&str>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::input(format!("config file '{p}': {e}")))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::input(format!("config file '{p}': {e}")))
            }
        }
    }

    pub fn mode(&self) -> Result<Mode, CliError> {
        match self.mode.as_str() {
            "periodic" => Ok(Mode::Periodic),
            "antiperiodic" => Ok(Mode::Antiperiodic),
            other => Err(CliError::input(format!(
                "mode must be 'periodic' or 'antiperiodic', got '{other}'"
            ))),
        }
    }

    pub fn backend_for<T: strutt::Real>(
        &self,
        kernel: &strutt::kernels::MemoryKernel<T>,
    ) -> Result<Backend, CliError> {
        match self.backend.as_str() {
            "closed" => Ok(Backend::Closed),
            "quad" => Ok(Backend::Quad),
            "auto" => Ok(if kernel.as_expsum().is_some() {
                Backend::Closed
            } else {
                Backend::Quad
            }),
            other => Err(CliError::input(format!(
                "backend must be 'closed', 'quad' or 'auto', got '{other}'"
            ))),
        }
    }

    pub fn quadrature_spec(&self) -> Result<QuadratureSpec<f64>, CliError> {
        let shift = match &self.quadrature.v {
            serde_json::Value::String(s) if s == "auto" => Shift::Auto,
            serde_json::Value::Number(n) => {
                let v = n
                    .as_f64()
                    .ok_or_else(|| CliError::input("quadrature.v must be finite"))?;
                Shift::Fixed(v)
            }
            other => {
                return Err(CliError::input(format!(
                    "quadrature.v must be \"auto\" or a number, got {other}"
                )))
            }
        };
        Ok(QuadratureSpec {
            nodes: self.quadrature.nodes,
            panels: self.quadrature.panels,
            shift,
        })
    }

    /// Hash of the effective configuration (stable field order).
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        format!("sha256:{:x}", hasher.finalize())
    }
}
