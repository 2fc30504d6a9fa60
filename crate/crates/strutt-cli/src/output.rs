//! CSV, JSON and manifest emission.

use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;

use crate::config::RunConfig;
use crate::CliError;

/// Full-precision float formatting (17 significant digits) so outputs
/// round-trip and oracle diffs stay meaningful.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct OutputSink {
    dir: Option<PathBuf>,
    files: Vec<String>,
    started: Instant,
}

impl OutputSink {
    pub fn new(out: Option<&str>) -> Result<Self, CliError> {
        let dir = match out {
            None => None,
            Some(d) => {
                std::fs::create_dir_all(d)
                    .map_err(|e| CliError::input(format!("output directory '{d}': {e}")))?;
                Some(PathBuf::from(d))
            }
        };
        Ok(Self {
            dir,
            files: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn write_text(&mut self, name: &str, content: &str) -> Result<(), CliError> {
        if let Some(dir) = &self.dir {
            std::fs::write(dir.join(name), content)
                .map_err(|e| CliError::input(format!("writing '{name}': {e}")))?;
            self.files.push(name.to_string());
        }
        Ok(())
    }

    /// Writes the run manifest next to the data files.
    pub fn finish(
        &mut self,
        command: &str,
        config: &RunConfig,
        rows: usize,
        residual_stats: Option<(f64, f64)>,
    ) -> Result<(), CliError> {
        if self.dir.is_none() {
            return Ok(());
        }
        #[derive(Serialize)]
        struct Manifest<'a> {
            command: &'a str,
            version: &'a str,
            config_hash: String,
            config: &'a RunConfig,
            files: &'a [String],
            rows: usize,
            #[serde(skip_serializing_if = "Option::is_none")]
            residual_max: Option<f64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            residual_mean: Option<f64>,
            wall_ms: u128,
        }
        let manifest = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config_hash: config.hash(),
            config,
            files: &self.files,
            rows,
            residual_max: residual_stats.map(|(max, _)| max),
            residual_mean: residual_stats.map(|(_, mean)| mean),
            wall_ms: self.started.elapsed().as_millis(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        let dir = self.dir.as_ref().unwrap();
        std::fs::write(dir.join("manifest.json"), text)
            .map_err(|e| CliError::input(format!("writing manifest: {e}")))?;
        Ok(())
    }
}

pub fn residual_stats(residuals: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let values: Vec<f64> = residuals.collect();
    if values.is_empty() {
        return None;
    }
    let max = values.iter().copied().fold(0.0f64, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Some((max, mean))
}
