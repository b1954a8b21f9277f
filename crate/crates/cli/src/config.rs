//! Run configuration: flat `key = value` files mirrored 1:1 by long
//! flags, with flags taking precedence. Unknown keys, type mismatches
//! and constraint violations are each reported by name.

use rcm_core::{Adjacency, Boundary, Error, ModelParams, Result};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub d: u32,
    pub nu: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub tau: f64,
    pub side: f64,
    pub boundary: Boundary,
    pub replicas: u64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: Option<String>,
    pub epsilon: f64,
    pub lambda_grid: Vec<f64>,
    pub sides: Vec<f64>,
    pub cube_side: f64,
    pub grid_extent: u32,
    pub adjacency: Adjacency,
    pub kmax: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            d: 1,
            nu: 1.0,
            lambda: 1.0,
            alpha: 2.0,
            tau: 3.0,
            side: 100.0,
            boundary: Boundary::Torus,
            replicas: 1000,
            seed: 1,
            workers: None,
            out: None,
            epsilon: 0.0, // exact mode unless asked otherwise
            lambda_grid: vec![0.1, 0.2, 0.5, 1.0, 2.0],
            sides: vec![32.0, 64.0],
            cube_side: 1.0,
            grid_extent: 32,
            adjacency: Adjacency::Face,
            kmax: 30,
        }
    }
}

fn parse_as<T: std::str::FromStr>(key: &'static str, value: &str) -> Result<T> {
    value.trim().parse::<T>().map_err(|_| Error::InvalidConfig {
        reason: format!(
            "key `{key}`: cannot parse `{}` as {}",
            value.trim(),
            std::any::type_name::<T>()
        ),
    })
}

fn parse_list(key: &'static str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|item| {
            item.trim().parse::<f64>().map_err(|_| Error::InvalidConfig {
                reason: format!("key `{key}`: `{}` is not a number", item.trim()),
            })
        })
        .collect()
}

fn fmt_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl RunConfig {
    /// Apply one key/value pair; unknown keys are rejected by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "d" => self.d = parse_as("d", value)?,
            "nu" => self.nu = parse_as("nu", value)?,
            "lambda" => self.lambda = parse_as("lambda", value)?,
            "alpha" => self.alpha = parse_as("alpha", value)?,
            "tau" => self.tau = parse_as("tau", value)?,
            "side" => self.side = parse_as("side", value)?,
            "boundary" => self.boundary = value.parse()?,
            "replicas" => self.replicas = parse_as("replicas", value)?,
            "seed" => self.seed = parse_as("seed", value)?,
            "workers" => self.workers = Some(parse_as("workers", value)?),
            "out" => self.out = Some(value.trim().to_string()),
            "epsilon" => self.epsilon = parse_as("epsilon", value)?,
            "lambda_grid" => self.lambda_grid = parse_list("lambda_grid", value)?,
            "sides" => self.sides = parse_list("sides", value)?,
            "cube_side" => self.cube_side = parse_as("cube_side", value)?,
            "grid_extent" => self.grid_extent = parse_as("grid_extent", value)?,
            "adjacency" => self.adjacency = value.parse()?,
            "kmax" => self.kmax = parse_as("kmax", value)?,
            other => {
                return Err(Error::InvalidConfig {
                    reason: format!("unknown configuration key `{other}`"),
                })
            }
        }
        Ok(())
    }

    /// Parse a flat config file: one `key = value` per line, `#` starts
    /// a comment, blank lines ignored.
    pub fn load(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig {
            reason: format!("cannot read config file {}: {e}", path.display()),
        })?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::InvalidConfig {
                reason: format!(
                    "{}:{}: expected `key = value`, got `{line}`",
                    path.display(),
                    lineno + 1
                ),
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    /// Model parameters, with constraint violations named per field.
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.d, self.nu, self.lambda, self.alpha, self.tau)
    }

    /// Canonical echo of the effective configuration; embedded into
    /// every emitted artifact so runs are reproducible bit-exactly.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        map.insert("d".into(), self.d.to_string());
        map.insert("nu".into(), self.nu.to_string());
        map.insert("lambda".into(), self.lambda.to_string());
        map.insert("alpha".into(), self.alpha.to_string());
        map.insert("tau".into(), self.tau.to_string());
        map.insert("side".into(), self.side.to_string());
        map.insert("boundary".into(), self.boundary.to_string());
        map.insert("replicas".into(), self.replicas.to_string());
        map.insert("seed".into(), self.seed.to_string());
        map.insert(
            "workers".into(),
            self.workers.map_or("auto".into(), |w| w.to_string()),
        );
        map.insert("out".into(), self.out.clone().unwrap_or_default());
        map.insert("epsilon".into(), self.epsilon.to_string());
        map.insert("lambda_grid".into(), fmt_list(&self.lambda_grid));
        map.insert("sides".into(), fmt_list(&self.sides));
        map.insert("cube_side".into(), self.cube_side.to_string());
        map.insert("grid_extent".into(), self.grid_extent.to_string());
        map.insert("adjacency".into(), self.adjacency.to_string());
        map.insert("kmax".into(), self.kmax.to_string());
        map
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn file_then_flag_precedence() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# comment\nlambda = 1.0\ntau = 2.5").unwrap();
        let mut config = RunConfig::default();
        config.load(file.path()).unwrap();
        assert_eq!(config.lambda, 1.0);
        assert_eq!(config.tau, 2.5);
        // Flag override comes after the file.
        config.set("lambda", "2.0").unwrap();
        assert_eq!(config.lambda, 2.0);
    }

    #[test]
    fn unknown_key_and_bad_types_are_named() {
        let mut config = RunConfig::default();
        let err = config.set("lamda", "2.0").unwrap_err();
        assert!(err.to_string().contains("lamda"));
        let err = config.set("alpha", "fast").unwrap_err();
        assert!(err.to_string().contains("alpha"));
        let err = config.set("lambda_grid", "0.1,zebra").unwrap_err();
        assert!(err.to_string().contains("zebra"));
    }

    #[test]
    fn constraint_violations_name_the_field() {
        let mut config = RunConfig::default();
        config.set("tau", "-1").unwrap();
        let err = config.params().unwrap_err();
        assert!(err.to_string().contains("tau"), "{err}");
    }

    #[test]
    fn epsilon_defaults_to_exact_mode() {
        assert_eq!(RunConfig::default().epsilon, 0.0);
    }
}
