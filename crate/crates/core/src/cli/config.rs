//! Flat `key = value` configuration shared by every subcommand.
//!
//! Blank lines and lines starting with `#` are ignored. Every key mirrors a
//! field of the metric, gradient, degradation or noise configuration; values
//! given on the command line with `--set key=value` override the file.

use std::path::Path;

use serde::Serialize;

use crate::degrade::{DegradeConfig, NoiseParams};
use crate::error::{Error, Result};
use crate::frame::LumaWeights;
use crate::gradients::{FilterDirection, GradientConfig};
use crate::metric::{ErqaConfig, ShiftShape};

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Settings {
    pub erqa: ErqaConfig,
    pub degrade: DegradeConfig,
    pub noise: NoiseParams,
}

/// Fully materialized configuration as echoed into reports.
#[derive(Serialize)]
pub struct ConfigEcho {
    pub shift_radius: u32,
    pub shift_shape: &'static str,
    pub refine_iterations: usize,
    pub beta: f64,
    pub rerank: bool,
    pub percentile_q: f64,
    pub filter_direction: &'static str,
    pub drop_zero_magnitude: bool,
    pub cosine_threshold: f64,
    pub luma_r: f64,
    pub luma_g: f64,
    pub luma_b: f64,
    pub scale: usize,
    pub bd_sigma: f64,
    pub bd_offset: usize,
    pub sigma_s: f64,
    pub sigma_c: f64,
    pub seed: u64,
}

pub const KEYS: &[&str] = &[
    "shift_radius",
    "shift_shape",
    "refine_iterations",
    "beta",
    "rerank",
    "percentile_q",
    "filter_direction",
    "drop_zero_magnitude",
    "cosine_threshold",
    "luma_r",
    "luma_g",
    "luma_b",
    "scale",
    "bd_sigma",
    "bd_offset",
    "sigma_s",
    "sigma_c",
    "seed",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("cannot parse `{value}` for `{key}`")))
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let e = &mut self.erqa;
        match key {
            "shift_radius" => e.shift_radius = parse(key, value)?,
            "shift_shape" => e.shift_shape = value.parse::<ShiftShape>()?,
            "refine_iterations" => e.refine_iterations = parse(key, value)?,
            "beta" => e.beta = parse(key, value)?,
            "rerank" => e.rerank = parse(key, value)?,
            "percentile_q" => e.gradient.percentile_q = parse(key, value)?,
            "filter_direction" => e.gradient.filter_direction = value.parse::<FilterDirection>()?,
            "drop_zero_magnitude" => e.gradient.drop_zero_magnitude = parse(key, value)?,
            "cosine_threshold" => e.gradient.cosine_threshold = parse(key, value)?,
            "luma_r" => e.luma.r = parse(key, value)?,
            "luma_g" => e.luma.g = parse(key, value)?,
            "luma_b" => e.luma.b = parse(key, value)?,
            "scale" => self.degrade.scale = parse(key, value)?,
            "bd_sigma" => self.degrade.bd_sigma = parse(key, value)?,
            "bd_offset" => self.degrade.bd_offset = parse(key, value)?,
            "sigma_s" => self.noise.sigma_s = parse(key, value)?,
            "sigma_c" => self.noise.sigma_c = parse(key, value)?,
            "seed" => self.noise.seed = parse(key, value)?,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown key `{other}` (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected `key = value`", n + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_text(&text)
    }

    /// `key=value` override from the command line.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("expected key=value, got `{assignment}`")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn echo(&self) -> ConfigEcho {
        let e = &self.erqa;
        let GradientConfig {
            percentile_q,
            filter_direction,
            drop_zero_magnitude,
            cosine_threshold,
        } = e.gradient;
        let LumaWeights { r, g, b } = e.luma;
        ConfigEcho {
            shift_radius: e.shift_radius,
            shift_shape: e.shift_shape.as_str(),
            refine_iterations: e.refine_iterations,
            beta: e.beta,
            rerank: e.rerank,
            percentile_q,
            filter_direction: filter_direction.as_str(),
            drop_zero_magnitude,
            cosine_threshold,
            luma_r: r,
            luma_g: g,
            luma_b: b,
            scale: self.degrade.scale,
            bd_sigma: self.degrade.bd_sigma,
            bd_offset: self.degrade.bd_offset,
            sigma_s: self.noise.sigma_s,
            sigma_c: self.noise.sigma_c,
            seed: self.noise.seed,
        }
    }

    /// Renders the settings in the file format accepted by [`Settings::apply_text`].
    pub fn to_text(&self) -> String {
        let value = serde_json::to_value(self.echo()).expect("config echo serializes");
        let map = value.as_object().expect("object");
        KEYS.iter()
            .map(|k| {
                let v = &map[*k];
                match v.as_str() {
                    Some(s) => format!("{k} = {s}\n"),
                    None => format!("{k} = {v}\n"),
                }
            })
            .collect()
    }
}
