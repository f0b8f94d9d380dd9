//! Flat `key = value` configuration covering every tunable constant.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use sltk_core::{EstimatorConfig, PipelineConfig, TrackerConfig};

use crate::error::{Error, IoContext, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub pipeline: PipelineConfig,
    pub estimator: EstimatorConfig,
    pub tracker: TrackerConfig,
}

/// Every key, in printing order.
pub const KEYS: [&str; 22] = [
    "blur_radius",
    "target_width",
    "target_height",
    "edge_threshold",
    "distinct_minima",
    "compensation_cap",
    "rays",
    "depth",
    "block",
    "max_iterations",
    "epsilon",
    "ray_budget",
    "acquire_threshold",
    "idle_threshold",
    "idle_timeout_ms",
    "init_delay_ms",
    "max_area_fraction",
    "min_area_fraction",
    "color_window",
    "color_threshold",
    "recovery_offsets",
    "smoothing",
];

fn parse<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value `{value}` for `{key}`"))
}

impl Config {
    pub fn get(&self, key: &str) -> Option<String> {
        let (p, e, t) = (&self.pipeline, &self.estimator, &self.tracker);
        Some(match key {
            "blur_radius" => p.blur_radius.to_string(),
            "target_width" => p.target_width.to_string(),
            "target_height" => p.target_height.to_string(),
            "edge_threshold" => p.edge_threshold.to_string(),
            "distinct_minima" => p.distinct_minima.to_string(),
            "compensation_cap" => p.compensation_cap.to_string(),
            "rays" => e.rays.to_string(),
            "depth" => e.depth.to_string(),
            "block" => e.block.to_string(),
            "max_iterations" => e.max_iterations.to_string(),
            "epsilon" => e.epsilon.to_string(),
            "ray_budget" => e.ray_budget.to_string(),
            "acquire_threshold" => t.acquire_threshold.to_string(),
            "idle_threshold" => t.idle_threshold.to_string(),
            "idle_timeout_ms" => t.idle_timeout_ms.to_string(),
            "init_delay_ms" => t.init_delay_ms.to_string(),
            "max_area_fraction" => t.max_area_fraction.to_string(),
            "min_area_fraction" => t.min_area_fraction.to_string(),
            "color_window" => t.color_window.to_string(),
            "color_threshold" => t.color_threshold.to_string(),
            "recovery_offsets" => t
                .recovery_offsets
                .iter()
                .map(i32::to_string)
                .collect::<Vec<_>>()
                .join(","),
            "smoothing" => t.smoothing.to_string(),
            _ => return None,
        })
    }

    /// Sets one key; the message of the error names the key and value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let value = value.trim();
        let (p, e, t) = (&mut self.pipeline, &mut self.estimator, &mut self.tracker);
        match key {
            "blur_radius" => p.blur_radius = parse(key, value)?,
            "target_width" => p.target_width = parse(key, value)?,
            "target_height" => p.target_height = parse(key, value)?,
            "edge_threshold" => p.edge_threshold = parse(key, value)?,
            "distinct_minima" => p.distinct_minima = parse(key, value)?,
            "compensation_cap" => p.compensation_cap = parse(key, value)?,
            "rays" => e.rays = parse(key, value)?,
            "depth" => e.depth = parse(key, value)?,
            "block" => e.block = parse(key, value)?,
            "max_iterations" => e.max_iterations = parse(key, value)?,
            "epsilon" => e.epsilon = parse(key, value)?,
            "ray_budget" => e.ray_budget = parse(key, value)?,
            "acquire_threshold" => t.acquire_threshold = parse(key, value)?,
            "idle_threshold" => t.idle_threshold = parse(key, value)?,
            "idle_timeout_ms" => t.idle_timeout_ms = parse(key, value)?,
            "init_delay_ms" => t.init_delay_ms = parse(key, value)?,
            "max_area_fraction" => t.max_area_fraction = parse(key, value)?,
            "min_area_fraction" => t.min_area_fraction = parse(key, value)?,
            "color_window" => t.color_window = parse(key, value)?,
            "color_threshold" => t.color_threshold = parse(key, value)?,
            "recovery_offsets" => {
                t.recovery_offsets = value
                    .split(',')
                    .map(|v| parse(key, v.trim()))
                    .collect::<std::result::Result<_, _>>()?
            }
            "smoothing" => t.smoothing = parse(key, value)?,
            _ => return Err(format!("unknown config key `{key}`")),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                origin: origin.to_owned(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            self.set(key.trim(), value).map_err(err)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut config = Self::default();
        config.apply_text(
            &fs::read_to_string(path).at(path)?,
            &path.display().to_string(),
        )?;
        config.validate()?;
        Ok(config)
    }

    /// Applies a `key=value` override as given on the command line.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| Error::Parse {
            origin: "--set".into(),
            line: 1,
            message: format!("expected key=value, got `{assignment}`"),
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::UnknownKey(key.to_owned()));
        }
        self.set(key, value).map_err(|message| Error::Parse {
            origin: "--set".into(),
            line: 1,
            message,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        self.estimator.validate()?;
        self.tracker.validate()?;
        Ok(())
    }

    /// The configuration in the same format `apply_text` reads.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let value = self.get(key).expect("listed key");
            writeln!(out, "{key} = {value}").expect("writing to a string");
        }
        out
    }
}
