//! Pipeline configuration.
//!
//! Values resolve in three layers: built-in defaults, then a flat
//! `key = value` config file, then explicit overrides (CLI flags). Keys are
//! the field names of [`PipelineConfig`]; `#` starts a comment.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! named_enum {
    (
        $(#[$meta:meta])*
        pub enum $name:ident {
            $($variant:ident => $canon:literal $(| $alias:literal)*),+ $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $canon)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $canon),+
                }
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s.trim() {
                    $($canon $(| $alias)* => Ok($name::$variant),)+
                    other => Err(format!(
                        "unknown value {other:?}; expected one of {}",
                        [$($canon),+].join(", ")
                    )),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

named_enum! {
    /// Where the relocated salient crop goes among the surrounding cells.
    pub enum PlacementStrategy {
        MinArea => "min_area" | "min",
        MaxArea => "max_area" | "max",
        RandomArea => "random_area" | "random",
    }
}

named_enum! {
    /// Which content receives RandAugment.
    pub enum AugTarget {
        SalientOnly => "salient_only" | "salient",
        NonSalientOnly => "non_salient_only" | "non_salient",
        Both => "both",
    }
}

named_enum! {
    pub enum SaliencyProvider {
        FineGrained => "fine_grained",
        GradientMagnitude => "gradient_magnitude",
        External => "external",
    }
}

named_enum! {
    pub enum Method {
        KeepOriginal => "keep_original",
        KeepOriginalCutout => "keep_original_cutout",
        KeepAugment => "keep_augment",
        SalfMix => "salfmix",
        Cutout => "cutout",
        RandomErasing => "random_erasing",
        GridMask => "gridmask",
        HideAndSeek => "hide_and_seek",
        None => "none",
    }
}

/// Every tunable of the pipeline. Field order is the serialization order of
/// the manifest header.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub method: Method,
    /// Required fraction of total saliency mass inside the salient window.
    pub tau: f64,
    /// Initial window side as a fraction of the image side.
    pub window_ratio: f64,
    /// Increment applied to `window_ratio` when a window misses `tau`.
    pub growth_step: f64,
    pub placement: PlacementStrategy,
    pub aug_target: AugTarget,
    /// Probability of emitting the untouched original.
    pub keep_prob: f64,
    pub rand_n: u32,
    pub rand_m: f64,
    pub saliency_provider: SaliencyProvider,
    pub seed: u64,
    /// For `non_salient_only`, also paste the original crop back at its own box.
    pub also_restore_bbox: bool,
    pub cutout_size: f64,
    pub erase_area_min: f64,
    pub erase_area_max: f64,
    pub erase_aspect_min: f64,
    pub erase_aspect_max: f64,
    pub grid_unit_min: u32,
    pub grid_unit_max: u32,
    pub grid_ratio: f64,
    pub hide_grid: u32,
    pub hide_prob: f64,
    /// Worker threads. Never affects output, so it is not echoed into manifests.
    #[serde(skip, default = "default_workers")]
    pub workers: usize,
}

fn default_workers() -> usize {
    1
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            method: Method::KeepOriginal,
            tau: 0.6,
            window_ratio: 0.5,
            growth_step: 0.1,
            placement: PlacementStrategy::RandomArea,
            aug_target: AugTarget::Both,
            keep_prob: 0.5,
            rand_n: 2,
            rand_m: 9.0,
            saliency_provider: SaliencyProvider::FineGrained,
            seed: 0,
            also_restore_bbox: false,
            cutout_size: 0.5,
            erase_area_min: 0.02,
            erase_area_max: 0.4,
            erase_aspect_min: 0.3,
            erase_aspect_max: 3.3,
            grid_unit_min: 8,
            grid_unit_max: 16,
            grid_ratio: 0.5,
            hide_grid: 4,
            hide_prob: 0.5,
            workers: default_workers(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| Error::validation(key, format!("cannot parse {value:?}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => Err(Error::validation(key, format!("cannot parse {other:?} as a boolean"))),
    }
}

impl PipelineConfig {
    /// Names accepted by [`PipelineConfig::set`].
    pub const KEYS: &'static [&'static str] = &[
        "method",
        "tau",
        "window_ratio",
        "growth_step",
        "placement",
        "aug_target",
        "keep_prob",
        "rand_n",
        "rand_m",
        "saliency_provider",
        "seed",
        "also_restore_bbox",
        "cutout_size",
        "erase_area_min",
        "erase_area_max",
        "erase_aspect_min",
        "erase_aspect_max",
        "grid_unit_min",
        "grid_unit_max",
        "grid_ratio",
        "hide_grid",
        "hide_prob",
        "workers",
    ];

    /// Sets one field from its textual form. Does not run cross-field validation.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        match key {
            "method" => self.method = parse(key, value)?,
            "tau" => self.tau = parse(key, value)?,
            "window_ratio" => self.window_ratio = parse(key, value)?,
            "growth_step" => self.growth_step = parse(key, value)?,
            "placement" => self.placement = parse(key, value)?,
            "aug_target" => self.aug_target = parse(key, value)?,
            "keep_prob" => self.keep_prob = parse(key, value)?,
            "rand_n" => self.rand_n = parse(key, value)?,
            "rand_m" => self.rand_m = parse(key, value)?,
            "saliency_provider" | "provider" => self.saliency_provider = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "also_restore_bbox" => self.also_restore_bbox = parse_bool(key, value)?,
            "cutout_size" => self.cutout_size = parse(key, value)?,
            "erase_area_min" => self.erase_area_min = parse(key, value)?,
            "erase_area_max" => self.erase_area_max = parse(key, value)?,
            "erase_aspect_min" => self.erase_aspect_min = parse(key, value)?,
            "erase_aspect_max" => self.erase_aspect_max = parse(key, value)?,
            "grid_unit_min" => self.grid_unit_min = parse(key, value)?,
            "grid_unit_max" => self.grid_unit_max = parse(key, value)?,
            "grid_ratio" => self.grid_ratio = parse(key, value)?,
            "hide_grid" => self.hide_grid = parse(key, value)?,
            "hide_prob" => self.hide_prob = parse(key, value)?,
            "workers" => self.workers = parse(key, value)?,
            other => return Err(Error::validation(other, "unknown configuration key")),
        }
        Ok(())
    }

    /// Applies every `key = value` line of a config file body.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::validation(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got {raw:?}"),
                ));
            };
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    /// Defaults, then the optional config file, then `overrides` in order.
    pub fn resolve(file: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = file {
            cfg.apply_file(path)?;
        }
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        fn unit_open_closed(field: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::validation(field, format!("must be in (0, 1], got {v}")))
            }
        }
        fn probability(field: &str, v: f64) -> Result<()> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::validation(field, format!("must be in [0, 1], got {v}")))
            }
        }

        unit_open_closed("tau", self.tau)?;
        unit_open_closed("window_ratio", self.window_ratio)?;
        unit_open_closed("growth_step", self.growth_step)?;
        probability("keep_prob", self.keep_prob)?;
        if !(0.0..=30.0).contains(&self.rand_m) {
            return Err(Error::validation(
                "rand_m",
                format!("must be in [0, 30], got {}", self.rand_m),
            ));
        }
        if self.workers == 0 {
            return Err(Error::validation("workers", "must be at least 1"));
        }
        unit_open_closed("cutout_size", self.cutout_size)?;
        if !(self.erase_area_min > 0.0 && self.erase_area_min <= self.erase_area_max && self.erase_area_max < 1.0) {
            return Err(Error::validation(
                "erase_area_min",
                format!(
                    "area range must satisfy 0 < min <= max < 1, got ({}, {})",
                    self.erase_area_min, self.erase_area_max
                ),
            ));
        }
        if !(self.erase_aspect_min > 0.0
            && self.erase_aspect_min <= self.erase_aspect_max
            && self.erase_aspect_max.is_finite())
        {
            return Err(Error::validation(
                "erase_aspect_min",
                format!(
                    "aspect range must satisfy 0 < min <= max, got ({}, {})",
                    self.erase_aspect_min, self.erase_aspect_max
                ),
            ));
        }
        if self.grid_unit_min == 0 || self.grid_unit_min > self.grid_unit_max {
            return Err(Error::validation(
                "grid_unit_min",
                format!(
                    "unit range must satisfy 1 <= min <= max, got ({}, {})",
                    self.grid_unit_min, self.grid_unit_max
                ),
            ));
        }
        if !(self.grid_ratio > 0.0 && self.grid_ratio < 1.0) {
            return Err(Error::validation(
                "grid_ratio",
                format!("must be in (0, 1), got {}", self.grid_ratio),
            ));
        }
        if self.hide_grid == 0 {
            return Err(Error::validation("hide_grid", "must be at least 1"));
        }
        probability("hide_prob", self.hide_prob)?;
        Ok(())
    }

    /// The resolved configuration as `key = value` text, readable by
    /// [`PipelineConfig::apply_text`].
    pub fn to_config_text(&self) -> String {
        let json = serde_json::to_value(self).expect("config serializes");
        let mut out = String::new();
        if let serde_json::Value::Object(map) = json {
            for (k, v) in map {
                let v = match v {
                    serde_json::Value::String(s) => s,
                    other => other.to_string(),
                };
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out.push_str(&format!("workers = {}\n", self.workers));
        out
    }
}
