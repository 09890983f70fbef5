//! Run configuration as plain `key = value` text.
//!
//! Blank lines and `#` comments are skipped, unknown keys are rejected and
//! list values are comma separated. Omitted keys keep their defaults.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use cpn_core::anchors::AnchorConfig;
use cpn_core::losses::LossConfig;
use cpn_core::morphsem::SemanticConfig;

use crate::error::{CpnError, Result};
use crate::fsutil;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Erosion strength, in (0, 1].
    pub shrink_k: f64,
    /// Scale from seed distance to dilation radius, > 0.
    pub kernel_norm_k: f64,
    pub binarize_threshold: f64,
    pub max_semantic_proposals: usize,
    pub min_region_px: usize,
    /// Anchors kept by the geometric branch before NMS.
    pub balanced_k: usize,
    pub nms_threshold: f64,
    pub anchor_ratios: Vec<f64>,
    pub anchor_base_scale: f64,
    pub anchor_strides: Vec<f64>,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub beta: f64,
    pub dice_epsilon: f64,
    pub ifa_channels: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let anchors = AnchorConfig::default();
        let losses = LossConfig::default();
        let sem = SemanticConfig::default();
        Self {
            shrink_k: 0.6,
            kernel_norm_k: 1.0,
            binarize_threshold: sem.threshold,
            max_semantic_proposals: sem.max_proposals,
            min_region_px: sem.min_region_px,
            balanced_k: 300,
            nms_threshold: 0.7,
            anchor_ratios: anchors.ratios,
            anchor_base_scale: anchors.base_scale,
            anchor_strides: anchors.strides,
            alpha1: losses.alpha1,
            alpha2: losses.alpha2,
            alpha3: losses.alpha3,
            beta: losses.beta,
            dice_epsilon: losses.epsilon,
            ifa_channels: 128,
            seed: 0,
        }
    }
}

fn bad(key: &str, msg: impl Into<String>) -> CpnError {
    CpnError::Config { key: key.to_string(), msg: msg.into() }
}

fn scalar<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| bad(key, format!("cannot parse `{v}`")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| scalar(key, s.trim())).collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(line, format!("line {} is not `key = value`", i + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fsutil::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "shrink_k" => self.shrink_k = scalar(key, v)?,
            "kernel_norm_k" => self.kernel_norm_k = scalar(key, v)?,
            "binarize_threshold" => self.binarize_threshold = scalar(key, v)?,
            "max_semantic_proposals" => self.max_semantic_proposals = scalar(key, v)?,
            "min_region_px" => self.min_region_px = scalar(key, v)?,
            "balanced_k" => self.balanced_k = scalar(key, v)?,
            "nms_threshold" => self.nms_threshold = scalar(key, v)?,
            "anchor_ratios" => self.anchor_ratios = list(key, v)?,
            "anchor_base_scale" => self.anchor_base_scale = scalar(key, v)?,
            "anchor_strides" => self.anchor_strides = list(key, v)?,
            "alpha1" => self.alpha1 = scalar(key, v)?,
            "alpha2" => self.alpha2 = scalar(key, v)?,
            "alpha3" => self.alpha3 = scalar(key, v)?,
            "beta" => self.beta = scalar(key, v)?,
            "dice_epsilon" => self.dice_epsilon = scalar(key, v)?,
            "ifa_channels" => self.ifa_channels = scalar(key, v)?,
            "seed" => self.seed = scalar(key, v)?,
            _ => return Err(bad(key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |key: &str, v: f64, incl_one: bool| {
            let ok = v > 0.0 && (v < 1.0 || (incl_one && v == 1.0));
            if ok {
                Ok(())
            } else {
                Err(bad(key, format!("{v} is outside (0, 1{}", if incl_one { "]" } else { ")" })))
            }
        };
        unit("shrink_k", self.shrink_k, true)?;
        unit("binarize_threshold", self.binarize_threshold, false)?;
        unit("nms_threshold", self.nms_threshold, true)?;
        if !(self.kernel_norm_k > 0.0 && self.kernel_norm_k.is_finite()) {
            return Err(bad("kernel_norm_k", "must be positive"));
        }
        if self.ifa_channels == 0 {
            return Err(bad("ifa_channels", "must be positive"));
        }
        self.anchor_config().validate().map_err(|e| bad("anchor_*", e.to_string()))?;
        self.loss_config().validate().map_err(|e| bad("alpha*/beta/dice_epsilon", e.to_string()))?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("shrink_k", self.shrink_k.to_string());
        kv("kernel_norm_k", self.kernel_norm_k.to_string());
        kv("binarize_threshold", self.binarize_threshold.to_string());
        kv("max_semantic_proposals", self.max_semantic_proposals.to_string());
        kv("min_region_px", self.min_region_px.to_string());
        kv("balanced_k", self.balanced_k.to_string());
        kv("nms_threshold", self.nms_threshold.to_string());
        kv("anchor_ratios", join(&self.anchor_ratios));
        kv("anchor_base_scale", self.anchor_base_scale.to_string());
        kv("anchor_strides", join(&self.anchor_strides));
        kv("alpha1", self.alpha1.to_string());
        kv("alpha2", self.alpha2.to_string());
        kv("alpha3", self.alpha3.to_string());
        kv("beta", self.beta.to_string());
        kv("dice_epsilon", self.dice_epsilon.to_string());
        kv("ifa_channels", self.ifa_channels.to_string());
        kv("seed", self.seed.to_string());
        s
    }

    pub fn semantic_config(&self) -> SemanticConfig {
        SemanticConfig {
            threshold: self.binarize_threshold,
            max_proposals: self.max_semantic_proposals,
            min_region_px: self.min_region_px,
        }
    }

    pub fn anchor_config(&self) -> AnchorConfig {
        AnchorConfig {
            ratios: self.anchor_ratios.clone(),
            base_scale: self.anchor_base_scale,
            strides: self.anchor_strides.clone(),
        }
    }

    pub fn loss_config(&self) -> LossConfig {
        LossConfig {
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            alpha3: self.alpha3,
            beta: self.beta,
            epsilon: self.dice_epsilon,
        }
    }
}
