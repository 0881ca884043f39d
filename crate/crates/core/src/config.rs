//! JSON run configuration shared by the command-line tool.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dispersion::{Mode, PlateMaterial};
use crate::estimators::{AicParams, AicVariant};
use crate::harness::{CutoffPicker, SyntheticSetup};
use crate::signal::SensorLayout;
use crate::tfa::CwtOptions;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub material: PlateMaterial,
    pub layout: SensorLayout,
    /// Index into `layout.impacts`.
    pub impact: usize,
    pub dispersion: DispersionBlock,
    pub generation: SyntheticSetup,
    pub noise: Option<NoiseBlock>,
    /// Waveform CSV to analyse instead of generating signals.
    pub input: Option<PathBuf>,
    pub methods: MethodBlock,
    pub sweeps: SweepBlock,
    pub outputs: OutputBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            material: PlateMaterial::aluminum_2mm(),
            layout: SensorLayout::reference_plate(),
            impact: 0,
            dispersion: DispersionBlock::default(),
            generation: SyntheticSetup::default(),
            noise: None,
            input: None,
            methods: MethodBlock::default(),
            sweeps: SweepBlock::default(),
            outputs: OutputBlock::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionBlock {
    pub modes: Vec<Mode>,
    /// Hz·m
    pub fd_step: f64,
    pub fd_max: f64,
}

impl Default for DispersionBlock {
    fn default() -> Self {
        Self { modes: vec![Mode::S0, Mode::A0], fd_step: 1.0, fd_max: 5000.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseBlock {
    pub snr_db: Option<f64>,
    pub floor_sigma: Option<f64>,
    pub seed: u64,
}

impl Default for NoiseBlock {
    fn default() -> Self {
        Self { snr_db: Some(45.0), floor_sigma: None, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[derive(Default)]
pub struct MethodBlock {
    /// Optional low-pass applied to every channel before picking (Hz).
    pub lowpass: Option<f64>,
    pub tc: TcBlock,
    pub sla: SlaBlock,
    pub mer: MerBlock,
    pub aic: AicParams,
    pub cwt: CwtBlock,
}


#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TcBlock {
    /// Fraction of the smallest channel maximum.
    pub p: f64,
}

impl Default for TcBlock {
    fn default() -> Self {
        Self { p: 1e-2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlaBlock {
    pub alpha: f64,
    pub beta: f64,
    pub t_dom: f64,
}

impl Default for SlaBlock {
    fn default() -> Self {
        Self { alpha: 5.0, beta: 10.0, t_dom: 10e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MerBlock {
    pub alpha: f64,
    pub t_dom: f64,
}

impl Default for MerBlock {
    fn default() -> Self {
        Self { alpha: 40.0, t_dom: 10e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CwtBlock {
    pub f_lo: f64,
    pub f_hi: f64,
    pub f_step: f64,
    pub threshold: f64,
    pub options: CwtOptions,
    /// Reference channel for relative times; earliest TC pick when absent.
    pub reference: Option<usize>,
}

impl Default for CwtBlock {
    fn default() -> Self {
        Self {
            f_lo: 50e3,
            f_hi: 100e3,
            f_step: 100.0,
            threshold: 1e-2,
            options: CwtOptions::default(),
            reference: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepBlock {
    pub p_values: Vec<f64>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub ub_values: Vec<f64>,
    pub aic_variant: AicVariant,
    pub cutoffs: Vec<f64>,
    pub cutoff_picker: CutoffPicker,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self {
            p_values: vec![1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1],
            alphas: (1..=10).map(f64::from).collect(),
            betas: (1..=10).map(f64::from).collect(),
            ub_values: (1..=10).map(|i| f64::from(i) * 100e-6).collect(),
            aic_variant: AicVariant::Lm,
            cutoffs: vec![5e3, 10e3, 20e3, 50e3, 100e3],
            cutoff_picker: CutoffPicker::AicGm { params: AicParams::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: PathBuf,
    /// Emit SVG plots next to the tables.
    pub plots: bool,
    /// Write full-resolution scalograms as long-format CSV (about 100 MB per channel at the defaults).
    pub scalogram_csv: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), plots: true, scalogram_csv: false }
    }
}

/// Configuration problem with the JSON path where it occurred.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config field `{field}`: {message}")]
    Field { field: String, message: String },
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Field {
            field: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let field = |f: &str, e: crate::Error| ConfigError::Field { field: f.into(), message: e.to_string() };
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Field {
                field: "schema_version".into(),
                message: format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            });
        }
        self.material.validate().map_err(|e| field("material", e))?;
        self.layout.validate().map_err(|e| field("layout", e))?;
        if self.impact >= self.layout.impacts.len() {
            return Err(ConfigError::Field {
                field: "impact".into(),
                message: format!("index {} but {} impacts", self.impact, self.layout.impacts.len()),
            });
        }
        self.generation.validate().map_err(|e| field("generation", e))?;
        self.methods.aic.validate().map_err(|e| field("methods.aic", e))?;
        if !(self.dispersion.fd_step > 0.0 && self.dispersion.fd_max >= self.dispersion.fd_step) {
            return Err(ConfigError::Field {
                field: "dispersion".into(),
                message: "need 0 < fd_step <= fd_max".into(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trip() {
        let cfg = RunConfig::default();
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn empty_document_is_default() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_mode_names_the_field() {
        let err = RunConfig::from_json(r#"{"dispersion": {"modes": ["S0", "B3"]}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("dispersion.modes"), "{msg}");
    }

    #[test]
    fn typo_and_version_rejected() {
        assert!(RunConfig::from_json(r#"{"impactt": 1}"#).is_err());
        let err = RunConfig::from_json(r#"{"schema_version": 7}"#).unwrap_err();
        assert!(err.to_string().contains("schema_version"));
        assert!(RunConfig::from_json(r#"{"impact": 9}"#).is_err());
    }
}
