//! TOML run configuration.

use serde::{Deserialize, Serialize};

use crate::dynamics::InitialState;
use crate::global_me::{Approach, LambShiftSpec};
use crate::model::{BathParams, LocalFrequency, ModelParams};

/// Which generators a command runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ApproachSelection {
    Global,
    Local,
    #[default]
    Both,
}

impl ApproachSelection {
    pub fn approaches(self) -> &'static [Approach] {
        match self {
            ApproachSelection::Global => &[Approach::Global],
            ApproachSelection::Local => &[Approach::Local],
            ApproachSelection::Both => &[Approach::Global, Approach::Local],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub g: f64,
    pub delta: f64,
    pub lambda: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { g: 1.0, delta: 15.0, lambda: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub temperature: f64,
    #[serde(default = "unit")]
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_by_transition: Option<[f64; 3]>,
}

fn unit() -> f64 {
    1.0
}

impl BathSection {
    fn with_temperature(temperature: f64) -> Self {
        Self { temperature, h: 1.0, h_by_transition: None }
    }

    fn params(&self) -> BathParams {
        BathParams { temperature: self.temperature, h: self.h, h_by_transition: self.h_by_transition }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Baths {
    pub left: BathSection,
    pub right: BathSection,
}

impl Default for Baths {
    fn default() -> Self {
        Self { left: BathSection::with_temperature(10.0), right: BathSection::with_temperature(20.0) }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalSection {
    pub frequency: LocalFrequency,
}

/// Cartesian `(T_L, g)` grid; `T_R` stays at the configured value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub t_left_min: f64,
    pub t_left_max: f64,
    pub t_left_steps: usize,
    pub g_min: f64,
    pub g_max: f64,
    pub g_steps: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { t_left_min: 0.0, t_left_max: 100.0, t_left_steps: 50, g_min: 0.0, g_max: 10.0, g_steps: 50 }
    }
}

fn axis(min: f64, max: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![min];
    }
    (0..steps).map(|i| min + (max - min) * i as f64 / (steps - 1) as f64).collect()
}

impl SweepSpec {
    pub fn t_left_values(&self) -> Vec<f64> {
        axis(self.t_left_min, self.t_left_max, self.t_left_steps)
    }

    pub fn g_values(&self) -> Vec<f64> {
        axis(self.g_min, self.g_max, self.g_steps)
    }

    fn validate(&self) -> Result<(), String> {
        for (name, lo, hi, steps) in [
            ("t_left", self.t_left_min, self.t_left_max, self.t_left_steps),
            ("g", self.g_min, self.g_max, self.g_steps),
        ] {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(format!("[sweep] {name}_min and {name}_max must be finite"));
            }
            if lo > hi {
                return Err(format!("[sweep] {name}_min = {lo} exceeds {name}_max = {hi}"));
            }
            if steps == 0 {
                return Err(format!("[sweep] {name}_steps must be >= 1"));
            }
        }
        if self.t_left_min < 0.0 || self.g_min < 0.0 {
            return Err("[sweep] t_left_min and g_min must be >= 0".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSpec {
    pub t_max: f64,
    pub n_points: usize,
    pub initial: InitialState,
}

impl Default for EvolveSpec {
    fn default() -> Self {
        Self { t_max: 10.0, n_points: 201, initial: InitialState::Basis("011".into()) }
    }
}

impl EvolveSpec {
    fn validate(&self) -> Result<(), String> {
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err("[evolve] t_max must be finite and > 0".into());
        }
        if self.n_points < 2 {
            return Err("[evolve] n_points must be >= 2".into());
        }
        self.initial.density().map(|_| ()).map_err(|e| format!("[evolve] initial: {e}"))
    }
}

/// Fully resolved configuration; every field has a default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub approach: ApproachSelection,
    pub model: ModelSection,
    pub bath: Baths,
    pub local: LocalSection,
    pub lamb_shift: LambShiftSpec,
    pub sweep: SweepSpec,
    pub evolve: EvolveSpec,
}

impl RunConfig {
    /// Parses and validates; errors carry the offending line or field.
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.params().map_err(|e| format!("[model]/[bath]: {e}"))?;
        if self.lamb_shift.quadrature_points < 200 {
            return Err("[lamb_shift] quadrature_points must be >= 200".into());
        }
        self.sweep.validate()?;
        self.evolve.validate()
    }

    pub fn params(&self) -> crate::Result<ModelParams> {
        let mut p = ModelParams::new(
            self.model.g,
            self.model.delta,
            self.model.lambda,
            self.bath.left.params(),
            self.bath.right.params(),
        )?;
        p.local_frequency = self.local.frequency;
        Ok(p)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
