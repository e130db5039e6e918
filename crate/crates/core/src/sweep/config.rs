use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::Boundary;
use crate::propagation::{Plateau, PropagatorChoice, Schedule};
use crate::scaling::{CollapseBounds, CollapseParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `dt = 10`, `10^4` steps, sizes up to 608.
    Paper,
    /// `dt = 10`, 2000 steps with early stop, sizes up to 128.
    Desk,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Preset::Paper),
            "desk" => Ok(Preset::Desk),
            other => Err(Error::Config(format!("unknown preset `{other}` (expected paper or desk)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub dt: f64,
    pub steps: usize,
    pub early_stop: bool,
    /// Density samples every this many steps.
    pub sample_stride: usize,
    pub propagator: PropagatorChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothingConfig {
    pub sigma: f64,
    pub tail_fraction: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig {
            sigma: 20.0,
            tail_fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Analyses {
    pub collapse: bool,
    pub power_law: bool,
    pub cft_fit: bool,
    pub fractal: bool,
    pub mutual_info: bool,
    pub density_movie: bool,
}

/// Collapse window override for one `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaWindow {
    pub gamma: f64,
    pub min_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollapseConfig {
    pub init: CollapseParams,
    pub bounds: CollapseBounds,
    /// Only points with `delta >= window_min_delta` enter the fit...
    pub window_min_delta: f64,
    /// ...unless a per-gamma override applies.
    #[serde(default)]
    pub window_overrides: Vec<GammaWindow>,
    pub bootstrap_n: usize,
    pub seed: u64,
}

impl Default for CollapseConfig {
    fn default() -> Self {
        CollapseConfig {
            init: CollapseParams::new(0.15, 1.9, 2.0),
            bounds: CollapseBounds::default(),
            window_min_delta: 0.1,
            window_overrides: Vec::new(),
            bootstrap_n: 100,
            seed: 0,
        }
    }
}

impl CollapseConfig {
    pub fn min_delta_for(&self, gamma: f64) -> f64 {
        self.window_overrides
            .iter()
            .find(|w| (w.gamma - gamma).abs() < 1e-12)
            .map_or(self.window_min_delta, |w| w.min_delta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub gamma_values: Vec<f64>,
    pub delta_values: Vec<f64>,
    pub sizes: Vec<usize>,
    pub boundary: Boundary,
    pub schedule: ScheduleConfig,
    pub smoothing: SmoothingConfig,
    pub analyses: Analyses,
    pub collapse_options: CollapseConfig,
    pub output_dir: PathBuf,
    pub workers: usize,
    /// Fill `wall_time_s`; off by default so reruns are byte-identical.
    #[serde(default)]
    pub record_timing: bool,
    /// Also write every trajectory as JSON (input for `verify`).
    #[serde(default)]
    pub save_trajectories: bool,
}

impl SweepConfig {
    pub fn preset(preset: Preset) -> Self {
        let delta_values = vec![
            0.001, 0.01, 0.05, 0.1, 0.125, 0.15, 0.175, 0.2, 0.25, 0.3, 0.5, 1.0, 5.0, 20.0,
        ];
        match preset {
            Preset::Paper => SweepConfig {
                gamma_values: vec![-0.5],
                delta_values,
                sizes: vec![64, 128, 192, 320, 448, 608],
                boundary: Boundary::Open,
                schedule: ScheduleConfig {
                    dt: 10.0,
                    steps: 10_000,
                    early_stop: false,
                    sample_stride: 100,
                    propagator: PropagatorChoice::Auto,
                },
                smoothing: SmoothingConfig::default(),
                analyses: Analyses::default(),
                collapse_options: CollapseConfig::default(),
                output_dir: PathBuf::from("out"),
                workers: 1,
                record_timing: false,
                save_trajectories: false,
            },
            Preset::Desk => SweepConfig {
                sizes: vec![32, 64, 96, 128],
                schedule: ScheduleConfig {
                    steps: 2000,
                    early_stop: true,
                    ..Self::preset(Preset::Paper).schedule
                },
                ..Self::preset(Preset::Paper)
            },
        }
    }

    /// Parses a JSON document, filling absent fields from `base`.
    pub fn from_json_over(text: &str, base: &SweepConfig) -> Result<Self> {
        let overlay: Value =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config is not valid JSON: {e}")))?;
        let mut merged = serde_json::to_value(base)?;
        merge(&mut merged, overlay);
        let cfg: SweepConfig =
            serde_json::from_value(merged).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, base: &SweepConfig) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_over(&text, base)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.gamma_values.is_empty() || self.delta_values.is_empty() || self.sizes.is_empty() {
            return bad("gamma_values, delta_values and sizes must be nonempty".into());
        }
        if let Some(g) = self.gamma_values.iter().find(|g| !(g.abs() < 1.0)) {
            return bad(format!("gamma must satisfy |gamma| < 1, got {g}"));
        }
        if let Some(d) = self.delta_values.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return bad(format!("delta must be finite and non-negative, got {d}"));
        }
        let min = self.boundary.min_length();
        if let Some(l) = self.sizes.iter().find(|&&l| l % 2 != 0 || l < min.max(2)) {
            return bad(format!("sizes must be even and at least {}, got {l}", min.max(2)));
        }
        if self.analyses.mutual_info {
            if let Some(l) = self.sizes.iter().find(|&&l| l % 8 != 0) {
                return bad(format!("mutual_info needs sizes divisible by 8, got {l}"));
            }
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        let s = &self.schedule;
        if !(s.dt.is_finite() && s.dt > 0.0) || s.steps == 0 {
            return bad("schedule needs dt > 0 and steps >= 1".into());
        }
        let sm = &self.smoothing;
        if !(sm.sigma.is_finite() && sm.sigma >= 0.0) || !(sm.tail_fraction > 0.0 && sm.tail_fraction <= 1.0) {
            return bad("smoothing needs sigma >= 0 and tail_fraction in (0, 1]".into());
        }
        let c = &self.collapse_options;
        if !c.bounds.contains(c.init) {
            return bad("collapse init lies outside its bounds".into());
        }
        Ok(())
    }

    pub fn trajectory_schedule(&self) -> Schedule {
        Schedule {
            dt: self.schedule.dt,
            steps: self.schedule.steps,
            sample_stride: self.schedule.sample_stride,
            early_stop: self.schedule.early_stop,
            plateau: Plateau {
                sigma: self.smoothing.sigma,
                ..Plateau::default()
            },
            track_mutual_info: self.analyses.mutual_info,
            check_invariants: false,
            propagator: self.schedule.propagator,
        }
    }
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
