//! Run configuration, read from TOML or JSON.
//!
//! Every field except `r` has a default matching the desk-scale run
//! (`32 × 65` grid, `T = 0.5`, `dt = 1e-3`, `H = 0.9`, `s = 0`, `σ_0 = 0.1`).

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::Window;
use crate::exponents::{ExponentLedger, NoiseParams};
use crate::fbm::NoiseCoefficients;
use crate::snapshot::SnapshotFormat;
use crate::spectral::{GridSpec, NonlinearForm, TimeScheme};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
}

fn invalid(field: &'static str, message: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        field,
        message: message.to_string(),
    }
}

fn default_grid() -> GridSpec {
    GridSpec {
        n_x: 32,
        n_z: 65,
        height: 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub horizon: f64,
    pub dt: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { horizon: 0.5, dt: 1e-3 }
    }
}

impl TimeConfig {
    /// Number of steps, when `horizon / dt` is an integer.
    pub fn n_steps(&self) -> Option<usize> {
        let n = (self.horizon / self.dt).round();
        ((n * self.dt - self.horizon).abs() <= 1e-9 * self.horizon && n >= 1.0).then_some(n as usize)
    }
}

/// Boundary noise `σ_n = σ_0 (1 + n²)^{-decay}` for `|n| <= mode_cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub hurst: f64,
    pub sobolev_deficit: f64,
    pub sigma0: f64,
    pub decay: f64,
    pub mode_cutoff: usize,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            hurst: 0.9,
            sobolev_deficit: 0.0,
            sigma0: 0.1,
            decay: 0.5,
            mode_cutoff: 8,
        }
    }
}

impl NoiseConfig {
    pub fn params(&self) -> NoiseParams {
        NoiseParams {
            hurst: self.hurst,
            sobolev_deficit: self.sobolev_deficit,
        }
    }

    pub fn coefficients(&self) -> NoiseCoefficients {
        NoiseCoefficients::power_law(self.sigma0, self.decay, self.mode_cutoff, self.sobolev_deficit)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Times at which `u` (and its vorticity) are written; snapped to the step grid.
    pub snapshot_times: Vec<f64>,
    pub snapshot_format: SnapshotFormat,
    /// `q` values for the `L^{2q}` norm series of `w_g`.
    pub norm_q: Vec<f64>,
    /// `L^q`-in-`x` exponent of the blow-up profile.
    pub blowup_q: f64,
    /// `γ₂` of the Hölder fit.
    pub holder_gamma: f64,
    /// Also run the monolithic solver and report its distance to the splitting.
    pub compare_direct: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            snapshot_times: vec![0.25, 0.5],
            snapshot_format: SnapshotFormat::Csv,
            norm_q: vec![1.05, 1.4, 1.9],
            blowup_q: 2.0,
            holder_gamma: 0.0,
            compare_direct: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    pub threshold_q: Vec<f64>,
    pub threshold_n_z: Vec<usize>,
    /// Probe time; `None` means `T/2`.
    pub probe_time: Option<f64>,
    /// Defaults to [`Window::interior`].
    pub interior_window: Option<Window>,
    /// Defaults to [`Window::upper_wall`].
    pub wall_window: Option<Window>,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            threshold_q: vec![1.05, 1.9],
            threshold_n_z: vec![65, 129, 257],
            probe_time: None,
            interior_window: None,
            wall_window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    /// Integrability exponent in `(2, 2 q_H)`; fixes the splitting depth.
    pub r: f64,
    #[serde(default)]
    pub scheme: TimeScheme,
    #[serde(default = "default_form")]
    pub form: NonlinearForm,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
}

fn default_form() -> NonlinearForm {
    NonlinearForm::Skew
}

impl RunConfig {
    /// Desk-scale defaults with the given `r`.
    pub fn with_r(r: f64) -> Self {
        Self {
            grid: default_grid(),
            time: TimeConfig::default(),
            noise: NoiseConfig::default(),
            r,
            scheme: TimeScheme::default(),
            form: default_form(),
            seed: 0,
            output: OutputConfig::default(),
            diagnostics: DiagnosticsConfig::default(),
        }
    }

    /// Parses JSON when the text starts with `{`, TOML otherwise. A run
    /// manifest is accepted too; its embedded config is used.
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let parse_err = |message: String| ConfigError::Parse {
            path: origin.to_string(),
            message,
        };
        if text.trim_start().starts_with('{') {
            let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
            if value.get("config_sha256").is_some() {
                if let Some(inner) = value.get("config").cloned() {
                    value = inner;
                }
            }
            serde_json::from_value(value).map_err(|e| parse_err(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| parse_err(e.message().to_string()))
        }
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: origin.clone(),
            source,
        })?;
        Self::parse(&text, &origin)
    }

    pub fn n_steps(&self) -> usize {
        self.time.n_steps().unwrap_or(0)
    }

    pub fn interior_window(&self) -> Window {
        self.diagnostics
            .interior_window
            .unwrap_or_else(|| Window::interior(self.grid.height))
    }

    pub fn wall_window(&self) -> Window {
        self.diagnostics
            .wall_window
            .unwrap_or_else(|| Window::upper_wall(self.grid.height))
    }

    /// Checks everything that can be checked without computing; returns the ledger.
    pub fn validate(&self) -> Result<ExponentLedger, ConfigError> {
        self.grid.validate().map_err(|e| invalid("grid", e))?;
        let t = &self.time;
        if !(t.horizon > 0.0 && t.horizon.is_finite()) {
            return Err(invalid("time.horizon", format!("must be positive, got {}", t.horizon)));
        }
        if !(t.dt > 0.0) || t.n_steps().is_none() {
            return Err(invalid(
                "time.dt",
                format!("must be positive and divide the horizon {}, got {}", t.horizon, t.dt),
            ));
        }
        let n = &self.noise;
        self.noise.params().validate().map_err(|e| invalid("noise", e))?;
        if !(n.sigma0 >= 0.0 && n.sigma0.is_finite()) {
            return Err(invalid("noise.sigma0", format!("must be finite and >= 0, got {}", n.sigma0)));
        }
        if !(n.decay >= 0.0 && n.decay.is_finite()) {
            return Err(invalid("noise.decay", format!("must be finite and >= 0, got {}", n.decay)));
        }
        if n.mode_cutoff >= self.grid.n_x / 2 {
            return Err(invalid(
                "noise.mode_cutoff",
                format!("must be below n_x/2 = {}, got {}", self.grid.n_x / 2, n.mode_cutoff),
            ));
        }
        let ledger = ExponentLedger::new(self.noise.params(), self.r).map_err(|e| invalid("r", e))?;
        let o = &self.output;
        if o.snapshot_times.iter().any(|s| !(0.0..=t.horizon).contains(s)) {
            return Err(invalid("output.snapshot_times", format!("must lie in [0, {}]", t.horizon)));
        }
        if o.norm_q.iter().any(|q| !(*q >= 1.0 && q.is_finite())) {
            return Err(invalid("output.norm_q", "every q must be finite and >= 1"));
        }
        if !(o.blowup_q >= 1.0 && o.blowup_q.is_finite()) {
            return Err(invalid("output.blowup_q", format!("must be >= 1, got {}", o.blowup_q)));
        }
        if !(0.0..=0.5).contains(&o.holder_gamma) {
            return Err(invalid("output.holder_gamma", format!("must lie in [0, 1/2], got {}", o.holder_gamma)));
        }
        let d = &self.diagnostics;
        if d.threshold_q.is_empty() || d.threshold_q.iter().any(|q| !(*q > 1.0 && q.is_finite())) {
            return Err(invalid("diagnostics.threshold_q", "needs at least one finite q > 1"));
        }
        if d.threshold_n_z.len() < 2 || d.threshold_n_z.iter().any(|&n| n < 9) {
            return Err(invalid("diagnostics.threshold_n_z", "needs at least two resolutions, each >= 9"));
        }
        if let Some(p) = d.probe_time {
            if !(0.0..=t.horizon).contains(&p) {
                return Err(invalid("diagnostics.probe_time", format!("must lie in [0, {}]", t.horizon)));
            }
        }
        for (field, w) in [
            ("diagnostics.interior_window", self.interior_window()),
            ("diagnostics.wall_window", self.wall_window()),
        ] {
            if !w.is_inside(self.grid.height) {
                return Err(invalid(field, "must be a rectangle inside the channel"));
            }
        }
        Ok(ledger)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_toml_uses_defaults() {
        let c = RunConfig::parse("r = 2.8\n", "inline").unwrap();
        assert_eq!(c, RunConfig::with_r(2.8));
        let ledger = c.validate().unwrap();
        assert_eq!(ledger.depth, 2);
        assert_eq!(c.n_steps(), 500);
    }

    #[test]
    fn missing_r_names_the_field() {
        let err = RunConfig::parse("seed = 3\n", "inline").unwrap_err();
        assert!(err.to_string().contains("`r`"), "{err}");
        let err = RunConfig::parse("{\"seed\": 3}", "inline").unwrap_err();
        assert!(err.to_string().contains("`r`"), "{err}");
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(RunConfig::parse("r = 2.8\nbogus = 1\n", "inline").is_err());
        assert!(RunConfig::parse("r = 2.8\n[noise]\nhurts = 0.9\n", "inline").is_err());
    }

    #[test]
    fn validation_names_fields() {
        let field_of = |c: RunConfig| match c.validate() {
            Err(ConfigError::Invalid { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(field_of(RunConfig::with_r(3.5)), "r");
        let mut c = RunConfig::with_r(2.8);
        c.time.dt = 3e-3;
        assert_eq!(field_of(c), "time.dt");
        let mut c = RunConfig::with_r(2.8);
        c.noise.hurst = 0.7;
        assert_eq!(field_of(c), "noise");
        let mut c = RunConfig::with_r(2.8);
        c.noise.mode_cutoff = 16;
        assert_eq!(field_of(c), "noise.mode_cutoff");
        let mut c = RunConfig::with_r(2.8);
        c.grid.n_x = 31;
        assert_eq!(field_of(c), "grid");
    }

    #[test]
    fn json_and_manifest_forms() {
        let c = RunConfig::with_r(3.0);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::parse(&json, "inline").unwrap(), c);
        let manifest = serde_json::json!({"config_sha256": "x", "config": c});
        assert_eq!(RunConfig::parse(&manifest.to_string(), "inline").unwrap(), c);
    }
}
