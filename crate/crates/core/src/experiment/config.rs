//! Flat TOML run configuration. Every key is optional and overrides the
//! preset named by `preset` (or the built-in defaults). Rates are ratios to κ.

use std::path::Path;

use serde::Deserialize;

use super::preset::{preset, Preset};
use crate::error::{Error, Result};
use crate::grid::DEFAULT_POINTS;
use crate::params::{default_theta, InterferometerSettings, Scheme, SchemeGeometry, SystemParams};
use crate::spectral::c_pi;

pub const DEFAULT_C_POINTS: usize = 40;
pub const DEFAULT_PRESET: &str = "fig6";

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// The file as written. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    pub name: Option<String>,
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
    pub kappa_j: Option<OneOrMany>,
    pub delta_c: Option<f64>,
    pub sigma: Option<f64>,
    pub sigmas: Option<Vec<f64>>,
    pub c_min: Option<f64>,
    pub c_max: Option<f64>,
    pub c_points: Option<usize>,
    pub cooperativity: Option<f64>,
    pub schemes: Option<Vec<Scheme>>,
    pub theta_push_pull: Option<f64>,
    pub theta_on_off: Option<f64>,
    pub delay: Option<f64>,
    pub eta: Option<f64>,
    pub grid_points: Option<usize>,
    pub rel_tol: Option<f64>,
    pub polar_nodes: Option<usize>,
    pub azimuthal_nodes: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Applies the overrides on top of the chosen preset.
    pub fn resolve(self) -> Result<RunConfig> {
        let base = preset(self.preset.as_deref().unwrap_or(DEFAULT_PRESET))?;
        let mut cfg = RunConfig::from_preset(base);
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        if let Some(name) = self.name {
            cfg.name = name;
        }
        set(&mut cfg.delta, self.delta);
        set(&mut cfg.gamma, self.gamma);
        if let Some(k) = self.kappa_j {
            cfg.kappa_j = k.into_vec();
        }
        set(&mut cfg.delta_c, self.delta_c);
        set(&mut cfg.sigma, self.sigma);
        if let Some(s) = self.sigmas {
            cfg.sigmas = s;
        }
        set(&mut cfg.c_min, self.c_min);
        set(&mut cfg.c_max, self.c_max);
        if let Some(n) = self.c_points {
            cfg.c_points = n;
        }
        if self.cooperativity.is_some() {
            cfg.cooperativity = self.cooperativity;
        }
        if let Some(s) = self.schemes {
            cfg.schemes = s;
        }
        set(&mut cfg.theta_push_pull, self.theta_push_pull);
        set(&mut cfg.theta_on_off, self.theta_on_off);
        set(&mut cfg.delay, self.delay);
        set(&mut cfg.eta, self.eta);
        if let Some(n) = self.grid_points {
            cfg.grid_points = n;
        }
        set(&mut cfg.rel_tol, self.rel_tol);
        if let Some(n) = self.polar_nodes {
            cfg.polar_nodes = n;
        }
        if let Some(n) = self.azimuthal_nodes {
            cfg.azimuthal_nodes = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Fully resolved settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub delta: f64,
    pub gamma: f64,
    pub kappa_j: Vec<f64>,
    pub delta_c: f64,
    pub sigma: f64,
    pub sigmas: Vec<f64>,
    pub c_min: f64,
    pub c_max: f64,
    pub c_points: usize,
    /// Single-point cooperativity; `None` means C_π.
    pub cooperativity: Option<f64>,
    pub schemes: Vec<Scheme>,
    pub theta_push_pull: f64,
    pub theta_on_off: f64,
    pub delay: f64,
    pub eta: f64,
    pub grid_points: usize,
    pub rel_tol: f64,
    pub polar_nodes: usize,
    pub azimuthal_nodes: usize,
}

impl RunConfig {
    pub fn from_preset(p: &Preset) -> Self {
        RunConfig {
            name: p.name.to_string(),
            delta: p.delta,
            gamma: p.gamma,
            kappa_j: p.kappa_j.to_vec(),
            delta_c: 0.0,
            sigma: p.sigma,
            sigmas: p.sigma_scan.to_vec(),
            c_min: p.c_range.0,
            c_max: p.c_range.1,
            c_points: DEFAULT_C_POINTS,
            cooperativity: None,
            schemes: p.schemes.to_vec(),
            theta_push_pull: default_theta(Scheme::PushPull),
            theta_on_off: default_theta(Scheme::OnOff),
            delay: p.delay,
            eta: p.eta,
            grid_points: DEFAULT_POINTS,
            rel_tol: crate::dynamics::DEFAULT_REL_TOL,
            polar_nodes: 10,
            azimuthal_nodes: 10,
        }
    }

    pub fn from_preset_name(name: &str) -> Result<Self> {
        Ok(Self::from_preset(preset(name)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        ConfigFile::load(path)?.resolve()
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be a positive number, got {v}")))
            }
        };
        positive("delta", self.delta)?;
        positive("gamma", self.gamma)?;
        positive("sigma", self.sigma)?;
        positive("c_min", self.c_min)?;
        positive("c_max", self.c_max)?;
        if !self.delay.is_finite() {
            return Err(Error::Config("delay must be finite".into()));
        }
        for &s in &self.sigmas {
            positive("sigmas entry", s)?;
        }
        if let Some(c) = self.cooperativity {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::Config(format!("cooperativity must be >= 0, got {c}")));
            }
        }
        if self.kappa_j.is_empty() {
            return Err(Error::Config("kappa_j needs at least one value".into()));
        }
        for &k in &self.kappa_j {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::Config(format!("kappa_j must be >= 0, got {k}")));
            }
        }
        if !self.delta_c.is_finite() {
            return Err(Error::Config("delta_c must be finite".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("schemes must list at least one scheme".into()));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::Config(format!("eta must lie in [0, 1], got {}", self.eta)));
        }
        if self.grid_points < 3 || self.grid_points.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "grid_points must be odd and >= 3, got {}",
                self.grid_points
            )));
        }
        if !(self.rel_tol >= 1e-13) {
            return Err(Error::Config(format!("rel_tol must be >= 1e-13, got {}", self.rel_tol)));
        }
        if self.polar_nodes == 0 || self.azimuthal_nodes == 0 {
            return Err(Error::Config("quadrature node counts must be >= 1".into()));
        }
        if !self.theta_push_pull.is_finite() || !self.theta_on_off.is_finite() {
            return Err(Error::Config("theta must be finite".into()));
        }
        Ok(())
    }

    pub fn geometry(&self, scheme: Scheme) -> Result<SchemeGeometry> {
        SchemeGeometry::new(scheme, self.delta)
    }

    /// Parameters at cooperativity `c` (κ = 1).
    pub fn params(&self, scheme: Scheme, kappa_j: f64, c: f64) -> Result<SystemParams> {
        Ok(SystemParams::from_cooperativity(c, kappa_j, self.gamma)?
            .with_geometry(self.geometry(scheme)?)?
            .with_cavity_detuning(self.delta_c))
    }

    /// C_π for the push-pull split of Δ at cavity loss `kappa_j`.
    pub fn c_pi(&self, kappa_j: f64) -> Result<f64> {
        let p = self.params(Scheme::PushPull, kappa_j, 1.0)?;
        c_pi(&p, p.delta_1)
    }

    /// The configured single-point cooperativity, or C_π.
    pub fn point_cooperativity(&self, kappa_j: f64) -> Result<f64> {
        match self.cooperativity {
            Some(c) => Ok(c),
            None => self.c_pi(kappa_j),
        }
    }

    pub fn theta(&self, scheme: Scheme) -> f64 {
        match scheme {
            Scheme::PushPull => self.theta_push_pull,
            Scheme::OnOff => self.theta_on_off,
        }
    }

    pub fn interferometer(&self, scheme: Scheme) -> Result<InterferometerSettings> {
        InterferometerSettings::new(self.theta(scheme), self.delay, self.eta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default_preset() {
        let cfg = ConfigFile::parse("").unwrap().resolve().unwrap();
        assert_eq!(cfg, RunConfig::from_preset_name(DEFAULT_PRESET).unwrap());
    }

    #[test]
    fn overrides_apply() {
        let text = r#"
preset = "fig8a"
kappa_j = 0.1
schemes = ["on-off"]
c_points = 5
sigmas = [0.01, 0.02]
"#;
        let cfg = ConfigFile::parse(text).unwrap().resolve().unwrap();
        assert_eq!(cfg.kappa_j, vec![0.1]);
        assert_eq!(cfg.schemes, vec![Scheme::OnOff]);
        assert_eq!(cfg.c_points, 5);
        assert_eq!(cfg.delta, 0.0043);
        assert_eq!(cfg.sigmas, vec![0.01, 0.02]);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = ConfigFile::parse("gama = 0.1").unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("gama")));
    }

    #[test]
    fn wrong_type_rejected() {
        assert!(ConfigFile::parse("delta = \"ten\"").is_err());
        assert!(ConfigFile::parse("schemes = [\"sideways\"]").is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        for text in ["gamma = -1.0", "grid_points = 4096", "eta = 1.5", "kappa_j = []", "rel_tol = 1e-15", "preset = \"nope\""] {
            let r = ConfigFile::parse(text).and_then(ConfigFile::resolve);
            assert!(matches!(r, Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn c_pi_from_config() {
        let cfg = RunConfig::from_preset_name("fig8a").unwrap();
        assert!((cfg.c_pi(0.23).unwrap() - 2.48).abs() < 0.01);
        assert!((cfg.point_cooperativity(0.23).unwrap() - cfg.c_pi(0.23).unwrap()).abs() == 0.0);
    }
}
