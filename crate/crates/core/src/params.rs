//! Physical parameters, scheme geometry, photon qubit and interferometer settings.
//!
//! All rates are amplitude-damping rates (half the energy decay rates) and
//! every stored frequency is expressed in units of the main cavity coupling
//! rate κ unless a caller deliberately builds parameters with κ ≠ 1.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cavity and atom rates for one atom-cavity system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Main cavity amplitude-coupling rate κ.
    pub kappa: f64,
    /// Cavity loss amplitude rate κ_J.
    pub kappa_j: f64,
    /// Atomic spontaneous amplitude-damping rate γ.
    pub gamma: f64,
    /// Single-photon Rabi coupling g.
    pub g: f64,
    /// Cavity-carrier detuning Δ_c = ω_c − ω_0.
    pub delta_c: f64,
    /// Atomic detuning for ground state 1.
    pub delta_1: f64,
    /// Atomic detuning for ground state 2.
    pub delta_2: f64,
}

impl SystemParams {
    /// Resonant parameters (all detunings zero).
    pub fn new(kappa: f64, kappa_j: f64, gamma: f64, g: f64) -> Result<Self> {
        let p = SystemParams {
            kappa,
            kappa_j,
            gamma,
            g,
            delta_c: 0.0,
            delta_1: 0.0,
            delta_2: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters in units of κ = 1 with the coupling set from a cooperativity.
    pub fn from_cooperativity(cooperativity: f64, kappa_j: f64, gamma: f64) -> Result<Self> {
        let g = g_from_cooperativity(cooperativity, 1.0, gamma)?;
        SystemParams::new(1.0, kappa_j, gamma, g)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.kappa,
            self.kappa_j,
            self.gamma,
            self.g,
            self.delta_c,
            self.delta_1,
            self.delta_2,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter(format!("non-finite rate in {self:?}")));
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidParameter(format!("kappa must be > 0, got {}", self.kappa)));
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if self.kappa_j < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "kappa_j must be >= 0, got {}",
                self.kappa_j
            )));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParameter(format!("g must be >= 0, got {}", self.g)));
        }
        Ok(())
    }

    pub fn with_detunings(mut self, delta_1: f64, delta_2: f64) -> Self {
        self.delta_1 = delta_1;
        self.delta_2 = delta_2;
        self
    }

    pub fn with_geometry(self, geom: SchemeGeometry) -> Result<Self> {
        let (d1, d2) = build_detunings(geom)?;
        Ok(self.with_detunings(d1, d2))
    }

    pub fn with_cavity_detuning(mut self, delta_c: f64) -> Self {
        self.delta_c = delta_c;
        self
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_cooperativity(self, cooperativity: f64) -> Result<Self> {
        let g = g_from_cooperativity(cooperativity, self.kappa, self.gamma)?;
        Ok(self.with_g(g))
    }

    pub fn cooperativity(&self) -> f64 {
        cooperativity(self)
    }

    /// Detuning of ground state `j`.
    pub fn detuning(&self, state: GroundState) -> f64 {
        match state {
            GroundState::One => self.delta_1,
            GroundState::Two => self.delta_2,
        }
    }

    /// Rescales every rate and detuning by κ so that κ = 1.
    pub fn normalized(&self) -> Self {
        let k = self.kappa;
        SystemParams {
            kappa: 1.0,
            kappa_j: self.kappa_j / k,
            gamma: self.gamma / k,
            g: self.g / k,
            delta_c: self.delta_c / k,
            delta_1: self.delta_1 / k,
            delta_2: self.delta_2 / k,
        }
    }
}

/// Single-atom lossless cooperativity g²/(κγ). κ_J does not enter.
pub fn cooperativity(p: &SystemParams) -> f64 {
    p.g * p.g / (p.kappa * p.gamma)
}

/// Coupling g that realizes cooperativity `c` for the given κ and γ.
pub fn g_from_cooperativity(c: f64, kappa: f64, gamma: f64) -> Result<f64> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("cooperativity must be >= 0, got {c}")));
    }
    if !(kappa > 0.0) || !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kappa and gamma must be > 0 (kappa = {kappa}, gamma = {gamma})"
        )));
    }
    Ok((c * kappa * gamma).sqrt())
}

/// Parameters including the fictitious spontaneous-emission cavity Q.
///
/// The atomic damping of `base` is replaced by the implied bad-cavity rate
/// g_Q²/κ_Q on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullSystemParams {
    pub base: SystemParams,
    pub kappa_q: f64,
    pub g_q: f64,
}

impl FullSystemParams {
    pub fn new(base: SystemParams, kappa_q: f64, g_q: f64) -> Result<Self> {
        if !(kappa_q > 0.0) || !kappa_q.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa_q must be > 0, got {kappa_q}")));
        }
        if !(g_q >= 0.0) || !g_q.is_finite() {
            return Err(Error::InvalidParameter(format!("g_q must be >= 0, got {g_q}")));
        }
        Ok(FullSystemParams { base, kappa_q, g_q })
    }

    /// Q-cavity parameters whose bad-cavity limit reproduces `base.gamma`.
    pub fn matching(base: SystemParams, kappa_q: f64) -> Result<Self> {
        FullSystemParams::new(base, kappa_q, (base.gamma * kappa_q).sqrt())
    }

    /// γ = g_Q²/κ_Q.
    pub fn implied_gamma(&self) -> f64 {
        self.g_q * self.g_q / self.kappa_q
    }
}

/// Which atomic ground state the photon reflects from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroundState {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Photon and cavity resonant with ground state 1.
    OnOff,
    /// Photon and cavity midway between the two atomic resonances.
    PushPull,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::PushPull, Scheme::OnOff];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::OnOff => "on-off",
            Scheme::PushPull => "push-pull",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "on-off" | "onoff" => Ok(Scheme::OnOff),
            "push-pull" | "pushpull" => Ok(Scheme::PushPull),
            other => Err(Error::Config(format!(
                "unknown scheme '{other}' (expected 'push-pull' or 'on-off')"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeGeometry {
    pub scheme: Scheme,
    /// Ground-state separation Δ.
    pub delta: f64,
}

impl SchemeGeometry {
    pub fn new(scheme: Scheme, delta: f64) -> Result<Self> {
        let geom = SchemeGeometry { scheme, delta };
        build_detunings(geom)?;
        Ok(geom)
    }
}

/// Atomic detunings (Δ_1, Δ_2) for a scheme.
pub fn build_detunings(geom: SchemeGeometry) -> Result<(f64, f64)> {
    if !(geom.delta > 0.0) || !geom.delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "ground-state separation must be > 0, got {}",
            geom.delta
        )));
    }
    Ok(match geom.scheme {
        Scheme::OnOff => (0.0, geom.delta),
        Scheme::PushPull => (-0.5 * geom.delta, 0.5 * geom.delta),
    })
}

const QUBIT_NORM_TOL: f64 = 1e-12;

/// Photon polarization qubit α|H⟩ + β|V⟩, equivalently the target memory
/// state α|g_1⟩ + β|g_2⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl QubitState {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !((norm - 1.0).abs() <= QUBIT_NORM_TOL) {
            return Err(Error::InvalidParameter(format!(
                "qubit amplitudes must satisfy |alpha|^2 + |beta|^2 = 1, got {norm}"
            )));
        }
        Ok(QubitState { alpha, beta })
    }

    /// (α, β) = (cos(χ/2), e^{iφ} sin(χ/2)).
    pub fn from_angles(chi: f64, phi: f64) -> Self {
        let (s, c) = (0.5 * chi).sin_cos();
        QubitState {
            alpha: Complex64::new(c, 0.0),
            beta: Complex64::from_polar(s, phi),
        }
    }

    /// Inverse of [`QubitState::from_angles`] up to a global phase, with
    /// χ ∈ [0, π] and φ ∈ (−π, π].
    pub fn angles(&self) -> (f64, f64) {
        let chi = 2.0 * self.beta.norm().atan2(self.alpha.norm());
        let phi = if self.beta.norm() == 0.0 {
            0.0
        } else if self.alpha.norm() == 0.0 {
            self.beta.arg()
        } else {
            wrap_phase(self.beta.arg() - self.alpha.arg())
        };
        (chi, phi)
    }

    pub fn horizontal() -> Self {
        QubitState::from_angles(0.0, 0.0)
    }

    pub fn vertical() -> Self {
        QubitState::from_angles(PI, 0.0)
    }
}

/// Wraps a phase into (−π, π].
pub fn wrap_phase(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Lower-path phase θ, delay T and optional attenuation η of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerSettings {
    pub theta: f64,
    pub delay: f64,
    pub eta: f64,
}

/// Default lower-path delay T in units of 1/κ.
pub const DEFAULT_DELAY: f64 = 1.2;

impl InterferometerSettings {
    pub fn new(theta: f64, delay: f64, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!("eta must lie in [0, 1], got {eta}")));
        }
        if !theta.is_finite() || !delay.is_finite() {
            return Err(Error::InvalidParameter("theta and delay must be finite".into()));
        }
        Ok(InterferometerSettings {
            theta: wrap_phase(theta),
            delay,
            eta,
        })
    }

    /// Default settings: T = 1.2/κ, η = 1, and the phase that lines the
    /// lower path up with r_1 = −r_2 = e^{iθ} for the scheme's detunings
    /// (θ = −π/2 for push-pull, θ = π for on-off).
    pub fn for_scheme(scheme: Scheme) -> Self {
        InterferometerSettings {
            theta: default_theta(scheme),
            delay: DEFAULT_DELAY,
            eta: 1.0,
        }
    }
}

pub fn default_theta(scheme: Scheme) -> f64 {
    match scheme {
        Scheme::PushPull => -0.5 * PI,
        Scheme::OnOff => PI,
    }
}
