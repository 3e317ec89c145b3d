//! Single-photon temporal modes: the spectral amplitude Ã(ω) and its time
//! domain counterpart A(t) = ∫(dω/2π) Ã(ω) e^{−iωt}.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;

/// Allowed deviation of ∫(dω/2π)|Ã|² from 1.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Gaussian spectra must be sampled out to at least this many σ.
pub const MIN_SPAN_SIGMAS: f64 = 6.0;

/// Square-normalized spectral amplitude sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonSpectrum {
    grid: FrequencyGrid,
    amplitude: Vec<Complex64>,
    sigma: Option<f64>,
}

impl PhotonSpectrum {
    /// Wraps arbitrary samples; fails unless they are square-normalized.
    pub fn from_samples(grid: FrequencyGrid, amplitude: Vec<Complex64>) -> Result<Self> {
        if amplitude.len() != grid.len() {
            return Err(Error::GridMismatch {
                left: grid.len(),
                right: amplitude.len(),
            });
        }
        let spectrum = PhotonSpectrum {
            grid,
            amplitude,
            sigma: None,
        };
        spectrum.check_normalized()?;
        Ok(spectrum)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    /// |Ã(ω_k)|².
    pub fn intensity(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a.norm_sqr()).collect()
    }

    /// ∫(dω/2π)|Ã|² by the trapezoid rule.
    pub fn norm(&self) -> f64 {
        self.grid.trapezoid(&self.intensity()) / (2.0 * PI)
    }

    fn check_normalized(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Config(format!(
                "photon spectrum is not square-normalized on this grid: integral = {norm:.15}"
            )));
        }
        Ok(())
    }

    /// Numerical inverse transform A(t) = ∫(dω/2π) Ã(ω) e^{−iωt}.
    pub fn time_amplitude(&self, t: f64) -> Complex64 {
        let values: Vec<Complex64> = self
            .grid
            .samples()
            .iter()
            .zip(&self.amplitude)
            .map(|(&w, &a)| a * Complex64::from_polar(1.0, -w * t))
            .collect();
        self.grid.trapezoid_complex(&values) / (2.0 * PI)
    }
}

/// Ã(ω) = (8π/σ²)^{1/4} exp(−ω²/σ²) on `grid`.
pub fn gaussian_spectrum(sigma: f64, grid: &FrequencyGrid) -> Result<PhotonSpectrum> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("sigma must be > 0, got {sigma}")));
    }
    if grid.half_span() < MIN_SPAN_SIGMAS * sigma * (1.0 - 1e-12) {
        return Err(Error::Config(format!(
            "grid half-span {} is narrower than {MIN_SPAN_SIGMAS} sigma (sigma = {sigma})",
            grid.half_span()
        )));
    }
    let amplitude = grid
        .samples()
        .iter()
        .map(|&w| Complex64::new(gaussian_spectral_amplitude(sigma, w), 0.0))
        .collect();
    let spectrum = PhotonSpectrum {
        grid: *grid,
        amplitude,
        sigma: Some(sigma),
    };
    spectrum.check_normalized()?;
    Ok(spectrum)
}

pub fn gaussian_spectral_amplitude(sigma: f64, omega: f64) -> f64 {
    (8.0 * PI / (sigma * sigma)).powf(0.25) * (-(omega * omega) / (sigma * sigma)).exp()
}

/// A(t) = (σ²/2π)^{1/4} exp(−σ²t²/4), the time-domain Gaussian mode.
pub fn gaussian_time_amplitude(sigma: f64, t: f64) -> Complex64 {
    let a = (sigma * sigma / (2.0 * PI)).powf(0.25) * (-(sigma * sigma * t * t) / 4.0).exp();
    Complex64::new(a, 0.0)
}

/// Ways of reading "a Gaussian pulse of duration τ".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DurationConvention {
    /// τ is the full width at half maximum of |A(t)|².
    IntensityFwhm,
    /// τ is the half-width at which |A(t)| falls to 1/e.
    AmplitudeHalfWidth,
    /// τ is the standard deviation of |A(t)|².
    IntensityStd,
}

impl DurationConvention {
    pub const ALL: [DurationConvention; 3] = [
        DurationConvention::IntensityFwhm,
        DurationConvention::AmplitudeHalfWidth,
        DurationConvention::IntensityStd,
    ];

    /// Spectral width σ of the Gaussian mode with duration `tau`.
    pub fn sigma_for(&self, tau: f64) -> f64 {
        match self {
            // |A|² ∝ exp(−σ²t²/2) = 1/2 at t = τ/2
            DurationConvention::IntensityFwhm => 2.0 * (2.0 * LN_2).sqrt() / tau,
            // |A| ∝ exp(−σ²t²/4) = 1/e at t = τ
            DurationConvention::AmplitudeHalfWidth => 2.0 / tau,
            DurationConvention::IntensityStd => 1.0 / tau,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DurationConvention::IntensityFwhm => "intensity-fwhm",
            DurationConvention::AmplitudeHalfWidth => "amplitude-1/e-half-width",
            DurationConvention::IntensityStd => "intensity-std",
        }
    }
}

impl fmt::Display for DurationConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
