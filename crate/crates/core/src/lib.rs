//! Cavity-assisted loading of a single photon's polarization qubit into an
//! atomic memory, comparing push-pull and on-off detuning schemes.

// NaN must fail validation, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod loading;
pub mod ode;
pub mod params;
pub mod photon;
pub mod spectral;

pub use error::{Error, ErrorKind, Result};
pub use grid::FrequencyGrid;
pub use loading::{Branch, BlochQuadrature, LoadingReport};
pub use params::{
    FullSystemParams, GroundState, InterferometerSettings, QubitState, Scheme, SchemeGeometry,
    SystemParams,
};
pub use photon::{DurationConvention, PhotonSpectrum};
pub use spectral::{EvalMode, ReflectionSpectrum};
