//! Uniform symmetric frequency grids and the checked trapezoid rule used for
//! every ∫dω/2π spectral integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of samples for spectrum-weighted integrals.
pub const DEFAULT_POINTS: usize = 4097;
/// Default half-span of spectrum-weighted grids, in units of σ.
pub const DEFAULT_SPAN_SIGMAS: f64 = 8.0;
/// Coarse/fine agreement required of every checked spectral integral.
pub const REFINEMENT_RTOL: f64 = 1e-8;
/// Integrals smaller than this are compared absolutely.
pub const REFINEMENT_FLOOR: f64 = 1e-14;

/// Odd number of uniformly spaced frequencies symmetric about ω = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    half_span: f64,
    points: usize,
}

impl FrequencyGrid {
    pub fn symmetric(half_span: f64, points: usize) -> Result<Self> {
        if !(half_span > 0.0) || !half_span.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid half-span must be > 0, got {half_span}"
            )));
        }
        if points < 3 || points.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "grid needs an odd number of points >= 3, got {points}"
            )));
        }
        Ok(FrequencyGrid { half_span, points })
    }

    /// ±8σ with `points` samples.
    pub fn for_bandwidth(sigma: f64, points: usize) -> Result<Self> {
        FrequencyGrid::symmetric(DEFAULT_SPAN_SIGMAS * sigma, points)
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_span(&self) -> f64 {
        self.half_span
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_span / (self.points - 1) as f64
    }

    pub fn center_index(&self) -> usize {
        (self.points - 1) / 2
    }

    /// ω_k. Computed as an integer offset from the centre so that ω and −ω
    /// are exact negatives of each other.
    pub fn omega(&self, k: usize) -> f64 {
        let offset = k as f64 - self.center_index() as f64;
        if k == 0 {
            -self.half_span
        } else if k + 1 == self.points {
            self.half_span
        } else {
            offset * self.spacing()
        }
    }

    pub fn samples(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.omega(k)).collect()
    }

    /// Index of −ω_k.
    pub fn mirror(&self, k: usize) -> usize {
        self.points - 1 - k
    }

    /// The grid with twice as many intervals over the same span.
    pub fn refined(&self) -> Self {
        FrequencyGrid {
            half_span: self.half_span,
            points: 2 * (self.points - 1) + 1,
        }
    }

    pub fn same_as(&self, other: &FrequencyGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch {
                left: self.points,
                right: other.points,
            });
        }
        Ok(())
    }

    /// Trapezoid approximation of ∫ f dω over the grid.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        trapezoid_strided(values, 1) * self.spacing()
    }

    pub fn trapezoid_complex(&self, values: &[Complex64]) -> Complex64 {
        trapezoid_strided(values, 1) * self.spacing()
    }

    /// ∫(dω/2π) f, cross-checked against the every-other-sample subgrid.
    pub fn spectral_integral(&self, quantity: &'static str, values: &[f64]) -> Result<f64> {
        debug_assert_eq!(values.len(), self.points);
        let h = self.spacing();
        let fine = trapezoid_strided(values, 1) * h / (2.0 * PI);
        if self.points >= 5 {
            let coarse = trapezoid_strided(values, 2) * 2.0 * h / (2.0 * PI);
            check_refinement(quantity, coarse, fine)?;
        }
        Ok(fine)
    }

    pub fn spectral_integral_complex(
        &self,
        quantity: &'static str,
        values: &[Complex64],
    ) -> Result<Complex64> {
        debug_assert_eq!(values.len(), self.points);
        let h = self.spacing();
        let fine = trapezoid_strided(values, 1) * (h / (2.0 * PI));
        if self.points >= 5 {
            let coarse = trapezoid_strided(values, 2) * (2.0 * h / (2.0 * PI));
            let scale = fine.norm().max(coarse.norm());
            let diff = (fine - coarse).norm();
            if diff > REFINEMENT_RTOL * scale.max(REFINEMENT_FLOOR / REFINEMENT_RTOL) {
                return Err(Error::Refinement {
                    quantity,
                    coarse: coarse.norm(),
                    fine: fine.norm(),
                    relative: diff / scale,
                });
            }
        }
        Ok(fine)
    }
}

fn check_refinement(quantity: &'static str, coarse: f64, fine: f64) -> Result<()> {
    let scale = fine.abs().max(coarse.abs());
    let diff = (fine - coarse).abs();
    if diff > REFINEMENT_RTOL * scale.max(REFINEMENT_FLOOR / REFINEMENT_RTOL) {
        return Err(Error::Refinement {
            quantity,
            coarse,
            fine,
            relative: if scale > 0.0 { diff / scale } else { 0.0 },
        });
    }
    Ok(())
}

/// Unit-spacing trapezoid sum over every `stride`-th sample. The endpoints of
/// an odd-length slice are always included when `stride` divides `len - 1`.
fn trapezoid_strided<T>(values: &[T], stride: usize) -> T
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = values.len();
    if n < 2 {
        return T::default();
    }
    let last = n - 1;
    let mut acc = T::default();
    let mut k = 0;
    while k <= last {
        let w = if k == 0 || k == last { 0.5 } else { 1.0 };
        acc = acc + values[k] * w;
        k += stride;
    }
    acc
}
