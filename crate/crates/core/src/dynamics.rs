//! Time-domain single-excitation amplitudes for a photon reflecting off the
//! atom-cavity system, in the Schrödinger picture.
//!
//! The reduced model keeps the cavity amplitude ψ_c and the excited-state
//! amplitude ψ_e, with spontaneous emission as a Markovian loss γ:
//!
//! ```text
//! ψ_c' = −(iΔ_c + κ + κ_J) ψ_c + g ψ_e + √(2κ) A(t)
//! ψ_e' = −(iΔ_j + γ) ψ_e − g ψ_c
//! ```
//!
//! The full model replaces γ by an explicit lossy mode ψ_q coupled with g_Q
//! and damped at κ_Q. In both cases the reflected amplitude is
//! B(t) = −A(t) + √(2κ) ψ_c(t).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::ode::{self, Stats, Tolerance};
use crate::params::{FullSystemParams, SystemParams};
use crate::spectral::{EvalMode, Rates};

/// Amplitudes must be below this at both window edges before transforming.
pub const DECAY_THRESHOLD: f64 = 1e-10;
/// Default relative tolerance of the integrator.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Ring-down length in units of the slowest damping time.
pub const RING_DOWN_TIMES: f64 = 30.0;
/// Lead-in before the pulse centre, in units of the |A|² standard deviation.
pub const LEAD_IN_WIDTHS: f64 = 10.0;
/// κ_Q/κ above which the full model is flagged as stiff.
pub const STIFF_RATIO: f64 = 1e6;

const J: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerances, time window and output sampling of one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Number of uniformly spaced output samples (including both ends).
    pub samples: usize,
    pub max_step: f64,
}

impl IntegrationControl {
    /// Window and sampling for a Gaussian pulse of spectral width `sigma`
    /// centred at t = 0 driving a system with the given rates.
    pub fn for_gaussian(rates: &Rates, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be > 0, got {sigma}")));
        }
        let width = 1.0 / sigma;
        let slowest = slowest_damping(rates);
        let t_start = -LEAD_IN_WIDTHS * width;
        let t_end = LEAD_IN_WIDTHS * width + RING_DOWN_TIMES / slowest;
        let fastest = (rates.kappa + rates.kappa_j).max(rates.gamma).max(rates.g);
        let dt = (PI / (16.0 * sigma)).min(0.05 / fastest);
        let samples = ((t_end - t_start) / dt).ceil() as usize + 1;
        Ok(IntegrationControl {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: 1e-13,
            t_start,
            t_end,
            samples,
            max_step: f64::INFINITY,
        })
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 1e-13) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol must be >= 1e-13, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("abs_tol must be > 0".into()));
        }
        if !(self.t_end > self.t_start) || self.samples < 2 {
            return Err(Error::InvalidParameter(format!(
                "bad window [{}, {}] with {} samples",
                self.t_start, self.t_end, self.samples
            )));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.samples;
        let dt = (self.t_end - self.t_start) / (n - 1) as f64;
        (0..n)
            .map(|k| if k + 1 == n { self.t_end } else { self.t_start + k as f64 * dt })
            .collect()
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            rel: self.rel_tol,
            abs: self.abs_tol,
            max_step: self.max_step,
            ..Tolerance::default()
        }
    }
}

/// Slowest guaranteed decay rate of the coupled cavity-atom amplitudes.
/// Falls back to the cavity rate when γ = 0.
fn slowest_damping(rates: &Rates) -> f64 {
    let cavity = rates.kappa + rates.kappa_j;
    if rates.gamma > 0.0 {
        cavity.min(rates.gamma)
    } else {
        cavity
    }
}

/// Sampled solution of one integration.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    pub times: Vec<f64>,
    pub psi_e: Vec<Complex64>,
    pub psi_c: Vec<Complex64>,
    /// Q-cavity amplitude (full model only).
    pub psi_q: Option<Vec<Complex64>>,
    pub a_in: Vec<Complex64>,
    pub b_out: Vec<Complex64>,
    /// Rates the trajectory was integrated with.
    pub rates: Rates,
    /// Q-cavity damping (full model only).
    pub kappa_q: Option<f64>,
    pub stats: Stats,
}

impl AmplitudeTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Trapezoid ∫ f dt over the sampled window.
    pub fn integrate_samples(&self, values: &[f64]) -> f64 {
        self.times
            .windows(2)
            .zip(values.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
            .sum()
    }

    pub fn reflected_energy(&self) -> f64 {
        let v: Vec<f64> = self.b_out.iter().map(|b| b.norm_sqr()).collect();
        self.integrate_samples(&v)
    }

    pub fn input_energy(&self) -> f64 {
        let v: Vec<f64> = self.a_in.iter().map(|a| a.norm_sqr()).collect();
        self.integrate_samples(&v)
    }

    /// Maximum of |ψ_e(t)|² over the samples.
    pub fn peak_excited_population(&self) -> f64 {
        self.psi_e.iter().map(|p| p.norm_sqr()).fold(0.0, f64::max)
    }

    /// Largest stored-amplitude magnitude at either window edge.
    pub fn edge_amplitude(&self) -> (f64, f64) {
        let at = |k: usize| {
            let mut m = self.psi_e[k].norm().max(self.psi_c[k].norm());
            if let Some(q) = &self.psi_q {
                m = m.max(q[k].norm());
            }
            m
        };
        let last = self.len() - 1;
        let (a, b) = (at(0), at(last));
        if a >= b {
            (self.times[0], a)
        } else {
            (self.times[last], b)
        }
    }

    /// Residual of the pointwise flux balance
    /// d/dt(|ψ_e|² + |ψ_c|² + |ψ_q|²) + losses − (|A|² − |B|²),
    /// with the derivative taken by central differences.
    pub fn flux_residual(&self) -> Vec<f64> {
        let stored: Vec<f64> = (0..self.len())
            .map(|k| {
                let mut s = self.psi_e[k].norm_sqr() + self.psi_c[k].norm_sqr();
                if let Some(q) = &self.psi_q {
                    s += q[k].norm_sqr();
                }
                s
            })
            .collect();
        (1..self.len().saturating_sub(1))
            .map(|k| {
                let dt = self.times[k + 1] - self.times[k - 1];
                let ds = (stored[k + 1] - stored[k - 1]) / dt;
                let loss = self.loss_rate(k);
                ds + loss - (self.a_in[k].norm_sqr() - self.b_out[k].norm_sqr())
            })
            .collect()
    }

    fn loss_rate(&self, k: usize) -> f64 {
        let cavity = 2.0 * self.rates.kappa_j * self.psi_c[k].norm_sqr();
        let spontaneous = match (&self.psi_q, self.kappa_q) {
            (Some(q), Some(kq)) => 2.0 * kq * q[k].norm_sqr(),
            _ => 2.0 * self.rates.gamma * self.psi_e[k].norm_sqr(),
        };
        cavity + spontaneous
    }
}

/// Integrates the reduced two-amplitude model for an atom with detuning `delta_j`.
pub fn integrate_reduced<F>(
    p: &SystemParams,
    delta_j: f64,
    input: F,
    ctrl: &IntegrationControl,
) -> Result<AmplitudeTrajectory>
where
    F: Fn(f64) -> Complex64,
{
    integrate_reduced_in(EvalMode::Physical, p, delta_j, input, ctrl)
}

pub fn integrate_reduced_in<F>(
    mode: EvalMode,
    p: &SystemParams,
    delta_j: f64,
    input: F,
    ctrl: &IntegrationControl,
) -> Result<AmplitudeTrajectory>
where
    F: Fn(f64) -> Complex64,
{
    p.validate()?;
    ctrl.validate()?;
    let rates = Rates::resolve(p, mode);
    let drive = (2.0 * rates.kappa).sqrt();
    let cavity_decay = Complex64::new(rates.kappa + rates.kappa_j, rates.delta_c);
    let atom_decay = Complex64::new(rates.gamma, delta_j);
    let g = rates.g;

    let rhs = |t: f64, y: &[Complex64; 2]| -> [Complex64; 2] {
        let (c, e) = (y[0], y[1]);
        [
            -cavity_decay * c + e * g + input(t) * drive,
            -atom_decay * e - c * g,
        ]
    };

    let times = ctrl.times();
    let zero = Complex64::new(0.0, 0.0);
    let (states, stats) = ode::integrate(rhs, [zero; 2], &times, ctrl.tolerance())?;

    let a_in: Vec<Complex64> = times.iter().map(|&t| input(t)).collect();
    let psi_c: Vec<Complex64> = states.iter().map(|s| s[0]).collect();
    let psi_e: Vec<Complex64> = states.iter().map(|s| s[1]).collect();
    let b_out = output_amplitude(&a_in, &psi_c, rates.kappa);
    Ok(AmplitudeTrajectory {
        times,
        psi_e,
        psi_c,
        psi_q: None,
        a_in,
        b_out,
        rates,
        kappa_q: None,
        stats,
    })
}

/// Integrates the three-amplitude model with an explicit spontaneous-emission
/// cavity. The atomic damping of `p.base` is ignored; loss runs through ψ_q.
pub fn integrate_full<F>(
    p: &FullSystemParams,
    delta_j: f64,
    input: F,
    ctrl: &IntegrationControl,
) -> Result<AmplitudeTrajectory>
where
    F: Fn(f64) -> Complex64,
{
    p.base.validate()?;
    ctrl.validate()?;
    let base = &p.base;
    if p.kappa_q / base.kappa > STIFF_RATIO {
        log::warn!(
            "kappa_q/kappa = {:e} makes the full model stiff; limiting the step size",
            p.kappa_q / base.kappa
        );
    }
    let mut ctrl = *ctrl;
    // Explicit RK stability bound is ~3.3/κ_Q.
    ctrl.max_step = ctrl.max_step.min(2.0 / p.kappa_q);

    let drive = (2.0 * base.kappa).sqrt();
    let cavity_decay = Complex64::new(base.kappa + base.kappa_j, base.delta_c);
    let (g, g_q, kappa_q) = (base.g, p.g_q, p.kappa_q);

    let rhs = |t: f64, y: &[Complex64; 3]| -> [Complex64; 3] {
        let (c, e, q) = (y[0], y[1], y[2]);
        [
            -cavity_decay * c + e * g + input(t) * drive,
            -J * delta_j * e - c * g - q * g_q,
            -q * kappa_q + e * g_q,
        ]
    };

    let times = ctrl.times();
    let zero = Complex64::new(0.0, 0.0);
    let (states, stats) = ode::integrate(rhs, [zero; 3], &times, ctrl.tolerance())?;

    let a_in: Vec<Complex64> = times.iter().map(|&t| input(t)).collect();
    let psi_c: Vec<Complex64> = states.iter().map(|s| s[0]).collect();
    let psi_e: Vec<Complex64> = states.iter().map(|s| s[1]).collect();
    let psi_q: Vec<Complex64> = states.iter().map(|s| s[2]).collect();
    let b_out = output_amplitude(&a_in, &psi_c, base.kappa);
    Ok(AmplitudeTrajectory {
        times,
        psi_e,
        psi_c,
        psi_q: Some(psi_q),
        a_in,
        b_out,
        rates: Rates {
            kappa: base.kappa,
            kappa_j: base.kappa_j,
            gamma: p.implied_gamma(),
            g: base.g,
            delta_c: base.delta_c,
        },
        kappa_q: Some(kappa_q),
        stats,
    })
}

fn output_amplitude(a_in: &[Complex64], psi_c: &[Complex64], kappa: f64) -> Vec<Complex64> {
    let drive = (2.0 * kappa).sqrt();
    a_in.iter().zip(psi_c).map(|(&a, &c)| -a + c * drive).collect()
}

/// B̃(ω) = ∫ B(t) e^{iωt} dt on `grid`, by a trapezoid-weighted direct
/// transform of the trajectory samples.
pub fn output_spectrum(traj: &AmplitudeTrajectory, grid: &FrequencyGrid) -> Result<Vec<Complex64>> {
    if traj.len() < 2 {
        return Err(Error::InvalidParameter("trajectory needs at least two samples".into()));
    }
    let (t, amplitude) = traj.edge_amplitude();
    if amplitude >= DECAY_THRESHOLD {
        return Err(Error::Truncation { t, amplitude });
    }
    Ok(fourier_transform(&traj.times, &traj.b_out, &grid.samples()))
}

/// ∫ f(t) e^{iωt} dt by the trapezoid rule on uniformly spaced `times`.
pub fn fourier_transform(times: &[f64], values: &[Complex64], omegas: &[f64]) -> Vec<Complex64> {
    const RESEED: usize = 256;
    let n = times.len();
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    omegas
        .iter()
        .map(|&w| {
            let rot = Complex64::from_polar(1.0, w * dt);
            let mut phase = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &v) in values.iter().enumerate() {
                if k % RESEED == 0 {
                    phase = Complex64::from_polar(1.0, w * times[k]);
                }
                let weight = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                acc += v * phase * weight;
                phase *= rot;
            }
            acc * dt
        })
        .collect()
}

/// Where the photon went.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    /// ∫|B|²dt.
    pub reflected: f64,
    /// 2κ_J∫|ψ_c|²dt.
    pub cavity: f64,
    /// 2γ∫|ψ_e|²dt, or 2κ_Q∫|ψ_q|²dt for the full model.
    pub spontaneous: f64,
}

impl LossBreakdown {
    pub fn lost(&self) -> f64 {
        self.cavity + self.spontaneous
    }

    pub fn total(&self) -> f64 {
        self.reflected + self.cavity + self.spontaneous
    }
}

/// Probability leaked into the cavity-loss and spontaneous-emission channels,
/// alongside the reflected probability.
pub fn loss_output(traj: &AmplitudeTrajectory) -> LossBreakdown {
    let c2: Vec<f64> = traj.psi_c.iter().map(|c| c.norm_sqr()).collect();
    let cavity = 2.0 * traj.rates.kappa_j * traj.integrate_samples(&c2);
    let spontaneous = match (&traj.psi_q, traj.kappa_q) {
        (Some(q), Some(kq)) => {
            let q2: Vec<f64> = q.iter().map(|x| x.norm_sqr()).collect();
            2.0 * kq * traj.integrate_samples(&q2)
        }
        _ => {
            let e2: Vec<f64> = traj.psi_e.iter().map(|e| e.norm_sqr()).collect();
            2.0 * traj.rates.gamma * traj.integrate_samples(&e2)
        }
    };
    LossBreakdown {
        reflected: traj.reflected_energy(),
        cavity,
        spontaneous,
    }
}
