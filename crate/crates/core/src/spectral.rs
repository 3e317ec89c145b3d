//! Atomic-state-dependent cavity reflection, conditional phase shifts, the
//! push-pull optimum C_π and on-off phase-error estimates.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::params::{wrap_phase, GroundState, SchemeGeometry, SystemParams};

/// Denominators smaller than this are treated as singular.
pub const SINGULAR_DENOMINATOR: f64 = 1e-300;
/// Reflectivities smaller than this have no defined phase.
pub const UNDEFINED_PHASE_MAGNITUDE: f64 = 1e-12;
/// δ_phase values this close to −π are reported as +π.
pub const PHASE_TIE_TOL: f64 = 1e-9;

/// Whether losses enter the reflection coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EvalMode {
    #[default]
    Physical,
    /// γ and κ_J set to zero (|r| = 1 exactly).
    Lossless,
}

/// Rates actually used by an evaluation, after applying an [`EvalMode`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub kappa: f64,
    pub kappa_j: f64,
    pub gamma: f64,
    pub g: f64,
    pub delta_c: f64,
}

impl Rates {
    pub fn resolve(p: &SystemParams, mode: EvalMode) -> Self {
        let (kappa_j, gamma) = match mode {
            EvalMode::Physical => (p.kappa_j, p.gamma),
            EvalMode::Lossless => (0.0, 0.0),
        };
        Rates {
            kappa: p.kappa,
            kappa_j,
            gamma,
            g: p.g,
            delta_c: p.delta_c,
        }
    }

    /// r_j(ω) for an atom with detuning `delta_j`.
    pub fn reflection(&self, delta_j: f64, omega: f64) -> Result<Complex64> {
        let atom = Complex64::new(self.gamma, delta_j - omega);
        let g2 = self.g * self.g;
        let num = atom * Complex64::new(self.kappa - self.kappa_j, omega - self.delta_c) - g2;
        let den = atom * Complex64::new(self.kappa + self.kappa_j, self.delta_c - omega) + g2;
        let magnitude = den.norm();
        if !(magnitude >= SINGULAR_DENOMINATOR) {
            return Err(Error::Singular { omega, magnitude });
        }
        Ok(num / den)
    }
}

/// r_j(ω) = [(γ + iΔ_j − iω)(κ − κ_J − iΔ_c + iω) − g²] / [(γ + iΔ_j − iω)(κ + κ_J + iΔ_c − iω) + g²].
pub fn reflection_coefficient(p: &SystemParams, delta_j: f64, omega: f64) -> Result<Complex64> {
    reflection_coefficient_in(EvalMode::Physical, p, delta_j, omega)
}

pub fn reflection_coefficient_in(
    mode: EvalMode,
    p: &SystemParams,
    delta_j: f64,
    omega: f64,
) -> Result<Complex64> {
    Rates::resolve(p, mode).reflection(delta_j, omega)
}

/// r_1 and r_2 sampled on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionSpectrum {
    pub grid: FrequencyGrid,
    pub r1: Vec<Complex64>,
    pub r2: Vec<Complex64>,
    pub params: SystemParams,
    pub mode: EvalMode,
}

impl ReflectionSpectrum {
    /// Samples r_1, r_2 using the detunings already stored in `params`.
    pub fn compute(params: &SystemParams, grid: &FrequencyGrid, mode: EvalMode) -> Result<Self> {
        params.validate()?;
        let rates = Rates::resolve(params, mode);
        let omegas = grid.samples();
        let sample = |delta: f64| -> Result<Vec<Complex64>> {
            omegas.iter().map(|&w| rates.reflection(delta, w)).collect()
        };
        Ok(ReflectionSpectrum {
            grid: *grid,
            r1: sample(params.delta_1)?,
            r2: sample(params.delta_2)?,
            params: *params,
            mode,
        })
    }

    /// Builds a spectrum from externally supplied reflectivities.
    pub fn from_samples(
        grid: FrequencyGrid,
        r1: Vec<Complex64>,
        r2: Vec<Complex64>,
        params: SystemParams,
    ) -> Result<Self> {
        for r in [&r1, &r2] {
            if r.len() != grid.len() {
                return Err(Error::GridMismatch {
                    left: grid.len(),
                    right: r.len(),
                });
            }
        }
        Ok(ReflectionSpectrum {
            grid,
            r1,
            r2,
            params,
            mode: EvalMode::Physical,
        })
    }

    pub fn get(&self, state: GroundState) -> &[Complex64] {
        match state {
            GroundState::One => &self.r1,
            GroundState::Two => &self.r2,
        }
    }

    /// r_1(0), r_2(0).
    pub fn at_center(&self) -> (Complex64, Complex64) {
        let c = self.grid.center_index();
        (self.r1[c], self.r2[c])
    }

    /// max_k |r_2(−ω_k) − conj(r_1(ω_k))|.
    pub fn push_pull_asymmetry(&self) -> f64 {
        (0..self.grid.len())
            .map(|k| (self.r2[self.grid.mirror(k)] - self.r1[k].conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Samples both reflection coefficients for a scheme's detunings.
pub fn reflection_spectrum(
    p: &SystemParams,
    geom: SchemeGeometry,
    grid: &FrequencyGrid,
) -> Result<ReflectionSpectrum> {
    ReflectionSpectrum::compute(&p.with_geometry(geom)?, grid, EvalMode::Physical)
}

/// Plotting grid spanning ±max(2|Δ_j|, 4g, 8κ).
pub fn plot_grid(p: &SystemParams, points: usize) -> Result<FrequencyGrid> {
    let span = (2.0 * p.delta_1.abs())
        .max(2.0 * p.delta_2.abs())
        .max(4.0 * p.g)
        .max(8.0 * p.kappa);
    FrequencyGrid::symmetric(span, points)
}

fn require_resonant_cavity(p: &SystemParams) -> Result<()> {
    if p.delta_c != 0.0 {
        return Err(Error::Domain(format!(
            "narrow-band centre formulas need delta_c = 0, got {}",
            p.delta_c
        )));
    }
    Ok(())
}

/// Narrow-band reflectivity r_j(0) written in terms of C, Δ_j/γ and κ_J/κ.
pub fn center_reflectivity(p: &SystemParams, delta_j: f64) -> Result<Complex64> {
    require_resonant_cavity(p)?;
    let c = p.cooperativity();
    let loss = p.kappa_j / p.kappa;
    let atom = Complex64::new(1.0, delta_j / p.gamma);
    Ok((atom * (1.0 - loss) - c) / (atom * (1.0 + loss) + c))
}

/// Cooperativity giving δ_phase(0) = π in the push-pull scheme.
pub fn c_pi(p: &SystemParams, delta_1: f64) -> Result<f64> {
    require_resonant_cavity(p)?;
    let loss = p.kappa_j / p.kappa;
    if loss > 1.0 {
        return Err(Error::Domain(format!(
            "C_pi requires kappa_j <= kappa (kappa_j/kappa = {loss})"
        )));
    }
    let x = delta_1 / p.gamma;
    Ok((1.0 + (1.0 - loss * loss) * x * x).sqrt() - loss)
}

/// The purely imaginary r_j(0) that holds at C = C_π:
/// iΔ_j(√(γ²κ² + Δ_j²(κ² − κ_J²)) − γκ) / (Δ_j²(κ + κ_J)).
pub fn center_reflectivity_at_cpi(p: &SystemParams, delta_j: f64) -> Result<Complex64> {
    require_resonant_cavity(p)?;
    if delta_j == 0.0 {
        return Err(Error::Domain(
            "push-pull centre reflectivity is singular at delta_j = 0".into(),
        ));
    }
    if p.kappa_j > p.kappa {
        return Err(Error::Domain("kappa_j must not exceed kappa".into()));
    }
    let (k, kj, gam) = (p.kappa, p.kappa_j, p.gamma);
    let d2 = delta_j * delta_j;
    let root = (gam * gam * k * k + d2 * (k * k - kj * kj)).sqrt();
    Ok(Complex64::new(0.0, delta_j * (root - gam * k) / (d2 * (k + kj))))
}

/// Principal argument in (−π, π]; a −0.0 imaginary part is read as +0.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Wraps a phase difference into (−π, π], reporting values within
/// [`PHASE_TIE_TOL`] of −π as +π.
pub fn wrap_phase_difference(d: f64) -> f64 {
    let w = wrap_phase(d);
    if w < -PI + PHASE_TIE_TOL {
        w + 2.0 * PI
    } else {
        w
    }
}

/// θ_j(ω) = Arg r_j(ω) and the conditional phase difference δ_phase = θ_1 − θ_2.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReport {
    pub omega: Vec<f64>,
    /// Principal values; `None` where |r_j| is too small to define a phase.
    pub theta1: Vec<Option<f64>>,
    pub theta2: Vec<Option<f64>>,
    /// θ_1 − θ_2 with 2π jumps removed between consecutive defined samples.
    pub delta_phase: Vec<Option<f64>>,
    pub delta_phase_at_0: Option<f64>,
}

pub fn phase_report(rs: &ReflectionSpectrum) -> PhaseReport {
    let theta = |r: &[Complex64]| -> Vec<Option<f64>> {
        r.iter()
            .map(|&z| (z.norm() >= UNDEFINED_PHASE_MAGNITUDE).then(|| principal_arg(z)))
            .collect()
    };
    let theta1 = theta(&rs.r1);
    let theta2 = theta(&rs.r2);
    let raw: Vec<Option<f64>> = theta1
        .iter()
        .zip(&theta2)
        .map(|(a, b)| Some(wrap_phase_difference((*a)? - (*b)?)))
        .collect();

    let center = rs.grid.center_index();
    let delta_phase_at_0 = raw[center];
    let delta_phase = unwrap_about(&raw, center);

    PhaseReport {
        omega: rs.grid.samples(),
        theta1,
        theta2,
        delta_phase,
        delta_phase_at_0,
    }
}

/// Removes 2π jumps, anchoring the branch at sample `anchor` so that the
/// unwrapped value there equals the principal one. Undefined samples are
/// skipped.
fn unwrap_about(raw: &[Option<f64>], anchor: usize) -> Vec<Option<f64>> {
    let mut out = raw.to_vec();
    let step = |prev: f64, cur: f64| -> f64 {
        let mut v = cur;
        while v - prev > PI {
            v -= 2.0 * PI;
        }
        while v - prev < -PI {
            v += 2.0 * PI;
        }
        v
    };
    let mut prev = raw[anchor];
    for k in anchor + 1..raw.len() {
        if let (Some(p), Some(c)) = (prev, raw[k]) {
            out[k] = Some(step(p, c));
        }
        if out[k].is_some() {
            prev = out[k];
        }
    }
    let mut prev = raw[anchor];
    for k in (0..anchor).rev() {
        if let (Some(p), Some(c)) = (prev, raw[k]) {
            out[k] = Some(step(p, c));
        }
        if out[k].is_some() {
            prev = out[k];
        }
    }
    out
}

/// Local minima of |r_j(ω)|², refined by a parabola through the three
/// neighbouring samples.
pub fn reflectivity_dips(rs: &ReflectionSpectrum, state: GroundState) -> Vec<f64> {
    let r = rs.get(state);
    let power: Vec<f64> = r.iter().map(|z| z.norm_sqr()).collect();
    let h = rs.grid.spacing();
    (1..power.len().saturating_sub(1))
        .filter(|&k| power[k] < power[k - 1] && power[k] <= power[k + 1])
        .map(|k| {
            let (a, b, c) = (power[k - 1], power[k], power[k + 1]);
            let curvature = a - 2.0 * b + c;
            let shift = if curvature > 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
            rs.grid.omega(k) + shift * h
        })
        .collect()
}

fn on_off_loss_ratio(p: &SystemParams) -> Result<f64> {
    let loss = p.kappa_j / p.kappa;
    if loss >= 1.0 {
        return Err(Error::Domain(format!(
            "on-off phase-error estimate needs kappa_j < kappa (kappa_j/kappa = {loss})"
        )));
    }
    Ok(loss)
}

/// True when 1 ≪ C ≪ Δ_2/γ in the sense used by the estimator tests:
/// C ≥ 5 and Δ_2/γ ≥ 20 C.
pub fn onoff_regime_ok(p: &SystemParams, delta_2: f64) -> bool {
    let c = p.cooperativity();
    c >= 5.0 && delta_2.abs() / p.gamma >= 20.0 * c
}

/// Small-angle estimate of the on-off departure of δ_phase(0) from π:
/// 2C(Δ_2/γ) / ((Δ_2/γ)²(1 − κ_J²/κ²)).
pub fn onoff_phase_error_estimate(p: &SystemParams, delta_2: f64) -> Result<f64> {
    let loss = on_off_loss_ratio(p)?;
    if !onoff_regime_ok(p, delta_2) {
        log::warn!(
            "on-off phase-error estimate outside 1 << C << delta_2/gamma (C = {}, delta_2/gamma = {})",
            p.cooperativity(),
            delta_2 / p.gamma
        );
    }
    let c = p.cooperativity();
    let x = delta_2 / p.gamma;
    Ok(2.0 * c * x / (x * x * (1.0 - loss * loss)))
}

/// Same estimate keeping the −2Cκ_J/κ − C² terms of the denominator.
pub fn onoff_phase_error_unsimplified(p: &SystemParams, delta_2: f64) -> Result<f64> {
    let loss = on_off_loss_ratio(p)?;
    let c = p.cooperativity();
    let x = delta_2 / p.gamma;
    Ok(2.0 * c * x / (x * x * (1.0 - loss * loss) - 2.0 * c * loss - c * c))
}

/// Exact departure π − |δ_phase(0)| with Δ_1 = 0, evaluated from the full
/// reflection coefficient.
pub fn onoff_phase_error_exact(p: &SystemParams, delta_2: f64) -> Result<f64> {
    let p0 = p.with_cavity_detuning(0.0);
    let on = reflection_coefficient(&p0, 0.0, 0.0)?;
    let off = reflection_coefficient(&p0, delta_2, 0.0)?;
    let d = wrap_phase_difference(principal_arg(on) - principal_arg(off));
    Ok(PI - d.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Scheme;

    fn params(kj: f64, gamma: f64, c: f64) -> SystemParams {
        SystemParams::from_cooperativity(c, kj, gamma).unwrap()
    }

    #[test]
    fn bare_lossless_cavity_reflects_plus_one() {
        let p = SystemParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
        for d in [0.0, 3.0, -40.0] {
            let r = reflection_coefficient(&p, d, 0.0).unwrap();
            assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn on_resonance_value() {
        let p = params(0.0, 1.0, 10.0);
        let r = reflection_coefficient(&p, 0.0, 0.0).unwrap();
        assert!((r.re + 9.0 / 11.0).abs() < 1e-14);
        assert!(r.im.abs() < 1e-14);
        // closed form ((1 − κ_J/κ) − C)/((1 + κ_J/κ) + C)
        let p = params(0.2, 1.0, 10.0);
        let r = reflection_coefficient(&p, 0.0, 0.0).unwrap();
        assert!((r.re - (0.8 - 10.0) / (1.2 + 10.0)).abs() < 1e-14);
    }

    #[test]
    fn lossless_mode_is_unitary() {
        let p = params(0.3, 0.5, 12.0).with_detunings(-3.0, 7.0);
        for k in -200..=200 {
            let w = k as f64 * 0.1;
            let r = reflection_coefficient_in(EvalMode::Lossless, &p, p.delta_1, w).unwrap();
            assert!((r.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetry_push_pull_not_on_off() {
        let grid = FrequencyGrid::symmetric(20.0, 801).unwrap();
        let p = params(0.003, 0.1, 30.0);
        let pp = reflection_spectrum(&p, SchemeGeometry::new(Scheme::PushPull, 10.0).unwrap(), &grid).unwrap();
        assert!(pp.push_pull_asymmetry() < 1e-12);
        let oo = reflection_spectrum(&p, SchemeGeometry::new(Scheme::OnOff, 10.0).unwrap(), &grid).unwrap();
        assert!(oo.push_pull_asymmetry() > 1e-3);
    }

    #[test]
    fn decoupled_atom_gives_identical_reflectivities() {
        let grid = FrequencyGrid::symmetric(20.0, 401).unwrap();
        let p = params(0.1, 0.1, 0.0);
        let rs = reflection_spectrum(&p, SchemeGeometry::new(Scheme::OnOff, 10.0).unwrap(), &grid).unwrap();
        for (a, b) in rs.r1.iter().zip(&rs.r2) {
            assert!((a - b).norm() < 1e-14);
        }
        let report = phase_report(&rs);
        assert!(report.delta_phase.iter().all(|d| d.unwrap().abs() < 1e-12));
    }

    #[test]
    fn c_pi_values() {
        let p = params(0.0, 1.0, 1.0);
        assert!((c_pi(&p, -50.0).unwrap() - 50.01).abs() < 0.01);
        let siv = SystemParams::new(1.0, 0.23, 0.00083, 0.05).unwrap();
        assert!((c_pi(&siv, -0.00215).unwrap() - 2.48).abs() < 0.01);
        let lossy = SystemParams::new(1.0, 1.0, 0.1, 1.0).unwrap();
        assert_eq!(c_pi(&lossy, 3.0).unwrap(), 0.0);
        let too_lossy = SystemParams::new(1.0, 1.1, 0.1, 1.0).unwrap();
        assert!(matches!(c_pi(&too_lossy, 3.0), Err(Error::Domain(_))));
        let detuned = p.with_cavity_detuning(0.1);
        assert!(c_pi(&detuned, 1.0).is_err());
    }

    #[test]
    fn center_reflectivity_at_cpi_is_imaginary_and_opposite() {
        let base = SystemParams::new(1.0, 0.05, 0.1, 1.0).unwrap();
        let c = c_pi(&base, -5.0).unwrap();
        let p = base.with_cooperativity(c).unwrap();
        let r1 = center_reflectivity(&p, -5.0).unwrap();
        let r2 = center_reflectivity(&p, 5.0).unwrap();
        assert!(r1.re.abs() < 1e-12 && r2.re.abs() < 1e-12);
        assert!((r1 + r2).norm() < 1e-12);
        let closed1 = center_reflectivity_at_cpi(&p, -5.0).unwrap();
        let closed2 = center_reflectivity_at_cpi(&p, 5.0).unwrap();
        assert_eq!(closed1, -closed2);
        assert!((closed1 - r1).norm() < 1e-12);
        assert!(center_reflectivity_at_cpi(&p, 0.0).is_err());
    }

    #[test]
    fn center_reflectivity_at_cpi_asymptote() {
        let p = SystemParams::new(1.0, 0.0, 1e-3, 1.0).unwrap();
        let r = center_reflectivity_at_cpi(&p, 10.0).unwrap();
        assert!((r - Complex64::new(0.0, 1.0)).norm() < 1e-3);
        let r = center_reflectivity_at_cpi(&p, -10.0).unwrap();
        assert!((r - Complex64::new(0.0, -1.0)).norm() < 1e-3);
    }

    #[test]
    fn center_reflectivity_vanishes_at_kappa_j_equal_kappa() {
        let base = SystemParams::new(1.0, 1.0, 0.1, 1.0).unwrap();
        let p = base.with_cooperativity(c_pi(&base, -2.0).unwrap()).unwrap();
        assert_eq!(p.g, 0.0);
        assert!(center_reflectivity(&p, -2.0).unwrap().norm() < 1e-15);
        assert!(center_reflectivity_at_cpi(&p, -2.0).unwrap().norm() < 1e-15);
    }

    #[test]
    fn phase_report_push_pull_at_cpi() {
        let base = SystemParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        let p = base.with_cooperativity(c_pi(&base, -50.0).unwrap()).unwrap();
        let grid = FrequencyGrid::symmetric(8.0, 4097).unwrap();
        let rs = reflection_spectrum(&p, SchemeGeometry::new(Scheme::PushPull, 100.0).unwrap(), &grid).unwrap();
        let report = phase_report(&rs);
        assert!((report.delta_phase_at_0.unwrap() - PI).abs() < 1e-10);
        let c = grid.center_index();
        assert!((report.theta1[c].unwrap() + PI / 2.0).abs() < 1e-10);
        assert!((report.theta2[c].unwrap() - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn unwrapping_removes_jumps() {
        // On-off with the resonant state: θ_1 crosses ±π near ω = 0.
        let p = params(0.0, 0.5, 10.0);
        let grid = FrequencyGrid::symmetric(20.0, 2001).unwrap();
        let rs = reflection_spectrum(&p, SchemeGeometry::new(Scheme::OnOff, 100.0).unwrap(), &grid).unwrap();
        let report = phase_report(&rs);
        let d: Vec<f64> = report.delta_phase.iter().map(|x| x.unwrap()).collect();
        assert!(d.windows(2).all(|w| (w[1] - w[0]).abs() <= PI));
        let c = grid.center_index();
        assert_eq!(d[c], report.delta_phase_at_0.unwrap());
    }

    #[test]
    fn undefined_phase_flagged() {
        let grid = FrequencyGrid::symmetric(1.0, 5).unwrap();
        let p = params(0.0, 1.0, 1.0);
        let zeros = vec![Complex64::new(0.0, 0.0); 5];
        let ones = vec![Complex64::new(1.0, 0.0); 5];
        let rs = ReflectionSpectrum::from_samples(grid, zeros, ones, p).unwrap();
        let report = phase_report(&rs);
        assert!(report.theta1.iter().all(Option::is_none));
        assert!(report.delta_phase_at_0.is_none());
    }

    #[test]
    fn doublet_dips_for_resonant_atom() {
        let p = params(0.0, 1.0, 10.0);
        let grid = FrequencyGrid::symmetric(20.0, 4001).unwrap();
        let rs = reflection_spectrum(&p, SchemeGeometry::new(Scheme::OnOff, 100.0).unwrap(), &grid).unwrap();
        let dips = reflectivity_dips(&rs, GroundState::One);
        assert_eq!(dips.len(), 2);
        assert!((dips[0] + dips[1]).abs() < 1e-9);
        assert!(dips[1] > 2.5 && dips[1] < 4.0, "{dips:?}");
    }

    #[test]
    fn onoff_estimates() {
        let p = params(0.0, 1.0, 10.0);
        let est = onoff_phase_error_estimate(&p, 1000.0).unwrap();
        assert!((est - 0.02).abs() < 1e-15);
        let exact = onoff_phase_error_exact(&p, 1000.0).unwrap();
        assert!((0.5..=2.0).contains(&(est / exact)));

        let lossy = params(0.1, 1.0, 10.0);
        let est = onoff_phase_error_estimate(&lossy, 1000.0).unwrap();
        assert!((est - 0.02 / 0.99).abs() < 1e-15);

        let weak = params(0.0, 1.0, 1e-9);
        assert!(onoff_phase_error_estimate(&weak, 1000.0).unwrap() < 1e-10);

        let bad = params(1.0, 1.0, 10.0);
        assert!(onoff_phase_error_estimate(&bad, 1000.0).is_err());
        let unsimplified = onoff_phase_error_unsimplified(&lossy, 1000.0).unwrap();
        assert!(unsimplified > est && (unsimplified / est - 1.0) < 1e-3);
    }
}
