//! Cooperativity sweeps, bandwidth scans and the excited-population demo.

use rayon::prelude::*;

use super::config::RunConfig;
use crate::dynamics::{integrate_reduced, IntegrationControl};
use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::loading::{average_loading, AveragedLoading, BlochQuadrature};
use crate::params::{Scheme, SystemParams};
use crate::photon::{gaussian_spectrum, gaussian_time_amplitude, DurationConvention, PhotonSpectrum};
use crate::spectral::{phase_report, EvalMode, Rates, ReflectionSpectrum};

/// Slack allowed on [0, 1] bounds before a row is rejected.
const BOUND_SLACK: f64 = 1e-9;

/// Two cooperativities closer than this (relative) are the same sample.
const SAME_C_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub c: f64,
    pub scheme: Scheme,
    pub kappa_j: f64,
    pub c_pi: bool,
    /// `Err` holds the diagnostic for a row that could not be evaluated.
    pub outcome: std::result::Result<PointResult, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResult {
    pub loading: AveragedLoading,
    pub delta_phase_0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub name: String,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows for one trajectory, in C order.
    pub fn trajectory(&self, scheme: Scheme, kappa_j: f64) -> impl Iterator<Item = &SweepRow> {
        self.rows
            .iter()
            .filter(move |r| r.scheme == scheme && r.kappa_j == kappa_j)
    }

    /// Largest F_ave along one trajectory.
    pub fn max_fidelity(&self, scheme: Scheme, kappa_j: f64) -> Option<f64> {
        self.trajectory(scheme, kappa_j)
            .filter_map(|r| r.outcome.as_ref().ok())
            .map(|p| p.loading.fidelity)
            .fold(None, |m, f| Some(m.map_or(f, |m: f64| m.max(f))))
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }
}

/// `n` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| {
                    if k == 0 {
                        lo
                    } else if k + 1 == n {
                        hi
                    } else {
                        (a + (b - a) * k as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

fn photon_setup(sigma: f64, points: usize) -> Result<(FrequencyGrid, PhotonSpectrum)> {
    let grid = FrequencyGrid::for_bandwidth(sigma, points)?;
    let photon = gaussian_spectrum(sigma, &grid)?;
    Ok((grid, photon))
}

fn quadrature(cfg: &RunConfig) -> Result<BlochQuadrature> {
    BlochQuadrature::new(cfg.polar_nodes, cfg.azimuthal_nodes)
}

/// Averaged figures of merit at one (scheme, κ_J, C), checked against the
/// physical bounds before being returned.
pub fn evaluate_point(
    cfg: &RunConfig,
    scheme: Scheme,
    kappa_j: f64,
    c: f64,
    photon: &PhotonSpectrum,
    quad: &BlochQuadrature,
) -> Result<PointResult> {
    let p = cfg.params(scheme, kappa_j, c)?;
    let rs = ReflectionSpectrum::compute(&p, photon.grid(), EvalMode::Physical)?;
    let loading = average_loading(&rs, photon, &cfg.interferometer(scheme)?, quad)?;
    check_bounds(&loading)?;
    Ok(PointResult {
        loading,
        delta_phase_0: phase_report(&rs).delta_phase_at_0,
    })
}

fn check_bounds(l: &AveragedLoading) -> Result<()> {
    let named = [
        ("R_1", l.r1),
        ("R_2", l.r2),
        ("F_ave", l.fidelity),
        ("F_ave(+)", l.fidelity_plus),
        ("F_ave(-)", l.fidelity_minus),
        ("P_herald", l.p_herald),
    ];
    for (name, v) in named {
        if !(-BOUND_SLACK..=1.0 + BOUND_SLACK).contains(&v) {
            return Err(Error::Invariant(format!("{name} = {v} lies outside [0, 1]")));
        }
    }
    Ok(())
}

/// F_ave and P_herald_ave along C for every configured scheme and κ_J.
///
/// Setup problems (grid, photon) fail the whole sweep; anything that goes
/// wrong at a single C is recorded on that row.
pub fn run_sweep(cfg: &RunConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let mut tasks: Vec<(Scheme, f64, f64, bool)> = Vec::new();
    if cfg.c_points == 0 || cfg.c_min > cfg.c_max {
        log::warn!(
            "empty cooperativity range [{}, {}] with {} points; nothing to sweep",
            cfg.c_min,
            cfg.c_max,
            cfg.c_points
        );
        return Ok(SweepResult {
            name: cfg.name.clone(),
            rows: vec![],
        });
    }
    let cs = log_space(cfg.c_min, cfg.c_max, cfg.c_points);
    for &scheme in &cfg.schemes {
        for &kj in &cfg.kappa_j {
            let mut marked = false;
            let c_pi = match scheme {
                Scheme::PushPull => cfg.c_pi(kj).ok().filter(|c| *c >= cfg.c_min && *c <= cfg.c_max),
                Scheme::OnOff => None,
            };
            for &c in &cs {
                let hit = c_pi.is_some_and(|cp| (c - cp).abs() <= SAME_C_RTOL * cp);
                marked |= hit;
                tasks.push((scheme, kj, c, hit));
            }
            if let (Some(cp), false) = (c_pi, marked) {
                tasks.push((scheme, kj, cp, true));
            }
        }
    }

    let (_, photon) = photon_setup(cfg.sigma, cfg.grid_points)?;
    let quad = quadrature(cfg)?;
    let mut rows: Vec<SweepRow> = tasks
        .par_iter()
        .map(|&(scheme, kappa_j, c, c_pi)| SweepRow {
            c,
            scheme,
            kappa_j,
            c_pi,
            outcome: evaluate_point(cfg, scheme, kappa_j, c, &photon, &quad).map_err(|e| e.to_string()),
        })
        .collect();
    sort_rows(&mut rows);
    for r in &rows {
        if let Err(e) = &r.outcome {
            log::warn!("{} kappa_j = {} C = {}: {e}", r.scheme, r.kappa_j, r.c);
        }
    }
    Ok(SweepResult {
        name: cfg.name.clone(),
        rows,
    })
}

fn scheme_rank(s: Scheme) -> usize {
    Scheme::ALL.iter().position(|&x| x == s).unwrap_or(usize::MAX)
}

fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by(|a, b| {
        a.c.total_cmp(&b.c)
            .then(scheme_rank(a.scheme).cmp(&scheme_rank(b.scheme)))
            .then(a.kappa_j.total_cmp(&b.kappa_j))
    });
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthRow {
    pub sigma: f64,
    pub outcome: std::result::Result<AveragedLoading, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthScan {
    pub name: String,
    pub scheme: Scheme,
    pub kappa_j: f64,
    pub cooperativity: f64,
    pub rows: Vec<BandwidthRow>,
    /// F_ave strictly decreases with σ across the evaluated rows.
    pub fidelity_decreasing: bool,
    /// P_herald_ave strictly increases with σ across the evaluated rows.
    pub herald_increasing: bool,
}

/// Averaged fidelity and heralding probability as the photon bandwidth varies,
/// at the first configured scheme and κ_J and at the single-point C.
pub fn run_bandwidth_scan(cfg: &RunConfig) -> Result<BandwidthScan> {
    cfg.validate()?;
    let scheme = cfg.schemes[0];
    let kappa_j = cfg.kappa_j[0];
    let cooperativity = cfg.point_cooperativity(kappa_j)?;
    let mut sigmas = if cfg.sigmas.is_empty() {
        vec![cfg.sigma]
    } else {
        cfg.sigmas.clone()
    };
    sigmas.sort_by(f64::total_cmp);
    sigmas.dedup();
    let quad = quadrature(cfg)?;
    let p = cfg.params(scheme, kappa_j, cooperativity)?;
    let ifc = cfg.interferometer(scheme)?;

    let rows: Vec<BandwidthRow> = sigmas
        .par_iter()
        .map(|&sigma| {
            let run = || -> Result<AveragedLoading> {
                let (grid, photon) = photon_setup(sigma, cfg.grid_points)?;
                let rs = ReflectionSpectrum::compute(&p, &grid, EvalMode::Physical)?;
                let l = average_loading(&rs, &photon, &ifc, &quad)?;
                check_bounds(&l)?;
                Ok(l)
            };
            BandwidthRow {
                sigma,
                outcome: run().map_err(|e| e.to_string()),
            }
        })
        .collect();

    let ok: Vec<&AveragedLoading> = rows.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
    let fidelity_decreasing = ok.windows(2).all(|w| w[1].fidelity < w[0].fidelity);
    let herald_increasing = ok.windows(2).all(|w| w[1].p_herald > w[0].p_herald);
    Ok(BandwidthScan {
        name: cfg.name.clone(),
        scheme,
        kappa_j,
        cooperativity,
        rows,
        fidelity_decreasing,
        herald_increasing,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationRow {
    pub convention: DurationConvention,
    pub sigma: f64,
    pub outcome: std::result::Result<f64, String>,
}

/// κ = g = 1 with a resonant atom and no cavity loss.
pub const POPULATION_GAMMA: f64 = 0.01;
pub const POPULATION_DURATION: f64 = 1.0;

/// Peak |ψ_e(t)|² for a Gaussian pulse of the given duration under each
/// reading of "duration".
pub fn run_population_demo(
    conventions: &[DurationConvention],
    gamma: f64,
    duration: f64,
    rel_tol: f64,
) -> Result<Vec<PopulationRow>> {
    let p = SystemParams::new(1.0, 0.0, gamma, 1.0)?;
    if !(duration > 0.0) {
        return Err(Error::InvalidParameter(format!("duration must be > 0, got {duration}")));
    }
    let rates = Rates::resolve(&p, EvalMode::Physical);
    Ok(conventions
        .par_iter()
        .map(|&convention| {
            let sigma = convention.sigma_for(duration);
            let run = || -> Result<f64> {
                let ctrl = IntegrationControl::for_gaussian(&rates, sigma)?.with_rel_tol(rel_tol);
                let traj = integrate_reduced(&p, 0.0, |t| gaussian_time_amplitude(sigma, t), &ctrl)?;
                Ok(traj.peak_excited_population())
            };
            PopulationRow {
                convention,
                sigma,
                outcome: run().map_err(|e| e.to_string()),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(name: &str) -> RunConfig {
        let mut cfg = RunConfig::from_preset_name(name).unwrap();
        cfg.grid_points = 1025;
        cfg.c_points = 6;
        cfg
    }

    #[test]
    fn log_space_endpoints() {
        let v = log_space(5.0, 80.0, 40);
        assert_eq!(v.len(), 40);
        assert_eq!(v[0], 5.0);
        assert_eq!(v[39], 80.0);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert!((v[1] / v[0] - v[39] / v[38]).abs() < 1e-12);
        assert!(log_space(1.0, 2.0, 0).is_empty());
    }

    #[test]
    fn sweep_rows_sorted_with_c_pi() {
        let cfg = small("fig8a");
        let res = run_sweep(&cfg).unwrap();
        assert_eq!(res.rows.len(), 6 * 2 + 1);
        assert!(res.rows.windows(2).all(|w| w[0].c <= w[1].c));
        let marked: Vec<&SweepRow> = res.rows.iter().filter(|r| r.c_pi).collect();
        assert_eq!(marked.len(), 1);
        assert_eq!(marked[0].scheme, Scheme::PushPull);
        assert!((marked[0].c - 2.48).abs() < 0.01);
        assert_eq!(res.failures(), 0);
    }

    #[test]
    fn c_pi_outside_range_not_inserted() {
        let mut cfg = small("fig8a");
        cfg.c_min = 3.0;
        let res = run_sweep(&cfg).unwrap();
        assert!(res.rows.iter().all(|r| !r.c_pi));
    }

    #[test]
    fn empty_range_gives_empty_result() {
        let mut cfg = small("fig6");
        cfg.c_points = 0;
        assert!(run_sweep(&cfg).unwrap().rows.is_empty());
        let mut cfg = small("fig6");
        cfg.c_min = 90.0;
        assert!(run_sweep(&cfg).unwrap().rows.is_empty());
    }

    #[test]
    fn coarse_grid_fails_setup() {
        let mut cfg = small("fig6");
        cfg.grid_points = 9;
        assert!(matches!(run_sweep(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn bandwidth_rows_sorted() {
        let mut cfg = small("fig9");
        cfg.sigmas = vec![1.0 / 50.0, 1.0 / 500.0, 1.0 / 100.0];
        let scan = run_bandwidth_scan(&cfg).unwrap();
        let s: Vec<f64> = scan.rows.iter().map(|r| r.sigma).collect();
        assert_eq!(s, vec![1.0 / 500.0, 1.0 / 100.0, 1.0 / 50.0]);
        cfg.sigmas = vec![0.01];
        assert_eq!(run_bandwidth_scan(&cfg).unwrap().rows.len(), 1);
    }

    #[test]
    fn population_overdamped() {
        let rows = run_population_demo(&[DurationConvention::IntensityStd], 100.0, 1.0, 1e-8).unwrap();
        assert!(*rows[0].outcome.as_ref().unwrap() < 0.1);
    }
}
