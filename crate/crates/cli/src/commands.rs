use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pushpull_core::dynamics::{
    integrate_full, integrate_reduced, loss_output, AmplitudeTrajectory, IntegrationControl,
};
use pushpull_core::experiment::output::{
    bandwidth_table, format_real, population_table, write_sweep, Cell, Table,
};
use pushpull_core::experiment::{
    run_bandwidth_scan, run_population_demo, run_sweep, ConfigFile, RunConfig, PRESETS,
};
use pushpull_core::grid::FrequencyGrid;
use pushpull_core::loading::{conditional_state, loading_report, average_loading, herald_probability};
use pushpull_core::photon::{gaussian_spectrum, gaussian_time_amplitude};
use pushpull_core::spectral::{
    onoff_phase_error_estimate, onoff_phase_error_exact, phase_report, plot_grid, reflectivity_dips, Rates,
};
use pushpull_core::{
    BlochQuadrature, Branch, DurationConvention, EvalMode, Error, FullSystemParams, GroundState, QubitState,
    ReflectionSpectrum, Result, Scheme, SystemParams,
};

use crate::{Cli, Command, PointArgs, PresetAction};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Preset { action } => preset(action),
        Command::Reflectivity { point, plot_points } => reflectivity(cli, point, *plot_points),
        Command::Dynamics { point, state, kappa_q } => dynamics(cli, point, *state, *kappa_q),
        Command::Loading { point, chi, phi } => loading(cli, point, *chi, *phi),
        Command::Sweep { preset } => {
            let cfg = config(cli, preset.as_deref())?;
            let res = run_sweep(&cfg)?;
            let (csv, svg) = write_sweep(&res, &cli.global.out)?;
            for scheme in &cfg.schemes {
                for &kj in &cfg.kappa_j {
                    if let Some(f) = res.max_fidelity(*scheme, kj) {
                        println!("{scheme} kappa_j = {kj}: max F_ave = {f:.6}");
                    }
                }
            }
            if res.failures() > 0 {
                println!("{} of {} rows failed; see the status column", res.failures(), res.rows.len());
            }
            println!("wrote {} and {}", csv.display(), svg.display());
            Ok(())
        }
        Command::Bandwidth { preset } => {
            let cfg = config(cli, Some(preset.as_deref().unwrap_or("fig9")))?;
            let scan = run_bandwidth_scan(&cfg)?;
            let path = cli.global.out.join(format!("{}_bandwidth.csv", cfg.name));
            bandwidth_table(&scan).write_csv(&path)?;
            println!(
                "{} kappa_j = {} C = {:.4}",
                scan.scheme, scan.kappa_j, scan.cooperativity
            );
            for r in &scan.rows {
                match &r.outcome {
                    Ok(l) => println!("sigma = {:.6e}: F_ave = {:.6} P_herald = {:.6}", r.sigma, l.fidelity, l.p_herald),
                    Err(e) => println!("sigma = {:.6e}: failed: {e}", r.sigma),
                }
            }
            println!("F_ave strictly decreasing: {}", scan.fidelity_decreasing);
            println!("P_herald strictly increasing: {}", scan.herald_increasing);
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Population { gamma, duration } => {
            let tol = cli.global.tol.unwrap_or(pushpull_core::dynamics::DEFAULT_REL_TOL);
            let rows = run_population_demo(&DurationConvention::ALL, *gamma, *duration, tol)?;
            for r in &rows {
                match &r.outcome {
                    Ok(p) => println!("{:<26} sigma = {:.6}  peak |psi_e|^2 = {p:.6}", r.convention.as_str(), r.sigma),
                    Err(e) => println!("{:<26} failed: {e}", r.convention.as_str()),
                }
            }
            let path = cli.global.out.join("population.csv");
            population_table(&rows).write_csv(&path)?;
            println!("wrote {}", path.display());
            if rows.iter().all(|r| r.outcome.is_err()) {
                return Err(Error::Integration {
                    t: 0.0,
                    reason: "every convention failed".into(),
                });
            }
            Ok(())
        }
        Command::Check { draws } => check(cli, *draws),
    }
}

/// Preset, then config file, then global flags.
fn config(cli: &Cli, preset: Option<&str>) -> Result<RunConfig> {
    let mut file = match &cli.global.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(p) = preset {
        match &file.preset {
            Some(q) if q != p => {
                return Err(Error::Config(format!(
                    "--preset {p} conflicts with preset = \"{q}\" in the config file"
                )))
            }
            _ => file.preset = Some(p.to_string()),
        }
    }
    if let Some(n) = cli.global.grid_points {
        file.grid_points = Some(n);
    }
    if let Some(t) = cli.global.tol {
        file.rel_tol = Some(t);
    }
    file.resolve()
}

struct Point {
    cfg: RunConfig,
    scheme: Scheme,
    kappa_j: f64,
    c: f64,
    params: SystemParams,
}

fn point(cli: &Cli, args: &PointArgs) -> Result<Point> {
    let mut cfg = config(cli, args.preset.as_deref())?;
    if let Some(c) = args.cooperativity {
        cfg.cooperativity = Some(c);
    }
    if let Some(k) = args.kappa_j {
        cfg.kappa_j = vec![k];
    }
    if let Some(s) = args.scheme {
        cfg.schemes = vec![s];
    }
    cfg.validate()?;
    let scheme = cfg.schemes[0];
    let kappa_j = cfg.kappa_j[0];
    let c = cfg.point_cooperativity(kappa_j)?;
    let params = cfg.params(scheme, kappa_j, c)?;
    Ok(Point {
        cfg,
        scheme,
        kappa_j,
        c,
        params,
    })
}

fn describe(pt: &Point) {
    let p = &pt.params;
    println!(
        "{} {}: C = {:.6}, g = {:.6}, gamma = {}, kappa_j = {}, Delta_1 = {}, Delta_2 = {}, sigma = {}",
        pt.cfg.name, pt.scheme, pt.c, p.g, p.gamma, pt.kappa_j, p.delta_1, p.delta_2, pt.cfg.sigma
    );
    if let Ok(cp) = pt.cfg.c_pi(pt.kappa_j) {
        println!("C_pi = {cp:.6}");
    }
}

fn out_path(cli: &Cli, name: &str) -> PathBuf {
    cli.global.out.join(name)
}

fn fmt_c(z: Complex64) -> String {
    format!("{} {} {}i", format_real(z.re), if z.im < 0.0 { '-' } else { '+' }, format_real(z.im.abs()))
}

fn reflectivity(cli: &Cli, args: &PointArgs, plot_points: Option<usize>) -> Result<()> {
    let pt = point(cli, args)?;
    describe(&pt);
    let grid = match plot_points {
        Some(n) => plot_grid(&pt.params, n)?,
        None => FrequencyGrid::for_bandwidth(pt.cfg.sigma, pt.cfg.grid_points)?,
    };
    let rs = ReflectionSpectrum::compute(&pt.params, &grid, EvalMode::Physical)?;
    let report = phase_report(&rs);
    let (r1, r2) = rs.at_center();
    println!("r_1(0) = {}", fmt_c(r1));
    println!("r_2(0) = {}", fmt_c(r2));
    match report.delta_phase_at_0 {
        Some(d) => println!("delta_phase(0) = {d:.12}"),
        None => println!("delta_phase(0) undefined (|r_j(0)| too small)"),
    }
    for state in [GroundState::One, GroundState::Two] {
        let dips: Vec<String> = reflectivity_dips(&rs, state).iter().map(|w| format!("{w:.6}")).collect();
        println!("|r_{}|^2 dips at omega = [{}]", state_index(state), dips.join(", "));
    }
    if pt.scheme == Scheme::OnOff {
        let p = &pt.params;
        let est = onoff_phase_error_estimate(p, p.delta_2)?;
        let exact = onoff_phase_error_exact(p, p.delta_2)?;
        println!("on-off phase error: estimate {est:.6e}, exact {exact:.6e}");
    }

    let mut t = Table::new(vec![
        "omega", "re_r1", "im_r1", "re_r2", "im_r2", "abs2_r1", "abs2_r2", "theta1", "theta2", "delta_phase",
    ]);
    for k in 0..grid.len() {
        let (a, b) = (rs.r1[k], rs.r2[k]);
        t.push(vec![
            report.omega[k].into(),
            a.re.into(),
            a.im.into(),
            b.re.into(),
            b.im.into(),
            a.norm_sqr().into(),
            b.norm_sqr().into(),
            report.theta1[k].into(),
            report.theta2[k].into(),
            report.delta_phase[k].into(),
        ]);
    }
    let path = out_path(cli, &format!("{}_reflectivity_{}.csv", pt.cfg.name, pt.scheme));
    t.write_csv(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn state_index(s: GroundState) -> u8 {
    match s {
        GroundState::One => 1,
        GroundState::Two => 2,
    }
}

fn dynamics(cli: &Cli, args: &PointArgs, state: u8, kappa_q: Option<f64>) -> Result<()> {
    let pt = point(cli, args)?;
    describe(&pt);
    let gs = if state == 1 { GroundState::One } else { GroundState::Two };
    let dj = pt.params.detuning(gs);
    let sigma = pt.cfg.sigma;
    let rates = Rates::resolve(&pt.params, EvalMode::Physical);
    let ctrl = IntegrationControl::for_gaussian(&rates, sigma)?.with_rel_tol(pt.cfg.rel_tol);
    let input = |t: f64| gaussian_time_amplitude(sigma, t);
    let traj: AmplitudeTrajectory = match kappa_q {
        Some(kq) => integrate_full(&FullSystemParams::matching(pt.params, kq)?, dj, input, &ctrl)?,
        None => integrate_reduced(&pt.params, dj, input, &ctrl)?,
    };
    let loss = loss_output(&traj);
    println!("state {state}, Delta_j = {dj}");
    println!("reflected energy      = {:.12}", loss.reflected);
    println!("cavity loss           = {:.12}", loss.cavity);
    println!("spontaneous loss      = {:.12}", loss.spontaneous);
    println!("balance (should be 1) = {:.12}", loss.total());
    println!("peak |psi_e|^2        = {:.12}", traj.peak_excited_population());
    println!(
        "integrator steps: {} accepted, {} rejected",
        traj.stats.accepted, traj.stats.rejected
    );

    let mut header = vec![
        "t", "re_a_in", "im_a_in", "re_psi_c", "im_psi_c", "re_psi_e", "im_psi_e", "re_b_out", "im_b_out", "pop_e",
    ];
    if traj.psi_q.is_some() {
        header.extend(["re_psi_q", "im_psi_q"]);
    }
    let mut t = Table::new(header);
    for k in 0..traj.len() {
        let mut row: Vec<Cell> = vec![
            traj.times[k].into(),
            traj.a_in[k].re.into(),
            traj.a_in[k].im.into(),
            traj.psi_c[k].re.into(),
            traj.psi_c[k].im.into(),
            traj.psi_e[k].re.into(),
            traj.psi_e[k].im.into(),
            traj.b_out[k].re.into(),
            traj.b_out[k].im.into(),
            traj.psi_e[k].norm_sqr().into(),
        ];
        if let Some(q) = &traj.psi_q {
            row.extend([q[k].re.into(), q[k].im.into()]);
        }
        t.push(row);
    }
    let path = out_path(cli, &format!("{}_dynamics_{}_state{state}.csv", pt.cfg.name, pt.scheme));
    t.write_csv(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn print_matrix(label: &str, m: &[[Complex64; 2]; 2]) {
    println!("{label} = [[{}, {}],", fmt_c(m[0][0]), fmt_c(m[0][1]));
    println!("{}    [{}, {}]]", " ".repeat(label.len()), fmt_c(m[1][0]), fmt_c(m[1][1]));
}

fn loading(cli: &Cli, args: &PointArgs, chi: f64, phi: f64) -> Result<()> {
    let pt = point(cli, args)?;
    describe(&pt);
    let grid = FrequencyGrid::for_bandwidth(pt.cfg.sigma, pt.cfg.grid_points)?;
    let photon = gaussian_spectrum(pt.cfg.sigma, &grid)?;
    let rs = ReflectionSpectrum::compute(&pt.params, &grid, EvalMode::Physical)?;
    let ifc = pt.cfg.interferometer(pt.scheme)?;
    let q = QubitState::from_angles(chi, phi);
    println!(
        "photon: alpha = {}, beta = {}; theta = {:.6}, T = {}, eta = {}",
        fmt_c(q.alpha),
        fmt_c(q.beta),
        ifc.theta,
        ifc.delay,
        ifc.eta
    );
    let rep = loading_report(&rs, &photon, &q, &ifc)?;
    println!("R_1 = {:.12}", rep.r1);
    println!("R_2 = {:.12}", rep.r2);
    println!("P_herald = {:.12}", rep.p_herald);
    println!("K_+ = {:.12}, F_+ = {:.12}", rep.k_plus, rep.f_plus);
    println!("K_- = {:.12}, F_- = {:.12}", rep.k_minus, rep.f_minus);
    println!("herald-weighted F = {:.12}", rep.weighted_fidelity());
    print_matrix("rho_+", &rep.rho_plus);
    print_matrix("rho_-", &rep.rho_minus);
    let quad = BlochQuadrature::new(pt.cfg.polar_nodes, pt.cfg.azimuthal_nodes)?;
    let avg = average_loading(&rs, &photon, &ifc, &quad)?;
    println!(
        "Bloch average ({}): F_ave = {:.12}, F_ave(+) = {:.12}, F_ave(-) = {:.12}, P_herald_ave = {:.12}",
        quad.describe(),
        avg.fidelity,
        avg.fidelity_plus,
        avg.fidelity_minus,
        avg.p_herald
    );
    Ok(())
}

fn preset(action: &PresetAction) -> Result<()> {
    match action {
        PresetAction::List => {
            for p in PRESETS {
                println!("{:<6} {}", p.name, p.title);
            }
        }
        PresetAction::Show { name } => print!("{}", pushpull_core::experiment::preset(name)?.describe()),
    }
    Ok(())
}

/// Random parameters and photon states; checks the detection identity,
/// the bounds on K and F, and agreement of the two fidelity routes.
fn check(cli: &Cli, draws: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.global.seed);
    let points = cli.global.grid_points.unwrap_or(1025);
    let mut worst_identity: f64 = 0.0;
    let mut worst_route: f64 = 0.0;
    let mut out_of_bounds = 0;
    for _ in 0..draws {
        let scheme = if rng.gen_bool(0.5) { Scheme::PushPull } else { Scheme::OnOff };
        let sigma = 10f64.powf(rng.gen_range(-2.0..0.0));
        let delta = 10f64.powf(rng.gen_range(-1.0..2.0));
        let gamma = 10f64.powf(rng.gen_range(-2.0..0.0));
        let p = SystemParams::from_cooperativity(rng.gen_range(0.5..80.0), rng.gen_range(0.0..0.3), gamma)?
            .with_geometry(pushpull_core::SchemeGeometry::new(scheme, delta)?)?;
        let grid = FrequencyGrid::for_bandwidth(sigma, points)?;
        let photon = gaussian_spectrum(sigma, &grid)?;
        let rs = ReflectionSpectrum::compute(&p, &grid, EvalMode::Physical)?;
        let ifc = pushpull_core::InterferometerSettings::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.0..3.0), 1.0)?;
        let q = QubitState::from_angles(rng.gen_range(0.0..std::f64::consts::PI), rng.gen_range(-3.0..3.0));
        let rep = loading_report(&rs, &photon, &q, &ifc)?;
        worst_identity = worst_identity.max((rep.k_plus + rep.k_minus - herald_probability(&q, rep.r1, rep.r2)).abs());
        for (b, f) in [(Branch::Plus, rep.f_plus), (Branch::Minus, rep.f_minus)] {
            let st = conditional_state(&rs, &photon, &q, &ifc, b)?;
            worst_route = worst_route.max((st.fidelity(&q, b) - f).abs());
            if !(0.0..=1.0 + 1e-12).contains(&f) || !(0.0..=1.0).contains(&st.k) {
                out_of_bounds += 1;
            }
        }
    }
    println!("seed {} draws {draws}", cli.global.seed);
    println!("detection identity worst deviation {worst_identity:.3e}");
    println!("fidelity routes worst disagreement {worst_route:.3e}");
    println!("values outside [0, 1]: {out_of_bounds}");
    if worst_identity > 1e-10 || worst_route > 1e-10 || out_of_bounds > 0 {
        return Err(Error::Invariant("random spot check failed".into()));
    }
    Ok(())
}

