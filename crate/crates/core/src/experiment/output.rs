//! CSV tables and SVG plots.
//!
//! CSV: comma separated, LF line endings, one header row, reals in
//! scientific notation with 12 significant digits. Column orders:
//!
//! - sweep: `c,scheme,f_ave,p_herald_ave,r1,r2,delta_phase_0,c_pi,kappa_j,f_ave_plus,f_ave_minus,status`
//! - bandwidth: `sigma,scheme,kappa_j,c,f_ave,p_herald_ave,r1,r2,f_ave_plus,f_ave_minus,status`
//! - population: `convention,sigma,peak_excited_population,status`
//!
//! `status` is `ok` or the diagnostic for a row that failed; the numeric
//! columns of a failed row are empty.

use std::fmt::Write as _;
use std::path::Path;

use super::runs::{BandwidthScan, PopulationRow, SweepResult, SweepRow};
use crate::error::{Error, Result};
use crate::params::Scheme;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Real)
    }
}

/// `x` with 12 significant digits, e.g. `-1.23456789012e-05`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.11e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Real(x) => format_real(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Empty => String::new(),
        Cell::Text(s) => {
            if s.contains([',', '"', '\n', '\r']) {
                format!("\"{}\"", s.replace('"', "\"\"").replace(['\n', '\r'], " "))
            } else {
                s.clone()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(format_cell).collect();
            out += &fields.join(",");
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_csv())
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn status<T>(r: &std::result::Result<T, String>) -> Cell {
    match r {
        Ok(_) => "ok".into(),
        Err(e) => e.clone().into(),
    }
}

pub const SWEEP_COLUMNS: [&str; 12] = [
    "c",
    "scheme",
    "f_ave",
    "p_herald_ave",
    "r1",
    "r2",
    "delta_phase_0",
    "c_pi",
    "kappa_j",
    "f_ave_plus",
    "f_ave_minus",
    "status",
];

pub fn sweep_table(res: &SweepResult) -> Table {
    let mut t = Table::new(SWEEP_COLUMNS.to_vec());
    for r in &res.rows {
        let mut row = vec![Cell::Real(r.c), r.scheme.as_str().into()];
        match &r.outcome {
            Ok(p) => {
                let l = &p.loading;
                row.extend([l.fidelity.into(), l.p_herald.into(), l.r1.into(), l.r2.into(), p.delta_phase_0.into()]);
            }
            Err(_) => row.extend(std::iter::repeat_n(Cell::Empty, 5)),
        }
        row.push(Cell::Int(r.c_pi as i64));
        row.push(r.kappa_j.into());
        match &r.outcome {
            Ok(p) => row.extend([p.loading.fidelity_plus.into(), p.loading.fidelity_minus.into()]),
            Err(_) => row.extend([Cell::Empty, Cell::Empty]),
        }
        row.push(status(&r.outcome));
        t.push(row);
    }
    t
}

pub const BANDWIDTH_COLUMNS: [&str; 11] = [
    "sigma",
    "scheme",
    "kappa_j",
    "c",
    "f_ave",
    "p_herald_ave",
    "r1",
    "r2",
    "f_ave_plus",
    "f_ave_minus",
    "status",
];

pub fn bandwidth_table(scan: &BandwidthScan) -> Table {
    let mut t = Table::new(BANDWIDTH_COLUMNS.to_vec());
    for r in &scan.rows {
        let mut row = vec![
            r.sigma.into(),
            scan.scheme.as_str().into(),
            scan.kappa_j.into(),
            scan.cooperativity.into(),
        ];
        match &r.outcome {
            Ok(l) => row.extend([
                l.fidelity.into(),
                l.p_herald.into(),
                l.r1.into(),
                l.r2.into(),
                l.fidelity_plus.into(),
                l.fidelity_minus.into(),
            ]),
            Err(_) => row.extend(std::iter::repeat_n(Cell::Empty, 6)),
        }
        row.push(status(&r.outcome));
        t.push(row);
    }
    t
}

pub const POPULATION_COLUMNS: [&str; 4] = ["convention", "sigma", "peak_excited_population", "status"];

pub fn population_table(rows: &[PopulationRow]) -> Table {
    let mut t = Table::new(POPULATION_COLUMNS.to_vec());
    for r in rows {
        t.push(vec![
            r.convention.as_str().into(),
            r.sigma.into(),
            r.outcome.as_ref().ok().copied().into(),
            status(&r.outcome),
        ]);
    }
    t
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const MARGIN_FRACTION: f64 = 0.05;
pub const POINT_RADIUS: f64 = 2.5;
pub const C_PI_RADIUS: f64 = 2.0 * POINT_RADIUS;

fn scheme_color(s: Scheme) -> &'static str {
    match s {
        Scheme::PushPull => "#1f4e9c",
        Scheme::OnOff => "#c0392b",
    }
}

const DASHES: [&str; 4] = ["none", "6 3", "2 3", "8 3 2 3"];

/// Data range widened by 5% on each side.
fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    let pad = if span > 0.0 {
        MARGIN_FRACTION * span
    } else {
        MARGIN_FRACTION * lo.abs().max(1e-3)
    };
    (lo - pad, hi + pad)
}

fn tick_label(v: f64, span: f64) -> String {
    let digits = (-(span / 5.0).log10().floor()).max(0.0) as usize + 1;
    format!("{v:.digits$}")
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Parametric plot of (P_herald_ave, F_ave), one polyline per trajectory,
/// with the C_π sample drawn at twice the point radius.
pub fn sweep_svg(res: &SweepResult) -> String {
    let ok = |r: &&SweepRow| r.outcome.is_ok();
    let xs = res.rows.iter().filter(ok).map(|r| r.outcome.as_ref().unwrap().loading.p_herald);
    let ys = res.rows.iter().filter(ok).map(|r| r.outcome.as_ref().unwrap().loading.fidelity);
    let (x0, x1) = padded_range(xs);
    let (y0, y1) = padded_range(ys);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        esc(&res.name)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            tick_label(xv, x1 - x0)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            tick_label(yv, y1 - y0)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">average heralding probability</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">average fidelity</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    let mut kappas: Vec<f64> = res.rows.iter().map(|r| r.kappa_j).collect();
    kappas.sort_by(f64::total_cmp);
    kappas.dedup();
    let mut legend_y = TOP + 10.0;
    let mut drawn = 0;
    for scheme in Scheme::ALL {
        for (ki, &kj) in kappas.iter().enumerate() {
            let pts: Vec<&SweepRow> = res.trajectory(scheme, kj).filter(ok).collect();
            if pts.is_empty() {
                continue;
            }
            drawn += 1;
            let color = scheme_color(scheme);
            let dash = DASHES[ki % DASHES.len()];
            let coords: Vec<(f64, f64, &SweepRow)> = pts
                .iter()
                .map(|r| {
                    let l = &r.outcome.as_ref().unwrap().loading;
                    (sx(l.p_herald), sy(l.fidelity), *r)
                })
                .collect();
            let path: Vec<String> = coords.iter().map(|(x, y, _)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.2" stroke-dasharray="{dash}"/>"#,
                path.join(" ")
            );
            for (x, y, r) in &coords {
                let radius = if r.c_pi { C_PI_RADIUS } else { POINT_RADIUS };
                let _ = writeln!(
                    s,
                    r#"<circle cx="{x:.2}" cy="{y:.2}" r="{radius}" fill="{color}"><title>C = {:.4}</title></circle>"#,
                    r.c
                );
                if r.c_pi {
                    let _ = writeln!(
                        s,
                        r#"<text x="{:.2}" y="{:.2}" fill="{color}">{:.2}</text>"#,
                        x + C_PI_RADIUS + 2.0,
                        y - C_PI_RADIUS,
                        r.c
                    );
                }
            }
            for (x, y, r) in [coords.first().unwrap(), coords.last().unwrap()] {
                let _ = writeln!(
                    s,
                    r#"<text x="{:.2}" y="{:.2}" fill="{color}" font-size="10">{}</text>"#,
                    x + 4.0,
                    y + 12.0,
                    r.c.round()
                );
            }
            let lx = WIDTH - RIGHT + 15.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="{color}" stroke-dasharray="{dash}"/><text x="{}" y="{:.2}">{} kj={}</text>"#,
                lx + 25.0,
                lx + 30.0,
                legend_y + 4.0,
                scheme.as_str(),
                kj
            );
            legend_y += 18.0;
        }
    }
    if drawn == 0 {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">no data</text>"#,
            LEFT + pw / 2.0,
            TOP + ph / 2.0
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_sweep(res: &SweepResult, dir: &Path) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
    let csv = dir.join(format!("{}.csv", res.name));
    let svg = dir.join(format!("{}.svg", res.name));
    sweep_table(res).write_csv(&csv)?;
    write_text(&svg, &sweep_svg(res))?;
    Ok((csv, svg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::runs::PointResult;
    use crate::loading::AveragedLoading;

    #[test]
    fn real_format() {
        assert_eq!(format_real(1.0), "1.00000000000e+00");
        assert_eq!(format_real(-0.000123456789012345), "-1.23456789012e-04");
        assert_eq!(format_real(2.5e120), "2.50000000000e+120");
        assert_eq!(format_real(0.0), "0.00000000000e+00");
        assert_eq!(format_real(f64::NAN), "nan");
        let s = format_real(std::f64::consts::PI);
        let digits = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(digits.len(), 12);
        assert_eq!(s, "3.14159265359e+00");
    }

    #[test]
    fn text_cells_quoted() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::Text("x,y".into()), Cell::Text("say \"hi\"".into())]);
        assert_eq!(t.to_csv(), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let res = SweepResult {
            name: "empty".into(),
            rows: vec![],
        };
        assert_eq!(sweep_table(&res).to_csv(), SWEEP_COLUMNS.join(",") + "\n");
        assert!(sweep_svg(&res).contains("no data"));
    }

    fn row(c: f64, c_pi: bool, f: f64) -> SweepRow {
        SweepRow {
            c,
            scheme: Scheme::PushPull,
            kappa_j: 0.0,
            c_pi,
            outcome: Ok(PointResult {
                loading: AveragedLoading {
                    fidelity: f,
                    fidelity_plus: f,
                    fidelity_minus: f,
                    p_herald: c / 10.0,
                    r1: 0.5,
                    r2: 0.5,
                },
                delta_phase_0: Some(3.0),
            }),
        }
    }

    #[test]
    fn svg_marks_c_pi_larger() {
        let res = SweepResult {
            name: "t".into(),
            rows: vec![row(1.0, false, 0.9), row(2.0, true, 0.95), row(3.0, false, 0.92)],
        };
        let svg = sweep_svg(&res);
        assert_eq!(svg.matches(&format!("r=\"{POINT_RADIUS}\"")).count(), 2);
        assert_eq!(svg.matches(&format!("r=\"{C_PI_RADIUS}\"")).count(), 1);
        assert!(!svg.contains("href"));
        let csv = sweep_table(&res).to_csv();
        assert!(!csv.contains('\r'));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn failed_row_has_empty_numbers() {
        let mut r = row(1.0, false, 0.9);
        r.outcome = Err("no click".into());
        let res = SweepResult {
            name: "t".into(),
            rows: vec![r],
        };
        let csv = sweep_table(&res).to_csv();
        assert_eq!(csv.lines().nth(1).unwrap(), "1.00000000000e+00,push-pull,,,,,,0,0.00000000000e+00,,,no click");
    }
}
