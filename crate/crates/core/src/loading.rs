//! Heralding probability, conditional memory state and fidelity of the
//! photon-to-memory transfer, plus their averages over the Bloch sphere.
//!
//! The photon's H component reflects off the cavity (acquiring r_1 or r_2),
//! the V component takes a lower path with phase θ, delay T and optional
//! amplitude attenuation √η. After the 50/50 beam splitter and an inverse
//! Hadamard on the atom, a click at detector s = ±1 leaves the atom in
//!
//! ```text
//! ρ_s = (1/8K_s) ∫(dω/2π) |Ã|² φ φ†,   φ = (φ_1, φ_2s)
//! φ_1  = α (r_1 − r_2)
//! φ_2s = α (r_1 + r_2) + 2 s β e^{iθ} e^{iωT}
//! ```
//!
//! and the fidelity is measured against α|g_1⟩ + sβ|g_2⟩.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{GroundState, InterferometerSettings, QubitState};
use crate::photon::PhotonSpectrum;
use crate::spectral::ReflectionSpectrum;

/// Herald normalizations below this are treated as a zero-probability branch.
pub const NO_CLICK_THRESHOLD: f64 = 1e-14;

/// Which detector clicked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(&self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// 2×2 complex matrix in the {|g_1⟩, |g_2⟩} basis.
pub type Matrix2 = [[Complex64; 2]; 2];

fn check_shared_grid(rs: &ReflectionSpectrum, ph: &PhotonSpectrum) -> Result<()> {
    rs.grid.same_as(ph.grid())
}

/// R_j = ∫(dω/2π)|Ã|²|r_j|².
pub fn energy_reflectivity(
    rs: &ReflectionSpectrum,
    ph: &PhotonSpectrum,
    state: GroundState,
) -> Result<f64> {
    check_shared_grid(rs, ph)?;
    let values: Vec<f64> = rs
        .get(state)
        .iter()
        .zip(ph.amplitude())
        .map(|(r, a)| a.norm_sqr() * r.norm_sqr())
        .collect();
    rs.grid.spectral_integral("energy reflectivity", &values)
}

/// P_herald = |β|² + |α|²(R_1 + R_2)/2.
pub fn herald_probability(q: &QubitState, r1: f64, r2: f64) -> f64 {
    q.beta.norm_sqr() + q.alpha.norm_sqr() * 0.5 * (r1 + r2)
}

/// Normalized memory state after a click on `branch`, and its probability K_s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalState {
    pub rho: Matrix2,
    pub k: f64,
}

impl ConditionalState {
    pub fn trace(&self) -> f64 {
        self.rho[0][0].re + self.rho[1][1].re
    }

    /// Eigenvalues of the Hermitian ρ in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.rho[0][0].re;
        let d = self.rho[1][1].re;
        let b = self.rho[0][1];
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }

    /// ⟨ψ|ρ|ψ⟩ for ψ = a|g_1⟩ + b|g_2⟩.
    pub fn expectation(&self, a: Complex64, b: Complex64) -> f64 {
        let v = [a, b];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += v[i].conj() * self.rho[i][j] * v[j];
            }
        }
        acc.re
    }

    /// Overlap with the target α|g_1⟩ + sβ|g_2⟩.
    pub fn fidelity(&self, q: &QubitState, branch: Branch) -> f64 {
        self.expectation(q.alpha, q.beta * branch.sign())
    }
}

fn lower_path_phase(ifc: &InterferometerSettings, omega: f64) -> Complex64 {
    Complex64::from_polar(1.0, ifc.theta + omega * ifc.delay)
}

/// ρ_s and K_s by direct integration of the outer product φφ†.
pub fn conditional_state(
    rs: &ReflectionSpectrum,
    ph: &PhotonSpectrum,
    q: &QubitState,
    ifc: &InterferometerSettings,
    branch: Branch,
) -> Result<ConditionalState> {
    check_shared_grid(rs, ph)?;
    let s = branch.sign();
    let beta = q.beta * ifc.eta.sqrt();
    let n = rs.grid.len();
    let omegas = rs.grid.samples();
    let mut e11 = Vec::with_capacity(n);
    let mut e22 = Vec::with_capacity(n);
    let mut e12 = Vec::with_capacity(n);
    for (k, &w) in omegas.iter().enumerate() {
        let weight = ph.amplitude()[k].norm_sqr();
        let (r1, r2) = (rs.r1[k], rs.r2[k]);
        let phi1 = q.alpha * (r1 - r2);
        let phi2 = q.alpha * (r1 + r2) + beta * lower_path_phase(ifc, w) * (2.0 * s);
        e11.push(weight * phi1.norm_sqr());
        e22.push(weight * phi2.norm_sqr());
        e12.push(phi1 * phi2.conj() * weight);
    }
    let grid = &rs.grid;
    let i11 = grid.spectral_integral("rho_11", &e11)?;
    let i22 = grid.spectral_integral("rho_22", &e22)?;
    let i12 = grid.spectral_integral_complex("rho_12", &e12)?;
    let k = (i11 + i22) / 8.0;
    if !(k >= NO_CLICK_THRESHOLD) {
        return Err(Error::NoClick(k));
    }
    let norm = 1.0 / (8.0 * k);
    Ok(ConditionalState {
        rho: [
            [Complex64::new(i11 * norm, 0.0), i12 * norm],
            [i12.conj() * norm, Complex64::new(i22 * norm, 0.0)],
        ],
        k,
    })
}

/// F_s = (1/8K_s)∫(dω/2π)|Ã|²|(|α|² + sβ*α)r_1 − (|α|² − sβ*α)r_2 + 2β*β′e^{iθ}e^{iωT}|²,
/// where β′ = √η β (β′ = β without attenuation).
pub fn fidelity(
    rs: &ReflectionSpectrum,
    ph: &PhotonSpectrum,
    q: &QubitState,
    ifc: &InterferometerSettings,
    branch: Branch,
) -> Result<f64> {
    check_shared_grid(rs, ph)?;
    let s = branch.sign();
    let (alpha, beta) = (q.alpha, q.beta);
    let beta_lower = beta * ifc.eta.sqrt();
    let a2 = alpha.norm_sqr();
    let cross = beta.conj() * alpha * s;
    let c1 = cross + a2;
    let c2 = -(Complex64::new(a2, 0.0) - cross);
    let c3 = beta.conj() * beta_lower * 2.0;
    let omegas = rs.grid.samples();

    let mut overlap = Vec::with_capacity(omegas.len());
    let mut norm = Vec::with_capacity(omegas.len());
    for (k, &w) in omegas.iter().enumerate() {
        let weight = ph.amplitude()[k].norm_sqr();
        let (r1, r2) = (rs.r1[k], rs.r2[k]);
        let lower = lower_path_phase(ifc, w);
        overlap.push(weight * (c1 * r1 + c2 * r2 + c3 * lower).norm_sqr());
        let phi1 = alpha * (r1 - r2);
        let phi2 = alpha * (r1 + r2) + beta_lower * lower * (2.0 * s);
        norm.push(weight * (phi1.norm_sqr() + phi2.norm_sqr()));
    }
    let k = rs.grid.spectral_integral("K_s", &norm)? / 8.0;
    if !(k >= NO_CLICK_THRESHOLD) {
        return Err(Error::NoClick(k));
    }
    Ok(rs.grid.spectral_integral("fidelity overlap", &overlap)? / (8.0 * k))
}

/// Everything measurable at one parameter point for one photon state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadingReport {
    pub r1: f64,
    pub r2: f64,
    pub k_plus: f64,
    pub k_minus: f64,
    pub f_plus: f64,
    pub f_minus: f64,
    pub rho_plus: Matrix2,
    pub rho_minus: Matrix2,
    pub p_herald: f64,
}

impl LoadingReport {
    /// Herald-weighted fidelity (K_+F_+ + K_−F_−)/(K_+ + K_−).
    pub fn weighted_fidelity(&self) -> f64 {
        (self.k_plus * self.f_plus + self.k_minus * self.f_minus) / (self.k_plus + self.k_minus)
    }
}

pub fn loading_report(
    rs: &ReflectionSpectrum,
    ph: &PhotonSpectrum,
    q: &QubitState,
    ifc: &InterferometerSettings,
) -> Result<LoadingReport> {
    let r1 = energy_reflectivity(rs, ph, GroundState::One)?;
    let r2 = energy_reflectivity(rs, ph, GroundState::Two)?;
    let plus = conditional_state(rs, ph, q, ifc, Branch::Plus)?;
    let minus = conditional_state(rs, ph, q, ifc, Branch::Minus)?;
    Ok(LoadingReport {
        r1,
        r2,
        k_plus: plus.k,
        k_minus: minus.k,
        f_plus: fidelity(rs, ph, q, ifc, Branch::Plus)?,
        f_minus: fidelity(rs, ph, q, ifc, Branch::Minus)?,
        rho_plus: plus.rho,
        rho_minus: minus.rho,
        p_herald: herald_probability(q, r1, r2),
    })
}

/// Spectral Gram matrix G_ab = ∫(dω/2π)|Ã|² u_a* u_b of the three
/// amplitudes u = (r_1, r_2, e^{iθ}e^{iωT}).
///
/// Every K_s and F_s is a quadratic form in these nine numbers, so averaging
/// over many photon states costs one pass over the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGram {
    g: [[Complex64; 3]; 3],
    eta: f64,
}

impl SpectralGram {
    pub fn new(
        rs: &ReflectionSpectrum,
        ph: &PhotonSpectrum,
        ifc: &InterferometerSettings,
    ) -> Result<Self> {
        check_shared_grid(rs, ph)?;
        let omegas = rs.grid.samples();
        let n = omegas.len();
        let mut cols: [[Vec<Complex64>; 3]; 3] = Default::default();
        for row in cols.iter_mut() {
            for c in row.iter_mut() {
                c.reserve(n);
            }
        }
        for (k, &w) in omegas.iter().enumerate() {
            let weight = ph.amplitude()[k].norm_sqr();
            let u = [rs.r1[k], rs.r2[k], lower_path_phase(ifc, w)];
            for a in 0..3 {
                for b in a..3 {
                    cols[a][b].push(u[a].conj() * u[b] * weight);
                }
            }
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut g = [[zero; 3]; 3];
        for a in 0..3 {
            for b in a..3 {
                g[a][b] = rs.grid.spectral_integral_complex("spectral gram", &cols[a][b])?;
                g[b][a] = g[a][b].conj();
            }
        }
        for (d, row) in g.iter_mut().enumerate() {
            row[d].im = 0.0;
        }
        Ok(SpectralGram { g, eta: ifc.eta })
    }

    /// R_1, R_2.
    pub fn reflectivities(&self) -> (f64, f64) {
        (self.g[0][0].re, self.g[1][1].re)
    }

    /// ∫(dω/2π)|Ã|²|c·u|².
    fn quadratic(&self, c: [Complex64; 3]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..3 {
            for b in 0..3 {
                acc += c[a].conj() * self.g[a][b] * c[b];
            }
        }
        acc.re
    }

    /// (K_s, F_s) for one photon state and branch.
    pub fn branch(&self, q: &QubitState, branch: Branch) -> Result<(f64, f64)> {
        let s = branch.sign();
        let (alpha, beta) = (q.alpha, q.beta);
        let beta_lower = beta * self.eta.sqrt();
        let zero = Complex64::new(0.0, 0.0);
        let phi1 = [alpha, -alpha, zero];
        let phi2 = [alpha, alpha, beta_lower * (2.0 * s)];
        let k = (self.quadratic(phi1) + self.quadratic(phi2)) / 8.0;
        if !(k >= NO_CLICK_THRESHOLD) {
            return Err(Error::NoClick(k));
        }
        let a2 = alpha.norm_sqr();
        let cross = beta.conj() * alpha * s;
        let target = [cross + a2, cross - a2, beta.conj() * beta_lower * 2.0];
        Ok((k, self.quadratic(target) / (8.0 * k)))
    }

    pub fn point(&self, q: &QubitState) -> Result<PointMetrics> {
        let (k_plus, f_plus) = self.branch(q, Branch::Plus)?;
        let (k_minus, f_minus) = self.branch(q, Branch::Minus)?;
        let (r1, r2) = self.reflectivities();
        Ok(PointMetrics {
            k_plus,
            k_minus,
            f_plus,
            f_minus,
            p_herald: herald_probability(q, r1, r2),
        })
    }
}

/// Branch probabilities and fidelities for one photon state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMetrics {
    pub k_plus: f64,
    pub k_minus: f64,
    pub f_plus: f64,
    pub f_minus: f64,
    pub p_herald: f64,
}

impl PointMetrics {
    pub fn weighted_fidelity(&self) -> f64 {
        (self.k_plus * self.f_plus + self.k_minus * self.f_minus) / (self.k_plus + self.k_minus)
    }
}

/// One node of a quadrature over the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochNode {
    pub chi: f64,
    pub phi: f64,
    pub weight: f64,
}

/// Product rule: Gauss–Legendre in cos χ times uniform midpoints in φ,
/// normalized so the weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochQuadrature {
    pub nodes: Vec<BlochNode>,
    pub polar_points: usize,
    pub azimuthal_points: usize,
}

impl BlochQuadrature {
    pub fn new(polar_points: usize, azimuthal_points: usize) -> Result<Self> {
        if polar_points == 0 || azimuthal_points == 0 {
            return Err(Error::InvalidParameter(
                "Bloch quadrature needs at least one node per direction".into(),
            ));
        }
        let (xs, ws) = gauss_legendre(polar_points);
        let mut nodes = Vec::with_capacity(polar_points * azimuthal_points);
        for (x, w) in xs.iter().zip(&ws) {
            let chi = x.acos();
            for m in 0..azimuthal_points {
                let phi = -PI + 2.0 * PI * (m as f64 + 0.5) / azimuthal_points as f64;
                nodes.push(BlochNode {
                    chi,
                    phi,
                    weight: 0.5 * w / azimuthal_points as f64,
                });
            }
        }
        Ok(BlochQuadrature {
            nodes,
            polar_points,
            azimuthal_points,
        })
    }

    pub fn describe(&self) -> String {
        format!(
            "{}-point Gauss-Legendre in cos(chi) x {} midpoints in phi",
            self.polar_points, self.azimuthal_points
        )
    }
}

impl Default for BlochQuadrature {
    /// The 100-node rule (10 × 10).
    fn default() -> Self {
        BlochQuadrature::new(10, 10).expect("10x10 rule")
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1], ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        xs[n / 2] = 0.0;
    }
    (xs, ws)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Weighted sum of `f` over the quadrature nodes.
pub fn bloch_average<F>(f: F, quad: &BlochQuadrature) -> f64
where
    F: Fn(&QubitState) -> f64,
{
    quad.nodes
        .iter()
        .map(|n| n.weight * f(&QubitState::from_angles(n.chi, n.phi)))
        .sum()
}

/// Bloch-averaged figures of merit at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedLoading {
    /// Average of the herald-weighted fidelity.
    pub fidelity: f64,
    pub fidelity_plus: f64,
    pub fidelity_minus: f64,
    pub p_herald: f64,
    pub r1: f64,
    pub r2: f64,
}

/// Averages fidelity and heralding probability over the photon's Bloch sphere.
pub fn average_loading(
    rs: &ReflectionSpectrum,
    ph: &PhotonSpectrum,
    ifc: &InterferometerSettings,
    quad: &BlochQuadrature,
) -> Result<AveragedLoading> {
    let gram = SpectralGram::new(rs, ph, ifc)?;
    let (r1, r2) = gram.reflectivities();
    let mut out = AveragedLoading {
        fidelity: 0.0,
        fidelity_plus: 0.0,
        fidelity_minus: 0.0,
        p_herald: 0.0,
        r1,
        r2,
    };
    for node in &quad.nodes {
        let q = QubitState::from_angles(node.chi, node.phi);
        let m = gram.point(&q)?;
        out.fidelity += node.weight * m.weighted_fidelity();
        out.fidelity_plus += node.weight * m.f_plus;
        out.fidelity_minus += node.weight * m.f_minus;
        out.p_herald += node.weight * m.p_herald;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FrequencyGrid;
    use crate::params::{Scheme, SchemeGeometry, SystemParams};
    use crate::photon::gaussian_spectrum;
    use crate::spectral::reflection_spectrum;

    fn setup(sigma: f64) -> (FrequencyGrid, PhotonSpectrum) {
        let grid = FrequencyGrid::for_bandwidth(sigma, 4097).unwrap();
        let ph = gaussian_spectrum(sigma, &grid).unwrap();
        (grid, ph)
    }

    fn ideal(grid: &FrequencyGrid, ifc: &InterferometerSettings) -> ReflectionSpectrum {
        let r1: Vec<Complex64> = grid.samples().iter().map(|&w| lower_path_phase(ifc, w)).collect();
        let r2 = r1.iter().map(|r| -r).collect();
        let p = SystemParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        ReflectionSpectrum::from_samples(*grid, r1, r2, p).unwrap()
    }

    #[test]
    fn ideal_reflectivities_are_perfect() {
        let (grid, ph) = setup(0.3);
        let ifc = InterferometerSettings::new(0.4, 1.2, 1.0).unwrap();
        let rs = ideal(&grid, &ifc);
        for q in [QubitState::from_angles(1.1, 0.3), QubitState::horizontal(), QubitState::vertical()] {
            for b in Branch::BOTH {
                let st = conditional_state(&rs, &ph, &q, &ifc, b).unwrap();
                assert!((st.k - 0.5).abs() < 1e-12);
                assert!((fidelity(&rs, &ph, &q, &ifc, b).unwrap() - 1.0).abs() < 1e-12);
                assert!(st.eigenvalues()[0].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn alpha_zero_bypasses_cavity() {
        let (grid, ph) = setup(0.1);
        let p = SystemParams::from_cooperativity(7.0, 0.05, 0.1).unwrap();
        let rs = reflection_spectrum(&p, SchemeGeometry::new(Scheme::OnOff, 10.0).unwrap(), &grid).unwrap();
        let ifc = InterferometerSettings::for_scheme(Scheme::OnOff);
        let q = QubitState::from_angles(PI, 0.7);
        for b in Branch::BOTH {
            let st = conditional_state(&rs, &ph, &q, &ifc, b).unwrap();
            assert!((st.rho[1][1].re - 1.0).abs() < 1e-12);
            assert!(st.rho[0][0].norm() < 1e-12);
            assert!((st.k - 0.5).abs() < 1e-12);
            assert!((fidelity(&rs, &ph, &q, &ifc, b).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(herald_probability(&q, 0.3, 0.2), 1.0);
    }

    #[test]
    fn no_conditional_phase_gives_wrong_state() {
        // r_1 = r_2 with |r| = 1 and β = 0: φ_1 = 0, so ρ_s = |g_2⟩⟨g_2| and
        // the overlap with |g_1⟩ vanishes.
        let (grid, ph) = setup(0.5);
        let r: Vec<Complex64> = grid.samples().iter().map(|&w| Complex64::from_polar(1.0, 0.3 * w)).collect();
        let p = SystemParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        let rs = ReflectionSpectrum::from_samples(grid, r.clone(), r, p).unwrap();
        let ifc = InterferometerSettings::new(0.0, 1.2, 1.0).unwrap();
        let q = QubitState::horizontal();
        for b in Branch::BOTH {
            let st = conditional_state(&rs, &ph, &q, &ifc, b).unwrap();
            let f_rho = st.fidelity(&q, b);
            let f = fidelity(&rs, &ph, &q, &ifc, b).unwrap();
            assert!(f_rho.abs() < 1e-12);
            assert!((f - f_rho).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_reflectivity() {
        let (grid, ph) = setup(0.5);
        let p = SystemParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        let z = vec![Complex64::new(0.0, 0.0); grid.len()];
        let rs = ReflectionSpectrum::from_samples(grid, z.clone(), z, p).unwrap();
        assert_eq!(energy_reflectivity(&rs, &ph, GroundState::One).unwrap(), 0.0);
        let ifc = InterferometerSettings::for_scheme(Scheme::PushPull);
        let q = QubitState::horizontal();
        assert!(matches!(conditional_state(&rs, &ph, &q, &ifc, Branch::Plus), Err(Error::NoClick(_))));
        assert!(matches!(fidelity(&rs, &ph, &q, &ifc, Branch::Plus), Err(Error::NoClick(_))));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let (grid, _) = setup(0.5);
        let (_, other) = setup(0.4);
        let p = SystemParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        let rs = reflection_spectrum(&p, SchemeGeometry::new(Scheme::OnOff, 1.0).unwrap(), &grid).unwrap();
        assert!(matches!(
            energy_reflectivity(&rs, &other, GroundState::One),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn herald_probability_cases() {
        let h = QubitState::horizontal();
        assert_eq!(herald_probability(&h, 0.6, 0.8), 0.7);
        let q = QubitState::from_angles(0.9, 2.0);
        assert!((herald_probability(&q, 1.0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gram_route_matches_direct_route() {
        let (grid, ph) = setup(0.1);
        let p = SystemParams::from_cooperativity(30.0, 0.003, 0.1).unwrap();
        for scheme in Scheme::ALL {
            let rs = reflection_spectrum(&p, SchemeGeometry::new(scheme, 10.0).unwrap(), &grid).unwrap();
            let ifc = InterferometerSettings::new(0.3, 1.2, 0.8).unwrap();
            let gram = SpectralGram::new(&rs, &ph, &ifc).unwrap();
            for q in [QubitState::from_angles(0.4, -1.0), QubitState::from_angles(2.5, 2.9)] {
                let rep = loading_report(&rs, &ph, &q, &ifc).unwrap();
                let m = gram.point(&q).unwrap();
                assert!((m.k_plus - rep.k_plus).abs() < 1e-12);
                assert!((m.k_minus - rep.k_minus).abs() < 1e-12);
                assert!((m.f_plus - rep.f_plus).abs() < 1e-12);
                assert!((m.f_minus - rep.f_minus).abs() < 1e-12);
                let (r1, r2) = gram.reflectivities();
                assert!((r1 - rep.r1).abs() < 1e-12 && (r2 - rep.r2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gauss_legendre_rules() {
        let (x, w) = gauss_legendre(10);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact for polynomials up to degree 19
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((m - 2.0 / 19.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[1] > p[0]));
        let (x1, w1) = gauss_legendre(1);
        assert_eq!((x1[0], w1[0]), (0.0, 2.0));
    }

    #[test]
    fn bloch_average_basics() {
        let quad = BlochQuadrature::default();
        assert_eq!(quad.nodes.len(), 100);
        assert!((quad.nodes.iter().map(|n| n.weight).sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((bloch_average(|q| q.beta.norm_sqr(), &quad) - 0.5).abs() < 1e-12);
        assert_eq!(bloch_average(|_| 0.25, &quad), 0.25f64 * quad.nodes.iter().map(|n| n.weight).sum::<f64>());
        // ⟨cos²χ⟩ over the sphere is 1/3
        assert!((bloch_average(|q| (q.alpha.norm_sqr() - q.beta.norm_sqr()).powi(2), &quad) - 1.0 / 3.0).abs() < 1e-12);
        assert!(BlochQuadrature::new(0, 3).is_err());
    }

    #[test]
    fn averaged_ideal_is_one() {
        let (grid, ph) = setup(0.2);
        let ifc = InterferometerSettings::new(-0.5 * PI, 1.2, 1.0).unwrap();
        let rs = ideal(&grid, &ifc);
        let avg = average_loading(&rs, &ph, &ifc, &BlochQuadrature::default()).unwrap();
        assert!((avg.fidelity - 1.0).abs() < 1e-12);
        assert!((avg.p_herald - 1.0).abs() < 1e-12);
    }
}
