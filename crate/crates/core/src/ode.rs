//! Dormand–Prince 5(4) embedded Runge–Kutta pair with PI step-size control,
//! specialised to small fixed-size complex state vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Fifth-order weights minus the embedded fourth-order ones.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
// PI controller exponents (Hairer, Nørsett & Wanner II.4).
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    /// Upper bound on the step size.
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-10,
            abs: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

type State<const N: usize> = [Complex64; N];

fn axpy<const N: usize>(y: &State<N>, h: f64, terms: &[(f64, &State<N>)]) -> State<N> {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        *o += acc * h;
    }
    out
}

/// Integrates y' = f(t, y) from `times[0]` and returns y at every entry of
/// `times` (which must be non-decreasing). Steps are clipped so that each
/// output time is hit exactly.
pub fn integrate<const N: usize, F>(
    f: F,
    y0: State<N>,
    times: &[f64],
    tol: Tolerance,
) -> Result<(Vec<State<N>>, Stats)>
where
    F: Fn(f64, &State<N>) -> State<N>,
{
    let mut stats = Stats::default();
    let mut out = Vec::with_capacity(times.len());
    let Some(&t0) = times.first() else {
        return Ok((out, stats));
    };
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Integration {
            t: t0,
            reason: "output times must be non-decreasing".into(),
        });
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    let span = times[times.len() - 1] - t0;
    let mut h = initial_step(&y, &k1, tol, span);
    let mut err_prev: f64 = 1e-4;
    out.push(y);

    for &target in &times[1..] {
        while t < target {
            if stats.accepted + stats.rejected >= tol.max_steps {
                return Err(Error::Integration {
                    t,
                    reason: format!("exceeded {} steps", tol.max_steps),
                });
            }
            let remaining = target - t;
            let hit = h >= remaining;
            let step = if hit { remaining } else { h };
            if step <= f64::EPSILON * t.abs().max(1.0) {
                return Err(Error::Integration {
                    t,
                    reason: format!("step size underflow (h = {step:e})"),
                });
            }

            let k2 = f(t + C2 * step, &axpy(&y, step, &[(A21, &k1)]));
            let k3 = f(t + C3 * step, &axpy(&y, step, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                t + C4 * step,
                &axpy(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                t + C5 * step,
                &axpy(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + step,
                &axpy(
                    &y,
                    step,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = axpy(
                &y,
                step,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let t_new = if hit { target } else { t + step };
            let k7 = f(t_new, &y_new);
            stats.evaluations += 6;

            let mut sum = 0.0;
            for i in 0..N {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                    * step;
                let scale = tol.abs + tol.rel * y[i].norm().max(y_new[i].norm());
                sum += (e.norm() / scale).powi(2);
            }
            let err = (sum / N as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::Integration {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }

            if err <= 1.0 {
                let factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                err_prev = err.max(1e-4);
                t = t_new;
                y = y_new;
                k1 = k7;
                stats.accepted += 1;
                // A step clipped to an output time says little about the
                // natural step size; keep the larger of the two.
                h = if hit { h.max(step * factor) } else { step * factor };
            } else {
                h = step * (SAFETY * err.powf(-ALPHA)).clamp(MIN_FACTOR, 1.0);
                stats.rejected += 1;
            }
            h = h.min(tol.max_step);
        }
        out.push(y);
    }
    Ok((out, stats))
}

fn initial_step<const N: usize>(y: &State<N>, dy: &State<N>, tol: Tolerance, span: f64) -> f64 {
    let scale = |i: usize| tol.abs + tol.rel * y[i].norm();
    let d0 = (0..N).map(|i| (y[i].norm() / scale(i)).powi(2)).sum::<f64>().sqrt();
    let d1 = (0..N).map(|i| (dy[i].norm() / scale(i)).powi(2)).sum::<f64>().sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(tol.max_step).min(span.abs().max(1e-12))
}
