//! Adaptive Dormand-Prince 5(4) integrator for small autonomous systems.
//! Used as an independent reference for the mode propagator and the
//! spatially homogeneous blow-up problem.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, initial_step: 1e-3, max_steps: 10_000_000 }
    }
}

/// How an event-terminated integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome<const N: usize> {
    Reached([f64; N]),
    Event { t: f64, y: [f64; N] },
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One step; returns the fifth-order solution and the scaled error norm.
fn step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64, opts: &OdeOptions) -> ([f64; N], f64)
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    for s in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..N {
                ys[i] += h * A[s][j] * kj[i];
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err: f64 = 0.0;
    for i in 0..N {
        let (mut d5, mut d4) = (0.0, 0.0);
        for s in 0..7 {
            d5 += B5[s] * k[s][i];
            d4 += B4[s] * k[s][i];
        }
        y5[i] += h * d5;
        let scale = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
        err = err.max((h * (d5 - d4) / scale).abs());
    }
    (y5, err)
}

/// Integrates `y' = f(t, y)` from `t0` to `t1`, stopping early at the first
/// time `event(y)` becomes true (located to within `1e-14` relative in time).
pub fn integrate_with_event<const N: usize, F, E>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &OdeOptions,
    event: E,
) -> Result<Outcome<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    E: Fn(&[f64; N]) -> bool,
{
    if !(t1 >= t0) {
        return Err(Error::OutOfRange(format!("end time {t1} precedes start {t0}")));
    }
    if event(&y0) {
        return Ok(Outcome::Event { t: t0, y: y0 });
    }
    let (mut t, mut y) = (t0, y0);
    let mut h = opts.initial_step.min(t1 - t0).max(f64::MIN_POSITIVE);
    for _ in 0..opts.max_steps {
        if t >= t1 {
            return Ok(Outcome::Reached(y));
        }
        let last = t + h >= t1;
        let h_try = if last { t1 - t } else { h };
        let (y_new, err) = step(&f, t, &y, h_try, opts);
        let finite = y_new.iter().all(|v| v.is_finite());
        if finite && err <= 1.0 {
            if event(&y_new) {
                return Ok(locate_event(&f, t, &y, h_try, opts, &event));
            }
            t = if last { t1 } else { t + h_try };
            y = y_new;
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = h_try * factor;
        } else {
            let factor = if finite { (0.9 * err.powf(-0.2)).clamp(0.1, 0.5) } else { 0.25 };
            h = h_try * factor;
            if h < 1e-15 * t.abs().max(1.0) {
                return Err(Error::Inconsistent(format!("step size underflow at t = {t}")));
            }
        }
    }
    Err(Error::TooManySteps { steps: opts.max_steps, limit: opts.max_steps })
}

/// Bisects the step length from an accepted state until the event boundary is bracketed tightly.
fn locate_event<const N: usize, F, E>(f: &F, t: f64, y: &[f64; N], h: f64, opts: &OdeOptions, event: &E) -> Outcome<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    E: Fn(&[f64; N]) -> bool,
{
    let (mut lo, mut hi) = (0.0, h);
    let mut y_hi = step(f, t, y, h, opts).0;
    for _ in 0..200 {
        if hi - lo <= 1e-14 * (t + hi).abs().max(1e-300) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (ym, _) = step(f, t, y, mid, opts);
        if event(&ym) || !ym.iter().all(|v| v.is_finite()) {
            hi = mid;
            y_hi = ym;
        } else {
            lo = mid;
        }
    }
    Outcome::Event { t: t + hi, y: y_hi }
}

pub fn integrate<const N: usize, F>(f: F, t0: f64, y0: [f64; N], t1: f64, opts: &OdeOptions) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    match integrate_with_event(f, t0, y0, t1, opts, |_| false)? {
        Outcome::Reached(y) => Ok(y),
        Outcome::Event { .. } => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let y = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 10.0, &OdeOptions::default()).unwrap();
        assert!((y[0] - 10.0f64.cos()).abs() < 1e-10);
        assert!((y[1] + 10.0f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn riccati_blowup_time() {
        // y' = y^2, y(0) = 1 blows up at t = 1
        let out = integrate_with_event(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 5.0, &OdeOptions::default(), |y| {
            y[0] >= 1e8
        })
        .unwrap();
        match out {
            Outcome::Event { t, .. } => assert!((t - (1.0 - 1e-8)).abs() < 1e-9, "{t}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(integrate(|_, y: &[f64; 1]| *y, 1.0, [1.0], 0.0, &OdeOptions::default()).is_err());
    }
}
