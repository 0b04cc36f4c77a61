//! Exact evolution of the linear damped wave equation, one Fourier mode at a time.
//!
//! Each coefficient of `u^(t, xi)` solves `w'' + w' + lambda^2 w = 0`, so
//!
//! ```text
//! w(t)  = e^{-t/2} G0 w0 + e^{-t/2} G1 (w1 + w0/2)
//! w'(t) = -e^{-t/2} G1 lambda^2 w0 + e^{-t/2} (G0 - G1/2) w1
//! ```
//!
//! with `G0 = cosh(sqrt(1-4 lambda^2) t/2)` and
//! `G1 = 2 sinh(sqrt(1-4 lambda^2) t/2) / sqrt(1-4 lambda^2)`, continued
//! analytically through `lambda^2 = 1/4` (where `G0 = 1`, `G1 = t`) into the
//! oscillatory cos/sin branch.

use num_complex::Complex64;

use crate::csv::{fmt_f64, write_table};
use crate::error::{Error, Result};
use crate::harmonics::{plancherel_norm_sq, sobolev_norm_sq, Irrep, SpectralField};

/// Width of the band `|1 - 4 lambda^2| < DEGENERATE_WIDTH` where the even
/// power series replaces the hyperbolic/trigonometric branches.
pub const DEGENERATE_WIDTH: f64 = 1e-6;

/// Default threshold on `lambda` separating the low-frequency part of the dual.
pub const DEFAULT_PARTITION_THRESHOLD: f64 = 0.125;

/// `sum z^k / (2k)!` and `sum z^k / (2k+1)!`, i.e. `cosh(sqrt z)` and `sinh(sqrt z)/sqrt z`.
fn even_series(z: f64) -> (f64, f64) {
    let (mut c, mut s) = (1.0, 1.0);
    let (mut tc, mut ts) = (1.0, 1.0);
    for k in 1..40 {
        let k = k as f64;
        tc *= z / ((2.0 * k - 1.0) * (2.0 * k));
        ts *= z / ((2.0 * k) * (2.0 * k + 1.0));
        c += tc;
        s += ts;
        if tc.abs() < 1e-18 * c.abs() && ts.abs() < 1e-18 * s.abs() {
            break;
        }
    }
    (c, s)
}

/// `z = (1 - 4 lambda^2) t^2 / 4` when the series branch applies.
fn series_argument(t: f64, lambda_sq: f64) -> Option<f64> {
    let delta = 1.0 - 4.0 * lambda_sq;
    if delta.abs() < DEGENERATE_WIDTH {
        let z = delta * t * t / 4.0;
        if z.abs() <= 1.0 {
            return Some(z);
        }
    }
    None
}

pub fn g0(t: f64, lambda_sq: f64) -> f64 {
    if let Some(z) = series_argument(t, lambda_sq) {
        return even_series(z).0;
    }
    let delta = 1.0 - 4.0 * lambda_sq;
    if delta > 0.0 {
        (0.5 * delta.sqrt() * t).cosh()
    } else {
        (0.5 * (-delta).sqrt() * t).cos()
    }
}

pub fn g1(t: f64, lambda_sq: f64) -> f64 {
    if let Some(z) = series_argument(t, lambda_sq) {
        return t * even_series(z).1;
    }
    let delta = 1.0 - 4.0 * lambda_sq;
    if delta > 0.0 {
        let r = delta.sqrt();
        2.0 * (0.5 * r * t).sinh() / r
    } else {
        let r = (-delta).sqrt();
        2.0 * (0.5 * r * t).sin() / r
    }
}

/// The damped multipliers `e^{-t/2} G0(t)` and `e^{-t/2} G1(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multipliers {
    pub damped_g0: f64,
    pub damped_g1: f64,
}

impl Multipliers {
    /// Evaluates both multipliers without overflow for large `t`.
    pub fn new(t: f64, lambda_sq: f64) -> Self {
        let delta = 1.0 - 4.0 * lambda_sq;
        if delta > 0.0 && t > 600.0 && series_argument(t, lambda_sq).is_none() {
            // e^{-t/2} cosh(r t/2) = (e^{(r-1)t/2} + e^{-(r+1)t/2}) / 2
            let r = delta.sqrt();
            let grow = (0.5 * (r - 1.0) * t).exp();
            let decay = (-0.5 * (r + 1.0) * t).exp();
            return Self { damped_g0: 0.5 * (grow + decay), damped_g1: (grow - decay) / r };
        }
        let damping = (-0.5 * t).exp();
        Self { damped_g0: damping * g0(t, lambda_sq), damped_g1: damping * g1(t, lambda_sq) }
    }

    /// Maps `(w0, w1)` to `(w(t), w'(t))`.
    #[inline]
    pub fn apply(&self, lambda_sq: f64, w0: Complex64, w1: Complex64) -> (Complex64, Complex64) {
        let (a0, a1) = (self.damped_g0, self.damped_g1);
        let u = w0 * a0 + (w1 + w0 * 0.5) * a1;
        let v = w0 * (-a1 * lambda_sq) + w1 * (a0 - 0.5 * a1);
        (u, v)
    }

    /// Velocity response to a unit velocity kick, `d/dt [e^{-t/2} G1]`.
    pub fn velocity_kernel(&self) -> f64 {
        self.damped_g0 - 0.5 * self.damped_g1
    }
}

/// One Fourier coefficient and its time derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub u_hat: Complex64,
    pub v_hat: Complex64,
    pub eigenvalue: f64,
}

impl ModeState {
    pub fn new(u_hat: Complex64, v_hat: Complex64, eigenvalue: f64) -> Self {
        Self { u_hat, v_hat, eigenvalue }
    }

    pub fn is_finite(&self) -> bool {
        [self.u_hat.re, self.u_hat.im, self.v_hat.re, self.v_hat.im].iter().all(|v| v.is_finite())
    }

    /// `|w'|^2/2 + lambda^2 |w|^2/2`.
    pub fn energy(&self) -> f64 {
        0.5 * self.v_hat.norm_sqr() + 0.5 * self.eigenvalue * self.u_hat.norm_sqr()
    }
}

pub fn propagate_mode(mode: ModeState, t: f64) -> ModeState {
    let (u_hat, v_hat) = Multipliers::new(t, mode.eigenvalue).apply(mode.eigenvalue, mode.u_hat, mode.v_hat);
    ModeState { u_hat, v_hat, eigenvalue: mode.eigenvalue }
}

/// Spectral state `(u^, d_t u^)` at a given time.
#[derive(Debug, Clone)]
pub struct FieldState {
    pub u: SpectralField,
    pub v: SpectralField,
    pub time: f64,
}

impl FieldState {
    pub fn new(u: SpectralField, v: SpectralField) -> Result<Self> {
        u.ensure_compatible(&v)?;
        Ok(Self { u, v, time: 0.0 })
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    /// `(||u||, ||(-L)^{1/2} u||, ||d_t u||)`.
    pub fn norms(&self) -> [f64; 3] {
        [
            plancherel_norm_sq(&self.u).sqrt(),
            sobolev_norm_sq(&self.u, 1.0).homogeneous_sq.sqrt(),
            plancherel_norm_sq(&self.v).sqrt(),
        ]
    }
}

/// Multipliers for every irrep at one fixed time step.
#[derive(Debug, Clone)]
pub struct PropagatorTable {
    pub step: f64,
    pub(crate) multipliers: Vec<Multipliers>,
}

impl PropagatorTable {
    pub fn new(irreps: &[Irrep], step: f64) -> Self {
        Self { step, multipliers: irreps.iter().map(|i| Multipliers::new(step, i.eigenvalue)).collect() }
    }

    /// Advances `state` in place by the table's step.
    pub fn apply(&self, state: &mut FieldState) {
        let dual = state.u.dual().clone();
        for (i, irrep) in dual.irreps().iter().enumerate() {
            let m = &self.multipliers[i];
            let range = dual.block_range(i);
            let (us, vs) = (state.u.data_mut(), state.v.data_mut());
            for k in range {
                (us[k], vs[k]) = m.apply(irrep.eigenvalue, us[k], vs[k]);
            }
        }
        state.time += self.step;
    }
}

pub fn propagate_field(state: &FieldState, t: f64) -> FieldState {
    let mut out = state.clone();
    PropagatorTable::new(state.u.irreps(), t).apply(&mut out);
    out
}

/// Splits irrep indices into `lambda < threshold` and the rest.
pub fn partition_dual(irreps: &[Irrep], threshold: f64) -> (Vec<usize>, Vec<usize>) {
    (0..irreps.len()).partition(|&i| irreps[i].frequency() < threshold)
}

/// `m` geometrically spaced times on `[t_min, t_max]`.
pub fn geometric_times(t_min: f64, t_max: f64, m: usize) -> Vec<f64> {
    if m == 1 {
        return vec![t_min];
    }
    let ratio = (t_max / t_min).ln() / (m - 1) as f64;
    (0..m).map(|i| t_min * (ratio * i as f64).exp()).collect()
}

/// Continues a geometric grid with the same ratio until `t_max` is covered.
pub fn extend_geometric(times: &[f64], t_max: f64) -> Vec<f64> {
    let mut out = times.to_vec();
    if times.len() < 2 {
        return out;
    }
    let ratio = times[1] / times[0];
    let base = times[0];
    let mut i = times.len();
    while *out.last().unwrap() < t_max {
        out.push(base * (ratio.ln() * i as f64).exp());
        i += 1;
    }
    out
}

/// Sampled norms of the homogeneous solution and the smallest constants that
/// make the three `L^2` decay bounds hold at the sampled times.
#[derive(Debug, Clone)]
pub struct DecayReport {
    pub times: Vec<f64>,
    pub l2_u: Vec<f64>,
    pub hdot1_u: Vec<f64>,
    pub l2_ut: Vec<f64>,
    /// `||u0||_{H^1} + ||u1||_{L^2}`.
    pub data_norm: f64,
    /// `C1, C2, C3` for `||u|| <= C1 D`, `||(-L)^{1/2} u|| <= C2 (1+t)^{-1/2} D`,
    /// `||u_t|| <= C3 (1+t)^{-1} D`.
    pub constants: [f64; 3],
}

impl DecayReport {
    pub fn bounds_at(&self, t: f64) -> [f64; 3] {
        let d = self.data_norm;
        let [c1, c2, c3] = self.constants;
        [c1 * d, c2 * d / (1.0 + t).sqrt(), c3 * d / (1.0 + t)]
    }

    /// CSV with columns `t,l2_u,hdot1_u,l2_ut,bound1,bound2,bound3`.
    pub fn to_csv(&self) -> String {
        let rows = (0..self.times.len()).map(|i| {
            let t = self.times[i];
            let b = self.bounds_at(t);
            vec![
                fmt_f64(t),
                fmt_f64(self.l2_u[i]),
                fmt_f64(self.hdot1_u[i]),
                fmt_f64(self.l2_ut[i]),
                fmt_f64(b[0]),
                fmt_f64(b[1]),
                fmt_f64(b[2]),
            ]
        });
        write_table(&["t", "l2_u", "hdot1_u", "l2_ut", "bound1", "bound2", "bound3"], rows)
    }

    /// Largest ratio of an observed norm to its fitted bound on `times`
    /// (at most 1 on the fitting grid by construction).
    pub fn worst_bound_ratio(&self, u0: &SpectralField, u1: &SpectralField, times: &[f64]) -> Result<f64> {
        let state = FieldState::new(u0.clone(), u1.clone())?;
        let mut worst: f64 = 0.0;
        for &t in times {
            let norms = propagate_field(&state, t).norms();
            for (n, b) in norms.iter().zip(self.bounds_at(t)) {
                if *n > 0.0 {
                    worst = worst.max(if b > 0.0 { n / b } else { f64::INFINITY });
                }
            }
        }
        Ok(worst)
    }
}

pub fn decay_report(u0: &SpectralField, u1: &SpectralField, times: &[f64]) -> Result<DecayReport> {
    if times.is_empty() {
        return Err(Error::Empty("decay report needs at least one time"));
    }
    if times.iter().any(|&t| !(t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::OutOfRange("times must be nonnegative and sorted".into()));
    }
    let state = FieldState::new(u0.clone(), u1.clone())?;
    let data_norm = sobolev_norm_sq(u0, 1.0).full + plancherel_norm_sq(u1).sqrt();
    let (mut l2_u, mut hdot1_u, mut l2_ut) = (Vec::new(), Vec::new(), Vec::new());
    let mut constants = [0.0f64; 3];
    for &t in times {
        let [a, b, c] = propagate_field(&state, t).norms();
        l2_u.push(a);
        hdot1_u.push(b);
        l2_ut.push(c);
        if data_norm > 0.0 {
            constants[0] = constants[0].max(a / data_norm);
            constants[1] = constants[1].max(b * (1.0 + t).sqrt() / data_norm);
            constants[2] = constants[2].max(c * (1.0 + t) / data_norm);
        }
    }
    Ok(DecayReport { times: times.to_vec(), l2_u, hdot1_u, l2_ut, data_norm, constants })
}
