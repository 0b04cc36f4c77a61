//! Time integration of `u_tt - L u + u_t = s |u|^p` in the interaction picture.
//!
//! The linear flow is applied exactly per mode; the nonlinear source enters
//! through the Duhamel kernels `e^{-t/2} G1` (for `u`) and its time derivative
//! (for `u_t`), frozen at the midpoint of each step. The midpoint value comes
//! from an exponential Euler predictor over half a step.

mod picard;

pub use picard::{lipschitz_probe, picard_diagnostic, PicardReport};

use std::sync::Arc;

use num_complex::Complex64;

use crate::csv::{fmt_f64, write_table};
use crate::data::InitialData;
use crate::error::{Error, Result};
use crate::harmonics::{
    gauss_legendre, plancherel_norm_sq, sobolev_norm_sq, GridField, GroupHarmonics, GroupSpec, SpectralField,
};
use crate::propagator::{FieldState, Multipliers, PropagatorTable};

pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e8;
pub const DEFAULT_MAX_STEPS: usize = 50_000_000;
/// Bisections of the step in which the threshold is crossed (`dt / 16`).
pub const BLOWUP_BISECTIONS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub spec: GroupSpec,
    pub p: f64,
    pub epsilon: f64,
    pub u0: InitialData,
    pub u1: InitialData,
    pub dt: f64,
    pub t_max: f64,
    pub blowup_threshold: f64,
    /// Record every `record_stride`-th step (the first and last are always kept).
    pub record_stride: usize,
    /// Multiplies the nonlinearity; `0` gives the linear flow.
    pub source_scale: f64,
    pub max_steps: usize,
}

impl SolveConfig {
    pub fn new(spec: GroupSpec, p: f64, epsilon: f64, u0: InitialData, u1: InitialData, dt: f64, t_max: f64) -> Self {
        Self {
            spec,
            p,
            epsilon,
            u0,
            u1,
            dt,
            t_max,
            blowup_threshold: DEFAULT_BLOWUP_THRESHOLD,
            record_stride: 1,
            source_scale: 1.0,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let bad = |m: String| Err(Error::Config(m));
        if !(self.p > 1.0) || !self.p.is_finite() {
            return bad(format!("p must be a finite number > 1, got {}", self.p));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return bad(format!("epsilon must be finite and nonnegative, got {}", self.epsilon));
        }
        if !(self.dt > 0.0) || !(self.t_max > self.dt) || !self.t_max.is_finite() {
            return bad(format!("need 0 < dt < t_max, got dt = {} and t_max = {}", self.dt, self.t_max));
        }
        if !(self.blowup_threshold > 0.0) {
            return bad(format!("blow-up threshold must be positive, got {}", self.blowup_threshold));
        }
        if self.record_stride == 0 {
            return bad("record stride must be at least 1".into());
        }
        if !self.source_scale.is_finite() {
            return bad("source scale must be finite".into());
        }
        let steps = self.step_count();
        if steps > self.max_steps {
            return Err(Error::TooManySteps { steps, limit: self.max_steps });
        }
        Ok(())
    }

    pub fn step_count(&self) -> usize {
        (self.t_max / self.dt - 1e-9).ceil().max(1.0) as usize
    }

    /// Key-value pairs describing the run.
    pub fn describe(&self) -> Vec<(String, String)> {
        vec![
            ("group".into(), self.spec.kind.to_string()),
            ("bandwidth".into(), self.spec.bandwidth.to_string()),
            ("oversampling".into(), fmt_f64(self.spec.oversampling)),
            ("p".into(), fmt_f64(self.p)),
            ("epsilon".into(), fmt_f64(self.epsilon)),
            ("u0".into(), format!("{:?}", self.u0)),
            ("u1".into(), format!("{:?}", self.u1)),
            ("dt".into(), fmt_f64(self.dt)),
            ("t_max".into(), fmt_f64(self.t_max)),
            ("blowup_threshold".into(), fmt_f64(self.blowup_threshold)),
            ("record_stride".into(), self.record_stride.to_string()),
            ("source_scale".into(), fmt_f64(self.source_scale)),
        ]
    }

    /// `(eps u0, eps u1)` as spectral fields.
    pub fn initial_state(&self, h: &GroupHarmonics) -> Result<FieldState> {
        let u = self.u0.build(h)?.scaled(self.epsilon);
        let v = self.u1.build(h)?.scaled(self.epsilon);
        FieldState::new(u, v)
    }
}

/// Pointwise `|Re u(x)|^p`.
pub fn nonlinearity(u: &GridField, p: f64) -> GridField {
    let pow: Box<dyn Fn(f64) -> f64> = if p == 2.0 {
        Box::new(|x| x * x)
    } else if p.fract() == 0.0 && p < 64.0 {
        let n = p as i32;
        Box::new(move |x: f64| x.abs().powi(n))
    } else {
        Box::new(move |x: f64| x.abs().powf(p))
    };
    let values = u.values().iter().map(|z| Complex64::new(pow(z.re), 0.0)).collect();
    GridField::new(u.grid(), values).expect("same grid")
}

/// The Haar mean, i.e. the real part of the trivial coefficient.
pub fn mean_functional(f: &SpectralField) -> f64 {
    f.data()[f.dual().trivial()].re
}

/// `||f||_{L^q} / (||f||_{H^1}^theta ||f||_{L^2}^{1-theta})`, `theta = n (1/2 - 1/q)`.
pub fn gn_ratio(h: &GroupHarmonics, f: &SpectralField, q: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::OutOfRange(format!("dimension must be at least 3, got {n}")));
    }
    let q_max = 2.0 * n as f64 / (n as f64 - 2.0);
    if !(2.0..=q_max).contains(&q) {
        return Err(Error::OutOfRange(format!("q = {q} outside [2, {q_max}]")));
    }
    let theta = n as f64 * (0.5 - 1.0 / q);
    let lq = h.inverse(f)?.lq_norm(q);
    let l2 = plancherel_norm_sq(f).sqrt();
    let h1 = sobolev_norm_sq(f, 1.0).full;
    Ok(lq / (h1.powf(theta) * l2.powf(1.0 - theta)))
}

/// Per-irrep data for one step length.
#[derive(Debug, Clone)]
struct StepTable {
    linear: PropagatorTable,
    /// `int_0^h e^{-s/2} G1(s) ds`.
    kernel_u: Vec<f64>,
    /// `e^{-h/2} G1(h)`.
    kernel_v: Vec<f64>,
}

impl StepTable {
    fn new(h: &GroupHarmonics, step: f64) -> Self {
        let irreps = h.dual().irreps();
        let linear = PropagatorTable::new(irreps, step);
        let (nodes, weights) = gauss_legendre(16);
        let mut kernel_u = Vec::with_capacity(irreps.len());
        let mut kernel_v = Vec::with_capacity(irreps.len());
        for (m, irrep) in linear.multipliers.iter().zip(irreps) {
            let lam2 = irrep.eigenvalue;
            let integral = if lam2 >= 0.01 {
                (1.0 - m.damped_g0 - 0.5 * m.damped_g1) / lam2
            } else {
                nodes
                    .iter()
                    .zip(&weights)
                    .map(|(x, w)| 0.5 * step * w * Multipliers::new(0.5 * step * (1.0 + x), lam2).damped_g1)
                    .sum()
            };
            kernel_u.push(integral);
            kernel_v.push(m.damped_g1);
        }
        Self { linear, kernel_u, kernel_v }
    }
}

fn add_kernel(target: &mut SpectralField, kernel: &[f64], source: &SpectralField) {
    let dual = source.dual().clone();
    let src = source.data();
    let dst = target.data_mut();
    for (i, k) in kernel.iter().enumerate() {
        for j in dual.block_range(i) {
            dst[j] += src[j] * *k;
        }
    }
}

/// Recorded output of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `U0(t) = int u dx`.
    pub u0_values: Vec<f64>,
    /// `U0'(t)`.
    pub u0_rates: Vec<f64>,
    /// `int |u|^p dx` at the recorded nodes (times the source scale).
    pub source_means: Vec<f64>,
    /// Trapezoid integral of `source_means` over all steps up to each recorded node.
    pub source_integrals: Vec<f64>,
    /// `(||u||, ||(-L)^{1/2} u||, ||u_t||)`.
    pub norms: Vec<[f64; 3]>,
    pub blew_up: bool,
    pub t_num: Option<f64>,
    pub steps: usize,
    /// State at the last completed step.
    pub final_state: FieldState,
}

impl Trajectory {
    /// `U0' + U0 - U0'(0) - U0(0) - int_0^t int |u|^p` at each record.
    pub fn energy_residual(&self) -> Vec<f64> {
        let c0 = self.u0_rates[0] + self.u0_values[0];
        (0..self.times.len())
            .map(|i| self.u0_rates[i] + self.u0_values[i] - c0 - self.source_integrals[i])
            .collect()
    }

    /// `max |R(t)| / (1 + |U0' + U0| + |U0'(0) + U0(0)| + int_0^t int |u|^p)`.
    pub fn relative_energy_residual(&self) -> f64 {
        let c0 = self.u0_rates[0] + self.u0_values[0];
        self.energy_residual()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let scale = 1.0 + (self.u0_rates[i] + self.u0_values[i]).abs() + c0.abs() + self.source_integrals[i].abs();
                r.abs() / scale
            })
            .fold(0.0, f64::max)
    }

    /// CSV with columns `t,U0,l2_u,hdot1_u,l2_ut`.
    pub fn to_csv(&self) -> String {
        let rows = (0..self.times.len()).map(|i| {
            let [a, b, c] = self.norms[i];
            vec![fmt_f64(self.times[i]), fmt_f64(self.u0_values[i]), fmt_f64(a), fmt_f64(b), fmt_f64(c)]
        });
        write_table(&["t", "U0", "l2_u", "hdot1_u", "l2_ut"], rows)
    }

    pub fn summary(&self) -> Vec<(String, String)> {
        vec![
            ("blew_up".into(), self.blew_up.to_string()),
            ("T_num".into(), self.t_num.map(fmt_f64).unwrap_or_else(|| "none".into())),
            ("steps".into(), self.steps.to_string()),
            ("records".into(), self.times.len().to_string()),
        ]
    }
}

pub struct Solver {
    cfg: SolveConfig,
    h: Arc<GroupHarmonics>,
    full: StepTable,
    half: StepTable,
}

impl Solver {
    pub fn new(cfg: &SolveConfig) -> Result<Self> {
        cfg.validate()?;
        let h = Arc::new(GroupHarmonics::new(&cfg.spec)?);
        Self::with_harmonics(cfg, h)
    }

    /// Reuses an existing transform plan (must match the configured group).
    pub fn with_harmonics(cfg: &SolveConfig, h: Arc<GroupHarmonics>) -> Result<Self> {
        cfg.validate()?;
        if h.spec() != &cfg.spec {
            return Err(Error::Mismatch("transform plan does not match the configured group".into()));
        }
        let full = StepTable::new(&h, cfg.dt);
        let half = StepTable::new(&h, 0.5 * cfg.dt);
        Ok(Self { cfg: cfg.clone(), h, full, half })
    }

    pub fn harmonics(&self) -> &Arc<GroupHarmonics> {
        &self.h
    }

    pub fn config(&self) -> &SolveConfig {
        &self.cfg
    }

    /// Band-limited source `s |u|^p`.
    pub fn source(&self, u: &SpectralField) -> Result<SpectralField> {
        let grid = self.h.inverse(u)?;
        Ok(self.h.forward(&nonlinearity(&grid, self.cfg.p))?.scaled(self.cfg.source_scale))
    }

    fn advance(&self, state: &FieldState, f_now: &SpectralField, full: &StepTable, half: &StepTable) -> Result<FieldState> {
        let mut mid = state.clone();
        half.linear.apply(&mut mid);
        add_kernel(&mut mid.u, &half.kernel_u, f_now);
        let f_mid = self.source(&mid.u)?;
        let mut next = state.clone();
        full.linear.apply(&mut next);
        add_kernel(&mut next.u, &full.kernel_u, &f_mid);
        add_kernel(&mut next.v, &full.kernel_v, &f_mid);
        Ok(next)
    }

    /// One step of length `h` from `state`.
    pub fn step(&self, state: &FieldState, h: f64) -> Result<FieldState> {
        if !(h > 0.0) {
            return Err(Error::OutOfRange(format!("step must be positive, got {h}")));
        }
        let f_now = self.source(&state.u)?;
        if h == self.cfg.dt {
            self.advance(state, &f_now, &self.full, &self.half)
        } else {
            self.advance(state, &f_now, &StepTable::new(&self.h, h), &StepTable::new(&self.h, 0.5 * h))
        }
    }

    fn blown(&self, s: &FieldState) -> bool {
        !s.is_finite() || !(plancherel_norm_sq(&s.u).sqrt() <= self.cfg.blowup_threshold)
    }

    pub fn solve(&self) -> Result<Trajectory> {
        let mut state = self.cfg.initial_state(&self.h)?;
        self.run(&mut state)
    }

    /// Runs from `state` (at time `state.time`) up to `t_max` or blow-up.
    pub fn run(&self, state: &mut FieldState) -> Result<Trajectory> {
        let cfg = &self.cfg;
        let t_start = state.time;
        let n_steps = cfg.step_count();
        let mut traj = Trajectory {
            times: Vec::new(),
            u0_values: Vec::new(),
            u0_rates: Vec::new(),
            source_means: Vec::new(),
            source_integrals: Vec::new(),
            norms: Vec::new(),
            blew_up: false,
            t_num: None,
            steps: 0,
            final_state: state.clone(),
        };
        if self.blown(state) {
            traj.blew_up = true;
            traj.t_num = Some(t_start);
            return Ok(traj);
        }
        let mut f_now = self.source(&state.u)?;
        let mut integral = 0.0;
        let record = |traj: &mut Trajectory, s: &FieldState, f: &SpectralField, integral: f64| {
            traj.times.push(s.time);
            traj.u0_values.push(mean_functional(&s.u));
            traj.u0_rates.push(mean_functional(&s.v));
            traj.source_means.push(mean_functional(f));
            traj.source_integrals.push(integral);
            traj.norms.push(s.norms());
        };
        for k in 0..n_steps {
            if k % cfg.record_stride == 0 {
                record(&mut traj, state, &f_now, integral);
            }
            let t_k = t_start + k as f64 * cfg.dt;
            let last = k + 1 == n_steps;
            let remaining = t_start + cfg.t_max - t_k;
            let h = if last && (remaining - cfg.dt).abs() > 1e-9 * cfg.dt { remaining } else { cfg.dt };
            let mut next = if h == cfg.dt {
                self.advance(state, &f_now, &self.full, &self.half)?
            } else {
                self.advance(state, &f_now, &StepTable::new(&self.h, h), &StepTable::new(&self.h, 0.5 * h))?
            };
            next.time = if last { t_start + cfg.t_max } else { t_start + (k + 1) as f64 * cfg.dt };
            let f_next = if self.blown(&next) { None } else { Some(self.source(&next.u)?).filter(|f| f.is_finite()) };
            let Some(f_next) = f_next else {
                if k % cfg.record_stride != 0 {
                    record(&mut traj, state, &f_now, integral);
                }
                traj.blew_up = true;
                traj.t_num = Some(t_k + self.bisect(state, &f_now, h)?);
                traj.steps = k;
                traj.final_state = state.clone();
                return Ok(traj);
            };
            integral += 0.5 * h * (mean_functional(&f_now) + mean_functional(&f_next));
            *state = next;
            f_now = f_next;
        }
        record(&mut traj, state, &f_now, integral);
        traj.steps = n_steps;
        traj.final_state = state.clone();
        Ok(traj)
    }

    /// Shortest tested sub-step after which the threshold is exceeded.
    fn bisect(&self, state: &FieldState, f_now: &SpectralField, h: f64) -> Result<f64> {
        let (mut lo, mut hi) = (0.0, h);
        for _ in 0..BLOWUP_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            let trial = self.advance(state, f_now, &StepTable::new(&self.h, mid), &StepTable::new(&self.h, 0.5 * mid))?;
            let over = self.blown(&trial) || !self.source(&trial.u)?.is_finite();
            if over {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

pub fn solve(cfg: &SolveConfig) -> Result<Trajectory> {
    Solver::new(cfg)?.solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DataPreset;
    use crate::harmonics::GroupSpec;
    use crate::ode::{integrate_with_event, OdeOptions, Outcome};
    use crate::propagator::propagate_field;

    fn constant_cfg(spec: GroupSpec, p: f64, eps: f64, dt: f64, t_max: f64) -> SolveConfig {
        let one = InitialData::new(DataPreset::Constant, 1.0);
        SolveConfig::new(spec, p, eps, one.clone(), one, dt, t_max)
    }

    fn scalar_reference(p: f64, u0: f64, u1: f64, t: f64) -> f64 {
        let f = |_: f64, y: &[f64; 2]| [y[1], y[0].abs().powf(p) - y[1]];
        match integrate_with_event(f, 0.0, [u0, u1], t, &OdeOptions::default(), |_| false).unwrap() {
            Outcome::Reached(y) => y[0],
            Outcome::Event { .. } => unreachable!(),
        }
    }

    #[test]
    fn nonlinearity_examples() {
        let h = GroupHarmonics::new(&GroupSpec::torus(1, 4).unwrap()).unwrap();
        let zero = GridField::from_real(h.grid(), &vec![0.0; h.grid().len()]).unwrap();
        assert!(nonlinearity(&zero, 2.5).values().iter().all(|v| v.norm() == 0.0));
        let c = GridField::from_real(h.grid(), &vec![1.5; h.grid().len()]).unwrap();
        for p in [1.5, 2.0, 3.0] {
            assert!(nonlinearity(&c, p).values().iter().all(|v| (v.re - 1.5f64.powf(p)).abs() < 1e-15 && v.im == 0.0));
        }
        let cos = GridField::sample(h.grid(), |pt| match pt {
            crate::harmonics::GroupPoint::Torus(x) => Complex64::new(x[0].cos(), 0.0),
            _ => unreachable!(),
        });
        let sq = h.forward(&nonlinearity(&cos, 2.0)).unwrap();
        assert!((mean_functional(&sq) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn mean_functional_is_quadrature_mean() {
        let h = GroupHarmonics::new(&GroupSpec::su2(3).unwrap()).unwrap();
        let f = GridField::sample(h.grid(), |pt| match pt {
            crate::harmonics::GroupPoint::Su2 { phi, theta, psi } => {
                Complex64::new(1.0 + theta.cos() * (phi + 2.0 * psi).sin(), 0.0)
            }
            _ => unreachable!(),
        });
        assert!((mean_functional(&h.forward(&f).unwrap()) - f.mean().re).abs() < 1e-12);
        let c = SpectralField::constant(h.dual(), 2.5);
        assert_eq!(mean_functional(&c), 2.5);
    }

    #[test]
    fn gn_ratio_basics() {
        let h = GroupHarmonics::new(&GroupSpec::su2(4).unwrap()).unwrap();
        let c = SpectralField::constant(h.dual(), -0.7);
        assert!((gn_ratio(&h, &c, 3.0, 3).unwrap() - 1.0).abs() < 1e-12);
        let f = crate::data::random_real(&h, 3).unwrap();
        assert!((gn_ratio(&h, &f, 2.0, 3).unwrap() - 1.0).abs() < 1e-10);
        assert!(gn_ratio(&h, &f, 7.0, 3).is_err());
        assert!(gn_ratio(&h, &f, 3.0, 2).is_err());
    }

    #[test]
    fn zero_data_stays_zero() {
        let cfg = constant_cfg(GroupSpec::torus(2, 3).unwrap(), 2.0, 0.0, 0.01, 1.0);
        let traj = solve(&cfg).unwrap();
        assert!(!traj.blew_up);
        assert!(traj.norms.iter().all(|n| n.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn constant_data_matches_scalar_ode() {
        let cfg = constant_cfg(GroupSpec::torus(1, 3).unwrap(), 2.0, 0.5, 1e-3, 1.0);
        let traj = solve(&cfg).unwrap();
        let reference = scalar_reference(2.0, 0.5, 0.5, 1.0);
        let got = *traj.u0_values.last().unwrap();
        assert!(((got - reference) / reference).abs() < 1e-6, "{got} vs {reference}");
    }

    #[test]
    fn second_order_in_time() {
        let spec = GroupSpec::torus(1, 2).unwrap();
        let reference = scalar_reference(3.0, 0.5, 0.5, 1.0);
        let err = |dt: f64| {
            let traj = solve(&constant_cfg(spec, 3.0, 0.5, dt, 1.0)).unwrap();
            (traj.u0_values.last().unwrap() - reference).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((3.4..=4.6).contains(&ratio), "{ratio}");
    }

    #[test]
    fn linear_flow_is_reproduced_exactly() {
        let h = GroupHarmonics::new(&GroupSpec::torus(2, 3).unwrap()).unwrap();
        let mut cfg = constant_cfg(*h.spec(), 2.0, 1.0, 0.05, 1.0);
        cfg.u0 = InitialData::new(DataPreset::RandomReal { seed: 5 }, 1.0);
        cfg.u1 = InitialData::new(DataPreset::RandomReal { seed: 6 }, 1.0);
        cfg.source_scale = 0.0;
        let traj = solve(&cfg).unwrap();
        let mut reference = cfg.initial_state(&h).unwrap();
        for _ in 0..cfg.step_count() {
            reference = propagate_field(&reference, cfg.dt);
        }
        assert_eq!(traj.final_state.u.max_abs_diff(&reference.u).unwrap(), 0.0);
        assert_eq!(traj.final_state.v.max_abs_diff(&reference.v).unwrap(), 0.0);
    }

    #[test]
    fn blowup_time_is_insensitive_to_threshold() {
        let mut cfg = constant_cfg(GroupSpec::torus(1, 2).unwrap(), 2.0, 0.5, 1e-3, 10.0);
        cfg.blowup_threshold = 1e6;
        let a = solve(&cfg).unwrap().t_num.unwrap();
        cfg.blowup_threshold = 1e10;
        let b = solve(&cfg).unwrap().t_num.unwrap();
        assert!(((a - b) / b).abs() < 0.01, "{a} vs {b}");
    }

    #[test]
    fn jensen_and_first_lower_bound() {
        let mut cfg = constant_cfg(GroupSpec::torus(1, 4).unwrap(), 2.0, 0.2, 2e-3, 20.0);
        cfg.u0 = InitialData::new(DataPreset::TrivialPlusLowest, 1.0);
        cfg.u1 = cfg.u0.clone();
        let traj = solve(&cfg).unwrap();
        assert!(traj.blew_up);
        let (u0, u1) = (traj.u0_values[0], traj.u0_rates[0]);
        for i in 0..traj.times.len() {
            let t = traj.times[i];
            assert!(traj.source_means[i] >= traj.u0_values[i].abs().powi(2) - 1e-12);
            assert!(traj.u0_values[i] >= 0.999 * (u0 + u1 * (1.0 - (-t).exp())));
        }
    }

    #[test]
    fn energy_residual_is_small() {
        let mut cfg = constant_cfg(GroupSpec::torus(1, 4).unwrap(), 2.0, 0.5, 1e-3, 1.0);
        cfg.u0 = InitialData::new(DataPreset::TrivialPlusLowest, 1.0);
        let traj = solve(&cfg).unwrap();
        let worst = traj.energy_residual().iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(worst < 5e-4, "{worst}");
    }

    #[test]
    fn record_stride_keeps_endpoints() {
        let mut cfg = constant_cfg(GroupSpec::torus(1, 2).unwrap(), 2.0, 0.1, 0.01, 1.0);
        cfg.record_stride = 7;
        let traj = solve(&cfg).unwrap();
        assert_eq!(traj.times[0], 0.0);
        assert!((traj.times.last().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(traj.times.len(), 100 / 7 + 2);
        let full = solve(&SolveConfig { record_stride: 1, ..cfg }).unwrap();
        assert_eq!(full.source_integrals.last(), traj.source_integrals.last());
    }

    #[test]
    fn config_validation() {
        let good = constant_cfg(GroupSpec::torus(1, 2).unwrap(), 2.0, 0.1, 0.01, 1.0);
        assert!(good.validate().is_ok());
        assert!(matches!(SolveConfig { p: 1.0, ..good.clone() }.validate(), Err(Error::Config(_))));
        assert!(matches!(SolveConfig { dt: 2.0, ..good.clone() }.validate(), Err(Error::Config(_))));
        assert!(matches!(SolveConfig { max_steps: 10, ..good }.validate(), Err(Error::TooManySteps { .. })));
    }
}
