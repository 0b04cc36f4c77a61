//! Iteration sequences behind the lifespan upper bound `T(eps) <= C eps^{-(p-1)}`,
//! their checks against simulated trajectories, and lifespan sweeps.
//!
//! Constants follow the slicing argument: `U0(t) >= C_j (t - L_j)^{gamma_j}`
//! for `t >= L_j`, with `gamma_j = (p^j - 1)/(p - 1)`, `ell_k = 1 + p^{-k}`
//! and `L_j = ell_0 ... ell_j`. Everything involving `C_j` is kept in log space.

use std::sync::Arc;

use rayon::prelude::*;

use crate::csv::{fmt_f64, write_table};
use crate::error::{Error, Result};
use crate::harmonics::GroupHarmonics;
use crate::ode::{integrate_with_event, OdeOptions, Outcome};
use crate::solver::{SolveConfig, Solver, Trajectory};

pub const MAX_DEPTH: usize = 60;
pub const DEFAULT_PRODUCT_TOLERANCE: f64 = 1e-16;
pub const LOWER_BOUND_FACTOR: f64 = 0.999;

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("p must be finite and > 1, got {p}")))
    }
}

/// `gamma_0 = 0`, `gamma_{j+1} = 1 + p gamma_j`.
pub fn gamma_recursive(p: f64, j_max: usize) -> Vec<f64> {
    let mut g = vec![0.0];
    for _ in 0..j_max {
        let last = *g.last().unwrap();
        g.push(1.0 + p * last);
    }
    g
}

/// `gamma_j = (p^j - 1)/(p - 1)` for `j = 0..=j_max`, cross-checked against the recursion.
pub fn gamma_seq(p: f64, j_max: usize) -> Result<Vec<f64>> {
    check_p(p)?;
    if j_max > MAX_DEPTH {
        return Err(Error::OutOfRange(format!("depth {j_max} exceeds {MAX_DEPTH}")));
    }
    let closed: Vec<f64> = (0..=j_max).map(|j| (p.powi(j as i32) - 1.0) / (p - 1.0)).collect();
    for (j, (c, r)) in closed.iter().zip(gamma_recursive(p, j_max)).enumerate() {
        if (c - r).abs() / (1.0 + c) > 1e-12 {
            return Err(Error::Inconsistent(format!("gamma_{j}: closed form {c} vs recursion {r}")));
        }
    }
    Ok(closed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialProducts {
    /// `ell_k = 1 + p^{-k}`.
    pub ell: Vec<f64>,
    /// `L_j = prod_{k <= j} ell_k`.
    pub partial: Vec<f64>,
    pub limit: f64,
}

/// Products up to the first `k` with `p^{-k} < tol`.
pub fn partial_products(p: f64, tol: f64) -> Result<PartialProducts> {
    check_p(p)?;
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tolerance must be positive, got {tol}")));
    }
    let (mut ell, mut partial) = (Vec::new(), Vec::new());
    let mut prod = 1.0;
    let mut k = 0;
    loop {
        let x = p.powi(-k);
        let l = 1.0 + x;
        prod *= l;
        ell.push(l);
        partial.push(prod);
        if x < tol {
            break;
        }
        k += 1;
    }
    Ok(PartialProducts { ell, partial, limit: prod })
}

/// `ell_j` for `j = 0..=j_max` without truncation.
pub fn ell_seq(p: f64, j_max: usize) -> Vec<f64> {
    (0..=j_max).map(|j| 1.0 + p.powi(-(j as i32))).collect()
}

/// `ell_j^{-gamma_j}` evaluated stably as `exp(-gamma_j ln(1 + p^{-j}))`.
pub fn m_term(p: f64, j: usize) -> f64 {
    let pj = p.powi(j as i32);
    let gamma = (pj - 1.0) / (p - 1.0);
    (-gamma * (1.0 / pj).ln_1p()).exp()
}

/// `inf_j ell_j^{-gamma_j}`, scanning until the terms settle at `e^{-1/(p-1)}`.
pub fn m_constant(p: f64) -> Result<f64> {
    check_p(p)?;
    let limit = (-1.0 / (p - 1.0)).exp();
    let mut m = limit;
    for j in 0..1_000_000 {
        let term = m_term(p, j);
        m = m.min(term);
        if j > 0 && (term - limit).abs() < 1e-14 {
            break;
        }
    }
    Ok(m)
}

/// `K = (p - 1/2)(p - 1) M`.
pub fn k_constant(p: f64) -> Result<f64> {
    Ok((p - 0.5) * (p - 1.0) * m_constant(p)?)
}

#[derive(Debug, Clone)]
pub struct CSequence {
    pub log_c: Vec<f64>,
    /// First index whose value underflows in direct space.
    pub underflow_index: Option<usize>,
}

/// `C_{j+1} = (p - 1/2) C_j^p p^{-2(j+1)} / ((gamma_j p + 1) ell_{j+1}^{gamma_j p + 1})`
/// in log space, verifying `C_j >= K C_{j-1}^p p^{-3j}` at every step.
pub fn c_seq(p: f64, c0: f64, j_max: usize) -> Result<CSequence> {
    let gamma = gamma_seq(p, j_max)?;
    if !(c0 >= 0.0) {
        return Err(Error::OutOfRange(format!("C0 must be nonnegative, got {c0}")));
    }
    let ln_p = p.ln();
    let log_k = k_constant(p)?.ln();
    let mut log_c = vec![c0.ln()];
    for j in 0..j_max {
        let g = gamma[j] * p + 1.0;
        let ell = (p.powi(-(j as i32 + 1))).ln_1p();
        let next = (p - 0.5).ln() + p * log_c[j] - 2.0 * (j + 1) as f64 * ln_p - g.ln() - g * ell;
        let chain = log_k + p * log_c[j] - 3.0 * (j + 1) as f64 * ln_p;
        if next.is_finite() && next < chain - 1e-12 * chain.abs() {
            return Err(Error::Inconsistent(format!("chain bound fails at j = {}: {next} < {chain}", j + 1)));
        }
        log_c.push(next);
    }
    let floor = f64::MIN_POSITIVE.ln();
    let underflow_index = log_c.iter().position(|&l| l < floor && c0 > 0.0);
    Ok(CSequence { log_c, underflow_index })
}

/// `C_j` in direct space (may underflow to 0).
pub fn c_seq_direct(p: f64, c0: f64, j_max: usize) -> Vec<f64> {
    let gamma = gamma_recursive(p, j_max);
    let mut c = vec![c0];
    for j in 0..j_max {
        let g = gamma[j] * p + 1.0;
        let ell = 1.0 + p.powi(-(j as i32 + 1));
        c.push((p - 0.5) * c[j].powf(p) * p.powi(-2 * (j as i32 + 1)) / (g * ell.powf(g)));
    }
    c
}

/// `(sum_{k<j} (j-k) p^k, ((p^{j+1} - p)/(p - 1) - j)/(p - 1))`.
pub fn sum_identity(j: usize, p: f64) -> (f64, f64) {
    let lhs = (0..j).map(|k| (j - k) as f64 * p.powi(k as i32)).sum();
    let rhs = ((p.powi(j as i32 + 1) - p) / (p - 1.0) - j as f64) / (p - 1.0);
    (lhs, rhs)
}

/// `(sum_{k<j} p^k, (p^j - 1)/(p - 1))`.
pub fn geometric_identity(j: usize, p: f64) -> (f64, f64) {
    ((0..j).map(|k| p.powi(k as i32)).sum(), (p.powi(j as i32) - 1.0) / (p - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub k: f64,
    pub m: f64,
    pub log_e0: f64,
    pub e0: f64,
    pub e1: f64,
    pub epsilon0: f64,
    pub j0: usize,
    pub l_limit: f64,
}

pub fn thresholds(p: f64, c_data: f64) -> Result<Thresholds> {
    check_p(p)?;
    if !(c_data > 0.0) {
        return Err(Error::OutOfRange(format!("data constant must be positive, got {c_data}")));
    }
    let m = m_constant(p)?;
    let k = (p - 0.5) * (p - 1.0) * m;
    let ln_p = p.ln();
    let log_e0 = k.ln() / (p - 1.0) - 3.0 * p * ln_p / ((p - 1.0) * (p - 1.0)) + c_data.ln();
    let e0 = log_e0.exp();
    let e1 = 2f64.powf(-1.0 / (p - 1.0)) * e0;
    let l_limit = partial_products(p, DEFAULT_PRODUCT_TOLERANCE)?.limit;
    let epsilon0 = (2.0 * l_limit).powf(-1.0 / (p - 1.0)) / e1;
    let j0 = (k.ln() / (3.0 * ln_p) - p / (p - 1.0)).ceil().max(0.0) as usize;
    Ok(Thresholds { k, m, log_e0, e0, e1, epsilon0, j0, l_limit })
}

/// All sequences and constants for one `(p, C_data, eps)`.
#[derive(Debug, Clone)]
pub struct BlowupSequences {
    pub p: f64,
    pub depth: usize,
    pub c_data: f64,
    pub epsilon: f64,
    pub gamma: Vec<f64>,
    pub ell: Vec<f64>,
    pub l_partial: Vec<f64>,
    pub log_c: Vec<f64>,
    pub underflow_index: Option<usize>,
    pub constants: Thresholds,
}

impl BlowupSequences {
    pub fn new(p: f64, c_data: f64, epsilon: f64, depth: usize) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::OutOfRange(format!("epsilon must be nonnegative, got {epsilon}")));
        }
        let constants = thresholds(p, c_data)?;
        let gamma = gamma_seq(p, depth)?;
        let ell = ell_seq(p, depth);
        let l_partial = ell
            .iter()
            .scan(1.0, |acc, l| {
                *acc *= l;
                Some(*acc)
            })
            .collect();
        let c = c_seq(p, c_data * epsilon, depth)?;
        Ok(Self {
            p,
            depth,
            c_data,
            epsilon,
            gamma,
            ell,
            l_partial,
            log_c: c.log_c,
            underflow_index: c.underflow_index,
            constants,
        })
    }

    pub fn c0(&self) -> f64 {
        self.c_data * self.epsilon
    }

    /// `(E1 eps)^{-(p-1)}`.
    pub fn lifespan_bound(&self) -> f64 {
        (self.constants.e1 * self.epsilon).powf(-(self.p - 1.0))
    }

    /// `log C_j - p^j log(E0 eps)` for `j` in `[j0, j_max]`; nonnegative when the
    /// log-linear lower bound holds.
    pub fn log_linear_margins(&self, j_max: usize) -> Vec<(usize, f64)> {
        let base = self.constants.log_e0 + self.epsilon.ln();
        (self.constants.j0..=j_max.min(self.depth))
            .map(|j| (j, self.log_c[j] - self.p.powi(j as i32) * base))
            .collect()
    }

    /// CSV with columns `j,gamma_j,ell_j,L_j,log_C_j`.
    pub fn to_csv(&self) -> String {
        let rows = (0..=self.depth).map(|j| {
            vec![
                j.to_string(),
                fmt_f64(self.gamma[j]),
                fmt_f64(self.ell[j]),
                fmt_f64(self.l_partial[j]),
                fmt_f64(self.log_c[j]),
            ]
        });
        write_table(&["j", "gamma_j", "ell_j", "L_j", "log_C_j"], rows)
    }

    pub fn describe(&self) -> Vec<(String, String)> {
        let c = &self.constants;
        vec![
            ("p".into(), fmt_f64(self.p)),
            ("C_data".into(), fmt_f64(self.c_data)),
            ("epsilon".into(), fmt_f64(self.epsilon)),
            ("C0".into(), fmt_f64(self.c0())),
            ("M".into(), fmt_f64(c.m)),
            ("K".into(), fmt_f64(c.k)),
            ("E0".into(), fmt_f64(c.e0)),
            ("E1".into(), fmt_f64(c.e1)),
            ("epsilon0".into(), fmt_f64(c.epsilon0)),
            ("j0".into(), c.j0.to_string()),
            ("L_limit".into(), fmt_f64(c.l_limit)),
            ("lifespan_bound".into(), fmt_f64(self.lifespan_bound())),
            ("underflow_index".into(), self.underflow_index.map(|j| j.to_string()).unwrap_or_else(|| "none".into())),
        ]
    }
}

/// Whether `E1 eps t^{1/(p-1)} > 1` and the lower-bound sequence
/// `exp(p^j log(E1 eps t^{1/(p-1)})) (t - L)^{-1/(p-1)}` grows for 5 consecutive `j`
/// starting at `j_start`. Returns `None` when the bracket is at most 1.
pub fn divergence_check(seqs: &BlowupSequences, t: f64, j_start: usize) -> Option<bool> {
    let p = seqs.p;
    let log_bracket = (seqs.constants.e1 * seqs.epsilon).ln() + t.ln() / (p - 1.0);
    if !(log_bracket > 0.0) || t <= seqs.constants.l_limit {
        return None;
    }
    let shift = -(t - seqs.constants.l_limit).ln() / (p - 1.0);
    let terms: Vec<f64> = (j_start..j_start + 6).map(|j| p.powi(j as i32) * log_bracket + shift).collect();
    Some(terms.windows(2).all(|w| w[1] > w[0]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundRow {
    pub j: usize,
    pub checked: usize,
    /// `min U0(t) / (C_j (t - L_j)^{gamma_j})` over checked times.
    pub min_slack: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    pub rows: Vec<LowerBoundRow>,
    pub warnings: Vec<String>,
}

impl LowerBoundReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn to_csv(&self) -> String {
        let rows = self.rows.iter().map(|r| {
            vec![
                r.j.to_string(),
                r.checked.to_string(),
                r.min_slack.map(fmt_f64).unwrap_or_else(|| "nan".into()),
                r.passed.to_string(),
            ]
        });
        write_table(&["j", "checked", "min_slack", "passed"], rows)
    }
}

/// Checks `U0(t) >= 0.999 C_j (t - L_j)^{gamma_j}` at every recorded
/// `t` in `[L_j, T_num)` for `j <= j_max`.
pub fn verify_lower_bounds(traj: &Trajectory, seqs: &BlowupSequences, j_max: usize) -> Result<LowerBoundReport> {
    verify_lower_bounds_on(&traj.times, &traj.u0_values, traj.t_num, seqs, j_max)
}

/// [`verify_lower_bounds`] on bare `(t, U0)` columns.
pub fn verify_lower_bounds_on(
    times: &[f64],
    u0_values: &[f64],
    t_num: Option<f64>,
    seqs: &BlowupSequences,
    j_max: usize,
) -> Result<LowerBoundReport> {
    if j_max > seqs.depth {
        return Err(Error::OutOfRange(format!("j_max {j_max} exceeds sequence depth {}", seqs.depth)));
    }
    if times.len() != u0_values.len() {
        return Err(Error::Mismatch(format!("{} times but {} values", times.len(), u0_values.len())));
    }
    let end = t_num.unwrap_or(f64::INFINITY);
    let last = times.last().copied().unwrap_or(0.0);
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for j in 0..=j_max {
        let l = seqs.l_partial[j];
        let (log_c, gamma) = (seqs.log_c[j], seqs.gamma[j]);
        let mut checked = 0;
        let mut min_slack: Option<f64> = None;
        let mut passed = true;
        for (&t, &u) in times.iter().zip(u0_values) {
            if t < l || t >= end {
                continue;
            }
            checked += 1;
            let log_bound = if gamma == 0.0 { log_c } else { log_c + gamma * (t - l).ln() };
            if log_bound == f64::NEG_INFINITY {
                continue;
            }
            let slack = if u > 0.0 { (u.ln() - log_bound).exp() } else { 0.0 };
            min_slack = Some(min_slack.map_or(slack, |m| m.min(slack)));
            if slack < LOWER_BOUND_FACTOR {
                passed = false;
            }
        }
        if checked == 0 {
            warnings.push(format!("trajectory ends at t = {last} before L_{j} = {l}"));
        }
        rows.push(LowerBoundRow { j, checked, min_slack, passed });
    }
    Ok(LowerBoundReport { rows, warnings })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifespanRecord {
    pub epsilon: f64,
    pub t_num: Option<f64>,
    /// `(E1 eps)^{-(p-1)}`.
    pub bound: f64,
    pub data_constant: f64,
}

impl LifespanRecord {
    pub fn compensated(&self, p: f64) -> Option<f64> {
        self.t_num.map(|t| t * self.epsilon.powf(p - 1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFit {
    pub slope: f64,
    pub intercept: f64,
    /// Range of slopes with one point left out.
    pub slope_ci: (f64, f64),
    pub compensated_min: f64,
    pub compensated_max: f64,
    pub used: usize,
    pub excluded: Vec<f64>,
}

impl SweepFit {
    pub fn compensated_ratio(&self) -> f64 {
        self.compensated_max / self.compensated_min
    }

    pub fn describe(&self) -> Vec<(String, String)> {
        vec![
            ("slope".into(), fmt_f64(self.slope)),
            ("intercept".into(), fmt_f64(self.intercept)),
            ("slope_ci_low".into(), fmt_f64(self.slope_ci.0)),
            ("slope_ci_high".into(), fmt_f64(self.slope_ci.1)),
            ("compensated_min".into(), fmt_f64(self.compensated_min)),
            ("compensated_max".into(), fmt_f64(self.compensated_max)),
            ("compensated_ratio".into(), fmt_f64(self.compensated_ratio())),
            ("used".into(), self.used.to_string()),
            ("excluded".into(), self.excluded.iter().map(|e| fmt_f64(*e)).collect::<Vec<_>>().join(";")),
        ]
    }
}

fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Least-squares slope of `log T` against `log eps` over the runs that blew up.
pub fn fit_lifespans(records: &[LifespanRecord], p: f64) -> Result<SweepFit> {
    let used: Vec<&LifespanRecord> = records.iter().filter(|r| r.t_num.is_some()).collect();
    let excluded = records.iter().filter(|r| r.t_num.is_none()).map(|r| r.epsilon).collect();
    if used.len() < 3 {
        return Err(Error::Empty("fewer than three runs blew up; cannot fit a slope"));
    }
    let x: Vec<f64> = used.iter().map(|r| r.epsilon.ln()).collect();
    let y: Vec<f64> = used.iter().map(|r| r.t_num.unwrap().ln()).collect();
    let (slope, intercept) = ols(&x, &y);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for skip in 0..x.len() {
        let xs: Vec<f64> = x.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v).collect();
        let ys: Vec<f64> = y.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v).collect();
        let s = ols(&xs, &ys).0;
        lo = lo.min(s);
        hi = hi.max(s);
    }
    let comp: Vec<f64> = used.iter().filter_map(|r| r.compensated(p)).collect();
    Ok(SweepFit {
        slope,
        intercept,
        slope_ci: (lo, hi),
        compensated_min: comp.iter().copied().fold(f64::INFINITY, f64::min),
        compensated_max: comp.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        used: used.len(),
        excluded,
    })
}

/// CSV with columns `epsilon,T_num,bound,compensated`.
pub fn sweep_csv(records: &[LifespanRecord], p: f64) -> String {
    let rows = records.iter().map(|r| {
        vec![
            fmt_f64(r.epsilon),
            r.t_num.map(fmt_f64).unwrap_or_else(|| "nan".into()),
            fmt_f64(r.bound),
            r.compensated(p).map(fmt_f64).unwrap_or_else(|| "nan".into()),
        ]
    });
    write_table(&["epsilon", "T_num", "bound", "compensated"], rows)
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub records: Vec<LifespanRecord>,
    pub fit: SweepFit,
}

fn check_epsilons(epsilons: &[f64]) -> Result<()> {
    if epsilons.len() < 4 {
        return Err(Error::Config(format!("a sweep needs at least 4 values of epsilon, got {}", epsilons.len())));
    }
    if epsilons.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::Config("sweep epsilons must be positive and finite".into()));
    }
    Ok(())
}

/// Runs the solver once per `eps` (in parallel) and fits the lifespan exponent.
pub fn lifespan_sweep(base: &SolveConfig, epsilons: &[f64]) -> Result<SweepResult> {
    check_epsilons(epsilons)?;
    base.validate()?;
    let h = Arc::new(GroupHarmonics::new(&base.spec)?);
    let c_data = base.u0.build(&h)?.data()[0].re;
    let bound_consts = if c_data > 0.0 { Some(thresholds(base.p, c_data)?) } else { None };
    let records = epsilons
        .par_iter()
        .map(|&eps| {
            let mut cfg = base.clone();
            cfg.epsilon = eps;
            cfg.record_stride = cfg.step_count();
            let traj = Solver::with_harmonics(&cfg, h.clone())?.solve()?;
            let bound = bound_consts.map_or(f64::NAN, |c| (c.e1 * eps).powf(-(base.p - 1.0)));
            Ok(LifespanRecord { epsilon: eps, t_num: traj.t_num, bound, data_constant: c_data })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_lifespans(&records, base.p)?;
    Ok(SweepResult { records, fit })
}

/// First time `|U|` reaches `threshold` for `U'' + U' = |U|^p`, or `None` before `t_max`.
pub fn scalar_blowup_time(p: f64, u0: f64, u1: f64, threshold: f64, t_max: f64) -> Result<Option<f64>> {
    let f = |_: f64, y: &[f64; 2]| [y[1], y[0].abs().powf(p) - y[1]];
    let opts = OdeOptions { initial_step: 1e-4, ..OdeOptions::default() };
    match integrate_with_event(f, 0.0, [u0, u1], t_max, &opts, |y| !(y[0].abs() < threshold))? {
        Outcome::Event { t, .. } => Ok(Some(t)),
        Outcome::Reached(_) => Ok(None),
    }
}

/// Scalar surrogate of [`lifespan_sweep`] with data `(eps a0, eps a1)`.
pub fn ode_lifespan_sweep(
    p: f64,
    data: (f64, f64),
    epsilons: &[f64],
    threshold: f64,
    t_max: f64,
) -> Result<SweepResult> {
    check_epsilons(epsilons)?;
    check_p(p)?;
    let bound_consts = if data.0 > 0.0 { Some(thresholds(p, data.0)?) } else { None };
    let records = epsilons
        .iter()
        .map(|&eps| {
            let t_num = scalar_blowup_time(p, eps * data.0, eps * data.1, threshold, t_max)?;
            let bound = bound_consts.map_or(f64::NAN, |c| (c.e1 * eps).powf(-(p - 1.0)));
            Ok(LifespanRecord { epsilon: eps, t_num, bound, data_constant: data.0 })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_lifespans(&records, p)?;
    Ok(SweepResult { records, fit })
}

/// `n` log-spaced values on `[a, b]`.
pub fn log_spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| (a.ln() + (b / a).ln() * i as f64 / (n - 1) as f64).exp()).collect()
}
