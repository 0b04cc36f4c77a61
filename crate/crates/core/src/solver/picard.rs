//! Picard iteration of the Duhamel operator on a fixed time grid.

use num_complex::Complex64;

use super::SolveConfig;
use crate::error::{Error, Result};
use crate::harmonics::{plancherel_norm_sq, sobolev_norm_sq, GroupHarmonics, SpectralField};
use crate::propagator::{propagate_field, FieldState, Multipliers};

/// `(u, u_t)` at every node of `[0, T]`.
type Path = Vec<FieldState>;

struct Duhamel {
    h: GroupHarmonics,
    p: f64,
    scale: f64,
    dt: f64,
    /// `kernels[lag][irrep] = (e^{-s/2} G1(s), d/ds of it)` at `s = lag dt`.
    kernels: Vec<Vec<(f64, f64)>>,
    linear: Path,
}

impl Duhamel {
    fn new(cfg: &SolveConfig, t: f64) -> Result<Self> {
        cfg.validate()?;
        if !(t > 0.0) {
            return Err(Error::OutOfRange(format!("horizon must be positive, got {t}")));
        }
        let h = GroupHarmonics::new(&cfg.spec)?;
        let n = (t / cfg.dt - 1e-9).ceil().max(1.0) as usize;
        let dt = t / n as f64;
        let kernels = (0..=n)
            .map(|lag| {
                h.dual()
                    .irreps()
                    .iter()
                    .map(|irrep| {
                        let m = Multipliers::new(lag as f64 * dt, irrep.eigenvalue);
                        (m.damped_g1, m.velocity_kernel())
                    })
                    .collect()
            })
            .collect();
        let start = cfg.initial_state(&h)?;
        let linear = (0..=n).map(|i| propagate_field(&start, i as f64 * dt)).collect();
        Ok(Self { h, p: cfg.p, scale: cfg.source_scale, dt, kernels, linear })
    }

    fn source(&self, u: &SpectralField) -> Result<SpectralField> {
        let grid = self.h.inverse(u)?;
        Ok(self.h.forward(&super::nonlinearity(&grid, self.p))?.scaled(self.scale))
    }

    /// `N w (t_i) = linear(t_i) + int_0^{t_i} K(t_i - s) |w(s)|^p ds`, trapezoid in `s`.
    fn apply(&self, w: &Path) -> Result<Path> {
        let sources = w.iter().map(|s| self.source(&s.u)).collect::<Result<Vec<_>>>()?;
        let dual = self.h.dual().clone();
        let mut out = self.linear.clone();
        for (i, target) in out.iter_mut().enumerate() {
            for (j, f) in sources.iter().enumerate().take(i + 1) {
                let weight = if j == 0 || j == i { 0.5 * self.dt } else { self.dt };
                let kernel = &self.kernels[i - j];
                for (r, &(ku, kv)) in kernel.iter().enumerate() {
                    for k in dual.block_range(r) {
                        let fk: Complex64 = f.data()[k] * weight;
                        target.u.data_mut()[k] += fk * ku;
                        target.v.data_mut()[k] += fk * kv;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `sup_t (||u|| + ||(-L)^{1/2} u|| + ||u_t||)` of the difference of two paths.
fn x_distance(a: &Path, b: &Path) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut du = x.u.clone();
            du.axpy(-1.0, &y.u).expect("same dual");
            let mut dv = x.v.clone();
            dv.axpy(-1.0, &y.v).expect("same dual");
            sobolev_norm_sq(&du, 1.0).full + plancherel_norm_sq(&dv).sqrt()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct PicardReport {
    /// `||u^{m+1} - u^m||_{X(T)}` for `m = 0, 1, ...`.
    pub distances: Vec<f64>,
    /// Consecutive quotients of `distances` (zero when the distances vanish).
    pub ratios: Vec<f64>,
    pub diverged: bool,
}

/// Iterates `u^{m+1} = N u^m` from the linear solution, on nodes spaced by
/// at most `cfg.dt` over `[0, T]`.
pub fn picard_diagnostic(cfg: &SolveConfig, t: f64, iters: usize) -> Result<PicardReport> {
    if iters < 2 {
        return Err(Error::OutOfRange(format!("need at least 2 iterations, got {iters}")));
    }
    let op = Duhamel::new(cfg, t)?;
    let mut current = op.linear.clone();
    let mut distances = Vec::with_capacity(iters);
    let mut diverged = false;
    for _ in 0..iters {
        let next = op.apply(&current)?;
        let d = x_distance(&next, &current);
        distances.push(d);
        if !d.is_finite() || d > 1e100 {
            diverged = true;
            break;
        }
        current = next;
    }
    let ratios = distances.windows(2).map(|w| if w[0] == 0.0 { 0.0 } else { w[1] / w[0] }).collect();
    Ok(PicardReport { distances, ratios, diverged })
}

/// `||N(u + delta) - N(u)||_{X(T)} / ||delta||_{X(T)}` with `u` the linear
/// solution and `delta = rel * eps u0` held constant in time.
pub fn lipschitz_probe(cfg: &SolveConfig, t: f64, rel: f64) -> Result<f64> {
    let op = Duhamel::new(cfg, t)?;
    let shape = op.linear[0].u.scaled(rel);
    let perturbed: Path = op
        .linear
        .iter()
        .map(|s| {
            let mut u = s.u.clone();
            u.axpy(1.0, &shape).expect("same dual");
            FieldState { u, v: s.v.clone(), time: s.time }
        })
        .collect();
    let delta_norm = sobolev_norm_sq(&shape, 1.0).full;
    if delta_norm == 0.0 {
        return Ok(0.0);
    }
    let (a, b) = (op.apply(&perturbed)?, op.apply(&op.linear)?);
    Ok(x_distance(&a, &b) / delta_norm)
}
