use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harmonics::field::{Dual, GridField, SpectralField};
use crate::harmonics::group::{GroupSpec, IrrepLabel};
use crate::harmonics::grid::{GroupPoint, Layout, QuadratureGrid};
use crate::harmonics::wigner::{d_tables, wigner_d};

/// Work (multiply-adds) below which transforms run on the calling thread.
const PARALLEL_WORK: usize = 1 << 16;

/// Forward and inverse group Fourier transforms for one [`GroupSpec`].
///
/// Both directions are direct quadrature, factored along the tensor axes of
/// the grid. Every output coefficient is a sequential sum in a fixed order,
/// so results are bit-identical regardless of how rayon schedules the work.
#[derive(Debug, Clone)]
pub struct GroupHarmonics {
    spec: GroupSpec,
    dual: Arc<Dual>,
    grid: Arc<QuadratureGrid>,
    plan: Plan,
}

#[derive(Debug, Clone)]
enum Plan {
    Torus {
        dims: usize,
        side: usize,
        forward: Vec<Complex64>,
        inverse: Vec<Complex64>,
        cube_index: Vec<usize>,
    },
    Su2 {
        two_b: usize,
        /// `[two_l][(theta * dim + row) * dim + col]`
        d: Vec<Vec<f64>>,
        theta_weights: Vec<f64>,
        forward_phi: Vec<Complex64>,
        forward_psi: Vec<Complex64>,
        inverse_phi: Vec<Complex64>,
        inverse_psi: Vec<Complex64>,
    },
}

/// `freqs x nodes` matrix of `scale * exp(i freq_of(k) x_j)`.
fn freq_by_node(freqs: usize, nodes: &[f64], scale: f64, freq_of: impl Fn(usize) -> f64) -> Vec<Complex64> {
    (0..freqs)
        .flat_map(|k| nodes.iter().map(move |&x| (k, x)))
        .map(|(k, x)| Complex64::from_polar(scale, freq_of(k) * x))
        .collect()
}

/// `nodes x freqs` matrix of `exp(i freq_of(k) x_j)`.
fn node_by_freq(freqs: usize, nodes: &[f64], freq_of: impl Fn(usize) -> f64) -> Vec<Complex64> {
    nodes
        .iter()
        .flat_map(|&x| (0..freqs).map(move |k| (k, x)))
        .map(|(k, x)| Complex64::from_polar(1.0, freq_of(k) * x))
        .collect()
}

impl GroupHarmonics {
    pub fn new(spec: &GroupSpec) -> Result<Self> {
        let grid = Arc::new(QuadratureGrid::build(spec)?);
        let dual = Arc::new(Dual::new(spec));
        let b = spec.bandwidth;
        let plan = match grid.layout() {
            Layout::Torus { dims, angles } => {
                let side = 2 * b + 1;
                let n = angles.len();
                let freq = |k: usize| k as f64 - b as f64;
                let forward = freq_by_node(side, angles, 1.0 / n as f64, |k| -freq(k));
                let inverse = node_by_freq(side, angles, freq);
                let cube_index = dual
                    .irreps()
                    .iter()
                    .map(|irrep| match &irrep.label {
                        IrrepLabel::Torus(k) => k.iter().fold(0, |acc, &v| acc * side + (v + b as i32) as usize),
                        IrrepLabel::Spin { .. } => unreachable!("torus dual holds torus labels"),
                    })
                    .collect();
                Plan::Torus { dims: *dims, side, forward, inverse, cube_index }
            }
            Layout::Su2 { theta, theta_weights, phi, psi } => {
                let two_b = 2 * b;
                let count = 2 * two_b + 1;
                let half_freq = |k: usize| (k as f64 - two_b as f64) / 2.0;
                Plan::Su2 {
                    two_b,
                    d: d_tables(two_b as u32, theta),
                    theta_weights: theta_weights.clone(),
                    forward_phi: freq_by_node(count, phi, 1.0 / phi.len() as f64, half_freq),
                    forward_psi: freq_by_node(count, psi, 1.0 / psi.len() as f64, half_freq),
                    inverse_phi: node_by_freq(count, phi, |k| -half_freq(k)),
                    inverse_psi: node_by_freq(count, psi, |k| -half_freq(k)),
                }
            }
        };
        Ok(Self { spec: *spec, dual, grid, plan })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn dual(&self) -> &Arc<Dual> {
        &self.dual
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    fn check_grid(&self, f: &GridField) -> Result<()> {
        let other = f.grid();
        if Arc::ptr_eq(other, &self.grid) {
            return Ok(());
        }
        let (a, b) = (other.spec(), &self.spec);
        if a.kind == b.kind && a.bandwidth == b.bandwidth && a.oversampling == b.oversampling {
            Ok(())
        } else {
            Err(Error::Mismatch(format!(
                "grid built for {}/os={} used with {}/os={}",
                a.band_key(),
                a.oversampling,
                b.band_key(),
                b.oversampling
            )))
        }
    }

    fn check_dual(&self, f: &SpectralField) -> Result<()> {
        if f.dual().key() == self.dual.key() {
            Ok(())
        } else {
            Err(Error::Mismatch(format!("{} used with {}", f.dual().key(), self.dual.key())))
        }
    }

    /// `f^(xi) = sum_x w(x) f(x) xi(x)^*` for every irrep up to the band limit.
    pub fn forward(&self, f: &GridField) -> Result<SpectralField> {
        self.check_grid(f)?;
        let data = match &self.plan {
            Plan::Torus { dims, side, forward, cube_index, .. } => {
                let n = self.grid.shape()[0];
                let mut data = f.values().to_vec();
                let mut shape = vec![n; *dims];
                for axis in 0..*dims {
                    data = apply_along_axis(&data, &shape, axis, forward, *side);
                    shape[axis] = *side;
                }
                cube_index.iter().map(|&i| data[i]).collect()
            }
            Plan::Su2 { two_b, d, theta_weights, forward_phi, forward_psi, .. } => {
                let count = 2 * two_b + 1;
                let mut shape = self.grid.shape();
                let mut data = apply_along_axis(f.values(), &shape, 2, forward_psi, count);
                shape[2] = count;
                data = apply_along_axis(&data, &shape, 1, forward_phi, count);
                // data[theta][b][a]
                let n_theta = shape[0];
                let plane = count * count;
                let irreps = self.dual.irreps();
                let blocks: Vec<Vec<Complex64>> = maybe_par_map(irreps.len(), self.dual.len() * n_theta, |i| {
                    let two_l = irreps[i].dim - 1;
                    let dim = irreps[i].dim;
                    let table = &d[two_l];
                    let mut block = vec![Complex64::new(0.0, 0.0); dim * dim];
                    for row in 0..dim {
                        // row a: doubled spin two_l - 2 row
                        let a_idx = two_b + two_l - 2 * row;
                        for col in 0..dim {
                            let b_idx = two_b + two_l - 2 * col;
                            let mut acc = Complex64::new(0.0, 0.0);
                            for t in 0..n_theta {
                                let dval = table[(t * dim + col) * dim + row];
                                acc += data[t * plane + b_idx * count + a_idx] * (theta_weights[t] * dval);
                            }
                            block[row * dim + col] = acc;
                        }
                    }
                    block
                });
                blocks.concat()
            }
        };
        SpectralField::from_data(&self.dual, data)
    }

    /// Pointwise Fourier series `f(x) = sum_xi d_xi tr(xi(x) f^(xi))`.
    pub fn inverse(&self, field: &SpectralField) -> Result<GridField> {
        self.check_dual(field)?;
        let values = match &self.plan {
            Plan::Torus { dims, side, inverse, cube_index, .. } => {
                let n = self.grid.shape()[0];
                let mut data = vec![Complex64::new(0.0, 0.0); side.pow(*dims as u32)];
                for (i, &c) in cube_index.iter().enumerate() {
                    data[c] = field.data()[i];
                }
                let mut shape = vec![*side; *dims];
                for axis in 0..*dims {
                    data = apply_along_axis(&data, &shape, axis, inverse, n);
                    shape[axis] = n;
                }
                data
            }
            Plan::Su2 { two_b, d, inverse_phi, inverse_psi, .. } => {
                let count = 2 * two_b + 1;
                let grid_shape = self.grid.shape();
                let n_theta = grid_shape[0];
                let plane = count * count;
                let irreps = self.dual.irreps();
                let planes: Vec<Vec<Complex64>> = maybe_par_map(n_theta, self.dual.len() * n_theta, |t| {
                    let mut g = vec![Complex64::new(0.0, 0.0); plane];
                    for (i, irrep) in irreps.iter().enumerate() {
                        let dim = irrep.dim;
                        let two_l = dim - 1;
                        let table = &d[two_l];
                        let block = field.block(i);
                        for row in 0..dim {
                            let a_idx = two_b + two_l - 2 * row;
                            for col in 0..dim {
                                let b_idx = two_b + two_l - 2 * col;
                                let dval = table[(t * dim + col) * dim + row];
                                g[b_idx * count + a_idx] += block[row * dim + col] * (dim as f64 * dval);
                            }
                        }
                    }
                    g
                });
                let data = planes.concat();
                let mut shape = vec![n_theta, count, count];
                let data = apply_along_axis(&data, &shape, 2, inverse_psi, grid_shape[2]);
                shape[2] = grid_shape[2];
                apply_along_axis(&data, &shape, 1, inverse_phi, grid_shape[1])
            }
        };
        GridField::new(&self.grid, values)
    }

    /// Representation matrix at grid node `index`, read from the precomputed
    /// small-d tables on SU(2).
    pub fn rep_matrix_at(&self, irrep: usize, index: usize) -> Vec<Complex64> {
        let point = self.grid.point(index);
        match (&self.plan, point) {
            (Plan::Su2 { d, .. }, GroupPoint::Su2 { phi, psi, .. }) => {
                let shape = self.grid.shape();
                let t = index / (shape[1] * shape[2]);
                let dim = self.dual.irreps()[irrep].dim;
                let table = &d[dim - 1];
                let half = (dim - 1) as f64 / 2.0;
                let mut out = Vec::with_capacity(dim * dim);
                for row in 0..dim {
                    let m = half - row as f64;
                    for col in 0..dim {
                        let n = half - col as f64;
                        out.push(Complex64::from_polar(table[(t * dim + row) * dim + col], -(m * phi + n * psi)));
                    }
                }
                out
            }
            _ => self.rep_matrix(irrep, &point),
        }
    }

    /// Matrix of the representation `irrep` at a group element, row-major.
    pub fn rep_matrix(&self, irrep: usize, point: &GroupPoint) -> Vec<Complex64> {
        rep_matrix(&self.dual.irreps()[irrep].label, point)
    }
}

/// `xi(x)` for the irrep labelled `label`, row-major.
pub fn rep_matrix(label: &IrrepLabel, point: &GroupPoint) -> Vec<Complex64> {
    match (label, point) {
        (IrrepLabel::Torus(k), GroupPoint::Torus(x)) => {
            let phase: f64 = k.iter().zip(x).map(|(&k, &x)| k as f64 * x).sum();
            vec![Complex64::from_polar(1.0, phase)]
        }
        (IrrepLabel::Spin { two_l }, GroupPoint::Su2 { phi, theta, psi }) => {
            let d = wigner_d(*two_l, *theta).expect("grid spins are within the supported band");
            let dim = *two_l as usize + 1;
            let mut out = Vec::with_capacity(dim * dim);
            for row in 0..dim {
                let m = *two_l as f64 / 2.0 - row as f64;
                for col in 0..dim {
                    let n = *two_l as f64 / 2.0 - col as f64;
                    out.push(Complex64::from_polar(d[row * dim + col], -(m * phi + n * psi)));
                }
            }
            out
        }
        _ => panic!("irrep label and group point belong to different groups"),
    }
}

/// Contracts `data` (row-major with `shape`) along `axis` with the
/// `rows x shape[axis]` matrix `mat`.
fn apply_along_axis(data: &[Complex64], shape: &[usize], axis: usize, mat: &[Complex64], rows: usize) -> Vec<Complex64> {
    let cols = shape[axis];
    debug_assert_eq!(mat.len(), rows * cols);
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * rows * inner];
    let kernel = |o: usize, chunk: &mut [Complex64]| {
        let src = &data[o * cols * inner..(o + 1) * cols * inner];
        for r in 0..rows {
            let dst = &mut chunk[r * inner..(r + 1) * inner];
            let mrow = &mat[r * cols..(r + 1) * cols];
            for (c, &m) in mrow.iter().enumerate() {
                let line = &src[c * inner..(c + 1) * inner];
                for (d, &s) in dst.iter_mut().zip(line) {
                    *d += m * s;
                }
            }
        }
    };
    if outer * rows * cols * inner >= PARALLEL_WORK && outer > 1 {
        out.par_chunks_mut(rows * inner).enumerate().for_each(|(o, chunk)| kernel(o, chunk));
    } else {
        for (o, chunk) in out.chunks_mut(rows * inner).enumerate() {
            kernel(o, chunk);
        }
    }
    out
}

fn maybe_par_map<T: Send>(n: usize, work: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    if work >= PARALLEL_WORK {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// Character of the spin-1/2 representation, `tr D^(1/2)(phi, theta, psi)`.
pub fn spin_half_character(point: &GroupPoint) -> f64 {
    match point {
        GroupPoint::Su2 { phi, theta, psi } => 2.0 * (theta / 2.0).cos() * ((phi + psi) / 2.0).cos(),
        GroupPoint::Torus(_) => panic!("spin character needs an SU(2) point"),
    }
}
