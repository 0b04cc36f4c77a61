use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::harmonics::group::{GroupKind, GroupSpec};

/// Quadrature nodes for the normalized Haar measure.
///
/// Both layouts are tensor products, stored with the first axis slowest.
/// Torus: axes are the `n` angles, each with `points_per_axis` equispaced
/// nodes. SU(2): axes are `(theta, phi, psi)` in zyz Euler angles, with
/// Gauss-Legendre nodes in `cos theta` and equispaced `phi in [0, 2pi)`,
/// `psi in [0, 4pi)`.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    spec: GroupSpec,
    layout: Layout,
    weights: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) enum Layout {
    Torus { dims: usize, angles: Vec<f64> },
    Su2 { theta: Vec<f64>, theta_weights: Vec<f64>, phi: Vec<f64>, psi: Vec<f64> },
}

/// A group element in grid coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupPoint {
    Torus([f64; 3]),
    /// zyz Euler angles `(phi, theta, psi)`.
    Su2 { phi: f64, theta: f64, psi: f64 },
}

fn scaled(count: usize, oversampling: f64) -> usize {
    ((oversampling * count as f64) - 1e-9).ceil().max(1.0) as usize
}

impl QuadratureGrid {
    /// Builds the grid for `spec`. Point counts per axis: torus
    /// `ceil(s (2B+1))`; SU(2) `ceil(s (B+1))` in theta, `ceil(s (2B+1))` in phi
    /// and `ceil(s (4B+2))` in psi, with `s` the oversampling factor.
    pub fn build(spec: &GroupSpec) -> Result<Self> {
        spec.validate_shape()?;
        let b = spec.bandwidth;
        let s = spec.oversampling;
        let (layout, total) = match spec.kind {
            GroupKind::Torus(n) => {
                let per_axis = scaled(2 * b + 1, s);
                let total = per_axis.checked_pow(n as u32).unwrap_or(usize::MAX);
                check_size(total, spec)?;
                let angles = (0..per_axis).map(|j| 2.0 * PI * j as f64 / per_axis as f64).collect();
                (Layout::Torus { dims: n, angles }, total)
            }
            GroupKind::Su2 => {
                let n_theta = scaled(b + 1, s);
                let n_phi = scaled(2 * b + 1, s);
                let n_psi = scaled(4 * b + 2, s);
                let total = n_theta.saturating_mul(n_phi).saturating_mul(n_psi);
                check_size(total, spec)?;
                let (nodes, gl_weights) = gauss_legendre(n_theta);
                let theta = nodes.iter().map(|x| x.acos()).collect();
                let theta_weights = gl_weights.iter().map(|w| w / 2.0).collect();
                let phi = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
                let psi = (0..n_psi).map(|j| 4.0 * PI * j as f64 / n_psi as f64).collect();
                (Layout::Su2 { theta, theta_weights, phi, psi }, total)
            }
        };
        let weights = match &layout {
            Layout::Torus { .. } => vec![1.0 / total as f64; total],
            Layout::Su2 { theta_weights, phi, psi, .. } => {
                let inner = (phi.len() * psi.len()) as f64;
                let block = phi.len() * psi.len();
                theta_weights.iter().flat_map(|w| std::iter::repeat_n(w / inner, block)).collect()
            }
        };
        Ok(Self { spec: *spec, layout, weights })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Axis lengths, slowest first.
    pub fn shape(&self) -> Vec<usize> {
        match &self.layout {
            Layout::Torus { dims, angles } => vec![angles.len(); *dims],
            Layout::Su2 { theta, phi, psi, .. } => vec![theta.len(), phi.len(), psi.len()],
        }
    }

    pub(crate) fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn point(&self, index: usize) -> GroupPoint {
        match &self.layout {
            Layout::Torus { dims, angles } => {
                let n = angles.len();
                let mut coords = [0.0; 3];
                let mut rest = index;
                for axis in (0..*dims).rev() {
                    coords[axis] = angles[rest % n];
                    rest /= n;
                }
                GroupPoint::Torus(coords)
            }
            Layout::Su2 { theta, phi, psi, .. } => {
                let i_psi = index % psi.len();
                let i_phi = (index / psi.len()) % phi.len();
                let i_theta = index / (psi.len() * phi.len());
                GroupPoint::Su2 { phi: phi[i_phi], theta: theta[i_theta], psi: psi[i_psi] }
            }
        }
    }

    pub fn points(&self) -> Vec<GroupPoint> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Quadrature of real values against the normalized Haar measure.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        crate::sum::pairwise_sum_by(values.len(), &|i| self.weights[i] * values[i])
    }
}

fn check_size(total: usize, spec: &GroupSpec) -> Result<()> {
    if total > spec.max_grid_points {
        return Err(Error::GridTooLarge { points: total, limit: spec.max_grid_points });
    }
    Ok(())
}

/// Gauss-Legendre nodes (descending in x, so ascending in theta) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus1_band1_has_three_equal_weights() {
        let grid = QuadratureGrid::build(&GroupSpec::torus(1, 1).unwrap()).unwrap();
        assert_eq!(grid.len(), 3);
        for &w in grid.weights() {
            assert!((w - 1.0 / 3.0).abs() < 1e-16);
        }
    }

    #[test]
    fn su2_weights_are_normalized() {
        let grid = QuadratureGrid::build(&GroupSpec::su2(4).unwrap()).unwrap();
        let total = crate::sum::pairwise_sum(grid.weights());
        assert!((total - 1.0).abs() < 1e-14);
        assert_eq!(grid.shape(), vec![5, 9, 18]);
    }

    #[test]
    fn oversampling_scales_every_axis() {
        let spec = GroupSpec::su2(2).unwrap().with_oversampling(2.0).unwrap();
        assert_eq!(QuadratureGrid::build(&spec).unwrap().shape(), vec![6, 10, 20]);
        let spec = GroupSpec::torus(2, 3).unwrap().with_oversampling(1.5).unwrap();
        assert_eq!(QuadratureGrid::build(&spec).unwrap().shape(), vec![11, 11]);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        for degree in 0..12 {
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(degree)).sum();
            let exact = if degree % 2 == 1 { 0.0 } else { 2.0 / (degree as f64 + 1.0) };
            assert!((approx - exact).abs() < 1e-14, "degree {degree}");
        }
    }

    #[test]
    fn oversized_grid_is_a_resource_error() {
        let spec = GroupSpec::su2(40).unwrap().with_max_grid_points(1000);
        assert!(matches!(QuadratureGrid::build(&spec), Err(Error::GridTooLarge { .. })));
    }

    #[test]
    fn point_decoding_matches_layout() {
        let grid = QuadratureGrid::build(&GroupSpec::su2(1).unwrap()).unwrap();
        let shape = grid.shape();
        let idx = (shape[1] + 2) * shape[2] + 5;
        match grid.point(idx) {
            GroupPoint::Su2 { phi, psi, .. } => {
                assert!((phi - 2.0 * PI * 2.0 / shape[1] as f64).abs() < 1e-15);
                assert!((psi - 4.0 * PI * 5.0 / shape[2] as f64).abs() < 1e-15);
            }
            _ => unreachable!(),
        }
    }
}
