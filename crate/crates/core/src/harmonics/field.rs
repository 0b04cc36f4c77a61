use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonics::group::{enumerate_irreps, BandKey, GroupSpec, Irrep};
use crate::harmonics::grid::QuadratureGrid;
use crate::sum::pairwise_sum_by;

/// The truncated unitary dual with a flat coefficient layout.
///
/// Coefficients of all irreps are stored back to back, each block row-major
/// of size `dim * dim`, in the order of [`enumerate_irreps`].
#[derive(Debug, Clone)]
pub struct Dual {
    key: BandKey,
    irreps: Vec<Irrep>,
    offsets: Vec<usize>,
    len: usize,
}

impl Dual {
    pub fn new(spec: &GroupSpec) -> Self {
        let irreps = enumerate_irreps(spec);
        let mut offsets = Vec::with_capacity(irreps.len());
        let mut len = 0;
        for irrep in &irreps {
            offsets.push(len);
            len += irrep.dim * irrep.dim;
        }
        Self { key: spec.band_key(), irreps, offsets, len }
    }

    pub fn key(&self) -> BandKey {
        self.key
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    /// Total number of complex coefficients.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn offset(&self, irrep: usize) -> usize {
        self.offsets[irrep]
    }

    pub fn block_range(&self, irrep: usize) -> std::ops::Range<usize> {
        let start = self.offsets[irrep];
        start..start + self.irreps[irrep].dim.pow(2)
    }

    /// Index of the trivial representation (always the first).
    pub fn trivial(&self) -> usize {
        0
    }
}

/// Fourier coefficients `f^(xi)` over a truncated dual.
#[derive(Debug, Clone)]
pub struct SpectralField {
    dual: Arc<Dual>,
    data: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(dual: &Arc<Dual>) -> Self {
        Self { dual: Arc::clone(dual), data: vec![Complex64::new(0.0, 0.0); dual.len()] }
    }

    pub fn from_data(dual: &Arc<Dual>, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dual.len() {
            return Err(Error::Mismatch(format!(
                "expected {} coefficients for {}, got {}",
                dual.len(),
                dual.key(),
                data.len()
            )));
        }
        Ok(Self { dual: Arc::clone(dual), data })
    }

    /// Field whose only nonzero block is the trivial one, holding `value`.
    pub fn constant(dual: &Arc<Dual>, value: f64) -> Self {
        let mut field = Self::zeros(dual);
        field.data[0] = Complex64::new(value, 0.0);
        field
    }

    pub fn dual(&self) -> &Arc<Dual> {
        &self.dual
    }

    pub fn irreps(&self) -> &[Irrep] {
        self.dual.irreps()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn block(&self, irrep: usize) -> &[Complex64] {
        &self.data[self.dual.block_range(irrep)]
    }

    pub fn block_mut(&mut self, irrep: usize) -> &mut [Complex64] {
        let range = self.dual.block_range(irrep);
        &mut self.data[range]
    }

    pub fn entry(&self, irrep: usize, row: usize, col: usize) -> Complex64 {
        let dim = self.dual.irreps[irrep].dim;
        self.block(irrep)[row * dim + col]
    }

    pub fn set_entry(&mut self, irrep: usize, row: usize, col: usize, value: Complex64) {
        let dim = self.dual.irreps[irrep].dim;
        self.block_mut(irrep)[row * dim + col] = value;
    }

    pub fn is_compatible(&self, other: &SpectralField) -> bool {
        Arc::ptr_eq(&self.dual, &other.dual) || self.dual.key() == other.dual.key()
    }

    pub(crate) fn ensure_compatible(&self, other: &SpectralField) -> Result<()> {
        if self.is_compatible(other) {
            Ok(())
        } else {
            Err(Error::Mismatch(format!("{} vs {}", self.dual.key(), other.dual.key())))
        }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &SpectralField) -> Result<()> {
        self.ensure_compatible(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * alpha;
        }
        Ok(())
    }

    pub fn scaled(&self, alpha: f64) -> SpectralField {
        SpectralField { dual: Arc::clone(&self.dual), data: self.data.iter().map(|c| c * alpha).collect() }
    }

    pub fn max_abs_diff(&self, other: &SpectralField) -> Result<f64> {
        self.ensure_compatible(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Applies `f(eigenvalue, coefficient)` to every coefficient.
    pub fn map_by_eigenvalue(&self, f: impl Fn(f64, Complex64) -> Complex64) -> SpectralField {
        let mut out = self.clone();
        for (i, irrep) in self.dual.irreps.iter().enumerate() {
            for c in out.block_mut(i) {
                *c = f(irrep.eigenvalue, *c);
            }
        }
        out
    }

    /// `sum_xi d_xi lambda_xi^(2s) ||f^(xi)||_HS^2`, with `lambda^0 = 1` on the trivial irrep.
    pub(crate) fn weighted_mass(&self, s: f64) -> f64 {
        let irreps = &self.dual.irreps;
        pairwise_sum_by(irreps.len(), &|i| {
            let irrep = &irreps[i];
            let weight = if s == 0.0 { 1.0 } else { irrep.eigenvalue.powf(s) };
            if weight == 0.0 {
                return 0.0;
            }
            let block = self.block(i);
            let hs = pairwise_sum_by(block.len(), &|k| block[k].norm_sqr());
            irrep.dim as f64 * weight * hs
        })
    }
}

/// Function values at the nodes of a quadrature grid.
#[derive(Debug, Clone)]
pub struct GridField {
    grid: Arc<QuadratureGrid>,
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(grid: &Arc<QuadratureGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "grid has {} points but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid: Arc::clone(grid), values })
    }

    pub fn from_real(grid: &Arc<QuadratureGrid>, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f` at every grid point.
    pub fn sample(grid: &Arc<QuadratureGrid>, f: impl Fn(&crate::harmonics::GroupPoint) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self { grid: Arc::clone(grid), values }
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.re).collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// `int |f|^2 dx` by quadrature.
    pub fn l2_norm_sq(&self) -> f64 {
        let w = self.grid.weights();
        pairwise_sum_by(self.values.len(), &|i| w[i] * self.values[i].norm_sqr())
    }

    /// `(int |f|^q dx)^(1/q)` by quadrature.
    pub fn lq_norm(&self, q: f64) -> f64 {
        let w = self.grid.weights();
        pairwise_sum_by(self.values.len(), &|i| w[i] * self.values[i].norm().powf(q)).powf(1.0 / q)
    }

    pub fn mean(&self) -> Complex64 {
        let w = self.grid.weights();
        let re = pairwise_sum_by(self.values.len(), &|i| w[i] * self.values[i].re);
        let im = pairwise_sum_by(self.values.len(), &|i| w[i] * self.values[i].im);
        Complex64::new(re, im)
    }
}
