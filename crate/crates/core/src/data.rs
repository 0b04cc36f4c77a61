//! Initial data and seeded random fields.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::harmonics::{GridField, GroupHarmonics, IrrepLabel, SpectralField};

/// SplitMix64 finalizer applied to `base + (index + 1) * golden`.
///
/// Expands one user seed into independent per-run seeds; run `i` of a sweep
/// always gets `derive_seed(seed, i)` no matter how runs are scheduled.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add((index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Named initial-data shapes. All of them describe real-valued functions.
#[derive(Debug, Clone, PartialEq)]
pub enum DataPreset {
    Zero,
    /// `f = 1`.
    Constant,
    /// Trivial coefficient 1 plus the lowest nonzero irreps with positive
    /// coefficients: `1 + (1/n) sum_i cos x_i` on `T^n`, `1 + chi_{1/2}/2`
    /// on SU(2). Both are nonnegative everywhere.
    TrivialPlusLowest,
    /// Seeded random real band-limited field shifted up by its grid minimum,
    /// so it is nonnegative at every grid point.
    RandomNonneg { seed: u64 },
    /// Seeded random real band-limited field with mean-zero fluctuations
    /// around a unit mean.
    RandomReal { seed: u64 },
    /// Explicit coefficients `(irrep index, row, col, value)`; every other
    /// coefficient is zero.
    Literal(Vec<(usize, usize, usize, Complex64)>),
}

/// A preset scaled by an amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub preset: DataPreset,
    pub amplitude: f64,
}

impl InitialData {
    pub fn new(preset: DataPreset, amplitude: f64) -> Self {
        Self { preset, amplitude }
    }

    pub fn zero() -> Self {
        Self::new(DataPreset::Zero, 0.0)
    }

    pub fn build(&self, h: &GroupHarmonics) -> Result<SpectralField> {
        Ok(self.preset.build(h)?.scaled(self.amplitude))
    }
}

impl DataPreset {
    pub fn build(&self, h: &GroupHarmonics) -> Result<SpectralField> {
        let dual = h.dual();
        match self {
            DataPreset::Zero => Ok(SpectralField::zeros(dual)),
            DataPreset::Constant => Ok(SpectralField::constant(dual, 1.0)),
            DataPreset::TrivialPlusLowest => {
                let mut f = SpectralField::constant(dual, 1.0);
                let irreps = dual.irreps();
                match &irreps[1].label {
                    IrrepLabel::Torus(k) => {
                        let n = k.len() as f64;
                        for (i, irrep) in irreps.iter().enumerate().skip(1) {
                            if irrep.eigenvalue == 1.0 {
                                f.data_mut()[dual.offset(i)] = Complex64::new(0.5 / n, 0.0);
                            }
                        }
                    }
                    IrrepLabel::Spin { .. } => {
                        f.set_entry(1, 0, 0, Complex64::new(0.25, 0.0));
                        f.set_entry(1, 1, 1, Complex64::new(0.25, 0.0));
                    }
                }
                Ok(f)
            }
            DataPreset::RandomReal { seed } => {
                let mut f = random_real(h, *seed)?;
                f.data_mut()[0] = Complex64::new(1.0, 0.0);
                Ok(f)
            }
            DataPreset::RandomNonneg { seed } => {
                let mut f = random_real(h, *seed)?;
                let grid = h.inverse(&f)?;
                let min = grid.values().iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
                f.data_mut()[0] -= Complex64::new(min.min(0.0), 0.0);
                Ok(f)
            }
            DataPreset::Literal(entries) => {
                let mut f = SpectralField::zeros(dual);
                for &(irrep, row, col, value) in entries {
                    let dim = dual
                        .irreps()
                        .get(irrep)
                        .ok_or_else(|| Error::Config(format!("literal refers to irrep {irrep}, band has {}", dual.irreps().len())))?
                        .dim;
                    if row >= dim || col >= dim {
                        return Err(Error::Config(format!("literal entry ({row},{col}) outside a {dim}x{dim} block")));
                    }
                    f.set_entry(irrep, row, col, value);
                }
                Ok(f)
            }
        }
    }
}

/// Uniform random complex coefficients in the unit square, every irrep.
pub fn random_spectral(h: &GroupHarmonics, seed: u64) -> SpectralField {
    let mut r = rng(seed);
    let mut f = SpectralField::zeros(h.dual());
    for c in f.data_mut() {
        *c = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    }
    f
}

/// Random real band-limited field: the real part of [`random_spectral`],
/// with coefficients damped by `1 / (1 + lambda^2)`.
pub fn random_real(h: &GroupHarmonics, seed: u64) -> Result<SpectralField> {
    let f = random_spectral(h, seed).map_by_eigenvalue(|lam2, c| c / (1.0 + lam2));
    real_part(h, &f)
}

/// Projects a spectral field onto real-valued functions via the grid.
pub fn real_part(h: &GroupHarmonics, f: &SpectralField) -> Result<SpectralField> {
    let grid = h.inverse(f)?;
    let real = GridField::from_real(h.grid(), &grid.real_parts())?;
    h.forward(&real)
}
