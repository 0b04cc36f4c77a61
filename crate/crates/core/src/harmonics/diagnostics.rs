use num_complex::Complex64;
use rayon::prelude::*;

use crate::data::{derive_seed, random_real, random_spectral};
use crate::error::Result;
use crate::harmonics::{plancherel_norm_sq, spin_half_character, GridField, GroupHarmonics, GroupKind};

/// Worst-case errors of the transform invariants on one group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformCheck {
    /// `max |forward(inverse(F)) - F|` over random band-limited fields.
    pub round_trip: f64,
    /// `max |inverse(forward(f)) - f|` over grid fields synthesized from band-limited data.
    pub synthesis: f64,
    /// `|plancherel(forward f) - sum w |f|^2|` over the same fields.
    pub plancherel: f64,
    /// `max |U U^* - I|` over every irrep and grid node.
    pub unitarity: f64,
    /// Schur orthogonality of the spin-1/2 character (SU(2) only).
    pub schur: Option<f64>,
}

impl TransformCheck {
    pub fn worst(&self) -> f64 {
        [self.round_trip, self.synthesis, self.plancherel, self.unitarity, self.schur.unwrap_or(0.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Runs the invariant suite with `trials` random fields derived from `seed`.
pub fn check_transforms(h: &GroupHarmonics, seed: u64, trials: usize) -> Result<TransformCheck> {
    let mut round_trip: f64 = 0.0;
    let mut synthesis: f64 = 0.0;
    let mut plancherel: f64 = 0.0;
    for trial in 0..trials as u64 {
        let f = random_spectral(h, derive_seed(seed, 2 * trial));
        let back = h.forward(&h.inverse(&f)?)?;
        round_trip = round_trip.max(nan_max(back.max_abs_diff(&f)?));

        let real = random_real(h, derive_seed(seed, 2 * trial + 1))?;
        let grid = h.inverse(&real)?;
        let spectral = h.forward(&grid)?;
        let again = h.inverse(&spectral)?;
        let diff = grid.values().iter().zip(again.values()).map(|(a, b)| (a - b).norm()).fold(0.0, nan_fold);
        synthesis = synthesis.max(diff);
        plancherel = plancherel.max(nan_max((plancherel_norm_sq(&spectral) - grid.l2_norm_sq()).abs()));
    }

    let dual = h.dual();
    let unitarity = (0..h.grid().len())
        .into_par_iter()
        .map(|x| {
            let mut worst: f64 = 0.0;
            for (i, irrep) in dual.irreps().iter().enumerate() {
                let u = h.rep_matrix_at(i, x);
                let dim = irrep.dim;
                for r in 0..dim {
                    for c in 0..dim {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..dim {
                            acc += u[r * dim + k] * u[c * dim + k].conj();
                        }
                        let target = if r == c { 1.0 } else { 0.0 };
                        worst = worst.max((acc - target).norm());
                    }
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    let schur = match h.spec().kind {
        GroupKind::Su2 => {
            let chi = GridField::sample(h.grid(), |p| Complex64::new(spin_half_character(p), 0.0));
            let fhat = h.forward(&chi)?;
            let mut worst = (chi.l2_norm_sq() - 1.0).abs();
            for (i, irrep) in dual.irreps().iter().enumerate() {
                let dim = irrep.dim;
                for r in 0..dim {
                    for c in 0..dim {
                        let target = if dim == 2 && r == c { 0.5 } else { 0.0 };
                        worst = worst.max((fhat.entry(i, r, c) - target).norm());
                    }
                }
            }
            Some(nan_max(worst))
        }
        GroupKind::Torus(_) => None,
    };

    Ok(TransformCheck { round_trip, synthesis, plancherel, unitarity, schur })
}

fn nan_max(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn nan_fold(acc: f64, v: f64) -> f64 {
    acc.max(nan_max(v))
}
