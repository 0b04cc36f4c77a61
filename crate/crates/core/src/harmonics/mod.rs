//! Fourier analysis on the torus `T^n` and on SU(2).
//!
//! The transform pair is
//!
//! ```text
//! f^(xi) = int f(x) xi(x)^* dx,      f(x) = sum_xi d_xi tr(xi(x) f^(xi)),
//! ```
//!
//! with `dx` the normalized Haar measure, so constants have unit norm and the
//! trivial coefficient of a field is its mean. Coefficients above the band
//! limit are discarded by [`GroupHarmonics::forward`].

mod diagnostics;
mod field;
mod grid;
mod group;
mod transform;
pub mod wigner;

pub use diagnostics::{check_transforms, TransformCheck};
pub use field::{Dual, GridField, SpectralField};
pub use grid::{gauss_legendre, GroupPoint, QuadratureGrid};
pub use group::{enumerate_irreps, BandKey, GroupKind, GroupSpec, Irrep, IrrepLabel, DEFAULT_MAX_GRID_POINTS};
pub use transform::{rep_matrix, spin_half_character, GroupHarmonics};
pub use wigner::wigner_d;

/// `||f||_{L^2}^2 = sum_xi d_xi ||f^(xi)||_HS^2`.
pub fn plancherel_norm_sq(field: &SpectralField) -> f64 {
    field.weighted_mass(0.0)
}

/// Homogeneous and inhomogeneous Sobolev norms of a spectral field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevNorms {
    /// `||(-L)^(s/2) f||^2 = sum_xi d_xi lambda_xi^(2s) ||f^(xi)||_HS^2`.
    pub homogeneous_sq: f64,
    /// `||f||_{L^2} + ||(-L)^(s/2) f||_{L^2}`.
    pub full: f64,
}

pub fn sobolev_norm_sq(field: &SpectralField, s: f64) -> SobolevNorms {
    let homogeneous_sq = if s == 0.0 { plancherel_norm_sq(field) } else { field.weighted_mass(s) };
    SobolevNorms { homogeneous_sq, full: plancherel_norm_sq(field).sqrt() + homogeneous_sq.sqrt() }
}

/// Irrep table as CSV (`label,dim,eigenvalue`).
pub fn irreps_csv(dual: &Dual) -> String {
    let mut out = String::from("label,dim,eigenvalue\n");
    for irrep in dual.irreps() {
        out.push_str(&format!("\"{}\",{},{}\n", irrep.label, irrep.dim, crate::csv::fmt_f64(irrep.eigenvalue)));
    }
    out
}

/// Quadrature grid as CSV (`index,x0,x1,x2,weight`); SU(2) coordinates are `phi,theta,psi`.
pub fn grid_csv(grid: &QuadratureGrid) -> String {
    let mut out = String::from("index,x0,x1,x2,weight\n");
    for (i, w) in grid.weights().iter().enumerate() {
        let c = match grid.point(i) {
            GroupPoint::Torus(x) => x,
            GroupPoint::Su2 { phi, theta, psi } => [phi, theta, psi],
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i,
            crate::csv::fmt_f64(c[0]),
            crate::csv::fmt_f64(c[1]),
            crate::csv::fmt_f64(c[2]),
            crate::csv::fmt_f64(*w)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn torus1(b: usize) -> GroupHarmonics {
        GroupHarmonics::new(&GroupSpec::torus(1, b).unwrap()).unwrap()
    }

    fn su2(b: usize) -> GroupHarmonics {
        GroupHarmonics::new(&GroupSpec::su2(b).unwrap()).unwrap()
    }

    fn index_of(h: &GroupHarmonics, label: IrrepLabel) -> usize {
        h.dual().irreps().iter().position(|i| i.label == label).unwrap()
    }

    #[test]
    fn constant_one_has_only_trivial_coefficient() {
        for h in [torus1(3), GroupHarmonics::new(&GroupSpec::torus(2, 2).unwrap()).unwrap(), su2(2)] {
            let f = GridField::sample(h.grid(), |_| c(1.0));
            let fhat = h.forward(&f).unwrap();
            assert!((fhat.data()[0] - c(1.0)).norm() < 1e-12);
            assert!(fhat.data()[1..].iter().all(|z| z.norm() < 1e-12));
            assert!((plancherel_norm_sq(&fhat) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cosine_on_circle() {
        let h = torus1(3);
        let f = GridField::sample(h.grid(), |p| match p {
            GroupPoint::Torus(x) => c(x[0].cos()),
            _ => unreachable!(),
        });
        let fhat = h.forward(&f).unwrap();
        let plus = index_of(&h, IrrepLabel::Torus(vec![1]));
        let minus = index_of(&h, IrrepLabel::Torus(vec![-1]));
        for (i, z) in fhat.data().iter().enumerate() {
            let expected = if i == plus || i == minus { 0.5 } else { 0.0 };
            assert!((z - c(expected)).norm() < 1e-12, "irrep {i}: {z}");
        }
        assert!((plancherel_norm_sq(&fhat) - 0.5).abs() < 1e-12);
        let sob = sobolev_norm_sq(&fhat, 1.0);
        assert!((sob.homogeneous_sq - 0.5).abs() < 1e-12);
        assert!((sob.full - 2.0 * 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn inverse_of_half_half_is_cosine() {
        let h = torus1(2);
        let mut fhat = SpectralField::zeros(h.dual());
        fhat.data_mut()[index_of(&h, IrrepLabel::Torus(vec![1]))] = c(0.5);
        fhat.data_mut()[index_of(&h, IrrepLabel::Torus(vec![-1]))] = c(0.5);
        let f = h.inverse(&fhat).unwrap();
        for (i, v) in f.values().iter().enumerate() {
            let x = 2.0 * PI * i as f64 / h.grid().len() as f64;
            assert!((v - c(x.cos())).norm() < 1e-13);
        }
    }

    #[test]
    fn trivial_only_field_inverts_to_constant() {
        let h = su2(2);
        let f = h.inverse(&SpectralField::constant(h.dual(), 2.5)).unwrap();
        assert!(f.values().iter().all(|v| (v - c(2.5)).norm() < 1e-13));
    }

    #[test]
    fn spin_half_character_transform() {
        let h = su2(2);
        let f = GridField::sample(h.grid(), |p| c(spin_half_character(p)));
        // Schur orthogonality on the grid: int |chi|^2 = 1
        assert!((f.l2_norm_sq() - 1.0).abs() < 1e-12);
        let fhat = h.forward(&f).unwrap();
        let half = index_of(&h, IrrepLabel::Spin { two_l: 1 });
        for (i, _) in h.dual().irreps().iter().enumerate() {
            let block = fhat.block(i);
            let dim = h.dual().irreps()[i].dim;
            for r in 0..dim {
                for col in 0..dim {
                    let expected = if i == half && r == col { 0.5 } else { 0.0 };
                    assert!((block[r * dim + col] - c(expected)).norm() < 1e-12);
                }
            }
        }
        assert!((plancherel_norm_sq(&fhat) - 1.0).abs() < 1e-12);
        assert!((sobolev_norm_sq(&fhat, 1.0).homogeneous_sq - 0.75).abs() < 1e-12);
    }

    #[test]
    fn constant_has_no_homogeneous_sobolev_mass() {
        let h = su2(1);
        let f = SpectralField::constant(h.dual(), 3.0);
        for s in [0.5, 1.0, 2.0] {
            assert_eq!(sobolev_norm_sq(&f, s).homogeneous_sq, 0.0);
        }
    }

    #[test]
    fn character_matches_representation_trace() {
        let h = su2(1);
        let half = index_of(&h, IrrepLabel::Spin { two_l: 1 });
        for i in [0, 7, 20, 35] {
            let p = h.grid().point(i);
            let m = h.rep_matrix(half, &p);
            let tr = m[0] + m[3];
            assert!((tr - c(spin_half_character(&p))).norm() < 1e-14);
        }
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let a = torus1(2);
        let b = torus1(3);
        let f = GridField::sample(a.grid(), |_| c(1.0));
        assert!(b.forward(&f).is_err());
        assert!(b.inverse(&SpectralField::zeros(a.dual())).is_err());
    }

    #[test]
    fn csv_dumps_have_headers() {
        let h = su2(1);
        let irreps = irreps_csv(h.dual());
        assert!(irreps.starts_with("label,dim,eigenvalue\n\"0\",1,"));
        assert_eq!(irreps.lines().count(), 4);
        assert_eq!(grid_csv(h.grid()).lines().count(), h.grid().len() + 1);
    }
}
