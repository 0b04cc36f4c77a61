use std::f64::consts::PI;

use dampwave::data::{random_real, random_spectral};
use dampwave::harmonics::{
    check_transforms, plancherel_norm_sq, GridField, GroupHarmonics, GroupKind, GroupPoint, GroupSpec,
    SpectralField,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn harmonics(kind: GroupKind, b: usize, os: f64) -> GroupHarmonics {
    GroupHarmonics::new(&GroupSpec::new(kind, b, os).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn round_trip_is_identity_on_band_limited_fields(
        seed in any::<u64>(),
        kind in prop_oneof![Just(GroupKind::Torus(1)), Just(GroupKind::Torus(2)), Just(GroupKind::Torus(3)), Just(GroupKind::Su2)],
        b in 1usize..5,
        os in prop_oneof![Just(1.0), Just(1.5), Just(2.0)],
    ) {
        let h = harmonics(kind, b, os);
        let f = random_spectral(&h, seed);
        let back = h.forward(&h.inverse(&f).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&f).unwrap() < 1e-10);
    }

    #[test]
    fn plancherel_holds_for_synthesized_fields(seed in any::<u64>(), b in 1usize..5) {
        for kind in [GroupKind::Torus(2), GroupKind::Su2] {
            let h = harmonics(kind, b, 1.0);
            let g = h.inverse(&random_real(&h, seed).unwrap()).unwrap();
            let fhat = h.forward(&g).unwrap();
            prop_assert!((plancherel_norm_sq(&fhat) - g.l2_norm_sq()).abs() < 1e-10);
        }
    }
}

#[test]
fn plancherel_holds_for_arbitrary_grid_values_on_critically_sampled_torus() {
    // with 2B+1 points per axis the torus transform is a unitary DFT
    let h = harmonics(GroupKind::Torus(2), 5, 1.0);
    let values: Vec<Complex64> =
        (0..h.grid().len()).map(|i| Complex64::new(((i * 7919) % 113) as f64 / 50.0 - 1.0, (i % 5) as f64)).collect();
    let f = GridField::new(h.grid(), values).unwrap();
    let fhat = h.forward(&f).unwrap();
    assert!((plancherel_norm_sq(&fhat) - f.l2_norm_sq()).abs() < 1e-10);
}

#[test]
fn invariant_suite_passes_at_moderate_bands() {
    for (kind, b) in [(GroupKind::Torus(1), 16), (GroupKind::Torus(2), 8), (GroupKind::Su2, 6)] {
        let report = check_transforms(&harmonics(kind, b, 1.0), 3, 2).unwrap();
        assert!(report.worst() < 1e-10, "{kind}: {report:?}");
    }
}

#[test]
fn under_resolved_grid_breaks_exactness() {
    let spec = GroupSpec::unchecked(GroupKind::Torus(2), 6, 0.5);
    let report = check_transforms(&GroupHarmonics::new(&spec).unwrap(), 3, 2).unwrap();
    assert!(report.round_trip > 1e-3);
}

/// `(f * g)(x) = int f(y) g(y^-1 x) dy` evaluated by quadrature, with `g`
/// given spectrally so that `g(y^-1 x) = sum d tr(xi(y)^* xi(x) g^)`.
fn convolve(h: &GroupHarmonics, f: &GridField, g: &SpectralField) -> GridField {
    let n = h.grid().len();
    let irreps = h.dual().irreps();
    let reps: Vec<Vec<Vec<Complex64>>> =
        (0..n).map(|x| (0..irreps.len()).map(|i| h.rep_matrix_at(i, x)).collect()).collect();
    let w = h.grid().weights();
    let values = (0..n)
        .map(|x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..n {
                let mut gval = Complex64::new(0.0, 0.0);
                for (i, irrep) in irreps.iter().enumerate() {
                    let d = irrep.dim;
                    let (ry, rx, gb) = (&reps[y][i], &reps[x][i], g.block(i));
                    // tr(A^* B G) = sum_{a,b,c} conj(A_ba) B_bc G_ca
                    for a in 0..d {
                        for b in 0..d {
                            let ab = ry[b * d + a].conj();
                            for c in 0..d {
                                gval += ab * rx[b * d + c] * gb[c * d + a] * d as f64;
                            }
                        }
                    }
                }
                acc += f.values()[y] * gval * w[y];
            }
            acc
        })
        .collect();
    GridField::new(h.grid(), values).unwrap()
}

#[test]
fn convolution_diagonalizes() {
    for (kind, b) in [(GroupKind::Torus(2), 2), (GroupKind::Su2, 2)] {
        // band B + B products must be integrated exactly, hence oversampling 2
        let h = harmonics(kind, b, 2.0);
        let fhat = random_spectral(&h, 1);
        let ghat = random_spectral(&h, 2);
        let f = h.inverse(&fhat).unwrap();
        let conv = h.forward(&convolve(&h, &f, &ghat)).unwrap();
        for (i, irrep) in h.dual().irreps().iter().enumerate() {
            let d = irrep.dim;
            for r in 0..d {
                for c in 0..d {
                    let expected: Complex64 = (0..d).map(|k| ghat.entry(i, r, k) * fhat.entry(i, k, c)).sum();
                    let err = (conv.entry(i, r, c) - expected).norm();
                    assert!(err < 1e-8, "{kind} irrep {i} ({r},{c}): {err}");
                }
            }
        }
    }
}

/// Five-point second difference summed over axes on the periodic grid.
fn fd_laplacian(values: &[f64], n: usize, dims: usize) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    let strides: Vec<usize> = (0..dims).map(|a| n.pow((dims - 1 - a) as u32)).collect();
    (0..values.len())
        .map(|i| {
            let mut total = 0.0;
            for &s in &strides {
                let coord = (i / s) % n;
                let up = i - coord * s + ((coord + 1) % n) * s;
                let down = i - coord * s + ((coord + n - 1) % n) * s;
                total += (values[up] - 2.0 * values[i] + values[down]) / (h * h);
            }
            total
        })
        .collect()
}

#[test]
fn finite_difference_laplacian_converges_to_spectral_symbol() {
    let smooth = |p: &GroupPoint| match p {
        GroupPoint::Torus(x) => (x[0].sin() + 0.5 * (2.0 * x[1]).cos()).exp(),
        _ => unreachable!(),
    };
    let mut errors = Vec::new();
    for b in [12, 24] {
        let h = harmonics(GroupKind::Torus(2), b, 2.0);
        let f = GridField::sample(h.grid(), |p| Complex64::new(smooth(p), 0.0));
        let spectral = h.forward(&f).unwrap().map_by_eigenvalue(|lam2, c| c * -lam2);
        let exact = h.inverse(&spectral).unwrap().real_parts();
        let n = h.grid().shape()[0];
        let fd = fd_laplacian(&f.real_parts(), n, 2);
        errors.push(fd.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    let ratio = errors[0] / errors[1];
    assert!(errors[1] < 0.05, "{errors:?}");
    // second order: doubling the points divides the error by ~4
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn inverse_of_real_data_is_real() {
    let h = harmonics(GroupKind::Su2, 4, 1.0);
    let f = random_real(&h, 99).unwrap();
    assert!(h.inverse(&f).unwrap().max_imag() < 1e-10);
    let h = harmonics(GroupKind::Torus(3), 2, 1.0);
    let f = random_real(&h, 99).unwrap();
    // torus reality constraint: f^(-k) = conj f^(k)
    let irreps = h.dual().irreps();
    for (i, irrep) in irreps.iter().enumerate() {
        if let dampwave::harmonics::IrrepLabel::Torus(k) = &irrep.label {
            let neg: Vec<i32> = k.iter().map(|v| -v).collect();
            let j = irreps.iter().position(|o| o.label == dampwave::harmonics::IrrepLabel::Torus(neg.clone())).unwrap();
            assert!((f.data()[i] - f.data()[j].conj()).norm() < 1e-12);
        }
    }
}
