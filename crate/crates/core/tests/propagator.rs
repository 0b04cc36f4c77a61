use dampwave::data::random_real;
use dampwave::ode::{integrate, OdeOptions};
use dampwave::propagator::*;
use dampwave::{plancherel_norm_sq, GroupHarmonics, GroupSpec, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;

fn reference(lam2: f64, w0: f64, w1: f64, t: f64) -> [f64; 2] {
    let f = |_: f64, y: &[f64; 2]| [y[1], -y[1] - lam2 * y[0]];
    integrate(f, 0.0, [w0, w1], t, &OdeOptions { rtol: 1e-13, atol: 1e-16, ..OdeOptions::default() }).unwrap()
}

#[test]
fn mode_matches_ode_integration() {
    for lam2 in [0.0, 0.1, 0.25, 0.2500001, 1.0, 25.0, 400.0] {
        for t in [0.1, 1.0, 10.0] {
            for (w0, w1) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
                let got = propagate_mode(ModeState::new(Complex64::new(w0, 0.0), Complex64::new(w1, 0.0), lam2), t);
                let want = reference(lam2, w0, w1, t);
                let scale = want[0].abs().max(want[1].abs());
                assert!((got.u_hat.re - want[0]).abs() <= 1e-8 * scale, "lam2={lam2} t={t}");
                assert!((got.v_hat.re - want[1]).abs() <= 1e-8 * scale, "lam2={lam2} t={t}");
            }
        }
    }
}

#[test]
fn single_mode_excitation_stays_single() {
    let h = GroupHarmonics::new(&GroupSpec::torus(1, 4).unwrap()).unwrap();
    let k1 = h.dual().irreps().iter().position(|i| i.eigenvalue == 1.0).unwrap();
    let mut u = SpectralField::zeros(h.dual());
    u.data_mut()[k1] = Complex64::new(1.0, 0.0);
    let state = FieldState::new(u, SpectralField::zeros(h.dual())).unwrap();
    let out = propagate_field(&state, 2.5);
    for (i, z) in out.u.data().iter().enumerate() {
        if i != k1 {
            assert_eq!(*z, Complex64::new(0.0, 0.0));
        }
    }
    assert_eq!(out.time, 2.5);
}

#[test]
fn long_time_limit_keeps_only_the_mean() {
    let h = GroupHarmonics::new(&GroupSpec::su2(3).unwrap()).unwrap();
    let u0 = random_real(&h, 1).unwrap();
    let u1 = random_real(&h, 2).unwrap();
    let out = propagate_field(&FieldState::new(u0.clone(), u1.clone()).unwrap(), 60.0);
    let limit = u0.data()[0] + u1.data()[0];
    assert!((out.u.data()[0] - limit).norm() < 1e-10);
    for z in &out.u.data()[1..] {
        assert!(z.norm() < 1e-10);
    }
}

#[test]
fn decay_report_examples() {
    let h = GroupHarmonics::new(&GroupSpec::torus(2, 4).unwrap()).unwrap();
    let zero = SpectralField::zeros(h.dual());
    let mean = SpectralField::constant(h.dual(), 1.0);
    let times = geometric_times(0.1, 100.0, 60);

    let r = decay_report(&mean, &mean, &times).unwrap();
    assert!(r.hdot1_u.iter().all(|&x| x == 0.0));

    let r = decay_report(&zero, &mean, &times).unwrap();
    for (t, v) in r.times.iter().zip(&r.l2_ut) {
        assert!((v - (-t).exp()).abs() < 1e-14);
    }
    // sup (1+t) e^{-t} over the sampled times, attained near t = 0
    assert!(r.constants[2].is_finite() && r.constants[2] <= 1.0);

    let u0 = random_real(&h, 11).unwrap();
    let u1 = random_real(&h, 12).unwrap();
    let r = decay_report(&u0, &u1, &times).unwrap();
    let longer = decay_report(&u0, &u1, &extend_geometric(&times, 200.0)).unwrap();
    for (a, b) in r.constants.iter().zip(&longer.constants) {
        assert!(a.is_finite() && (b - a).abs() / a < 0.05);
    }
    assert!(r.to_csv().starts_with("t,l2_u,hdot1_u,l2_ut,bound1,bound2,bound3\n"));
    assert!(decay_report(&u0, &u1, &[]).is_err());
}

#[test]
fn energy_never_increases() {
    let h = GroupHarmonics::new(&GroupSpec::su2(2).unwrap()).unwrap();
    let state = FieldState::new(random_real(&h, 3).unwrap(), random_real(&h, 4).unwrap()).unwrap();
    let energy = |s: &FieldState| {
        plancherel_norm_sq(&s.v) + dampwave::sobolev_norm_sq(&s.u, 1.0).homogeneous_sq
    };
    let mut last = energy(&state);
    for i in 1..50 {
        let e = energy(&propagate_field(&state, 0.2 * i as f64));
        assert!(e <= last * (1.0 + 1e-12));
        last = e;
    }
}

proptest! {
    #[test]
    fn semigroup(lam2 in 0.0f64..50.0, s in 0.0f64..5.0, t in 0.0f64..5.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let m = ModeState::new(Complex64::new(a, b), Complex64::new(b, -a), lam2);
        let x = propagate_mode(propagate_mode(m, s), t);
        let y = propagate_mode(m, s + t);
        prop_assert!((x.u_hat - y.u_hat).norm() < 1e-10);
        prop_assert!((x.v_hat - y.v_hat).norm() < 1e-10);
    }

    #[test]
    fn bounded_by_data(lam2 in 0.0f64..1e4, t in 0.0f64..200.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let m = propagate_mode(ModeState::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0), lam2), t);
        prop_assert!(m.u_hat.norm() <= 3.0 * (a.abs() + b.abs()) + 1e-300);
    }

    #[test]
    fn continuous_through_the_critical_frequency(t in 0.0f64..50.0, eta in 1e-12f64..1e-9) {
        for lam2 in [0.25 - eta, 0.25 + eta] {
            let (a, b) = (Multipliers::new(t, lam2), Multipliers::new(t, 0.25));
            prop_assert!((a.damped_g0 - b.damped_g0).abs() < 1e-7);
            prop_assert!((a.damped_g1 - b.damped_g1).abs() < 1e-7);
        }
    }
}
