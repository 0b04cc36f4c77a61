use dampwave::blowup::scalar_blowup_time;
use dampwave::data::random_real;
use dampwave::solver::*;
use dampwave::{DataPreset, GroupHarmonics, GroupSpec, InitialData};
use proptest::prelude::*;

fn constant(spec: GroupSpec, p: f64, eps: f64, dt: f64, t_max: f64) -> SolveConfig {
    let one = InitialData::new(DataPreset::Constant, 1.0);
    SolveConfig::new(spec, p, eps, one.clone(), one, dt, t_max)
}

#[test]
fn blowup_time_matches_scalar_oracle_on_su2() {
    let cfg = constant(GroupSpec::su2(2).unwrap(), 2.0, 0.5, 1e-3, 10.0);
    let t = solve(&cfg).unwrap().t_num.unwrap();
    let reference = scalar_blowup_time(2.0, 0.5, 0.5, 1e8, 10.0).unwrap().unwrap();
    assert!(((t - reference) / reference).abs() < 0.01, "{t} vs {reference}");
}

#[test]
fn oversampling_barely_moves_blowup_time() {
    let data = InitialData::new(DataPreset::TrivialPlusLowest, 1.0);
    let base = SolveConfig::new(GroupSpec::torus(1, 4).unwrap(), 2.0, 0.5, data.clone(), data, 1e-3, 20.0);
    let a = solve(&base).unwrap().t_num.unwrap();
    let fine = SolveConfig { spec: base.spec.with_oversampling(4.0).unwrap(), ..base };
    let b = solve(&fine).unwrap().t_num.unwrap();
    assert!(((a - b) / a).abs() < 0.005, "{a} vs {b}");
}

#[test]
fn energy_residual_is_second_order() {
    let data = InitialData::new(DataPreset::TrivialPlusLowest, 1.0);
    let r: Vec<f64> = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| {
            let cfg = SolveConfig::new(GroupSpec::su2(2).unwrap(), 2.0, 0.5, data.clone(), data.clone(), dt, 1.0);
            solve(&cfg).unwrap().energy_residual().iter().fold(0.0f64, |m, x| m.max(x.abs()))
        })
        .collect();
    assert!((r[0] / r[1]).log2() >= 2.0 && (r[1] / r[2]).log2() >= 2.0, "{r:?}");
}

#[test]
fn trajectory_csv_layout() {
    let traj = solve(&constant(GroupSpec::torus(1, 2).unwrap(), 2.0, 0.1, 0.1, 0.3)).unwrap();
    let csv = traj.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,U0,l2_u,hdot1_u,l2_ut");
    assert_eq!(lines.len(), 1 + traj.times.len());
    assert!(lines[1].starts_with("0.0000000000000000e0,1.0000000000000001e-1,"));
}

#[test]
fn gn_ratio_is_bounded_over_random_fields() {
    let h = GroupHarmonics::new(&GroupSpec::su2(4).unwrap()).unwrap();
    let ratios: Vec<f64> = (0..200).map(|s| gn_ratio(&h, &random_real(&h, s).unwrap(), 3.0, 3).unwrap()).collect();
    let first = ratios[..100].iter().copied().fold(0.0, f64::max);
    let all = ratios.iter().copied().fold(0.0, f64::max);
    assert!(all.is_finite() && all < 2.0 && (all - first) / first < 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn jensen_holds_along_trajectories(seed in 0u64..1000, p in prop::sample::select(vec![1.5, 2.0, 3.0])) {
        let data = InitialData::new(DataPreset::RandomReal { seed }, 1.0);
        let cfg = SolveConfig::new(GroupSpec::torus(2, 3).unwrap(), p, 0.3, data.clone(), data, 0.01, 0.5);
        let traj = solve(&cfg).unwrap();
        for (m, u) in traj.source_means.iter().zip(&traj.u0_values) {
            prop_assert!(*m >= u.abs().powf(p) - 1e-12);
        }
    }
}
