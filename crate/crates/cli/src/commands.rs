//! Subcommand bodies. Each returns the files to write and the checks that failed.

use std::sync::Arc;

use dampwave::blowup::{
    ode_lifespan_sweep, lifespan_sweep, sum_identity, sweep_csv, thresholds, verify_lower_bounds_on, BlowupSequences,
    SweepResult,
};
use dampwave::csv::{fmt_f64, write_table};
use dampwave::data::derive_seed;
use dampwave::harmonics::check_transforms;
use dampwave::propagator::{decay_report, geometric_times, partition_dual};
use dampwave::solver::Solver;
use dampwave::{Error, GroupHarmonics, GroupSpec};

use crate::config::{BoundsConfig, LinearDecayConfig, SolveSection, SweepConfig, TransformCheckConfig};

/// Everything a command produced.
#[derive(Debug, Default)]
pub struct Report {
    /// `(file name, contents)`, written to the output directory in order.
    pub files: Vec<(String, String)>,
    /// Key-value summary printed to stdout and stored in `summary.txt`.
    pub summary: Vec<(String, String)>,
    /// Tolerance checks that did not pass.
    pub failures: Vec<String>,
}

impl Report {
    fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.summary.push((key.into(), value.into()));
    }

    fn check(&mut self, ok: bool, what: String) {
        if !ok {
            self.failures.push(what);
        }
    }
}

pub fn key_values(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

pub fn transform_check(cfg: &TransformCheckConfig, seed: u64) -> Result<Report, Error> {
    let mut report = Report::default();
    if cfg.groups.is_empty() {
        return Err(Error::Config("transform_check.groups is empty".into()));
    }
    let mut rows = Vec::new();
    for (i, g) in cfg.groups.iter().enumerate() {
        let spec = if cfg.allow_underresolved {
            let spec = GroupSpec::unchecked(g.kind()?, g.bandwidth, g.oversampling);
            if !(g.oversampling > 0.0) {
                return Err(Error::Config(format!("oversampling must be positive, got {}", g.oversampling)));
            }
            spec
        } else {
            g.spec()?
        };
        let h = GroupHarmonics::new(&spec)?;
        let r = check_transforms(&h, derive_seed(seed, i as u64), cfg.trials.max(1))?;
        let name = format!("{}_b{}", g.group, g.bandwidth);
        report.note(format!("{name}.round_trip"), fmt_f64(r.round_trip));
        report.note(format!("{name}.synthesis"), fmt_f64(r.synthesis));
        report.note(format!("{name}.plancherel"), fmt_f64(r.plancherel));
        report.note(format!("{name}.unitarity"), fmt_f64(r.unitarity));
        if let Some(s) = r.schur {
            report.note(format!("{name}.schur"), fmt_f64(s));
        }
        let worst = r.worst();
        report.check(worst < cfg.tolerance, format!("{name}: worst error {worst:e} >= {:e}", cfg.tolerance));
        rows.push(vec![
            g.group.clone(),
            g.bandwidth.to_string(),
            fmt_f64(g.oversampling),
            fmt_f64(r.round_trip),
            fmt_f64(r.synthesis),
            fmt_f64(r.plancherel),
            fmt_f64(r.unitarity),
            r.schur.map(fmt_f64).unwrap_or_default(),
        ]);
    }
    report.files.push((
        "transform_check.csv".into(),
        write_table(
            &["group", "bandwidth", "oversampling", "round_trip", "synthesis", "plancherel", "unitarity", "schur"],
            rows,
        ),
    ));
    Ok(report)
}

pub fn linear_decay(cfg: &LinearDecayConfig, seed: u64) -> Result<Report, Error> {
    let mut report = Report::default();
    if cfg.points < 2 || cfg.refine == 0 || !(cfg.t_min > 0.0) || !(cfg.t_max > cfg.t_min) {
        return Err(Error::Config("need points >= 2, refine >= 1 and 0 < t_min < t_max".into()));
    }
    let h = GroupHarmonics::new(&cfg.group.spec()?)?;
    let u0 = cfg.u0.build(seed, 0)?.build(&h)?;
    let u1 = cfg.u1.build(seed, 1)?.build(&h)?;
    let times = geometric_times(cfg.t_min, cfg.t_max, cfg.points);
    let r = decay_report(&u0, &u1, &times)?;
    let (d1, d2) = partition_dual(h.dual().irreps(), cfg.partition_threshold);
    report.note("data_norm", fmt_f64(r.data_norm));
    for (i, c) in r.constants.iter().enumerate() {
        report.note(format!("C{}", i + 1), fmt_f64(*c));
    }
    report.note("low_frequency_irreps", d1.len().to_string());
    report.note("high_frequency_irreps", d2.len().to_string());
    report.note("mean_limit", fmt_f64((u0.data()[0] + u1.data()[0]).norm()));
    let fine = geometric_times(cfg.t_min, cfg.t_max, (cfg.points - 1) * cfg.refine + 1);
    let worst = r.worst_bound_ratio(&u0, &u1, &fine)?;
    report.note("fine_grid_worst_ratio", fmt_f64(worst));
    report.check(
        worst <= 1.0 + cfg.recheck_tolerance,
        format!("a norm exceeds its fitted bound by a factor {worst} on the finer grid"),
    );
    report.check(r.constants.iter().all(|c| c.is_finite()), "non-finite decay constant".into());
    report.files.push(("decay.csv".into(), r.to_csv()));
    Ok(report)
}

pub fn solve(cfg: &SolveSection, seed: u64) -> Result<Report, Error> {
    let mut report = Report::default();
    let solver = Solver::new(&cfg.build(seed)?)?;
    let traj = solver.solve()?;
    report.summary.extend(solver.config().describe());
    report.summary.extend(traj.summary());
    report.note("relative_energy_residual", fmt_f64(traj.relative_energy_residual()));
    report.files.push(("trajectory.csv".into(), traj.to_csv()));
    Ok(report)
}

pub fn lifespan_sweep_cmd(cfg: &SweepConfig, seed: u64) -> Result<Report, Error> {
    let mut report = Report::default();
    let base = cfg.solver.build(seed)?;
    let eps = cfg.epsilon_list();
    let p = base.p;
    let SweepResult { records, fit } = match cfg.model.as_str() {
        "pde" => lifespan_sweep(&base, &eps),
        "ode" => {
            let h = Arc::new(GroupHarmonics::new(&base.spec)?);
            let a0 = base.u0.build(&h)?.data()[0].re;
            let a1 = base.u1.build(&h)?.data()[0].re;
            ode_lifespan_sweep(p, (a0, a1), &eps, base.blowup_threshold, base.t_max)
        }
        other => return Err(Error::Config(format!("unknown sweep model '{other}' (expected pde or ode)"))),
    }
    .map_err(|e| match e {
        Error::Empty(m) => Error::Inconsistent(m.into()),
        other => other,
    })?;
    report.note("model", cfg.model.clone());
    report.note("p", fmt_f64(p));
    report.summary.extend(fit.describe());
    let target = -(p - 1.0);
    report.check(
        (fit.slope - target).abs() <= cfg.slope_tolerance * (p - 1.0),
        format!("slope {} outside {} +- {}", fit.slope, target, cfg.slope_tolerance * (p - 1.0)),
    );
    report.check(
        fit.compensated_ratio() < cfg.compensated_ratio_limit,
        format!("compensated lifespan ratio {} >= {}", fit.compensated_ratio(), cfg.compensated_ratio_limit),
    );
    report.check(fit.excluded.is_empty(), format!("{} runs did not blow up before t_max", fit.excluded.len()));
    report.files.push(("sweep.csv".into(), sweep_csv(&records, p)));
    report.files.push(("fit.txt".into(), key_values(&fit.describe())));
    Ok(report)
}

/// Reads the `t` and `U0` columns of a trajectory CSV.
fn read_trajectory(path: &str) -> Result<(Vec<f64>, Vec<f64>), Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let col = |name: &str| {
        header.iter().position(|h| *h == name).ok_or_else(|| Error::Config(format!("{path}: no '{name}' column")))
    };
    let (ti, ui) = (col("t")?, col("U0")?);
    let (mut t, mut u) = (Vec::new(), Vec::new());
    for (n, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let get = |i: usize| {
            fields
                .get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::Config(format!("{path}: bad value on data line {}", n + 1)))
        };
        t.push(get(ti)?);
        u.push(get(ui)?);
    }
    Ok((t, u))
}

pub fn bounds(cfg: &BoundsConfig) -> Result<Report, Error> {
    let mut report = Report::default();
    let th = thresholds(cfg.p, cfg.c_data).map_err(|e| Error::Config(e.to_string()))?;
    let eps = cfg.epsilon.unwrap_or_else(|| 0.05f64.min(th.epsilon0 / 2.0));
    let seqs = BlowupSequences::new(cfg.p, cfg.c_data, eps, cfg.depth).map_err(|e| match e {
        Error::OutOfRange(m) => Error::Config(m),
        other => other,
    })?;
    report.summary.extend(seqs.describe());
    let worst_identity = (1..=30)
        .map(|j| {
            let (l, r) = sum_identity(j, cfg.p);
            (l - r).abs() / l.abs()
        })
        .fold(0.0, f64::max);
    report.note("sum_identity_worst", fmt_f64(worst_identity));
    report.check(worst_identity < 1e-12, format!("sum identity off by {worst_identity:e}"));
    let margins = seqs.log_linear_margins(cfg.depth.min(30));
    let worst_margin = margins.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    if worst_margin.is_finite() {
        report.note("log_linear_min_margin", fmt_f64(worst_margin));
        report.check(worst_margin >= 0.0, format!("log C_j below p^j log(E0 eps) by {}", -worst_margin));
    }
    report.files.push(("sequences.csv".into(), seqs.to_csv()));
    report.files.push(("constants.txt".into(), key_values(&seqs.describe())));
    if let Some(path) = &cfg.trajectory {
        let (t, u) = read_trajectory(path)?;
        let lb = verify_lower_bounds_on(&t, &u, None, &seqs, cfg.j_max.min(cfg.depth))?;
        for w in &lb.warnings {
            report.note("warning", w.clone());
        }
        for row in &lb.rows {
            report.check(row.passed, format!("lower bound j = {} violated (min slack {:?})", row.j, row.min_slack));
        }
        report.files.push(("lower_bounds.csv".into(), lb.to_csv()));
    }
    Ok(report)
}
