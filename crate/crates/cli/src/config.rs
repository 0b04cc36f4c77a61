//! Run configuration: one TOML table per subcommand. Every key is optional
//! and unknown keys are rejected.

use dampwave::data::derive_seed;
use dampwave::{DataPreset, Error, GroupKind, GroupSpec, InitialData, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub transform_check: TransformCheckConfig,
    pub linear_decay: LinearDecayConfig,
    pub solve: SolveSection,
    pub lifespan_sweep: SweepConfig,
    pub bounds: BoundsConfig,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: Option<&std::path::Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    /// `torus1`, `torus2`, `torus3` or `su2`.
    pub group: String,
    pub bandwidth: usize,
    #[serde(default = "default_oversampling")]
    pub oversampling: f64,
}

fn default_oversampling() -> f64 {
    2.0
}

impl GroupConfig {
    pub fn new(group: &str, bandwidth: usize) -> Self {
        Self { group: group.into(), bandwidth, oversampling: default_oversampling() }
    }

    pub fn kind(&self) -> Result<GroupKind> {
        match self.group.as_str() {
            "torus1" => Ok(GroupKind::Torus(1)),
            "torus2" => Ok(GroupKind::Torus(2)),
            "torus3" => Ok(GroupKind::Torus(3)),
            "su2" => Ok(GroupKind::Su2),
            other => Err(Error::Config(format!("unknown group '{other}' (expected torus1, torus2, torus3 or su2)"))),
        }
    }

    pub fn spec(&self) -> Result<GroupSpec> {
        GroupSpec::new(self.kind()?, self.bandwidth, self.oversampling).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformCheckConfig {
    pub groups: Vec<GroupConfig>,
    pub trials: usize,
    pub tolerance: f64,
    /// Accept `oversampling < 1` (under-resolved grids, for negative checks).
    pub allow_underresolved: bool,
}

impl Default for TransformCheckConfig {
    fn default() -> Self {
        Self {
            groups: vec![GroupConfig::new("torus2", 8), GroupConfig::new("su2", 8)],
            trials: 3,
            tolerance: 1e-10,
            allow_underresolved: false,
        }
    }
}

/// Initial data for one of `u0`, `u1`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// `zero`, `constant`, `trivial-plus-lowest`, `random-nonneg`, `random-real` or `literal`.
    pub preset: String,
    pub amplitude: f64,
    /// `[irrep, row, col, re, im]` entries for the `literal` preset.
    pub literal: Vec<[f64; 5]>,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self::preset("constant", 1.0)
    }
}

impl DataConfig {
    pub fn preset(name: &str, amplitude: f64) -> Self {
        Self { preset: name.into(), amplitude, literal: Vec::new() }
    }

    /// Random presets draw from `derive_seed(seed, stream)`.
    pub fn build(&self, seed: u64, stream: u64) -> Result<InitialData> {
        let s = derive_seed(seed, stream);
        let preset = match self.preset.as_str() {
            "zero" => DataPreset::Zero,
            "constant" => DataPreset::Constant,
            "trivial-plus-lowest" => DataPreset::TrivialPlusLowest,
            "random-nonneg" => DataPreset::RandomNonneg { seed: s },
            "random-real" => DataPreset::RandomReal { seed: s },
            "literal" => {
                let mut entries = Vec::new();
                for e in &self.literal {
                    let idx = |v: f64| {
                        if v >= 0.0 && v.fract() == 0.0 {
                            Ok(v as usize)
                        } else {
                            Err(Error::Config(format!("literal index {v} is not a nonnegative integer")))
                        }
                    };
                    entries.push((idx(e[0])?, idx(e[1])?, idx(e[2])?, Complex64::new(e[3], e[4])));
                }
                DataPreset::Literal(entries)
            }
            other => return Err(Error::Config(format!("unknown data preset '{other}'"))),
        };
        if !self.amplitude.is_finite() {
            return Err(Error::Config("data amplitude must be finite".into()));
        }
        Ok(InitialData::new(preset, self.amplitude))
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearDecayConfig {
    pub group: GroupConfig,
    pub u0: DataConfig,
    pub u1: DataConfig,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    /// Fitted bounds are re-checked on a grid this many times finer.
    pub refine: usize,
    /// Allowed relative excess of a norm over its fitted bound on the finer grid.
    pub recheck_tolerance: f64,
    /// Threshold on `lambda` for the low/high frequency split.
    pub partition_threshold: f64,
}

impl Default for LinearDecayConfig {
    fn default() -> Self {
        Self {
            group: GroupConfig::new("torus2", 4),
            u0: DataConfig::preset("random-real", 1.0),
            u1: DataConfig::preset("random-real", 1.0),
            t_min: 0.1,
            t_max: 100.0,
            points: 60,
            refine: 4,
            recheck_tolerance: 0.05,
            partition_threshold: 0.125,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveSection {
    pub group: GroupConfig,
    pub p: f64,
    pub epsilon: f64,
    pub u0: DataConfig,
    pub u1: DataConfig,
    pub dt: f64,
    pub t_max: f64,
    pub blowup_threshold: f64,
    pub record_stride: usize,
    pub source_scale: f64,
    pub max_steps: usize,
}

impl Default for SolveSection {
    fn default() -> Self {
        Self {
            group: GroupConfig::new("torus1", 4),
            p: 2.0,
            epsilon: 0.5,
            u0: DataConfig::default(),
            u1: DataConfig::default(),
            dt: 1e-3,
            t_max: 10.0,
            blowup_threshold: dampwave::solver::DEFAULT_BLOWUP_THRESHOLD,
            record_stride: 1,
            source_scale: 1.0,
            max_steps: dampwave::solver::DEFAULT_MAX_STEPS,
        }
    }
}

impl SolveSection {
    pub fn build(&self, seed: u64) -> Result<dampwave::SolveConfig> {
        let mut cfg = dampwave::SolveConfig::new(
            self.group.spec()?,
            self.p,
            self.epsilon,
            self.u0.build(seed, 0)?,
            self.u1.build(seed, 1)?,
            self.dt,
            self.t_max,
        );
        cfg.blowup_threshold = self.blowup_threshold;
        cfg.record_stride = self.record_stride;
        cfg.source_scale = self.source_scale;
        cfg.max_steps = self.max_steps;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// `pde` runs the spectral solver, `ode` the spatially constant reduction.
    pub model: String,
    pub solver: SolveSection,
    pub eps_min: f64,
    pub eps_max: f64,
    pub count: usize,
    /// Explicit list; overrides `eps_min`, `eps_max` and `count` when non-empty.
    pub epsilons: Vec<f64>,
    /// Allowed relative deviation of the slope from `-(p-1)`.
    pub slope_tolerance: f64,
    /// Upper limit for `max / min` of `T eps^{p-1}`.
    pub compensated_ratio_limit: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let data = DataConfig::preset("trivial-plus-lowest", 0.05);
        Self {
            model: "pde".into(),
            solver: SolveSection {
                u0: data.clone(),
                u1: data,
                dt: 5e-4,
                t_max: 5000.0,
                ..SolveSection::default()
            },
            eps_min: 0.02,
            eps_max: 0.2,
            count: 6,
            epsilons: Vec::new(),
            slope_tolerance: 0.15,
            compensated_ratio_limit: 3.0,
        }
    }
}

impl SweepConfig {
    pub fn epsilon_list(&self) -> Vec<f64> {
        if self.epsilons.is_empty() {
            dampwave::blowup::log_spaced(self.eps_min, self.eps_max, self.count)
        } else {
            self.epsilons.clone()
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub p: f64,
    /// `C = int u0 dx` of the data the bounds refer to.
    pub c_data: f64,
    /// Defaults to `min(0.05, epsilon0 / 2)` when absent.
    pub epsilon: Option<f64>,
    pub depth: usize,
    /// Optional trajectory CSV (as written by `solve`) to check against.
    pub trajectory: Option<String>,
    /// Highest `j` checked against the trajectory.
    pub j_max: usize,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self { p: 2.0, c_data: 1.0, epsilon: None, depth: 30, trajectory: None, j_max: 4 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = Config::parse("").unwrap();
        assert_eq!(c.transform_check.groups.len(), 2);
        assert_eq!(c.solve.p, 2.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::parse("[solve]\nq = 3\n").is_err());
        assert!(Config::parse("[nonsense]\n").is_err());
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let c = Config::parse("[solve]\np = 3.0\n[solve.group]\ngroup = \"su2\"\nbandwidth = 2\n").unwrap();
        assert_eq!(c.solve.p, 3.0);
        assert_eq!(c.solve.epsilon, 0.5);
        assert_eq!(c.solve.group.oversampling, 2.0);
        assert_eq!(c.solve.group.kind().unwrap(), GroupKind::Su2);
    }

    #[test]
    fn round_trips_through_toml() {
        let c = Config::default();
        let text = toml::to_string(&c).unwrap();
        let back = Config::parse(&text).unwrap();
        assert_eq!(toml::to_string(&back).unwrap(), text);
    }

    #[test]
    fn presets_parse() {
        for name in ["zero", "constant", "trivial-plus-lowest", "random-nonneg", "random-real", "literal"] {
            assert!(DataConfig::preset(name, 1.0).build(1, 0).is_ok());
        }
        assert!(DataConfig::preset("bogus", 1.0).build(1, 0).is_err());
        let lit = DataConfig { preset: "literal".into(), amplitude: 1.0, literal: vec![[0.5, 0.0, 0.0, 1.0, 0.0]] };
        assert!(lit.build(1, 0).is_err());
    }
}
