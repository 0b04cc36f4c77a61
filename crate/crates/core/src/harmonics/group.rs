use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the number of quadrature points a grid may allocate.
pub const DEFAULT_MAX_GRID_POINTS: usize = 4_000_000;

/// Which compact group the field lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// Flat torus of dimension 1, 2 or 3.
    Torus(usize),
    /// SU(2), including the half-integer spins.
    Su2,
}

impl GroupKind {
    /// Topological dimension.
    pub fn dimension(self) -> usize {
        match self {
            GroupKind::Torus(n) => n,
            GroupKind::Su2 => 3,
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Torus(n) => write!(f, "torus{n}"),
            GroupKind::Su2 => write!(f, "su2"),
        }
    }
}

/// Group, spectral band limit and grid refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupSpec {
    pub kind: GroupKind,
    /// Torus: `|k_i| <= bandwidth`. SU(2): spins up to `bandwidth`.
    pub bandwidth: usize,
    /// Grid refinement factor, `>= 1` for a valid spec.
    pub oversampling: f64,
    pub max_grid_points: usize,
}

impl GroupSpec {
    pub fn new(kind: GroupKind, bandwidth: usize, oversampling: f64) -> Result<Self> {
        let spec = Self::unchecked(kind, bandwidth, oversampling);
        spec.validate()?;
        Ok(spec)
    }

    pub fn torus(n: usize, bandwidth: usize) -> Result<Self> {
        Self::new(GroupKind::Torus(n), bandwidth, 1.0)
    }

    pub fn su2(bandwidth: usize) -> Result<Self> {
        Self::new(GroupKind::Su2, bandwidth, 1.0)
    }

    /// Builds a spec without checking `oversampling >= 1`.
    ///
    /// Only meant for negative tests that need a deliberately under-resolved
    /// grid; the remaining invariants are still enforced by [`build_grid`].
    ///
    /// [`build_grid`]: crate::harmonics::QuadratureGrid::build
    pub fn unchecked(kind: GroupKind, bandwidth: usize, oversampling: f64) -> Self {
        Self { kind, bandwidth, oversampling, max_grid_points: DEFAULT_MAX_GRID_POINTS }
    }

    pub fn with_oversampling(mut self, oversampling: f64) -> Result<Self> {
        self.oversampling = oversampling;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_grid_points(mut self, limit: usize) -> Self {
        self.max_grid_points = limit;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        if !(self.oversampling >= 1.0) || !self.oversampling.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "oversampling must be a finite number >= 1, got {}",
                self.oversampling
            )));
        }
        Ok(())
    }

    pub(crate) fn validate_shape(&self) -> Result<()> {
        if let GroupKind::Torus(n) = self.kind {
            if !(1..=3).contains(&n) {
                return Err(Error::InvalidSpec(format!("torus dimension must be 1, 2 or 3, got {n}")));
            }
        }
        if self.bandwidth == 0 {
            return Err(Error::InvalidSpec("bandwidth must be at least 1".into()));
        }
        if !(self.oversampling > 0.0) || !self.oversampling.is_finite() {
            return Err(Error::InvalidSpec(format!("oversampling must be positive, got {}", self.oversampling)));
        }
        Ok(())
    }

    /// The part of a `GroupSpec` that determines the unitary-dual truncation.
    pub fn band_key(&self) -> BandKey {
        BandKey { kind: self.kind, bandwidth: self.bandwidth }
    }
}

/// Identifies a truncated dual: two spectral fields are compatible iff their
/// keys agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BandKey {
    pub kind: GroupKind,
    pub bandwidth: usize,
}

impl fmt::Display for BandKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/B={}", self.kind, self.bandwidth)
    }
}

/// Label of an irreducible unitary representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IrrepLabel {
    /// Character `x -> exp(i k.x)` of the torus.
    Torus(Vec<i32>),
    /// Spin `two_l / 2` of SU(2).
    Spin { two_l: u32 },
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepLabel::Torus(k) => {
                let parts: Vec<String> = k.iter().map(|v| v.to_string()).collect();
                write!(f, "({})", parts.join(" "))
            }
            IrrepLabel::Spin { two_l } if two_l % 2 == 0 => write!(f, "{}", two_l / 2),
            IrrepLabel::Spin { two_l } => write!(f, "{two_l}/2"),
        }
    }
}

/// One class of the unitary dual together with its Laplace-Beltrami eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Irrep {
    pub label: IrrepLabel,
    pub dim: usize,
    /// `lambda^2`, so that `-L xi_ij = lambda^2 xi_ij`.
    pub eigenvalue: f64,
}

impl Irrep {
    pub fn is_trivial(&self) -> bool {
        self.eigenvalue == 0.0
    }

    /// `lambda`, the square root of the eigenvalue.
    pub fn frequency(&self) -> f64 {
        self.eigenvalue.sqrt()
    }

    pub fn spin(&self) -> Option<f64> {
        match self.label {
            IrrepLabel::Spin { two_l } => Some(two_l as f64 / 2.0),
            IrrepLabel::Torus(_) => None,
        }
    }
}

/// Lists the dual up to the band limit, sorted by eigenvalue with the trivial
/// representation first. Ties are broken by label.
pub fn enumerate_irreps(spec: &GroupSpec) -> Vec<Irrep> {
    let b = spec.bandwidth as i32;
    let mut irreps = match spec.kind {
        GroupKind::Torus(n) => {
            let side = (2 * b + 1) as usize;
            let count = side.pow(n as u32);
            (0..count)
                .map(|mut flat| {
                    let mut k = vec![0i32; n];
                    for slot in k.iter_mut().rev() {
                        *slot = (flat % side) as i32 - b;
                        flat /= side;
                    }
                    let eigenvalue = k.iter().map(|&v| (v * v) as f64).sum();
                    Irrep { label: IrrepLabel::Torus(k), dim: 1, eigenvalue }
                })
                .collect::<Vec<_>>()
        }
        GroupKind::Su2 => (0..=(2 * spec.bandwidth as u32))
            .map(|two_l| {
                let l = two_l as f64 / 2.0;
                Irrep { label: IrrepLabel::Spin { two_l }, dim: two_l as usize + 1, eigenvalue: l * (l + 1.0) }
            })
            .collect(),
    };
    irreps.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue).then_with(|| a.label.cmp(&b.label)));
    irreps
}
