//! Discrete phase alphabets, their convex hulls and projections.
//!
//! The `L`-level alphabet is `{exp(j(2πl/L + π/L)) : l = 0..L}`; the first point
//! sits half a step above the real axis. For `L >= 3` its convex hull is the
//! regular `L`-gon `{w : Re(conj(n_m) w) <= cos(π/L)}` with outward normals
//! `n_m = exp(j 2π m / L)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of sides of the polygon standing in for the unit disc.
pub const DISC_POLYGON_SIDES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAlphabet {
    levels: usize,
    values: Vec<Complex64>,
}

impl PhaseAlphabet {
    pub fn new(levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::invalid("levels", format!("need at least 2, got {levels}")));
        }
        let values = (0..levels).map(|l| Complex64::cis(Self::phase_of(levels, l))).collect();
        Ok(PhaseAlphabet { levels, values })
    }

    fn phase_of(levels: usize, l: usize) -> f64 {
        let lf = levels as f64;
        2.0 * PI * l as f64 / lf + PI / lf
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, index: usize) -> Complex64 {
        self.values[index]
    }

    /// Phase of level `index` in `[0, 2π)`.
    pub fn phase(&self, index: usize) -> f64 {
        Self::phase_of(self.levels, index)
    }

    /// Index of the level nearest to `w` in wrapped phase distance; ties go
    /// to the smaller index.
    pub fn nearest_index(&self, w: Complex64) -> Result<usize> {
        if w == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroPhase);
        }
        let phase = w.arg();
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for l in 0..self.levels {
            let d = wrapped_distance(phase, self.phase(l));
            // Exact ties (up to rounding) keep the earlier index.
            if d < best_dist - 1e-12 {
                best = l;
                best_dist = d;
            }
        }
        Ok(best)
    }
}

/// Shorthand for [`PhaseAlphabet::new`].
pub fn alphabet(levels: usize) -> Result<PhaseAlphabet> {
    PhaseAlphabet::new(levels)
}

/// `|a - b|` wrapped into `[0, π]`.
pub fn wrapped_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// `{w : Re(conj(normal) w) <= offset}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub normal: Complex64,
    pub offset: f64,
}

impl HalfPlane {
    /// `Re(conj(normal) w) - offset`; non-positive inside.
    pub fn excess(&self, w: Complex64) -> f64 {
        (self.normal.conj() * w).re - self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintMode {
    /// Optimise over the alphabet hull, then round each phase to the alphabet.
    Discrete,
    /// Optimise over the disc, then keep only the phase.
    Cmc,
    /// Per-element power `|w_i| <= 1`, no projection.
    Power,
    /// Alphabet hull, no projection.
    Hull,
}

impl ConstraintMode {
    pub fn name(&self) -> &'static str {
        match self {
            ConstraintMode::Discrete => "discrete",
            ConstraintMode::Cmc => "cmc",
            ConstraintMode::Power => "power",
            ConstraintMode::Hull => "hull",
        }
    }
}

impl std::str::FromStr for ConstraintMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(ConstraintMode::Discrete),
            "cmc" => Ok(ConstraintMode::Cmc),
            "power" => Ok(ConstraintMode::Power),
            "hull" => Ok(ConstraintMode::Hull),
            other => Err(Error::invalid(
                "mode",
                format!("unknown mode '{other}', expected discrete|cmc|power|hull"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    DiscreteHull(usize),
    PerElementPower,
}

/// Per-element feasible set as an intersection of half-planes.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleRegion {
    pub kind: RegionKind,
    pub halfplanes: Vec<HalfPlane>,
}

impl FeasibleRegion {
    /// The region used by the MM iterations for a given mode.
    pub fn for_mode(mode: ConstraintMode, alphabet: &PhaseAlphabet) -> Result<Self> {
        match mode {
            ConstraintMode::Discrete | ConstraintMode::Hull => hull_halfplanes(alphabet),
            ConstraintMode::Cmc | ConstraintMode::Power => Ok(Self::disc()),
        }
    }

    /// Inscribed regular polygon standing in for the unit disc.
    pub fn disc() -> Self {
        FeasibleRegion {
            kind: RegionKind::PerElementPower,
            halfplanes: regular_polygon(DISC_POLYGON_SIDES),
        }
    }

    /// Largest half-plane excess of `w`; non-positive when `w` is feasible.
    pub fn violation(&self, w: Complex64) -> f64 {
        self.halfplanes
            .iter()
            .map(|h| h.excess(w))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, w: Complex64, tol: f64) -> bool {
        self.violation(w) <= tol
    }
}

fn regular_polygon(sides: usize) -> Vec<HalfPlane> {
    let offset = (PI / sides as f64).cos();
    (0..sides)
        .map(|m| {
            let n = Complex64::cis(2.0 * PI * m as f64 / sides as f64);
            // Exact zeros for axis-aligned normals keep the LP rows sparse.
            let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
            HalfPlane {
                normal: Complex64::new(snap(n.re), snap(n.im)),
                offset,
            }
        })
        .collect()
}

/// Convex hull of the alphabet as half-planes. For `L = 2` the hull is the
/// segment between `+j` and `-j`, encoded as `Re(w) = 0` (two opposed
/// half-planes) plus `|Im(w)| <= 1`.
pub fn hull_halfplanes(alphabet: &PhaseAlphabet) -> Result<FeasibleRegion> {
    let levels = alphabet.levels();
    let halfplanes = if levels == 2 {
        let one = Complex64::new(1.0, 0.0);
        let j = Complex64::new(0.0, 1.0);
        vec![
            HalfPlane { normal: one, offset: 0.0 },
            HalfPlane { normal: -one, offset: 0.0 },
            HalfPlane { normal: j, offset: 1.0 },
            HalfPlane { normal: -j, offset: 1.0 },
        ]
    } else {
        regular_polygon(levels)
    };
    Ok(FeasibleRegion {
        kind: RegionKind::DiscreteHull(levels),
        halfplanes,
    })
}

pub fn project_discrete(w: Complex64, alphabet: &PhaseAlphabet) -> Result<Complex64> {
    Ok(alphabet.value(alphabet.nearest_index(w)?))
}

pub fn project_cmc(w: Complex64) -> Result<Complex64> {
    let r = w.norm();
    if r == 0.0 {
        return Err(Error::ZeroPhase);
    }
    Ok(w / r)
}
