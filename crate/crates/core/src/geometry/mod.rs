//! Domain, interaction collar, absorbing subset, and the computational grid.

mod grid;
mod intervals;

pub use grid::{Cell, Grid};
pub use intervals::{Interval, IntervalSet};

use crate::error::{Error, Result};

/// Slack used when validating containment of user-supplied intervals.
const CONTAINMENT_TOL: f64 = 1e-12;

/// The λ-dilation of `omega` minus `omega` itself.
///
/// Collars of components closer than 2λ merge into a single interval.
pub fn interaction_domain(omega: &IntervalSet, horizon: f64) -> IntervalSet {
    omega.dilate(horizon).difference(omega)
}

/// Which part of the partition a point (or cell) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// Ω
    Interior,
    /// Ω_d, where the particle is absorbed.
    Absorbing,
    /// Ω_I \ Ω_d; jumps into it are censored.
    Collar,
    /// Outside Ω ∪ Ω_I.
    Outside,
}

/// How the absorbing set is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum AbsorbingSpec {
    /// Ω_d = Ω_I
    Full,
    /// Ω_d = ∅
    Empty,
    Explicit(IntervalSet),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainPartition {
    horizon: f64,
    omega: IntervalSet,
    omega_i: IntervalSet,
    omega_d: IntervalSet,
}

impl DomainPartition {
    pub fn new(omega: IntervalSet, horizon: f64, absorbing: AbsorbingSpec) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidDomain(format!(
                "horizon must be positive and finite, got {horizon}"
            )));
        }
        if omega.is_empty() {
            return Err(Error::InvalidDomain("omega is empty".into()));
        }
        if omega.intervals().iter().any(|p| !p.lo.is_finite() || !p.hi.is_finite()) {
            return Err(Error::InvalidDomain("omega must be bounded".into()));
        }
        let omega_i = interaction_domain(&omega, horizon);
        let omega_d = match absorbing {
            AbsorbingSpec::Full => omega_i.clone(),
            AbsorbingSpec::Empty => IntervalSet::empty(),
            AbsorbingSpec::Explicit(set) => {
                if let Some(bad) = set.first_not_contained_in(&omega_i, CONTAINMENT_TOL) {
                    return Err(Error::InvalidDomain(format!(
                        "omega_d interval {bad} is not contained in the interaction domain {omega_i}"
                    )));
                }
                // snap to the collar so round-off at the endpoints cannot leak into Ω
                set.intersection(&omega_i)
            }
        };
        Ok(DomainPartition {
            horizon,
            omega,
            omega_i,
            omega_d,
        })
    }

    /// Convenience constructor from `[lo, hi]` pairs.
    pub fn from_pairs(omega: &[[f64; 2]], horizon: f64, absorbing: AbsorbingSpec) -> Result<Self> {
        Self::new(IntervalSet::from_pairs(omega)?, horizon, absorbing)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn omega(&self) -> &IntervalSet {
        &self.omega
    }

    pub fn interaction(&self) -> &IntervalSet {
        &self.omega_i
    }

    pub fn absorbing(&self) -> &IntervalSet {
        &self.omega_d
    }

    /// Ω_I \ Ω_d.
    pub fn collar(&self) -> IntervalSet {
        self.omega_i.difference(&self.omega_d)
    }

    /// Ω ∪ Ω_d: the states a confined particle can occupy or be absorbed in.
    pub fn admissible(&self) -> IntervalSet {
        self.omega.union(&self.omega_d)
    }

    /// Ω ∪ Ω_I.
    pub fn extended(&self) -> IntervalSet {
        self.omega.union(&self.omega_i)
    }

    /// Region membership with boundary ties broken toward Ω, then Ω_d.
    pub fn classify(&self, x: f64) -> Region {
        if self.omega.contains(x) {
            Region::Interior
        } else if self.omega_d.contains(x) {
            Region::Absorbing
        } else if self.omega_i.contains(x) {
            Region::Collar
        } else {
            Region::Outside
        }
    }

    /// Pieces of Ω ∪ Ω_I labelled by region, sorted left to right.
    pub(crate) fn labelled_pieces(&self) -> Vec<(Interval, Region)> {
        let mut pieces: Vec<(Interval, Region)> = Vec::new();
        pieces.extend(self.omega.intervals().iter().map(|&p| (p, Region::Interior)));
        pieces.extend(self.omega_d.intervals().iter().map(|&p| (p, Region::Absorbing)));
        pieces.extend(self.collar().intervals().iter().map(|&p| (p, Region::Collar)));
        pieces.sort_by(|a, b| a.0.lo.total_cmp(&b.0.lo));
        pieces
    }
}
