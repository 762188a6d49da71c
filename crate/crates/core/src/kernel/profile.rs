//! Piecewise-analytic jump-rate profiles `y ↦ γ(x, y)` for a fixed source `x`.
//!
//! Every built-in family is a concatenation of constant, power-law, and
//! linear pieces. Each piece integrates in closed form and has a closed-form
//! inverse CDF, which is what makes the total rate and jump sampling exact.

use crate::geometry::{Interval, IntervalSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Shape {
    Constant(f64),
    /// `coef · |y − center|^(−1−alpha)`; the piece never contains `center`.
    Power { center: f64, coef: f64, alpha: f64 },
    /// Linear interpolation between `(support.lo, left)` and `(support.hi, right)`.
    Linear { left: f64, right: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub support: Interval,
    pub shape: Shape,
}

impl Piece {
    pub fn constant(lo: f64, hi: f64, value: f64) -> Self {
        Piece {
            support: Interval::new(lo, hi),
            shape: Shape::Constant(value),
        }
    }

    pub fn power(lo: f64, hi: f64, center: f64, coef: f64, alpha: f64) -> Self {
        Piece {
            support: Interval::new(lo, hi),
            shape: Shape::Power { center, coef, alpha },
        }
    }

    pub fn linear(lo: f64, hi: f64, left: f64, right: f64) -> Self {
        Piece {
            support: Interval::new(lo, hi),
            shape: Shape::Linear { left, right },
        }
    }

    /// Restriction to `[lo, hi] ∩ support`, or `None` when empty.
    pub fn restrict(&self, window: &Interval) -> Option<Piece> {
        let sub = self.support.intersect(window)?;
        let shape = match self.shape {
            Shape::Linear { .. } => Shape::Linear {
                left: self.value_at(sub.lo),
                right: self.value_at(sub.hi),
            },
            other => other,
        };
        Some(Piece { support: sub, shape })
    }

    fn value_at(&self, y: f64) -> f64 {
        match self.shape {
            Shape::Constant(c) => c,
            Shape::Power { center, coef, alpha } => coef * (y - center).abs().powf(-1.0 - alpha),
            Shape::Linear { left, right } => {
                let len = self.support.length();
                let t = ((y - self.support.lo) / len).clamp(0.0, 1.0);
                left + (right - left) * t
            }
        }
    }

    /// Distances `(near, far)` of the support from the power-law center.
    fn power_range(&self, center: f64) -> (f64, f64) {
        let a = (self.support.lo - center).abs();
        let b = (self.support.hi - center).abs();
        (a.min(b), a.max(b))
    }

    /// `∫_support shape(y) dy`.
    pub fn mass(&self) -> f64 {
        let len = self.support.length();
        match self.shape {
            Shape::Constant(c) => c * len,
            Shape::Power { center, coef, alpha } => {
                let (near, far) = self.power_range(center);
                coef * (near.powf(-alpha) - far.powf(-alpha)) / alpha
            }
            Shape::Linear { left, right } => 0.5 * (left + right) * len,
        }
    }

    /// Point `y` in the support with `∫_{lo}^{y} shape = t · mass()` for
    /// power pieces measured from the end nearest the center; `t ∈ [0, 1]`.
    pub fn invert(&self, t: f64) -> f64 {
        let Interval { lo, hi } = self.support;
        let len = hi - lo;
        let y = match self.shape {
            Shape::Constant(_) => lo + t * len,
            Shape::Power { center, alpha, .. } => {
                let (near, far) = self.power_range(center);
                let a = near.powf(-alpha);
                let b = far.powf(-alpha);
                let s = (a - t * (a - b)).powf(-1.0 / alpha);
                if lo >= center {
                    center + s
                } else {
                    center - s
                }
            }
            Shape::Linear { left, right } => {
                let m = t * 0.5 * (left + right) * len;
                let k = 0.5 * (right - left) / len;
                // k·u² + left·u − m = 0, solved in the cancellation-free form
                let disc = (left * left + 4.0 * k * m).max(0.0);
                let denom = left + disc.sqrt();
                let u = if denom > 0.0 { 2.0 * m / denom } else { 0.0 };
                lo + u
            }
        };
        y.clamp(lo, hi)
    }
}

/// A profile restricted to a region, ready for integration and sampling.
#[derive(Debug, Clone, Default)]
pub(crate) struct Restricted {
    pieces: Vec<Piece>,
    masses: Vec<f64>,
}

impl Restricted {
    pub fn new(profile: &[Piece], region: &IntervalSet) -> Self {
        let mut pieces = Vec::new();
        for p in profile {
            for w in region.clip(p.support.lo, p.support.hi).intervals() {
                if let Some(r) = p.restrict(w) {
                    pieces.push(r);
                }
            }
        }
        let masses = pieces.iter().map(Piece::mass).collect();
        Restricted { pieces, masses }
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Maps two uniforms on `[0, 1)` to a point distributed with density
    /// proportional to the profile on the region.
    pub fn sample(&self, total: f64, u_piece: f64, u_inner: f64) -> f64 {
        let target = u_piece * total;
        let mut acc = 0.0;
        let mut chosen = self.pieces.len() - 1;
        for (k, &m) in self.masses.iter().enumerate() {
            acc += m;
            if target < acc && m > 0.0 {
                chosen = k;
                break;
            }
        }
        // guard against a trailing zero-mass piece chosen by round-off
        while self.masses[chosen] <= 0.0 && chosen > 0 {
            chosen -= 1;
        }
        self.pieces[chosen].invert(u_inner)
    }
}
