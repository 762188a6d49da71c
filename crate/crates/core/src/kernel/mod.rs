//! Finite-range jump-rate kernels `γ(x, y)`.
//!
//! A kernel gives the rate density (per unit time, per unit length) of a
//! jump from `x` to `y`, and vanishes for `|x − y| ≥ λ`. Three families are
//! provided: a uniform compound-Poisson kernel, the ε-regularized truncated
//! α-stable kernel, and tabulated kernels. Rates and samples are computed
//! from closed-form antiderivatives of the pieces of `y ↦ γ(x, y)`.

mod profile;
mod tabulated;

use std::sync::Arc;

use rand::Rng;

pub use tabulated::Table;

use crate::error::{Error, Result};
use crate::geometry::IntervalSet;
use profile::{Piece, Restricted};

/// Default plateau width for the truncated-stable kernel.
pub const DEFAULT_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Jumps uniform on `(x − λ, x + λ)` with total rate `rate`.
    CompoundPoissonUniform { rate: f64 },
    /// `(1/m)|y − x|^(−1−α)` for `ε < |y − x| < λ`, capped at its value at
    /// `ε` inside the plateau. `epsilon == 0` is the unregularized kernel,
    /// which can be evaluated and classified but not integrated.
    TruncatedStable { alpha: f64, m: f64, epsilon: f64 },
    Tabulated(Arc<Table>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activity {
    Finite,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variation {
    Finite,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActivityClass {
    pub activity: Activity,
    pub variation: Variation,
    /// Set for tabulated kernels, whose class comes from a numerical
    /// integrability test rather than from the family.
    pub heuristic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpKernel {
    horizon: f64,
    family: Family,
    symmetric: bool,
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon > 0.0 && horizon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidKernel(format!("horizon must be positive and finite, got {horizon}")))
    }
}

impl JumpKernel {
    pub fn compound_poisson_uniform(rate: f64, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidKernel(format!("rate must be nonnegative, got {rate}")));
        }
        Ok(JumpKernel {
            horizon,
            family: Family::CompoundPoissonUniform { rate },
            symmetric: true,
        })
    }

    pub fn truncated_stable(alpha: f64, m: f64, epsilon: f64, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::InvalidKernel(format!("alpha must lie in (0, 2), got {alpha}")));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidKernel(format!("m must be positive, got {m}")));
        }
        if !(epsilon >= 0.0 && epsilon < horizon) {
            return Err(Error::InvalidKernel(format!(
                "epsilon must lie in [0, lambda), got {epsilon}"
            )));
        }
        Ok(JumpKernel {
            horizon,
            family: Family::TruncatedStable { alpha, m, epsilon },
            symmetric: true,
        })
    }

    pub fn tabulated(table: Table, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        let mut kernel = JumpKernel {
            horizon,
            family: Family::Tabulated(Arc::new(table)),
            symmetric: false,
        };
        kernel.symmetric = kernel.probe_symmetry();
        Ok(kernel)
    }

    fn probe_symmetry(&self) -> bool {
        let Family::Tabulated(table) = &self.family else { return true };
        let scale = table.max_value().max(f64::MIN_POSITIVE);
        table.probe_points().into_iter().all(|(x, y)| {
            (self.evaluate(x, y) - self.evaluate(y, x)).abs() <= 1e-12 * scale
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// True when `γ(x, y)` depends only on `y − x`.
    pub fn is_translation_invariant(&self) -> bool {
        match &self.family {
            Family::Tabulated(t) => matches!(**t, Table::Displacement { .. }),
            _ => true,
        }
    }

    /// True for kernels whose rate blows up near the diagonal.
    pub fn is_singular(&self) -> bool {
        matches!(self.family, Family::TruncatedStable { .. })
    }

    /// Plateau half-width ε for the truncated-stable family, zero otherwise.
    pub fn epsilon(&self) -> f64 {
        match self.family {
            Family::TruncatedStable { epsilon, .. } => epsilon,
            _ => 0.0,
        }
    }

    /// The kernel `c·γ`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {c}")));
        }
        let family = match &self.family {
            Family::CompoundPoissonUniform { rate } => Family::CompoundPoissonUniform { rate: rate * c },
            Family::TruncatedStable { alpha, m, epsilon } => Family::TruncatedStable {
                alpha: *alpha,
                m: m / c,
                epsilon: *epsilon,
            },
            Family::Tabulated(t) => Family::Tabulated(Arc::new(t.scaled(c))),
        };
        Ok(JumpKernel {
            horizon: self.horizon,
            family,
            symmetric: self.symmetric,
        })
    }

    /// Rate density `γ(x, y)`.
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        let d = (y - x).abs();
        if d >= self.horizon {
            return 0.0;
        }
        match &self.family {
            Family::CompoundPoissonUniform { rate } => rate / (2.0 * self.horizon),
            Family::TruncatedStable { alpha, m, epsilon } => {
                // the plateau value is used on the closed set |y − x| ≤ ε
                let s = d.max(*epsilon);
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    s.powf(-1.0 - alpha) / m
                }
            }
            Family::Tabulated(t) => t.value(x, y),
        }
    }

    /// Pieces of `y ↦ γ(x, y)` on `(x − λ, x + λ)`.
    pub(crate) fn profile(&self, x: f64) -> Result<Vec<Piece>> {
        let lambda = self.horizon;
        Ok(match &self.family {
            Family::CompoundPoissonUniform { rate } => {
                vec![Piece::constant(x - lambda, x + lambda, rate / (2.0 * lambda))]
            }
            Family::TruncatedStable { alpha, m, epsilon } => {
                if *epsilon == 0.0 {
                    return Err(Error::Unregularized);
                }
                let coef = 1.0 / m;
                let plateau = coef * epsilon.powf(-1.0 - alpha);
                vec![
                    Piece::power(x - lambda, x - epsilon, x, coef, *alpha),
                    Piece::constant(x - epsilon, x + epsilon, plateau),
                    Piece::power(x + epsilon, x + lambda, x, coef, *alpha),
                ]
            }
            Family::Tabulated(t) => t.profile(x, lambda),
        })
    }

    /// Loss rate `Λ(x) = ∫_region γ(x, y) dy`.
    pub fn total_rate(&self, x: f64, region: &IntervalSet) -> Result<f64> {
        Ok(Restricted::new(&self.profile(x)?, region).total())
    }

    /// `∫_{lo}^{hi} γ(x, y) dy` over a single interval.
    pub fn interval_rate(&self, x: f64, lo: f64, hi: f64) -> Result<f64> {
        self.total_rate(x, &IntervalSet::single(lo, hi))
    }

    /// Draws a jump target from `x` with density `γ(x, ·)/Λ(x)` restricted to `region`.
    pub fn sample_jump<R: Rng + ?Sized>(&self, x: f64, region: &IntervalSet, rng: &mut R) -> Result<f64> {
        let restricted = Restricted::new(&self.profile(x)?, region);
        let total = restricted.total();
        self.sample_restricted(x, &restricted, total, rng)
    }

    pub(crate) fn restricted(&self, x: f64, region: &IntervalSet) -> Result<Restricted> {
        Ok(Restricted::new(&self.profile(x)?, region))
    }

    pub(crate) fn sample_restricted<R: Rng + ?Sized>(
        &self,
        x: f64,
        restricted: &Restricted,
        total: f64,
        rng: &mut R,
    ) -> Result<f64> {
        if !(total > 0.0) {
            return Err(Error::ZeroRate { x });
        }
        let u_piece: f64 = rng.random();
        let u_inner: f64 = rng.random();
        Ok(restricted.sample(total, u_piece, u_inner))
    }

    /// Activity/variation class of the unregularized family.
    pub fn classify(&self) -> ActivityClass {
        match &self.family {
            Family::CompoundPoissonUniform { .. } => ActivityClass {
                activity: Activity::Finite,
                variation: Variation::Finite,
                heuristic: false,
            },
            Family::TruncatedStable { alpha, .. } => ActivityClass {
                activity: Activity::Infinite,
                variation: if *alpha < 1.0 { Variation::Finite } else { Variation::Infinite },
                heuristic: false,
            },
            Family::Tabulated(_) => self.classify_numerically(),
        }
    }

    /// Integrability test on shrinking punctured balls `δ < |y − x| < λ`:
    /// a moment is declared divergent when the last decade of δ still adds
    /// a non-negligible fraction of the integral.
    fn classify_numerically(&self) -> ActivityClass {
        let x0 = match &self.family {
            Family::Tabulated(t) => match &**t {
                Table::TwoPoint { xs, .. } => 0.5 * (xs[0] + xs[xs.len() - 1]),
                Table::Displacement { .. } => 0.0,
            },
            _ => 0.0,
        };
        let grows = |weight: fn(f64) -> f64| {
            let shell = |delta: f64| -> f64 {
                // geometric midpoint rule in s = |y − x|
                let n = 4000;
                let ratio = (self.horizon / delta).powf(1.0 / n as f64);
                let mut s0 = delta;
                let mut acc = 0.0;
                for _ in 0..n {
                    let s1 = s0 * ratio;
                    let mid = (s0 * s1).sqrt();
                    let g = self.evaluate(x0, x0 + mid) + self.evaluate(x0, x0 - mid);
                    acc += g * weight(mid) * (s1 - s0);
                    s0 = s1;
                }
                acc
            };
            let coarse = shell(self.horizon * 1e-7);
            let fine = shell(self.horizon * 1e-8);
            fine - coarse > 1e-3 * fine.abs().max(f64::MIN_POSITIVE)
        };
        let activity = if grows(|_| 1.0) { Activity::Infinite } else { Activity::Finite };
        let variation = if grows(|s| s) { Variation::Infinite } else { Variation::Finite };
        ActivityClass {
            activity,
            variation,
            heuristic: true,
        }
    }

    /// Symmetric/antisymmetric split of the kernel.
    pub fn decompose(&self) -> KernelDecomposition {
        KernelDecomposition { kernel: self.clone() }
    }
}

/// `γ = γ_s + γ_a` with `γ_s` symmetric and `γ_a` antisymmetric.
///
/// `γ_s` carries the diffusive part of the dynamics and `γ_a` the nonlocal
/// convection; `γ_a ≡ 0` exactly when the kernel is symmetric.
#[derive(Debug, Clone)]
pub struct KernelDecomposition {
    kernel: JumpKernel,
}

impl KernelDecomposition {
    pub fn gamma_s(&self, x: f64, y: f64) -> f64 {
        if self.kernel.symmetric {
            self.kernel.evaluate(x, y)
        } else {
            0.5 * (self.kernel.evaluate(x, y) + self.kernel.evaluate(y, x))
        }
    }

    pub fn gamma_a(&self, x: f64, y: f64) -> f64 {
        if self.kernel.symmetric {
            0.0
        } else {
            0.5 * (self.kernel.evaluate(x, y) - self.kernel.evaluate(y, x))
        }
    }

    pub fn recombine(&self, x: f64, y: f64) -> f64 {
        self.gamma_s(x, y) + self.gamma_a(x, y)
    }

    pub fn is_symmetric(&self) -> bool {
        self.kernel.symmetric
    }
}
