//! Time stepping of the volume-constrained forward equation, exit-time
//! moments from the backward equation, and the coercivity constant.
//!
//! All solvers work on the interior block: absorbing cells carry `u = 0`
//! (resp. `m_k = 0`), so their rows and columns drop out of the systems.

mod moments;
mod sigma;

use std::fmt;
use std::str::FromStr;

pub use moments::{exit_moments, mean_exit_time, ExitMoments};
pub use sigma::{coercivity_sigma, energy_matrix, SigmaEstimate};

use crate::error::{Error, Result};
use crate::linalg::LinearSolver;
use crate::operator::DiscreteOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    ImplicitEuler,
    /// Second order, but positivity is only guaranteed for small `dt`.
    CrankNicolson,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "implicit_euler" => Ok(Scheme::ImplicitEuler),
            "crank_nicolson" => Ok(Scheme::CrankNicolson),
            other => Err(Error::InvalidArgument(format!(
                "unknown scheme {other:?}, expected implicit_euler or crank_nicolson"
            ))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::ImplicitEuler => "implicit_euler",
            Scheme::CrankNicolson => "crank_nicolson",
        })
    }
}

/// Time-stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stepping {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Keep every `snapshot_every`-th density (the last step is always kept).
    pub snapshot_every: usize,
}

impl Stepping {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Stepping {
            dt,
            t_end,
            scheme: Scheme::ImplicitEuler,
            snapshot_every: 1,
        }
    }

    pub fn scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn snapshot_every(mut self, every: usize) -> Self {
        self.snapshot_every = every.max(1);
        self
    }
}

#[derive(Debug, Clone)]
pub struct DensityTrajectory {
    /// Step times `0, dt, 2dt, …, t_end`.
    pub times: Vec<f64>,
    /// `S(t) = Σ_Ω w u`.
    pub survival: Vec<f64>,
    /// Cumulative mass absorbed into Ω_d.
    pub absorbed: Vec<f64>,
    /// `(step index, density on active cells)`.
    pub densities: Vec<(usize, Vec<f64>)>,
    /// Final cumulative absorbed mass per absorbing cell, in the order of
    /// [`DiscreteOperator::absorbing`].
    pub absorbed_by_cell: Vec<f64>,
    pub warnings: Vec<String>,
}

impl DensityTrajectory {
    /// `S(t)` by linear interpolation between steps, constant past the end.
    pub fn survival_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return self.survival[0];
        }
        if k == self.times.len() {
            return self.survival[k - 1];
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (s0, s1) = (self.survival[k - 1], self.survival[k]);
        s0 + (s1 - s0) * (t - t0) / (t1 - t0)
    }

    /// Largest `|S(t) + F(t) − S(0)|` over the run.
    pub fn conservation_defect(&self) -> f64 {
        let s0 = self.survival[0];
        self.survival
            .iter()
            .zip(&self.absorbed)
            .map(|(s, f)| (s + f - s0).abs())
            .fold(0.0, f64::max)
    }

    /// `∫_0^T k t^{k−1} S(t) dt` by the trapezoid rule, truncated once
    /// `S < cutoff`.
    pub fn survival_moment(&self, k: u32, cutoff: f64) -> f64 {
        let g = |i: usize| {
            let t = self.times[i];
            k as f64 * t.powi(k as i32 - 1) * self.survival[i]
        };
        let mut acc = 0.0;
        for i in 1..self.times.len() {
            acc += 0.5 * (g(i - 1) + g(i)) * (self.times[i] - self.times[i - 1]);
            if self.survival[i] < cutoff {
                break;
            }
        }
        acc
    }
}

/// Checks `u0 ≥ 0`, supported on Ω, with unit mass.
pub fn validate_initial(op: &DiscreteOperator, u0: &[f64]) -> Result<()> {
    if u0.len() != op.len() {
        return Err(Error::InvalidInitialDensity(format!(
            "expected {} values, got {}",
            op.len(),
            u0.len()
        )));
    }
    if let Some((i, v)) = u0.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidInitialDensity(format!("value {v} at cell {i}")));
    }
    if let Some(&j) = op.absorbing().iter().find(|&&j| u0[j] != 0.0) {
        return Err(Error::InvalidInitialDensity(format!(
            "nonzero density on absorbing cell at x = {}",
            op.cells()[j].center
        )));
    }
    let mass = op.interior_mass(u0);
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInitialDensity(format!("total mass {mass}, expected 1")));
    }
    Ok(())
}

/// Advances `u_t = A* u` with `u = 0` on Ω_d from `u0` to `t_end`.
pub fn evolve(op: &DiscreteOperator, u0: &[f64], stepping: &Stepping) -> Result<DensityTrajectory> {
    validate_initial(op, u0)?;
    let Stepping {
        dt,
        t_end,
        scheme,
        snapshot_every,
    } = *stepping;
    if !(dt > 0.0 && dt.is_finite()) || !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("need dt > 0 and t_end > 0, got dt = {dt}, t_end = {t_end}")));
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = t_end / steps as f64;

    let interior = op.interior();
    let block = op.a_star().submatrix(interior);
    let (implicit_weight, explicit) = match scheme {
        Scheme::ImplicitEuler => (dt, None),
        Scheme::CrankNicolson => (0.5 * dt, Some(block.shifted(1.0, 0.5 * dt))),
    };
    let lu = LinearSolver::factor(&block.shifted(1.0, -implicit_weight))?;

    let widths: Vec<f64> = interior.iter().map(|&i| op.cells()[i].width).collect();
    let mut full = vec![0.0; op.len()];
    let scatter = |full: &mut [f64], v: &[f64]| {
        for (k, &i) in interior.iter().enumerate() {
            full[i] = v[k];
        }
    };
    let mass = |v: &[f64]| v.iter().zip(&widths).map(|(a, w)| a * w).sum::<f64>();

    let mut u: Vec<f64> = interior.iter().map(|&i| u0[i]).collect();
    let mut traj = DensityTrajectory {
        times: Vec::with_capacity(steps + 1),
        survival: Vec::with_capacity(steps + 1),
        absorbed: Vec::with_capacity(steps + 1),
        densities: vec![(0, u0.to_vec())],
        absorbed_by_cell: vec![0.0; op.absorbing().len()],
        warnings: Vec::new(),
    };
    traj.times.push(0.0);
    traj.survival.push(mass(&u));
    traj.absorbed.push(0.0);

    let absorbing_widths: Vec<f64> = op.absorbing().iter().map(|&j| op.cells()[j].width).collect();
    let mut cumulative = 0.0;
    let mut negative_reported = false;
    for step in 1..=steps {
        let prev = u.clone();
        if let Some(ex) = &explicit {
            u = ex.matvec(&u);
        }
        lu.solve_in_place(&mut u);

        // flux at the stage value of the scheme
        let stage: Vec<f64> = match scheme {
            Scheme::ImplicitEuler => u.clone(),
            Scheme::CrankNicolson => u.iter().zip(&prev).map(|(a, b)| 0.5 * (a + b)).collect(),
        };
        scatter(&mut full, &stage);
        let flux = op.flux_to_d().apply(&full);
        let mut step_mass = 0.0;
        for (k, f) in flux.iter().enumerate() {
            let dm = dt * f * absorbing_widths[k];
            traj.absorbed_by_cell[k] += dm;
            step_mass += dm;
        }
        cumulative += step_mass;

        if !negative_reported {
            let min = u.iter().copied().fold(f64::INFINITY, f64::min);
            let max = u.iter().copied().fold(0.0, f64::max);
            if min < -1e-14 * max.max(1.0) {
                traj.warnings.push(format!(
                    "negative density {min:e} at t = {:.6}; reduce dt or use implicit_euler",
                    step as f64 * dt
                ));
                negative_reported = true;
            }
        }

        traj.times.push(step as f64 * dt);
        traj.survival.push(mass(&u));
        traj.absorbed.push(cumulative);
        if step % snapshot_every == 0 || step == steps {
            scatter(&mut full, &u);
            traj.densities.push((step, full.clone()));
        }
    }
    Ok(traj)
}
