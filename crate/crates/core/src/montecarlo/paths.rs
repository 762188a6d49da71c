use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use super::ConfinedWalk;
use crate::error::{Error, Result};
use crate::geometry::{DomainPartition, IntervalSet};
use crate::kernel::JumpKernel;

/// Piecewise-constant path: `positions[k]` is held on `[times[k], times[k+1])`.
/// The final entry repeats the last position at the end time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SamplePath {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    /// Whether the path was absorbed in Ω_d (confined mode only).
    pub exited: bool,
}

impl SamplePath {
    /// Number of jumps of a jump path, which ends with a repeated terminal entry.
    pub fn jumps(&self) -> usize {
        self.times.len().saturating_sub(2)
    }

    /// Position at time `t`.
    pub fn position_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s <= t).max(1);
        self.positions[k - 1]
    }
}

#[derive(Debug, Clone, Copy)]
pub enum PathMode<'a> {
    /// Unconfined walk on the real line.
    Free,
    /// The confined process, stopped on absorption.
    Confined(&'a DomainPartition),
}

/// Records every jump of one path up to `t_max`.
pub fn simulate_path<R: Rng + ?Sized>(
    kernel: &JumpKernel,
    mode: PathMode<'_>,
    x0: f64,
    rng: &mut R,
    t_max: f64,
) -> Result<SamplePath> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidArgument(format!("t_max must be positive, got {t_max}")));
    }
    match mode {
        PathMode::Free => free_path(kernel, x0, rng, t_max),
        PathMode::Confined(p) => {
            let walk = ConfinedWalk::new(kernel, p)?;
            let mut trace = Vec::new();
            let rec = walk.exit_traced(x0, rng, t_max, &mut trace)?;
            let mut path = SamplePath {
                times: trace.iter().map(|e| e.time).collect(),
                positions: trace.iter().map(|e| e.position).collect(),
                exited: !rec.censored(),
            };
            path.times.push(rec.exit_time);
            path.positions.push(rec.exit_location.unwrap_or(*path.positions.last().unwrap()));
            Ok(path)
        }
    }
}

fn free_path<R: Rng + ?Sized>(kernel: &JumpKernel, x0: f64, rng: &mut R, t_max: f64) -> Result<SamplePath> {
    let line = IntervalSet::real_line();
    let mut path = SamplePath {
        times: vec![0.0],
        positions: vec![x0],
        exited: false,
    };
    let mut x = x0;
    let mut t = 0.0;
    // translation-invariant kernels have one rate; others need it per position
    let fixed = if kernel.is_translation_invariant() {
        Some(kernel.restricted(0.0, &line)?)
    } else {
        None
    };
    loop {
        let y = match &fixed {
            Some(r) => {
                let rate = r.total();
                if !(rate > 0.0) {
                    return Err(Error::ZeroRate { x });
                }
                let wait: f64 = rng.sample::<f64, _>(Exp1) / rate;
                if t + wait >= t_max {
                    break;
                }
                t += wait;
                x + kernel.sample_restricted(x, r, rate, rng)?
            }
            None => {
                let r = kernel.restricted(x, &line)?;
                let rate = r.total();
                if !(rate > 0.0) {
                    return Err(Error::ZeroRate { x });
                }
                let wait: f64 = rng.sample::<f64, _>(Exp1) / rate;
                if t + wait >= t_max {
                    break;
                }
                t += wait;
                kernel.sample_restricted(x, &r, rate, rng)?
            }
        };
        x = y;
        path.times.push(t);
        path.positions.push(x);
    }
    path.times.push(t_max);
    path.positions.push(x);
    Ok(path)
}

/// Brownian motion with diffusion coefficient 1/2 (so `E[(X_t − x0)²] = t`),
/// sampled on a uniform time grid.
pub fn brownian_path<R: Rng + ?Sized>(x0: f64, dt: f64, t_max: f64, rng: &mut R) -> Result<SamplePath> {
    if !(dt > 0.0 && t_max > 0.0) {
        return Err(Error::InvalidArgument("need dt > 0 and t_max > 0".into()));
    }
    let steps = ((t_max / dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = t_max / steps as f64;
    let sd = dt.sqrt();
    let mut path = SamplePath {
        times: Vec::with_capacity(steps + 2),
        positions: Vec::with_capacity(steps + 2),
        exited: false,
    };
    let mut x = x0;
    path.times.push(0.0);
    path.positions.push(x);
    for k in 1..=steps {
        x += sd * rng.sample::<f64, _>(StandardNormal);
        path.times.push(k as f64 * dt);
        path.positions.push(x);
    }
    Ok(path)
}
