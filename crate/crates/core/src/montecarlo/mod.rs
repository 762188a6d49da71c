//! Continuous-time random walk simulation of the confined jump process.
//!
//! Every path draws from its own ChaCha stream `(seed, path index)`, so
//! ensembles are identical for any number of worker threads.

mod paths;
mod stats;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

pub use paths::{brownian_path, simulate_path, PathMode, SamplePath};
pub use stats::{pairwise_sum, z_scores, SurvivalCurve};

use crate::error::{Error, Result};
use crate::geometry::{DomainPartition, IntervalSet, Region};
use crate::kernel::JumpKernel;

/// RNG for path `index` of an ensemble seeded with `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    Point(f64),
    /// Uniform on Ω.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitRecord {
    pub path_id: u64,
    pub x0: f64,
    /// Exit time, or `t_max` for censored paths.
    pub exit_time: f64,
    /// Landing point in Ω_d; `None` when censored.
    pub exit_location: Option<f64>,
    pub jumps: u64,
}

impl ExitRecord {
    pub fn censored(&self) -> bool {
        self.exit_location.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExitEnsemble {
    pub records: Vec<ExitRecord>,
    pub seed: u64,
    pub t_max: f64,
}

/// One pre-exit event: the time a position was entered and the wait spent there
/// together with the jump rate in force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub position: f64,
    pub rate: f64,
}

/// The confined process on a fixed partition: waits `Exp(Λ(x))` with
/// `Λ(x) = ∫_{Ω∪Ω_d} γ(x, y) dy`, then jumps with density `γ(x, ·)/Λ(x)`
/// on Ω ∪ Ω_d. Jumps into the collar Ω_I \ Ω_d never occur.
#[derive(Debug, Clone)]
pub struct ConfinedWalk<'a> {
    kernel: &'a JumpKernel,
    partition: &'a DomainPartition,
    admissible: IntervalSet,
}

impl<'a> ConfinedWalk<'a> {
    pub fn new(kernel: &'a JumpKernel, partition: &'a DomainPartition) -> Result<Self> {
        let (kh, ph) = (kernel.horizon(), partition.horizon());
        if (kh - ph).abs() > 1e-12 * kh.max(ph) {
            return Err(Error::HorizonMismatch {
                kernel: kh,
                partition: ph,
            });
        }
        Ok(ConfinedWalk {
            kernel,
            partition,
            admissible: partition.admissible(),
        })
    }

    pub fn partition(&self) -> &DomainPartition {
        self.partition
    }

    /// Draws `x0` for the given initial condition.
    pub fn initial_point<R: Rng + ?Sized>(&self, init: InitialCondition, rng: &mut R) -> Result<f64> {
        let omega = self.partition.omega();
        match init {
            InitialCondition::Point(x) => {
                if omega.contains(x) {
                    Ok(x)
                } else {
                    Err(Error::InvalidArgument(format!("x0 = {x} is not in the domain {omega}")))
                }
            }
            InitialCondition::Uniform => {
                let mut target = rng.random::<f64>() * omega.measure();
                for iv in omega.intervals() {
                    if target <= iv.length() {
                        return Ok((iv.lo + target).min(iv.hi));
                    }
                    target -= iv.length();
                }
                Ok(omega.intervals().last().map(|iv| iv.hi).unwrap_or(0.0))
            }
        }
    }

    /// Simulates until absorption or `t_max`.
    pub fn exit<R: Rng + ?Sized>(&self, x0: f64, rng: &mut R, t_max: f64) -> Result<ExitRecord> {
        self.run(x0, rng, t_max, None)
    }

    /// Like [`exit`](Self::exit), also recording every visited position.
    pub fn exit_traced<R: Rng + ?Sized>(
        &self,
        x0: f64,
        rng: &mut R,
        t_max: f64,
        trace: &mut Vec<Event>,
    ) -> Result<ExitRecord> {
        self.run(x0, rng, t_max, Some(trace))
    }

    fn run<R: Rng + ?Sized>(
        &self,
        x0: f64,
        rng: &mut R,
        t_max: f64,
        mut trace: Option<&mut Vec<Event>>,
    ) -> Result<ExitRecord> {
        if !self.partition.omega().contains(x0) {
            return Err(Error::InvalidArgument(format!("x0 = {x0} is not in the domain")));
        }
        let mut x = x0;
        let mut t = 0.0;
        let mut jumps = 0u64;
        loop {
            let restricted = self.kernel.restricted(x, &self.admissible)?;
            let rate = restricted.total();
            if !(rate > 0.0) {
                return Err(Error::ZeroRate { x });
            }
            if let Some(tr) = trace.as_deref_mut() {
                tr.push(Event {
                    time: t,
                    position: x,
                    rate,
                });
            }
            let wait: f64 = rng.sample::<f64, _>(Exp1) / rate;
            if t + wait >= t_max {
                return Ok(ExitRecord {
                    path_id: 0,
                    x0,
                    exit_time: t_max,
                    exit_location: None,
                    jumps,
                });
            }
            t += wait;
            let y = self.kernel.sample_restricted(x, &restricted, rate, rng)?;
            jumps += 1;
            let (y, region) = self.land(y);
            if region == Region::Absorbing {
                return Ok(ExitRecord {
                    path_id: 0,
                    x0,
                    exit_time: t,
                    exit_location: Some(y),
                    jumps,
                });
            }
            x = y;
        }
    }

    /// Region of a landing point; points pushed off Ω ∪ Ω_d by round-off are
    /// clamped back onto the nearest admissible interval.
    fn land(&self, y: f64) -> (f64, Region) {
        match self.partition.classify(y) {
            r @ (Region::Interior | Region::Absorbing) => (y, r),
            _ => {
                let nearest = self
                    .admissible
                    .intervals()
                    .iter()
                    .min_by(|a, b| {
                        let da = (a.lo - y).max(y - a.hi).max(0.0);
                        let db = (b.lo - y).max(y - b.hi).max(0.0);
                        da.total_cmp(&db)
                    })
                    .expect("admissible set is nonempty");
                let y = y.clamp(nearest.lo, nearest.hi);
                (y, self.partition.classify(y))
            }
        }
    }
}

/// Single exit-time draw from `x0`.
pub fn simulate_exit<R: Rng + ?Sized>(
    kernel: &JumpKernel,
    partition: &DomainPartition,
    x0: f64,
    rng: &mut R,
    t_max: f64,
) -> Result<ExitRecord> {
    ConfinedWalk::new(kernel, partition)?.exit(x0, rng, t_max)
}

/// `n_paths` independent exit records, in path order.
pub fn simulate_ensemble(
    kernel: &JumpKernel,
    partition: &DomainPartition,
    init: InitialCondition,
    n_paths: usize,
    seed: u64,
    t_max: f64,
) -> Result<ExitEnsemble> {
    if n_paths == 0 {
        return Err(Error::InvalidArgument("n_paths must be at least 1".into()));
    }
    if !(t_max > 0.0) {
        return Err(Error::InvalidArgument(format!("t_max must be positive, got {t_max}")));
    }
    let walk = ConfinedWalk::new(kernel, partition)?;
    let records = (0..n_paths as u64)
        .into_par_iter()
        .map(|id| {
            let mut rng = path_rng(seed, id);
            let x0 = walk.initial_point(init, &mut rng)?;
            let mut rec = walk.exit(x0, &mut rng, t_max)?;
            rec.path_id = id;
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExitEnsemble { records, seed, t_max })
}

impl ExitEnsemble {
    pub fn n_paths(&self) -> usize {
        self.records.len()
    }

    pub fn censored_count(&self) -> usize {
        self.records.iter().filter(|r| r.censored()).count()
    }

    /// Sample mean and standard error of the exit time; censored paths
    /// contribute `t_max`.
    pub fn mean_exit_time(&self) -> (f64, f64) {
        let n = self.records.len() as f64;
        let times: Vec<f64> = self.records.iter().map(|r| r.exit_time).collect();
        let mean = pairwise_sum(&times) / n;
        let sq: Vec<f64> = times.iter().map(|t| (t - mean) * (t - mean)).collect();
        let var = if n > 1.0 { pairwise_sum(&sq) / (n - 1.0) } else { 0.0 };
        (mean, (var / n).sqrt())
    }

    /// Fraction of paths absorbed on their first jump.
    pub fn first_jump_exit_fraction(&self) -> f64 {
        let k = self.records.iter().filter(|r| !r.censored() && r.jumps == 1).count();
        k as f64 / self.records.len() as f64
    }

    /// Number of exits landing in `[lo, hi]`.
    pub fn exits_into(&self, lo: f64, hi: f64) -> usize {
        self.records
            .iter()
            .filter_map(|r| r.exit_location)
            .filter(|&y| lo <= y && y <= hi)
            .count()
    }

    /// `Ŝ(t)` with binomial standard errors.
    pub fn empirical_survival(&self, times: &[f64]) -> SurvivalCurve {
        stats::empirical_survival(self, times)
    }
}
