//! Exit-time problems for finite-range Markov jump processes.
//!
//! A [`JumpKernel`] γ(x, y) with horizon λ drives a particle on a domain Ω
//! (a finite union of intervals). Landing in the absorbing set Ω_d kills the
//! particle; jumps into the rest of the interaction collar are censored. The
//! crate solves the resulting volume-constrained nonlocal equations for the
//! survival probability and exit-time moments, and simulates the same
//! process by Monte Carlo so the two can be compared.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod montecarlo;
pub mod operator;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{interaction_domain, AbsorbingSpec, Cell, DomainPartition, Grid, Interval, IntervalSet, Region};
pub use kernel::{ActivityClass, Family, JumpKernel, KernelDecomposition, Table};
pub use montecarlo::{ExitEnsemble, ExitRecord, InitialCondition, SamplePath, SurvivalCurve};
pub use operator::{BalanceReport, DiscreteOperator};
pub use solver::{DensityTrajectory, ExitMoments, Scheme, SigmaEstimate, Stepping};
