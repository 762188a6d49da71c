//! Shared fixtures for the benchmarks.

use jumpexit_core::{AbsorbingSpec, DiscreteOperator, DomainPartition, Grid, JumpKernel};

pub fn kernels() -> Vec<(&'static str, JumpKernel)> {
    vec![
        ("cp", JumpKernel::compound_poisson_uniform(0.2, 1.0).unwrap()),
        ("stable_0.5", JumpKernel::truncated_stable(0.5, 1.0, 1e-3, 1.0).unwrap()),
        ("stable_1.5", JumpKernel::truncated_stable(1.5, 1000.0, 1e-3, 1.0).unwrap()),
    ]
}

/// Ω = (0, 1), absorbing on the whole collar.
pub fn unit_partition() -> DomainPartition {
    DomainPartition::from_pairs(&[[0.0, 1.0]], 1.0, AbsorbingSpec::Full).unwrap()
}

pub fn grid(partition: &DomainPartition, h: f64) -> Grid {
    Grid::build(partition, h).unwrap()
}

pub fn operator(kernel: &JumpKernel, h: f64) -> DiscreteOperator {
    let p = unit_partition();
    DiscreteOperator::assemble(kernel, &grid(&p, h), &p).unwrap()
}
