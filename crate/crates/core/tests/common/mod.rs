#![allow(dead_code)]

use jumpexit_core::{AbsorbingSpec, DiscreteOperator, DomainPartition, Grid, JumpKernel};

/// 1% critical value of the one-sample KS statistic, asymptotic form.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// 1% critical value of the Anderson–Darling statistic for a fully
/// specified continuous distribution.
pub const AD_CRITICAL_1PCT: f64 = 3.857;

pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn anderson_darling(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let nf = n as f64;
    let clamp = |p: f64| p.clamp(1e-300, 1.0 - 1e-16);
    let mut acc = 0.0;
    for i in 0..n {
        let lo = clamp(cdf(s[i]));
        let hi = clamp(cdf(s[n - 1 - i]));
        acc += (2 * i + 1) as f64 * (lo.ln() + (1.0 - hi).ln());
    }
    -nf - acc / nf
}

pub fn cp_kernel() -> JumpKernel {
    JumpKernel::compound_poisson_uniform(0.2, 1.0).unwrap()
}

pub fn stable_half() -> JumpKernel {
    JumpKernel::truncated_stable(0.5, 1.0, 1e-3, 1.0).unwrap()
}

pub fn stable_three_halves() -> JumpKernel {
    JumpKernel::truncated_stable(1.5, 1000.0, 1e-3, 1.0).unwrap()
}

pub fn operator(kernel: &JumpKernel, omega: &[[f64; 2]], spec: AbsorbingSpec, h: f64) -> DiscreteOperator {
    let p = DomainPartition::from_pairs(omega, kernel.horizon(), spec).unwrap();
    let grid = Grid::build(&p, h).unwrap();
    DiscreteOperator::assemble(kernel, &grid, &p).unwrap()
}

/// Ω = (0,1), uniform compound Poisson kernel with rate 0.2 and λ = 1, Ω_d = Ω_I.
pub fn analytic(h: f64) -> DiscreteOperator {
    operator(&cp_kernel(), &[[0.0, 1.0]], AbsorbingSpec::Full, h)
}

pub fn analytic_partition() -> DomainPartition {
    DomainPartition::from_pairs(&[[0.0, 1.0]], 1.0, AbsorbingSpec::Full).unwrap()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
