use crate::error::{Error, Result};
use crate::linalg::LinearSolver;
use crate::operator::DiscreteOperator;

/// `m_k(x) = E[T_x^k]` on the active cells; zero on Ω_d.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitMoments {
    pub order: usize,
    pub values: Vec<f64>,
}

impl ExitMoments {
    /// `Σ_Ω w u m_k`, the moment under initial density `u`.
    pub fn average(&self, op: &DiscreteOperator, u: &[f64]) -> f64 {
        op.interior()
            .iter()
            .map(|&i| op.cells()[i].width * u[i] * self.values[i])
            .sum()
    }

    pub fn interior_values<'a>(&'a self, op: &'a DiscreteOperator) -> impl Iterator<Item = f64> + 'a {
        op.interior().iter().map(|&i| self.values[i])
    }
}

/// Solves `A m = −1` on Ω with `m = 0` on Ω_d.
pub fn mean_exit_time(op: &DiscreteOperator) -> Result<ExitMoments> {
    Ok(exit_moments(op, 1)?.remove(0))
}

/// Moments `m_1 … m_{k_max}` from `A m_k = −k m_{k−1}`, `m_0 = 1`, with one
/// factorization of the interior block.
pub fn exit_moments(op: &DiscreteOperator, k_max: usize) -> Result<Vec<ExitMoments>> {
    if op.absorbing().is_empty() {
        return Err(Error::EmptyAbsorbingSet);
    }
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let interior = op.interior();
    let lu = LinearSolver::factor(&op.a_gen().submatrix(interior))?;
    let mut prev = vec![1.0; interior.len()];
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut rhs: Vec<f64> = prev.iter().map(|m| -(k as f64) * m).collect();
        lu.solve_in_place(&mut rhs);
        let min = rhs.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::NonPositive { order: k, min });
        }
        let mut values = vec![0.0; op.len()];
        for (v, &i) in rhs.iter().zip(interior) {
            values[i] = *v;
        }
        out.push(ExitMoments { order: k, values });
        prev = rhs;
    }
    Ok(out)
}
