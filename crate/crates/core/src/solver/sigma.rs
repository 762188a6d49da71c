use crate::error::{Error, Result};
use crate::linalg::{BandedMatrix, LinearSolver};
use crate::operator::DiscreteOperator;

const MAX_ITERATIONS: usize = 5000;

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaEstimate {
    pub sigma: f64,
    /// `‖C v − σ v‖₂` for the unit iterate `v` of the scaled problem.
    pub residual: f64,
    pub iterations: usize,
    /// Minimizing mode on the active cells, scaled to max-norm 1 and zero on Ω_d.
    pub eigenvector: Vec<f64>,
}

/// `C = W^{-1/2} · sym(−W A) · W^{-1/2}` on the interior block, whose smallest
/// eigenvalue is `inf a(v,v) / (v,v)` over grid functions vanishing on Ω_d.
pub fn energy_matrix(op: &DiscreteOperator) -> BandedMatrix {
    let interior = op.interior();
    let a = op.a_gen().submatrix(interior);
    let w: Vec<f64> = interior.iter().map(|&i| op.cells()[i].width).collect();
    let band = a.lower().max(a.upper());
    let mut c = BandedMatrix::zeros(a.dim(), band, band);
    for i in 0..a.dim() {
        for j in c.row_range(i) {
            let s = -0.5 * (w[i] * a.get(i, j) + w[j] * a.get(j, i));
            if s != 0.0 {
                c.set(i, j, s / (w[i] * w[j]).sqrt());
            }
        }
    }
    c
}

/// Smallest eigenvalue of the energy matrix by shifted inverse iteration
/// with Rayleigh-quotient estimates.
pub fn coercivity_sigma(op: &DiscreteOperator) -> Result<SigmaEstimate> {
    if !op.is_symmetric_kernel() {
        return Err(Error::InvalidArgument(
            "the coercivity estimate requires a symmetric kernel".into(),
        ));
    }
    let c = energy_matrix(op);
    let n = c.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("no interior cells".into()));
    }
    let scale = c.max_abs().max(f64::MIN_POSITIVE);
    // C is positive semidefinite; a small negative shift keeps C − sI definite
    let shift = -1e-6 * scale;
    let lu = LinearSolver::factor(&c.shifted(-shift, 1.0))?;

    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i as f64) * 0.7).sin()).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let tol = 1e-12 * scale;
    let mut residual = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        lu.solve_in_place(&mut v);
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let cv = c.matvec(&v);
        let sigma: f64 = v.iter().zip(&cv).map(|(a, b)| a * b).sum();
        residual = cv.iter().zip(&v).map(|(a, b)| (a - sigma * b).powi(2)).sum::<f64>().sqrt();
        if residual <= tol {
            return Ok(finish(op, sigma, residual, it, &v));
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

fn finish(op: &DiscreteOperator, sigma: f64, residual: f64, iterations: usize, v: &[f64]) -> SigmaEstimate {
    let mut mode = vec![0.0; op.len()];
    for (k, &i) in op.interior().iter().enumerate() {
        mode[i] = v[k] / op.cells()[i].width.sqrt();
    }
    let peak = mode.iter().copied().fold(0.0, |m: f64, x| if x.abs() > m.abs() { x } else { m });
    if peak != 0.0 {
        mode.iter_mut().for_each(|x| *x /= peak);
    }
    SigmaEstimate {
        sigma,
        residual,
        iterations,
        eigenvector: mode,
    }
}
