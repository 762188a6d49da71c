//! Discrete forward (Fokker–Planck) and backward (generator) operators of
//! the confined master equation on a cell grid.
//!
//! Both operators are built from one cell-to-cell transfer matrix
//! `F[i][j]`, the probability mass per unit time moved from cell `i` to
//! cell `j` per unit density in cell `i`. Only cells of Ω ∪ Ω_d take part:
//! jumps into the censored collar Ω_I \ Ω_d are excluded from both gain and
//! loss. With cell widths `w`:
//!
//! ```text
//! (A f)_i  = Σ_j F[i][j] (f_j − f_i) / w_i
//! (A* u)_i = Σ_j (u_j F[j][i] − u_i F[i][j]) / w_i
//! ```
//!
//! on interior rows, and identity rows on absorbing cells. Entries use
//! midpoint collocation, `F[i][j] = w_i w_j γ(x_i, x_j)`, except near the
//! diagonal of singular kernels where the cell integrals of the kernel are
//! evaluated exactly.

mod checks;
mod dump;

use rayon::prelude::*;

pub use checks::BalanceReport;

use crate::error::{Error, Result};
use crate::geometry::{Cell, DomainPartition, Grid, Region};
use crate::kernel::JumpKernel;
use crate::linalg::BandedMatrix;

/// Sparse map from interior densities to the absorption flux density on
/// each absorbing cell.
#[derive(Debug, Clone, Default)]
pub struct FluxMap {
    /// For each absorbing cell: `(active index of source cell, weight)`.
    rows: Vec<Vec<(usize, f64)>>,
}

impl FluxMap {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Flux density `∫_Ω u(x) γ(x, y_j) dx` for each absorbing cell `j`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(i, w)| w * u[i]).sum())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    horizon: f64,
    symmetric_kernel: bool,
    cells: Vec<Cell>,
    interior: Vec<usize>,
    absorbing: Vec<usize>,
    transfer: BandedMatrix,
    a_star: BandedMatrix,
    a_gen: BandedMatrix,
    flux_to_d: FluxMap,
}

/// Canonical `∫_a^b ν(s) ds` for a symmetric translation-invariant kernel,
/// computed so that mirrored intervals give bit-identical results.
fn displacement_mass(kernel: &JumpKernel, a: f64, b: f64) -> Result<f64> {
    if b <= 0.0 {
        displacement_mass(kernel, -b, -a)
    } else if a >= 0.0 {
        kernel.interval_rate(0.0, a, b)
    } else {
        Ok(kernel.interval_rate(0.0, 0.0, -a)? + kernel.interval_rate(0.0, 0.0, b)?)
    }
}

fn transfer_entry(kernel: &JumpKernel, ci: &Cell, cj: &Cell) -> Result<f64> {
    let d = cj.center - ci.center;
    let near = ci.width.max(cj.width) * 2.0 + kernel.epsilon();
    if kernel.is_singular() && d.abs() <= near {
        let into_j = displacement_mass(kernel, d - 0.5 * cj.width, d + 0.5 * cj.width)?;
        let from_i = displacement_mass(kernel, d - 0.5 * ci.width, d + 0.5 * ci.width)?;
        Ok(0.5 * (ci.width * into_j + cj.width * from_i))
    } else {
        Ok(ci.width * cj.width * kernel.evaluate(ci.center, cj.center))
    }
}

impl DiscreteOperator {
    pub fn assemble(kernel: &JumpKernel, grid: &Grid, partition: &DomainPartition) -> Result<Self> {
        let (kh, ph) = (kernel.horizon(), partition.horizon());
        if (kh - ph).abs() > 1e-12 * kh.max(ph) {
            return Err(Error::HorizonMismatch {
                kernel: kh,
                partition: ph,
            });
        }
        if kernel.is_singular() && kernel.epsilon() == 0.0 {
            return Err(Error::Unregularized);
        }
        let cells: Vec<Cell> = grid
            .cells()
            .iter()
            .copied()
            .filter(|c| matches!(c.region, Region::Interior | Region::Absorbing))
            .collect();
        let n = cells.len();
        let reach = kh + grid.max_width();

        // row-local accumulation in a fixed order: identical for any thread count
        let rows: Vec<Vec<(usize, f64)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let ci = &cells[i];
                let start = cells.partition_point(|c| c.center < ci.center - reach);
                let mut row = Vec::new();
                for (j, cj) in cells.iter().enumerate().skip(start) {
                    if cj.center > ci.center + reach {
                        break;
                    }
                    if j == i {
                        continue;
                    }
                    let f = transfer_entry(kernel, ci, cj)?;
                    if f != 0.0 {
                        row.push((j, f));
                    }
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;

        let band = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0);

        let mut transfer = BandedMatrix::zeros(n, band, band);
        for (i, row) in rows.iter().enumerate() {
            for &(j, f) in row {
                transfer.set(i, j, f);
            }
        }

        let mut a_gen = BandedMatrix::zeros(n, band, band);
        let mut a_star = BandedMatrix::zeros(n, band, band);
        let mut interior = Vec::new();
        let mut absorbing = Vec::new();
        for (i, c) in cells.iter().enumerate() {
            match c.region {
                Region::Interior => {
                    interior.push(i);
                    let mut loss = 0.0;
                    for &(j, f) in &rows[i] {
                        let w = f / c.width;
                        a_gen.set(i, j, w);
                        loss += w;
                    }
                    for j in transfer.row_range(i) {
                        if j != i {
                            a_star.set(i, j, transfer.get(j, i) / c.width);
                        }
                    }
                    a_gen.set(i, i, -loss);
                    a_star.set(i, i, -loss);
                }
                _ => {
                    absorbing.push(i);
                    a_gen.set(i, i, 1.0);
                    a_star.set(i, i, 1.0);
                }
            }
        }

        let flux_rows = absorbing
            .iter()
            .map(|&j| {
                interior
                    .iter()
                    .filter_map(|&i| {
                        let f = transfer.get(i, j);
                        (f != 0.0).then(|| (i, f / cells[j].width))
                    })
                    .collect()
            })
            .collect();

        Ok(DiscreteOperator {
            horizon: kh,
            symmetric_kernel: kernel.is_symmetric(),
            cells,
            interior,
            absorbing,
            transfer,
            a_star,
            a_gen,
            flux_to_d: FluxMap { rows: flux_rows },
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn is_symmetric_kernel(&self) -> bool {
        self.symmetric_kernel
    }

    /// Active cells (Ω ∪ Ω_d) in grid order; all vectors are indexed by these.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn absorbing(&self) -> &[usize] {
        &self.absorbing
    }

    pub fn widths(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.width).collect()
    }

    pub fn bandwidth(&self) -> usize {
        self.transfer.lower()
    }

    /// Cell-to-cell transfer rates `F[i][j]`.
    pub fn transfer(&self) -> &BandedMatrix {
        &self.transfer
    }

    /// Forward operator A*.
    pub fn a_star(&self) -> &BandedMatrix {
        &self.a_star
    }

    /// Generator A.
    pub fn a_gen(&self) -> &BandedMatrix {
        &self.a_gen
    }

    pub fn flux_to_d(&self) -> &FluxMap {
        &self.flux_to_d
    }

    /// Discrete loss rate `Λ_h` on each interior cell.
    pub fn loss_rates(&self) -> Vec<f64> {
        self.interior.iter().map(|&i| -self.a_gen.get(i, i)).collect()
    }

    /// Rate of absorption from each interior cell, `Σ_{j∈Ω_d} F[i][j] / w_i`.
    pub fn exit_rates(&self) -> Vec<f64> {
        self.interior
            .iter()
            .map(|&i| {
                let w = self.cells[i].width;
                self.absorbing.iter().map(|&j| self.transfer.get(i, j)).sum::<f64>() / w
            })
            .collect()
    }

    /// `Σ_{i∈Ω} w_i u_i`.
    pub fn interior_mass(&self, u: &[f64]) -> f64 {
        self.interior.iter().map(|&i| self.cells[i].width * u[i]).sum()
    }

    /// Total absorption rate `Σ_{j∈Ω_d} w_j (flux_to_d · u)_j`.
    pub fn absorption_rate(&self, u: &[f64]) -> f64 {
        self.flux_to_d
            .apply(u)
            .iter()
            .zip(&self.absorbing)
            .map(|(f, &j)| f * self.cells[j].width)
            .sum()
    }

    /// Index of the active cell containing `x`, if any.
    pub fn locate(&self, x: f64) -> Option<usize> {
        self.cells.iter().position(|c| c.lo() <= x && x <= c.hi())
    }

    /// Density `1/w` on the interior cell containing `x`.
    pub fn point_mass(&self, x: f64) -> Result<Vec<f64>> {
        let i = self
            .locate(x)
            .filter(|&i| self.cells[i].region == Region::Interior)
            .ok_or_else(|| Error::InvalidInitialDensity(format!("x = {x} is not in an interior cell")))?;
        let mut u = vec![0.0; self.len()];
        u[i] = 1.0 / self.cells[i].width;
        Ok(u)
    }

    /// Uniform probability density on Ω.
    pub fn uniform_density(&self) -> Vec<f64> {
        let measure: f64 = self.interior.iter().map(|&i| self.cells[i].width).sum();
        let mut u = vec![0.0; self.len()];
        for &i in &self.interior {
            u[i] = 1.0 / measure;
        }
        u
    }
}
