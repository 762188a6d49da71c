//! Discrete nonlocal-calculus identities: adjointness, conservation and the
//! balance-law conditions, each reported as a relative discrepancy.

use rand::Rng;
use rand_distr::StandardNormal;

use super::DiscreteOperator;

/// Largest relative violation of each balance-law condition.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BalanceReport {
    /// `max |ψ_ij + ψ_ji|`, absolute.
    pub antisymmetry: f64,
    /// `|Σ_{i,j∈S} ψ_ij|` relative to `Σ |ψ_ij|`.
    pub self_interaction: f64,
    /// `|Σ_{S×S'} ψ + Σ_{S'×S} ψ|` relative to the absolute sums.
    pub action_reaction: f64,
    /// `|D(S ∪ S') − D(S) − D(S')|` relative to the absolute sums.
    pub additivity: f64,
}

impl BalanceReport {
    pub fn worst(&self) -> f64 {
        self.antisymmetry
            .max(self.self_interaction)
            .max(self.action_reaction)
            .max(self.additivity)
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num.abs() / den
    } else {
        num.abs()
    }
}

impl DiscreteOperator {
    fn weighted_dot_interior(&self, a: &[f64], b: &[f64]) -> f64 {
        self.interior.iter().map(|&i| self.cells[i].width * a[i] * b[i]).sum()
    }

    fn random_interior_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        for &i in &self.interior {
            v[i] = rng.sample(StandardNormal);
        }
        v
    }

    /// Generator annihilates constants: `‖A·1‖_∞` over interior rows relative to `‖A‖_max`.
    pub fn constant_defect(&self) -> f64 {
        let scale = self.a_gen.max_abs();
        let worst = self
            .interior
            .iter()
            .map(|&i| self.a_gen.row(i).map(|(_, a)| a).sum::<f64>().abs())
            .fold(0.0, f64::max);
        ratio(worst, scale)
    }

    /// `‖A − Aᵀ‖_max / ‖A‖_max` on the interior block.
    pub fn symmetry_defect(&self) -> f64 {
        self.block_defect(|i, j| self.a_gen.get(i, j) - self.a_gen.get(j, i), |i, j| {
            self.a_gen.get(i, j).abs()
        })
    }

    /// Symmetry of the width-weighted generator `W·A` on the interior block;
    /// reduces to [`symmetry_defect`](Self::symmetry_defect) on uniform grids.
    pub fn weighted_symmetry_defect(&self) -> f64 {
        let w = |i: usize| self.cells[i].width;
        self.block_defect(
            |i, j| w(i) * self.a_gen.get(i, j) - w(j) * self.a_gen.get(j, i),
            |i, j| (w(i) * self.a_gen.get(i, j)).abs(),
        )
    }

    /// `W·A* = (W·A)ᵀ` on the interior block, for any kernel.
    pub fn weighted_transpose_defect(&self) -> f64 {
        let w = |i: usize| self.cells[i].width;
        self.block_defect(
            |i, j| w(i) * self.a_star.get(i, j) - w(j) * self.a_gen.get(j, i),
            |i, j| (w(i) * self.a_star.get(i, j)).abs(),
        )
    }

    fn block_defect(&self, diff: impl Fn(usize, usize) -> f64, size: impl Fn(usize, usize) -> f64) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for &i in &self.interior {
            for j in self.a_gen.row_range(i) {
                if self.cells[j].region != crate::geometry::Region::Interior {
                    continue;
                }
                worst = worst.max(diff(i, j).abs());
                scale = scale.max(size(i, j));
            }
        }
        ratio(worst, scale)
    }

    /// Largest `|⟨v, A*u⟩ − ⟨Av, u⟩|` over random interior-supported pairs,
    /// in the width-weighted inner product, relative to the same sums taken
    /// in absolute value.
    pub fn adjoint_check<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> f64 {
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let u = self.random_interior_vector(rng);
            let v = self.random_interior_vector(rng);
            let a_star_u = self.a_star.matvec(&u);
            let a_v = self.a_gen.matvec(&v);
            let lhs = self.weighted_dot_interior(&v, &a_star_u);
            let rhs = self.weighted_dot_interior(&a_v, &u);
            let abs_u: Vec<f64> = u.iter().map(|x| x.abs()).collect();
            let abs_v: Vec<f64> = v.iter().map(|x| x.abs()).collect();
            let abs_op = abs_map(&self.a_star);
            let scale = self.weighted_dot_interior(&abs_v, &abs_op.matvec(&abs_u));
            worst = worst.max(ratio(lhs - rhs, 2.0 * scale));
        }
        worst
    }

    /// Mass change in Ω plus absorbed flux, relative to the gross exchange.
    /// Values of `u` on absorbing cells are ignored (the volume constraint).
    pub fn divergence_theorem_check(&self, u: &[f64]) -> f64 {
        let u = self.constrained(u);
        let au = self.a_star.matvec(&u);
        let change = self.weighted_dot_interior(&au, &vec![1.0; u.len()]);
        let absorbed = self.absorption_rate(&u);
        let gross: f64 = self
            .interior
            .iter()
            .map(|&i| {
                self.cells[i].width * self.a_star.row(i).map(|(j, a)| (a * u[j]).abs()).sum::<f64>()
            })
            .sum();
        ratio(change + absorbed, gross)
    }

    fn constrained(&self, u: &[f64]) -> Vec<f64> {
        let mut u = u.to_vec();
        for &j in &self.absorbing {
            u[j] = 0.0;
        }
        u
    }

    /// Mass flux `ψ_ij = u_j F[j][i] − u_i F[i][j]` into cell `i` from cell `j`.
    fn psi(&self, u: &[f64], i: usize, j: usize) -> f64 {
        u[j] * self.transfer.get(j, i) - u[i] * self.transfer.get(i, j)
    }

    /// Checks the four balance-law conditions on random cell subsets.
    pub fn balance_check<R: Rng + ?Sized>(&self, u: &[f64], trials: usize, rng: &mut R) -> BalanceReport {
        let n = self.len();
        let mut report = BalanceReport::default();
        for i in 0..n {
            for j in self.transfer.row_range(i) {
                let s = self.psi(u, i, j) + self.psi(u, j, i);
                report.antisymmetry = report.antisymmetry.max(s.abs());
            }
        }
        for _ in 0..trials {
            // 0: neither, 1: S, 2: S'
            let label: Vec<u8> = (0..n).map(|_| rng.random_range(0..3u8)).collect();
            let mut self_sum = 0.0;
            let mut self_abs = 0.0;
            let mut cross = 0.0;
            let mut cross_abs = 0.0;
            let mut div = [0.0f64; 3];
            let mut div_abs = 0.0;
            for i in 0..n {
                let mut out_i = 0.0;
                for j in self.transfer.row_range(i) {
                    let p = self.psi(u, i, j);
                    out_i += p;
                    let (li, lj) = (label[i], label[j]);
                    if li == 1 && lj == 1 {
                        self_sum += p;
                        self_abs += p.abs();
                    }
                    if li != 0 && lj != 0 && li != lj {
                        cross += p;
                        cross_abs += p.abs();
                    }
                    if li != 0 {
                        div_abs += p.abs();
                    }
                }
                match label[i] {
                    1 => div[1] += out_i,
                    2 => div[2] += out_i,
                    _ => {}
                }
            }
            let mut union = 0.0;
            for i in 0..n {
                if label[i] != 0 {
                    union += self.transfer.row_range(i).map(|j| self.psi(u, i, j)).sum::<f64>();
                }
            }
            report.self_interaction = report.self_interaction.max(ratio(self_sum, self_abs));
            report.action_reaction = report.action_reaction.max(ratio(cross, cross_abs));
            report.additivity = report.additivity.max(ratio(union - div[1] - div[2], div_abs));
        }
        report
    }

    /// Nonlocal Green's identity for symmetric kernels:
    /// `Σ_Ω w v (Lu) = −½ Σ_{i,j} F_ij (u_j − u_i)(v_j − v_i) − Σ_{Ω_d} w v (Lu)`
    /// with `L` the unconstrained generator on Ω ∪ Ω_d.
    pub fn green_identity_check(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.len();
        let lu = |i: usize| -> f64 {
            self.transfer
                .row(i)
                .map(|(j, f)| f * (u[j] - u[i]))
                .sum::<f64>()
        };
        let mut interior = 0.0;
        let mut collar = 0.0;
        let mut scale = 0.0;
        for i in 0..n {
            let term = v[i] * lu(i);
            scale += self.transfer.row(i).map(|(j, f)| (f * (u[j] - u[i]) * v[i]).abs()).sum::<f64>();
            if self.cells[i].region == crate::geometry::Region::Interior {
                interior += term;
            } else {
                collar += term;
            }
        }
        let mut energy = 0.0;
        for i in 0..n {
            for (j, f) in self.transfer.row(i) {
                energy += f * (u[j] - u[i]) * (v[j] - v[i]);
            }
        }
        ratio(interior + 0.5 * energy + collar, scale)
    }
}

fn abs_map(m: &crate::linalg::BandedMatrix) -> crate::linalg::BandedMatrix {
    let mut out = m.clone();
    for i in 0..m.dim() {
        for (j, a) in m.row(i) {
            out.set(i, j, a.abs());
        }
    }
    out
}
