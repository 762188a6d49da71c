//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use jumpexit_core::montecarlo::{
    brownian_path, path_rng, simulate_ensemble, simulate_path, z_scores, InitialCondition, PathMode,
};
use jumpexit_core::solver::{coercivity_sigma, evolve, exit_moments, mean_exit_time, energy_matrix};
use jumpexit_core::{AbsorbingSpec, DiscreteOperator, DomainPartition, JumpKernel, Stepping, Table};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

const CHECKPOINTS: [f64; 5] = [1.0, 5.0, 10.0, 25.0, 50.0];
const N_PATHS: usize = 100_000;
const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn criterion_1() -> Outcome {
    let op = analytic(1.0 / 256.0);
    let traj = evolve(&op, &op.uniform_density(), &Stepping::new(0.01, 50.0)).unwrap();
    let sup = traj
        .times
        .iter()
        .zip(&traj.survival)
        .map(|(t, s)| (s - (-0.1 * t).exp()).abs())
        .fold(0.0, f64::max);
    let m = exit_moments(&op, 2).unwrap();
    let m1_err = m[0].interior_values(&op).map(|v| (v - 10.0).abs() / 10.0).fold(0.0, f64::max);
    let m2_err = m[1].interior_values(&op).map(|v| (v - 200.0).abs() / 200.0).fold(0.0, f64::max);
    check(
        sup <= 1e-2 && m1_err <= 0.02 && m2_err <= 0.03,
        format!("sup|S - exp(-t/10)| = {sup:.3e} (<= 1e-2), max rel err m1 = {m1_err:.3e} (<= 0.02), m2 = {m2_err:.3e} (<= 0.03)"),
    )
}

fn criterion_2() -> Outcome {
    let kernel = cp_kernel();
    let part = analytic_partition();
    let ens = simulate_ensemble(&kernel, &part, InitialCondition::Uniform, N_PATHS, SEED, 500.0).unwrap();
    let (mean, _) = ens.mean_exit_time();
    let curve = ens.empirical_survival(&CHECKPOINTS);
    let z_exact = z_scores(&curve, |t| (-0.1 * t).exp());
    let op = analytic(1.0 / 512.0);
    let traj = evolve(&op, &op.uniform_density(), &Stepping::new(0.01, 50.0)).unwrap();
    let z_solver = z_scores(&curve, |t| traj.survival_at(t));
    let zmax = z_exact.iter().chain(&z_solver).map(|z| z.abs()).fold(0.0, f64::max);
    check(
        (mean - 10.0).abs() <= 0.095 && zmax <= 3.0,
        format!(
            "mean exit time {mean:.4} (10 +- 0.095), z vs exp {:?}, z vs solver {:?}",
            fmt_z(&z_exact),
            fmt_z(&z_solver)
        ),
    )
}

fn fmt_z(z: &[f64]) -> Vec<String> {
    z.iter().map(|v| format!("{v:.2}")).collect()
}

fn criterion_3() -> Outcome {
    let kernel = cp_kernel();
    let part = analytic_partition();
    let ens = simulate_ensemble(&kernel, &part, InitialCondition::Uniform, N_PATHS, SEED + 1, 500.0).unwrap();
    let p = ens.first_jump_exit_fraction();
    let tol = 3.0 * (0.25 / N_PATHS as f64).sqrt();
    check((p - 0.5).abs() <= tol, format!("first-jump exit fraction {p:.5} (0.5 +- {tol:.5})"))
}

fn identity_kernels() -> Vec<(&'static str, JumpKernel)> {
    let hat = Table::displacement(vec![-1.0, 0.0, 1.0], vec![0.0, 0.6, 0.0]).unwrap();
    let step = Table::displacement(vec![-1.0, 0.0, 0.0, 1.0], vec![0.05, 0.05, 0.15, 0.15]).unwrap();
    vec![
        ("compound_poisson_uniform", cp_kernel()),
        ("truncated_stable(1/2)", stable_half()),
        ("truncated_stable(3/2)", stable_three_halves()),
        ("tabulated symmetric", JumpKernel::tabulated(hat, 1.0).unwrap()),
        ("tabulated asymmetric", JumpKernel::tabulated(step, 1.0).unwrap()),
    ]
}

fn criterion_4() -> Outcome {
    let partitions: Vec<(&[[f64; 2]], AbsorbingSpec)> = vec![
        (&[[0.0, 1.0]], AbsorbingSpec::Full),
        (&[[0.0, 1.0], [1.5, 2.5]], AbsorbingSpec::Full),
        (
            &[[0.0, 1.0]],
            AbsorbingSpec::Explicit(jumpexit_core::IntervalSet::single(-1.0, -0.25)),
        ),
        (&[[0.0, 1.0]], AbsorbingSpec::Empty),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    let mut cases = 0;
    for (name, kernel) in identity_kernels() {
        for h in [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] {
            for (omega, spec) in &partitions {
                let op = operator(&kernel, omega, spec.clone(), h);
                let u: Vec<f64> = (0..op.len()).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
                let v: Vec<f64> = (0..op.len()).map(|_| rand::Rng::random::<f64>(&mut rng) - 0.5).collect();
                let mut results = vec![
                    ("adjoint", op.adjoint_check(100, &mut rng)),
                    ("constants", op.constant_defect()),
                    ("weighted transpose", op.weighted_transpose_defect()),
                    ("balance", op.balance_check(&u, 20, &mut rng).worst()),
                    ("divergence", op.divergence_theorem_check(&u)),
                ];
                if kernel.is_symmetric() {
                    results.push(("green", op.green_identity_check(&u, &v)));
                }
                for (check_name, value) in results {
                    cases += 1;
                    // NaN counts as the worst case
                    if value.is_nan() || value > worst {
                        worst = value;
                        worst_at = format!("{check_name}, {name}, h = {h}");
                    }
                }
            }
        }
    }
    check(worst <= 1e-10, format!("{cases} checks, worst relative defect {worst:.3e} ({worst_at}) (<= 1e-10)"))
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    for kernel in [cp_kernel(), stable_half(), stable_three_halves()] {
        let op = operator(&kernel, &[[0.0, 1.0], [1.5, 2.5]], AbsorbingSpec::Full, 1.0 / 64.0);
        let u0 = op.point_mass(0.5).unwrap();
        let traj = evolve(&op, &u0, &Stepping::new(0.01, 20.0).snapshot_every(usize::MAX)).unwrap();
        worst = worst.max(traj.conservation_defect());
    }
    let op = operator(&stable_half(), &[[0.0, 1.0]], AbsorbingSpec::Empty, 1.0 / 64.0);
    let traj = evolve(&op, &op.uniform_density(), &Stepping::new(0.01, 50.0).snapshot_every(usize::MAX)).unwrap();
    let censored = traj.survival.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    check(
        worst <= 1e-10 && censored <= 1e-12,
        format!("max |S + F - 1| = {worst:.3e} (<= 1e-10), censored max |S - 1| = {censored:.3e} (<= 1e-12)"),
    )
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    for kernel in [cp_kernel(), stable_half(), stable_three_halves()] {
        for h in [1.0 / 32.0, 1.0 / 128.0] {
            let op = operator(&kernel, &[[0.0, 1.0]], AbsorbingSpec::Full, h);
            worst = worst.max(op.symmetry_defect());
        }
    }
    check(worst <= 1e-12, format!("max ||A - A^T||_max / ||A||_max = {worst:.3e} (<= 1e-12)"))
}

fn criterion_7() -> Outcome {
    let op = analytic(1.0 / 64.0);
    let est = coercivity_sigma(&op).unwrap();
    let dense = energy_matrix(&op).to_dense().symmetric_eigen();
    let (k_min, dense_min) = dense
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |a, (k, v)| if v < a.1 { (k, v) } else { a });
    let mode = dense.eigenvectors.column(k_min);
    let spread = mode.max() - mode.min();
    let constant_mode = spread.abs() <= 1e-8 * mode.amax();
    let rel = (est.sigma - 0.1).abs() / 0.1;
    let agree = (est.sigma - dense_min).abs() <= 1e-10;
    let censored = coercivity_sigma(&operator(&cp_kernel(), &[[0.0, 1.0]], AbsorbingSpec::Empty, 1.0 / 64.0))
        .unwrap()
        .sigma;
    check(
        rel <= 0.02 && agree && constant_mode && censored.abs() <= 1e-10,
        format!(
            "sigma = {:.6} (0.1 +- 2%), dense min eig = {dense_min:.6}, constant minimizer = {constant_mode}, \
             censored sigma = {censored:.3e} (<= 1e-10)",
            est.sigma
        ),
    )
}

fn criterion_8() -> Outcome {
    let count_test = |kernel: &JumpKernel, rate: f64, n: usize, seed: u64| {
        let counts: Vec<f64> = (0..n as u64)
            .map(|i| {
                let mut rng = path_rng(seed, i);
                simulate_path(kernel, PathMode::Free, 0.0, &mut rng, 50.0).unwrap().jumps() as f64
            })
            .collect();
        let expected = rate * 50.0;
        let m = mean(&counts);
        let z = (m - expected) / (expected / n as f64).sqrt();
        (m, expected, z)
    };
    let (m_cp, e_cp, z_cp) = count_test(&cp_kernel(), 0.2, 10_000, SEED);
    let rate_half = 6.0 / 1e-3f64.sqrt() - 4.0;
    let (m_st, e_st, z_st) = count_test(&stable_half(), rate_half, 200, SEED + 2);

    let n = 10_000;
    let sq: Vec<f64> = (0..n as u64)
        .map(|i| {
            let mut rng = path_rng(SEED + 3, i);
            let p = brownian_path(0.0, 0.5, 50.0, &mut rng).unwrap();
            p.positions.last().unwrap().powi(2)
        })
        .collect();
    let msd = mean(&sq);
    check(
        z_cp.abs() <= 3.0 && z_st.abs() <= 3.0 && (msd - 50.0).abs() <= 0.05 * 50.0,
        format!(
            "mean jumps {m_cp:.3} vs {e_cp} (z = {z_cp:.2}), {m_st:.1} vs {e_st:.1} (z = {z_st:.2}), Brownian MSD(50) = {msd:.3} (50 +- 5%)"
        ),
    )
}

fn criterion_9() -> Outcome {
    let errs: Vec<f64> = [64.0, 128.0, 256.0]
        .iter()
        .map(|n| {
            let op = analytic(1.0 / n);
            mean_exit_time(&op)
                .unwrap()
                .interior_values(&op)
                .map(|v| (v - 10.0).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    check(
        ratios.iter().all(|&r| r >= 2.0),
        format!("max errors {:?}, ratios {ratios:.4?} (>= 2)", errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>()),
    )
}

fn criterion_10() -> Outcome {
    let kernel = cp_kernel();
    let omega = [[0.0, 1.0], [1.5, 2.5]];
    let part = DomainPartition::from_pairs(&omega, 1.0, AbsorbingSpec::Full).unwrap();
    let op: DiscreteOperator = operator(&kernel, &omega, AbsorbingSpec::Full, 1.0 / 512.0);
    let traj = evolve(&op, &op.uniform_density(), &Stepping::new(0.01, 50.0).snapshot_every(usize::MAX)).unwrap();
    let ens = simulate_ensemble(&kernel, &part, InitialCondition::Uniform, N_PATHS, SEED + 4, 1000.0).unwrap();
    let curve = ens.empirical_survival(&CHECKPOINTS);
    let z = z_scores(&curve, |t| traj.survival_at(t));
    let zmax = z.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let gap_exits = ens.exits_into(1.0, 1.5);
    let gap_flux: f64 = op
        .absorbing()
        .iter()
        .zip(&traj.absorbed_by_cell)
        .filter(|(&j, _)| {
            let c = op.cells()[j].center;
            (1.0..=1.5).contains(&c)
        })
        .map(|(_, m)| m)
        .sum();
    check(
        zmax <= 3.0 && gap_exits > 0 && gap_flux > 0.0,
        format!("z vs solver {:?}, MC exits into [1, 1.5]: {gap_exits}, solver mass absorbed there: {gap_flux:.4}", fmt_z(&z)),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("analytic exit law", criterion_1),
        ("Monte Carlo agreement", criterion_2),
        ("first-jump exit probability", criterion_3),
        ("calculus identity suite", criterion_4),
        ("conservation", criterion_5),
        ("symmetry", criterion_6),
        ("coercivity", criterion_7),
        ("regime reproduction", criterion_8),
        ("grid convergence", criterion_9),
        ("disconnected domain", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} [{name}]: {verdict} ({:.1}s) {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            out.detail
        );
        if !out.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria failed");
        ExitCode::FAILURE
    }
}
