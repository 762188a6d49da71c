use jumpexit_core::montecarlo::{brownian_path, path_rng, simulate_ensemble, simulate_path, z_scores, PathMode};
use jumpexit_core::solver::{coercivity_sigma, evolve, exit_moments, mean_exit_time};
use jumpexit_core::{DensityTrajectory, DiscreteOperator, InitialCondition, Region, Stepping};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{InitialConfig, Model, PathModeName, ProcessName, RunConfig};
use crate::output::{num, row, Output};
use crate::CliError;

/// Tolerance of every `verify` check.
pub const VERIFY_TOL: f64 = 1e-10;

/// Survival grid resolution of `mc_survival.csv`.
const SURVIVAL_POINTS: usize = 200;

pub fn initial_condition(init: &InitialConfig) -> InitialCondition {
    match init {
        InitialConfig::Point(x) => InitialCondition::Point(*x),
        InitialConfig::Keyword(_) => InitialCondition::Uniform,
    }
}

fn initial_density(op: &DiscreteOperator, init: &InitialConfig) -> Result<Vec<f64>, CliError> {
    match init {
        InitialConfig::Point(x) => Ok(op.point_mass(*x)?),
        InitialConfig::Keyword(_) => Ok(op.uniform_density()),
    }
}

pub fn assemble(model: &Model) -> Result<DiscreteOperator, CliError> {
    Ok(DiscreteOperator::assemble(&model.kernel, &model.grid, &model.partition)?)
}

fn stepping(cfg: &RunConfig, t_end: f64) -> Result<Stepping, CliError> {
    Ok(Stepping::new(cfg.solver.dt, t_end)
        .scheme(cfg.scheme()?)
        .snapshot_every(usize::MAX))
}

/// Fills in `mc.t_max` as 50 × the largest discrete mean exit time, or the
/// solver horizon when nothing is absorbed.
pub fn resolve_t_max(cfg: &mut RunConfig, model: &Model) -> Result<(), CliError> {
    if cfg.mc.t_max.is_some() {
        return Ok(());
    }
    let t_max = if model.partition.absorbing().is_empty() {
        cfg.solver.t_end
    } else {
        let op = assemble(model)?;
        let m = mean_exit_time(&op)?;
        50.0 * m.interior_values(&op).fold(0.0, f64::max)
    };
    cfg.mc.t_max = Some(t_max);
    Ok(())
}

fn maybe_dump(cfg: &RunConfig, op: &DiscreteOperator, out: &Output) -> Result<(), CliError> {
    if cfg.output.dump_operator {
        op.dump(out.dir(), Some(&out.header()))?;
    }
    Ok(())
}

fn trajectory(cfg: &RunConfig, op: &DiscreteOperator, init: &InitialConfig, t_end: f64) -> Result<DensityTrajectory, CliError> {
    let u0 = initial_density(op, init)?;
    let traj = evolve(op, &u0, &stepping(cfg, t_end)?)?;
    for w in &traj.warnings {
        eprintln!("warning: {w}");
    }
    Ok(traj)
}

pub fn solve(cfg: &RunConfig, model: &Model, out: &Output) -> Result<(), CliError> {
    let op = assemble(model)?;
    maybe_dump(cfg, &op, out)?;
    let traj = trajectory(cfg, &op, &cfg.solver.initial, cfg.solver.t_end)?;
    let rows = (0..traj.times.len()).map(|k| row(&[traj.times[k], traj.survival[k], traj.absorbed[k]]));
    let path = out.csv("survival.csv", &["t", "S", "F"], rows)?;
    let last = traj.times.len() - 1;
    println!(
        "S({}) = {}  conservation defect {:.3e}  -> {}",
        traj.times[last],
        traj.survival[last],
        traj.conservation_defect(),
        path.display()
    );
    Ok(())
}

fn write_moments(op: &DiscreteOperator, k_max: usize, out: &Output) -> Result<(), CliError> {
    let m = if k_max == 1 { vec![mean_exit_time(op)?] } else { exit_moments(op, k_max)? };
    let mut columns = vec!["x".to_string()];
    columns.extend((1..=k_max).map(|k| format!("m_{k}")));
    let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
    let rows = op.interior().iter().map(|&i| {
        let mut values = vec![op.cells()[i].center];
        values.extend(m.iter().map(|mk| mk.values[i]));
        row(&values)
    });
    let path = out.csv("met.csv", &columns, rows)?;
    let max = m[0].interior_values(op).fold(0.0, f64::max);
    println!("max m_1 = {max}  -> {}", path.display());
    Ok(())
}

pub fn exit_time(cfg: &RunConfig, model: &Model, out: &Output) -> Result<(), CliError> {
    let op = assemble(model)?;
    maybe_dump(cfg, &op, out)?;
    write_moments(&op, 1, out)?;
    if op.is_symmetric_kernel() {
        let s = coercivity_sigma(&op)?;
        let body = format!(
            "estimate = {}\nresidual = {}\niterations = {}\n",
            num(s.sigma),
            num(s.residual),
            s.iterations
        );
        let path = out.write("sigma.txt", &body)?;
        println!("sigma = {}  -> {}", s.sigma, path.display());
    } else {
        println!("kernel is asymmetric; sigma.txt not written");
    }
    Ok(())
}

pub fn moments(cfg: &RunConfig, model: &Model, out: &Output) -> Result<(), CliError> {
    let op = assemble(model)?;
    maybe_dump(cfg, &op, out)?;
    write_moments(&op, cfg.solver.k_max, out)
}

pub fn simulate(cfg: &RunConfig, model: &Model, out: &Output) -> Result<(), CliError> {
    let t_max = cfg.mc.t_max.expect("t_max resolved");
    let ens = simulate_ensemble(
        &model.kernel,
        &model.partition,
        initial_condition(&cfg.mc.initial),
        cfg.mc.n_paths,
        cfg.mc.seed,
        t_max,
    )?;
    let rows = ens.records.iter().map(|r| {
        let y = r.exit_location.map(num).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            r.path_id,
            num(r.x0),
            num(r.exit_time),
            y,
            r.jumps,
            u8::from(r.censored())
        )
    });
    out.csv("ensemble.csv", &["path_id", "x0", "T", "y_exit", "N", "censored"], rows)?;
    let horizon = cfg.solver.t_end.min(t_max);
    let times: Vec<f64> = (0..=SURVIVAL_POINTS)
        .map(|k| horizon * k as f64 / SURVIVAL_POINTS as f64)
        .collect();
    let curve = ens.empirical_survival(&times);
    let rows = (0..times.len()).map(|k| row(&[curve.times[k], curve.survival[k], curve.stderr[k]]));
    let path = out.csv("mc_survival.csv", &["t", "S_hat", "stderr"], rows)?;
    let (mean, se) = ens.mean_exit_time();
    println!(
        "{} paths, {} censored at t_max = {t_max}; mean exit time {mean} ± {se}  -> {}",
        ens.n_paths(),
        ens.censored_count(),
        path.display()
    );
    Ok(())
}

pub fn paths(cfg: &RunConfig, model: &Model, out: &Output) -> Result<(), CliError> {
    let p = &cfg.paths;
    if p.n_paths == 0 {
        return Err(CliError::validation("paths.n_paths must be at least 1"));
    }
    let mut rows = Vec::new();
    for id in 0..p.n_paths as u64 {
        let mut rng = path_rng(cfg.mc.seed, id);
        let path = match p.process {
            ProcessName::Brownian => brownian_path(p.x0, p.dt, p.t_max, &mut rng)?,
            ProcessName::Kernel => {
                let mode = match p.mode {
                    PathModeName::Free => PathMode::Free,
                    PathModeName::Confined => PathMode::Confined(&model.partition),
                };
                simulate_path(&model.kernel, mode, p.x0, &mut rng, p.t_max)?
            }
        };
        for (t, x) in path.times.iter().zip(&path.positions) {
            rows.push(format!("{id},{},{}", num(*t), num(*x)));
        }
    }
    let path = out.csv("paths.csv", &["path_id", "t", "x"], rows)?;
    println!("{} paths  -> {}", p.n_paths, path.display());
    Ok(())
}

struct Check {
    name: &'static str,
    value: f64,
}

pub fn verify(cfg: &RunConfig, model: &Model, out: &Output) -> Result<(), CliError> {
    let op = assemble(model)?;
    maybe_dump(cfg, &op, out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.mc.seed);
    let u: Vec<f64> = (0..op.len()).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
    let v: Vec<f64> = (0..op.len()).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
    let balance = op.balance_check(&u, 10, &mut rng);
    let mut checks = vec![
        Check { name: "constants", value: op.constant_defect() },
        Check { name: "adjoint", value: op.adjoint_check(20, &mut rng) },
        Check { name: "weighted_transpose", value: op.weighted_transpose_defect() },
        Check { name: "divergence", value: op.divergence_theorem_check(&u) },
        Check { name: "balance", value: balance.worst() },
    ];
    let t_end = cfg.solver.t_end.min(100.0 * cfg.solver.dt);
    let traj = trajectory(cfg, &op, &cfg.solver.initial, t_end)?;
    checks.push(Check { name: "conservation", value: traj.conservation_defect() });
    if op.is_symmetric_kernel() {
        checks.push(Check { name: "symmetry", value: op.weighted_symmetry_defect() });
        checks.push(Check { name: "green_identity", value: op.green_identity_check(&u, &v) });
    }
    // a censored set must also conserve mass without any absorption
    if op.absorbing().is_empty() {
        let lost = 1.0 - traj.survival[traj.survival.len() - 1];
        checks.push(Check { name: "censored_survival", value: lost.abs() });
    }
    let mut failed = Vec::new();
    let rows: Vec<String> = checks
        .iter()
        .map(|c| {
            let pass = c.value <= VERIFY_TOL;
            println!("{:<20} {:>12.3e}  {}", c.name, c.value, if pass { "PASS" } else { "FAIL" });
            if !pass {
                failed.push(c.name);
            }
            format!("{},{},{},{}", c.name, num(c.value), num(VERIFY_TOL), if pass { "pass" } else { "fail" })
        })
        .collect();
    out.csv("verify.csv", &["check", "value", "tolerance", "result"], rows)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::verification(format!("identity checks failed: {}", failed.join(", "))))
    }
}

pub fn compare(cfg: &RunConfig, model: &Model, out: &Output) -> Result<(), CliError> {
    let checkpoints = &cfg.compare.checkpoints;
    if checkpoints.is_empty() || checkpoints.iter().any(|&t| !(t >= 0.0)) {
        return Err(CliError::validation("compare.checkpoints must be a non-empty list of times ≥ 0"));
    }
    if let InitialConfig::Point(x) = cfg.mc.initial {
        if model.partition.classify(x) != Region::Interior {
            return Err(CliError::validation(format!("mc.initial = {x} lies outside Ω")));
        }
    }
    let t_end = checkpoints.iter().cloned().fold(cfg.solver.t_end, f64::max);
    let op = assemble(model)?;
    let traj = trajectory(cfg, &op, &cfg.mc.initial, t_end)?;
    let t_max = cfg.mc.t_max.expect("t_max resolved");
    let ens = simulate_ensemble(
        &model.kernel,
        &model.partition,
        initial_condition(&cfg.mc.initial),
        cfg.mc.n_paths,
        cfg.mc.seed,
        t_max,
    )?;
    let curve = ens.empirical_survival(checkpoints);
    let z = z_scores(&curve, |t| traj.survival_at(t));
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    let rows: Vec<String> = (0..checkpoints.len())
        .map(|k| {
            let t = checkpoints[k];
            let s = traj.survival_at(t);
            let pass = z[k].abs() <= cfg.compare.z_max;
            worst = worst.max(z[k].abs());
            if !pass {
                failed.push(t);
            }
            println!(
                "t = {t:<8} S = {s:.6}  S_hat = {:.6} ± {:.6}  z = {:+.3}",
                curve.survival[k], curve.stderr[k], z[k]
            );
            row(&[t, s, curve.survival[k], curve.stderr[k], z[k]])
        })
        .collect();
    out.csv("compare.csv", &["t", "S", "S_hat", "stderr", "z"], rows)?;
    if failed.is_empty() {
        println!("max |z| = {worst:.3} ≤ {}", cfg.compare.z_max);
        Ok(())
    } else {
        Err(CliError::verification(format!(
            "|z| > {} at t = {:?}",
            cfg.compare.z_max, failed
        )))
    }
}
