use super::ExitEnsemble;

/// Sum in a fixed binary-tree order, independent of how the input was produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Records the estimate at each time is based on.
    pub at_risk: Vec<usize>,
}

/// `Ŝ(t)` = fraction of paths with `T > t`. Censored paths count as
/// survivors before `t_max` and are dropped from the denominator from
/// `t_max` on.
pub(super) fn empirical_survival(ens: &ExitEnsemble, times: &[f64]) -> SurvivalCurve {
    let n = ens.records.len();
    let censored = ens.censored_count();
    let mut curve = SurvivalCurve {
        times: times.to_vec(),
        survival: Vec::with_capacity(times.len()),
        stderr: Vec::with_capacity(times.len()),
        at_risk: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let (alive, total) = if t < ens.t_max {
            let alive = ens.records.iter().filter(|r| r.censored() || r.exit_time > t).count();
            (alive, n)
        } else {
            let alive = ens.records.iter().filter(|r| !r.censored() && r.exit_time > t).count();
            (alive, n - censored)
        };
        let (s, se) = if total == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let s = alive as f64 / total as f64;
            (s, (s * (1.0 - s) / total as f64).sqrt())
        };
        curve.survival.push(s);
        curve.stderr.push(se);
        curve.at_risk.push(total);
    }
    curve
}

/// `(Ŝ(t) − S_ref(t)) / stderr(t)` per checkpoint. A zero standard error
/// gives 0 on exact agreement and ±∞ otherwise.
pub fn z_scores(curve: &SurvivalCurve, reference: impl Fn(f64) -> f64) -> Vec<f64> {
    curve
        .times
        .iter()
        .zip(curve.survival.iter().zip(&curve.stderr))
        .map(|(&t, (&s, &se))| {
            let d = s - reference(t);
            if se > 0.0 {
                d / se
            } else if d == 0.0 {
                0.0
            } else {
                d.signum() * f64::INFINITY
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::ExitRecord;

    fn ensemble(times: &[Option<f64>], t_max: f64) -> ExitEnsemble {
        let records = times
            .iter()
            .enumerate()
            .map(|(i, t)| ExitRecord {
                path_id: i as u64,
                x0: 0.5,
                exit_time: t.unwrap_or(t_max),
                exit_location: t.map(|_| -0.5),
                jumps: 1,
            })
            .collect();
        ExitEnsemble { records, seed: 0, t_max }
    }

    #[test]
    fn survival_counts_and_censoring() {
        let e = ensemble(&[Some(1.0), Some(2.0), None, Some(4.0)], 5.0);
        let c = e.empirical_survival(&[0.0, 1.5, 4.5, 5.0]);
        assert_eq!(c.survival, vec![1.0, 0.75, 0.25, 0.0]);
        assert_eq!(c.at_risk, vec![4, 4, 4, 3]);
        assert_eq!(c.stderr[0], 0.0);
        assert!((c.stderr[1] - (0.75f64 * 0.25 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn z_score_edge_cases() {
        let e = ensemble(&[Some(1.0), Some(3.0)], 10.0);
        let c = e.empirical_survival(&[0.0, 2.0]);
        let z = z_scores(&c, |_| 0.5);
        assert_eq!(z[0], f64::INFINITY);
        assert_eq!(z[1], 0.0);
    }

    #[test]
    fn pairwise_sum_matches_naive_for_integers() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
