//! User-supplied kernels given as tables of values with linear interpolation.

use std::path::Path;

use super::profile::Piece;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    /// `γ(x, y) = f(y − x)` with `f` piecewise linear through `(dx, value)`
    /// nodes. A repeated abscissa encodes a jump: the first copy is the
    /// left limit, the last copy the right limit.
    Displacement { dx: Vec<f64>, values: Vec<f64> },
    /// `γ(x, y)` bilinear on the tensor grid `xs × ys`; `values[i * ys.len() + j]`
    /// holds `γ(xs[i], ys[j])`. Zero outside the grid.
    TwoPoint {
        xs: Vec<f64>,
        ys: Vec<f64>,
        values: Vec<f64>,
    },
}

fn check_values(values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::Table(format!("values must be finite and nonnegative, found {v}")));
    }
    Ok(())
}

impl Table {
    pub fn displacement(dx: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if dx.len() != values.len() || dx.len() < 2 {
            return Err(Error::Table("need at least two (dx, value) rows".into()));
        }
        if dx.windows(2).any(|w| w[1] < w[0]) || dx.iter().any(|d| !d.is_finite()) {
            return Err(Error::Table("dx column must be finite and nondecreasing".into()));
        }
        check_values(&values)?;
        Ok(Table::Displacement { dx, values })
    }

    pub fn two_point(xs: Vec<f64>, ys: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || ys.len() < 2 || values.len() != xs.len() * ys.len() {
            return Err(Error::Table("two-point table must be a full grid of at least 2x2 nodes".into()));
        }
        for axis in [&xs, &ys] {
            if axis.windows(2).any(|w| w[1] <= w[0]) || axis.iter().any(|v| !v.is_finite()) {
                return Err(Error::Table("grid coordinates must be finite and strictly increasing".into()));
            }
        }
        check_values(&values)?;
        Ok(Table::TwoPoint { xs, ys, values })
    }

    /// Loads a CSV of `(dx, value)` pairs or `(x, y, value)` triples.
    /// Lines starting with `#` are skipped, as is a non-numeric header row.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(false)
            .from_path(path)
            .map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (k, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(r) => rows.push(r),
                Err(_) if k == 0 => continue,
                Err(e) => return Err(Error::Table(format!("{} row {}: {e}", path.display(), k + 1))),
            }
        }
        match rows.first().map(Vec::len) {
            Some(2) => {
                let (dx, values) = rows.iter().map(|r| (r[0], r[1])).unzip();
                Self::displacement(dx, values)
            }
            Some(3) => Self::from_triples(&rows),
            _ => Err(Error::Table(format!(
                "{}: expected 2 or 3 numeric columns",
                path.display()
            ))),
        }
    }

    fn from_triples(rows: &[Vec<f64>]) -> Result<Self> {
        let mut xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let mut ys: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        for axis in [&mut xs, &mut ys] {
            axis.sort_by(f64::total_cmp);
            axis.dedup();
        }
        let mut values = vec![f64::NAN; xs.len() * ys.len()];
        for r in rows {
            let i = xs.partition_point(|&v| v < r[0]);
            let j = ys.partition_point(|&v| v < r[1]);
            values[i * ys.len() + j] = r[2];
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Table("(x, y, value) triples do not cover a full tensor grid".into()));
        }
        Self::two_point(xs, ys, values)
    }

    pub fn scaled(&self, c: f64) -> Table {
        match self {
            Table::Displacement { dx, values } => Table::Displacement {
                dx: dx.clone(),
                values: values.iter().map(|v| v * c).collect(),
            },
            Table::TwoPoint { xs, ys, values } => Table::TwoPoint {
                xs: xs.clone(),
                ys: ys.clone(),
                values: values.iter().map(|v| v * c).collect(),
            },
        }
    }

    pub fn max_value(&self) -> f64 {
        let values = match self {
            Table::Displacement { values, .. } | Table::TwoPoint { values, .. } => values,
        };
        values.iter().copied().fold(0.0, f64::max)
    }

    /// Interpolated value before the horizon cutoff is applied.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        match self {
            Table::Displacement { dx, values } => interp_right(dx, values, y - x),
            Table::TwoPoint { xs, ys, values } => {
                let Some((i, tx)) = locate(xs, x) else { return 0.0 };
                let Some((j, ty)) = locate(ys, y) else { return 0.0 };
                let n = ys.len();
                let row = |ii: usize| {
                    let v0 = values[ii * n + j];
                    let v1 = values[ii * n + (j + 1).min(n - 1)];
                    v0 + (v1 - v0) * ty
                };
                let r0 = row(i);
                let r1 = row((i + 1).min(xs.len() - 1));
                r0 + (r1 - r0) * tx
            }
        }
    }

    /// Linear pieces of `y ↦ value(x, y)` clipped to `[x − λ, x + λ]`.
    pub(crate) fn profile(&self, x: f64, horizon: f64) -> Vec<Piece> {
        let (lo_cut, hi_cut) = (x - horizon, x + horizon);
        let mut out = Vec::new();
        let mut push = |a: f64, b: f64, va: f64, vb: f64| {
            if b <= a {
                return;
            }
            let piece = Piece::linear(a, b, va, vb);
            if let Some(p) = piece.restrict(&crate::geometry::Interval::new(lo_cut, hi_cut)) {
                out.push(p);
            }
        };
        match self {
            Table::Displacement { dx, values } => {
                for k in 0..dx.len() - 1 {
                    push(x + dx[k], x + dx[k + 1], values[k], values[k + 1]);
                }
            }
            Table::TwoPoint { xs, ys, values } => {
                let Some((i, tx)) = locate(xs, x) else { return out };
                let n = ys.len();
                let i1 = (i + 1).min(xs.len() - 1);
                let col = |j: usize| values[i * n + j] + (values[i1 * n + j] - values[i * n + j]) * tx;
                for j in 0..n - 1 {
                    push(ys[j], ys[j + 1], col(j), col(j + 1));
                }
            }
        }
        out
    }

    /// Node coordinates used to probe symmetry.
    pub(crate) fn probe_points(&self) -> Vec<(f64, f64)> {
        match self {
            Table::Displacement { dx, .. } => {
                let mut pts = Vec::new();
                for &d in dx {
                    pts.push((0.0, d));
                    pts.push((0.0, 0.5 * d));
                }
                pts
            }
            Table::TwoPoint { xs, ys, .. } => {
                let refine = |axis: &[f64]| {
                    let mut v = axis.to_vec();
                    v.extend(axis.windows(2).map(|w| 0.5 * (w[0] + w[1])));
                    v
                };
                let (px, py) = (refine(xs), refine(ys));
                let mut pts = Vec::with_capacity(px.len() * py.len());
                for &x in &px {
                    for &y in &py {
                        pts.push((x, y));
                    }
                }
                pts
            }
        }
    }
}

/// Index of the segment containing `t` and the local coordinate in `[0, 1]`.
fn locate(nodes: &[f64], t: f64) -> Option<(usize, f64)> {
    let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
    if t < first || t > last {
        return None;
    }
    let k = nodes.partition_point(|&v| v <= t).saturating_sub(1).min(nodes.len() - 2);
    let (a, b) = (nodes[k], nodes[k + 1]);
    Some((k, ((t - a) / (b - a)).clamp(0.0, 1.0)))
}

/// Piecewise-linear interpolation that takes right limits at repeated nodes.
fn interp_right(nodes: &[f64], values: &[f64], t: f64) -> f64 {
    let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
    if t < first || t > last {
        return 0.0;
    }
    let k = nodes.partition_point(|&v| v <= t);
    if k == nodes.len() {
        return values[k - 1];
    }
    let (a, b) = (nodes[k - 1], nodes[k]);
    if b == a {
        return values[k];
    }
    let s = (t - a) / (b - a);
    values[k - 1] + (values[k] - values[k - 1]) * s
}
