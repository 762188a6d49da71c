//! Triplet CSV export of the assembled matrices with a JSON sidecar.

use std::path::Path;

use serde::Serialize;

use super::DiscreteOperator;
use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::linalg::BandedMatrix;

#[derive(Serialize)]
struct CellMeta {
    center: f64,
    width: f64,
    region: &'static str,
}

#[derive(Serialize)]
struct Meta<'a> {
    cells: usize,
    interior: usize,
    absorbing: usize,
    horizon: f64,
    bandwidth: usize,
    symmetric_kernel: bool,
    files: [&'a str; 2],
    grid: Vec<CellMeta>,
}

fn region_name(r: Region) -> &'static str {
    match r {
        Region::Interior => "interior",
        Region::Absorbing => "absorbing",
        Region::Collar => "collar",
        Region::Outside => "outside",
    }
}

fn write_triplets(m: &BandedMatrix, path: &Path, header: Option<&str>) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut file = std::fs::File::create(path)?;
    if let Some(h) = header {
        use std::io::Write;
        writeln!(file, "{h}")?;
    }
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["i", "j", "value"]).map_err(csv_err)?;
    for i in 0..m.dim() {
        for (j, v) in m.row(i) {
            if v != 0.0 {
                w.write_record([i.to_string(), j.to_string(), format!("{v:.16e}")])
                    .map_err(csv_err)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

impl DiscreteOperator {
    /// Writes `operator_a_star.csv`, `operator_a_gen.csv` and
    /// `operator_meta.json` into `dir`. `header` is prepended verbatim to
    /// each CSV.
    pub fn dump(&self, dir: &Path, header: Option<&str>) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let files = ["operator_a_star.csv", "operator_a_gen.csv"];
        write_triplets(&self.a_star, &dir.join(files[0]), header)?;
        write_triplets(&self.a_gen, &dir.join(files[1]), header)?;
        let meta = Meta {
            cells: self.len(),
            interior: self.interior.len(),
            absorbing: self.absorbing.len(),
            horizon: self.horizon,
            bandwidth: self.bandwidth(),
            symmetric_kernel: self.symmetric_kernel,
            files,
            grid: self
                .cells
                .iter()
                .map(|c| CellMeta {
                    center: c.center,
                    width: c.width,
                    region: region_name(c.region),
                })
                .collect(),
        };
        let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.into()))?;
        std::fs::write(dir.join("operator_meta.json"), json)?;
        Ok(())
    }
}
