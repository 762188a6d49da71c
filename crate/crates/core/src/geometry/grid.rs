use super::{DomainPartition, Region};
use crate::error::{Error, Result};

/// Relative slack on the `h ≤ λ/4` resolution check.
const RESOLUTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub center: f64,
    pub width: f64,
    pub region: Region,
}

impl Cell {
    pub fn lo(&self) -> f64 {
        self.center - 0.5 * self.width
    }

    pub fn hi(&self) -> f64 {
        self.center + 0.5 * self.width
    }
}

/// Cell partition of Ω ∪ Ω_I.
///
/// Each labelled piece of the partition is tiled separately with
/// `round(length / h)` equal cells, so no cell straddles a region boundary
/// and widths are uniform within a piece.
#[derive(Debug, Clone)]
pub struct Grid {
    h: f64,
    cells: Vec<Cell>,
}

impl Grid {
    pub fn build(partition: &DomainPartition, h: f64) -> Result<Self> {
        let lambda = partition.horizon();
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("cell width must be positive, got {h}")));
        }
        let limit = 0.25 * lambda * (1.0 + RESOLUTION_TOL);
        if h > limit {
            return Err(Error::InvalidGrid(format!(
                "cell width {h} exceeds lambda/4 = {}; the horizon is under-resolved",
                0.25 * lambda
            )));
        }
        let mut cells = Vec::new();
        for (piece, region) in partition.labelled_pieces() {
            let len = piece.length();
            let n = ((len / h).round() as usize).max(1);
            let width = len / n as f64;
            if width > limit {
                return Err(Error::InvalidGrid(format!(
                    "piece {piece} of length {len} refits to cell width {width} > lambda/4; use a smaller h"
                )));
            }
            for k in 0..n {
                let center = piece.lo + (k as f64 + 0.5) * width;
                debug_assert_eq!(partition.classify(center), region);
                cells.push(Cell { center, width, region });
            }
        }
        Ok(Grid { h, cells })
    }

    /// Nominal cell width requested at construction.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn max_width(&self) -> f64 {
        self.cells.iter().map(|c| c.width).fold(0.0, f64::max)
    }

    pub fn count(&self, region: Region) -> usize {
        self.cells.iter().filter(|c| c.region == region).count()
    }

    pub fn total_width(&self) -> f64 {
        self.cells.iter().map(|c| c.width).sum()
    }
}
