//! Bilinear heightmap terrain and sphere obstacles.

use super::OceanError;
use crate::util::seeded_rng;
use nalgebra::Vector3;
use rand::Rng;
use std::io::{BufRead, Write};

/// Seafloor depth grid: depth below the surface (m, positive down), row-major
/// with `x` along rows and `y` along columns.
#[derive(Debug, Clone)]
pub struct Terrain {
    rows: usize,
    cols: usize,
    cell: f64,
    origin: (f64, f64),
    depths: Vec<f64>,
}

/// A spherical obstacle for sonar and collision queries.
#[derive(Debug, Clone, Copy)]
pub struct SphereObstacle {
    pub center: Vector3<f64>,
    pub radius: f64,
}

impl Terrain {
    pub fn new(rows: usize, cols: usize, cell: f64, origin: (f64, f64), depths: Vec<f64>) -> Result<Self, OceanError> {
        if rows < 2 || cols < 2 {
            return Err(OceanError::InvalidParams("terrain needs at least a 2x2 grid".into()));
        }
        if !(cell > 0.0) {
            return Err(OceanError::InvalidParams("cell size must be > 0".into()));
        }
        if depths.len() != rows * cols {
            return Err(OceanError::InvalidParams(format!(
                "expected {} depth values, got {}",
                rows * cols,
                depths.len()
            )));
        }
        if depths.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
            return Err(OceanError::InvalidParams("all depths must be finite and > 0".into()));
        }
        Ok(Self { rows, cols, cell, origin, depths })
    }

    /// Uniform depth everywhere.
    pub fn flat(rows: usize, cols: usize, cell: f64, depth: f64) -> Result<Self, OceanError> {
        Self::new(rows, cols, cell, (0.0, 0.0), vec![depth; rows * cols])
    }

    /// Seeded fractal heightmap: a few octaves of bilinear value noise,
    /// rescaled into `[min_depth, max_depth]`.
    pub fn procedural(
        seed: u64,
        rows: usize,
        cols: usize,
        cell: f64,
        min_depth: f64,
        max_depth: f64,
    ) -> Result<Self, OceanError> {
        if !(0.0 < min_depth && min_depth < max_depth) {
            return Err(OceanError::InvalidParams("require 0 < min_depth < max_depth".into()));
        }
        let mut rng = seeded_rng(seed);
        let mut acc = vec![0.0f64; rows * cols];
        let octaves: [(usize, f64); 3] = [(4, 1.0), (8, 0.5), (16, 0.25)];
        for (lattice, weight) in octaves {
            let lat: Vec<f64> = (0..(lattice + 1) * (lattice + 1)).map(|_| rng.gen::<f64>()).collect();
            for r in 0..rows {
                for c in 0..cols {
                    let fx = r as f64 / (rows - 1) as f64 * lattice as f64;
                    let fy = c as f64 / (cols - 1) as f64 * lattice as f64;
                    let (i, j) = ((fx as usize).min(lattice - 1), (fy as usize).min(lattice - 1));
                    let (tx, ty) = (fx - i as f64, fy - j as f64);
                    let at = |a: usize, b: usize| lat[a * (lattice + 1) + b];
                    let v = at(i, j) * (1.0 - tx) * (1.0 - ty)
                        + at(i + 1, j) * tx * (1.0 - ty)
                        + at(i, j + 1) * (1.0 - tx) * ty
                        + at(i + 1, j + 1) * tx * ty;
                    acc[r * cols + c] += weight * v;
                }
            }
        }
        let lo = acc.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = acc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = (hi - lo).max(1e-12);
        let depths: Vec<f64> = acc
            .iter()
            .map(|v| min_depth + (v - lo) / span * (max_depth - min_depth))
            .collect();
        Self::new(rows, cols, cell, (0.0, 0.0), depths)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cell(&self) -> f64 {
        self.cell
    }

    /// World-space extents covered by the grid: `(x_min, x_max, y_min, y_max)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (
            self.origin.0,
            self.origin.0 + (self.rows - 1) as f64 * self.cell,
            self.origin.1,
            self.origin.1 + (self.cols - 1) as f64 * self.cell,
        )
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (x0, x1, y0, y1) = self.bounds();
        x >= x0 && x <= x1 && y >= y0 && y <= y1
    }

    pub fn max_depth(&self) -> f64 {
        self.depths.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_depth(&self) -> f64 {
        self.depths.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Bilinear depth lookup; out-of-bounds coordinates clamp to the edge
    /// (check [`Terrain::contains`] when the clamping matters).
    pub fn depth_at(&self, x: f64, y: f64) -> f64 {
        let fx = ((x - self.origin.0) / self.cell).clamp(0.0, (self.rows - 1) as f64);
        let fy = ((y - self.origin.1) / self.cell).clamp(0.0, (self.cols - 1) as f64);
        let i = (fx as usize).min(self.rows - 2);
        let j = (fy as usize).min(self.cols - 2);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let at = |a: usize, b: usize| self.depths[a * self.cols + b];
        at(i, j) * (1.0 - tx) * (1.0 - ty)
            + at(i + 1, j) * tx * (1.0 - ty)
            + at(i, j + 1) * (1.0 - tx) * ty
            + at(i + 1, j + 1) * tx * ty
    }

    /// Plain-text export: header `rows cols cell origin_x origin_y`, then one
    /// row of depths per line.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {} {} {} {}", self.rows, self.cols, self.cell, self.origin.0, self.origin.1)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{:.6}", self.depths[r * self.cols + c])).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }

    /// Parse the plain-text grid format written by [`Terrain::write_text`].
    pub fn read_text<R: BufRead>(r: R) -> Result<Self, OceanError> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| OceanError::TerrainIo("empty terrain file".into()))?
            .map_err(|e| OceanError::TerrainIo(e.to_string()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 5 {
            return Err(OceanError::TerrainIo("header must be: rows cols cell origin_x origin_y".into()));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| OceanError::TerrainIo(format!("bad header field {s}: {e}")));
        let rows = parse(head[0])? as usize;
        let cols = parse(head[1])? as usize;
        let cell = parse(head[2])?;
        let origin = (parse(head[3])?, parse(head[4])?);
        let mut depths = Vec::with_capacity(rows * cols);
        for line in lines {
            let line = line.map_err(|e| OceanError::TerrainIo(e.to_string()))?;
            for tok in line.split_whitespace() {
                depths.push(
                    tok.parse::<f64>()
                        .map_err(|e| OceanError::TerrainIo(format!("bad depth {tok}: {e}")))?,
                );
            }
        }
        Self::new(rows, cols, cell, origin, depths)
    }
}
