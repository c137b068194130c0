//! Rasterised indicators and their density-based normalisation.

use super::set::GeomSet;
use crate::error::{FracError, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const GRID_VERSION: &str = "grid-v1";
const INTERIOR: f64 = 15.0 / 16.0;
const EXTERIOR: f64 = 1.0 / 16.0;

/// Cell-centred indicator samples, row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorGrid {
    pub origin: Vec<f64>,
    pub h: f64,
    pub shape: Vec<usize>,
    pub data: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub version: String,
    pub origin: Vec<f64>,
    pub h: f64,
    pub shape: Vec<usize>,
    pub dtype: String,
    pub order: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellClass {
    Interior,
    Exterior,
    Boundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedGrid {
    pub grid: IndicatorGrid,
    pub classes: Vec<CellClass>,
    /// Neighbourhood half-widths (in cells) that were tested, finest first.
    pub scales: Vec<usize>,
}

impl IndicatorGrid {
    pub fn sample(set: &GeomSet, origin: Vec<f64>, h: f64, shape: Vec<usize>) -> Self {
        let total: usize = shape.iter().product();
        let mut data = Vec::with_capacity(total);
        let mut x = vec![0.0; shape.len()];
        for idx in 0..total {
            let mut rem = idx;
            for ax in (0..shape.len()).rev() {
                let i = rem % shape[ax];
                rem /= shape[ax];
                x[ax] = origin[ax] + (i as f64 + 0.5) * h;
            }
            data.push(u8::from(set.contains(&x)));
        }
        Self { origin, h, shape, data }
    }

    pub fn center(&self, idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.shape.len()];
        let mut rem = idx;
        for ax in (0..self.shape.len()).rev() {
            let i = rem % self.shape[ax];
            rem /= self.shape[ax];
            x[ax] = self.origin[ax] + (i as f64 + 0.5) * self.h;
        }
        x
    }

    fn coords(&self, idx: usize) -> Vec<usize> {
        let mut c = vec![0; self.shape.len()];
        let mut rem = idx;
        for ax in (0..self.shape.len()).rev() {
            c[ax] = rem % self.shape[ax];
            rem /= self.shape[ax];
        }
        c
    }

    /// Fraction of set cells in the cube of half-width `k` around `idx`
    /// (clipped to the grid).
    pub fn density(&self, idx: usize, k: usize) -> f64 {
        let c = self.coords(idx);
        let d = self.shape.len();
        let lo: Vec<usize> = c.iter().map(|&v| v.saturating_sub(k)).collect();
        let hi: Vec<usize> = c.iter().zip(&self.shape).map(|(&v, &n)| (v + k).min(n - 1)).collect();
        let mut cur = lo.clone();
        let (mut inside, mut total) = (0usize, 0usize);
        loop {
            let mut flat = 0;
            for ax in 0..d {
                flat = flat * self.shape[ax] + cur[ax];
            }
            inside += self.data[flat] as usize;
            total += 1;
            let mut ax = d;
            loop {
                if ax == 0 {
                    return inside as f64 / total as f64;
                }
                ax -= 1;
                if cur[ax] < hi[ax] {
                    cur[ax] += 1;
                    break;
                }
                cur[ax] = lo[ax];
            }
        }
    }

    /// Writes `<stem>.bin` (one byte per cell) and `<stem>.json` (header).
    pub fn write(&self, stem: &Path) -> Result<()> {
        let header = GridHeader {
            version: GRID_VERSION.into(),
            origin: self.origin.clone(),
            h: self.h,
            shape: self.shape.clone(),
            dtype: "u8".into(),
            order: "row-major, last axis fastest".into(),
        };
        let io = |e: std::io::Error| FracError::Input(e.to_string());
        std::fs::write(stem.with_extension("bin"), &self.data).map_err(io)?;
        std::fs::write(stem.with_extension("json"), serde_json::to_string_pretty(&header).unwrap()).map_err(io)?;
        Ok(())
    }

    pub fn read(stem: &Path) -> Result<Self> {
        let io = |e: std::io::Error| FracError::Input(e.to_string());
        let header: GridHeader = serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json")).map_err(io)?)
            .map_err(|e| FracError::Input(e.to_string()))?;
        if header.version != GRID_VERSION {
            return Err(FracError::Input(format!("unsupported grid version {}", header.version)));
        }
        let data = std::fs::read(stem.with_extension("bin")).map_err(io)?;
        if data.len() != header.shape.iter().product::<usize>() {
            return Err(FracError::Input("grid payload does not match header shape".into()));
        }
        Ok(Self { origin: header.origin, h: header.h, shape: header.shape, data })
    }
}

/// Classifies every cell by its local density at half-widths `1..=scales`:
/// interior if some scale reaches 15/16, exterior if some scale drops to
/// 1/16 (finest scale wins), boundary otherwise.
pub fn normalize_representative(grid: &IndicatorGrid, scales: usize) -> ClassifiedGrid {
    let ks: Vec<usize> = (1..=scales.max(1)).collect();
    let classes = (0..grid.data.len())
        .map(|idx| {
            for &k in &ks {
                let rho = grid.density(idx, k);
                if rho >= INTERIOR {
                    return CellClass::Interior;
                }
                if rho <= EXTERIOR {
                    return CellClass::Exterior;
                }
            }
            CellClass::Boundary
        })
        .collect();
    ClassifiedGrid { grid: grid.clone(), classes, scales: ks }
}
