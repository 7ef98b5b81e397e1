//! Inclusive `START[:END[:STEP]]` grids.

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

pub fn parse_grid(s: &str) -> Result<Grid> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad grid component '{p}' in '{s}'")))
        .collect::<Result<_>>()?;
    let grid = match parts[..] {
        [start] => Grid { start, end: start, step: 1.0 },
        [start, end] => Grid { start, end, step: 1.0 },
        [start, end, step] => Grid { start, end, step },
        _ => bail!("grid '{s}' must be START[:END[:STEP]]"),
    };
    if !(grid.step > 0.0) || grid.end < grid.start || !grid.start.is_finite() || !grid.end.is_finite() {
        bail!("grid '{s}' must have START <= END and STEP > 0");
    }
    Ok(grid)
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }

    pub fn integers(&self) -> Result<Vec<usize>> {
        self.values()
            .into_iter()
            .map(|v| {
                if v.fract() != 0.0 || v < 1.0 {
                    bail!("expected positive integers, got {v}");
                }
                Ok(v as usize)
            })
            .collect()
    }
}
