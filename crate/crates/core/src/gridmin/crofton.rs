//! Cauchy–Crofton edge weights and the discrete energy.

use super::{GridError, LabelGrid, MinimizeOptions, Mode};
use crate::tensions::EnergyParams;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Neighborhood vectors, one per direction in `[0, π)`, with their
/// Crofton weights for cell size `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct CroftonStencil {
    /// `(row offset, column offset, weight)`
    pub half: Vec<(i64, i64, f64)>,
}

impl CroftonStencil {
    /// `directions` must be 4, 8 or 16.
    pub fn new(directions: usize, h: f64) -> Result<Self, GridError> {
        let mut vecs: Vec<(i64, i64)> = vec![(1, 0), (1, 1), (0, 1), (-1, 1)];
        if directions >= 8 {
            vecs.extend([(2, 1), (1, 2), (-1, 2), (-2, 1)]);
        }
        if directions >= 16 {
            vecs.extend([
                (3, 1),
                (3, 2),
                (2, 3),
                (1, 3),
                (-1, 3),
                (-2, 3),
                (-3, 2),
                (-3, 1),
            ]);
        }
        if ![4, 8, 16].contains(&directions) {
            return Err(GridError::InvalidOptions(format!(
                "Crofton direction count must be 4, 8 or 16, got {directions}"
            )));
        }
        let mut dirs: Vec<(f64, i64, i64)> = vecs
            .into_iter()
            .map(|(a, b)| ((b as f64).atan2(a as f64), a, b))
            .collect();
        dirs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let k = dirs.len();
        let half = (0..k)
            .map(|i| {
                let prev = if i == 0 {
                    dirs[k - 1].0 - PI
                } else {
                    dirs[i - 1].0
                };
                let next = if i + 1 == k {
                    dirs[0].0 + PI
                } else {
                    dirs[i + 1].0
                };
                let dphi = 0.5 * (next - prev);
                let (_, a, b) = dirs[i];
                let len = ((a * a + b * b) as f64).sqrt();
                // x step a is a column step; y step b is an upward row step
                (-b, a, h * dphi / (2.0 * len))
            })
            .collect();
        Ok(CroftonStencil { half })
    }

    /// Both orientations of every vector.
    pub fn full(&self) -> Vec<(i64, i64, f64)> {
        self.half
            .iter()
            .flat_map(|&(dr, dc, w)| [(dr, dc, w), (-dr, -dc, w)])
            .collect()
    }

    /// Largest row or column reach of the stencil.
    pub fn reach(&self) -> i64 {
        self.half
            .iter()
            .map(|&(dr, dc, _)| dr.abs().max(dc.abs()))
            .max()
            .unwrap_or(0)
    }
}

/// Length of the interface between fluids `i` and `j` with 8 directions.
pub fn crofton_perimeter(grid: &LabelGrid, pair: (u8, u8)) -> f64 {
    crofton_perimeter_with(grid, pair, 8).expect("8 is a supported direction count")
}

pub fn crofton_perimeter_with(
    grid: &LabelGrid,
    pair: (u8, u8),
    directions: usize,
) -> Result<f64, GridError> {
    let stencil = CroftonStencil::new(directions, grid.h())?;
    let (a, b) = (pair.0.min(pair.1), pair.0.max(pair.1));
    if a == b {
        return Ok(0.0);
    }
    let per_direction: Vec<f64> = stencil
        .half
        .par_iter()
        .map(|&(dr, dc, w)| {
            let mut cuts = 0usize;
            for row in 0..grid.height() {
                for col in 0..grid.width() {
                    let i = grid.index(row, col);
                    if !grid.domain[i] {
                        continue;
                    }
                    if let Some(j) = grid.offset(row, col, dr, dc) {
                        if grid.domain[j] {
                            let (p, q) = (grid.labels[i], grid.labels[j]);
                            if p.min(q) == a && p.max(q) == b {
                                cuts += 1;
                            }
                        }
                    }
                }
            }
            w * cuts as f64
        })
        .collect();
    // fixed summation order keeps the result independent of scheduling
    Ok(per_direction.iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub surface: f64,
    pub wetting: f64,
    pub gravity: f64,
    pub volume_penalty: f64,
    pub total: f64,
}

/// Volume penalty `C Σ_j max(0, |V_j − v_j| − a/2)` with cell area `a`:
/// zero exactly when every volume is within half a cell of its target.
pub(crate) fn volume_penalty(
    volumes: &[f64; 3],
    targets: &[f64; 3],
    c: f64,
    cell_area: f64,
) -> f64 {
    (0..3)
        .map(|j| ((volumes[j] - targets[j]).abs() - 0.5 * cell_area).max(0.0))
        .sum::<f64>()
        * c
}

/// Number of cell sides facing outside the domain or off the grid.
pub(crate) fn boundary_sides(grid: &LabelGrid, row: usize, col: usize) -> u32 {
    [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)]
        .into_iter()
        .filter(|&(dr, dc)| match grid.offset(row, col, dr, dc) {
            Some(j) => !grid.domain[j],
            None => true,
        })
        .count() as u32
}

pub fn grid_energy(
    grid: &LabelGrid,
    p: &EnergyParams,
    opts: &MinimizeOptions,
) -> Result<EnergyBreakdown, GridError> {
    let stencil = CroftonStencil::new(opts.crofton_directions, grid.h())?;
    let sigma = sigma_table(p);
    let per_direction: Vec<f64> = stencil
        .half
        .par_iter()
        .map(|&(dr, dc, w)| {
            let mut acc = 0.0;
            for row in 0..grid.height() {
                for col in 0..grid.width() {
                    let i = grid.index(row, col);
                    if !grid.domain[i] {
                        continue;
                    }
                    if let Some(j) = grid.offset(row, col, dr, dc) {
                        if grid.domain[j] {
                            acc += sigma[grid.labels[i] as usize][grid.labels[j] as usize];
                        }
                    }
                }
            }
            w * acc
        })
        .collect();
    let surface: f64 = per_direction.iter().sum();
    let h = grid.h();
    let mut wetting = 0.0;
    let mut gravity = 0.0;
    for row in 0..grid.height() {
        for col in 0..grid.width() {
            let i = grid.index(row, col);
            if !grid.domain[i] {
                continue;
            }
            let l = grid.labels[i] as usize;
            wetting += p.beta[l] * h * boundary_sides(grid, row, col) as f64;
            gravity += p.rho[l] * p.g * grid.center(row, col).y * h * h;
        }
    }
    let volume_penalty = match opts.mode {
        Mode::D => 0.0,
        Mode::V | Mode::DV => {
            let targets = opts.targets(grid)?;
            volume_penalty(&grid.volumes(), &targets, opts.penalty(grid, p), h * h)
        }
    };
    Ok(EnergyBreakdown {
        surface,
        wetting,
        gravity,
        volume_penalty,
        total: surface + wetting + gravity + volume_penalty,
    })
}

pub(crate) fn sigma_table(p: &EnergyParams) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3u8 {
        for j in 0..3u8 {
            t[i as usize][j as usize] = p.sigmas.between(i, j);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensions::SurfaceTensions;

    #[test]
    fn weights_integrate_cosine() {
        // a unit-length vertical interface is cut |a| times per row by vector (a, b)
        for k in [4, 8, 16] {
            let st = CroftonStencil::new(k, 1.0).unwrap();
            let total_dphi: f64 = st
                .half
                .iter()
                .map(|&(dr, dc, w)| 2.0 * w * ((dr * dr + dc * dc) as f64).sqrt())
                .sum();
            assert!((total_dphi - PI).abs() < 1e-12);
        }
        assert!(CroftonStencil::new(6, 1.0).is_err());
    }

    #[test]
    fn uniform_grid_has_no_perimeter() {
        let g = LabelGrid::filled(16, 16, 1.0 / 16.0, 1).unwrap();
        assert_eq!(crofton_perimeter(&g, (0, 1)), 0.0);
        let p = EnergyParams::surface_only(SurfaceTensions::uniform(1.0).unwrap());
        assert_eq!(
            grid_energy(&g, &p, &MinimizeOptions::default())
                .unwrap()
                .surface,
            0.0
        );
    }

    #[test]
    fn penalty_dead_zone() {
        let t = [1.0, 2.0, 3.0];
        assert_eq!(volume_penalty(&[1.2, 1.9, 2.9], &t, 5.0, 0.5), 0.0);
        assert!((volume_penalty(&[1.5, 2.0, 2.5], &t, 2.0, 0.5) - 2.0 * 0.5).abs() < 1e-15);
    }
}
