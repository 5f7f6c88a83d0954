//! Labelled-cell grids: discrete energies, an annealing minimizer and the
//! measurements run on its output.
//!
//! Cell `(row, col)` has its center at
//! `((col + ½ − W/2) h, (H/2 − row − ½) h)`: the grid is centered at the
//! origin and row 0 is the top row. Volumes are areas in length units
//! squared (`h²` per cell).

mod analysis;
mod anneal;
mod crofton;
pub mod io;
pub mod scenarios;

pub use analysis::{
    blowup_rescale, detect_triple_points, elimination_scan, junction_angle_extract, psi_estimate,
    psi_estimate_with, JunctionReport, PsiEstimate, Violation, PSI_RESTARTS,
};
pub use anneal::{minimize, MinimizeOptions, MinimizeResult, Mode, MoveRecord, Schedule};
pub use crofton::{
    crofton_perimeter, crofton_perimeter_with, grid_energy, CroftonStencil, EnergyBreakdown,
};

use crate::geom::Vec2;
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid dimensions {width}x{height} do not match {len} cells")]
    DimensionMismatch {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("cell ({row}, {col}): {reason}")]
    InvalidCell {
        row: usize,
        col: usize,
        reason: String,
    },
    #[error("domain is not connected")]
    DisconnectedDomain,
    #[error("target volumes {targets:?} do not fit the free area {available}")]
    InfeasibleVolumes { targets: [f64; 3], available: f64 },
    #[error("free cell ({row}, {col}) lies within two cells of the domain boundary")]
    FrozenRingTooThin { row: usize, col: usize },
    #[error("ball of radius {radius} at ({x}, {y}) is not inside the free region")]
    BallOutsideDomain { x: f64, y: f64, radius: f64 },
    #[error("no triple point within the window")]
    NoJunctionInWindow,
    #[error("{count} triple points within the window")]
    MultipleJunctions { count: usize },
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("malformed grid file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelGrid {
    width: usize,
    height: usize,
    h: f64,
    labels: Vec<u8>,
    domain: Vec<bool>,
    frozen: Vec<bool>,
}

impl LabelGrid {
    pub fn new(
        width: usize,
        height: usize,
        h: f64,
        labels: Vec<u8>,
        domain: Vec<bool>,
        frozen: Vec<bool>,
    ) -> Result<Self, GridError> {
        let g = LabelGrid {
            width,
            height,
            h,
            labels,
            domain,
            frozen,
        };
        g.validate()?;
        Ok(g)
    }

    /// Whole rectangle in the domain, one label, nothing frozen.
    pub fn filled(width: usize, height: usize, h: f64, label: u8) -> Result<Self, GridError> {
        let n = width * height;
        Self::new(
            width,
            height,
            h,
            vec![label; n],
            vec![true; n],
            vec![false; n],
        )
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let n = self.width * self.height;
        if n == 0 || self.labels.len() != n || self.domain.len() != n || self.frozen.len() != n {
            return Err(GridError::DimensionMismatch {
                width: self.width,
                height: self.height,
                len: self.labels.len(),
            });
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(GridError::InvalidOptions(format!(
                "cell size {} must be positive",
                self.h
            )));
        }
        for i in 0..n {
            let (row, col) = (i / self.width, i % self.width);
            if self.domain[i] && self.labels[i] > 2 {
                return Err(GridError::InvalidCell {
                    row,
                    col,
                    reason: format!("label {} out of range", self.labels[i]),
                });
            }
            if self.frozen[i] && !self.domain[i] {
                return Err(GridError::InvalidCell {
                    row,
                    col,
                    reason: "frozen cell outside the domain".into(),
                });
            }
        }
        if !self.domain_connected() {
            return Err(GridError::DisconnectedDomain);
        }
        Ok(())
    }

    fn domain_connected(&self) -> bool {
        let Some(start) = self.domain.iter().position(|&d| d) else {
            return false;
        };
        let mut seen = vec![false; self.domain.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            let (r, c) = (i / self.width, i % self.width);
            for (dr, dc) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                if let Some(j) = self.offset(r, c, dr, dc) {
                    if self.domain[j] && !seen[j] {
                        seen[j] = true;
                        count += 1;
                        queue.push_back(j);
                    }
                }
            }
        }
        count == self.domain.iter().filter(|&&d| d).count()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn domain_mask(&self) -> &[bool] {
        &self.domain
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    pub fn label(&self, row: usize, col: usize) -> u8 {
        self.labels[self.index(row, col)]
    }

    pub fn in_domain(&self, row: usize, col: usize) -> bool {
        self.domain[self.index(row, col)]
    }

    pub fn is_frozen(&self, row: usize, col: usize) -> bool {
        self.frozen[self.index(row, col)]
    }

    /// Sets a label; out-of-range labels and cells outside the domain are
    /// rejected.
    pub fn set_label(&mut self, row: usize, col: usize, label: u8) -> Result<(), GridError> {
        let i = self.index(row, col);
        if label > 2 || !self.domain[i] {
            return Err(GridError::InvalidCell {
                row,
                col,
                reason: format!("cannot set label {label}"),
            });
        }
        self.labels[i] = label;
        Ok(())
    }

    pub fn set_frozen(&mut self, row: usize, col: usize, frozen: bool) -> Result<(), GridError> {
        let i = self.index(row, col);
        if frozen && !self.domain[i] {
            return Err(GridError::InvalidCell {
                row,
                col,
                reason: "frozen cell outside the domain".into(),
            });
        }
        self.frozen[i] = frozen;
        Ok(())
    }

    /// Freezes every in-domain cell whose center lies outside the closed
    /// ball `|x − center| <= radius`, and unfreezes those inside.
    pub fn freeze_outside(&mut self, center: Vec2, radius: f64) {
        for i in 0..self.len() {
            let p = self.center_of(i);
            self.frozen[i] = self.domain[i] && p.dist(center) > radius;
        }
    }

    pub fn center(&self, row: usize, col: usize) -> Vec2 {
        Vec2::new(
            (col as f64 + 0.5 - 0.5 * self.width as f64) * self.h,
            (0.5 * self.height as f64 - row as f64 - 0.5) * self.h,
        )
    }

    pub(crate) fn center_of(&self, i: usize) -> Vec2 {
        self.center(i / self.width, i % self.width)
    }

    /// Cell containing `p`, if any.
    pub fn cell_at(&self, p: Vec2) -> Option<(usize, usize)> {
        let col = (p.x / self.h + 0.5 * self.width as f64).floor();
        let row = (0.5 * self.height as f64 - p.y / self.h).floor();
        if col < 0.0 || row < 0.0 || col >= self.width as f64 || row >= self.height as f64 {
            return None;
        }
        Some((row as usize, col as usize))
    }

    #[inline]
    pub(crate) fn offset(&self, row: usize, col: usize, dr: i64, dc: i64) -> Option<usize> {
        let r = row as i64 + dr;
        let c = col as i64 + dc;
        if r < 0 || c < 0 || r >= self.height as i64 || c >= self.width as i64 {
            None
        } else {
            Some(r as usize * self.width + c as usize)
        }
    }

    /// Area of each fluid over free (in-domain, unfrozen) cells.
    pub fn volumes(&self) -> [f64; 3] {
        let mut v = [0.0; 3];
        let a = self.h * self.h;
        for i in 0..self.len() {
            if self.domain[i] && !self.frozen[i] {
                v[self.labels[i] as usize] += a;
            }
        }
        v
    }

    /// Area of each fluid over the whole domain.
    pub fn total_volumes(&self) -> [f64; 3] {
        let mut v = [0.0; 3];
        let a = self.h * self.h;
        for i in 0..self.len() {
            if self.domain[i] {
                v[self.labels[i] as usize] += a;
            }
        }
        v
    }

    pub fn free_area(&self) -> f64 {
        let n = (0..self.len())
            .filter(|&i| self.domain[i] && !self.frozen[i])
            .count();
        n as f64 * self.h * self.h
    }

    /// Number of cells carrying each label inside the ball.
    pub fn ball_counts(&self, center: Vec2, radius: f64) -> [usize; 3] {
        let mut counts = [0; 3];
        let (r0, r1, c0, c1) = self.ball_bounds(center, radius);
        for row in r0..r1 {
            for col in c0..c1 {
                let i = self.index(row, col);
                if self.domain[i] && self.center(row, col).dist(center) <= radius {
                    counts[self.labels[i] as usize] += 1;
                }
            }
        }
        counts
    }

    /// Row and column ranges covering the ball, clamped to the grid.
    pub(crate) fn ball_bounds(&self, center: Vec2, radius: f64) -> (usize, usize, usize, usize) {
        let clamp = |v: f64, n: usize| v.max(0.0).min(n as f64) as usize;
        let c0 = clamp(
            ((center.x - radius) / self.h + 0.5 * self.width as f64).floor(),
            self.width,
        );
        let c1 = clamp(
            ((center.x + radius) / self.h + 0.5 * self.width as f64).floor() + 1.0,
            self.width,
        );
        let r0 = clamp(
            (0.5 * self.height as f64 - (center.y + radius) / self.h).floor(),
            self.height,
        );
        let r1 = clamp(
            (0.5 * self.height as f64 - (center.y - radius) / self.h).floor() + 1.0,
            self.height,
        );
        (r0, r1, c0, c1)
    }

    /// True when every cell whose center lies in the ball is in the domain
    /// and the ball stays on the grid.
    pub fn ball_in_domain(&self, center: Vec2, radius: f64, free_only: bool) -> bool {
        let half_w = 0.5 * self.width as f64 * self.h;
        let half_h = 0.5 * self.height as f64 * self.h;
        if center.x - radius < -half_w
            || center.x + radius > half_w
            || center.y - radius < -half_h
            || center.y + radius > half_h
        {
            return false;
        }
        let (r0, r1, c0, c1) = self.ball_bounds(center, radius);
        for row in r0..r1 {
            for col in c0..c1 {
                if self.center(row, col).dist(center) <= radius {
                    let i = self.index(row, col);
                    if !self.domain[i] || (free_only && self.frozen[i]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Half-extent of the grid along its shorter side.
    pub fn extent(&self) -> f64 {
        0.5 * self.width.min(self.height) as f64 * self.h
    }
}
