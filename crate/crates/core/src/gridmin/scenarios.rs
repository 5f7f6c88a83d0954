//! Ready-made grids used by tests, examples and the command line.

use super::{GridError, LabelGrid};
use crate::cones::ConeConfig;
use crate::geom::Vec2;
use crate::tensions::{neumann_angles, SurfaceTensions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, TAU};

/// Unit square at `n × n`: fluid 0 on the left half, fluid 1 on the right.
pub fn vertical_split(n: usize) -> Result<LabelGrid, GridError> {
    let mut g = LabelGrid::filled(n, n, 1.0 / n as f64, 0)?;
    for row in 0..n {
        for col in n / 2..n {
            g.set_label(row, col, 1)?;
        }
    }
    Ok(g)
}

/// Unit square at `n × n` with fluid 1 on the centered disk of `radius`
/// and fluid 0 elsewhere.
pub fn disk(n: usize, radius: f64) -> Result<LabelGrid, GridError> {
    let mut g = LabelGrid::filled(n, n, 1.0 / n as f64, 0)?;
    for row in 0..n {
        for col in 0..n {
            if g.center(row, col).norm() < radius {
                g.set_label(row, col, 1)?;
            }
        }
    }
    Ok(g)
}

/// Unit disk on an `n × n` grid (`h = 2/n`) with every cell further than
/// `1 − ring·h` from the origin frozen. All cells are labelled with `label`.
pub fn unit_ball(n: usize, ring: usize, label: u8) -> Result<LabelGrid, GridError> {
    let h = 2.0 / n as f64;
    let mut domain = vec![false; n * n];
    let mut frozen = vec![false; n * n];
    let probe = LabelGrid::filled(n, n, h, 0)?;
    for i in 0..n * n {
        let r = probe.center(i / n, i % n).norm();
        domain[i] = r < 1.0;
        frozen[i] = domain[i] && r >= 1.0 - ring as f64 * h;
    }
    LabelGrid::new(n, n, h, vec![label; n * n], domain, frozen)
}

/// Unit ball whose frozen ring carries three boundary arcs, fluid `k`'s arc
/// spanning its Neumann opening, and whose free interior is random.
pub fn three_arcs(
    n: usize,
    s: &SurfaceTensions,
    ring: usize,
    seed: u64,
) -> Result<LabelGrid, GridError> {
    let gamma = neumann_angles(s).map_err(|e| GridError::InvalidOptions(e.to_string()))?;
    let openings: Vec<f64> = (0..3).map(|k| gamma.for_fluid(k)).collect();
    // fluid 0's arc is centered on the upward direction
    let cone = ConeConfig::from_openings(&[0, 1, 2], &openings)
        .map_err(|e| GridError::InvalidOptions(e.to_string()))?;
    let offset = FRAC_PI_2 - 0.5 * openings[0];
    let mut g = unit_ball(n, ring, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for row in 0..n {
        for col in 0..n {
            let i = g.index(row, col);
            if !g.domain[i] {
                continue;
            }
            g.labels[i] = if g.frozen[i] {
                cone.label_at(g.center(row, col).angle() - offset)
            } else {
                rng.gen_range(0..3)
            };
        }
    }
    Ok(g)
}

/// Unit ball painted with the cone rotated by `rotation`: each cell takes
/// the label of the sector containing its center's direction.
pub fn paint_cone(
    n: usize,
    cone: &ConeConfig,
    rotation: f64,
    ring: usize,
) -> Result<LabelGrid, GridError> {
    let mut g = unit_ball(n, ring, 0)?;
    for i in 0..g.len() {
        if g.domain[i] {
            g.labels[i] = cone.label_at(g.center_of(i).angle() - rotation);
        }
    }
    Ok(g)
}

/// Unit ball with fluid 0 above the horizontal diameter and fluid 1 below.
pub fn horizontal_split(n: usize, ring: usize) -> Result<LabelGrid, GridError> {
    let mut g = unit_ball(n, ring, 0)?;
    for i in 0..g.len() {
        if g.domain[i] && g.center_of(i).y < 0.0 {
            g.labels[i] = 1;
        }
    }
    Ok(g)
}

/// Unit ball split horizontally between fluids 0 and 1, with a lens of
/// fluid 2 on the interface ending in two triple junctions at `(±half_width, 0)`.
pub fn double_junction(n: usize, half_width: f64, ring: usize) -> Result<LabelGrid, GridError> {
    let mut g = horizontal_split(n, ring)?;
    let thickness = 0.4 * half_width;
    for i in 0..g.len() {
        let p = g.center_of(i);
        let u = p.x / half_width;
        if g.domain[i] && u.abs() < 1.0 && p.y.abs() < thickness * (1.0 - u * u) {
            g.labels[i] = 2;
        }
    }
    Ok(g)
}

/// Grid copy with a single cell relabelled, e.g. to seed a speck of fluid.
pub fn with_speck(grid: &LabelGrid, at: Vec2, label: u8) -> Result<LabelGrid, GridError> {
    let mut g = grid.clone();
    let (row, col) = g
        .cell_at(at)
        .ok_or_else(|| GridError::InvalidOptions(format!("point {at:?} is off the grid")))?;
    g.set_label(row, col, label)?;
    Ok(g)
}

/// Unit square at `n × n` filled with fluid 0 except a centered square of
/// `side` cells of fluid `label`.
pub fn square_blob(n: usize, side: usize, label: u8) -> Result<LabelGrid, GridError> {
    let mut g = LabelGrid::filled(n, n, 1.0 / n as f64, 0)?;
    let start = (n - side) / 2;
    for row in start..start + side {
        for col in start..start + side {
            g.set_label(row, col, label)?;
        }
    }
    Ok(g)
}

/// Direction of the arc boundary between fluids `a` and `b` in
/// [`three_arcs`], for reference.
pub fn three_arcs_boundaries(s: &SurfaceTensions) -> Result<[f64; 3], GridError> {
    let gamma = neumann_angles(s).map_err(|e| GridError::InvalidOptions(e.to_string()))?;
    let start = FRAC_PI_2 - 0.5 * gamma.for_fluid(0);
    let b1 = start + gamma.for_fluid(0);
    let b2 = b1 + gamma.for_fluid(1);
    Ok([
        start.rem_euclid(TAU),
        b1.rem_euclid(TAU),
        b2.rem_euclid(TAU),
    ])
}
