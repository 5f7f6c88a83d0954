//! Measurements on grids: deviation from local minimality, elimination
//! checks, blow-ups and triple-junction angles.

use super::anneal::{minimize, MinimizeOptions, Mode};
use super::crofton::grid_energy;
use super::{GridError, LabelGrid};
use crate::geom::Vec2;
use crate::tensions::{neumann_angles, EnergyParams, SurfaceTensions};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

pub const PSI_RESTARTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiEstimate {
    /// current surface energy minus the best restart; a lower bound on the
    /// true deviation since the search is stochastic
    pub psi: f64,
    /// largest minus smallest restart energy
    pub spread: f64,
    pub current: f64,
    pub restarts: Vec<f64>,
}

/// Estimates how far the configuration inside the ball is from the least
/// surface energy achievable with the data outside it held fixed.
///
/// Everything outside the ball is frozen and the inside re-minimized from
/// the current state with `restarts` seeds `opts.seed + k`.
pub fn psi_estimate(
    grid: &LabelGrid,
    p: &EnergyParams,
    center: Vec2,
    radius: f64,
    opts: &MinimizeOptions,
) -> Result<PsiEstimate, GridError> {
    psi_estimate_with(grid, p, center, radius, opts, PSI_RESTARTS)
}

pub fn psi_estimate_with(
    grid: &LabelGrid,
    p: &EnergyParams,
    center: Vec2,
    radius: f64,
    opts: &MinimizeOptions,
    restarts: usize,
) -> Result<PsiEstimate, GridError> {
    let outside = GridError::BallOutsideDomain {
        x: center.x,
        y: center.y,
        radius,
    };
    // the ball must be free and leave room for a two-cell frozen ring
    if !(radius > 0.0)
        || !grid.ball_in_domain(center, radius, true)
        || !grid.ball_in_domain(center, radius + 3.0 * grid.h, false)
    {
        return Err(outside);
    }
    let surface = EnergyParams::surface_only(p.sigmas);
    let mut local = grid.clone();
    local.freeze_outside(center, radius);
    let base = MinimizeOptions {
        mode: Mode::D,
        target_volumes: None,
        random_init: false,
        multilevel: false,
        log_moves: 0,
        replicas: 1,
        resample_every: 0,
        ..opts.clone()
    };
    let current = grid_energy(&local, &surface, &base)?.surface;
    let energies: Vec<f64> = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|k| {
            let o = MinimizeOptions {
                seed: opts.seed.wrapping_add(k),
                ..base.clone()
            };
            minimize(&local, &surface, &o).map(|r| r.energy.surface)
        })
        .collect::<Result<_, _>>()?;
    let best = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(PsiEstimate {
        psi: current - best,
        spread: worst - best,
        current,
        restarts: energies,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub center: Vec2,
    pub radius: f64,
    pub fluid: u8,
    /// area of the fluid in the ball
    pub volume: f64,
    /// area of the fluid in the half-radius ball
    pub half_volume: f64,
}

/// Samples balls of each radius on a lattice of centers (spacing half the
/// radius) lying wholly in the domain, and records every fluid that is
/// scarce in the ball (`area <= eta·ρ²`) yet present in the half-radius
/// ball. An empirical check only.
pub fn elimination_scan(grid: &LabelGrid, eta: f64, radii: &[f64]) -> Vec<Violation> {
    let a = grid.h * grid.h;
    let mut out = Vec::new();
    for &rho in radii {
        if !(rho > 0.0) {
            continue;
        }
        let stride = ((0.5 * rho / grid.h).floor() as usize).max(1);
        let centers: Vec<Vec2> = (0..grid.height)
            .step_by(stride)
            .flat_map(|row| (0..grid.width).step_by(stride).map(move |col| (row, col)))
            .map(|(row, col)| grid.center(row, col))
            .filter(|&c| grid.ball_in_domain(c, rho, false))
            .collect();
        let found: Vec<Vec<Violation>> = centers
            .par_iter()
            .map(|&c| {
                let full = grid.ball_counts(c, rho);
                let half = grid.ball_counts(c, 0.5 * rho);
                (0..3u8)
                    .filter(|&k| {
                        full[k as usize] as f64 * a <= eta * rho * rho && half[k as usize] > 0
                    })
                    .map(|k| Violation {
                        center: c,
                        radius: rho,
                        fluid: k,
                        volume: full[k as usize] as f64 * a,
                        half_volume: half[k as usize] as f64 * a,
                    })
                    .collect()
            })
            .collect();
        out.extend(found.into_iter().flatten());
    }
    out
}

/// Samples the configuration on the ball of radius `lambda·extent` about
/// `center`, magnified by `1/lambda`, onto a grid of the same size. The
/// result's domain is the disk of radius `extent`, nothing is frozen, and
/// energies of the result should use [`EnergyParams::blown_up`].
pub fn blowup_rescale(grid: &LabelGrid, center: Vec2, lambda: f64) -> Result<LabelGrid, GridError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(GridError::InvalidOptions(format!(
            "blow-up factor {lambda} must lie in (0, 1]"
        )));
    }
    let extent = grid.extent();
    let outside = || GridError::BallOutsideDomain {
        x: center.x,
        y: center.y,
        radius: lambda * extent,
    };
    let n = grid.len();
    let mut labels = vec![0u8; n];
    let mut domain = vec![false; n];
    for i in 0..n {
        let x = grid.center_of(i);
        if x.norm() >= extent {
            continue;
        }
        let src = center + x * lambda;
        let j = grid
            .cell_at(src)
            .map(|(r, c)| grid.index(r, c))
            .ok_or_else(outside)?;
        if !grid.domain[j] {
            return Err(outside());
        }
        labels[i] = grid.labels[j];
        domain[i] = true;
    }
    LabelGrid::new(
        grid.width,
        grid.height,
        grid.h,
        labels,
        domain,
        vec![false; n],
    )
}

/// Cell corners where three labels meet within a 2×2 block, merged into
/// clusters whose members lie within `3h` of one another and reported by
/// cluster centroid.
pub fn detect_triple_points(grid: &LabelGrid) -> Vec<Vec2> {
    let mut corners = Vec::new();
    for row in 0..grid.height.saturating_sub(1) {
        for col in 0..grid.width.saturating_sub(1) {
            let idx = [
                grid.index(row, col),
                grid.index(row, col + 1),
                grid.index(row + 1, col),
                grid.index(row + 1, col + 1),
            ];
            if idx.iter().any(|&i| !grid.domain[i]) {
                continue;
            }
            let mut seen = [false; 3];
            for &i in &idx {
                seen[grid.labels[i] as usize] = true;
            }
            if seen.iter().all(|&s| s) {
                corners.push(grid.center(row, col) + Vec2::new(0.5 * grid.h, -0.5 * grid.h));
            }
        }
    }
    // single-linkage clustering by union-find
    let m = corners.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let limit = 3.0 * grid.h + 1e-9 * grid.h;
    for i in 0..m {
        for j in i + 1..m {
            if corners[i].dist(corners[j]) <= limit {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut sums: Vec<(usize, Vec2, usize)> = Vec::new();
    for i in 0..m {
        let root = find(&mut parent, i);
        match sums.iter_mut().find(|s| s.0 == root) {
            Some(s) => {
                s.1 += corners[i];
                s.2 += 1;
            }
            None => sums.push((root, corners[i], 1)),
        }
    }
    sums.into_iter().map(|(_, sum, k)| sum / k as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JunctionReport {
    pub location: Vec2,
    /// opening of each fluid's sector in degrees
    pub angles_deg: [f64; 3],
    /// largest deviation from the Neumann openings in degrees
    pub residual_vs_neumann_deg: f64,
    pub samples: usize,
}

/// Measures the sector openings around the single triple point within
/// `window` of `point` by reading labels at evenly spaced points on the
/// circle of radius `window` about it.
pub fn junction_angle_extract(
    grid: &LabelGrid,
    s: &SurfaceTensions,
    point: Vec2,
    window: f64,
) -> Result<JunctionReport, GridError> {
    let gamma = neumann_angles(s).map_err(|e| GridError::InvalidOptions(e.to_string()))?;
    let found: Vec<Vec2> = detect_triple_points(grid)
        .into_iter()
        .filter(|q| q.dist(point) <= window)
        .collect();
    let location = match found.len() {
        0 => return Err(GridError::NoJunctionInWindow),
        1 => found[0],
        count => return Err(GridError::MultipleJunctions { count }),
    };
    let samples = ((8.0 * TAU * window / grid.h).ceil() as usize).max(720);
    let mut counts = [0usize; 3];
    for k in 0..samples {
        let q = location + Vec2::polar(TAU * k as f64 / samples as f64) * window;
        let i = grid
            .cell_at(q)
            .map(|(r, c)| grid.index(r, c))
            .filter(|&i| grid.domain[i])
            .ok_or(GridError::BallOutsideDomain {
                x: location.x,
                y: location.y,
                radius: window,
            })?;
        counts[grid.labels[i] as usize] += 1;
    }
    let angles_deg = counts.map(|c| 360.0 * c as f64 / samples as f64);
    let residual_vs_neumann_deg = (0..3u8)
        .map(|k| (angles_deg[k as usize] - gamma.for_fluid(k).to_degrees()).abs())
        .fold(0.0, f64::max);
    Ok(JunctionReport {
        location,
        angles_deg,
        residual_vs_neumann_deg,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::ConeConfig;
    use crate::gridmin::scenarios;

    fn unit() -> SurfaceTensions {
        SurfaceTensions::uniform(1.0).unwrap()
    }

    #[test]
    fn symmetric_cone_reads_back() {
        let cone = ConeConfig::from_openings_deg(&[0, 1, 2], &[120.0; 3]).unwrap();
        let g = scenarios::paint_cone(128, &cone, 0.3, 3).unwrap();
        let pts = detect_triple_points(&g);
        assert_eq!(pts.len(), 1);
        assert!(pts[0].norm() < 3.0 * g.h());
        let rep = junction_angle_extract(&g, &unit(), Vec2::ZERO, 0.5).unwrap();
        assert!(rep.residual_vs_neumann_deg < 1.0, "{rep:?}");
        assert!((rep.angles_deg.iter().sum::<f64>() - 360.0).abs() < 1e-9);
    }

    #[test]
    fn painted_asymmetric_cone() {
        let s = SurfaceTensions::new(3.0, 4.0, 5.0).unwrap();
        let cone = ConeConfig::from_openings_deg(
            &[0, 1, 2],
            &[90.0, 126.869_897_645_844, 143.130_102_354_156],
        )
        .unwrap();
        let g = scenarios::paint_cone(256, &cone, 1.0, 3).unwrap();
        let rep = junction_angle_extract(&g, &s, Vec2::ZERO, 0.6).unwrap();
        let step = 360.0 / rep.samples as f64;
        assert!(rep.residual_vs_neumann_deg < 0.5 + step, "{rep:?}");
    }

    #[test]
    fn two_junctions() {
        let g = scenarios::double_junction(128, 0.5, 3).unwrap();
        let pts = detect_triple_points(&g);
        assert_eq!(pts.len(), 2, "{pts:?}");
        assert!(matches!(
            junction_angle_extract(&g, &unit(), Vec2::ZERO, 0.6),
            Err(GridError::MultipleJunctions { count: 2 })
        ));
        assert!(detect_triple_points(&scenarios::horizontal_split(64, 3).unwrap()).is_empty());
        assert!(matches!(
            junction_angle_extract(
                &scenarios::horizontal_split(64, 3).unwrap(),
                &unit(),
                Vec2::ZERO,
                0.3
            ),
            Err(GridError::NoJunctionInWindow)
        ));
    }

    #[test]
    fn blowup_identity_and_cone_invariance() {
        let cone = ConeConfig::from_openings_deg(&[0, 1, 2], &[100.0, 120.0, 140.0]).unwrap();
        let g = scenarios::paint_cone(128, &cone, 0.2, 3).unwrap();
        let same = blowup_rescale(&g, Vec2::ZERO, 1.0).unwrap();
        assert_eq!(same.labels(), g.labels());
        let half = blowup_rescale(&g, Vec2::ZERO, 0.5).unwrap();
        // labels can differ only next to the rays
        let mismatched = (0..g.len())
            .filter(|&i| g.domain_mask()[i] && half.labels()[i] != g.labels()[i])
            .count();
        assert!(mismatched < 3 * 2 * 64, "{mismatched}");
        assert!(matches!(
            blowup_rescale(&g, Vec2::new(0.8, 0.0), 0.5),
            Err(GridError::BallOutsideDomain { .. })
        ));
        assert!(blowup_rescale(&g, Vec2::ZERO, 0.0).is_err());
    }

    #[test]
    fn elimination_scan_cases() {
        let g = scenarios::horizontal_split(96, 3).unwrap();
        assert!(elimination_scan(&g, 0.05, &[0.2, 0.4]).is_empty());
        let speck = scenarios::with_speck(&g, Vec2::new(0.1, 0.3), 2).unwrap();
        let v = elimination_scan(&speck, 0.05, &[0.2]);
        assert!(!v.is_empty());
        assert!(v.iter().all(|x| x.fluid == 2));
    }

    #[test]
    fn psi_of_blob_and_of_empty_ball() {
        let p = EnergyParams::surface_only(unit());
        let opts = MinimizeOptions::default();
        let g = scenarios::square_blob(64, 6, 2).unwrap();
        let empty = psi_estimate_with(&g, &p, Vec2::new(0.3, 0.3), 0.1, &opts, 2).unwrap();
        assert_eq!(empty.psi, 0.0);
        let blob = psi_estimate_with(&g, &p, Vec2::ZERO, 0.3, &opts, 2).unwrap();
        let oracle = crate::gridmin::crofton_perimeter(&g, (0, 2));
        assert!(
            (blob.psi - oracle).abs() < 0.05 * oracle,
            "{} vs {oracle}",
            blob.psi
        );
        assert!(matches!(
            psi_estimate(&g, &p, Vec2::new(0.45, 0.0), 0.1, &opts),
            Err(GridError::BallOutsideDomain { .. })
        ));
    }
}
