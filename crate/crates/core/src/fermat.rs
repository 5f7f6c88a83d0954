//! Weighted Fermat problem on a triangle and the good-triangle construction.
//!
//! The cost `C(p) = Σ ζ_j |p - P_j|` uses the weights `ζ_0 = σ_12`,
//! `ζ_1 = σ_02`, `ζ_2 = σ_01`: the segment from the junction to vertex `P_j`
//! separates the two fluids other than `j`.

use crate::geom::Vec2;
use crate::tensions::{neumann_angles, SurfaceTensions, TensionError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FermatError {
    #[error("point coincides with vertex {vertex}")]
    VertexSingularity { vertex: usize },
    #[error("cost minimum sits at vertex {vertex}; no interior critical point")]
    NoInteriorMinimum { vertex: usize },
    #[error("Newton iteration did not converge after {iterations} steps (gradient norm {gradient_norm:e})")]
    NonConvergence {
        iterations: usize,
        gradient_norm: f64,
    },
    #[error("triangle vertices are collinear")]
    DegenerateTriangle,
    #[error("sector opening {opening} rad is not below the Neumann angle {limit} rad")]
    OpeningTooWide { opening: f64, limit: f64 },
    #[error("good-triangle construction failed: {0}")]
    Construction(&'static str),
    #[error(transparent)]
    Tension(#[from] TensionError),
}

/// Weights of the basic cost function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FermatWeights {
    pub zeta: [f64; 3],
}

impl FermatWeights {
    pub fn from_tensions(s: &SurfaceTensions) -> Self {
        FermatWeights {
            zeta: [s.sigma12(), s.sigma02(), s.sigma01()],
        }
    }

    /// Raw weights, not required to satisfy triangularity.
    pub fn raw(z0: f64, z1: f64, z2: f64) -> Self {
        FermatWeights { zeta: [z0, z1, z2] }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        FermatWeights {
            zeta: self.zeta.map(|z| z * lambda),
        }
    }
}

pub type Triangle = [Vec2; 3];

pub fn fermat_cost(p: Vec2, vertices: &Triangle, w: &FermatWeights) -> f64 {
    vertices
        .iter()
        .zip(w.zeta)
        .map(|(v, z)| z * p.dist(*v))
        .sum()
}

/// `C(p) - C(q)` evaluated term by term without cancellation between the
/// two totals; used when `p` and `q` are close relative to the triangle.
pub fn fermat_cost_difference(p: Vec2, q: Vec2, vertices: &Triangle, w: &FermatWeights) -> f64 {
    vertices
        .iter()
        .zip(w.zeta)
        .map(|(v, z)| {
            let a = p - *v;
            let b = q - *v;
            let na = a.norm();
            let nb = b.norm();
            if na + nb == 0.0 {
                0.0
            } else {
                // |a| - |b| = (a - b)·(a + b) / (|a| + |b|)
                z * (p - q).dot(a + b) / (na + nb)
            }
        })
        .sum()
}

fn diameter(vertices: &Triangle) -> f64 {
    vertices[0]
        .dist(vertices[1])
        .max(vertices[1].dist(vertices[2]))
        .max(vertices[0].dist(vertices[2]))
}

fn check_off_vertices(p: Vec2, vertices: &Triangle) -> Result<(), FermatError> {
    let tol = 1e-14 * diameter(vertices);
    for (vertex, v) in vertices.iter().enumerate() {
        if p.dist(*v) <= tol {
            return Err(FermatError::VertexSingularity { vertex });
        }
    }
    Ok(())
}

pub fn fermat_gradient(
    p: Vec2,
    vertices: &Triangle,
    w: &FermatWeights,
) -> Result<Vec2, FermatError> {
    check_off_vertices(p, vertices)?;
    let mut g = Vec2::ZERO;
    for (v, z) in vertices.iter().zip(w.zeta) {
        let d = p - *v;
        g += d * (z / d.norm());
    }
    Ok(g)
}

/// Symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let half_tr = 0.5 * self.trace();
        let half_gap = (0.25 * (self.xx - self.yy).powi(2) + self.xy * self.xy).sqrt();
        let hi = half_tr + half_gap;
        // det / hi avoids cancellation for nearly singular matrices
        if hi > 0.0 {
            self.det() / hi
        } else {
            half_tr - half_gap
        }
    }

    pub fn solve(&self, rhs: Vec2) -> Option<Vec2> {
        let det = self.det();
        if !(det.abs() > 0.0) {
            return None;
        }
        Some(Vec2::new(
            (self.yy * rhs.x - self.xy * rhs.y) / det,
            (self.xx * rhs.y - self.xy * rhs.x) / det,
        ))
    }
}

pub fn fermat_hessian(
    p: Vec2,
    vertices: &Triangle,
    w: &FermatWeights,
) -> Result<Sym2, FermatError> {
    check_off_vertices(p, vertices)?;
    let mut h = Sym2 {
        xx: 0.0,
        xy: 0.0,
        yy: 0.0,
    };
    for (v, z) in vertices.iter().zip(w.zeta) {
        let d = p - *v;
        let r = d.norm();
        let zr3 = z / (r * r * r);
        h.xx += zr3 * d.y * d.y;
        h.xy -= zr3 * d.x * d.y;
        h.yy += zr3 * d.x * d.x;
    }
    Ok(h)
}

/// Angles `(γ01, γ12, γ02)` at `p` between the rays toward the vertices,
/// each in `[0, π]`. They sum to `2π` exactly when `p` lies inside the
/// triangle; outside, the largest equals the sum of the other two.
pub fn junction_angles(p: Vec2, vertices: &Triangle) -> Result<(f64, f64, f64), FermatError> {
    check_off_vertices(p, vertices)?;
    let v: Vec<Vec2> = vertices.iter().map(|q| *q - p).collect();
    let between = |a: Vec2, b: Vec2| a.cross(b).abs().atan2(a.dot(b));
    Ok((
        between(v[0], v[1]),
        between(v[1], v[2]),
        between(v[2], v[0]),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FermatSolution {
    pub point: Vec2,
    pub cost: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub hessian_min_eigenvalue: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-12,
            max_iterations: 200,
        }
    }
}

fn signed_area(t: &Triangle) -> f64 {
    0.5 * (t[1] - t[0]).cross(t[2] - t[0])
}

fn inside_closed(p: Vec2, t: &Triangle) -> bool {
    let s = signed_area(t).signum();
    (0..3).all(|i| s * (t[(i + 1) % 3] - t[i]).cross(p - t[i]) >= 0.0)
}

/// The weighted Fermat point: damped Newton from the centroid with Armijo
/// backtracking, falling back to a gradient step when the Newton step would
/// leave the triangle.
pub fn fermat_solve(
    vertices: &Triangle,
    w: &FermatWeights,
    tol: f64,
) -> Result<FermatSolution, FermatError> {
    fermat_solve_with(
        vertices,
        w,
        SolveOptions {
            tol,
            ..SolveOptions::default()
        },
    )
}

pub fn fermat_solve_with(
    vertices: &Triangle,
    w: &FermatWeights,
    opts: SolveOptions,
) -> Result<FermatSolution, FermatError> {
    let diam = diameter(vertices);
    if signed_area(vertices).abs() <= 1e-14 * diam * diam {
        return Err(FermatError::DegenerateTriangle);
    }

    // A vertex is the minimizer exactly when the pull of the other two
    // weights does not exceed its own weight.
    for k in 0..3 {
        let mut pull = Vec2::ZERO;
        for j in 0..3 {
            if j != k {
                pull += (vertices[j] - vertices[k]).normalized() * w.zeta[j];
            }
        }
        if pull.norm() <= w.zeta[k] {
            return Err(FermatError::NoInteriorMinimum { vertex: k });
        }
    }

    let near_vertex =
        |p: Vec2| -> Option<usize> { (0..3).find(|&k| p.dist(vertices[k]) <= 1e-10 * diam) };
    // gradient tolerance is relative to the weight scale
    let scale = w.zeta.iter().cloned().fold(0.0, f64::max);

    let mut p = (vertices[0] + vertices[1] + vertices[2]) / 3.0;
    let mut cost = fermat_cost(p, vertices, w);
    for iteration in 0..=opts.max_iterations {
        let g = fermat_gradient(p, vertices, w)?;
        let gn = g.norm();
        if gn <= opts.tol * scale.max(1.0) {
            let h = fermat_hessian(p, vertices, w)?;
            return Ok(FermatSolution {
                point: p,
                cost,
                gradient_norm: gn,
                iterations: iteration,
                hessian_min_eigenvalue: h.min_eigenvalue(),
            });
        }
        if iteration == opts.max_iterations {
            return Err(FermatError::NonConvergence {
                iterations: iteration,
                gradient_norm: gn,
            });
        }
        let h = fermat_hessian(p, vertices, w)?;
        let mut dir = match h.solve(-g) {
            Some(d) if d.dot(g) < 0.0 && inside_closed(p + d, vertices) => d,
            _ => -g * (1.0 / h.trace().max(f64::MIN_POSITIVE)),
        };
        // keep the trial step out of the vertices, where the cost is not smooth
        let mut step = 1.0;
        let slope = g.dot(dir);
        let mut accepted = false;
        for _ in 0..80 {
            let trial = p + dir * step;
            if near_vertex(trial).is_none() {
                let c = fermat_cost(trial, vertices, w);
                let decrease = c - cost;
                // near the minimum the cost change drowns in round-off, so a
                // step that shrinks the gradient is taken on that evidence
                let flat = decrease <= 8.0 * f64::EPSILON * cost.abs();
                if decrease <= 1e-4 * step * slope
                    || (decrease <= 0.0 && (dir * step).norm() <= 1e-15 * diam)
                    || (flat
                        && fermat_gradient(trial, vertices, w)
                            .map_or(false, |gt| gt.norm() < 0.5 * gn))
                {
                    p = trial;
                    cost = c;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            // Newton direction may be swamped by round-off; retry along -g once
            dir = -g * (1.0 / h.trace().max(f64::MIN_POSITIVE));
            let trial = p + dir;
            let c = fermat_cost(trial, vertices, w);
            if c <= cost {
                p = trial;
                cost = c;
            } else {
                return Err(FermatError::NonConvergence {
                    iterations: iteration,
                    gradient_norm: gn,
                });
            }
        }
        if let Some(vertex) = near_vertex(p) {
            return Err(FermatError::NoInteriorMinimum { vertex });
        }
    }
    unreachable!("loop returns on the final iteration")
}

/// A triangle with an interior point seeing the three vertices under the
/// Neumann angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodTriangle {
    pub vertices: Triangle,
    pub tilde_p: Vec2,
}

/// Builds a good triangle inside the sector of fluid 0 spanning
/// `[orientation, orientation + opening]`, with fluid 2 on the clockwise
/// side and fluid 1 on the counter-clockwise side. `P0` is the origin,
/// `P1` lies on the clockwise boundary ray, `P2` on the other, and the
/// interior point sits on the unit circle.
pub fn construct_good_triangle(
    s: &SurfaceTensions,
    opening: f64,
    orientation: f64,
) -> Result<GoodTriangle, FermatError> {
    let g = neumann_angles(s)?;
    if !(opening > 0.0) || opening >= g.gamma12 {
        return Err(FermatError::OpeningTooWide {
            opening,
            limit: g.gamma12,
        });
    }
    // admissible interior-point angles: above theta1 the second ray reaches
    // the counter-clockwise boundary, below theta2 the first ray reaches the
    // clockwise boundary
    let theta1 = opening - (PI - g.gamma02);
    let theta2 = PI - g.gamma01;
    let lo = theta1.max(0.0);
    let hi = theta2.min(opening);
    if !(hi > lo) {
        return Err(FermatError::Construction("empty admissible interval"));
    }
    let theta = 0.5 * (lo + hi);

    let tp = Vec2::polar(theta);
    let phi1 = theta + PI + g.gamma01;
    let phi2 = phi1 + g.gamma12;
    let u1 = Vec2::polar(phi1);
    let u2 = Vec2::polar(phi2);

    // first ray meets the positive x-axis
    if !(u1.y < 0.0) {
        return Err(FermatError::Construction(
            "first ray misses the clockwise boundary",
        ));
    }
    let s1 = -tp.y / u1.y;
    let p1 = tp + u1 * s1;
    // second ray meets the ray at angle `opening`
    let wdir = Vec2::polar(opening);
    let denom = u2.cross(wdir);
    if denom == 0.0 {
        return Err(FermatError::Construction(
            "second ray parallel to the boundary",
        ));
    }
    let s2 = -tp.cross(wdir) / denom;
    let p2 = tp + u2 * s2;
    if !(s1 > 0.0 && s2 > 0.0 && p1.x > 0.0 && p2.dot(wdir) > 0.0) {
        return Err(FermatError::Construction(
            "rays do not reach both boundaries",
        ));
    }
    let rot = |v: Vec2| v.rotate(orientation);
    Ok(GoodTriangle {
        vertices: [Vec2::ZERO, rot(p1), rot(p2)],
        tilde_p: rot(tp),
    })
}

/// Checks the good-triangle invariants; returns the worst angle error.
pub fn good_triangle_angle_error(
    t: &GoodTriangle,
    s: &SurfaceTensions,
) -> Result<f64, FermatError> {
    let g = neumann_angles(s)?;
    let (a01, a12, a02) = junction_angles(t.tilde_p, &t.vertices)?;
    Ok((a01 - g.gamma01)
        .abs()
        .max((a12 - g.gamma12).abs())
        .max((a02 - g.gamma02).abs()))
}

pub fn is_counter_clockwise(t: &Triangle) -> bool {
    signed_area(t) > 0.0
}

pub fn strictly_inside(p: Vec2, t: &Triangle) -> bool {
    let s = signed_area(t).signum();
    (0..3).all(|i| s * (t[(i + 1) % 3] - t[i]).cross(p - t[i]) > 0.0)
}

/// Full turn check used by callers that accept either orientation.
pub fn angle_sum(p: Vec2, vertices: &Triangle) -> Result<f64, FermatError> {
    let (a, b, c) = junction_angles(p, vertices)?;
    Ok(a + b + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn equilateral() -> Triangle {
        [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.5, 3f64.sqrt() / 2.0),
        ]
    }

    fn unit() -> FermatWeights {
        FermatWeights::raw(1.0, 1.0, 1.0)
    }

    #[test]
    fn cost_examples() {
        let t = equilateral();
        assert!((fermat_cost(t[0], &t, &unit()) - 2.0).abs() < 1e-15);
        let c = Vec2::new(0.5, 3f64.sqrt() / 6.0);
        assert!((fermat_cost(c, &t, &unit()) - 3f64.sqrt()).abs() < 1e-15);
        let q = Vec2::new(0.3, -0.7);
        let scaled = fermat_cost(q, &t, &unit().scaled(2.5));
        assert!((scaled - 2.5 * fermat_cost(q, &t, &unit())).abs() < 1e-14);
    }

    #[test]
    fn gradient_vanishes_at_equilateral_center() {
        let t = equilateral();
        let g = fermat_gradient(Vec2::new(0.5, 3f64.sqrt() / 6.0), &t, &unit()).unwrap();
        assert!(g.norm() < 1e-15);
        assert_eq!(
            fermat_gradient(t[1], &t, &unit()),
            Err(FermatError::VertexSingularity { vertex: 1 })
        );
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = [
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.2),
            Vec2::new(0.7, 1.6),
        ];
        let w = FermatWeights::raw(1.3, 0.8, 1.1);
        let h = 1e-6;
        for _ in 0..100 {
            let (a, b): (f64, f64) = (rng.gen(), rng.gen());
            let (a, b) = if a + b > 1.0 {
                (1.0 - a, 1.0 - b)
            } else {
                (a, b)
            };
            let p = t[0] + (t[1] - t[0]) * a + (t[2] - t[0]) * b;
            let g = fermat_gradient(p, &t, &w).unwrap();
            let fd = |e: Vec2| {
                (fermat_cost(p + e * h, &t, &w) - fermat_cost(p - e * h, &t, &w)) / (2.0 * h)
            };
            let fdg = Vec2::new(fd(Vec2::new(1.0, 0.0)), fd(Vec2::new(0.0, 1.0)));
            assert!(
                (g - fdg).norm() <= 1e-6 * g.norm().max(1.0),
                "{g:?} vs {fdg:?}"
            );

            let hs = fermat_hessian(p, &t, &w).unwrap();
            let gd = |e: Vec2| {
                (fermat_gradient(p + e * h, &t, &w).unwrap()
                    - fermat_gradient(p - e * h, &t, &w).unwrap())
                    / (2.0 * h)
            };
            let cx = gd(Vec2::new(1.0, 0.0));
            let cy = gd(Vec2::new(0.0, 1.0));
            let scale = hs.trace().max(1.0);
            assert!((hs.xx - cx.x).abs() < 1e-5 * scale);
            assert!((hs.xy - cx.y).abs() < 1e-5 * scale);
            assert!((hs.xy - cy.x).abs() < 1e-5 * scale);
            assert!((hs.yy - cy.y).abs() < 1e-5 * scale);
            let expected_trace: f64 = t.iter().zip(w.zeta).map(|(v, z)| z / p.dist(*v)).sum();
            assert!((hs.trace() - expected_trace).abs() < 1e-12 * expected_trace);
            assert!(hs.min_eigenvalue() > 0.0);
        }
    }

    #[test]
    fn equilateral_solution() {
        let t = equilateral();
        let sol = fermat_solve(&t, &unit(), 1e-12).unwrap();
        assert!((sol.point - Vec2::new(0.5, 3f64.sqrt() / 6.0)).norm() < 1e-12);
        let (a, b, c) = junction_angles(sol.point, &t).unwrap();
        for x in [a, b, c] {
            assert!((x.to_degrees() - 120.0).abs() < 1e-9);
        }
        assert!(sol.hessian_min_eigenvalue > 0.0);
    }

    #[test]
    fn heavy_vertex_is_boundary_minimum() {
        let t = equilateral();
        let err = fermat_solve(&t, &FermatWeights::raw(10.0, 1.0, 1.0), 1e-12).unwrap_err();
        assert_eq!(err, FermatError::NoInteriorMinimum { vertex: 0 });
    }

    #[test]
    fn junction_angle_sums() {
        let t = equilateral();
        let inside = Vec2::new(0.4, 0.3);
        assert!((angle_sum(inside, &t).unwrap() - TAU).abs() < 1e-12);
        let outside = Vec2::new(2.0, 2.0);
        assert!((angle_sum(outside, &t).unwrap() - TAU).abs() > 1e-3);
    }

    #[test]
    fn good_triangle_examples() {
        let s = SurfaceTensions::uniform(1.0).unwrap();
        let gt = construct_good_triangle(&s, 60f64.to_radians(), 0.0).unwrap();
        assert!(good_triangle_angle_error(&gt, &s).unwrap() < 1e-9);
        assert!(is_counter_clockwise(&gt.vertices));
        assert!(strictly_inside(gt.tilde_p, &gt.vertices));

        let s = SurfaceTensions::new(3.0, 4.0, 5.0).unwrap();
        let gt = construct_good_triangle(&s, 80f64.to_radians(), 1.1).unwrap();
        assert!(good_triangle_angle_error(&gt, &s).unwrap() < 1e-9);
        assert!(strictly_inside(gt.tilde_p, &gt.vertices));

        let s = SurfaceTensions::uniform(1.0).unwrap();
        assert!(matches!(
            construct_good_triangle(&s, 130f64.to_radians(), 0.0),
            Err(FermatError::OpeningTooWide { .. })
        ));
    }

    #[test]
    fn cost_difference_agrees_with_direct() {
        let t = equilateral();
        let w = FermatWeights::raw(1.0, 2.0, 1.5);
        let p = Vec2::new(0.3, 0.2);
        let q = Vec2::new(0.31, 0.19);
        let direct = fermat_cost(p, &t, &w) - fermat_cost(q, &t, &w);
        assert!((fermat_cost_difference(p, q, &t, &w) - direct).abs() < 1e-14);
    }
}
