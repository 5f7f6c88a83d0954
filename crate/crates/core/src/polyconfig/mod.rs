//! Exact polygonal three-fluid configurations in a disk.
//!
//! Interfaces are polylines tagged with the ordered pair `[i, j]`, `i < j`.
//! Walking a polyline from its first point to its last, fluid `i` lies on the
//! left and fluid `j` on the right, so the unit normal (right-hand normal of
//! the direction of travel) points from `i` into `j`. Regions are never
//! stored: they are the faces cut out of the disk by the interfaces, and each
//! face's label is read off the adjacent interface tags. A configuration with
//! no interface at all is filled by `background`.
//!
//! Two quantities share the name `Ψ` in the underlying theory: the deviation
//! of a configuration from the minimal energy, and the weighted fourth-moment
//! auxiliary of the sharp monotonicity argument. Here they are kept apart as
//! `psi_deviation` (estimated on grids, see `gridmin`) and `psi_aux`.

mod monotonicity;
mod projection;
mod variation;

pub use monotonicity::{MonotonicityTrace, WeakMonotonicity, TRACE_CSV_HEADER};
pub use variation::{FieldKind, TestField};

use crate::geom::{clip_segment_to_disk, segment_circle_params, Vec2};
use crate::quadrature::QuadratureFailure;
use crate::tensions::{EnergyParams, SurfaceTensions};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("interface {index}: {reason}")]
    InvalidInterface { index: usize, reason: String },
    #[error("domain radius must be positive, got {0}")]
    InvalidDomain(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureFailure),
    #[error("configuration is not stationary: first-variation residual {residual:e} for {field}")]
    NotStationary { residual: f64, field: String },
    #[error("interface tangent to the circle of radius {radius} near {point:?}")]
    TangentialCrossing { radius: f64, point: Vec2 },
    #[error("radius {radius} outside (0, {domain_radius})")]
    RadiusOutOfRange { radius: f64, domain_radius: f64 },
    #[error("ball of radius {radius} at {center:?} leaves the domain")]
    BallOutsideDomain { center: Vec2, radius: f64 },
    #[error("malformed configuration JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interface {
    pub pair: [u8; 2],
    pub points: Vec<Vec2>,
}

impl Interface {
    pub fn new(pair: [u8; 2], points: Vec<Vec2>) -> Self {
        Interface { pair, points }
    }

    /// Segment between two points with fluid `left` on its left side,
    /// canonicalized so that the smaller label comes first.
    pub fn oriented(left: u8, right: u8, from: Vec2, to: Vec2) -> Self {
        Interface::oriented_path(left, right, vec![from, to])
    }

    /// Like [`Interface::oriented`] for a polyline walked in the given order.
    pub fn oriented_path(left: u8, right: u8, mut points: Vec<Vec2>) -> Self {
        if left < right {
            Interface::new([left, right], points)
        } else {
            points.reverse();
            Interface::new([right, left], points)
        }
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].dist(w[1])).sum()
    }
}

/// A closed ball used as an evaluation window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec2,
    pub radius: f64,
}

impl Ball {
    pub fn centered(radius: f64) -> Self {
        Ball {
            center: Vec2::ZERO,
            radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyConfig {
    pub domain_radius: f64,
    pub interfaces: Vec<Interface>,
    #[serde(default)]
    pub background: u8,
}

/// One straight piece of an interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
    pub pair: [u8; 2],
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    /// Unit normal pointing from `pair[0]` into `pair[1]`.
    pub fn normal(&self) -> Vec2 {
        let u = (self.b - self.a).normalized();
        Vec2::new(u.y, -u.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub surface: f64,
    pub wetting: f64,
    pub gravity: f64,
    pub total: f64,
}

/// A point where an interface meets a circle about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub angle: f64,
    pub point: Vec2,
    /// label on the clockwise side
    pub before: u8,
    /// label on the counter-clockwise side
    pub after: u8,
}

/// Per-fluid area and first moment of the second coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RegionMoments {
    pub area: f64,
    pub moment_z: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Inside,
    Outside,
}

impl PolyConfig {
    pub fn new(domain_radius: f64, interfaces: Vec<Interface>) -> Result<Self, PolyError> {
        Self::with_background(domain_radius, interfaces, 0)
    }

    pub fn with_background(
        domain_radius: f64,
        interfaces: Vec<Interface>,
        background: u8,
    ) -> Result<Self, PolyError> {
        let c = PolyConfig {
            domain_radius,
            interfaces,
            background,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), PolyError> {
        if !(self.domain_radius > 0.0) || !self.domain_radius.is_finite() {
            return Err(PolyError::InvalidDomain(self.domain_radius));
        }
        if self.background > 2 {
            return Err(PolyError::InvalidInterface {
                index: usize::MAX,
                reason: format!("background label {} out of range", self.background),
            });
        }
        let lim = self.domain_radius * (1.0 + 1e-12);
        for (index, it) in self.interfaces.iter().enumerate() {
            let bad = |reason: String| PolyError::InvalidInterface { index, reason };
            let [i, j] = it.pair;
            if i >= j || j > 2 {
                return Err(bad(format!("pair {:?} must satisfy i < j <= 2", it.pair)));
            }
            if it.points.len() < 2 {
                return Err(bad("needs at least two points".into()));
            }
            for p in &it.points {
                if !p.x.is_finite() || !p.y.is_finite() {
                    return Err(bad("non-finite coordinate".into()));
                }
                if p.norm() > lim {
                    return Err(bad(format!("point {p:?} outside the domain")));
                }
            }
            if it.points.windows(2).any(|w| w[0] == w[1]) {
                return Err(bad("repeated consecutive point".into()));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, PolyError> {
        let c: PolyConfig =
            serde_json::from_str(text).map_err(|e| PolyError::Json(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.interfaces.iter().flat_map(|it| {
            it.points.windows(2).map(move |w| Segment {
                a: w[0],
                b: w[1],
                pair: it.pair,
            })
        })
    }

    /// Weighted interface length inside `ball`: `Σ σ_ij · length(interface ∩ ball)`.
    pub fn energy_fs(&self, s: &SurfaceTensions, ball: Ball) -> f64 {
        self.segments()
            .map(|seg| s.between(seg.pair[0], seg.pair[1]) * clipped_length(&seg, ball))
            .sum()
    }

    /// Energy over the whole domain.
    pub fn surface_energy(&self, s: &SurfaceTensions) -> f64 {
        self.segments()
            .map(|seg| s.between(seg.pair[0], seg.pair[1]) * seg.length())
            .sum()
    }

    /// Surface, wetting and gravitational energy over the whole domain.
    pub fn energy_fswp(&self, p: &EnergyParams) -> EnergyBreakdown {
        let surface = self.surface_energy(&p.sigmas);
        let arcs = self.boundary_arcs();
        let wetting: f64 = arcs
            .iter()
            .map(|&(label, t0, t1)| p.beta[label as usize] * self.domain_radius * (t1 - t0))
            .sum();
        let moments = self.region_moments_from(&arcs);
        let gravity: f64 = (0..3).map(|j| p.rho[j] * p.g * moments[j].moment_z).sum();
        EnergyBreakdown {
            surface,
            wetting,
            gravity,
            total: surface + wetting + gravity,
        }
    }

    /// Area and `∫ z dA` of each fluid region, by Green's theorem over the
    /// interface segments and the labelled boundary arcs.
    pub fn region_moments(&self) -> [RegionMoments; 3] {
        self.region_moments_from(&self.boundary_arcs())
    }

    fn region_moments_from(&self, arcs: &[(u8, f64, f64)]) -> [RegionMoments; 3] {
        let mut m = [RegionMoments::default(); 3];
        let mut add_edge = |label: u8, a: Vec2, b: Vec2| {
            let e = &mut m[label as usize];
            e.area += 0.5 * a.cross(b);
            e.moment_z -= (b.x - a.x) * (a.y * a.y + a.y * b.y + b.y * b.y) / 6.0;
        };
        for seg in self.segments() {
            // fluid pair[0] is on the left: its counter-clockwise boundary runs a -> b
            add_edge(seg.pair[0], seg.a, seg.b);
            add_edge(seg.pair[1], seg.b, seg.a);
        }
        let r = self.domain_radius;
        let sin3 = |t: f64| -t.cos() + t.cos().powi(3) / 3.0;
        for &(label, t0, t1) in arcs {
            let e = &mut m[label as usize];
            e.area += 0.5 * r * r * (t1 - t0);
            e.moment_z += 0.5 * r * r * r * (sin3(t1) - sin3(t0));
        }
        m
    }

    /// Labelled arcs `(label, start, end)` of the domain boundary, angles
    /// increasing, covering one full turn.
    pub fn boundary_arcs(&self) -> Vec<(u8, f64, f64)> {
        let crossings = self
            .crossings(self.domain_radius, Side::Inside)
            .unwrap_or_default();
        arcs_from_crossings(&crossings, || {
            self.label_at(Vec2::new(self.domain_radius, 0.0))
        })
    }

    /// Points where the configuration meets the circle of radius `t` through
    /// the part of the interfaces lying on `side`, sorted by angle.
    fn crossings(&self, t: f64, side: Side) -> Result<Vec<Crossing>, PolyError> {
        let on_circle = |p: Vec2| (p.norm() - t).abs() <= 1e-9 * t;
        let mut out = Vec::new();
        for it in &self.interfaces {
            let refined = refine_at_circle(&it.points, t);
            let n = refined.len();
            // classify each refined piece by its midpoint
            let piece_side: Vec<Side> = refined
                .windows(2)
                .map(|w| {
                    if (0.5 * (w[0] + w[1])).norm() < t {
                        Side::Inside
                    } else {
                        Side::Outside
                    }
                })
                .collect();
            for k in 0..n {
                let p = refined[k];
                if !on_circle(p) {
                    continue;
                }
                let mut touching: Vec<usize> = Vec::new();
                if k > 0 && piece_side[k - 1] == side {
                    touching.push(k - 1);
                }
                if k + 1 < n && piece_side[k] == side {
                    touching.push(k);
                }
                match touching.len() {
                    0 => continue,
                    1 => {}
                    _ => {
                        return Err(PolyError::TangentialCrossing {
                            radius: t,
                            point: p,
                        });
                    }
                }
                let piece = touching[0];
                let u = (refined[piece + 1] - refined[piece]).normalized();
                let radial = p.normalized();
                if u.dot(radial).abs() < 1e-12 {
                    return Err(PolyError::TangentialCrossing {
                        radius: t,
                        point: p,
                    });
                }
                let tau = radial.perp();
                let (after, before) = if u.cross(tau) > 0.0 {
                    (it.pair[0], it.pair[1])
                } else {
                    (it.pair[1], it.pair[0])
                };
                let point = p;
                out.push(Crossing {
                    angle: point.angle(),
                    point,
                    before,
                    after,
                });
            }
        }
        out.sort_by(|a, b| a.angle.partial_cmp(&b.angle).unwrap());
        Ok(out)
    }

    /// Labelled arcs of the circle of radius `t`, as seen from the interface
    /// pieces outside it.
    pub fn trace_on_circle(&self, t: f64) -> Result<Vec<(u8, f64, f64)>, PolyError> {
        let crossings = self.crossings(t, Side::Outside)?;
        Ok(arcs_from_crossings(&crossings, || {
            self.label_at(Vec2::new(t, 0.0))
        }))
    }

    /// Fluid occupying `q`, found by casting a ray toward an interface and
    /// reading the side of the first segment hit.
    pub fn label_at(&self, q: Vec2) -> u8 {
        let segs: Vec<Segment> = self.segments().collect();
        if segs.is_empty() {
            return self.background;
        }
        let scale = self.domain_radius;
        'targets: for target in segs.iter() {
            for frac in [0.5, 0.37, 0.61, 0.23, 0.79] {
                let aim = target.a + (target.b - target.a) * frac;
                let dir = aim - q;
                if dir.norm() <= 1e-12 * scale {
                    continue;
                }
                let mut best: Option<(f64, Segment)> = None;
                let mut degenerate = false;
                for seg in &segs {
                    let e = seg.b - seg.a;
                    let denom = dir.cross(e);
                    if denom.abs() <= 1e-14 * dir.norm() * e.norm() {
                        continue;
                    }
                    let w = seg.a - q;
                    let s = w.cross(e) / denom;
                    let u = w.cross(dir) / denom;
                    if s <= 0.0 || !(-1e-12..=1.0 + 1e-12).contains(&u) {
                        continue;
                    }
                    if u < 1e-9 || u > 1.0 - 1e-9 {
                        // ray grazes a vertex; another aim point avoids the ambiguity
                        if best.map_or(true, |(bs, _)| s < bs) {
                            degenerate = true;
                        }
                    }
                    if best.map_or(true, |(bs, _)| s < bs) {
                        best = Some((s, *seg));
                        degenerate = u < 1e-9 || u > 1.0 - 1e-9;
                    }
                }
                if degenerate {
                    continue;
                }
                if let Some((s, seg)) = best {
                    if s * dir.norm() <= 1e-12 * scale {
                        // q on the interface itself
                        continue 'targets;
                    }
                    let u = seg.b - seg.a;
                    return if u.cross(q - seg.a) > 0.0 {
                        seg.pair[0]
                    } else {
                        seg.pair[1]
                    };
                }
            }
        }
        self.background
    }

    /// Radii at which interface vertices sit, useful to keep finite
    /// differences away from kinks.
    pub fn vertex_radii(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self
            .interfaces
            .iter()
            .flat_map(|it| it.points.iter().map(|p| p.norm()))
            .collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        r.dedup();
        r
    }

    pub(crate) fn check_radius(&self, r: f64) -> Result<(), PolyError> {
        if !(r > 0.0) || r > self.domain_radius * (1.0 + 1e-12) {
            return Err(PolyError::RadiusOutOfRange {
                radius: r,
                domain_radius: self.domain_radius,
            });
        }
        Ok(())
    }
}

fn clipped_length(seg: &Segment, ball: Ball) -> f64 {
    match clip_segment_to_disk(seg.a - ball.center, seg.b - ball.center, ball.radius) {
        Some((t0, t1)) => (t1 - t0) * seg.length(),
        None => 0.0,
    }
}

/// Inserts the points where a polyline crosses the circle of radius `t`.
fn refine_at_circle(points: &[Vec2], t: f64) -> Vec<Vec2> {
    let mut out = vec![points[0]];
    for w in points.windows(2) {
        for s in segment_circle_params(w[0], w[1], t) {
            if s > 1e-12 && s < 1.0 - 1e-12 {
                out.push(w[0] + (w[1] - w[0]) * s);
            }
        }
        out.push(w[1]);
    }
    out
}

fn arcs_from_crossings(
    crossings: &[Crossing],
    fallback: impl FnOnce() -> u8,
) -> Vec<(u8, f64, f64)> {
    if crossings.is_empty() {
        return vec![(fallback(), 0.0, TAU)];
    }
    let n = crossings.len();
    let mut arcs = Vec::with_capacity(n + 1);
    // the arc wrapping through angle zero is split in two
    let first = crossings[0];
    let last = crossings[n - 1];
    if first.angle > 0.0 {
        arcs.push((last.after, 0.0, first.angle));
    }
    for k in 0..n {
        let start = crossings[k].angle;
        let end = if k + 1 < n {
            crossings[k + 1].angle
        } else {
            TAU
        };
        if end > start {
            arcs.push((crossings[k].after, start, end));
        }
    }
    arcs
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    pub(crate) fn chord(d: f64, sigma_pair: [u8; 2]) -> PolyConfig {
        let half = (1.0 - d * d).sqrt();
        PolyConfig::new(
            1.0,
            vec![Interface::new(
                sigma_pair,
                vec![Vec2::new(-half, d), Vec2::new(half, d)],
            )],
        )
        .unwrap()
    }

    fn junction(angles_deg: [f64; 3], labels: [u8; 3]) -> PolyConfig {
        // rays at cumulative angles; sector k lies between ray k and ray k+1
        let mut rays = vec![0.0];
        rays.push(angles_deg[0].to_radians());
        rays.push((angles_deg[0] + angles_deg[1]).to_radians());
        let mut ifs = Vec::new();
        for k in 0..3 {
            let before = labels[(k + 2) % 3];
            let after = labels[k];
            // ray from origin outward: its left side is the counter-clockwise sector
            ifs.push(Interface::oriented(
                after,
                before,
                Vec2::ZERO,
                Vec2::polar(rays[k]),
            ));
        }
        PolyConfig::new(1.0, ifs).unwrap()
    }

    #[test]
    fn diameter_energy() {
        let c = PolyConfig::new(
            1.0,
            vec![Interface::new(
                [0, 1],
                vec![Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0)],
            )],
        )
        .unwrap();
        let s = SurfaceTensions::new(2.0, 3.0, 3.0).unwrap();
        assert!((c.energy_fs(&s, Ball::centered(1.0)) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn triple_junction_energy_is_linear_in_radius() {
        let c = junction([120.0; 3], [0, 1, 2]);
        let s = SurfaceTensions::uniform(1.0).unwrap();
        for r in [0.1, 0.5, 1.0] {
            assert!((c.energy_fs(&s, Ball::centered(r)) - 3.0 * r).abs() < 1e-14);
        }
        let empty = PolyConfig::new(1.0, vec![]).unwrap();
        assert_eq!(empty.energy_fs(&s, Ball::centered(1.0)), 0.0);
    }

    #[test]
    fn energy_is_additive_over_annuli() {
        let c = chord(0.3, [0, 2]);
        let s = SurfaceTensions::new(1.0, 1.7, 1.2).unwrap();
        let inner = c.energy_fs(&s, Ball::centered(0.5));
        let outer = c.energy_fs(&s, Ball::centered(0.9));
        let half = (0.9f64 * 0.9 - 0.09).sqrt() - (0.25f64 - 0.09).sqrt();
        assert!((outer - inner - 1.7 * 2.0 * half).abs() < 1e-14);
    }

    #[test]
    fn half_disk_gravity() {
        // fluid 0 above y = 0, fluid 1 below: walking left to right keeps 0 on the left
        let c = PolyConfig::new(
            1.0,
            vec![Interface::new(
                [0, 1],
                vec![Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0)],
            )],
        )
        .unwrap();
        let s = SurfaceTensions::uniform(1.0).unwrap();
        let p = EnergyParams::new(s, [0.0; 3], [0.0, 1.0, 0.0], 1.0).unwrap();
        let e = c.energy_fswp(&p);
        assert!((e.gravity + 2.0 / 3.0).abs() < 1e-14, "{}", e.gravity);
        assert!((e.total - e.surface - e.gravity).abs() < 1e-15);
        let m = c.region_moments();
        assert!((m[0].area - PI / 2.0).abs() < 1e-14);
        assert!((m[1].area - PI / 2.0).abs() < 1e-14);
        assert!((m[0].moment_z - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn surface_only_total() {
        let c = junction([100.0, 130.0, 130.0], [0, 1, 2]);
        let s = SurfaceTensions::new(3.0, 4.0, 5.0).unwrap();
        let e = c.energy_fswp(&EnergyParams::surface_only(s));
        assert_eq!(e.total, e.surface);
        assert!((e.surface - 12.0).abs() < 1e-14);
    }

    #[test]
    fn wetting_counts_boundary_arcs() {
        let c = junction([90.0, 135.0, 135.0], [0, 1, 2]);
        let s = SurfaceTensions::uniform(1.0).unwrap();
        let p = EnergyParams::new(s, [0.25, 0.5, 0.0], [0.0; 3], 0.0).unwrap();
        let e = c.energy_fswp(&p);
        let expect = 0.25 * 90f64.to_radians() + 0.5 * 135f64.to_radians();
        assert!((e.wetting - expect).abs() < 1e-14);
    }

    #[test]
    fn relabeling_symmetry() {
        let c = junction([90.0, 135.0, 135.0], [0, 1, 2]);
        let swapped = junction([90.0, 135.0, 135.0], [1, 0, 2]);
        let s = SurfaceTensions::new(1.0, 1.5, 1.5).unwrap();
        let p = EnergyParams::new(s, [0.3, 0.3, 0.1], [2.0, 2.0, 1.0], 9.8).unwrap();
        assert!((c.energy_fswp(&p).total - swapped.energy_fswp(&p).total).abs() < 1e-13);
    }

    #[test]
    fn label_location() {
        let c = chord(0.6, [0, 1]);
        assert_eq!(c.label_at(Vec2::new(0.0, 0.9)), 0);
        assert_eq!(c.label_at(Vec2::new(0.1, 0.0)), 1);
        let j = junction([120.0; 3], [0, 1, 2]);
        assert_eq!(j.label_at(Vec2::polar(1.0).scale_to(0.5)), 0);
        assert_eq!(j.label_at(Vec2::polar(3.0).scale_to(0.5)), 1);
        assert_eq!(j.label_at(Vec2::polar(5.0).scale_to(0.5)), 2);
    }

    #[test]
    fn inner_disk_region_areas() {
        // fluid 1 disk of radius 0.5 inside fluid 0: counter-clockwise loop keeps 1 on the left... so pair [0,1] runs clockwise
        let n = 64;
        let pts: Vec<Vec2> = (0..=n)
            .map(|k| Vec2::polar(-(k as f64) * TAU / n as f64) * 0.5)
            .collect();
        let c = PolyConfig::new(1.0, vec![Interface::new([0, 1], pts)]).unwrap();
        let m = c.region_moments();
        let poly_area = 0.5 * n as f64 * 0.25 * (TAU / n as f64).sin();
        assert!((m[1].area - poly_area).abs() < 1e-13);
        assert!((m[0].area - (PI - poly_area)).abs() < 1e-13);
        assert_eq!(c.boundary_arcs(), vec![(0, 0.0, TAU)]);
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let c = chord(0.6, [0, 1]);
        let back = PolyConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let bad = r#"{"domain_radius":1.0,"interfaces":[{"pair":[1,0],"points":[[0,0],[0.5,0]]}]}"#;
        assert!(matches!(
            PolyConfig::from_json(bad),
            Err(PolyError::InvalidInterface { .. })
        ));
        let outside =
            r#"{"domain_radius":1.0,"interfaces":[{"pair":[0,1],"points":[[0,0],[1.5,0]]}]}"#;
        assert!(PolyConfig::from_json(outside).is_err());
    }

    trait ScaleTo {
        fn scale_to(self, r: f64) -> Vec2;
    }
    impl ScaleTo for Vec2 {
        fn scale_to(self, r: f64) -> Vec2 {
            self.normalized() * r
        }
    }
}
