//! Sector configurations about a vertex: their energy, and explicit
//! competitors showing when a cone can be improved.

use crate::fermat::{construct_good_triangle, fermat_cost_difference, FermatError, FermatWeights};
use crate::geom::Vec2;
use crate::polyconfig::{Interface, PolyConfig};
use crate::tensions::{neumann_angles, SurfaceTensions, TensionError};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use thiserror::Error;

/// Openings within this many radians of their Neumann angle count as exact.
pub const ANGLE_TOL: f64 = 1e-9;

/// Fraction of the evaluation disk at which the fill-in chord is placed.
pub const FILL_IN_FRACTION: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("invalid sectors: {0}")]
    InvalidSectors(String),
    #[error("volume corrections must sum to zero (sum {0:e})")]
    UnbalancedVolumes(f64),
    #[error("fluid {label} needs a volume change but has no sector")]
    MissingFluid { label: u8 },
    #[error("disk of radius {radius} too small: rectangle width {width} exceeds {limit} in sector {sector}")]
    DiskTooSmall {
        radius: f64,
        sector: usize,
        width: f64,
        limit: f64,
    },
    #[error(transparent)]
    Tension(#[from] TensionError),
    #[error(transparent)]
    Fermat(#[from] FermatError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub label: u8,
    pub start: f64,
    pub end: f64,
}

impl Sector {
    pub fn opening(&self) -> f64 {
        self.end - self.start
    }
}

/// Labelled sectors covering `[0, 2π)` counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Sector>", into = "Vec<Sector>")]
pub struct ConeConfig {
    sectors: Vec<Sector>,
}

impl TryFrom<Vec<Sector>> for ConeConfig {
    type Error = ConeError;
    fn try_from(v: Vec<Sector>) -> Result<Self, ConeError> {
        ConeConfig::new(v)
    }
}

impl From<ConeConfig> for Vec<Sector> {
    fn from(c: ConeConfig) -> Self {
        c.sectors
    }
}

impl ConeConfig {
    pub fn new(sectors: Vec<Sector>) -> Result<Self, ConeError> {
        let bad = |m: String| Err(ConeError::InvalidSectors(m));
        if sectors.is_empty() {
            return bad("no sectors".into());
        }
        if sectors[0].start.abs() > 1e-12 {
            return bad(format!(
                "first sector starts at {}, not 0",
                sectors[0].start
            ));
        }
        if (sectors[sectors.len() - 1].end - TAU).abs() > 1e-9 {
            return bad("sectors do not close at 2π".into());
        }
        let n = sectors.len();
        for (k, s) in sectors.iter().enumerate() {
            if s.label > 2 {
                return bad(format!("sector {k} has label {}", s.label));
            }
            if !(s.end > s.start) {
                return bad(format!("sector {k} has non-positive opening"));
            }
            if k + 1 < n && (sectors[k + 1].start - s.end).abs() > 1e-12 {
                return bad(format!("gap or overlap after sector {k}"));
            }
            if n > 1 && sectors[(k + 1) % n].label == s.label {
                return bad(format!(
                    "sectors {k} and {} share label {}",
                    (k + 1) % n,
                    s.label
                ));
            }
        }
        let mut sectors = sectors;
        sectors[n - 1].end = TAU;
        Ok(ConeConfig { sectors })
    }

    /// Consecutive sectors with the given openings, starting at angle 0.
    pub fn from_openings(labels: &[u8], openings: &[f64]) -> Result<Self, ConeError> {
        if labels.len() != openings.len() {
            return Err(ConeError::InvalidSectors(
                "labels and openings differ in length".into(),
            ));
        }
        let mut start = 0.0;
        let sectors = labels
            .iter()
            .zip(openings)
            .map(|(&label, &o)| {
                let s = Sector {
                    label,
                    start,
                    end: start + o,
                };
                start += o;
                s
            })
            .collect();
        ConeConfig::new(sectors)
    }

    pub fn from_openings_deg(labels: &[u8], openings_deg: &[f64]) -> Result<Self, ConeError> {
        let rad: Vec<f64> = openings_deg.iter().map(|d| d.to_radians()).collect();
        Self::from_openings(labels, &rad)
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    fn next(&self, k: usize) -> usize {
        (k + 1) % self.len()
    }

    fn prev(&self, k: usize) -> usize {
        (k + self.len() - 1) % self.len()
    }

    /// Boundary rays as `(angle, label before, label after)` going
    /// counter-clockwise. A single sector has no boundary.
    pub fn rays(&self) -> Vec<(f64, u8, u8)> {
        if self.len() < 2 {
            return Vec::new();
        }
        (0..self.len())
            .map(|k| {
                (
                    self.sectors[k].start,
                    self.sectors[self.prev(k)].label,
                    self.sectors[k].label,
                )
            })
            .collect()
    }

    /// Label of the sector containing direction `angle`.
    pub fn label_at(&self, angle: f64) -> u8 {
        let a = angle.rem_euclid(TAU);
        self.sectors
            .iter()
            .find(|s| a < s.end)
            .unwrap_or(&self.sectors[self.len() - 1])
            .label
    }

    /// The cone restricted to the disk of radius `radius`.
    pub fn to_polyconfig(&self, radius: f64) -> PolyConfig {
        let interfaces = self
            .rays()
            .into_iter()
            .map(|(angle, before, after)| {
                Interface::oriented(after, before, Vec2::ZERO, Vec2::polar(angle) * radius)
            })
            .collect();
        PolyConfig {
            domain_radius: radius,
            interfaces,
            background: self.sectors[0].label,
        }
    }
}

/// `r · Σ σ` over the boundary rays.
pub fn cone_energy(c: &ConeConfig, s: &SurfaceTensions, r: f64) -> f64 {
    r * c
        .rays()
        .iter()
        .map(|&(_, a, b)| s.between(a, b))
        .sum::<f64>()
}

/// `t⁻¹ E(B_t) + C t²`.
pub fn scaled_energy_p(c: &ConeConfig, s: &SurfaceTensions, t: f64, constant: f64) -> f64 {
    cone_energy(c, s, t) / t + constant * t * t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mechanism {
    TwoFluidFillIn,
    GoodTriangleReplacement,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImprovementReport {
    pub improvable: bool,
    pub mechanism: Mechanism,
    /// competitor energy minus cone energy on the evaluation disk
    pub energy_delta: f64,
    /// index of the sector the competitor modifies
    pub sector: Option<usize>,
    pub evaluation_radius: f64,
    pub competitor: Option<PolyConfig>,
}

impl ImprovementReport {
    fn none(evaluation_radius: f64) -> Self {
        ImprovementReport {
            improvable: false,
            mechanism: Mechanism::None,
            energy_delta: 0.0,
            sector: None,
            evaluation_radius,
            competitor: None,
        }
    }
}

/// Looks for three consecutive sectors using only two fluids and, if the
/// middle one opens less than a half-turn, cuts its tip off with a chord.
pub fn detect_fill_in(c: &ConeConfig, s: &SurfaceTensions) -> ImprovementReport {
    detect_fill_in_at(c, s, 1.0)
}

pub fn detect_fill_in_at(c: &ConeConfig, s: &SurfaceTensions, radius: f64) -> ImprovementReport {
    if c.len() < 2 {
        return ImprovementReport::none(radius);
    }
    let best = (0..c.len())
        .filter(|&k| c.sectors[c.prev(k)].label == c.sectors[c.next(k)].label)
        .min_by(|&a, &b| c.sectors[a].opening().total_cmp(&c.sectors[b].opening()));
    let Some(k) = best else {
        return ImprovementReport::none(radius);
    };
    let wedge = c.sectors[k];
    let theta = wedge.opening();
    if theta >= PI {
        return ImprovementReport::none(radius);
    }
    let flank = c.sectors[c.next(k)].label;
    let sigma = s.between(flank, wedge.label);
    let r0 = FILL_IN_FRACTION * radius;
    let energy_delta = sigma * r0 * (2.0 * (0.5 * theta).sin() - 2.0);

    let ps = Vec2::polar(wedge.start) * r0;
    let pe = Vec2::polar(wedge.end) * r0;
    let mut interfaces = Vec::new();
    let kn = c.next(k);
    for (r, (angle, before, after)) in c.rays().into_iter().enumerate() {
        let u = Vec2::polar(angle);
        let inner = if r == k || r == kn { r0 } else { 0.0 };
        interfaces.push(Interface::oriented(after, before, u * inner, u * radius));
    }
    // the origin side of the chord now belongs to the flanking fluid
    interfaces.push(Interface::oriented(flank, wedge.label, ps, pe));
    ImprovementReport {
        improvable: energy_delta < 0.0,
        mechanism: Mechanism::TwoFluidFillIn,
        energy_delta,
        sector: Some(k),
        evaluation_radius: radius,
        competitor: Some(PolyConfig {
            domain_radius: radius,
            interfaces,
            background: flank,
        }),
    }
}

/// Verdict on whether the cone can be locally improved, with a competitor.
pub fn classify_cone(c: &ConeConfig, s: &SurfaceTensions) -> Result<ImprovementReport, ConeError> {
    classify_cone_with(c, s, 1.0, ANGLE_TOL)
}

pub fn classify_cone_with(
    c: &ConeConfig,
    s: &SurfaceTensions,
    radius: f64,
    tol: f64,
) -> Result<ImprovementReport, ConeError> {
    let gamma = neumann_angles(s)?;
    let fill = detect_fill_in_at(c, s, radius);
    if fill.improvable {
        return Ok(fill);
    }
    if c.len() < 3 {
        // a single fluid, or a straight two-fluid line
        return Ok(ImprovementReport::none(radius));
    }
    let deficits: Vec<(usize, f64)> = (0..c.len())
        .filter(|&k| {
            let a = c.sectors[c.prev(k)].label;
            let b = c.sectors[c.next(k)].label;
            a != b
        })
        .map(|k| {
            (
                k,
                gamma.for_fluid(c.sectors[k].label) - c.sectors[k].opening(),
            )
        })
        .collect();
    if c.len() == 3 && deficits.iter().all(|&(_, d)| d.abs() <= tol) {
        return Ok(ImprovementReport::none(radius));
    }
    let Some(&(k, deficit)) = deficits.iter().max_by(|a, b| a.1.total_cmp(&b.1)) else {
        return Ok(ImprovementReport::none(radius));
    };
    if !(deficit > 0.0) {
        return Ok(ImprovementReport::none(radius));
    }
    good_triangle_competitor(c, s, k, radius)
}

/// Replaces the tip of sector `k` by a good triangle scaled to half the disk.
fn good_triangle_competitor(
    c: &ConeConfig,
    s: &SurfaceTensions,
    k: usize,
    radius: f64,
) -> Result<ImprovementReport, ConeError> {
    let sector = c.sectors[k];
    let fluid = sector.label;
    let cw = c.sectors[c.prev(k)].label;
    let ccw = c.sectors[c.next(k)].label;
    // the construction puts its own fluid 0 in the sector, 2 clockwise and 1 counter-clockwise
    let local = s.permuted([fluid, ccw, cw]);
    let tri = construct_good_triangle(&local, sector.opening(), sector.start)?;
    let w = FermatWeights::from_tensions(&local);
    let extent = tri.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let scale = 0.5 * radius / extent;
    let energy_delta =
        scale * fermat_cost_difference(tri.tilde_p, tri.vertices[0], &tri.vertices, &w);

    let [p0, p1, p2] = tri.vertices.map(|v| v * scale);
    let tp = tri.tilde_p * scale;
    let mut interfaces = Vec::new();
    let kn = c.next(k);
    for (r, (angle, before, after)) in c.rays().into_iter().enumerate() {
        let u = Vec2::polar(angle);
        let inner = if r == k {
            p1
        } else if r == kn {
            p2
        } else {
            Vec2::ZERO
        };
        interfaces.push(Interface::oriented(after, before, inner, u * radius));
    }
    let side = |left: u8, right: u8, from: Vec2, to: Vec2, left_point: Vec2| {
        if (to - from).cross(left_point - from) > 0.0 {
            Interface::oriented(left, right, from, to)
        } else {
            Interface::oriented(right, left, from, to)
        }
    };
    let in_fluid = (tp + p1 + p2) / 3.0;
    let in_cw = (tp + p0 + p1) / 3.0;
    interfaces.push(side(fluid, cw, tp, p1, in_fluid));
    interfaces.push(side(fluid, ccw, tp, p2, in_fluid));
    interfaces.push(side(cw, ccw, tp, p0, in_cw));
    Ok(ImprovementReport {
        improvable: energy_delta < 0.0,
        mechanism: Mechanism::GoodTriangleReplacement,
        energy_delta,
        sector: Some(k),
        evaluation_radius: radius,
        competitor: Some(PolyConfig {
            domain_radius: radius,
            interfaces,
            background: fluid,
        }),
    })
}

/// One rectangle moved across a boundary ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rectangle {
    pub ray_angle: f64,
    pub giver: u8,
    pub receiver: u8,
    pub inner: f64,
    pub outer: f64,
    pub width: f64,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeFix {
    pub rectangles: Vec<Rectangle>,
    pub cost_bound: f64,
    pub competitor: PolyConfig,
}

/// Restores per-fluid volume changes `delta_v` by pushing thin rectangles
/// across boundary rays, each spanning `[R/4, 3R/4]` along its ray and
/// reaching into the giving sector. Volume moves along a spanning tree of
/// the label adjacency, rooted at a fluid adjacent to both others.
pub fn rectangle_volume_fix(
    c: &ConeConfig,
    delta_v: [f64; 3],
    radius: f64,
    s: &SurfaceTensions,
) -> Result<VolumeFix, ConeError> {
    let scale = delta_v.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let sum: f64 = delta_v.iter().sum();
    if sum.abs() > 1e-12 * scale.max(1.0) {
        return Err(ConeError::UnbalancedVolumes(sum));
    }
    let present: Vec<u8> = (0..3u8)
        .filter(|l| c.sectors.iter().any(|s| s.label == *l))
        .collect();
    for l in 0..3u8 {
        if !present.contains(&l) && delta_v[l as usize] != 0.0 {
            return Err(ConeError::MissingFluid { label: l });
        }
    }
    let rays = c.rays();
    let ray_between = |a: u8, b: u8| {
        rays.iter()
            .position(|&(_, p, q)| (p == a && q == b) || (p == b && q == a))
    };
    let hub = present
        .iter()
        .copied()
        .find(|&h| {
            present
                .iter()
                .all(|&o| o == h || ray_between(h, o).is_some())
        })
        .unwrap_or(present[0]);

    let inner = 0.25 * radius;
    let outer = 0.75 * radius;
    let len = outer - inner;
    let mut rectangles = Vec::new();
    let mut interfaces: Vec<Interface> = Vec::new();
    let mut used = vec![false; rays.len()];
    for &leaf in present.iter().filter(|&&l| l != hub) {
        let amount = delta_v[leaf as usize];
        if amount == 0.0 {
            continue;
        }
        let r = ray_between(hub, leaf).expect("hub is adjacent to every other fluid");
        used[r] = true;
        let (angle, before, after) = rays[r];
        let (giver, receiver) = if amount > 0.0 {
            (hub, leaf)
        } else {
            (leaf, hub)
        };
        let width = amount.abs() / len;
        // the giving sector lies counter-clockwise of the ray when it is `after`
        let sector_idx = if giver == after { r } else { c.prev(r) };
        let half = 0.5 * c.sectors[sector_idx].opening();
        let limit = if half >= FRAC_PI_2 {
            f64::INFINITY
        } else {
            inner * half.tan()
        }
        .min(radius * (1.0 - 0.5625f64).sqrt());
        if width >= limit {
            return Err(ConeError::DiskTooSmall {
                radius,
                sector: sector_idx,
                width,
                limit,
            });
        }
        let u = Vec2::polar(angle);
        let n = if giver == after { u.perp() } else { -u.perp() };
        let pts = vec![
            Vec2::ZERO,
            u * inner,
            u * inner + n * width,
            u * outer + n * width,
            u * outer,
            u * radius,
        ];
        let it = if after < before {
            Interface::new([after, before], pts)
        } else {
            Interface::new([before, after], pts.into_iter().rev().collect())
        };
        interfaces.push(it);
        rectangles.push(Rectangle {
            ray_angle: angle,
            giver,
            receiver,
            inner,
            outer,
            width,
            area: width * len,
        });
    }
    for (r, &(angle, before, after)) in rays.iter().enumerate() {
        if !used[r] {
            interfaces.push(Interface::oriented(
                after,
                before,
                Vec2::ZERO,
                Vec2::polar(angle) * radius,
            ));
        }
    }
    let cost_bound = rectangles
        .iter()
        .map(|rc| 2.0 * rc.width * s.between(rc.giver, rc.receiver))
        .sum();
    Ok(VolumeFix {
        rectangles,
        cost_bound,
        competitor: PolyConfig {
            domain_radius: radius,
            interfaces,
            background: c.sectors[0].label,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyconfig::Ball;

    fn unit() -> SurfaceTensions {
        SurfaceTensions::uniform(1.0).unwrap()
    }

    fn energy_gap(c: &ConeConfig, s: &SurfaceTensions, report: &ImprovementReport) -> f64 {
        let ball = Ball::centered(report.evaluation_radius);
        let original = c.to_polyconfig(report.evaluation_radius).energy_fs(s, ball);
        let competitor = report.competitor.as_ref().unwrap().energy_fs(s, ball);
        competitor - original
    }

    #[test]
    fn energy_examples() {
        let c = ConeConfig::from_openings_deg(&[0, 1, 2], &[120.0; 3]).unwrap();
        assert_eq!(cone_energy(&c, &unit(), 1.0), 3.0);
        let s = SurfaceTensions::new(3.0, 4.0, 5.0).unwrap();
        assert_eq!(cone_energy(&c, &s, 2.0), 24.0);
        for t in [0.1, 1.0, 10.0] {
            assert!((scaled_energy_p(&c, &s, t, 0.0) - 12.0).abs() < 1e-13);
        }
        let d = scaled_energy_p(&c, &s, 2.0, 0.5) - scaled_energy_p(&c, &s, 1.0, 0.5);
        assert!((d - 1.5).abs() < 1e-13);
    }

    #[test]
    fn sector_validation() {
        assert!(ConeConfig::from_openings_deg(&[0, 0, 1], &[120.0; 3]).is_err());
        assert!(ConeConfig::from_openings_deg(&[0, 1, 2], &[120.0, 120.0, 100.0]).is_err());
        assert!(ConeConfig::from_openings_deg(&[0, 3, 2], &[120.0; 3]).is_err());
        let c = ConeConfig::from_openings_deg(&[0, 1], &[200.0, 160.0]).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ConeConfig>(&json).unwrap(), c);
    }

    #[test]
    fn fill_in_on_alternating_labels() {
        let c = ConeConfig::from_openings_deg(&[0, 1, 0, 1, 2, 1], &[60.0; 6]).unwrap();
        let r = detect_fill_in(&c, &unit());
        assert_eq!(r.mechanism, Mechanism::TwoFluidFillIn);
        assert!(r.improvable && r.energy_delta < 0.0);
        let gap = energy_gap(&c, &unit(), &r);
        assert!(
            (gap - r.energy_delta).abs() < 1e-12,
            "{gap} vs {}",
            r.energy_delta
        );

        let c = ConeConfig::from_openings_deg(&[0, 1, 0, 2], &[80.0, 70.0, 110.0, 100.0]).unwrap();
        let r = detect_fill_in(&c, &unit());
        assert_eq!(r.sector, Some(1));
        assert!((energy_gap(&c, &unit(), &r) - r.energy_delta).abs() < 1e-12);

        let c = ConeConfig::from_openings_deg(&[0, 1, 2], &[120.0; 3]).unwrap();
        assert_eq!(detect_fill_in(&c, &unit()).mechanism, Mechanism::None);
    }

    #[test]
    fn fill_in_competitor_labels() {
        let c = ConeConfig::from_openings_deg(&[0, 1, 0, 2], &[80.0, 70.0, 110.0, 100.0]).unwrap();
        let r = detect_fill_in(&c, &unit());
        let comp = r.competitor.unwrap();
        // inside the chord the wedge is gone
        let q = Vec2::polar(115f64.to_radians()) * 0.02;
        assert_eq!(comp.label_at(q), 0);
        let q = Vec2::polar(115f64.to_radians()) * 0.5;
        assert_eq!(comp.label_at(q), 1);
    }

    #[test]
    fn symmetric_cone_is_minimal() {
        let c = ConeConfig::from_openings_deg(&[0, 1, 2], &[120.0; 3]).unwrap();
        let r = classify_cone(&c, &unit()).unwrap();
        assert!(!r.improvable);
        assert_eq!(r.mechanism, Mechanism::None);
    }

    #[test]
    fn wrong_angles_are_improved() {
        let c = ConeConfig::from_openings_deg(&[0, 1, 2], &[100.0, 130.0, 130.0]).unwrap();
        let r = classify_cone(&c, &unit()).unwrap();
        assert_eq!(r.mechanism, Mechanism::GoodTriangleReplacement);
        assert_eq!(r.sector, Some(0));
        assert!(r.energy_delta < 0.0);
        let gap = energy_gap(&c, &unit(), &r);
        assert!(
            (gap - r.energy_delta).abs() < 1e-12,
            "{gap} vs {}",
            r.energy_delta
        );
    }

    #[test]
    fn neumann_cone_flips_under_perturbation() {
        let s = SurfaceTensions::new(3.0, 4.0, 5.0).unwrap();
        let g = neumann_angles(&s).unwrap();
        let open = [g.for_fluid(0), g.for_fluid(1), g.for_fluid(2)];
        let c = ConeConfig::from_openings(&[0, 1, 2], &open).unwrap();
        assert!(!classify_cone(&c, &s).unwrap().improvable);
        for k in 0..3 {
            let mut o = open;
            o[k] += 1e-6;
            o[(k + 1) % 3] -= 1e-6;
            let c = ConeConfig::from_openings(&[0, 1, 2], &o).unwrap();
            let r = classify_cone(&c, &s).unwrap();
            assert!(r.improvable, "perturbation {k}");
            assert!(energy_gap(&c, &s, &r) < 0.0);
        }
    }

    #[test]
    fn six_alternating_sectors() {
        let c = ConeConfig::from_openings_deg(&[0, 1, 0, 1, 0, 1], &[60.0; 6]).unwrap();
        assert_eq!(
            classify_cone(&c, &unit()).unwrap().mechanism,
            Mechanism::TwoFluidFillIn
        );
        let c = ConeConfig::from_openings_deg(&[0, 1, 2, 0, 1, 2], &[60.0; 6]).unwrap();
        let r = classify_cone(&c, &unit()).unwrap();
        assert_eq!(r.mechanism, Mechanism::GoodTriangleReplacement);
        assert!(energy_gap(&c, &unit(), &r) < 0.0);
    }

    #[test]
    fn straight_line_and_single_fluid() {
        let c = ConeConfig::from_openings_deg(&[0, 1], &[180.0, 180.0]).unwrap();
        assert!(!classify_cone(&c, &unit()).unwrap().improvable);
        let c = ConeConfig::from_openings_deg(&[2], &[360.0]).unwrap();
        assert!(!classify_cone(&c, &unit()).unwrap().improvable);
        assert_eq!(cone_energy(&c, &unit(), 3.0), 0.0);
    }

    #[test]
    fn volume_fix_restores_volumes() {
        let c = ConeConfig::from_openings_deg(&[0, 1, 2], &[100.0, 130.0, 130.0]).unwrap();
        let s = SurfaceTensions::new(1.0, 1.2, 1.4).unwrap();
        let dv = [0.01, -0.004, -0.006];
        let fix = rectangle_volume_fix(&c, dv, 1.0, &s).unwrap();
        let before = c.to_polyconfig(1.0).region_moments();
        let after = fix.competitor.region_moments();
        for j in 0..3 {
            assert!((after[j].area - before[j].area - dv[j]).abs() < 1e-14);
        }
        let extra = fix.competitor.surface_energy(&s) - c.to_polyconfig(1.0).surface_energy(&s);
        assert!((extra - fix.cost_bound).abs() < 1e-14);
        let fix2 = rectangle_volume_fix(&c, dv, 2.0, &s).unwrap();
        assert!((fix2.cost_bound - 0.5 * fix.cost_bound).abs() < 1e-14);
    }

    #[test]
    fn volume_fix_edge_cases() {
        let c = ConeConfig::from_openings_deg(&[0, 1, 2], &[1.0, 179.0, 180.0]).unwrap();
        let fix = rectangle_volume_fix(&c, [0.0; 3], 1.0, &unit()).unwrap();
        assert!(fix.rectangles.is_empty());
        assert_eq!(fix.cost_bound, 0.0);
        assert!(matches!(
            rectangle_volume_fix(&c, [-0.2, 0.1, 0.1], 1.0, &unit()),
            Err(ConeError::DiskTooSmall { .. })
        ));
        assert!(matches!(
            rectangle_volume_fix(&c, [0.1, 0.1, 0.1], 1.0, &unit()),
            Err(ConeError::UnbalancedVolumes(_))
        ));
    }
}
