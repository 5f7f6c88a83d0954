//! First variation of the surface energy along compactly supported fields.

use super::{PolyConfig, PolyError, Segment};
use crate::geom::{clip_segment_to_disk, segment_circle_params, Vec2};
use crate::quadrature::{integrate_split, DEFAULT_TOL};
use crate::tensions::SurfaceTensions;
use serde::{Deserialize, Serialize};

/// Cut-off profile: 1 below ½, 0 above 1, a cubic smoothstep in between.
pub fn profile(s: f64) -> f64 {
    if s <= 0.5 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let t = 2.0 * s - 1.0;
        1.0 - t * t * (3.0 - 2.0 * t)
    }
}

pub fn profile_derivative(s: f64) -> f64 {
    if s <= 0.5 || s >= 1.0 {
        0.0
    } else {
        let t = 2.0 * s - 1.0;
        -12.0 * t * (1.0 - t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldKind {
    /// `T(x) = φ(|x − c|/r)(x − c)`
    Radial,
    /// `T(x) = φ(|x − c|/r) e`
    Translation { direction: Vec2 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestField {
    pub center: Vec2,
    pub radius: f64,
    pub kind: FieldKind,
}

impl TestField {
    pub fn radial(center: Vec2, radius: f64) -> Self {
        TestField {
            center,
            radius,
            kind: FieldKind::Radial,
        }
    }

    pub fn translation(center: Vec2, radius: f64, direction: Vec2) -> Self {
        TestField {
            center,
            radius,
            kind: FieldKind::Translation { direction },
        }
    }

    fn direction_at(&self, y: Vec2) -> Vec2 {
        match self.kind {
            FieldKind::Radial => y,
            FieldKind::Translation { direction } => direction,
        }
    }

    pub fn value(&self, x: Vec2) -> Vec2 {
        let y = x - self.center;
        self.direction_at(y) * profile(y.norm() / self.radius)
    }

    /// Tangential divergence `div T − ν·(∇T)ν = τ·(∇T)τ` for unit tangent `tau`.
    pub fn tangential_divergence(&self, x: Vec2, tau: Vec2) -> f64 {
        let y = x - self.center;
        let rho = y.norm();
        let s = rho / self.radius;
        let mut out = 0.0;
        if rho > 0.0 {
            let v = self.direction_at(y);
            out += profile_derivative(s) / self.radius * v.dot(tau) * (y / rho).dot(tau);
        }
        if matches!(self.kind, FieldKind::Radial) {
            out += profile(s);
        }
        out
    }

    pub fn describe(&self) -> String {
        match self.kind {
            FieldKind::Radial => format!(
                "radial field at ({}, {}) radius {}",
                self.center.x, self.center.y, self.radius
            ),
            FieldKind::Translation { direction } => format!(
                "translation field ({}, {}) at ({}, {}) radius {}",
                direction.x, direction.y, self.center.x, self.center.y, self.radius
            ),
        }
    }
}

fn segment_residual(seg: &Segment, field: &TestField) -> Result<f64, PolyError> {
    let c = field.center;
    let Some((t0, t1)) = clip_segment_to_disk(seg.a - c, seg.b - c, field.radius) else {
        return Ok(0.0);
    };
    let len = seg.length();
    let tau = (seg.b - seg.a) / len;
    let mut breaks: Vec<f64> = segment_circle_params(seg.a - c, seg.b - c, 0.5 * field.radius);
    // foot of the perpendicular from the center
    breaks.push((c - seg.a).dot(tau) / len);
    let f = |t: f64| field.tangential_divergence(seg.a + (seg.b - seg.a) * t, tau);
    Ok(len * integrate_split(&f, t0, t1, &breaks, DEFAULT_TOL)?)
}

impl PolyConfig {
    /// `Σ σ_ij ∫_interface div_τ T ds`; zero for configurations stationary
    /// against `field`.
    pub fn first_variation_residual(
        &self,
        s: &SurfaceTensions,
        field: &TestField,
    ) -> Result<f64, PolyError> {
        if field.center.norm() + field.radius > self.domain_radius * (1.0 + 1e-12) {
            return Err(PolyError::BallOutsideDomain {
                center: field.center,
                radius: field.radius,
            });
        }
        let mut total = 0.0;
        for seg in self.segments() {
            total += s.between(seg.pair[0], seg.pair[1]) * segment_residual(&seg, field)?;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::super::Interface;
    use super::*;

    fn rays(angles_deg: &[f64]) -> PolyConfig {
        let labels = [0u8, 1, 2];
        let n = angles_deg.len();
        let mut acc = 0.0f64;
        let mut ifs = Vec::new();
        for k in 0..n {
            let dir = Vec2::polar(acc.to_radians());
            ifs.push(Interface::oriented(
                labels[k],
                labels[(k + n - 1) % n],
                Vec2::ZERO,
                dir,
            ));
            acc += angles_deg[k];
        }
        PolyConfig::new(1.0, ifs).unwrap()
    }

    /// `∫ τ·∂_s T ds = τ·T(end) − τ·T(start)` per segment.
    fn exact_residual(c: &PolyConfig, s: &SurfaceTensions, field: &TestField) -> f64 {
        c.segments()
            .map(|seg| {
                let tau = (seg.b - seg.a).normalized();
                s.between(seg.pair[0], seg.pair[1])
                    * (tau.dot(field.value(seg.b)) - tau.dot(field.value(seg.a)))
            })
            .sum()
    }

    #[test]
    fn profile_shape() {
        assert_eq!(profile(0.2), 1.0);
        assert_eq!(profile(1.2), 0.0);
        assert!((profile(0.75) - 0.5).abs() < 1e-15);
        let h = 1e-6;
        for s in [0.55, 0.7, 0.9] {
            let fd = (profile(s + h) - profile(s - h)) / (2.0 * h);
            assert!((fd - profile_derivative(s)).abs() < 1e-6);
            assert!(profile_derivative(s) <= 0.0);
        }
    }

    #[test]
    fn line_through_center_is_stationary() {
        let c = PolyConfig::new(
            1.0,
            vec![Interface::new(
                [0, 1],
                vec![Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0)],
            )],
        )
        .unwrap();
        let s = SurfaceTensions::uniform(1.0).unwrap();
        let r = c
            .first_variation_residual(&s, &TestField::radial(Vec2::ZERO, 0.6))
            .unwrap();
        assert!(r.abs() < 1e-10);
    }

    #[test]
    fn balanced_junction_is_stationary() {
        let c = rays(&[120.0, 120.0, 120.0]);
        let s = SurfaceTensions::uniform(1.0).unwrap();
        for field in [
            TestField::radial(Vec2::ZERO, 0.5),
            TestField::translation(Vec2::ZERO, 0.5, Vec2::new(0.3, 0.8)),
        ] {
            assert!(c.first_variation_residual(&s, &field).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn unbalanced_junction_pulls_under_translation() {
        let c = rays(&[90.0, 135.0, 135.0]);
        let s = SurfaceTensions::uniform(1.0).unwrap();
        let e = Vec2::new(1.0, 0.0);
        let field = TestField::translation(Vec2::ZERO, 0.5, e);
        let r = c.first_variation_residual(&s, &field).unwrap();
        let expect = exact_residual(&c, &s, &field);
        assert!((r - expect).abs() < 1e-9, "{r} vs {expect}");
        assert!(r.abs() > 0.05);
        // a radial field at the vertex does not see the imbalance
        let radial = c
            .first_variation_residual(&s, &TestField::radial(Vec2::ZERO, 0.5))
            .unwrap();
        assert!(radial.abs() < 1e-10);
    }

    #[test]
    fn quadrature_matches_exact_boundary_terms() {
        let c = PolyConfig::new(
            1.0,
            vec![
                Interface::new(
                    [0, 1],
                    vec![
                        Vec2::new(-0.7, 0.1),
                        Vec2::new(0.05, 0.02),
                        Vec2::new(0.4, 0.5),
                    ],
                ),
                Interface::new([1, 2], vec![Vec2::new(0.05, 0.02), Vec2::new(0.3, -0.6)]),
            ],
        )
        .unwrap();
        let s = SurfaceTensions::new(1.0, 1.3, 0.8).unwrap();
        for field in [
            TestField::radial(Vec2::new(0.1, 0.0), 0.6),
            TestField::translation(Vec2::new(-0.1, 0.1), 0.45, Vec2::new(0.6, -0.8)),
        ] {
            let q = c.first_variation_residual(&s, &field).unwrap();
            let e = exact_residual(&c, &s, &field);
            assert!((q - e).abs() < 1e-9, "{q} vs {e}");
        }
    }

    #[test]
    fn field_outside_domain_rejected() {
        let c = rays(&[120.0, 120.0, 120.0]);
        let s = SurfaceTensions::uniform(1.0).unwrap();
        assert!(c
            .first_variation_residual(&s, &TestField::radial(Vec2::new(0.8, 0.0), 0.5))
            .is_err());
    }
}
