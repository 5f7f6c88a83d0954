//! Small planar vector type shared by the exact-geometry modules.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at polar angle `theta`.
    #[inline]
    pub fn polar(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3d cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Vec2 {
        self / self.norm()
    }

    /// Counter-clockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Polar angle in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        wrap_angle(self.y.atan2(self.x))
    }
}

/// Maps any angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let t = a.rem_euclid(std::f64::consts::TAU);
    if t >= std::f64::consts::TAU {
        0.0
    } else {
        t
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

/// Parameters `t` in `[0, 1]` where the segment `a + t (b - a)` meets the circle
/// of radius `r` about the origin, sorted ascending.
pub fn segment_circle_params(a: Vec2, b: Vec2, r: f64) -> Vec<f64> {
    let d = b - a;
    let qa = d.norm_sq();
    if qa == 0.0 {
        return Vec::new();
    }
    let qb = 2.0 * a.dot(d);
    let qc = a.norm_sq() - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // numerically stable pair of roots
    let q = -0.5 * (qb + qb.signum() * sq);
    let mut roots = if q == 0.0 {
        vec![0.0]
    } else {
        vec![q / qa, qc / q]
    };
    roots.retain(|t| (0.0..=1.0).contains(t));
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots.dedup();
    roots
}

/// Portion of segment `[a, b]` inside the closed disk of radius `r` about the
/// origin, as a parameter interval.
pub fn clip_segment_to_disk(a: Vec2, b: Vec2, r: f64) -> Option<(f64, f64)> {
    let d = b - a;
    let qa = d.norm_sq();
    let r2 = r * r;
    if qa == 0.0 {
        return if a.norm_sq() <= r2 {
            Some((0.0, 0.0))
        } else {
            None
        };
    }
    let qb = 2.0 * a.dot(d);
    let qc = a.norm_sq() - r2;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let q = -0.5 * (qb + if qb >= 0.0 { sq } else { -sq });
    let (mut t0, mut t1) = if q == 0.0 {
        let t = (qc / qa).abs().sqrt();
        (-t, t)
    } else {
        (q / qa, qc / q)
    };
    if t0 > t1 {
        std::mem::swap(&mut t0, &mut t1);
    }
    let lo = t0.max(0.0);
    let hi = t1.min(1.0);
    if hi > lo {
        Some((lo, hi))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chord_clip_matches_geometry() {
        let a = Vec2::new(-2.0, 0.6);
        let b = Vec2::new(2.0, 0.6);
        let (t0, t1) = clip_segment_to_disk(a, b, 1.0).unwrap();
        let len = (t1 - t0) * 4.0;
        assert!((len - 1.6).abs() < 1e-14);
    }

    #[test]
    fn clip_inside_is_whole_segment() {
        let (t0, t1) = clip_segment_to_disk(Vec2::new(0.1, 0.0), Vec2::new(0.2, 0.3), 1.0).unwrap();
        assert_eq!((t0, t1), (0.0, 1.0));
        assert!(clip_segment_to_disk(Vec2::new(2.0, 0.0), Vec2::new(3.0, 0.0), 1.0).is_none());
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_angle(std::f64::consts::TAU), 0.0);
        assert!((wrap_angle(-0.5) - (std::f64::consts::TAU - 0.5)).abs() < 1e-15);
    }
}
