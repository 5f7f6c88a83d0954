//! Conical projection: replace the inside of `B_t` by the cone over the
//! trace on `∂B_t`.

use super::{Interface, PolyConfig, PolyError, Side};
use crate::geom::Vec2;
use crate::tensions::SurfaceTensions;

impl PolyConfig {
    pub fn conical_projection(&self, t: f64) -> Result<PolyConfig, PolyError> {
        if !(t > 0.0 && t < self.domain_radius) {
            return Err(PolyError::RadiusOutOfRange {
                radius: t,
                domain_radius: self.domain_radius,
            });
        }
        let crossings = self.crossings(t, Side::Outside)?;
        let mut interfaces = Vec::new();
        for it in &self.interfaces {
            let refined = super::refine_at_circle(&it.points, t);
            let mut current: Vec<Vec2> = Vec::new();
            for w in refined.windows(2) {
                let outside = (0.5 * (w[0] + w[1])).norm() >= t;
                if outside {
                    if current.is_empty() {
                        current.push(w[0]);
                    }
                    current.push(w[1]);
                } else if current.len() >= 2 {
                    interfaces.push(Interface::new(it.pair, std::mem::take(&mut current)));
                } else {
                    current.clear();
                }
            }
            if current.len() >= 2 {
                interfaces.push(Interface::new(it.pair, current));
            }
        }
        for c in &crossings {
            // the ray's left side is the counter-clockwise label
            interfaces.push(Interface::oriented(c.after, c.before, Vec2::ZERO, c.point));
        }
        let background = if crossings.is_empty() {
            self.label_at(Vec2::new(t, 0.0))
        } else {
            self.background
        };
        Ok(PolyConfig {
            domain_radius: self.domain_radius,
            interfaces,
            background,
        })
    }

    /// Interior energy of the conical projection at `t`:
    /// `t · Σ σ` over the crossings of `∂B_t`.
    pub fn conical_interior_energy(&self, s: &SurfaceTensions, t: f64) -> Result<f64, PolyError> {
        let crossings = self.crossings(t, Side::Outside)?;
        Ok(t * crossings
            .iter()
            .map(|c| s.between(c.before, c.after))
            .sum::<f64>())
    }
}
