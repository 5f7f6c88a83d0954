//! Scaled energy, the radial-deviation quantity `γ` and the fourth-power
//! integral along a range of radii.

use super::{Ball, FieldKind, PolyConfig, PolyError, Segment, TestField};
use crate::geom::Vec2;
use crate::quadrature::{adaptive_simpson, DEFAULT_TOL};
use crate::tensions::SurfaceTensions;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

pub const TRACE_CSV_HEADER: &str = "r,scaled_energy,gamma,fourth_power,correction";

/// Tolerance used for the small annulus integrals inside finite differences,
/// where the quadrature error is divided by the step.
const DIFFERENCE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityTrace {
    pub radii: Vec<f64>,
    pub scaled_energy: Vec<f64>,
    pub gamma: Vec<f64>,
    /// fourth-power integral over the annulus between the first radius and `r`
    pub fourth_power: Vec<f64>,
    /// `C r²`
    pub correction: Vec<f64>,
}

impl MonotonicityTrace {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        for k in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.radii[k],
                self.scaled_energy[k],
                self.gamma[k],
                self.fourth_power[k],
                self.correction[k]
            ));
        }
        out
    }
}

/// Both sides of the weak monotonicity inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakMonotonicity {
    pub lhs: f64,
    pub rhs: f64,
    pub fourth_power: f64,
}

impl WeakMonotonicity {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

/// Integrates `f(d, |x|)` along the part of `seg` inside the annulus
/// `rho <= |x| <= r`, where `d` is the distance from the origin to the
/// segment's line. Radial segments (`d = 0`) are skipped: every integrand
/// used here carries a positive power of `d`.
fn annulus_integral<F>(seg: &Segment, rho: f64, r: f64, tol: f64, f: F) -> Result<f64, PolyError>
where
    F: Fn(f64, f64) -> f64,
{
    let len = seg.length();
    let u = (seg.b - seg.a) / len;
    let d = seg.a.cross(u).abs();
    if d <= 1e-14 * seg.a.norm().max(seg.b.norm()) || d >= r {
        return Ok(0.0);
    }
    // arclength coordinate measured from the foot of the perpendicular
    let sa = seg.a.dot(u);
    let sb = sa + len;
    let hi = (r * r - d * d).sqrt();
    let lo = if rho > d {
        (rho * rho - d * d).sqrt()
    } else {
        0.0
    };
    let g = |s: f64| f(d, (d * d + s * s).sqrt());
    let mut total = 0.0;
    for (p, q) in [(-hi, -lo), (lo, hi)] {
        let a = p.max(sa);
        let b = q.min(sb);
        if b > a {
            total += adaptive_simpson(&g, a, b, tol)?;
        }
    }
    Ok(total)
}

fn gamma_integrand(d: f64, x: f64) -> f64 {
    d * d / (x * x * x)
}

fn fourth_power_integrand(d: f64, x: f64) -> f64 {
    let c = d / x;
    0.125 * c * c * c * c / x
}

impl PolyConfig {
    /// `Σ σ_ij ∫_{B_r ∩ interface} (ν·x)² / |x|³ ds`.
    pub fn gamma_deviation(&self, s: &SurfaceTensions, r: f64) -> Result<f64, PolyError> {
        self.check_radius(r)?;
        self.weighted_annulus(s, 0.0, r, DEFAULT_TOL, gamma_integrand)
    }

    /// `Σ (σ_ij / 8) ∫_{B_r \ B_ρ} |x|⁻¹ (x̂·ν)⁴ ds`.
    pub fn fourth_power_integral(
        &self,
        s: &SurfaceTensions,
        rho: f64,
        r: f64,
    ) -> Result<f64, PolyError> {
        self.check_radius(r)?;
        self.weighted_annulus(s, rho, r, DEFAULT_TOL, fourth_power_integrand)
    }

    /// Cut-off weighted second moment `Σ σ_ij ∫ φ(|x|/r) (x·ν)²/|x|² ds` with
    /// the default profile. Not to be confused with the energy deviation
    /// estimated on grids.
    pub fn psi_aux(&self, s: &SurfaceTensions, r: f64) -> Result<f64, PolyError> {
        self.check_radius(r)?;
        self.weighted_annulus(s, 0.0, r, DEFAULT_TOL, |d, x| {
            super::variation::profile(x / r) * d * d / (x * x)
        })
    }

    fn weighted_annulus<F>(
        &self,
        s: &SurfaceTensions,
        rho: f64,
        r: f64,
        tol: f64,
        f: F,
    ) -> Result<f64, PolyError>
    where
        F: Fn(f64, f64) -> f64 + Copy,
    {
        let mut total = 0.0;
        for seg in self.segments() {
            total += s.between(seg.pair[0], seg.pair[1]) * annulus_integral(&seg, rho, r, tol, f)?;
        }
        Ok(total)
    }

    /// `r⁻¹ F_S(B_r)`.
    pub fn scaled_energy(&self, s: &SurfaceTensions, r: f64) -> f64 {
        self.energy_fs(s, Ball::centered(r)) / r
    }

    /// Checks stationarity against radial and translation fields on a fixed
    /// battery of balls; returns the first failing field.
    pub fn check_stationary(&self, s: &SurfaceTensions) -> Result<(), PolyError> {
        let big_r = self.domain_radius;
        let threshold = 1e-6 * s.max() * big_r;
        let mut centers = vec![Vec2::ZERO];
        centers.extend((0..7).map(|k| Vec2::polar(TAU * k as f64 / 7.0) * (0.35 * big_r)));
        for &center in &centers {
            for frac in [0.15, 0.3, 0.5] {
                let radius = frac * big_r;
                for kind in [
                    FieldKind::Radial,
                    FieldKind::Translation {
                        direction: Vec2::new(1.0, 0.0),
                    },
                    FieldKind::Translation {
                        direction: Vec2::new(0.0, 1.0),
                    },
                ] {
                    let field = TestField {
                        center,
                        radius,
                        kind,
                    };
                    let residual = self.first_variation_residual(s, &field)?;
                    if residual.abs() > threshold {
                        return Err(PolyError::NotStationary {
                            residual,
                            field: field.describe(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// `|d/dr (r⁻¹ F_S(B_r)) − dγ/dr|` at each radius by central differences
    /// with step `1e-4 r`. Both difference quotients are formed from annulus
    /// quantities so that no large values cancel.
    pub fn sharp_monotonicity_check(
        &self,
        s: &SurfaceTensions,
        radii: &[f64],
    ) -> Result<Vec<f64>, PolyError> {
        self.check_stationary(s)?;
        self.sharp_monotonicity_residuals(s, radii)
    }

    /// The finite-difference residuals without the stationarity gate.
    pub fn sharp_monotonicity_residuals(
        &self,
        s: &SurfaceTensions,
        radii: &[f64],
    ) -> Result<Vec<f64>, PolyError> {
        radii
            .par_iter()
            .map(|&r| {
                let h = 1e-4 * r;
                self.check_radius(r + h)?;
                let (lo, hi) = (r - h, r + h);
                let e_lo = self.energy_fs(s, Ball::centered(lo));
                let e_hi = self.energy_fs(s, Ball::centered(hi));
                // hi⁻¹E(hi) − lo⁻¹E(lo) = (E(hi) − E(lo))/hi − E(lo)·(hi − lo)/(hi·lo)
                let d_scaled = ((e_hi - e_lo) / hi - e_lo * (hi - lo) / (hi * lo)) / (2.0 * h);
                let d_gamma =
                    self.weighted_annulus(s, lo, hi, DIFFERENCE_TOL, gamma_integrand)? / (2.0 * h);
                Ok((d_scaled - d_gamma).abs())
            })
            .collect()
    }

    /// Both sides of the weak monotonicity inequality with constant `c`.
    pub fn weak_monotonicity_terms(
        &self,
        s: &SurfaceTensions,
        rho: f64,
        r: f64,
        c: f64,
    ) -> Result<WeakMonotonicity, PolyError> {
        self.check_radius(r)?;
        if !(rho > 0.0 && rho < r) {
            return Err(PolyError::RadiusOutOfRange {
                radius: rho,
                domain_radius: r,
            });
        }
        let fourth_power = self.fourth_power_integral(s, rho, r)?;
        Ok(WeakMonotonicity {
            lhs: self.scaled_energy(s, rho) + c * rho * rho + fourth_power,
            rhs: self.scaled_energy(s, r) + c * r * r,
            fourth_power,
        })
    }

    /// Samples the monotonicity quantities at increasing radii.
    pub fn monotonicity_trace(
        &self,
        s: &SurfaceTensions,
        radii: &[f64],
        c: f64,
    ) -> Result<MonotonicityTrace, PolyError> {
        for w in radii.windows(2) {
            if !(w[1] > w[0]) {
                return Err(PolyError::RadiusOutOfRange {
                    radius: w[1],
                    domain_radius: self.domain_radius,
                });
            }
        }
        for &r in radii {
            self.check_radius(r)?;
        }
        let rows: Vec<(f64, f64, f64)> = radii
            .par_iter()
            .enumerate()
            .map(|(k, &r)| {
                let gamma = self.gamma_deviation(s, r)?;
                let step = if k == 0 {
                    0.0
                } else {
                    self.fourth_power_integral(s, radii[k - 1], r)?
                };
                Ok((self.scaled_energy(s, r), gamma, step))
            })
            .collect::<Result<_, PolyError>>()?;
        let mut acc = 0.0;
        let fourth_power = rows
            .iter()
            .map(|row| {
                acc += row.2;
                acc
            })
            .collect();
        Ok(MonotonicityTrace {
            radii: radii.to_vec(),
            scaled_energy: rows.iter().map(|row| row.0).collect(),
            gamma: rows.iter().map(|row| row.1).collect(),
            fourth_power,
            correction: radii.iter().map(|r| c * r * r).collect(),
        })
    }
}
