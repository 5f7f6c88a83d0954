//! Surface tensions, the per-fluid weights they induce, and the junction angles
//! they force.
//!
//! All constants are dimensionless. Fluids are labelled `0`, `1`, `2`; the
//! tension between fluids `i` and `j` is written `σ_ij`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensionError {
    #[error("surface tension {name} = {value} is not strictly positive")]
    NonPositive { name: &'static str, value: f64 },
    #[error("strict triangularity violated: alpha{index} = {value}")]
    StrictTriangularityViolated { index: usize, value: f64 },
    #[error("wetting admissibility violated for fluids {i},{j}: alpha sum {alpha_sum} < |beta diff| {beta_diff}")]
    WettingInadmissible {
        i: usize,
        j: usize,
        alpha_sum: f64,
        beta_diff: f64,
    },
}

/// Interface tensions between the three fluids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceTensions {
    sigma01: f64,
    sigma02: f64,
    sigma12: f64,
}

impl SurfaceTensions {
    /// Validates positivity and strict triangularity.
    pub fn new(sigma01: f64, sigma02: f64, sigma12: f64) -> Result<Self, TensionError> {
        for (name, value) in [
            ("sigma01", sigma01),
            ("sigma02", sigma02),
            ("sigma12", sigma12),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(TensionError::NonPositive { name, value });
            }
        }
        let s = SurfaceTensions {
            sigma01,
            sigma02,
            sigma12,
        };
        let floor = 1e-12 * s.max();
        for (index, value) in s.raw_alphas().into_iter().enumerate() {
            if value <= floor {
                return Err(TensionError::StrictTriangularityViolated { index, value });
            }
        }
        Ok(s)
    }

    pub fn uniform(sigma: f64) -> Result<Self, TensionError> {
        Self::new(sigma, sigma, sigma)
    }

    pub fn sigma01(&self) -> f64 {
        self.sigma01
    }

    pub fn sigma02(&self) -> f64 {
        self.sigma02
    }

    pub fn sigma12(&self) -> f64 {
        self.sigma12
    }

    /// `σ_ij` for an unordered pair of fluids; zero on the diagonal.
    pub fn between(&self, i: u8, j: u8) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 1) => self.sigma01,
            (0, 2) => self.sigma02,
            (1, 2) => self.sigma12,
            (a, b) if a == b => 0.0,
            _ => panic!("fluid labels must be 0, 1 or 2 (got {i}, {j})"),
        }
    }

    /// Tension of the interface not touching fluid `k`.
    pub fn opposite(&self, k: u8) -> f64 {
        match k {
            0 => self.sigma12,
            1 => self.sigma02,
            2 => self.sigma01,
            _ => panic!("fluid label {k} out of range"),
        }
    }

    pub fn max(&self) -> f64 {
        self.sigma01.max(self.sigma02).max(self.sigma12)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, TensionError> {
        Self::new(
            self.sigma01 * factor,
            self.sigma02 * factor,
            self.sigma12 * factor,
        )
    }

    /// Tensions seen after renaming fluids: new fluid `n` is old fluid `perm[n]`.
    pub fn permuted(&self, perm: [u8; 3]) -> Self {
        SurfaceTensions {
            sigma01: self.between(perm[0], perm[1]),
            sigma02: self.between(perm[0], perm[2]),
            sigma12: self.between(perm[1], perm[2]),
        }
    }

    fn raw_alphas(&self) -> [f64; 3] {
        [
            0.5 * (self.sigma01 + self.sigma02 - self.sigma12),
            0.5 * (self.sigma01 + self.sigma12 - self.sigma02),
            0.5 * (self.sigma02 + self.sigma12 - self.sigma01),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaWeights {
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl AlphaWeights {
    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha0, self.alpha1, self.alpha2]
    }
}

/// Half-sum weights so that `Σ α_j Per(E_j)` charges each interface `σ_ij`.
pub fn alphas_from_sigmas(s: &SurfaceTensions) -> Result<AlphaWeights, TensionError> {
    let a = s.raw_alphas();
    let floor = 1e-12 * s.max();
    for (index, &value) in a.iter().enumerate() {
        if value <= floor {
            return Err(TensionError::StrictTriangularityViolated { index, value });
        }
    }
    Ok(AlphaWeights {
        alpha0: a[0],
        alpha1: a[1],
        alpha2: a[2],
    })
}

/// Junction openings, in radians. `gamma_ij` is the opening of the sector
/// filled by the third fluid `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeumannAngles {
    pub gamma01: f64,
    pub gamma02: f64,
    pub gamma12: f64,
}

impl NeumannAngles {
    /// Opening of the sector occupied by fluid `k`.
    pub fn for_fluid(&self, k: u8) -> f64 {
        match k {
            0 => self.gamma12,
            1 => self.gamma02,
            2 => self.gamma01,
            _ => panic!("fluid label {k} out of range"),
        }
    }

    pub fn degrees(&self) -> [f64; 3] {
        [
            self.gamma01.to_degrees(),
            self.gamma02.to_degrees(),
            self.gamma12.to_degrees(),
        ]
    }

    pub fn sum(&self) -> f64 {
        self.gamma01 + self.gamma02 + self.gamma12
    }
}

/// Supplements of the angles of the triangle whose sides are the three tensions.
pub fn neumann_angles(s: &SurfaceTensions) -> Result<NeumannAngles, TensionError> {
    alphas_from_sigmas(s)?;
    let (a, b, c) = (s.sigma01, s.sigma02, s.sigma12);
    // interior angle opposite the side of length `opp`
    let opposite = |opp: f64, p: f64, q: f64| -> f64 {
        let cos = ((p * p + q * q - opp * opp) / (2.0 * p * q)).clamp(-1.0, 1.0);
        cos.acos()
    };
    let theta01 = opposite(a, b, c);
    let theta02 = opposite(b, a, c);
    // closes the triangle exactly so the openings sum to 2π to round-off
    let theta12 = PI - theta01 - theta02;
    Ok(NeumannAngles {
        gamma01: PI - theta01,
        gamma02: PI - theta02,
        gamma12: PI - theta12,
    })
}

/// Full constitutive data for the surface/wetting/gravity functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    pub sigmas: SurfaceTensions,
    pub beta: [f64; 3],
    pub rho: [f64; 3],
    pub g: f64,
}

impl EnergyParams {
    pub fn new(
        sigmas: SurfaceTensions,
        beta: [f64; 3],
        rho: [f64; 3],
        g: f64,
    ) -> Result<Self, TensionError> {
        let alphas = alphas_from_sigmas(&sigmas)?.as_array();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let alpha_sum = alphas[i] + alphas[j];
                let beta_diff = (beta[i] - beta[j]).abs();
                if alpha_sum < beta_diff {
                    return Err(TensionError::WettingInadmissible {
                        i,
                        j,
                        alpha_sum,
                        beta_diff,
                    });
                }
            }
        }
        Ok(EnergyParams {
            sigmas,
            beta,
            rho,
            g,
        })
    }

    /// Surface tension only: no wetting, no gravity.
    pub fn surface_only(sigmas: SurfaceTensions) -> Self {
        EnergyParams {
            sigmas,
            beta: [0.0; 3],
            rho: [0.0; 3],
            g: 0.0,
        }
    }

    /// Parameters governing a configuration blown up by factor `1/lambda`:
    /// the gravity coefficient picks up a factor `lambda`.
    pub fn blown_up(&self, lambda: f64) -> Self {
        EnergyParams {
            g: self.g * lambda,
            ..*self
        }
    }
}
