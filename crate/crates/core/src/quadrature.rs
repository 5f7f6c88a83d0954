//! Adaptive Simpson quadrature.

use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("adaptive quadrature exceeded depth {max_depth} on [{a}, {b}]")]
pub struct QuadratureFailure {
    pub a: f64,
    pub b: f64,
    pub max_depth: u32,
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_DEPTH: u32 = 40;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, QuadratureFailure> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, QuadratureFailure> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // a minimum depth keeps narrow peaks from hiding between the first samples
    if depth >= 4 && delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(QuadratureFailure {
            a,
            b,
            max_depth: MAX_DEPTH,
        });
    }
    Ok(recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?)
}

/// Integrates over `[a, b]` after splitting at the given interior breakpoints.
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<f64, QuadratureFailure> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.insert(0, a);
    pts.push(b);
    let n = (pts.len() - 1) as f64;
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += adaptive_simpson(f, w[0], w[1], tol / n)?;
    }
    Ok(total)
}
