use std::f64::consts::E;

use crate::error::{require_open_unit, Error, Result};

/// `(13 + √61) / 12`, the per-unit constant in the self-matched parameter
/// equation `-b - ln(1-b) = A (1+|1-2p|) / (1-|1-2p|)`.
pub fn design_constant() -> f64 {
    (13.0 + 61f64.sqrt()) / 12.0
}

/// Principal branch of the Lambert W function on `(-1/e, 0)`, by Halley
/// iteration.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if !(x > branch && x < 0.0) {
        return Err(Error::param("x", x, "must lie in (-1/e, 0)"));
    }
    let mut w = if x < -0.25 {
        // Series about the branch point in q = √(2(ex + 1)).
        let q = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q * q * q
    } else {
        x * (1.0 - x + 1.5 * x * x)
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = w - step;
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * next.abs();
        w = next.max(-1.0);
        if done {
            break;
        }
    }
    Ok(w)
}

/// Smallest admissible series parameter for a self-matched design at `p`.
pub fn solve_b(p: f64) -> Result<f64> {
    require_open_unit("p", p)?;
    let a = (1.0 - 2.0 * p).abs();
    let rhs = design_constant() * (1.0 + a) / (1.0 - a);
    let x = -(-rhs - 1.0).exp();
    if x == 0.0 {
        return Err(Error::param(
            "p",
            p,
            "too close to the boundary for double precision",
        ));
    }
    Ok(lambert_w0(x)? + 1.0)
}

/// `b* = solve_b(1/2) ≈ 0.9304`, below which no self-matched ARA pair exists.
pub fn b_star() -> f64 {
    solve_b(0.5).expect("p = 1/2 is in range")
}
