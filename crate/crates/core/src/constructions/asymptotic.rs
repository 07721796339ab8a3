use serde::Serialize;

use crate::error::{require_open_unit, Error, Result};

use super::self_matched::{alpha, f_deriv_at_one};

/// Euler's constant to 20 significant digits.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AsymptoticParams {
    pub p: f64,
    pub b: f64,
    pub alpha: f64,
    /// `α / (1 - α)`.
    pub d: f64,
    pub gamma: f64,
}

impl AsymptoticParams {
    pub fn new(p: f64, b: f64) -> Result<Self> {
        require_open_unit("p", p)?;
        require_open_unit("b", b)?;
        let a = alpha(p, b);
        if a >= 1.0 {
            return Err(Error::param(
                "p",
                p,
                format!("α(p, b) = {a} must be below one"),
            ));
        }
        Ok(AsymptoticParams {
            p,
            b,
            alpha: a,
            d: a / (1.0 - a),
            gamma: EULER_GAMMA,
        })
    }

    /// The same parameters with `p` replaced by `1 - p`, for the check side.
    pub fn mirrored(&self) -> Result<Self> {
        Self::new(1.0 - self.p, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    L,
    R,
    Lambda,
    Rho,
}

/// Large-`k` estimate of a self-matched ARA coefficient from the singularity
/// of `1 / (1 + α Φ(z))` at `z = 1`:
///
/// `L_k ≈ b^k / (α (1-p) k u²) · (1 - 2γ/u)`, with `u = ln k + 1/d`.
///
/// `R_k` uses `1 - p`; the edge forms follow from `λ_k = k L_k / L'(1)`.
pub fn asymptotic_coeffs(k: usize, params: &AsymptoticParams, which: Coefficient) -> Result<f64> {
    transfer(k, params, which, |k, pr| {
        let u = (k as f64).ln() + 1.0 / pr.d;
        1.0 / (pr.alpha * (1.0 - pr.p) * k as f64 * u * u) * (1.0 - 2.0 * pr.gamma / u)
    })
}

/// The expansion with `1 + d ln k` in place of `u` and `1/(1-α)` in place of
/// `1/α`. Its ratio to the exact coefficients tends to `d`, not one; kept
/// for comparison only.
pub fn asymptotic_coeffs_uncorrected(
    k: usize,
    params: &AsymptoticParams,
    which: Coefficient,
) -> Result<f64> {
    transfer(k, params, which, |k, pr| {
        let t = 1.0 + pr.d * (k as f64).ln();
        1.0 / ((1.0 - pr.alpha) * (1.0 - pr.p) * k as f64 * t * t) * (1.0 - 2.0 * pr.gamma / t)
    })
}

fn transfer(
    k: usize,
    params: &AsymptoticParams,
    which: Coefficient,
    shape: impl Fn(usize, &AsymptoticParams) -> f64,
) -> Result<f64> {
    let node = |pr: &AsymptoticParams| pr.b.powi(k as i32) * shape(k, pr);
    let f1 = f_deriv_at_one(params.b);
    Ok(match which {
        Coefficient::L => node(params),
        Coefficient::R => node(&params.mirrored()?),
        Coefficient::Lambda => k as f64 * node(params) / (params.p * f1),
        Coefficient::Rho => k as f64 * node(&params.mirrored()?) / ((1.0 - params.p) * f1),
    })
}
