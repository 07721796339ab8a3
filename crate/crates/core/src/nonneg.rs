//! Numerical non-negativity certificates for power-series coefficients.
//!
//! If `g` is analytic on the open unit disc and `h(θ) = Re g(e^{iθ})` is
//! even, convex on `[0, π]` and has a non-negative integral there, every
//! coefficient of `g` is non-negative. Convexity is checked with central
//! second differences on a uniform grid; there is no interval arithmetic.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::{sqrt_one_minus_x, ClosedForm};
use crate::constructions::self_matched::{c_star, s_of};
use crate::error::{require_open_unit, Error, Result};
use crate::powerseries::{t_operator, Family, PowerSeries, Side};
use crate::tilting::untilt_node;

/// Absolute tolerance on second differences, the integral and head signs.
pub const CONVEXITY_TOL: f64 = 1e-9;
/// Grid resolution used by the named verifiers.
pub const DEFAULT_GRID: usize = 8192;
/// Left end of the grid; `θ = 0` is the point `z = 1` where `g` may be singular.
pub const THETA_MIN: f64 = 1e-6;

type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A function to be certified, possibly with its leading terms removed.
#[derive(Clone)]
pub struct PolyaCandidate {
    g: ComplexFn,
    strip_count: usize,
    head: Vec<f64>,
    lead: usize,
}

impl fmt::Debug for PolyaCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolyaCandidate")
            .field("strip_count", &self.strip_count)
            .field("lead", &self.lead)
            .field("head", &self.head)
            .finish()
    }
}

impl PolyaCandidate {
    /// Candidate tested as is, with no head removed.
    pub fn new(g: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        PolyaCandidate {
            g: Arc::new(g),
            strip_count: 0,
            head: Vec::new(),
            lead: 0,
        }
    }

    pub fn strip_count(&self) -> usize {
        self.strip_count
    }

    /// Removed coefficients, starting at degree [`PolyaCandidate::lead`].
    pub fn head(&self) -> &[f64] {
        &self.head
    }

    pub fn lead(&self) -> usize {
        self.lead
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.g)(z)
    }

    /// `h(θ) = Re g(e^{iθ})`.
    pub fn h(&self, theta: f64) -> f64 {
        self.eval(Complex64::from_polar(1.0, theta)).re
    }
}

/// Removes the first `n_terms` non-zero-indexed coefficients of `g`.
///
/// With `lead` the index of the first non-zero entry of `series`, the result
/// is `(g(z) - Σ_{lead ≤ i < lead+n} g_i z^i) / z^{lead+n}`. The removed
/// coefficients are kept for a separate sign check. `n_terms = 0` returns
/// `g` untouched.
pub fn strip_head(
    g: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    series: &PowerSeries,
    n_terms: usize,
) -> Result<PolyaCandidate> {
    if n_terms == 0 {
        return Ok(PolyaCandidate::new(g));
    }
    let lead = series
        .coeffs()
        .iter()
        .position(|c| *c != 0.0)
        .ok_or_else(|| Error::DegenerateInput("series is identically zero".into()))?;
    let end = lead + n_terms;
    if end > series.order() + 1 {
        return Err(Error::InvalidInput(format!(
            "need {end} coefficients to strip {n_terms} terms, series has {}",
            series.order() + 1
        )));
    }
    let head: Vec<f64> = series.coeffs()[lead..end].to_vec();
    let h2 = head.clone();
    let stripped = move |z: Complex64| {
        let mut poly = Complex64::new(0.0, 0.0);
        for c in h2.iter().rev() {
            poly = poly * z + c;
        }
        (g(z) - poly * z.powi(lead as i32)) / z.powi(end as i32)
    };
    Ok(PolyaCandidate {
        g: Arc::new(stripped),
        strip_count: n_terms,
        head,
        lead,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub verdict: Verdict,
    pub min_second_difference: f64,
    pub argmin_theta: f64,
    /// `∫₀^π h`, which equals `π g_0` for the tested function.
    pub integral: f64,
    pub grid_n: usize,
    /// Roundoff allowance added to the tolerance on second differences.
    pub noise_band: f64,
    pub refined: bool,
    /// Smallest removed head coefficient, `None` when nothing was stripped.
    pub head_min: Option<f64>,
    pub symmetry_error: f64,
    /// Central difference of `h` across `π`; zero for real coefficients.
    pub slope_at_pi: f64,
}

impl ConvexityReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Band {
    Ok,
    Noise,
    Bad,
}

fn classify(min: f64, noise: f64) -> Band {
    if min >= -CONVEXITY_TOL {
        Band::Ok
    } else if min >= -(CONVEXITY_TOL + noise) {
        Band::Noise
    } else {
        Band::Bad
    }
}

fn sample(c: &PolyaCandidate, thetas: &[f64]) -> Result<Vec<f64>> {
    let hs: Vec<f64> = thetas.par_iter().map(|&t| c.h(t)).collect();
    if let Some(i) = hs.iter().position(|v| !v.is_finite()) {
        return Err(Error::NumericDomain(format!(
            "h is not finite at θ = {}",
            thetas[i]
        )));
    }
    Ok(hs)
}

/// Minimum central second difference and its location. The point `π` uses
/// the reflection `h(π + δ) = h(π - δ)`.
fn second_differences(thetas: &[f64], hs: &[f64], step: f64, reflect_end: bool) -> (f64, f64) {
    let n = hs.len();
    let mut best = (f64::INFINITY, thetas[0]);
    for j in 1..n - 1 {
        let d = (hs[j - 1] - 2.0 * hs[j] + hs[j + 1]) / (step * step);
        if d < best.0 {
            best = (d, thetas[j]);
        }
    }
    if reflect_end {
        let d = 2.0 * (hs[n - 2] - hs[n - 1]) / (step * step);
        if d < best.0 {
            best = (d, thetas[n - 1]);
        }
    }
    best
}

fn noise_for(hs: &[f64], head: &[f64], step: f64) -> f64 {
    let scale =
        hs.iter().fold(0.0f64, |m, v| m.max(v.abs())) + head.iter().map(|c| c.abs()).sum::<f64>();
    64.0 * f64::EPSILON * scale.max(1.0) / (step * step)
}

/// Composite Simpson rule over the samples (odd sample count).
fn simpson(hs: &[f64], step: f64) -> f64 {
    let n = hs.len() - 1;
    let mut acc = hs[0] + hs[n];
    for (j, v) in hs.iter().enumerate().take(n).skip(1) {
        acc += if j % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * step / 3.0
}

/// Certifies non-negativity of the candidate's coefficients.
///
/// Pass needs convexity (minimum second difference at least `-1e-9`, up to
/// a roundoff band), a non-negative integral and non-negative removed head
/// coefficients. A violation triggers a 4× refinement around the minimum;
/// a violation that survives only inside the roundoff band is reported as
/// inconclusive.
pub fn polya_verify(candidate: &PolyaCandidate, grid_n: usize) -> Result<ConvexityReport> {
    if grid_n < 1024 {
        return Err(Error::InvalidInput(format!(
            "grid_n = {grid_n} is below 1024"
        )));
    }
    let grid_n = grid_n + grid_n % 2;
    let step = (PI - THETA_MIN) / grid_n as f64;
    let thetas: Vec<f64> = (0..=grid_n).map(|j| THETA_MIN + j as f64 * step).collect();
    let hs = sample(candidate, &thetas)?;

    let symmetry_error = (0..64)
        .map(|j| {
            let t = THETA_MIN + (PI - THETA_MIN) * (j as f64 + 0.5) / 64.0;
            let a = candidate.h(t);
            let b = candidate.h(-t);
            (a - b).abs() / a.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    let delta = 1e-4;
    let slope_at_pi = (candidate.h(PI + delta) - candidate.h(PI - delta)) / (2.0 * delta);

    let (coarse_min, coarse_at) = second_differences(&thetas, &hs, step, true);
    let noise = noise_for(&hs, &candidate.head, step);
    let mut min = coarse_min;
    let mut at = coarse_at;
    let mut refined = false;
    let mut convex = classify(coarse_min, noise);
    if convex != Band::Ok {
        refined = true;
        let fine = step / 4.0;
        let lo = (coarse_at - 4.0 * step).max(THETA_MIN);
        let hi = (coarse_at + 4.0 * step).min(PI);
        let m = ((hi - lo) / fine).round() as usize;
        let fine_thetas: Vec<f64> = (0..=m)
            .map(|j| lo + j as f64 * (hi - lo) / m as f64)
            .collect();
        let fine_hs = sample(candidate, &fine_thetas)?;
        let fine_step = (hi - lo) / m as f64;
        let (fmin, fat) = second_differences(&fine_thetas, &fine_hs, fine_step, hi >= PI);
        let fine_band = classify(fmin, noise_for(&fine_hs, &candidate.head, fine_step));
        convex = match (convex, fine_band) {
            (_, Band::Ok) => Band::Ok,
            (Band::Bad, Band::Bad) => Band::Bad,
            _ => Band::Noise,
        };
        if fmin > min || convex == Band::Ok {
            min = fmin;
            at = fat;
        }
    }

    // The strip [0, THETA_MIN] is added with the endpoint value.
    let integral = simpson(&hs, step) + hs[0] * THETA_MIN;
    let head_min = candidate.head.iter().copied().reduce(f64::min);
    let head_ok = head_min.is_none_or(|m| m >= -1e-12);

    let verdict = if !head_ok || integral < -CONVEXITY_TOL || convex == Band::Bad {
        Verdict::Fail
    } else if convex == Band::Noise {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(ConvexityReport {
        verdict,
        min_second_difference: min,
        argmin_theta: at,
        integral,
        grid_n,
        noise_band: noise,
        refined,
        head_min,
        symmetry_error,
        slope_at_pi,
    })
}

/// `G(z) = -z - ln(1 - z)`.
fn log_kernel(z: Complex64) -> Complex64 {
    -z - (Complex64::new(1.0, 0.0) - z).ln()
}

/// Series of `G / (1 + cG)` through `order`.
pub fn self_matched_series(c: f64, order: usize) -> PowerSeries {
    let g = PowerSeries::from_fn(order, |i| if i >= 2 { 1.0 / i as f64 } else { 0.0 });
    let denom = g.scale(c).add_scalar(1.0);
    g.mul(&denom.recip().expect("constant term is one"))
}

/// Closed forms of the coefficients `g_2 .. g_7` of `G / (1 + cG)`.
pub fn self_matched_head(c: f64) -> [f64; 6] {
    [
        0.5,
        1.0 / 3.0,
        (1.0 - c) / 4.0,
        (3.0 - 5.0 * c) / 15.0,
        (12.0 - 26.0 * c + 9.0 * c * c) / 72.0,
        (120.0 - 308.0 * c + 210.0 * c * c) / 840.0,
    ]
}

/// `G / (1 + cG)` with `g_2 .. g_7` removed and divided by `z⁸`.
pub fn self_matched_candidate(c: f64) -> Result<PolyaCandidate> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::param("c", c, "must be a non-negative finite number"));
    }
    let g = move |z: Complex64| {
        let gz = log_kernel(z);
        gz / (1.0 + c * gz)
    };
    strip_head(g, &self_matched_series(c, 16), 6)
}

/// The pair of coefficients `(c₁, c₂)` governing the self-matched bit and
/// check distributions.
pub fn self_matched_coefficients(p: f64, b: f64) -> (f64, f64) {
    let s = s_of(b);
    (-(1.0 - p) / (p * s), -p / ((1.0 - p) * s))
}

/// Whether the self-matched construction of `family` is valid at `(p, b)`:
/// ARA needs both `c₁, c₂ ≤ c*`, NSIRA only `c₂`, ALDPC only `c₁`.
pub fn self_matched_condition(p: f64, b: f64, family: Family) -> bool {
    if !(p > 0.0 && p < 1.0 && b > 0.0 && b < 1.0) {
        return false;
    }
    let (c1, c2) = self_matched_coefficients(p, b);
    let cs = c_star();
    match family {
        Family::Ara => c1 <= cs && c2 <= cs,
        Family::Nsira => c2 <= cs,
        Family::Aldpc => c1 <= cs,
        Family::Ldpc => true,
    }
}

/// Certifies the bit edge distribution of the check-regular NSIRA family.
pub fn verify_checkreg_nsira(p: f64) -> Result<ConvexityReport> {
    require_open_unit("p", p)?;
    let cf = ClosedForm::cubic(p, 1.0);
    polya_verify(
        &PolyaCandidate::new(move |z| cf.edge_complex(z)),
        DEFAULT_GRID,
    )
}

/// Certifies `R'(z)/z` for the bit-regular ARA check distribution.
pub fn verify_bitreg_ara(p: f64) -> Result<ConvexityReport> {
    require_open_unit("p", p)?;
    let cf = ClosedForm::cubic(1.0 - p, 1.0 - p);
    let r1 = cf.node_deriv_at_one();
    polya_verify(
        &PolyaCandidate::new(move |z| r1 * cf.edge_complex(z) / z),
        DEFAULT_GRID,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct AltProbeReport {
    pub alpha: f64,
    pub p: f64,
    pub coefficients: usize,
    /// Most negative of the first `coefficients` bit node coefficients.
    pub l_min: f64,
    pub r_min: f64,
    pub l_valid: bool,
    pub r_valid: bool,
    /// `max |Tf - f|` on a grid; `f` is a fixed point of `T`.
    pub fixed_point_residual: f64,
}

/// `f(x) = β - x - √(β² - 2x/α)` with `β = 1 + 1/(2α)`.
pub fn alt_fixed_point(alpha: f64, x: f64) -> f64 {
    let beta = 1.0 + 0.5 / alpha;
    beta - x - (beta * beta - 2.0 * x / alpha).sqrt()
}

/// Normalized integral of [`alt_fixed_point`] as a power series.
pub fn alt_node_series(alpha: f64, order: usize) -> Result<PowerSeries> {
    let beta = 1.0 + 0.5 / alpha;
    let kappa = 2.0 / (alpha * beta * beta);
    let root = sqrt_one_minus_x(order);
    let mut pow = 1.0;
    let f = PowerSeries::from_fn(order, |i| {
        let v = -beta * root.coeff(i) * pow;
        pow *= kappa;
        v + match i {
            0 => beta,
            1 => -1.0,
            _ => 0.0,
        }
    });
    let node = f.integral();
    let total = 0.5 - 2.0 * alpha / 3.0;
    Ok(node.scale(1.0 / total))
}

/// Builds both untilted node distributions from the fixed point above and
/// checks their first `coefficients` coefficients for sign.
pub fn alt_self_matched_probe(alpha: f64, p: f64, coefficients: usize) -> Result<AltProbeReport> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::param("alpha", alpha, "must lie in (0, 1/2]"));
    }
    require_open_unit("p", p)?;
    let tilde = alt_node_series(alpha, coefficients + 1)?;
    let l = untilt_node(&tilde, Side::Bit, p)?;
    let r = untilt_node(&tilde, Side::Check, p)?;
    let min_of = |s: &PowerSeries| {
        s.coeffs()[..=coefficients]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    };
    let (l_min, r_min) = (min_of(&l), min_of(&r));

    let t = t_operator(|x| alt_fixed_point(alpha, x));
    let mut residual = 0.0f64;
    for j in 1..200 {
        let x = j as f64 / 200.0;
        residual = residual.max((t.eval(x)? - alt_fixed_point(alpha, x)).abs());
    }
    Ok(AltProbeReport {
        alpha,
        p,
        coefficients,
        l_min,
        r_min,
        l_valid: l_min >= -1e-12,
        r_valid: r_min >= -1e-12,
        fixed_point_residual: residual,
    })
}

/// Cosine coefficients `(1/π) ∫_{-π}^{π} F(t) cos(kt) dt` of an even
/// 2π-periodic function, by the trapezoid rule on `n` panels of `[0, π]`.
pub fn cosine_coefficients(f: impl Fn(f64) -> f64, k_max: usize, n: usize) -> Vec<f64> {
    let step = PI / n as f64;
    let vals: Vec<f64> = (0..=n).map(|j| f(j as f64 * step)).collect();
    (0..=k_max)
        .map(|k| {
            let mut acc = 0.0;
            for (j, v) in vals.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                acc += w * v * (k as f64 * j as f64 * step).cos();
            }
            2.0 * acc * step / PI
        })
        .collect()
}

/// `∫₀^{2π} γ(x) f(x) dx` by the midpoint rule with `n` panels.
pub fn weighted_integral(gamma: impl Fn(f64) -> f64, f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let step = 2.0 * PI / n as f64;
    (0..n)
        .map(|j| {
            let x = (j as f64 + 0.5) * step;
            gamma(x) * f(x)
        })
        .sum::<f64>()
        * step
}
