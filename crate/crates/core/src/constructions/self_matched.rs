//! Self-matched families built from `F(x) = (bx + ln(1-bx)) / (b + ln(1-b))`,
//! the fixed point `TF = F` that serves as both tilted distributions.

use serde::Serialize;

use crate::error::{require_open_unit, Error, Result};
use crate::powerseries::{Construction, DegreeDistribution, DegreePair, Family, PowerSeries};

use super::cmk::CmkTable;

/// `(13 - √61) / 9 ≈ 0.5766`, the largest `c` for which `G/(1 + cG)` with
/// `G(z) = -z - ln(1-z)` keeps non-negative coefficients.
pub fn c_star() -> f64 {
    (13.0 - 61f64.sqrt()) / 9.0
}

/// `b + ln(1-b)`, negative on `(0, 1)`.
pub fn s_of(b: f64) -> f64 {
    b + (-b).ln_1p()
}

/// `α(p, b) = -(1-p) / (p (b + ln(1-b)))`.
pub fn alpha(p: f64, b: f64) -> f64 {
    -(1.0 - p) / (p * s_of(b))
}

/// Coefficients of `F`: `F_i = -b^i / (i (b + ln(1-b)))` for `i ≥ 2`.
pub fn f_series(b: f64, order: usize) -> PowerSeries {
    let s = s_of(b);
    let mut bi = 1.0;
    PowerSeries::from_fn(order, |i| {
        if i > 0 {
            bi *= b;
        }
        if i < 2 {
            0.0
        } else {
            -bi / (i as f64 * s)
        }
    })
}

/// `F'(1) = -b² / ((1-b)(b + ln(1-b)))`.
pub fn f_deriv_at_one(b: f64) -> f64 {
    -b * b / ((1.0 - b) * s_of(b))
}

/// Node series of `F / (p + (1-p) F)`.
///
/// With `H = 1 / (1 + α Φ(bx))`, `Φ(y) = -y - ln(1-y)`, the coefficients are
/// `L_k = -H_k / (1-p)` and `H` follows the reciprocal recurrence
/// `H_k = -α Σ_{i=2}^{k} (b^i/i) H_{k-i}`. Mathematically identical to the
/// alternating `c_{m,k}` sum, without its cancellation.
pub fn untilted_node_series(p: f64, b: f64, order: usize) -> PowerSeries {
    let c = alpha(p, b);
    let mut w = vec![0.0; order + 1];
    let mut bi = 1.0;
    for (i, wi) in w.iter_mut().enumerate() {
        if i > 0 {
            bi *= b;
        }
        if i >= 2 {
            *wi = bi / i as f64;
        }
    }
    let mut h = vec![0.0; order + 1];
    h[0] = 1.0;
    for k in 1..=order {
        let acc: f64 = (2..=k).map(|i| w[i] * h[k - i]).sum();
        h[k] = -c * acc;
    }
    let scale = -1.0 / (1.0 - p);
    PowerSeries::from_fn(order, |k| if k == 0 { 0.0 } else { scale * h[k] })
}

/// `L_k` through the alternating sum
/// `α b^k/(1-p) Σ_m (-1)^{m-1} c_{m,k} α^{m-1}`, with an estimate of the
/// rounding error (`ε Σ |terms|`). Only trustworthy for moderate `k`.
pub fn coefficient_via_cmk(p: f64, b: f64, k: usize, table: &CmkTable<f64>) -> (f64, f64) {
    let a = alpha(p, b);
    let pre = a * b.powi(k as i32) / (1.0 - p);
    let mut sum = 0.0;
    let mut abs = 0.0;
    let mut am = 1.0;
    for m in 1..=k / 2 {
        let term = table.get(m, k) * am;
        sum += if m % 2 == 1 { term } else { -term };
        abs += term.abs();
        am *= a;
    }
    (pre * sum, (pre * abs).abs() * f64::EPSILON * k as f64)
}

/// Closed interval of admissible `p`; empty when `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, p: f64, tol: f64) -> bool {
        p >= self.lo - tol && p <= self.hi + tol
    }
}

/// Range of `p` over which the self-matched pair of `family` has
/// non-negative coefficients at series parameter `b`.
pub fn validity_region(family: Family, b: f64) -> Interval {
    let lo = 1.0 / (1.0 - c_star() * s_of(b));
    let hi = 1.0 - lo;
    match family {
        Family::Ara => Interval { lo, hi },
        Family::Nsira => Interval { lo: 0.0, hi },
        Family::Aldpc => Interval { lo, hi: 1.0 },
        Family::Ldpc => Interval { lo: 0.0, hi: 1.0 },
    }
}

const REGION_TOL: f64 = 1e-12;
const COEFF_TOL: f64 = -1e-12;

fn check_region(family: Family, p: f64, b: f64) -> Result<()> {
    require_open_unit("p", p)?;
    require_open_unit("b", b)?;
    let iv = validity_region(family, b);
    if p < iv.lo - REGION_TOL {
        return Err(Error::Validity(format!(
            "{family} self-matched pair needs p ≥ {:.6} at b = {b} (lower bound), got p = {p}",
            iv.lo
        )));
    }
    if p > iv.hi + REGION_TOL {
        return Err(Error::Validity(format!(
            "{family} self-matched pair needs p ≤ {:.6} at b = {b} (upper bound), got p = {p}",
            iv.hi
        )));
    }
    Ok(())
}

fn distribution(node: PowerSeries, d1: f64) -> Result<DegreeDistribution> {
    let (idx, min) = node.min_coeff();
    if min < COEFF_TOL {
        return Err(Error::Validity(format!(
            "negative coefficient {min:e} at degree {idx}"
        )));
    }
    let edge = PowerSeries::from_fn(node.order(), |i| (i + 1) as f64 * node.coeff(i + 1) / d1);
    Ok(DegreeDistribution::from_parts(node, edge, None))
}

fn bit_side(p: f64, b: f64, order: usize) -> Result<DegreeDistribution> {
    distribution(untilted_node_series(p, b, order), p * f_deriv_at_one(b))
}

fn check_side(p: f64, b: f64, order: usize) -> Result<DegreeDistribution> {
    distribution(
        untilted_node_series(1.0 - p, b, order),
        (1.0 - p) * f_deriv_at_one(b),
    )
}

fn plain_side(b: f64, order: usize) -> Result<DegreeDistribution> {
    distribution(f_series(b, order), f_deriv_at_one(b))
}

/// Self-matched ARA pair: `L̃ = R̃ = F`, untilted on each side.
pub fn self_matched_ara(p: f64, b: f64, order: usize) -> Result<DegreePair> {
    check_region(Family::Ara, p, b)?;
    DegreePair::new(
        bit_side(p, b, order)?,
        check_side(p, b, order)?,
        Family::Ara,
        Construction::SelfMatched,
        p,
        Some(b),
    )
}

/// Self-matched NSIRA pair: `L = F`, `R` untilted from `F`.
pub fn self_matched_nsira(p: f64, b: f64, order: usize) -> Result<DegreePair> {
    check_region(Family::Nsira, p, b)?;
    DegreePair::new(
        plain_side(b, order)?,
        check_side(p, b, order)?,
        Family::Nsira,
        Construction::SelfMatched,
        p,
        Some(b),
    )
}

/// Self-matched ALDPC pair: `R = F`, `L` untilted from `F`.
pub fn self_matched_aldpc(p: f64, b: f64, order: usize) -> Result<DegreePair> {
    check_region(Family::Aldpc, p, b)?;
    DegreePair::new(
        bit_side(p, b, order)?,
        plain_side(b, order)?,
        Family::Aldpc,
        Construction::SelfMatched,
        p,
        Some(b),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_matches_series_division() {
        // Oracle: divide F by p + (1-p)F directly.
        let (p, b, n) = (0.5, 0.9304, 80);
        let f = f_series(b, n);
        let direct = f.div(&f.scale(1.0 - p).add_scalar(p)).ok();
        // The constant term of the denominator is p, so division is defined.
        let direct = direct.unwrap();
        let rec = untilted_node_series(p, b, n);
        for k in 0..=n {
            assert!((direct.coeff(k) - rec.coeff(k)).abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn cmk_route_agrees_for_small_k() {
        let table = CmkTable::<f64>::new(60);
        let rec = untilted_node_series(0.5, 0.9304, 60);
        for k in 2..=60 {
            let (v, err) = coefficient_via_cmk(0.5, 0.9304, k, &table);
            assert!((v - rec.coeff(k)).abs() <= 1e-12 + 10.0 * err, "k = {k}");
        }
    }

    #[test]
    fn l2_value() {
        let pair = self_matched_ara(0.5, 0.9304, 64).unwrap();
        assert!((pair.bit.node().coeff(2) - 0.4990).abs() < 5e-4);
        for k in 0..=64 {
            assert_eq!(pair.bit.node().coeff(k), pair.check.node().coeff(k));
        }
    }

    #[test]
    fn region_errors_name_bound() {
        let e = self_matched_ara(0.5, 0.90, 32).unwrap_err().to_string();
        assert!(e.contains("bound"), "{e}");
        assert!(self_matched_nsira(0.3, 0.9, 32).is_ok());
        assert!(self_matched_aldpc(0.3, 0.9, 32).is_err());
    }

    #[test]
    fn regions() {
        let iv = validity_region(Family::Ara, super::super::lambert::b_star());
        assert!((iv.lo - 0.5).abs() < 1e-9 && (iv.hi - 0.5).abs() < 1e-9);
        let wide = validity_region(Family::Ara, 0.99);
        assert!(wide.hi - wide.lo > 0.0);
        assert!(validity_region(Family::Ara, 0.9).is_empty());
        assert_eq!(validity_region(Family::Nsira, 0.95).lo, 0.0);
    }
}
