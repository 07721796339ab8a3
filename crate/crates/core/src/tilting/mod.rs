//! Graph reduction (tilting), density evolution, stability, rate and
//! complexity accounting, and the bit/check symmetry swap.

mod de;
mod threshold;

pub use de::{de_converge, de_iterate, de_residual, ConvergenceReport, DEState};
pub use threshold::{
    residual_grid, threshold_search, truncate_pair, truncated_design_rate, THRESHOLD_TOL,
};

use serde::Serialize;

use crate::error::{require_open_unit, Error, Result};
use crate::powerseries::{Construction, DegreeDistribution, DegreePair, Family, PowerSeries, Side};

/// Tolerance applied to the stability inequalities. Capacity-achieving
/// pairs sit exactly on the boundary of both conditions.
pub const STABILITY_TOL: f64 = 1e-9;

/// Which sides of a family's graph are reduced by the channel.
pub(crate) fn tilted_sides(family: Family) -> (bool, bool) {
    match family {
        Family::Ara => (true, true),
        Family::Nsira => (false, true),
        Family::Aldpc => (true, false),
        Family::Ldpc => (false, false),
    }
}

/// `p² λ / (1 - (1-p) L)²`, the reduced bit distribution.
pub(crate) fn bit_tilt(p: f64, lambda: f64, l: f64) -> f64 {
    let d = 1.0 - (1.0 - p) * l;
    p * p * lambda / (d * d)
}

/// `(1-p)² ρ / (1 - p R)²`, the reduced check distribution.
pub(crate) fn check_tilt(p: f64, rho: f64, r: f64) -> f64 {
    let d = 1.0 - p * r;
    (1.0 - p) * (1.0 - p) * rho / (d * d)
}

/// The reduced LDPC pair `(λ̃, ρ̃)` seen by the decoder after graph reduction.
#[derive(Clone, Debug)]
pub struct TiltedPair {
    pub lam_tilde: PowerSeries,
    pub rho_tilde: PowerSeries,
    pub p: f64,
    pub family: Family,
    bit: DegreeDistribution,
    check: DegreeDistribution,
}

impl TiltedPair {
    pub fn lam_at(&self, x: f64) -> f64 {
        let lam = self.bit.edge_at(x);
        if tilted_sides(self.family).0 {
            bit_tilt(self.p, lam, self.bit.node_at(x))
        } else {
            lam
        }
    }

    pub fn rho_at(&self, x: f64) -> f64 {
        let rho = self.check.edge_at(x);
        if tilted_sides(self.family).1 {
            check_tilt(self.p, rho, self.check.node_at(x))
        } else {
            rho
        }
    }
}

/// Generic tilt of an edge series: `(1-q)² f / (1 - q F)²` with `F` the node
/// form of `f`.
pub fn tilt_series(edge: &PowerSeries, q: f64) -> Result<PowerSeries> {
    let node = crate::powerseries::node_from_edge(edge)?;
    tilt_series_with_node(edge, &node, q)
}

fn tilt_series_with_node(edge: &PowerSeries, node: &PowerSeries, q: f64) -> Result<PowerSeries> {
    let inv = node.scale(-q).add_scalar(1.0).recip()?;
    Ok(edge.mul(&inv).mul(&inv).scale((1.0 - q) * (1.0 - q)))
}

/// Applies the family's graph reduction at erasure probability `p`.
pub fn tilt_edge(pair: &DegreePair, family: Family, p: f64) -> Result<TiltedPair> {
    require_open_unit("p", p)?;
    let (tb, tc) = tilted_sides(family);
    let lam_tilde = if tb {
        // Bit side uses the generic tilt with q = 1 - p.
        tilt_series_with_node(pair.bit.edge(), pair.bit.node(), 1.0 - p)?
    } else {
        pair.bit.edge().clone()
    };
    let rho_tilde = if tc {
        tilt_series_with_node(pair.check.edge(), pair.check.node(), p)?
    } else {
        pair.check.edge().clone()
    };
    Ok(TiltedPair {
        lam_tilde,
        rho_tilde,
        p,
        family,
        bit: pair.bit.clone(),
        check: pair.check.clone(),
    })
}

/// Node-perspective reduction: check side `(1-p)R / (1-pR)`, bit side
/// `pL / (1-(1-p)L)`.
pub fn tilt_node(node: &PowerSeries, side: Side, p: f64) -> Result<PowerSeries> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", p, "must lie in [0, 1]"));
    }
    let (num, q) = match side {
        Side::Check => (1.0 - p, p),
        Side::Bit => (p, 1.0 - p),
    };
    let abs_sum: f64 = node.coeffs().iter().map(|c| c.abs()).sum();
    if q * abs_sum >= 1.0 - 1e-15 && q * node.sum() >= 1.0 - 1e-12 {
        return Err(Error::NumericDomain(format!(
            "denominator 1 - {q}·node(x) vanishes on [0, 1]"
        )));
    }
    let inv = node.scale(-q).add_scalar(1.0).recip()?;
    Ok(node.mul(&inv).scale(num))
}

/// Inverse of [`tilt_node`]: bit side `L̃ / (p + (1-p)L̃)`, check side
/// `R̃ / (1-p + pR̃)`.
pub fn untilt_node(tilde: &PowerSeries, side: Side, p: f64) -> Result<PowerSeries> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", p, "must lie in [0, 1]"));
    }
    let a = match side {
        Side::Bit => p,
        Side::Check => 1.0 - p,
    };
    if a <= 0.0 {
        return Err(Error::NumericDomain(
            "untilt denominator vanishes at x = 0".into(),
        ));
    }
    let denom = tilde.scale(1.0 - a).add_scalar(a);
    Ok(tilde.mul(&denom.recip()?))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Stability {
    pub stable_at_0: bool,
    pub unstable_at_1: bool,
    /// Derivative of the fixed-point map at `x = 0`.
    pub margin_0: f64,
    /// Derivative of the fixed-point map at `x = 1`.
    pub margin_1: f64,
}

/// Evaluates the stability condition at zero and the instability condition
/// at one for the pair's family.
pub fn stability(pair: &DegreePair, p: f64) -> Result<Stability> {
    require_open_unit("p", p)?;
    let (tb, tc) = tilted_sides(pair.family);
    let lam2 = pair.bit.edge().coeff(1);
    let rho2 = pair.check.edge().coeff(1);
    let lam_d1 = || pair.bit.edge().deriv_at_one();
    let rho_d1 = || pair.check.edge().deriv_at_one();
    let l_d1 = exact_mean_degree(&pair.bit);
    let r_d1 = exact_mean_degree(&pair.check);

    let (lt0, lt1_factor) = if tb {
        (p * p * lam2, true)
    } else {
        (lam2, false)
    };
    let (rt0, rt1_factor) = if tc {
        ((1.0 - p) * (1.0 - p) * rho2, true)
    } else {
        (rho2, false)
    };

    // Only evaluate a derivative at one when it multiplies a non-zero term;
    // heavy-tailed sides have infinite slope there.
    let margin_0 = if lt0 == 0.0 {
        0.0
    } else {
        let d = if rt1_factor {
            rho_d1() + 2.0 * p * r_d1 / (1.0 - p)
        } else {
            rho_d1()
        };
        lt0 * d
    };
    let margin_1 = if rt0 == 0.0 {
        0.0
    } else {
        let d = if lt1_factor {
            lam_d1() + 2.0 * (1.0 - p) * l_d1 / p
        } else {
            lam_d1()
        };
        rt0 * d
    };
    Ok(Stability {
        stable_at_0: margin_0 < 1.0 + STABILITY_TOL,
        unstable_at_1: margin_1 > 1.0 - STABILITY_TOL,
        margin_0,
        margin_1,
    })
}

/// `L'(1)` from the exact evaluator when one is attached, else the series.
pub fn exact_mean_degree(d: &DegreeDistribution) -> f64 {
    match d.closed() {
        Some(c) => c.node_deriv_at_one(),
        None => d.mean_degree(),
    }
}

fn rate_from(family: Family, l1: f64, r1: f64) -> Result<f64> {
    if r1 == 0.0 || l1 == 0.0 {
        return Err(Error::DegenerateInput("zero average degree".into()));
    }
    Ok(match family {
        Family::Ara => 1.0 / (1.0 + l1 / r1),
        Family::Nsira => r1 / l1,
        Family::Aldpc | Family::Ldpc => 1.0 - l1 / r1,
    })
}

/// Design rate from the stored (truncated) series.
pub fn design_rate(pair: &DegreePair) -> Result<f64> {
    rate_from(
        pair.family,
        pair.bit.mean_degree(),
        pair.check.mean_degree(),
    )
}

/// Design rate using exact average degrees where an evaluator is attached.
pub fn design_rate_exact(pair: &DegreePair) -> Result<f64> {
    rate_from(
        pair.family,
        exact_mean_degree(&pair.bit),
        exact_mean_degree(&pair.check),
    )
}

/// Encoding and decoding complexity per information bit. `chi_e` is `None`
/// for ALDPC, where encoding cost depends on the graph.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Complexity {
    pub chi_e: Option<f64>,
    pub chi_d: f64,
}

pub fn complexity(family: Family, pair: &DegreePair, p: f64) -> Result<Complexity> {
    require_open_unit("p", p)?;
    let rate = 1.0 - p;
    let l1 = exact_mean_degree(&pair.bit);
    Ok(match family {
        Family::Ara => {
            let c = 3.0 + l1 + 2.0 * (1.0 - rate) / rate;
            Complexity {
                chi_e: Some(c),
                chi_d: c,
            }
        }
        Family::Nsira => {
            let c = l1 + 2.0 / rate;
            Complexity {
                chi_e: Some(c),
                chi_d: c,
            }
        }
        Family::Aldpc => Complexity {
            chi_e: None,
            chi_d: (3.0 + l1) / rate,
        },
        Family::Ldpc => {
            let c = l1 / rate;
            Complexity {
                chi_e: Some(c),
                chi_d: c,
            }
        }
    })
}

fn swap_family(family: Family) -> Family {
    match family {
        Family::Ara => Family::Ara,
        Family::Nsira => Family::Aldpc,
        Family::Aldpc => Family::Nsira,
        Family::Ldpc => Family::Ldpc,
    }
}

fn swap_construction(c: Construction) -> Construction {
    match c {
        Construction::BitRegular => Construction::CheckRegular,
        Construction::CheckRegular => Construction::BitRegular,
        other => other,
    }
}

/// Exchanges the bit and check distributions and maps `p` to `1 - p`.
pub fn symmetry_swap(pair: &DegreePair, family: Family, p: f64) -> (DegreePair, Family, f64) {
    let f2 = swap_family(family);
    let swapped = DegreePair {
        bit: pair.check.clone(),
        check: pair.bit.clone(),
        family: f2,
        construction: swap_construction(pair.construction),
        p: 1.0 - pair.p,
        b: pair.b,
    };
    (swapped, f2, 1.0 - p)
}

/// Effective erasure probability `1 - α(1-p)` after random puncturing of a
/// `1 - α` fraction, with the complexity scale factor `1/α`.
pub fn puncture(p: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", alpha, "must lie in (0, 1]"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", p, "must lie in [0, 1]"));
    }
    if alpha == 1.0 {
        return Ok((p, 1.0));
    }
    Ok((1.0 - alpha * (1.0 - p), 1.0 / alpha))
}
