//! Families with one regular side (degree 3 bits or checks). The other side
//! is a closed-form kernel; its series is extracted by coefficient solving
//! and the exact evaluator is attached for pointwise use.

use serde::{Deserialize, Serialize};

use crate::closed_form::ClosedForm;
use crate::error::{require_open_unit, Error, Result};
use crate::powerseries::{Construction, DegreeDistribution, DegreePair, Family};

/// Which validity range to enforce before building.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// Ranges with a non-negativity proof.
    #[default]
    Proven,
    /// Wider ranges observed numerically only.
    Numerical,
    /// No range check; coefficients are still scanned.
    Unchecked,
}

impl std::str::FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "proven" => Ok(Region::Proven),
            "numerical" => Ok(Region::Numerical),
            "unchecked" => Ok(Region::Unchecked),
            _ => Err(Error::InvalidInput(format!(
                "unknown region {s:?}; expected proven, numerical or unchecked"
            ))),
        }
    }
}

/// Proven upper end for bit-regular ARA.
pub const ARA_BR_PROVEN: f64 = 0.26;
/// Numerically observed upper end for bit-regular ARA.
pub const ARA_BR_NUMERICAL: f64 = 0.384;

const COEFF_TOL: f64 = -1e-10;

/// Lower end of the check-regular ARA range for `region`.
fn check_bound(region: Region) -> f64 {
    match region {
        Region::Numerical => 1.0 - ARA_BR_NUMERICAL,
        _ => 1.0 - ARA_BR_PROVEN,
    }
}

fn from_closed(cf: ClosedForm, order: usize) -> DegreeDistribution {
    let (node, edge) = cf.series(order);
    DegreeDistribution::from_parts(node, edge, Some(cf))
}

fn scan(d: &DegreeDistribution, side: &str) -> Result<()> {
    for (name, s) in [("node", d.node()), ("edge", d.edge())] {
        let (idx, min) = s.min_coeff();
        if min < COEFF_TOL {
            let degree = if name == "edge" { idx + 1 } else { idx };
            return Err(Error::Validity(format!(
                "{side} {name} coefficient of degree {degree} is {min:e}"
            )));
        }
    }
    Ok(())
}

fn range_check(ok: bool, what: &str, bound: &str, p: f64) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Validity(format!(
            "{what} requires {bound}, got p = {p}"
        )))
    }
}

fn build(
    bit: DegreeDistribution,
    check: DegreeDistribution,
    family: Family,
    construction: Construction,
    p: f64,
) -> Result<DegreePair> {
    scan(&bit, "bit")?;
    scan(&check, "check")?;
    DegreePair::new(bit, check, family, construction, p, None)
}

/// `L(x) = x³`; `R` untilted from the cubic kernel at `t = 1-p`.
pub fn bit_regular_ara(p: f64, order: usize) -> Result<DegreePair> {
    bit_regular_ara_in(p, order, Region::Proven)
}

pub fn bit_regular_ara_in(p: f64, order: usize, region: Region) -> Result<DegreePair> {
    require_open_unit("p", p)?;
    let ok = match region {
        Region::Proven => p <= ARA_BR_PROVEN,
        Region::Numerical => p <= ARA_BR_NUMERICAL,
        Region::Unchecked => true,
    };
    range_check(
        ok,
        "bit-regular ARA",
        &format!("p ≤ {}", 1.0 - check_bound(region)),
        p,
    )?;
    build(
        DegreeDistribution::regular(3, order),
        from_closed(ClosedForm::cubic(1.0 - p, 1.0 - p), order),
        Family::Ara,
        Construction::BitRegular,
        p,
    )
}

/// `R(x) = x³`; `L` untilted from the cubic kernel at `t = p`. The mirror
/// image of [`bit_regular_ara`] at `1 - p`.
pub fn check_regular_ara(p: f64, order: usize) -> Result<DegreePair> {
    check_regular_ara_in(p, order, Region::Proven)
}

pub fn check_regular_ara_in(p: f64, order: usize, region: Region) -> Result<DegreePair> {
    require_open_unit("p", p)?;
    let ok = match region {
        Region::Proven => p >= 1.0 - ARA_BR_PROVEN,
        Region::Numerical => p >= 1.0 - ARA_BR_NUMERICAL,
        Region::Unchecked => true,
    };
    range_check(
        ok,
        "check-regular ARA",
        &format!("p ≥ {}", check_bound(region)),
        p,
    )?;
    build(
        from_closed(ClosedForm::cubic(p, p), order),
        DegreeDistribution::regular(3, order),
        Family::Ara,
        Construction::CheckRegular,
        p,
    )
}

/// `λ(x) = x²`; `ρ` is the cubic kernel at `t = 1-p`. Valid on `(0, 1)`.
pub fn aldpc_bit_regular(p: f64, order: usize) -> Result<DegreePair> {
    require_open_unit("p", p)?;
    build(
        DegreeDistribution::regular(3, order),
        from_closed(ClosedForm::cubic(1.0 - p, 1.0), order),
        Family::Aldpc,
        Construction::BitRegular,
        p,
    )
}

/// `ρ(x) = x²`; `λ = (1 - √(1-x)) / [1 - (1-p)(1 - 3x + 2(1 - (1-x)^{3/2}))]²`.
pub fn aldpc_check_regular(p: f64, order: usize) -> Result<DegreePair> {
    aldpc_check_regular_in(p, order, Region::Proven)
}

pub fn aldpc_check_regular_in(p: f64, order: usize, region: Region) -> Result<DegreePair> {
    require_open_unit("p", p)?;
    range_check(
        region == Region::Unchecked || p >= 12.0 / 13.0,
        "check-regular ALDPC",
        "p ≥ 12/13",
        p,
    )?;
    build(
        from_closed(ClosedForm::sqrt(p), order),
        DegreeDistribution::regular(3, order),
        Family::Aldpc,
        Construction::CheckRegular,
        p,
    )
}

/// `ρ(x) = x²`; `λ` is the cubic kernel at `t = p`. Valid on `(0, 1)`.
pub fn nsira_check_regular(p: f64, order: usize) -> Result<DegreePair> {
    require_open_unit("p", p)?;
    build(
        from_closed(ClosedForm::cubic(p, 1.0), order),
        DegreeDistribution::regular(3, order),
        Family::Nsira,
        Construction::CheckRegular,
        p,
    )
}

/// `λ(x) = x²`; `R` untilted from `3x - 2(1 - (1-x)^{3/2})`.
pub fn nsira_bit_regular(p: f64, order: usize) -> Result<DegreePair> {
    nsira_bit_regular_in(p, order, Region::Proven)
}

pub fn nsira_bit_regular_in(p: f64, order: usize, region: Region) -> Result<DegreePair> {
    require_open_unit("p", p)?;
    range_check(
        region == Region::Unchecked || p < 1.0 / 13.0,
        "bit-regular NSIRA",
        "p < 1/13",
        p,
    )?;
    build(
        DegreeDistribution::regular(3, order),
        from_closed(ClosedForm::sqrt(1.0 - p), order),
        Family::Nsira,
        Construction::BitRegular,
        p,
    )
}
