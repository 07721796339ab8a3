//! Truncated power series and the degree-distribution algebra built on them.
//!
//! Edge-perspective series are stored in function form: the coefficient at
//! index `i - 1` is the fraction of edges attached to degree-`i` nodes, so
//! `λ(x) = Σ λ_i x^{i-1}`. Node-perspective series keep degree `i` at index `i`.

use std::fmt;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closed_form::ClosedForm;
use crate::error::{Error, Result};

/// Tolerance used when checking that a distribution sums to one.
pub const NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PowerSeries {
    coeffs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for PowerSeries {
    type Error = Error;

    fn try_from(coeffs: Vec<f64>) -> Result<Self> {
        PowerSeries::new(coeffs)
    }
}

impl From<PowerSeries> for Vec<f64> {
    fn from(s: PowerSeries) -> Self {
        s.coeffs
    }
}

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "power series needs at least one coefficient".into(),
            ));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NumericDomain(format!(
                "coefficient {i} is not finite"
            )));
        }
        Ok(PowerSeries { coeffs })
    }

    pub fn zeros(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![0.0; order + 1],
        }
    }

    /// `x^degree`, truncated at `order` (zero if `degree > order`).
    pub fn monomial(degree: usize, order: usize) -> Self {
        let mut s = Self::zeros(order);
        if degree <= order {
            s.coeffs[degree] = 1.0;
        }
        s
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> f64) -> Self {
        PowerSeries {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    /// Internal constructor for results of arithmetic on finite inputs.
    pub(crate) fn from_vec_unchecked(coeffs: Vec<f64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        PowerSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// `Σ k c_k`, the derivative at one.
    pub fn deriv_at_one(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| k as f64 * c)
            .sum()
    }

    pub fn min_coeff(&self) -> (usize, f64) {
        self.coeffs
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (i, c)| if c < best.1 { (i, c) } else { best },
            )
    }

    /// Formal derivative; the order drops by one (kept at least zero).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zeros(0);
        }
        Self::from_vec_unchecked(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero, truncated to the same order.
    pub fn integral(&self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        for k in 1..n {
            out[k] = self.coeffs[k - 1] / k as f64;
        }
        Self::from_vec_unchecked(out)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(order + 1, 0.0);
        Self::from_vec_unchecked(c)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::from_vec_unchecked(self.coeffs.iter().map(|c| a * c).collect())
    }

    pub fn add_scalar(&self, a: f64) -> Self {
        let mut c = self.coeffs.clone();
        c[0] += a;
        Self::from_vec_unchecked(c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        Self::from_vec_unchecked((0..n).map(|i| self.coeffs[i] + other.coeffs[i]).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        Self::from_vec_unchecked((0..n).map(|i| self.coeffs[i] - other.coeffs[i]).collect())
    }

    /// Product truncated to the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, &a) in self.coeffs.iter().take(n).enumerate() {
            if a == 0.0 {
                continue;
            }
            for (o, &b) in out[i..].iter_mut().zip(&other.coeffs[..n - i]) {
                *o += a * b;
            }
        }
        Self::from_vec_unchecked(out)
    }

    /// Multiplicative inverse; requires a non-zero constant term.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0 == 0.0 {
            return Err(Error::NumericDomain(
                "series reciprocal with zero constant term".into(),
            ));
        }
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        out[0] = 1.0 / c0;
        for k in 1..n {
            let acc: f64 = (1..=k).map(|j| self.coeffs[j] * out[k - j]).sum();
            out[k] = -acc / c0;
        }
        Ok(Self::from_vec_unchecked(out))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::monomial(0, self.order());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().filter(|(_, c)| **c != 0.0) {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}x")?,
                _ => write!(f, "{c}x^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `λ(x) = L'(x) / L'(1)`.
pub fn edge_from_node(node: &PowerSeries) -> Result<PowerSeries> {
    let d1 = node.deriv_at_one();
    if d1 == 0.0 || node.coeffs.iter().all(|&c| c == 0.0) {
        return Err(Error::DegenerateInput(
            "node series is identically zero".into(),
        ));
    }
    let n = node.coeffs.len();
    let mut out = vec![0.0; n];
    for k in 1..n {
        out[k - 1] = k as f64 * node.coeffs[k] / d1;
    }
    Ok(PowerSeries::from_vec_unchecked(out))
}

/// `L(x) = ∫₀ˣ λ / ∫₀¹ λ`. The top edge coefficient, which would need degree
/// `M + 1`, is dropped.
pub fn node_from_edge(edge: &PowerSeries) -> Result<PowerSeries> {
    let n = edge.coeffs.len();
    let mut out = vec![0.0; n];
    for k in 1..n {
        out[k] = edge.coeffs[k - 1] / k as f64;
    }
    let total: f64 = out.iter().sum();
    if total == 0.0 {
        return Err(Error::DegenerateInput(
            "edge series is identically zero".into(),
        ));
    }
    for c in &mut out {
        *c /= total;
    }
    Ok(PowerSeries::from_vec_unchecked(out))
}

/// Moves all check-edge mass above degree `max_degree` onto degree one.
///
/// The degree-one coefficient is set to `1 - Σ_{2≤i≤M} ρ_i`, so mass beyond
/// the stored order is also accounted for and the result sums to one.
pub fn truncate_check(rho: &PowerSeries, max_degree: usize) -> PowerSeries {
    let mut c = rho.coeffs.clone();
    for v in c.iter_mut().skip(max_degree) {
        *v = 0.0;
    }
    let kept: f64 = c.iter().skip(1).sum();
    c[0] = 1.0 - kept;
    PowerSeries::from_vec_unchecked(c)
}

/// Drops bit-edge mass above `max_degree` without renormalizing. Returns the
/// truncated series and the node-perspective fraction of dropped bits, which
/// become pilots.
pub fn truncate_bit(lambda: &PowerSeries, max_degree: usize) -> (PowerSeries, f64) {
    let mut c = lambda.coeffs.clone();
    let node_weight = |i: usize, v: f64| v / (i + 1) as f64;
    let total: f64 = c.iter().enumerate().map(|(i, &v)| node_weight(i, v)).sum();
    let mut dropped = 0.0;
    for (i, v) in c.iter_mut().enumerate().skip(max_degree) {
        dropped += node_weight(i, *v);
        *v = 0.0;
    }
    let frac = if total > 0.0 { dropped / total } else { 0.0 };
    (PowerSeries::from_vec_unchecked(c), frac)
}

/// Pointwise evaluator of `Tf(x) = 1 - f⁻¹(1 - x)` for increasing `f` with
/// `f(0) = 0` and `f(1) = 1`.
pub struct TOperator<F> {
    f: F,
}

pub fn t_operator<F: Fn(f64) -> f64>(f: F) -> TOperator<F> {
    TOperator { f }
}

impl<F: Fn(f64) -> f64> TOperator<F> {
    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.inverse(1.0 - x)?)
    }

    /// Bisection for `f⁻¹(y)` on `[0, 1]`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let f = &self.f;
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let (mut flo, mut fhi) = (f(lo), f(hi));
        if flo > fhi {
            return Err(Error::InvalidInput(
                "function is decreasing on [0, 1]".into(),
            ));
        }
        if y <= flo {
            return Ok(lo);
        }
        if y >= fhi {
            return Ok(hi);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = f(mid);
            // Allow a few ulps of evaluation noise near flat spots.
            let slack = 1e-12 * (1.0 + fm.abs());
            if fm < flo - slack || fm > fhi + slack {
                return Err(Error::InvalidInput(format!(
                    "function is not monotone near x = {mid}"
                )));
            }
            if fm < y {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
        }
        // Linear interpolation inside the final bracket.
        if fhi > flo {
            Ok(lo + (hi - lo) * (y - flo) / (fhi - flo))
        } else {
            Ok(0.5 * (lo + hi))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Family {
    Ara,
    Nsira,
    Aldpc,
    Ldpc,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Ara => "ARA",
            Family::Nsira => "NSIRA",
            Family::Aldpc => "ALDPC",
            Family::Ldpc => "LDPC",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ARA" => Ok(Family::Ara),
            "NSIRA" => Ok(Family::Nsira),
            "ALDPC" => Ok(Family::Aldpc),
            "LDPC" => Ok(Family::Ldpc),
            _ => Err(Error::InvalidInput(format!("unknown family {s:?}"))),
        }
    }
}

/// How a pair was produced; lets closed-form evaluators be rebuilt on load.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    SelfMatched,
    BitRegular,
    CheckRegular,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Bit,
    Check,
}

/// A node/edge pair of series describing one side of a Tanner graph, with an
/// optional exact evaluator used where the series converges slowly.
#[derive(Clone, Debug)]
pub struct DegreeDistribution {
    node: PowerSeries,
    edge: PowerSeries,
    closed: Option<ClosedForm>,
}

impl DegreeDistribution {
    pub fn from_node(node: PowerSeries) -> Result<Self> {
        let edge = edge_from_node(&node)?;
        Ok(DegreeDistribution {
            node,
            edge,
            closed: None,
        })
    }

    pub fn from_edge(edge: PowerSeries) -> Result<Self> {
        let node = node_from_edge(&edge)?;
        Ok(DegreeDistribution {
            node,
            edge,
            closed: None,
        })
    }

    /// Takes both perspectives as given; callers are responsible for
    /// consistency (checked by [`DegreeDistribution::consistency_error`]).
    pub fn from_parts(node: PowerSeries, edge: PowerSeries, closed: Option<ClosedForm>) -> Self {
        DegreeDistribution { node, edge, closed }
    }

    pub fn with_closed(mut self, closed: ClosedForm) -> Self {
        self.closed = Some(closed);
        self
    }

    pub fn regular(degree: usize, order: usize) -> Self {
        DegreeDistribution {
            node: PowerSeries::monomial(degree, order),
            edge: PowerSeries::monomial(degree - 1, order),
            closed: Some(ClosedForm::monomial(degree)),
        }
    }

    pub fn node(&self) -> &PowerSeries {
        &self.node
    }

    pub fn edge(&self) -> &PowerSeries {
        &self.edge
    }

    pub fn closed(&self) -> Option<&ClosedForm> {
        self.closed.as_ref()
    }

    pub fn order(&self) -> usize {
        self.node.order()
    }

    pub fn node_at(&self, x: f64) -> f64 {
        match &self.closed {
            Some(c) => c.node(x),
            None => self.node.eval(x),
        }
    }

    pub fn edge_at(&self, x: f64) -> f64 {
        match &self.closed {
            Some(c) => c.edge(x),
            None => self.edge.eval(x),
        }
    }

    /// Average node degree `L'(1)` from the stored series.
    pub fn mean_degree(&self) -> f64 {
        self.node.deriv_at_one()
    }

    /// Edge mass not represented by the stored series.
    pub fn tail_mass(&self) -> f64 {
        (1.0 - self.edge.sum()).max(0.0)
    }

    /// Edge mass on degree-one nodes.
    pub fn degree_one_mass(&self) -> f64 {
        self.edge.coeff(0)
    }

    /// Largest deviation of the stored edge series from `L'/L'(1)`.
    pub fn consistency_error(&self) -> f64 {
        match edge_from_node(&self.node) {
            Ok(e) => e
                .coeffs()
                .iter()
                .zip(self.edge.coeffs())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        }
    }

    /// Smallest coefficient over both perspectives.
    pub fn min_coeff(&self) -> f64 {
        self.node.min_coeff().1.min(self.edge.min_coeff().1)
    }
}

#[derive(Clone, Debug)]
pub struct DegreePair {
    pub bit: DegreeDistribution,
    pub check: DegreeDistribution,
    pub family: Family,
    pub construction: Construction,
    /// Design erasure probability.
    pub p: f64,
    /// Series parameter for the self-matched families.
    pub b: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct PairDocument {
    family: Family,
    construction: Construction,
    p: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    b: Option<f64>,
    #[serde(rename = "M")]
    order: usize,
    bit_node: PowerSeries,
    check_node: PowerSeries,
}

impl DegreePair {
    pub fn new(
        bit: DegreeDistribution,
        check: DegreeDistribution,
        family: Family,
        construction: Construction,
        p: f64,
        b: Option<f64>,
    ) -> Result<Self> {
        if bit.degree_one_mass() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "bit distribution has degree-one edge mass {}",
                bit.degree_one_mass()
            )));
        }
        let pair = DegreePair {
            bit,
            check,
            family,
            construction,
            p,
            b,
        };
        let r = crate::tilting::design_rate(&pair)?;
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidInput(format!(
                "design rate {r} is outside (0, 1)"
            )));
        }
        Ok(pair)
    }

    pub fn order(&self) -> usize {
        self.bit.order().min(self.check.order())
    }

    /// Larger of the two edge-perspective tail masses.
    pub fn tail_mass(&self) -> f64 {
        self.bit.tail_mass().max(self.check.tail_mass())
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = PairDocument {
            family: self.family,
            construction: self.construction,
            p: self.p,
            b: self.b,
            order: self.order(),
            bit_node: self.bit.node.clone(),
            check_node: self.check.node.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Loads a pair; edge perspectives are recomputed from the node series.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PairDocument = serde_json::from_str(text)?;
        let mut bit = DegreeDistribution::from_node(doc.bit_node)?;
        let mut check = DegreeDistribution::from_node(doc.check_node)?;
        // Catalog rows get their exact evaluators back, provided the stored
        // series are the ones the row would produce.
        let rebuilt = crate::constructions::CatalogEntry::from_parts(doc.family, doc.construction)
            .and_then(|entry| {
                entry
                    .build(
                        doc.p,
                        doc.b,
                        doc.order,
                        crate::constructions::Region::Unchecked,
                    )
                    .ok()
            });
        if let Some(r) = rebuilt {
            if same_series(r.bit.node(), bit.node()) && same_series(r.check.node(), check.node()) {
                if let Some(c) = r.bit.closed() {
                    bit = bit.with_closed(*c);
                }
                if let Some(c) = r.check.closed() {
                    check = check.with_closed(*c);
                }
            }
        }
        DegreePair::new(bit, check, doc.family, doc.construction, doc.p, doc.b)
    }
}

fn same_series(a: &PowerSeries, b: &PowerSeries) -> bool {
    let n = a.coeffs().len().max(b.coeffs().len());
    (0..n).all(|i| (a.coeff(i) - b.coeff(i)).abs() <= 1e-12)
}
