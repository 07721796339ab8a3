use crate::powerseries::{truncate_bit, truncate_check, DegreeDistribution, DegreePair, Family};

use super::de_residual;

/// Bisection resolution in `p`.
pub const THRESHOLD_TOL: f64 = 1e-5;

const GRID: usize = 1000;

/// Residuals on the interior grid `x = i/n`, `i = 1..n-1`.
pub fn residual_grid(pair: &DegreePair, family: Family, p: f64, n: usize) -> Vec<(f64, f64)> {
    (1..n)
        .map(|i| {
            let x = i as f64 / n as f64;
            (x, de_residual(pair, family, p, x))
        })
        .collect()
}

fn decodes(pair: &DegreePair, family: Family, p: f64) -> bool {
    residual_grid(pair, family, p, GRID)
        .iter()
        .all(|&(_, r)| r < 0.0)
}

/// Truncates both sides of `pair` at maximum degree `max_degree`: excess
/// check mass moves to degree one and excess bits become pilots.
pub fn truncate_pair(pair: &DegreePair, max_degree: usize) -> DegreePair {
    let rho = truncate_check(pair.check.edge(), max_degree);
    let (lam, _) = truncate_bit(pair.bit.edge(), max_degree);
    let mut out = pair.clone();
    // Node series are kept for the untouched low degrees; the evaluators
    // below only use edge forms and the node forms recomputed from them.
    out.check = DegreeDistribution::from_edge(rho.clone())
        .map(|d| DegreeDistribution::from_parts(d.node().clone(), rho, None))
        .expect("truncated check series is non-zero");
    let node = scaled_node(&lam, &pair.bit);
    out.bit = DegreeDistribution::from_parts(node, lam, None);
    out
}

/// Node form of a truncated bit series keeping the original normalization, so
/// dropped bits reduce `L(1)` below one in step with `λ`.
fn scaled_node(
    lam: &crate::powerseries::PowerSeries,
    orig: &DegreeDistribution,
) -> crate::powerseries::PowerSeries {
    let d1 = super::exact_mean_degree(orig);
    crate::powerseries::PowerSeries::from_fn(lam.order(), |k| {
        if k == 0 {
            0.0
        } else {
            lam.coeff(k - 1) * d1 / k as f64
        }
    })
}

/// Design rate of `pair` truncated at maximum degree `max_degree`.
///
/// Pilots keep their edges, so the parity count still follows the full bit
/// mean degree, but each pilot removes one dimension from the code.
pub fn truncated_design_rate(pair: &DegreePair, max_degree: usize) -> crate::error::Result<f64> {
    let t = truncate_pair(pair, max_degree);
    let (_, pilots) = truncate_bit(pair.bit.edge(), max_degree);
    let kept = 1.0 - pilots;
    let d1 = super::exact_mean_degree(&pair.bit);
    let r1 = t.check.mean_degree();
    if d1 == 0.0 || r1 == 0.0 {
        return Err(crate::error::Error::DegenerateInput(
            "zero average degree".into(),
        ));
    }
    Ok(match pair.family {
        Family::Ara => kept / (1.0 + d1 / r1),
        Family::Nsira => kept * r1 / d1,
        Family::Aldpc | Family::Ldpc => kept - d1 / r1,
    })
}

/// Largest `p` (to [`THRESHOLD_TOL`]) at which the pair truncated to maximum
/// degree `max_degree` has no density-evolution fixed point in `(0, 1)`.
/// Reports 0 when even the smallest probe fails.
pub fn threshold_search(pair: &DegreePair, family: Family, max_degree: usize) -> f64 {
    let t = truncate_pair(pair, max_degree);
    let (mut lo, mut hi) = (THRESHOLD_TOL, 1.0 - THRESHOLD_TOL);
    if !decodes(&t, family, lo) {
        return 0.0;
    }
    if decodes(&t, family, hi) {
        return hi;
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if decodes(&t, family, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
