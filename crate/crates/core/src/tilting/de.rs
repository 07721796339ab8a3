use serde::Serialize;

use crate::powerseries::{DegreePair, Family};

use super::{bit_tilt, check_tilt, tilted_sides};

/// Erasure probabilities of the six message types in one decoding iteration,
/// from the systematic layer down to the code bits and back.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DEState {
    pub x: [f64; 6],
    pub iteration: usize,
}

impl DEState {
    pub fn uniform(v: f64) -> Self {
        DEState {
            x: [v; 6],
            iteration: 0,
        }
    }
}

/// One sweep of the six-step message-passing recursion for the pair's family.
///
/// NSIRA has no systematic layer (`x0` pinned at one) and ALDPC has no
/// transmitted parity layer (`x3` pinned at zero).
pub fn de_iterate(state: &DEState, pair: &DegreePair, p: f64) -> DEState {
    let [_, _, _, x3_prev, x4_prev, x5_prev] = state.x;
    let has_systematic = matches!(pair.family, Family::Ara | Family::Aldpc);
    let has_parity = matches!(pair.family, Family::Ara | Family::Nsira);

    let x0 = if has_systematic {
        1.0 - (1.0 - x5_prev) * (1.0 - p)
    } else {
        1.0
    };
    let x1 = x0 * x0 * pair.bit.edge_at(x4_prev);
    let x2 = 1.0 - pair.check.node_at(1.0 - x1) * (1.0 - x3_prev);
    let x3 = if has_parity { p * x2 } else { 0.0 };
    let x4 = 1.0 - (1.0 - x3) * (1.0 - x3) * pair.check.edge_at(1.0 - x1);
    let x5 = x0 * pair.bit.node_at(x4);
    let clamp = |v: f64| v.clamp(0.0, 1.0);
    DEState {
        x: [
            clamp(x0),
            clamp(x1),
            clamp(x2),
            clamp(x3),
            clamp(x4),
            clamp(x5),
        ],
        iteration: state.iteration + 1,
    }
}

/// `λ̃(1 - ρ̃(1 - x)) - x` for the family's reduced pair at erasure
/// probability `p`; zero at every fixed point of density evolution.
pub fn de_residual(pair: &DegreePair, family: Family, p: f64, x: f64) -> f64 {
    let (tb, tc) = tilted_sides(family);
    let y = 1.0 - x;
    let rho = pair.check.edge_at(y);
    let rho_t = if tc {
        check_tilt(p, rho, pair.check.node_at(y))
    } else {
        rho
    };
    let z = 1.0 - rho_t;
    let lam = pair.bit.edge_at(z);
    let lam_t = if tb {
        bit_tilt(p, lam, pair.bit.node_at(z))
    } else {
        lam
    };
    lam_t - x
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub iterations: usize,
    /// `x1` never increased between consecutive sweeps.
    pub monotone: bool,
    pub final_x1: f64,
}

/// Iterates until `x1 < tol` or `max_iter`, starting from the all-erased
/// state with a single feedback message lowered: `x5` (so that `x0` starts
/// at `start`) when the family has a systematic layer, `x4` otherwise.
///
/// Lowering every message at once is not self-consistent and makes the first
/// few sweeps rise; a single lowered feedback message keeps `x1`
/// non-increasing whenever decoding succeeds.
pub fn de_converge(
    pair: &DegreePair,
    p: f64,
    start: f64,
    tol: f64,
    max_iter: usize,
) -> ConvergenceReport {
    let mut state = DEState::uniform(1.0);
    if matches!(pair.family, Family::Ara | Family::Aldpc) {
        // Chosen so the first systematic message `x0` comes out at `start`.
        state.x[5] = (1.0 - (1.0 - start) / (1.0 - p)).max(0.0);
    } else {
        state.x[4] = start;
    }
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    for _ in 0..max_iter {
        state = de_iterate(&state, pair, p);
        let x1 = state.x[1];
        if x1 > prev + 1e-15 {
            monotone = false;
        }
        prev = x1;
        if x1 < tol {
            return ConvergenceReport {
                converged: true,
                iterations: state.iteration,
                monotone,
                final_x1: x1,
            };
        }
    }
    ConvergenceReport {
        converged: false,
        iterations: state.iteration,
        monotone,
        final_x1: prev,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powerseries::{Construction, DegreeDistribution};

    fn pair(family: Family) -> DegreePair {
        let dc = match family {
            Family::Ara => 3,
            Family::Nsira => 2,
            Family::Aldpc | Family::Ldpc => 6,
        };
        DegreePair::new(
            DegreeDistribution::regular(3, 8),
            DegreeDistribution::regular(dc, 8),
            family,
            Construction::Custom,
            0.3,
            None,
        )
        .unwrap()
    }

    #[test]
    fn perfect_channel_clears_in_one_sweep() {
        let pr = pair(Family::Ara);
        let mut s = DEState::uniform(1.0);
        s.x[5] = 0.0;
        let out = de_iterate(&s, &pr, 0.0);
        // x2 still carries the stale x3; everything on the x0 path is clear.
        for i in [0, 1, 3, 4, 5] {
            assert_eq!(out.x[i], 0.0);
        }
        assert_eq!(de_iterate(&out, &pr, 0.0).x, [0.0; 6]);
    }

    #[test]
    fn full_erasure_is_fixed() {
        let pr = pair(Family::Ara);
        let s = DEState::uniform(1.0);
        let out = de_iterate(&s, &pr, 1.0);
        assert_eq!(out.x, [1.0; 6]);
        assert_eq!(out.x[3], out.x[2]);
    }

    #[test]
    fn residual_vanishes_at_endpoints() {
        for f in [Family::Ara, Family::Nsira, Family::Aldpc, Family::Ldpc] {
            let pr = pair(f);
            assert!(de_residual(&pr, f, 0.4, 0.0).abs() < 1e-15);
            assert!(de_residual(&pr, f, 0.4, 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn six_step_fixed_point_matches_residual() {
        // At a DE fixed point x1 = x, the collapsed residual must vanish.
        let pr = pair(Family::Ara);
        let p = 0.6;
        let mut s = DEState::uniform(1.0 - 1e-3);
        for _ in 0..20000 {
            s = de_iterate(&s, &pr, p);
        }
        let x = s.x[1];
        assert!(x > 0.1);
        assert!(de_residual(&pr, Family::Ara, p, x).abs() < 1e-9);
    }
}
