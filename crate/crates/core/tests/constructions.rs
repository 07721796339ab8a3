use std::f64::consts::E;

use arabec::constructions::self_matched::{alpha, s_of, untilted_node_series};
use arabec::constructions::{
    aldpc_bit_regular, aldpc_check_regular, asymptotic_coeffs, b_star, bit_regular_ara,
    check_regular_ara, lambert_w0, nsira_bit_regular, self_matched_aldpc, self_matched_ara,
    self_matched_nsira, solve_b, solve_check_from_bit, validity_region, AsymptoticParams,
    CatalogEntry, CmkTable, Coefficient, CATALOG,
};
use arabec::tilting::symmetry_swap;
use arabec::{DegreePair, Family};
use num::{BigRational, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn lambert_branch_and_identity() {
    let near = lambert_w0(-1.0 / E + 1e-14).unwrap();
    assert!((near + 1.0).abs() < 1e-6, "{near}");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let x = -rng.gen_range(1e-12..(1.0 / E - 1e-12));
        let w = lambert_w0(x).unwrap();
        assert!(w > -1.0 && w < 0.0);
        assert!(
            (w * w.exp() - x).abs() <= 1e-13 * x.abs().max(1e-3),
            "x = {x}"
        );
    }
    assert!(lambert_w0(0.1).is_err());
    assert!(lambert_w0(-0.5).is_err());
}

#[test]
fn b_star_from_lambert() {
    let x = -(-(25.0 + 61f64.sqrt()) / 12.0).exp();
    let b = lambert_w0(x).unwrap() + 1.0;
    assert!((b - 0.9304).abs() < 5e-5, "{b}");
    assert_eq!(b, b_star());
}

#[test]
fn solve_b_examples() {
    assert!((solve_b(0.5).unwrap() - 0.9304).abs() < 5e-5);
    assert!((solve_b(0.6).unwrap() - 0.972).abs() < 5e-4);
    for p in [0.1, 0.27, 0.45, 0.49] {
        let b = solve_b(p).unwrap();
        assert!((b - solve_b(1.0 - p).unwrap()).abs() < 1e-14);
        let a = (1.0 - 2.0 * p).abs();
        let rhs = (13.0 + 61f64.sqrt()) / 12.0 * (1.0 + a) / (1.0 - a);
        assert!((-b - (1.0 - b).ln() - rhs).abs() < 1e-9 * rhs);
        assert!(b >= b_star() && b < 1.0);
    }
    assert!(solve_b(0.0).is_err());
    assert!(solve_b(1.0).is_err());
}

#[test]
fn cmk_examples() {
    let t = CmkTable::<f64>::new(30);
    assert_eq!(t.get(1, 5), 0.2);
    assert_eq!(t.get(2, 4), 0.25);
    assert!((t.get(2, 6) - 13.0 / 36.0).abs() < 1e-15);
    assert_eq!(t.get(3, 5), 0.0);
    for k in 2..=30 {
        assert_eq!(t.get(1, k), 1.0 / k as f64);
        for m in 1..=k / 2 {
            assert!(t.get(m, k) > 0.0);
        }
    }
}

/// `Σ Π 1/parts` over ordered compositions of `k` into `m` parts ≥ 2.
fn compositions(k: usize, m: usize) -> BigRational {
    if m == 0 {
        return if k == 0 {
            BigRational::one()
        } else {
            BigRational::zero()
        };
    }
    (2..=k)
        .map(|first| BigRational::new(1.into(), first.into()) * compositions(k - first, m - 1))
        .fold(BigRational::zero(), |a, b| a + b)
}

#[test]
fn cmk_matches_brute_force() {
    let t = CmkTable::<BigRational>::new(20);
    for k in 2..=20 {
        for m in 1..=k / 2 {
            assert_eq!(t.get(m, k), compositions(k, m), "c[{m}][{k}]");
        }
    }
}

#[test]
fn cmk_coefficients_match_series() {
    use arabec::constructions::self_matched::coefficient_via_cmk;
    let (p, b) = (0.5, 0.9304);
    let table = CmkTable::<f64>::new(40);
    let series = untilted_node_series(p, b, 40);
    for k in 2..=40 {
        let (v, err) = coefficient_via_cmk(p, b, k, &table);
        assert!((v - series.coeff(k)).abs() <= 10.0 * err + 1e-15, "k = {k}");
    }
}

#[test]
fn self_matched_ara_examples() {
    let pair = self_matched_ara(0.5, 0.9304, 2000).unwrap();
    assert_eq!(pair.bit.node().coeffs(), pair.check.node().coeffs());
    assert_eq!(pair.bit.edge().coeffs(), pair.check.edge().coeffs());
    let s = s_of(0.9304);
    // Leading term of the alternating sum.
    let l2 = -0.9304f64 * 0.9304 / (2.0 * 0.5 * s);
    assert!((pair.bit.node().coeff(2) - l2).abs() < 1e-14);
    assert!((l2 - 0.4990).abs() < 5e-4, "{l2}");
    let mut acc = 0.0;
    let first = (0..)
        .find(|&i| {
            acc += pair.bit.edge().coeff(i);
            acc > 0.95
        })
        .unwrap();
    assert_eq!(first + 1, 29);
    for side in [&pair.bit, &pair.check] {
        assert!(side.node().min_coeff().1 >= -1e-12);
        assert!((side.node().sum() - 1.0).abs() <= 10.0 * pair.tail_mass() + 1e-12);
    }

    let err = self_matched_ara(0.4, 0.9304, 100).unwrap_err().to_string();
    assert!(err.contains("lower bound"), "{err}");
    let err = self_matched_ara(0.6, 0.9304, 100).unwrap_err().to_string();
    assert!(err.contains("upper bound"), "{err}");
}

#[test]
fn self_matched_nsira_examples() {
    let b = 0.9304;
    let pair = self_matched_nsira(0.5, b, 2000).unwrap();
    assert!((pair.bit.node().coeff(2) - 0.2495).abs() < 5e-4);
    assert!((pair.bit.node().coeff(2) - b * b / (2.0 * -s_of(b))).abs() < 1e-15);
    assert!(pair.bit.node().coeffs().iter().all(|&c| c >= 0.0));
    // Any b keeps the plain side non-negative, even with p near zero.
    let low = self_matched_nsira(0.05, 0.5, 200).unwrap();
    assert!(low.bit.node().coeffs().iter().all(|&c| c >= 0.0));
    let (_, chi) = CatalogEntry::NsiraSelfMatched.complexity_closed_form(0.5, Some(b));
    let f1 = -b * b / ((1.0 - b) * s_of(b));
    assert!((chi - (4.0 + f1)).abs() < 1e-12);
    assert!((chi - 11.17).abs() < 5e-3, "{chi}");
}

#[test]
fn self_matched_aldpc_mirrors_nsira() {
    let b = 0.96;
    for p in [0.55, 0.7, 0.9] {
        let aldpc = self_matched_aldpc(p, b, 300).unwrap();
        assert!(aldpc.check.node().coeffs().iter().all(|&c| c >= 0.0));
        let nsira = self_matched_nsira(1.0 - p, b, 300).unwrap();
        let (swapped, family, q) = symmetry_swap(&nsira, Family::Nsira, 1.0 - p);
        assert_eq!(family, Family::Aldpc);
        assert!((q - p).abs() < 1e-15);
        for i in 0..=300 {
            assert!((swapped.bit.node().coeff(i) - aldpc.bit.node().coeff(i)).abs() < 1e-12);
            assert!((swapped.check.node().coeff(i) - aldpc.check.node().coeff(i)).abs() < 1e-12);
        }
    }
    let (_, chi) = CatalogEntry::AldpcSelfMatched.complexity_closed_form(0.5, Some(0.9304));
    assert!((chi - 13.17).abs() < 5e-3, "{chi}");
}

fn assert_monomial(s: &arabec::PowerSeries, degree: usize) {
    for (i, &c) in s.coeffs().iter().enumerate() {
        assert_eq!(c, if i == degree { 1.0 } else { 0.0 }, "degree {i}");
    }
}

#[test]
fn regular_side_is_exact() {
    let br = bit_regular_ara(0.2, 400).unwrap();
    assert_monomial(br.bit.node(), 3);
    assert_monomial(br.bit.edge(), 2);
    let cr = check_regular_ara(0.8, 400).unwrap();
    assert_monomial(cr.check.node(), 3);
    let aldpc = aldpc_bit_regular(0.5, 400).unwrap();
    assert_monomial(aldpc.bit.edge(), 2);
    assert!((aldpc.check.edge().sum() - 1.0).abs() <= aldpc.tail_mass() + 1e-12);
    let aldpc_cr = aldpc_check_regular(0.95, 400).unwrap();
    assert_monomial(aldpc_cr.check.edge(), 2);
}

#[test]
fn bit_regular_ara_check_mass_below_32() {
    let pair = arabec::constructions::bit_regular_ara_in(
        0.3,
        2000,
        arabec::constructions::Region::Numerical,
    )
    .unwrap();
    let head: f64 = pair.check.node().coeffs()[..32].iter().sum();
    assert!((head - 0.968).abs() < 5e-4, "{head}");
    let rate = arabec::tilting::design_rate_exact(&pair).unwrap();
    assert!((rate - 0.7).abs() < 1e-9, "{rate}");
}

fn max_diff(a: &DegreePair, b: &DegreePair, n: usize) -> f64 {
    (0..n)
        .map(|i| {
            let bit = (a.bit.node().coeff(i) - b.bit.node().coeff(i)).abs();
            let check = (a.check.node().coeff(i) - b.check.node().coeff(i)).abs();
            bit.max(check)
        })
        .fold(0.0, f64::max)
}

#[test]
fn regular_families_swap_consistently() {
    for p in [0.1, 0.2, 0.25] {
        let br = bit_regular_ara(p, 400).unwrap();
        let (swapped, _, _) = symmetry_swap(&br, Family::Ara, p);
        let cr = check_regular_ara(1.0 - p, 400).unwrap();
        assert!(max_diff(&swapped, &cr, 400) < 1e-10);
    }
    let nsira = nsira_bit_regular(0.04, 400).unwrap();
    let (swapped, family, _) = symmetry_swap(&nsira, Family::Nsira, 0.04);
    assert_eq!(family, Family::Aldpc);
    let aldpc = aldpc_check_regular(0.96, 400).unwrap();
    assert!(max_diff(&swapped, &aldpc, 400) < 1e-10);
    let (_, chi) = CatalogEntry::AldpcCheckRegular.complexity_closed_form(0.96, None);
    assert!((chi - 3.0 * 1.96 / 0.04).abs() < 1e-9);
}

#[test]
fn numerical_pipeline_matches_bit_regular_closed_form() {
    let p = 0.2;
    let closed = bit_regular_ara(p, 2000).unwrap();
    let sol = solve_check_from_bit(|x: f64| x.powi(3), |x: f64| x * x, p).unwrap();
    let cf = closed.check.closed().expect("closed form attached");
    for j in 1..20 {
        let x = j as f64 / 20.0;
        assert!((sol.r(x).unwrap() - cf.node(x)).abs() < 1e-8, "R({x})");
        assert!((sol.rho(x).unwrap() - cf.edge(x)).abs() < 1e-8, "ρ({x})");
    }
    assert!((sol.r(1.0).unwrap() - 1.0).abs() < 1e-12);
    assert!((sol.rho(1.0).unwrap() - 1.0).abs() < 1e-8);

    // Same routine at 1 - p, fed the regular check side, recovers the bit side.
    let cr = check_regular_ara(1.0 - p, 2000).unwrap();
    let inverse = solve_check_from_bit(|x: f64| x.powi(3), |x: f64| x * x, p).unwrap();
    let bit_cf = cr.bit.closed().unwrap();
    for x in [0.3, 0.6, 0.9] {
        assert!((inverse.r(x).unwrap() - bit_cf.node(x)).abs() < 1e-8);
    }
}

#[test]
fn asymptotic_examples() {
    let (p, b) = (0.5, 0.9304);
    let pair = self_matched_ara(p, b, 2000).unwrap();
    let params = AsymptoticParams::new(p, b).unwrap();
    assert!(params.alpha > 0.0 && params.d > 0.0);
    assert!((params.alpha - alpha(p, b)).abs() < 1e-15);
    let mut prev = f64::INFINITY;
    for k in (50..=400).step_by(50) {
        let ratio =
            pair.bit.node().coeff(k) / asymptotic_coeffs(k, &params, Coefficient::L).unwrap();
        assert!((0.5..=2.0).contains(&ratio), "k = {k}: {ratio}");
        assert!((ratio - 1.0).abs() <= prev + 1e-12);
        prev = (ratio - 1.0).abs();
    }

    let q = AsymptoticParams::new(0.6, 0.972).unwrap();
    for k in [20, 100] {
        let l = asymptotic_coeffs(k, &q, Coefficient::L).unwrap();
        let lambda = asymptotic_coeffs(k, &q, Coefficient::Lambda).unwrap();
        assert!(
            (lambda
                - k as f64 * l
                    / (0.6 * arabec::constructions::self_matched::f_deriv_at_one(0.972)))
            .abs()
                < 1e-15
        );
        let r = asymptotic_coeffs(k, &q, Coefficient::R).unwrap();
        let mirrored = AsymptoticParams::new(0.4, 0.972).unwrap();
        assert_eq!(r, asymptotic_coeffs(k, &mirrored, Coefficient::L).unwrap());
    }
}

#[test]
fn validity_region_examples() {
    let at_star = validity_region(Family::Ara, b_star());
    assert!((at_star.lo - 0.5).abs() < 1e-9 && (at_star.hi - 0.5).abs() < 1e-9);
    assert!(validity_region(Family::Ara, 0.9).is_empty());
    let mut width = 0.0;
    for b in [0.94, 0.96, 0.98, 0.99, 0.999] {
        let iv = validity_region(Family::Ara, b);
        assert!(iv.hi - iv.lo > width);
        width = iv.hi - iv.lo;
    }
    for b in [0.3, 0.9, 0.99] {
        assert_eq!(validity_region(Family::Nsira, b).lo, 0.0);
        assert_eq!(validity_region(Family::Aldpc, b).hi, 1.0);
    }
}

#[test]
fn boundary_is_sharp() {
    for b in [0.95, 0.97, 0.99] {
        let iv = validity_region(Family::Ara, b);
        let inside = untilted_node_series(iv.lo, b, 50);
        assert!(inside.min_coeff().1 >= -1e-10);
        let outside = untilted_node_series(0.95 * iv.lo, b, 50);
        assert!(outside.min_coeff().1 < -1e-6, "b = {b}");
    }
}

#[test]
fn self_matched_tails_decay_like_b_to_the_k() {
    let (p, b) = (0.5, 0.9304);
    let node = self_matched_ara(p, b, 2000).unwrap().bit.node().clone();
    let tail = |k: usize| node.coeffs()[k + 1..].iter().sum::<f64>();
    let c = tail(50) / b.powi(50);
    for k in (50..=400).step_by(25) {
        assert!(tail(k) <= c * b.powi(k as i32) * (1.0 + 1e-9), "k = {k}");
    }
}

#[test]
fn catalog_names_and_json() {
    for entry in CATALOG {
        let parsed: CatalogEntry = entry.name().parse().unwrap();
        assert_eq!(parsed, entry);
        assert_eq!(entry.swapped().swapped(), entry);
        let pair = entry
            .build(entry.representative_p(), None, 300, Default::default())
            .unwrap();
        let back = DegreePair::from_json(&pair.to_json().unwrap()).unwrap();
        assert_eq!(back.family, entry.family());
        assert_eq!(back.bit.node().coeffs(), pair.bit.node().coeffs());
        assert_eq!(back.check.node().coeffs(), pair.check.node().coeffs());
    }
    assert!("ara-xx".parse::<CatalogEntry>().is_err());
}
