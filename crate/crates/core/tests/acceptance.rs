//! Acceptance criteria, one line each. Runs without the libtest harness so
//! every line is printed; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use arabec::closed_form::ClosedForm;
use arabec::codec::{
    decode, encode, graph_reduce_instance, instantiate, ml_decode, Dimensions, ReceivedWord,
};
use arabec::constructions::{
    asymptotic_coeffs, asymptotic_coeffs_uncorrected, nsira_check_regular, self_matched_ara,
    solve_b, AsymptoticParams, CatalogEntry, CmkTable, Coefficient, Region, CATALOG,
};
use arabec::nonneg::{polya_verify, self_matched_candidate, self_matched_series, DEFAULT_GRID};
use arabec::sim::{bec_channel, run_trial, trial_seed};
use arabec::tilting::{complexity, de_residual, design_rate, symmetry_swap, tilt_node};
use arabec::{Construction, DegreeDistribution, DegreePair, Family, PowerSeries, Side};
use num::{BigRational, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn line(id: &'static str, pass: bool, detail: String) -> Line {
    Line { id, pass, detail }
}

fn c1_solve_b() -> Line {
    let b5 = solve_b(0.5).unwrap();
    let b6 = solve_b(0.6).unwrap();
    let reps = 1000;
    let start = Instant::now();
    for i in 0..reps {
        std::hint::black_box(solve_b(0.5 + 1e-6 * i as f64).unwrap());
    }
    let per_call = start.elapsed().as_secs_f64() / reps as f64;
    let pass = (b5 - 0.9304).abs() <= 5e-4 && (b6 - 0.972).abs() <= 5e-4 && per_call < 1e-3;
    line(
        "1",
        pass,
        format!(
            "b(0.5) = {b5:.5}, b(0.6) = {b6:.5}, {:.1} µs per call",
            per_call * 1e6
        ),
    )
}

fn c2_complexity() -> Line {
    let chi = |p: f64, b: f64| {
        let pair = self_matched_ara(p, b, 2000).unwrap();
        complexity(Family::Ara, &pair, p).unwrap().chi_d
    };
    let (a, b) = (chi(0.5, 0.9304), chi(0.6, 0.972));
    let pass = (a - 8.585).abs() <= 0.01 && (b - 13.776).abs() <= 0.01;
    line(
        "2",
        pass,
        format!("chi(0.5, 0.9304) = {a:.4}, chi(0.6, 0.972) = {b:.4}"),
    )
}

/// Smallest `k` with `Σ_{i ≤ k} λ_i > target`; `λ_i` sits at index `i - 1`.
fn terms_needed(edge: &PowerSeries, target: f64) -> Option<usize> {
    let mut acc = 0.0;
    for (idx, c) in edge.coeffs().iter().enumerate() {
        acc += c;
        if acc > target {
            return Some(idx + 1);
        }
    }
    None
}

fn c3_partial_sums() -> Line {
    let sm = self_matched_ara(0.5, solve_b(0.5).unwrap(), 2000).unwrap();
    let k_sm = terms_needed(sm.bit.edge(), 0.95);
    let cr = nsira_check_regular(0.5, 2000).unwrap();
    let k_cr = terms_needed(cr.bit.edge(), 0.95);
    let pass = k_sm == Some(29) && k_cr.is_none_or(|k| k > 300);
    line("3", pass, format!("self-matched needs {k_sm:?} terms, check-regular NSIRA needs {k_cr:?} (None = beyond 2000)"))
}

fn c4_bit_regular_sum() -> Line {
    let pair = CatalogEntry::AraBitRegular
        .build(0.3, None, 2000, Region::Numerical)
        .unwrap();
    let s: f64 = pair.check.node().coeffs()[..32].iter().sum();
    line(
        "4",
        (s - 0.968).abs() <= 0.002,
        format!("sum of R_i for i < 32 at p = 0.3 is {s:.5}"),
    )
}

fn c5_c_star() -> Line {
    // Bisection on the series coefficient itself, not its closed form.
    let g6 = |c: f64| self_matched_series(c, 8).coeff(6);
    let (mut lo, mut hi) = (0.0, 1.0);
    assert!(g6(lo) > 0.0 && g6(hi) < 0.0);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if g6(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let expected = (13.0 - 61f64.sqrt()) / 9.0;
    let at = |c: f64| polya_verify(&self_matched_candidate(c).unwrap(), DEFAULT_GRID).unwrap();
    let (r55, r60) = (at(0.55), at(0.60));
    let pass = (root - expected).abs() <= 1e-10 && r55.passed() && !r60.passed();
    line(
        "5",
        pass,
        format!(
            "g_6 sign change at {root:.12} (expected {expected:.12}); c = 0.55 {}, c = 0.60 {}",
            r55.verdict, r60.verdict
        ),
    )
}

struct DeCheck {
    max_residual: f64,
    rate_error: f64,
    rate_allowance: f64,
    seconds: f64,
}

impl DeCheck {
    fn ok(&self) -> bool {
        self.max_residual < 5e-6 && self.rate_error <= self.rate_allowance && self.seconds < 10.0
    }
}

fn de_check(pair: &DegreePair, family: Family, p: f64, started: Instant) -> DeCheck {
    let max_residual = (1..1000)
        .map(|i| de_residual(pair, family, p, i as f64 / 1000.0).abs())
        .fold(0.0, f64::max);
    let rate_error = (design_rate(pair).unwrap() - (1.0 - p)).abs();
    // Rounding in the degree sums sets a floor far below any real tail.
    let rate_allowance = (2.0 * pair.tail_mass()).max(1e-12);
    DeCheck {
        max_residual,
        rate_error,
        rate_allowance,
        seconds: started.elapsed().as_secs_f64(),
    }
}

fn c6_de_residuals() -> Line {
    let mut pass = true;
    let mut worst = (0.0f64, "");
    let mut slowest = 0.0f64;
    for entry in CATALOG {
        let started = Instant::now();
        let p = entry.representative_p();
        let pair = entry.build(p, None, 2000, Region::Proven).unwrap();
        let c = de_check(&pair, entry.family(), p, started);
        if !c.ok() {
            pass = false;
            println!(
                "    {entry} at p = {p}: residual {:e}, rate error {:e} (allowed {:e}), {:.2} s",
                c.max_residual, c.rate_error, c.rate_allowance, c.seconds
            );
        }
        if c.max_residual >= worst.0 {
            worst = (c.max_residual, entry.name());
        }
        slowest = slowest.max(c.seconds);
    }
    line(
        "6",
        pass,
        format!(
            "all 9 rows; worst residual {:.2e} ({}), slowest row {slowest:.2} s",
            worst.0, worst.1
        ),
    )
}

/// Sum over ordered compositions of `k` into `m` parts, each at least 2, of
/// the product of reciprocal parts.
fn enumerate_compositions(k: usize, m: usize) -> BigRational {
    if m == 0 {
        return if k == 0 {
            BigRational::one()
        } else {
            BigRational::zero()
        };
    }
    let mut total = BigRational::zero();
    for first in 2..=k {
        if k - first < 2 * (m - 1) {
            break;
        }
        let rest = enumerate_compositions(k - first, m - 1);
        if !rest.is_zero() {
            total += rest / BigRational::from_integer(first.into());
        }
    }
    total
}

fn c7_cmk() -> Line {
    let table = CmkTable::<BigRational>::new(20);
    let mut mismatches = 0;
    let mut compared = 0;
    for k in 2..=20 {
        for m in 1..=k / 2 {
            compared += 1;
            if table.get(m, k) != enumerate_compositions(k, m) {
                mismatches += 1;
            }
        }
    }
    line(
        "7",
        mismatches == 0,
        format!("{compared} entries compared exactly, {mismatches} mismatches"),
    )
}

fn c8_asymptotics() -> Line {
    let (p, b) = (0.5, 0.9304);
    let params = AsymptoticParams::new(p, b).unwrap();
    let exact = self_matched_ara(p, b, 420).unwrap();
    let ratio = |k: usize, f: fn(usize, &AsymptoticParams, Coefficient) -> arabec::Result<f64>| {
        exact.bit.node().coeff(k) / f(k, &params, Coefficient::L).unwrap()
    };
    let ks: Vec<usize> = (200..=400).collect();
    let r: Vec<f64> = ks.iter().map(|&k| ratio(k, asymptotic_coeffs)).collect();
    let in_band = r.iter().all(|x| (0.8..=1.25).contains(x));
    let toward_one = r
        .windows(2)
        .all(|w| (w[1] - 1.0).abs() <= (w[0] - 1.0).abs());
    let printed: Vec<f64> = [200, 400]
        .iter()
        .map(|&k| ratio(k, asymptotic_coeffs_uncorrected))
        .collect();
    line(
        "8",
        in_band && toward_one,
        format!(
            "exact/asymptotic {:.4} at k = 200, {:.4} at k = 400, |ratio - 1| non-increasing: {toward_one}; \
             uncorrected expansion gives {:.4} and {:.4} (drifts toward d = {:.4})",
            r[0],
            r[r.len() - 1],
            printed[0],
            printed[1],
            params.d
        ),
    )
}

fn c9a_round_trip() -> (bool, String) {
    let pair = self_matched_ara(0.5, solve_b(0.5).unwrap(), 2000).unwrap();
    let inst = instantiate(&pair, Dimensions::new(1024, 64, 64, 8), 11).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = 0;
    for _ in 0..1000 {
        let info: Vec<u8> = (0..inst.info_len()).map(|_| rng.gen_range(0..2)).collect();
        let cw = encode(&inst, &info).unwrap();
        let out = decode(&inst, &ReceivedWord::clean(&cw.transmitted()), true).unwrap();
        let got: Option<Vec<u8>> = out.info.iter().copied().collect();
        if got.as_deref() != Some(&info[..]) {
            failures += 1;
        }
    }
    (
        failures == 0,
        format!("round trip: {failures}/1000 failures"),
    )
}

fn c9b_merged_histogram() -> (bool, String) {
    let p = 0.5;
    let pair = self_matched_ara(p, solve_b(p).unwrap(), 2000).unwrap();
    let dims = Dimensions::new(2000, 64, 64, 0);
    // Quantization depends only on the pair and k, so every seed shares this
    // histogram; seeds only reorder the checks.
    let hist = instantiate(&pair, dims, 0).unwrap().check_histogram();
    let total: usize = hist.iter().sum();
    let r_emp = PowerSeries::from_fn(hist.len() + 400, |d| {
        hist.get(d).map_or(0.0, |&c| c as f64 / total as f64)
    });
    let expected = tilt_node(&r_emp, Side::Check, p).unwrap();

    // One draw: a fresh graph and channel, keeping the first closed run so
    // that draws are independent.
    let draws = 10_000u64;
    let degrees: Vec<usize> = (0..draws)
        .into_par_iter()
        .map(|draw| {
            let inst = instantiate(&pair, dims, draw + 1).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(draw);
            let zeros = vec![0u8; inst.n()];
            let rcv = bec_channel(&zeros, p, &[], &mut rng).unwrap();
            assert_eq!(inst.check_histogram(), hist);
            graph_reduce_instance(&inst, &rcv).unwrap().merged_degrees[0]
        })
        .collect();
    let mut counts = vec![0usize; expected.order() + 1];
    for d in degrees {
        counts[d.min(expected.order())] += 1;
    }
    // Bins with too few expected draws are pooled into one tail bin.
    let n = draws as f64;
    let mut worst = 0.0f64;
    let mut tested = 0;
    let (mut tail_obs, mut tail_prob) = (0.0, 0.0);
    for (d, &count) in counts.iter().enumerate() {
        let prob = expected.coeff(d);
        if n * prob >= 25.0 {
            let sigma = (n * prob * (1.0 - prob)).sqrt();
            worst = worst.max((count as f64 - n * prob).abs() / sigma);
            tested += 1;
        } else {
            tail_obs += count as f64;
            tail_prob += prob;
        }
    }
    let tail_sigma = (n * tail_prob * (1.0 - tail_prob)).sqrt().max(1.0);
    worst = worst.max((tail_obs - n * tail_prob).abs() / tail_sigma);
    (
        worst <= 3.0,
        format!(
            "merged-check histogram: {draws} draws, {tested} bins + tail, worst {worst:.2} sigma"
        ),
    )
}

fn c9c_peel_vs_ml() -> (bool, String) {
    let pair = self_matched_ara(0.5, solve_b(0.5).unwrap(), 400).unwrap();
    let cases = 10_000u64;
    let results: Vec<(bool, bool, bool)> = (0..cases)
        .into_par_iter()
        .map(|case| {
            let mut rng = ChaCha8Rng::seed_from_u64(case);
            let k = rng.gen_range(4..=16);
            let m = rng.gen_range(0..3);
            let inst = instantiate(&pair, Dimensions::new(k, 8, 8, m), case).unwrap();
            let info: Vec<u8> = (0..inst.info_len()).map(|_| rng.gen_range(0..2)).collect();
            let cw = encode(&inst, &info).unwrap();
            let p = rng.gen::<f64>() * 0.6;
            let rcv = bec_channel(&cw.transmitted(), p, &[], &mut rng).unwrap();
            let ml = ml_decode(&inst, &rcv);
            let mut agree = true;
            let mut peeled = false;
            for use_outer in [false, true] {
                let d = decode(&inst, &rcv, use_outer).unwrap();
                let v: Option<Vec<u8>> = d.v.iter().copied().collect();
                if let Some(v) = v {
                    peeled |= !use_outer;
                    agree &= ml.as_ref() == Some(&v);
                }
            }
            (agree, peeled, ml.is_some())
        })
        .collect();
    let bad = results.iter().filter(|r| !r.0).count();
    let peeled = results.iter().filter(|r| r.1).count();
    let ml = results.iter().filter(|r| r.2).count();
    (
        bad == 0,
        format!("peel vs ML: {cases} cases, peel {peeled}, ML {ml}, disagreements {bad}"),
    )
}

fn c9d_outer_gain() -> (bool, String) {
    let p = 0.46;
    let pair = self_matched_ara(0.5, solve_b(0.5).unwrap(), 2000).unwrap();
    let inst = instantiate(&pair, Dimensions::new(8192, 64, 64, 13), 7).unwrap();
    let trials = 1000;
    let outcome: Vec<(bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(2024, 0, t);
            let with = run_trial(&inst, p, &[], true, false, seed)
                .unwrap()
                .success();
            let without = run_trial(&inst, p, &[], false, false, seed)
                .unwrap()
                .success();
            (with, without)
        })
        .collect();
    let err_with = outcome.iter().filter(|o| !o.0).count();
    let err_without = outcome.iter().filter(|o| !o.1).count();
    let harmed = outcome.iter().filter(|o| !o.0 && o.1).count();
    (
        err_with < err_without && harmed == 0,
        format!(
            "k = 8192 rate {:.4}, p = 0.46: word erasures {err_with}/{trials} with outer, {err_without}/{trials} without, {harmed} harmed",
            inst.rate()
        ),
    )
}

fn c9_codec() -> Line {
    let started = Instant::now();
    let parts = [
        c9a_round_trip(),
        c9b_merged_histogram(),
        c9c_peel_vs_ml(),
        c9d_outer_gain(),
    ];
    let secs = started.elapsed().as_secs_f64();
    let pass = parts.iter().all(|p| p.0) && secs < 300.0;
    let detail: Vec<String> = parts
        .iter()
        .zip(["a", "b", "c", "d"])
        .map(|((ok, d), tag)| format!("({tag}) {} {d}", if *ok { "ok" } else { "FAILED" }))
        .collect();
    line(
        "9",
        pass,
        format!("{}; {secs:.1} s total", detail.join("; ")),
    )
}

fn c10_symmetry() -> Line {
    let mut pass = true;
    for entry in CATALOG {
        let started = Instant::now();
        let p = entry.representative_p();
        let pair = entry.build(p, None, 2000, Region::Proven).unwrap();
        let (once, f1, p1) = symmetry_swap(&pair, entry.family(), p);
        let (twice, f2, p2) = symmetry_swap(&once, f1, p1);
        let same = |a: &PowerSeries, b: &PowerSeries| a.coeffs() == b.coeffs();
        let identity = same(twice.bit.node(), pair.bit.node())
            && same(twice.bit.edge(), pair.bit.edge())
            && same(twice.check.node(), pair.check.node())
            && same(twice.check.edge(), pair.check.edge())
            && f2 == entry.family()
            && (p2 - p).abs() <= f64::EPSILON;
        let c = de_check(&once, f1, p1, started);
        if !(identity && c.ok()) {
            pass = false;
            println!(
                "    {entry}: involution {identity}, swapped residual {:e}",
                c.max_residual
            );
        }
    }
    line(
        "10",
        pass,
        "swap twice is the identity and every swapped pair passes the residual and rate checks"
            .into(),
    )
}

/// The row's pair, or for rows whose series go negative at `p` (outside
/// their range), a pair assembled from the same closed forms without the
/// sign scan, so the complexity formula can still be evaluated.
fn formula_pair(entry: CatalogEntry, p: f64, b: Option<f64>) -> DegreePair {
    if let Ok(pair) = entry.build(p, b, 2000, Region::Unchecked) {
        return pair;
    }
    let order = 200;
    let closed = |cf: ClosedForm| {
        let (node, edge) = cf.series(order);
        DegreeDistribution::from_parts(node, edge, Some(cf))
    };
    let regular = DegreeDistribution::regular(3, order);
    let (bit, check) = match entry {
        CatalogEntry::AraBitRegular => (regular, closed(ClosedForm::cubic(1.0 - p, 1.0 - p))),
        CatalogEntry::AraCheckRegular => (closed(ClosedForm::cubic(p, p)), regular),
        CatalogEntry::NsiraBitRegular => (regular, closed(ClosedForm::sqrt(1.0 - p))),
        CatalogEntry::AldpcCheckRegular => (closed(ClosedForm::sqrt(p)), regular),
        other => panic!("{other} has no sign restriction at p = {p}"),
    };
    DegreePair::new(bit, check, entry.family(), Construction::Custom, p, None).unwrap()
}

fn c11_complexity_table() -> Line {
    let p = 0.5;
    let mut pass = true;
    let mut shown = Vec::new();
    for entry in CATALOG {
        let b = entry.is_self_matched().then(|| solve_b(p).unwrap());
        let pair = formula_pair(entry, p, b);
        let formula = complexity(entry.family(), &pair, p).unwrap();
        let (ce, cd) = entry.complexity_closed_form(p, b);
        let ok = (formula.chi_d - cd).abs() <= 1e-12
            && match (formula.chi_e, ce) {
                (Some(a), Some(c)) => (a - c).abs() <= 1e-12,
                (None, None) => true,
                _ => false,
            };
        pass &= ok;
        shown.push(format!("{entry} {:.6}", formula.chi_d));
    }
    let named = |e: CatalogEntry| {
        complexity(e.family(), &formula_pair(e, p, None), p)
            .unwrap()
            .chi_d
    };
    pass &= (named(CatalogEntry::NsiraCheckRegular) - 10.0).abs() <= 1e-12
        && (named(CatalogEntry::AldpcBitRegular) - 12.0).abs() <= 1e-12
        && (named(CatalogEntry::AraCheckRegular) - 8.0).abs() <= 1e-12;
    line(
        "11",
        pass,
        format!("chi_D at p = 0.5: {}", shown.join(", ")),
    )
}

fn main() -> ExitCode {
    let checks: [fn() -> Line; 11] = [
        c1_solve_b,
        c2_complexity,
        c3_partial_sums,
        c4_bit_regular_sum,
        c5_c_star,
        c6_de_residuals,
        c7_cmk,
        c8_asymptotics,
        c9_codec,
        c10_symmetry,
        c11_complexity_table,
    ];
    let mut failed = 0;
    for check in checks {
        let l = check();
        println!(
            "criterion {:>2}: {} | {}",
            l.id,
            if l.pass { "PASS" } else { "FAIL" },
            l.detail
        );
        failed += usize::from(!l.pass);
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
