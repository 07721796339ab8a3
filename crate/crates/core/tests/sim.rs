use arabec::constructions::CatalogEntry;
use arabec::sim::{
    bec_channel, emit_csv, puncture_pattern, read_csv, run_sweep, wilson_interval, SimConfig,
    WORKERS_ENV,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_config(p_start: f64, p_stop: f64, p_step: f64) -> SimConfig {
    let mut cfg = SimConfig::new(CatalogEntry::AraSelfMatched, p_start, p_stop, p_step, 1024);
    cfg.trials = 200;
    cfg.seed = 3;
    cfg
}

#[test]
fn channel_erasure_statistics() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let bits = vec![1u8; 1_000_000];
    let clean = bec_channel(&bits[..1000], 0.0, &[], &mut rng).unwrap();
    assert_eq!(clean.erasures(), 0);

    let half = bec_channel(&bits, 0.5, &[], &mut rng).unwrap();
    let frac = half.erasures() as f64 / bits.len() as f64;
    assert!((frac - 0.5).abs() < 0.002, "{frac}");
    assert!(half.0.iter().flatten().all(|&b| b == 1));

    // Keeping half the bits at p = 0.4 leaves an effective erasure rate of 0.7.
    let punctured = puncture_pattern(bits.len(), 0.5, 9).unwrap();
    assert_eq!(punctured.len(), bits.len() / 2);
    let w = bec_channel(&bits, 0.4, &punctured, &mut rng).unwrap();
    let frac = w.erasures() as f64 / bits.len() as f64;
    assert!((frac - 0.7).abs() < 0.002, "{frac}");

    assert!(bec_channel(&bits[..10], 1.0, &[], &mut rng).is_err());
    assert!(bec_channel(&bits[..10], -0.1, &[], &mut rng).is_err());
    assert!(bec_channel(&bits[..10], 0.1, &[10], &mut rng).is_err());
    assert!(puncture_pattern(10, 0.0, 1).is_err());
}

#[test]
fn sweeps_do_not_depend_on_worker_count() {
    let cfg = small_config(0.44, 0.48, 0.02);
    std::env::set_var(WORKERS_ENV, "1");
    let one = run_sweep(&cfg).unwrap();
    std::env::set_var(WORKERS_ENV, "4");
    let four = run_sweep(&cfg).unwrap();
    std::env::remove_var(WORKERS_ENV);
    assert_eq!(one.points, four.points);
    assert_eq!(one.points.len(), 3);
    assert_eq!(one.code_rate, four.code_rate);
}

#[test]
fn outer_code_lowers_word_errors() {
    let mut cfg = small_config(0.45, 0.45, 0.01);
    cfg.k = 2048;
    cfg.m_outer = 12;
    cfg.trials = 400;
    let with = run_sweep(&cfg).unwrap().points[0].clone();
    cfg.use_outer = false;
    let without = run_sweep(&cfg).unwrap().points[0].clone();
    assert!(
        with.word_rate < without.word_rate,
        "{} vs {}",
        with.word_rate,
        without.word_rate
    );
    assert!(with.outer_rescue_rate > 0.0);
    assert_eq!(without.outer_rescue_rate, 0.0);
    // Peeling does not see the outer code, so its residue is unchanged.
    assert_eq!(with.unresolved_mean, without.unresolved_mean);
}

#[test]
fn above_design_most_words_fail() {
    let point = run_sweep(&small_config(0.55, 0.55, 0.01)).unwrap().points[0].clone();
    assert!(point.word_rate > 0.9, "{point:?}");
    let (lo, hi) = point.word_ci;
    assert!(lo <= point.word_rate && point.word_rate <= hi);
}

#[test]
fn csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");

    let mut result = run_sweep(&small_config(0.40, 0.44, 0.02)).unwrap();
    emit_csv(&result, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(
        text.lines().next().unwrap(),
        "p,bit_rate,word_rate,unresolved_mean,outer_rescue_rate,trials"
    );
    let rows = read_csv(&path).unwrap();
    for (row, point) in rows.iter().zip(&result.points) {
        assert_eq!(row.p, point.p);
        assert_eq!(row.word_rate, point.word_rate);
        assert_eq!(row.trials, 200);
    }

    result.points.clear();
    emit_csv(&result, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 1);
    assert!(read_csv(&path).unwrap().is_empty());
}

#[test]
fn matched_sweeps_skip_points_outside_the_valid_region() {
    let mut cfg = SimConfig::new(CatalogEntry::AraBitRegular, 0.1, 0.9, 0.4, 256);
    cfg.design_p = None;
    cfg.trials = 20;
    let result = run_sweep(&cfg).unwrap();
    assert_eq!(result.points.len(), 3);
    assert!(result.code_rate.is_none());
    let skipped: Vec<f64> = result
        .points
        .iter()
        .filter(|p| p.skipped.is_some())
        .map(|p| p.p)
        .collect();
    assert!(!skipped.is_empty() && skipped.len() < 3, "{skipped:?}");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("matched.csv");
    emit_csv(&result, &path).unwrap();
    let rows = read_csv(&path).unwrap();
    assert_eq!(rows.len(), 3 - skipped.len());
    assert!(rows.iter().all(|r| !skipped.contains(&r.p)));
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = |edit: fn(&mut SimConfig)| {
        let mut cfg = small_config(0.4, 0.5, 0.05);
        edit(&mut cfg);
        run_sweep(&cfg).is_err()
    };
    assert!(bad(|c| c.trials = 0));
    assert!(bad(|c| c.p_start = 0.0));
    assert!(bad(|c| c.p_stop = 1.0));
    assert!(bad(|c| c.p_stop = 0.3));
    assert!(bad(|c| c.p_step = -0.1));
    assert!(bad(|c| c.alpha = 0.0));
    assert!(bad(|c| c.alpha = 1.5));
    assert!(bad(|c| c.design_p = Some(1.2)));
}

#[test]
fn wilson_interval_examples() {
    let (lo, hi) = wilson_interval(50, 100);
    assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    let (lo, hi) = wilson_interval(0, 100);
    assert_eq!(lo, 0.0);
    assert!((hi - 0.0370).abs() < 1e-3);
    assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    let (lo, hi) = wilson_interval(100, 100);
    assert!(hi == 1.0 && lo > 0.95);
}
