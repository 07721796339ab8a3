//! Monte Carlo erasure-channel sweeps.

use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{decode, encode, instantiate, CodeInstance, Dimensions, ReceivedWord};
use crate::constructions::{CatalogEntry, Region};
use crate::error::{Error, Result};

/// Environment variable overriding the number of worker threads.
pub const WORKERS_ENV: &str = "ARABEC_WORKERS";

/// Erases each position independently with probability `p`, after removing
/// the positions in `punctured` outright.
pub fn bec_channel(
    bits: &[u8],
    p: f64,
    punctured: &[usize],
    rng: &mut impl Rng,
) -> Result<ReceivedWord> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::param("p", p, "must lie in [0, 1)"));
    }
    let mut out: Vec<Option<u8>> = bits
        .iter()
        .map(|&b| if rng.gen::<f64>() < p { None } else { Some(b) })
        .collect();
    for &j in punctured {
        if j >= out.len() {
            return Err(Error::InvalidInput(format!(
                "punctured position {j} is out of range"
            )));
        }
        out[j] = None;
    }
    Ok(ReceivedWord(out))
}

/// A random `1 - alpha` fraction of `0..n`, fixed by `seed`.
pub fn puncture_pattern(n: usize, alpha: f64, seed: u64) -> Result<Vec<usize>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", alpha, "must lie in (0, 1]"));
    }
    let count = ((1.0 - alpha) * n as f64).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut out: Vec<usize> = order.into_iter().take(count).collect();
    out.sort_unstable();
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct SimConfig {
    pub family: CatalogEntry,
    /// Erasure probability the code is designed for. `None` designs a fresh
    /// code for every channel point.
    pub design_p: Option<f64>,
    /// Self-matched series parameter; solved from the rate when absent.
    pub b: Option<f64>,
    pub order: usize,
    pub region: Region,
    pub p_start: f64,
    pub p_stop: f64,
    pub p_step: f64,
    pub k: usize,
    pub d_l: usize,
    pub d_r: usize,
    pub m_outer: usize,
    pub use_outer: bool,
    pub trials: usize,
    pub seed: u64,
    /// Fraction of transmitted bits kept after puncturing.
    pub alpha: f64,
    /// Send the all-zero codeword instead of random information.
    pub all_zero: bool,
}

impl SimConfig {
    /// Defaults for `family`: design at its representative erasure
    /// probability, `d_L = d_R = 64`, 1000 trials, no puncturing.
    pub fn new(family: CatalogEntry, p_start: f64, p_stop: f64, p_step: f64, k: usize) -> Self {
        SimConfig {
            family,
            design_p: Some(family.representative_p()),
            b: None,
            order: 2000,
            region: Region::Proven,
            p_start,
            p_stop,
            p_step,
            k,
            d_l: 64,
            d_r: 64,
            m_outer: 0,
            use_outer: true,
            trials: 1000,
            seed: 1,
            alpha: 1.0,
            all_zero: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        for (name, v) in [("p_start", self.p_start), ("p_stop", self.p_stop)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::param(name, v, "must lie in (0, 1)"));
            }
        }
        if self.p_stop < self.p_start {
            return Err(Error::InvalidInput("p_stop is below p_start".into()));
        }
        if !(self.p_step > 0.0) && self.p_stop > self.p_start {
            return Err(Error::param("p_step", self.p_step, "must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param("alpha", self.alpha, "must lie in (0, 1]"));
        }
        if let Some(p) = self.design_p {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::param("design_p", p, "must lie in (0, 1)"));
            }
        }
        Ok(())
    }

    /// Channel erasure probabilities of the sweep.
    pub fn points(&self) -> Vec<f64> {
        if self.p_stop <= self.p_start || self.p_step <= 0.0 {
            return vec![self.p_start];
        }
        let n = ((self.p_stop - self.p_start) / self.p_step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| self.p_start + i as f64 * self.p_step)
            .collect()
    }

    fn build(&self, design: f64) -> Result<CodeInstance> {
        let pair = self.family.build(design, self.b, self.order, self.region)?;
        instantiate(
            &pair,
            Dimensions::new(self.k, self.d_l, self.d_r, self.m_outer),
            self.seed,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub p: f64,
    /// Erased information bits over all information bits sent.
    pub bit_rate: f64,
    pub word_rate: f64,
    /// Mean fraction of punctured bits left unknown by peeling.
    pub unresolved_mean: f64,
    /// Fraction of trials where peeling stalled and the outer code finished.
    pub outer_rescue_rate: f64,
    pub trials: usize,
    pub word_errors: usize,
    /// Wilson 95% interval for the word erasure rate.
    pub word_ci: (f64, f64),
    /// Why the point was not simulated, if it was not.
    pub skipped: Option<String>,
}

impl SimPoint {
    fn skipped(p: f64, reason: String) -> Self {
        SimPoint {
            p,
            bit_rate: f64::NAN,
            word_rate: f64::NAN,
            unresolved_mean: f64::NAN,
            outer_rescue_rate: f64::NAN,
            trials: 0,
            word_errors: 0,
            word_ci: (f64::NAN, f64::NAN),
            skipped: Some(reason),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub points: Vec<SimPoint>,
    /// Code rate of the fixed-design instance, if there is one.
    pub code_rate: Option<f64>,
    pub wall_time_s: f64,
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let phat = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (phat + z * z / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// Seed for one trial, independent of scheduling.
pub fn trial_seed(seed: u64, point: usize, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 32) | trial as u64);
    rng.gen()
}

#[derive(Clone, Copy, Default)]
struct Tally {
    word_errors: usize,
    bit_errors: usize,
    unresolved_bits: usize,
    rescued: usize,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            word_errors: self.word_errors + o.word_errors,
            bit_errors: self.bit_errors + o.bit_errors,
            unresolved_bits: self.unresolved_bits + o.unresolved_bits,
            rescued: self.rescued + o.rescued,
        }
    }
}

/// One encode, channel, decode round. Information bits decoded to a wrong
/// value count as erased.
pub fn run_trial(
    inst: &CodeInstance,
    p: f64,
    punctured: &[usize],
    use_outer: bool,
    all_zero: bool,
    seed: u64,
) -> Result<crate::codec::DecodeResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let info: Vec<u8> = if all_zero {
        vec![0; inst.info_len()]
    } else {
        (0..inst.info_len())
            .map(|_| rng.gen_range(0..2u8))
            .collect()
    };
    let cw = encode(inst, &info)?;
    let rcv = bec_channel(&cw.transmitted(), p, punctured, &mut rng)?;
    let mut out = decode(inst, &rcv, use_outer)?;
    for (got, want) in out.info.iter_mut().zip(&info) {
        if got.is_some_and(|g| g != *want) {
            *got = None;
        }
    }
    Ok(out)
}

fn simulate_point(cfg: &SimConfig, inst: &CodeInstance, p: f64, index: usize) -> Result<SimPoint> {
    let punctured = puncture_pattern(inst.n(), cfg.alpha, inst.seed())?;
    let tally = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let r = run_trial(
                inst,
                p,
                &punctured,
                cfg.use_outer,
                cfg.all_zero,
                trial_seed(cfg.seed, index, t),
            )?;
            Ok::<_, Error>(Tally {
                word_errors: usize::from(!r.success()),
                bit_errors: r.erased_info(),
                unresolved_bits: r.peel_unresolved_bits,
                rescued: usize::from(r.rescued()),
            })
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    let trials = cfg.trials as f64;
    Ok(SimPoint {
        p,
        bit_rate: tally.bit_errors as f64 / (trials * inst.info_len() as f64),
        word_rate: tally.word_errors as f64 / trials,
        unresolved_mean: tally.unresolved_bits as f64 / (trials * inst.k() as f64),
        outer_rescue_rate: tally.rescued as f64 / trials,
        trials: cfg.trials,
        word_errors: tally.word_errors,
        word_ci: wilson_interval(tally.word_errors, cfg.trials),
        skipped: None,
    })
}

fn sweep(cfg: &SimConfig) -> Result<(Vec<SimPoint>, Option<f64>)> {
    let fixed = match cfg.design_p {
        Some(d) => Some(cfg.build(d)?),
        None => None,
    };
    let mut points = Vec::new();
    for (i, p) in cfg.points().into_iter().enumerate() {
        let point = match &fixed {
            Some(inst) => simulate_point(cfg, inst, p, i)?,
            None => match cfg.build(p) {
                Ok(inst) => simulate_point(cfg, &inst, p, i)?,
                Err(e) => SimPoint::skipped(p, e.to_string()),
            },
        };
        points.push(point);
    }
    Ok((points, fixed.map(|f| f.rate())))
}

/// Runs every point of the sweep. Deterministic for a given config,
/// whatever the worker count.
pub fn run_sweep(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let start = Instant::now();
    let workers = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    let (points, code_rate) = match workers {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start {n} workers: {e}")))?
            .install(|| sweep(cfg))?,
        _ => sweep(cfg)?,
    };
    Ok(SimResult {
        config: cfg.clone(),
        points,
        code_rate,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// One CSV line of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub p: f64,
    pub bit_rate: f64,
    pub word_rate: f64,
    pub unresolved_mean: f64,
    pub outer_rescue_rate: f64,
    pub trials: usize,
}

impl From<&SimPoint> for CsvRow {
    fn from(s: &SimPoint) -> Self {
        CsvRow {
            p: s.p,
            bit_rate: s.bit_rate,
            word_rate: s.word_rate,
            unresolved_mean: s.unresolved_mean,
            outer_rescue_rate: s.outer_rescue_rate,
            trials: s.trials,
        }
    }
}

const CSV_HEADER: [&str; 6] = [
    "p",
    "bit_rate",
    "word_rate",
    "unresolved_mean",
    "outer_rescue_rate",
    "trials",
];

/// Writes the simulated points; skipped points are left out.
pub fn emit_csv(result: &SimResult, path: &Path) -> Result<()> {
    let wrap = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(wrap)?;
    w.write_record(CSV_HEADER).map_err(wrap)?;
    for point in result.points.iter().filter(|p| p.skipped.is_none()) {
        w.serialize(CsvRow::from(point)).map_err(wrap)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let wrap = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    r.deserialize().map(|row| row.map_err(wrap)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(30, 100);
        assert!(lo < 0.3 && 0.3 < hi);
        assert_eq!(wilson_interval(0, 10).0, 0.0);
    }

    #[test]
    fn sweep_points_cover_range() {
        let cfg = SimConfig::new(CatalogEntry::AraSelfMatched, 0.40, 0.44, 0.02, 64);
        let pts = cfg.points();
        assert_eq!(pts.len(), 3);
        assert!((pts[2] - 0.44).abs() < 1e-12);
    }

    #[test]
    fn trial_seeds_differ() {
        assert_ne!(trial_seed(1, 0, 0), trial_seed(1, 0, 1));
        assert_ne!(trial_seed(1, 0, 0), trial_seed(1, 1, 0));
    }
}
