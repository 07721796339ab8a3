//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::codec::{instantiate, Dimensions};
use crate::constructions::{solve_b, CatalogEntry, Region};
use crate::error::{Error, Result};
use crate::nonneg::{
    polya_verify, self_matched_candidate, self_matched_coefficients, self_matched_condition,
    verify_bitreg_ara, verify_checkreg_nsira, ConvexityReport, DEFAULT_GRID,
};
use crate::powerseries::{DegreePair, Family};
use crate::sim::{emit_csv, run_sweep, SimConfig};
use crate::tilting::{
    complexity, design_rate, design_rate_exact, residual_grid, stability, threshold_search,
    truncated_design_rate,
};

#[derive(Debug, Parser)]
#[command(
    name = "arabec",
    version,
    about = "ARA-type ensembles for the binary erasure channel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a degree-distribution pair and print it as JSON.
    Construct(ConstructArgs),
    /// Density-evolution residuals, threshold and design summary.
    De(DeArgs),
    /// Polya-type non-negativity check.
    Verify(VerifyArgs),
    /// Build a finite-length instance and print its descriptor.
    Instantiate(InstantiateArgs),
    /// Monte Carlo sweep over the erasure probability.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Catalog row: ara-sm, nsira-sm, aldpc-sm, ara-br3, ara-cr3,
    /// nsira-br3, nsira-cr3, aldpc-br3, aldpc-cr3.
    #[arg(long)]
    pub family: CatalogEntry,
    /// Design erasure probability.
    #[arg(long)]
    pub p: f64,
    /// Self-matched series parameter, or "auto" for the smallest valid one.
    #[arg(long, default_value = "auto")]
    pub b: String,
    /// Series truncation order.
    #[arg(long = "M", alias = "order", default_value_t = 2000)]
    pub order: usize,
    /// Validity region for the regular rows: proven, numerical or unchecked.
    #[arg(long, default_value = "proven")]
    pub region: Region,
}

impl PairArgs {
    fn b(&self) -> Result<Option<f64>> {
        parse_b(&self.b)
    }

    fn build(&self) -> Result<DegreePair> {
        self.family
            .build(self.p, self.b()?, self.order, self.region)
    }
}

fn parse_b(s: &str) -> Result<Option<f64>> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::InvalidInput(format!("--b expects a number or \"auto\", got {s:?}")))
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Write the JSON here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DeArgs {
    /// Load the pair from a JSON file written by `construct`.
    #[arg(long, conflicts_with_all = ["family", "p"])]
    pub pair: Option<PathBuf>,
    #[arg(long, requires = "p")]
    pub family: Option<CatalogEntry>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value = "auto")]
    pub b: String,
    #[arg(long = "M", alias = "order", default_value_t = 2000)]
    pub order: usize,
    #[arg(long, default_value = "proven")]
    pub region: Region,
    /// Channel erasure probability for the residual grid (default: design p).
    #[arg(long)]
    pub channel_p: Option<f64>,
    /// Number of grid intervals on (0, 1).
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Maximum degree used for the threshold search.
    #[arg(long, default_value_t = 64)]
    pub max_degree: usize,
    /// Write the (x, residual) rows here as CSV.
    #[arg(long)]
    pub grid_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, required_unless_present = "c", requires = "p")]
    pub family: Option<CatalogEntry>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value = "auto")]
    pub b: String,
    /// Test the self-matched candidate `G/(1+cG)` directly.
    #[arg(long, conflicts_with = "family")]
    pub c: Option<f64>,
    /// Points on `[0, π]`.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct InstantiateArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long = "d-l", default_value_t = 64)]
    pub d_l: usize,
    #[arg(long = "d-r", default_value_t = 64)]
    pub d_r: usize,
    #[arg(long = "outer-m", default_value_t = 0)]
    pub outer_m: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub family: CatalogEntry,
    #[arg(long)]
    pub p_start: f64,
    #[arg(long)]
    pub p_stop: f64,
    #[arg(long, default_value_t = 0.01)]
    pub p_step: f64,
    /// Information block length before pilots and outer parity.
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Fraction of transmitted bits kept after random puncturing.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Rows of the outer parity-check code.
    #[arg(long = "outer-m", default_value_t = 0)]
    pub outer_m: usize,
    /// Skip the outer-code stage when decoding.
    #[arg(long)]
    pub no_outer: bool,
    /// Transmit the all-zero codeword.
    #[arg(long)]
    pub all_zero: bool,
    /// Design erasure probability (default: the family's representative p).
    #[arg(long, conflicts_with = "matched")]
    pub design_p: Option<f64>,
    /// Design a fresh code for each channel point.
    #[arg(long)]
    pub matched: bool,
    #[arg(long, default_value = "auto")]
    pub b: String,
    #[arg(long = "M", alias = "order", default_value_t = 2000)]
    pub order: usize,
    #[arg(long, default_value = "proven")]
    pub region: Region,
    #[arg(long = "d-l", default_value_t = 64)]
    pub d_l: usize,
    #[arg(long = "d-r", default_value_t = 64)]
    pub d_r: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// Runs one parsed command, writing reports to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Construct(a) => construct(a, out),
        Command::De(a) => de(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Instantiate(a) => instantiate_cmd(a, out),
        Command::Simulate(a) => simulate(a, out),
    }
}

fn write_to(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    emit(out, &serde_json::to_string_pretty(value)?)
}

fn construct(a: ConstructArgs, out: &mut dyn Write) -> Result<()> {
    let text = a.pair.build()?.to_json()?;
    match a.out {
        Some(path) => write_to(&path, &text),
        None => emit(out, &text),
    }
}

fn de(a: DeArgs, out: &mut dyn Write) -> Result<()> {
    let pair = match (&a.pair, a.family, a.p) {
        (Some(path), _, _) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            DegreePair::from_json(&text)?
        }
        (None, Some(family), Some(p)) => family.build(p, parse_b(&a.b)?, a.order, a.region)?,
        _ => {
            return Err(Error::InvalidInput(
                "give either --pair or --family with --p".into(),
            ))
        }
    };
    if a.grid < 2 {
        return Err(Error::InvalidInput("--grid must be at least 2".into()));
    }
    let family = pair.family;
    let channel = a.channel_p.unwrap_or(pair.p);
    let grid = residual_grid(&pair, family, channel, a.grid);
    let max_residual = grid.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    if let Some(path) = &a.grid_out {
        let mut text = String::from("x,residual\n");
        for (x, r) in &grid {
            text.push_str(&format!("{x},{r}\n"));
        }
        write_to(path, &text)?;
    }
    let stab = stability(&pair, pair.p)?;
    let threshold = threshold_search(&pair, family, a.max_degree);
    let summary = json!({
        "family": family,
        "design_p": pair.p,
        "channel_p": channel,
        "b": pair.b,
        "M": pair.order(),
        "max_abs_residual": max_residual,
        "threshold": threshold,
        "threshold_max_degree": a.max_degree,
        "truncated_design_rate": truncated_design_rate(&pair, a.max_degree)?,
        "capacity_gap": (1.0 - pair.p) - design_rate_exact(&pair)?,
        "stability": stab,
        "design_rate": design_rate(&pair)?,
        "design_rate_exact": design_rate_exact(&pair)?,
        "tail_mass": pair.tail_mass(),
        "complexity": complexity(family, &pair, pair.p)?,
    });
    emit_json(out, &summary)
}

#[derive(Serialize)]
struct CandidateReport {
    side: &'static str,
    c: f64,
    report: ConvexityReport,
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<()> {
    if let Some(c) = a.c {
        let report = polya_verify(&self_matched_candidate(c)?, a.grid)?;
        return emit_json(out, &json!({ "c": c, "report": report }));
    }
    let (Some(entry), Some(p)) = (a.family, a.p) else {
        return Err(Error::InvalidInput("--family and --p are required".into()));
    };
    let mut b = parse_b(&a.b)?;
    let mut candidates = Vec::new();
    let mut condition = None;
    match entry {
        CatalogEntry::AraSelfMatched
        | CatalogEntry::NsiraSelfMatched
        | CatalogEntry::AldpcSelfMatched => {
            let bv = match b {
                Some(v) => v,
                None => solve_b(p)?,
            };
            b = Some(bv);
            let (c1, c2) = self_matched_coefficients(p, bv);
            let family = entry.family();
            if family != Family::Nsira {
                candidates.push(("bit", c1));
            }
            if family != Family::Aldpc {
                candidates.push(("check", c2));
            }
            condition = Some(self_matched_condition(p, bv, family));
        }
        _ => {}
    }
    let mut reports: Vec<CandidateReport> = Vec::new();
    for (side, c) in candidates {
        reports.push(CandidateReport {
            side,
            c,
            report: polya_verify(&self_matched_candidate(c)?, a.grid)?,
        });
    }
    let direct = match entry {
        CatalogEntry::NsiraCheckRegular => Some(("bit-edge", verify_checkreg_nsira(p)?)),
        CatalogEntry::AraBitRegular => Some(("check-edge", verify_bitreg_ara(p)?)),
        _ => None,
    };
    // Direct check on the series themselves, built without a region guard.
    let pair = entry.build(p, b, 200, Region::Unchecked)?;
    let min200 = |s: &crate::powerseries::PowerSeries| {
        s.coeffs()
            .iter()
            .take(200)
            .copied()
            .fold(f64::INFINITY, f64::min)
    };
    let passed =
        reports.iter().all(|r| r.report.passed()) && direct.as_ref().is_none_or(|d| d.1.passed());
    let summary = json!({
        "family": entry,
        "p": p,
        "b": b,
        "condition": condition,
        "candidates": reports,
        "direct": direct.map(|(what, report)| json!({ "function": what, "report": report })),
        "coefficient_min_200": {
            "bit_node": min200(pair.bit.node()),
            "check_node": min200(pair.check.node()),
            "bit_edge": min200(pair.bit.edge()),
            "check_edge": min200(pair.check.edge()),
        },
        "passed": passed,
    });
    emit_json(out, &summary)
}

fn instantiate_cmd(a: InstantiateArgs, out: &mut dyn Write) -> Result<()> {
    let pair = a.pair.build()?;
    let inst = instantiate(&pair, Dimensions::new(a.k, a.d_l, a.d_r, a.outer_m), a.seed)?;
    let text = inst.to_json()?;
    match a.out {
        Some(path) => write_to(&path, &text),
        None => emit(out, &text),
    }
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg = SimConfig::new(a.family, a.p_start, a.p_stop, a.p_step, a.k);
    cfg.design_p = if a.matched {
        None
    } else {
        Some(a.design_p.unwrap_or(a.family.representative_p()))
    };
    cfg.b = parse_b(&a.b)?;
    cfg.order = a.order;
    cfg.region = a.region;
    cfg.d_l = a.d_l;
    cfg.d_r = a.d_r;
    cfg.m_outer = a.outer_m;
    cfg.use_outer = !a.no_outer;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.alpha = a.alpha;
    cfg.all_zero = a.all_zero;
    let result = run_sweep(&cfg)?;
    emit_csv(&result, &a.out)?;
    let skipped: Vec<_> = result
        .points
        .iter()
        .filter_map(|p| {
            p.skipped
                .as_ref()
                .map(|why| json!({ "p": p.p, "reason": why }))
        })
        .collect();
    emit_json(
        out,
        &json!({
            "out": a.out,
            "points": result.points.len() - skipped.len(),
            "skipped": skipped,
            "code_rate": result.code_rate,
            "wall_time_s": result.wall_time_s,
        }),
    )
}
