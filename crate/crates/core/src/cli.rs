//! Experiment runner behind the `superpilot` binary: parameter sweeps,
//! optimiser reports, the Monte Carlo validation suite and pilot dumps.
//!
//! Output is plot-ready CSV or JSON. CSV files start with the fully resolved
//! run configuration as JSON, one `#`-prefixed comment line per line of JSON,
//! followed by a header row with a fixed column order (see [`CSV_COLUMNS`]).
//! Floats are written with 17 significant digits.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::{optimal_alpha, optimal_lp, optimal_sp, LpCandidate, DEFAULT_ALPHA_TOL};
use crate::analysis::{error_variance_rp, error_variance_sp, sigma_v2_rp, sigma_v2_sp, trace_terms_sp};
use crate::config::{db_to_power, Scheme, SystemConfig};
use crate::error::{Error, Result};
use crate::milb::{milb_rp, milb_sp, EigDensity, MilbPoint};
use crate::simulator::{mc_error_variance, mc_milb, mc_milb_point, mc_sigma_v2, mc_trace_terms, MilbMode, TrialStats};

pub const CSV_COLUMNS: [&str; 13] = [
    "scheme",
    "K",
    "L",
    "N",
    "P_db",
    "alpha_or_Lp",
    "rho",
    "milb_nats",
    "milb_bits",
    "method",
    "stderr",
    "trials",
    "seed",
];

pub const DEFAULT_COHERENCE: usize = 30;
pub const DEFAULT_ANTENNAS: usize = 60;
pub const DEFAULT_SIGMA2: f64 = 1.0;
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeSelection {
    Sp,
    Rp,
    Both,
}

impl SchemeSelection {
    fn includes_sp(self) -> bool {
        matches!(self, SchemeSelection::Sp | SchemeSelection::Both)
    }

    fn includes_rp(self) -> bool {
        matches!(self, SchemeSelection::Rp | SchemeSelection::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    PowerDb,
    Users,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Allocation {
    /// re-solve α* / lp* at every point
    Optimal,
    Fixed { alpha: Option<f64>, lp: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    PerBlock,
    PerChannelUse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Inclusive `start:stop:step` range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl AxisRange {
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parameter(format!("bad number '{s}' in range '{text}'")))
        };
        match parts.as_slice() {
            [a] => {
                let v = num(a)?;
                Ok(AxisRange { start: v, stop: v, step: 1.0 })
            }
            [a, b] => Ok(AxisRange { start: num(a)?, stop: num(b)?, step: 1.0 }),
            [a, b, c] => Ok(AxisRange { start: num(a)?, stop: num(b)?, step: num(c)? }),
            _ => Err(Error::Parameter(format!("range '{text}' is not start:stop[:step]"))),
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Parameter(format!("range step must be > 0 (got {:?})", self)));
        }
        if self.stop < self.start {
            return Err(Error::Parameter(format!("empty range {}..{}", self.start, self.stop)));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| self.start + i as f64 * self.step).collect())
    }
}

/// A full sweep description; the axis varies `P_db` or `K` while `fixed`
/// lists the other of the two (one curve per entry).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub scheme: SchemeSelection,
    pub axis: Axis,
    pub range: AxisRange,
    pub fixed: Vec<f64>,
    pub coherence: usize,
    pub antennas: usize,
    pub sigma2: f64,
    pub allocation: Allocation,
    pub normalization: Normalization,
    /// Monte Carlo trials per point; 0 emits closed-form rows only
    pub trials: u64,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

/// One `(K, P_db)` grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
struct GridPoint {
    users: usize,
    p_db: f64,
}

impl SweepSpec {
    fn grid(&self) -> Result<Vec<GridPoint>> {
        let axis = self.range.values()?;
        if self.fixed.is_empty() {
            return Err(Error::Parameter(match self.axis {
                Axis::PowerDb => "power sweep needs at least one --k value".into(),
                Axis::Users => "user sweep needs at least one --p-db value".into(),
            }));
        }
        let as_users = |v: f64| -> Result<usize> {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Parameter(format!("user count {v} is not a positive integer")))
            }
        };
        let mut points = Vec::new();
        for &f in &self.fixed {
            for &a in &axis {
                points.push(match self.axis {
                    Axis::PowerDb => GridPoint { users: as_users(f)?, p_db: a },
                    Axis::Users => GridPoint { users: as_users(a)?, p_db: f },
                });
            }
        }
        Ok(points)
    }

    /// Checks every grid point up front and lists all rejected ones.
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::Parameter(format!("sigma2={} must be > 0", self.sigma2)));
        }
        if let Allocation::Fixed { alpha, lp } = self.allocation {
            if self.scheme.includes_sp() && alpha.is_none() {
                return Err(Error::Parameter("fixed allocation for SP needs --alpha".into()));
            }
            if self.scheme.includes_rp() && lp.is_none() {
                return Err(Error::Parameter("fixed allocation for RP needs --lp".into()));
            }
        }
        let mut rejected = Vec::new();
        for g in self.grid()? {
            for scheme in self.schemes() {
                let power = db_to_power(g.p_db, self.sigma2);
                if let Err(e) = SystemConfig::new(g.users, self.coherence, self.antennas, power, self.sigma2, scheme) {
                    rejected.push(format!("K={} P_db={} {}: {e}", g.users, g.p_db, scheme.tag()));
                }
            }
        }
        if rejected.is_empty() {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "{} sweep point(s) rejected:\n  {}",
                rejected.len(),
                rejected.join("\n  ")
            )))
        }
    }

    /// Representative scheme per selected family, for validation.
    fn schemes(&self) -> Vec<Scheme> {
        let (alpha, lp) = match self.allocation {
            Allocation::Optimal => (0.5, 1),
            Allocation::Fixed { alpha, lp } => (alpha.unwrap_or(0.5), lp.unwrap_or(1)),
        };
        let mut out = Vec::new();
        if self.scheme.includes_sp() {
            out.push(Scheme::Sp { alpha });
        }
        if self.scheme.includes_rp() {
            out.push(Scheme::Rp { lp });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p_db: f64,
    #[serde(flatten)]
    pub point: MilbPoint,
}

fn evaluate_point(spec: &SweepSpec, g: GridPoint) -> Result<Vec<SweepRow>> {
    let power = db_to_power(g.p_db, spec.sigma2);
    let (l, n, s2) = (spec.coherence, spec.antennas, spec.sigma2);
    let mut points = Vec::new();
    if spec.scheme.includes_sp() {
        points.push(match spec.allocation {
            Allocation::Optimal => optimal_sp(power, g.users, l, n, s2)?.1,
            Allocation::Fixed { alpha, .. } => {
                let alpha = alpha.expect("validated");
                milb_sp(&SystemConfig::sp(g.users, l, n, power, s2, alpha)?)?
            }
        });
    }
    if spec.scheme.includes_rp() {
        points.push(match spec.allocation {
            Allocation::Optimal => optimal_lp(power, g.users, l, n, s2)?.milb,
            Allocation::Fixed { lp, .. } => milb_rp(&SystemConfig::rp(g.users, l, n, power, s2, lp.expect("validated"))?)?,
        });
    }
    let mut rows = Vec::new();
    for p in points {
        rows.push(p);
        if spec.trials > 0 {
            rows.push(mc_milb_point(&p.config, spec.trials, spec.seed, MilbMode::GaussianEquivalent)?);
        }
    }
    Ok(rows
        .into_iter()
        .map(|p| {
            let point = match spec.normalization {
                Normalization::PerBlock => p,
                Normalization::PerChannelUse => p.per_channel_use(),
            };
            SweepRow { p_db: g.p_db, point }
        })
        .collect())
}

/// Evaluates every grid point; rows come back in grid order whatever the
/// completion order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let grid = spec.grid()?;
    let chunks: Vec<Vec<SweepRow>> = grid
        .par_iter()
        .map(|&g| evaluate_point(spec, g))
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_row(row: &SweepRow) -> String {
    let p = &row.point;
    let c = &p.config;
    let alloc = match c.scheme {
        Scheme::Sp { alpha } => fmt_f64(alpha),
        Scheme::Rp { lp } => lp.to_string(),
    };
    [
        p.scheme.to_string(),
        c.users.to_string(),
        c.coherence.to_string(),
        c.antennas.to_string(),
        fmt_f64(row.p_db),
        alloc,
        fmt_f64(p.rho),
        fmt_f64(p.milb_nats),
        fmt_f64(p.milb_bits),
        p.method.as_str().to_string(),
        fmt_f64(p.stderr),
        p.trials.to_string(),
        p.seed.map(|s| s.to_string()).unwrap_or_default(),
    ]
    .join(",")
}

/// JSON `value` as `#`-prefixed comment lines.
pub fn comment_header<T: Serialize>(value: &T) -> Result<String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    Ok(text.lines().map(|l| format!("# {l}\n")).collect())
}

pub fn write_sweep<W: Write>(spec: &SweepSpec, rows: &[SweepRow], mut out: W) -> Result<()> {
    match spec.format {
        OutputFormat::Csv => {
            out.write_all(comment_header(spec)?.as_bytes())?;
            writeln!(out, "{}", CSV_COLUMNS.join(","))?;
            for r in rows {
                writeln!(out, "{}", csv_row(r))?;
            }
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                config: &'a SweepSpec,
                rows: &'a [SweepRow],
            }
            serde_json::to_writer_pretty(&mut out, &Doc { config: spec, rows }).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaReport {
    pub p_db: f64,
    pub power: f64,
    pub users: usize,
    pub coherence: usize,
    pub antennas: usize,
    pub sigma2: f64,
    pub alpha: f64,
    pub g_residual: f64,
    /// `max(|c0|, |c4|)`, the scale the residual is judged against
    pub g_scale: f64,
    pub rho: f64,
    pub gamma: f64,
    pub milb_nats: f64,
    pub milb_bits: f64,
    /// `[c4, c3, c2, c1, c0]`
    pub coefficients: [f64; 5],
    pub roots: Vec<f64>,
}

pub fn run_optimal_alpha(p_db: f64, users: usize, coherence: usize, antennas: usize, sigma2: f64) -> Result<AlphaReport> {
    let power = db_to_power(p_db, sigma2);
    let opt = optimal_alpha(power, users, coherence, sigma2, DEFAULT_ALPHA_TOL)?;
    let point = milb_sp(&SystemConfig::sp(users, coherence, antennas, power, sigma2, opt.alpha)?)?;
    Ok(AlphaReport {
        p_db,
        power,
        users,
        coherence,
        antennas,
        sigma2,
        alpha: opt.alpha,
        g_residual: opt.g_residual,
        g_scale: opt.quartic.scale(),
        rho: opt.rho,
        gamma: opt.gamma,
        milb_nats: point.milb_nats,
        milb_bits: point.milb_bits,
        coefficients: opt.quartic.coefficients(),
        roots: opt.roots,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpReport {
    pub p_db: f64,
    pub power: f64,
    pub lp: usize,
    pub milb: MilbPoint,
    pub table: Vec<LpCandidate>,
}

pub fn run_optimal_lp(p_db: f64, users: usize, coherence: usize, antennas: usize, sigma2: f64) -> Result<LpReport> {
    let power = db_to_power(p_db, sigma2);
    let opt = optimal_lp(power, users, coherence, antennas, sigma2)?;
    Ok(LpReport {
        p_db,
        power,
        lp: opt.lp,
        milb: opt.milb,
        table: opt.table,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Variances,
    Traces,
    Milb,
    Density,
}

/// One check: `|observed - expected| <= band`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub band: f64,
    pub stderr: Option<f64>,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, observed: f64, expected: f64, band: f64, stderr: Option<f64>) -> Self {
        Check {
            name: name.into(),
            observed,
            expected,
            band,
            stderr,
            pass: (observed - expected).abs() <= band,
        }
    }

    fn three_sigma(name: impl Into<String>, s: &TrialStats, expected: f64) -> Self {
        Check::new(name, s.mean, expected, 3.0 * s.stderr, Some(s.stderr))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub suite: Suite,
    pub trials: u64,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// The reference scenario of the validation suite.
pub fn reference_sp() -> SystemConfig {
    SystemConfig::sp(40, 30, 60, 1.0, 1.0, 0.5).expect("valid reference")
}

pub fn reference_rp() -> SystemConfig {
    SystemConfig::rp(40, 30, 60, 1.0, 1.0, 10).expect("valid reference")
}

fn density_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (n, l) in [(60, 30), (60, 29), (60, 1), (31, 30)] {
        let d = EigDensity::new(n, l)?;
        out.push(Check::new(format!("density_mass_N{n}_L{l}"), d.normalization()?, 1.0, 1e-8, None));
        out.push(Check::new(format!("density_mean_N{n}_L{l}"), d.mean()?, n as f64, 1e-6 * n as f64, None));
    }
    Ok(out)
}

fn variance_checks(trials: u64, seed: u64) -> Result<Vec<Check>> {
    let sp = reference_sp();
    let rp = reference_rp();
    let (p, k, l, s2) = (sp.power, sp.users, sp.coherence, sp.sigma2);
    let alpha = sp.scheme.parameter();
    let lp = rp.pilot_len();
    Ok(vec![
        Check::three_sigma("error_variance_sp", &mc_error_variance(&sp, trials, seed)?, error_variance_sp(alpha, p, k, l, s2)),
        Check::three_sigma("error_variance_rp", &mc_error_variance(&rp, trials, seed)?, error_variance_rp(p, k, lp, s2)),
        Check::three_sigma("sigma_v2_sp", &mc_sigma_v2(&sp, trials, seed)?, sigma_v2_sp(alpha, p, k, l, s2)),
        Check::three_sigma("sigma_v2_rp", &mc_sigma_v2(&rp, trials, seed)?, sigma_v2_rp(p, k, lp, s2)),
    ])
}

fn trace_checks(trials: u64, seed: u64) -> Result<Vec<Check>> {
    let sp = reference_sp();
    let cf = trace_terms_sp(sp.scheme.parameter(), sp.power, sp.users, sp.coherence, sp.antennas, sp.sigma2);
    let expected = [cf.tr_r1, cf.tr_r2, cf.tr_r3, cf.tr_r4, cf.tr_r5, cf.tr_r6];
    Ok(mc_trace_terms(&sp, trials, seed)?
        .iter()
        .zip(expected)
        .map(|(s, e)| Check::three_sigma(s.quantity.clone(), s, e))
        .collect())
}

fn milb_checks(trials: u64, seed: u64) -> Result<Vec<Check>> {
    let (k, l, n, s2) = (40, 30, 60, 1.0);
    let power = db_to_power(20.0, s2);
    let (_, sp) = optimal_sp(power, k, l, n, s2)?;
    let rp = optimal_lp(power, k, l, n, s2)?.milb;
    let mut out = Vec::new();
    let mut gauss_sp = None;
    for (name, cf) in [("milb_sp_opt", sp), ("milb_rp_opt", rp)] {
        let mc = mc_milb(&cf.config, trials, seed, MilbMode::GaussianEquivalent)?;
        let band = (0.01 * cf.milb_nats).max(3.0 * mc.stderr);
        out.push(Check::new(name, mc.mean, cf.milb_nats, band, Some(mc.stderr)));
        if gauss_sp.is_none() {
            gauss_sp = Some(mc);
        }
    }
    let g = gauss_sp.expect("sp evaluated first");
    let f = mc_milb(&sp.config, trials, seed, MilbMode::FullLinklevel)?;
    let se = (g.stderr * g.stderr + f.stderr * f.stderr).sqrt();
    out.push(Check::new("milb_sp_linklevel_vs_gaussian", f.mean, g.mean, 3.0 * se, Some(se)));
    Ok(out)
}

pub fn run_validate(suite: Suite, trials: u64, seed: u64) -> Result<ValidationReport> {
    let mut checks = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Density {
        checks.extend(density_checks()?);
    }
    if all || suite == Suite::Variances {
        checks.extend(variance_checks(trials, seed)?);
    }
    if all || suite == Suite::Traces {
        checks.extend(trace_checks(trials, seed)?);
    }
    if all || suite == Suite::Milb {
        checks.extend(milb_checks(trials, seed)?);
    }
    let passed = checks.iter().all(|c| c.pass);
    Ok(ValidationReport {
        suite,
        trials,
        seed,
        checks,
        passed,
    })
}

/// Optional settings shared by the subcommands. A JSON config file and the
/// command line both produce one of these; flags win over the file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Overrides {
    pub scheme: Option<SchemeSelection>,
    pub axis: Option<Axis>,
    pub k: Option<Vec<usize>>,
    pub k_range: Option<String>,
    pub l: Option<usize>,
    pub n: Option<usize>,
    pub sigma2: Option<f64>,
    pub p_db: Option<Vec<f64>>,
    pub p_db_range: Option<String>,
    pub alpha: Option<f64>,
    pub lp: Option<usize>,
    pub optimal: Option<bool>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub per_channel_use: Option<bool>,
}

macro_rules! take_over {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl Overrides {
    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parameter(format!("config file {}: {e}", path.display())))
    }

    /// `self` overridden by every field set in `top`.
    pub fn merged(mut self, top: Overrides) -> Self {
        take_over!(self, top; scheme, axis, k, k_range, l, n, sigma2, p_db, p_db_range, alpha, lp,
            optimal, trials, seed, out, format, per_channel_use);
        self
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let axis = self.axis.unwrap_or(Axis::PowerDb);
        let (range, fixed) = match axis {
            Axis::PowerDb => {
                let range = AxisRange::parse(self.p_db_range.as_deref().unwrap_or("0:40:2"))?;
                let fixed = self.k.clone().unwrap_or_else(|| vec![40]).into_iter().map(|k| k as f64).collect();
                (range, fixed)
            }
            Axis::Users => {
                let range = AxisRange::parse(self.k_range.as_deref().unwrap_or("31:60:1"))?;
                let fixed = self.p_db.clone().unwrap_or_else(|| vec![0.0, 20.0]);
                (range, fixed)
            }
        };
        let optimal = self.optimal.unwrap_or(false) || (self.alpha.is_none() && self.lp.is_none());
        let allocation = if optimal {
            Allocation::Optimal
        } else {
            Allocation::Fixed { alpha: self.alpha, lp: self.lp }
        };
        Ok(SweepSpec {
            scheme: self.scheme.unwrap_or(SchemeSelection::Both),
            axis,
            range,
            fixed,
            coherence: self.l.unwrap_or(DEFAULT_COHERENCE),
            antennas: self.n.unwrap_or(DEFAULT_ANTENNAS),
            sigma2: self.sigma2.unwrap_or(DEFAULT_SIGMA2),
            allocation,
            normalization: if self.per_channel_use.unwrap_or(false) {
                Normalization::PerChannelUse
            } else {
                Normalization::PerBlock
            },
            trials: self.trials.unwrap_or(0),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            format: self.format.unwrap_or(OutputFormat::Csv),
            out: self.out.clone(),
        })
    }

    /// Single-point scalars `(P_db, K, L, N, sigma2)` for the optimiser reports.
    pub fn point(&self) -> Result<(f64, usize, usize, usize, f64)> {
        let single = |what: &str, n: usize| -> Result<()> {
            if n == 1 {
                Ok(())
            } else {
                Err(Error::Parameter(format!("expected exactly one {what} value, got {n}")))
            }
        };
        let p = self.p_db.clone().unwrap_or_else(|| vec![20.0]);
        single("--p-db", p.len())?;
        let k = self.k.clone().unwrap_or_else(|| vec![40]);
        single("--k", k.len())?;
        Ok((
            p[0],
            k[0],
            self.l.unwrap_or(DEFAULT_COHERENCE),
            self.n.unwrap_or(DEFAULT_ANTENNAS),
            self.sigma2.unwrap_or(DEFAULT_SIGMA2),
        ))
    }
}
