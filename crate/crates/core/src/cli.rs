//! Command-line front end. Every subcommand produces an [`Artifact`]: a
//! JSON document with per-check status, or a CSV table of its grid.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or a
//! computation errors, 2 for usage errors (bad flags, bad environment
//! overrides).
//!
//! Tolerance overrides read from the environment:
//!
//! | variable | default | used by |
//! |---|---|---|
//! | `TRICYCLE_QUAD_TOL` | `1e-12` | quadrature |
//! | `TRICYCLE_PF_TOL` | `1e-6` | `pf-check`, `integrals` |
//! | `TRICYCLE_ROOT_XTOL` | `1e-13` | zero refinement |
//! | `TRICYCLE_SIMPLE_TOL` | `1e-6` | simple-zero test |
//! | `TRICYCLE_TANGENT_TOL` | `1e-6` | near-tangency test |
//! | `TRICYCLE_ODE_RTOL` | `1e-12` | `simulate` |

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::acceptance::{self, AcceptanceConfig, SCHEMA_VERSION};
use crate::cyclicity::{
    count_zeros, ect_window, f_eval, find_three_zeros, scan, Greek, JContext, PerturbationParams, ScanSpec,
    ZeroOptions,
};
use crate::error::Error;
use crate::geometry::{oval_extent, EnergyLevel};
use crate::picard_fuchs::{pf_residual, FrameCache, I0P_CENTER};
use crate::polyalg::identity_catalogue;
use crate::quadrature::{frame, QuadOptions};
use crate::ratio::{envelope_check, ratio_point, w_riccati};
use crate::simulate::{count_cycles, eps_from_mu, CycleOptions, EpsVector, SimOptions};

#[derive(Debug, Parser)]
#[command(name = "tricycle", version, about = "Verification toolkit for quadratic perturbations of the Hamiltonian triangle")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write `<command>.<format>` here instead of printing to stdout.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Levels {
    /// Comma-separated energy levels in (-4, 0).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub h: Vec<f64>,
    /// Uniform interior grid of this many levels when `--h` is absent.
    #[arg(long, default_value_t = 9)]
    pub n: usize,
}

impl Levels {
    fn resolve(&self) -> Vec<f64> {
        if self.h.is_empty() {
            uniform(self.n)
        } else {
            self.h.clone()
        }
    }
}

fn uniform(n: usize) -> Vec<f64> {
    (1..=n).map(|k| -4.0 + 4.0 * k as f64 / (n + 1) as f64).collect()
}

#[derive(Debug, Clone, Args)]
pub struct Params {
    /// lambda,sigma,gamma,kappa
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub greek: Option<Vec<f64>>,
    /// mu1,mu2,mu3,mu4
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu: Option<Vec<f64>>,
    /// eps0,...,eps4
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eps: Option<Vec<f64>>,
}

impl Params {
    fn resolve(&self) -> Result<PerturbationParams, CliError> {
        match (&self.greek, &self.mu, &self.eps) {
            (Some(g), None, None) => Ok(PerturbationParams::from_greek(Greek::from_array(arr(g, "--greek")?))),
            (None, Some(m), None) => Ok(PerturbationParams::from_mu(arr(m, "--mu")?)),
            (None, None, Some(e)) => Ok(PerturbationParams::from_eps(arr(e, "--eps")?)),
            _ => Err(CliError::Usage("give exactly one of --greek, --mu, --eps".into())),
        }
    }
}

fn arr<const N: usize>(v: &[f64], flag: &str) -> Result<[f64; N], CliError> {
    v.try_into()
        .map_err(|_| CliError::Usage(format!("{flag} takes {N} comma-separated values, got {}", v.len())))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Oval extent x1 < x2 < x3 on the x-axis.
    Oval(Levels),
    /// Abelian integrals (I*, I2, I0) and their derivatives.
    Integrals {
        #[command(flatten)]
        levels: Levels,
        /// Evaluate through the Picard-Fuchs flow instead of quadrature.
        #[arg(long)]
        flow: bool,
    },
    /// Picard-Fuchs residual of quadrature frames and flow agreement.
    PfCheck {
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
    /// Ratio w = I2'/I0': derivative signs and envelope.
    RatioCheck {
        #[arg(long, default_value_t = 500)]
        n: usize,
    },
    /// Exact resultant, factorization and Sturm identities.
    PolyVerify,
    /// J(h), J'(h) and f(h) for one parameter point.
    JEval {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        levels: Levels,
    },
    /// Zeros of J in (-4, 0).
    CountZeros {
        #[command(flatten)]
        params: Params,
    },
    /// Determinants Delta_1..Delta_4 on a log grid from the center.
    Ect {
        #[arg(long, default_value_t = 400)]
        n: usize,
        #[arg(long, default_value_t = 2e-3)]
        start: f64,
    },
    /// Parameters with three prescribed simple zeros.
    FindThree {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-3.98,-3.95,-3.9")]
        targets: Vec<f64>,
    },
    /// Seeded random scan of zero counts by stratum.
    Scan {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 20240917)]
        seed: u64,
        /// Include every sample in the JSON output.
        #[arg(long)]
        full: bool,
    },
    /// Limit cycles of the perturbed system from the Poincaré map.
    Simulate {
        #[command(flatten)]
        params: Params,
        /// Build the direction with zeros at these levels.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        targets: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3")]
        delta: Vec<f64>,
        #[arg(long, default_value_t = 55)]
        n: usize,
    },
    /// Run every acceptance criterion.
    Acceptance {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Consolidate JSON artifacts from earlier runs.
    Report {
        /// Artifact files.
        files: Vec<PathBuf>,
        /// Read every `.json` file in this directory.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Oval(_) => "oval",
            Command::Integrals { .. } => "integrals",
            Command::PfCheck { .. } => "pf-check",
            Command::RatioCheck { .. } => "ratio-check",
            Command::PolyVerify => "poly-verify",
            Command::JEval { .. } => "j-eval",
            Command::CountZeros { .. } => "count-zeros",
            Command::Ect { .. } => "ect",
            Command::FindThree { .. } => "find-three",
            Command::Scan { .. } => "scan",
            Command::Simulate { .. } => "simulate",
            Command::Acceptance { .. } => "acceptance",
            Command::Report { .. } => "report",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(Error::Io(e))
    }
}

/// Tolerances and other knobs shared by all subcommands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub quad_tol: f64,
    pub pf_tol: f64,
    pub root_xtol: f64,
    pub simple_tol: f64,
    pub tangent_tol: f64,
    pub ode_rtol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            quad_tol: 1e-12,
            pf_tol: 1e-6,
            root_xtol: 1e-13,
            simple_tol: 1e-6,
            tangent_tol: 1e-6,
            ode_rtol: 1e-12,
        }
    }
}

impl RunConfig {
    pub fn from_env() -> Result<Self, CliError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self, CliError> {
        let mut c = Self::default();
        let fields: [(&str, &mut f64); 6] = [
            ("TRICYCLE_QUAD_TOL", &mut c.quad_tol),
            ("TRICYCLE_PF_TOL", &mut c.pf_tol),
            ("TRICYCLE_ROOT_XTOL", &mut c.root_xtol),
            ("TRICYCLE_SIMPLE_TOL", &mut c.simple_tol),
            ("TRICYCLE_TANGENT_TOL", &mut c.tangent_tol),
            ("TRICYCLE_ODE_RTOL", &mut c.ode_rtol),
        ];
        for (key, slot) in fields {
            if let Some(raw) = get(key) {
                let v: f64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("{key}={raw} is not a number")))?;
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Usage(format!("{key}={raw} must be positive")));
                }
                *slot = v;
            }
        }
        Ok(c)
    }

    fn quad(&self) -> QuadOptions {
        QuadOptions::with_tol(self.quad_tol)
    }

    fn zero(&self) -> ZeroOptions {
        ZeroOptions {
            xtol: self.root_xtol,
            simple_tol: self.simple_tol,
            tangent_tol: self.tangent_tol,
            ..ZeroOptions::default()
        }
    }

    fn context(&self) -> Result<&'static JContext, CliError> {
        Ok(JContext::shared()?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub passed: bool,
    pub value: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

fn check(name: &str, anchor: &str, passed: bool, value: Value, tolerance: Option<f64>) -> Check {
    Check {
        name: name.into(),
        anchor: anchor.into(),
        passed,
        value,
        tolerance,
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push_f(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|x| sci(*x)).collect());
    }
}

/// Full-precision scientific notation (shortest round-trip form).
pub fn sci(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Artifact {
    pub schema_version: String,
    pub command: String,
    pub anchor: String,
    pub config: Value,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub data: Value,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl Artifact {
    fn new(command: &str, anchor: &str, config: Value, checks: Vec<Check>, data: Value, table: Option<Table>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            anchor: anchor.into(),
            config,
            passed: checks.iter().all(|c| c.passed),
            checks,
            data,
            table,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self).map_err(Error::from)? + "\n")
    }

    /// The grid table, or the check list when the command has no grid.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.table {
            Some(t) => {
                w.write_record(&t.header)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
            }
            None => {
                w.write_record(["name", "passed", "anchor", "value"])?;
                for c in &self.checks {
                    w.write_record([c.name.as_str(), &c.passed.to_string(), &c.anchor, &c.value.to_string()])?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn level(h: f64) -> Result<EnergyLevel, CliError> {
    EnergyLevel::new(h).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Artifact, CliError> {
    let config = serde_json::to_value(cfg).map_err(Error::from)?;
    let name = cmd.name();
    match cmd {
        Command::Oval(levels) => {
            let mut t = Table::new(&["h", "x1", "x2", "x3", "width", "gap"]);
            let mut rows = Vec::new();
            let mut ordered = true;
            for h in levels.resolve() {
                let e = oval_extent(level(h)?);
                ordered &= e.x1 < e.x2 && e.x2 < e.x3() && e.width() > 0.0 && e.gap() > 0.0;
                t.push_f(&[h, e.x1, e.x2, e.x3(), e.width(), e.gap()]);
                rows.push(json!({ "h": h, "x1": e.x1, "x2": e.x2, "x3": e.x3(), "width": e.width(), "gap": e.gap() }));
            }
            let checks = vec![check("roots_ordered", "oval extent", ordered, json!(ordered), None)];
            Ok(Artifact::new(name, "oval extent", config, checks, json!(rows), Some(t)))
        }
        Command::Integrals { levels, flow } => {
            let cache = if *flow { Some(FrameCache::build(Default::default())?) } else { None };
            let mut t = Table::new(&["h", "i_star", "i2", "i0", "di_star", "di2", "di0", "pf_residual"]);
            let mut frames = Vec::new();
            let mut worst: f64 = 0.0;
            for h in levels.resolve() {
                let f = match &cache {
                    Some(c) => c.frame(level(h)?)?,
                    None => frame(level(h)?, cfg.quad())?,
                };
                let r = pf_residual(&f);
                worst = worst.max(r);
                t.push_f(&[h, f.i_star, f.i2, f.i0, f.di_star, f.di2, f.di0, r]);
                frames.push(f);
            }
            let checks = vec![check("pf_residual", "Picard-Fuchs system", worst <= cfg.pf_tol, json!(worst), Some(cfg.pf_tol))];
            Ok(Artifact::new(name, "Abelian integrals", config, checks, json!(frames), Some(t)))
        }
        Command::PfCheck { n } => {
            let cache = FrameCache::build(Default::default())?;
            let mut t = Table::new(&["h", "residual", "flow_gap"]);
            let (mut res, mut gap) = (0.0f64, 0.0f64);
            for h in uniform(*n) {
                let q = frame(level(h)?, cfg.quad())?;
                let r = pf_residual(&q);
                let fl = cache.frame(level(h)?)?;
                let g = if (-3.9..=-0.1).contains(&h) {
                    fl.values().iter().zip(q.values()).map(|(a, b)| (a - b).abs() / b.abs().max(1.0)).fold(0.0, f64::max)
                } else {
                    0.0
                };
                res = res.max(r);
                gap = gap.max(g);
                t.push_f(&[h, r, g]);
            }
            let checks = vec![
                check("residual", "Picard-Fuchs system", res <= cfg.pf_tol, json!(res), Some(cfg.pf_tol)),
                check("flow_vs_quadrature", "Picard-Fuchs flow", gap <= cfg.pf_tol, json!(gap), Some(cfg.pf_tol)),
            ];
            Ok(Artifact::new(name, "Picard-Fuchs system", config, checks, json!({ "n": n }), Some(t)))
        }
        Command::RatioCheck { n } => {
            let mut t = Table::new(&["h", "w", "w1", "w2", "w3", "tangent_margin", "chord_margin"]);
            let (mut pos, mut env) = (true, true);
            for h in uniform(*n) {
                let p = ratio_point(level(h)?)?;
                let e = envelope_check(h, p.w)?;
                pos &= p.w1 > 0.0 && p.w2 > 0.0 && p.w3 > 0.0;
                env &= e.tangent_margin > 0.0 && e.chord_margin > 0.0;
                t.push_f(&[h, p.w, p.w1, p.w2, p.w3, e.tangent_margin, e.chord_margin]);
            }
            let center = w_riccati(level(-4.0 + 1e-6)?)? - 1.0;
            let checks = vec![
                check("derivatives_positive", "ratio derivatives", pos, json!(pos), None),
                check("envelope", "ratio envelope", env, json!(env), None),
                check("center_limit", "ratio at the center", (0.0..=2e-7).contains(&center), json!(center), Some(2e-7)),
            ];
            Ok(Artifact::new(name, "ratio w = I2'/I0'", config, checks, json!({ "n": n }), Some(t)))
        }
        Command::PolyVerify => {
            let cat = identity_catalogue();
            let checks = cat
                .iter()
                .map(|c| {
                    let v = match &c.residual {
                        None => json!("exact-match"),
                        Some(r) => json!(r),
                    };
                    check(&c.name, &c.statement, c.holds, v, None)
                })
                .collect();
            Ok(Artifact::new(name, "exact identities", config, checks, json!(cat), None))
        }
        Command::JEval { params, levels } => {
            let p = params.resolve()?;
            let ctx = cfg.context()?;
            let mut t = Table::new(&["h", "j", "j_prime", "f"]);
            let mut rows = Vec::new();
            for h in levels.resolve() {
                level(h)?;
                let j = ctx.j(h, &p.greek)?;
                let jp = ctx.j_prime(h, &p.greek)?;
                let f = f_eval(h, &p.greek, w_riccati(level(h)?)?);
                t.push_f(&[h, j, jp, f]);
                rows.push(json!({ "h": h, "j": j, "j_prime": jp, "f": f }));
            }
            Ok(Artifact::new(name, "displacement J", config, vec![], json!({ "params": p, "values": rows }), Some(t)))
        }
        Command::CountZeros { params } => {
            let p = params.resolve()?;
            let r = count_zeros(cfg.context()?, &p, &cfg.zero())?;
            let mut t = Table::new(&["h", "lo", "hi", "direction", "simple", "region"]);
            for z in &r.zeros {
                t.rows.push(vec![
                    sci(z.h),
                    sci(z.bracket.0),
                    sci(z.bracket.1),
                    z.direction.to_string(),
                    z.simple.to_string(),
                    serde_json::to_value(z.region).map_err(Error::from)?.as_str().unwrap_or("").into(),
                ]);
            }
            let checks = vec![check("at_most_three", "upper bound three", r.count <= 3, json!(r.count), None)];
            Ok(Artifact::new(name, "zeros of J", config, checks, json!({ "params": p, "report": r }), Some(t)))
        }
        Command::Ect { n, start } => {
            if *n < 2 || !(*start > 0.0 && *start < 4.0) {
                return Err(CliError::Usage("ect needs --n >= 2 and 0 < --start < 4".into()));
            }
            let w = ect_window(cfg.context()?, *n, *start, cfg.zero().delta2)?;
            let mut t = Table::new(&["h", "delta1", "delta2", "delta3", "delta4", "fd_gap"]);
            for p in &w.points {
                t.push_f(&[p.h, p.deltas[0], p.deltas[1], p.deltas[2], p.deltas[3], p.fd_gap]);
            }
            let norm4 = w.points.first().map_or(f64::NAN, |p| p.deltas[3] * 6377292.0 / I0P_CENTER.powi(4));
            let checks = vec![
                check("all_negative", "ECT determinant signs", w.all_negative, json!(w.all_negative), None),
                check("delta4_center", "ECT determinant at the center", (norm4 + 1.0).abs() <= 0.01, json!(norm4), Some(0.01)),
            ];
            let data = json!({ "b": w.b, "certified": w.certified, "points": w.points.len() });
            Ok(Artifact::new(name, "ECT determinants", config, checks, data, Some(t)))
        }
        Command::FindThree { targets } => {
            let tg: [f64; 3] = arr(targets, "--targets")?;
            let mut t = Table::new(&["target", "zero", "simple"]);
            match find_three_zeros(cfg.context()?, tg, &cfg.zero()) {
                Ok(th) => {
                    for (a, z) in tg.iter().zip(&th.report.zeros) {
                        t.rows.push(vec![sci(*a), sci(z.h), z.simple.to_string()]);
                    }
                    let checks = vec![check("three_simple_zeros", "sharpness", true, json!(th.report.count), None)];
                    Ok(Artifact::new(name, "sharpness", config, checks, json!(th), Some(t)))
                }
                Err(e @ (Error::WindowTooLarge { .. } | Error::InvalidTargets(_))) => {
                    let checks = vec![check("three_simple_zeros", "sharpness", false, json!(e.to_string()), None)];
                    Ok(Artifact::new(name, "sharpness", config, checks, json!({ "targets": tg }), Some(t)))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Scan { samples, seed, full } => {
            let spec = ScanSpec {
                samples: *samples,
                seed: *seed,
                ..ScanSpec::default()
            };
            let mut r = scan(cfg.context()?, &spec, &cfg.zero())?;
            let mut t = Table::new(&["index", "stratum", "lambda", "sigma", "gamma", "kappa", "count", "flagged"]);
            for s in &r.samples {
                let g = s.greek;
                t.rows.push(vec![
                    s.index.to_string(),
                    s.stratum.name().into(),
                    sci(g.lambda),
                    sci(g.sigma),
                    sci(g.gamma),
                    sci(g.kappa),
                    s.count.to_string(),
                    s.flagged.to_string(),
                ]);
            }
            let mut checks = vec![
                check("global_max", "upper bound three", r.global_max <= 3, json!(r.global_max), None),
                check("no_flagged", "multiplicity", r.flagged_samples == 0, json!(r.flagged_samples), None),
            ];
            for s in &r.strata {
                checks.push(check(
                    &format!("stratum_{}", s.name),
                    "case split bounds",
                    s.within_bound,
                    json!({ "max": s.max_count, "bound": s.predicted_bound, "samples": s.samples }),
                    None,
                ));
            }
            if !full {
                r.samples.clear();
            }
            Ok(Artifact::new(name, "zero-count scan", config, checks, json!(r), Some(t)))
        }
        Command::Simulate {
            params,
            targets,
            delta,
            n,
        } => {
            let ctx_targets = targets.as_ref().map(|v| arr::<3>(v, "--targets")).transpose()?;
            let opts = CycleOptions {
                n: *n,
                sim: SimOptions {
                    rtol: cfg.ode_rtol,
                    ..SimOptions::default()
                },
                ..CycleOptions::default()
            };
            // eps fixed directly, or a mu direction scaled per delta
            let (fixed, mu, predicted) = match ctx_targets {
                Some(tg) => {
                    if params.greek.is_some() || params.mu.is_some() || params.eps.is_some() {
                        return Err(CliError::Usage("--targets excludes --greek/--mu/--eps".into()));
                    }
                    let th = find_three_zeros(cfg.context()?, tg, &cfg.zero())?;
                    (None, th.params.mu, th.report.zeros.iter().map(|z| z.h).collect::<Vec<_>>())
                }
                None => match &params.eps {
                    Some(e) => (Some(EpsVector::new(arr(e, "--eps")?)), [0.0; 4], vec![]),
                    None => (None, params.resolve()?.mu, vec![]),
                },
            };
            let mut t = Table::new(&["delta", "h", "displacement", "scaled_displacement"]);
            let mut runs = Vec::new();
            let mut checks = Vec::new();
            let deltas = if fixed.is_some() { vec![f64::NAN] } else { delta.clone() };
            for d in deltas {
                let (eps, scale, gauge) = match fixed {
                    Some(e) => (e, 1.0, None),
                    None => {
                        let s = eps_from_mu(mu, d)?;
                        (s.eps, s.scale, Some(s.gauge))
                    }
                };
                let rep = count_cycles(&eps, &opts)?;
                for r in &rep.samples {
                    t.push_f(&[d, r.start.h, r.displacement, r.displacement / scale]);
                }
                if !predicted.is_empty() {
                    checks.push(check(
                        &format!("three_cycles_delta_{}", sci(d)),
                        "limit cycles of the perturbed system",
                        rep.count == 3,
                        json!(rep.count),
                        None,
                    ));
                }
                runs.push(json!({
                    "delta": if d.is_nan() { Value::Null } else { json!(d) },
                    "gauge": gauge,
                    "eps": eps.eps,
                    "count": rep.count,
                    "cycles": rep.cycles,
                    "escaped": rep.escaped,
                    "max_abs_displacement": rep.max_abs_displacement,
                }));
            }
            let data = json!({ "mu": mu, "predicted": predicted, "runs": runs });
            Ok(Artifact::new(name, "limit cycles of the perturbed system", config, checks, data, Some(t)))
        }
        Command::Acceptance { samples } => {
            let ac = AcceptanceConfig {
                quad_tol: cfg.quad_tol,
                zero: cfg.zero(),
                scan: ScanSpec {
                    samples: *samples,
                    ..ScanSpec::default()
                },
                ..AcceptanceConfig::default()
            };
            let rep = acceptance::run_all(&ac)?;
            let mut t = Table::new(&["id", "name", "passed", "anchor"]);
            let mut checks = Vec::new();
            for c in &rep.criteria {
                eprintln!("{}", c.line());
                t.rows.push(vec![c.id.to_string(), c.name.clone(), c.passed.to_string(), c.anchor.clone()]);
                checks.push(check(&format!("criterion_{}_{}", c.id, c.name), &c.anchor, c.passed, c.details.clone(), None));
            }
            let data = json!({ "passed": rep.passed, "failed": rep.failed, "config": ac });
            Ok(Artifact::new(name, "acceptance criteria", config, checks, data, Some(t)))
        }
        Command::Report { files, dir } => report(files, dir.as_deref(), config),
    }
}

/// Aggregate per-check status across artifacts, sorted by source path.
pub fn report(files: &[PathBuf], dir: Option<&Path>, config: Value) -> Result<Artifact, CliError> {
    let mut paths: Vec<PathBuf> = files.to_vec();
    if let Some(d) = dir {
        for entry in fs::read_dir(d)? {
            let p = entry?.path();
            if p.extension().is_some_and(|e| e == "json") && p.file_name().is_some_and(|n| n != "report.json") {
                paths.push(p);
            }
        }
    }
    paths.sort();
    paths.dedup();
    if paths.is_empty() {
        return Err(Error::MissingArtifact("no run artifacts given".into()).into());
    }
    let mut checks = Vec::new();
    let mut sources = Vec::new();
    let mut t = Table::new(&["source", "command", "check", "passed", "anchor"]);
    for p in &paths {
        let text = fs::read_to_string(p).map_err(|e| Error::MissingArtifact(format!("{}: {e}", p.display())))?;
        let a: Artifact = serde_json::from_str(&text).map_err(|e| Error::MissingArtifact(format!("{}: {e}", p.display())))?;
        let src = p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned());
        for c in &a.checks {
            t.rows.push(vec![src.clone(), a.command.clone(), c.name.clone(), c.passed.to_string(), c.anchor.clone()]);
            checks.push(Check {
                name: format!("{}/{}", a.command, c.name),
                ..c.clone()
            });
        }
        sources.push(json!({ "source": src, "command": a.command, "passed": a.passed, "config": a.config }));
    }
    Ok(Artifact::new("report", "consolidated report", config, checks, json!(sources), Some(t)))
}

/// Parse, run and emit; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_cli(&cli) {
        Ok(passed) => i32::from(!passed),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run_cli(cli: &Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::from_env()?;
    let art = execute(&cli.command, &cfg)?;
    let (text, ext) = match cli.format {
        Format::Json => (art.to_json()?, "json"),
        Format::Csv => (art.to_csv()?, "csv"),
    };
    match &cli.out_dir {
        Some(d) => {
            fs::create_dir_all(d)?;
            let path = d.join(format!("{}.{ext}", art.command));
            fs::write(&path, text)?;
            eprintln!("{} {}", if art.passed { "ok" } else { "FAILED" }, path.display());
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(art.passed)
}
