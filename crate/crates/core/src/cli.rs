//! Command-line front end.
//!
//! Exit codes: `0` success, `1` other failure, `2` parse error, `3` invariant
//! violation, `4` inseparable sets, `5` a stage left unmet, `6` a
//! verification row failed.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::artifact;
use crate::convexgeom::sample;
use crate::dualapprox::{approx_program, okaweil_approx, tail_block_approx, ApproxRequest};
use crate::multiindex::MultiIndex;
use crate::report::Report;
use crate::scenario::{
    body_from_spec, parse_scheme_name, point_from_flat, polynomial_from_spec, polynomial_to_spec,
    BodySpec, PolynomialSpec, ScenarioFile,
};
use crate::universal::{build_series, make_schedule, Scenario, WitnessStatus};
use crate::verify::{verify_all, VerifyOptions};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_INSEPARABLE: i32 = 4;
pub const EXIT_UNMET: i32 = 5;
pub const EXIT_VERIFY: i32 = 6;

pub const SERIES_FILE: &str = "series.txt";

#[derive(Debug, Parser)]
#[command(
    name = "univtaylor",
    version,
    about = "Finite-stage universal Taylor series"
)]
struct Cli {
    /// Worker threads for verification (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a series, verify it and write series.txt, report.csv and report.json.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: Output,
    },
    /// Re-verify a series artifact against its scenario.
    Verify {
        scenario: PathBuf,
        series: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: Output,
        /// Selects an independent set of verification clouds.
        #[arg(long, default_value_t = 0)]
        round: u64,
    },
    /// Solve one approximation request and print the block as JSON.
    Approx {
        request: PathBuf,
        /// Write the LP dual program to this file.
        #[arg(long)]
        dump_lp: Option<PathBuf>,
    },
    /// Print the first multi-indices of an enumeration.
    Enumerate {
        #[arg(long, default_value = "graded_lex")]
        scheme: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Print the stage schedule of a scenario.
    Schedule {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Debug, Args)]
struct Overrides {
    /// Number of stages to build.
    #[arg(long)]
    stages: Option<usize>,
    /// Largest total degree of any block.
    #[arg(long)]
    degree_max: Option<u32>,
    /// Facets of the polygon encoding `|w| <= b`.
    #[arg(long)]
    facets: Option<usize>,
    /// Random points added to every solver cloud.
    #[arg(long)]
    density: Option<usize>,
    /// Verification clouds are this many times denser than solver clouds.
    #[arg(long)]
    grid_factor: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = ["holo", "ainfty"])]
    mode: Option<String>,
}

#[derive(Debug, Args)]
struct Output {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write plot.csv (stage against log10 of the fine-grid error).
    #[arg(long)]
    emit_plot_data: bool,
}

impl Overrides {
    fn load(&self, path: &Path) -> Result<Scenario> {
        let mut f = ScenarioFile::read(path)?;
        if let Some(v) = self.stages {
            f.stages = v;
        }
        if let Some(v) = self.degree_max {
            f.degree_cap = v;
        }
        if let Some(v) = self.facets {
            f.facets = v;
        }
        if let Some(v) = self.density {
            f.density = v;
        }
        if let Some(v) = self.grid_factor {
            f.grid_factor = v;
        }
        if let Some(v) = self.seed {
            f.seed = v;
        }
        if let Some(v) = &self.mode {
            f.mode = v.clone();
        }
        let s = f.to_scenario()?;
        s.validate()?;
        Ok(s)
    }
}

/// A one-shot approximation request file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxFile {
    pub center: Vec<f64>,
    #[serde(default)]
    pub scale: Option<Vec<f64>>,
    pub k: BodySpec,
    pub l: BodySpec,
    pub target: PolynomialSpec,
    pub eps_l: f64,
    pub degree: u32,
    #[serde(default)]
    pub tail_floor: u32,
    #[serde(default)]
    pub derivatives: Vec<Vec<u32>>,
    #[serde(default = "default_facets")]
    pub facets: usize,
    #[serde(default = "default_density")]
    pub density: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

fn default_facets() -> usize {
    16
}
fn default_density() -> usize {
    64
}
fn default_seed() -> u64 {
    1
}

#[derive(Debug, Serialize)]
struct ApproxOutput {
    achieved_k: f64,
    achieved_l: f64,
    achieved_derivatives: Vec<(Vec<u32>, f64)>,
    lp_objective: f64,
    pivots: usize,
    block: PolynomialSpec,
}

impl ApproxFile {
    pub fn to_request(&self) -> Result<ApproxRequest> {
        if self.center.is_empty() || !self.center.len().is_multiple_of(2) {
            return Err(Error::Parse(
                "centre must be a flat list [re, im, ...] of even length".into(),
            ));
        }
        let n = self.center.len() / 2;
        let center = point_from_flat(&self.center, n, "centre")?;
        let scale = self.scale.clone().unwrap_or_else(|| vec![1.0; n]);
        let k = body_from_spec(&self.k, n, "k")?;
        let l = body_from_spec(&self.l, n, "l")?;
        let target = polynomial_from_spec(&self.target, n, "target")?;
        for d in &self.derivatives {
            if d.len() != n {
                return Err(Error::Parse(format!(
                    "derivative {d:?} has the wrong length"
                )));
            }
        }
        Ok(ApproxRequest {
            k_cloud: sample(&k, self.density, self.seed),
            l_cloud: sample(&l, self.density, self.seed.wrapping_add(1)),
            target: target.recenter(&center, &scale),
            center,
            scale,
            eps_l: self.eps_l,
            derivatives: self
                .derivatives
                .iter()
                .map(|d| MultiIndex::new(d.clone()))
                .collect(),
            tail_floor: self.tail_floor,
            degree_budget: self.degree,
            facets: self.facets,
            tolerance_k: self.tolerance,
        })
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::Inseparable(_) => EXIT_INSEPARABLE,
        Error::BudgetExceeded { .. } => EXIT_UNMET,
        Error::Io(_) | Error::IterationLimit(_) => EXIT_FAILURE,
        _ => EXIT_INVARIANT,
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    if let Some(t) = cli.threads {
        // a pool that already exists is kept
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Run {
            scenario,
            overrides,
            output,
        } => {
            let s = overrides.load(&scenario)?;
            let series = build_series(&s)?;
            std::fs::create_dir_all(&output.out)?;
            artifact::save(&series, &output.out.join(SERIES_FILE))?;
            let unmet = series
                .witnesses
                .iter()
                .filter(|w| w.status == WitnessStatus::Unmet)
                .count();
            finish(&s, &series, 0, &output, unmet, out, err)
        }
        Command::Verify {
            scenario,
            series,
            overrides,
            output,
            round,
        } => {
            let s = overrides.load(&scenario)?;
            let series = artifact::load(&series)?;
            let unmet = series
                .witnesses
                .iter()
                .filter(|w| w.status == WitnessStatus::Unmet)
                .count();
            finish(&s, &series, round, &output, unmet, out, err)
        }
        Command::Approx { request, dump_lp } => {
            let text = std::fs::read_to_string(&request)?;
            let file: ApproxFile = serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("approximation request: {e}")))?;
            let req = file.to_request()?;
            if let Some(path) = dump_lp {
                std::fs::write(path, approx_program(&req)?.dump())?;
            }
            let res = if req.tail_floor == 0 && req.derivatives.is_empty() {
                let r = okaweil_approx(&req)?;
                match req.tolerance_k {
                    Some(tol) if r.achieved_k > tol => {
                        return Err(Error::BudgetExceeded {
                            degree: req.degree_budget,
                            achieved: r.achieved_k,
                            tolerance: tol,
                        })
                    }
                    _ => r,
                }
            } else {
                tail_block_approx(&req)?
            };
            let o = ApproxOutput {
                achieved_k: res.achieved_k,
                achieved_l: res.achieved_l,
                achieved_derivatives: res
                    .achieved_derivatives
                    .iter()
                    .map(|(l, v)| (l.components().to_vec(), *v))
                    .collect(),
                lp_objective: res.lp_objective,
                pivots: res.pivots,
                block: polynomial_to_spec(&res.q),
            };
            let _ = writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&o).expect("output serializes")
            );
            Ok(EXIT_OK)
        }
        Command::Enumerate { scheme, n, count } => {
            if n == 0 {
                return Err(Error::Parse("--n must be at least 1".into()));
            }
            let sch = parse_scheme_name(&scheme, n)?;
            let items: Vec<String> = (0..count)
                .map(|j| {
                    sch.unrank(j).map(|nu| {
                        let c: Vec<String> =
                            nu.components().iter().map(|e| e.to_string()).collect();
                        format!("({})", c.join(","))
                    })
                })
                .collect::<Result<_>>()?;
            let _ = writeln!(out, "{}", items.join(","));
            Ok(EXIT_OK)
        }
        Command::Schedule {
            scenario,
            overrides,
        } => {
            let s = overrides.load(&scenario)?;
            let _ = writeln!(out, "stage,body,target,eps");
            for e in make_schedule(&s) {
                let _ = writeln!(out, "{},{},{},{:.16e}", e.stage, e.body, e.target, e.eps);
            }
            Ok(EXIT_OK)
        }
    }
}

fn finish(
    s: &Scenario,
    series: &crate::universal::UniversalSeries,
    round: u64,
    output: &Output,
    unmet: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let opts = VerifyOptions {
        grid_factor: s.grid_factor,
        round,
    };
    let v = verify_all(series, s, &opts)?;
    let report = Report::new(&s.id, &series.fingerprint, v);
    report.write(&output.out, output.emit_plot_data)?;
    for w in &report.verification.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let failures = report.failures();
    let _ = writeln!(
        out,
        "{}: {} stages, {} unmet, {} checks, {} failed; reports in {}",
        s.id,
        series.witnesses.len(),
        unmet,
        report.rows().len(),
        failures,
        output.out.display()
    );
    Ok(if unmet > 0 {
        EXIT_UNMET
    } else if failures > 0 {
        EXIT_VERIFY
    } else {
        EXIT_OK
    })
}
