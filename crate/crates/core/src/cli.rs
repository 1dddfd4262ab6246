//! The `qlab` command line. [`run`] parses arguments, writes to the given
//! sink and returns the process exit code: 0 pass, 1 violation, 2 malformed
//! input or unknown suite.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::convexity::{mii_check, mii_sweep, p_envelope};
use crate::error::{Error, Result};
use crate::ftc::{differentiation_report, hl_maximal_with, weak11_constant, CubeFamily, GridSpace};
use crate::galb_tensor::{galb_gauge_estimate, tensor_norm_estimate, TensorRep};
use crate::gauges::{dual_gauge, Gauge, QuasiNormedSpace};
use crate::integration::{rolewicz_counterexample, CounterexampleReport};
use crate::measure::{MeasureSpace, ScalarField, VectorField};
use crate::report::{self, merge_reports, to_json_string, RunConfig, SuiteReport, Table};
use crate::suites::{run_suite, Suite, SuiteParams};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Sweeps for galb, passes for tensor norms, per-suite for suites.
const DEFAULT_BUDGET: usize = 10_000;
/// Restarts for the envelope and dual searches.
const DEFAULT_RESTARTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "qlab", version, about = "Quasi-norm calculus on finite measure spaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Search budget; each command documents its unit and default.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Output directory; results go to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// JSON arguments are given inline or as a path to a file.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a gauge on a nonnegative field.
    Eval {
        #[arg(long)]
        gauge: String,
        #[arg(long)]
        space: String,
        #[arg(long)]
        field: String,
    },
    /// Run a named check suite.
    Suite {
        name: String,
        /// Outer gauge for `mii`.
        #[arg(long)]
        a: Option<String>,
        /// Inner gauge for `mii`.
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        max_n: Option<usize>,
    },
    /// Merge suite reports into one artifact.
    Report { inputs: Vec<PathBuf> },
    /// The `L_p` Riemann-sum blow-up for one `(p, n)`.
    Rolewicz {
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 1024)]
        n: usize,
    },
    /// Minkowski-inequality ratio of one matrix, or a seeded sweep.
    Mii {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Matrix rows; a sweep over sizes 2..32 runs when absent.
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Lower estimate of the galb gauge of a coefficient sequence.
    GalbEstimate {
        #[arg(long)]
        x: String,
        #[arg(long)]
        coeffs: String,
    },
    /// Upper estimate of the tensor norm of a representation.
    TensorNorm {
        #[arg(long)]
        rep: String,
        #[arg(long)]
        space: String,
    },
    /// Upper estimate of the `p`-envelope of a gauge.
    Envelope {
        #[arg(long)]
        gauge: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        space: String,
        #[arg(long)]
        field: String,
    },
    /// Associated (dual) gauge.
    Dual {
        #[arg(long)]
        gauge: String,
        #[arg(long)]
        space: String,
        #[arg(long)]
        field: String,
    },
    /// Maximal functions and differentiation on a uniform grid.
    Ftc {
        #[arg(value_enum)]
        what: FtcOp,
        /// `{"d":1,"cells":N}`.
        #[arg(long)]
        grid: String,
        /// Flat array of cell values.
        #[arg(long)]
        field: String,
        /// Halfwidths; every window size when absent.
        #[arg(long)]
        scales: Option<String>,
        #[arg(long, value_enum, default_value_t = FamilyArg::Containing)]
        family: FamilyArg,
        /// Sample points for `differentiate`.
        #[arg(long)]
        samples: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FtcOp {
    Maximal,
    Weak11,
    Differentiate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Containing,
    Centered,
}

impl From<FamilyArg> for CubeFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Containing => CubeFamily::Containing,
            FamilyArg::Centered => CubeFamily::Centered,
        }
    }
}

/// Fields may be a bare array or `{"values": [...]}`.
#[derive(Deserialize)]
#[serde(untagged)]
enum FieldArg {
    Bare(Vec<f64>),
    Wrapped { values: Vec<f64> },
}

impl From<FieldArg> for ScalarField {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::Bare(v) | FieldArg::Wrapped { values: v } => ScalarField::new(v),
        }
    }
}

fn load<T: DeserializeOwned>(arg: &str) -> Result<T> {
    let text = match arg.trim_start().chars().next() {
        Some('{') | Some('[') => arg.to_string(),
        _ => fs::read_to_string(arg).map_err(|e| Error::Input(format!("{arg}: {e}")))?,
    };
    Ok(serde_json::from_str(&text)?)
}

fn load_field(arg: &str) -> Result<ScalarField> {
    Ok(load::<FieldArg>(arg)?.into())
}

enum Outcome {
    Pass,
    Violation,
}

struct Ctx<'a> {
    global: &'a Global,
    config: RunConfig,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    /// Print to the sink, or write `<stem>.<ext>` into the output directory
    /// and print its path.
    fn emit(&mut self, stem: &str, json: impl Serialize, csv: Option<String>) -> Result<()> {
        let (text, ext) = match (self.global.format, csv) {
            (Format::Csv, Some(c)) => (c, "csv"),
            _ => (to_json_string(&json)?, "json"),
        };
        match &self.global.out {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
                let path = dir.join(format!("{stem}.{ext}"));
                fs::write(&path, text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
                writeln!(self.out, "{}", path.display()).ok();
            }
            None => {
                self.out.write_all(text.as_bytes()).ok();
            }
        }
        Ok(())
    }
}

/// Parse `args` (including the program name) and execute.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                err.write_all(rendered.as_bytes()).ok();
            } else {
                out.write_all(rendered.as_bytes()).ok();
            }
            return code;
        }
    };
    let config = RunConfig {
        seed: cli.global.seed,
        trials: cli.global.trials,
        tol: cli.global.tol,
        budget: cli.global.budget.unwrap_or(DEFAULT_BUDGET),
    };
    let mut ctx = Ctx { global: &cli.global, config, out };
    match execute(&cli.command, &mut ctx) {
        Ok(Outcome::Pass) => EXIT_PASS,
        Ok(Outcome::Violation) => EXIT_VIOLATION,
        Err(e) => {
            writeln!(err, "error: {e}").ok();
            EXIT_INPUT
        }
    }
}

fn verdict(ok: bool) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Violation
    }
}

fn execute(cmd: &Command, ctx: &mut Ctx<'_>) -> Result<Outcome> {
    ctx.config.validate()?;
    match cmd {
        Command::Eval { gauge, space, field } => {
            let g: Gauge = load(gauge)?;
            let space: MeasureSpace = load(space)?;
            let r = g.eval(&space, &load_field(field)?)?;
            writeln!(ctx.out, "{r}").ok();
            if r.witness.is_some() && ctx.global.out.is_some() {
                ctx.emit("eval-witness", &r, None)?;
            }
            Ok(Outcome::Pass)
        }
        Command::Suite { name, a, b, p, max_n } => {
            let suite: Suite = name.parse()?;
            let params = SuiteParams {
                a: a.as_deref().map(load).transpose()?,
                b: b.as_deref().map(load).transpose()?,
                p: *p,
                max_n: *max_n,
            };
            let r = run_suite(suite, &ctx.config, &params)?;
            let csv = r.to_csv()?;
            ctx.emit(suite.name(), &r, Some(csv))?;
            Ok(verdict(r.passed))
        }
        Command::Report { inputs } => {
            let reports = inputs.iter().map(|p| read_report(p)).collect::<Result<Vec<SuiteReport>>>()?;
            let merged = merge_reports(reports)?;
            let csv = merged.to_csv()?;
            ctx.emit("report", &merged, Some(csv))?;
            Ok(verdict(merged.passed))
        }
        Command::Rolewicz { p, n } => {
            let r = rolewicz_counterexample(*p, *n)?;
            let table = Table {
                columns: CounterexampleReport::CSV_HEADER.iter().map(|s| s.to_string()).collect(),
                rows: vec![vec![r.p, r.n as f64, r.sup_part_norm, r.riemann_sum_norm, r.blowup_ratio]],
            };
            ctx.emit("rolewicz", &r, Some(report::table_csv(&table)?))?;
            Ok(Outcome::Pass)
        }
        Command::Mii { a, b, matrix } => {
            let (a, b): (Gauge, Gauge) = (load(a)?, load(b)?);
            let ratio = match matrix {
                Some(m) => {
                    let rows: Vec<Vec<f64>> = load(m)?;
                    let cols = rows.first().map_or(0, Vec::len);
                    if rows.is_empty() || cols == 0 {
                        return Err(Error::Input("matrix needs at least one entry".into()));
                    }
                    let r = mii_check(
                        &a,
                        &MeasureSpace::counting(rows.len()),
                        &b,
                        &MeasureSpace::counting(cols),
                        &rows,
                    )?;
                    let ratio = r.ratio;
                    ctx.emit("mii", &r, None)?;
                    ratio
                }
                None => {
                    let r = mii_sweep(&a, &b, &[2, 4, 8, 16, 32], ctx.config.trials, ctx.config.seed)?;
                    let ratio = r.value;
                    ctx.emit("mii", &r, None)?;
                    ratio
                }
            };
            Ok(verdict(ratio <= 1.0 + ctx.config.tol))
        }
        Command::GalbEstimate { x, coeffs } => {
            let x: QuasiNormedSpace = load(x)?;
            let a: Vec<f64> = load(coeffs)?;
            let r = galb_gauge_estimate(&x, &a, ctx.config.budget, ctx.config.seed)?;
            ctx.emit("galb-estimate", &r, None)?;
            Ok(Outcome::Pass)
        }
        Command::TensorNorm { rep, space } => {
            let rep: TensorRep = load(rep)?;
            let space: MeasureSpace = load(space)?;
            let r = tensor_norm_estimate(&rep, &space, ctx.config.budget, ctx.config.seed)?;
            ctx.emit("tensor-norm", &r, None)?;
            Ok(Outcome::Pass)
        }
        Command::Envelope { gauge, p, space, field } => {
            let g: Gauge = load(gauge)?;
            let space: MeasureSpace = load(space)?;
            let budget = ctx.global.budget.unwrap_or(DEFAULT_RESTARTS);
            let r = p_envelope(&g, *p, &space, &load_field(field)?, budget)?;
            ctx.emit("envelope", &r, None)?;
            Ok(Outcome::Pass)
        }
        Command::Dual { gauge, space, field } => {
            let g: Gauge = load(gauge)?;
            let space: MeasureSpace = load(space)?;
            let budget = ctx.global.budget.unwrap_or(DEFAULT_RESTARTS);
            let r = dual_gauge(&g, &space, &load_field(field)?, budget)?;
            ctx.emit("dual", &r, None)?;
            Ok(Outcome::Pass)
        }
        Command::Ftc { what, grid, field, scales, family, samples } => {
            let grid: GridSpace = load(grid)?;
            grid.validate()?;
            let f = load_field(field)?;
            let scales: Vec<f64> = match scales {
                Some(s) => load(s)?,
                None => grid.all_scales(),
            };
            match what {
                FtcOp::Maximal => {
                    let m = hl_maximal_with(&grid, &f, &scales, (*family).into())?;
                    let table = Table {
                        columns: vec!["mf".into()],
                        rows: m.values.iter().map(|v| vec![*v]).collect(),
                    };
                    ctx.emit("maximal", &m, Some(report::table_csv(&table)?))?;
                }
                FtcOp::Weak11 => {
                    let c = weak11_constant(&grid, &f, &scales, (*family).into())?;
                    ctx.emit("weak11", serde_json::json!({ "constant": c }), None)?;
                }
                FtcOp::Differentiate => {
                    let samples: Vec<Vec<f64>> = match samples {
                        Some(s) => load(s)?,
                        None => (0..grid.len()).map(|c| grid.center(c)).collect(),
                    };
                    let field = VectorField::rank_one(&[1.0], &f.values);
                    let x = QuasiNormedSpace::lq(1, 1.0)?;
                    let rows = differentiation_report(&grid, &field, &x, &samples, &scales)?;
                    let table = Table {
                        columns: crate::ftc::DifferentiationRow::CSV_HEADER
                            .iter()
                            .map(|s| s.to_string())
                            .collect(),
                        rows: rows.iter().map(|r| vec![r.halfwidth, r.max_error]).collect(),
                    };
                    ctx.emit("differentiation", &rows, Some(report::table_csv(&table)?))?;
                }
            }
            Ok(Outcome::Pass)
        }
    }
}

fn read_report(path: &Path) -> Result<SuiteReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}
