//! The `ggm` command line.
//!
//! Exit codes: 0 when everything passes, 1 when a verification or axiom
//! check fails, 2 for usage, parse and configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::funcnorm::{
    bmo_norm_argmax, grand_lebesgue_norm_argmax, grand_morrey_norm, lp_norm, morrey_norm_argmax, BmoVariant, EpsGrid,
    GrandParams, GridFunction, GridSpec, NormError, NormValue, Profile,
};
use crate::homspace::{
    check_annulus, doubling_witness, iterated_doubling_worst, read_space_json, reverse_doubling_exponent,
    DiscreteHomSpace, Geometry, SpaceError, SpaceIoError, DEFAULT_REVERSE_DOUBLING_SCALE,
};
use crate::operators::{
    maximal, maximal_s, sharp_maximal, Commutator, CzOperator, KernelSpec, Modulus, Operator, OperatorError, Potential,
};
use crate::verify::{
    calibrate, run_suite, summary_csv, write_outputs, CalibratedParams, SpaceSpec, SuiteConfig, VerifyError,
    CALIBRATION_SAMPLES, CALIBRATION_SEED,
};

#[derive(Debug, Parser)]
#[command(name = "ggm", version, about = "Grand Morrey norms, operators and empirical bounds on finite spaces")]
pub struct Cli {
    /// Worker threads; defaults to the number of cores. Results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a space and print its doubling and annulus diagnostics.
    Space {
        #[command(flatten)]
        space: SpaceArgs,
        /// Diagnostics to run.
        #[arg(long = "check", value_enum, default_values_t = [SpaceCheck::All])]
        checks: Vec<SpaceCheck>,
    },
    /// Evaluate one norm of a function.
    Norm {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        f: FunctionArgs,
        #[arg(long, value_enum)]
        norm: NormName,
        #[command(flatten)]
        exps: ExponentArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Apply one operator to a function.
    Op {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        f: FunctionArgs,
        #[arg(long, value_enum)]
        op: OpName,
        /// Exponent of `M_s`.
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long)]
        alpha: Option<f64>,
        /// Singular kernel: a built-in name or `table` with `--kernel-file`.
        #[arg(long, value_enum)]
        kernel: Option<KernelName>,
        #[arg(long)]
        kernel_file: Option<PathBuf>,
        /// Multiplier for `commutator`.
        #[arg(long)]
        b: Option<PathBuf>,
        /// Linear operator inside `commutator`.
        #[arg(long, value_enum, default_value_t = InnerOp::Cz)]
        inner: InnerOp,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run a verification suite from a JSON config.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for `reports.json` and `summary.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Measure the absolute constants of the calibrated checks on a circle.
    Calibrate {
        #[arg(long, default_value_t = 256)]
        circle: usize,
        #[arg(long, default_value_t = CALIBRATION_SEED)]
        seed: u64,
        #[arg(long, default_value_t = CALIBRATION_SAMPLES)]
        samples: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    #[command(flatten)]
    source: SpaceSource,
    /// Dimension of `--grid`.
    #[arg(long, default_value_t = 1, conflicts_with_all = ["file", "circle"])]
    pub dim: usize,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct SpaceSource {
    /// Space file (JSON).
    #[arg(long = "space")]
    file: Option<PathBuf>,
    /// Uniform grid on `[0,1]^dim` with N points per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// N equispaced points on the circle.
    #[arg(long)]
    circle: Option<usize>,
}

impl SpaceArgs {
    fn spec(&self) -> SpaceSpec {
        let src = &self.source;
        match (&src.file, src.grid, src.circle) {
            (Some(path), _, _) => SpaceSpec::File { path: path.clone() },
            (_, Some(n), _) => SpaceSpec::Grid { n, dim: self.dim },
            (_, _, Some(n)) => SpaceSpec::Circle { n },
            _ => unreachable!("clap enforces exactly one source"),
        }
    }

    fn build(&self) -> Result<(DiscreteHomSpace, SpaceSpec), CliError> {
        let spec = self.spec();
        let space = match &spec {
            SpaceSpec::File { path } => read_space_json(path)?,
            SpaceSpec::Grid { n, dim } => DiscreteHomSpace::uniform_grid(*n, *dim, Geometry::Interval)?,
            SpaceSpec::Circle { n } => DiscreteHomSpace::uniform_grid(*n, 1, Geometry::Circle)?,
        };
        Ok((space, spec))
    }
}

#[derive(Debug, Args)]
pub struct FunctionArgs {
    /// Function values: a JSON array or one CSV column.
    #[arg(long = "f")]
    pub f: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExponentArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Slope of the linear shift `A(x) = a·x` for grand Morrey norms.
    #[arg(long, default_value_t = 0.0)]
    pub a_slope: f64,
    #[arg(long, value_enum, default_value_t = BmoName::Mean)]
    pub bmo: BmoName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceCheck {
    All,
    Doubling,
    Reverse,
    Annulus,
    Iterated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum NormName {
    Lp,
    Morrey,
    GrandLebesgue,
    GrandMorrey,
    Bmo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BmoName {
    Mean,
    Inf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum OpName {
    Maximal,
    MaximalS,
    Sharp,
    Cz,
    Potential,
    Commutator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelName {
    Circle,
    Interval,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InnerOp {
    Cz,
    Potential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// A check ran and failed; the report has already been written.
    #[error("{0}")]
    Failed(String),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    SpaceIo(#[from] SpaceIoError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            // A well-formed space file whose distances break an axiom is a
            // failed check, not a malformed input.
            CliError::SpaceIo(SpaceIoError::Space(e)) if is_axiom_violation(e) => 1,
            CliError::Verify(VerifyError::SpaceIo(SpaceIoError::Space(e))) if is_axiom_violation(e) => 1,
            _ => 2,
        }
    }
}

fn is_axiom_violation(e: &SpaceError) -> bool {
    matches!(
        e,
        SpaceError::SymmetryViolation(..)
            | SpaceError::QuasiTriangleViolation(..)
            | SpaceError::ZeroDistanceOffDiagonal(..)
            | SpaceError::NonZeroDiagonal(..)
    )
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    match &cli.command {
        Command::Verify {
            config,
            seed,
            out: dir,
            format,
        } => with_jobs(cli.jobs, || cmd_verify(config, *seed, dir.as_deref(), *format, out)),
        Command::Calibrate {
            circle,
            seed,
            samples,
            out: path,
        } => with_jobs(cli.jobs, || cmd_calibrate(*circle, *seed, *samples, path.as_deref(), out)),
        Command::Space { space, checks } => cmd_space(space, checks, out),
        Command::Norm {
            space,
            f,
            norm,
            exps,
            format,
        } => cmd_norm(space, &f.f, *norm, exps, *format, out),
        Command::Op {
            space,
            f,
            op,
            s,
            alpha,
            kernel,
            kernel_file,
            b,
            inner,
            format,
        } => {
            let req = OpRequest {
                op: *op,
                s: *s,
                alpha: *alpha,
                kernel: *kernel,
                kernel_file: kernel_file.as_deref(),
                b: b.as_deref(),
                inner: *inner,
            };
            with_jobs(cli.jobs, || cmd_op(space, &f.f, &req, *format, out))
        }
    }
}

fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<R, CliError> + Send) -> Result<R, CliError> {
    match jobs {
        None => f(),
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(f),
    }
}

/// A JSON array of numbers, or one numeric CSV column with an optional header.
pub fn read_function_values(path: &Path) -> Result<Vec<f64>, CliError> {
    let input_err = |message: String| CliError::Input {
        path: path.to_path_buf(),
        message,
    };
    let text = std::fs::read_to_string(path)?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| input_err(e.to_string()));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| input_err(e.to_string()))?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        if rec.len() != 1 {
            return Err(input_err(format!("line {line}: expected one column, found {}", rec.len())));
        }
        match rec[0].parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(input_err(format!("line {line}: {e}"))),
        }
    }
    Ok(values)
}

fn load_function<'s>(space: &'s DiscreteHomSpace, path: &Path) -> Result<GridFunction<'s>, CliError> {
    Ok(GridFunction::new(space, read_function_values(path)?)?)
}

fn emit(out: &mut (dyn Write + Send), value: &impl serde::Serialize) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_space(args: &SpaceArgs, checks: &[SpaceCheck], out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let (space, spec) = match args.build() {
        Ok(v) => v,
        Err(CliError::SpaceIo(SpaceIoError::Space(e))) if is_axiom_violation(&e) => {
            emit(out, &json!({ "space": args.spec().to_string(), "pass": false, "violation": e.to_string() }))?;
            return Err(CliError::Failed(e.to_string()));
        }
        Err(e) => return Err(e),
    };
    let want = |c: SpaceCheck| checks.contains(&SpaceCheck::All) || checks.contains(&c);
    let mut pass = true;
    let mut report = serde_json::Map::new();
    report.insert("space".into(), json!(spec.to_string()));
    report.insert("points".into(), json!(space.len()));
    report.insert("c_t".into(), json!(space.ct()));
    report.insert("c_s".into(), json!(space.cs()));
    report.insert("diameter".into(), json!(space.diameter()));
    report.insert("total_measure".into(), json!(space.total_measure()));
    if want(SpaceCheck::Doubling) {
        let w = doubling_witness(&space);
        pass &= w.constant.is_finite();
        report.insert("c_d".into(), json!(w.constant));
        report.insert("doubling_witness".into(), serde_json::to_value(w)?);
    }
    if want(SpaceCheck::Reverse) {
        match reverse_doubling_exponent(&space, DEFAULT_REVERSE_DOUBLING_SCALE) {
            Ok(rd) => {
                pass &= rd.gamma > 0.0;
                report.insert("reverse_doubling".into(), serde_json::to_value(rd)?);
            }
            Err(e) => {
                report.insert("reverse_doubling".into(), json!({ "error": e.to_string() }));
            }
        }
    }
    if want(SpaceCheck::Annulus) {
        let a = check_annulus(&space);
        pass &= a.pass;
        report.insert("annulus".into(), serde_json::to_value(a)?);
    }
    if want(SpaceCheck::Iterated) {
        let worst = iterated_doubling_worst(&space);
        pass &= worst <= 1.0 + 1e-12;
        report.insert("iterated_doubling_worst".into(), json!(worst));
    }
    report.insert("pass".into(), json!(pass));
    emit(out, &Value::Object(report))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Failed("space diagnostics failed".into()))
    }
}

fn required(v: Option<f64>, name: &str, what: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{name} is required for {what}")))
}

fn norm_name(n: NormName) -> &'static str {
    match n {
        NormName::Lp => "lp",
        NormName::Morrey => "morrey",
        NormName::GrandLebesgue => "grand_lebesgue",
        NormName::GrandMorrey => "grand_morrey",
        NormName::Bmo => "bmo",
    }
}

fn cmd_norm(
    args: &SpaceArgs,
    fpath: &Path,
    norm: NormName,
    exps: &ExponentArgs,
    format: Format,
    out: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    let (space, _) = args.build()?;
    let f = load_function(&space, fpath)?;
    let what = norm_name(norm);
    let (params, value): (Value, NormValue) = match norm {
        NormName::Lp => {
            let p = required(exps.p, "p", what)?;
            (json!({ "p": p }), NormValue { value: lp_norm(&f, p)?, argmax: None })
        }
        NormName::Morrey => {
            let p = required(exps.p, "p", what)?;
            let lambda = required(exps.lambda, "lambda", what)?;
            (json!({ "p": p, "lambda": lambda }), morrey_norm_argmax(&f, p, lambda)?)
        }
        NormName::GrandLebesgue => {
            let p = required(exps.p, "p", what)?;
            let theta = required(exps.theta, "theta", what)?;
            let grid = EpsGrid::from_spec(&GridSpec::default(), p - 1.0)?;
            (json!({ "p": p, "theta": theta }), grand_lebesgue_norm_argmax(&f, p, theta, &grid)?)
        }
        NormName::GrandMorrey => {
            let p = required(exps.p, "p", what)?;
            let lambda = required(exps.lambda, "lambda", what)?;
            let theta = required(exps.theta, "theta", what)?;
            let a = if exps.a_slope == 0.0 {
                Profile::Zero
            } else {
                Profile::linear(exps.a_slope)
            };
            let params = GrandParams::new(p, lambda, Profile::power(theta), a, &GridSpec::default())?;
            (
                json!({ "p": p, "lambda": lambda, "theta": theta, "a_slope": exps.a_slope, "s_max": params.s_max }),
                grand_morrey_norm(&f, &params)?,
            )
        }
        NormName::Bmo => {
            let variant = match exps.bmo {
                BmoName::Mean => BmoVariant::Mean,
                BmoName::Inf => BmoVariant::Inf,
            };
            (json!({ "variant": variant.name() }), bmo_norm_argmax(&f, variant)?)
        }
    };
    match format {
        Format::Json => emit(
            out,
            &json!({ "norm": what, "params": params, "value": value.value, "argmax": value.argmax }),
        ),
        Format::Csv => {
            let a = value.argmax.unwrap_or(crate::funcnorm::Argmax {
                eps: None,
                center: None,
                radius_rank: None,
            });
            let opt = |v: Option<String>| v.unwrap_or_default();
            writeln!(out, "norm,value,eps,center,radius_rank")?;
            writeln!(
                out,
                "{what},{},{},{},{}",
                value.value,
                opt(a.eps.map(|v| v.to_string())),
                opt(a.center.map(|v| v.to_string())),
                opt(a.radius_rank.map(|v| v.to_string()))
            )?;
            Ok(())
        }
    }
}

struct OpRequest<'a> {
    op: OpName,
    s: f64,
    alpha: Option<f64>,
    kernel: Option<KernelName>,
    kernel_file: Option<&'a Path>,
    b: Option<&'a Path>,
    inner: InnerOp,
}

/// Dense kernel table on disk.
#[derive(Debug, Deserialize)]
struct KernelFile {
    table: Vec<Vec<f64>>,
    #[serde(default)]
    size_constant: Option<f64>,
    #[serde(default = "default_modulus")]
    modulus: Modulus,
}

fn default_modulus() -> Modulus {
    Modulus::Power { exponent: 1.0 }
}

fn kernel_for(space: &DiscreteHomSpace, spec: &SpaceSpec, req: &OpRequest) -> Result<KernelSpec, CliError> {
    let name = match req.kernel {
        Some(k) => k,
        None => match spec {
            SpaceSpec::Circle { .. } => KernelName::Circle,
            SpaceSpec::Grid { dim: 1, .. } => KernelName::Interval,
            _ => return Err(CliError::Usage("--kernel is required for this space".into())),
        },
    };
    Ok(match name {
        KernelName::Circle => KernelSpec::circle_conjugate(space)?,
        KernelName::Interval => KernelSpec::interval_hilbert(space)?,
        KernelName::Table => {
            let path = req
                .kernel_file
                .ok_or_else(|| CliError::Usage("--kernel table needs --kernel-file".into()))?;
            let file: KernelFile = serde_json::from_str(&std::fs::read_to_string(path)?).map_err(|e| CliError::Input {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
            KernelSpec::from_table(space, &file.table, file.size_constant, file.modulus)?
        }
    })
}

fn cmd_op(args: &SpaceArgs, fpath: &Path, req: &OpRequest, format: Format, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let (space, spec) = args.build()?;
    let f = load_function(&space, fpath)?;
    let alpha = || required(req.alpha, "alpha", "the potential");
    let (name, params, g) = match req.op {
        OpName::Maximal => ("maximal", json!({}), maximal(&f)),
        OpName::MaximalS => ("maximal_s", json!({ "s": req.s }), maximal_s(&f, req.s)?),
        OpName::Sharp => ("sharp", json!({}), sharp_maximal(&f)),
        OpName::Cz => {
            let t = CzOperator::new(&space, kernel_for(&space, &spec, req)?)?;
            ("cz", json!({ "kernel": t.name() }), t.apply(&f)?)
        }
        OpName::Potential => {
            let a = alpha()?;
            ("potential", json!({ "alpha": a }), Potential::new(&space, a)?.apply(&f)?)
        }
        OpName::Commutator => {
            let bpath = req.b.ok_or_else(|| CliError::Usage("--b is required for commutator".into()))?;
            let b = load_function(&space, bpath)?;
            match req.inner {
                InnerOp::Cz => {
                    let t = CzOperator::new(&space, kernel_for(&space, &spec, req)?)?;
                    let g = Commutator::new(&b, &t)?.apply(&f)?;
                    ("commutator", json!({ "inner": t.name() }), g)
                }
                InnerOp::Potential => {
                    let a = alpha()?;
                    let pot = Potential::new(&space, a)?;
                    let g = Commutator::new(&b, &pot)?.apply(&f)?;
                    ("commutator", json!({ "inner": "potential", "alpha": a }), g)
                }
            }
        }
    };
    match format {
        Format::Json => emit(out, &json!({ "op": name, "params": params, "values": g.values() })),
        Format::Csv => {
            writeln!(out, "index,value")?;
            for (i, v) in g.values().iter().enumerate() {
                writeln!(out, "{i},{v}")?;
            }
            Ok(())
        }
    }
}

fn cmd_verify(
    config: &Path,
    seed: Option<u64>,
    dir: Option<&Path>,
    format: Format,
    out: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    let mut cfg = SuiteConfig::read(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let outcome = run_suite(&cfg)?;
    if let Some(dir) = dir {
        write_outputs(dir, &outcome.reports)?;
    }
    match format {
        Format::Json => emit(out, &outcome.reports)?,
        Format::Csv => write!(out, "{}", summary_csv(&outcome.reports)?)?,
    }
    if outcome.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = outcome
            .reports
            .iter()
            .filter(|r| !r.passed())
            .map(|r| r.check.as_str())
            .collect();
        Err(CliError::Failed(format!("failed checks: {}", failed.join(", "))))
    }
}

fn cmd_calibrate(n: usize, seed: u64, samples: usize, path: Option<&Path>, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let spec = SpaceSpec::Circle { n };
    let space = spec.build()?;
    let kernel = KernelSpec::circle_conjugate(&space)?;
    let cal = calibrate(&space, &spec.to_string(), &kernel, CalibratedParams::default(), seed, samples)?;
    let text = cal.to_json()? + "\n";
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}
