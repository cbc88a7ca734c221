//! The `lbm-quartic` command line.

pub mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bench::{run_plane_wave, run_shear_decay, run_sphere};
use crate::error::Error;
use crate::exact::{fmt_f64_digits, fmt_rational, from_f64_decimal, to_significant};
use crate::mrt::{write_fields_binary, write_fields_csv, FieldFormat, FieldSnapshot};
use crate::output::{Doc, OutputFormat};
use crate::params::{ExactParameterSet, ParameterSource, RateGroup, SchemeParameters};
use crate::spectral::{
    build_collision_matrix, dispersion_errors, dispersion_json, fit_order, hydrodynamic_branches, log_spaced, write_dispersion_csv,
    Branch, DispersionError, ErrorCurve, OrderFit, ReferenceCoefficients,
};
use crate::stencil::{write_matrix_csv, MatrixPart, MomentMatrix, MOMENT_NAMES};
use crate::verify::run_criteria;
use config::{CommonArgs, ConfigError, ConfigFile, Experiment, FitArgs, Layered, MatrixArgs, RunArgs, ScanArgs, SourceArgs, VerifyArgs};

/// Relative output paths land here when set.
pub const OUTPUT_DIR_VAR: &str = "LBM_QUARTIC_OUTPUT_DIR";

/// Digits used by `params` when `--digits` is absent.
pub const PARAMS_DEFAULT_DIGITS: usize = 17;

#[derive(Debug, Parser)]
#[command(name = "lbm-quartic", version, about = "D3Q27 lattice Boltzmann acoustics with quartic relaxation parameters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a resolved parameter set with its transport coefficients.
    Params {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Print the moment matrix, its row norms or its inverse as exact values.
    Matrix {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Hydrodynamic eigenvalues of the amplification matrix over a range of |k|.
    Spectra {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Log-log slopes of the dispersion errors in a `spectra` table.
    FitOrder {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Run an experiment on the lattice.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the acceptance checks.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        verify: VerifyArgs,
    },
}

/// Why the command stopped.
#[derive(Debug)]
pub enum Failure {
    /// Exit code 2.
    Config(ConfigError),
    /// Exit code 1.
    Verification(Vec<u8>),
    /// Exit code 1.
    Runtime(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Verification(_) | Failure::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "configuration error in {}", e),
            Failure::Verification(ids) => write!(f, "verification failed for criteria {ids:?}"),
            Failure::Runtime(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

/// Parameter problems are configuration errors; the message names the field.
fn parameter_failure(e: Error) -> Failure {
    let field = match &e {
        Error::StabilityViolation { name, .. } | Error::InvalidParameter { name, .. } | Error::NegativeViscosity { name, .. } => {
            Some(name.replace('_', "-"))
        }
        Error::SingularCombination(_) => Some("c0/sigma-e/sigma-x".to_string()),
        Error::Mask(_) | Error::Experiment(_) => Some("experiment".to_string()),
        _ => None,
    };
    match field {
        Some(field) => Failure::Config(ConfigError::new(field, e.to_string())),
        None => Failure::Runtime(e),
    }
}

type Outcome = std::result::Result<(), Failure>;

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Params { common, source } => {
            let (common, file) = load(common)?;
            params(&common, &source.layer(&file)?)
        }
        Command::Matrix { common, matrix } => {
            let (common, file) = load(common)?;
            self::matrix(&common, &matrix.layer(&file)?)
        }
        Command::Spectra { common, source, scan } => {
            let (common, file) = load(common)?;
            spectra(&common, &source.layer(&file)?, &scan.layer(&file)?)
        }
        Command::FitOrder { common, fit } => {
            let (common, file) = load(common)?;
            fit_orders(&common, &fit.layer(&file)?)
        }
        Command::Run { common, source, run } => {
            let (common, file) = load(common)?;
            experiment(&common, &source.layer(&file)?, &run.layer(&file)?)
        }
        Command::Verify { common, verify } => {
            let (common, file) = load(common)?;
            self::verify(&common, &verify.layer(&file)?)
        }
    }
}

/// Reads `--config`, merges the common flags and sizes the thread pool.
fn load(common: CommonArgs) -> std::result::Result<(CommonArgs, ConfigFile), Failure> {
    let file = match &common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let common = common.layer(&file)?;
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(ConfigError::new("threads", "must be at least 1").into());
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if common.digits == Some(0) {
        return Err(ConfigError::new("digits", "must be at least 1").into());
    }
    Ok((common, file))
}

fn resolve_path(p: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_VAR) {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

fn create(p: &Path) -> std::result::Result<BufWriter<File>, Failure> {
    let p = resolve_path(p);
    File::create(&p).map(BufWriter::new).map_err(|e| {
        Failure::Config(ConfigError::new("output", format!("cannot create {}: {e}", p.display())))
    })
}

/// `--output` or standard output.
fn sink(common: &CommonArgs) -> std::result::Result<Box<dyn Write>, Failure> {
    match &common.output {
        Some(p) => Ok(Box::new(create(p)?)),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn emit(common: &CommonArgs, text: &str) -> Outcome {
    let mut out = sink(common)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn resolve_source(source: &SourceArgs) -> std::result::Result<(ParameterSource, ExactParameterSet, SchemeParameters), Failure> {
    let src = source.source()?;
    let exact = src.resolve_exact().map_err(parameter_failure)?;
    let scheme = src.resolve().map_err(parameter_failure)?;
    scheme.transport().map_err(parameter_failure)?;
    Ok((src, exact, scheme))
}

/// `(name, exact value)` rows of a parameter set; `c0` itself may be irrational.
fn parameter_rows(exact: &ExactParameterSet) -> Vec<(String, crate::exact::Rational)> {
    let mut rows = vec![
        ("c0_sq".to_string(), exact.c0_sq.clone()),
        ("theta".to_string(), exact.theta()),
        ("c1".to_string(), exact.c1.clone()),
        ("c2".to_string(), exact.c2.clone()),
        ("c3".to_string(), exact.c3.clone()),
        ("beta".to_string(), exact.beta.clone()),
        ("xi".to_string(), exact.xi.clone()),
    ];
    for g in RateGroup::ALL {
        rows.push((g.name().to_string(), exact.rate_of(g)));
    }
    for g in RateGroup::ALL {
        rows.push((g.name().replacen("s_", "sigma_", 1), exact.sigma_of(g).clone()));
    }
    let [mu, zeta, gamma] = exact.transport_exact();
    rows.push(("nu".to_string(), mu.clone()));
    rows.push(("mu".to_string(), mu));
    rows.push(("zeta".to_string(), zeta));
    rows.push(("gamma".to_string(), gamma));
    rows
}

fn params(common: &CommonArgs, source: &SourceArgs) -> Outcome {
    let (src, exact, scheme) = resolve_source(source)?;
    let digits = common.digits.unwrap_or(PARAMS_DEFAULT_DIGITS);
    // exact when c0 is the decimal it prints as
    let c0_dec = from_f64_decimal(scheme.equilibrium.c0);
    let c0 = if &c0_dec * &c0_dec == exact.c0_sq {
        to_significant(&c0_dec, digits)
    } else {
        fmt_f64_digits(scheme.equilibrium.c0, Some(digits))
    };
    let rows = parameter_rows(&exact);
    let text = match common.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["name", "value"]).map_err(Error::from)?;
            w.write_record(["source", src.label()]).map_err(Error::from)?;
            w.write_record(["c0", c0.as_str()]).map_err(Error::from)?;
            for (name, v) in &rows {
                w.write_record([name.as_str(), to_significant(v, digits).as_str()]).map_err(Error::from)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf8")
        }
        OutputFormat::Json => {
            let find = |n: &str| Doc::exact(&rows.iter().find(|r| r.0 == n).expect("row").1, Some(digits));
            let equilibrium = ["c0_sq", "theta", "c1", "c2", "c3", "beta", "xi"].map(|n| (n, find(n)));
            let mut eq = vec![("c0".to_string(), Doc::Num(c0))];
            eq.extend(equilibrium.into_iter().map(|(n, d)| (n.to_string(), d)));
            let rates = RateGroup::ALL.map(|g| (g.name(), find(g.name())));
            let sigmas = RateGroup::ALL.map(|g| {
                let n = g.name().replacen("s_", "sigma_", 1);
                let d = find(&n);
                (n, d)
            });
            let transport = ["mu", "zeta", "gamma", "nu"].map(|n| (n, find(n)));
            Doc::obj([
                ("source", Doc::Str(src.label().to_string())),
                ("equilibrium", Doc::Obj(eq)),
                ("rates", Doc::obj(rates)),
                ("sigma", Doc::obj(sigmas)),
                ("transport", Doc::obj(transport)),
            ])
            .render()
        }
    };
    emit(common, &text)
}

fn matrix(common: &CommonArgs, args: &MatrixArgs) -> Outcome {
    let m = MomentMatrix::d3q27();
    let part = args.part.unwrap_or(MatrixPart::Rows);
    match common.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let mut out = sink(common)?;
            write_matrix_csv(&mut out, m, part)?;
            out.flush()?;
            Ok(())
        }
        OutputFormat::Json => {
            let doc = match part {
                MatrixPart::Rows => Doc::obj([
                    ("names", Doc::Arr(MOMENT_NAMES.iter().map(|n| Doc::Str(n.to_string())).collect())),
                    (
                        "rows",
                        Doc::Arr(m.rows().iter().map(|r| Doc::Arr(r.iter().map(|v| Doc::Num(v.to_string())).collect())).collect()),
                    ),
                ]),
                MatrixPart::Norms => Doc::Arr(
                    m.row_norms()
                        .iter()
                        .enumerate()
                        .map(|(i, d)| Doc::obj([("name", Doc::Str(MOMENT_NAMES[i].to_string())), ("norm", Doc::Num(d.to_string()))]))
                        .collect(),
                ),
                MatrixPart::Inverse => Doc::obj([(
                    "inverse",
                    Doc::Arr(m.inverse().iter().map(|r| Doc::Arr(r.iter().map(|v| Doc::Str(fmt_rational(v))).collect())).collect()),
                )]),
            };
            emit(common, &doc.render())
        }
    }
}

fn spectra(common: &CommonArgs, source: &SourceArgs, scan: &ScanArgs) -> Outcome {
    let (_, _, params) = resolve_source(source)?;
    let scan = scan.scan()?;
    let m = MomentMatrix::d3q27();
    let c = build_collision_matrix(m, &params);
    let kmags = log_spaced(scan.kmin, scan.kmax, scan.points);
    let res = hydrodynamic_branches(&c, m, scan.direction, &kmags)?;
    let errors = dispersion_errors(&res, &ReferenceCoefficients::from_params(&params)?);
    match common.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let mut out = sink(common)?;
            write_dispersion_csv(&mut out, scan.direction, &errors, common.digits)?;
            out.flush()?;
            Ok(())
        }
        OutputFormat::Json => emit(common, &Doc::from_value(&dispersion_json(scan.direction, &errors), common.digits).render()),
    }
}

/// Reads the rows of a `spectra` CSV back.
pub fn read_dispersion_csv(path: &Path) -> std::result::Result<Vec<DispersionError>, Failure> {
    let bad = |msg: String| Failure::Config(ConfigError::new("input", format!("{}: {msg}", path.display())));
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| bad(format!("missing column {name}")));
    let cols = ["kmag", "branch", "re_gamma", "im_gamma", "ref_re", "ref_im", "err_re", "err_im"].map(col);
    let mut idx = [0usize; 8];
    for (i, c) in cols.into_iter().enumerate() {
        idx[i] = c?;
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| -> std::result::Result<f64, Failure> {
            rec[idx[i]].parse::<f64>().map_err(|_| bad(format!("row {}: {} is not a number", line + 1, &rec[idx[i]])))
        };
        let branch = Branch::ALL
            .into_iter()
            .find(|b| b.name() == &rec[idx[1]])
            .ok_or_else(|| bad(format!("row {}: unknown branch {}", line + 1, &rec[idx[1]])))?;
        out.push(DispersionError {
            kmag: num(0)?,
            branch,
            gamma: num_complex::Complex64::new(num(2)?, num(3)?),
            reference: num_complex::Complex64::new(num(4)?, num(5)?),
            err_re: num(6)?,
            err_im: num(7)?,
        });
    }
    Ok(out)
}

fn fit_orders(common: &CommonArgs, args: &FitArgs) -> Outcome {
    let input = args.input.as_ref().ok_or_else(|| ConfigError::new("input", "a spectra CSV is required"))?;
    let rows = read_dispersion_csv(input)?;
    if rows.is_empty() {
        return Err(ConfigError::new("input", "the table has no rows").into());
    }
    let lo = args.kmin.unwrap_or_else(|| rows.iter().map(|e| e.kmag).fold(f64::INFINITY, f64::min));
    let hi = args.kmax.unwrap_or_else(|| rows.iter().map(|e| e.kmag).fold(0.0, f64::max));
    if !(hi >= lo) {
        return Err(ConfigError::new("kmax", format!("{hi} is below kmin = {lo}")).into());
    }
    let fits = ErrorCurve::ALL
        .iter()
        .map(|c| {
            let (k, e) = c.extract(&rows);
            let mut f = fit_order(&k, &e, (lo, hi))?;
            f.branch = c.name().to_string();
            Ok(f)
        })
        .collect::<crate::Result<Vec<OrderFit>>>()?;
    let d = common.digits;
    let text = match common.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => Doc::from_serialize(&fits, d).render(),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["branch", "slope", "intercept", "residual", "kmin", "kmax", "floored"]).map_err(Error::from)?;
            for f in &fits {
                w.write_record([
                    f.branch.clone(),
                    fmt_f64_digits(f.slope, d),
                    fmt_f64_digits(f.intercept, d),
                    fmt_f64_digits(f.residual, d),
                    fmt_f64_digits(f.window[0], d),
                    fmt_f64_digits(f.window[1], d),
                    f.floored.to_string(),
                ])
                .map_err(Error::from)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf8")
        }
    };
    emit(common, &text)
}

fn write_fields(run: &RunArgs, snap: &FieldSnapshot, digits: Option<usize>) -> Outcome {
    if let Some(p) = &run.fields {
        let mut out = create(p)?;
        match run.field_format.unwrap_or(FieldFormat::Csv) {
            FieldFormat::Csv => write_fields_csv(&mut out, snap, digits)?,
            FieldFormat::Binary => write_fields_binary(&mut out, snap)?,
        }
        out.flush()?;
    }
    Ok(())
}

/// `key,value` rows of a flat JSON object; nested values are skipped.
fn summary_csv(doc: &Doc) -> std::result::Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).map_err(Error::from)?;
    if let Doc::Obj(items) = doc {
        for (k, v) in items {
            let s = match v {
                Doc::Num(s) | Doc::Str(s) => s.clone(),
                Doc::Bool(b) => b.to_string(),
                Doc::Null => String::new(),
                _ => continue,
            };
            w.write_record([k.as_str(), s.as_str()]).map_err(Error::from)?;
        }
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf8"))
}

fn experiment(common: &CommonArgs, source: &SourceArgs, run: &RunArgs) -> Outcome {
    let (src, _, params) = resolve_source(source)?;
    let exp = run.experiment()?;
    let d = common.digits;
    let (name, config, summary) = match &exp {
        Experiment::Shear(cfg) => {
            let r = run_shear_decay(cfg, &params).map_err(parameter_failure)?;
            if let Some(p) = &run.series {
                r.series.write_csv(create(p)?, d)?;
            }
            write_fields(run, &r.fields, d)?;
            ("shear", Doc::from_serialize(cfg, d), Doc::from_serialize(&r.summary, d))
        }
        Experiment::Wave(cfg) => {
            let r = run_plane_wave(cfg, &params).map_err(parameter_failure)?;
            if let Some(p) = &run.series {
                r.series.write_csv(create(p)?, d)?;
            }
            write_fields(run, &r.fields, d)?;
            ("wave", Doc::from_serialize(cfg, d), Doc::from_serialize(&r.summary, d))
        }
        Experiment::Sphere(cfg) => {
            let r = run_sphere(cfg, &params).map_err(parameter_failure)?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(p) = &run.series {
                r.write_scatter_csv(create(p)?, d)?;
            }
            write_fields(run, &r.fields, d)?;
            ("sphere", Doc::from_serialize(cfg, d), Doc::from_serialize(&r, d))
        }
    };
    let text = match common.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => Doc::obj([
            ("experiment", Doc::Str(name.to_string())),
            ("parameters", Doc::Str(src.label().to_string())),
            ("c0", Doc::float(params.equilibrium.c0, d)),
            ("config", config),
            ("summary", summary),
        ])
        .render(),
        OutputFormat::Csv => summary_csv(&summary)?,
    };
    emit(common, &text)
}

fn verify(common: &CommonArgs, args: &VerifyArgs) -> Outcome {
    let only = args.criteria()?;
    let outcomes = run_criteria(&only);
    let text = match common.format {
        None => outcomes.iter().map(|o| format!("{o}\n")).collect::<String>(),
        Some(OutputFormat::Json) => Doc::from_serialize(&outcomes, common.digits).render(),
        Some(OutputFormat::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["id", "name", "passed", "detail", "elapsed_s", "limit_s"]).map_err(Error::from)?;
            for o in &outcomes {
                w.write_record([
                    o.id.to_string(),
                    o.name.to_string(),
                    o.passed.to_string(),
                    o.detail.clone(),
                    fmt_f64_digits(o.elapsed_s, common.digits),
                    fmt_f64_digits(o.limit_s, common.digits),
                ])
                .map_err(Error::from)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf8")
        }
    };
    emit(common, &text)?;
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed))
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}
