//! The `specjac` command line: argument parsing, the six commands and the
//! exit-code contract (0 ok, 2 genericity, 3 tolerance, 4 character,
//! 64 usage).

pub mod json;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::algebra::scalar::rational_to_string;
use crate::algebra::{Field, Rational};
use crate::curve::genus;
use crate::error::{Error, Result};
use crate::euler::{euler_limit, euler_ratio, growth_row, closed_forms, q_euler};
use crate::lax::{char_poly_t, gauge_fix_l, resample, sample_m, LaxMatrix};
use crate::poisson::{invariant_checks, jacobi_failures, jacobi_triples, structure_constants};
use crate::reconstruct::{coefficient_error, reconstruct};
use crate::sov::{canonical_bracket_check, gradient_fd_check, separate, Divisor};

pub use json::{Backend, JsonScalar};

pub const EXIT_OK: i32 = 0;
pub const EXIT_GENERICITY: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;
pub const EXIT_CHARACTER: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

/// Resampling attempts before giving up on a non-generic instance.
pub const MAX_RETRIES: usize = 8;

/// Multipliers on `rtol` for each family of checks.
pub const CURVE_FACTOR: f64 = 10.0;
pub const ROUNDTRIP_FACTOR: f64 = 1e3;
pub const BRACKET_FACTOR: f64 = 1e4;
pub const WW_FACTOR: f64 = 1e5;
/// Finite-difference gradient agreement uses the roundtrip factor.
pub const FD_STEP: f64 = 1e-3;

#[derive(Parser, Debug)]
#[command(name = "specjac", version, about = "Spectral curves, separated variables and Euler characteristics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample m, gauge-fix, separate, reconstruct and compare.
    Pipeline(Options),
    /// Exact table checks and float canonical-bracket checks.
    Verify(VerifyOptions),
    /// q-Euler characteristic, its limit, ratios and closed-form diagnostics.
    Euler(Options),
    /// Write a random matrix.
    Gen(GenOptions),
    /// Divisor of a matrix (read with --in, or sampled).
    Separate(Options),
    /// Matrix from {"curve", "divisor"} read with --in.
    Reconstruct(Options),
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    #[arg(long = "N", default_value_t = 2)]
    pub order: usize,
    #[arg(long = "n", default_value_t = 2)]
    pub pole_degree: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    #[arg(long, default_value_t = 1e-9)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct GenOptions {
    #[command(flatten)]
    pub common: Options,
    #[arg(long, value_enum, default_value_t = ShapeArg::M)]
    pub shape: ShapeArg,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyOptions {
    #[command(flatten)]
    pub common: Options,
    /// Random triples for the Jacobi check (all triples if fewer exist).
    #[arg(long, default_value_t = 1000)]
    pub jacobi_samples: usize,
    /// Sign convention for {z_i, w_j} = ±delta_ij z_i.
    #[arg(long, value_enum, default_value_t = ZwSign::Plus)]
    pub zw_sign: ZwSign,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    M,
    L,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ZwSign {
    /// `{z_i, w_j} = +delta_ij z_i`.
    Plus,
    /// `{z_i, w_j} = -delta_ij z_i`, the sign measured with this bracket.
    Minus,
}

impl Options {
    /// Bound for residuals that are already relative.
    fn limit(&self, factor: f64) -> f64 {
        self.rtol * factor
    }

    /// Bound for absolute residuals such as `{z_i, z_j}`.
    fn limit_abs(&self, factor: f64) -> f64 {
        self.rtol * factor + self.atol
    }

    fn backend_or(&self, default: Backend) -> Backend {
        self.backend.unwrap_or(default)
    }

    fn read_input(&self) -> Result<Value> {
        let path = self.input.as_ref().ok_or_else(|| Error::Domain("this command needs --in".into()))?;
        let text = std::fs::read_to_string(path).map_err(|e| Error::Serialization(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Serialization(format!("{}: {e}", path.display())))
    }
}

/// A command's result: the JSON document and the checks that failed.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub failures: Vec<String>,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, failures: Vec::new() }
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            EXIT_OK
        } else {
            EXIT_TOLERANCE
        }
    }
}

/// A failing check is recorded when `value > limit`.
fn check(failures: &mut Vec<String>, name: &str, value: f64, limit: f64) {
    if value.is_nan() || value > limit {
        failures.push(format!("{name}: {value:e} exceeds {limit:e}"));
    }
}

/// Error tagged with the stage that raised it.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub error: Error,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.stage, self.error)
    }
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> std::result::Result<T, StageError>;
}

impl<T> Stage<T> for Result<T> {
    fn stage(self, stage: &'static str) -> std::result::Result<T, StageError> {
        self.map_err(|error| StageError { stage, error })
    }
}

type CmdResult = std::result::Result<Outcome, StageError>;

fn to_float<F: Field>(l: &LaxMatrix<F>) -> LaxMatrix<Complex64> {
    l.map(|x| x.to_complex())
}

fn lax_any_to_float(v: &Value) -> Result<LaxMatrix<Complex64>> {
    match json::detect_backend(v) {
        Backend::Exact => Ok(to_float(&json::lax_from_json::<Rational>(v)?)),
        Backend::Float => json::lax_from_json::<Complex64>(v),
    }
}

fn curve_any_to_float(v: &Value) -> Result<crate::curve::SpectralCurve<Complex64>> {
    match json::detect_backend(v) {
        Backend::Exact => Ok(json::curve_from_json::<Rational>(v)?.map(|x| x.to_complex())),
        Backend::Float => json::curve_from_json::<Complex64>(v),
    }
}

struct PipelineRun<F> {
    l: LaxMatrix<F>,
    curve_json: Value,
    divisor: Divisor,
    float_l: LaxMatrix<Complex64>,
    reconstruction: crate::reconstruct::Reconstruction,
}

fn pipeline_attempt<F: JsonScalar>(o: &Options, seed: u64) -> Result<PipelineRun<F>> {
    let m = sample_m::<F>(o.order, o.pole_degree, seed)?;
    let l = gauge_fix_l(&m)?;
    let curve = char_poly_t(&l)?;
    let float_l = to_float(&l);
    let divisor = separate(&float_l, seed)?;
    let float_curve = curve.map(|x| x.to_complex());
    let reconstruction = reconstruct(&divisor, &float_curve)?;
    Ok(PipelineRun { curve_json: json::curve_to_json(&curve), l, divisor, float_l, reconstruction })
}

fn pipeline_report<F: JsonScalar>(o: &Options) -> CmdResult {
    let g = genus(o.order, o.pole_degree).stage("validate")?;
    if o.pole_degree < 2 {
        return Err(StageError { stage: "validate", error: Error::Domain("the pipeline needs n >= 2".into()) });
    }
    let sampled = resample(o.seed, MAX_RETRIES, |s| pipeline_attempt::<F>(o, s)).stage("pipeline")?;
    let run = sampled.value;
    let curve = char_poly_t(&run.float_l).stage("curve")?;
    let residuals = run.divisor.curve_residuals(&curve);
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let error = coefficient_error(&run.float_l, &run.reconstruction.matrix);
    let mut failures = Vec::new();
    check(&mut failures, "curve residual", max_residual, o.limit(CURVE_FACTOR));
    check(&mut failures, "roundtrip error", error, o.limit(ROUNDTRIP_FACTOR));
    if run.divisor.len() != g {
        failures.push(format!("divisor has {} points, genus is {g}", run.divisor.len()));
    }
    let report = json!({
        "command": "pipeline",
        "N": o.order,
        "n": o.pole_degree,
        "backend": F::BACKEND,
        "seed": o.seed,
        "seed_used": sampled.seed,
        "genericity_retries": sampled.rejections,
        "genus": g,
        "l": json::lax_to_json(&run.l),
        "curve": run.curve_json,
        "divisor": json::to_value(&run.divisor).stage("serialize")?,
        "curve_residuals": residuals,
        "max_curve_residual": max_residual,
        "roundtrip_error": error,
        "reconstruction": json::to_value(&run.reconstruction).stage("serialize")?,
        "tolerances": {"curve": o.limit(CURVE_FACTOR), "roundtrip": o.limit(ROUNDTRIP_FACTOR)},
        "failures": failures,
    });
    Ok(Outcome { report, failures })
}

pub fn cmd_pipeline(o: &Options) -> CmdResult {
    match o.backend_or(Backend::Float) {
        Backend::Exact => pipeline_report::<Rational>(o),
        Backend::Float => pipeline_report::<Complex64>(o),
    }
}

fn max_abs_string(values: impl Iterator<Item = Rational>) -> String {
    values.map(|v| num_traits::Signed::abs(&v)).max().map_or_else(|| "0".to_string(), |v| rational_to_string(&v))
}

/// Involution and centrality residuals; exact ones are reported as
/// rational strings so that a zero reads `"0"`.
fn invariant_json(p: &crate::poisson::PoissonStructure, o: &Options) -> Result<(Value, bool)> {
    match o.backend_or(Backend::Exact) {
        Backend::Exact => {
            let m = resample(o.seed, MAX_RETRIES, |s| sample_m::<Rational>(o.order, o.pole_degree, s))?.value;
            let r = invariant_checks(p, &m)?;
            let v = json!({
                "backend": Backend::Exact,
                "involution": max_abs_string(r.involution_violations.iter().map(|x| x.2.clone())),
                "centrality": max_abs_string(r.centrality_violations.iter().map(|x| x.2.clone())),
            });
            Ok((v, r.holds()))
        }
        Backend::Float => {
            let m = resample(o.seed, MAX_RETRIES, |s| sample_m::<Complex64>(o.order, o.pole_degree, s))?.value;
            let r = invariant_checks(p, &m)?;
            let v = json!({"backend": Backend::Float, "involution": r.involution, "centrality": r.centrality});
            Ok((v, r.involution.max(r.centrality) <= o.limit_abs(BRACKET_FACTOR)))
        }
    }
}

pub fn cmd_verify(v: &VerifyOptions) -> CmdResult {
    let o = &v.common;
    let g = genus(o.order, o.pole_degree).stage("validate")?;
    let p = structure_constants(o.order, o.pole_degree).stage("structure constants")?;
    let mut failures = Vec::new();
    let antisymmetric = p.is_antisymmetric();
    if !antisymmetric {
        failures.push("structure constants are not antisymmetric".into());
    }
    let triples = jacobi_triples(p.dim(), v.jacobi_samples, o.seed);
    let jacobi = jacobi_failures(&p, &triples);
    if jacobi > 0 {
        failures.push(format!("Jacobi identity fails on {jacobi} of {} triples", triples.len()));
    }
    let (invariants, holds) = invariant_json(&p, o).stage("invariants")?;
    if !holds {
        failures.push("spectral invariants are not in involution or not central".into());
    }
    let brackets = if g == 0 {
        json!({"skipped": "genus 0"})
    } else {
        let sampled = resample(o.seed, MAX_RETRIES, |s| {
            let m = sample_m::<Complex64>(o.order, o.pole_degree, s)?;
            let (divisor, report) = canonical_bracket_check(&p, &m, s)?;
            let fd = gradient_fd_check(&m, &divisor, FD_STEP)?;
            Ok((report, fd))
        })
        .stage("canonical brackets")?;
        let (r, fd) = sampled.value;
        let zw = match v.zw_sign {
            ZwSign::Plus => r.r_zw,
            ZwSign::Minus => r.r_zw_opposite,
        };
        check(&mut failures, "{z_i, z_j}", r.r_zz, o.limit_abs(BRACKET_FACTOR));
        check(&mut failures, "{z_i, w_j}", zw, o.limit(BRACKET_FACTOR));
        check(&mut failures, "{w_i, w_j}", r.r_ww, o.limit(WW_FACTOR));
        check(&mut failures, "gradient vs finite difference", fd, o.limit(ROUNDTRIP_FACTOR));
        json!({
            "seed_used": sampled.seed,
            "zw_sign": format!("{:?}", v.zw_sign).to_lowercase(),
            "r_zz": r.r_zz,
            "r_zw": r.r_zw,
            "r_zw_opposite": r.r_zw_opposite,
            "r_ww": r.r_ww,
            "r_ww_absolute": r.r_ww_absolute,
            "gradient_fd": fd,
        })
    };
    let report = json!({
        "command": "verify",
        "N": o.order,
        "n": o.pole_degree,
        "seed": o.seed,
        "antisymmetric": antisymmetric,
        "jacobi_triples": triples.len(),
        "jacobi_failures": jacobi,
        "invariants": invariants,
        "brackets": brackets,
        "tolerances": {"zz": o.limit_abs(BRACKET_FACTOR), "brackets": o.limit(BRACKET_FACTOR), "ww": o.limit(WW_FACTOR), "gradient_fd": o.limit(ROUNDTRIP_FACTOR)},
        "failures": failures,
    });
    Ok(Outcome { report, failures })
}

/// Number of consecutive ratios reported by `euler`.
pub const RATIO_SPAN: usize = 4;

pub fn cmd_euler(o: &Options) -> CmdResult {
    if o.backend == Some(Backend::Float) {
        return Err(StageError { stage: "validate", error: Error::Domain("euler is exact only".into()) });
    }
    let chi_q = q_euler(o.order, o.pole_degree).stage("q_euler")?;
    let chi = euler_limit(&chi_q).stage("limit")?;
    let ratios: Vec<Value> = (o.pole_degree..o.pole_degree + RATIO_SPAN)
        .map(|n| euler_ratio(o.order, n).and_then(|r| json::to_value(&r)))
        .collect::<Result<_>>()
        .stage("ratios")?;
    let closed = closed_forms(o.order, o.pole_degree).stage("closed forms")?;
    let growth = growth_row(o.order, o.pole_degree).stage("growth")?;
    let report = json!({
        "command": "euler",
        "N": o.order,
        "n": o.pole_degree,
        "genus": genus(o.order, o.pole_degree).stage("validate")?,
        "chi": rational_to_string(&chi),
        "chi_q": json::to_value(&chi_q).stage("serialize")?,
        "ratios": ratios,
        "closed_forms": json::to_value(&closed).stage("serialize")?,
        "growth": json::to_value(&growth).stage("serialize")?,
    });
    Ok(Outcome::ok(report))
}

fn gen_report<F: JsonScalar>(o: &Options, shape: ShapeArg) -> Result<Value> {
    let sampled = resample(o.seed, MAX_RETRIES, |s| {
        let m = sample_m::<F>(o.order, o.pole_degree, s)?;
        match shape {
            ShapeArg::M => Ok(m),
            ShapeArg::L => gauge_fix_l(&m),
        }
    })?;
    let mut v = json::lax_to_json(&sampled.value);
    v["seed"] = json!(o.seed);
    v["seed_used"] = json!(sampled.seed);
    Ok(v)
}

pub fn cmd_gen(g: &GenOptions) -> CmdResult {
    let o = &g.common;
    let v = match o.backend_or(Backend::Float) {
        Backend::Exact => gen_report::<Rational>(o, g.shape),
        Backend::Float => gen_report::<Complex64>(o, g.shape),
    }
    .stage("gen")?;
    Ok(Outcome::ok(v))
}

pub fn cmd_separate(o: &Options) -> CmdResult {
    let (lax, seed) = match &o.input {
        Some(_) => (lax_any_to_float(&o.read_input().stage("read")?).stage("read")?, o.seed),
        None => {
            let s = resample(o.seed, MAX_RETRIES, |s| {
                let m = sample_m::<Complex64>(o.order, o.pole_degree, s)?;
                separate(&m, s).map(|_| m)
            })
            .stage("sample")?;
            (s.value, s.seed)
        }
    };
    let divisor = separate(&lax, seed).stage("separate")?;
    let curve = char_poly_t(&lax).stage("curve")?;
    let residuals = divisor.curve_residuals(&curve);
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let mut failures = Vec::new();
    check(&mut failures, "curve residual", max_residual, o.limit(CURVE_FACTOR));
    let report = json!({
        "command": "separate",
        "N": lax.order(),
        "n": lax.pole_degree(),
        "curve": json::curve_to_json(&curve),
        "divisor": json::to_value(&divisor).stage("serialize")?,
        "curve_residuals": residuals,
        "max_curve_residual": max_residual,
        "failures": failures,
    });
    Ok(Outcome { report, failures })
}

pub fn cmd_reconstruct(o: &Options) -> CmdResult {
    let input = o.read_input().stage("read")?;
    let curve_v = input.get("curve").ok_or_else(|| Error::Serialization("missing field \"curve\"".into())).stage("read")?;
    let divisor_v = input.get("divisor").ok_or_else(|| Error::Serialization("missing field \"divisor\"".into())).stage("read")?;
    let curve = curve_any_to_float(curve_v).stage("read")?;
    let divisor: Divisor = json::from_value(divisor_v).stage("read")?;
    let r = reconstruct(&divisor, &curve).stage("reconstruct")?;
    let rebuilt = char_poly_t(&r.matrix).stage("curve")?;
    let curve_error = curve
        .coefficients()
        .iter()
        .zip(rebuilt.coefficients())
        .map(|(a, b)| (a.clone() - b.clone()).max_magnitude())
        .fold(0.0, f64::max)
        / curve.coefficients().iter().map(|t| t.max_magnitude()).fold(1.0, f64::max);
    let mut failures = Vec::new();
    check(&mut failures, "curve of the reconstruction", curve_error, o.limit(ROUNDTRIP_FACTOR));
    let report = json!({
        "command": "reconstruct",
        "N": curve.order(),
        "n": curve.pole_degree(),
        "divisor_source": divisor.source,
        "l": json::lax_to_json(&r.matrix),
        "rcond": r.rcond,
        "sweep_residual": r.sweep_residual,
        "first_column_residual": r.first_column_residual,
        "curve_error": curve_error,
        "failures": failures,
    });
    Ok(Outcome { report, failures })
}

/// Cap the rayon pool at `SPECJAC_THREADS` when it is set.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SPECJAC_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Domain(format!("SPECJAC_THREADS must be a positive integer, got {raw:?}")))?;
    // a pool set up earlier in the process is kept as is
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Pipeline(o) => cmd_pipeline(o),
        Command::Verify(v) => cmd_verify(v),
        Command::Euler(o) => cmd_euler(o),
        Command::Gen(g) => cmd_gen(g),
        Command::Separate(o) => cmd_separate(o),
        Command::Reconstruct(o) => cmd_reconstruct(o),
    }
}

fn out_path(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Pipeline(o) | Command::Euler(o) | Command::Separate(o) | Command::Reconstruct(o) => o.out.as_ref(),
        Command::Verify(v) => v.common.out.as_ref(),
        Command::Gen(g) => g.common.out.as_ref(),
    }
}

/// Run the command line and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("specjac: {e}");
        return EXIT_USAGE;
    }
    match dispatch(&cli) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.report).expect("JSON values always serialize") + "\n";
            match out_path(&cli) {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprintln!("specjac: {}: {e}", path.display());
                        return EXIT_USAGE;
                    }
                }
                None => print!("{text}"),
            }
            for f in &outcome.failures {
                eprintln!("specjac: check failed: {f}");
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("specjac: {e}");
            e.error.exit_code()
        }
    }
}
