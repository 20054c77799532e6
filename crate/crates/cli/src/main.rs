//! `wienerlab` command-line front end.
//!
//! Exit status: 0 on success, 1 on usage or schema errors, 2 on mathematical
//! failure. Failures write a one-line diagnostic JSON object to stderr.

// `!(x <= tol)` also fails on NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use wienerlab::inversion::{invert_stable_detailed, DecayModel, DecayReport};
use wienerlab::io::{filter_from_json, filter_to_json, generator_from_json, kernel_to_csv, to_json, weight_from_json};
use wienerlab::spectrum::{lemma_bound_check_with_radius, lemma_radius_limit, DEFAULT_TARGET_GAP};
use wienerlab::splines::{
    BSplineSymbol, GreenPower, DEFAULT_KERNEL_RADIUS, DEFAULT_N_TRUNC, DEFAULT_OVERSAMPLING,
};
use wienerlab::weights::DEFAULT_GRS_TOL;
use wienerlab::{
    decay_fit, derivative_growth, invert_singular_1d, lagrange_kernel_fourier, lagrange_kernel_space,
    min_modulus_certified, reproduction_check, submultiplicative_check, Filter, Generator, IndexBox, LagrangeKernel,
    MultiIndex,
};

const THREADS_VAR: &str = "WIENERLAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "wienerlab", version, about = "Certified convolution inverses and cardinal spline kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stable inverse of a filter whose symbol has no zero
    Invert(InvertArgs),
    /// Slowly increasing inverse of a 1-D filter with unit-circle zeros
    InvertSingular(SingularArgs),
    /// GRS limit of a weight along a direction
    GrsCheck(GrsArgs),
    /// Certified lower bound on the symbol modulus
    SymbolMin(SymbolMinArgs),
    /// Cardinal spline Lagrange kernel by the space or Fourier route
    SplineLagrange(SplineArgs),
    /// Reproduction of a truncated power by the cubic Lagrange kernel
    Reproduce(ReproduceArgs),
    /// Exponential versus algebraic decay fit of a filter
    DecayFit(DecayArgs),
    /// Moment-sum bound Σ kⁿ e^{−ck} ≤ M n!/Rⁿ, optionally with a filter's derivative growth
    LemmaCheck(LemmaArgs),
}

#[derive(Args, Debug)]
struct InvertArgs {
    /// Filter JSON file
    #[arg(long)]
    filter: PathBuf,
    /// Half-width of the output window
    #[arg(long, default_value_t = 40)]
    radius: usize,
    /// Residual tolerance on the verification box
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Output Filter JSON; the report goes to `<out>.report.json`
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SingularArgs {
    #[arg(long)]
    filter: PathBuf,
    #[arg(long, default_value_t = 40)]
    radius: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GrsArgs {
    /// Weight JSON, inline or as a file path
    #[arg(long)]
    weight: String,
    /// Direction, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    k: Vec<i64>,
    /// Largest multiple m sampled (powers of two up to this)
    #[arg(long, default_value_t = 1 << 20)]
    m_max: u64,
    /// Half-width of the box for the submultiplicativity scan
    #[arg(long, default_value_t = 12)]
    check_radius: usize,
}

#[derive(Args, Debug)]
struct SymbolMinArgs {
    #[arg(long)]
    filter: PathBuf,
    /// Grid minima below this are reported as likely zeros
    #[arg(long, default_value_t = DEFAULT_TARGET_GAP)]
    target_gap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Route {
    Space,
    Fourier,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SymbolChoice {
    /// `|ω|^{−2m}` for odd degree 2m − 1, the B-spline symbol for even degree
    Auto,
    Green,
    Bspline,
}

#[derive(Args, Debug)]
struct SplineArgs {
    /// B-spline degree of the generator
    #[arg(long, default_value_t = 3, conflicts_with = "generator")]
    degree: usize,
    /// Generator JSON, inline or as a file path (overrides --degree)
    #[arg(long)]
    generator: Option<String>,
    #[arg(long, value_enum, default_value_t = Route::Space)]
    route: Route,
    /// Fourier symbol used by the Fourier route
    #[arg(long, value_enum, default_value_t = SymbolChoice::Auto)]
    symbol: SymbolChoice,
    /// Samples per unit
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLING)]
    oversampling: usize,
    /// Kernel window half-width K
    #[arg(long, default_value_t = DEFAULT_KERNEL_RADIUS)]
    radius: usize,
    #[arg(long, default_value_t = DEFAULT_N_TRUNC)]
    n_trunc: usize,
    /// Inverse-filter coefficients at or below this are dropped (space route)
    #[arg(long, default_value_t = 1e-14)]
    tail_tol: f64,
    /// Largest admissible space/Fourier disagreement for `--route both`
    #[arg(long, default_value_t = 1e-6)]
    agreement_tol: f64,
    /// Kernel CSV (space kernel for `--route both`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of the Fourier kernel for `--route both`
    #[arg(long)]
    fourier_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    /// `x₊ⁿ`
    Plus,
    /// `|x|ⁿ`
    Abs,
    /// `xⁿ`
    Monomial,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(long, value_enum, default_value_t = Target::Plus)]
    target: Target,
    #[arg(long, default_value_t = 3)]
    power: i32,
    /// B-spline degree of the kernel generator
    #[arg(long, default_value_t = 3)]
    degree: usize,
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLING)]
    oversampling: usize,
    /// Kernel window half-width; must cover K_sum plus the evaluation range
    #[arg(long, default_value_t = 48)]
    radius: usize,
    /// Terms |k| ≤ K_sum of the reproduction sum
    #[arg(long, default_value_t = 40)]
    k_sum: usize,
    /// Evaluation points x = i/M for |x| ≤ extent
    #[arg(long, default_value_t = 5)]
    extent: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args, Debug)]
struct DecayArgs {
    #[arg(long)]
    filter: PathBuf,
}

#[derive(Args, Debug)]
struct LemmaArgs {
    /// Decay constant c > 0 of e^{−ck}
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 40)]
    n_max: usize,
    /// Radius R; defaults to half the admissible limit
    #[arg(long)]
    r: Option<f64>,
    /// Filter JSON whose moment growth D_n ≈ C n!/Rⁿ is also fitted
    #[arg(long)]
    filter: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Lib(wienerlab::Error),
    /// A computed check did not meet its tolerance.
    Math { kind: &'static str, detail: Value },
}

impl From<wienerlab::Error> for Failure {
    fn from(e: wienerlab::Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn inline_or_file(arg: &str) -> CliResult<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        read_text(Path::new(arg))
    }
}

fn load_filter(path: &Path) -> CliResult<Filter<f64>> {
    Ok(filter_from_json(&read_text(path)?)?)
}

fn json_text<S: Serialize>(value: &S) -> CliResult<String> {
    Ok(to_json(value)? + "\n")
}

fn emit<S: Serialize>(value: &S) -> CliResult<()> {
    print!("{}", json_text(value)?);
    Ok(())
}

fn decay_summary(report: &DecayReport<f64>) -> Value {
    let model = match report.model {
        DecayModel::Exponential { .. } => "exponential",
        DecayModel::Algebraic { .. } => "algebraic",
        DecayModel::Mixed => "mixed",
    };
    json!({ "model": model, "rate_or_order": report.rate_or_order(), "C": report.constant() })
}

/// Decay summary, or `null` when the sequence has too few nonzero samples.
fn optional_decay(g: &Filter<f64>) -> CliResult<Value> {
    match decay_fit(g) {
        Ok(r) => Ok(decay_summary(&r)),
        Err(wienerlab::Error::DegenerateInput(_)) => Ok(Value::Null),
        Err(e) => Err(e.into()),
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".report.json");
    out.with_file_name(name)
}

/// Writes the filter and its report next to each other, or both to stdout.
fn write_with_report(out: Option<&Path>, g: &Filter<f64>, report: Value) -> CliResult<()> {
    match out {
        Some(path) => {
            write_text(path, &(filter_to_json(g)? + "\n"))?;
            write_text(&sidecar_path(path), &json_text(&report)?)
        }
        None => {
            let filter: Value = serde_json::from_str(&filter_to_json(g)?).expect("own output parses");
            emit(&json!({ "filter": filter, "report": report }))
        }
    }
}

fn run_invert(a: &InvertArgs) -> CliResult<()> {
    let h = load_filter(&a.filter)?;
    let s = invert_stable_detailed(&h, a.tol, a.radius)?;
    let report = json!({
        "residual": s.residual,
        "grid_size": s.grid_size,
        "certificate": s.certificate,
        "decay": optional_decay(&s.inverse)?,
    });
    write_with_report(a.out.as_deref(), &s.inverse, report)
}

fn run_invert_singular(a: &SingularArgs) -> CliResult<()> {
    let h = load_filter(&a.filter)?;
    let g = invert_singular_1d(&h, a.radius)?;
    let report = json!({
        "residual": g.residual,
        "verified_on": g.verified_on,
        "growth_order": g.growth_order,
        "bound_constant": g.bound_constant,
        "bound_ratio": g.bound_ratio(),
        "decay": optional_decay(&g.to_filter())?,
    });
    write_with_report(a.out.as_deref(), &g.to_filter(), report)
}

fn run_grs_check(a: &GrsArgs) -> CliResult<()> {
    let w = weight_from_json(&inline_or_file(&a.weight)?)?;
    if a.k.len() != w.dim() {
        return Err(Failure::Usage(format!("--k has {} entries for a weight in d = {}", a.k.len(), w.dim())));
    }
    let est = wienerlab::grs_limit(&w, &MultiIndex::new(a.k.clone()), a.m_max)?;
    let violations = submultiplicative_check(&w, &IndexBox::symmetric(w.dim(), a.check_radius));
    emit(&json!({
        "direction": est.direction,
        "samples": est.samples,
        "extrapolated_limit": est.extrapolated_limit,
        "tolerance": DEFAULT_GRS_TOL,
        "verdict": est.verdict,
        "submultiplicative": violations.is_empty(),
        "violations": violations.iter().take(16).collect::<Vec<_>>(),
    }))
}

fn run_symbol_min(a: &SymbolMinArgs) -> CliResult<()> {
    let h = load_filter(&a.filter)?;
    emit(&min_modulus_certified(&h, a.target_gap)?)
}

fn fourier_kernel(a: &SplineArgs, generator: &Generator<f64>) -> CliResult<LagrangeKernel<f64>> {
    let degree = match generator {
        Generator::BSpline { degree, .. } => Some(*degree),
        _ => None,
    };
    let dim = generator.dim();
    let green = |degree: usize| -> CliResult<LagrangeKernel<f64>> {
        if degree.is_multiple_of(2) {
            return Err(Failure::Usage(format!("no |ω|^(−2m) symbol matches even degree {degree}")));
        }
        Ok(lagrange_kernel_fourier(&GreenPower { m: degree.div_ceil(2), dim }, a.n_trunc, a.oversampling, a.radius)?)
    };
    match (a.symbol, degree) {
        (SymbolChoice::Green, Some(n)) => green(n),
        (SymbolChoice::Auto, Some(n)) if !n.is_multiple_of(2) => green(n),
        (SymbolChoice::Auto | SymbolChoice::Bspline, Some(n)) => {
            Ok(lagrange_kernel_fourier(&BSplineSymbol { degree: n, dim }, a.n_trunc, a.oversampling, a.radius)?)
        }
        (SymbolChoice::Bspline, None) => Err(Failure::Usage("--symbol bspline needs a B-spline generator".into())),
        (_, None) => match generator.fourier_symbol() {
            Some(sym) => Ok(lagrange_kernel_fourier(sym.as_ref(), a.n_trunc, a.oversampling, a.radius)?),
            None => Err(Failure::Usage("the generator has no Fourier description".into())),
        },
    }
}

fn kernel_summary(k: &LagrangeKernel<f64>) -> Value {
    json!({
        "route": k.route,
        "grid_step": k.grid_step(),
        "K": k.radius,
        "interpolation_error": k.interpolation_error(),
        "decay": k.decay.as_ref().map(decay_summary),
    })
}

fn run_spline_lagrange(a: &SplineArgs) -> CliResult<()> {
    let generator = match &a.generator {
        Some(text) => generator_from_json(&inline_or_file(text)?)?,
        None => Generator::bspline(a.degree, 1)?,
    };
    let space = match a.route {
        Route::Space | Route::Both => Some(lagrange_kernel_space(&generator, a.oversampling, a.radius, a.tail_tol)?),
        Route::Fourier => None,
    };
    let fourier = match a.route {
        Route::Fourier | Route::Both => Some(fourier_kernel(a, &generator)?),
        Route::Space => None,
    };
    let primary = space.as_ref().or(fourier.as_ref()).expect("at least one route ran");
    if let Some(path) = &a.out {
        write_text(path, &kernel_to_csv(primary))?;
    }
    if let (Some(path), Some(f)) = (&a.fourier_out, &fourier) {
        write_text(path, &kernel_to_csv(f))?;
    }
    let kernels: Vec<Value> = space.iter().chain(fourier.iter()).map(kernel_summary).collect();
    let mut report = json!({ "kernels": kernels });
    if let (Some(s), Some(f)) = (&space, &fourier) {
        let diff = s.max_abs_diff(f)?;
        report["agreement"] = json!({ "max_abs_diff": diff, "tolerance": a.agreement_tol });
        if !(diff <= a.agreement_tol) {
            return Err(Failure::Math { kind: "route_disagreement", detail: report });
        }
    }
    emit(&report)
}

fn run_reproduce(a: &ReproduceArgs) -> CliResult<()> {
    if a.power < 0 {
        return Err(Failure::Usage("--power must be nonnegative".into()));
    }
    let n = a.power;
    let f = move |x: f64| match a.target {
        Target::Plus => x.max(0.0).powi(n),
        Target::Abs => x.abs().powi(n),
        Target::Monomial => x.powi(n),
    };
    let kernel = lagrange_kernel_space(&Generator::bspline(a.degree, 1)?, a.oversampling, a.radius, 1e-15)?;
    let m = a.oversampling as i64;
    let reach = (a.extent as i64) * m;
    let xs: Vec<Vec<f64>> = (-reach..=reach).map(|i| vec![i as f64 / m as f64]).collect();
    let report = reproduction_check(&|k: &[i64]| f(k[0] as f64), &kernel, &|x: &[f64]| f(x[0]), &xs, a.k_sum, a.tol)?;
    let out = json!({
        "target": format!("{:?}", a.target).to_lowercase(),
        "power": n,
        "report": report,
        "tolerance": a.tol,
    });
    if !(report.max_residual <= a.tol) {
        return Err(Failure::Math { kind: "reproduction_residual", detail: out });
    }
    emit(&out)
}

fn run_decay_fit(a: &DecayArgs) -> CliResult<()> {
    let g = load_filter(&a.filter)?;
    let r = decay_fit(&g)?;
    emit(&json!({ "summary": decay_summary(&r), "fit": r }))
}

fn run_lemma_check(a: &LemmaArgs) -> CliResult<()> {
    let r = a.r.unwrap_or_else(|| lemma_radius_limit(a.c) / 2.0);
    let bound = lemma_bound_check_with_radius(a.c, a.n_max, r)?;
    let mut out = json!({ "lemma": bound });
    if let Some(path) = &a.filter {
        out["derivative_growth"] = serde_json::to_value(derivative_growth(&load_filter(path)?, a.n_max)?)
            .map_err(|e| Failure::Lib(wienerlab::Error::Format(e.to_string())))?;
    }
    emit(&out)
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| Failure::Usage(format!("{THREADS_VAR}={raw:?} is not a count")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("{THREADS_VAR}: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Invert(a) => run_invert(a),
        Command::InvertSingular(a) => run_invert_singular(a),
        Command::GrsCheck(a) => run_grs_check(a),
        Command::SymbolMin(a) => run_symbol_min(a),
        Command::SplineLagrange(a) => run_spline_lagrange(a),
        Command::Reproduce(a) => run_reproduce(a),
        Command::DecayFit(a) => run_decay_fit(a),
        Command::LemmaCheck(a) => run_lemma_check(a),
    }
}

fn error_kind(e: &wienerlab::Error) -> &'static str {
    use wienerlab::Error::*;
    match e {
        InvalidDimension(_) => "invalid_dimension",
        InvalidArgument(_) => "invalid_argument",
        DimensionMismatch { .. } => "dimension_mismatch",
        InvalidWeight { .. } => "invalid_weight",
        InvalidFamily(_) => "invalid_family",
        NotInvertible { .. } => "not_invertible",
        ToleranceUnreachable { .. } => "tolerance_unreachable",
        SingularSystem { .. } => "singular_system",
        SingularSymbol { .. } => "singular_symbol",
        WrongBranch => "wrong_branch",
        DegenerateInput(_) => "degenerate_input",
        IncreaseTruncation { .. } => "increase_truncation",
        KSumTooSmall { .. } => "k_sum_too_small",
        Format(_) => "format",
    }
}

fn report_failure(f: Failure) -> ExitCode {
    let (code, diag) = match f {
        Failure::Usage(message) => (1, json!({ "error": "usage", "message": message })),
        Failure::Lib(e) => {
            let code = if e.is_mathematical() { 2 } else { 1 };
            (code, json!({ "error": error_kind(&e), "message": e.to_string() }))
        }
        Failure::Math { kind, detail } => (2, json!({ "error": kind, "detail": detail })),
    };
    eprintln!("{}", to_json(&diag).unwrap_or_else(|_| diag.to_string()));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_failure(f),
    }
}
