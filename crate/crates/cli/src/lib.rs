//! Command-line workflows: approximate from a moment-matrix file, run the
//! benchmark suite, and tabulate support and rate checks.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cdapprox::cdkernel::{beta_schedule, DEFAULT_BETA};
use cdapprox::metrics::{bv_rate_bound, lipschitz_rate_bound, ErrorReport, JUMP_RADIUS};
use cdapprox::moments::sos_to_text;
use cdapprox::support::SupportConfig;
use cdapprox::{
    analytic_moment_matrix, build_kernel, empirical_moment_matrix, evaluate_batch, load_matrix,
    quadrature_moment_matrix, save_matrix, support_report, ApproxConfig, BasisFamily, BasisSpec, Benchmark,
    CDKernel, Error, Filter, GraphFunction, MomentMatrix, Precision, ThresholdParams,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "cdapprox", version, about = "Christoffel-Darboux semi-algebraic approximation of discontinuous functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the approximant of a moment-matrix file at given points.
    Approx(ApproxArgs),
    /// Build moments for a shipped benchmark, approximate it and report errors.
    Benchmark(BenchmarkArgs),
    /// Check the support estimates over a degree sweep.
    Support(SupportArgs),
    /// Tabulate measured L1 errors against the theoretical rate bounds.
    Rates(RatesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Analytic,
    Quad,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Design {
    Grid,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Basis {
    Monomial,
    Legendre,
}

impl From<Basis> for BasisFamily {
    fn from(b: Basis) -> Self {
        match b {
            Basis::Monomial => BasisFamily::MonomialGrevlex,
            Basis::Legendre => BasisFamily::LegendreOrthonormal,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    /// Tikhonov parameter (default 1e-8).
    #[arg(long, conflicts_with = "beta_schedule", value_parser = positive)]
    pub beta: Option<f64>,
    /// Use beta_d = 2^(3 - sqrt(d)).
    #[arg(long)]
    pub beta_schedule: bool,
    /// Absolute minimization precision in q units (default 1e-6 relative).
    #[arg(long, value_parser = positive)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value = "tikhonov")]
    pub filter: String,
}

impl KernelArgs {
    fn beta(&self, d: usize) -> f64 {
        if self.beta_schedule {
            beta_schedule(d)
        } else {
            self.beta.unwrap_or(DEFAULT_BETA)
        }
    }

    fn filter(&self) -> Result<Filter, Error> {
        self.filter.parse()
    }

    fn config(&self, y_interval: (f64, f64)) -> ApproxConfig {
        let cfg = ApproxConfig::default().with_interval(y_interval.0, y_interval.1);
        match self.epsilon {
            Some(e) => cfg.with_precision(Precision::Absolute(e)),
            None => cfg,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    /// Exponent r > p (default p + 1/2).
    #[arg(long)]
    pub r: Option<f64>,
    /// Perturbation level alpha in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
}

impl ThresholdArgs {
    fn params(&self, kernel: &CDKernel) -> Result<ThresholdParams, Error> {
        let mut tp = kernel.threshold_params();
        if let Some(r) = self.r {
            tp.r = r;
        }
        tp.alpha = self.alpha;
        tp.validate()?;
        Ok(tp)
    }
}

#[derive(Debug, Clone, Args)]
pub struct MomentArgs {
    #[arg(long, default_value = "sign")]
    pub benchmark: String,
    #[arg(long, value_enum, default_value_t = Mode::Analytic)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Basis::Monomial)]
    pub basis: Basis,
    /// Empirical sample count, or quadrature nodes per axis.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Placement of empirical samples.
    #[arg(long, value_enum, default_value_t = Design::Grid)]
    pub design: Design,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl MomentArgs {
    fn benchmark(&self) -> Result<Benchmark, Error> {
        self.benchmark.parse()
    }

    /// Moment matrix of the benchmark at degree `d`.
    pub fn build(&self, bench: Benchmark, d: usize) -> Result<MomentMatrix, Error> {
        let spec = BasisSpec::new(bench.p(), d, self.basis.into())?;
        let f = bench.function();
        match self.mode {
            Mode::Analytic => {
                let g = bench
                    .analytic()
                    .ok_or_else(|| Error::Unsupported(format!("no closed-form moments for {bench}")))?;
                analytic_moment_matrix(&g, &spec)
            }
            Mode::Quad => {
                let default = if bench.p() == 2 { 4000 } else { 200 };
                quadrature_moment_matrix(&f, &spec, self.samples.unwrap_or(default))
            }
            Mode::Empirical => {
                let n = self.samples.unwrap_or(if bench.p() == 2 { 1000 } else { 10_000 });
                let points = sample_points(&f, n, self.design, self.seed);
                empirical_moment_matrix(&f.sample(&points), &spec)
            }
        }
    }
}

/// `n` points of `X`: a midpoint grid (with `round(n^(1/dim))` per axis) or
/// seeded uniform draws.
pub fn sample_points(f: &GraphFunction, n: usize, design: Design, seed: u64) -> Vec<Vec<f64>> {
    match design {
        Design::Grid => {
            let per_axis = (n as f64).powf(1.0 / f.input_dim() as f64).round() as usize;
            f.grid(per_axis.max(1))
        }
        Design::Random => f.random_points(n, seed),
    }
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// One point per line, whitespace-separated coordinates.
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the scaled eigen-polynomials.
    #[arg(long)]
    pub sos_out: Option<PathBuf>,
    /// Truncate the matrix to this degree.
    #[arg(long)]
    pub degree: Option<usize>,
    #[command(flatten)]
    pub kernel: KernelArgs,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    pub moments: MomentArgs,
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    /// Output grid points per axis of X.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Values CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Error report CSV.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also save the moment matrix.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
    #[command(flatten)]
    pub kernel: KernelArgs,
}

#[derive(Debug, Args)]
pub struct SupportArgs {
    #[command(flatten)]
    pub moments: MomentArgs,
    #[arg(long, value_delimiter = ',', default_value = "4,6,8")]
    pub degrees: Vec<usize>,
    /// Fixed beta instead of the default schedule.
    #[arg(long, value_parser = positive)]
    pub beta: Option<f64>,
    /// Threshold override (default gamma_d).
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = 100_000)]
    pub probes: usize,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[command(flatten)]
    pub moments: MomentArgs,
    #[arg(long, value_delimiter = ',', default_value = "2,4,6,8")]
    pub degrees: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    #[arg(long)]
    pub out: PathBuf,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

/// Failure of a subcommand, carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Indefinite { .. } | Error::NotPositiveDefinite | Error::NonFinite { .. } | Error::Overflow { .. } => {
            EXIT_NUMERIC
        }
        Error::AtPoint { source, .. } => exit_code(source),
        _ => EXIT_INPUT,
    }
}

fn with_context(context: impl std::fmt::Display) -> impl FnOnce(Error) -> Failure {
    move |e| Failure {
        code: exit_code(&e),
        message: format!("{context}: {e}"),
    }
}

fn io_context(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::input(format!("{}: {e}", path.display()))
}

/// Runs a parsed command; `Ok` carries the exit status (0 or 1).
pub fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Approx(a) => cmd_approx(&a),
        Command::Benchmark(a) => cmd_benchmark(&a),
        Command::Support(a) => cmd_support(&a),
        Command::Rates(a) => cmd_rates(&a),
    }
}

/// Reads whitespace-separated points, one per line; blank lines and `#`
/// comments are skipped.
pub fn read_points(path: &Path, dim: usize) -> Result<Vec<Vec<f64>>, Failure> {
    let text = fs::read_to_string(path).map_err(io_context(path))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::input(format!("{}:{}: {e}", path.display(), i + 1)))?;
        if coords.len() != dim {
            return Err(Failure::input(format!(
                "{}:{}: expected {dim} coordinates, got {}",
                path.display(),
                i + 1,
                coords.len()
            )));
        }
        points.push(coords);
    }
    Ok(points)
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body).map_err(io_context(path))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, Failure> {
    csv::Writer::from_path(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Failure + '_ {
    move |e| Failure::input(format!("{}: {e}", path.display()))
}

/// Shortest round-trip form; scientific outside `[1e-4, 1e7)`.
pub fn fmt(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e7).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn cmd_approx(a: &ApproxArgs) -> Result<u8, Failure> {
    let mut m = load_matrix(&a.matrix).map_err(with_context(a.matrix.display()))?;
    if let Some(d) = a.degree {
        m = m.truncate(d).map_err(with_context(a.matrix.display()))?;
    }
    let d = m.spec.d();
    let kernel = build_kernel(&m, a.kernel.beta(d), a.kernel.filter().map_err(with_context("--filter"))?)
        .map_err(with_context(a.matrix.display()))?;
    let points = read_points(&a.points, m.spec.p() - 1)?;
    let y_interval = m.spec.domain()[m.spec.p() - 1];
    let cfg = a.kernel.config(y_interval);
    let values = evaluate_batch(&kernel, &points, &cfg).map_err(with_context(a.points.display()))?;
    let mut body = String::new();
    for v in &values {
        body.push_str(&fmt(*v));
        body.push('\n');
    }
    write_file(&a.out, &body)?;
    if let Some(path) = &a.sos_out {
        write_file(path, &sos_to_text(kernel.spec(), kernel.sos_decomposition()))?;
    }
    log::info!("wrote {} values to {}", values.len(), a.out.display());
    Ok(EXIT_OK)
}

pub fn cmd_benchmark(a: &BenchmarkArgs) -> Result<u8, Failure> {
    let bench = a.moments.benchmark().map_err(with_context("--benchmark"))?;
    let m = a.moments.build(bench, a.degree).map_err(with_context(bench))?;
    if let Some(path) = &a.matrix_out {
        save_matrix(&m, path).map_err(with_context(path.display()))?;
    }
    let beta = a.kernel.beta(a.degree);
    let kernel = build_kernel(&m, beta, a.kernel.filter().map_err(with_context("--filter"))?)
        .map_err(with_context(bench))?;
    let f = bench.function();
    let points = f.grid(a.grid);
    let values = evaluate_batch(&kernel, &points, &a.kernel.config(f.range())).map_err(with_context(bench))?;

    let mut w = csv_writer(&a.out)?;
    let mut header: Vec<String> = if f.input_dim() == 1 {
        vec!["x".into()]
    } else {
        (1..=f.input_dim()).map(|i| format!("x{i}")).collect()
    };
    header.extend(["y".to_string(), "f".to_string()]);
    w.write_record(&header).map_err(csv_err(&a.out))?;
    for (x, y) in points.iter().zip(&values) {
        let mut row: Vec<String> = x.iter().map(|v| fmt(*v)).collect();
        row.push(fmt(*y));
        row.push(fmt(f.eval(x)));
        w.write_record(&row).map_err(csv_err(&a.out))?;
    }
    w.flush().map_err(io_context(&a.out))?;

    let report = ErrorReport::on_grid(&f, &points, &values, a.degree, JUMP_RADIUS).map_err(with_context(bench))?;
    let header = "benchmark,mode,basis,d,beta,n_quad,l1_error,max_error_away_from_jumps,overshoot";
    let row = format!(
        "{bench},{:?},{:?},{},{},{},{},{},{}",
        a.moments.mode,
        a.moments.basis,
        report.d,
        fmt(beta),
        report.n_quad,
        fmt(report.l1_error),
        fmt(report.max_error_away_from_jumps),
        fmt(report.overshoot)
    )
    .to_lowercase();
    match &a.report {
        Some(path) => write_file(path, &format!("{header}\n{row}\n"))?,
        None => println!("{header}\n{row}"),
    }
    Ok(EXIT_OK)
}

fn check_degrees(degrees: &[usize]) -> Result<(), Failure> {
    if degrees.is_empty() {
        return Err(Failure::input("no degrees given"));
    }
    if let Some(d) = degrees.iter().find(|&&d| d <= 1) {
        return Err(Failure::input(format!("degree {d} rejected: the bounds need d > 1")));
    }
    Ok(())
}

pub fn cmd_support(a: &SupportArgs) -> Result<u8, Failure> {
    check_degrees(&a.degrees)?;
    let bench = a.moments.benchmark().map_err(with_context("--benchmark"))?;
    let f = bench.function();
    let cfg = SupportConfig {
        n_samples: a.mc_samples,
        n_probe: a.probes,
        seed: a.moments.seed,
    };
    let mut out = String::new();
    let mut violated = false;
    for (i, &d) in a.degrees.iter().enumerate() {
        let m = a.moments.build(bench, d).map_err(with_context(bench))?;
        let beta = a.beta.unwrap_or_else(|| beta_schedule(d));
        let kernel = build_kernel(&m, beta, Filter::Tikhonov).map_err(with_context(bench))?;
        let tp = a.threshold.params(&kernel).map_err(with_context("threshold parameters"))?;
        if i == 0 {
            out.push_str(&format!(
                "# benchmark={bench} r={} alpha={} delta0={} m={} m0={} seed={}\n",
                tp.r, tp.alpha, tp.delta0, tp.mass_m, tp.mass_m0, cfg.seed
            ));
            out.push_str("d,beta,gamma,outside_mass,outside_mass_fraction,outside_mass_sigma,bound_i,max_dist_in_sd,probe_hits,mesh_slack,bound_ii,degenerate,violated\n");
        }
        let r = support_report(&kernel, &f, &tp, a.gamma, &cfg).map_err(with_context(bench))?;
        violated |= r.violated();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            d,
            fmt(beta),
            fmt(r.gamma),
            fmt(r.outside_mass),
            fmt(r.outside_mass_fraction),
            fmt(r.outside_mass_sigma),
            fmt(r.theorem_bound_i),
            fmt(r.max_dist_in_sd),
            r.probe_hits,
            fmt(r.mesh_slack),
            fmt(r.theorem_bound_ii),
            r.outside_mass_fraction >= 1.0 || r.probe_hits == 0,
            r.violated()
        ));
    }
    write_file(&a.out, &out)?;
    Ok(if violated { EXIT_VIOLATION } else { EXIT_OK })
}

pub fn cmd_rates(a: &RatesArgs) -> Result<u8, Failure> {
    check_degrees(&a.degrees)?;
    let bench = a.moments.benchmark().map_err(with_context("--benchmark"))?;
    let f = bench.function();
    let points = f.grid(a.grid);
    let (ylo, yhi) = f.range();
    let vol_x = f.domain_volume();
    let mut out = String::from("d,beta_d,measured_l1,bound,ratio\n");
    let mut violated = false;
    for &d in &a.degrees {
        let m = a.moments.build(bench, d).map_err(with_context(bench))?;
        let beta = beta_schedule(d);
        let kernel = build_kernel(&m, beta, Filter::Tikhonov).map_err(with_context(bench))?;
        let tp = a.threshold.params(&kernel).map_err(with_context("threshold parameters"))?;
        let bound = match (bench.lipschitz(), bench.total_variation()) {
            (Some(l), _) => lipschitz_rate_bound(d, l, &tp, vol_x, yhi - ylo),
            (None, Some(v)) => bv_rate_bound(d, v, &tp, vol_x, yhi - ylo),
            (None, None) => Err(Error::Unsupported(format!("no rate bound applies to {bench}"))),
        }
        .map_err(with_context(bench))?;
        let values = evaluate_batch(&kernel, &points, &ApproxConfig::default().with_interval(ylo, yhi))
            .map_err(with_context(bench))?;
        let report = ErrorReport::on_grid(&f, &points, &values, d, JUMP_RADIUS).map_err(with_context(bench))?;
        if bound.is_finite() && bound > 0.0 && report.l1_error > bound {
            violated = true;
        }
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            d,
            fmt(beta),
            fmt(report.l1_error),
            fmt(bound),
            fmt(report.l1_error / bound)
        ));
    }
    write_file(&a.out, &out)?;
    Ok(if violated { EXIT_VIOLATION } else { EXIT_OK })
}

/// Caps the global worker pool from `CDAPPROX_THREADS`.
pub fn init_threads() {
    if let Ok(v) = std::env::var("CDAPPROX_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size the worker pool: {e}");
                }
            }
            _ => log::warn!("ignoring CDAPPROX_THREADS={v}"),
        }
    }
}

/// Prints a failure to stderr.
pub fn report_failure(f: &Failure) {
    let _ = writeln!(std::io::stderr(), "error: {}", f.message);
}
