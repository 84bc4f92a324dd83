//! Command-line front end: `sweep`, `eve`, `chsh` and `verify`.
//!
//! Settings resolve as flags, then `--config` file, then defaults. The config
//! file holds `key = value` lines with `#` comments; keys are the long flag
//! names (`t-end` and `t_end` both work).
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;

use crate::analytics::{
    self, eve_brute_force, eve_monte_carlo, sifted_outcome_distribution, EveStrategy,
};
use crate::error::Error;
use crate::harness::{compare, run_sweep, SweepConfig, SweepProtocol, SweepResult, SweepRow};
use crate::noise::{
    evolve, evolved_analytic, KrausChannel, Lambda, RelaxationParams, DEFAULT_T1_NS,
};
use crate::protocols::{
    chsh_analytic, chsh_empirical, e91_run, Bb84Variant, ChshBand, ChshEstimate, TSIRELSON,
};
use crate::quantum::{DensityMatrix, Matrix, StateLabel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const CSV_HEADER: &str = "t_ns,lambda,quantity,analytic,empirical,std_error,shots";

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Verification(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn io_err(what: impl fmt::Display, e: io::Error) -> CliError {
    CliError::Io(format!("{what}: {e}"))
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "qkd-thermal",
    version,
    about = "QKD protocols under T1 thermal relaxation"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep a time grid and write analytic vs Monte Carlo rows as CSV.
    Sweep(SweepArgs),
    /// Evaluate the guessing eavesdropper analytically, by enumeration, and by sampling.
    Eve(EveArgs),
    /// CHSH correlations, S and the resulting decision band.
    Chsh(ChshArgs),
    /// Run the built-in invariant suites.
    Verify(CommonArgs),
}

#[derive(Debug, Args, Default)]
struct CommonArgs {
    /// key=value settings file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (sweep writes to stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relaxation time T1 in ns.
    #[arg(long)]
    t1: Option<f64>,
    /// Monte Carlo samples per grid point (sifted rounds for BB84, pairs for E91)
    #[arg(long)]
    shots: Option<usize>,
    /// Base RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// z-score gate for analytic vs empirical rows.
    #[arg(long)]
    z_threshold: Option<f64>,
    /// Suppress the summary on stderr.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// First grid time in ns
    #[arg(long, allow_negative_numbers = true)]
    t_start: Option<f64>,
    /// Last grid time in ns (default 5·T1)
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// Number of grid points, endpoints included
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// bb84_zx, bb84_xy, e91_phiplus, e91_psiplus or chsh_psiminus.
    #[arg(long)]
    protocol: Option<String>,
    /// Comma-separated quantities to keep.
    #[arg(long, value_delimiter = ',')]
    observables: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct PointArgs {
    /// Decay parameter λ in [0, 1].
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Channel time in ns.
    #[arg(long = "t", allow_negative_numbers = true)]
    t: Option<f64>,
}

#[derive(Debug, Args)]
struct EveArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    point: PointArgs,
    /// zx or xy.
    #[arg(long)]
    variant: Option<String>,
}

#[derive(Debug, Args)]
struct ChshArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    point: PointArgs,
    /// Bell state (phi+, phi-, psi+, psi-) or `mixed`.
    #[arg(long)]
    source: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChshSource {
    Bell(StateLabel),
    MaximallyMixed,
}

impl FromStr for ChshSource {
    type Err = Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if matches!(
            lower.as_str(),
            "mixed" | "maximally-mixed" | "maximally_mixed"
        ) {
            return Ok(ChshSource::MaximallyMixed);
        }
        let label: StateLabel = lower.parse()?;
        if !label.is_bell() {
            return Err(Error::NotBellState(label.name()));
        }
        Ok(ChshSource::Bell(label))
    }
}

impl fmt::Display for ChshSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChshSource::Bell(l) => write!(f, "{l}"),
            ChshSource::MaximallyMixed => f.write_str("mixed"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
}

/// Every setting any subcommand reads, with defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub protocol: SweepProtocol,
    pub variant: Bb84Variant,
    pub source: ChshSource,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
    pub t1: f64,
    pub shots: usize,
    pub seed: u64,
    pub observables: Vec<String>,
    pub lambda: Option<f64>,
    pub t: Option<f64>,
    /// When set, `sweep` exits 1 if any row fails the gate.
    pub z_threshold: Option<f64>,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
    pub verbosity: u8,
}

impl Default for CliConfig {
    fn default() -> Self {
        let sweep = SweepConfig::default();
        Self {
            protocol: sweep.protocol,
            variant: Bb84Variant::ZX,
            source: ChshSource::Bell(StateLabel::PsiMinus),
            t_start: sweep.t_start,
            t_end: sweep.t_end,
            steps: sweep.steps,
            t1: sweep.t1,
            shots: sweep.shots,
            seed: sweep.seed,
            observables: sweep.observables,
            lambda: None,
            t: None,
            z_threshold: None,
            output_path: None,
            format: OutputFormat::Csv,
            verbosity: 1,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Usage(format!("invalid value `{value}` for {key}: {e}")))
}

impl CliConfig {
    /// Applies `key = value` lines on top of the current values.
    pub fn apply_config_text(&mut self, text: &str) -> std::result::Result<(), String> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
            self.set(&key.trim().replace('_', "-"), value.trim())
                .map_err(|e| format!("line {}: {e}", no + 1))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match key {
            "protocol" => self.protocol = parse_value(key, value)?,
            "variant" => self.variant = parse_value(key, value)?,
            "source" => self.source = parse_value(key, value)?,
            "t-start" => self.t_start = parse_value(key, value)?,
            "t-end" => self.t_end = parse_value(key, value)?,
            "steps" => self.steps = parse_value(key, value)?,
            "t1" => self.t1 = parse_value(key, value)?,
            "shots" => self.shots = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "observables" => {
                self.observables = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            }
            "lambda" => self.lambda = Some(parse_value(key, value)?),
            "t" => self.t = Some(parse_value(key, value)?),
            "z-threshold" => self.z_threshold = Some(parse_value(key, value)?),
            "out" | "output-path" => self.output_path = Some(PathBuf::from(value)),
            "format" => {
                if !value.eq_ignore_ascii_case("csv") {
                    return Err(CliError::Usage(format!(
                        "unsupported format `{value}` (only csv)"
                    )));
                }
                self.format = OutputFormat::Csv;
            }
            "verbosity" => self.verbosity = parse_value(key, value)?,
            other => return Err(CliError::Usage(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    fn load(common: &CommonArgs) -> CliResult<Self> {
        let mut cfg = CliConfig::default();
        if let Some(path) = &common.config {
            let text = fs::read_to_string(path).map_err(|e| io_err(path.display(), e))?;
            cfg.apply_config_text(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        }
        if let Some(v) = &common.out {
            cfg.output_path = Some(v.clone());
        }
        if let Some(v) = common.t1 {
            cfg.t1 = v;
        }
        if let Some(v) = common.shots {
            cfg.shots = v;
        }
        if let Some(v) = common.seed {
            cfg.seed = v;
        }
        if let Some(v) = common.z_threshold {
            cfg.z_threshold = Some(v);
        }
        if common.quiet {
            cfg.verbosity = 0;
        }
        Ok(cfg)
    }

    fn apply_grid(&mut self, grid: &GridArgs) {
        if let Some(v) = grid.t_start {
            self.t_start = v;
        }
        if let Some(v) = grid.t_end {
            self.t_end = v;
        }
        if let Some(v) = grid.steps {
            self.steps = v;
        }
    }

    fn apply_point(&mut self, point: &PointArgs) {
        // a point given on the command line replaces any point from the file
        if point.lambda.is_some() || point.t.is_some() {
            self.lambda = point.lambda;
            self.t = point.t;
        }
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            protocol: self.protocol,
            t_start: self.t_start,
            t_end: self.t_end,
            steps: self.steps,
            t1: self.t1,
            shots: self.shots,
            seed: self.seed,
            observables: self.observables.clone(),
        }
    }

    /// The single evaluation point from `lambda` or `t`, if one was given.
    fn point(&self) -> CliResult<Option<RelaxationParams>> {
        match (self.lambda, self.t) {
            (Some(_), Some(_)) => Err(CliError::Usage(
                "give either --lambda or --t, not both".into(),
            )),
            (Some(l), None) => Ok(Some(RelaxationParams::from_lambda(l, self.t1)?)),
            (None, Some(t)) => Ok(Some(RelaxationParams::new(t, self.t1)?)),
            (None, None) => Ok(None),
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Sweep(a) => cmd_sweep(a, stdout, stderr),
        Command::Eve(a) => cmd_eve(a, stdout, stderr),
        Command::Chsh(a) => cmd_chsh(a, stdout, stderr),
        Command::Verify(a) => cmd_verify(a, stdout, stderr),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.code()
        }
    }
}

fn format_row(row: &SweepRow) -> String {
    format!(
        "{},{:.16e},{},{:.16e},{:.16e},{:.16e},{}",
        row.t_ns, row.lambda, row.quantity, row.analytic, row.empirical, row.std_error, row.shots
    )
}

/// Writes rows under the fixed CSV header.
pub fn write_csv<'a>(
    rows: impl IntoIterator<Item = &'a SweepRow>,
    out: &mut dyn Write,
) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", format_row(row))?;
    }
    Ok(())
}

fn emit_csv(rows: &[SweepRow], path: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    if let Some(bad) = rows.iter().find(|r| {
        ![r.t_ns, r.lambda, r.analytic, r.empirical, r.std_error]
            .iter()
            .all(|x| x.is_finite())
    }) {
        return Err(CliError::Usage(format!(
            "row `{}` at t = {} is not finite; use a finite time (λ < 1) for CSV output",
            bad.quantity, bad.t_ns
        )));
    }
    match path {
        Some(p) => {
            let file = fs::File::create(p).map_err(|e| io_err(p.display(), e))?;
            let mut w = io::BufWriter::new(file);
            write_csv(rows, &mut w)
                .and_then(|_| w.flush())
                .map_err(|e| io_err(p.display(), e))
        }
        None => write_csv(rows, stdout).map_err(|e| io_err("stdout", e)),
    }
}

fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let mut cfg = CliConfig::load(&args.common)?;
    cfg.apply_grid(&args.grid);
    if let Some(p) = &args.protocol {
        cfg.set("protocol", p)?;
    }
    if let Some(obs) = &args.observables {
        cfg.observables = obs
            .iter()
            .map(|s| s.trim().to_owned())
            .filter(|s| !s.is_empty())
            .collect();
    }
    let res = run_sweep(&cfg.sweep_config())?;
    emit_csv(&res.rows, cfg.output_path.as_deref(), stdout)?;
    gate(&res, &cfg, stderr)
}

fn gate(res: &SweepResult, cfg: &CliConfig, stderr: &mut dyn Write) -> CliResult<()> {
    let report = compare(res, cfg.z_threshold.unwrap_or(4.0));
    if cfg.verbosity > 0 {
        write!(stderr, "{report}").map_err(|e| io_err("stderr", e))?;
    }
    if cfg.z_threshold.is_some() && !report.passed() {
        let n = report.failing.len() + report.hard_failures.len();
        return Err(CliError::Verification(format!(
            "{n} rows outside the z-score gate"
        )));
    }
    Ok(())
}

fn eve_strategy(variant: Bb84Variant) -> EveStrategy {
    match variant {
        Bb84Variant::ZX => EveStrategy::z_bias(),
        Bb84Variant::XY => EveStrategy::x_bias(),
    }
}

fn eve_row(
    variant: Bb84Variant,
    params: RelaxationParams,
    shots: usize,
    seed: u64,
) -> CliResult<(SweepRow, f64)> {
    let strategy = eve_strategy(variant);
    let lambda = params.lambda();
    let analytic =
        analytics::eve_success(&strategy, &sifted_outcome_distribution(variant, lambda))?;
    let brute = eve_brute_force(&strategy, variant, lambda)?;
    let tally = eve_monte_carlo(&strategy, variant, params, shots, seed)?;
    let row = SweepRow {
        t_ns: params.t_ns(),
        lambda: lambda.value(),
        quantity: "eve_success",
        analytic,
        empirical: tally.rate(),
        std_error: tally.std_error(),
        shots: tally.rounds,
        kind: crate::harness::QuantityKind::Proportion,
    };
    Ok((row, brute))
}

fn cmd_eve(args: &EveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let mut cfg = CliConfig::load(&args.common)?;
    cfg.apply_grid(&args.grid);
    cfg.apply_point(&args.point);
    if let Some(v) = &args.variant {
        cfg.set("variant", v)?;
    }
    if cfg.shots == 0 {
        return Err(CliError::Usage("shots must be at least 1".into()));
    }
    let points: Vec<(RelaxationParams, u64)> = match cfg.point()? {
        Some(p) => vec![(p, cfg.seed)],
        None => {
            let sweep = cfg.sweep_config();
            sweep.validate()?;
            sweep
                .grid()
                .into_iter()
                .enumerate()
                .map(|(i, t)| Ok((RelaxationParams::new(t, cfg.t1)?, sweep.point_seed(i))))
                .collect::<crate::Result<_>>()?
        }
    };
    let strategy = eve_strategy(cfg.variant);
    let mut rows = Vec::with_capacity(points.len());
    let mut table = String::new();
    table.push_str(&format!(
        "variant {} strategy {}\n",
        cfg.variant,
        strategy.label()
    ));
    table.push_str(&format!(
        "{:>14} {:>8} {:>10} {:>12} {:>12} {:>10} {:>10}\n",
        "t_ns", "lambda", "analytic", "brute_force", "monte_carlo", "std_err", "epsilon"
    ));
    for (params, seed) in points {
        let (row, brute) = eve_row(cfg.variant, params, cfg.shots, seed)?;
        table.push_str(&format!(
            "{:>14.3} {:>8.4} {:>10.6} {:>12.6} {:>12.6} {:>10.6} {:>10.6}\n",
            row.t_ns,
            row.lambda,
            row.analytic,
            brute,
            row.empirical,
            row.std_error,
            row.analytic - 0.25
        ));
        rows.push(row);
    }
    match &cfg.output_path {
        Some(p) => {
            emit_csv(&rows, Some(p), stdout)?;
            if cfg.verbosity > 0 {
                stdout
                    .write_all(table.as_bytes())
                    .map_err(|e| io_err("stdout", e))?;
            }
        }
        None => stdout
            .write_all(table.as_bytes())
            .map_err(|e| io_err("stdout", e))?,
    }
    let res = SweepResult {
        config: cfg.sweep_config(),
        rows,
    };
    gate(&res, &cfg, stderr)
}

fn chsh_rows(
    est: &ChshEstimate,
    analytic: &ChshEstimate,
    params: &RelaxationParams,
) -> Vec<SweepRow> {
    let counts = est.counts.clone().unwrap_or_default();
    let base = |quantity, a, e, se, n| SweepRow {
        t_ns: params.t_ns(),
        lambda: params.lambda().value(),
        quantity,
        analytic: a,
        empirical: e,
        std_error: se,
        shots: n,
        kind: crate::harness::QuantityKind::Correlation,
    };
    let mut rows = vec![base(
        "chsh_s",
        analytic.s_value,
        est.s_value,
        est.std_error.unwrap_or(0.0),
        est.total_count(),
    )];
    for (pair, &c) in &est.correlations {
        let name = match (pair.alice, pair.bob) {
            (1, 2) => "corr_a1b2",
            (1, 3) => "corr_a1b3",
            (2, 2) => "corr_a2b2",
            _ => "corr_a2b3",
        };
        let n = counts.get(pair).copied().unwrap_or(0);
        rows.push(base(
            name,
            analytic.correlations[pair],
            c,
            ((1.0 - c * c) / n as f64).sqrt(),
            n,
        ));
    }
    rows
}

fn cmd_chsh(args: &ChshArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let mut cfg = CliConfig::load(&args.common)?;
    cfg.apply_point(&args.point);
    if let Some(s) = &args.source {
        cfg.set("source", s)?;
    }
    let params = cfg.point()?.unwrap_or_else(RelaxationParams::noiseless);
    let params = if cfg.lambda.is_none() && cfg.t.is_none() {
        RelaxationParams::new(0.0, cfg.t1)?
    } else {
        params
    };
    let rho = match cfg.source {
        ChshSource::Bell(label) => evolve(label, params.lambda())?,
        ChshSource::MaximallyMixed => {
            let channel = KrausChannel::from_params(&params).lift_two_qubit()?;
            channel.apply(&DensityMatrix::maximally_mixed(4)?)?
        }
    };
    let analytic = chsh_analytic(&rho)?;
    let mut text = format!(
        "source {}  t = {} ns  lambda = {:.6}\n",
        cfg.source,
        params.t_ns(),
        params.lambda().value()
    );
    for (pair, c) in &analytic.correlations {
        text.push_str(&format!("  <{pair}> = {c:+.12}\n"));
    }
    let band = ChshBand::classify(analytic.s_value, 1e-12);
    text.push_str(&format!(
        "S = {:.12}  (2√2 = {:.12})  band: {band}\n",
        analytic.s_value, TSIRELSON
    ));

    let mut rows = Vec::new();
    match cfg.source {
        ChshSource::Bell(label) if cfg.shots > 0 => {
            let tr = e91_run(cfg.shots, label, params, cfg.seed)?;
            let est = chsh_empirical(&tr)?;
            let se = est.std_error.unwrap_or(0.0);
            let z = cfg.z_threshold.unwrap_or(4.0);
            text.push_str(&format!(
                "empirical S = {:.6} ± {:.6} over {} test rounds  band: {}\n",
                est.s_value,
                se,
                est.total_count(),
                ChshBand::classify(est.s_value, z * se)
            ));
            rows = chsh_rows(&est, &analytic, &params);
        }
        ChshSource::MaximallyMixed => {
            text.push_str("empirical S: not sampled for the mixed source\n")
        }
        _ => {}
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| io_err("stdout", e))?;
    if let Some(p) = &cfg.output_path {
        if rows.is_empty() {
            return Err(CliError::Usage(
                "CSV output needs an empirical run (Bell source, shots ≥ 1)".into(),
            ));
        }
        emit_csv(&rows, Some(p), stdout)?;
    }
    if rows.is_empty() {
        return Ok(());
    }
    let res = SweepResult {
        config: cfg.sweep_config(),
        rows,
    };
    gate(&res, &cfg, stderr)
}

/// Outcome of one verification suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn suite(name: &'static str, passed: bool, detail: String) -> SuiteResult {
    SuiteResult {
        name,
        passed,
        detail,
    }
}

fn lambda_grid() -> Vec<Lambda> {
    (0..=20)
        .map(|i| Lambda::new(i as f64 / 20.0).expect("grid λ in [0, 1]"))
        .collect()
}

fn max_residual(a: &Matrix, b: &Matrix) -> f64 {
    a.max_abs_diff(b).unwrap_or(f64::INFINITY)
}

/// Runs the invariant suites behind `verify`. `shots` and `seed` drive the
/// Monte Carlo gate; `z_threshold` is its z-score limit.
pub fn verify_suites(shots: usize, seed: u64, z_threshold: f64) -> crate::Result<Vec<SuiteResult>> {
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for l in lambda_grid() {
        let one = KrausChannel::thermal_relaxation(l);
        worst = worst
            .max(one.completeness_residual()?)
            .max(one.lift_two_qubit()?.completeness_residual()?);
    }
    out.push(suite(
        "kraus completeness",
        worst < 1e-12,
        format!("max residual {worst:.2e}"),
    ));

    let labels = [
        StateLabel::S0,
        StateLabel::S1,
        StateLabel::Plus,
        StateLabel::Minus,
        StateLabel::PlusI,
        StateLabel::MinusI,
        StateLabel::PhiPlus,
        StateLabel::PsiPlus,
    ];
    let mut worst = 0.0f64;
    for l in lambda_grid() {
        for label in labels {
            let numeric = evolve(label, l)?;
            let closed = evolved_analytic(label, l)?;
            worst = worst.max(max_residual(numeric.matrix(), closed.matrix()));
        }
    }
    out.push(suite(
        "oracle equivalence",
        worst < 1e-12,
        format!("max elementwise residual {worst:.2e}"),
    ));

    let start = analytics::bb84_success(Lambda::ZERO);
    let e5 = (-5.0f64).exp();
    let at5 = analytics::bb84_success(Lambda::from_time(5.0 * DEFAULT_T1_NS, DEFAULT_T1_NS)?);
    let tail = analytics::bb84_success(Lambda::from_time(30.0 * DEFAULT_T1_NS, DEFAULT_T1_NS)?);
    let decreasing = (1..=1000).all(|i| {
        let a = Lambda::new((i - 1) as f64 / 1000.0).expect("λ");
        let b = Lambda::new(i as f64 / 1000.0).expect("λ");
        analytics::bb84_success(b) < analytics::bb84_success(a)
    });
    out.push(suite(
        "bb84 success curve",
        start == 1.0 && (at5 - 0.25 * (2.0 + e5 + e5.sqrt())).abs() < 1e-12 && (tail - 0.5).abs() < 1e-6 && decreasing,
        format!("P(0) = {start}, P(5 T1) = {at5:.6}, P(30 T1) = {tail:.9}, strictly decreasing: {decreasing}"),
    ));

    let t_min = analytics::e91_phiplus_min_time(DEFAULT_T1_NS)?;
    let p_min = analytics::e91_phiplus_success(Lambda::from_time(t_min, DEFAULT_T1_NS)?);
    out.push(suite(
        "phi+ minimum",
        (p_min - 0.75).abs() < 1e-12,
        format!("t = T1 ln 2 = {t_min:.6} ns, P = {p_min:.15}"),
    ));

    let singlet = chsh_analytic(&DensityMatrix::from_label(StateLabel::PsiMinus))?;
    let mixed = chsh_analytic(&DensityMatrix::maximally_mixed(4)?)?;
    let mut bounded = true;
    for l in lambda_grid() {
        let s = chsh_analytic(&evolve(StateLabel::PsiMinus, l)?)?.s_value;
        bounded &= s <= TSIRELSON + 1e-12 && (s - analytics::chsh_psiminus(l)).abs() < 1e-12;
    }
    let dev = (singlet.s_value - TSIRELSON).abs();
    out.push(suite(
        "chsh bounds",
        dev < 1e-12 && mixed.s_value.abs() < 1e-12 && bounded,
        format!(
            "|S(t=0) − 2√2| = {dev:.2e}, S(mixed) = {:.2e}, S ≤ 2√2 on grid: {bounded}",
            mixed.s_value
        ),
    ));

    let mut worst = 0.0f64;
    let mut rng = crate::rng::SimRng::seed_from_u64(seed);
    for variant in [Bb84Variant::ZX, Bb84Variant::XY] {
        let mut strategies = vec![eve_strategy(variant), EveStrategy::uniform(variant)];
        strategies.extend(variant.states().map(EveStrategy::deterministic));
        strategies.extend((0..20).map(|_| EveStrategy::random(variant, &mut rng)));
        for l in lambda_grid() {
            let dist = sifted_outcome_distribution(variant, l);
            for s in &strategies {
                worst = worst.max(
                    (analytics::eve_success(s, &dist)? - eve_brute_force(s, variant, l)?).abs(),
                );
            }
        }
    }
    let zbias_gap = lambda_grid()
        .into_iter()
        .map(|l| {
            let p = analytics::eve_success(
                &EveStrategy::z_bias(),
                &sifted_outcome_distribution(Bb84Variant::ZX, l),
            );
            (p.unwrap_or(f64::NAN) - 0.25 - l.value() / 8.0).abs()
        })
        .fold(0.0, f64::max);
    out.push(suite(
        "eve brute force",
        worst < 1e-12 && zbias_gap < 1e-12,
        format!("max |analytic − enumeration| {worst:.2e}, max |P − (¼ + λ/8)| {zbias_gap:.2e}"),
    ));

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let s = EveStrategy::random(Bb84Variant::XY, &mut rng);
        for i in 0..=10 {
            let l = Lambda::new(i as f64 / 10.0)?;
            let p = analytics::eve_success(&s, &sifted_outcome_distribution(Bb84Variant::XY, l))?;
            worst = worst.max((p - 0.25).abs());
        }
    }
    out.push(suite(
        "xy neutralization",
        worst < 1e-12,
        format!("1000 strategies, max |P − ¼| {worst:.2e}"),
    ));

    let dominated = (0..=100).all(|i| {
        let l = Lambda::new(i as f64 / 100.0).expect("λ");
        analytics::bb84_xy_success(l) >= analytics::bb84_success(l)
    });
    out.push(suite(
        "xy dominance",
        dominated,
        "½(1+√e) ≥ ¼(2+e+√e) on 101 λ points".into(),
    ));

    let mut rows = 0;
    let mut failures = Vec::new();
    let mut max_z = 0.0f64;
    for protocol in SweepProtocol::ALL {
        let cfg = SweepConfig {
            protocol,
            steps: 11,
            shots,
            seed,
            ..SweepConfig::default()
        };
        let report = compare(&run_sweep(&cfg)?, z_threshold);
        rows += report.rows_checked;
        max_z = max_z.max(report.max_z);
        if !report.passed() {
            failures.push(format!(
                "{protocol}: {} failing, {} hard",
                report.failing.len(),
                report.hard_failures.len()
            ));
        }
    }
    out.push(suite(
        "monte carlo gate",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{rows} rows, max z {max_z:.3} ≤ {z_threshold}")
        } else {
            failures.join("; ")
        },
    ));

    Ok(out)
}

fn cmd_verify(args: &CommonArgs, stdout: &mut dyn Write, _stderr: &mut dyn Write) -> CliResult<()> {
    let mut cfg = CliConfig::load(args)?;
    if args.shots.is_none() && cfg.shots == CliConfig::default().shots {
        cfg.shots = 20_000;
    }
    if cfg.shots == 0 {
        return Err(CliError::Usage("shots must be at least 1".into()));
    }
    let suites = verify_suites(cfg.shots, cfg.seed, cfg.z_threshold.unwrap_or(4.0))?;
    let mut text = String::new();
    for s in &suites {
        text.push_str(&format!(
            "{:<20} {}  {}\n",
            s.name,
            if s.passed { "PASS" } else { "FAIL" },
            s.detail
        ));
    }
    let failed = suites.iter().filter(|s| !s.passed).count();
    text.push_str(&format!(
        "{} of {} suites passed\n",
        suites.len() - failed,
        suites.len()
    ));
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| io_err("stdout", e))?;
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} suites failed")));
    }
    Ok(())
}
