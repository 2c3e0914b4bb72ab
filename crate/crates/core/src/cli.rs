//! Command-line interface.
//!
//! Exit codes: 0 success, 1 failed validation or output write failure,
//! 2 usage or config error, 3 Monte Carlo step budget exceeded.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::channel::Decibel;
use crate::cutoff::{optimal_cutoff_for_skr, optimize_over_range, RangeObjective, DEFAULT_M_MAX_SEARCH};
use crate::error::Error;
use crate::mc::{
    compare_with_analytic, default_validation_grid, simulate_cell, CellSimulation, GridPoint, McConfig, Stepping,
    DEFAULT_PARTITION_SIZE, DEFAULT_STEP_BUDGET,
};
use crate::params::{
    builtin_platforms, find_platform, load_config, resolve_context, ChannelParams, Era,
    PlatformParams, ProtocolKind, ProtocolSpec,
};
use crate::rates::{Cutoff, LinkModel};
use crate::sweep::{
    distance_grid, sweep_rr, sweep_skr, CutoffPolicy, SweepResult, SweepRow, DEFAULT_F_MIN, DEFAULT_L_MAX_KM,
    DEFAULT_L_MIN_KM, DEFAULT_L_STEP_KM,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

/// Column header of the per-platform CSV files.
pub const CSV_COLUMNS: [&str; 9] = [
    "distance_km",
    "cutoff_m",
    "rate_linear",
    "rate_db",
    "fidelity",
    "e_x",
    "ideal_bound_db",
    "realistic_ppl_db",
    "sqrt_eta_db",
];

#[derive(Debug, Parser)]
#[command(name = "qrlink", version, about = "Rates and secret-key rates of memory-based quantum-repeater links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the platform parameter table.
    Platforms(SourceArgs),
    /// Rate-versus-distance curves as CSV files.
    Sweep(SweepArgs),
    /// Per-distance optimal cutoffs and the single cutoff for the grid.
    Optimize(OptimizeArgs),
    /// Monte Carlo estimate of one link next to the closed forms.
    Simulate(SimulateArgs),
    /// Monte Carlo check of the closed forms over a parameter grid.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct SourceArgs {
    #[arg(long, default_value = "current")]
    era: Era,
    /// Platform file replacing the built-in table.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Restrict to these platforms (repeatable).
    #[arg(long = "platform")]
    platforms: Vec<String>,
    /// Override every coherence time, in ms (`inf` for a perfect memory).
    #[arg(long)]
    tcoh: Option<f64>,
    /// Fiber attenuation length in km.
    #[arg(long)]
    latt: Option<f64>,
    /// Signal speed in fiber, km per ms.
    #[arg(long)]
    signal_speed: Option<f64>,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, default_value_t = DEFAULT_L_MIN_KM)]
    lmin: f64,
    #[arg(long, default_value_t = DEFAULT_L_MAX_KM)]
    lmax: f64,
    #[arg(long, default_value_t = DEFAULT_L_STEP_KM)]
    lstep: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Skr,
    Rr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Objective {
    WorstCase,
    Mean,
}

impl From<Objective> for RangeObjective {
    fn from(o: Objective) -> Self {
        match o {
            Objective::WorstCase => RangeObjective::WorstCaseRatio,
            Objective::Mean => RangeObjective::MeanRatio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SteppingArg {
    PerStep,
    EventSkip,
}

impl From<SteppingArg> for Stepping {
    fn from(s: SteppingArg) -> Self {
        match s {
            SteppingArg::PerStep => Stepping::PerStep,
            SteppingArg::EventSkip => Stepping::EventSkip,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CutoffArg {
    Fixed,
    Optimal,
    Value(Cutoff),
}

impl FromStr for CutoffArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fixed" => Ok(CutoffArg::Fixed),
            "optimal" => Ok(CutoffArg::Optimal),
            _ => s
                .parse::<Cutoff>()
                .map(CutoffArg::Value)
                .map_err(|_| format!("expected `fixed`, `optimal`, an integer or `unbounded`, got `{s}`")),
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value = "nsp-cell")]
    protocol: ProtocolKind,
    #[arg(long, value_enum, default_value_t = Mode::Skr)]
    mode: Mode,
    /// SKR cutoff policy: `fixed`, `optimal`, an integer or `unbounded`.
    #[arg(long)]
    cutoff: Option<CutoffArg>,
    /// Objective of the fixed cutoff.
    #[arg(long, value_enum, default_value_t = Objective::WorstCase)]
    objective: Objective,
    /// Fidelity floor of the RR mode.
    #[arg(long)]
    fmin: Option<f64>,
    /// Largest finite cutoff searched.
    #[arg(long, default_value_t = DEFAULT_M_MAX_SEARCH)]
    m_max: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value = "nsp-cell")]
    protocol: ProtocolKind,
    #[arg(long, value_enum, default_value_t = Objective::WorstCase)]
    objective: Objective,
    #[arg(long, default_value_t = DEFAULT_M_MAX_SEARCH)]
    m_max: u64,
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Total channel uses allowed per simulated point.
    #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
    step_budget: u64,
    #[arg(long, value_enum, default_value_t = SteppingArg::EventSkip)]
    stepping: SteppingArg,
}

impl McArgs {
    fn config(&self) -> McConfig {
        McConfig {
            step_budget: self.step_budget,
            partition_size: DEFAULT_PARTITION_SIZE,
            stepping: self.stepping.into(),
        }
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "nsp-cell")]
    protocol: ProtocolKind,
    #[arg(long)]
    distance: f64,
    /// `optimal`, an integer or `unbounded`.
    #[arg(long, default_value = "optimal")]
    cutoff: CutoffArg,
    #[command(flatten)]
    mc: McArgs,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    mc: McArgs,
    /// Extra dephasing units in the fidelity (2 for node-sends-photons links).
    #[arg(long, default_value_t = 0)]
    extra_units: u32,
    /// Half-link success probabilities of the grid.
    #[arg(long = "p", value_delimiter = ',')]
    p_values: Vec<f64>,
    /// Cutoffs of the grid.
    #[arg(long = "m", value_delimiter = ',')]
    cutoffs: Vec<Cutoff>,
    /// `T0 / tau_coh` values of the grid.
    #[arg(long = "ratio", value_delimiter = ',')]
    ratios: Vec<f64>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<std::fmt::Error> for CliError {
    fn from(_: std::fmt::Error) -> Self {
        CliError::Io(io::Error::other("formatting failed"))
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let invocation = args.iter().map(|a| a.to_string_lossy()).collect::<Vec<_>>().join(" ");

    let result = match cli.command {
        Command::Platforms(a) => cmd_platforms(&a, stdout),
        Command::Sweep(a) => cmd_sweep(&a, &invocation, stdout),
        Command::Optimize(a) => cmd_optimize(&a, stdout),
        Command::Simulate(a) => cmd_simulate(&a, stdout),
        Command::Validate(a) => cmd_validate(&a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Core(e @ Error::BudgetExceeded { .. })) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_BUDGET
        }
        Err(CliError::Core(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAILURE
        }
    }
}

struct Source {
    platforms: Vec<PlatformParams>,
    channel: ChannelParams,
}

fn resolve_source(args: &SourceArgs) -> CliResult<Source> {
    let config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config `{}`: {e}", path.display())))?;
            let config = load_config(&text)
                .map_err(|e| CliError::Usage(format!("config `{}`: {e}", path.display())))?;
            Some(config)
        }
        None => None,
    };
    let pool: Vec<PlatformParams> = match &config {
        Some(c) => c.platforms.iter().filter(|p| p.era == args.era).cloned().collect(),
        None => builtin_platforms(args.era),
    };

    let mut platforms = Vec::new();
    if args.platforms.is_empty() {
        platforms = pool;
    } else {
        for name in &args.platforms {
            let found = find_platform(&pool, name)?;
            if !platforms.iter().any(|p: &PlatformParams| p.name == found.name) {
                platforms.push(found.clone());
            }
        }
    }
    if platforms.is_empty() {
        return Err(CliError::Usage(format!("no platforms for era {}", args.era)));
    }
    if let Some(tcoh) = args.tcoh {
        platforms = platforms
            .iter()
            .map(|p| p.with_tau_coh(tcoh))
            .collect::<crate::Result<Vec<_>>>()?;
    }

    let base = config
        .as_ref()
        .map(|c| c.channel(ChannelParams::default()))
        .transpose()?
        .unwrap_or_default();
    let channel = ChannelParams::new(
        args.latt.unwrap_or(base.l_att_km),
        args.signal_speed.unwrap_or(base.signal_speed_km_per_ms),
    )?;
    Ok(Source { platforms, channel })
}

fn grid(args: &GridArgs) -> CliResult<Vec<f64>> {
    Ok(distance_grid(args.lmin, args.lmax, args.lstep)?)
}

fn cmd_platforms(args: &SourceArgs, out: &mut dyn Write) -> CliResult<u8> {
    let source = resolve_source(args)?;
    writeln!(out, "{:<12} {:>8} {:>10} {:>12}", "platform", "p_link", "clock_mhz", "tcoh_ms")?;
    for p in &source.platforms {
        writeln!(out, "{:<12} {:>8.3} {:>10} {:>12}", p.name, p.p_link, p.clock_mhz, p.tau_coh_ms)?;
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(args: &SweepArgs, invocation: &str, out: &mut dyn Write) -> CliResult<u8> {
    let source = resolve_source(&args.source)?;
    let distances = grid(&args.grid)?;
    let protocol = ProtocolSpec::new(args.protocol);

    let policy = match args.mode {
        Mode::Skr => {
            if args.fmin.is_some() {
                return Err(CliError::Usage("--fmin only applies to --mode rr".into()));
            }
            Some(match args.cutoff.unwrap_or(CutoffArg::Fixed) {
                CutoffArg::Fixed => CutoffPolicy::FixedOverRange(args.objective.into()),
                CutoffArg::Optimal => CutoffPolicy::PerDistanceOptimal,
                CutoffArg::Value(m) => CutoffPolicy::Constant(m),
            })
        }
        Mode::Rr => {
            if args.cutoff.is_some() {
                return Err(CliError::Usage(
                    "--cutoff does not apply to --mode rr; the cutoff follows from --fmin".into(),
                ));
            }
            None
        }
    };
    let f_min = args.fmin.unwrap_or(DEFAULT_F_MIN);

    let results = source
        .platforms
        .iter()
        .map(|platform| match policy {
            Some(policy) => sweep_skr(platform, &protocol, &source.channel, &distances, policy, args.m_max),
            None => sweep_rr(platform, &protocol, &source.channel, &distances, f_min),
        })
        .collect::<crate::Result<Vec<_>>>()?;

    let dir = args.out.join(args.source.era.as_str()).join(args.protocol.flag_name());
    let manifest = Manifest {
        command: invocation.to_string(),
        seed: None,
        timestamp: manifest_timestamp(),
    };
    let common = format!(
        "era={} protocol={} mode={} grid_km={}:{}:{} l_att_km={} signal_speed_km_per_ms={}",
        args.source.era,
        args.protocol.flag_name(),
        results[0].mode,
        args.grid.lmin,
        args.grid.lstep,
        args.grid.lmax,
        source.channel.l_att_km,
        source.channel.signal_speed_km_per_ms,
    );

    let mut files = Vec::new();
    let mut combined = manifest.header(std::slice::from_ref(&common));
    combined.push_str("platform,");
    combined.push_str(&CSV_COLUMNS.join(","));
    combined.push('\n');
    for result in &results {
        let platform = find_platform(&source.platforms, &result.platform)?;
        let mut lines = vec![common.clone(), platform_line(platform)];
        if let Some(choice) = result.fixed_cutoff {
            lines.push(format!(
                "fixed_cutoff={} objective_value={}",
                choice.m.map_or("NA".to_string(), |m| m.to_string()),
                format_sig9(choice.achieved_value)
            ));
        }
        let mut text = manifest.header(&lines);
        text.push_str(&CSV_COLUMNS.join(","));
        text.push('\n');
        for row in &result.rows {
            let fields = csv_fields(row);
            text.push_str(&fields.join(","));
            text.push('\n');
            combined.push_str(&csv_name(&result.platform));
            combined.push(',');
            combined.push_str(&fields.join(","));
            combined.push('\n');
        }
        files.push((dir.join(format!("{}.csv", file_stem(&result.platform))), text));
    }
    files.push((dir.join("combined.csv"), combined));

    std::fs::create_dir_all(&dir)?;
    for (path, text) in &files {
        std::fs::write(path, text)?;
    }
    for result in &results {
        writeln!(out, "{}", sweep_summary(result, &dir))?;
    }
    writeln!(out, "wrote {} files to {}", files.len(), dir.display())?;
    Ok(EXIT_OK)
}

fn sweep_summary(result: &SweepResult, dir: &Path) -> String {
    let km = |x: Option<f64>| x.map_or("none".to_string(), |v| format!("{v:.1} km"));
    let mut s = format!(
        "{}: {}, ideal-bound crossing {}, realistic-bound crossing {}",
        result.platform,
        dir.join(format!("{}.csv", file_stem(&result.platform))).display(),
        km(result.regime.ideal_crossing_km),
        km(result.regime.realistic_crossing_km),
    );
    if let Some(choice) = result.fixed_cutoff {
        let _ = write!(
            s,
            ", fixed cutoff {} (objective {:.4})",
            choice.m.map_or("NA".to_string(), |m| m.to_string()),
            choice.achieved_value
        );
    }
    if result.rows.iter().all(|r| r.rate.is_none()) {
        s.push_str(", no rows meet the fidelity floor");
    }
    s
}

fn cmd_optimize(args: &OptimizeArgs, out: &mut dyn Write) -> CliResult<u8> {
    let source = resolve_source(&args.source)?;
    let distances = grid(&args.grid)?;
    let protocol = ProtocolSpec::new(args.protocol);
    let objective: RangeObjective = args.objective.into();
    for platform in &source.platforms {
        let ctx_at = |l: f64| resolve_context(platform, &protocol, &source.channel, l);
        let opt = optimize_over_range(ctx_at, &distances, objective, args.m_max)?;
        let fixed = opt.fixed.m.expect("range optimization always picks a cutoff");
        let objective_name = match objective {
            RangeObjective::WorstCaseRatio => "worst-case ratio",
            RangeObjective::MeanRatio => "mean ratio",
        };
        writeln!(
            out,
            "# {} ({}, {})\nfixed cutoff: {} ({} {})",
            platform.name,
            args.source.era,
            args.protocol.flag_name(),
            fixed,
            objective_name,
            format_sig9(opt.fixed.achieved_value)
        )?;
        let optima: Vec<Cutoff> = opt.per_distance.iter().map(|c| c.m.expect("SKR optimum")).collect();
        let first = optima[0];
        if optima.iter().all(|&m| m == first) {
            writeln!(out, "per-distance optimal cutoff: {first} at every distance")?;
        } else {
            let lo = optima.iter().min().expect("non-empty");
            let hi = optima.iter().max().expect("non-empty");
            writeln!(out, "per-distance optimal cutoff: varies from {lo} to {hi}")?;
        }
        writeln!(out, "distance_km,optimal_m,optimal_skr,fixed_skr,ratio")?;
        for (&l, choice) in distances.iter().zip(&opt.per_distance) {
            let model = LinkModel::new(&resolve_context(platform, &protocol, &source.channel, l)?)?;
            let best = choice.achieved_value;
            let at_fixed = model.skr(fixed);
            let ratio = if best > 0.0 { format_sig9(at_fixed / best) } else { "NA".into() };
            writeln!(
                out,
                "{},{},{},{},{}",
                format_sig9(l),
                choice.m.expect("SKR optimum"),
                format_sig9(best),
                format_sig9(at_fixed),
                ratio
            )?;
        }
        writeln!(out)?;
    }
    Ok(EXIT_OK)
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> CliResult<u8> {
    let source = resolve_source(&args.source)?;
    if source.platforms.len() != 1 {
        return Err(CliError::Usage("simulate needs exactly one --platform".into()));
    }
    let platform = &source.platforms[0];
    let protocol = ProtocolSpec::new(args.protocol);
    let ctx = resolve_context(platform, &protocol, &source.channel, args.distance)?;
    let model = LinkModel::new(&ctx)?;
    let cutoff = match args.cutoff {
        CutoffArg::Optimal => optimal_cutoff_for_skr(&ctx, DEFAULT_M_MAX_SEARCH)?.m.expect("SKR optimum"),
        CutoffArg::Value(m) => m,
        CutoffArg::Fixed => return Err(CliError::Usage("simulate takes `optimal`, an integer or `unbounded`".into())),
    };
    let cell = CellSimulation::from_context(&ctx, cutoff);
    let est = simulate_cell(&cell, args.mc.trials, args.mc.seed, &args.mc.config())?;

    let mut text = String::new();
    writeln!(
        text,
        "# {} ({}, {}) L={} km p={} t0_ms={} cutoff={} trials={} seed={}",
        platform.name,
        platform.era,
        args.protocol.flag_name(),
        args.distance,
        format_sig9(ctx.p),
        format_sig9(ctx.t0_ms),
        cutoff,
        est.trials,
        est.seed
    )?;
    writeln!(text, "{:<12} {:>16} {:>16} {:>16} {:>8}", "quantity", "analytic", "mc", "stderr", "z")?;
    let rows = [
        ("raw_rate", model.raw_rate(cutoff), est.raw_rate),
        ("E_m", model.expectation(cutoff), est.expectation),
        ("fidelity", model.fidelity(cutoff), est.fidelity),
    ];
    for (name, analytic, e) in rows {
        writeln!(
            text,
            "{:<12} {:>16} {:>16} {:>16} {:>8.3}",
            name,
            format_sig9(analytic),
            format_sig9(e.value),
            format_sig9(e.stderr),
            e.z_score(analytic)
        )?;
    }
    writeln!(text, "mean channel uses per success: {}", format_sig9(est.mean_attempts.value))?;
    out.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> CliResult<u8> {
    let custom = !(args.p_values.is_empty() && args.cutoffs.is_empty() && args.ratios.is_empty());
    let grid = if custom {
        let default = default_validation_grid();
        let or_default = |given: &[f64], pick: fn(&GridPoint) -> f64| -> Vec<f64> {
            if given.is_empty() {
                let mut v: Vec<f64> = default.iter().map(pick).collect();
                v.dedup();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            } else {
                given.to_vec()
            }
        };
        let ps = or_default(&args.p_values, |g| g.p);
        let ratios = or_default(&args.ratios, |g| g.dephasing_ratio);
        let cutoffs: Vec<Cutoff> = if args.cutoffs.is_empty() {
            let mut v: Vec<Cutoff> = default.iter().map(|g| g.cutoff).collect();
            v.sort();
            v.dedup();
            v
        } else {
            args.cutoffs.clone()
        };
        let mut grid = Vec::new();
        for &p in &ps {
            for &cutoff in &cutoffs {
                for &dephasing_ratio in &ratios {
                    grid.push(GridPoint { p, cutoff, dephasing_ratio });
                }
            }
        }
        grid
    } else {
        default_validation_grid()
    };
    let report = compare_with_analytic(&grid, args.extra_units, args.mc.trials, args.mc.seed, &args.mc.config())?;
    write!(out, "{report}")?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
}

struct Manifest {
    command: String,
    seed: Option<u64>,
    timestamp: String,
}

impl Manifest {
    fn header(&self, params: &[String]) -> String {
        let mut s = String::new();
        s.push_str(&format!("# command: {}\n", self.command));
        s.push_str(&format!("# version: qrlink {}\n", env!("CARGO_PKG_VERSION")));
        s.push_str(&format!(
            "# seed: {}\n",
            self.seed.map_or("none".to_string(), |v| v.to_string())
        ));
        s.push_str(&format!("# timestamp: {}\n", self.timestamp));
        for line in params {
            s.push_str(&format!("# params: {line}\n"));
        }
        s
    }
}

/// UTC time of the run, or `SOURCE_DATE_EPOCH` when set.
fn manifest_timestamp() -> String {
    let fixed = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0));
    fixed
        .unwrap_or_else(chrono::Utc::now)
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn platform_line(p: &PlatformParams) -> String {
    format!(
        "platform={} p_link={} clock_mhz={} tcoh_ms={}",
        csv_name(&p.name),
        p.p_link,
        p.clock_mhz,
        p.tau_coh_ms
    )
}

/// Platform name usable as a file stem.
fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn csv_name(name: &str) -> String {
    if name.contains([',', '"']) {
        format!("\"{}\"", name.replace('"', "\"\""))
    } else {
        name.to_string()
    }
}

fn csv_fields(row: &SweepRow) -> Vec<String> {
    let na = || "NA".to_string();
    vec![
        format_sig9(row.distance_km),
        row.cutoff.map_or_else(na, |m| m.to_string()),
        row.rate.map_or_else(na, format_sig9),
        row.rate_db().map_or_else(na, format_db),
        row.fidelity.map_or_else(na, format_sig9),
        row.e_x.map_or_else(na, format_sig9),
        format_db(row.benchmark.ideal_bound_db()),
        format_db(row.benchmark.realistic_ppl_db()),
        format_db(row.benchmark.sqrt_eta_db()),
    ]
}

fn format_db(d: Decibel) -> String {
    match d {
        Decibel::Finite(v) => format_sig9(v),
        other => other.to_string(),
    }
}

/// Plain decimal notation with 9 significant digits.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = |e: i32| (8 - e).max(0) as usize;
    let s = format!("{:.*}", decimals(exponent), x);
    // rounding may carry into the next decade, e.g. 9.9999999996 -> 10.00000000
    let rounded: f64 = s.parse().expect("formatted float parses");
    if rounded.abs() >= 10f64.powi(exponent + 1) {
        format!("{:.*}", decimals(exponent + 1), x)
    } else {
        s
    }
}
