//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid flags or configuration, 3 I/O failure,
//! 4 calibration failed at the grid minimum, 5 malformed input data.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bounds::{self, BVariant, ConstantGrid};
use crate::error::Error;
use crate::experiments::{
    calibrate_optimal_c, linear_grid, run_trials, sweep, Algorithm, ConfigFile, ExperimentConfig,
    SweepParam,
};
use crate::hypotheses::{read_matrix_csv, Distribution, ExampleSource};
use crate::selectors::{as_run, bs_run, cs_run, AsParams, CsParams, DecMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_CALIBRATION: i32 = 4;
pub const EXIT_BAD_DATA: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "hyposel",
    version,
    about = "On-line hypothesis selection: bounds, simulations and real-data selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print every sample-complexity bound for one parameter set
    Bounds(BoundsArgs),
    /// Run seeded trials of one algorithm and write per-trial CSV
    Simulate(SimulateArgs),
    /// Sweep gamma0 or gamma and write one aggregate row per value and algorithm
    Sweep(SweepArgs),
    /// Find the largest Hoeffding constant that yields no mistakes
    Calibrate(CalibrateArgs),
    /// Run a selector over a recorded prediction matrix
    Select(SelectArgs),
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 18)]
    n: usize,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    gamma0: f64,
    #[arg(long, default_value_t = 4.0)]
    c: f64,
    /// Formula behind the constrained-selection threshold row
    #[arg(long, value_parser = parse_b_variant, default_value = "simple")]
    b_variant: BVariant,
}

/// Experiment flags; each mirrors a config-file key.
#[derive(Debug, Args, Default)]
struct ExperimentArgs {
    /// TOML file with experiment settings; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_algorithm)]
    algo: Option<Algorithm>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    gamma0: Option<f64>,
    /// Lower bound on gamma0 for bs/cs (defaults to gamma0)
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, value_parser = parse_dec)]
    dec: Option<DecMode>,
    #[arg(long, value_parser = parse_b_variant)]
    b_variant: Option<BVariant>,
    #[arg(long, value_parser = parse_distribution)]
    distribution: Option<Distribution>,
    /// TOML class definition replacing the built-in distributions
    #[arg(long)]
    class_file: Option<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Reuse one set of success patterns for every trial
    #[arg(long)]
    fixed_patterns: bool,
    #[arg(long)]
    jobs: Option<usize>,
}

impl ExperimentArgs {
    fn to_config(&self) -> Result<ExperimentConfig, Failure> {
        let flags = ConfigFile {
            algo: self.algo,
            n: self.n,
            delta: self.delta,
            gamma0: self.gamma0,
            gamma: self.gamma,
            c: self.c,
            dec: self.dec,
            b_variant: self.b_variant,
            distribution: self.distribution,
            class_file: self.class_file.clone(),
            runs: self.runs,
            seed: self.seed,
            fixed_patterns: self.fixed_patterns.then_some(true),
            jobs: self.jobs,
        };
        let file = match &self.config {
            Some(path) => ConfigFile::read(path).map_err(|e| match e {
                Error::Io { .. } => Failure::from(e),
                _ => Failure::new(EXIT_USAGE, e.to_string()),
            })?,
            None => ConfigFile::default(),
        };
        flags.or(file).into_config().map_err(Failure::from)
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Output file (standard output when omitted)
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_sweep_param, default_value = "gamma0")]
    param: SweepParam,
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    /// Comma-separated algorithms
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm, default_value = "bs,cs,as")]
    algos: Vec<Algorithm>,
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, default_value_t = 2.0)]
    c_min: f64,
    #[arg(long, default_value_t = 16.0)]
    c_max: f64,
    #[arg(long, default_value_t = 0.25)]
    c_step: f64,
    /// Trace output file (standard output when omitted)
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelectArgs {
    /// Prediction matrix CSV (header h0..h{n-1}, rows of 0/1)
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    /// Batch size for bs; computed from delta, gamma and c when omitted
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    c: f64,
    #[arg(long, value_parser = parse_dec, default_value = "variable")]
    dec: DecMode,
    #[arg(long, value_parser = parse_b_variant, default_value = "simple")]
    b_variant: BVariant,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
        .map_err(|_| format!("expected one of bs, cs, as; got `{s}`"))
}

fn parse_dec(s: &str) -> Result<DecMode, String> {
    match s {
        "variable" => Ok(DecMode::Variable),
        "fixed" => Ok(DecMode::Fixed),
        _ => Err(format!("expected `variable` or `fixed`, got `{s}`")),
    }
}

fn parse_b_variant(s: &str) -> Result<BVariant, String> {
    match s {
        "simple" => Ok(BVariant::Simple),
        "full" => Ok(BVariant::Full),
        _ => Err(format!("expected `simple` or `full`, got `{s}`")),
    }
}

fn parse_distribution(s: &str) -> Result<Distribution, String> {
    match s {
        "symmetric" => Ok(Distribution::Symmetric),
        "positive" => Ok(Distribution::Positive),
        "negative" => Ok(Distribution::Negative),
        _ => Err(format!(
            "expected symmetric, positive or negative, got `{s}`"
        )),
    }
}

fn parse_sweep_param(s: &str) -> Result<SweepParam, String> {
    match s {
        "gamma0" => Ok(SweepParam::Gamma0),
        "gamma" => Ok(SweepParam::Gamma),
        _ => Err(format!("expected `gamma0` or `gamma`, got `{s}`")),
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match &e {
            Error::InvalidParameter { name, reason } => Failure::new(
                EXIT_USAGE,
                format!("invalid value for --{}: {reason}", name.replace('_', "-")),
            ),
            Error::Io { .. } => Failure::new(EXIT_IO, e.to_string()),
            Error::MalformedInput { .. } | Error::LengthMismatch { .. } => {
                Failure::new(EXIT_BAD_DATA, e.to_string())
            }
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{e}");
                EXIT_OK
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Bounds(a) => cmd_bounds(&a, stdout),
        Command::Simulate(a) => cmd_simulate(&a, stdout),
        Command::Sweep(a) => cmd_sweep(&a, stdout),
        Command::Calibrate(a) => cmd_calibrate(&a, stdout),
        Command::Select(a) => cmd_select(&a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// Formats like C's `%.6g`: six significant digits, trailing zeros removed,
/// exponent notation outside `[1e-4, 1e6)`.
pub fn format_g(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_g(x: Option<f64>) -> String {
    x.map(format_g).unwrap_or_default()
}

/// Opens the destination up front so an unwritable path fails before any
/// computation.
fn open_output(path: Option<&Path>) -> Result<Option<std::fs::File>, Failure> {
    path.map(|p| {
        std::fs::File::create(p).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", p.display())))
    })
    .transpose()
}

fn emit(file: Option<std::fs::File>, stdout: &mut dyn Write, text: &str) -> Result<(), Failure> {
    let res = match file {
        Some(mut f) => f.write_all(text.as_bytes()).and_then(|_| f.flush()),
        None => stdout.write_all(text.as_bytes()),
    };
    res.map_err(|e| Failure::new(EXIT_IO, e.to_string()))
}

fn cmd_bounds(a: &BoundsArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    bounds::check_gamma_pair(a.gamma, a.gamma0)?;
    let rows: Vec<(&str, String)> = vec![
        (
            "t_bs",
            bounds::sample_size_bs(a.n, a.delta, a.gamma, a.c)?.to_string(),
        ),
        (
            "b_cs_full",
            format_g(bounds::b_cs(a.n, a.delta, a.gamma, a.c, BVariant::Full)?),
        ),
        (
            "b_cs_simple",
            format_g(bounds::b_cs(a.n, a.delta, a.gamma, a.c, BVariant::Simple)?),
        ),
        (
            "threshold_b",
            format_g(bounds::threshold_b(
                a.n,
                a.delta,
                a.gamma,
                a.c,
                a.b_variant,
            )?),
        ),
        (
            "t_cs_avg",
            format_g(bounds::t_cs_avg(a.n, a.delta, a.gamma, a.gamma0, a.c)?),
        ),
        (
            "t_as_worst",
            format_g(bounds::t_as_worst(a.n, a.delta, a.gamma0, a.c)?),
        ),
        (
            "t_as_empirical",
            format_g(bounds::t_as_empirical(a.n, a.delta, a.gamma0, a.c)?),
        ),
        (
            "as_warmup",
            bounds::as_warmup(a.n, a.delta, a.c)?.to_string(),
        ),
    ];
    let mut out = String::from("quantity,value\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{v}");
    }
    emit(None, stdout, &out)
}

fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let config = a.experiment.to_config()?;
    config.validate()?;
    let file = open_output(a.csv.as_deref())?;
    let table = run_trials(&config)?;
    let mut out = String::from("trial,seed,chosen,steps,mistake,final_eps,ratio\n");
    for t in &table.trials {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            t.trial_index,
            t.seed,
            t.chosen,
            t.steps,
            t.mistake as u8,
            opt_g(t.final_eps),
            opt_g(t.ratio)
        );
    }
    let agg = &table.aggregate;
    let _ = writeln!(
        out,
        "mean,,,{},{},{},{}",
        format_g(agg.mean_steps),
        format_g(agg.error_rate),
        opt_g(agg.mean_final_eps),
        opt_g(agg.mean_ratio)
    );
    let _ = writeln!(out, "stddev,,,{},,,", format_g(agg.stddev_steps));
    emit(file, stdout, &out)
}

fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let template = a.experiment.to_config()?;
    let (from, to, step) = match a.param {
        SweepParam::Gamma0 => (
            a.from.unwrap_or(0.04),
            a.to.unwrap_or(0.296),
            a.step.unwrap_or(0.004),
        ),
        SweepParam::Gamma => {
            let gamma0 = template.gamma0.ok_or_else(|| {
                Failure::new(
                    EXIT_USAGE,
                    "invalid value for --gamma0: required for a gamma sweep",
                )
            })?;
            (
                a.from.unwrap_or(0.04),
                a.to.unwrap_or(gamma0),
                a.step.unwrap_or(0.004),
            )
        }
    };
    let grid = linear_grid(from, to, step)?;
    if a.algos.is_empty() {
        return Err(Failure::new(
            EXIT_USAGE,
            "invalid value for --algos: empty list",
        ));
    }
    // Validate every grid point before opening the output.
    for &value in &grid {
        for &algorithm in &a.algos {
            let mut cfg = template.clone();
            cfg.algorithm = algorithm;
            match a.param {
                SweepParam::Gamma0 => cfg.gamma0 = Some(value),
                SweepParam::Gamma => cfg.gamma = Some(value),
            }
            cfg.validate()?;
        }
    }
    let file = open_output(a.csv.as_deref())?;
    let rows = sweep(&template, a.param, &grid, &a.algos)?;
    let mut out =
        String::from("param,algo,mean_steps,stddev,error_rate,mean_final_eps,mean_ratio\n");
    for r in rows {
        let g = &r.aggregate;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_g(r.param),
            r.algorithm,
            format_g(g.mean_steps),
            format_g(g.stddev_steps),
            format_g(g.error_rate),
            opt_g(g.mean_final_eps),
            opt_g(g.mean_ratio)
        );
    }
    emit(file, stdout, &out)
}

fn cmd_calibrate(a: &CalibrateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let config = a.experiment.to_config()?;
    config.validate()?;
    if !(a.c_min > 0.0 && a.c_step > 0.0 && a.c_max >= a.c_min) {
        return Err(Failure::new(
            EXIT_USAGE,
            "invalid value for --c-step: need 0 < c-min <= c-max and c-step > 0",
        ));
    }
    let grid = ConstantGrid {
        min: a.c_min,
        max: a.c_max,
        step: a.c_step,
    };
    let file = open_output(a.csv.as_deref())?;
    let outcome = calibrate_optimal_c(&config, grid)?;
    let mut trace = String::from("c,mistakes\n");
    for p in &outcome.trace {
        let _ = writeln!(trace, "{},{}", format_g(p.c), p.mistakes);
    }
    let summary = match outcome.safe_c {
        Some(c) => format!("safe_c={}\n", format_g(c)),
        None => "safe_c=none\n".to_string(),
    };
    if file.is_some() {
        emit(None, stdout, &summary)?;
        emit(file, stdout, &trace)?;
    } else {
        emit(None, stdout, &format!("{summary}{trace}"))?;
    }
    match outcome.safe_c {
        Some(_) => Ok(()),
        None => Err(Failure::new(
            EXIT_CALIBRATION,
            format!(
                "{} mistakes already at the grid minimum c = {}",
                outcome.trace[0].mistakes,
                format_g(a.c_min)
            ),
        )),
    }
}

fn cmd_select(a: &SelectArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    bounds::check_delta(a.delta)?;
    bounds::check_c(a.c)?;
    if let Some(g) = a.gamma {
        bounds::check_unit("gamma", g)?;
    }
    let need_gamma = || {
        a.gamma.ok_or_else(|| {
            Failure::new(
                EXIT_USAGE,
                "invalid value for --gamma: required for this algorithm",
            )
        })
    };
    let mut source = read_matrix_csv(&a.matrix)?;
    let n = source.n();
    let result = match a.algo {
        Algorithm::Bs => {
            let m = match a.m {
                Some(m) => m,
                None => bounds::sample_size_bs(n, a.delta, need_gamma()?, a.c)?,
            };
            bs_run(&mut source, m)?
        }
        Algorithm::Cs => cs_run(
            &mut source,
            &CsParams {
                delta: a.delta,
                gamma: need_gamma()?,
                c: a.c,
                dec_mode: a.dec,
                b_variant: a.b_variant,
            },
        )?,
        Algorithm::As => as_run(
            &mut source,
            &AsParams {
                delta: a.delta,
                c: a.c,
            },
        )?,
    };
    let out = format!(
        "chosen,steps,stop_reason\n{},{},{}\n",
        result.chosen, result.steps, result.stop_reason
    );
    emit(None, stdout, &out)
}
