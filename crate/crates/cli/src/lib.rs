//! Command-line front end for `latentsim`.
//!
//! [`parse_config`] turns arguments plus an optional JSON config document into
//! a validated [`RunConfig`]; [`execute`] renders the requested output.
//! Command-line flags override config-file values, which override defaults.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use latentsim_core::inference::{
    fpr_estimate_with, solution_one_analysis, solution_two_analysis, two_proportion_test, CiMethod,
    FprVariant,
};
use latentsim_core::report::{
    bayes_table, emit_report, emit_summary, estimates_table, per_iteration_csv,
    proportion_test_table, report_all_with, BayesSection, OutputFormat,
};
use latentsim_core::{
    preset_rate_vectors, run_study, DecisionCategory, ObservedCounts, PartitionMode,
    RateVectorPair, SourceScenario, StudyDesign, StudyOptions, PRESET_NAMES,
};
use serde_json::{Map, Value};

pub const DEFAULT_ITERATIONS: u64 = 1000;
pub const QUICK_ITERATIONS: u64 = 50;
pub const DEFAULT_PRESET: &str = "observed";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn config(key: &str, message: impl ToString) -> Self {
        CliError::Config {
            key: key.to_owned(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }

    /// The config key the error refers to, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            CliError::Config { key, .. } => Some(key),
            _ => None,
        }
    }
}

fn numerical(e: latentsim_core::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "latentsim",
    version,
    about = "Simulate a latent-print error-rate study and audit false-positive-rate estimates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Replicate the study under one rate vector and summarize each cell.
    Simulate,
    /// Ratio estimates of the false-positive rate with 95% upper bounds.
    Estimate {
        /// Interval method for the upper bounds.
        #[arg(long, value_parser = ["wald", "clopper-pearson"], default_value = "wald")]
        method: String,
    },
    /// MAP and 97.5% posterior bounds for both Bayesian analyses.
    Bayes,
    /// Fisher exact test of two proportions x1/n1 vs x2/n2. Without
    /// arguments, compares wrong-person IDs by source presence.
    TestProportions {
        x1: Option<u64>,
        n1: Option<u64>,
        x2: Option<u64>,
        n2: Option<u64>,
    },
    /// Run every preset experiment and every estimator.
    ReportAll,
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Rate preset name or path to a rate-vector JSON file.
    #[arg(long, global = true, value_name = "PRESET|PATH")]
    pub rates: Option<String>,
    /// Number of replicated studies.
    #[arg(long, global = true, value_name = "N")]
    pub iterations: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format: table, json or csv.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Observed-counts JSON file; defaults to the built-in study counts.
    #[arg(long, global = true, value_name = "PATH")]
    pub counts: Option<PathBuf>,
    /// Also emit every iteration's count table (simulate only).
    #[arg(long, global = true)]
    pub keep_iterations: bool,
    /// Use 50 iterations unless --iterations is given.
    #[arg(long, global = true)]
    pub quick: bool,
    /// JSON config file; its values sit between flags and defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Draw a fresh print partition per iteration (resample) or share one
    /// (fixed).
    #[arg(long, global = true)]
    pub partition: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Simulate,
    Estimate(CiMethod),
    Bayes,
    TestProportions(Option<[u64; 4]>),
    ReportAll,
}

/// Where the rate vectors came from.
#[derive(Debug, Clone, PartialEq)]
pub enum RateSource {
    Preset(String),
    File(PathBuf),
    Inline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub rate_source: RateSource,
    pub rates: RateVectorPair,
    pub iterations: u64,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub counts: ObservedCounts,
    pub keep_per_iteration: bool,
    pub design: StudyDesign,
    pub partition: PartitionMode,
}

/// Values a config file may set. Keys are camelCase.
#[derive(Debug, Default)]
struct FileConfig {
    rates: Option<Value>,
    iterations: Option<u64>,
    seed: Option<u64>,
    format: Option<String>,
    out: Option<PathBuf>,
    counts: Option<Value>,
    keep_iterations: Option<bool>,
    partition: Option<String>,
    design: Option<StudyDesign>,
}

const FILE_KEYS: [&str; 9] = [
    "rates",
    "iterations",
    "seed",
    "format",
    "out",
    "counts",
    "keepIterations",
    "partition",
    "design",
];

fn parse_file_config(text: &str) -> Result<FileConfig, CliError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::config("config", e))?;
    let Value::Object(map) = doc else {
        return Err(CliError::config("config", "expected a JSON object"));
    };
    if let Some(k) = map.keys().find(|k| !FILE_KEYS.contains(&k.as_str())) {
        return Err(CliError::config(k, "unknown key"));
    }
    let take_u64 = |key: &str| -> Result<Option<u64>, CliError> {
        map.get(key)
            .map(|v| {
                v.as_u64()
                    .ok_or_else(|| CliError::config(key, "expected a non-negative integer"))
            })
            .transpose()
    };
    let take_str = |key: &str, map: &Map<String, Value>| -> Result<Option<String>, CliError> {
        map.get(key)
            .map(|v| {
                v.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| CliError::config(key, "expected a string"))
            })
            .transpose()
    };
    let design = map
        .get("design")
        .map(|v| {
            serde_json::from_value::<StudyDesign>(v.clone())
                .map_err(|e| CliError::config("design", e))
        })
        .transpose()?;
    Ok(FileConfig {
        rates: map.get("rates").cloned(),
        iterations: take_u64("iterations")?,
        seed: take_u64("seed")?,
        format: take_str("format", &map)?,
        out: take_str("out", &map)?.map(PathBuf::from),
        counts: map.get("counts").cloned(),
        keep_iterations: map
            .get("keepIterations")
            .map(|v| {
                v.as_bool()
                    .ok_or_else(|| CliError::config("keepIterations", "expected a boolean"))
            })
            .transpose()?,
        partition: take_str("partition", &map)?,
        design,
    })
}

fn read_file(key: &str, path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::config(key, format!("cannot read {}: {e}", path.display())))
}

fn rate_error(e: latentsim_core::Error) -> CliError {
    CliError::config("rates", e)
}

fn resolve_rates(spec: &str) -> Result<(RateSource, RateVectorPair), CliError> {
    if PRESET_NAMES.contains(&spec) {
        return Ok((
            RateSource::Preset(spec.to_owned()),
            preset_rate_vectors(spec).map_err(rate_error)?,
        ));
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::config(
            "rates",
            format!(
                "`{spec}` is neither a preset ({}) nor a file",
                PRESET_NAMES.join(", ")
            ),
        ));
    }
    let pair = RateVectorPair::from_json(&read_file("rates", path)?).map_err(rate_error)?;
    Ok((RateSource::File(path.to_owned()), pair))
}

fn resolve_rates_value(v: &Value) -> Result<(RateSource, RateVectorPair), CliError> {
    match v {
        Value::String(s) => resolve_rates(s),
        Value::Object(_) => Ok((
            RateSource::Inline,
            RateVectorPair::from_json(&v.to_string()).map_err(rate_error)?,
        )),
        _ => Err(CliError::config(
            "rates",
            "expected a preset name, a path or a rate object",
        )),
    }
}

fn resolve_counts_value(v: &Value) -> Result<ObservedCounts, CliError> {
    match v {
        Value::String(s) => ObservedCounts::from_json(&read_file("counts", Path::new(s))?)
            .map_err(|e| CliError::config("counts", e)),
        Value::Object(_) => {
            ObservedCounts::from_json(&v.to_string()).map_err(|e| CliError::config("counts", e))
        }
        _ => Err(CliError::config(
            "counts",
            "expected a path or a counts object",
        )),
    }
}

fn parse_format(key: &str, s: &str) -> Result<OutputFormat, CliError> {
    s.parse()
        .map_err(|_| CliError::config(key, format!("`{s}` is not one of table, json, csv")))
}

fn parse_partition(key: &str, s: &str) -> Result<PartitionMode, CliError> {
    match s {
        "resample" => Ok(PartitionMode::Resample),
        "fixed" => Ok(PartitionMode::Fixed),
        other => Err(CliError::config(
            key,
            format!("`{other}` is not one of resample, fixed"),
        )),
    }
}

/// Parses `args` (without the program name) and an optional config document.
///
/// When `file` is `None` and `--config` is given, the named file is read.
pub fn parse_config<I, T>(args: I, file: Option<&str>) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("latentsim")).chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    let loaded;
    let file = match (file, &cli.flags.config) {
        (Some(text), _) => Some(text),
        (None, Some(path)) => {
            loaded = read_file("config", path)?;
            Some(loaded.as_str())
        }
        (None, None) => None,
    };
    let file = file.map(parse_file_config).transpose()?.unwrap_or_default();
    build_config(cli, file)
}

fn build_config(cli: Cli, file: FileConfig) -> Result<RunConfig, CliError> {
    let flags = cli.flags;
    let command = match cli.command {
        CommandArgs::Simulate => Command::Simulate,
        CommandArgs::Estimate { method } => Command::Estimate(match method.as_str() {
            "clopper-pearson" => CiMethod::ClopperPearson,
            _ => CiMethod::Wald,
        }),
        CommandArgs::Bayes => Command::Bayes,
        CommandArgs::TestProportions { x1, n1, x2, n2 } => match (x1, n1, x2, n2) {
            (None, None, None, None) => Command::TestProportions(None),
            (Some(a), Some(b), Some(c), Some(d)) => Command::TestProportions(Some([a, b, c, d])),
            _ => {
                return Err(CliError::config(
                    "test-proportions",
                    "give all of x1 n1 x2 n2 or none of them",
                ))
            }
        },
        CommandArgs::ReportAll => Command::ReportAll,
    };

    let (rate_source, rates) = match (&flags.rates, &file.rates) {
        (Some(s), _) => resolve_rates(s)?,
        (None, Some(v)) => resolve_rates_value(v)?,
        (None, None) => resolve_rates(DEFAULT_PRESET)?,
    };

    let iterations = match (flags.iterations, flags.quick) {
        (Some(n), _) => n,
        (None, true) => QUICK_ITERATIONS,
        (None, false) => file.iterations.unwrap_or(DEFAULT_ITERATIONS),
    };
    if iterations == 0 {
        return Err(CliError::config("iterations", "must be at least 1"));
    }

    let format = match (&flags.format, &file.format) {
        (Some(s), _) => parse_format("format", s)?,
        (None, Some(s)) => parse_format("format", s)?,
        (None, None) => OutputFormat::Table,
    };

    let counts = match (&flags.counts, &file.counts) {
        (Some(p), _) => ObservedCounts::from_json(&read_file("counts", p)?)
            .map_err(|e| CliError::config("counts", e))?,
        (None, Some(v)) => resolve_counts_value(v)?,
        (None, None) => ObservedCounts::builtin(),
    };

    let partition = match (&flags.partition, &file.partition) {
        (Some(s), _) => parse_partition("partition", s)?,
        (None, Some(s)) => parse_partition("partition", s)?,
        (None, None) => PartitionMode::Resample,
    };

    let design = file.design.unwrap_or_default();
    design
        .validate()
        .map_err(|e| CliError::config("design", e))?;

    Ok(RunConfig {
        command,
        rate_source,
        rates,
        iterations,
        seed: flags.seed.or(file.seed).unwrap_or(0),
        format,
        out: flags.out.or(file.out),
        counts,
        keep_per_iteration: flags.keep_iterations || file.keep_iterations.unwrap_or(false),
        design,
        partition,
    })
}

fn estimates_csv(estimates: &[latentsim_core::inference::RatioEstimate]) -> String {
    let mut out = String::from("variant,numerator,denominator,estimate,ciUpper95,method\n");
    for e in estimates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            e.variant, e.numerator, e.denominator, e.estimate, e.ci_upper95, e.method
        );
    }
    out
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Produces the document for a validated config.
pub fn execute(config: &RunConfig) -> Result<String, CliError> {
    let fmt = config.format;
    match &config.command {
        Command::Simulate => {
            let options = StudyOptions {
                keep_per_iteration: config.keep_per_iteration,
                partition: config.partition,
            };
            let summary = run_study(
                config.seed,
                &config.design,
                &config.rates,
                config.iterations,
                options,
            )
            .map_err(numerical)?;
            let mut out = match (fmt, &summary.per_iteration) {
                (OutputFormat::Json, Some(tables)) => {
                    return Ok(to_json(&serde_json::json!({
                        "summary": summary,
                        "perIteration": tables,
                    })))
                }
                (OutputFormat::Json, None) => return Ok(to_json(&summary)),
                _ => emit_summary(&summary, fmt),
            };
            if let Some(csv) = per_iteration_csv(&summary) {
                out.push('\n');
                out.push_str(&csv);
            }
            Ok(out)
        }
        Command::Estimate(method) => {
            let estimates = FprVariant::ALL
                .into_iter()
                .map(|v| fpr_estimate_with(v, &config.counts, *method))
                .collect::<Result<Vec<_>, _>>()
                .map_err(numerical)?;
            Ok(match fmt {
                OutputFormat::Table => estimates_table(&estimates),
                OutputFormat::Json => to_json(&estimates),
                OutputFormat::Csv => estimates_csv(&estimates),
            })
        }
        Command::Bayes => {
            let section = BayesSection {
                solution_one: solution_one_analysis(&config.counts).map_err(numerical)?,
                solution_two: solution_two_analysis(&config.counts).map_err(numerical)?,
            };
            Ok(match fmt {
                OutputFormat::Table => bayes_table(&section),
                OutputFormat::Json => to_json(&section),
                OutputFormat::Csv => {
                    let mut out = String::from("analysis,successes,trials,map,upper975\n");
                    for (name, s) in [
                        ("present", &section.solution_one.present),
                        ("absent", &section.solution_one.absent),
                        ("wrongFinger", &section.solution_two.wrong_finger),
                        ("wrongPerson", &section.solution_two.wrong_person),
                    ] {
                        let _ = writeln!(
                            out,
                            "{name},{},{},{},{}",
                            s.successes, s.trials, s.map, s.upper975
                        );
                    }
                    out
                }
            })
        }
        Command::TestProportions(args) => {
            let [x1, n1, x2, n2] = match args {
                Some(a) => *a,
                None => {
                    let present = config.counts.scenario(SourceScenario::SourcePresent);
                    let absent = config.counts.scenario(SourceScenario::SourceAbsent);
                    [
                        present[DecisionCategory::WrongPersonId],
                        present.total(),
                        absent[DecisionCategory::WrongPersonId],
                        absent.total(),
                    ]
                }
            };
            let t = two_proportion_test(x1, n1, x2, n2)
                .map_err(|e| CliError::config("test-proportions", e))?;
            Ok(match fmt {
                OutputFormat::Table => proportion_test_table(&t),
                OutputFormat::Json => to_json(&t),
                OutputFormat::Csv => format!(
                    "x1,n1,x2,n2,pValue,significant\n{},{},{},{},{},{}\n",
                    t.x1, t.n1, t.x2, t.n2, t.p_value, t.significant
                ),
            })
        }
        Command::ReportAll => {
            let report = report_all_with(
                &config.counts,
                config.seed,
                config.iterations,
                &config.design,
                config.partition,
            )
            .map_err(numerical)?;
            let mut out = emit_report(&report, fmt);
            if !out.ends_with('\n') {
                out.push('\n');
            }
            Ok(out)
        }
    }
}

/// Writes the output to `config.out`, or to stdout.
pub fn write_output(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Full program: parse, run, write. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    // let clap print help and version itself
    if let Err(e) = Cli::try_parse_from(&argv) {
        let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        let _ = e.print();
        return code;
    }
    let result = parse_config(argv.into_iter().skip(1), None)
        .and_then(|config| execute(&config).and_then(|text| write_output(&config, &text)));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("latentsim: {e}");
            e.exit_code()
        }
    }
}
