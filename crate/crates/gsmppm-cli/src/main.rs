//! Command-line front end for the GSMPPM toolkit.
//!
//! Subcommands mirror the library's workflow: `design` builds a
//! constellation, `capacity` estimates CM/BICM mutual information,
//! `threshold` runs the PEXIT bisection, `search` ranks base-matrix
//! candidates, `ber` runs one Monte-Carlo experiment, and `table` drives a
//! cross-product batch. Errors are emitted as one-line JSON on stderr; the
//! exit status is 0 on success, 1 for validation problems, 2 for runtime
//! failures.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gsmppm::adm::{build_adm, build_optimized, SearchBudget};
use gsmppm::capacity::cm_bicm_capacity;
use gsmppm::channel::{FadingParams, PowerConfig};
use gsmppm::constellation::{natural_constellation, GsmppmConstellation, ModulationPattern};
use gsmppm::pexit::{
    pexit_threshold, sample_template_candidates, search_base_matrix, DetectorLlr, PexitOptions,
    SearchTemplate,
};
use gsmppm::pldpc::{builtin_code, BaseMatrix};
use gsmppm::rng::Stream;
use gsmppm::sim::{
    ber_csv, pattern_label, run_ber, run_table, ExperimentConfig, TableJob,
    THRESHOLD_CSV_HEADER,
};
use gsmppm::{Error, Result};

#[derive(Parser)]
#[command(name = "gsmppm", version, about = "Dual-mode GSMPPM coded-modulation toolkit")]
struct Cli {
    /// Size of the worker thread pool (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a constellation and write it as JSON.
    Design(DesignArgs),
    /// Estimate CM and BICM capacity over an SNR grid.
    Capacity(CapacityArgs),
    /// Compute a protograph decoding threshold by PEXIT bisection.
    Threshold(ThresholdArgs),
    /// Sample base-matrix candidates and rank them by threshold.
    Search(SearchArgs),
    /// Run a bit-error-rate experiment from a JSON config.
    Ber(BerArgs),
    /// Run a cross-product table job (thresholds or BER) from a JSON config.
    Table(TableArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// `n_tx,n_rx,n_a,l,l_a[,m_s]` — e.g. `4,4,2,5,2,32`.
fn parse_pattern(text: &str) -> Result<ModulationPattern> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if !(parts.len() == 5 || parts.len() == 6) {
        return Err(Error::InvalidConfig(format!(
            "pattern {text:?} must be n_tx,n_rx,n_a,l,l_a[,m_s]"
        )));
    }
    let mut nums = [0u32; 6];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part.parse().map_err(|_| {
            Error::InvalidConfig(format!("pattern component {part:?} is not an integer"))
        })?;
    }
    let small: Vec<u8> = nums[..5]
        .iter()
        .map(|&v| {
            u8::try_from(v)
                .map_err(|_| Error::InvalidConfig(format!("pattern component {v} too large")))
        })
        .collect::<Result<_>>()?;
    let pattern = ModulationPattern::new(small[0], small[1], small[2], small[3], small[4])?;
    if parts.len() == 6 && pattern.m_s != nums[5] {
        return Err(Error::InvalidConfig(format!(
            "pattern {text:?} declares {} points but the derived size is {}",
            nums[5], pattern.m_s
        )));
    }
    Ok(pattern)
}

/// `adm`, `optimized`, `natural`, or a constellation JSON file path.
fn resolve_constellation(name: &str, pattern: &ModulationPattern) -> Result<GsmppmConstellation> {
    match name {
        "adm" => Ok(build_adm(pattern, &SearchBudget::default())?.constellation),
        "optimized" => Ok(build_optimized(pattern, &SearchBudget::default())?.constellation),
        "natural" => natural_constellation(pattern),
        other if Path::new(other).exists() => {
            let c = GsmppmConstellation::load_json(Path::new(other))?;
            if c.pattern() != pattern {
                return Err(Error::InvalidConfig(format!(
                    "constellation file {other} was built for a different pattern"
                )));
            }
            Ok(c)
        }
        other => Err(Error::InvalidConfig(format!(
            "unknown constellation {other:?} (expected adm | optimized | natural | a JSON file)"
        ))),
    }
}

/// A built-in code name or a base-matrix text file path.
fn resolve_code(name: &str) -> Result<BaseMatrix> {
    match builtin_code(name) {
        Ok(base) => Ok(base),
        Err(_) if Path::new(name).exists() => {
            BaseMatrix::parse(&std::fs::read_to_string(Path::new(name))?)
        }
        Err(e) => Err(e),
    }
}

/// Comma-separated SNR grid in dB, strictly increasing.
fn parse_snr_grid(text: &str) -> Result<Vec<f64>> {
    let grid: Vec<f64> = text
        .split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|_| {
                Error::InvalidConfig(format!("SNR grid entry {t:?} is not a number"))
            })
        })
        .collect::<Result<_>>()?;
    if grid.is_empty() || !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidConfig(
            "SNR grid must be non-empty and strictly increasing".into(),
        ));
    }
    Ok(grid)
}

fn read_config(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::InvalidConfig(format!("config not found: {}", path.display())));
    }
    Ok(std::fs::read_to_string(path)?)
}

/// Write to a file when `--out` was given, otherwise print to stdout.
fn deliver(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, content)?;
            println!("{}", path.display());
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

#[derive(Args)]
struct DesignArgs {
    /// Modulation pattern `n_tx,n_rx,n_a,l,l_a[,m_s]`.
    #[arg(long, value_parser = parse_pattern)]
    pattern: ModulationPattern,
    /// adm | optimized | natural.
    #[arg(long, default_value = "adm")]
    constellation: String,
    /// Output JSON file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_design(args: &DesignArgs) -> Result<()> {
    let c = resolve_constellation(&args.constellation, &args.pattern)?;
    deliver(args.out.as_deref(), &c.to_json_string())
}

#[derive(Args)]
struct CapacityArgs {
    #[arg(long, value_parser = parse_pattern)]
    pattern: ModulationPattern,
    /// adm | optimized | natural | constellation JSON file.
    #[arg(long, default_value = "adm")]
    constellation: String,
    /// Comma-separated SNR grid in dB, strictly increasing.
    #[arg(long, allow_hyphen_values = true)]
    snr: String,
    /// Lognormal log-amplitude standard deviation (0 disables fading).
    #[arg(long, default_value_t = 0.3)]
    sigma_x: f64,
    /// Code rate entering the noise calibration.
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    /// Monte-Carlo samples per SNR point.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_capacity(args: &CapacityArgs) -> Result<()> {
    let snr_grid = parse_snr_grid(&args.snr)?;
    let c = resolve_constellation(&args.constellation, &args.pattern)?;
    let fading =
        if args.sigma_x == 0.0 { FadingParams::disabled() } else { FadingParams::new(args.sigma_x)? };
    let power = PowerConfig::from_pattern(&args.pattern, 1.0)?;
    let stream = Stream::root(args.seed);
    let mut points = Vec::with_capacity(snr_grid.len());
    for (i, &snr) in snr_grid.iter().enumerate() {
        points.push(cm_bicm_capacity(
            &c,
            &fading,
            &power,
            snr,
            args.rate,
            args.samples,
            stream.child(i as u64),
        )?);
    }
    let content = match args.format {
        Format::Json => serde_json::to_string_pretty(&points)? + "\n",
        Format::Csv => {
            let mut out =
                String::from("snr_db,c_cm,c_bicm,stderr_cm,stderr_bicm,n_samples\n");
            for p in &points {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    p.snr_db, p.c_cm, p.c_bicm, p.stderr_cm, p.stderr_bicm, p.n_samples
                );
            }
            out
        }
    };
    deliver(args.out.as_deref(), &content)
}

#[derive(Args)]
struct ThresholdArgs {
    /// Built-in code name (i-pldpc | ar4ja-r12 | regular-36) or matrix file.
    #[arg(long)]
    code: String,
    #[arg(long, default_value = "adm")]
    constellation: String,
    #[arg(long, value_parser = parse_pattern)]
    pattern: ModulationPattern,
    #[arg(long, default_value_t = 0.3)]
    sigma_x: f64,
    /// Detector samples per SNR probe.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Bisection bracket, low end (dB).
    #[arg(long, default_value_t = -8.0)]
    lo_db: f64,
    /// Bisection bracket, high end (dB).
    #[arg(long, default_value_t = 4.0)]
    hi_db: f64,
    /// Bisection stops at this bracket width (dB).
    #[arg(long, default_value_t = 0.01)]
    tol_db: f64,
    /// Detector LLR computation: max-log or exact MAP.
    #[arg(long, value_enum, default_value_t = LlrArg::MaxLog)]
    detector: LlrArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LlrArg {
    MaxLog,
    ExactMap,
}

impl From<LlrArg> for DetectorLlr {
    fn from(v: LlrArg) -> Self {
        match v {
            LlrArg::MaxLog => DetectorLlr::MaxLog,
            LlrArg::ExactMap => DetectorLlr::ExactMap,
        }
    }
}

fn cmd_threshold(args: &ThresholdArgs) -> Result<()> {
    let base = resolve_code(&args.code)?;
    let c = resolve_constellation(&args.constellation, &args.pattern)?;
    let fading =
        if args.sigma_x == 0.0 { FadingParams::disabled() } else { FadingParams::new(args.sigma_x)? };
    let power = PowerConfig::from_pattern(&args.pattern, 1.0)?;
    let opts = PexitOptions {
        n_samples: args.samples,
        lo_db: args.lo_db,
        hi_db: args.hi_db,
        tol_db: args.tol_db,
        detector_llr: args.detector.into(),
        ..PexitOptions::default()
    };
    let result = pexit_threshold(&base, &c, &fading, &power, &opts, Stream::root(args.seed))?;
    let content = match args.format {
        Format::Json => serde_json::to_string_pretty(&result)? + "\n",
        Format::Csv => format!(
            "{THRESHOLD_CSV_HEADER}\n{},{},{},{},{},{},{}\n",
            args.code,
            pattern_label(&args.pattern),
            args.constellation,
            args.sigma_x,
            result.threshold_db,
            result.bracket_db,
            args.seed
        ),
    };
    deliver(args.out.as_deref(), &content)
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_parser = parse_pattern)]
    pattern: ModulationPattern,
    #[arg(long, default_value = "adm")]
    constellation: String,
    #[arg(long, default_value_t = 0.3)]
    sigma_x: f64,
    /// Candidate sampling budget.
    #[arg(long, default_value_t = 50)]
    budget: u64,
    /// Keep the best K candidates.
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Detector samples per SNR probe.
    #[arg(long, default_value_t = 20_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_search(args: &SearchArgs) -> Result<()> {
    let c = resolve_constellation(&args.constellation, &args.pattern)?;
    let fading =
        if args.sigma_x == 0.0 { FadingParams::disabled() } else { FadingParams::new(args.sigma_x)? };
    let power = PowerConfig::from_pattern(&args.pattern, 1.0)?;
    let stream = Stream::root(args.seed);
    let candidates =
        sample_template_candidates(&SearchTemplate::default(), args.budget, stream.child(0));
    let opts = PexitOptions { n_samples: args.samples, ..PexitOptions::default() };
    let ranked = search_base_matrix(&candidates, &c, &fading, &power, &opts, stream.child(1))?;

    let mut content = format!(
        "# base-matrix candidates ranked by PEXIT threshold (best first)\n\
         # constellation {} pattern {} sigma_x {} samples {} seed {}\n",
        args.constellation,
        pattern_label(&args.pattern),
        args.sigma_x,
        args.samples,
        args.seed
    );
    for (rank, item) in ranked.iter().take(args.top).enumerate() {
        let _ = write!(
            content,
            "\n# rank {} threshold_db {} bracket_db {}\n{}",
            rank + 1,
            item.result.threshold_db,
            item.result.bracket_db,
            item.base.to_text()
        );
    }
    deliver(args.out.as_deref(), &content)
}

#[derive(Args)]
struct BerArgs {
    /// Experiment config JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output directory (CSV goes to stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_ber(args: &BerArgs) -> Result<()> {
    let text = read_config(&args.config)?;
    let mut config: ExperimentConfig = serde_json::from_str(&text)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let points = run_ber(&config)?;
    let content = match args.format {
        Format::Json => serde_json::to_string_pretty(&points)? + "\n",
        Format::Csv => ber_csv(&points),
    };
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(match args.format {
                Format::Csv => "ber.csv",
                Format::Json => "ber.json",
            });
            std::fs::write(&path, &content)?;
            println!("{}", path.display());
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

#[derive(Args)]
struct TableArgs {
    /// Table job JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Override the job's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the CSV and manifest.
    #[arg(long, default_value = "table-out")]
    out: PathBuf,
}

fn cmd_table(args: &TableArgs) -> Result<()> {
    let text = read_config(&args.config)?;
    let mut job: TableJob = serde_json::from_str(&text)?;
    if let Some(seed) = args.seed {
        job.seed = seed;
    }
    let report = run_table(&job, &args.out)?;
    println!("{}", report.csv_path.display());
    println!("{}", report.manifest_path.display());
    if report.rows_failed > 0 {
        eprintln!(
            "{}",
            serde_json::json!({
                "warning": format!("{} of {} rows failed; see manifest", report.rows_failed,
                                   report.rows_ok + report.rows_failed),
            })
        );
    }
    Ok(())
}

fn run(command: &Command) -> Result<()> {
    match command {
        Command::Design(args) => cmd_design(args),
        Command::Capacity(args) => cmd_capacity(args),
        Command::Threshold(args) => cmd_threshold(args),
        Command::Search(args) => cmd_search(args),
        Command::Ber(args) => cmd_ber(args),
        Command::Table(args) => cmd_table(args),
    }
}

fn emit_error(message: &str, kind: &str) {
    eprintln!("{}", serde_json::json!({ "error": message, "kind": kind }));
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            emit_error(&e.to_string(), "validation");
            std::process::exit(1);
        }
    };
    if let Some(workers) = cli.workers {
        if let Err(e) =
            rayon::ThreadPoolBuilder::new().num_threads(workers).build_global()
        {
            emit_error(&format!("worker pool: {e}"), "runtime");
            std::process::exit(2);
        }
    }
    match run(&cli.command) {
        Ok(()) => {}
        Err(e @ Error::Json(_)) => {
            // Malformed config files count as validation problems.
            emit_error(&e.to_string(), "validation");
            std::process::exit(1);
        }
        Err(e) if e.is_validation() => {
            emit_error(&e.to_string(), "validation");
            std::process::exit(1);
        }
        Err(e) => {
            emit_error(&e.to_string(), "runtime");
            std::process::exit(2);
        }
    }
}
