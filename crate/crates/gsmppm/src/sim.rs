//! End-to-end Monte-Carlo bit-error-rate experiments.
//!
//! The pipeline per frame: random information bits → systematic encoding →
//! puncturing → random interleaver → symbol mapping → per-symbol fading and
//! additive noise → max-log demapping → deinterleaving → belief-propagation
//! decoding → error tallies. Every random draw descends from the experiment
//! seed through labeled [`Stream`]s, so results are reproducible
//! bit-for-bit regardless of worker count, and common random numbers pair
//! runs that differ only in code or constellation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adm::{build_adm, build_optimized, SearchBudget};
use crate::channel::{add_noise, noise_sigma, FadingMatrix, FadingParams, PowerConfig};
use crate::constellation::{natural_constellation, GsmppmConstellation, ModulationPattern};
use crate::error::{Error, Result};
use crate::modem::SymbolTable;
use crate::pexit::{pexit_threshold, PexitOptions};
use crate::pldpc::{
    builtin_code, encoder_from_parity, lift, BaseMatrix, Decoder, DecoderKind, Encoder,
    LiftedCode,
};
use crate::rng::Stream;

// ---------------------------------------------------------------------------
// Configuration.

/// Where the constellation comes from: a named builder or a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstellationSource {
    /// `"adm"`, `"optimized"`, or `"natural"`.
    Named(String),
    /// A constellation JSON file.
    File { file: PathBuf },
}

impl Default for ConstellationSource {
    fn default() -> Self {
        ConstellationSource::Named("adm".into())
    }
}

/// Where the base matrix comes from: a built-in name or a text file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CodeSource {
    /// `"i-pldpc"`, `"ar4ja-r12"`, or `"regular-36"`.
    Builtin(String),
    /// A base-matrix text file.
    File { file: PathBuf },
}

impl Default for CodeSource {
    fn default() -> Self {
        CodeSource::Builtin("i-pldpc".into())
    }
}

/// How often a fresh fading matrix is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingMode {
    /// Independent fading per GSMPPM symbol.
    #[default]
    PerSymbol,
    /// One fading draw held over a whole codeword.
    PerFrame,
}

/// Interleaver refresh policy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterleaverMode {
    /// A fresh permutation per frame (drawn from the frame's stream).
    #[default]
    PerFrame,
    /// One permutation drawn from the experiment seed, reused everywhere.
    Fixed,
}

/// Wall-clock reporting policy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimingMode {
    /// Keep emitted files fully deterministic: the seconds column is 0.
    #[default]
    None,
    /// Record real elapsed seconds and log progress to stderr. Output is
    /// then no longer byte-reproducible across machines.
    Live,
}

/// Early-stop rule for one SNR point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    /// Stop once this many frame errors are seen (at least 50 for usable
    /// confidence intervals).
    #[serde(default = "default_min_frame_errors")]
    pub min_frame_errors: u64,
    /// Hard cap on simulated frames per point.
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
}

fn default_min_frame_errors() -> u64 {
    100
}
fn default_max_frames() -> u64 {
    200_000
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { min_frame_errors: 100, max_frames: 200_000 }
    }
}

/// A complete BER experiment description (JSON-serializable).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pattern: ModulationPattern,
    #[serde(default)]
    pub constellation: ConstellationSource,
    #[serde(default)]
    pub code: CodeSource,
    /// Lifting factor (protograph copies).
    pub lift: usize,
    /// Lognormal log-amplitude standard deviation; 0 disables fading.
    pub sigma_x: f64,
    #[serde(default = "default_p_avg")]
    pub p_avg: f64,
    /// Strictly increasing SNR grid in dB.
    pub snr_db: Vec<f64>,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default = "default_t_bp")]
    pub t_bp: u32,
    #[serde(default)]
    pub decoder: DecoderKind,
    #[serde(default)]
    pub fading: FadingMode,
    #[serde(default)]
    pub interleaver: InterleaverMode,
    #[serde(default)]
    pub timing: TimingMode,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_p_avg() -> f64 {
    1.0
}
fn default_t_bp() -> u32 {
    100
}
fn default_seed() -> u64 {
    1
}

impl ExperimentConfig {
    /// Structural checks that need no file access.
    pub fn validate(&self) -> Result<()> {
        self.pattern.validate()?;
        if self.snr_db.is_empty() {
            return Err(Error::InvalidConfig("snr_db grid is empty".into()));
        }
        if !self.snr_db.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig("snr_db grid must be strictly increasing".into()));
        }
        if self.stop.min_frame_errors < 50 {
            return Err(Error::InvalidConfig(format!(
                "min_frame_errors = {} is below 50; error bars would be meaningless",
                self.stop.min_frame_errors
            )));
        }
        if self.stop.max_frames == 0 {
            return Err(Error::InvalidConfig("max_frames must be positive".into()));
        }
        if self.t_bp == 0 {
            return Err(Error::InvalidConfig("t_bp must be at least 1".into()));
        }
        if !(self.sigma_x >= 0.0 && self.sigma_x.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma_x = {} out of range", self.sigma_x)));
        }
        Ok(())
    }
}

/// Resolve a constellation source against a pattern.
pub fn resolve_constellation(
    source: &ConstellationSource,
    pattern: &ModulationPattern,
) -> Result<GsmppmConstellation> {
    match source {
        ConstellationSource::Named(name) => match name.as_str() {
            "adm" => Ok(build_adm(pattern, &SearchBudget::default())?.constellation),
            "optimized" => Ok(build_optimized(pattern, &SearchBudget::default())?.constellation),
            "natural" => natural_constellation(pattern),
            other => Err(Error::InvalidConfig(format!(
                "unknown constellation '{other}' (expected adm | optimized | natural)"
            ))),
        },
        ConstellationSource::File { file } => {
            let c = GsmppmConstellation::load_json(file)?;
            if c.pattern() != pattern {
                return Err(Error::InvalidConfig(format!(
                    "constellation file {} was built for a different pattern",
                    file.display()
                )));
            }
            Ok(c)
        }
    }
}

/// Resolve a code source to a base matrix.
pub fn resolve_base_matrix(source: &CodeSource) -> Result<BaseMatrix> {
    match source {
        CodeSource::Builtin(name) => builtin_code(name),
        CodeSource::File { file } => BaseMatrix::parse(&std::fs::read_to_string(file)?),
    }
}

/// Rank-deficient lifts are re-drawn with fresh permutations.
const LIFT_ATTEMPTS: u64 = 8;
/// Stream label for code construction.
const LIFT_LABEL: u64 = 0x11F7;
/// Stream label for the fixed-interleaver draw.
const PERM_LABEL: u64 = 0x9E44;

/// Lift a base matrix and build its encoder, retrying with fresh
/// permutations if the lifted parity-check matrix is rank deficient.
pub fn build_code(base: &BaseMatrix, z: usize, stream: Stream) -> Result<(LiftedCode, Encoder)> {
    let mut last = None;
    for attempt in 0..LIFT_ATTEMPTS {
        let code = lift(base, z, stream.child(attempt))?;
        match encoder_from_parity(&code) {
            Ok(encoder) => return Ok((code, encoder)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one encoder attempt"))
}

/// Everything resolved and ready to simulate.
struct Experiment {
    table: SymbolTable,
    pattern: ModulationPattern,
    code: LiftedCode,
    encoder: Encoder,
    decoder: Decoder,
    fading: FadingParams,
    power: PowerConfig,
    transmitted: Vec<u32>,
    rate: f64,
    m: usize,
}

fn build_experiment(config: &ExperimentConfig) -> Result<Experiment> {
    config.validate()?;
    let constellation = resolve_constellation(&config.constellation, &config.pattern)?;
    let power = PowerConfig::from_pattern(&config.pattern, config.p_avg)?;
    let table = SymbolTable::new(&constellation, &power)?;
    let base = resolve_base_matrix(&config.code)?;
    let (code, encoder) =
        build_code(&base, config.lift, Stream::root(config.seed).child(LIFT_LABEL))?;
    let decoder = Decoder::new(&code, config.decoder);
    let m = table.bits_per_symbol() as usize;
    let s = code.transmitted_len();
    if s % m != 0 {
        return Err(Error::InvalidConfig(format!(
            "transmitted length {s} is not a multiple of {m} bits per symbol; \
             choose a lift factor that aligns whole symbols"
        )));
    }
    let fading = if config.sigma_x == 0.0 {
        FadingParams::disabled()
    } else {
        FadingParams::new(config.sigma_x)?
    };
    let rate = base.effective_rate();
    let transmitted = code.transmitted_vars();
    Ok(Experiment {
        table,
        pattern: config.pattern,
        code,
        encoder,
        decoder,
        fading,
        power,
        transmitted,
        rate,
        m,
    })
}

/// One measured point of a BER curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub bit_errors: u64,
    pub bits: u64,
    pub frames: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub seconds: f64,
}

/// Identity permutation shuffled by the given stream.
fn make_permutation(len: usize, rng: &mut impl Rng) -> Vec<u32> {
    let mut perm: Vec<u32> = (0..len as u32).collect();
    perm.shuffle(rng);
    perm
}

/// Simulate one frame; returns (info bit errors, decoder iterations).
fn simulate_frame(
    exp: &Experiment,
    sigma: f64,
    t_bp: u32,
    interleaver: InterleaverMode,
    fading_mode: FadingMode,
    fixed_perm: &[u32],
    stream: Stream,
) -> u64 {
    let mut rng = stream.rng();
    let k = exp.encoder.info_len();
    let info: Vec<u8> = (0..k).map(|_| rng.gen::<bool>() as u8).collect();
    let codeword = exp.encoder.encode(&info);

    let s = exp.transmitted.len();
    let coded: Vec<u8> =
        exp.transmitted.iter().map(|&v| codeword[v as usize]).collect();
    let fresh_perm;
    let perm: &[u32] = match interleaver {
        InterleaverMode::PerFrame => {
            fresh_perm = make_permutation(s, &mut rng);
            &fresh_perm
        }
        InterleaverMode::Fixed => fixed_perm,
    };

    let frame_h = match fading_mode {
        FadingMode::PerFrame => {
            Some(exp.fading.sample(exp.pattern.n_rx, exp.pattern.n_tx, &mut rng))
        }
        FadingMode::PerSymbol => None,
    };

    let m = exp.m;
    let mut llr_tx = vec![0.0f64; s];
    for (sym, llr_chunk) in llr_tx.chunks_mut(m).enumerate() {
        let mut label = 0u32;
        for b in 0..m {
            label = label << 1 | u32::from(coded[perm[sym * m + b] as usize]);
        }
        let drawn;
        let h: &FadingMatrix = match &frame_h {
            Some(h) => h,
            None => {
                drawn = exp.fading.sample(exp.pattern.n_rx, exp.pattern.n_tx, &mut rng);
                &drawn
            }
        };
        let mut y = exp.table.noiseless(label, h);
        add_noise(&mut y, sigma, &mut rng);
        let metrics = exp.table.entry_metrics(&y, h);
        llr_chunk.copy_from_slice(&exp.table.max_log_llrs(&metrics, sigma));
    }

    // Deinterleave, then scatter onto the lifted codeword (punctured
    // positions keep a zero LLR).
    let mut channel_llrs = vec![0.0f64; exp.code.n_vars()];
    for (i, &p) in perm.iter().enumerate() {
        channel_llrs[exp.transmitted[p as usize] as usize] = llr_tx[i];
    }

    let outcome = exp.decoder.decode(&channel_llrs, t_bp);
    let decoded = exp.encoder.extract_info(&outcome.bits);
    decoded.iter().zip(&info).filter(|(a, b)| a != b).count() as u64
}

/// Frames simulated per parallel batch between stop-rule checks.
const FRAME_BATCH: u64 = 64;

fn run_point(
    exp: &Experiment,
    config: &ExperimentConfig,
    snr_index: usize,
    snr_db: f64,
    fixed_perm: &[u32],
) -> Result<BerPoint> {
    let sigma = noise_sigma(snr_db, exp.rate, &exp.pattern, &exp.power)?;
    let point_stream = Stream::root(config.seed).child(snr_index as u64);
    let k = exp.encoder.info_len() as u64;
    let live = config.timing == TimingMode::Live;
    let started = Instant::now();

    let (mut bit_errors, mut frames, mut frame_errors) = (0u64, 0u64, 0u64);
    'outer: while frames < config.stop.max_frames {
        let lo = frames;
        let hi = (lo + FRAME_BATCH).min(config.stop.max_frames);
        let batch: Vec<u64> = (lo..hi)
            .into_par_iter()
            .map(|f| {
                simulate_frame(
                    exp,
                    sigma,
                    config.t_bp,
                    config.interleaver,
                    config.fading,
                    fixed_perm,
                    point_stream.child(f),
                )
            })
            .collect();
        // Fold in frame order so the stopping point is identical no matter
        // how the batch was scheduled.
        for errs in batch {
            bit_errors += errs;
            frames += 1;
            frame_errors += u64::from(errs > 0);
            if frame_errors >= config.stop.min_frame_errors {
                break 'outer;
            }
        }
        if live {
            eprintln!(
                "snr {snr_db:+.2} dB: {frames} frames, {frame_errors} frame errors, \
                 ber {:.3e}",
                bit_errors as f64 / (frames * k) as f64
            );
        }
    }

    let bits = frames * k;
    Ok(BerPoint {
        snr_db,
        bit_errors,
        bits,
        frames,
        frame_errors,
        ber: bit_errors as f64 / bits as f64,
        fer: frame_errors as f64 / frames as f64,
        seconds: if live { started.elapsed().as_secs_f64() } else { 0.0 },
    })
}

/// Run the full BER experiment over its SNR grid.
pub fn run_ber(config: &ExperimentConfig) -> Result<Vec<BerPoint>> {
    let exp = build_experiment(config)?;
    let fixed_perm = {
        let mut rng = Stream::root(config.seed).child(PERM_LABEL).rng();
        make_permutation(exp.transmitted.len(), &mut rng)
    };
    config
        .snr_db
        .iter()
        .enumerate()
        .map(|(i, &snr)| run_point(&exp, config, i, snr, &fixed_perm))
        .collect()
}

/// CSV header shared by every BER emission.
pub const BER_CSV_HEADER: &str = "snr_db,bit_errors,bits,frames,frame_errors,ber,fer,seconds";

/// Render points as CSV (header included).
pub fn ber_csv(points: &[BerPoint]) -> String {
    let mut out = String::from(BER_CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            p.snr_db, p.bit_errors, p.bits, p.frames, p.frame_errors, p.ber, p.fer, p.seconds
        );
    }
    out
}

// ---------------------------------------------------------------------------
// Batch driver: cross-product tables.

/// What a table run computes per combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableMode {
    Threshold,
    Ber,
}

/// A cross-product job: codes × constellations × patterns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableJob {
    pub mode: TableMode,
    pub codes: Vec<String>,
    pub constellations: Vec<String>,
    pub patterns: Vec<ModulationPattern>,
    pub sigma_x: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_p_avg")]
    pub p_avg: f64,
    /// Threshold mode: PEXIT settings.
    #[serde(default)]
    pub pexit: PexitOptions,
    /// BER mode: information bits per frame (the lift factor is derived per
    /// code so every code carries exactly this many).
    #[serde(default = "default_info_bits")]
    pub info_bits: u64,
    /// BER mode: SNR grid.
    #[serde(default)]
    pub snr_db: Vec<f64>,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default = "default_t_bp")]
    pub t_bp: u32,
    #[serde(default)]
    pub decoder: DecoderKind,
    #[serde(default)]
    pub fading: FadingMode,
    #[serde(default)]
    pub interleaver: InterleaverMode,
    #[serde(default)]
    pub timing: TimingMode,
}

fn default_info_bits() -> u64 {
    1800
}

/// Compact pattern id used in CSV cells and job names: `4-4-2-5-2-32`.
pub fn pattern_label(p: &ModulationPattern) -> String {
    format!("{}-{}-{}-{}-{}-{}", p.n_tx, p.n_rx, p.n_a, p.l, p.l_a, p.m_s)
}

/// One manifest entry per attempted combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub job: String,
    pub root_seed: u64,
    /// Child label of the stream the row consumed (threshold rows share it
    /// across codes so detector samples pair up).
    pub stream_child: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Reproducibility record written next to every table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub git_hash: Option<String>,
    pub seed: u64,
    pub config_sha256: String,
    pub rows: Vec<ManifestRow>,
}

/// Hex SHA-256 of a serialized configuration.
pub fn config_digest(config_json: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config_json.as_bytes());
    let digest = hasher.finalize();
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Current git commit of the working directory, when available.
pub fn git_hash() -> Option<String> {
    let out = std::process::Command::new("git").args(["rev-parse", "HEAD"]).output().ok()?;
    if !out.status.success() {
        return None;
    }
    let hash = String::from_utf8(out.stdout).ok()?;
    let hash = hash.trim();
    (!hash.is_empty()).then(|| hash.to_string())
}

/// Files produced by a table run.
#[derive(Clone, Debug, PartialEq)]
pub struct TableReport {
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
    pub rows_ok: usize,
    pub rows_failed: usize,
}

/// CSV header shared by every threshold emission.
pub const THRESHOLD_CSV_HEADER: &str =
    "code,pattern,constellation,sigma_x,threshold_db,bracket_db,seed";

/// Run a cross-product job and write one CSV plus a manifest into `out_dir`.
///
/// Row order is patterns (outer) × constellations × codes (inner). Threshold
/// rows that share a (pattern, constellation) reuse the same detector
/// stream, so code comparisons are paired sample-for-sample. A failing row
/// is recorded in the manifest and the run continues.
pub fn run_table(job: &TableJob, out_dir: &Path) -> Result<TableReport> {
    if job.codes.is_empty() || job.constellations.is_empty() || job.patterns.is_empty() {
        return Err(Error::InvalidConfig("table job has an empty axis".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut csv = String::new();
    let mut rows = Vec::new();
    let (mut ok, mut failed) = (0usize, 0usize);

    csv.push_str(match job.mode {
        TableMode::Threshold => THRESHOLD_CSV_HEADER,
        TableMode::Ber => "code,constellation,pattern,snr_db,bit_errors,bits,frames,frame_errors,ber,fer,seconds",
    });
    csv.push('\n');

    for (pi, pattern) in job.patterns.iter().enumerate() {
        for (ci, constellation) in job.constellations.iter().enumerate() {
            // Shared across codes: pairs detector samples / frame noise.
            let pair_label = (pi * job.constellations.len() + ci) as u64;
            for code in &job.codes {
                let name = format!("{code}/{constellation}/{}", pattern_label(pattern));
                let row = run_table_row(job, pattern, constellation, code, pair_label, &mut csv);
                match row {
                    Ok(()) => ok += 1,
                    Err(e) => {
                        failed += 1;
                        rows.push(ManifestRow {
                            job: name,
                            root_seed: job.seed,
                            stream_child: pair_label,
                            error: Some(e.to_string()),
                        });
                        continue;
                    }
                }
                rows.push(ManifestRow {
                    job: name,
                    root_seed: job.seed,
                    stream_child: pair_label,
                    error: None,
                });
            }
        }
    }

    let csv_path = out_dir.join(match job.mode {
        TableMode::Threshold => "thresholds.csv",
        TableMode::Ber => "ber.csv",
    });
    std::fs::write(&csv_path, &csv)?;

    let manifest = RunManifest {
        git_hash: git_hash(),
        seed: job.seed,
        config_sha256: config_digest(&serde_json::to_string(job)?),
        rows,
    };
    let manifest_path = out_dir.join("manifest.json");
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;

    Ok(TableReport { csv_path, manifest_path, rows_ok: ok, rows_failed: failed })
}

fn run_table_row(
    job: &TableJob,
    pattern: &ModulationPattern,
    constellation: &str,
    code: &str,
    pair_label: u64,
    csv: &mut String,
) -> Result<()> {
    pattern.validate()?;
    match job.mode {
        TableMode::Threshold => {
            let c = resolve_constellation(
                &ConstellationSource::Named(constellation.to_string()),
                pattern,
            )?;
            let base = builtin_code(code)?;
            let fading = if job.sigma_x == 0.0 {
                FadingParams::disabled()
            } else {
                FadingParams::new(job.sigma_x)?
            };
            let power = PowerConfig::from_pattern(pattern, job.p_avg)?;
            let stream = Stream::root(job.seed).child(pair_label);
            let result = pexit_threshold(&base, &c, &fading, &power, &job.pexit, stream)?;
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                code,
                pattern_label(pattern),
                constellation,
                job.sigma_x,
                result.threshold_db,
                result.bracket_db,
                job.seed
            );
        }
        TableMode::Ber => {
            let base = builtin_code(code)?;
            let per_copy = base.variable_types() - base.check_types();
            if job.info_bits % per_copy as u64 != 0 {
                return Err(Error::InvalidConfig(format!(
                    "info_bits = {} is not a multiple of {per_copy} (information bits \
                     per protograph copy of '{code}')",
                    job.info_bits
                )));
            }
            let config = ExperimentConfig {
                pattern: *pattern,
                constellation: ConstellationSource::Named(constellation.to_string()),
                code: CodeSource::Builtin(code.to_string()),
                lift: (job.info_bits / per_copy as u64) as usize,
                sigma_x: job.sigma_x,
                p_avg: job.p_avg,
                snr_db: job.snr_db.clone(),
                stop: job.stop,
                t_bp: job.t_bp,
                decoder: job.decoder,
                fading: job.fading,
                interleaver: job.interleaver,
                timing: job.timing,
                seed: job.seed,
            };
            for p in run_ber(&config)? {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    code,
                    constellation,
                    pattern_label(pattern),
                    p.snr_db,
                    p.bit_errors,
                    p.bits,
                    p.frames,
                    p.frame_errors,
                    p.ber,
                    p.fer,
                    p.seconds
                );
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------

/// Sorted copy of a table job's axes, for fingerprinting in reports.
pub fn job_axes(job: &TableJob) -> BTreeMap<String, Vec<String>> {
    let mut axes = BTreeMap::new();
    axes.insert("codes".into(), job.codes.clone());
    axes.insert("constellations".into(), job.constellations.clone());
    axes.insert(
        "patterns".into(),
        job.patterns.iter().map(pattern_label).collect(),
    );
    axes
}
