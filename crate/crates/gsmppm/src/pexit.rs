//! Protograph EXIT (PEXIT) threshold analysis.
//!
//! The detector is characterized by Monte-Carlo mutual information between
//! each label bit and its max-log LLR; that channel MI enters a per-edge
//! mutual-information recursion on the protograph (Gaussian approximation
//! through the usual J function), and the decoding threshold is the lowest
//! SNR at which every variable node's a-posteriori MI converges to one.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{add_noise, noise_sigma, FadingParams, PowerConfig};
use crate::constellation::GsmppmConstellation;
use crate::error::{Error, Result};
use crate::modem::SymbolTable;
use crate::pldpc::BaseMatrix;
use crate::rng::Stream;

// ---------------------------------------------------------------------------
// The J function and its inverse.

/// Branch seam of the two-branch fit.
const J_SEAM: f64 = 1.6363;
/// Local minimum of the cubic branch; the fit is increasing from here on.
const J_CUBIC_MIN: f64 = 0.015_36;
/// Fit value at the top of the cubic branch.
fn j_seam_value() -> f64 {
    j_function(J_SEAM)
}

/// Mutual information of a consistent binary-AWGN LLR with standard
/// deviation `sigma` — the standard two-branch polynomial/exponential fit.
///
/// The published cubic dips a few 1e-5 below zero for `sigma` under 0.031;
/// the raw value is returned so that [`j_inverse`] can undo it exactly.
pub fn j_function(sigma: f64) -> f64 {
    debug_assert!(sigma >= 0.0, "sigma must be non-negative");
    if sigma >= 10.0 {
        1.0
    } else if sigma > J_SEAM {
        let s2 = sigma * sigma;
        let s3 = s2 * sigma;
        1.0 - (0.00181491 * s3 - 0.142675 * s2 - 0.0822054 * sigma + 0.0549608).exp()
    } else {
        let s2 = sigma * sigma;
        let s3 = s2 * sigma;
        -0.0421061 * s3 + 0.209252 * s2 - 0.00640081 * sigma
    }
}

/// Inverse of [`j_function`]; `mi >= 1` returns the infinite sentinel.
///
/// Inversion is numerical (bisection per branch), accurate to the fit
/// itself: `j_inverse(j_function(x))` matches `x` to better than `1e-4`
/// everywhere except the seam point itself.
pub fn j_inverse(mi: f64) -> f64 {
    if mi >= 1.0 {
        return f64::INFINITY;
    }
    let seam = j_seam_value();
    let (mut lo, mut hi) = if mi >= seam { (J_SEAM, 10.0) } else { (J_CUBIC_MIN, J_SEAM) };
    if mi <= j_function(lo) {
        // At or below the cubic's local minimum: effectively no information.
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if j_function(mid) < mi {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    0.5 * (lo + hi)
}

// ---------------------------------------------------------------------------
// Detector EXIT characteristic.

/// Per-bit-position detector mutual information at one SNR.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DetectorExitProfile {
    pub snr_db: f64,
    /// MI between label bit `k` and its max-log LLR, one entry per bit.
    pub i_ch: Vec<f64>,
    /// Average over the bit positions.
    pub average: f64,
    pub n_samples: u64,
}

/// `log2(1 + exp(x))`, stable for large `x`.
fn softplus_log2(x: f64) -> f64 {
    if x > 35.0 {
        x / std::f64::consts::LN_2
    } else {
        x.exp().ln_1p() / std::f64::consts::LN_2
    }
}

const CHUNK: u64 = 4096;

/// Which soft output the detector characteristic is measured on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorLlr {
    /// The receiver's max-log LLRs (the production demapper).
    #[default]
    MaxLog,
    /// Exact a-posteriori LLRs — an upper reference: the expectation formula
    /// below is exact for them, while for max-log it understates the MI.
    ExactMap,
}

/// Monte-Carlo detector EXIT characteristic: draw (label, fading, noise),
/// demap with max-log, and estimate `I(b_k; LLR_k)` for every position.
pub fn detector_exit(
    constellation: &GsmppmConstellation,
    fading: &FadingParams,
    power: &PowerConfig,
    rate: f64,
    snr_db: f64,
    n_samples: u64,
    stream: Stream,
) -> Result<DetectorExitProfile> {
    detector_exit_with(
        constellation,
        fading,
        power,
        rate,
        snr_db,
        n_samples,
        stream,
        DetectorLlr::MaxLog,
    )
}

/// [`detector_exit`] with an explicit choice of soft output.
#[allow(clippy::too_many_arguments)]
pub fn detector_exit_with(
    constellation: &GsmppmConstellation,
    fading: &FadingParams,
    power: &PowerConfig,
    rate: f64,
    snr_db: f64,
    n_samples: u64,
    stream: Stream,
    llr: DetectorLlr,
) -> Result<DetectorExitProfile> {
    if n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be positive".into()));
    }
    let pattern = *constellation.pattern();
    let table = SymbolTable::new(constellation, power)?;
    let sigma = noise_sigma(snr_db, rate, &pattern, power)?;
    let m = table.bits_per_symbol() as usize;
    let n_entries = table.entry_count() as u32;

    let n_chunks = n_samples.div_ceil(CHUNK);
    let sums: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = vec![0.0f64; m];
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(n_samples);
            for i in lo..hi {
                let mut rng = stream.child(i).rng();
                let label = rng.gen_range(0..n_entries);
                let h = fading.sample(pattern.n_rx, pattern.n_tx, &mut rng);
                let mut y = table.noiseless(label, &h);
                add_noise(&mut y, sigma, &mut rng);
                let metrics = table.entry_metrics(&y, &h);
                let llrs = match llr {
                    DetectorLlr::MaxLog => table.max_log_llrs(&metrics, sigma),
                    DetectorLlr::ExactMap => table.exact_map_llrs(&metrics, sigma),
                };
                for (k, acc_k) in acc.iter_mut().enumerate() {
                    let bit = label >> (m - 1 - k) & 1;
                    // LLR in favor of the transmitted bit value.
                    let toward = if bit == 0 { llrs[k] } else { -llrs[k] };
                    *acc_k += 1.0 - softplus_log2(-toward);
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(vec![0.0f64; m], |mut total, part| {
            for (t, p) in total.iter_mut().zip(&part) {
                *t += p;
            }
            total
        });

    let i_ch: Vec<f64> =
        sums.iter().map(|s| (s / n_samples as f64).clamp(0.0, 1.0)).collect();
    let average = i_ch.iter().sum::<f64>() / m as f64;
    Ok(DetectorExitProfile { snr_db, i_ch, average, n_samples })
}

/// Deterministic, memoized detector profiles keyed by SNR in millidecibels,
/// so repeated bisections and paired code comparisons reuse identical
/// channel measurements.
pub struct DetectorCache<'a> {
    constellation: &'a GsmppmConstellation,
    fading: &'a FadingParams,
    power: &'a PowerConfig,
    rate: f64,
    n_samples: u64,
    stream: Stream,
    llr: DetectorLlr,
    map: HashMap<i64, DetectorExitProfile>,
}

impl<'a> DetectorCache<'a> {
    pub fn new(
        constellation: &'a GsmppmConstellation,
        fading: &'a FadingParams,
        power: &'a PowerConfig,
        rate: f64,
        n_samples: u64,
        stream: Stream,
        llr: DetectorLlr,
    ) -> Self {
        DetectorCache {
            constellation,
            fading,
            power,
            rate,
            n_samples,
            stream,
            llr,
            map: HashMap::new(),
        }
    }

    fn key(snr_db: f64) -> i64 {
        (snr_db * 1000.0).round() as i64
    }

    /// Profile at `snr_db`, computed at most once per millidecibel key.
    pub fn profile(&mut self, snr_db: f64) -> Result<&DetectorExitProfile> {
        let key = Self::key(snr_db);
        if !self.map.contains_key(&key) {
            let profile = detector_exit_with(
                self.constellation,
                self.fading,
                self.power,
                self.rate,
                snr_db,
                self.n_samples,
                self.stream.child(key as u64),
                self.llr,
            )?;
            self.map.insert(key, profile);
        }
        Ok(&self.map[&key])
    }
}

// ---------------------------------------------------------------------------
// The protograph MI recursion.

/// Knobs for the recursion and the threshold bisection.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PexitOptions {
    /// Iteration cap for the MI recursion.
    pub max_iters: u32,
    /// Convergence target for every variable node's a-posteriori MI.
    pub target: f64,
    /// Bisection bracket in dB.
    pub lo_db: f64,
    pub hi_db: f64,
    /// Final bracket width in dB.
    pub tol_db: f64,
    /// Detector Monte-Carlo samples per SNR point.
    pub n_samples: u64,
    /// Assign per-position detector MIs round-robin to the transmitted
    /// columns instead of the average (sensitivity analysis).
    pub mixture: bool,
    /// Which detector soft output the channel MI is measured on.
    pub detector_llr: DetectorLlr,
}

impl Default for PexitOptions {
    fn default() -> Self {
        PexitOptions {
            max_iters: 1000,
            target: 1.0 - 1e-6,
            lo_db: -8.0,
            hi_db: 4.0,
            tol_db: 0.01,
            n_samples: 100_000,
            mixture: false,
            detector_llr: DetectorLlr::MaxLog,
        }
    }
}

/// Outcome of one fixed-SNR recursion.
#[derive(Clone, Debug, PartialEq)]
pub struct RecursionRun {
    pub converged: bool,
    pub iterations: u32,
    /// Per-iteration a-posteriori MI of every variable type (row per
    /// iteration, including the final one).
    pub app_history: Vec<Vec<f64>>,
}

/// Map a detector profile onto per-column channel MIs: punctured columns
/// get zero, transmitted columns the average (or the per-position values
/// round-robin when `mixture` is set).
pub fn channel_mi_columns(
    base: &BaseMatrix,
    profile: &DetectorExitProfile,
    mixture: bool,
) -> Vec<f64> {
    let mut next = 0usize;
    (0..base.variable_types())
        .map(|j| {
            if base.is_punctured(j) {
                0.0
            } else if mixture {
                let v = profile.i_ch[next % profile.i_ch.len()];
                next += 1;
                v
            } else {
                profile.average
            }
        })
        .collect()
}

/// LLR standard deviation carrying mutual information `mi`; exactly zero
/// information maps to exactly zero deviation (the raw fit's inverse has a
/// small positive floor there, which would break the perfect fixed point).
fn sigma_from_mi(mi: f64) -> f64 {
    if mi <= 0.0 {
        0.0
    } else {
        j_inverse(mi.min(1.0))
    }
}

/// Dual-domain deviation for the check update: a perfect incoming message
/// (MI of exactly 1) contributes exactly nothing to the check's uncertainty.
fn sigma_dual(i_ev: f64) -> f64 {
    sigma_from_mi(1.0 - i_ev)
}

/// Run the per-edge MI recursion at fixed per-column channel MI.
///
/// Parallel edges are handled with multiplicities: an edge bundle of size
/// `b` contributes `b` incoming messages of which one is excluded for the
/// extrinsic update. Sums are taken directly over the included terms so an
/// infinite message (MI of exactly 1) never produces `inf - inf`.
pub fn pexit_recursion(
    base: &BaseMatrix,
    channel_mi: &[f64],
    max_iters: u32,
    target: f64,
) -> RecursionRun {
    let p_c = base.check_types();
    let p_v = base.variable_types();
    assert_eq!(channel_mi.len(), p_v, "one channel MI per variable type");
    let sigma_ch_sq: Vec<f64> = channel_mi
        .iter()
        .map(|&mi| {
            let s = sigma_from_mi(mi);
            s * s
        })
        .collect();

    // Per-(check, variable) extrinsic MIs; only positions with b_ij > 0 are
    // meaningful.
    let mut i_ev = vec![0.0f64; p_c * p_v];
    let mut i_ec = vec![0.0f64; p_c * p_v];
    let mut history = Vec::new();

    for iter in 1..=max_iters {
        // Variable-to-check.
        for i in 0..p_c {
            for j in 0..p_v {
                if base.entry(i, j) == 0 {
                    continue;
                }
                let mut sum = sigma_ch_sq[j];
                for s in 0..p_c {
                    let b = f64::from(base.entry(s, j));
                    let mult = if s == i { b - 1.0 } else { b };
                    if mult > 0.0 {
                        let sig = sigma_from_mi(i_ec[s * p_v + j]);
                        sum += mult * sig * sig;
                    }
                }
                i_ev[i * p_v + j] = j_function(sum.sqrt()).clamp(0.0, 1.0);
            }
        }
        // Check-to-variable (dual approximation).
        for i in 0..p_c {
            for j in 0..p_v {
                if base.entry(i, j) == 0 {
                    continue;
                }
                let mut sum = 0.0;
                for t in 0..p_v {
                    let b = f64::from(base.entry(i, t));
                    let mult = if t == j { b - 1.0 } else { b };
                    if mult > 0.0 {
                        let sig = sigma_dual(i_ev[i * p_v + t]);
                        sum += mult * sig * sig;
                    }
                }
                i_ec[i * p_v + j] = (1.0 - j_function(sum.sqrt())).clamp(0.0, 1.0);
            }
        }
        // A-posteriori MI per variable type.
        let app: Vec<f64> = (0..p_v)
            .map(|j| {
                let mut sum = sigma_ch_sq[j];
                for s in 0..p_c {
                    let b = f64::from(base.entry(s, j));
                    if b > 0.0 {
                        let sig = sigma_from_mi(i_ec[s * p_v + j]);
                        sum += b * sig * sig;
                    }
                }
                j_function(sum.sqrt()).clamp(0.0, 1.0)
            })
            .collect();
        let done = app.iter().all(|&a| a >= target);
        history.push(app);
        if done {
            return RecursionRun { converged: true, iterations: iter, app_history: history };
        }
    }
    RecursionRun { converged: false, iterations: max_iters, app_history: history }
}

/// Decoding-threshold search result.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ThresholdResult {
    /// Highest SNR that still fails — the bottom of the final bracket; the
    /// code converges at `threshold_db + bracket_db`.
    pub threshold_db: f64,
    /// Final bracket width (at most the requested tolerance).
    pub bracket_db: f64,
    /// Recursion iterations used at the converging end of the bracket.
    pub iterations: u32,
    pub converged: bool,
}

/// Locate the decoding threshold of `base` over the given detector by
/// bisection on SNR.
pub fn pexit_threshold(
    base: &BaseMatrix,
    constellation: &GsmppmConstellation,
    fading: &FadingParams,
    power: &PowerConfig,
    opts: &PexitOptions,
    stream: Stream,
) -> Result<ThresholdResult> {
    let mut cache = DetectorCache::new(
        constellation,
        fading,
        power,
        base.effective_rate(),
        opts.n_samples,
        stream,
        opts.detector_llr,
    );
    pexit_threshold_cached(base, &mut cache, opts)
}

fn run_at(
    base: &BaseMatrix,
    cache: &mut DetectorCache<'_>,
    opts: &PexitOptions,
    snr: f64,
) -> Result<RecursionRun> {
    let profile = cache.profile(snr)?;
    let mi = channel_mi_columns(base, profile, opts.mixture);
    Ok(pexit_recursion(base, &mi, opts.max_iters, opts.target))
}

/// Threshold search sharing a detector cache — the fast path when ranking
/// many base matrices against the same constellation.
pub fn pexit_threshold_cached(
    base: &BaseMatrix,
    cache: &mut DetectorCache<'_>,
    opts: &PexitOptions,
) -> Result<ThresholdResult> {
    if !(opts.lo_db < opts.hi_db) || !(opts.tol_db > 0.0) {
        return Err(Error::InvalidConfig("need lo_db < hi_db and tol_db > 0".into()));
    }
    let top = run_at(base, cache, opts, opts.hi_db)?;
    if !top.converged {
        return Err(Error::Bracket {
            lo: opts.lo_db,
            hi: opts.hi_db,
            detail: format!("no convergence at the upper bracket {} dB", opts.hi_db),
        });
    }
    let bottom = run_at(base, cache, opts, opts.lo_db)?;
    if bottom.converged {
        return Err(Error::Bracket {
            lo: opts.lo_db,
            hi: opts.hi_db,
            detail: format!("already converged at the lower bracket {} dB", opts.lo_db),
        });
    }

    let (mut lo, mut hi) = (opts.lo_db, opts.hi_db);
    let mut hi_iterations = top.iterations;
    while hi - lo > opts.tol_db {
        let mid = 0.5 * (lo + hi);
        let run = run_at(base, cache, opts, mid)?;
        if run.converged {
            hi = mid;
            hi_iterations = run.iterations;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdResult {
        threshold_db: lo,
        bracket_db: hi - lo,
        iterations: hi_iterations,
        converged: true,
    })
}

// ---------------------------------------------------------------------------
// Constrained base-matrix search.

/// The four-check, seven-variable search template: the left 4x3 block is
/// fixed, the remaining sixteen entries range over `0..=free_entry_max`,
/// and the fourth column is punctured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SearchTemplate {
    pub free_entry_max: u8,
}

impl Default for SearchTemplate {
    fn default() -> Self {
        SearchTemplate { free_entry_max: 3 }
    }
}

/// Fixed left block of the template.
pub const TEMPLATE_LEFT: [[u8; 3]; 4] = [[1, 0, 0], [0, 1, 1], [0, 0, 1], [0, 1, 0]];
const TEMPLATE_COLS: usize = 7;
const TEMPLATE_PUNCTURED: usize = 3;

/// Build the base matrix for one assignment of the sixteen free entries
/// (row-major over rows 0..4, columns 3..7).
pub fn template_instance(free: &[u8; 16]) -> Result<BaseMatrix> {
    let rows: Vec<Vec<u8>> = (0..4)
        .map(|i| {
            let mut row = TEMPLATE_LEFT[i].to_vec();
            row.extend_from_slice(&free[i * 4..(i + 1) * 4]);
            row
        })
        .collect();
    BaseMatrix::new(rows, vec![TEMPLATE_PUNCTURED])
}

/// Does `base` match the template shape (fixed block, sizes, puncturing)?
pub fn matches_template(base: &BaseMatrix, template: &SearchTemplate) -> bool {
    base.check_types() == 4
        && base.variable_types() == TEMPLATE_COLS
        && base.punctured() == [TEMPLATE_PUNCTURED]
        && (0..4).all(|i| {
            (0..3).all(|j| base.entry(i, j) == TEMPLATE_LEFT[i][j])
                && (3..TEMPLATE_COLS).all(|j| base.entry(i, j) <= template.free_entry_max)
        })
}

/// Deterministically sample up to `budget` distinct template instances that
/// pass the structural design rules.
pub fn sample_template_candidates(
    template: &SearchTemplate,
    budget: u64,
    stream: Stream,
) -> Vec<BaseMatrix> {
    let mut rng = stream.rng();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    // Sampling attempts are capped so an over-constrained template (for
    // example free_entry_max = 0) terminates with an empty list.
    let attempts = budget.saturating_mul(64).max(4096);
    for _ in 0..attempts {
        if out.len() as u64 >= budget {
            break;
        }
        let mut free = [0u8; 16];
        for f in free.iter_mut() {
            *f = rng.gen_range(0..=template.free_entry_max);
        }
        let Ok(candidate) = template_instance(&free) else {
            continue;
        };
        if !crate::pldpc::check_design_constraints(&candidate).all_pass() {
            continue;
        }
        if seen.insert(free) {
            out.push(candidate);
        }
    }
    out
}

/// Every template instance that differs from `center` in exactly one free
/// entry and still passes the design rules ( `center` itself included).
pub fn neighborhood_candidates(center: &BaseMatrix, template: &SearchTemplate) -> Vec<BaseMatrix> {
    let mut free = [0u8; 16];
    for i in 0..4 {
        for j in 0..4 {
            free[i * 4 + j] = center.entry(i, j + 3);
        }
    }
    let mut out = Vec::new();
    let push_if_ok = |f: &[u8; 16], out: &mut Vec<BaseMatrix>| {
        if let Ok(c) = template_instance(f) {
            if crate::pldpc::check_design_constraints(&c).all_pass() {
                out.push(c);
            }
        }
    };
    push_if_ok(&free, &mut out);
    for idx in 0..16 {
        for value in 0..=template.free_entry_max {
            if value == free[idx] {
                continue;
            }
            let mut alt = free;
            alt[idx] = value;
            push_if_ok(&alt, &mut out);
        }
    }
    out
}

/// A candidate with its threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedCandidate {
    pub base: BaseMatrix,
    pub result: ThresholdResult,
}

/// Rank `candidates` by PEXIT threshold over a shared detector, best first.
///
/// Candidates failing the structural design rules are dropped; an empty
/// surviving set is a search error. Deterministic for a given stream.
pub fn search_base_matrix(
    candidates: &[BaseMatrix],
    constellation: &GsmppmConstellation,
    fading: &FadingParams,
    power: &PowerConfig,
    opts: &PexitOptions,
    stream: Stream,
) -> Result<Vec<RankedCandidate>> {
    let feasible: Vec<&BaseMatrix> = candidates
        .iter()
        .filter(|c| crate::pldpc::check_design_constraints(c).all_pass())
        .collect();
    if feasible.is_empty() {
        return Err(Error::SearchInfeasible);
    }
    let rate = feasible[0].effective_rate();
    let mut cache = DetectorCache::new(
        constellation,
        fading,
        power,
        rate,
        opts.n_samples,
        stream,
        opts.detector_llr,
    );
    let mut ranked = Vec::with_capacity(feasible.len());
    for base in feasible {
        let result = pexit_threshold_cached(base, &mut cache, opts)?;
        ranked.push(RankedCandidate { base: base.clone(), result });
    }
    ranked.sort_by(|a, b| {
        a.result
            .threshold_db
            .total_cmp(&b.result.threshold_db)
            .then_with(|| a.base.rows().cmp(b.base.rows()))
    });
    Ok(ranked)
}
