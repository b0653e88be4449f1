//! Monte-Carlo capacity estimation for GSMPPM coded modulation.
//!
//! `cm_bicm_capacity` estimates the coded-modulation (symbol-wise) and
//! BICM (bit-parallel) capacities of a constellation over the fading
//! channel at one SNR, with standard errors. `rate_to_snr` inverts the
//! capacity curve by bisection using common random numbers, and
//! `energy_efficiency` evaluates the closed-form throughput-per-power
//! figures used to compare transmission schemes.

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{add_noise, noise_sigma, FadingParams, PowerConfig};
use crate::constellation::{GsmppmConstellation, ModulationPattern};
use crate::error::{Error, Result};
use crate::modem::{log_sum_exp, SymbolTable};
use crate::rng::Stream;

/// Samples per chunk; chunks are reduced in index order so results do not
/// depend on the worker count.
const CHUNK: u64 = 4096;

/// Capacity estimates at one SNR point.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CapacityPoint {
    pub snr_db: f64,
    /// Coded-modulation (joint symbol-wise) capacity, bits/symbol.
    pub c_cm: f64,
    /// BICM capacity (sum of parallel bit subchannels), bits/symbol.
    pub c_bicm: f64,
    pub stderr_cm: f64,
    pub stderr_bicm: f64,
    pub n_samples: u64,
}

/// Which capacity a curve or search should evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityKind {
    Cm,
    Bicm,
}

#[derive(Clone, Copy, Default)]
struct Accum {
    sum_cm: f64,
    sq_cm: f64,
    sum_bicm: f64,
    sq_bicm: f64,
}

impl Accum {
    fn push(&mut self, cm: f64, bicm: f64) {
        self.sum_cm += cm;
        self.sq_cm += cm * cm;
        self.sum_bicm += bicm;
        self.sq_bicm += bicm * bicm;
    }

    fn merge(mut self, other: Accum) -> Accum {
        self.sum_cm += other.sum_cm;
        self.sq_cm += other.sq_cm;
        self.sum_bicm += other.sum_bicm;
        self.sq_bicm += other.sq_bicm;
        self
    }
}

/// Estimate CM and BICM capacity by Monte-Carlo integration.
///
/// Each sample draws a uniform label, a fading realization, and a noise
/// vector from a per-sample substream of `stream`, so two constellations
/// evaluated with the same `stream` see identical channel randomness as
/// long as they share the pattern dimensions (paired comparison).
pub fn cm_bicm_capacity(
    constellation: &GsmppmConstellation,
    fading: &FadingParams,
    power: &PowerConfig,
    snr_db: f64,
    rate: f64,
    n_samples: u64,
    stream: Stream,
) -> Result<CapacityPoint> {
    if n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be positive".into()));
    }
    let pattern = *constellation.pattern();
    let table = SymbolTable::new(constellation, power)?;
    let sigma = noise_sigma(snr_db, rate, &pattern, power)?;
    let acc = sample_mutual_information(&table, &pattern, fading, sigma, n_samples, stream);

    let n = n_samples as f64;
    let mean_cm = acc.sum_cm / n;
    let mean_bicm = acc.sum_bicm / n;
    let var_cm = (acc.sq_cm / n - mean_cm * mean_cm).max(0.0);
    let var_bicm = (acc.sq_bicm / n - mean_bicm * mean_bicm).max(0.0);
    Ok(CapacityPoint {
        snr_db,
        c_cm: mean_cm,
        c_bicm: mean_bicm,
        stderr_cm: (var_cm / n).sqrt(),
        stderr_bicm: (var_bicm / n).sqrt(),
        n_samples,
    })
}

fn sample_mutual_information(
    table: &SymbolTable,
    pattern: &ModulationPattern,
    fading: &FadingParams,
    sigma: f64,
    n_samples: u64,
    stream: Stream,
) -> Accum {
    let m = table.bits_per_symbol();
    let n_entries = table.entry_count() as u32;
    let ln2 = std::f64::consts::LN_2;
    let n_chunks = n_samples.div_ceil(CHUNK);

    (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = Accum::default();
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(n_samples);
            let mut weights = vec![0.0f64; n_entries as usize];
            let mut coset = Vec::with_capacity(n_entries as usize / 2);
            for i in lo..hi {
                let mut rng = stream.child(i).rng();
                let label = rng.gen_range(0..n_entries);
                let h = fading.sample(pattern.n_rx, pattern.n_tx, &mut rng);
                let mut y = table.noiseless(label, &h);
                add_noise(&mut y, sigma, &mut rng);

                let metrics = table.entry_metrics(&y, &h);
                let scale = 1.0 / (2.0 * sigma * sigma);
                for (w, &d) in weights.iter_mut().zip(&metrics) {
                    *w = -d * scale;
                }
                let lse_all = log_sum_exp(&weights);
                let cm = f64::from(m) - (lse_all - weights[label as usize]) / ln2;

                let mut bicm = f64::from(m);
                for k in 0..m {
                    let shift = m - 1 - k;
                    let bit = label >> shift & 1;
                    coset.clear();
                    coset.extend(
                        weights
                            .iter()
                            .enumerate()
                            .filter(|(idx, _)| *idx as u32 >> shift & 1 == bit)
                            .map(|(_, &w)| w),
                    );
                    bicm -= (lse_all - log_sum_exp(&coset)) / ln2;
                }
                acc.push(cm, bicm);
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Accum::default(), Accum::merge)
}

/// Find the SNR (dB) at which the chosen capacity reaches `target_bits`,
/// by bisection on `[lo_db, hi_db]` to within `tol_db`.
///
/// Every capacity evaluation reuses the same `stream`, so the curve seen by
/// the bisection is a fixed monotone function and the result is
/// deterministic for a given seed.
#[allow(clippy::too_many_arguments)]
pub fn rate_to_snr(
    constellation: &GsmppmConstellation,
    fading: &FadingParams,
    power: &PowerConfig,
    kind: CapacityKind,
    target_bits: f64,
    rate: f64,
    lo_db: f64,
    hi_db: f64,
    tol_db: f64,
    n_samples: u64,
    stream: Stream,
) -> Result<f64> {
    if !(tol_db > 0.0) || !(lo_db < hi_db) {
        return Err(Error::InvalidConfig(
            "need lo_db < hi_db and tol_db > 0".into(),
        ));
    }
    let eval = |snr: f64| -> Result<f64> {
        let point = cm_bicm_capacity(constellation, fading, power, snr, rate, n_samples, stream)?;
        Ok(match kind {
            CapacityKind::Cm => point.c_cm,
            CapacityKind::Bicm => point.c_bicm,
        })
    };
    let f_lo = eval(lo_db)?;
    let f_hi = eval(hi_db)?;
    if !(f_lo <= target_bits && target_bits <= f_hi) {
        return Err(Error::Bracket {
            lo: lo_db,
            hi: hi_db,
            detail: format!(
                "capacity spans [{f_lo:.4}, {f_hi:.4}] bits, target {target_bits} outside"
            ),
        });
    }
    let (mut lo, mut hi) = (lo_db, hi_db);
    while hi - lo > tol_db {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? < target_bits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Transmission scheme for the closed-form energy-efficiency comparison,
/// in bits per second per unit power squared (up to a common bandwidth
/// factor shared by all schemes).
#[derive(Clone, Debug, PartialEq)]
pub enum EnergyScheme {
    /// Generalized spatial-modulation MPPM: `R * m / (l_a * P_t^2)` with
    /// `P_t` the per-slot pulse power implied by the average-power budget.
    Gsmppm {
        pattern: ModulationPattern,
        rate: f64,
        p_avg: f64,
    },
    /// Generalized spatial-modulation single-pulse PPM:
    /// `R * (n_tx + floor(log2 l)) / P_t^2` with `P_t = l * p_avg`.
    Gsppm { n_tx: u8, l: u8, rate: f64, p_avg: f64 },
    /// Generalized spatial-modulation multipulse PAPM with `A` amplitude
    /// levels: `A * R * floor(log2(N_s * M_max * A)) / (l_a * sum P_i^2)`.
    GsmMpapm {
        n_s: u64,
        m_max: u64,
        l: u8,
        l_a: u8,
        rate: f64,
        amplitudes: Vec<f64>,
    },
}

impl EnergyScheme {
    /// Average transmitted power of the scheme (for cross-checking that a
    /// comparison keeps the power budget equal).
    pub fn average_power(&self) -> f64 {
        match self {
            EnergyScheme::Gsmppm { p_avg, .. } | EnergyScheme::Gsppm { p_avg, .. } => *p_avg,
            EnergyScheme::GsmMpapm { l, l_a, amplitudes, .. } => {
                let a = amplitudes.len() as f64;
                f64::from(*l_a) / (a * f64::from(*l)) * amplitudes.iter().sum::<f64>()
            }
        }
    }

    /// Efficiency in information bits per unit squared pulse power.
    pub fn energy_efficiency(&self) -> f64 {
        match self {
            EnergyScheme::Gsmppm { pattern, rate, p_avg } => {
                let p_t = p_avg * f64::from(pattern.l) / f64::from(pattern.l_a);
                rate * f64::from(pattern.bits_per_symbol()) / (f64::from(pattern.l_a) * p_t * p_t)
            }
            EnergyScheme::Gsppm { n_tx, l, rate, p_avg } => {
                let p_t = p_avg * f64::from(*l);
                let bits = f64::from(*n_tx) + f64::from(l.ilog2());
                rate * bits / (p_t * p_t)
            }
            EnergyScheme::GsmMpapm { n_s, m_max, l_a, rate, amplitudes, .. } => {
                let a = amplitudes.len() as f64;
                let bits = (n_s * m_max * amplitudes.len() as u64).ilog2();
                let power: f64 = amplitudes.iter().map(|p| p * p).sum();
                a * rate * f64::from(bits) / (f64::from(*l_a) * power)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adm::build_adm;
    use crate::constellation::{natural_constellation, AntennaGroup, MppmSymbol};

    fn pattern() -> ModulationPattern {
        ModulationPattern::new(4, 4, 2, 5, 2).unwrap()
    }

    #[test]
    fn capacity_saturates_at_m_bits_for_high_snr() {
        let c = natural_constellation(&pattern()).unwrap();
        let power = PowerConfig::from_pattern(&pattern(), 1.0).unwrap();
        let fading = FadingParams::new(0.3).unwrap();
        let point =
            cm_bicm_capacity(&c, &fading, &power, 30.0, 0.5, 20_000, Stream::root(11)).unwrap();
        assert!((point.c_cm - 5.0).abs() < 0.02, "c_cm = {}", point.c_cm);
        assert!((point.c_bicm - 5.0).abs() < 0.05, "c_bicm = {}", point.c_bicm);
    }

    #[test]
    fn capacity_vanishes_at_very_low_snr() {
        let c = natural_constellation(&pattern()).unwrap();
        let power = PowerConfig::from_pattern(&pattern(), 1.0).unwrap();
        let fading = FadingParams::new(0.3).unwrap();
        let point =
            cm_bicm_capacity(&c, &fading, &power, -30.0, 0.5, 20_000, Stream::root(12)).unwrap();
        assert!(point.c_cm < 0.05, "c_cm = {}", point.c_cm);
        assert!(point.c_cm > -3.0 * point.stderr_cm);
        assert!(point.c_bicm < point.c_cm + 3.0 * (point.stderr_cm + point.stderr_bicm));
    }

    #[test]
    fn bicm_never_exceeds_cm_nor_m() {
        let adm = build_adm(&pattern(), &Default::default()).unwrap();
        let power = PowerConfig::from_pattern(&pattern(), 1.0).unwrap();
        let fading = FadingParams::new(0.3).unwrap();
        for snr in [-4.0, 0.0, 6.0] {
            let p = cm_bicm_capacity(
                &adm.constellation,
                &fading,
                &power,
                snr,
                0.5,
                20_000,
                Stream::root(13),
            )
            .unwrap();
            let slack = 3.0 * (p.stderr_cm + p.stderr_bicm);
            assert!(p.c_bicm <= p.c_cm + slack, "snr {snr}: {} > {}", p.c_bicm, p.c_cm);
            assert!(p.c_cm <= 5.0 + 3.0 * p.stderr_cm);
        }
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let c = natural_constellation(&pattern()).unwrap();
        let power = PowerConfig::from_pattern(&pattern(), 1.0).unwrap();
        let fading = FadingParams::new(0.3).unwrap();
        let a = cm_bicm_capacity(&c, &fading, &power, 2.0, 0.5, 5_000, Stream::root(14)).unwrap();
        let b = cm_bicm_capacity(&c, &fading, &power, 2.0, 0.5, 5_000, Stream::root(14)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn binary_orthogonal_capacity_matches_quadrature_oracle() {
        // Two equal-energy orthogonal waveforms on one aperture without
        // fading form a binary channel whose mutual information has the
        // classic one-dimensional integral form: the LLR is Gaussian with
        // mean d^2 / (2 sigma^2) and variance d^2 / sigma^2, and
        // I = 1 - E[log2(1 + exp(-L))].
        let amplitude = 1.25f64;
        let sigma = 0.9f64;
        let group = AntennaGroup::new(vec![1, 2]).unwrap();
        let table = SymbolTable::from_parts(
            1,
            1,
            amplitude,
            vec![
                (group.clone(), MppmSymbol::parse("1100").unwrap()),
                (group, MppmSymbol::parse("0011").unwrap()),
            ],
        )
        .unwrap();
        let fading = FadingParams::disabled();
        let acc = sample_mutual_information(
            &table,
            &ModulationPattern::new(4, 1, 2, 4, 2).unwrap(),
            &fading,
            sigma,
            400_000,
            Stream::root(15),
        );
        let n = 400_000.0;
        let mc = acc.sum_cm / n;
        let se = ((acc.sq_cm / n - mc * mc) / n).sqrt();

        // Oracle: Gauss-Legendre-free Simpson quadrature over +-10 std.
        let gain = 2.0 * amplitude; // pulse height: amplitude times group gain 2
        let d2 = 4.0 * gain * gain; // the two waveforms differ in four slots
        let mu = d2 / (2.0 * sigma * sigma);
        let var = d2 / (sigma * sigma);
        let sd = var.sqrt();
        let f = |x: f64| {
            let pdf = (-0.5 * ((x - mu) / sd).powi(2)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
            pdf * (1.0 + (-x).exp()).log2()
        };
        let (a, b, steps) = (mu - 10.0 * sd, mu + 10.0 * sd, 4000);
        let h = (b - a) / steps as f64;
        let mut integral = f(a) + f(b);
        for i in 1..steps {
            integral += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        integral *= h / 3.0;
        let oracle = 1.0 - integral;

        assert!(
            (mc - oracle).abs() < 4.0 * se.max(1e-4),
            "monte-carlo {mc} vs quadrature {oracle} (se {se})"
        );
        // With one bit per symbol the BICM and CM estimates coincide.
        assert!((acc.sum_bicm - acc.sum_cm).abs() < 1e-9 * n);
    }

    #[test]
    fn rate_to_snr_brackets_and_converges() {
        let c = natural_constellation(&pattern()).unwrap();
        let power = PowerConfig::from_pattern(&pattern(), 1.0).unwrap();
        let fading = FadingParams::new(0.3).unwrap();
        let snr_a = rate_to_snr(
            &c, &fading, &power, CapacityKind::Bicm, 2.0, 0.5, -10.0, 20.0, 0.05, 10_000,
            Stream::root(16),
        )
        .unwrap();
        let snr_b = rate_to_snr(
            &c, &fading, &power, CapacityKind::Bicm, 3.0, 0.5, -10.0, 20.0, 0.05, 10_000,
            Stream::root(16),
        )
        .unwrap();
        assert!(snr_b > snr_a, "higher target must need more SNR: {snr_a} vs {snr_b}");
        let err = rate_to_snr(
            &c, &fading, &power, CapacityKind::Cm, 6.0, 0.5, -10.0, 20.0, 0.05, 2_000,
            Stream::root(16),
        );
        assert!(matches!(err, Err(Error::Bracket { .. })));
    }

    #[test]
    fn energy_efficiency_closed_forms() {
        // Rate-1/2 coded (4,4,2,5,2,32) under a unit average-power budget.
        let gsmppm = EnergyScheme::Gsmppm { pattern: pattern(), rate: 0.5, p_avg: 1.0 };
        assert!((gsmppm.energy_efficiency() - 0.2).abs() < 1e-12);
        assert!((gsmppm.average_power() - 1.0).abs() < 1e-12);

        // Single-pulse comparison with 4 transmitters and 8 slots.
        let gsppm = EnergyScheme::Gsppm { n_tx: 4, l: 8, rate: 0.5, p_avg: std::f64::consts::E };
        let p_t = 8.0 * std::f64::consts::E;
        assert!((gsppm.energy_efficiency() - 0.5 * 7.0 / (p_t * p_t)).abs() < 1e-12);

        // Two-amplitude multipulse PAPM: N_s = 6, M_max = 10, amplitudes
        // chosen to keep the unit average-power budget.
        let scheme = EnergyScheme::GsmMpapm {
            n_s: 6,
            m_max: 10,
            l: 5,
            l_a: 2,
            rate: 0.5,
            amplitudes: vec![2.0, 3.0],
        };
        assert!((scheme.average_power() - 1.0).abs() < 1e-12);
        let expect = 2.0 * 0.5 * 6.0 / (2.0 * 13.0); // floor(log2 120) = 6
        assert!((scheme.energy_efficiency() - expect).abs() < 1e-12);
    }
}
