//! Weak-turbulence fading, transmit-power bookkeeping, and the SNR/noise
//! relation for the intensity-modulated GSMPPM link.
//!
//! The received frame for one symbol interval is
//! `y = (P_t / sqrt(n_a)) * H * x + w`, where `H` is an `n_rx x n_tx` matrix
//! of lognormal irradiance gains, `x` the 0/1 transmit pattern, and `w` white
//! Gaussian noise of variance `sigma^2 = N_0 / 2` per sample.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::constellation::{AntennaGroup, ModulationPattern, MppmSymbol};
use crate::error::{Error, Result};

/// Lognormal fading under weak turbulence. The log-irradiance is
/// `ln h ~ Normal(2 mu, 4 sigma_x^2)` with `mu = -sigma_x^2`; with
/// `normalize` set (the default), gains are additionally scaled by
/// `exp(-2 sigma_x^2)` so that `E[h^2] = 1` exactly.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct FadingParams {
    sigma_x: f64,
    normalize: bool,
}

impl FadingParams {
    /// Fading with log-amplitude standard deviation `sigma_x` in `(0, 1]`.
    pub fn new(sigma_x: f64) -> Result<Self> {
        if !(sigma_x > 0.0 && sigma_x <= 1.0) {
            return Err(Error::InvalidChannel(format!(
                "sigma_x = {sigma_x} outside the weak-turbulence range (0, 1]"
            )));
        }
        Ok(FadingParams { sigma_x, normalize: true })
    }

    /// Keep the raw second moment `E[h^2] = exp(4 sigma_x^2)` instead of
    /// rescaling it to 1.
    pub fn without_normalization(mut self) -> Self {
        self.normalize = false;
        self
    }

    /// No fading: every gain is exactly 1.
    pub fn disabled() -> Self {
        FadingParams { sigma_x: 0.0, normalize: true }
    }

    pub fn is_disabled(&self) -> bool {
        self.sigma_x == 0.0
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x
    }

    pub fn normalized(&self) -> bool {
        self.normalize
    }

    /// Log-amplitude mean `mu = -sigma_x^2`.
    pub fn mu(&self) -> f64 {
        -self.sigma_x * self.sigma_x
    }

    /// Scintillation index `sigma_I^2 = exp(4 sigma_x^2) - 1`.
    pub fn scintillation_index(&self) -> f64 {
        (4.0 * self.sigma_x * self.sigma_x).exp_m1()
    }

    /// Draw an `n_rx x n_tx` gain matrix with i.i.d. entries.
    pub fn sample(&self, n_rx: u8, n_tx: u8, rng: &mut impl Rng) -> FadingMatrix {
        let len = usize::from(n_rx) * usize::from(n_tx);
        if self.is_disabled() {
            return FadingMatrix { n_tx, data: vec![1.0; len] };
        }
        let log_gain = Normal::new(2.0 * self.mu(), 2.0 * self.sigma_x).expect("finite parameters");
        let scale = if self.normalize { (-2.0 * self.sigma_x * self.sigma_x).exp() } else { 1.0 };
        let data = (0..len).map(|_| scale * log_gain.sample(rng).exp()).collect();
        FadingMatrix { n_tx, data }
    }
}

/// One realization of the `n_rx x n_tx` irradiance gain matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct FadingMatrix {
    n_tx: u8,
    data: Vec<f64>,
}

impl FadingMatrix {
    /// Build from row-major gains.
    pub fn from_rows(n_rx: u8, n_tx: u8, data: Vec<f64>) -> Result<Self> {
        if data.len() != usize::from(n_rx) * usize::from(n_tx) {
            return Err(Error::InvalidChannel(format!(
                "{} gains for a {n_rx} x {n_tx} matrix",
                data.len()
            )));
        }
        Ok(FadingMatrix { n_tx, data })
    }

    pub fn n_rx(&self) -> u8 {
        (self.data.len() / usize::from(self.n_tx)) as u8
    }

    pub fn n_tx(&self) -> u8 {
        self.n_tx
    }

    /// Gain from transmit antenna `t` (1-indexed) to receive aperture `r`
    /// (0-indexed).
    pub fn gain(&self, r: usize, t: u8) -> f64 {
        self.data[r * usize::from(self.n_tx) + usize::from(t) - 1]
    }

    /// Combined gain at receive aperture `r` when all antennas of `group`
    /// fire together.
    pub fn group_gain(&self, r: usize, group: &AntennaGroup) -> f64 {
        group.antennas().iter().map(|&a| self.gain(r, a)).sum()
    }
}

/// Transmit power accounting: the per-slot peak power is the average optical
/// power boosted by the inverse duty cycle, `P_t = P_a * l / l_a`.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct PowerConfig {
    p_avg: f64,
    p_peak: f64,
}

impl PowerConfig {
    /// Power bookkeeping for `pattern` at average optical power `p_avg`.
    pub fn from_pattern(pattern: &ModulationPattern, p_avg: f64) -> Result<Self> {
        if !(p_avg > 0.0 && p_avg.is_finite()) {
            return Err(Error::InvalidChannel(format!("p_avg = {p_avg} must be positive")));
        }
        Ok(PowerConfig { p_avg, p_peak: p_avg / pattern.duty_cycle() })
    }

    pub fn p_avg(&self) -> f64 {
        self.p_avg
    }

    pub fn p_peak(&self) -> f64 {
        self.p_peak
    }

    /// Amplitude applied to each active antenna: `P_t / sqrt(n_a)`.
    pub fn amplitude(&self, n_a: u8) -> f64 {
        self.p_peak / f64::from(n_a).sqrt()
    }
}

/// Per-sample noise standard deviation at a given SNR, from
/// `sigma^2 = l_a * P_t^2 / (2 * rate * m * 10^(snr_db / 10))`.
pub fn noise_sigma(
    snr_db: f64,
    rate: f64,
    pattern: &ModulationPattern,
    power: &PowerConfig,
) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidChannel(format!("rate = {rate} outside (0, 1]")));
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidChannel(format!("snr_db = {snr_db} is not finite")));
    }
    let snr = 10f64.powf(snr_db / 10.0);
    let m = f64::from(pattern.bits_per_symbol());
    let variance =
        f64::from(pattern.l_a) * power.p_peak() * power.p_peak() / (2.0 * rate * m * snr);
    Ok(variance.sqrt())
}

/// Noiseless receive frame (`n_rx x l`, row-major) for one constellation
/// point: pulsed slots carry `amplitude * group_gain`, idle slots zero.
pub fn noiseless_rx(
    group: &AntennaGroup,
    symbol: &MppmSymbol,
    h: &FadingMatrix,
    amplitude: f64,
) -> Vec<f64> {
    let n_rx = usize::from(h.n_rx());
    let l = usize::from(symbol.slot_count());
    let mut y = vec![0.0; n_rx * l];
    for r in 0..n_rx {
        let level = amplitude * h.group_gain(r, group);
        for t in 0..l {
            if symbol.pulse_in_slot(t as u8) {
                y[r * l + t] = level;
            }
        }
    }
    y
}

/// Add white Gaussian noise of standard deviation `sigma` in place.
pub fn add_noise(y: &mut [f64], sigma: f64, rng: &mut impl Rng) {
    let noise = Normal::new(0.0, sigma).expect("finite sigma");
    for v in y.iter_mut() {
        *v += noise.sample(rng);
    }
}

/// Full channel pass for one symbol: fade, scale, and add noise.
pub fn transmit(
    group: &AntennaGroup,
    symbol: &MppmSymbol,
    h: &FadingMatrix,
    amplitude: f64,
    sigma: f64,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let mut y = noiseless_rx(group, symbol, h, amplitude);
    add_noise(&mut y, sigma, rng);
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn pattern_5() -> ModulationPattern {
        ModulationPattern::new(4, 4, 2, 5, 2).unwrap()
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(FadingParams::new(0.0).is_err());
        assert!(FadingParams::new(-0.1).is_err());
        assert!(FadingParams::new(1.5).is_err());
        assert!(PowerConfig::from_pattern(&pattern_5(), 0.0).is_err());
    }

    #[test]
    fn normalized_gains_have_unit_second_moment() {
        let fading = FadingParams::new(0.3).unwrap();
        let mut rng = Stream::root(11).rng();
        let n = 1_000_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut sum_quad = 0.0;
        for _ in 0..n {
            let h = fading.sample(1, 1, &mut rng).gain(0, 1);
            sum += h;
            sum_sq += h * h;
            sum_quad += h * h * h * h;
        }
        let mean_sq = sum_sq / n as f64;
        let stderr_sq = ((sum_quad / n as f64 - mean_sq * mean_sq) / n as f64).sqrt();
        assert!(
            (mean_sq - 1.0).abs() < 3.0 * stderr_sq,
            "E[h^2] = {mean_sq} not within 3 stderr ({stderr_sq}) of 1"
        );
        // The rescaling shifts the mean down to exp(-2 sigma_x^2).
        let expect_mean = (-2.0 * 0.09f64).exp();
        assert!((sum / n as f64 - expect_mean).abs() < 5e-3);
    }

    #[test]
    fn raw_gains_match_lognormal_moments() {
        let fading = FadingParams::new(0.3).unwrap().without_normalization();
        let mut rng = Stream::root(12).rng();
        let n = 1_000_000usize;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let h = fading.sample(1, 1, &mut rng).gain(0, 1);
            sum_sq += h * h;
        }
        // E[h^2] = exp(4 mu + 8 sigma_x^2) = exp(4 sigma_x^2) for mu = -sigma_x^2.
        let expect = (4.0 * 0.09f64).exp();
        assert!((sum_sq / n as f64 - expect).abs() < 8e-3);
    }

    #[test]
    fn scintillation_index_for_reference_turbulence() {
        let fading = FadingParams::new(0.3).unwrap();
        let sigma_i = fading.scintillation_index().sqrt();
        assert!((0.6..0.7).contains(&sigma_i), "sigma_I = {sigma_i}");
        assert_eq!(fading.mu(), -0.09);
    }

    #[test]
    fn disabled_fading_is_all_ones() {
        let mut rng = Stream::root(1).rng();
        let h = FadingParams::disabled().sample(4, 4, &mut rng);
        assert!((0..4).all(|r| (1..=4).all(|t| h.gain(r, t) == 1.0)));
        assert_eq!(h.group_gain(0, &AntennaGroup::new(vec![1, 2]).unwrap()), 2.0);
    }

    #[test]
    fn sampling_is_deterministic_per_stream() {
        let fading = FadingParams::new(0.3).unwrap();
        let a = fading.sample(4, 4, &mut Stream::root(5).child(2).rng());
        let b = fading.sample(4, 4, &mut Stream::root(5).child(2).rng());
        assert_eq!(a, b);
    }

    #[test]
    fn peak_power_scales_with_inverse_duty_cycle() {
        let power = PowerConfig::from_pattern(&pattern_5(), 1.0).unwrap();
        assert_eq!(power.p_peak(), 2.5);
        let p7 = ModulationPattern::new(4, 4, 2, 7, 2).unwrap();
        assert_eq!(PowerConfig::from_pattern(&p7, 1.0).unwrap().p_peak(), 3.5);
        assert!((power.amplitude(2) - 2.5 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn noise_variance_matches_the_snr_relation() {
        let pattern = pattern_5();
        let power = PowerConfig::from_pattern(&pattern, 1.0).unwrap();
        // 0 dB, rate 1/2, m = 5, l_a = 2, P_t = 2.5: sigma^2 = 12.5 / 5 = 2.5.
        let sigma = noise_sigma(0.0, 0.5, &pattern, &power).unwrap();
        assert!((sigma * sigma - 2.5).abs() < 1e-12);
        // 10 dB shrinks the variance tenfold.
        let sigma10 = noise_sigma(10.0, 0.5, &pattern, &power).unwrap();
        assert!((sigma10 * sigma10 - 0.25).abs() < 1e-12);
        assert!(noise_sigma(0.0, 0.0, &pattern, &power).is_err());
    }

    #[test]
    fn noiseless_frame_puts_group_gain_on_pulsed_slots() {
        let pattern = pattern_5();
        let power = PowerConfig::from_pattern(&pattern, 1.0).unwrap();
        let h = FadingParams::new(0.3)
            .unwrap()
            .sample(4, 4, &mut Stream::root(3).rng());
        let group = AntennaGroup::new(vec![1, 3]).unwrap();
        let symbol = MppmSymbol::parse("10100").unwrap();
        let y = noiseless_rx(&group, &symbol, &h, power.amplitude(2));
        for r in 0..4 {
            let level = power.amplitude(2) * (h.gain(r, 1) + h.gain(r, 3));
            assert_eq!(y[r * 5], level);
            assert_eq!(y[r * 5 + 1], 0.0);
            assert_eq!(y[r * 5 + 2], level);
            assert_eq!(y[r * 5 + 3], 0.0);
            assert_eq!(y[r * 5 + 4], 0.0);
        }
    }
}
