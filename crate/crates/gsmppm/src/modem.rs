//! Modulation and soft demodulation of GSMPPM symbols.
//!
//! Demapping computes one Euclidean metric per constellation point —
//! exactly `2^m` evaluations per received symbol — and derives all `m` bit
//! LLRs from that single metric vector, either by the max-log rule used in
//! the simulators or by the exact MAP rule kept as a reference.
//!
//! LLR sign convention: `llr = log p(bit = 0 | y) - log p(bit = 1 | y)`,
//! so positive values argue for bit 0.

use itertools::{Either, Itertools};

use crate::channel::{noiseless_rx, FadingMatrix, PowerConfig};
use crate::constellation::{label_bit, AntennaGroup, GsmppmConstellation, MppmSymbol};
use crate::error::{Error, Result};

/// Look up the (group, waveform) pair transmitted for `label`.
pub fn modulate(c: &GsmppmConstellation, label: u32) -> Result<(&AntennaGroup, MppmSymbol)> {
    c.entry(label)
        .map(|e| (&e.group, e.symbol))
        .ok_or_else(|| Error::InvalidConstellation(format!("no entry for label {label}")))
}

/// Stable `ln(sum(exp(x)))`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Precomputed lookup structure for fast per-entry metric evaluation.
///
/// Entries are deduplicated into distinct groups and waveforms so one symbol
/// costs `n_rx * l` work for the shared slot sums plus `n_rx` per entry,
/// instead of `n_rx * l` per entry.
#[derive(Clone, Debug)]
pub struct SymbolTable {
    m: u32,
    n_rx: usize,
    l: usize,
    l_a: f64,
    amplitude: f64,
    groups: Vec<AntennaGroup>,
    symbols: Vec<MppmSymbol>,
    /// Per label: (index into `groups`, index into `symbols`).
    entry_refs: Vec<(u16, u16)>,
}

impl SymbolTable {
    /// Build the lookup table for a structurally valid constellation.
    pub fn new(c: &GsmppmConstellation, power: &PowerConfig) -> Result<Self> {
        let pattern = c.pattern();
        let n = pattern.label_count() as usize;
        if c.entries().len() != n || c.entries().iter().enumerate().any(|(i, e)| e.label != i as u32)
        {
            return Err(Error::InvalidConstellation(
                "constellation does not map every label exactly once".into(),
            ));
        }
        let mut groups: Vec<AntennaGroup> = Vec::new();
        let mut symbols: Vec<MppmSymbol> = Vec::new();
        let mut entry_refs = Vec::with_capacity(n);
        for e in c.entries() {
            let g = match groups.iter().position(|g| *g == e.group) {
                Some(i) => i,
                None => {
                    groups.push(e.group.clone());
                    groups.len() - 1
                }
            };
            let s = match symbols.iter().position(|s| *s == e.symbol) {
                Some(i) => i,
                None => {
                    symbols.push(e.symbol);
                    symbols.len() - 1
                }
            };
            entry_refs.push((g as u16, s as u16));
        }
        Ok(SymbolTable {
            m: pattern.bits_per_symbol(),
            n_rx: usize::from(pattern.n_rx),
            l: usize::from(pattern.l),
            l_a: f64::from(pattern.l_a),
            amplitude: power.amplitude(pattern.n_a),
            groups,
            symbols,
            entry_refs,
        })
    }

    /// Bare-bones table for experiments with hand-built symbol sets; all
    /// entries must share one slot count and pulse weight.
    pub fn from_parts(
        m: u32,
        n_rx: usize,
        amplitude: f64,
        entries: Vec<(AntennaGroup, MppmSymbol)>,
    ) -> Result<Self> {
        if entries.len() != 1usize << m {
            return Err(Error::InvalidConstellation(format!(
                "{} entries for {m} bits",
                entries.len()
            )));
        }
        let l = entries[0].1.slot_count();
        let l_a = entries[0].1.weight();
        if entries.iter().any(|(_, s)| s.slot_count() != l || s.weight() != l_a) {
            return Err(Error::InvalidConstellation(
                "entries mix slot counts or pulse weights".into(),
            ));
        }
        let mut groups: Vec<AntennaGroup> = Vec::new();
        let mut symbols: Vec<MppmSymbol> = Vec::new();
        let mut entry_refs = Vec::with_capacity(entries.len());
        for (group, symbol) in entries {
            let g = match groups.iter().position(|g| *g == group) {
                Some(i) => i,
                None => {
                    groups.push(group);
                    groups.len() - 1
                }
            };
            let s = match symbols.iter().position(|s| *s == symbol) {
                Some(i) => i,
                None => {
                    symbols.push(symbol);
                    symbols.len() - 1
                }
            };
            entry_refs.push((g as u16, s as u16));
        }
        Ok(SymbolTable {
            m,
            n_rx,
            l: usize::from(l),
            l_a: f64::from(l_a),
            amplitude,
            groups,
            symbols,
            entry_refs,
        })
    }

    /// Bits per symbol.
    pub fn bits_per_symbol(&self) -> u32 {
        self.m
    }

    /// Number of constellation points `2^m`.
    pub fn entry_count(&self) -> usize {
        self.entry_refs.len()
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Noiseless receive frame for `label` under fading `h`.
    pub fn noiseless(&self, label: u32, h: &FadingMatrix) -> Vec<f64> {
        let (g, s) = self.entry_refs[label as usize];
        noiseless_rx(&self.groups[g as usize], &self.symbols[s as usize], h, self.amplitude)
    }

    /// Squared Euclidean distance from `y` to every constellation point under
    /// fading `h` — one metric per label, `2^m` in total.
    pub fn entry_metrics(&self, y: &[f64], h: &FadingMatrix) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.n_rx * self.l);
        // Shared pieces: per-aperture group gains, per-waveform pulse-slot
        // sums of y, and the total received energy.
        let gains: Vec<f64> = self
            .groups
            .iter()
            .flat_map(|g| (0..self.n_rx).map(move |r| (r, g)))
            .map(|(r, g)| self.amplitude * h.group_gain(r, g))
            .collect(); // indexed [group * n_rx + r]
        let mut pulse_sums = vec![0.0; self.symbols.len() * self.n_rx];
        for (si, s) in self.symbols.iter().enumerate() {
            for r in 0..self.n_rx {
                let row = &y[r * self.l..(r + 1) * self.l];
                let mut acc = 0.0;
                for t in 0..self.l {
                    if s.pulse_in_slot(t as u8) {
                        acc += row[t];
                    }
                }
                pulse_sums[si * self.n_rx + r] = acc;
            }
        }
        let y_energy: f64 = y.iter().map(|v| v * v).sum();

        // ||y - x_e||^2 = ||y||^2 - 2 sum_r gain_e(r) * pulse_sum_e(r)
        //               + l_a * sum_r gain_e(r)^2.
        self.entry_refs
            .iter()
            .map(|&(g, s)| {
                let gains = &gains[g as usize * self.n_rx..(g as usize + 1) * self.n_rx];
                let sums = &pulse_sums[s as usize * self.n_rx..(s as usize + 1) * self.n_rx];
                let mut cross = 0.0;
                let mut energy = 0.0;
                for r in 0..self.n_rx {
                    cross += gains[r] * sums[r];
                    energy += gains[r] * gains[r];
                }
                y_energy - 2.0 * cross + self.l_a * energy
            })
            .collect()
    }

    /// Max-log LLRs for all `m` label bits from the per-entry metrics.
    pub fn max_log_llrs(&self, metrics: &[f64], sigma: f64) -> Vec<f64> {
        debug_assert_eq!(metrics.len(), self.entry_count());
        let scale = 1.0 / (2.0 * sigma * sigma);
        (0..self.m)
            .map(|k| {
                let shift = self.m - 1 - k;
                let mut min0 = f64::INFINITY;
                let mut min1 = f64::INFINITY;
                for (label, &d) in metrics.iter().enumerate() {
                    if label as u32 >> shift & 1 == 0 {
                        min0 = min0.min(d);
                    } else {
                        min1 = min1.min(d);
                    }
                }
                scale * (min1 - min0)
            })
            .collect()
    }

    /// Exact MAP LLRs (log-sum-exp over both bit cosets); the reference the
    /// max-log rule approximates.
    pub fn exact_map_llrs(&self, metrics: &[f64], sigma: f64) -> Vec<f64> {
        debug_assert_eq!(metrics.len(), self.entry_count());
        let scale = 1.0 / (2.0 * sigma * sigma);
        let weights: Vec<f64> = metrics.iter().map(|d| -d * scale).collect();
        (0..self.m)
            .map(|k| {
                let shift = self.m - 1 - k;
                let (zeros, ones): (Vec<f64>, Vec<f64>) = weights
                    .iter()
                    .enumerate()
                    .partition_map(|(label, &w)| {
                        if label as u32 >> shift & 1 == 0 {
                            Either::Left(w)
                        } else {
                            Either::Right(w)
                        }
                    });
                log_sum_exp(&zeros) - log_sum_exp(&ones)
            })
            .collect()
    }

    /// Demodulate one received frame to max-log LLRs.
    pub fn demap(&self, y: &[f64], h: &FadingMatrix, sigma: f64) -> Vec<f64> {
        self.max_log_llrs(&self.entry_metrics(y, h), sigma)
    }
}

/// Hard label decision from bit LLRs (`llr < 0` decides bit 1).
pub fn hard_label(llrs: &[f64]) -> u32 {
    llrs.iter().fold(0u32, |acc, &l| acc << 1 | u32::from(l < 0.0))
}

/// Index of the entry with the smallest metric (maximum-likelihood symbol).
pub fn hard_symbol(metrics: &[f64]) -> u32 {
    let mut best = 0usize;
    for i in 1..metrics.len() {
        if metrics[i] < metrics[best] {
            best = i;
        }
    }
    best as u32
}

/// True when bit `k` of `label` is 1 — re-exported convenience for demappers.
pub fn bit_of(label: u32, k: u32, m: u32) -> bool {
    label_bit(label, k, m) == 1
}
