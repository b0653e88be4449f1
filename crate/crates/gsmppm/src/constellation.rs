//! Core GSMPPM types: multipulse position symbols, antenna groups, modulation
//! patterns, and labeled constellations.
//!
//! A GSMPPM symbol carries information jointly in the *spatial* domain (which
//! group of `n_a` transmit antennas fires) and the *signal* domain (which
//! `l_a`-of-`l` multipulse position waveform those antennas emit). A
//! constellation maps every `m`-bit label to one (group, waveform) pair.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of `k`-subsets of an `n`-set.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// One MPPM waveform: `l` time slots of which exactly `l_a` carry a pulse.
///
/// Slots are numbered from the left, so `10100` means pulses in slots 1 and 3
/// of 5. Internally slot `i` (0-based) maps to bit `l - 1 - i` of `bits`, so
/// the numeric order of `bits` coincides with the lexicographic order of the
/// display strings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MppmSymbol {
    l: u8,
    bits: u32,
}

impl MppmSymbol {
    /// Build a symbol from its slot bitmask (see the type-level slot/bit
    /// numbering). Fails when `l` is out of range or `bits` uses slots beyond
    /// `l`.
    pub fn new(l: u8, bits: u32) -> Result<Self> {
        if l == 0 || l > 30 {
            return Err(Error::InvalidPattern(format!("slot count l={l} out of range 1..=30")));
        }
        if bits >= 1 << l {
            return Err(Error::InvalidPattern(format!(
                "waveform mask {bits:#b} does not fit in {l} slots"
            )));
        }
        Ok(MppmSymbol { l, bits })
    }

    /// Parse the display form, e.g. `"10100"`.
    pub fn parse(s: &str) -> Result<Self> {
        let l = s.len();
        if l == 0 || l > 30 {
            return Err(Error::InvalidConstellation(format!("waveform string {s:?} has bad length")));
        }
        let mut bits = 0u32;
        for c in s.chars() {
            bits <<= 1;
            match c {
                '1' => bits |= 1,
                '0' => {}
                _ => {
                    return Err(Error::InvalidConstellation(format!(
                        "waveform string {s:?} contains a character other than 0/1"
                    )))
                }
            }
        }
        Ok(MppmSymbol { l: l as u8, bits })
    }

    /// Total number of slots `l`.
    pub fn slot_count(&self) -> u8 {
        self.l
    }

    /// Number of pulsed slots.
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Raw slot bitmask (slot 0 is the highest used bit).
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// True when slot `i` (0-based from the left) carries a pulse.
    pub fn pulse_in_slot(&self, i: u8) -> bool {
        debug_assert!(i < self.l);
        self.bits >> (self.l - 1 - i) & 1 == 1
    }

    /// Hamming distance between two waveforms of the same length.
    pub fn distance(&self, other: &MppmSymbol) -> u32 {
        debug_assert_eq!(self.l, other.l);
        (self.bits ^ other.bits).count_ones()
    }
}

impl fmt::Display for MppmSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.l {
            f.write_str(if self.pulse_in_slot(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for MppmSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MppmSymbol({self})")
    }
}

/// All `C(l, l_a)` waveforms with `l_a` pulses in `l` slots, in
/// lexicographically descending slot order (pulses packed leftmost first):
/// `(5,2)` starts `11000, 10100, 10010, ...` and ends `..., 00101, 00011`.
pub fn enumerate_mppm(l: u8, l_a: u8) -> Vec<MppmSymbol> {
    debug_assert!(l_a <= l && l <= 30);
    (0..l)
        .combinations(l_a as usize)
        .map(|slots| {
            let bits = slots.iter().fold(0u32, |acc, &s| acc | 1 << (l - 1 - s));
            MppmSymbol { l, bits }
        })
        .collect()
}

/// A set of `n_a` transmit antennas activated together, 1-indexed and sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AntennaGroup {
    antennas: Vec<u8>,
}

impl AntennaGroup {
    /// Build a group from 1-indexed antenna numbers (must be sorted and
    /// distinct, which is also the canonical JSON form).
    pub fn new(antennas: Vec<u8>) -> Result<Self> {
        if antennas.is_empty() {
            return Err(Error::InvalidConstellation("empty antenna group".into()));
        }
        if antennas[0] == 0 {
            return Err(Error::InvalidConstellation("antenna numbers are 1-indexed".into()));
        }
        if !antennas.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConstellation(format!(
                "antenna group {antennas:?} is not sorted and distinct"
            )));
        }
        Ok(AntennaGroup { antennas })
    }

    /// 1-indexed antenna numbers, ascending.
    pub fn antennas(&self) -> &[u8] {
        &self.antennas
    }

    pub fn len(&self) -> usize {
        self.antennas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.antennas.is_empty()
    }
}

impl fmt::Display for AntennaGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.antennas.iter().map(|a| a.to_string()).join(","))
    }
}

impl fmt::Debug for AntennaGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AntennaGroup{self}")
    }
}

/// All `C(n_tx, n_a)` antenna groups in lexicographic order:
/// `(1,2), (1,3), (1,4), (2,3), (2,4), (3,4)` for `n_tx = 4, n_a = 2`.
pub fn enumerate_groups(n_tx: u8, n_a: u8) -> Vec<AntennaGroup> {
    (1..=n_tx)
        .combinations(n_a as usize)
        .map(|antennas| AntennaGroup { antennas })
        .collect()
}

/// Group order used when assigning groups to label blocks: the first
/// `n_effective` entries act as effective groups and the following ones as
/// additional groups.
///
/// For the 4-antenna, 2-active layout the conventional order pairs
/// complementary groups first — `(1,2), (3,4), (1,4), (2,3)` effective, then
/// `(1,3), (2,4)` — so that designs reproduce the published tables. Other
/// shapes fall back to lexicographic order.
pub fn group_usage_order(n_tx: u8, n_a: u8) -> Vec<AntennaGroup> {
    if n_tx == 4 && n_a == 2 {
        [[1u8, 2], [3, 4], [1, 4], [2, 3], [1, 3], [2, 4]]
            .iter()
            .map(|a| AntennaGroup { antennas: a.to_vec() })
            .collect()
    } else {
        enumerate_groups(n_tx, n_a)
    }
}

/// The dimensioning tuple of a GSMPPM system:
/// `n_tx` transmit and `n_rx` receive apertures, `n_a` antennas active per
/// symbol, `l` slots with `l_a` pulses, and `m_s = 2^m` constellation points.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationPattern {
    pub n_tx: u8,
    pub n_rx: u8,
    pub n_a: u8,
    pub l: u8,
    pub l_a: u8,
    /// Constellation size; always `2^m` for the derived `m`.
    pub m_s: u32,
}

impl ModulationPattern {
    /// Build and validate a pattern; `m_s` is derived as `2^m`.
    pub fn new(n_tx: u8, n_rx: u8, n_a: u8, l: u8, l_a: u8) -> Result<Self> {
        let mut p = ModulationPattern { n_tx, n_rx, n_a, l, l_a, m_s: 0 };
        p.m_s = 1 << p.bits_per_symbol_unchecked();
        p.validate()?;
        Ok(p)
    }

    /// Check the structural constraints, including `m_s = 2^m`.
    pub fn validate(&self) -> Result<()> {
        if self.n_rx == 0 {
            return Err(Error::InvalidPattern("n_rx must be at least 1".into()));
        }
        if !(2 <= self.n_a && u16::from(self.n_a) * 2 <= u16::from(self.n_tx)) {
            return Err(Error::InvalidPattern(format!(
                "need 2 <= n_a <= n_tx/2, got n_a={} n_tx={}",
                self.n_a, self.n_tx
            )));
        }
        if !(2 <= self.l_a && u16::from(self.l_a) * 2 <= u16::from(self.l)) {
            return Err(Error::InvalidPattern(format!(
                "need 2 <= l_a <= l/2, got l_a={} l={}",
                self.l_a, self.l
            )));
        }
        if self.l > 30 {
            return Err(Error::InvalidPattern(format!("slot count l={} out of range", self.l)));
        }
        if self.m_s != 1 << self.bits_per_symbol_unchecked() {
            return Err(Error::InvalidPattern(format!(
                "m_s={} but 2^m={} for this pattern",
                self.m_s,
                1u64 << self.bits_per_symbol_unchecked()
            )));
        }
        Ok(())
    }

    fn bits_per_symbol_unchecked(&self) -> u32 {
        let n_s = binomial(self.n_tx as u64, self.n_a as u64).max(1);
        let m_max = binomial(self.l as u64, self.l_a as u64).max(1);
        (n_s as f64).log2() as u32 + (m_max as f64).log2() as u32
    }

    /// `N_s = C(n_tx, n_a)`: number of distinct antenna groups.
    pub fn group_count(&self) -> u32 {
        binomial(self.n_tx as u64, self.n_a as u64) as u32
    }

    /// `M_max = C(l, l_a)`: number of distinct waveforms.
    pub fn waveform_count(&self) -> u32 {
        binomial(self.l as u64, self.l_a as u64) as u32
    }

    /// Spatial bits `floor(log2 N_s)`.
    pub fn spatial_bits(&self) -> u32 {
        31 - self.group_count().leading_zeros()
    }

    /// Signal bits `floor(log2 M_max)`.
    pub fn signal_bits(&self) -> u32 {
        31 - self.waveform_count().leading_zeros()
    }

    /// Bits per symbol `m = floor(log2 N_s) + floor(log2 M_max)`.
    pub fn bits_per_symbol(&self) -> u32 {
        self.spatial_bits() + self.signal_bits()
    }

    /// `N_e = 2^floor(log2 N_s)`: number of effective groups.
    pub fn effective_group_count(&self) -> u32 {
        1 << self.spatial_bits()
    }

    /// `M = 2^floor(log2 M_max)`: label block size per effective group.
    pub fn block_size(&self) -> u32 {
        1 << self.signal_bits()
    }

    /// Number of labels, `2^m`.
    pub fn label_count(&self) -> u32 {
        self.m_s
    }

    /// Pulse duty cycle `tau = l_a / l`.
    pub fn duty_cycle(&self) -> f64 {
        f64::from(self.l_a) / f64::from(self.l)
    }

    /// Compact display form `(n_tx, n_rx, n_a, l, l_a, m_s)`.
    pub fn tuple_string(&self) -> String {
        format!(
            "({},{},{},{},{},{})",
            self.n_tx, self.n_rx, self.n_a, self.l, self.l_a, self.m_s
        )
    }
}

/// Bit `k` (0 = most significant of `m`) of a label.
pub fn label_bit(label: u32, k: u32, m: u32) -> u32 {
    debug_assert!(k < m);
    label >> (m - 1 - k) & 1
}

/// Zero-padded `m`-bit display form of a label.
pub fn label_string(label: u32, m: u32) -> String {
    (0..m).map(|k| if label_bit(label, k, m) == 1 { '1' } else { '0' }).collect()
}

fn parse_label(s: &str, m: u32) -> Result<u32> {
    if s.len() != m as usize || !s.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::InvalidConstellation(format!(
            "label {s:?} is not an {m}-bit binary string"
        )));
    }
    Ok(u32::from_str_radix(s, 2).expect("validated binary string"))
}

/// One constellation point: a label mapped to an antenna group and waveform.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConstellationEntry {
    pub label: u32,
    pub group: AntennaGroup,
    pub symbol: MppmSymbol,
}

/// A complete labeled GSMPPM constellation. Entries are kept sorted by label;
/// a structurally sound constellation maps every label in `[0, 2^m)` exactly
/// once (see [`validate_constellation`]).
#[derive(Clone, PartialEq, Debug)]
pub struct GsmppmConstellation {
    pattern: ModulationPattern,
    entries: Vec<ConstellationEntry>,
}

impl GsmppmConstellation {
    /// Assemble a constellation from entries (sorted by label internally).
    /// No structural validation is performed; call
    /// [`validate_constellation`] or use [`GsmppmConstellation::checked`].
    pub fn new(pattern: ModulationPattern, mut entries: Vec<ConstellationEntry>) -> Self {
        entries.sort_by_key(|e| e.label);
        GsmppmConstellation { pattern, entries }
    }

    /// Assemble and validate, rejecting any structural violation.
    pub fn checked(pattern: ModulationPattern, entries: Vec<ConstellationEntry>) -> Result<Self> {
        let c = GsmppmConstellation::new(pattern, entries);
        let report = validate_constellation(&c);
        if report.is_valid() {
            Ok(c)
        } else {
            Err(Error::InvalidConstellation(report.to_string()))
        }
    }

    pub fn pattern(&self) -> &ModulationPattern {
        &self.pattern
    }

    /// Entries sorted by label.
    pub fn entries(&self) -> &[ConstellationEntry] {
        &self.entries
    }

    /// Look up the entry for `label`, if present.
    pub fn entry(&self, label: u32) -> Option<&ConstellationEntry> {
        self.entries
            .binary_search_by_key(&label, |e| e.label)
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Distinct groups actually used, in order of first appearance by label.
    pub fn used_groups(&self) -> Vec<AntennaGroup> {
        let mut seen = Vec::new();
        for e in &self.entries {
            if !seen.contains(&e.group) {
                seen.push(e.group.clone());
            }
        }
        seen
    }

    /// Serialize to the canonical JSON document (byte-stable across
    /// save/load round trips).
    pub fn to_json_string(&self) -> String {
        let file = ConstellationFile {
            pattern: self.pattern,
            entries: self
                .entries
                .iter()
                .map(|e| EntryRepr {
                    label: label_string(e.label, self.pattern.bits_per_symbol()),
                    group: e.group.antennas().to_vec(),
                    symbol: e.symbol.to_string(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("constellation serializes");
        s.push('\n');
        s
    }

    /// Parse the canonical JSON document.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ConstellationFile = serde_json::from_str(s)?;
        file.pattern.validate()?;
        let m = file.pattern.bits_per_symbol();
        let entries = file
            .entries
            .into_iter()
            .map(|e| {
                Ok(ConstellationEntry {
                    label: parse_label(&e.label, m)?,
                    group: AntennaGroup::new(e.group)?,
                    symbol: MppmSymbol::parse(&e.symbol)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GsmppmConstellation::new(file.pattern, entries))
    }

    /// Write the canonical JSON document to `path`.
    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    /// Load a constellation from a JSON document at `path`.
    pub fn load_json(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Self::from_json_str(&s)
    }
}

#[derive(Serialize, Deserialize)]
struct ConstellationFile {
    pattern: ModulationPattern,
    entries: Vec<EntryRepr>,
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    label: String,
    group: Vec<u8>,
    symbol: String,
}

/// The natural-mapping baseline: the top `floor(log2 N_s)` label bits index
/// the first `N_e` groups of [`group_usage_order`], and the remaining bits
/// index the first `M` waveforms of [`enumerate_mppm`] order.
pub fn natural_constellation(pattern: &ModulationPattern) -> Result<GsmppmConstellation> {
    pattern.validate()?;
    let groups = group_usage_order(pattern.n_tx, pattern.n_a);
    let symbols = enumerate_mppm(pattern.l, pattern.l_a);
    let block = pattern.block_size();
    let entries = (0..pattern.label_count())
        .map(|label| {
            let spatial = (label >> pattern.signal_bits()) as usize;
            let signal = (label & (block - 1)) as usize;
            ConstellationEntry {
                label,
                group: groups[spatial].clone(),
                symbol: symbols[signal],
            }
        })
        .collect();
    Ok(GsmppmConstellation::new(pattern.clone(), entries))
}

/// A structural defect found by [`validate_constellation`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    /// Entry count differs from `2^m`.
    EntryCount { expected: u32, actual: usize },
    /// The same label appears more than once.
    DuplicateLabel { label: u32 },
    /// A label outside `[0, 2^m)`.
    LabelOutOfRange { label: u32 },
    /// A label in `[0, 2^m)` with no entry.
    MissingLabel { label: u32 },
    /// A waveform whose slot count differs from the pattern's `l`.
    SymbolLength { label: u32 },
    /// A waveform whose pulse count differs from the pattern's `l_a`.
    SymbolWeight { label: u32 },
    /// An antenna group whose size differs from `n_a` or that references an
    /// antenna beyond `n_tx`.
    GroupShape { label: u32 },
    /// Two labels of the same group share a waveform, so the map from labels
    /// to (group, waveform) pairs is not injective.
    DuplicateSymbolInGroup { group: AntennaGroup, symbol: MppmSymbol },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EntryCount { expected, actual } => {
                write!(f, "expected {expected} entries, found {actual}")
            }
            Violation::DuplicateLabel { label } => write!(f, "duplicate label {label}"),
            Violation::LabelOutOfRange { label } => write!(f, "label {label} out of range"),
            Violation::MissingLabel { label } => write!(f, "missing label {label}"),
            Violation::SymbolLength { label } => write!(f, "label {label}: wrong waveform length"),
            Violation::SymbolWeight { label } => write!(f, "label {label}: wrong pulse count"),
            Violation::GroupShape { label } => write!(f, "label {label}: malformed antenna group"),
            Violation::DuplicateSymbolInGroup { group, symbol } => {
                write!(f, "group {group} repeats waveform {symbol}")
            }
        }
    }
}

/// Result of a structural check of a constellation.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            write!(f, "valid")
        } else {
            write!(f, "{}", self.violations.iter().map(|v| v.to_string()).join("; "))
        }
    }
}

/// Check that a constellation is structurally sound: every label in
/// `[0, 2^m)` appears exactly once, waveforms have the pattern's length and
/// weight, groups have the pattern's shape, and no group repeats a waveform.
pub fn validate_constellation(c: &GsmppmConstellation) -> ValidationReport {
    let mut report = ValidationReport::default();
    let p = c.pattern();
    let n = p.label_count();

    if c.entries.len() != n as usize {
        report.violations.push(Violation::EntryCount { expected: n, actual: c.entries.len() });
    }

    let mut seen = vec![0u32; n as usize];
    for e in &c.entries {
        if e.label >= n {
            report.violations.push(Violation::LabelOutOfRange { label: e.label });
        } else {
            seen[e.label as usize] += 1;
        }
        if e.symbol.slot_count() != p.l {
            report.violations.push(Violation::SymbolLength { label: e.label });
        } else if e.symbol.weight() != u32::from(p.l_a) {
            report.violations.push(Violation::SymbolWeight { label: e.label });
        }
        if e.group.len() != p.n_a as usize || e.group.antennas().iter().any(|&a| a > p.n_tx) {
            report.violations.push(Violation::GroupShape { label: e.label });
        }
    }
    for (label, &count) in seen.iter().enumerate() {
        if count == 0 {
            report.violations.push(Violation::MissingLabel { label: label as u32 });
        } else if count > 1 {
            report.violations.push(Violation::DuplicateLabel { label: label as u32 });
        }
    }

    let mut per_group: BTreeMap<&AntennaGroup, Vec<MppmSymbol>> = BTreeMap::new();
    for e in &c.entries {
        per_group.entry(&e.group).or_default().push(e.symbol);
    }
    for (group, mut symbols) in per_group {
        symbols.sort();
        for w in symbols.windows(2) {
            if w[0] == w[1] {
                report
                    .violations
                    .push(Violation::DuplicateSymbolInGroup { group: group.clone(), symbol: w[0] });
            }
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern_5() -> ModulationPattern {
        ModulationPattern::new(4, 4, 2, 5, 2).unwrap()
    }

    #[test]
    fn enumeration_order_is_descending() {
        let two_of_one: Vec<String> = enumerate_mppm(2, 1).iter().map(|s| s.to_string()).collect();
        assert_eq!(two_of_one, ["10", "01"]);
        let seven = enumerate_mppm(7, 2);
        assert_eq!(seven.len(), 21);
        assert_eq!(seven[0].to_string(), "1100000");
        assert!(seven.windows(2).all(|w| w[0].bits() > w[1].bits()));
    }

    #[test]
    fn enumeration_counts_match_binomial() {
        for (l, l_a) in [(4u8, 2u8), (5, 2), (6, 2), (7, 2), (8, 2), (8, 3), (9, 4)] {
            let symbols = enumerate_mppm(l, l_a);
            assert_eq!(symbols.len() as u64, binomial(l as u64, l_a as u64));
            assert!(symbols.iter().all(|s| s.weight() == u32::from(l_a)));
        }
    }

    #[test]
    fn symbol_display_and_parse_round_trip() {
        for s in enumerate_mppm(6, 2) {
            assert_eq!(MppmSymbol::parse(&s.to_string()).unwrap(), s);
        }
        assert!(MppmSymbol::parse("10a00").is_err());
    }

    #[test]
    fn symbol_distance_counts_differing_slots() {
        let a = MppmSymbol::parse("10100").unwrap();
        let b = MppmSymbol::parse("01001").unwrap();
        assert_eq!(a.distance(&b), 4);
        assert_eq!(a.distance(&a), 0);
    }

    #[test]
    fn pattern_derived_quantities() {
        for (l, m, m_s) in [(5u8, 5u32, 32u32), (6, 5, 32), (7, 6, 64), (8, 6, 64)] {
            let p = ModulationPattern::new(4, 4, 2, l, 2).unwrap();
            assert_eq!(p.group_count(), 6);
            assert_eq!(p.effective_group_count(), 4);
            assert_eq!(p.bits_per_symbol(), m);
            assert_eq!(p.label_count(), m_s);
        }
        let p5 = pattern_5();
        assert_eq!(p5.waveform_count(), 10);
        assert_eq!(p5.block_size(), 8);
        assert_eq!(p5.duty_cycle(), 0.4);
    }

    #[test]
    fn pattern_rejects_bad_shapes() {
        assert!(ModulationPattern::new(4, 4, 3, 5, 2).is_err()); // n_a > n_tx/2
        assert!(ModulationPattern::new(4, 4, 2, 5, 3).is_err()); // l_a > l/2
        assert!(ModulationPattern::new(4, 0, 2, 5, 2).is_err()); // no receiver
        let mut p = pattern_5();
        p.m_s = 16;
        assert!(p.validate().is_err());
    }

    #[test]
    fn group_enumeration_is_lexicographic() {
        let groups: Vec<String> = enumerate_groups(4, 2).iter().map(|g| g.to_string()).collect();
        assert_eq!(groups, ["(1,2)", "(1,3)", "(1,4)", "(2,3)", "(2,4)", "(3,4)"]);
    }

    #[test]
    fn usage_order_pairs_complements_first_for_four_antennas() {
        let order: Vec<String> = group_usage_order(4, 2).iter().map(|g| g.to_string()).collect();
        assert_eq!(order, ["(1,2)", "(3,4)", "(1,4)", "(2,3)", "(1,3)", "(2,4)"]);
        // Other shapes fall back to lexicographic order.
        assert_eq!(group_usage_order(6, 2), enumerate_groups(6, 2));
    }

    #[test]
    fn natural_mapping_uses_declared_orders() {
        let c = natural_constellation(&pattern_5()).unwrap();
        let first = c.entry(0).unwrap();
        assert_eq!(first.group.antennas(), &[1, 2]);
        assert_eq!(first.symbol.to_string(), "11000");
        // Label 01001: spatial bits 01 -> second usage group (3,4); signal
        // bits 001 -> second waveform 10100.
        let e = c.entry(0b01001).unwrap();
        assert_eq!(e.group.antennas(), &[3, 4]);
        assert_eq!(e.symbol.to_string(), "10100");
        assert!(validate_constellation(&c).is_valid());
    }

    #[test]
    fn natural_mapping_leaves_extra_groups_idle() {
        let c = natural_constellation(&pattern_5()).unwrap();
        let used: Vec<String> = c.used_groups().iter().map(|g| g.to_string()).collect();
        assert_eq!(used, ["(1,2)", "(3,4)", "(1,4)", "(2,3)"]);
        let symbols: std::collections::BTreeSet<_> =
            c.entries().iter().map(|e| e.symbol).collect();
        assert_eq!(symbols.len(), 8);
    }

    #[test]
    fn validation_catches_defects() {
        let p = pattern_5();
        let good = natural_constellation(&p).unwrap();

        // Duplicate one label / drop another.
        let mut entries = good.entries().to_vec();
        entries[1] = entries[0].clone();
        let report = validate_constellation(&GsmppmConstellation::new(p, entries));
        assert!(report.violations.contains(&Violation::DuplicateLabel { label: 0 }));
        assert!(report.violations.contains(&Violation::MissingLabel { label: 1 }));

        // Wrong pulse count.
        let mut entries = good.entries().to_vec();
        entries[0].symbol = MppmSymbol::parse("10000").unwrap();
        let report = validate_constellation(&GsmppmConstellation::new(p, entries));
        assert!(report.violations.contains(&Violation::SymbolWeight { label: 0 }));

        // Same waveform twice in one group.
        let mut entries = good.entries().to_vec();
        entries[1].symbol = entries[0].symbol;
        let report = validate_constellation(&GsmppmConstellation::new(p, entries));
        assert!(matches!(
            report.violations.as_slice(),
            [Violation::DuplicateSymbolInGroup { .. }]
        ));

        // Out-of-range label.
        let mut entries = good.entries().to_vec();
        entries[0].label = 99;
        let report = validate_constellation(&GsmppmConstellation::new(p, entries));
        assert!(report.violations.contains(&Violation::LabelOutOfRange { label: 99 }));
    }

    #[test]
    fn json_round_trip_is_byte_stable() {
        let c = natural_constellation(&pattern_5()).unwrap();
        let json = c.to_json_string();
        let reloaded = GsmppmConstellation::from_json_str(&json).unwrap();
        assert_eq!(reloaded, c);
        assert_eq!(reloaded.to_json_string(), json);
        assert!(json.contains("\"label\": \"00000\""));
        assert!(json.contains("\"symbol\": \"11000\""));
    }

    #[test]
    fn json_rejects_inconsistent_pattern() {
        let c = natural_constellation(&pattern_5()).unwrap();
        let json = c.to_json_string().replace("\"m_s\": 32", "\"m_s\": 16");
        assert!(GsmppmConstellation::from_json_str(&json).is_err());
    }

    #[test]
    fn label_helpers() {
        assert_eq!(label_string(0b00110, 5), "00110");
        assert_eq!(label_bit(0b00110, 0, 5), 0);
        assert_eq!(label_bit(0b00110, 2, 5), 1);
        assert_eq!(parse_label("00110", 5).unwrap(), 6);
        assert!(parse_label("0110", 5).is_err());
    }

    #[test]
    fn binomial_table() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(7, 2), 21);
        assert_eq!(binomial(8, 2), 28);
        assert_eq!(binomial(28, 11), 21_474_180);
        assert_eq!(binomial(3, 5), 0);
    }
}
