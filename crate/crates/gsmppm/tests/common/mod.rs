//! Shared fixtures for the integration suites: the published dual-mode
//! mapping tables for all four supported patterns, plus a brute-force
//! subset oracle that cross-checks the search code by exhaustion.
#![allow(dead_code)]

use gsmppm::adm::{
    assemble_constellation, average_pairwise_distance, partition_labels, AdmParams,
};
use gsmppm::constellation::{
    AntennaGroup, GsmppmConstellation, ModulationPattern, MppmSymbol,
};

/// The four supported patterns differ only in slot count.
pub fn pattern(l: u8) -> ModulationPattern {
    ModulationPattern::new(4, 4, 2, l, 2).unwrap()
}

pub fn groups(list: &[&[u8]]) -> Vec<AntennaGroup> {
    list.iter().map(|g| AntennaGroup::new(g.to_vec()).unwrap()).collect()
}

pub fn symbols(list: &[&str]) -> Vec<MppmSymbol> {
    list.iter().map(|s| MppmSymbol::parse(s).unwrap()).collect()
}

/// Waveform columns of the published five/six-slot mapping table, in label
/// order within each block.
pub fn published_psi(l: u8) -> (Vec<MppmSymbol>, Vec<MppmSymbol>) {
    let (a, b): (&[&str], &[&str]) = match l {
        5 => (
            &["10100", "01100", "10010", "00110", "10001", "01001"],
            &["11000", "01010", "00101", "00011"],
        ),
        6 => (
            &["110000", "001001", "010100", "001100", "100010", "000011"],
            &["010001", "001010", "000101", "000110"],
        ),
        7 => (
            &[
                "0000011", "0010001", "0001010", "1001000", "0100010", "0110000",
                "1000010", "1100000", "0000101", "0010100", "0001100",
            ],
            &[
                "0010010", "0001001", "0011000", "1000001", "1010000", "0000110",
                "0100001", "0101000", "0100100", "1000100",
            ],
        ),
        8 => (
            &[
                "00100100", "00110000", "00001010", "00010010", "10000100",
                "10010000", "00001100", "10001000", "01000001", "00100001",
                "01000010",
            ],
            &[
                "10100000", "01010000", "01001000", "01100000", "00101000",
                "10000010", "00010100", "00010001", "00000101", "00000011",
            ],
        ),
        _ => panic!("no published table for l = {l}"),
    };
    (symbols(a), symbols(b))
}

/// Parameter triple behind the published tables.
pub fn published_params(l: u8) -> AdmParams {
    match l {
        5 | 6 => AdmParams { m_a: 6, m_b: 4, n_add: 2 },
        7 | 8 => AdmParams { m_a: 11, m_b: 10, n_add: 2 },
        _ => panic!("no published table for l = {l}"),
    }
}

/// The complete published dual-mode constellation for `l` in {5, 6, 7, 8},
/// assembled exactly as the mapping tables print it: effective groups
/// (1,2), (3,4), (1,4), (2,3) carry the Ψ_A column per label block, and
/// additional groups (1,3), (2,4) carry the Ψ_B column per leftover subset.
pub fn published_dual_mode(l: u8) -> GsmppmConstellation {
    let p = pattern(l);
    let params = published_params(l);
    let partition = partition_labels(&p, &params).unwrap();
    let (psi_a, psi_b) = published_psi(l);
    assemble_constellation(
        &p,
        &groups(&[&[1, 2], &[3, 4], &[1, 4], &[2, 3]]),
        &groups(&[&[1, 3], &[2, 4]]),
        &partition,
        &psi_a,
        &psi_b,
    )
    .unwrap()
}

/// Exhaustive maximum of the average pairwise Hamming distance over all
/// `k`-subsets of `candidates` — an independent oracle for the subset
/// search (no pruning, no tie-breaking subtleties).
pub fn brute_force_max_average(candidates: &[MppmSymbol], k: usize) -> f64 {
    fn recurse(
        candidates: &[MppmSymbol],
        start: usize,
        k: usize,
        pick: &mut Vec<MppmSymbol>,
        best: &mut f64,
    ) {
        if pick.len() == k {
            let d = average_pairwise_distance(pick);
            if d > *best {
                *best = d;
            }
            return;
        }
        let need = k - pick.len();
        for i in start..=candidates.len() - need {
            pick.push(candidates[i]);
            recurse(candidates, i + 1, k, pick, best);
            pick.pop();
        }
    }
    assert!(k >= 2 && k <= candidates.len());
    let mut best = 0.0;
    recurse(candidates, 0, k, &mut Vec::with_capacity(k), &mut best);
    best
}
