//! Systematic encoding via GF(2) elimination of the parity-check matrix.
//!
//! The parity-check matrix is reduced once to reduced row-echelon form
//! with dense bit-packed rows; information bits then live on the
//! non-pivot columns verbatim and each pivot bit is a parity of
//! information bits, so encoding a frame is a handful of word-wide XORs.

use super::LiftedCode;
use crate::error::{Error, Result};

/// Dense GF(2) row, bit `j` of the code word = bit `j % 64` of word `j / 64`.
#[derive(Clone, Debug)]
struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    fn zero(n: usize) -> Self {
        BitRow { words: vec![0; n.div_ceil(64)] }
    }

    fn set(&mut self, j: usize) {
        self.words[j / 64] |= 1 << (j % 64);
    }

    fn get(&self, j: usize) -> bool {
        self.words[j / 64] >> (j % 64) & 1 == 1
    }

    fn xor_in(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }
}

/// Precomputed systematic encoder for a lifted code.
#[derive(Debug)]
pub struct Encoder {
    n: usize,
    /// Pivot column of each reduced row.
    pivots: Vec<usize>,
    /// Reduced rows; row `r` expresses `x[pivots[r]]` as a parity of
    /// non-pivot positions.
    rows: Vec<BitRow>,
    /// Non-pivot (information) columns in ascending order.
    info_cols: Vec<usize>,
}

/// Build an encoder from the code's parity checks; fails when the checks
/// are linearly dependent.
pub fn encoder_from_parity(code: &LiftedCode) -> Result<Encoder> {
    let n = code.n_vars();
    let r = code.n_checks();
    let mut rows: Vec<BitRow> = (0..r)
        .map(|c| {
            let mut row = BitRow::zero(n);
            for &v in code.cn_neighbors(c) {
                row.set(v as usize);
            }
            row
        })
        .collect();

    // Forward elimination with immediate back-substitution (Gauss-Jordan).
    let mut pivots = Vec::with_capacity(r);
    let mut next_row = 0usize;
    for col in 0..n {
        if next_row == r {
            break;
        }
        let Some(found) = (next_row..r).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(next_row, found);
        let pivot_row = rows[next_row].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next_row && row.get(col) {
                row.xor_in(&pivot_row);
            }
        }
        pivots.push(col);
        next_row += 1;
    }
    if next_row < r {
        return Err(Error::RankDeficient { rank: next_row, rows: r });
    }

    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let info_cols = (0..n).filter(|&j| !is_pivot[j]).collect();
    Ok(Encoder { n, pivots, rows, info_cols })
}

impl Encoder {
    /// Code word length (all variable nodes, punctured included).
    pub fn codeword_len(&self) -> usize {
        self.n
    }

    /// Information length.
    pub fn info_len(&self) -> usize {
        self.info_cols.len()
    }

    /// Positions the information bits occupy inside the code word.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_cols
    }

    /// Encode `info` (0/1 bytes, length [`Self::info_len`]) into a full
    /// code word of 0/1 bytes.
    pub fn encode(&self, info: &[u8]) -> Vec<u8> {
        assert_eq!(info.len(), self.info_len(), "wrong information length");
        let mut packed = BitRow::zero(self.n);
        for (&col, &bit) in self.info_cols.iter().zip(info) {
            if bit & 1 == 1 {
                packed.set(col);
            }
        }
        for (row, &pivot) in self.rows.iter().zip(&self.pivots) {
            // In reduced form a row touches its own pivot (still unset in
            // `packed`) and information columns only, so a masked parity
            // over the packed word is exactly the pivot bit.
            let mut acc = 0u64;
            for (a, b) in row.words.iter().zip(&packed.words) {
                acc ^= a & b;
            }
            if acc.count_ones() & 1 == 1 {
                packed.set(pivot);
            }
        }
        (0..self.n).map(|j| u8::from(packed.get(j))).collect()
    }

    /// Read the information bits back out of a code word.
    pub fn extract_info(&self, word: &[u8]) -> Vec<u8> {
        self.info_cols.iter().map(|&j| word[j] & 1).collect()
    }
}

/// Syndrome check: does `word` satisfy every parity check of `code`?
pub fn is_codeword(code: &LiftedCode, word: &[u8]) -> bool {
    (0..code.n_checks()).all(|c| {
        code.cn_neighbors(c)
            .iter()
            .fold(0u8, |acc, &v| acc ^ (word[v as usize] & 1))
            == 0
    })
}
