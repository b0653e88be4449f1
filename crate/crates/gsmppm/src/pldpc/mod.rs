//! Protograph LDPC codes: base matrices, lifting, encoding, and decoding.
//!
//! A protograph is a small base matrix `B` whose entry `b_ij` counts the
//! parallel edges between check type `i` and variable type `j`. Lifting by
//! factor `z` replaces each edge bundle with `b_ij` disjoint permutations,
//! producing a quasi-cyclic-style parity-check matrix with `z * cols`
//! variable nodes. Punctured variable types are transmitted nowhere but
//! still participate in decoding.

mod decode;
mod encode;
mod lift;

pub use decode::{decode, DecodeOutcome, Decoder, DecoderKind};
pub use encode::{encoder_from_parity, is_codeword, Encoder};
pub use lift::{lift, LiftedCode};

use crate::error::{Error, Result};

/// Protograph base matrix with a set of punctured variable-node types.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BaseMatrix {
    rows: Vec<Vec<u8>>,
    punctured: Vec<usize>,
}

impl BaseMatrix {
    pub fn new(rows: Vec<Vec<u8>>, punctured: Vec<usize>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidBaseMatrix("empty matrix".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidBaseMatrix("ragged rows".into()));
        }
        if rows.len() >= cols {
            return Err(Error::InvalidBaseMatrix(format!(
                "{} check types need fewer than {} variable types",
                rows.len(),
                cols
            )));
        }
        let mut punctured = punctured;
        punctured.sort_unstable();
        punctured.dedup();
        if punctured.iter().any(|&p| p >= cols) {
            return Err(Error::InvalidBaseMatrix("punctured column out of range".into()));
        }
        if punctured.len() > rows.len() {
            return Err(Error::InvalidBaseMatrix(
                "puncturing leaves fewer transmitted bits than information bits".into(),
            ));
        }
        Ok(BaseMatrix { rows, punctured })
    }

    pub fn check_types(&self) -> usize {
        self.rows.len()
    }

    pub fn variable_types(&self) -> usize {
        self.rows[0].len()
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn punctured(&self) -> &[usize] {
        &self.punctured
    }

    pub fn is_punctured(&self, j: usize) -> bool {
        self.punctured.binary_search(&j).is_ok()
    }

    /// Total parallel-edge count of the protograph.
    pub fn edge_count(&self) -> usize {
        self.rows.iter().flatten().map(|&b| usize::from(b)).sum()
    }

    /// Column sums (variable-type degrees).
    pub fn column_sums(&self) -> Vec<u32> {
        (0..self.variable_types())
            .map(|j| self.rows.iter().map(|r| u32::from(r[j])).sum())
            .collect()
    }

    /// Code rate after puncturing: `(v - c) / (v - p)`.
    pub fn effective_rate(&self) -> f64 {
        let v = self.variable_types() as f64;
        let c = self.check_types() as f64;
        let p = self.punctured.len() as f64;
        (v - c) / (v - p)
    }

    /// Serialize in the text format read back by [`BaseMatrix::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.punctured.is_empty() {
            out.push_str("punctured:");
            for p in &self.punctured {
                out.push(' ');
                out.push_str(&p.to_string());
            }
            out.push('\n');
        }
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parse the whitespace text format: one row per line of integer
    /// multiplicities, `#` comments, and an optional
    /// `punctured: j0 j1 ...` header line (0-based column indices).
    pub fn parse(text: &str) -> Result<Self> {
        let mut punctured = Vec::new();
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("punctured:") {
                for tok in rest.split_whitespace() {
                    let j: usize = tok.parse().map_err(|_| {
                        Error::InvalidBaseMatrix(format!(
                            "line {}: bad punctured index {tok:?}",
                            lineno + 1
                        ))
                    })?;
                    punctured.push(j);
                }
                continue;
            }
            let row: Vec<u8> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u8>().map_err(|_| {
                        Error::InvalidBaseMatrix(format!(
                            "line {}: bad multiplicity {tok:?}",
                            lineno + 1
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        BaseMatrix::new(rows, punctured)
    }
}

/// Design-rule report for improved-protograph candidates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignCheck {
    /// (a) a pre-coding structure exists: some check type connects to
    /// exactly two variable types — a degree-1 type and the highest-degree
    /// punctured type.
    pub has_precoding_check: bool,
    /// (b) the number of degree-2 variable types is in `1..=c/2`.
    pub degree_two_in_range: bool,
    /// (c) every multiplicity is at most 3.
    pub multiplicities_bounded: bool,
    /// (d) the last three columns have equal sums greater than 2.
    pub balanced_tail: bool,
}

impl DesignCheck {
    pub fn all_pass(&self) -> bool {
        self.has_precoding_check
            && self.degree_two_in_range
            && self.multiplicities_bounded
            && self.balanced_tail
    }
}

/// Evaluate the structural design rules used when searching for improved
/// protographs.
pub fn check_design_constraints(base: &BaseMatrix) -> DesignCheck {
    let c = base.check_types();
    let sums = base.column_sums();

    // (a) a check type whose whole neighborhood is one degree-1 variable
    // type plus the highest-degree punctured type.
    let top_punctured = base
        .punctured()
        .iter()
        .copied()
        .max_by_key(|&p| sums[p]);
    let has_precoding_check = top_punctured.is_some_and(|p| {
        base.rows().iter().any(|row| {
            let support: Vec<usize> =
                (0..row.len()).filter(|&j| row[j] > 0).collect();
            support.len() == 2
                && support.contains(&p)
                && support.iter().any(|&j| j != p && sums[j] == 1)
        })
    });

    let degree_two = sums.iter().filter(|&&s| s == 2).count();
    let degree_two_in_range = degree_two >= 1 && degree_two <= c / 2;

    let multiplicities_bounded = base.rows().iter().flatten().all(|&b| b <= 3);

    let v = base.variable_types();
    let balanced_tail = v >= 3 && {
        let tail = &sums[v - 3..];
        tail.iter().all(|&s| s == tail[0]) && tail[0] > 2
    };

    DesignCheck {
        has_precoding_check,
        degree_two_in_range,
        multiplicities_bounded,
        balanced_tail,
    }
}

/// Improved protograph tuned for the dual-mode GSMPPM detector
/// (rate 1/2 after puncturing the fourth variable type).
pub fn improved_protograph() -> BaseMatrix {
    BaseMatrix::new(
        vec![
            vec![1, 0, 0, 2, 0, 0, 0],
            vec![0, 1, 1, 3, 1, 1, 0],
            vec![0, 0, 1, 1, 2, 2, 1],
            vec![0, 1, 0, 2, 0, 0, 2],
        ],
        vec![3],
    )
    .expect("built-in matrix is well-formed")
}

/// AR4JA rate-1/2 protograph (one punctured high-degree type).
pub fn ar4ja_r12() -> BaseMatrix {
    BaseMatrix::parse(include_str!("../../data/ar4ja_r12.txt"))
        .expect("bundled matrix parses")
}

/// Regular (3,6) code expressed as a 1x2 protograph of triple edges.
pub fn regular_3_6() -> BaseMatrix {
    BaseMatrix::new(vec![vec![3, 3]], vec![]).expect("built-in matrix is well-formed")
}

/// Look up a built-in protograph by name.
pub fn builtin_code(name: &str) -> Result<BaseMatrix> {
    match name {
        "i-pldpc" => Ok(improved_protograph()),
        "ar4ja-r12" => Ok(ar4ja_r12()),
        "regular-36" => Ok(regular_3_6()),
        other => Err(Error::InvalidConfig(format!(
            "unknown code {other:?}; expected one of i-pldpc, ar4ja-r12, regular-36"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn improved_protograph_shape_and_rate() {
        let b = improved_protograph();
        assert_eq!(b.check_types(), 4);
        assert_eq!(b.variable_types(), 7);
        assert_eq!(b.edge_count(), 22);
        assert_eq!(b.punctured(), &[3]);
        assert!((b.effective_rate() - 0.5).abs() < 1e-12);
        assert!(check_design_constraints(&b).all_pass());
    }

    #[test]
    fn ar4ja_matches_published_structure() {
        let b = ar4ja_r12();
        assert_eq!(b.check_types(), 3);
        assert_eq!(b.variable_types(), 5);
        assert_eq!(b.rows(), &[
            vec![1, 2, 0, 0, 0],
            vec![0, 3, 1, 1, 1],
            vec![0, 1, 2, 2, 1],
        ]);
        assert_eq!(b.punctured(), &[1]);
        assert!((b.effective_rate() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn regular_code_has_unit_rate_half() {
        let b = regular_3_6();
        assert_eq!(b.column_sums(), vec![3, 3]);
        assert!((b.effective_rate() - 0.5).abs() < 1e-12);
        // Not a precoded design; the structural checks must say so.
        assert!(!check_design_constraints(&b).all_pass());
    }

    #[test]
    fn builtin_lookup() {
        assert!(builtin_code("i-pldpc").is_ok());
        assert!(builtin_code("ar4ja-r12").is_ok());
        assert!(builtin_code("regular-36").is_ok());
        assert!(builtin_code("dvb-s2").is_err());
    }

    #[test]
    fn text_format_round_trips() {
        let b = improved_protograph();
        let text = b.to_text();
        let back = BaseMatrix::parse(&text).unwrap();
        assert_eq!(b, back);
    }

    #[test]
    fn parser_skips_comments_and_validates() {
        let b = BaseMatrix::parse("# comment\npunctured: 1\n1 2 0 # trailing\n0 1 1\n").unwrap();
        assert_eq!(b.rows(), &[vec![1, 2, 0], vec![0, 1, 1]]);
        assert_eq!(b.punctured(), &[1]);
        assert!(BaseMatrix::parse("1 2\n3\n").is_err());
        assert!(BaseMatrix::parse("").is_err());
        assert!(BaseMatrix::parse("punctured: 9\n1 0 1\n").is_err());
        assert!(BaseMatrix::parse("1 x 1\n").is_err());
    }

    #[test]
    fn rate_accounts_for_puncturing() {
        let b = BaseMatrix::new(vec![vec![1, 1, 1, 1]], vec![0]).unwrap();
        assert!((b.effective_rate() - 1.0).abs() < 1e-12);
        let b = BaseMatrix::new(vec![vec![1, 1, 1, 1]], vec![]).unwrap();
        assert!((b.effective_rate() - 0.75).abs() < 1e-12);
    }
}
