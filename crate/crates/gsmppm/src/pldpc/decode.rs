//! Flooding belief-propagation decoding.
//!
//! Check updates run either exact sum-product (two-pass prefix/suffix
//! products of `tanh`, no divisions, numerically clamped) or normalized
//! min-sum with the usual 0.75 scale. Punctured variable nodes simply
//! arrive with zero channel LLRs. Decoding stops early as soon as the
//! hard decisions satisfy every parity check.

use super::LiftedCode;

/// Check-node update rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    /// Exact sum-product (tanh rule).
    #[default]
    SumProduct,
    /// Min-sum with messages scaled by 0.75 — cheaper, slightly weaker.
    MinSum,
}

const MIN_SUM_SCALE: f64 = 0.75;
/// Magnitude cap keeping `atanh` finite.
const TANH_CLAMP: f64 = 1.0 - 1e-12;

/// Result of decoding one frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// Hard decisions for every variable node (punctured included).
    pub bits: Vec<u8>,
    /// Message-passing iterations actually run.
    pub iterations: u32,
    /// Whether the hard decisions satisfy all parity checks.
    pub converged: bool,
}

/// Reusable decoder state for one Tanner graph.
pub struct Decoder {
    kind: DecoderKind,
    n_vars: usize,
    /// Edge endpoints grouped by check: `cn_start[c]..cn_start[c + 1]`.
    cn_start: Vec<u32>,
    edge_vn: Vec<u32>,
}

impl Decoder {
    pub fn new(code: &LiftedCode, kind: DecoderKind) -> Self {
        let checks: Vec<Vec<u32>> =
            (0..code.n_checks()).map(|c| code.cn_neighbors(c).to_vec()).collect();
        Self::from_checks(code.n_vars(), &checks, kind)
    }

    /// Build a decoder straight from check adjacency lists.
    pub fn from_checks(n_vars: usize, checks: &[Vec<u32>], kind: DecoderKind) -> Self {
        let mut cn_start = Vec::with_capacity(checks.len() + 1);
        let mut edge_vn = Vec::new();
        cn_start.push(0u32);
        for adj in checks {
            edge_vn.extend_from_slice(adj);
            cn_start.push(edge_vn.len() as u32);
        }
        Decoder { kind, n_vars, cn_start, edge_vn }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.cn_start.len() - 1
    }

    /// Decode with early exit on a zero syndrome.
    pub fn decode(&self, channel_llrs: &[f64], max_iters: u32) -> DecodeOutcome {
        self.decode_with(channel_llrs, max_iters, true)
    }

    /// Decode; `early_exit = false` always runs `max_iters` iterations,
    /// which is what exact-marginal comparisons on cycle-free graphs need.
    pub fn decode_with(
        &self,
        channel_llrs: &[f64],
        max_iters: u32,
        early_exit: bool,
    ) -> DecodeOutcome {
        assert_eq!(channel_llrs.len(), self.n_vars, "wrong LLR count");
        let n_edges = self.edge_vn.len();
        let mut v2c = vec![0.0f64; n_edges];
        let mut c2v = vec![0.0f64; n_edges];
        let mut app: Vec<f64> = channel_llrs.to_vec();
        let mut bits = vec![0u8; self.n_vars];

        // Initial messages are the channel values.
        for e in 0..n_edges {
            v2c[e] = channel_llrs[self.edge_vn[e] as usize];
        }
        hard_decide(&app, &mut bits);
        if early_exit && self.syndrome_ok(&bits) {
            return DecodeOutcome { bits, iterations: 0, converged: true };
        }
        if max_iters == 0 {
            let converged = self.syndrome_ok(&bits);
            return DecodeOutcome { bits, iterations: 0, converged };
        }

        let mut scratch = Vec::new();
        for iter in 1..=max_iters {
            match self.kind {
                DecoderKind::SumProduct => self.check_pass_sum_product(&v2c, &mut c2v, &mut scratch),
                DecoderKind::MinSum => self.check_pass_min_sum(&v2c, &mut c2v),
            }

            // Variable pass: totals, then extrinsic messages.
            app.copy_from_slice(channel_llrs);
            for e in 0..n_edges {
                app[self.edge_vn[e] as usize] += c2v[e];
            }
            for e in 0..n_edges {
                v2c[e] = app[self.edge_vn[e] as usize] - c2v[e];
            }

            hard_decide(&app, &mut bits);
            let satisfied = self.syndrome_ok(&bits);
            if early_exit && satisfied {
                return DecodeOutcome { bits, iterations: iter, converged: true };
            }
            if iter == max_iters {
                return DecodeOutcome { bits, iterations: iter, converged: satisfied };
            }
        }
        unreachable!("loop returns on its last iteration");
    }

    /// Posterior LLRs after a fixed number of iterations (no early exit).
    pub fn posterior_llrs(&self, channel_llrs: &[f64], iters: u32) -> Vec<f64> {
        assert_eq!(channel_llrs.len(), self.n_vars, "wrong LLR count");
        let n_edges = self.edge_vn.len();
        let mut v2c = vec![0.0f64; n_edges];
        let mut c2v = vec![0.0f64; n_edges];
        let mut app: Vec<f64> = channel_llrs.to_vec();
        for e in 0..n_edges {
            v2c[e] = channel_llrs[self.edge_vn[e] as usize];
        }
        let mut scratch = Vec::new();
        for _ in 0..iters {
            match self.kind {
                DecoderKind::SumProduct => self.check_pass_sum_product(&v2c, &mut c2v, &mut scratch),
                DecoderKind::MinSum => self.check_pass_min_sum(&v2c, &mut c2v),
            }
            app.copy_from_slice(channel_llrs);
            for e in 0..n_edges {
                app[self.edge_vn[e] as usize] += c2v[e];
            }
            for e in 0..n_edges {
                v2c[e] = app[self.edge_vn[e] as usize] - c2v[e];
            }
        }
        app
    }

    fn check_pass_sum_product(&self, v2c: &[f64], c2v: &mut [f64], scratch: &mut Vec<f64>) {
        for c in 0..self.n_checks() {
            let lo = self.cn_start[c] as usize;
            let hi = self.cn_start[c + 1] as usize;
            let deg = hi - lo;
            scratch.clear();
            scratch.extend((lo..hi).map(|e| (0.5 * v2c[e]).tanh()));
            // prefix[i] = product of tanh over edges < i; suffix runs in
            // place right-to-left.
            let mut suffix = 1.0f64;
            for i in (0..deg).rev() {
                c2v[lo + i] = suffix;
                suffix *= scratch[i];
            }
            let mut prefix = 1.0f64;
            for i in 0..deg {
                let prod = (prefix * c2v[lo + i]).clamp(-TANH_CLAMP, TANH_CLAMP);
                c2v[lo + i] = 2.0 * prod.atanh();
                prefix *= scratch[i];
            }
        }
    }

    fn check_pass_min_sum(&self, v2c: &[f64], c2v: &mut [f64]) {
        for c in 0..self.n_checks() {
            let lo = self.cn_start[c] as usize;
            let hi = self.cn_start[c + 1] as usize;
            let mut sign = 1.0f64;
            let (mut min1, mut min2) = (f64::INFINITY, f64::INFINITY);
            let mut argmin = lo;
            for e in lo..hi {
                let mag = v2c[e].abs();
                if v2c[e] < 0.0 {
                    sign = -sign;
                }
                if mag < min1 {
                    min2 = min1;
                    min1 = mag;
                    argmin = e;
                } else if mag < min2 {
                    min2 = mag;
                }
            }
            for e in lo..hi {
                // min2 stays infinite only for a degree-1 check; cap it so
                // the arithmetic stays finite.
                let mag = (if e == argmin { min2 } else { min1 }).min(1e6);
                let s = if v2c[e] < 0.0 { -sign } else { sign };
                c2v[e] = MIN_SUM_SCALE * s * mag;
            }
        }
    }

    fn syndrome_ok(&self, bits: &[u8]) -> bool {
        (0..self.n_checks()).all(|c| {
            let lo = self.cn_start[c] as usize;
            let hi = self.cn_start[c + 1] as usize;
            self.edge_vn[lo..hi].iter().fold(0u8, |acc, &v| acc ^ bits[v as usize]) == 0
        })
    }
}

fn hard_decide(app: &[f64], bits: &mut [u8]) {
    for (b, &l) in bits.iter_mut().zip(app) {
        *b = u8::from(l < 0.0);
    }
}

/// One-shot decode without keeping the decoder around.
pub fn decode(
    code: &LiftedCode,
    kind: DecoderKind,
    channel_llrs: &[f64],
    max_iters: u32,
) -> DecodeOutcome {
    Decoder::new(code, kind).decode(channel_llrs, max_iters)
}
