//! Toolkit for designing and analyzing coded GSMPPM links over
//! weak-turbulence free-space optical channels.
//!
//! The crate covers the full chain:
//!
//! * [`constellation`] — multipulse position symbols, antenna groups, and
//!   labeled GSMPPM constellations (natural mapping, validation, JSON I/O);
//! * [`adm`] — the asymmetric dual-mode constellation designer (parameter
//!   selection, label partitioning, maximum-distance subset search and
//!   relabeling);
//! * [`channel`] — lognormal fading, transmit power bookkeeping, and the
//!   SNR/noise-variance relation;
//! * [`modem`] — modulation and soft demapping (max-log and exact MAP);
//! * [`capacity`] — Monte-Carlo CM/BICM capacity estimation and the
//!   energy-efficiency figures of merit;
//! * [`pldpc`] — protograph LDPC base matrices, PEG lifting, systematic
//!   encoding, and belief-propagation decoding;
//! * [`pexit`] — protograph EXIT analysis: decoding thresholds and base-matrix
//!   search;
//! * [`sim`] — end-to-end Monte-Carlo bit-error-rate experiments.
//!
//! All stochastic operations take an explicit [`rng::Stream`], so every result
//! is reproducible bit-for-bit from a root seed regardless of worker count.

pub mod adm;
pub mod capacity;
pub mod channel;
pub mod constellation;
pub mod error;
pub mod modem;
pub mod pexit;
pub mod pldpc;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
