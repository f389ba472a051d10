//! Random-coding encoders and maximum-likelihood decoders.
//!
//! Three schemes are simulated end to end:
//!
//! * non-cooperative: every node sends one codeword and every receiver
//!   jointly decodes the other two as a multiple-access channel;
//! * cooperative, double-indexed relay codebook;
//! * cooperative, superposed relay codebook.
//!
//! In the cooperative protocol node 0 relays. Nodes 1 and 2 send a fresh
//! message in each of `B` blocks followed by a dummy block. Node 0 decodes
//! both messages at the end of every block and, one block later, sends its
//! own message together with the modulo-`M` sum of what it decoded. Nodes 1
//! and 2 decode backwards from the last block.
//!
//! All decoders minimize a non-negative cost (negative log-likelihood up to
//! constants), break exact ties towards the lexicographically smallest
//! hypothesis, and flag them.

mod codebook;
mod coop;
mod mac;
mod noncoop;

use serde::{Deserialize, Serialize};

pub use codebook::{FfCodebook, GaussianCodebook, LetterStream, RelayCodebook, RelayLetters};
pub use coop::{
    coop_rate, coop_rate_bounds, run_coop, BackwardEstimate, BlockRecord, CoopParams, CoopScheme, DecodeStep, MessageSet,
    ProtocolTrace, RateBound, RelayEstimate,
};
pub use mac::{decode_mac_awgn, decode_mac_ff, MacDecision};
pub use noncoop::{run_noncoop, run_noncoop_awgn, run_noncoop_ff, NoncoopOutcome};

use crate::channels::ChannelError;
use crate::regions::RegionError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodecError {
    #[error("message index {index} out of range for codebook size {size}")]
    OutOfRange { index: usize, size: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("codebook has no codewords")]
    EmptyCodebook,
    #[error("block length must be at least 1")]
    ZeroLength,
    #[error("the protocol needs at least one message block")]
    NoBlocks,
    #[error("power split {0} outside [0, 1]")]
    InvalidAlpha(f64),
    #[error("receiver index {0} is not a node")]
    BadReceiver(usize),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Region(#[from] RegionError),
}

/// `(w2 + w3) mod m`.
pub fn nc_modsum(w2: usize, w3: usize, m: usize) -> Result<usize, CodecError> {
    for w in [w2, w3] {
        if w >= m {
            return Err(CodecError::OutOfRange { index: w, size: m });
        }
    }
    Ok((w2 + w3) % m)
}

/// Recovers the other summand of [`nc_modsum`] from the sum and one's own message.
pub fn nc_recover(sum: usize, own: usize, m: usize) -> Result<usize, CodecError> {
    for w in [sum, own] {
        if w >= m {
            return Err(CodecError::OutOfRange { index: w, size: m });
        }
    }
    Ok((sum + m - own) % m)
}

/// Which part of a two-index decision was wrong.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairError {
    /// Only the first index (`p` at a backward decoder, the lower-numbered sender at a MAC).
    First,
    Second,
    Both,
}

impl PairError {
    fn compare(got: (usize, usize), truth: (usize, usize)) -> Option<PairError> {
        match (got.0 != truth.0, got.1 != truth.1) {
            (false, false) => None,
            (true, false) => Some(PairError::First),
            (false, true) => Some(PairError::Second),
            (true, true) => Some(PairError::Both),
        }
    }

    /// Classifies a decision. A tie counts as an error even when the chosen
    /// pair is right; it is then classified by the rival it tied with.
    pub fn classify(d: &MacDecision, truth: (usize, usize)) -> Option<PairError> {
        match PairError::compare(d.pair, truth) {
            Some(e) => Some(e),
            None if d.tie => Some(PairError::compare(d.rival.unwrap_or(d.pair), truth).unwrap_or(PairError::Both)),
            None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventCounts {
    pub first: u64,
    pub second: u64,
    pub both: u64,
}

impl EventCounts {
    pub fn record(&mut self, e: PairError) {
        match e {
            PairError::First => self.first += 1,
            PairError::Second => self.second += 1,
            PairError::Both => self.both += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.first + self.second + self.both
    }

    pub fn add(&mut self, o: &EventCounts) {
        self.first += o.first;
        self.second += o.second;
        self.both += o.both;
    }
}

/// Per-trial error summary shared by all schemes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    /// `errors[receiver][source]`: some estimate of `source`'s messages at `receiver` was wrong.
    pub errors: [[bool; 3]; 3],
    /// Failed decisions per receiver, split by which index was wrong.
    pub events: [EventCounts; 3],
    /// Decisions that ended in a tie.
    pub ties: u64,
}

impl TrialOutcome {
    pub fn any(&self) -> bool {
        self.errors.iter().flatten().any(|&e| e)
    }

    /// Folds one decision at `receiver` about `(sources.0, sources.1)` into the summary.
    pub(crate) fn record(&mut self, receiver: usize, sources: (usize, usize), d: &MacDecision, truth: (usize, usize)) {
        if d.tie {
            self.ties += 1;
        }
        if let Some(e) = PairError::classify(d, truth) {
            self.events[receiver].record(e);
            if matches!(e, PairError::First | PairError::Both) {
                self.errors[receiver][sources.0] = true;
            }
            if matches!(e, PairError::Second | PairError::Both) {
                self.errors[receiver][sources.1] = true;
            }
        }
    }
}

/// Incumbent of an exhaustive minimization with exact tie tracking.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Best {
    pair: (usize, usize),
    cost: f64,
    tie: bool,
    rival: Option<(usize, usize)>,
    found: bool,
}

impl Best {
    pub(crate) fn new() -> Best {
        Best {
            pair: (0, 0),
            cost: f64::INFINITY,
            tie: false,
            rival: None,
            found: false,
        }
    }

    /// Candidates whose partial cost exceeds this can be dropped.
    #[inline]
    pub(crate) fn bound(&self) -> f64 {
        self.cost
    }

    #[inline]
    pub(crate) fn offer(&mut self, pair: (usize, usize), cost: f64) {
        if !self.found || cost < self.cost {
            *self = Best {
                pair,
                cost,
                tie: false,
                rival: None,
                found: true,
            };
        } else if cost == self.cost && pair != self.pair {
            self.tie = true;
            let (win, lose) = if pair < self.pair { (pair, self.pair) } else { (self.pair, pair) };
            self.pair = win;
            self.rival = Some(lose);
        }
    }

    pub(crate) fn finish(self) -> MacDecision {
        MacDecision {
            pair: self.pair,
            metric: self.cost,
            tie: self.tie,
            rival: self.rival,
        }
    }
}
