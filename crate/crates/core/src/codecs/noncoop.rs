//! One-shot scheme without cooperation: every node sends one codeword, every
//! receiver decodes the other two jointly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{decode_mac_awgn, decode_mac_ff, CodecError, FfCodebook, GaussianCodebook, MacDecision, TrialOutcome};
use crate::channels::{awgn_transmit, ff_transmit, others, AwgnChannelSpec, ChannelSpec, FfChannelSpec};
use crate::rng::{Purpose, StreamKey};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoncoopOutcome {
    pub messages: [usize; 3],
    /// `decisions[k]` estimates the messages of `others(k)`.
    pub decisions: [MacDecision; 3],
    pub realized_rates: [f64; 3],
}

impl NoncoopOutcome {
    pub fn outcome(&self) -> TrialOutcome {
        let mut out = TrialOutcome::default();
        for k in 0..3 {
            let [i, j] = others(k);
            out.record(k, (i, j), &self.decisions[k], (self.messages[i], self.messages[j]));
        }
        out
    }
}

fn check(n: usize, sizes: [usize; 3]) -> Result<(), CodecError> {
    if n == 0 {
        return Err(CodecError::ZeroLength);
    }
    if sizes.contains(&0) {
        return Err(CodecError::EmptyCodebook);
    }
    Ok(())
}

fn draw_messages(sizes: [usize; 3], key: StreamKey) -> [usize; 3] {
    let mut rng = key.purpose(Purpose::Messages).rng();
    sizes.map(|m| rng.random_range(0..m))
}

fn realized(n: usize, sizes: [usize; 3]) -> [f64; 3] {
    sizes.map(|m| (m as f64).log2() / n as f64)
}

/// Runs one trial on either channel model; `key` is the trial's root stream.
pub fn run_noncoop(ch: &ChannelSpec, n: usize, sizes: [usize; 3], key: StreamKey) -> Result<NoncoopOutcome, CodecError> {
    match ch {
        ChannelSpec::Ff(c) => run_noncoop_ff(c, n, sizes, key),
        ChannelSpec::Awgn(c) => run_noncoop_awgn(c, n, sizes, key),
    }
}

pub fn run_noncoop_ff(ch: &FfChannelSpec, n: usize, sizes: [usize; 3], key: StreamKey) -> Result<NoncoopOutcome, CodecError> {
    check(n, sizes)?;
    let books_key = key.purpose(Purpose::Codebook);
    let books = [0, 1, 2].map(|i| FfCodebook::random(ch.field(), sizes[i], n, books_key.with(i as u64)));
    let messages = draw_messages(sizes, key);
    let x = [0, 1, 2].map(|i| books[i].codeword(messages[i]));
    let y = ff_transmit(ch, x, &mut key.purpose(Purpose::Channel).rng())?;
    let mut decisions = Vec::with_capacity(3);
    for k in 0..3 {
        let [i, j] = others(k);
        decisions.push(decode_mac_ff(ch, k, [&books[i], &books[j]], &y[k])?);
    }
    Ok(NoncoopOutcome {
        messages,
        decisions: decisions.try_into().expect("three receivers"),
        realized_rates: realized(n, sizes),
    })
}

pub fn run_noncoop_awgn(ch: &AwgnChannelSpec, n: usize, sizes: [usize; 3], key: StreamKey) -> Result<NoncoopOutcome, CodecError> {
    check(n, sizes)?;
    let books_key = key.purpose(Purpose::Codebook);
    let books = [0, 1, 2].map(|i| GaussianCodebook::random(sizes[i], n, ch.power(i), books_key.with(i as u64)));
    let messages = draw_messages(sizes, key);
    let x = [0, 1, 2].map(|i| books[i].codeword(messages[i]));
    let obs = awgn_transmit(ch, x, &mut key.purpose(Purpose::Channel).rng(), None)?;
    let mut decisions = Vec::with_capacity(3);
    for k in 0..3 {
        let [i, j] = others(k);
        decisions.push(decode_mac_awgn(ch, &obs[k], [&books[i], &books[j]])?);
    }
    Ok(NoncoopOutcome {
        messages,
        decisions: decisions.try_into().expect("three receivers"),
        realized_rates: realized(n, sizes),
    })
}
