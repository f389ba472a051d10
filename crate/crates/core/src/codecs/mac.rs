//! Exhaustive ML decoders for one receiver's two-user multiple-access channel.
//!
//! Both searches visit every pair. Per-letter costs are non-negative, so a
//! pair is abandoned as soon as its running cost strictly exceeds the
//! incumbent; pairs that would tie always run to completion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Best, CodecError, FfCodebook, GaussianCodebook};
use crate::channels::{others, AwgnChannelSpec, FfChannelSpec, ReceiverObservation};
use crate::galois::FieldElement;

/// Outcome of a two-index ML search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacDecision {
    /// Estimated indices, ordered like the decoder's inputs.
    pub pair: (usize, usize),
    /// Cost of the chosen pair (lower is more likely); `inf` if every pair is impossible.
    pub metric: f64,
    /// Another pair reached exactly the same cost.
    pub tie: bool,
    /// One of the pairs that tied with `pair` and lost the tie-break.
    pub rival: Option<(usize, usize)>,
}

fn check_books(n: usize, lens: [(usize, usize); 2]) -> Result<(), CodecError> {
    for (size, len) in lens {
        if size == 0 {
            return Err(CodecError::EmptyCodebook);
        }
        if len != n {
            return Err(CodecError::LengthMismatch { expected: n, got: len });
        }
    }
    Ok(())
}

/// ML decoding at `receiver` of the finite-field channel. `books` belong to
/// the two other nodes in increasing order.
pub fn decode_mac_ff(
    ch: &FfChannelSpec,
    receiver: usize,
    books: [&FfCodebook; 2],
    y: &[FieldElement],
) -> Result<MacDecision, CodecError> {
    if receiver > 2 {
        return Err(CodecError::BadReceiver(receiver));
    }
    let n = y.len();
    check_books(n, books.map(|b| (b.len(), b.block_length())))?;
    let f = ch.field();
    let q = f.order() as usize;
    let [si, sj] = others(receiver);
    let (gi, gj) = (ch.gain(si, receiver), ch.gain(sj, receiver));

    let noise_cost: Vec<f64> = ch.noise(receiver).probs().iter().map(|&p| -p.log2()).collect();
    // y - g_i x_i(w), one row per message of the first sender.
    let residual: Vec<u32> = (0..books[0].len())
        .flat_map(|w| {
            let x = books[0].codeword(w);
            (0..n).map(move |t| f.sub(y[t], f.mul(gi, x[t])).value())
        })
        .collect();
    let faded: Vec<u32> = (0..books[1].len())
        .flat_map(|w| books[1].codeword(w).iter().map(move |&x| f.mul(gj, x).value()))
        .collect();

    let best = if q <= 256 {
        let mut table = vec![0.0; q * q];
        for r in 0..q {
            for s in 0..q {
                let z = f.sub(FieldElement::from_raw(r as u32), FieldElement::from_raw(s as u32));
                table[r * q + s] = noise_cost[z.value() as usize];
            }
        }
        search_ff(n, &residual, &faded, |r, s| table[r as usize * q + s as usize])
    } else {
        search_ff(n, &residual, &faded, |r, s| {
            noise_cost[f.sub(FieldElement::from_raw(r), FieldElement::from_raw(s)).value() as usize]
        })
    };
    Ok(best.finish())
}

fn search_ff(n: usize, residual: &[u32], faded: &[u32], cost: impl Fn(u32, u32) -> f64) -> Best {
    let mut best = Best::new();
    for (i, r) in residual.chunks_exact(n).enumerate() {
        'pair: for (j, s) in faded.chunks_exact(n).enumerate() {
            let mut acc = 0.0;
            for t in 0..n {
                acc += cost(r[t], s[t]);
                if acc > best.bound() {
                    continue 'pair;
                }
            }
            best.offer((i, j), acc);
        }
    }
    best
}

/// ML decoding of the phase-fading AWGN channel from one receiver's
/// observation and its own phase view.
pub fn decode_mac_awgn(
    ch: &AwgnChannelSpec,
    obs: &ReceiverObservation,
    books: [&GaussianCodebook; 2],
) -> Result<MacDecision, CodecError> {
    let n = obs.y.len();
    check_books(n, books.map(|b| (b.len(), b.block_length())))?;
    let k = obs.receiver();
    let [si, sj] = others(k);
    let hi = obs.coefficients(ch, si);
    let hj = obs.coefficients(ch, sj);
    let u = fade(books[0], &hi);
    let v = fade(books[1], &hj);
    Ok(search_awgn(&obs.y, &u, &v, 1.0 / ch.noise_power(k)).finish())
}

/// Row-major `h ⊙ x(w)` for every codeword.
pub(crate) fn fade(book: &GaussianCodebook, h: &[Complex64]) -> Vec<Complex64> {
    (0..book.len())
        .flat_map(|w| book.codeword(w).iter().zip(h).map(|(x, h)| h * x))
        .collect()
}

/// Minimizes `scale * sum_t |y - u_i - v_j|^2` over all `(i, j)`.
pub(crate) fn search_awgn(y: &[Complex64], u: &[Complex64], v: &[Complex64], scale: f64) -> Best {
    let n = y.len();
    let mut best = Best::new();
    let mut r = vec![Complex64::new(0.0, 0.0); n];

    // A cheap first incumbent: best first index with the second treated as
    // noise, then the best second index given it. Only speeds up pruning.
    let seed_i = u
        .chunks_exact(n)
        .map(|ui| ui.iter().zip(y).map(|(a, b)| (b - a).norm_sqr()).sum::<f64>())
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map_or(0, |(i, _)| i);
    for (rt, (yt, ut)) in r.iter_mut().zip(y.iter().zip(&u[seed_i * n..(seed_i + 1) * n])) {
        *rt = yt - ut;
    }
    for (j, vj) in v.chunks_exact(n).enumerate() {
        if let Some(c) = residual_cost(&r, vj, scale, best.bound()) {
            best.offer((seed_i, j), c);
        }
    }

    for (i, ui) in u.chunks_exact(n).enumerate() {
        for (rt, (yt, ut)) in r.iter_mut().zip(y.iter().zip(ui)) {
            *rt = yt - ut;
        }
        for (j, vj) in v.chunks_exact(n).enumerate() {
            if let Some(c) = residual_cost(&r, vj, scale, best.bound()) {
                best.offer((i, j), c);
            }
        }
    }
    best
}

/// `scale * sum_t |r - v|^2`, or `None` once it exceeds `bound`.
#[inline]
fn residual_cost(r: &[Complex64], v: &[Complex64], scale: f64, bound: f64) -> Option<f64> {
    let mut acc = 0.0;
    for (a, b) in r.iter().zip(v) {
        acc += scale * (a - b).norm_sqr();
        if acc > bound {
            return None;
        }
    }
    Some(acc)
}
