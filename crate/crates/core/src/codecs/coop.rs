//! Block-Markov cooperation through a relaying node with a network-coded index.
//!
//! Node 0 is the relay. The engine relabels a reciprocal channel so that the
//! relay has the two strongest links before calling [`run_coop`].
//!
//! | block        | 1          | 2                    | ... | B+1                  |
//! |--------------|------------|----------------------|-----|----------------------|
//! | node 0 sends | `X0(0, 0)` | `X0(w0(1), s(1))`    |     | `X0(w0(B), s(B))`    |
//! | node 1 sends | `X1(w1(1))`| `X1(w1(2))`          |     | `X1(0)`              |
//! | node 2 sends | `X2(w2(1))`| `X2(w2(2))`          |     | `X2(0)`              |
//!
//! where `s(b)` is the modulo sum of node 0's *estimates* of `w1(b)` and
//! `w2(b)`. Node 0 decodes forwards at the end of blocks `1..=B`; nodes 1 and
//! 2 decode backwards from block `B` to `1`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mac::decode_mac_awgn;
use super::{nc_modsum, Best, CodecError, GaussianCodebook, MacDecision, PairError, RelayCodebook, TrialOutcome};
use crate::channels::{awgn_transmit, AwgnChannelSpec, ReceiverObservation};
use crate::regions::{reciprocal_order, superposition_rates};
use crate::rng::{Purpose, StreamKey};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoopScheme {
    DoubleIndex,
    /// The relay's own message gets power share `alpha`.
    Superposition { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoopParams {
    /// Channel uses per block.
    pub n: usize,
    /// Messages per node per block.
    pub size: usize,
    /// Message blocks; the protocol uses one more.
    pub blocks: usize,
    pub scheme: CoopScheme,
}

impl CoopParams {
    fn validate(&self) -> Result<(), CodecError> {
        if self.n == 0 {
            return Err(CodecError::ZeroLength);
        }
        if self.size == 0 {
            return Err(CodecError::EmptyCodebook);
        }
        if self.blocks == 0 {
            return Err(CodecError::NoBlocks);
        }
        if let CoopScheme::Superposition { alpha } = self.scheme {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(CodecError::InvalidAlpha(alpha));
            }
        }
        Ok(())
    }

    pub fn realized_rate(&self) -> f64 {
        (self.size as f64).log2() / self.n as f64
    }
}

/// Messages of every node for blocks `0..=B+1`; both end blocks carry the dummy 0.
///
/// Node 0's message `b` goes out in block `b + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageSet {
    size: usize,
    w: [Vec<usize>; 3],
}

impl MessageSet {
    pub fn draw(size: usize, blocks: usize, key: StreamKey) -> MessageSet {
        let mut rng = key.purpose(Purpose::Messages).rng();
        let mut w: [Vec<usize>; 3] = Default::default();
        for v in &mut w {
            v.resize(blocks + 2, 0);
        }
        for b in 1..=blocks {
            for v in &mut w {
                v[b] = rng.random_range(0..size);
            }
        }
        MessageSet { size, w }
    }

    pub fn get(&self, node: usize, block: usize) -> usize {
        self.w[node][block]
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn blocks(&self) -> usize {
        self.w[0].len() - 2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockRecord {
    pub block: usize,
    /// `(own, network-coded)` index of the relay codeword.
    pub relay_sent: (usize, usize),
    /// Messages sent by nodes 1 and 2.
    pub peer_sent: [usize; 2],
    pub observations: [ReceiverObservation; 3],
}

/// Node 0's estimate of `(w1(b), w2(b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelayEstimate {
    pub block: usize,
    pub decision: MacDecision,
    pub truth: (usize, usize),
}

/// Node 1's or node 2's estimate of `(w0(b), w_peer(b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackwardEstimate {
    pub node: usize,
    pub block: usize,
    pub decision: MacDecision,
    pub truth: (usize, usize),
    pub event: Option<PairError>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeStep {
    pub node: usize,
    pub block: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolTrace {
    pub params: CoopParams,
    pub messages: MessageSet,
    pub blocks: Vec<BlockRecord>,
    pub relay: Vec<RelayEstimate>,
    pub backward: Vec<BackwardEstimate>,
    /// Every decoding step in the order it ran.
    pub order: Vec<DecodeStep>,
    /// `sum |x|^2` per node over all blocks.
    pub energy: [f64; 3],
}

impl ProtocolTrace {
    pub fn outcome(&self) -> TrialOutcome {
        let mut out = TrialOutcome::default();
        for r in &self.relay {
            out.record(0, (1, 2), &r.decision, r.truth);
        }
        for e in &self.backward {
            out.record(e.node, (0, 3 - e.node), &e.decision, e.truth);
        }
        out
    }

    /// Average power per node over the `n (B + 1)` symbols sent.
    pub fn avg_power(&self) -> [f64; 3] {
        let symbols = (self.params.n * self.blocks.len()) as f64;
        self.energy.map(|e| e / symbols)
    }
}

/// Codebooks of one block.
pub(crate) struct BlockBooks {
    pub(crate) peers: [GaussianCodebook; 2],
    pub(crate) relay: RelayCodebook,
}

pub(crate) fn block_books(ch: &AwgnChannelSpec, p: &CoopParams, key: StreamKey, block: usize) -> BlockBooks {
    let ck = key.purpose(Purpose::Codebook).with(block as u64);
    let peers = [1, 2].map(|i| GaussianCodebook::random(p.size, p.n, ch.power(i), ck.with(i as u64)));
    let relay = match p.scheme {
        CoopScheme::DoubleIndex => RelayCodebook::double_index(p.size, p.n, ch.power(0), ck.with(0)),
        CoopScheme::Superposition { alpha } => RelayCodebook::superposition(
            p.size,
            p.n,
            ch.power(0),
            alpha,
            key.purpose(Purpose::CodebookU).with(block as u64),
            key.purpose(Purpose::CodebookV).with(block as u64),
        ),
    };
    BlockBooks { peers, relay }
}

/// Runs the full protocol for one trial; `key` is the trial's root stream.
pub fn run_coop(ch: &AwgnChannelSpec, params: &CoopParams, key: StreamKey) -> Result<ProtocolTrace, CodecError> {
    params.validate()?;
    let (m, nb) = (params.size, params.blocks);
    let messages = MessageSet::draw(m, nb, key);
    let books: Vec<BlockBooks> = (1..=nb + 1).map(|b| block_books(ch, params, key, b)).collect();
    let chan = key.purpose(Purpose::Channel);

    let mut blocks = Vec::with_capacity(nb + 1);
    let mut relay = Vec::with_capacity(nb);
    let mut order = Vec::with_capacity(3 * nb);
    let mut energy = [0.0; 3];
    let mut coded = 0;
    for b in 1..=nb + 1 {
        let bk = &books[b - 1];
        let relay_sent = (messages.get(0, b - 1), coded);
        let peer_sent = [messages.get(1, b), messages.get(2, b)];
        let x0 = bk.relay.codeword(relay_sent.0, relay_sent.1);
        let x = [&x0[..], bk.peers[0].codeword(peer_sent[0]), bk.peers[1].codeword(peer_sent[1])];
        for (e, xi) in energy.iter_mut().zip(x) {
            *e += xi.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        let observations = awgn_transmit(ch, x, &mut chan.with(b as u64).rng(), None)?;
        if b <= nb {
            let decision = decode_mac_awgn(ch, &observations[0], [&bk.peers[0], &bk.peers[1]])?;
            coded = nc_modsum(decision.pair.0, decision.pair.1, m)?;
            relay.push(RelayEstimate {
                block: b,
                decision,
                truth: (peer_sent[0], peer_sent[1]),
            });
            order.push(DecodeStep { node: 0, block: b });
        }
        blocks.push(BlockRecord {
            block: b,
            relay_sent,
            peer_sent,
            observations,
        });
    }

    let mut backward = Vec::with_capacity(2 * nb);
    // Each node's estimate of its peer's message one block ahead; block B+1 is the dummy.
    let mut ahead = [0usize; 2];
    for b in (1..=nb).rev() {
        let own = [messages.get(1, b), messages.get(2, b)];
        let decisions = backward_step(ch, params, &books, &blocks, b, own, ahead);
        for (slot, d) in decisions.iter().enumerate() {
            let node = slot + 1;
            let truth = (messages.get(0, b), messages.get(3 - node, b));
            backward.push(BackwardEstimate {
                node,
                block: b,
                decision: *d,
                truth,
                event: PairError::classify(d, truth),
            });
            order.push(DecodeStep { node, block: b });
            ahead[slot] = d.pair.1;
        }
    }

    Ok(ProtocolTrace {
        params: *params,
        messages,
        blocks,
        relay,
        backward,
        order,
        energy,
    })
}

/// What one backward decoder needs for block `b`.
struct BackwardState {
    own: usize,
    /// Block `b+1` output minus the peer's (already decoded) codeword.
    r_next: Vec<Complex64>,
    h_relay_next: Vec<Complex64>,
    inv_noise: f64,
    /// Block `b` cost of each peer hypothesis `q`.
    current: Vec<f64>,
    best: Best,
}

impl BackwardState {
    fn new(
        ch: &AwgnChannelSpec,
        node: usize,
        own: usize,
        peer_ahead: usize,
        cur: (&ReceiverObservation, &BlockBooks, Option<&[Complex64]>),
        next: (&ReceiverObservation, &BlockBooks),
    ) -> BackwardState {
        let peer = 3 - node;
        let noise = ch.noise_power(node);

        let (obs_next, books_next) = next;
        let hp = obs_next.coefficients(ch, peer);
        let xp = books_next.peers[peer - 1].codeword(peer_ahead);
        let r_next = obs_next.y.iter().zip(hp.iter().zip(xp)).map(|(y, (h, x))| y - h * x).collect();

        let (obs_cur, books_cur, known_relay) = cur;
        let h0 = obs_cur.coefficients(ch, 0);
        let hp = obs_cur.coefficients(ch, peer);
        // The relay's block-b codeword is unknown unless it is the block-1 dummy;
        // otherwise it acts as extra Gaussian noise.
        let (r_cur, var): (Vec<Complex64>, f64) = match known_relay {
            Some(x0) => (obs_cur.y.iter().zip(h0.iter().zip(x0)).map(|(y, (h, x))| y - h * x).collect(), noise),
            None => (obs_cur.y.clone(), noise + ch.gain_magnitude(0, node).powi(2) * ch.power(0)),
        };
        let book = &books_cur.peers[peer - 1];
        let current = (0..book.len())
            .map(|q| {
                let x = book.codeword(q);
                (0..r_cur.len()).map(|t| (r_cur[t] - hp[t] * x[t]).norm_sqr()).sum::<f64>() / var
            })
            .collect();

        BackwardState {
            own,
            r_next,
            h_relay_next: obs_next.coefficients(ch, 0),
            inv_noise: 1.0 / noise,
            current,
            best: Best::new(),
        }
    }

    #[inline]
    fn letter(&self, t: usize, x: Complex64) -> f64 {
        self.inv_noise * (self.r_next[t] - self.h_relay_next[t] * x).norm_sqr()
    }
}

/// Two-block ML decoding of `(w0(b), w_peer(b))` at nodes 1 and 2.
///
/// Hypothesis `(p, q)` at node `k` means the relay sent `X0(p, own + q)` in
/// block `b+1` and the peer sent `q` in block `b`. Both nodes share one pass
/// over the relay codebook; letters are drawn only while some node still
/// needs them.
fn backward_step(
    ch: &AwgnChannelSpec,
    params: &CoopParams,
    books: &[BlockBooks],
    blocks: &[BlockRecord],
    b: usize,
    own: [usize; 2],
    ahead: [usize; 2],
) -> [MacDecision; 2] {
    let m = params.size;
    let (cur_books, next_books) = (&books[b - 1], &books[b]);
    let dummy = (b == 1).then(|| cur_books.relay.codeword(0, 0));
    let mut st = [1usize, 2].map(|node| {
        BackwardState::new(
            ch,
            node,
            own[node - 1],
            ahead[node - 1],
            (&blocks[b - 1].observations[node], cur_books, dummy.as_deref()),
            (&blocks[b].observations[node], next_books),
        )
    });
    let relay = &next_books.relay;

    // First incumbent: the likeliest q from block b alone, every p with it.
    for s in st.iter_mut() {
        let q = (0..m).min_by(|&a, &c| s.current[a].total_cmp(&s.current[c])).unwrap_or(0);
        let c = (s.own + q) % m;
        for p in 0..m {
            let mut acc = s.current[q];
            for (t, x) in relay.letters(p, c).enumerate() {
                acc += s.letter(t, x);
            }
            s.best.offer((p, q), acc);
        }
    }

    for p in 0..m {
        for c in 0..m {
            let q = [0, 1].map(|k| (c + m - st[k].own) % m);
            let mut acc = [0, 1].map(|k| st[k].current[q[k]]);
            let mut live = [0, 1].map(|k| acc[k] <= st[k].best.bound());
            if !live[0] && !live[1] {
                continue;
            }
            for (t, x) in relay.letters(p, c).enumerate() {
                for k in 0..2 {
                    if live[k] {
                        acc[k] += st[k].letter(t, x);
                        live[k] = acc[k] <= st[k].best.bound();
                    }
                }
                if !live[0] && !live[1] {
                    break;
                }
            }
            for k in 0..2 {
                if live[k] {
                    st[k].best.offer((p, q[k]), acc[k]);
                }
            }
        }
    }
    st.map(|s| s.best.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateBound {
    pub label: String,
    /// Upper limit on the equal rate, in bits per channel use.
    pub bits: f64,
}

/// Every rate condition of the scheme on a reciprocal channel; the smallest is
/// the equal rate the scheme supports. Labels use the relabeled order in
/// which node 1 (1-based) relays and `g23 <= g12 <= g13`.
pub fn coop_rate_bounds(ch: &AwgnChannelSpec, scheme: CoopScheme) -> Result<Vec<RateBound>, CodecError> {
    let o = reciprocal_order(ch)?;
    let (g12, g13, g23) = (o.g12, o.g13, o.g23);
    let b = |label: &str, bits: f64| RateBound {
        label: label.to_string(),
        bits,
    };
    let mut out = vec![
        b("node1: R<log2(1+g12)", (1.0 + g12).log2()),
        b("node1: R<log2(1+g13)", (1.0 + g13).log2()),
        b("node1: 2R<log2(1+g12+g13)", 0.5 * (1.0 + g12 + g13).log2()),
    ];
    match scheme {
        CoopScheme::DoubleIndex => {
            out.push(b("node2: R<log2(1+g12)", (1.0 + g12).log2()));
            out.push(b("node2: 2R<log2(1+g12+g23)", 0.5 * (1.0 + g12 + g23).log2()));
            out.push(b("node3: R<log2(1+g13)", (1.0 + g13).log2()));
            out.push(b("node3: 2R<log2(1+g13+g23)", 0.5 * (1.0 + g13 + g23).log2()));
        }
        CoopScheme::Superposition { alpha } => {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(CodecError::InvalidAlpha(alpha));
            }
            for (node, g) in [("node2", g12), ("node3", g13)] {
                let s = superposition_rates(g, g23, alpha)?;
                out.push(b(&format!("{node}: R<R'(alpha)"), s.r_prime));
                out.push(b(&format!("{node}: R<R''(alpha)"), s.r_dblprime));
                out.push(b(&format!("{node}: 2R<log2(1+g1k+g23)"), 0.5 * s.sum_bound));
            }
        }
    }
    Ok(out)
}

/// The smallest of [`coop_rate_bounds`].
pub fn coop_rate(ch: &AwgnChannelSpec, scheme: CoopScheme) -> Result<f64, CodecError> {
    Ok(coop_rate_bounds(ch, scheme)?.iter().map(|r| r.bits).fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::avg_power;
    use crate::regions::{optimal_alpha, r_triple_prime, RegionError};
    use approx::assert_abs_diff_eq;

    fn example() -> AwgnChannelSpec {
        AwgnChannelSpec::reciprocal(6.0, 8.0, 1.0).unwrap()
    }

    fn params(n: usize, size: usize, blocks: usize) -> CoopParams {
        CoopParams {
            n,
            size,
            blocks,
            scheme: CoopScheme::DoubleIndex,
        }
    }

    #[test]
    fn single_message_is_dummy_traffic() {
        for blocks in [1, 3] {
            let t = run_coop(&example(), &params(4, 1, blocks), StreamKey::new(1)).unwrap();
            assert!(!t.outcome().any());
            assert_eq!(t.blocks.len(), blocks + 1);
            for r in &t.blocks {
                assert_eq!((r.relay_sent, r.peer_sent), ((0, 0), [0, 0]));
            }
        }
    }

    #[test]
    fn one_block_protocol() {
        let t = run_coop(&example(), &params(8, 4, 1), StreamKey::new(2)).unwrap();
        assert_eq!(t.blocks.len(), 2);
        assert_eq!(t.relay.len(), 1);
        assert_eq!(t.backward.iter().map(|e| (e.node, e.block)).collect::<Vec<_>>(), vec![(1, 1), (2, 1)]);
        // Block 2 carries the relay's block-1 information and dummy peer codewords.
        assert_eq!(t.blocks[1].peer_sent, [0, 0]);
        assert_eq!(t.blocks[1].relay_sent.0, t.messages.get(0, 1));
    }

    #[test]
    fn decode_order_follows_protocol() {
        let t = run_coop(&example(), &params(6, 4, 4), StreamKey::new(3)).unwrap();
        let order: Vec<_> = t.order.iter().map(|s| (s.node, s.block)).collect();
        let mut want: Vec<_> = (1..=4).map(|b| (0, b)).collect();
        for b in (1..=4).rev() {
            want.push((1, b));
            want.push((2, b));
        }
        assert_eq!(order, want);
    }

    #[test]
    fn relay_forwards_its_estimates() {
        let ch = AwgnChannelSpec::reciprocal(0.3, 0.3, 0.3).unwrap();
        let mut saw_error = false;
        for s in 0..40 {
            let t = run_coop(&ch, &params(3, 8, 2), StreamKey::new(s)).unwrap();
            for r in &t.relay {
                let sent = t.blocks[r.block].relay_sent.1;
                assert_eq!(sent, nc_modsum(r.decision.pair.0, r.decision.pair.1, 8).unwrap());
                saw_error |= r.decision.pair != r.truth;
            }
        }
        assert!(saw_error, "low SNR should produce some relay errors");
    }

    #[test]
    fn regenerates_identically() {
        for scheme in [CoopScheme::DoubleIndex, CoopScheme::Superposition { alpha: 0.4 }] {
            let p = CoopParams { scheme, ..params(5, 8, 3) };
            let a = run_coop(&example(), &p, StreamKey::new(9)).unwrap();
            let b = run_coop(&example(), &p, StreamKey::new(9)).unwrap();
            assert_eq!(a, b);
            let c = run_coop(&example(), &p, StreamKey::new(10)).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn events_sum_to_failures() {
        let ch = AwgnChannelSpec::reciprocal(1.0, 1.5, 0.5).unwrap();
        let mut total = 0;
        for s in 0..30 {
            let t = run_coop(&ch, &params(4, 16, 3), StreamKey::new(s)).unwrap();
            let o = t.outcome();
            for node in 1..3 {
                let failed = t
                    .backward
                    .iter()
                    .filter(|e| e.node == node && (e.decision.pair != e.truth || e.decision.tie))
                    .count() as u64;
                assert_eq!(o.events[node].total(), failed);
                assert_eq!(
                    t.backward.iter().filter(|e| e.node == node && e.event.is_some()).count() as u64,
                    failed
                );
            }
            total += o.events[1].total() + o.events[2].total();
        }
        assert!(total > 0);
    }

    #[test]
    fn backward_decoder_is_exhaustive_ml() {
        // Recompute the two-block metric for every hypothesis straight from the trace.
        let ch = AwgnChannelSpec::reciprocal(2.0, 3.0, 0.7).unwrap();
        for scheme in [CoopScheme::DoubleIndex, CoopScheme::Superposition { alpha: 0.5 }] {
            for s in 0..8 {
                let p = CoopParams { scheme, ..params(4, 5, 2) };
                let key = StreamKey::new(50 + s);
                let t = run_coop(&ch, &p, key).unwrap();
                let books: Vec<_> = (1..=3).map(|b| block_books(&ch, &p, key, b)).collect();
                let mut ahead = [0usize; 2];
                for b in (1..=2).rev() {
                    for node in [1usize, 2] {
                        let peer = 3 - node;
                        let own = t.messages.get(node, b);
                        let (oc, on) = (&t.blocks[b - 1].observations[node], &t.blocks[b].observations[node]);
                        let nz = ch.noise_power(node);
                        let var = if b == 1 { nz } else { nz + ch.gain_magnitude(0, node).powi(2) * ch.power(0) };
                        let dummy = books[0].relay.codeword(0, 0);
                        let mut best = (f64::INFINITY, (0, 0));
                        for pp in 0..5 {
                            for q in 0..5 {
                                let x0n = books[b].relay.codeword(pp, (own + q) % 5);
                                let xpn = books[b].peers[peer - 1].codeword(ahead[node - 1]);
                                let xpc = books[b - 1].peers[peer - 1].codeword(q);
                                let (h0n, hpn) = (on.coefficients(&ch, 0), on.coefficients(&ch, peer));
                                let (h0c, hpc) = (oc.coefficients(&ch, 0), oc.coefficients(&ch, peer));
                                let mut cost = 0.0;
                                for tt in 0..4 {
                                    cost += (on.y[tt] - h0n[tt] * x0n[tt] - hpn[tt] * xpn[tt]).norm_sqr() / nz;
                                    let known = if b == 1 { h0c[tt] * dummy[tt] } else { Complex64::new(0.0, 0.0) };
                                    cost += (oc.y[tt] - known - hpc[tt] * xpc[tt]).norm_sqr() / var;
                                }
                                if cost < best.0 {
                                    best = (cost, (pp, q));
                                }
                            }
                        }
                        let e = t.backward.iter().find(|e| e.node == node && e.block == b).unwrap();
                        assert_eq!(e.decision.pair, best.1);
                        assert!((e.decision.metric - best.0).abs() < 1e-9 * best.0.max(1.0));
                    }
                    for node in [1usize, 2] {
                        ahead[node - 1] = t.backward.iter().find(|e| e.node == node && e.block == b).unwrap().decision.pair.1;
                    }
                }
            }
        }
    }

    #[test]
    fn average_power_matches_budget() {
        let ch = AwgnChannelSpec::new([[0.0, 6.0, 8.0], [6.0, 0.0, 1.0], [8.0, 1.0, 0.0]], [2.0, 1.0, 0.5], [1.0; 3]).unwrap();
        for scheme in [CoopScheme::DoubleIndex, CoopScheme::Superposition { alpha: 0.3 }] {
            let p = CoopParams { scheme, ..params(2500, 2, 3) };
            let t = run_coop(&ch, &p, StreamKey::new(4)).unwrap();
            for (i, pw) in t.avg_power().iter().enumerate() {
                assert!((pw - ch.power(i)).abs() <= 0.05 * ch.power(i), "node {i}: {pw}");
            }
            let x = t.blocks[1].observations[0].y.clone();
            assert!(avg_power(&x).unwrap() > 0.0);
        }
    }

    #[test]
    fn worked_example_low_rate_is_reliable() {
        // Equal rate 0.5 at n = 12, well below the scheme's 1.5 bits.
        let p = params(12, 64, 4);
        let errs = (0..200).filter(|&s| run_coop(&example(), &p, StreamKey::new(s)).unwrap().outcome().any()).count();
        assert!(errs <= 20, "{errs}/200");
    }

    #[test]
    fn rejects_bad_parameters() {
        let ch = example();
        assert_eq!(run_coop(&ch, &params(0, 2, 1), StreamKey::new(0)), Err(CodecError::ZeroLength));
        assert_eq!(run_coop(&ch, &params(2, 0, 1), StreamKey::new(0)), Err(CodecError::EmptyCodebook));
        assert_eq!(run_coop(&ch, &params(2, 2, 0), StreamKey::new(0)), Err(CodecError::NoBlocks));
        let p = CoopParams {
            scheme: CoopScheme::Superposition { alpha: 1.2 },
            ..params(2, 2, 1)
        };
        assert_eq!(run_coop(&ch, &p, StreamKey::new(0)), Err(CodecError::InvalidAlpha(1.2)));
    }

    #[test]
    fn rate_bounds_worked_example() {
        let bounds = coop_rate_bounds(&example(), CoopScheme::DoubleIndex).unwrap();
        let mut values: Vec<f64> = bounds.iter().map(|r| r.bits).collect();
        values.sort_by(f64::total_cmp);
        values.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mut want = vec![7f64.log2(), 9f64.log2(), 0.5 * 15f64.log2(), 0.5 * 8f64.log2(), 0.5 * 10f64.log2()];
        want.sort_by(f64::total_cmp);
        assert_eq!(values.len(), want.len());
        for (a, b) in values.iter().zip(&want) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(coop_rate(&example(), CoopScheme::DoubleIndex).unwrap(), 1.5, epsilon = 1e-12);
        // The order of the node labels does not matter.
        let scrambled = AwgnChannelSpec::reciprocal(1.0, 6.0, 8.0).unwrap();
        assert_abs_diff_eq!(coop_rate(&scrambled, CoopScheme::DoubleIndex).unwrap(), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn rate_bounds_equal_gains() {
        for g in [0.1, 1.0, 7.5] {
            let ch = AwgnChannelSpec::reciprocal(g, g, g).unwrap();
            let r = coop_rate(&ch, CoopScheme::DoubleIndex).unwrap();
            assert_abs_diff_eq!(r, 0.5 * (1.0 + 2.0 * g).log2(), epsilon = 1e-12);
        }
    }

    #[test]
    fn rate_bounds_superposition() {
        let alpha = optimal_alpha(6.0, 1.0);
        let bounds = coop_rate_bounds(&example(), CoopScheme::Superposition { alpha }).unwrap();
        let get = |l: &str| bounds.iter().find(|b| b.label == l).unwrap().bits;
        assert_abs_diff_eq!(get("node2: R<R'(alpha)"), r_triple_prime(6.0, 1.0), epsilon = 1e-9);
        assert_abs_diff_eq!(get("node2: R<R''(alpha)"), r_triple_prime(6.0, 1.0), epsilon = 1e-9);
        assert_abs_diff_eq!(coop_rate(&example(), CoopScheme::Superposition { alpha }).unwrap(), 1.5, epsilon = 1e-12);
        assert!(matches!(
            coop_rate_bounds(&example(), CoopScheme::Superposition { alpha: -0.1 }),
            Err(CodecError::InvalidAlpha(_))
        ));
        let asym = AwgnChannelSpec::from_snr([[0.0, 1.0, 2.0], [1.5, 0.0, 1.0], [2.0, 1.0, 0.0]]).unwrap();
        assert_eq!(
            coop_rate_bounds(&asym, CoopScheme::DoubleIndex),
            Err(CodecError::Region(RegionError::NotReciprocal))
        );
    }
}
