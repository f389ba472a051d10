//! The two three-way channel models and their samplers.
//!
//! Receiver `j` observes `Y_j = sum_{i != j} G_ij X_i + Z_j`.
//!
//! * Finite field: symbols, gains and noise live in GF(q); gains are fixed and
//!   nonzero, noise is i.i.d. from an arbitrary pmf per receiver.
//! * Phase-fading AWGN: `G_ij = |G_ij| e^{i theta_ij}` with a fresh uniform
//!   phase per link and channel use, known only at the receiving node, and
//!   circularly symmetric complex Gaussian noise of power `N_j`.
//!
//! AWGN links are parameterized by their received SNR `gamma_ij`; magnitudes
//! are derived as `|G_ij| = sqrt(gamma_ij N_j / P_i)`.
//!
//! Nodes are indexed `0..3` in code and printed as 1..3.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galois::{FieldElement, FieldError, FieldParams, FieldSpec};
use crate::info::{InfoError, Pmf};

const CLASSIFY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("input vectors have different lengths")]
    LengthMismatch,
    #[error("empty input")]
    EmptyInput,
    #[error("gain G{}{} must be a nonzero field element", .0 + 1, .1 + 1)]
    InvalidGain(usize, usize),
    #[error("SNR g{}{} must be positive and finite", .0 + 1, .1 + 1)]
    InvalidSnr(usize, usize),
    #[error("power and noise power values must be positive and finite")]
    InvalidPower,
    #[error("noise pmf for receiver {}: {}", .0 + 1, .1)]
    InvalidNoise(usize, InfoError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The other two nodes, in ascending order.
pub fn others(k: usize) -> [usize; 2] {
    match k {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CLASSIFY_TOL * 1f64.max(a.abs()).max(b.abs())
}

/// Finite-field three-way channel.
#[derive(Debug, Clone)]
pub struct FfChannelSpec {
    field: FieldSpec,
    gains: [[FieldElement; 3]; 3],
    noise: [Pmf; 3],
    samplers: [Option<WeightedIndex<f64>>; 3],
}

impl FfChannelSpec {
    /// `gains[i][j]` is the gain on link `i -> j`; the diagonal is ignored.
    pub fn new(field: FieldSpec, gains: [[u32; 3]; 3], noise: [Pmf; 3]) -> Result<Self, ChannelError> {
        let mut g = [[FieldElement::ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let e = field.element(gains[i][j]).map_err(|_| ChannelError::InvalidGain(i, j))?;
                if e.is_zero() {
                    return Err(ChannelError::InvalidGain(i, j));
                }
                g[i][j] = e;
            }
        }
        let q = field.order() as usize;
        for (k, p) in noise.iter().enumerate() {
            if p.len() != q {
                return Err(ChannelError::InvalidNoise(
                    k,
                    InfoError::AlphabetMismatch { expected: q, got: p.len() },
                ));
            }
        }
        let samplers = [0, 1, 2].map(|k| {
            let probs = noise[k].probs();
            // A point mass needs no sampler.
            if probs.iter().filter(|&&p| p > 0.0).count() == 1 {
                None
            } else {
                Some(WeightedIndex::new(probs.iter().copied()).expect("validated pmf"))
            }
        });
        Ok(FfChannelSpec {
            field,
            gains: g,
            noise,
            samplers,
        })
    }

    /// Every link with gain 1.
    pub fn unit_gains(field: FieldSpec, noise: [Pmf; 3]) -> Result<Self, ChannelError> {
        FfChannelSpec::new(field, [[1; 3]; 3], noise)
    }

    /// Unit gains and no noise.
    pub fn noiseless(field: FieldSpec) -> Self {
        let q = field.order() as usize;
        let z = Pmf::point(q, 0);
        FfChannelSpec::unit_gains(field, [z.clone(), z.clone(), z]).expect("valid by construction")
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn gain(&self, from: usize, to: usize) -> FieldElement {
        self.gains[from][to]
    }

    pub fn noise(&self, receiver: usize) -> &Pmf {
        &self.noise[receiver]
    }

    fn sample_noise<R: Rng + ?Sized>(&self, receiver: usize, rng: &mut R) -> FieldElement {
        match &self.samplers[receiver] {
            Some(s) => FieldElement::from_raw(s.sample(rng) as u32),
            None => {
                let at = self.noise[receiver].probs().iter().position(|&p| p > 0.0).unwrap_or(0);
                FieldElement::from_raw(at as u32)
            }
        }
    }
}

/// Sends one block over the finite-field channel. Noise for receiver `j` at use
/// `t` is the `t`-th draw for that receiver; receivers are sampled in order.
pub fn ff_transmit<R: Rng + ?Sized>(
    ch: &FfChannelSpec,
    x: [&[FieldElement]; 3],
    rng: &mut R,
) -> Result<[Vec<FieldElement>; 3], ChannelError> {
    let n = x[0].len();
    if x.iter().any(|v| v.len() != n) {
        return Err(ChannelError::LengthMismatch);
    }
    let f = &ch.field;
    let mut out: [Vec<FieldElement>; 3] = Default::default();
    for (j, y) in out.iter_mut().enumerate() {
        let [a, b] = others(j);
        *y = (0..n)
            .map(|t| {
                let s = f.add(f.mul(ch.gains[a][j], x[a][t]), f.mul(ch.gains[b][j], x[b][t]));
                f.add(s, ch.sample_noise(j, rng))
            })
            .collect();
    }
    Ok(out)
}

/// Phase-fading AWGN three-way channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AwgnChannelSpec {
    snr: [[f64; 3]; 3],
    powers: [f64; 3],
    noise_powers: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub sender_symmetrical: bool,
    pub reciprocal: bool,
}

impl AwgnChannelSpec {
    /// `snr[i][j]` is `gamma_ij` for link `i -> j`; the diagonal is ignored.
    pub fn new(snr: [[f64; 3]; 3], powers: [f64; 3], noise_powers: [f64; 3]) -> Result<Self, ChannelError> {
        let mut s = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let g = snr[i][j];
                    if !(g.is_finite() && g > 0.0) {
                        return Err(ChannelError::InvalidSnr(i, j));
                    }
                    s[i][j] = g;
                }
            }
        }
        if powers.iter().chain(&noise_powers).any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(ChannelError::InvalidPower);
        }
        Ok(AwgnChannelSpec {
            snr: s,
            powers,
            noise_powers,
        })
    }

    /// Unit transmit and noise powers.
    pub fn from_snr(snr: [[f64; 3]; 3]) -> Result<Self, ChannelError> {
        AwgnChannelSpec::new(snr, [1.0; 3], [1.0; 3])
    }

    /// A reciprocal channel from its three pair SNRs.
    pub fn reciprocal(g12: f64, g13: f64, g23: f64) -> Result<Self, ChannelError> {
        AwgnChannelSpec::from_snr([[0.0, g12, g13], [g12, 0.0, g23], [g13, g23, 0.0]])
    }

    /// A sender-symmetrical channel: every link into node `k` has SNR `into[k]`.
    pub fn sender_symmetrical(into: [f64; 3]) -> Result<Self, ChannelError> {
        let mut s = [[0.0; 3]; 3];
        for (k, &g) in into.iter().enumerate() {
            for i in others(k) {
                s[i][k] = g;
            }
        }
        AwgnChannelSpec::from_snr(s)
    }

    pub fn snr(&self, from: usize, to: usize) -> f64 {
        self.snr[from][to]
    }

    pub fn snr_matrix(&self) -> [[f64; 3]; 3] {
        self.snr
    }

    pub fn power(&self, node: usize) -> f64 {
        self.powers[node]
    }

    pub fn noise_power(&self, node: usize) -> f64 {
        self.noise_powers[node]
    }

    /// `|G_ij|`, chosen so the received SNR on `i -> j` is exactly `gamma_ij`.
    pub fn gain_magnitude(&self, from: usize, to: usize) -> f64 {
        if from == to {
            return 0.0;
        }
        (self.snr[from][to] * self.noise_powers[to] / self.powers[from]).sqrt()
    }

    pub fn classify(&self) -> Classification {
        let s = &self.snr;
        let sender_symmetrical = (0..3).all(|k| {
            let [i, j] = others(k);
            close(s[i][k], s[j][k])
        });
        let reciprocal = close(s[0][1], s[1][0]) && close(s[0][2], s[2][0]) && close(s[1][2], s[2][1]);
        Classification {
            sender_symmetrical,
            reciprocal,
        }
    }

    /// Relabels nodes: new node `a` is old node `perm[a]`.
    pub fn permuted(&self, perm: [usize; 3]) -> AwgnChannelSpec {
        let mut snr = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                snr[a][b] = self.snr[perm[a]][perm[b]];
            }
        }
        AwgnChannelSpec {
            snr,
            powers: perm.map(|p| self.powers[p]),
            noise_powers: perm.map(|p| self.noise_powers[p]),
        }
    }
}

/// Pins phases and/or noise in [`awgn_transmit`]. Test use only.
#[derive(Debug, Clone, Default)]
pub struct AwgnHook {
    /// `phases[i][j]` is used for link `i -> j` at every channel use.
    pub phases: Option<[[f64; 3]; 3]>,
    /// Noise added at each receiver, constant over the block.
    pub noise: Option<[Complex64; 3]>,
}

impl AwgnHook {
    pub fn silent() -> AwgnHook {
        AwgnHook {
            phases: Some([[0.0; 3]; 3]),
            noise: Some([Complex64::new(0.0, 0.0); 3]),
        }
    }
}

/// The phases seen by one receiver: `theta[s][t]` for sender `senders[s]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiverPhases {
    pub receiver: usize,
    pub senders: [usize; 2],
    pub theta: [Vec<f64>; 2],
}

/// All phases of one block, `theta_ij[t]`, handed out per receiver only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRealization {
    views: [ReceiverPhases; 3],
}

impl PhaseRealization {
    pub fn view(&self, receiver: usize) -> &ReceiverPhases {
        &self.views[receiver]
    }

    pub fn into_views(self) -> [ReceiverPhases; 3] {
        self.views
    }

    pub fn all_phases(&self) -> impl Iterator<Item = f64> + '_ {
        self.views.iter().flat_map(|v| v.theta.iter().flatten().copied())
    }
}

/// What receiver `k` has after one block: its output and its own phase view.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiverObservation {
    pub y: Vec<Complex64>,
    pub phases: ReceiverPhases,
}

impl ReceiverObservation {
    pub fn receiver(&self) -> usize {
        self.phases.receiver
    }

    /// Effective coefficients `|G_ik| e^{i theta_ik[t]}` for one of the two senders.
    pub fn coefficients(&self, ch: &AwgnChannelSpec, sender: usize) -> Vec<Complex64> {
        let k = self.phases.receiver;
        let s = self
            .phases
            .senders
            .iter()
            .position(|&x| x == sender)
            .expect("sender must be one of the receiver's two peers");
        let mag = ch.gain_magnitude(sender, k);
        self.phases.theta[s].iter().map(|&th| Complex64::from_polar(mag, th)).collect()
    }
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Sends one block over the phase-fading AWGN channel.
///
/// For each receiver in turn, the phases from its two senders are drawn
/// (lower sender index first, all `n` uses), then its `n` noise samples.
pub fn awgn_transmit<R: Rng + ?Sized>(
    ch: &AwgnChannelSpec,
    x: [&[Complex64]; 3],
    rng: &mut R,
    hook: Option<&AwgnHook>,
) -> Result<[ReceiverObservation; 3], ChannelError> {
    let n = x[0].len();
    if x.iter().any(|v| v.len() != n) {
        return Err(ChannelError::LengthMismatch);
    }
    let obs = [0usize, 1, 2].map(|k| {
        let senders = others(k);
        let theta = senders.map(|i| match hook.and_then(|h| h.phases) {
            Some(ph) => vec![ph[i][k]; n],
            None => (0..n).map(|_| rng.random::<f64>() * TAU).collect(),
        });
        let noise: Vec<Complex64> = match hook.and_then(|h| h.noise) {
            Some(z) => vec![z[k]; n],
            None => (0..n).map(|_| complex_gaussian(rng, ch.noise_power(k))).collect(),
        };
        let g = senders.map(|i| ch.gain_magnitude(i, k));
        let y = (0..n)
            .map(|t| {
                Complex64::from_polar(g[0], theta[0][t]) * x[senders[0]][t]
                    + Complex64::from_polar(g[1], theta[1][t]) * x[senders[1]][t]
                    + noise[t]
            })
            .collect();
        ReceiverObservation {
            y,
            phases: ReceiverPhases {
                receiver: k,
                senders,
                theta,
            },
        }
    });
    Ok(obs)
}

/// Joins three observations' phase views back into one realization.
pub fn phase_realization(obs: &[ReceiverObservation; 3]) -> PhaseRealization {
    PhaseRealization {
        views: [0, 1, 2].map(|k| obs[k].phases.clone()),
    }
}

/// `(1/n) sum |x[t]|^2`.
pub fn avg_power(x: &[Complex64]) -> Result<f64, ChannelError> {
    if x.is_empty() {
        return Err(ChannelError::EmptyInput);
    }
    Ok(x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64)
}

/// Channel description as it appears in JSON config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ChannelConfig {
    Ff {
        field: FieldParams,
        gains: [[Option<u32>; 3]; 3],
        noise_pmfs: [Vec<f64>; 3],
    },
    Awgn {
        snr: [[Option<f64>; 3]; 3],
        #[serde(default = "unit_triple")]
        powers: [f64; 3],
        #[serde(default = "unit_triple")]
        noise_powers: [f64; 3],
    },
}

fn unit_triple() -> [f64; 3] {
    [1.0; 3]
}

/// A validated channel of either model.
#[derive(Debug, Clone)]
pub enum ChannelSpec {
    Ff(FfChannelSpec),
    Awgn(AwgnChannelSpec),
}

impl ChannelConfig {
    pub fn build(&self) -> Result<ChannelSpec, ChannelError> {
        match self {
            ChannelConfig::Ff {
                field,
                gains,
                noise_pmfs,
            } => {
                let f = FieldSpec::from_params(*field)?;
                let mut g = [[0u32; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        if i != j {
                            g[i][j] = gains[i][j].ok_or(ChannelError::InvalidGain(i, j))?;
                        }
                    }
                }
                let mut pmfs = Vec::with_capacity(3);
                for (k, p) in noise_pmfs.iter().enumerate() {
                    pmfs.push(Pmf::new(p.clone()).map_err(|e| ChannelError::InvalidNoise(k, e))?);
                }
                let pmfs: [Pmf; 3] = pmfs.try_into().expect("three pmfs");
                Ok(ChannelSpec::Ff(FfChannelSpec::new(f, g, pmfs)?))
            }
            ChannelConfig::Awgn {
                snr,
                powers,
                noise_powers,
            } => {
                let mut s = [[0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        if i != j {
                            s[i][j] = snr[i][j].ok_or(ChannelError::InvalidSnr(i, j))?;
                        }
                    }
                }
                Ok(ChannelSpec::Awgn(AwgnChannelSpec::new(s, *powers, *noise_powers)?))
            }
        }
    }
}
