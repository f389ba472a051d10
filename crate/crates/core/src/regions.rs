//! Rate regions and capacity formulas.
//!
//! Regions are polytopes in `(R1, R2, R3)` space cut out by constraints
//! `a . R <= b` with 0/1 coefficient vectors, plus `R >= 0`. Strict
//! achievability inequalities are stored as their closures.
//!
//! All rates are in bits per channel use.

use serde::Serialize;
use thiserror::Error;

use crate::channels::{others, AwgnChannelSpec, FfChannelSpec};

const DEDUP_TOL: f64 = 1e-9;
const FEASIBLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("region is unbounded along R{}", .0 + 1)]
    UnboundedRegion(usize),
    #[error("channel is not sender-symmetrical")]
    NotSenderSymmetrical,
    #[error("channel is not reciprocal")]
    NotReciprocal,
    #[error("power split {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),
}

pub type RateTriple = [f64; 3];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constraint {
    pub coeffs: [u8; 3],
    pub bound: f64,
    pub label: String,
}

impl Constraint {
    fn lhs(&self, r: &RateTriple) -> f64 {
        (0..3).map(|i| self.coeffs[i] as f64 * r[i]).sum()
    }

    fn weight(&self) -> f64 {
        self.coeffs.iter().map(|&c| c as f64).sum()
    }
}

/// `{R >= 0 : a . R <= b for every constraint}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RatePolytope {
    pub constraints: Vec<Constraint>,
}

/// A region in the JSON shape emitted by reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub constraints: Vec<Constraint>,
    pub vertices: Vec<RateTriple>,
    pub equal_rate: f64,
}

impl RatePolytope {
    pub fn new() -> RatePolytope {
        RatePolytope::default()
    }

    /// Adds `a . R <= bound`. Panics on a zero or non-0/1 coefficient vector.
    pub fn push(&mut self, coeffs: [u8; 3], bound: f64, label: impl Into<String>) {
        assert!(coeffs.iter().all(|&c| c <= 1) && coeffs.iter().any(|&c| c == 1));
        self.constraints.push(Constraint {
            coeffs,
            bound,
            label: label.into(),
        });
    }

    pub fn with(mut self, coeffs: [u8; 3], bound: f64, label: impl Into<String>) -> RatePolytope {
        self.push(coeffs, bound, label);
        self
    }

    pub fn contains(&self, r: &RateTriple, tol: f64) -> bool {
        r.iter().all(|&x| x >= -tol) && self.constraints.iter().all(|c| c.lhs(r) <= c.bound + tol)
    }

    fn check_bounded(&self) -> Result<(), RegionError> {
        for i in 0..3 {
            if !self.constraints.iter().any(|c| c.coeffs[i] == 1) {
                return Err(RegionError::UnboundedRegion(i));
            }
        }
        Ok(())
    }

    /// Every vertex, found by intersecting each triple of bounding planes
    /// (constraints and coordinate planes) and keeping the feasible points.
    pub fn vertices(&self) -> Result<Vec<RateTriple>, RegionError> {
        self.check_bounded()?;
        let mut planes: Vec<([f64; 3], f64)> = (0..3)
            .map(|i| {
                let mut a = [0.0; 3];
                a[i] = 1.0;
                (a, 0.0)
            })
            .collect();
        planes.extend(
            self.constraints
                .iter()
                .map(|c| (c.coeffs.map(|x| x as f64), c.bound)),
        );

        let mut out: Vec<RateTriple> = Vec::new();
        for i in 0..planes.len() {
            for j in (i + 1)..planes.len() {
                for k in (j + 1)..planes.len() {
                    let Some(r) = solve3([planes[i].0, planes[j].0, planes[k].0], [planes[i].1, planes[j].1, planes[k].1])
                    else {
                        continue;
                    };
                    if !self.contains(&r, FEASIBLE_TOL) {
                        continue;
                    }
                    let r = r.map(|x| if x.abs() < DEDUP_TOL { 0.0 } else { x });
                    if !out.iter().any(|v| (0..3).all(|d| (v[d] - r[d]).abs() <= DEDUP_TOL)) {
                        out.push(r);
                    }
                }
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite vertices"));
        Ok(out)
    }

    /// Whether `self` lies inside `outer`, checked on the vertices of `self`.
    pub fn is_subset(&self, outer: &RatePolytope, tol: f64) -> Result<bool, RegionError> {
        Ok(self.vertices()?.iter().all(|v| outer.contains(v, tol)))
    }

    /// Largest `R` with `(R, R, R)` in the region.
    pub fn equal_rate_max(&self) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.bound / c.weight())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn report(&self) -> Result<RegionReport, RegionError> {
        Ok(RegionReport {
            constraints: self.constraints.clone(),
            vertices: self.vertices()?,
            equal_rate: self.equal_rate_max(),
        })
    }
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Cramer's rule; `None` for (near-)singular systems. With 0/1 rows any
/// nonsingular determinant has magnitude at least 1.
fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<RateTriple> {
    let d = det3(a);
    if d.abs() < 0.5 {
        return None;
    }
    let mut r = [0.0; 3];
    for (col, x) in r.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        *x = det3(m) / d;
    }
    Some(r)
}

fn pair_coeffs(i: usize, j: usize) -> [u8; 3] {
    let mut a = [0u8; 3];
    a[i] = 1;
    a[j] = 1;
    a
}

fn unit(i: usize) -> [u8; 3] {
    let mut a = [0u8; 3];
    a[i] = 1;
    a
}

/// Cut-set outer bound of the finite-field channel, which is also its
/// capacity region: `R_i + R_j <= log2 q - H(Z_k)`.
pub fn ff_outer(ch: &FfChannelSpec) -> RatePolytope {
    let log_q = (ch.field().order() as f64).log2();
    let mut p = RatePolytope::new();
    for k in 0..3 {
        let [i, j] = others(k);
        let b = (log_q - ch.noise(k).entropy()).max(0.0);
        p.push(pair_coeffs(i, j), b, format!("R{}+R{}<=log2(q)-H(Z{})", i + 1, j + 1, k + 1));
    }
    p
}

/// Cut-set outer bound of the phase-fading AWGN channel.
pub fn awgn_outer(ch: &AwgnChannelSpec) -> RatePolytope {
    let g = |a: usize, b: usize| ch.snr(a, b);
    let mut p = RatePolytope::new();
    for i in 0..3 {
        let [j, k] = others(i);
        p.push(
            unit(i),
            (1.0 + g(i, j) + g(i, k)).log2(),
            format!("R{}<=log2(1+g{}{}+g{}{})", i + 1, i + 1, j + 1, i + 1, k + 1),
        );
    }
    for k in (0..3).rev() {
        let [i, j] = others(k);
        p.push(
            pair_coeffs(i, j),
            (1.0 + g(i, k) + g(j, k)).log2(),
            format!("R{}+R{}<=log2(1+g{}{}+g{}{})", i + 1, j + 1, i + 1, k + 1, j + 1, k + 1),
        );
    }
    p
}

/// Closure of the region reached by the non-cooperative scheme: each receiver
/// `k` treats its two senders as a multiple-access channel.
pub fn awgn_inner(ch: &AwgnChannelSpec) -> RatePolytope {
    let g = |a: usize, b: usize| ch.snr(a, b);
    let mut p = RatePolytope::new();
    for k in 0..3 {
        let [i, j] = others(k);
        for s in [i, j] {
            p.push(
                unit(s),
                (1.0 + g(s, k)).log2(),
                format!("R{}<=log2(1+g{}{})", s + 1, s + 1, k + 1),
            );
        }
        p.push(
            pair_coeffs(i, j),
            (1.0 + g(i, k) + g(j, k)).log2(),
            format!("R{}+R{}<=log2(1+g{}{}+g{}{})", i + 1, j + 1, i + 1, k + 1, j + 1, k + 1),
        );
    }
    p
}

/// Equal-rate capacity of a sender-symmetrical channel,
/// `1/2 log2(1 + 2 min_k gamma_k)`.
pub fn c_ss(ch: &AwgnChannelSpec) -> Result<f64, RegionError> {
    if !ch.classify().sender_symmetrical {
        return Err(RegionError::NotSenderSymmetrical);
    }
    let min_into = (0..3).map(|k| ch.snr(others(k)[0], k)).fold(f64::INFINITY, f64::min);
    Ok(0.5 * (1.0 + 2.0 * min_into).log2())
}

/// Node relabeling that puts a reciprocal channel in the canonical order
/// `gamma_23 <= gamma_12 <= gamma_13` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReciprocalOrder {
    /// New node `a` is old node `perm[a]`; new node 0 is the relay.
    pub perm: [usize; 3],
    /// `(gamma_12, gamma_13, gamma_23)` after relabeling.
    pub g12: f64,
    pub g13: f64,
    pub g23: f64,
}

pub fn reciprocal_order(ch: &AwgnChannelSpec) -> Result<ReciprocalOrder, RegionError> {
    if !ch.classify().reciprocal {
        return Err(RegionError::NotReciprocal);
    }
    let mut pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    pairs.sort_by(|a, b| ch.snr(a.0, a.1).total_cmp(&ch.snr(b.0, b.1)));
    let [min, mid, max] = pairs;
    let shared = |p: (usize, usize), q: (usize, usize)| if p.0 == q.0 || p.0 == q.1 { p.0 } else { p.1 };
    let relay = shared(mid, max);
    let second = if mid.0 == relay { mid.1 } else { mid.0 };
    let third = if max.0 == relay { max.1 } else { max.0 };
    debug_assert!(min == (second.min(third), second.max(third)));
    let perm = [relay, second, third];
    let r = ch.permuted(perm);
    Ok(ReciprocalOrder {
        perm,
        g12: r.snr(0, 1),
        g13: r.snr(0, 2),
        g23: r.snr(1, 2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReciprocalCapacity {
    pub value: f64,
    pub order: ReciprocalOrder,
}

/// Equal-rate capacity of a reciprocal channel,
/// `1/2 log2(1 + gamma_mid + gamma_min)` over the three pair SNRs.
pub fn c_r(ch: &AwgnChannelSpec) -> Result<ReciprocalCapacity, RegionError> {
    let order = reciprocal_order(ch)?;
    Ok(ReciprocalCapacity {
        value: 0.5 * (1.0 + order.g12 + order.g23).log2(),
        order,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperpositionRates {
    /// Decoding the relay's own-message layer.
    pub r_prime: f64,
    /// Decoding the peer's message through the network-coded layer.
    pub r_dblprime: f64,
    /// Bound on `2R`.
    pub sum_bound: f64,
}

/// Rate conditions at a backward decoder when the relay superposes its own
/// message (power share `alpha`) on the network-coded one.
pub fn superposition_rates(g_relay: f64, g_peer: f64, alpha: f64) -> Result<SuperpositionRates, RegionError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(RegionError::AlphaOutOfRange(alpha));
    }
    Ok(SuperpositionRates {
        r_prime: (1.0 + alpha * g_relay).log2(),
        r_dblprime: (1.0 + (1.0 - alpha) * g_relay).log2() + (1.0 + g_peer / (1.0 + g_relay)).log2(),
        sum_bound: (1.0 + g_relay + g_peer).log2(),
    })
}

/// `max_alpha min(R'(alpha), R''(alpha))` in closed form.
pub fn r_triple_prime(g_relay: f64, g_peer: f64) -> f64 {
    let num = (1.0 + g_relay) * (g_relay + g_peer);
    let den = 2.0 * (1.0 + g_relay) + g_peer;
    (1.0 + num / den).log2()
}

/// The power split where `R'(alpha) = R''(alpha)`, clamped to `[0, 1]`.
pub fn optimal_alpha(g_relay: f64, g_peer: f64) -> f64 {
    if g_relay <= 0.0 {
        return 0.0;
    }
    let c = 1.0 + g_peer / (1.0 + g_relay);
    ((c * (1.0 + g_relay) - 1.0) / (g_relay * (1.0 + c))).clamp(0.0, 1.0)
}
