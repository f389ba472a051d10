use std::collections::BTreeMap;

use serde::Serialize;

use super::EngineError;
use crate::channels::{ChannelSpec, Classification};
use crate::codecs::{coop_rate, coop_rate_bounds, CoopScheme, RateBound};
use crate::regions::{awgn_inner, awgn_outer, c_r, c_ss, ff_outer, optimal_alpha, r_triple_prime, RegionReport, ReciprocalOrder};

/// Everything known in closed form about one channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityReport {
    pub model: &'static str,
    /// `capacity` for the finite-field model; `outer` and `inner` for AWGN.
    pub regions: BTreeMap<&'static str, RegionReport>,
    pub equal_rate_outer: f64,
    pub equal_rate_inner: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_ss: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coop: Option<CoopReport>,
}

/// Rate conditions of both cooperative schemes on a reciprocal channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoopReport {
    pub order: ReciprocalOrder,
    pub double_index: Vec<RateBound>,
    pub double_index_rate: f64,
    /// The power split that balances the two layered conditions at the weaker peer.
    pub superposition_alpha: f64,
    pub superposition: Vec<RateBound>,
    pub superposition_rate: f64,
}

pub fn capacity_report(ch: &ChannelSpec) -> Result<CapacityReport, EngineError> {
    let invariant = |e: crate::regions::RegionError| EngineError::Invariant(format!("region construction: {e}"));
    match ch {
        ChannelSpec::Ff(f) => {
            let cap = ff_outer(f).report().map_err(invariant)?;
            let r = cap.equal_rate;
            Ok(CapacityReport {
                model: "ff",
                regions: BTreeMap::from([("capacity", cap)]),
                equal_rate_outer: r,
                equal_rate_inner: r,
                classification: None,
                c_ss: None,
                c_r: None,
                coop: None,
            })
        }
        ChannelSpec::Awgn(a) => {
            let outer = awgn_outer(a).report().map_err(invariant)?;
            let inner = awgn_inner(a).report().map_err(invariant)?;
            let class = a.classify();
            let c_ss = if class.sender_symmetrical { Some(c_ss(a)?) } else { None };
            let (c_r, coop) = if class.reciprocal {
                let cap = c_r(a)?;
                let o = cap.order;
                let alpha = optimal_alpha(o.g12, o.g23);
                let sup = CoopScheme::Superposition { alpha };
                let coop = CoopReport {
                    order: o,
                    double_index: coop_rate_bounds(a, CoopScheme::DoubleIndex)?,
                    double_index_rate: coop_rate(a, CoopScheme::DoubleIndex)?,
                    superposition_alpha: alpha,
                    superposition: coop_rate_bounds(a, sup)?,
                    superposition_rate: coop_rate(a, sup)?,
                };
                (Some(cap.value), Some(coop))
            } else {
                (None, None)
            };
            Ok(CapacityReport {
                model: "awgn",
                equal_rate_outer: outer.equal_rate,
                equal_rate_inner: inner.equal_rate,
                regions: BTreeMap::from([("outer", outer), ("inner", inner)]),
                classification: Some(class),
                c_ss,
                c_r,
                coop,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperpositionPoint {
    pub g12: f64,
    pub g23: f64,
    pub r_triple_prime: f64,
    /// `1/2 log2(1 + g12 + g23)`.
    pub half_sum: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperpositionCheck {
    pub points: Vec<SuperpositionPoint>,
    pub min_margin: f64,
    /// Every margin is at least `-1e-9`.
    pub pass: bool,
}

fn log_axis(range: (f64, f64), size: usize) -> Result<Vec<f64>, EngineError> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi.is_finite() && lo <= hi) {
        return Err(EngineError::Config(format!("range {lo}:{hi} must satisfy 0 < lo <= hi < inf")));
    }
    if lo == hi {
        return Ok(vec![lo]);
    }
    let step = (hi / lo).ln() / (size - 1) as f64;
    Ok((0..size)
        .map(|i| if i + 1 == size { hi } else { lo * (step * i as f64).exp() })
        .collect())
}

/// Compares the superposition scheme's closed-form rate with the sum-rate
/// bound on a log-spaced grid, keeping only points with `g23 <= g12`.
pub fn check_superposition(g12: (f64, f64), g23: (f64, f64), grid: usize) -> Result<SuperpositionCheck, EngineError> {
    if grid < 2 {
        return Err(EngineError::Config("grid size must be at least 2".into()));
    }
    let (xs, ys) = (log_axis(g12, grid)?, log_axis(g23, grid)?);
    let mut points = Vec::new();
    for &a in &xs {
        for &b in ys.iter().filter(|&&b| b <= a) {
            let r3 = r_triple_prime(a, b);
            let half = 0.5 * (1.0 + a + b).log2();
            points.push(SuperpositionPoint {
                g12: a,
                g23: b,
                r_triple_prime: r3,
                half_sum: half,
                margin: r3 - half,
            });
        }
    }
    let min_margin = points.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min);
    Ok(SuperpositionCheck {
        pass: min_margin >= -1e-9,
        points,
        min_margin,
    })
}
