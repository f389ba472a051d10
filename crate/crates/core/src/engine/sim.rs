use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{clopper_pearson, EngineError, Scheme, SimConfig, DEFAULT_OP_BUDGET};
use crate::channels::ChannelSpec;
use crate::codecs::{run_coop, run_noncoop, CodecError, CoopParams, CoopScheme, EventCounts, TrialOutcome};
use crate::regions::{optimal_alpha, reciprocal_order};
use crate::rng::{trial_seed, StreamKey};

/// Aggregated outcome of a run. A pure function of the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub scheme: Scheme,
    pub n: usize,
    /// Message blocks; 1 for the one-shot schemes.
    pub blocks: usize,
    pub codebook_sizes: [usize; 3],
    pub rates_nominal: [f64; 3],
    pub rates_realized: [f64; 3],
    pub trials: u64,
    /// Trials in which any estimate anywhere was wrong.
    pub errors_any: u64,
    /// `errors[receiver][source]`: trials in which `receiver` got some message of `source` wrong.
    pub errors: [[u64; 3]; 3],
    /// Failed decisions per receiver, by which index was wrong.
    pub events: [EventCounts; 3],
    pub ties: u64,
    pub pe_hat: f64,
    /// 95% Clopper-Pearson interval for the any-error probability.
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
    /// Which input node relayed (cooperative schemes).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relay: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub config: SimConfig,
}

/// A result plus how long it took. Kept apart so results compare byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRun {
    pub result: SimResult,
    pub wall_ms: u64,
}

/// One line of the CSV output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub scheme: String,
    pub n: usize,
    #[serde(rename = "B")]
    pub blocks: usize,
    pub rate_nominal: f64,
    pub rate_realized: f64,
    pub trials: u64,
    pub errors_any: u64,
    pub pe_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
    pub wall_ms: u64,
}

impl SimRun {
    /// Rates are the smallest over the three nodes.
    pub fn csv_row(&self) -> CsvRow {
        let r = &self.result;
        let min = |v: [f64; 3]| v.into_iter().fold(f64::INFINITY, f64::min);
        CsvRow {
            scheme: r.scheme.name().to_string(),
            n: r.n,
            blocks: r.blocks,
            rate_nominal: min(r.rates_nominal),
            rate_realized: min(r.rates_realized),
            trials: r.trials,
            errors_any: r.errors_any,
            pe_hat: r.pe_hat,
            ci_lo: r.ci_lo,
            ci_hi: r.ci_hi,
            seed: r.seed,
            wall_ms: self.wall_ms,
        }
    }
}

/// A validated config ready to run.
struct Plan {
    channel: ChannelSpec,
    n: usize,
    blocks: usize,
    sizes: [usize; 3],
    nominal: [f64; 3],
    coop: Option<CoopParams>,
    /// Node `a` of `channel` is input node `perm[a]`.
    perm: [usize; 3],
    alpha: Option<f64>,
}

fn incompatible(s: Scheme, reason: impl Into<String>) -> EngineError {
    EngineError::IncompatibleScheme {
        scheme: s.name(),
        reason: reason.into(),
    }
}

fn plan(cfg: &SimConfig) -> Result<Plan, EngineError> {
    let s = cfg.scheme;
    if cfg.trials == 0 {
        return Err(EngineError::Config("trials must be at least 1".into()));
    }
    if cfg.n == 0 {
        return Err(EngineError::Config("n must be at least 1".into()));
    }
    if cfg.threads == Some(0) {
        return Err(EngineError::Config("threads must be at least 1".into()));
    }
    let channel = cfg.channel.build()?;
    match (&channel, s == Scheme::NoncoopFf) {
        (ChannelSpec::Ff(_), false) => return Err(incompatible(s, "needs the AWGN channel model")),
        (ChannelSpec::Awgn(_), true) => return Err(incompatible(s, "needs the finite-field channel model")),
        _ => {}
    }

    let n = cfg.n as f64;
    let (sizes_f, nominal) = match (cfg.rate, cfg.rates, cfg.codebook_sizes) {
        (Some(r), None, None) => ([(n * r).exp2().round(); 3], [r; 3]),
        (None, Some(rs), None) => (rs.map(|r| (n * r).exp2().round()), rs),
        (None, None, Some(m)) => (m.map(|v| v as f64), m.map(|v| (v as f64).log2() / n)),
        _ => {
            return Err(EngineError::Config(
                "give exactly one of rate, rates, codebook_sizes".into(),
            ))
        }
    };
    if nominal.iter().any(|r| !r.is_finite() || *r < 0.0) || sizes_f.iter().any(|&m| m < 1.0) {
        return Err(EngineError::Config("rates must be finite and non-negative, sizes at least 1".into()));
    }

    let blocks = if s.is_coop() {
        match cfg.blocks {
            Some(b) if b >= 1 => b,
            _ => return Err(EngineError::Config("cooperative schemes need B >= 1".into())),
        }
    } else {
        1
    };
    let trials = cfg.trials as f64;
    let ops = if s.is_coop() {
        if sizes_f[0] != sizes_f[1] || sizes_f[1] != sizes_f[2] {
            return Err(incompatible(s, "cooperation needs equal codebook sizes"));
        }
        sizes_f[0] * sizes_f[0] * n * blocks as f64 * trials
    } else {
        (sizes_f[1] * sizes_f[2] + sizes_f[0] * sizes_f[2] + sizes_f[0] * sizes_f[1]) * n * trials
    };
    let budget = cfg.op_budget.unwrap_or(DEFAULT_OP_BUDGET);
    if ops > budget {
        return Err(EngineError::BudgetExceeded { ops, budget });
    }
    if sizes_f.iter().any(|&m| m > u32::MAX as f64) {
        return Err(EngineError::Config("codebook too large to index".into()));
    }
    let sizes = sizes_f.map(|m| m as usize);

    let mut perm = [0, 1, 2];
    let mut alpha = None;
    let mut coop = None;
    let channel = match channel {
        ChannelSpec::Awgn(ch) if s.is_coop() => {
            // Put the node with the two strongest links in the relay seat.
            let order = ch.classify().reciprocal.then(|| reciprocal_order(&ch)).transpose()?;
            let ch = match order {
                Some(o) => {
                    perm = o.perm;
                    ch.permuted(o.perm)
                }
                None => ch,
            };
            let scheme = if s == Scheme::CoopSuperposition {
                let a = match (cfg.alpha, order) {
                    (Some(a), _) => a,
                    (None, Some(o)) => optimal_alpha(o.g12, o.g23),
                    (None, None) => return Err(EngineError::Config("alpha is required on a non-reciprocal channel".into())),
                };
                if !(0.0..=1.0).contains(&a) {
                    return Err(CodecError::InvalidAlpha(a).into());
                }
                alpha = Some(a);
                CoopScheme::Superposition { alpha: a }
            } else {
                CoopScheme::DoubleIndex
            };
            coop = Some(CoopParams {
                n: cfg.n,
                size: sizes[0],
                blocks,
                scheme,
            });
            ChannelSpec::Awgn(ch)
        }
        other => other,
    };

    Ok(Plan {
        channel,
        n: cfg.n,
        blocks,
        sizes,
        nominal,
        coop,
        perm,
        alpha,
    })
}

impl Plan {
    fn trial(&self, seed: u64, t: u64) -> Result<TrialOutcome, CodecError> {
        let key = StreamKey::new(trial_seed(seed, t));
        match (&self.coop, &self.channel) {
            (Some(p), ChannelSpec::Awgn(ch)) => Ok(self.unpermute(run_coop(ch, p, key)?.outcome())),
            _ => Ok(run_noncoop(&self.channel, self.n, self.sizes, key)?.outcome()),
        }
    }

    fn unpermute(&self, o: TrialOutcome) -> TrialOutcome {
        let p = self.perm;
        let mut r = TrialOutcome {
            ties: o.ties,
            ..TrialOutcome::default()
        };
        for a in 0..3 {
            r.events[p[a]] = o.events[a];
            for b in 0..3 {
                r.errors[p[a]][p[b]] = o.errors[a][b];
            }
        }
        r
    }
}

/// Runs `cfg.trials` independent trials. Trial `t` draws everything from
/// `trial_seed(cfg.seed, t)`, so the result does not depend on scheduling.
pub fn monte_carlo(cfg: &SimConfig) -> Result<SimResult, EngineError> {
    let plan = plan(cfg)?;
    let run = || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| plan.trial(cfg.seed, t))
            .collect::<Result<Vec<_>, _>>()
    };
    let outcomes = match cfg.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| EngineError::Config(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let mut errors = [[0u64; 3]; 3];
    let mut events = [EventCounts::default(); 3];
    let mut errors_any = 0;
    let mut ties = 0;
    for o in &outcomes {
        errors_any += u64::from(o.any());
        ties += o.ties;
        for k in 0..3 {
            events[k].add(&o.events[k]);
            for s in 0..3 {
                errors[k][s] += u64::from(o.errors[k][s]);
            }
        }
    }
    let trials = cfg.trials;
    let pe_hat = errors_any as f64 / trials as f64;
    let (ci_lo, ci_hi) = clopper_pearson(errors_any, trials, 0.05);
    if errors_any > trials || errors.iter().flatten().any(|&e| e > errors_any) || !(ci_lo <= pe_hat && pe_hat <= ci_hi) {
        return Err(EngineError::Invariant(format!(
            "inconsistent counts: {errors_any} of {trials}, interval [{ci_lo}, {ci_hi}]"
        )));
    }

    Ok(SimResult {
        scheme: cfg.scheme,
        n: plan.n,
        blocks: plan.blocks,
        codebook_sizes: plan.sizes,
        rates_nominal: plan.nominal,
        rates_realized: plan.sizes.map(|m| (m as f64).log2() / plan.n as f64),
        trials,
        errors_any,
        errors,
        events,
        ties,
        pe_hat,
        ci_lo,
        ci_hi,
        seed: cfg.seed,
        relay: plan.coop.map(|_| plan.perm[0]),
        alpha: plan.alpha,
        config: cfg.clone(),
    })
}

pub fn monte_carlo_timed(cfg: &SimConfig) -> Result<SimRun, EngineError> {
    let start = Instant::now();
    let result = monte_carlo(cfg)?;
    Ok(SimRun {
        result,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// One run per grid rate, each with equal codebook sizes `round(2^(n R))`.
pub fn rate_sweep(template: &SimConfig, grid: &[f64]) -> Result<Vec<SimRun>, EngineError> {
    if grid.is_empty() {
        return Err(EngineError::Config("rate grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) || grid.iter().any(|r| !r.is_finite()) {
        return Err(EngineError::Config("rate grid must be finite and ascending".into()));
    }
    grid.iter()
        .map(|&r| {
            let cfg = SimConfig {
                rate: Some(r),
                rates: None,
                codebook_sizes: None,
                ..template.clone()
            };
            monte_carlo_timed(&cfg)
        })
        .collect()
}
