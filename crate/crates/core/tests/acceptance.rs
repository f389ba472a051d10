//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line with
//! the measured numbers, then asserts. Run with `--nocapture` to see them all.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use threeway::channels::{AwgnChannelSpec, ChannelConfig};
use threeway::codecs::{run_coop, CoopParams, CoopScheme};
use threeway::engine::{monte_carlo, Scheme, SimConfig, SimResult};
use threeway::galois::{FieldParams, FieldSpec};
use threeway::info::{ff_mac_joint, mutual_information, Pmf};
use threeway::regions::{awgn_inner, awgn_outer, c_r, c_ss, r_triple_prime, superposition_rates};
use threeway::rng::StreamKey;

fn report(id: u32, pass: bool, started: Instant, limit: Duration, detail: String) {
    let took = started.elapsed();
    let ok = pass && took <= limit;
    println!(
        "criterion {id}: {} ({:.2?} of {:?}) {detail}",
        if ok { "PASS" } else { "FAIL" },
        took,
        limit
    );
    assert!(pass, "criterion {id}: {detail}");
    assert!(took <= limit, "criterion {id} took {took:?}, limit {limit:?}");
}

fn example() -> AwgnChannelSpec {
    AwgnChannelSpec::reciprocal(6.0, 8.0, 1.0).unwrap()
}

fn example_config() -> ChannelConfig {
    ChannelConfig::Awgn {
        snr: [[None, Some(6.0), Some(8.0)], [Some(6.0), None, Some(1.0)], [Some(8.0), Some(1.0), None]],
        powers: [1.0; 3],
        noise_powers: [1.0; 3],
    }
}

fn gf2_noiseless() -> ChannelConfig {
    ChannelConfig::Ff {
        field: FieldParams { p: 2, m: 1 },
        gains: [[None, Some(1), Some(1)], [Some(1), None, Some(1)], [Some(1), Some(1), None]],
        noise_pmfs: [vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0]],
    }
}

fn sim(channel: ChannelConfig, scheme: Scheme, n: usize, rate: f64, trials: u64) -> SimConfig {
    SimConfig {
        channel,
        scheme,
        n,
        blocks: scheme.is_coop().then_some(4),
        rate: Some(rate),
        rates: None,
        codebook_sizes: None,
        alpha: None,
        trials,
        seed: 42,
        threads: None,
        op_budget: Some(1e13),
    }
}

fn run(cfg: &SimConfig) -> SimResult {
    monte_carlo(cfg).expect("simulation runs")
}

#[test]
fn criterion_1_worked_example() {
    let t = Instant::now();
    let ch = example();
    let outer = awgn_outer(&ch).equal_rate_max();
    let inner = awgn_inner(&ch).equal_rate_max();
    let cap = c_r(&ch).unwrap().value;
    let pass = (outer - 1.5).abs() < 1e-9 && (inner - 1.0).abs() < 1e-9 && (cap - 1.5).abs() < 1e-9;
    report(
        1,
        pass,
        t,
        Duration::from_secs(1),
        format!("outer {outer:.12}, inner {inner:.12}, C_r {cap:.12}"),
    );
}

/// `sum p log2(p / (pa pb))` over a dense joint table `p[a][b]`.
fn mi_table(p: &[Vec<f64>]) -> f64 {
    let pa: Vec<f64> = p.iter().map(|r| r.iter().sum()).collect();
    let pb: Vec<f64> = (0..p[0].len()).map(|b| p.iter().map(|r| r[b]).sum()).collect();
    let mut s = 0.0;
    for (a, row) in p.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            if v > 0.0 {
                s += v * (v / (pa[a] * pb[b])).log2();
            }
        }
    }
    s
}

#[test]
fn criterion_2_finite_field_identities() {
    let t = Instant::now();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(2);
    let fields = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)];
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (p, m) = fields[rng.random_range(0..fields.len())];
        let f = FieldSpec::new(p, m).unwrap();
        let q = f.order() as usize;
        let gi = rng.random_range(1..q as u32);
        let gj = rng.random_range(1..q as u32);
        let mut w: Vec<f64> = (0..q).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() }).collect();
        w[rng.random_range(0..q)] += 0.1;
        let total: f64 = w.iter().sum();
        let noise: Vec<f64> = w.iter().map(|v| v / total).collect();
        let h_noise: f64 = noise.iter().filter(|&&v| v > 0.0).map(|v| -v * v.log2()).sum();
        let target = (q as f64).log2() - h_noise;

        // Brute force: joint law of ((x_i, x_j), y) and, per x_j, of (x_i, y).
        let (ge, he) = (f.element(gi).unwrap(), f.element(gj).unwrap());
        let u = 1.0 / (q * q) as f64;
        let mut joint = vec![vec![0.0; q]; q * q];
        let mut cond = vec![vec![vec![0.0; q]; q]; q];
        for xi in f.elements() {
            for xj in f.elements() {
                for z in f.elements() {
                    let y = f.add(f.add(f.mul(ge, xi), f.mul(he, xj)), z);
                    let pz = noise[z.value() as usize] * u;
                    joint[xi.value() as usize * q + xj.value() as usize][y.value() as usize] += pz;
                    cond[xj.value() as usize][xi.value() as usize][y.value() as usize] += pz * q as f64;
                }
            }
        }
        let i_pair = mi_table(&joint);
        let i_cond: f64 = cond.iter().map(|c| mi_table(c) / q as f64).sum();

        // The library's information measures on the same channel.
        let j = ff_mac_joint(&f, (ge, he), &Pmf::new(noise.clone()).unwrap()).unwrap();
        let lib_pair = mutual_information(&j, &["xi", "xj"], &["y"], &[]).unwrap();
        let lib_cond = mutual_information(&j, &["xi"], &["y"], &["xj"]).unwrap();

        for v in [i_pair, i_cond, lib_pair, lib_cond] {
            worst = worst.max((v - target).abs());
        }
    }
    report(
        2,
        worst < 1e-9,
        t,
        Duration::from_secs(30),
        format!("200 channels, max deviation {worst:.2e}"),
    );
}

fn log_uniform(rng: &mut Xoshiro256PlusPlus) -> f64 {
    10f64.powf(rng.random_range(-2.0..2.0))
}

#[test]
fn criterion_3_region_sanity() {
    let t = Instant::now();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
    let (mut subset_fail, mut ss_dev, mut r_dev) = (0, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let mut g = [[0.0; 3]; 3];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if i != j {
                    *v = log_uniform(&mut rng);
                }
            }
        }
        let ch = AwgnChannelSpec::from_snr(g).unwrap();
        if !awgn_inner(&ch).is_subset(&awgn_outer(&ch), 1e-9).unwrap() {
            subset_fail += 1;
        }

        let ss = AwgnChannelSpec::sender_symmetrical([0, 1, 2].map(|_| log_uniform(&mut rng))).unwrap();
        let c = c_ss(&ss).unwrap();
        ss_dev = ss_dev
            .max((awgn_inner(&ss).equal_rate_max() - c).abs())
            .max((awgn_outer(&ss).equal_rate_max() - c).abs());

        let rc = AwgnChannelSpec::reciprocal(log_uniform(&mut rng), log_uniform(&mut rng), log_uniform(&mut rng)).unwrap();
        r_dev = r_dev.max((awgn_outer(&rc).equal_rate_max() - c_r(&rc).unwrap().value).abs());
    }
    report(
        3,
        subset_fail == 0 && ss_dev < 1e-9 && r_dev < 1e-9,
        t,
        Duration::from_secs(30),
        format!("inner not in outer: {subset_fail}/1000, |C_ss dev| {ss_dev:.2e}, |C_r dev| {r_dev:.2e}"),
    );
}

/// Golden-section maximization of `min(R'(a), R''(a))` over `a` in [0, 1].
fn golden_max(g12: f64, g23: f64) -> f64 {
    let f = |a: f64| {
        let s = superposition_rates(g12, g23, a).unwrap();
        s.r_prime.min(s.r_dblprime)
    };
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    let (mut c, mut d) = (b - phi * (b - a), a + phi * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 {
        if fc < fd {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        }
    }
    f(0.5 * (a + b)).max(f(0.0)).max(f(1.0))
}

#[test]
fn criterion_4_superposition_claim() {
    let t = Instant::now();
    let axis: Vec<f64> = (0..200).map(|i| 0.01 * 10f64.powf(4.0 * i as f64 / 199.0)).collect();
    let (mut points, mut below, mut worst_gap) = (0, 0, 0.0f64);
    let mut min_margin = f64::INFINITY;
    for &g12 in &axis {
        for &g23 in axis.iter().filter(|&&v| v <= g12) {
            points += 1;
            let r3 = r_triple_prime(g12, g23);
            let margin = r3 - 0.5 * (1.0 + g12 + g23).log2();
            min_margin = min_margin.min(margin);
            if margin < -1e-9 {
                below += 1;
            }
            worst_gap = worst_gap.max((golden_max(g12, g23) - r3).abs());
        }
    }
    report(
        4,
        below == 0 && worst_gap < 1e-6,
        t,
        Duration::from_secs(10),
        format!("{points} points, min margin {min_margin:.3e}, below bound {below}, max |numeric - closed form| {worst_gap:.2e}"),
    );
}

#[test]
fn criterion_5_finite_field_trend() {
    let t = Instant::now();
    let inside = run(&sim(gf2_noiseless(), Scheme::NoncoopFf, 16, 0.25, 10_000));
    let outside = run(&sim(gf2_noiseless(), Scheme::NoncoopFf, 16, 0.625, 1000));
    report(
        5,
        inside.pe_hat <= 0.05 && outside.pe_hat >= 0.5,
        t,
        Duration::from_secs(300),
        format!(
            "rate 0.25: Pe {:.4} [{:.4}, {:.4}] over {}; rate 0.625: Pe {:.4} [{:.4}, {:.4}] over {}",
            inside.pe_hat, inside.ci_lo, inside.ci_hi, inside.trials, outside.pe_hat, outside.ci_lo, outside.ci_hi, outside.trials
        ),
    );
}

#[test]
fn criterion_6_cooperative_protocol() {
    let t = Instant::now();
    let trials = 500;
    let low: Vec<SimResult> = [6, 8, 10, 12]
        .iter()
        .map(|&n| run(&sim(example_config(), Scheme::CoopDoubleIndex, n, 0.5, trials)))
        .collect();
    let pe: Vec<f64> = low.iter().map(|r| r.pe_hat).collect();
    let mut inversions = 0;
    let mut monotone = true;
    for w in low.windows(2) {
        if w[1].pe_hat > w[0].pe_hat {
            inversions += 1;
            let se = (w[0].pe_hat * (1.0 - w[0].pe_hat) / trials as f64 + w[1].pe_hat * (1.0 - w[1].pe_hat) / trials as f64).sqrt();
            monotone &= w[1].pe_hat - w[0].pe_hat <= 2.0 * se;
        }
    }
    monotone &= inversions <= 1;
    let reliable = pe[3] <= 0.1;

    // Above C_r = 1.5: codebooks grow as 2^(1.7 n), so only short blocks are feasible.
    let high: Vec<SimResult> = [2, 4, 6]
        .iter()
        .map(|&n| run(&sim(example_config(), Scheme::CoopDoubleIndex, n, 1.7, 200)))
        .collect();
    let converse = high.iter().all(|r| r.pe_hat >= 0.2);
    report(
        6,
        reliable && monotone && converse,
        t,
        Duration::from_secs(1800),
        format!(
            "rate 0.5, n=6..12: Pe {:?} ({inversions} inversions); rate 1.7, n=2,4,6 (M={:?}): Pe {:?}",
            pe,
            high.iter().map(|r| r.codebook_sizes[0]).collect::<Vec<_>>(),
            high.iter().map(|r| r.pe_hat).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_7_cooperation_gap() {
    let t = Instant::now();
    let coop = run(&sim(example_config(), Scheme::CoopDoubleIndex, 10, 1.1, 200));
    let noncoop = run(&sim(example_config(), Scheme::NoncoopAwgn, 10, 1.1, 200));
    report(
        7,
        coop.pe_hat < noncoop.pe_hat,
        t,
        Duration::from_secs(1800),
        format!(
            "rate 1.1 (M={}), n=10, B=4: coop Pe {:.3} [{:.3}, {:.3}], non-coop Pe {:.3} [{:.3}, {:.3}]",
            coop.codebook_sizes[0], coop.pe_hat, coop.ci_lo, coop.ci_hi, noncoop.pe_hat, noncoop.ci_lo, noncoop.ci_hi
        ),
    );
}

#[test]
fn criterion_8_determinism_and_power() {
    let t = Instant::now();
    let mut identical = true;
    for scheme in [Scheme::CoopDoubleIndex, Scheme::CoopSuperposition, Scheme::NoncoopAwgn] {
        let mut cfg = sim(example_config(), scheme, 8, 0.75, 60);
        let mut out = Vec::new();
        for threads in [Some(1), Some(4), None] {
            cfg.threads = threads;
            out.push(serde_json::to_vec(&run(&cfg)).unwrap());
        }
        identical &= out.windows(2).all(|w| w[0] == w[1]);
    }
    let ff = sim(gf2_noiseless(), Scheme::NoncoopFf, 12, 0.3, 500);
    let a = serde_json::to_vec(&run(&SimConfig { threads: Some(1), ..ff.clone() })).unwrap();
    let b = serde_json::to_vec(&run(&SimConfig { threads: Some(3), ..ff })).unwrap();
    identical &= a == b;

    // n (B + 1) = 10^4 symbols per node, unequal powers.
    let ch = AwgnChannelSpec::new([[0.0, 6.0, 8.0], [6.0, 0.0, 1.0], [8.0, 1.0, 0.0]], [2.0, 1.0, 0.5], [1.0; 3]).unwrap();
    let mut worst: f64 = 0.0;
    for scheme in [CoopScheme::DoubleIndex, CoopScheme::Superposition { alpha: 0.4 }] {
        let p = CoopParams {
            n: 2500,
            size: 4,
            blocks: 3,
            scheme,
        };
        let trace = run_coop(&ch, &p, StreamKey::new(8)).unwrap();
        for (i, pw) in trace.avg_power().iter().enumerate() {
            worst = worst.max((pw / ch.power(i) - 1.0).abs());
        }
    }
    report(
        8,
        identical && worst <= 0.05,
        t,
        Duration::from_secs(60),
        format!("byte-identical across thread budgets: {identical}; worst relative power deviation {worst:.4}"),
    );
}
