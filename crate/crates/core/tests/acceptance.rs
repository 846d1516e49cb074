//! Desk-scale acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero when a check fails that is not on the list of documented
//! deviations.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use polarmetric::channel::{
    awgn_llr, j_func, k_approx, k_func, metric_variance_awgn, AwgnChannel, BecChannel, Channel,
};
use polarmetric::codes::CodeSpec;
use polarmetric::decode::{classify_tree, Arithmetic, Decoder, DecoderConfig, MetricForm, Mode};
use polarmetric::metric::{bit_metric, expected_metric_tree};
use polarmetric::polarize::{bec_stats, bit_channel_stats, quantize_awgn, DiscreteChannel};
use polarmetric::sim::{
    awgn_tree, parse_points, recipe, trial_rng, CodeConfig, ReportRow, RunConfig, Simulation,
    RECIPE_ALPHABET,
};

/// Checks that are known to miss their targets. Each one is analysed in the
/// README.
const KNOWN_DEVIATIONS: [&str; 6] = ["1b", "3", "5a", "8a", "9", "10a"];

/// Relative tolerance of the sort-count reproductions.
const SORT_TOL: f64 = 0.15;

struct Check {
    id: &'static str,
    pass: bool,
    detail: String,
}

type Criterion = fn() -> Vec<Check>;

fn check(id: &'static str, pass: bool, detail: String) -> Check {
    Check { id, pass, detail }
}

fn within(measured: f64, target: f64, rel: f64) -> bool {
    (measured - target).abs() <= rel * target
}

fn sampled_phi(ebn0: f64, samples: usize, seed: u64) -> (f64, f64, f64) {
    let ch = AwgnChannel::from_ebn0(ebn0, 0.5).unwrap();
    let noise = Normal::new(0.0, ch.sigma()).unwrap();
    let mut rng = trial_rng(seed, 0, 0);
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let bit = rng.random_range(0..2u8);
        let x = if bit == 0 { 1.0 } else { -1.0 };
        let y = x + noise.sample(&mut rng);
        let llr = awgn_llr(y, &ch).unwrap().value();
        let phi = bit_metric(llr, bit);
        s1 += phi;
        s2 += phi * phi;
        values.push(phi);
    }
    let n = samples as f64;
    let mean = s1 / n;
    let var = (s2 - n * mean * mean) / (n - 1.0);
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    (mean, var, m4)
}

fn criterion1() -> Vec<Check> {
    let n = 1_000_000;
    let (mean, var, _) = sampled_phi(2.5, n, 11);
    let t = AwgnChannel::from_ebn0(2.5, 0.5).unwrap().t();
    let j = j_func(t);
    let se = (var / n as f64).sqrt();
    vec![
        check("1a", (mean - j).abs() <= 3.0 * se, format!("sample mean {mean:.5} vs J {j:.5} (3 SE = {:.5})", 3.0 * se)),
        check("1b", (j - 0.7944).abs() <= 1e-3, format!("J at 2.5 dB = {j:.4} vs 0.7944")),
    ]
}

fn criterion2() -> Vec<Check> {
    let n = 1_000_000;
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    let mut pass = true;
    for (i, db) in [0.0, 2.5, 5.0, 10.0].into_iter().enumerate() {
        let (_, var, m4) = sampled_phi(db, n, 20 + i as u64);
        let t = AwgnChannel::from_ebn0(db, 0.5).unwrap().t();
        let exact = metric_variance_awgn(t);
        let se = ((m4 - var * var) / n as f64).sqrt();
        let z = (var - exact).abs() / se.max(1e-300);
        worst = worst.max(z);
        pass &= z <= 3.0;
    }
    out.push(check("2a", pass, format!("largest deviation {worst:.2} SE over 0, 2.5, 5, 10 dB")));
    let v = metric_variance_awgn(AwgnChannel::from_ebn0(2.5, 0.5).unwrap().t());
    out.push(check("2b", v > 0.5, format!("variance at 2.5 dB = {v:.4} > 0.5")));
    out
}

fn criterion3() -> Vec<Check> {
    let (mut worst, mut at) = (0.0f64, 0.0);
    for db in parse_points("-2:0.01:12").unwrap() {
        let t = AwgnChannel::from_ebn0(db, 0.5).unwrap().t();
        let gap = (k_approx(t) - k_func(t)).abs();
        if gap > worst {
            (worst, at) = (gap, db);
        }
    }
    vec![check("3", worst <= 0.01, format!("max |K_approx - K| = {worst:.4} at {at:.2} dB vs 0.01"))]
}

fn criterion4() -> Vec<Check> {
    let exact = bec_stats(0.3, 10);
    let w = DiscreteChannel::bec(&BecChannel::new(0.3).unwrap());
    let quantized = bit_channel_stats(&w, 10, 16).unwrap();
    let gap = exact
        .iter()
        .zip(&quantized)
        .map(|(a, b)| (a.capacity - b.capacity).abs().max((a.variance - b.variance).abs()))
        .fold(0.0, f64::max);
    let spread = |n: usize| {
        let s = bec_stats(0.3, n);
        s.iter().filter(|b| b.variance > 0.05).count() as f64 / s.len() as f64
    };
    let (f6, f10) = (spread(6), spread(10));
    vec![
        check("4a", gap <= 1e-12, format!("max gap exact vs quantized pipeline {gap:.1e}")),
        check("4b", f10 < f6, format!("fraction with V > 0.05: n=6 {f6:.3}, n=10 {f10:.3}")),
    ]
}

/// Printed node means of the expected metric tree, by heap node number.
const TREE_MEANS: [(usize, f64); 23] = [
    (1, 0.7944), (2, 0.6386), (3, 0.9508), (4, 0.4198), (5, 0.8576), (6, 0.9054),
    (7, 0.9966), (8, 0.1891), (9, 0.6504), (10, 0.7406), (11, 0.9753), (12, 0.8230),
    (13, 0.9885), (14, 0.9933), (15, 1.0), (18, 0.4349), (19, 0.8663), (20, 0.5579),
    (21, 0.9238), (26, 0.9774), (27, 0.9998), (28, 0.9868), (29, 0.9999),
];

fn tree_misses(spec: &CodeSpec, ebn0: f64, rate: f64) -> (usize, f64) {
    let stats = awgn_tree(ebn0, rate, spec.n()).unwrap();
    let tree = expected_metric_tree(spec, &stats).unwrap();
    let mut misses = 0;
    let mut worst = 0.0f64;
    for (id, printed) in TREE_MEANS {
        let node = tree.node(id).expect("node of the fast decoding tree");
        let gap = (node.mean - printed).abs();
        worst = worst.max(gap);
        misses += usize::from(gap > 0.01);
    }
    (misses, worst)
}

fn criterion5() -> Vec<Check> {
    let spec = CodeConfig { length: 64, dimension: 32, profile: "mc".into(), ..CodeConfig::default() }
        .build()
        .unwrap();
    let (misses, worst) = tree_misses(&spec, 2.5, 0.5);
    // The printed root mean is the capacity of the channel at 4 dB.
    let (shifted_misses, shifted_worst) = tree_misses(&spec, 4.0, 0.5);
    let visits = classify_tree(spec.profile()).node_visits();
    vec![
        check(
            "5a",
            misses == 0,
            format!(
                "{misses}/{} printed means off by > 0.01 (worst {worst:.4}); at 4 dB: {shifted_misses} off (worst {shifted_worst:.4})",
                TREE_MEANS.len()
            ),
        ),
        check("5b", visits == 22, format!("node visits {visits} vs 22")),
    ]
}

fn recipe_code(name: &str) -> CodeConfig {
    match recipe(name).unwrap().kind {
        polarmetric::sim::RecipeKind::Sweep { code, .. } => code,
        _ => unreachable!("sweep recipe"),
    }
}

fn criterion6() -> Vec<Check> {
    let mut detail = Vec::new();
    let mut exact_detail = Vec::new();
    let mut pass = true;
    for name in ["table3", "table1", "table4"] {
        let spec = recipe_code(name).build().unwrap();
        let ch = Channel::Awgn(AwgnChannel::from_ebn0(2.5, spec.rate()).unwrap());
        for arithmetic in [Arithmetic::MinSum, Arithmetic::Exact] {
            let mut scl = Decoder::new(&spec, DecoderConfig::new(Mode::Scl, 8).with_arithmetic(arithmetic)).unwrap();
            let mut fscl = Decoder::new(&spec, DecoderConfig::new(Mode::Fscl, 8).with_arithmetic(arithmetic)).unwrap();
            let mut llrs = vec![0.0; spec.len()];
            let mut mismatches = 0;
            for trial in 0..1000 {
                let mut rng = trial_rng(6, 0, trial);
                let data: Vec<u8> = (0..spec.k()).map(|_| rng.random_range(0..2)).collect();
                ch.transmit(&spec.encode(&data).unwrap(), &mut rng, &mut llrs);
                mismatches += usize::from(scl.decode(&llrs).unwrap().data != fscl.decode(&llrs).unwrap().data);
            }
            let label = format!("({},{}) {mismatches}", spec.len(), spec.k());
            if arithmetic == Arithmetic::MinSum {
                pass &= mismatches == 0;
                detail.push(label);
            } else {
                exact_detail.push(label);
            }
        }
    }
    vec![check(
        "6",
        pass,
        format!(
            "min-sum L=8 mismatches: {}; exact-update mismatches (informational): {}",
            detail.join(", "),
            exact_detail.join(", ")
        ),
    )]
}

fn criterion7() -> Vec<Check> {
    let spec = recipe_code("table1").build().unwrap();
    let ch = Channel::Awgn(AwgnChannel::from_ebn0(2.0, spec.rate()).unwrap());
    let config = |metric| DecoderConfig {
        metric,
        record_survivors: true,
        ..DecoderConfig::new(Mode::Scl, 8)
    };
    let mut polarized = Decoder::new(&spec, config(MetricForm::Polarized)).unwrap();
    let mut penalty = Decoder::new(&spec, config(MetricForm::Penalty)).unwrap();
    let mut llrs = vec![0.0; spec.len()];
    let mut differing = 0;
    for trial in 0..1000 {
        let mut rng = trial_rng(7, 0, trial);
        let data: Vec<u8> = (0..spec.k()).map(|_| rng.random_range(0..2)).collect();
        ch.transmit(&spec.encode(&data).unwrap(), &mut rng, &mut llrs);
        let a = polarized.decode(&llrs).unwrap().survivors;
        let b = penalty.decode(&llrs).unwrap().survivors;
        differing += usize::from(a != b);
    }
    vec![check("7", differing == 0, format!("{differing}/1000 trials with differing survivor sets"))]
}

/// Runs one series of a sweep recipe at the given points.
fn sweep(name: &str, label: &str, points: &[f64], run: &RunConfig) -> Vec<ReportRow> {
    let (_, mut config) = recipe(name)
        .unwrap()
        .sweep_configs(run)
        .into_iter()
        .find(|(l, _)| l == label)
        .unwrap_or_else(|| panic!("{name} has no series {label}"));
    config.channel.points = points.to_vec();
    Simulation::new(config).unwrap().run_sweep().unwrap().rows
}

fn fixed(trials: u64) -> RunConfig {
    RunConfig { trials, min_errors: 0, seed: 2024, workers: 0 }
}

fn sort_check(id: &'static str, what: &str, rows: &[ReportRow], targets: &[f64]) -> Check {
    let mut pass = true;
    let parts: Vec<String> = rows
        .iter()
        .zip(targets)
        .map(|(r, &t)| {
            pass &= within(r.avg_sorts, t, SORT_TOL);
            format!("{} dB {:.2} vs {t}", r.ebn0_db, r.avg_sorts)
        })
        .collect();
    check(id, pass, format!("{what}: {}", parts.join("; ")))
}

fn criterion8() -> Vec<Check> {
    let points = [0.0, 2.0, 3.5];
    let run = fixed(10_000);
    let pf = sweep("table1", "pfscl_L32_mt-10", &points, &run);
    let vp = sweep("table1", "vpscl_L32_pth1e-6", &points, &run);
    vec![
        sort_check("8a", "PFSCL L=32", &pf, &[65.93, 49.89, 32.78]),
        sort_check("8b", "VPSCL L=32", &vp, &[32.10, 32.15, 32.32]),
    ]
}

fn criterion9() -> Vec<Check> {
    let run = fixed(2_000);
    let pf = sweep("table2", "pfscl_L4_mt-10", &[3.0], &run);
    let vp = sweep("table2", "vpscl_L4_pth1e-4", &[2.0], &run);
    let a = sort_check("9", "PFSCL L=4", &pf, &[28.04]);
    let b = sort_check("9", "VPSCL L=4 P_th 1e-4", &vp, &[42.11]);
    vec![check("9", a.pass && b.pass, format!("{}; {}", a.detail, b.detail))]
}

fn criterion10() -> Vec<Check> {
    let run = fixed(10_000);
    let t3 = sweep("table3", "pfscl_L8_mt-10", &[4.0], &run);
    let t4 = sweep("table4", "pfscl_L32_mt-15", &[4.5], &run);
    let visits = classify_tree(recipe_code("table4").build().unwrap().profile()).node_visits();
    vec![
        sort_check("10a", "PAC(64,32) PFSCL L=8", &t3, &[14.87]),
        sort_check("10b", "PAC(128,99) PFSCL L=32", &t4, &[42.66]),
        check("10c", visits == 28, format!("PAC(128,99) node visits {visits} vs 28")),
    ]
}

fn criterion11() -> Vec<Check> {
    let run = RunConfig { trials: 200_000, min_errors: 200, seed: 11, workers: 0 };
    let cases = [
        ("table1", 1.5, ["scl_L32", "pfscl_L32_mt-10", "vpscl_L32_pth1e-6"], "fig12"),
        ("table2", 1.5, ["scl_L4", "pfscl_L4_mt-10", "vpscl_L4_pth1e-6"], "fig13"),
        ("table3", 2.0, ["scl_L8", "pfscl_L8_mt-10", "vpscl_L8_pth1e-6"], "fig14"),
        ("table4", 3.0, ["scl_L32", "pfscl_L32_mt-15", "vpscl_L32_pth1e-6"], "fig15"),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (_, point, labels, fig) in cases {
        let rows: Vec<ReportRow> = labels.iter().map(|l| sweep(fig, l, &[point], &run)[0].clone()).collect();
        let base = &rows[0];
        let mut text = format!("{fig} {point} dB SCL {:.2e} ({} err)", base.fer, base.frame_errors);
        for r in &rows[1..] {
            let ratio = r.fer / base.fer;
            pass &= ratio <= 1.15 && r.frame_errors >= 200 && r.fer >= 1e-3;
            text.push_str(&format!(", ratio {ratio:.3} ({} err)", r.frame_errors));
        }
        pass &= base.frame_errors >= 200;
        parts.push(text);
    }
    vec![check("11", pass, parts.join("; "))]
}

fn criterion12() -> Vec<Check> {
    let spec = recipe_code("table3").build().unwrap();
    let awgn = AwgnChannel::from_ebn0(2.5, spec.rate()).unwrap();
    let stats = bit_channel_stats(&quantize_awgn(&awgn, RECIPE_ALPHABET).unwrap(), spec.n(), RECIPE_ALPHABET).unwrap();
    let ch = Channel::Awgn(awgn);
    let config = DecoderConfig { record_increments: true, ..DecoderConfig::new(Mode::Sc, 1) };
    let mut decoder = Decoder::new(&spec, config).unwrap();
    let margins = [0.5, 1.0, 2.0];
    let mut exceed = vec![[0u64; 3]; spec.len()];
    let mut llrs = vec![0.0; spec.len()];
    let (mut correct, mut trial) = (0u64, 0u64);
    while correct < 100_000 {
        let mut rng = trial_rng(12, 0, trial);
        trial += 1;
        let data: Vec<u8> = (0..spec.k()).map(|_| rng.random_range(0..2)).collect();
        ch.transmit(&spec.encode(&data).unwrap(), &mut rng, &mut llrs);
        let out = decoder.decode(&llrs).unwrap();
        if out.data != data {
            continue;
        }
        correct += 1;
        for (i, &phi) in out.increments.as_ref().unwrap().iter().enumerate() {
            for (k, m) in margins.iter().enumerate() {
                exceed[i][k] += u64::from((phi - stats[i].capacity).abs() >= *m);
            }
        }
    }
    let n = correct as f64;
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    for (i, counts) in exceed.iter().enumerate() {
        for (k, m) in margins.iter().enumerate() {
            let p = counts[k] as f64 / n;
            let sd = (p * (1.0 - p) / n).sqrt();
            let bound = stats[i].variance / (m * m) + 3.0 * sd;
            violations += usize::from(p > bound);
            tightest = tightest.min(bound - p);
        }
    }
    vec![check(
        "12",
        violations == 0,
        format!("{violations} violations over {} positions x 3 margins, {correct} correct decodes, smallest slack {tightest:.2e}", spec.len()),
    )]
}

fn main() -> ExitCode {
    let criteria: [(usize, Criterion); 12] = [
        (1, criterion1),
        (2, criterion2),
        (3, criterion3),
        (4, criterion4),
        (5, criterion5),
        (6, criterion6),
        (7, criterion7),
        (8, criterion8),
        (9, criterion9),
        (10, criterion10),
        (11, criterion11),
        (12, criterion12),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut unexpected = Vec::new();
    for (number, run) in criteria {
        if only.is_some_and(|o| o != number) {
            continue;
        }
        let start = Instant::now();
        let checks = run();
        let pass = checks.iter().all(|c| c.pass);
        let details: Vec<String> = checks
            .iter()
            .map(|c| format!("[{} {}] {}", c.id, if c.pass { "ok" } else { "miss" }, c.detail))
            .collect();
        println!(
            "criterion {number}: {} ({:.1}s) {}",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            details.join(" ")
        );
        for c in checks.iter().filter(|c| !c.pass) {
            if KNOWN_DEVIATIONS.contains(&c.id) {
                println!("  {}: documented deviation", c.id);
            } else {
                unexpected.push(c.id);
            }
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
