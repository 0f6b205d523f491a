//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use orbai_core::channel::{asymptotic_entropy_rate, modulate_bpsk, transmit};
use orbai_core::harness::{run_cell, simulate, BlerPoint, CellParams};
use orbai_core::{
    block_entropy_rate, entropy_rate, gm_noise, BitVec, Codeword, CrcPolynomial, Decoder,
    ExperimentConfig, GaussMarkovChannel, InfoWord, LinearCode, Modulation, PatternEnumerator,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cell(
    rho: f64,
    ebno_db: f64,
    b: usize,
    max_trials: u64,
    min_errors: u64,
    seed: u64,
) -> CellParams {
    CellParams {
        rho,
        ebno_db,
        b,
        modulation: Modulation::Bpsk,
        tau: 1_000_000,
        max_trials,
        min_errors,
        base_seed: seed,
    }
}

fn se_gap(a: &BlerPoint, b: &BlerPoint) -> (f64, f64) {
    let gap = a.bler - b.bler;
    let se = (a.standard_error().powi(2) + b.standard_error().powi(2)).sqrt();
    (gap, se)
}

fn describe(p: &BlerPoint) -> String {
    format!(
        "[{},{}] rho={} {}dB b={}: BLER={:.3e} ({}/{})",
        p.n, p.k, p.rho, p.ebno_db, p.b, p.bler, p.errors, p.trials
    )
}

/// 1. Pattern generator against brute-force subset ordering, μ = 1..=14.
fn pattern_oracle() -> Outcome {
    let start = Instant::now();
    let mut mismatched = Vec::new();
    for mu in 1..=14usize {
        let mut oracle: Vec<Vec<usize>> = (0u32..1 << mu)
            .map(|mask| (1..=mu).filter(|&r| mask >> (r - 1) & 1 == 1).collect())
            .collect();
        oracle.sort_by(|a: &Vec<usize>, b: &Vec<usize>| {
            let (wa, wb): (usize, usize) = (a.iter().sum(), b.iter().sum());
            wa.cmp(&wb).then(a.len().cmp(&b.len())).then(a.cmp(b))
        });
        let got: Vec<Vec<usize>> = PatternEnumerator::new(mu)
            .map(|p| p.ranks().to_vec())
            .collect();
        if got != oracle {
            mismatched.push(mu);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatched.is_empty() && elapsed < Duration::from_secs(10),
        format!("mismatched mu: {mismatched:?}, runtime {elapsed:.2?} (limit 10s)"),
    )
}

/// 2. Entropy rate against a numerical log-det, plus the b = 2 identity.
fn entropy_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let two_pi_e = (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    for _ in 0..50 {
        let n = rng.random_range(1..=64usize);
        let s2 = rng.random_range(0.1..=10.0);
        let rho = rng.random_range(0.0..=0.95);
        let channel = GaussMarkovChannel::new(rho, s2).unwrap();
        let c = DMatrix::from_fn(n, n, |i, j| s2 * rho.powi(i.abs_diff(j) as i32));
        let l = c.cholesky().expect("positive definite");
        let log_det = 2.0 * l.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let oracle = (n as f64 / 2.0 * two_pi_e + 0.5 * log_det) / n as f64;
        worst = worst.max((entropy_rate(n, &channel).unwrap() - oracle).abs());
    }
    let mut half_ok = true;
    for rho in [0.1, 0.5, 0.75, 0.95] {
        let channel = GaussMarkovChannel::new(rho, 1.7).unwrap();
        let white = block_entropy_rate(1, &channel).unwrap();
        let reduction_b2 = white - block_entropy_rate(2, &channel).unwrap();
        let reduction_full = white - asymptotic_entropy_rate(&channel);
        // Exact up to rounding of the entropy values themselves.
        half_ok &= (reduction_b2 - 0.5 * reduction_full).abs() <= 4.0 * f64::EPSILON * white.abs();
    }
    outcome(
        worst <= 1e-9 && half_ok,
        format!("max |error| = {worst:.2e} (tol 1e-9); b=2 half-reduction identity: {half_ok}"),
    )
}

/// Block-product log-likelihood of a word, with the closed-form 2×2 AR(1)
/// precision rather than the decoder's factorisation.
fn block_product_metric(y: &[f64], word: &BitVec, rho: f64, s2: f64) -> f64 {
    let level = |bit: bool| if bit { -1.0 } else { 1.0 };
    (0..y.len() / 2)
        .map(|blk| {
            let d0 = y[2 * blk] - level(word.get(2 * blk));
            let d1 = y[2 * blk + 1] - level(word.get(2 * blk + 1));
            -0.5 * (d0 * d0 - 2.0 * rho * d0 * d1 + d1 * d1) / (s2 * (1.0 - rho * rho))
        })
        .sum()
}

/// 3. Agreement with brute-force block-product ML on an [8,4] code.
fn ml_agreement() -> Outcome {
    let start = Instant::now();
    let code = LinearCode::rlc(8, 4, 7).unwrap();
    let codebook: Vec<Codeword> = (0u32..16)
        .map(|m| {
            let bits: Vec<u8> = (0..4).map(|i| (m >> i & 1) as u8).collect();
            code.encode(&InfoWord::new(BitVec::from_bits(&bits)))
                .unwrap()
        })
        .collect();
    let mut lines = Vec::new();
    let mut pass = true;
    for rho in [0.0, 0.5, 0.9] {
        let channel =
            GaussMarkovChannel::from_ebno(rho, 4.0, code.rate(), Modulation::Bpsk).unwrap();
        let s2 = channel.sigma2_real();
        let decoder = Decoder::new(&code, &channel, 2, 1 << 12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(300 + (rho * 10.0) as u64);
        let (mut agree, mut ties, mut other) = (0u32, 0u32, 0u32);
        let trials = 10_000;
        for _ in 0..trials {
            let sent = &codebook[rng.random_range(0..16)];
            let y = transmit(&modulate_bpsk(sent), &channel, &mut rng);
            let re: Vec<f64> = y.values.iter().map(|v| v.re).collect();
            let metrics: Vec<f64> = codebook
                .iter()
                .map(|c| block_product_metric(&re, c.bits(), rho, s2))
                .collect();
            let best = (0..16)
                .max_by(|&a, &b| metrics[a].total_cmp(&metrics[b]).then(b.cmp(&a)))
                .unwrap();
            let got = decoder
                .decode(&y)
                .unwrap()
                .codeword
                .expect("exhaustive search finds a codeword");
            if got == codebook[best] {
                agree += 1;
            } else {
                let got_metric = block_product_metric(&re, got.bits(), rho, s2);
                if (got_metric - metrics[best]).abs() < 1e-9 {
                    ties += 1;
                } else {
                    other += 1;
                }
            }
        }
        let rate = agree as f64 / trials as f64;
        pass &= rate >= 0.99;
        lines.push(format!(
            "rho={rho}: {:.2}% (ties {ties}, non-tie {other})",
            100.0 * rate
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    outcome(
        pass,
        format!("{} in {elapsed:.2?}; need >= 99%", lines.join("; ")),
    )
}

/// 4. AR(1) sample statistics at ρ = 0.5.
fn ar1_statistics() -> Outcome {
    let s2 = 1.3;
    let channel = GaussMarkovChannel::new(0.5, s2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let x: Vec<f64> = gm_noise(1_000_000, &channel, &mut rng)
        .iter()
        .map(|c| c.re)
        .collect();
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let mut pass = (var / s2 - 1.0).abs() <= 0.01;
    let mut lags = Vec::new();
    for lag in 1..=3usize {
        let m = x.len() - lag;
        let cov = (0..m)
            .map(|i| (x[i] - mean) * (x[i + lag] - mean))
            .sum::<f64>()
            / m as f64;
        let r = cov / var;
        pass &= (r - 0.5f64.powi(lag as i32)).abs() <= 0.01;
        lags.push(format!("{r:.4}"));
    }
    outcome(
        pass,
        format!("variance ratio {:.4} (±1%), lag-1..3 autocorrelation [{}] vs [0.5, 0.25, 0.125] (±0.01)", var / s2, lags.join(", ")),
    )
}

fn benchmark_point(k: usize, rho: f64) -> Outcome {
    let code = LinearCode::rlc(128, k, 1).unwrap();
    let p = run_cell(&code, &cell(rho, 3.7, 4, 1_000_000, 100, 5)).unwrap();
    let protocol = p.errors >= 100 || p.trials == 1_000_000;
    outcome(
        p.bler <= 2e-3 && protocol,
        format!("{} (limit 2e-3)", describe(&p)),
    )
}

/// 5. [128,110] RLC, b = 4, ρ = 0.5, 3.7 dB.
fn benchmark_rate_086() -> Outcome {
    benchmark_point(110, 0.5)
}

/// 6. [128,122] RLC, b = 4, ρ = 0.75, 3.7 dB.
fn benchmark_rate_095() -> Outcome {
    benchmark_point(122, 0.75)
}

/// 7. BLER falls with ρ at 3 dB, [128,110], b = 4.
fn correlation_trend() -> Outcome {
    let code = LinearCode::rlc(128, 110, 1).unwrap();
    let pts: Vec<BlerPoint> = [0.0, 0.25, 0.5, 0.75]
        .iter()
        .map(|&rho| run_cell(&code, &cell(rho, 3.0, 4, 200_000, 100, 7)).unwrap())
        .collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for w in pts.windows(2) {
        let (gap, se) = se_gap(&w[0], &w[1]);
        pass &= gap > 3.0 * se;
        parts.push(format!("{:.2}σ", gap / se));
    }
    let blers: Vec<String> = pts.iter().map(|p| format!("{:.2e}", p.bler)).collect();
    outcome(
        pass,
        format!(
            "BLER [{}], gaps [{}] (need > 3σ)",
            blers.join(", "),
            parts.join(", ")
        ),
    )
}

/// 8. Block-size trend at ρ = 0.5, [128,116], 3.7 dB.
fn block_size_trend() -> Outcome {
    let code = LinearCode::rlc(128, 116, 1).unwrap();
    let pts: Vec<BlerPoint> = [1usize, 2, 4, 8]
        .iter()
        .map(|&b| run_cell(&code, &cell(0.5, 3.7, b, 1_000_000, 100, 8)).unwrap())
        .collect();
    let (g12, s12) = se_gap(&pts[0], &pts[1]);
    let (g24, s24) = se_gap(&pts[1], &pts[2]);
    let (g48, s48) = se_gap(&pts[2], &pts[3]);
    let near_target = (3e-3..=3e-2).contains(&pts[2].bler);
    let pass = near_target && g12 > 3.0 * s12 && g24 > 3.0 * s24 && -g48 <= 3.0 * s48;
    let blers: Vec<String> = pts
        .iter()
        .map(|p| format!("b={}: {:.2e}", p.b, p.bler))
        .collect();
    outcome(
        pass,
        format!(
            "{}; gaps b1-b2 {:.1}σ, b2-b4 {:.1}σ, b4-b8 {:.1}σ",
            blers.join(", "),
            g12 / s12,
            g24 / s24,
            g48 / s48
        ),
    )
}

/// 9. RLC and CRC of the same dimensions perform alike.
fn code_agnosticism() -> Outcome {
    let rlc = LinearCode::rlc(128, 116, 1).unwrap();
    let crc = LinearCode::crc(128, 116, CrcPolynomial::CRC12).unwrap();
    let params = cell(0.5, 4.0, 2, 1_000_000, 200, 9);
    let a = run_cell(&rlc, &params).unwrap();
    let b = run_cell(&crc, &params).unwrap();
    let ratio = a.bler.max(b.bler) / a.bler.min(b.bler);
    outcome(
        ratio <= 1.5,
        format!(
            "RLC {:.3e}, CRC {:.3e}, ratio {ratio:.3} (limit 1.5)",
            a.bler, b.bler
        ),
    )
}

/// 10. `simulate` output is byte-identical across runs and worker counts.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::from_toml_str(
        r#"
code = "rlc"
n = 128
k = 116
seed = 1
rho = [0.25, 0.5]
ebno_db = [3.0, 3.5]
b = [2, 4]
max_trials = 3000
min_errors = 25
base_seed = 77
"#,
    )
    .unwrap();
    let mut files = Vec::new();
    for (i, threads) in [1usize, 4, 4].into_iter().enumerate() {
        let path = dir.path().join(format!("run{i}.csv"));
        cfg.output = Some(path.clone());
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| simulate(&cfg)).unwrap();
        files.push(std::fs::read(path).unwrap());
    }
    let same = files.windows(2).all(|w| w[0] == w[1]);
    outcome(
        same,
        format!(
            "3 runs (1, 4, 4 workers), {} bytes each, identical: {same}",
            files[0].len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("pattern generator oracle equivalence", pattern_oracle),
        ("entropy rate vs log-det oracle", entropy_oracle),
        ("ML-oracle agreement on [8,4] RLC", ml_agreement),
        ("AR(1) channel statistics", ar1_statistics),
        (
            "benchmark point: rate 0.86, rho 0.5, 3.7 dB",
            benchmark_rate_086,
        ),
        (
            "benchmark point: rate 0.95, rho 0.75, 3.7 dB",
            benchmark_rate_095,
        ),
        ("BLER decreases with rho", correlation_trend),
        ("block-size trend", block_size_trend),
        ("code agnosticism RLC vs CRC", code_agnosticism),
        ("determinism across runs and workers", determinism),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.iter().any(|f| *f == id || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} [{tag}] {name}: {} ({:.1?})",
            o.detail,
            start.elapsed()
        );
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
