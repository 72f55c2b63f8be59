//! Acceptance criteria 1-10. Each check prints one `criterion N: PASS|FAIL`
//! line with the measured quantities; the process fails if any check fails.

use std::path::PathBuf;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparseid::channels::{generate_input, sample_variance, SignalSpec};
use sparseid::harness::{
    magnitude_cosine, misalignment, proxy_diagnostic, quantile, run_ensemble_with,
    sample_necessary_condition, Ensemble, Execution, ExperimentConfig, ProxyOptions,
    RealizationData, Scenario, ShiftConfig,
};
use sparseid::proportionate::{ipapa_gains, proportionate_apa_update};
use sparseid::{ApaParams, DbIpapa, FilterState, GainParams, ProportionateVector, RegressorBuffer};

fn report(n: u32, pass: bool, detail: String) {
    println!(
        "criterion {n}: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn repo_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn baseline_config() -> ExperimentConfig {
    ExperimentConfig::load(repo_file("configs/sparse_ar1.toml"), &[])
        .expect("baseline config loads")
}

fn white(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| rng.sample(rand_distr::StandardNormal))
        .collect()
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}

fn criterion_01_equivalence() -> bool {
    let started = Instant::now();
    let taps = 64;
    let mut h = vec![0.0; taps];
    for (i, v) in [(2, 1.0), (9, -0.6), (30, 0.3), (51, 0.1)] {
        h[i] = v;
    }
    let xs = white(10_000, 101);
    let noise = white(10_000, 102);

    let p = ApaParams::new(0.5, 0.01, 1).unwrap();
    let mut buf = RegressorBuffer::new(taps, 1).unwrap();
    let mut apa = FilterState::zeros(taps).unwrap();
    let mut nlms = FilterState::zeros(taps).unwrap();
    let mut worst_nlms = 0.0f64;
    for (k, &x) in xs.iter().enumerate() {
        buf.push(x).unwrap();
        let y: f64 = buf.window().iter().zip(&h).map(|(u, v)| u * v).sum::<f64>() + 0.03 * noise[k];
        apa.apa_update(&buf, &[y], &p).unwrap();
        nlms.nlms_update(&buf, y, &p).unwrap();
        worst_nlms = worst_nlms.max(max_dev(apa.coefficients(), nlms.coefficients()));
    }

    let (order, delta) = (3, 0.04);
    let uniform = ProportionateVector::uniform(taps, 1.0 / taps as f64).unwrap();
    let prop = ApaParams::new(0.4, delta, order).unwrap();
    let plain = ApaParams::new(0.4, delta * taps as f64, order).unwrap();
    let mut buf = RegressorBuffer::new(taps, order).unwrap();
    let mut a = FilterState::zeros(taps).unwrap();
    let mut b = FilterState::zeros(taps).unwrap();
    let mut worst_uniform = 0.0f64;
    for (k, &x) in xs.iter().enumerate() {
        buf.push(x).unwrap();
        let y: Vec<f64> = buf
            .columns()
            .enumerate()
            .map(|(j, col)| {
                let n = if k >= j { noise[k - j] } else { 0.0 };
                col.iter().zip(&h).map(|(u, v)| u * v).sum::<f64>() + 0.03 * n
            })
            .collect();
        proportionate_apa_update(&mut a, &uniform, &buf, &y, &prop).unwrap();
        b.apa_update(&buf, &y, &plain).unwrap();
        worst_uniform = worst_uniform.max(max_dev(a.coefficients(), b.coefficients()));
    }
    let elapsed = started.elapsed();
    let pass = worst_nlms <= 1e-12 && worst_uniform <= 1e-10 && elapsed < Duration::from_secs(5);
    report(
        1,
        pass,
        format!("apa1_vs_nlms={worst_nlms:.3e} uniform_vs_apa={worst_uniform:.3e} runtime={elapsed:.2?}"),
    );
    pass
}

/// Delayed register contents at sample `k` read straight off the history.
fn delayed_snapshot(history: &[Vec<f64>], k: usize, period: usize) -> Vec<f64> {
    let last_refresh = (k / period) * period;
    if last_refresh < period {
        history[0].clone()
    } else {
        history[last_refresh - period].clone()
    }
}

fn oracle_db_gains(w: &[f64], delayed: &[f64], alpha: f64, epsilon: f64) -> Vec<f64> {
    let l = w.len() as f64;
    let deltas: Vec<f64> = w.iter().zip(delayed).map(|(a, b)| (a - b).abs()).collect();
    let w_mx = w.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let d_mx = deltas.iter().cloned().fold(0.0, f64::max);
    let k_mx = if w_mx + d_mx == 0.0 {
        0.0
    } else {
        (d_mx * d_mx + w_mx * w_mx) / (d_mx + w_mx)
    };
    deltas
        .iter()
        .map(|d| (1.0 - alpha) / (2.0 * l) + (1.0 + alpha) * d / (k_mx + epsilon))
        .collect()
}

fn scripted_input(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let k = k as f64;
            (0.7 * k).sin() + 0.5 * (1.3 * k + 0.4).cos() - 0.2 * ((k * 0.37) % 1.0)
        })
        .collect()
}

fn criterion_02_gain_identities() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_sum = 0.0f64;
    let mut floor_violations = 0;
    for trial in 0..1000 {
        let taps = rng.gen_range(1..=256);
        let alpha = rng.gen_range(-1.0..1.0);
        let mut w: Vec<f64> = (0..taps)
            .map(|_| {
                if trial % 4 == 0 && rng.gen_bool(0.9) {
                    0.0
                } else {
                    rng.gen_range(-2.0..2.0)
                }
            })
            .collect();
        // the proportional term needs at least one nonzero tap
        let pick = rng.gen_range(0..taps);
        w[pick] = rng.gen_range(0.1..2.0);
        let params = GainParams {
            alpha,
            epsilon: 0.0,
        };
        let g = ipapa_gains(&w, &params);
        let floor = (1.0 - alpha) / (2.0 * taps as f64);
        worst_sum = worst_sum.max((g.sum() - 1.0).abs());
        floor_violations += g
            .gains()
            .iter()
            .filter(|&&v| v < floor * (1.0 - 1e-15))
            .count();
    }

    let (taps, period, eps) = (4, 4, 0.01);
    let h = [0.9, 0.0, -0.35, 0.05];
    let xs = scripted_input(10 * period + 5);
    let mut mismatches = 0;
    for &alpha in &[-1.0, -0.5, 0.0, 0.5, 1.0] {
        let mut db = DbIpapa::new(
            &[0.0; 4],
            period,
            ApaParams::new(0.3, 0.02, 2).unwrap(),
            GainParams::new(alpha, eps).unwrap(),
        )
        .unwrap();
        let mut w = FilterState::zeros(taps).unwrap();
        let mut buf = RegressorBuffer::new(taps, 2).unwrap();
        let mut history = Vec::new();
        let mut prev_y = 0.0;
        for (k, &x) in xs.iter().enumerate() {
            buf.push(x).unwrap();
            let y: f64 = buf.window().iter().zip(&h).map(|(a, b)| a * b).sum();
            history.push(w.coefficients().to_vec());
            let expect = oracle_db_gains(
                w.coefficients(),
                &delayed_snapshot(&history, k, period),
                alpha,
                eps,
            );
            db.step(&mut w, &buf, &[y, prev_y]).unwrap();
            prev_y = y;
            if db.gains() != expect.as_slice() {
                mismatches += 1;
            }
        }
    }
    let pass = worst_sum <= 1e-12 && floor_violations == 0 && mismatches == 0;
    report(
        2,
        pass,
        format!("ipapa_sum_dev={worst_sum:.3e} floor_violations={floor_violations} db_mismatches={mismatches}"),
    );
    pass
}

fn criterion_03_snapshot_age() -> bool {
    let mut out_of_range = 0;
    let mut wrong_register = 0;
    let mut checked = 0;
    for &period in &[4usize, 7, 16] {
        let taps = 4;
        let xs = scripted_input(10 * period);
        let mut db = DbIpapa::new(
            &vec![0.0; taps],
            period,
            ApaParams::new(0.3, 0.02, 1).unwrap(),
            GainParams::new(0.0, 0.01).unwrap(),
        )
        .unwrap();
        let mut w = FilterState::zeros(taps).unwrap();
        let mut buf = RegressorBuffer::new(taps, 1).unwrap();
        let mut history = Vec::new();
        for (k, &x) in xs.iter().enumerate() {
            buf.push(x).unwrap();
            history.push(w.coefficients().to_vec());
            db.step(&mut w, &buf, &[0.7 * x]).unwrap();
            if k < 2 * period {
                continue;
            }
            checked += 1;
            let age = db.store().previous_age().unwrap() as usize;
            if !(period..2 * period).contains(&age) {
                out_of_range += 1;
            }
            if db.store().previous() != history[k - age].as_slice() {
                wrong_register += 1;
            }
        }
    }
    let pass = out_of_range == 0 && wrong_register == 0 && checked > 0;
    report(
        3,
        pass,
        format!("checked={checked} out_of_range={out_of_range} wrong_register={wrong_register}"),
    );
    pass
}

fn criterion_04_derivation_check() -> bool {
    let r = sample_necessary_condition(1_000_000, 404);
    let pass = r.samples == 1_000_000 && r.monotone > 0 && r.violations == 0;
    report(
        4,
        pass,
        format!(
            "samples={} monotone={} violations={}",
            r.samples, r.monotone, r.violations
        ),
    );
    pass
}

/// Brute-force proxy check: plain NLMS written out on the harness data,
/// with its own permutation control.
fn brute_force_proxy(cfg: &ExperimentConfig, window: usize) -> (f64, f64) {
    let scenario = Scenario::from_config(cfg).unwrap();
    let data = RealizationData::generate(cfg, &scenario, 0).unwrap();
    let h = scenario.initial.taps().to_vec();
    let taps = h.len();
    let alg = &cfg.algorithms[0];
    let delta = alg.delta_rule.resolve(data.input_variance, taps).unwrap();
    let mu = alg.mu;

    let n = data.x.len();
    let mut w = vec![0.0; taps];
    let mut x = vec![0.0; taps];
    let mut curve = Vec::with_capacity(n);
    let mut snapshots = Vec::new();
    for k in 0..n {
        x.rotate_right(1);
        x[0] = data.x[k];
        curve.push(misalignment(&h, &w).unwrap());
        if k % window == 0 {
            snapshots.push((k, w.clone()));
        }
        let e = data.y[k] - x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        let step = mu * e / (x.iter().map(|a| a * a).sum::<f64>() + delta);
        for (wi, xi) in w.iter_mut().zip(&x) {
            *wi += step * xi;
        }
    }
    let tail = n / 10;
    let final_level = curve[n - tail..].iter().sum::<f64>() / tail as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut cosines = Vec::new();
    let mut control = Vec::new();
    for pair in snapshots.windows(2) {
        let ((k, w0), (_, w1)) = (&pair[0], &pair[1]);
        if curve[*k] < final_level + 10.0 {
            continue;
        }
        let proxy: Vec<f64> = w1.iter().zip(w0).map(|(a, b)| (a - b) / mu).collect();
        let err: Vec<f64> = h.iter().zip(w0).map(|(a, b)| (a - b).abs()).collect();
        if let Some(c) = magnitude_cosine(&proxy, &err) {
            cosines.push(c);
            let mut shuffled = err.clone();
            for _ in 0..200 {
                shuffled.shuffle(&mut rng);
                control.extend(magnitude_cosine(&proxy, &shuffled));
            }
        }
    }
    (
        quantile(&mut cosines, 0.5).unwrap(),
        quantile(&mut control, 0.95).unwrap(),
    )
}

fn criterion_05_proxy_fidelity() -> bool {
    let started = Instant::now();
    let cfg = ExperimentConfig::proxy_default();
    let taps = cfg.build_channel().unwrap().len();
    let active = cfg
        .build_channel()
        .unwrap()
        .taps()
        .iter()
        .filter(|v| **v != 0.0)
        .count();
    let (oracle_median, oracle_p95) = brute_force_proxy(&cfg, 64);
    let mut opts = ProxyOptions::for_taps(taps);
    opts.window = 64;
    let r = proxy_diagnostic(&cfg, &opts).unwrap();
    let median = r.median_transient_cosine.unwrap_or(f64::NAN);
    let p95 = r.control_p95.unwrap_or(f64::NAN);
    let elapsed = started.elapsed();
    let pass = taps == 64
        && active == 8
        && median > oracle_p95
        && r.passed()
        && (median - oracle_median).abs() < 1e-6
        && elapsed < Duration::from_secs(30);
    report(
        5,
        pass,
        format!(
            "median_transient_cosine={median:.4} oracle_median={oracle_median:.4} \
             oracle_control_p95={oracle_p95:.4} harness_control_p95={p95:.4} runtime={elapsed:.2?}"
        ),
    );
    pass
}

struct BaselineRun {
    ensemble: Ensemble,
    elapsed: Duration,
}

fn baseline_run() -> &'static BaselineRun {
    static RUN: OnceLock<BaselineRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let cfg = baseline_config();
        let started = Instant::now();
        let ensemble = run_ensemble_with(&cfg, Execution::Parallel).expect("baseline ensemble");
        BaselineRun {
            ensemble,
            elapsed: started.elapsed(),
        }
    })
}

fn curve<'a>(e: &'a Ensemble, label: &str) -> &'a sparseid::harness::MisalignmentCurve {
    e.mean.iter().find(|c| c.algorithm == label).expect(label)
}

fn criterion_06_convergence_ordering() -> bool {
    let cfg = baseline_config();
    let h = cfg.build_channel().unwrap();
    let active = h.taps().iter().filter(|v| **v != 0.0).count();
    let setup_ok = h.len() == 512
        && active == 16
        && cfg.experiment.realizations == 20
        && cfg
            .algorithms
            .iter()
            .all(|a| a.mu == 0.15 && a.projection_order == 2 && a.epsilon == 0.01);

    let run = baseline_run();
    let reach = |label| curve(&run.ensemble, label).iterations_to_reach(-20.0);
    let (db, ip, nl) = (reach("dbipapa"), reach("ipapa"), reach("nlms-equivalent"));
    let ordered = matches!((db, ip, nl), (Some(a), Some(b), Some(c)) if a < b && b < c);
    let pass = setup_ok && ordered && run.elapsed < Duration::from_secs(300);
    let show = |v: Option<usize>| v.map_or_else(|| "none".to_string(), |v| v.to_string());
    report(
        6,
        pass,
        format!(
            "iters_to_-20db dbipapa={} ipapa={} nlms-equivalent={} runtime={:.2?}",
            show(db),
            show(ip),
            show(nl),
            run.elapsed
        ),
    );
    pass
}

fn criterion_07_tracking() -> bool {
    let mut cfg = baseline_config();
    let (shift_at, end) = (15_000, 30_000);
    cfg.experiment.iterations = end;
    cfg.experiment.shift = Some(ShiftConfig {
        at_iteration: shift_at,
        by_samples: 50,
    });
    let ens = run_ensemble_with(&cfg, Execution::Parallel).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for c in &ens.mean {
        let pre = c.mean_over(shift_at - 2000..shift_at);
        let rise = c.values_db[shift_at] - pre;
        let post = c.mean_over(end - 1000..end);
        let ok = rise >= 10.0 && (post - pre).abs() <= 3.0;
        pass &= ok;
        parts.push(format!(
            "{}: pre={pre:.2} rise={rise:.2} end={post:.2}",
            c.algorithm
        ));
    }
    report(7, pass, parts.join("; "));
    pass
}

fn criterion_08_steady_state_variance() -> bool {
    let run = baseline_run();
    let db = curve(&run.ensemble, "dbipapa").tail_variance(2000);
    let ip = curve(&run.ensemble, "ipapa").tail_variance(2000);
    let pass = db <= ip;
    report(
        8,
        pass,
        format!("tail_variance dbipapa={db:.5} ipapa={ip:.5}"),
    );
    pass
}

fn criterion_09_signal_statistics() -> bool {
    let x = generate_input(&SignalSpec::ar1(0.8, 1.0), 1_000_000, 909).unwrap();
    let var = sample_variance(&x);
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let num: f64 = x.windows(2).map(|p| (p[0] - mean) * (p[1] - mean)).sum();
    let den: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let lag1 = num / den;
    let expect = 1.0 / (1.0 - 0.64);
    let rel = (var - expect).abs() / expect;
    let pass = rel <= 0.02 && (lag1 - 0.8).abs() <= 0.02;
    report(
        9,
        pass,
        format!("variance={var:.4} expected={expect:.4} rel_err={rel:.4} lag1={lag1:.4}"),
    );
    pass
}

fn criterion_10_determinism() -> bool {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_file("configs/sparse_ar1.toml");
    let run = |threads: &str, name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_sparseid"))
            .args(["run", "-c"])
            .arg(&cfg)
            .arg("-o")
            .arg(&out)
            .args([
                "--threads",
                threads,
                "--override",
                "experiment.iterations=2000",
                "--override",
                "experiment.realizations=6",
            ])
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        std::fs::read(out).unwrap()
    };
    let a = run("1", "a.csv");
    let b = run("1", "b.csv");
    let c = run("4", "c.csv");
    let d = run("0", "d.csv");
    let pass = a == b && a == c && a == d && !a.is_empty();
    report(
        10,
        pass,
        format!(
            "bytes={} repeat_identical={} threads4_identical={} all_cores_identical={}",
            a.len(),
            a == b,
            a == c,
            a == d
        ),
    );
    pass
}

fn main() {
    let checks: [(u32, fn() -> bool); 10] = [
        (1, criterion_01_equivalence),
        (2, criterion_02_gain_identities),
        (3, criterion_03_snapshot_age),
        (4, criterion_04_derivation_check),
        (5, criterion_05_proxy_fidelity),
        (6, criterion_06_convergence_ordering),
        (7, criterion_07_tracking),
        (8, criterion_08_steady_state_variance),
        (9, criterion_09_signal_statistics),
        (10, criterion_10_determinism),
    ];
    let mut failed = Vec::new();
    for (n, check) in checks {
        let passed = std::panic::catch_unwind(check).unwrap_or_else(|_| {
            report(n, false, "panicked".into());
            false
        });
        if !passed {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
