//! Numerical checks of the proportionate-gain derivation: the monotone
//! coefficient-error bound and the coefficient-difference proxy for the
//! time-averaged coefficient error.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::channels::{stream_rng, SignalKind};
use crate::error::{Error, Result};
use crate::proportionate::{monotone_error_holds, necessary_condition_check};
use rand_chacha::ChaCha8Rng;

use super::config::{AlgorithmName, ExperimentConfig};
use super::run::run_single_with_diagnostics;

const CONDITION_STREAM: u64 = 3;
const PERMUTATION_STREAM: u64 = 4;

/// Snapshot of the identification state at a checkpoint `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub iteration: usize,
    pub misalignment_db: f64,
    /// `h - w(k)`.
    pub h_err: Vec<f64>,
    /// `(w(k + N) - w(k)) / mu`; empty until the next checkpoint.
    pub proxy: Vec<f64>,
    /// Cosine between `|proxy|` and `|h_err|`; `None` when either is zero.
    pub cosine: Option<f64>,
    /// `x(k)^T G(k) x(k)`.
    pub sigma_gx2: f64,
    w_start: Vec<f64>,
}

impl DiagnosticsRecord {
    pub(crate) fn start(
        iteration: usize,
        misalignment_db: f64,
        h: &[f64],
        w: &[f64],
        sigma_gx2: f64,
    ) -> Self {
        Self {
            iteration,
            misalignment_db,
            h_err: h.iter().zip(w).map(|(a, b)| a - b).collect(),
            proxy: Vec::new(),
            cosine: None,
            sigma_gx2,
            w_start: w.to_vec(),
        }
    }

    pub(crate) fn finish(&mut self, w_later: &[f64], mu: f64) {
        if mu > 0.0 {
            self.proxy = w_later
                .iter()
                .zip(&self.w_start)
                .map(|(a, b)| (a - b) / mu)
                .collect();
        } else {
            self.proxy = vec![0.0; w_later.len()];
        }
        self.cosine = magnitude_cosine(&self.proxy, &self.h_err);
    }
}

/// Cosine similarity of `|a|` and `|b|`; `None` if either has zero norm.
pub fn magnitude_cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x.abs() * y.abs()).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Outcome of sampling the monotone-error implication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionReport {
    pub samples: usize,
    /// Samples where the step shrank the coefficient error.
    pub monotone: usize,
    /// Monotone samples that nevertheless exceed the gain bound.
    pub violations: usize,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.monotone > 0
    }
}

/// Draws random scalar instances `(h_err, g, x, e, mu, sigma_gx2)` and
/// counts cases where the error shrinks yet the gain exceeds its bound.
///
/// Magnitudes are log-uniform over several decades so the boundary region
/// is visited often.
pub fn sample_necessary_condition(samples: usize, seed: u64) -> ConditionReport {
    let mut rng = stream_rng(seed, CONDITION_STREAM);
    let log_uniform =
        |lo: f64, hi: f64, rng: &mut ChaCha8Rng| -> f64 { 10f64.powf(rng.gen_range(lo..hi)) };
    let mut monotone = 0;
    let mut violations = 0;
    for _ in 0..samples {
        let sign = |rng: &mut ChaCha8Rng| if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let h_err = sign(&mut rng) * log_uniform(-4.0, 1.0, &mut rng);
        let g = log_uniform(-4.0, 1.0, &mut rng);
        let x = sign(&mut rng) * log_uniform(-3.0, 1.0, &mut rng);
        let e = sign(&mut rng) * log_uniform(-3.0, 1.0, &mut rng);
        let mu = rng.gen_range(1e-3..2.0);
        let sigma = log_uniform(-2.0, 2.0, &mut rng);
        if monotone_error_holds(h_err, g, x, e, mu, sigma) {
            monotone += 1;
            let ok = necessary_condition_check(h_err, g, x, e, mu, sigma)
                .expect("positive mu and sigma");
            if !ok {
                violations += 1;
            }
        }
    }
    ConditionReport {
        samples,
        monotone,
        violations,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProxyCheckpoint {
    pub iteration: usize,
    pub misalignment_db: f64,
    pub cosine: Option<f64>,
    /// Still converging: misalignment at least `transient_margin_db` above
    /// the final level.
    pub transient: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProxyReport {
    pub window: usize,
    pub checkpoints: Vec<ProxyCheckpoint>,
    /// Checkpoints without a cosine (zero proxy or zero error).
    pub skipped: usize,
    /// Mean misalignment over the last tenth of the run.
    pub final_level_db: f64,
    pub median_transient_cosine: Option<f64>,
    /// 95th percentile of cosines against randomly permuted error
    /// magnitudes at the same transient checkpoints.
    pub control_p95: Option<f64>,
}

impl ProxyReport {
    pub fn passed(&self) -> bool {
        matches!((self.median_transient_cosine, self.control_p95), (Some(m), Some(c)) if m > c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxyOptions {
    pub window: usize,
    pub transient_margin_db: f64,
    pub permutations: usize,
}

impl ProxyOptions {
    pub fn for_taps(taps: usize) -> Self {
        Self {
            window: taps,
            transient_margin_db: 10.0,
            permutations: 200,
        }
    }
}

/// Checks the coefficient-difference proxy against the true coefficient
/// error on the first realization of `cfg`, which must hold a single NLMS
/// algorithm driven by white Gaussian input.
pub fn proxy_diagnostic(cfg: &ExperimentConfig, options: &ProxyOptions) -> Result<ProxyReport> {
    if cfg.algorithms.len() != 1 || cfg.algorithms[0].name != AlgorithmName::Nlms {
        return Err(Error::InvalidParameter(
            "proxy diagnostic requires exactly one nlms algorithm".into(),
        ));
    }
    if !matches!(cfg.input.to_spec().kind, SignalKind::WhiteGaussian) {
        return Err(Error::InvalidParameter(
            "proxy diagnostic requires white-gaussian input".into(),
        ));
    }
    if options.window == 0 {
        return Err(Error::InvalidParameter(
            "diagnostic window must be >= 1".into(),
        ));
    }
    let run = run_single_with_diagnostics(cfg, 0, 0, Some(options.window))?;
    let values = &run.curve.values_db;
    let tail = (values.len() / 10).max(1);
    let final_level_db = run.curve.mean_over(values.len() - tail..values.len());

    let mut rng = stream_rng(cfg.experiment.seed_base, PERMUTATION_STREAM);
    let mut transient_cos = Vec::new();
    let mut control = Vec::new();
    let mut skipped = 0;
    let mut checkpoints = Vec::with_capacity(run.diagnostics.len());
    for rec in &run.diagnostics {
        let transient = rec.misalignment_db >= final_level_db + options.transient_margin_db;
        if rec.cosine.is_none() {
            skipped += 1;
        }
        if let (Some(c), true) = (rec.cosine, transient) {
            transient_cos.push(c);
            let mut shuffled: Vec<f64> = rec.h_err.iter().map(|v| v.abs()).collect();
            for _ in 0..options.permutations {
                shuffled.shuffle(&mut rng);
                if let Some(cc) = magnitude_cosine(&rec.proxy, &shuffled) {
                    control.push(cc);
                }
            }
        }
        checkpoints.push(ProxyCheckpoint {
            iteration: rec.iteration,
            misalignment_db: rec.misalignment_db,
            cosine: rec.cosine,
            transient,
        });
    }
    Ok(ProxyReport {
        window: options.window,
        checkpoints,
        skipped,
        final_level_db,
        median_transient_cosine: quantile(&mut transient_cos, 0.5),
        control_p95: quantile(&mut control, 0.95),
    })
}

/// Linear-interpolated quantile; sorts `v` in place.
pub fn quantile(v: &mut [f64], q: f64) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}
