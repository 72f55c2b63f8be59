use std::path::{Path, PathBuf};

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

use super::{stream_rng, ImpulseResponse, INPUT_STREAM, NOISE_STREAM};

/// Samples discarded from the start of an AR(1) stream so that the zero
/// initial state has died out.
pub const DEFAULT_WARMUP: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub enum SignalKind {
    WhiteGaussian,
    /// `x(k) = pole x(k-1) + n(k)`.
    Ar1 {
        pole: f64,
    },
    /// Raw 16-bit signed little-endian mono PCM.
    PcmFile {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub kind: SignalKind,
    /// Variance of the driving Gaussian noise (synthetic kinds only).
    pub variance: f64,
    /// Leading samples dropped from AR(1) streams.
    pub warmup: usize,
}

impl SignalSpec {
    pub fn white(variance: f64) -> Self {
        Self {
            kind: SignalKind::WhiteGaussian,
            variance,
            warmup: DEFAULT_WARMUP,
        }
    }

    pub fn ar1(pole: f64, variance: f64) -> Self {
        Self {
            kind: SignalKind::Ar1 { pole },
            variance,
            warmup: DEFAULT_WARMUP,
        }
    }

    pub fn pcm(path: impl Into<PathBuf>) -> Self {
        Self {
            kind: SignalKind::PcmFile { path: path.into() },
            variance: 1.0,
            warmup: 0,
        }
    }

    /// Stationary input power implied by the spec; `None` for recorded data.
    pub fn nominal_power(&self) -> Option<f64> {
        match &self.kind {
            SignalKind::WhiteGaussian => Some(self.variance),
            SignalKind::Ar1 { pole } => Some(self.variance / (1.0 - pole * pole)),
            SignalKind::PcmFile { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            SignalKind::Ar1 { pole } if !(pole.abs() < 1.0) => Err(Error::InvalidParameter(
                format!("AR(1) pole {pole} must satisfy |pole| < 1"),
            )),
            SignalKind::WhiteGaussian | SignalKind::Ar1 { .. }
                if !(self.variance > 0.0) || !self.variance.is_finite() =>
            {
                Err(Error::InvalidParameter(format!(
                    "input variance {} must be > 0",
                    self.variance
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Produces `n` input samples. Synthetic kinds are a pure function of
/// `(spec, n, seed)`.
pub fn generate_input(spec: &SignalSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be > 0".into()));
    }
    let sd = spec.variance.sqrt();
    match &spec.kind {
        SignalKind::WhiteGaussian => {
            let mut rng = stream_rng(seed, INPUT_STREAM);
            Ok((0..n)
                .map(|_| sd * Distribution::<f64>::sample(&StandardNormal, &mut rng))
                .collect())
        }
        SignalKind::Ar1 { pole } => {
            let mut rng = stream_rng(seed, INPUT_STREAM);
            let mut state = 0.0f64;
            let mut out = Vec::with_capacity(n);
            for k in 0..n + spec.warmup {
                let drive: f64 = StandardNormal.sample(&mut rng);
                state = pole * state + sd * drive;
                if k >= spec.warmup {
                    out.push(state);
                }
            }
            Ok(out)
        }
        SignalKind::PcmFile { path } => {
            let mut samples = pcm_load(path)?;
            if samples.len() < n {
                return Err(Error::BadFile {
                    path: path.clone(),
                    message: format!("{} samples available, {n} requested", samples.len()),
                });
            }
            samples.truncate(n);
            Ok(samples)
        }
    }
}

/// Decodes raw s16le mono PCM to `[-1, 1)` by dividing by 32768.
pub fn pcm_load(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |message: &str| Error::BadFile {
        path: path.to_path_buf(),
        message: message.into(),
    };
    if bytes.is_empty() {
        return Err(bad("empty PCM file"));
    }
    if bytes.len() % 2 != 0 {
        return Err(bad("odd byte count in 16-bit PCM file"));
    }
    Ok(bytes
        .chunks_exact(2)
        .map(|b| f64::from(i16::from_le_bytes([b[0], b[1]])) / 32768.0)
        .collect())
}

/// Additive noise at a fixed SNR relative to the clean system output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// `f64::INFINITY` disables the noise.
    pub snr_db: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            snr_db: f64::INFINITY,
            seed: 0,
        }
    }
}

/// Noisy desired signal together with its noise-free part.
#[derive(Debug, Clone, PartialEq)]
pub struct Desired {
    pub y: Vec<f64>,
    pub clean: Vec<f64>,
}

/// `clean(k) = sum_i h(i) x(k - i)` with zero prehistory; output has the
/// length of `x`.
pub fn convolve(h: &[f64], x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|k| {
            h.iter()
                .take(k + 1)
                .enumerate()
                .map(|(i, &hi)| hi * x[k - i])
                .sum()
        })
        .collect()
}

/// Mean-removed variance `sum (v - mean)^2 / n`.
pub fn sample_variance(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n
}

/// Adds i.i.d. Gaussian noise with variance `var(clean) 10^(-snr/10)`.
pub fn add_noise(clean: &[f64], noise: &NoiseModel) -> Result<Vec<f64>> {
    if noise.snr_db == f64::INFINITY {
        return Ok(clean.to_vec());
    }
    if !noise.snr_db.is_finite() {
        return Err(Error::InvalidParameter(format!("SNR {} dB", noise.snr_db)));
    }
    let power = sample_variance(clean);
    if !(power > 0.0) {
        return Err(Error::InvalidParameter(
            "clean signal has zero variance; SNR is undefined".into(),
        ));
    }
    let sd = (power * 10f64.powf(-noise.snr_db / 10.0)).sqrt();
    let mut rng = stream_rng(noise.seed, NOISE_STREAM);
    Ok(clean
        .iter()
        .map(|&c| c + sd * Distribution::<f64>::sample(&StandardNormal, &mut rng))
        .collect())
}

pub fn desired_signal(h: &ImpulseResponse, x: &[f64], noise: &NoiseModel) -> Result<Desired> {
    let clean = convolve(h.taps(), x);
    let y = add_noise(&clean, noise)?;
    Ok(Desired { y, clean })
}
