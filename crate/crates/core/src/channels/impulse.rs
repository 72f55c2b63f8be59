use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};

use super::{stream_rng, CHANNEL_STREAM};

/// Taps `h(0), h(1), ...` of the unknown system.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse {
    taps: Vec<f64>,
    pub label: String,
}

impl ImpulseResponse {
    pub fn new(taps: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidParameter(
                "impulse response has no taps".into(),
            ));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("impulse response"));
        }
        if taps.iter().all(|&t| t == 0.0) {
            return Err(Error::InvalidParameter(
                "impulse response is all zero".into(),
            ));
        }
        Ok(Self {
            taps,
            label: label.into(),
        })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.taps.iter().map(|t| t * t).sum::<f64>().sqrt()
    }
}

/// Reads one decimal coefficient per line, `h(0)` first. Lines starting with
/// `#` and blank lines are skipped.
pub fn load_impulse_response(path: impl AsRef<Path>) -> Result<ImpulseResponse> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut taps = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message: format!("not a number: {line:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: "non-finite coefficient".into(),
            });
        }
        taps.push(v);
    }
    if taps.is_empty() {
        return Err(Error::BadFile {
            path: path.to_path_buf(),
            message: "no coefficients".into(),
        });
    }
    if taps.iter().all(|&t| t == 0.0) {
        return Err(Error::BadFile {
            path: path.to_path_buf(),
            message: "all coefficients are zero".into(),
        });
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    ImpulseResponse::new(taps, label)
}

/// Writes `h` in the format read by [`load_impulse_response`], 17
/// significant digits per tap.
pub fn write_impulse_response(h: &ImpulseResponse, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    if !h.label.is_empty() {
        let _ = writeln!(out, "# {}", h.label.replace('\n', " "));
    }
    for t in h.taps() {
        let _ = writeln!(out, "{t:.16e}");
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// `active` taps at distinct random positions with amplitude
/// `+-exp(-decay * position) * u`, `u` uniform on `(0, 1]`; every other tap
/// is exactly zero.
pub fn synth_sparse_channel(
    taps: usize,
    active: usize,
    decay: f64,
    seed: u64,
) -> Result<ImpulseResponse> {
    if active == 0 || active > taps {
        return Err(Error::InvalidParameter(format!(
            "active taps {active} must lie in 1..={taps}"
        )));
    }
    if !(decay >= 0.0) || !decay.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "decay {decay} must be >= 0"
        )));
    }
    let mut rng = stream_rng(seed, CHANNEL_STREAM);
    let mut positions = sample(&mut rng, taps, active).into_vec();
    positions.sort_unstable();
    let mut h = vec![0.0; taps];
    for pos in positions {
        let magnitude = 1.0 - rng.gen::<f64>();
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        h[pos] = sign * (-decay * pos as f64).exp() * magnitude;
    }
    ImpulseResponse::new(h, format!("sparse-{taps}-{active}-seed{seed}"))
}

/// Delays `h` by `shift_by` samples and zero-pads it to `pad_to` taps.
/// Zero taps pushed past the end are dropped; nonzero ones are an error.
pub fn pad_and_shift(
    h: &ImpulseResponse,
    pad_to: usize,
    shift_by: usize,
) -> Result<ImpulseResponse> {
    if pad_to == 0 {
        return Err(Error::InvalidParameter(
            "pad length must be at least 1".into(),
        ));
    }
    let mut out = vec![0.0; pad_to];
    for (i, &t) in h.taps().iter().enumerate() {
        let j = i + shift_by;
        if j < pad_to {
            out[j] = t;
        } else if t != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tap {i} would move to {j}, past length {pad_to}"
            )));
        }
    }
    ImpulseResponse::new(out, h.label.clone())
}
