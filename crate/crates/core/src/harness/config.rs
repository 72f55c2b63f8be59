use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channels::{
    load_impulse_response, pad_and_shift, synth_sparse_channel, ImpulseResponse, SignalKind,
    SignalSpec, DEFAULT_WARMUP,
};
use crate::error::{Error, Result};

/// Complete description of an identification experiment.
///
/// Parsed from TOML with every table closed to unknown keys:
///
/// ```toml
/// [experiment]
/// iterations = 20000
/// realizations = 20
/// seed_base = 1
/// snr_db = 30.0
/// pad_to = 512
/// shift = { at_iteration = 15000, by_samples = 50 }
///
/// [channel]
/// kind = "synthetic"
/// length = 256
/// active = 16
/// decay = 0.01
/// seed = 7
///
/// [input]
/// kind = "ar1"
/// pole = 0.8
///
/// [[algorithms]]
/// name = "dbipapa"
/// mu = 0.15
/// M = 2
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub channel: ChannelConfig,
    pub input: InputConfig,
    pub algorithms: Vec<AlgorithmConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub iterations: usize,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub seed_base: u64,
    /// `inf` disables the additive noise.
    pub snr_db: f64,
    /// Filter and channel length; defaults to the channel's own length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pad_to: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<ShiftConfig>,
}

fn default_realizations() -> usize {
    20
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftConfig {
    pub at_iteration: usize,
    pub by_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChannelConfig {
    File {
        path: PathBuf,
    },
    Synthetic {
        length: usize,
        active: usize,
        #[serde(default)]
        decay: f64,
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InputConfig {
    WhiteGaussian {
        #[serde(default = "one")]
        variance: f64,
    },
    Ar1 {
        pole: f64,
        #[serde(default = "one")]
        variance: f64,
        #[serde(default = "default_warmup")]
        warmup: usize,
    },
    PcmFile {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

fn default_warmup() -> usize {
    DEFAULT_WARMUP
}

impl InputConfig {
    pub fn to_spec(&self) -> SignalSpec {
        match self {
            InputConfig::WhiteGaussian { variance } => SignalSpec::white(*variance),
            InputConfig::Ar1 {
                pole,
                variance,
                warmup,
            } => SignalSpec {
                kind: SignalKind::Ar1 { pole: *pole },
                variance: *variance,
                warmup: *warmup,
            },
            InputConfig::PcmFile { path } => SignalSpec::pcm(path.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmName {
    Nlms,
    Apa,
    Ipapa,
    Dbipapa,
}

impl AlgorithmName {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmName::Nlms => "nlms",
            AlgorithmName::Apa => "apa",
            AlgorithmName::Ipapa => "ipapa",
            AlgorithmName::Dbipapa => "dbipapa",
        }
    }
}

/// Regularization `delta` of the normal equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaRule {
    Fixed(f64),
    /// `20 sigma_x^2 / (2L)` with `sigma_x^2` the stationary power of the
    /// synthetic input, or the measured power of recorded input.
    #[default]
    SigmaScaled,
}

impl DeltaRule {
    pub fn resolve(&self, input_variance: f64, taps: usize) -> Result<f64> {
        let delta = match *self {
            DeltaRule::Fixed(v) => v,
            DeltaRule::SigmaScaled => 20.0 * input_variance / (2.0 * taps as f64),
        };
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "regularization {delta} must be > 0"
            )));
        }
        Ok(delta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub name: AlgorithmName,
    /// Curve label; defaults to `name`. Must be unique within a config.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// `0` freezes the filter (diagnostic probe).
    pub mu: f64,
    /// Projection order; ignored by `nlms`.
    #[serde(rename = "M", default = "default_order")]
    pub projection_order: usize,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub delta_rule: DeltaRule,
    /// Snapshot period multiplier, `L_m = round(m L)` (dbipapa only).
    #[serde(default = "one")]
    pub m: f64,
}

fn default_order() -> usize {
    1
}

fn default_epsilon() -> f64 {
    0.01
}

impl AlgorithmConfig {
    pub fn new(name: AlgorithmName, mu: f64, projection_order: usize) -> Self {
        Self {
            name,
            label: None,
            mu,
            projection_order,
            alpha: 0.0,
            epsilon: default_epsilon(),
            delta_rule: DeltaRule::SigmaScaled,
            m: 1.0,
        }
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(self.name.as_str())
    }

    /// Columns the regressor buffer must expose for this algorithm.
    pub fn buffer_order(&self) -> usize {
        match self.name {
            AlgorithmName::Nlms => 1,
            _ => self.projection_order,
        }
    }
}

impl ExperimentConfig {
    /// Parses TOML text, applies `key=value` overrides, then validates.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Value = text
            .parse::<toml::Table>()
            .map(toml::Value::Table)
            .map_err(|e| Error::Config(one_line(&e.to_string())))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: ExperimentConfig = doc
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(one_line(&e.to_string())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative data paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>, overrides: &[String]) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text, overrides)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        if let ChannelConfig::File { path } = &mut self.channel {
            fix(path);
        }
        if let InputConfig::PcmFile { path } = &mut self.input {
            fix(path);
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config(format!("{key}: {msg}")));
        let e = &self.experiment;
        if e.iterations == 0 {
            return bad("experiment.iterations", "must be > 0".into());
        }
        if e.realizations == 0 {
            return bad("experiment.realizations", "must be >= 1".into());
        }
        if e.snr_db.is_nan() || e.snr_db == f64::NEG_INFINITY {
            return bad("experiment.snr_db", format!("invalid value {}", e.snr_db));
        }
        if e.pad_to == Some(0) {
            return bad("experiment.pad_to", "must be >= 1".into());
        }
        if let Some(s) = e.shift {
            if s.at_iteration >= e.iterations {
                return bad(
                    "experiment.shift.at_iteration",
                    format!("{} not below iterations {}", s.at_iteration, e.iterations),
                );
            }
        }
        match &self.channel {
            ChannelConfig::Synthetic {
                length,
                active,
                decay,
                ..
            } => {
                if *active == 0 || active > length {
                    return bad(
                        "channel.active",
                        format!("{active} must lie in 1..={length}"),
                    );
                }
                if !(*decay >= 0.0) || !decay.is_finite() {
                    return bad("channel.decay", format!("{decay} must be >= 0"));
                }
                if let Some(p) = e.pad_to {
                    if p < *length {
                        return bad(
                            "experiment.pad_to",
                            format!("{p} shorter than channel {length}"),
                        );
                    }
                }
            }
            ChannelConfig::File { .. } => {}
        }
        if let Err(err) = self.input.to_spec().validate() {
            return bad("input", err.to_string());
        }
        if self.algorithms.is_empty() {
            return bad("algorithms", "at least one algorithm is required".into());
        }
        let mut labels = std::collections::HashSet::new();
        for (i, a) in self.algorithms.iter().enumerate() {
            let key = |field: &str| format!("algorithms.{i}.{field}");
            if !labels.insert(a.label().to_string()) {
                return bad(&key("label"), format!("duplicate label {:?}", a.label()));
            }
            if !(a.mu >= 0.0) || !a.mu.is_finite() {
                return bad(&key("mu"), format!("{} must be >= 0", a.mu));
            }
            if a.projection_order == 0 {
                return bad(&key("M"), "must be >= 1".into());
            }
            if !(-1.0..=1.0).contains(&a.alpha) {
                return bad(&key("alpha"), format!("{} outside [-1, 1]", a.alpha));
            }
            if !(a.epsilon > 0.0) || !a.epsilon.is_finite() {
                return bad(&key("epsilon"), format!("{} must be > 0", a.epsilon));
            }
            if !(a.m > 0.0) || !a.m.is_finite() {
                return bad(&key("m"), format!("{} must be > 0", a.m));
            }
            if let DeltaRule::Fixed(v) = a.delta_rule {
                if !(v > 0.0) || !v.is_finite() {
                    return bad(&key("delta_rule"), format!("fixed value {v} must be > 0"));
                }
            }
        }
        Ok(())
    }

    /// The unknown system at the start of the run, padded to the filter
    /// length.
    pub fn build_channel(&self) -> Result<ImpulseResponse> {
        let h = match &self.channel {
            ChannelConfig::File { path } => load_impulse_response(path)?,
            ChannelConfig::Synthetic {
                length,
                active,
                decay,
                seed,
            } => synth_sparse_channel(*length, *active, *decay, *seed)?,
        };
        let taps = self.experiment.pad_to.unwrap_or(h.len());
        if taps < h.len() {
            return Err(Error::Config(format!(
                "experiment.pad_to: {taps} shorter than channel {}",
                h.len()
            )));
        }
        pad_and_shift(&h, taps, 0)
    }

    /// The channel in force after the configured shift, if any.
    pub fn shifted_channel(&self, h: &ImpulseResponse) -> Result<Option<(usize, ImpulseResponse)>> {
        match self.experiment.shift {
            None => Ok(None),
            Some(s) => Ok(Some((
                s.at_iteration,
                pad_and_shift(h, h.len(), s.by_samples)?,
            ))),
        }
    }
}

impl ExperimentConfig {
    /// Setup of the coefficient-difference proxy check: NLMS on a 64-tap
    /// channel with 8 active taps, white input, 30 dB SNR, `mu = 0.1`.
    pub fn proxy_default() -> Self {
        let mut nlms = AlgorithmConfig::new(AlgorithmName::Nlms, 0.1, 1);
        nlms.delta_rule = DeltaRule::SigmaScaled;
        Self {
            experiment: ExperimentSection {
                iterations: 8000,
                realizations: 1,
                seed_base: 1,
                snr_db: 30.0,
                pad_to: None,
                shift: None,
            },
            channel: ChannelConfig::Synthetic {
                length: 64,
                active: 8,
                decay: 0.02,
                seed: 5,
            },
            input: InputConfig::WhiteGaussian { variance: 1.0 },
            algorithms: vec![nlms],
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Applies one `dotted.key=value` override. Values are read as TOML
/// literals, falling back to a bare string; numeric segments index arrays.
pub fn apply_override(doc: &mut toml::Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {spec:?} is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() {
        return Err(Error::Config(format!("override {spec:?} has an empty key")));
    }
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let segments: Vec<&str> = key.split('.').collect();
    let mut node = doc;
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        node = match node {
            toml::Value::Table(t) => {
                if last {
                    t.insert(seg.to_string(), value);
                    return Ok(());
                }
                t.entry(seg.to_string())
                    .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            }
            toml::Value::Array(a) => {
                let idx: usize = seg.parse().map_err(|_| {
                    Error::Config(format!("{key}: segment {seg:?} must index an array"))
                })?;
                let len = a.len();
                let slot = a.get_mut(idx).ok_or_else(|| {
                    Error::Config(format!("{key}: index {idx} out of range ({len} entries)"))
                })?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(Error::Config(format!(
                    "{key}: {:?} is not a table",
                    segments[..i].join(".")
                )))
            }
        };
    }
    unreachable!("loop returns on the last segment")
}
