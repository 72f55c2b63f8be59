use rayon::prelude::*;

use crate::channels::{
    add_noise, convolve, generate_input, sample_variance, ImpulseResponse, NoiseModel,
};
use crate::error::{Error, Result};
use crate::filter::{ApaParams, FilterState, RegressorBuffer};
use crate::proportionate::{DbIpapa, GainParams, Ipapa};

use super::config::{AlgorithmConfig, AlgorithmName, ExperimentConfig};
use super::diagnostics::DiagnosticsRecord;
use super::metrics::{misalignment, MisalignmentCurve, Realization};

/// One configured adaptive algorithm, ready to run.
#[derive(Debug, Clone)]
pub enum AdaptiveFilter {
    /// `mu = 0`: the filter never moves.
    Frozen,
    Nlms(ApaParams<f64>),
    Apa(ApaParams<f64>),
    Ipapa(Ipapa<f64>),
    DbIpapa(DbIpapa<f64>),
}

impl AdaptiveFilter {
    /// Instantiates `cfg` for a filter of `taps` coefficients starting at
    /// zero; `input_variance` feeds the sigma-scaled regularization rule.
    pub fn from_config(cfg: &AlgorithmConfig, taps: usize, input_variance: f64) -> Result<Self> {
        if cfg.mu == 0.0 {
            return Ok(AdaptiveFilter::Frozen);
        }
        let delta = cfg.delta_rule.resolve(input_variance, taps)?;
        let apa = ApaParams::new(cfg.mu, delta, cfg.buffer_order())?;
        let gains = || GainParams::new(cfg.alpha, cfg.epsilon);
        Ok(match cfg.name {
            AlgorithmName::Nlms => AdaptiveFilter::Nlms(apa),
            AlgorithmName::Apa => AdaptiveFilter::Apa(apa),
            AlgorithmName::Ipapa => AdaptiveFilter::Ipapa(Ipapa::new(taps, apa, gains()?)),
            AlgorithmName::Dbipapa => AdaptiveFilter::DbIpapa(DbIpapa::with_multiplier(
                &vec![0.0; taps],
                cfg.m,
                apa,
                gains()?,
            )?),
        })
    }

    /// One update; `y` holds the desired samples newest first, one per
    /// buffer column.
    pub fn step(
        &mut self,
        w: &mut FilterState<f64>,
        buf: &RegressorBuffer<f64>,
        y: &[f64],
    ) -> Result<()> {
        match self {
            AdaptiveFilter::Frozen => Ok(()),
            AdaptiveFilter::Nlms(p) => w.nlms_update(buf, y[0], p).map(drop),
            AdaptiveFilter::Apa(p) => w.apa_update(buf, y, p).map(drop),
            AdaptiveFilter::Ipapa(f) => f.step(w, buf, y).map(drop),
            AdaptiveFilter::DbIpapa(f) => f.step(w, buf, y).map(drop),
        }
    }

    /// Gains applied by the last step; `None` for unit gains.
    pub fn gains(&self) -> Option<&[f64]> {
        match self {
            AdaptiveFilter::Ipapa(f) => Some(f.gains()),
            AdaptiveFilter::DbIpapa(f) => Some(f.gains()),
            _ => None,
        }
    }
}

/// True system over the run: the initial channel and an optional switch.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub initial: ImpulseResponse,
    pub shifted: Option<(usize, ImpulseResponse)>,
}

impl Scenario {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let initial = cfg.build_channel()?;
        let shifted = cfg.shifted_channel(&initial)?;
        Ok(Self { initial, shifted })
    }

    pub fn taps(&self) -> usize {
        self.initial.len()
    }

    pub fn channel_at(&self, k: usize) -> &ImpulseResponse {
        match &self.shifted {
            Some((at, h)) if k >= *at => h,
            _ => &self.initial,
        }
    }
}

/// Input and desired streams of one realization.
#[derive(Debug, Clone)]
pub struct RealizationData {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub clean: Vec<f64>,
    /// Input power used by the sigma-scaled regularization: the nominal
    /// variance for synthetic inputs, the measured one for recorded data.
    pub input_variance: f64,
}

pub fn realization_seed(cfg: &ExperimentConfig, realization: usize) -> u64 {
    cfg.experiment.seed_base.wrapping_add(realization as u64)
}

impl RealizationData {
    pub fn generate(
        cfg: &ExperimentConfig,
        scenario: &Scenario,
        realization: usize,
    ) -> Result<Self> {
        let n = cfg.experiment.iterations;
        let seed = realization_seed(cfg, realization);
        let spec = cfg.input.to_spec();
        let x = generate_input(&spec, n, seed)?;
        let mut clean = convolve(scenario.initial.taps(), &x);
        if let Some((at, h)) = &scenario.shifted {
            let after = convolve(h.taps(), &x);
            clean[*at..].copy_from_slice(&after[*at..]);
        }
        let noise = NoiseModel {
            snr_db: cfg.experiment.snr_db,
            seed,
        };
        let y = add_noise(&clean, &noise)?;
        let input_variance = spec.nominal_power().unwrap_or_else(|| sample_variance(&x));
        Ok(Self {
            x,
            y,
            clean,
            input_variance,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SingleRun {
    pub curve: MisalignmentCurve,
    pub diagnostics: Vec<DiagnosticsRecord>,
}

/// Runs one algorithm on one realization.
pub fn run_single(
    cfg: &ExperimentConfig,
    algorithm: usize,
    realization: usize,
) -> Result<SingleRun> {
    run_single_with_diagnostics(cfg, algorithm, realization, None)
}

/// As [`run_single`], additionally recording a [`DiagnosticsRecord`] every
/// `window` samples when `window` is set.
pub fn run_single_with_diagnostics(
    cfg: &ExperimentConfig,
    algorithm: usize,
    realization: usize,
    window: Option<usize>,
) -> Result<SingleRun> {
    cfg.validate()?;
    let alg = cfg
        .algorithms
        .get(algorithm)
        .ok_or_else(|| Error::InvalidParameter(format!("no algorithm at index {algorithm}")))?;
    let scenario = Scenario::from_config(cfg)?;
    let data = RealizationData::generate(cfg, &scenario, realization)?;
    run_on_data(alg, &scenario, &data, realization, window)
}

pub fn run_on_data(
    alg: &AlgorithmConfig,
    scenario: &Scenario,
    data: &RealizationData,
    realization: usize,
    window: Option<usize>,
) -> Result<SingleRun> {
    if window == Some(0) {
        return Err(Error::InvalidParameter(
            "diagnostic window must be >= 1".into(),
        ));
    }
    let taps = scenario.taps();
    let n = data.x.len();
    let mut filter = AdaptiveFilter::from_config(alg, taps, data.input_variance)?;
    let mut w = FilterState::zeros(taps)?;
    let mut buf = RegressorBuffer::new(taps, alg.buffer_order())?;
    // desired history, newest first, one entry per projection column
    let mut desired = RegressorBuffer::new(alg.buffer_order(), 1)?;

    let mut values = Vec::with_capacity(n);
    let mut diagnostics = Vec::new();
    let mut pending: Option<DiagnosticsRecord> = None;

    for k in 0..n {
        buf.push(data.x[k])?;
        desired.push(data.y[k])?;
        let h = scenario.channel_at(k).taps();
        let m = misalignment(h, w.coefficients())?;
        values.push(m);

        let checkpoint = matches!(window, Some(win) if k % win == 0);
        let mut started = None;
        if checkpoint {
            if let Some(mut rec) = pending.take() {
                rec.finish(w.coefficients(), alg.mu);
                diagnostics.push(rec);
            }
            started = Some(w.coefficients().to_vec());
        }

        filter.step(&mut w, &buf, desired.window())?;

        if let Some(w_k) = started {
            let x = buf.window();
            let sigma_gx2 = match filter.gains() {
                Some(g) => g.iter().zip(x).map(|(g, x)| g * x * x).sum(),
                None => x.iter().map(|x| x * x).sum(),
            };
            pending = Some(DiagnosticsRecord::start(k, m, h, &w_k, sigma_gx2));
        }
    }
    Ok(SingleRun {
        curve: MisalignmentCurve {
            algorithm: alg.label().to_string(),
            realization: Realization::Index(realization),
            values_db: values,
        },
        diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Realizations fan out over the current rayon pool.
    #[default]
    Parallel,
}

/// Ensemble-mean curves plus every member curve.
#[derive(Debug, Clone)]
pub struct Ensemble {
    /// One mean curve per configured algorithm, in config order.
    pub mean: Vec<MisalignmentCurve>,
    /// `members[a][r]`: algorithm `a`, realization `r`.
    pub members: Vec<Vec<MisalignmentCurve>>,
}

pub fn run_ensemble(cfg: &ExperimentConfig) -> Result<Ensemble> {
    run_ensemble_with(cfg, Execution::Parallel)
}

/// Runs every algorithm on every realization and averages the dB curves.
///
/// All algorithms within a realization see the same input and noise. The
/// result does not depend on `execution`: members are merged in realization
/// order before averaging.
pub fn run_ensemble_with(cfg: &ExperimentConfig, execution: Execution) -> Result<Ensemble> {
    cfg.validate()?;
    let scenario = Scenario::from_config(cfg)?;
    let realization = |r: usize| -> Result<Vec<MisalignmentCurve>> {
        let data = RealizationData::generate(cfg, &scenario, r)?;
        cfg.algorithms
            .iter()
            .map(|alg| run_on_data(alg, &scenario, &data, r, None).map(|run| run.curve))
            .collect()
    };
    let count = cfg.experiment.realizations;
    let per_realization: Vec<Vec<MisalignmentCurve>> = match execution {
        Execution::Sequential => (0..count).map(realization).collect::<Result<_>>()?,
        Execution::Parallel => (0..count)
            .into_par_iter()
            .map(realization)
            .collect::<Result<_>>()?,
    };

    let mut members: Vec<Vec<MisalignmentCurve>> =
        vec![Vec::with_capacity(count); cfg.algorithms.len()];
    for curves in per_realization {
        for (slot, curve) in members.iter_mut().zip(curves) {
            slot.push(curve);
        }
    }
    let mean = members
        .iter()
        .map(|m| MisalignmentCurve::ensemble_mean(m))
        .collect::<Result<_>>()?;
    Ok(Ensemble { mean, members })
}
