//! Experiment orchestration: configuration, single runs, ensembles,
//! misalignment curves, derivation diagnostics and CSV export.

mod config;
mod diagnostics;
mod export;
mod metrics;
mod run;

pub use config::{
    apply_override, AlgorithmConfig, AlgorithmName, ChannelConfig, DeltaRule, ExperimentConfig,
    ExperimentSection, InputConfig, ShiftConfig,
};
pub use diagnostics::{
    magnitude_cosine, proxy_diagnostic, quantile, sample_necessary_condition, ConditionReport,
    DiagnosticsRecord, ProxyCheckpoint, ProxyOptions, ProxyReport,
};
pub use export::{export_csv, render_csv, CSV_HEADER};
pub use metrics::{misalignment, MisalignmentCurve, Realization, MISALIGNMENT_FLOOR_DB};
pub use run::{
    realization_seed, run_ensemble, run_ensemble_with, run_on_data, run_single,
    run_single_with_diagnostics, AdaptiveFilter, Ensemble, Execution, RealizationData, Scenario,
    SingleRun,
};
