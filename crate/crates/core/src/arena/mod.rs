//! Experiment harnesses: PAC trials, the online game, the prediction
//! distinguisher, and the set-system lemma checks.

pub mod lemmas;
pub mod online;
pub mod pac;
pub mod report;

pub use lemmas::{verify_generation_bound, verify_separation_lemma, GenerationReport, SeparationReport};
pub use online::{
    prediction_advantage, reverse_stream, run_online_game, AdvantageReport, Baseline, GameRecord, GameSession,
    OnlineLearner,
};
pub use pac::{calibrate, run_pac_batch, run_pac_trial, CalibrationReport, CalibrationPlan, PacTrialReport, RealizableDistribution};
pub use report::ExperimentReport;
