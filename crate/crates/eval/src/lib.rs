//! Evaluation of contact detection on simulated scans: precision, recall
//! and F1, threshold calibration, proximity, in-out and robustness studies,
//! and comparison with set- and distance-based baselines.

pub mod baselines;
pub mod calibration;
pub mod config;
pub mod error;
pub mod inout;
pub mod metrics;
pub mod output;
pub mod proximity;
pub mod robustness;

pub use calibration::{
    default_alpha_grid, distinct_score_grid, sweep_scores, sweep_threshold, CalibrationCurve, CalibrationPoint,
    Direction, LabeledDataset, LabeledRecord,
};
pub use config::{Experiment, RobustnessConfig, StudyConfig};
pub use error::EvalError;
pub use metrics::{precision_recall_f1, prf_from_labels, Prf};
pub use proximity::{evaluate_proximities, run_proximity_study, simulate_proximity, user_positions, ProximityData, ProximityRow};
pub use baselines::{baseline_scores, compare_methods, run_baseline_comparison, BaselineRow, Method};
pub use robustness::{device_table, filter_table, noise_table, run_robustness_suite, sampling_table, simulate_walk, Knob, RobustnessReport, RobustnessRow};
pub use inout::{classify, run_in_out_simulation, run_in_out_study, simulate_in_out, survey_path, InOutData, InOutRow};
pub use output::{baseline_means, proximity_means, robustness_means, to_csv, Mean};
