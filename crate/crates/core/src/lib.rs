//! Sliding-mode shape servoing of deformable linear objects under asymmetric
//! joint-velocity saturation, with an adaptive deformation-Jacobian estimate.
//!
//! The crate contains the saturation models, two simulated plants, the
//! controller and estimator update laws, Lyapunov bookkeeping and the
//! fixed-step scenario runner used by the command-line tool.

pub mod config;
pub mod controller;
pub mod error;
pub mod estimator;
pub mod monitor;
pub mod output;
pub mod plant;
pub mod saturation;
pub mod scenario;

pub use config::{parse_config, parse_config_onto, ScenarioConfig, TargetKind, TargetSpec};
pub use controller::{ControllerGains, ControllerState, IntegralSurface};
pub use error::{Error, Result};
pub use estimator::{damped_pinv, EstimatorGains, EstimatorState, RateEstimator, Rates};
pub use monitor::{DecreaseReport, LyapunovSample, UubBounds};
pub use plant::{
    Centerline, ChainParams, ChainPlant, DeformationJacobian, FeatureKind, FeatureMap, LinearPlant, PlantKind,
    PlantState, ShapeFeature,
};
pub use saturation::{erf, gauss_sat, hard_sat, JointVector, SatOutput, SaturationLimits, LEMMA_DELTA};
pub use scenario::{run_scenario, Preset, RunOutput, RunReport, TrajectoryRecord};
