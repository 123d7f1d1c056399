//! Experiment orchestration: configuration, the end-to-end pipeline, campaigns
//! and the command-line front end.

pub mod campaign;
pub mod cli;
pub mod config;
pub mod run;

pub use campaign::{campaign_seed, sweep_campaign, CampaignRun, Parameter, ParameterRange};
pub use config::{ExperimentConfig, ReportFormat, SweepSpec};
pub use run::{reanalyze, run_experiment, run_pipeline, PipelineOutput, RunReport};
