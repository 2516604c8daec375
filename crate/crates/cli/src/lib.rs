// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment runner: JSON config → model × method → CSV time series, plus
//! the cross-method validation suite.

pub mod config;
pub mod run;
pub mod series;
pub mod validate;

pub use config::{parse_config, parse_config_in, ConfigError, ExperimentConfig, Method};
pub use run::{run_experiment, simulate, RunError};
pub use series::{Record, TimeSeries};
pub use validate::{validate_suite, Check, Report};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG_ERROR: i32 = 1;
    pub const SOLVER_ERROR: i32 = 2;
    pub const VALIDATION_FAILURE: i32 = 3;
}
