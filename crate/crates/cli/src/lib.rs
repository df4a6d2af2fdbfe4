// SPDX-License-Identifier: Apache-2.0

//! Verification suites and reports behind the `ncvalue` binary.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{ConfigError, SuiteConfig};
pub use report::SuiteReport;
pub use suites::{run_suite, Suite, SuiteOutput};
