//! Shared fixtures and reference implementations for the workspace test
//! suites.

pub mod golden;
pub mod oracle;
pub mod random;

pub use golden::{blessing, data_dir, golden_cases, GoldenCase};
