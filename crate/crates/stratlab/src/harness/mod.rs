//! Configuration, scenario orchestration, persistence and run manifests.

pub mod config;
pub mod csvio;
pub mod manifest;
pub mod scenario;

pub use config::{ConfigDoc, RunConfig, Scenario};
pub use manifest::RunManifest;
pub use scenario::{resume, run};
