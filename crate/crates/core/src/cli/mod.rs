//! Command layer: configuration, run manifests, reports, and the four verbs
//! (`audit`, `explain`, `train`, `synth`) behind the binary.

mod commands;
pub mod config;
pub mod manifest;
pub mod report;

pub use commands::{algorithm_names, cmd_audit, cmd_explain, cmd_synth, cmd_train, CommandOutput};
pub use config::AuditConfig;
pub use manifest::{load_manifest, verify_manifest, RunManifest};
