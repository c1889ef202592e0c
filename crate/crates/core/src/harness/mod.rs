//! Config-driven experiment runner writing CSV tables and JSON sidecars.

pub mod config;
pub mod report;
pub mod run;

pub use config::{CertifyOptions, ExperimentConfig, WeightedOptions, XGrid};
pub use report::{fmt_f64, fmt_opt, CsvTable};
pub use run::{
    run_convergence, run_moment_audit, Command, ConvergenceReport, ConvergenceRow, Outcome, Runner,
};
