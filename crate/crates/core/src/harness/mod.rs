//! Experiment orchestration: configuration, instance files, grid runs, plots and
//! oracle verification.

pub mod config;
pub mod io;
pub mod plot;
pub mod run;
pub mod verify;

pub use config::{ExperimentConfig, GeneratorName, InstanceSource, RoundMode, OUT_ENV};
pub use io::{load_instance, save_instance, InstanceFile};
pub use plot::{render_svg, Plot, PlotOptions};
pub use run::{run_experiment, run_on_instance, RunRecord, RunSummary, Solution};
pub use verify::{verify, Report, VerifyConfig, VerifyProblem};
