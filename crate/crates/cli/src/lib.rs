//! Batch experiment runner: one JSON config in, CSV/JSON artifacts out.

pub mod config;
pub mod error;
pub mod output;
pub mod tasks;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, Task};
pub use error::CliError;

/// Loads `config_path` and runs its task, writing into `output_dir`.
///
/// On a computation error an `error.json` is also left in `output_dir`.
pub fn run_config(config_path: &Path, output_dir: &Path, verbose: bool) -> Result<Vec<PathBuf>, CliError> {
    let config = ExperimentConfig::load(config_path)?;
    if verbose {
        eprintln!("task: {}", config.task.name());
    }
    let base_dir = config_path.parent().unwrap_or(Path::new("."));
    let ctx = tasks::Context {
        config: &config,
        base_dir,
        output_dir,
        verbose,
    };
    tasks::run(&ctx).inspect_err(|e| {
        if e.exit_code() == 2 {
            tasks::write_error(output_dir, e);
        }
    })
}
