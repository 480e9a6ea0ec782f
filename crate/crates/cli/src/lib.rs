//! Verification driver: runs the engine's check suites and assembles a
//! machine-readable report.

pub mod config;
pub mod report;
pub mod suites;

use std::time::Instant;

use rayon::prelude::*;

use config::RunConfig;
use report::Report;
use suites::Params;

/// Runs every suite of `command` on a pool of `config.jobs` threads.
pub fn run(command: &str, config: &RunConfig, params: &Params) -> Result<Report, rayon::ThreadPoolBuildError> {
    let start = Instant::now();
    let specs = suites::suites_for(command);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build()?;
    let suites = pool.install(|| specs.par_iter().map(|s| s.run(config, params)).collect::<Vec<_>>());
    Ok(Report::new(command, config.clone(), suites, start.elapsed().as_secs_f64()))
}
