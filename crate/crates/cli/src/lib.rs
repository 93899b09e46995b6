//! Command-line front end for `lgt-core`: configuration, scan
//! orchestration and data export.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};

use config::RunConfig;
use output::{Manifest, Versions};

/// Runs a validated configuration and writes its outputs and manifest.
/// Returns the paths written.
pub fn execute(c: &RunConfig) -> Result<Vec<std::path::PathBuf>> {
    let cmd = c.command.expect("validated config");
    let mut names = commands::planned_outputs(c);
    names.push(output::manifest_name(cmd.name()));
    let resume = c.resume && cmd == config::Command::ScanPlaquette;
    output::check_targets(&c.output, &names, c.force || resume)?;
    let previous = if resume {
        let path = c.output.join(&names[1]);
        Some(std::fs::read_to_string(&path).with_context(|| format!("--resume needs {}", path.display()))?)
    } else {
        None
    };
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let t = Instant::now();
    let artifacts = commands::run(c, previous.as_deref())?;
    let outputs = output::write_artifacts(&c.output, &artifacts)?;
    let manifest = Manifest {
        schema: output::MANIFEST_SCHEMA,
        command: cmd.name(),
        config: c,
        versions: Versions { cli: env!("CARGO_PKG_VERSION"), core: lgt_core::VERSION },
        started_unix: started,
        elapsed_seconds: t.elapsed().as_secs_f64(),
        outputs,
    };
    let manifest = output::write_manifest(&c.output, &manifest)?;
    Ok(artifacts.iter().map(|a| c.output.join(&a.name)).chain([manifest]).collect())
}

/// Sizes the global worker pool. Only the first call has an effect.
pub fn init_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
}
