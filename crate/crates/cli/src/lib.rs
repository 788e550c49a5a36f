//! Command-line front end for `doubleprobe-core`: JSON experiment configs,
//! deterministic JSON/CSV reports and SVG scaling plots.

pub mod analysis;
pub mod config;
pub mod plot;
pub mod report;
pub mod space;

pub use config::{Analysis, ExperimentConfig, Format, SpaceSpec};
pub use plot::emit_plot;
pub use report::{run, Report};

/// Applies `DOUBLEPROBE_THREADS` to the global thread pool. Results do not
/// depend on the thread count.
pub fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var("DOUBLEPROBE_THREADS") {
        let threads: usize = value
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("DOUBLEPROBE_THREADS must be a positive integer, got {value:?}"))?;
        anyhow::ensure!(threads >= 1, "DOUBLEPROBE_THREADS must be at least 1");
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}
