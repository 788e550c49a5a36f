use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use doubleprobe::config::{parse_int_range, Analysis, CenterChoice, IntRange, Limits, OutputSpec, RadiiSpec};
use doubleprobe::report::{run, write_first_plot, write_plots, write_report};
use doubleprobe::{configure_threads, ExperimentConfig, Format, SpaceSpec};
use doubleprobe_core::MetricKind;

#[derive(Parser)]
#[command(
    name = "doubleprobe",
    version,
    about = "Packing, doubling and metrization experiments on finite metric samples"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Report path (standard output by default).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format: json or csv.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Write the first plot of the run to this SVG file.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Largest sample for exact (exponential-time) searches.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Residual tolerance for witness searches.
    #[arg(long, global = true, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Check the quasimetric axioms and compute the quasi-triangle constant.
    Validate(Input),
    /// Chain metrization with the canonical exponent and the sandwich check.
    Metrize(Input),
    /// Separated-set counts over a radius list and the packing exponent fit.
    Packing {
        #[command(flatten)]
        input: Input,
        /// `dyadic:a..b`, `triadic:a..b` or a comma list.
        #[arg(long, default_value = "dyadic:1..8")]
        radii: RadiiSpec,
        /// Exact maximum separated sets instead of greedy ones.
        #[arg(long)]
        exact: bool,
    },
    /// Doubling ratios at radii 2^-l and the growth verdict.
    Doubling {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "1..8")]
        l: IntRange,
        /// `auto`, `all` or a comma list of center indices.
        #[arg(long, default_value = "auto")]
        centers: String,
        #[arg(long, default_value_t = doubleprobe_core::TREND_THRESHOLD)]
        threshold: f64,
    },
    /// Dyadic torus grids: separation, size and the packing exponent.
    Theorem2 {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1..4")]
        j: IntRange,
        #[arg(long, default_value = "sup")]
        metric: MetricKind,
        /// Comma list of coordinate weights (default 2^-i).
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
    },
    /// Separated witnesses in a torus cube from face-distance equations.
    Theorem3 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, default_value = "sup")]
        metric: MetricKind,
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Ball masses, doubling verdict and packing counts of a Cantor sample.
    Cantor {
        #[arg(long, default_value_t = 10)]
        level: u32,
    },
    /// Run a JSON experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct Input {
    /// Distance CSV (`label` column first; a trailing `weight` column for
    /// measured spaces).
    #[arg(long, conflicts_with = "space")]
    input: Option<PathBuf>,
    /// Space spec as JSON, e.g. '{"kind":"cantor","level":6}'.
    #[arg(long)]
    space: Option<String>,
}

impl Input {
    fn spec(&self, measured: bool) -> Result<SpaceSpec> {
        match (&self.input, &self.space) {
            (Some(path), _) if measured => Ok(SpaceSpec::MeasuredCsv { path: path.clone() }),
            (Some(path), _) => Ok(SpaceSpec::Csv { path: path.clone() }),
            (None, Some(json)) => serde_json::from_str(json).context("invalid --space JSON"),
            (None, None) => anyhow::bail!("give --input or --space"),
        }
    }
}

fn centers(text: &str) -> Result<CenterChoice> {
    Ok(match text {
        "auto" => CenterChoice::Auto,
        "all" => CenterChoice::All,
        list => CenterChoice::List(
            parse_int_range(list)?
                .into_iter()
                .map(|c| usize::try_from(c).context("center indices are nonnegative"))
                .collect::<Result<_>>()?,
        ),
    })
}

fn build_config(command: Command, global: &Global) -> Result<ExperimentConfig> {
    let limits = Limits { exact_cap: global.cap.unwrap_or(Limits::default().exact_cap), ..Limits::default() };
    let single = |space: Option<SpaceSpec>, analyses: Vec<Analysis>| ExperimentConfig {
        space,
        analyses,
        output: OutputSpec::default(),
        limits,
    };
    Ok(match command {
        Command::Validate(input) => single(Some(input.spec(false)?), vec![Analysis::Validate]),
        Command::Metrize(input) => single(Some(input.spec(false)?), vec![Analysis::Metrize]),
        Command::Packing { input, radii, exact } => {
            single(Some(input.spec(false)?), vec![Analysis::Packing { radii, exact }])
        }
        Command::Doubling { input, l, centers: c, threshold } => {
            single(Some(input.spec(true)?), vec![Analysis::Doubling { l, centers: centers(&c)?, threshold }])
        }
        Command::Theorem2 { n, j, metric, weights } => single(None, vec![Analysis::Theorem2 { n, j, metric, weights }]),
        Command::Theorem3 { n, j, metric, weights, resolution } => {
            single(None, vec![Analysis::Theorem3 { n, j, metric, weights, resolution, tol: global.tol }])
        }
        Command::Cantor { level } => single(
            Some(SpaceSpec::Cantor { level }),
            vec![
                Analysis::BallMasses {
                    radii: RadiiSpec::Text(format!("triadic:1..{}", level.saturating_sub(1).max(1))),
                },
                Analysis::Packing { radii: RadiiSpec::Text("dyadic:2..8".into()), exact: false },
                Analysis::Doubling {
                    l: IntRange::Text("1..8".into()),
                    centers: CenterChoice::All,
                    threshold: doubleprobe_core::TREND_THRESHOLD,
                },
            ],
        ),
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut c = ExperimentConfig::from_json(&text)?;
            if let Some(cap) = global.cap {
                c.limits.exact_cap = cap;
            }
            c
        }
    })
}

fn execute(cli: Cli) -> Result<bool> {
    configure_threads()?;
    let global = cli.global;
    let config = build_config(cli.command, &global)?;
    config.validate()?;
    let report = run(&config);
    let format = global.format.unwrap_or(config.output.format);
    let out = global.out.as_deref().or(config.output.path.as_deref());
    write_report(&report, format, out)?;
    if let Some(dir) = &config.output.svg_dir {
        write_plots(&report, dir)?;
    }
    if let Some(path) = &global.svg {
        if !write_first_plot(&report, path)? {
            eprintln!("warning: nothing to plot; {} not written", path.display());
        }
    }
    for e in &report.errors {
        match (e.index, e.analysis) {
            (Some(i), Some(name)) => eprintln!("error in analysis {i} ({name}): {}", e.message),
            _ => eprintln!("error: {}", e.message),
        }
    }
    Ok(report.ok())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
