//! Builds the sample a config describes.

use std::fs::File;
use std::io::BufReader;

use anyhow::{Context, Result};
use doubleprobe_core::io::{read_measured_csv, read_raw_distance_csv};
use doubleprobe_core::{
    cantor_space, log_line, torus_grid, DistanceMatrix, MeasuredSpace, ProductMetricSpec, TorusSample,
};
use serde::Serialize;

use crate::config::SpaceSpec;

pub enum Sample {
    Matrix(MeasuredSpace<DistanceMatrix>),
    /// Evaluated lazily; torus grids grow as `2^(nj)`.
    Torus(MeasuredSpace<TorusSample>),
    /// A table that failed the axiom checks; only `validate` can use it.
    Unchecked(String),
}

pub struct Space {
    pub sample: Sample,
    /// The unchecked table a CSV space was read from.
    pub raw_rows: Option<Vec<Vec<f64>>>,
    pub summary: SpaceSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceSummary {
    pub kind: &'static str,
    pub points: usize,
    pub measure: &'static str,
    /// Whether every point looks the same from the metric and the measure,
    /// so a single center represents them all.
    pub homogeneous: bool,
}

impl Space {
    pub fn build(spec: &SpaceSpec) -> Result<Self> {
        let (sample, raw_rows, kind, measure, homogeneous) = match spec {
            SpaceSpec::Csv { path } => {
                let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                let raw = read_raw_distance_csv(BufReader::new(file))
                    .with_context(|| format!("reading {}", path.display()))?;
                let rows = raw.rows.clone();
                let sample = match raw.into_matrix() {
                    Ok(m) => Sample::Matrix(MeasuredSpace::counting(m)?),
                    Err(e) => Sample::Unchecked(format!("{} is not a valid quasimetric: {e}", path.display())),
                };
                (sample, Some(rows), "csv", "counting", false)
            }
            SpaceSpec::MeasuredCsv { path } => {
                let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                let s =
                    read_measured_csv(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
                (Sample::Matrix(s), None, "measured_csv", "weights from file", false)
            }
            SpaceSpec::TorusGrid { n, j, metric, weights } => {
                let spec = ProductMetricSpec { kind: *metric, weights: weights.clone() };
                let sample = TorusSample::new(torus_grid(*n, *j)?, spec)?;
                (Sample::Torus(MeasuredSpace::counting(sample)?), None, "torus_grid", "counting", true)
            }
            SpaceSpec::Cantor { level } => (Sample::Matrix(cantor_space(*level)?), None, "cantor", "coin-flip", false),
            SpaceSpec::LogLine { points } => {
                let m = log_line(&points.values()?)?;
                (Sample::Matrix(MeasuredSpace::counting(m)?), None, "log_line", "counting", false)
            }
        };
        let points = match &sample {
            Sample::Matrix(s) => s.len(),
            Sample::Torus(s) => s.len(),
            Sample::Unchecked(_) => raw_rows.as_ref().map_or(0, Vec::len),
        };
        Ok(Self { sample, raw_rows, summary: SpaceSummary { kind, points, measure, homogeneous } })
    }

    pub fn len(&self) -> usize {
        self.summary.points
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dense matrix of the sample, refusing anything above `cap` points.
    pub fn matrix(&self, cap: usize, what: &str) -> Result<DistanceMatrix> {
        anyhow::ensure!(
            self.len() <= cap,
            "{what} needs a dense matrix; the sample has {} points, above the cap of {cap}; subsample first",
            self.len()
        );
        Ok(match &self.sample {
            Sample::Matrix(s) => s.metric().clone(),
            Sample::Torus(s) => s.metric().to_matrix()?,
            Sample::Unchecked(reason) => anyhow::bail!("{reason}"),
        })
    }
}

/// Dispatches a closure generic over the metric type.
#[macro_export]
macro_rules! with_sample {
    ($space:expr, |$s:ident| $body:expr) => {
        match &$space.sample {
            $crate::space::Sample::Matrix($s) => $body,
            $crate::space::Sample::Torus($s) => $body,
            $crate::space::Sample::Unchecked(reason) => ::anyhow::bail!("{}", reason),
        }
    };
}
