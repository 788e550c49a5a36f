//! Experiment configuration: a space to build and the analyses to run on it.
//!
//! Everything here is validated up front by [`ExperimentConfig::validate`],
//! before any space is built or any analysis starts.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use doubleprobe_core::{MetricKind, ProductMetricSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default)]
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub limits: Limits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    /// Distance matrix CSV with a label column.
    Csv {
        path: PathBuf,
    },
    /// Distance matrix CSV with a trailing `weight` column.
    MeasuredCsv {
        path: PathBuf,
    },
    /// The dyadic subgroup of the first `n` torus coordinates.
    TorusGrid {
        n: usize,
        j: usize,
        metric: MetricKind,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        weights: Vec<f64>,
    },
    Cantor {
        level: u32,
    },
    LogLine {
        points: LinePoints,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LinePoints {
    /// `count` evenly spaced points on `[range.0, range.1]`.
    Range {
        range: (f64, f64),
        count: usize,
    },
    /// `count` evenly spaced points on `[-(e^s - 1), e^s - 1]`, a window of
    /// log-line radius `s` around the origin.
    LogExtent {
        log_extent: f64,
        count: usize,
    },
    Values {
        values: Vec<f64>,
    },
}

impl LinePoints {
    pub fn values(&self) -> Result<Vec<f64>> {
        Ok(match self {
            LinePoints::Range { range, count } => doubleprobe_core::evenly_spaced(range.0, range.1, *count)?,
            LinePoints::LogExtent { log_extent, count } => {
                let half = log_extent.exp_m1();
                doubleprobe_core::evenly_spaced(-half, half, *count)?
            }
            LinePoints::Values { values } => values.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "analysis", rename_all = "snake_case", deny_unknown_fields)]
pub enum Analysis {
    Validate,
    Metrize,
    Packing {
        radii: RadiiSpec,
        #[serde(default)]
        exact: bool,
    },
    Covering {
        radii: RadiiSpec,
    },
    CoverProfile {
        radii: RadiiSpec,
    },
    BallMasses {
        radii: RadiiSpec,
    },
    Doubling {
        l: IntRange,
        #[serde(default)]
        centers: CenterChoice,
        #[serde(default = "default_threshold")]
        threshold: f64,
    },
    Theorem2 {
        n: usize,
        j: IntRange,
        metric: MetricKind,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        weights: Vec<f64>,
    },
    Theorem3 {
        n: usize,
        j: usize,
        metric: MetricKind,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        weights: Vec<f64>,
        #[serde(default = "default_resolution")]
        resolution: usize,
        #[serde(default = "default_witness_tol")]
        tol: f64,
    },
}

fn default_threshold() -> f64 {
    doubleprobe_core::TREND_THRESHOLD
}

fn default_resolution() -> usize {
    64
}

fn default_witness_tol() -> f64 {
    1e-3
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::Validate => "validate",
            Analysis::Metrize => "metrize",
            Analysis::Packing { .. } => "packing",
            Analysis::Covering { .. } => "covering",
            Analysis::CoverProfile { .. } => "cover_profile",
            Analysis::BallMasses { .. } => "ball_masses",
            Analysis::Doubling { .. } => "doubling",
            Analysis::Theorem2 { .. } => "theorem2",
            Analysis::Theorem3 { .. } => "theorem3",
        }
    }

    pub fn needs_space(&self) -> bool {
        !matches!(self, Analysis::Theorem2 { .. } | Analysis::Theorem3 { .. })
    }

    fn validate(&self) -> Result<()> {
        match self {
            Analysis::Validate | Analysis::Metrize => {}
            Analysis::Packing { radii, .. }
            | Analysis::Covering { radii }
            | Analysis::CoverProfile { radii }
            | Analysis::BallMasses { radii } => {
                radii.values()?;
            }
            Analysis::Doubling { l, threshold, .. } => {
                ensure!(l.values().len() >= 2, "doubling needs at least two l values");
                ensure!(threshold.is_finite(), "threshold must be finite");
            }
            Analysis::Theorem2 { n, j, metric, weights } => {
                ensure!(*n >= 1, "n must be at least 1");
                ensure!(j.values().iter().all(|&v| v >= 1), "j values must be at least 1");
                ensure!(!j.values().is_empty(), "j range is empty");
                ProductMetricSpec { kind: *metric, weights: weights.clone() }.check(*n)?;
            }
            Analysis::Theorem3 { n, j, metric, weights, resolution, tol } => {
                ensure!(*n >= 1 && *j >= 1, "n and j must be at least 1");
                ensure!(*resolution >= 1, "resolution must be at least 1");
                ensure!(*tol > 0.0 && tol.is_finite(), "tol must be a positive real");
                ProductMetricSpec { kind: *metric, weights: weights.clone() }.check(*n)?;
            }
        }
        Ok(())
    }
}

/// Which centers a doubling sweep visits. `auto` visits only the identity
/// of a torus grid, where a translation-invariant metric and the uniform
/// measure make every center equivalent, and all centers elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterChoice {
    #[default]
    Auto,
    All,
    List(Vec<usize>),
}

/// Integer range written `"1..8"` (inclusive) or an explicit list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntRange {
    Text(String),
    List(Vec<i32>),
}

impl IntRange {
    pub fn values(&self) -> Vec<i32> {
        match self {
            IntRange::List(v) => v.clone(),
            IntRange::Text(s) => parse_int_range(s).unwrap_or_default(),
        }
    }

    pub fn check(&self) -> Result<Vec<i32>> {
        match self {
            IntRange::List(v) => Ok(v.clone()),
            IntRange::Text(s) => parse_int_range(s),
        }
    }
}

impl FromStr for IntRange {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_int_range(s)?;
        Ok(IntRange::Text(s.to_string()))
    }
}

/// `"a..b"` inclusive, `"a"`, or `"a,b,c"`.
pub fn parse_int_range(s: &str) -> Result<Vec<i32>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: i32 = a.trim().parse().with_context(|| format!("bad range start in {s:?}"))?;
        let b: i32 = b.trim().parse().with_context(|| format!("bad range end in {s:?}"))?;
        ensure!(a <= b, "empty range {s:?}");
        return Ok((a..=b).collect());
    }
    s.split(',').map(|p| p.trim().parse().with_context(|| format!("bad integer {p:?} in {s:?}"))).collect()
}

/// Radii written as `"dyadic:2..8"` (`2^-l`), `"triadic:1..9"` (`3^-k`) or
/// a comma list, or given as a JSON list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadiiSpec {
    Text(String),
    List(Vec<f64>),
}

impl RadiiSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        let radii = match self {
            RadiiSpec::List(v) => v.clone(),
            RadiiSpec::Text(s) => parse_radii(s)?,
        };
        ensure!(!radii.is_empty(), "radius list is empty");
        for &r in &radii {
            ensure!(r > 0.0 && r.is_finite(), "radius {r} is not a positive real");
        }
        Ok(radii)
    }
}

impl FromStr for RadiiSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec = RadiiSpec::Text(s.to_string());
        spec.values()?;
        Ok(spec)
    }
}

fn parse_radii(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("dyadic:") {
        return Ok(parse_int_range(rest)?.into_iter().map(|l| 2f64.powi(-l)).collect());
    }
    if let Some(rest) = s.strip_prefix("triadic:") {
        return parse_int_range(rest)?
            .into_iter()
            .map(|k| {
                let k = u32::try_from(k).context("triadic exponents must be nonnegative")?;
                Ok(1.0 / 3u64.checked_pow(k).context("triadic exponent too large")? as f64)
            })
            .collect();
    }
    s.split(',').map(|p| p.trim().parse::<f64>().with_context(|| format!("bad radius {p:?}"))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => bail!("unknown format {other:?} (json | csv)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Report path; standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Directory for per-analysis SVG plots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    /// Largest sample for exact (exponential-time) searches.
    #[serde(default = "default_exact_cap")]
    pub exact_cap: usize,
    /// Largest sample the chain metrization accepts.
    #[serde(default = "default_metrize_cap")]
    pub metrize_cap: usize,
}

fn default_exact_cap() -> usize {
    doubleprobe_core::EXACT_CAP
}

fn default_metrize_cap() -> usize {
    2000
}

impl Default for Limits {
    fn default() -> Self {
        Self { exact_cap: default_exact_cap(), metrize_cap: default_metrize_cap() }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).context("invalid experiment config")?;
        config.validate()?;
        Ok(config)
    }

    /// Checks every parameter that can be checked without building the space.
    pub fn validate(&self) -> Result<()> {
        if let Some(space) = &self.space {
            match space {
                SpaceSpec::TorusGrid { n, j, metric, weights } => {
                    ensure!(*n >= 1 && *j >= 1, "torus grid needs n, j >= 1");
                    ProductMetricSpec { kind: *metric, weights: weights.clone() }.check(*n)?;
                }
                SpaceSpec::Cantor { level } => ensure!(*level >= 1, "Cantor level must be at least 1"),
                SpaceSpec::LogLine { points } => {
                    points.values()?;
                }
                SpaceSpec::Csv { .. } | SpaceSpec::MeasuredCsv { .. } => {}
            }
        }
        for (k, a) in self.analyses.iter().enumerate() {
            a.validate().with_context(|| format!("analysis {k} ({})", a.name()))?;
            if let Analysis::Doubling { l, .. } | Analysis::Theorem2 { j: l, .. } = a {
                l.check().with_context(|| format!("analysis {k} ({})", a.name()))?;
            }
            if a.needs_space() && self.space.is_none() {
                bail!("analysis {k} ({}) needs a space", a.name());
            }
        }
        ensure!(self.limits.exact_cap >= 1, "exact_cap must be at least 1");
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_int_range("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_int_range("3").unwrap(), vec![3]);
        assert_eq!(parse_int_range("2, 5").unwrap(), vec![2, 5]);
        assert!(parse_int_range("4..1").is_err());
        assert!(parse_int_range("a..b").is_err());
    }

    #[test]
    fn radii() {
        let r: RadiiSpec = "dyadic:1..3".parse().unwrap();
        assert_eq!(r.values().unwrap(), vec![0.5, 0.25, 0.125]);
        let t: RadiiSpec = "triadic:2".parse().unwrap();
        assert_eq!(t.values().unwrap(), vec![1.0 / 9.0]);
        assert!("0.5,-1".parse::<RadiiSpec>().is_err());
        assert!("dyadic:".parse::<RadiiSpec>().is_err());
    }

    #[test]
    fn parses_full_config() {
        let text = r#"{
            "space": {"kind": "log_line", "points": {"log_extent": 4.0, "count": 9}},
            "analyses": [
                {"analysis": "packing", "radii": "dyadic:0..3", "exact": true},
                {"analysis": "doubling", "l": [1, 2, 3]},
                {"analysis": "theorem2", "n": 2, "j": "1..3", "metric": "sup"}
            ],
            "output": {"format": "csv"}
        }"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(c.analyses.len(), 3);
        assert_eq!(c.output.format, Format::Csv);
        let SpaceSpec::LogLine { points } = c.space.unwrap() else { panic!() };
        let v = points.values().unwrap();
        assert_eq!(v.len(), 9);
        assert_eq!(v[8], 4f64.exp_m1());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_json(r#"{"analyses": [{"analysis": "validate"}]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"analyses": [{"analysis": "nope"}]}"#).is_err());
        let bad_l = r#"{"space": {"kind": "cantor", "level": 3},
                        "analyses": [{"analysis": "doubling", "l": "5..1"}]}"#;
        assert!(ExperimentConfig::from_json(bad_l).is_err());
        let bad_w = r#"{"analyses": [{"analysis": "theorem2", "n": 3, "j": "1..2",
                        "metric": "bendikov", "weights": [1.0]}]}"#;
        assert!(ExperimentConfig::from_json(bad_w).is_err());
    }

    #[test]
    fn empty_config_is_valid() {
        let c = ExperimentConfig::from_json("{}").unwrap();
        assert!(c.analyses.is_empty() && c.space.is_none());
    }
}
