//! Report assembly and serialization.
//!
//! Reports carry no timestamps, host names or thread counts, and analyses
//! appear in config order, so identical configs give identical bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use doubleprobe_core::io::SYMMETRY_TOL;
use doubleprobe_core::tolerance::{ABS_FLOOR, REL_TOL};
use serde::Serialize;
use serde_json::Value;

use crate::analysis::{run_analysis, Table};
use crate::config::{ExperimentConfig, Format};
use crate::space::{Space, SpaceSummary};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    /// Every computation is deterministic; the seed is recorded for tooling
    /// that expects one.
    pub seed: u64,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub relative: f64,
    pub absolute_floor: f64,
    pub csv_symmetry: f64,
}

impl Default for Provenance {
    fn default() -> Self {
        Self {
            tool: "doubleprobe",
            version: env!("CARGO_PKG_VERSION"),
            seed: 0,
            tolerances: Tolerances { relative: REL_TOL, absolute_floor: ABS_FLOOR, csv_symmetry: SYMMETRY_TOL },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisResult {
    pub index: usize,
    pub analysis: &'static str,
    pub result: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisError {
    /// `None` for failures outside any analysis, such as building the space.
    pub index: Option<usize>,
    pub analysis: Option<&'static str>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub provenance: Provenance,
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSummary>,
    pub results: Vec<AnalysisResult>,
    pub errors: Vec<AnalysisError>,
    #[serde(skip)]
    pub tables: Vec<(usize, &'static str, Table)>,
    #[serde(skip)]
    pub plots: Vec<(usize, &'static str, String)>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// One block per analysis, each headed by a `# index analysis` line.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = Vec::new();
        for (k, (index, name, table)) in self.tables.iter().enumerate() {
            if k > 0 {
                out.push(b'\n');
            }
            writeln!(out, "# {index} {name}")?;
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(&mut out);
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        for e in &self.errors {
            let at = e.index.map_or("-".to_string(), |i| i.to_string());
            writeln!(out, "# error {at} {}", e.message.replace('\n', " "))?;
        }
        Ok(String::from_utf8(out)?)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Builds the space and runs every analysis in order. Failures are recorded
/// in the report rather than aborting the run.
pub fn run(config: &ExperimentConfig) -> Report {
    let mut report = Report {
        schema: SCHEMA,
        provenance: Provenance::default(),
        config: config.clone(),
        space: None,
        results: Vec::new(),
        errors: Vec::new(),
        tables: Vec::new(),
        plots: Vec::new(),
    };
    if let Err(e) = config.validate() {
        report.errors.push(AnalysisError { index: None, analysis: None, message: format!("{e:#}") });
        return report;
    }
    let space = match &config.space {
        Some(spec) if config.analyses.iter().any(|a| a.needs_space()) => match Space::build(spec) {
            Ok(s) => Some(s),
            Err(e) => {
                report.errors.push(AnalysisError {
                    index: None,
                    analysis: None,
                    message: format!("building the space: {e:#}"),
                });
                return report;
            }
        },
        _ => None,
    };
    report.space = space.as_ref().map(|s| s.summary.clone());
    for (index, analysis) in config.analyses.iter().enumerate() {
        let name = analysis.name();
        match run_analysis(analysis, space.as_ref(), config.space.as_ref(), &config.limits) {
            Ok(outcome) => {
                report.results.push(AnalysisResult { index, analysis: name, result: outcome.value });
                report.tables.push((index, name, outcome.table));
                if let Some(svg) = outcome.plot {
                    report.plots.push((index, name, svg));
                }
            }
            Err(e) => report.errors.push(AnalysisError {
                index: Some(index),
                analysis: Some(name),
                message: format!("{e:#}"),
            }),
        }
    }
    report
}

/// Writes the report to `path`, or standard output when `path` is `None`.
pub fn write_report(report: &Report, format: Format, path: Option<&Path>) -> Result<()> {
    let text = report.render(format)?;
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Writes the plot of the first plottable analysis to `path`.
pub fn write_first_plot(report: &Report, path: &Path) -> Result<bool> {
    match report.plots.first() {
        Some((_, _, svg)) => {
            fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
            Ok(true)
        }
        None => Ok(false),
    }
}

/// Writes every plot as `<dir>/<index>_<analysis>.svg`.
pub fn write_plots(report: &Report, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (index, name, svg) in &report.plots {
        let path = dir.join(format!("{index}_{name}.svg"));
        fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_echoes_only() {
        let report = run(&ExperimentConfig::from_json("{}").unwrap());
        assert!(report.ok());
        let v: Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["results"], Value::Array(vec![]));
        assert_eq!(v["provenance"]["seed"], 0);
        assert!(v.get("space").is_none());
    }

    #[test]
    fn errors_are_collected_per_analysis() {
        let config = ExperimentConfig::from_json(
            r#"{"space": {"kind": "log_line", "points": {"range": [0, 10], "count": 100}},
                "analyses": [
                    {"analysis": "packing", "radii": "0.5", "exact": true},
                    {"analysis": "doubling", "l": "1..3"}
                ]}"#,
        )
        .unwrap();
        let report = run(&config);
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].index, Some(0));
        assert!(report.errors[0].message.contains("cap"));
        assert_eq!(report.results.len(), 1);
        assert_eq!(report.results[0].analysis, "doubling");
    }

    #[test]
    fn csv_blocks() {
        let config = ExperimentConfig::from_json(
            r#"{"analyses": [{"analysis": "theorem2", "n": 1, "j": "1..2", "metric": "sup"}]}"#,
        )
        .unwrap();
        let csv = run(&config).to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# 0 theorem2"));
        assert_eq!(lines.next(), Some("j,size,r_nj,lower_estimate,estimate_holds,separated,exact_max"));
        assert_eq!(lines.next(), Some("1,2,0.5,0.5,true,true,2"));
        assert_eq!(lines.next(), Some("2,4,0.25,0.25,true,true,4"));
    }
}
