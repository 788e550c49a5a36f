//! Runs one analysis and shapes its result for the report.

use anyhow::{ensure, Context, Result};
use doubleprobe_core::tolerance::approx_ge;
use doubleprobe_core::{
    ball_measure, cantor_radius, covering_number_with, doubling_verdict_with, geometric_doubling_profile_with,
    is_separated, max_separated_exact_capped, packing_exponent_fit_levels, packing_report, sandwich_check,
    subgroup_min_distance, theorem3_witness, torus_grid, validate_quasimetric, CoverOptions, DoublingSweep,
    FiniteMetric, MeasuredSpace, ProductMetricSpec, TorusSample, COVER_CAP,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Analysis, CenterChoice, Limits, SpaceSpec};
use crate::plot;
use crate::space::Space;
use crate::with_sample;

/// A flat table for CSV output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

fn cell<T: ToString>(v: T) -> String {
    v.to_string()
}

pub struct Outcome {
    pub value: Value,
    pub table: Table,
    pub plot: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).context("serializing result")
}

pub fn run_analysis(
    analysis: &Analysis,
    space: Option<&Space>,
    space_spec: Option<&SpaceSpec>,
    limits: &Limits,
) -> Result<Outcome> {
    let need = || space.context("this analysis needs a space");
    match analysis {
        Analysis::Validate => validate(need()?, limits),
        Analysis::Metrize => metrize(need()?, limits),
        Analysis::Packing { radii, exact } => packing(need()?, &radii.values()?, *exact, limits),
        Analysis::Covering { radii } => covering(need()?, &radii.values()?),
        Analysis::CoverProfile { radii } => cover_profile(need()?, &radii.values()?),
        Analysis::BallMasses { radii } => ball_masses(need()?, space_spec, &radii.values()?),
        Analysis::Doubling { l, centers, threshold } => doubling(need()?, &l.check()?, centers, *threshold),
        Analysis::Theorem2 { n, j, metric, weights } => {
            theorem2(*n, &j.check()?, &ProductMetricSpec { kind: *metric, weights: weights.clone() }, limits)
        }
        Analysis::Theorem3 { n, j, metric, weights, resolution, tol } => {
            theorem3(*n, *j, ProductMetricSpec { kind: *metric, weights: weights.clone() }, *resolution, *tol, limits)
        }
    }
}

fn validate(space: &Space, limits: &Limits) -> Result<Outcome> {
    let report = match &space.raw_rows {
        Some(rows) => {
            ensure!(rows.len() <= limits.metrize_cap, "validation is cubic; {} points is above the cap", rows.len());
            validate_quasimetric(rows)?
        }
        None => validate_quasimetric(&space.matrix(limits.metrize_cap, "validation")?.to_rows())?,
    };
    let mut table = Table::new(&["field", "value"]);
    table.push(vec!["n".into(), cell(report.n)]);
    table.push(vec!["symmetric".into(), cell(report.symmetric)]);
    table.push(vec!["positive_off_diagonal".into(), cell(report.positive_off_diagonal)]);
    table.push(vec!["zero_diagonal".into(), cell(report.zero_diagonal)]);
    table.push(vec!["quasi_constant".into(), cell(report.quasi_constant)]);
    table.push(vec!["is_metric".into(), cell(report.is_metric)]);
    let mut value = to_value(&report)?;
    value["bounds"] = json!({
        "quasi_constant": "lower bound on the quasi-triangle constant of the underlying space"
    });
    Ok(Outcome { value, table, plot: None })
}

fn metrize(space: &Space, limits: &Limits) -> Result<Outcome> {
    let m = space.matrix(limits.metrize_cap, "metrization")?;
    let (report, result) = sandwich_check(&m)?;
    let labels: Vec<String> = (0..m.n()).map(|i| m.label(i)).collect();
    let mut header = vec!["label".to_string()];
    header.extend(labels.iter().cloned());
    let mut table = Table { header, rows: Vec::new() };
    for (i, row) in result.chain.rows().enumerate() {
        let mut r = vec![labels[i].clone()];
        r.extend(row.iter().map(cell));
        table.push(r);
    }
    let mut value = to_value(&report)?;
    value["labels"] = to_value(&labels)?;
    value["chain"] = to_value(&result.chain.to_rows())?;
    value["bounds"] = json!({
        "quasi_constant": "lower bound on the quasi-triangle constant of the underlying space",
        "chain": "exact shortest-chain metric of the sample",
        "max_sandwich_ratio": "exact on the sample; at most 4 by the sandwich bound",
    });
    Ok(Outcome { value, table, plot: None })
}

fn packing(space: &Space, radii: &[f64], exact: bool, limits: &Limits) -> Result<Outcome> {
    let report = with_sample!(space, |s| packing_report(s.metric(), radii, exact, limits.exact_cap)?);
    let mut table = Table::new(&["radius", "level", "count", "exact"]);
    for k in 0..radii.len() {
        table.push(vec![cell(report.radii[k]), cell(report.levels[k]), cell(report.counts[k]), cell(report.exact[k])]);
    }
    let plot = match &report.fit {
        Some(fit) if radii.len() >= 2 => {
            let series: Vec<(f64, usize)> = report.levels.iter().copied().zip(report.counts.iter().copied()).collect();
            Some(plot::emit_plot(&series, fit)?)
        }
        _ => None,
    };
    let mut value = to_value(&report)?;
    value["bounds"] = json!({
        "counts": "lower bound on the packing number of the underlying space",
        "fit": "least-squares slope of log2 counts against -log2 r",
    });
    Ok(Outcome { value, table, plot })
}

fn covering(space: &Space, radii: &[f64]) -> Result<Outcome> {
    let opts = CoverOptions::default();
    let covers = with_sample!(space, |s| radii
        .iter()
        .map(|&r| covering_number_with(s.metric(), r, &opts))
        .collect::<doubleprobe_core::Result<Vec<_>>>()?);
    let mut table = Table::new(&["radius", "count", "lower_bound", "exact"]);
    for c in &covers {
        table.push(vec![cell(c.radius), cell(c.count), cell(c.lower_bound), cell(c.exact)]);
    }
    Ok(Outcome {
        value: json!({
            "covers": to_value(&covers)?,
            "bounds": {
                "count": "upper bound on the sample covering number (a cover was found)",
                "lower_bound": "lower bound on the sample covering number",
            },
        }),
        table,
        plot: None,
    })
}

fn cover_profile(space: &Space, radii: &[f64]) -> Result<Outcome> {
    let opts = CoverOptions { sample_cap: COVER_CAP, ..CoverOptions::default() };
    let profile = with_sample!(space, |s| geometric_doubling_profile_with(s.metric(), radii, &opts)?);
    let mut table = Table::new(&["radius", "max", "max_lower_bound", "argmax_center", "exact"]);
    let rows: Vec<Value> = profile
        .rows
        .iter()
        .map(|r| {
            table.push(vec![
                cell(r.radius),
                cell(r.max),
                cell(r.max_lower_bound),
                cell(r.argmax_center),
                cell(r.exact),
            ]);
            json!({
                "radius": r.radius,
                "max": r.max,
                "max_lower_bound": r.max_lower_bound,
                "argmax_center": r.argmax_center,
                "exact": r.exact,
            })
        })
        .collect();
    Ok(Outcome {
        value: json!({
            "rows": rows,
            "bounds": {
                "max": "largest cover found for any B(x, 2r); an upper bound on the sample row maximum",
                "max_lower_bound": "certified lower bound on the sample row maximum, hence on 2^N for the underlying space",
            },
        }),
        table,
        plot: None,
    })
}

fn ball_masses(space: &Space, spec: Option<&SpaceSpec>, radii: &[f64]) -> Result<Outcome> {
    // On a Cantor sample, triadic radii are re-expressed on the sample's
    // own 3^-level grid so that membership ties are decided exactly.
    let radii: Vec<f64> = match spec {
        Some(SpaceSpec::Cantor { level }) => radii
            .iter()
            .map(|&r| {
                let k = (-r.ln() / 3f64.ln()).round();
                if k >= 0.0 && (3f64.powf(-k) - r).abs() <= 1e-12 * r {
                    cantor_radius(*level, k as u32)
                } else {
                    r
                }
            })
            .collect(),
        _ => radii.to_vec(),
    };
    let rows = with_sample!(space, |s| mass_rows(s, &radii)?);
    let mut table = Table::new(&["radius", "min_mass", "max_mass", "uniform"]);
    for r in &rows {
        table.push(vec![cell(r.radius), cell(r.min_mass), cell(r.max_mass), cell(r.uniform)]);
    }
    Ok(Outcome {
        value: json!({ "rows": to_value(&rows)?, "bounds": { "masses": "exact on the sample" } }),
        table,
        plot: None,
    })
}

#[derive(Serialize)]
struct MassRow {
    radius: f64,
    min_mass: f64,
    max_mass: f64,
    /// Every center's ball has the same mass.
    uniform: bool,
}

fn mass_rows<M: FiniteMetric>(s: &MeasuredSpace<M>, radii: &[f64]) -> Result<Vec<MassRow>> {
    radii
        .iter()
        .map(|&r| {
            let masses = (0..s.len()).map(|x| ball_measure(s, x, r)).collect::<doubleprobe_core::Result<Vec<_>>>()?;
            let min = masses.iter().copied().fold(f64::INFINITY, f64::min);
            let max = masses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(MassRow { radius: r, min_mass: min, max_mass: max, uniform: min == max })
        })
        .collect()
}

fn doubling(space: &Space, l: &[i32], centers: &CenterChoice, threshold: f64) -> Result<Outcome> {
    let sweep = match centers {
        CenterChoice::All => DoublingSweep::AllCenters,
        CenterChoice::List(c) => DoublingSweep::Centers(c.clone()),
        CenterChoice::Auto if space.summary.homogeneous => DoublingSweep::Centers(vec![0]),
        CenterChoice::Auto => DoublingSweep::AllCenters,
    };
    let report = with_sample!(space, |s| doubling_verdict_with(s, l, &sweep, threshold)?);
    let mut table = Table::new(&["l", "radius", "ratio", "argmax_center"]);
    for k in 0..l.len() {
        table.push(vec![
            cell(report.l_values[k]),
            cell(report.radii[k]),
            cell(report.ratios[k]),
            cell(report.argmax_centers[k]),
        ]);
    }
    let plot = Some(plot::doubling_plot(&report)?);
    let mut value = to_value(&report)?;
    value["bounds"] = json!({
        "ratios": "lower bounds on the doubling constant of the measure (finite sweep)",
        "consistent_with_doubling": "sample-level evidence, not a proof",
    });
    Ok(Outcome { value, table, plot })
}

#[derive(Serialize)]
struct Theorem2Row {
    j: i32,
    size: usize,
    /// Smallest distance within the grid.
    r_nj: f64,
    /// `r_{n,1} 2^(1-j)`.
    lower_estimate: f64,
    estimate_holds: bool,
    separated: bool,
    /// Exact maximum separated set size, when the grid fits the cap.
    exact_max: Option<usize>,
}

fn theorem2(n: usize, js: &[i32], spec: &ProductMetricSpec, limits: &Limits) -> Result<Outcome> {
    ensure!(js.iter().all(|&j| j >= 1), "j values must be at least 1");
    let r_n1 = subgroup_min_distance(n, 1, spec)?;
    let mut rows = Vec::with_capacity(js.len());
    for &j in js {
        let ju = j as usize;
        let sample = TorusSample::new(torus_grid(n, ju)?, spec.clone())?;
        let r = subgroup_min_distance(n, ju, spec)?;
        let all: Vec<usize> = (0..sample.len()).collect();
        let lower_estimate = r_n1 * 2f64.powi(1 - j);
        let exact_max = if sample.len() <= limits.exact_cap {
            Some(max_separated_exact_capped(&sample, r, limits.exact_cap)?.len())
        } else {
            None
        };
        rows.push(Theorem2Row {
            j,
            size: sample.len(),
            r_nj: r,
            lower_estimate,
            estimate_holds: approx_ge(r, lower_estimate),
            separated: is_separated(&sample, &all, r),
            exact_max,
        });
    }
    let levels: Vec<f64> = rows.iter().map(|r| -r.r_nj.log2()).collect();
    let sizes: Vec<usize> = rows.iter().map(|r| r.size).collect();
    let fit = if rows.len() >= 2 { Some(packing_exponent_fit_levels(&levels, &sizes)?) } else { None };
    let mut table = Table::new(&["j", "size", "r_nj", "lower_estimate", "estimate_holds", "separated", "exact_max"]);
    for r in &rows {
        table.push(vec![
            cell(r.j),
            cell(r.size),
            cell(r.r_nj),
            cell(r.lower_estimate),
            cell(r.estimate_holds),
            cell(r.separated),
            r.exact_max.map(cell).unwrap_or_default(),
        ]);
    }
    let plot = match &fit {
        Some(f) => Some(plot::emit_plot(&levels.iter().copied().zip(sizes.iter().copied()).collect::<Vec<_>>(), f)?),
        None => None,
    };
    Ok(Outcome {
        value: json!({
            "n": n,
            "metric": spec,
            "r_n1": r_n1,
            "rows": to_value(&rows)?,
            "fit": fit,
            "bounds": {
                "size": "lower bound on the packing number of the torus at radius r_nj",
                "fit": "least-squares slope of log2 size against -log2 r_nj",
            },
        }),
        table,
        plot,
    })
}

fn theorem3(
    n: usize,
    j: usize,
    spec: ProductMetricSpec,
    resolution: usize,
    tol: f64,
    limits: &Limits,
) -> Result<Outcome> {
    let metric = spec.clone().into();
    let set = theorem3_witness(n, j, metric, resolution, tol)?;
    let exact_check = if set.witnesses.len() <= limits.exact_cap {
        let m = set.distance_matrix(&spec.into())?;
        Some(max_separated_exact_capped(&m, set.required_separation, limits.exact_cap)?.len())
    } else {
        None
    };
    let mut header: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    header.extend((0..n).map(|i| format!("x{i}")));
    header.push("residual".into());
    let mut table = Table { header, rows: Vec::new() };
    for w in &set.witnesses {
        let mut row: Vec<String> = w.target.iter().map(cell).collect();
        row.extend(w.point.iter().map(cell));
        row.push(cell(w.residual));
        table.push(row);
    }
    let mut value = to_value(&set)?;
    value["exact_separated_count"] = to_value(&exact_check)?;
    value["bounds"] = json!({
        "min_pairwise": "certified lower bound: the witnesses form a (step - 2 tol)-separated set",
        "gap": "face gap of the sampled cube; an upper bound on the continuum gap",
        "discretization_error": "largest metric distance across half a grid cell",
    });
    Ok(Outcome { value, table, plot: None })
}
