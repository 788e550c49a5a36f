//! Minimal standalone SVG scatter plots with an optional fitted line.

use std::fmt::Write as _;

use anyhow::{ensure, Result};
use doubleprobe_core::{DoublingReport, PackingFit};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;
const TICKS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    /// `y = slope * x + intercept`.
    pub line: Option<(f64, f64)>,
    pub annotation: Option<String>,
}

/// `log2 count` against the level `l`, with the fitted packing line.
pub fn emit_plot(series: &[(f64, usize)], fit: &PackingFit) -> Result<String> {
    ensure!(series.len() >= 2, "a plot needs at least two points, got {}", series.len());
    ensure!(series.iter().all(|&(_, c)| c > 0), "counts must be positive to plot on a log scale");
    render(&Plot {
        title: "Packing counts".into(),
        x_label: "l  (radius 2^-l)".into(),
        y_label: "log2 count".into(),
        points: series.iter().map(|&(l, c)| (l, (c as f64).log2())).collect(),
        line: Some((fit.exponent, fit.constant.log2())),
        annotation: Some(format!("N̂≈{:.1}", fit.exponent)),
    })
}

/// Worst doubling ratio per `l` with the trend line behind the verdict.
pub fn doubling_plot(report: &DoublingReport) -> Result<String> {
    ensure!(report.l_values.len() >= 2, "a plot needs at least two points");
    let xs: Vec<f64> = report.l_values.iter().map(|&l| f64::from(l)).collect();
    let mean_x = xs.iter().sum::<f64>() / xs.len() as f64;
    let mean_y = report.ratios.iter().sum::<f64>() / xs.len() as f64;
    render(&Plot {
        title: "Doubling ratios".into(),
        x_label: "l  (radius 2^-l)".into(),
        y_label: "max μ(B(x,2r)) / μ(B(x,r))".into(),
        points: xs.iter().copied().zip(report.ratios.iter().copied()).collect(),
        line: Some((report.trend_slope, mean_y - report.trend_slope * mean_x)),
        annotation: Some(format!("slope {:.3}", report.trend_slope)),
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi - lo < 1e-12 {
        (lo - 1.0, hi + 1.0)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

pub fn render(plot: &Plot) -> Result<String> {
    ensure!(plot.points.len() >= 2, "a plot needs at least two points, got {}", plot.points.len());
    ensure!(plot.points.iter().all(|(x, y)| x.is_finite() && y.is_finite()), "plot points must be finite");
    let (x0, x1) = padded_range(plot.points.iter().map(|p| p.0));
    let line_ys = plot.line.iter().flat_map(|&(a, b)| [a * x0 + b, a * x1 + b]);
    let (y0, y1) = padded_range(plot.points.iter().map(|p| p.1).chain(line_ys));
    let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )?;
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(
        s,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(&plot.title)
    )?;
    writeln!(s, r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#)?;
    for k in 0..=TICKS {
        let t = k as f64 / TICKS as f64;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let bottom = MARGIN_TOP + ph;
        writeln!(s, r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, bottom + 5.0)?;
        writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{xv:.2}</text>"#, bottom + 18.0)?;
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_LEFT:.2}" y2="{py:.2}" stroke="black"/>"#,
            MARGIN_LEFT - 5.0
        )?;
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.2}</text>"#, MARGIN_LEFT - 8.0, py + 4.0)?;
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(&plot.x_label)
    )?;
    writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        MARGIN_TOP + ph / 2.0,
        MARGIN_TOP + ph / 2.0,
        escape(&plot.y_label)
    )?;
    if let Some((a, b)) = plot.line {
        writeln!(
            s,
            r##"<line class="fit" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="1.5"/>"##,
            sx(x0),
            sy(a * x0 + b),
            sx(x1),
            sy(a * x1 + b)
        )?;
    }
    for &(x, y) in &plot.points {
        writeln!(s, r##"<circle class="point" cx="{:.2}" cy="{:.2}" r="4" fill="#2c3e50"/>"##, sx(x), sy(y))?;
    }
    if let Some(note) = &plot.annotation {
        writeln!(
            s,
            r#"<text class="annotation" x="{:.2}" y="{:.2}" font-size="14">{}</text>"#,
            MARGIN_LEFT + 12.0,
            MARGIN_TOP + 20.0,
            escape(note)
        )?;
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use doubleprobe_core::packing_exponent_fit;

    fn fit_of(l: &[i32], counts: &[usize]) -> PackingFit {
        packing_exponent_fit(l, counts).unwrap()
    }

    #[test]
    fn rejects_single_point() {
        let fit = PackingFit { exponent: 1.0, constant: 1.0 };
        assert!(emit_plot(&[(1.0, 2)], &fit).is_err());
    }

    #[test]
    fn line_passes_through_collinear_points() {
        let fit = fit_of(&[1, 2], &[2, 4]);
        let svg = emit_plot(&[(1.0, 2), (2.0, 4)], &fit).unwrap();
        let circles: Vec<&str> = svg.lines().filter(|l| l.contains("class=\"point\"")).collect();
        let line = svg.lines().find(|l| l.contains("class=\"fit\"")).unwrap();
        // Both points lie on the fitted line.
        let num = |s: &str, key: &str| -> f64 {
            let start = s.find(&format!("{key}=\"")).unwrap() + key.len() + 2;
            s[start..].split('"').next().unwrap().parse().unwrap()
        };
        let (lx1, ly1, lx2, ly2) = (num(line, "x1"), num(line, "y1"), num(line, "x2"), num(line, "y2"));
        for c in circles {
            let (cx, cy) = (num(c, "cx"), num(c, "cy"));
            let expect = ly1 + (ly2 - ly1) * (cx - lx1) / (lx2 - lx1);
            assert!((cy - expect).abs() < 0.02);
        }
    }

    #[test]
    fn torus_label() {
        let l = [1, 2, 3, 4];
        let counts = [4, 16, 64, 256];
        let series: Vec<(f64, usize)> = l.iter().map(|&x| f64::from(x)).zip(counts).collect();
        let svg = emit_plot(&series, &fit_of(&l, &counts)).unwrap();
        assert!(svg.contains("N̂≈2.0"));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn output_is_stable() {
        let fit = fit_of(&[1, 2, 3], &[2, 3, 9]);
        let series = [(1.0, 2), (2.0, 3), (3.0, 9)];
        assert_eq!(emit_plot(&series, &fit).unwrap(), emit_plot(&series, &fit).unwrap());
    }
}
