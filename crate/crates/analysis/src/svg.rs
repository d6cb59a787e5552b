//! Minimal SVG renderings of histograms and 2D scatter plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::histogram::Histogram;
use crate::AnalysisError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 40.0;

fn frame(title: &str, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{MARGIN}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n\
         <line x1=\"{MARGIN}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{b}\" stroke=\"black\"/>\n{body}</svg>\n",
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
    )
}

pub fn histogram_svg(h: &Histogram, title: &str) -> String {
    let peak = h.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let bar_w = plot_w / h.counts.len() as f64;
    let mut body = String::new();
    for (k, &c) in h.counts.iter().enumerate() {
        let height = plot_h * c as f64 / peak;
        let _ = writeln!(
            body,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"steelblue\"/>",
            MARGIN + k as f64 * bar_w,
            HEIGHT - MARGIN - height,
            bar_w,
            height
        );
    }
    let (lo, hi) = (h.spec.lo, h.spec.hi);
    let _ = writeln!(
        body,
        "<text x=\"{MARGIN}\" y=\"{:.0}\" font-family=\"sans-serif\" font-size=\"11\">{lo}</text>\
         <text x=\"{:.0}\" y=\"{:.0}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{hi}</text>",
        HEIGHT - MARGIN + 16.0,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 16.0
    );
    frame(&format!("{title} (peak {peak}, excluded {})", h.excluded), &body)
}

/// Scatter of labelled points, one colour per distinct label.
pub fn scatter_svg(points: &[(f64, f64, String)], title: &str) -> String {
    const COLOURS: [&str; 4] = ["crimson", "seagreen", "royalblue", "darkorange"];
    let mut labels: Vec<&str> = points.iter().map(|p| p.2.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    let span = |f: fn(&(f64, f64, String)) -> f64| {
        let lo = points.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 1.0, lo + 1.0)
        }
    };
    let mut body = String::new();
    if !points.is_empty() {
        let (x0, x1) = span(|p| p.0);
        let (y0, y1) = span(|p| p.1);
        for (x, y, label) in points {
            let k = labels.iter().position(|l| l == label).unwrap_or(0);
            let _ = writeln!(
                body,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.7\"/>",
                MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN),
                HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN),
                COLOURS[k % COLOURS.len()]
            );
        }
    }
    for (k, label) in labels.iter().enumerate() {
        let _ = writeln!(
            body,
            "<text x=\"{:.0}\" y=\"{:.0}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">{label}</text>",
            WIDTH - MARGIN - 60.0,
            MARGIN + 14.0 * k as f64,
            COLOURS[k % COLOURS.len()]
        );
    }
    frame(title, &body)
}

pub fn write_svg(path: &Path, svg: &str) -> Result<(), AnalysisError> {
    std::fs::write(path, svg)?;
    Ok(())
}
