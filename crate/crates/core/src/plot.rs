//! Static SVG charts drawn from a run's CSV artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::pipeline::window_dir_name;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("missing artifact {0}")]
    Missing(PathBuf),
    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

pub const SPAM_COLOR: &str = "#d62728";
pub const REGULAR_COLOR: &str = "#1f77b4";
const UNLABELED_COLOR: &str = "#7f7f7f";
const BAR_COLOR: &str = "#4c72b0";

fn label_color(label: &str) -> &'static str {
    match label {
        "spam" => SPAM_COLOR,
        "regular" => REGULAR_COLOR,
        _ => UNLABELED_COLOR,
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(title: &str) -> String {
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    );
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let _ = writeln!(s, "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>", WIDTH / 2.0, escape(title));
    let _ = writeln!(
        s,
        "<line x1=\"{MARGIN}\" y1=\"{y}\" x2=\"{x}\" y2=\"{y}\" stroke=\"black\"/><line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{y}\" stroke=\"black\"/>",
        y = HEIGHT - MARGIN,
        x = WIDTH - MARGIN
    );
    s
}

fn scale(v: f64, lo: f64, hi: f64, out_lo: f64, out_hi: f64) -> f64 {
    if hi > lo {
        out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)
    } else {
        (out_lo + out_hi) / 2.0
    }
}

/// Scatter of (pc1, pc2) points, one circle per ego colored by label.
pub fn scatter_svg(title: &str, points: &[(f64, f64, String)]) -> String {
    let mut s = open(title);
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|p| (p.0, p.1)).unzip();
    let (xlo, xhi) = bounds(&xs);
    let (ylo, yhi) = bounds(&ys);
    // regular egos first so spam points stay visible on top
    let mut order: Vec<&(f64, f64, String)> = points.iter().collect();
    order.sort_by_key(|p| p.2 == "spam");
    for (x, y, label) in order {
        let _ = writeln!(
            s,
            "<circle class=\"{}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.7\"/>",
            escape(label),
            scale(*x, xlo, xhi, MARGIN + 5.0, WIDTH - MARGIN - 5.0),
            scale(*y, ylo, yhi, HEIGHT - MARGIN - 5.0, MARGIN + 5.0),
            label_color(label)
        );
    }
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">PC1</text>", WIDTH / 2.0, HEIGHT - 15.0);
    let _ = writeln!(s, "<text x=\"15\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\">PC2</text>", HEIGHT / 2.0, HEIGHT / 2.0);
    s.push_str("</svg>\n");
    s
}

/// Vertical bar chart with one labeled bar per value.
pub fn bar_svg(title: &str, bars: &[(String, f64)], colors: Option<&[&str]>) -> String {
    let mut s = open(title);
    let max = bars.iter().map(|b| b.1).fold(0.0f64, f64::max);
    let slot = (WIDTH - 2.0 * MARGIN) / bars.len().max(1) as f64;
    for (i, (name, v)) in bars.iter().enumerate() {
        let h = if max > 0.0 { v / max * (HEIGHT - 2.0 * MARGIN) } else { 0.0 };
        let x = MARGIN + i as f64 * slot + slot * 0.1;
        let color = colors.and_then(|c| c.get(i).copied()).unwrap_or(BAR_COLOR);
        let _ = writeln!(
            s,
            "<rect class=\"bar\" x=\"{x:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{h:.2}\" fill=\"{color}\"><title>{}: {v}</title></rect>",
            HEIGHT - MARGIN - h,
            slot * 0.8,
            escape(name)
        );
        if bars.len() <= 30 {
            let _ = writeln!(
                s,
                "<text x=\"{:.2}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"middle\">{}</text>",
                x + slot * 0.4,
                HEIGHT - MARGIN + 12.0,
                escape(name)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn read_csv(path: &Path) -> Result<Vec<csv::StringRecord>, PlotError> {
    if !path.exists() {
        return Err(PlotError::Missing(path.to_path_buf()));
    }
    let mut r = csv::Reader::from_path(path).map_err(|e| malformed(path, e))?;
    r.records().collect::<Result<_, _>>().map_err(|e| malformed(path, e))
}

fn malformed(path: &Path, e: impl std::fmt::Display) -> PlotError {
    PlotError::Malformed { path: path.to_path_buf(), message: e.to_string() }
}

fn float(path: &Path, s: &str) -> Result<f64, PlotError> {
    s.parse().map_err(|_| malformed(path, format!("not a number: `{s}`")))
}

/// Writes every chart for the artifacts in `dir`; returns the files written.
pub fn emit_plots(dir: &Path) -> Result<Vec<PathBuf>, PlotError> {
    let mut written = Vec::new();
    let mut emit = |name: String, svg: String| -> Result<(), PlotError> {
        let path = dir.join(name);
        fs::write(&path, svg)?;
        written.push(path);
        Ok(())
    };

    let series_path = dir.join("series.csv");
    let mut series: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
    for row in read_csv(&series_path)? {
        let w: usize = row[0].parse().map_err(|_| malformed(&series_path, "bad window index"))?;
        series.entry(row[1].to_string()).or_default().push((w, float(&series_path, &row[3])?));
    }
    let window_count = series.values().map(|v| v.len()).max().unwrap_or(0);

    for w in 0..window_count {
        let path = dir.join(window_dir_name(w)).join("coords.csv");
        let points = read_csv(&path)?
            .iter()
            .map(|r| Ok((float(&path, &r[1])?, float(&path, &r[2])?, r[3].to_string())))
            .collect::<Result<Vec<_>, PlotError>>()?;
        emit(format!("spatialization_w{w}.svg"), scatter_svg(&format!("Window {w}: first two principal components"), &points))?;
    }

    for (motif, values) in &series {
        let slug = slug(motif);
        let bars: Vec<(String, f64)> = values.iter().map(|(w, v)| (w.to_string(), *v)).collect();
        emit(format!("series_{slug}.svg"), bar_svg(&format!("{motif} per window"), &bars, None))?;
    }

    let ranking_path = dir.join("ranking.csv");
    let rows = read_csv(&ranking_path)?;
    let manifest_path = dir.join("run_manifest.json");
    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(&manifest_path).map_err(|_| PlotError::Missing(manifest_path.clone()))?,
    )
    .map_err(|e| malformed(&manifest_path, e))?;
    let motif = manifest["ranking"]["motif"].as_str().unwrap_or_default().to_string();
    let window = manifest["ranking"]["window"].as_u64().unwrap_or(0);
    let top: Vec<&csv::StringRecord> = rows.iter().take(25).collect();
    let bars = top
        .iter()
        .map(|r| Ok((r[1].to_string(), float(&ranking_path, &r[2])?)))
        .collect::<Result<Vec<_>, PlotError>>()?;
    let colors: Vec<&str> = top.iter().map(|r| label_color(&r[3])).collect();
    emit(
        format!("ranking_{}.svg", slug(&motif)),
        bar_svg(&format!("Top users for {motif} in window {window}"), &bars, Some(&colors)),
    )?;
    Ok(written)
}

pub(crate) fn slug(motif: &str) -> String {
    motif.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scatter_colors_by_label() {
        let pts = vec![(0.0, 0.0, "regular".to_string()), (1.0, 1.0, "spam".to_string())];
        let svg = scatter_svg("t", &pts);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains(SPAM_COLOR) && svg.contains(REGULAR_COLOR));
    }

    #[test]
    fn one_bar_per_value() {
        let bars: Vec<(String, f64)> = (0..12).map(|i| (i.to_string(), i as f64)).collect();
        assert_eq!(bar_svg("t", &bars, None).matches("class=\"bar\"").count(), 12);
    }

    #[test]
    fn missing_artifacts_reported() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(emit_plots(dir.path()), Err(PlotError::Missing(_))));
    }
}
