//! Report assembly and emission: JSON (full), CSV (flat per-instance rows,
//! RFC 4180), and an optional SVG scatter.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

/// Everything a subcommand produces; `lib.rs` turns it into files and an
/// exit code.
pub struct CommandResult {
    pub command: &'static str,
    /// Resolved experiment config (defaults included), echoed verbatim.
    pub config: Value,
    pub rows: Vec<Value>,
    pub csv_headers: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
    /// Command-specific aggregate facts (medians, set-level margins, ...).
    pub summary: Value,
    /// `false` when any verdict field is false.
    pub pass: bool,
    /// Scatter points (x, y) for the optional SVG.
    pub svg_points: Option<SvgSpec>,
}

pub struct SvgSpec {
    pub points: Vec<(f64, f64)>,
    pub x_label: String,
    pub y_label: String,
}

#[derive(Serialize)]
struct Aggregate {
    pass: bool,
    instances: usize,
    failures: usize,
}

pub struct Emitted {
    pub json_path: PathBuf,
    pub csv_path: PathBuf,
    pub svg_path: Option<PathBuf>,
    pub pass: bool,
}

pub fn emit(out_dir: &Path, result: &CommandResult, failures: usize, wall_ms: f64, svg: bool) -> Result<Emitted> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let aggregate = Aggregate {
        pass: result.pass,
        instances: result.rows.len(),
        failures,
    };
    let report = json!({
        "command": result.command,
        "config": result.config,
        "instances": result.rows,
        "summary": result.summary,
        "aggregate": serde_json::to_value(&aggregate)?,
        "wall_clock_ms": wall_ms,
    });
    let json_path = out_dir.join(format!("{}.json", result.command));
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    std::fs::write(&json_path, text)
        .with_context(|| format!("writing report {}", json_path.display()))?;

    let csv_path = out_dir.join(format!("{}.csv", result.command));
    let mut w = csv::WriterBuilder::new()
        .from_path(&csv_path)
        .with_context(|| format!("writing csv {}", csv_path.display()))?;
    w.write_record(&result.csv_headers)
        .with_context(|| format!("writing csv header {}", csv_path.display()))?;
    for row in &result.csv_rows {
        w.write_record(row)
            .with_context(|| format!("writing csv row {}", csv_path.display()))?;
    }
    w.flush()
        .with_context(|| format!("flushing csv {}", csv_path.display()))?;

    let svg_path = match (&result.svg_points, svg) {
        (Some(spec), true) => {
            let path = out_dir.join(format!("{}.svg", result.command));
            let doc = svg_scatter(spec, result.command, &result.config);
            std::fs::write(&path, doc)
                .with_context(|| format!("writing svg {}", path.display()))?;
            Some(path)
        }
        _ => None,
    };
    Ok(Emitted {
        json_path,
        csv_path,
        svg_path,
        pass: result.pass,
    })
}

/// Minimal static scatter plot with the resolved config embedded as a
/// comment.
fn svg_scatter(spec: &SvgSpec, title: &str, config: &Value) -> String {
    let (w, h) = (640.0, 480.0);
    let margin = 60.0;
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &spec.points {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if !x_lo.is_finite() {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    let pad = |lo: &mut f64, hi: &mut f64| {
        let span = (*hi - *lo).max(1e-9);
        *lo -= 0.05 * span;
        *hi += 0.05 * span;
    };
    pad(&mut x_lo, &mut x_hi);
    pad(&mut y_lo, &mut y_hi);
    let sx = |x: f64| margin + (x - x_lo) / (x_hi - x_lo) * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - (y - y_lo) / (y_hi - y_lo) * (h - 2.0 * margin);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    out.push_str(&format!("<!-- config: {config} -->\n"));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{title}</text>\n",
        w / 2.0
    ));
    out.push_str(&format!(
        "<line x1=\"{m:.1}\" y1=\"{b:.1}\" x2=\"{r:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>\n",
        m = margin,
        b = h - margin,
        r = w - margin
    ));
    out.push_str(&format!(
        "<line x1=\"{m:.1}\" y1=\"{t:.1}\" x2=\"{m:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>\n",
        m = margin,
        t = margin,
        b = h - margin
    ));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        w / 2.0,
        h - 16.0,
        spec.x_label
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
        h / 2.0,
        h / 2.0,
        spec.y_label
    ));
    for (v, label_y) in [(x_lo, false), (x_hi, false)] {
        let _ = label_y;
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"middle\">{v:.4}</text>\n",
            sx(v),
            h - margin + 16.0
        ));
    }
    for v in [y_lo, y_hi] {
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"end\">{v:.4}</text>\n",
            margin - 6.0,
            sy(v) + 4.0
        ));
    }
    for &(x, y) in &spec.points {
        out.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\" fill-opacity=\"0.6\"/>\n",
            sx(x),
            sy(y)
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Formats an f64 for CSV cells: shortest round-trip representation.
pub fn cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn cell_opt(v: Option<f64>) -> String {
    v.map(cell).unwrap_or_default()
}

pub fn cell_vec(v: &[f64]) -> String {
    v.iter().map(|x| cell(*x)).collect::<Vec<_>>().join(";")
}
