use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SweepTable;
use crate::error::{Error, Result};

const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" | "svg-plot" => Ok(OutputFormat::Svg),
            other => Err(Error::invalid(format!("unknown format '{other}' (expected csv, json or svg)"))),
        }
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed.
pub fn format_significant(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Serializes `table` to text in the requested format.
pub fn render(table: &SweepTable, format: OutputFormat) -> Result<String> {
    table.check_lengths()?;
    match format {
        OutputFormat::Csv => render_csv(table),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(table).map_err(|e| Error::invalid(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Svg => Ok(render_svg(table)),
    }
}

fn render_csv(table: &SweepTable) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::invalid(e.to_string());
    w.write_record(table.columns().iter().map(|c| c.name.as_str())).map_err(to_err)?;
    for row in 0..table.n_rows() {
        w.write_record(table.columns().iter().map(|c| format_significant(c.values[row]))).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

fn render_svg(table: &SweepTable) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const MARGIN: f64 = 50.0;
    let cols = table.columns();
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    if cols.len() >= 2 && table.n_rows() > 0 {
        let (xs, ys) = (&cols[0].values, &cols[1].values);
        let range = |v: &[f64]| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) }
        };
        let ((x0, x1), (y0, y1)) = (range(xs), range(ys));
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
        let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
        let points: Vec<String> = xs.iter().zip(ys).map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            out,
            r#"<path d="M{m} {H2} H{W2} M{m} {H2} V{m}" stroke="black" fill="none"/>"#,
            m = MARGIN,
            H2 = H - MARGIN,
            W2 = W - MARGIN
        );
        let _ = writeln!(out, r#"<polyline points="{}" stroke="steelblue" stroke-width="1.5" fill="none"/>"#, points.join(" "));
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#, W / 2.0, H - 12.0, cols[0].name);
        let _ = writeln!(out, r#"<text x="14" y="{}" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">{}</text>"#, H / 2.0, H / 2.0, cols[1].name);
        for (v, x, y) in [(x0, px(x0), H - MARGIN + 14.0), (x1, px(x1), H - MARGIN + 14.0)] {
            let _ = writeln!(out, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="middle" font-size="10">{}</text>"#, format_significant(v));
        }
        for (v, y) in [(y0, py(y0)), (y1, py(y1))] {
            let _ = writeln!(out, r#"<text x="{:.2}" y="{y:.2}" text-anchor="end" font-size="10">{}</text>"#, MARGIN - 4.0, format_significant(v));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Writes `table` to `path`.
pub fn emit(table: &SweepTable, format: OutputFormat, path: &Path) -> Result<()> {
    let text = render(table, format)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a table previously written as json.
pub fn load_json(path: &Path) -> Result<SweepTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let table: SweepTable =
        serde_json::from_str(&text).map_err(|e| Error::Format { path: path.to_path_buf(), message: e.to_string() })?;
    table.check_lengths()?;
    Ok(table)
}
