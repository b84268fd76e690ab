//! Plain-text emitters: CSV with %.17g-style numerics, JSON reports, SVG
//! log-log plots. Every file embeds the config hash and the code version so
//! runs are diffable and attributable.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fracreg::quotient::OscillationTrace;
use fracreg::{FracError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest-faithful decimal with 17 significant digits (the %.17g contract):
/// plain decimal for exponents in [-4, 17), e-notation outside, trailing
/// zeros trimmed.
pub fn g17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..17).contains(&exp) {
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        return format!("{mant}e{exp}");
    }
    let frac_digits = (16 - exp).max(0) as usize;
    let fixed = format!("{:.*}", frac_digits, x);
    if fixed.contains('.') {
        fixed.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        fixed
    }
}

pub struct Stamp {
    pub config_sha256: String,
    pub seed: u64,
}

impl Stamp {
    pub fn comment(&self) -> String {
        format!(
            "fracreg {VERSION} config_sha256={} seed={}",
            self.config_sha256, self.seed
        )
    }
}

pub fn write_csv(
    path: &Path,
    stamp: &Stamp,
    header: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# {}", stamp.comment());
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| g17(*v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    fs::write(path, out).map_err(|e| FracError::Contract(format!("write {path:?}: {e}")))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| FracError::Contract(format!("serialize: {e}")))?;
    fs::write(path, text + "\n").map_err(|e| FracError::Contract(format!("write {path:?}: {e}")))
}

/// Wraps a serializable report with the version/hash/seed envelope.
pub fn stamped_json<T: serde::Serialize>(stamp: &Stamp, body: &T) -> Result<serde_json::Value> {
    let mut value = serde_json::to_value(body)
        .map_err(|e| FracError::Contract(format!("serialize: {e}")))?;
    if let serde_json::Value::Object(map) = &mut value {
        map.insert("version".into(), serde_json::json!(VERSION));
        map.insert("config_sha256".into(), serde_json::json!(stamp.config_sha256));
        map.insert("seed".into(), serde_json::json!(stamp.seed));
    }
    Ok(value)
}

/// Log-log oscillation plot: measured points plus the fitted line.
pub fn oscillation_svg(stamp: &Stamp, trace: &OscillationTrace) -> String {
    let pts: Vec<(f64, f64)> = trace
        .radii
        .iter()
        .zip(&trace.osc)
        .filter(|(_, o)| o.is_finite() && **o > 0.0)
        .map(|(r, o)| (r.ln(), o.ln()))
        .collect();
    let (w, hgt, margin) = (480.0, 360.0, 50.0);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{hgt}">"#);
    let _ = writeln!(svg, "<!-- {} -->", stamp.comment());
    if pts.is_empty() {
        let _ = writeln!(svg, "</svg>");
        return svg;
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let pad = |a: f64, b: f64| if (b - a).abs() < 1e-12 { (a - 1.0, b + 1.0) } else { (a, b) };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let sx = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
    let sy = |y: f64| hgt - margin - (y - y0) / (y1 - y0) * (hgt - 2.0 * margin);
    let _ = writeln!(
        svg,
        r#"<rect x="{margin}" y="{margin}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * margin,
        hgt - 2.0 * margin
    );
    // fitted line alpha * x + ln C across the x-range
    let fit_y = |x: f64| trace.alpha * x + trace.constant.ln();
    let _ = writeln!(
        svg,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" stroke-width="1.5"/>"#,
        sx(x0),
        sy(fit_y(x0)),
        sx(x1),
        sy(fit_y(x1))
    );
    for &(x, y) in &pts {
        let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="crimson"/>"#, sx(x), sy(y));
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.0}" y="20" font-size="13">log osc vs log r at ({:.4}, {:.4}): alpha = {:.4}</text>"#,
        margin,
        trace.anchor[0],
        trace.anchor[1],
        trace.alpha
    );
    let _ = writeln!(svg, r#"<text x="{:.0}" y="{:.0}" font-size="12">log r</text>"#, w / 2.0, hgt - 12.0);
    let _ = writeln!(svg, "</svg>");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_round_trips() {
        for &x in &[
            0.0,
            1.0,
            0.5,
            -3.25,
            1.0 / 3.0,
            std::f64::consts::TAU,
            1.2345678901234567e-9,
            9.87e22,
            f64::MIN_POSITIVE,
        ] {
            let s = g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{x} -> {s} -> {back}");
        }
        assert_eq!(g17(0.5), "0.5");
        assert_eq!(g17(0.0), "0");
    }
}
