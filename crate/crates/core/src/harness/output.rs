//! CSV and SVG artifacts.
//!
//! 1-D sweeps write `<name>.csv` with header
//! `axis,value,trials,successes,srp,wilson_lo,wilson_hi,theory_threshold,theory_method`.
//! The axis column carries the algorithm, e.g. `epsilon[somps]`; several
//! overlays at one point are joined with `;` in the last two columns.
//!
//! Two-axis grids write `<name>.csv` with header
//! `axis1,value1,axis2,value2,trials,successes,srp`, plus
//! `<name>_theory.csv` (`axis1,value1,axis2,threshold,method`) and
//! `<name>_edges.csv` (`axis1,value1,axis2,target,edge`, edge empty when
//! there is none).
//!
//! Reals are written with 17 significant digits; files use LF endings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{Algorithm, Axis};
use super::runner::{CurvePoint, Overlay, RunOutput, SrpCurve, TwValidation};
use crate::error::{Error, Result};
use crate::tracywidom::f1_cdf;

pub const CSV_HEADER_1D: &str = "axis,value,trials,successes,srp,wilson_lo,wilson_hi,theory_threshold,theory_method";
pub const CSV_HEADER_2D: &str = "axis1,value1,axis2,value2,trials,successes,srp";
pub const CSV_HEADER_THEORY: &str = "axis1,value1,axis2,threshold,method";
pub const CSV_HEADER_EDGES: &str = "axis1,value1,axis2,target,edge";
pub const CSV_HEADER_TW: &str = "d,x,empirical_cdf,tw_cdf";

pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn tagged(axis: Axis, alg: Algorithm) -> String {
    format!("{}[{}]", axis.label(), alg.label())
}

pub fn curves_csv(curves: &[SrpCurve]) -> String {
    let mut s = String::from(CSV_HEADER_1D);
    s.push('\n');
    for c in curves {
        let label = tagged(c.axis, c.algorithm);
        for p in &c.points {
            let thr: Vec<String> = p.theory.iter().map(|o| fmt_real(o.value)).collect();
            let methods: Vec<&str> = p.theory.iter().map(|o| o.method.as_str()).collect();
            writeln!(
                s,
                "{label},{},{},{},{},{},{},{},{}",
                fmt_real(p.value),
                p.trials,
                p.successes,
                fmt_real(p.srp),
                fmt_real(p.wilson_lo),
                fmt_real(p.wilson_hi),
                thr.join(";"),
                methods.join(";")
            )
            .expect("string write");
        }
    }
    s
}

pub fn grid_csv(curves: &[SrpCurve]) -> String {
    let mut s = String::from(CSV_HEADER_2D);
    s.push('\n');
    for c in curves {
        let (oa, ov) = c.outer.expect("grid curve");
        for p in &c.points {
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                tagged(oa, c.algorithm),
                fmt_real(ov),
                c.axis.label(),
                fmt_real(p.value),
                p.trials,
                p.successes,
                fmt_real(p.srp)
            )
            .expect("string write");
        }
    }
    s
}

/// Row thresholds of a grid curve; per-point overlays are reduced to their
/// largest value.
pub fn row_thresholds(c: &SrpCurve) -> Vec<Overlay> {
    let mut out: Vec<Overlay> = Vec::new();
    for method in c.theory_methods() {
        let v = c
            .points
            .iter()
            .filter_map(|p| p.theory.iter().find(|o| o.method == method).map(|o| o.value))
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(Overlay { method, value: v });
    }
    out
}

pub fn theory_csv(curves: &[SrpCurve]) -> String {
    let mut s = String::from(CSV_HEADER_THEORY);
    s.push('\n');
    for c in curves {
        let (oa, ov) = c.outer.expect("grid curve");
        for o in row_thresholds(c) {
            writeln!(
                s,
                "{},{},{},{},{}",
                tagged(oa, c.algorithm),
                fmt_real(ov),
                c.axis.label(),
                fmt_real(o.value),
                o.method
            )
            .expect("string write");
        }
    }
    s
}

pub fn edges_csv(curves: &[SrpCurve]) -> String {
    let mut s = String::from(CSV_HEADER_EDGES);
    s.push('\n');
    for c in curves {
        let (oa, ov) = c.outer.expect("grid curve");
        writeln!(
            s,
            "{},{},{},{},{}",
            tagged(oa, c.algorithm),
            fmt_real(ov),
            c.axis.label(),
            fmt_real(c.target),
            c.edge().map(fmt_real).unwrap_or_default()
        )
        .expect("string write");
    }
    s
}

pub fn tw_csv(v: &TwValidation) -> String {
    let mut s = String::from(CSV_HEADER_TW);
    s.push('\n');
    for series in &v.series {
        let n = series.standardized.len() as f64;
        for (i, &x) in series.standardized.iter().enumerate() {
            writeln!(
                s,
                "{},{},{},{}",
                series.d,
                fmt_real(x),
                fmt_real((i + 1) as f64 / n),
                fmt_real(f1_cdf(x))
            )
            .expect("string write");
        }
    }
    s
}

/// One parsed row of a 1-D CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub axis: Axis,
    pub algorithm: Algorithm,
    pub point: CurvePoint,
}

fn parse_tag(tag: &str) -> std::result::Result<(Axis, Algorithm), String> {
    let (axis, rest) = tag.split_once('[').ok_or_else(|| format!("bad axis label `{tag}`"))?;
    let alg = rest.strip_suffix(']').ok_or_else(|| format!("bad axis label `{tag}`"))?;
    let axis = Axis::from_label(axis).ok_or_else(|| format!("unknown axis `{axis}`"))?;
    let alg = match alg {
        "somps" => Algorithm::Somps,
        "sompt" => Algorithm::Sompt,
        other => return Err(format!("unknown algorithm `{other}`")),
    };
    Ok((axis, alg))
}

/// Parses a 1-D CSV written by [`curves_csv`].
pub fn parse_curves_csv(text: &str) -> std::result::Result<Vec<CsvRow>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER_1D) {
        return Err("missing 1-D header".into());
    }
    let real = |s: &str| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    let int = |s: &str| s.parse::<u32>().map_err(|e| format!("`{s}`: {e}"));
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(format!("expected 9 fields: `{line}`"));
            }
            let (axis, algorithm) = parse_tag(f[0])?;
            let theory = if f[7].is_empty() {
                Vec::new()
            } else {
                f[7].split(';')
                    .zip(f[8].split(';'))
                    .map(|(v, m)| {
                        Ok(Overlay {
                            method: m.to_string(),
                            value: real(v)?,
                        })
                    })
                    .collect::<std::result::Result<_, String>>()?
            };
            Ok(CsvRow {
                axis,
                algorithm,
                point: CurvePoint {
                    value: real(f[1])?,
                    trials: int(f[2])?,
                    successes: int(f[3])?,
                    srp: real(f[4])?,
                    wilson_lo: real(f[5])?,
                    wilson_hi: real(f[6])?,
                    theory,
                },
            })
        })
        .collect()
}

const SOMPS_COLOR: &str = "#1f4e9c";
const SOMPT_COLOR: &str = "#c0392b";
const EDGE_COLOR: &str = "#e67e22";

fn alg_color(a: Algorithm) -> &'static str {
    match a {
        Algorithm::Somps => SOMPS_COLOR,
        Algorithm::Sompt => SOMPT_COLOR,
    }
}

fn method_style(method: &str) -> (&'static str, &'static str) {
    match method {
        "l2" => ("#000000", "6,4"),
        "frobenius" => ("#7f7f7f", "2,3"),
        "tracy-widom" => ("#000000", "6,4"),
        "chernoff" => ("#2e8b57", "10,3,2,3"),
        "welch" => ("#7f7f7f", "2,3"),
        _ => ("#000000", "4,4"),
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn svg_open(w: f64, h: f64, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\" font-family=\"sans-serif\" font-size=\"12\">\n<title>{}</title>\n<rect width=\"{w:.0}\" height=\"{h:.0}\" fill=\"#ffffff\"/>\n",
        esc(title)
    )
}

fn text(s: &mut String, x: f64, y: f64, anchor: &str, body: &str) {
    writeln!(s, "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"{anchor}\">{}</text>", esc(body)).expect("write");
}

/// Line plot of SRP against the swept axis with dashed theory lines.
pub fn svg_curves(title: &str, curves: &[SrpCurve], caption: &[String]) -> String {
    let (w, h) = (760.0, 470.0 + 16.0 * caption.len() as f64);
    let (x0, x1, y0, y1) = (70.0, 560.0, 40.0, 400.0);
    let values: Vec<f64> = curves.iter().flat_map(|c| c.values()).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        hi = lo + 1.0;
    }
    let px = |v: f64| x0 + (v - lo) / (hi - lo) * (x1 - x0);
    let py = |p: f64| y1 - p * (y1 - y0);
    let mut s = svg_open(w, h, title);
    text(&mut s, (x0 + x1) / 2.0, 24.0, "middle", title);
    writeln!(s, "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#000000\"/>", x1 - x0, y1 - y0).expect("write");
    for k in 0..=5 {
        let p = k as f64 / 5.0;
        writeln!(s, "<line x1=\"{x0:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\"/>", py(p), x1, py(p)).expect("write");
        text(&mut s, x0 - 8.0, py(p) + 4.0, "end", &tick(p));
        let v = lo + (hi - lo) * p;
        text(&mut s, px(v), y1 + 18.0, "middle", &tick(v));
    }
    let axis = curves.first().map(|c| c.axis.label()).unwrap_or("");
    text(&mut s, (x0 + x1) / 2.0, y1 + 38.0, "middle", axis);
    text(&mut s, 20.0, (y0 + y1) / 2.0, "middle", "SRP");

    let mut legend: Vec<(String, String, String)> = Vec::new();
    let mut drawn: Vec<(String, u64)> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    for c in curves {
        for o in row_thresholds(c) {
            let key = (o.method.clone(), o.value.to_bits());
            if drawn.contains(&key) {
                continue;
            }
            drawn.push(key);
            let (color, dash) = method_style(&o.method);
            if o.value >= lo && o.value <= hi {
                writeln!(
                    s,
                    "<line x1=\"{x:.2}\" y1=\"{y0:.2}\" x2=\"{x:.2}\" y2=\"{y1:.2}\" stroke=\"{color}\" stroke-dasharray=\"{dash}\" stroke-width=\"1.5\"/>",
                    x = px(o.value)
                )
                .expect("write");
            } else {
                notes.push(format!("{} threshold {} lies outside the sweep", o.method, tick(o.value)));
            }
            let label = format!("theory ({}) = {}", o.method, tick(o.value));
            if !legend.iter().any(|(l, _, _)| *l == label) {
                legend.push((label, color.to_string(), dash.to_string()));
            }
        }
        for n in &c.notes {
            if !notes.contains(n) {
                notes.push(n.clone());
            }
        }
    }
    if drawn.is_empty() {
        notes.insert(0, "no theory overlay: guarantee conditions fail for these parameters".into());
    }
    for c in curves {
        let color = alg_color(c.algorithm);
        let pts: Vec<String> = c.points.iter().map(|p| format!("{:.2},{:.2}", px(p.value), py(p.srp))).collect();
        writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>", pts.join(" ")).expect("write");
        for p in &c.points {
            writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>", px(p.value), py(p.srp)).expect("write");
        }
        legend.insert(0, (format!("empirical {}", c.algorithm.label().to_uppercase()), color.to_string(), String::new()));
    }
    legend.sort_by_key(|(l, _, _)| !l.starts_with("empirical"));
    for (i, (label, color, dash)) in legend.iter().enumerate() {
        let y = y0 + 12.0 + 20.0 * i as f64;
        let dash_attr = if dash.is_empty() { String::new() } else { format!(" stroke-dasharray=\"{dash}\"") };
        writeln!(s, "<line x1=\"575.00\" y1=\"{y:.2}\" x2=\"600.00\" y2=\"{y:.2}\" stroke=\"{color}\" stroke-width=\"1.5\"{dash_attr}/>").expect("write");
        text(&mut s, 606.0, y + 4.0, "start", label);
    }
    let mut y = y1 + 60.0;
    for line in caption.iter().chain(notes.iter()) {
        text(&mut s, x0, y, "start", line);
        y += 16.0;
    }
    s.push_str("</svg>\n");
    s
}

/// Fractional column position of `v` on a strictly increasing grid.
fn grid_position(values: &[f64], v: f64) -> Option<f64> {
    if values.len() == 1 {
        return (v == values[0]).then_some(0.0);
    }
    if v < values[0] || v > values[values.len() - 1] {
        return None;
    }
    let k = values.windows(2).position(|w| v <= w[1]).expect("in range");
    Some(k as f64 + (v - values[k]) / (values[k + 1] - values[k]))
}

/// Grayscale colormap of SRP (black 0, white 1), one panel per algorithm,
/// with theory contours (dashed) and the empirical edge (solid orange).
pub fn svg_grid(title: &str, curves: &[SrpCurve], caption: &[String]) -> String {
    let mut panels: Vec<Algorithm> = Vec::new();
    for c in curves {
        if !panels.contains(&c.algorithm) {
            panels.push(c.algorithm);
        }
    }
    let (pw, ph) = (340.0, 280.0);
    let (left, top) = (70.0, 50.0);
    let gap = 80.0;
    let w = left + panels.len() as f64 * (pw + gap) + 20.0;
    let h = top + ph + 110.0 + 16.0 * caption.len() as f64 + 40.0;
    let mut s = svg_open(w, h, title);
    text(&mut s, w / 2.0, 24.0, "middle", title);
    let mut notes: Vec<String> = Vec::new();
    let mut legend: Vec<(String, &'static str, &'static str)> = Vec::new();
    for (pi, alg) in panels.iter().enumerate() {
        let rows: Vec<&SrpCurve> = curves.iter().filter(|c| c.algorithm == *alg).collect();
        let inner = rows[0].values();
        let (ox, oy) = (left + pi as f64 * (pw + gap), top);
        let cw = pw / inner.len() as f64;
        let rh = ph / rows.len() as f64;
        // Row 0 at the bottom.
        let cell_y = |r: usize| oy + ph - (r as f64 + 1.0) * rh;
        let center_x = |pos: f64| ox + (pos + 0.5) * cw;
        let center_y = |r: usize| cell_y(r) + rh / 2.0;
        text(&mut s, ox + pw / 2.0, oy - 8.0, "middle", &alg.label().to_uppercase());
        for (r, c) in rows.iter().enumerate() {
            for (k, p) in c.points.iter().enumerate() {
                let g = (p.srp * 255.0).round() as u8;
                writeln!(
                    s,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({g},{g},{g})\"/>",
                    ox + k as f64 * cw,
                    cell_y(r),
                    cw + 0.01,
                    rh + 0.01
                )
                .expect("write");
            }
        }
        writeln!(s, "<rect x=\"{ox:.2}\" y=\"{oy:.2}\" width=\"{pw:.2}\" height=\"{ph:.2}\" fill=\"none\" stroke=\"#000000\"/>").expect("write");
        let every = inner.len().div_ceil(8).max(1);
        for (k, v) in inner.iter().enumerate() {
            if k % every == 0 {
                text(&mut s, center_x(k as f64), oy + ph + 16.0, "middle", &tick(*v));
            }
        }
        for (r, c) in rows.iter().enumerate() {
            text(&mut s, ox - 6.0, center_y(r) + 4.0, "end", &tick(c.outer.expect("grid").1));
        }
        text(&mut s, ox + pw / 2.0, oy + ph + 36.0, "middle", rows[0].axis.label());
        text(&mut s, ox - 40.0, oy + ph / 2.0, "middle", rows[0].outer.expect("grid").0.label());

        let mut methods: Vec<String> = Vec::new();
        for c in &rows {
            for m in c.theory_methods() {
                if !methods.contains(&m) {
                    methods.push(m);
                }
            }
            for n in &c.notes {
                let tagged = format!("{}: {n}", alg.label());
                if !notes.contains(&tagged) {
                    notes.push(tagged);
                }
            }
        }
        for m in &methods {
            let pts: Vec<String> = rows
                .iter()
                .enumerate()
                .filter_map(|(r, c)| {
                    let o = row_thresholds(c).into_iter().find(|o| &o.method == m)?;
                    let pos = grid_position(&inner, o.value)?;
                    Some(format!("{:.2},{:.2}", center_x(pos), center_y(r)))
                })
                .collect();
            let (_, dash) = method_style(m);
            if !pts.is_empty() {
                writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"#3498db\" stroke-width=\"2\" stroke-dasharray=\"{dash}\"/>", pts.join(" ")).expect("write");
                let label = format!("theory ({m})");
                if !legend.iter().any(|(l, _, _)| *l == label) {
                    legend.push((label, "#3498db", dash));
                }
            }
        }
        let edge: Vec<String> = rows
            .iter()
            .enumerate()
            .filter_map(|(r, c)| {
                let pos = grid_position(&inner, c.edge()?)?;
                Some(format!("{:.2},{:.2}", center_x(pos), center_y(r)))
            })
            .collect();
        if !edge.is_empty() {
            writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{EDGE_COLOR}\" stroke-width=\"2\"/>", edge.join(" ")).expect("write");
            if !legend.iter().any(|(l, _, _)| l == "empirical edge") {
                legend.push(("empirical edge".into(), EDGE_COLOR, ""));
            }
        }
        if methods.is_empty() {
            notes.push(format!("{}: no theory overlay, guarantee conditions fail", alg.label()));
        }
    }
    let mut y = top + ph + 60.0;
    let mut x = left;
    for (label, color, dash) in &legend {
        let dash_attr = if dash.is_empty() { String::new() } else { format!(" stroke-dasharray=\"{dash}\"") };
        writeln!(s, "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"2\"{dash_attr}/>", y - 4.0, x + 25.0, y - 4.0).expect("write");
        text(&mut s, x + 31.0, y, "start", label);
        x += 170.0;
    }
    y += 22.0;
    for line in caption.iter().chain(notes.iter()) {
        text(&mut s, left, y, "start", line);
        y += 16.0;
    }
    s.push_str("</svg>\n");
    s
}

/// Empirical CDFs of the standardized spectral norm against `F₁`.
pub fn svg_tw(title: &str, v: &TwValidation) -> String {
    let (w, h) = (720.0, 470.0 + 16.0 * v.series.len() as f64);
    let (x0, x1, y0, y1) = (70.0, 540.0, 40.0, 400.0);
    let (lo, hi) = (-5.0, 4.0);
    let px = |x: f64| x0 + (x.clamp(lo, hi) - lo) / (hi - lo) * (x1 - x0);
    let py = |p: f64| y1 - p * (y1 - y0);
    let mut s = svg_open(w, h, title);
    text(&mut s, (x0 + x1) / 2.0, 24.0, "middle", title);
    writeln!(s, "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#000000\"/>", x1 - x0, y1 - y0).expect("write");
    for k in 0..=5 {
        let p = k as f64 / 5.0;
        text(&mut s, x0 - 8.0, py(p) + 4.0, "end", &tick(p));
    }
    for k in 0..=9 {
        let x = lo + k as f64;
        text(&mut s, px(x), y1 + 18.0, "middle", &tick(x));
    }
    text(&mut s, (x0 + x1) / 2.0, y1 + 38.0, "middle", "(||N||_2 - sigma mu_Md) / (sigma sigma_Md)");
    let tw: Vec<String> = (0..=180)
        .map(|k| {
            let x = lo + (hi - lo) * k as f64 / 180.0;
            format!("{:.2},{:.2}", px(x), py(f1_cdf(x)))
        })
        .collect();
    writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>", tw.join(" ")).expect("write");
    let palette = ["#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#e67e22"];
    let mut legend = vec![("Tracy-Widom F1".to_string(), "#000000", "6,4")];
    for (i, series) in v.series.iter().enumerate() {
        let color = palette[i % palette.len()];
        let n = series.standardized.len();
        let stride = n.div_ceil(400).max(1);
        let pts: Vec<String> = series
            .standardized
            .iter()
            .enumerate()
            .filter(|(k, _)| k % stride == 0 || *k == n - 1)
            .map(|(k, &x)| format!("{:.2},{:.2}", px(x), py((k + 1) as f64 / n as f64)))
            .collect();
        writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>", pts.join(" ")).expect("write");
        legend.push((format!("empirical d = {}", series.d), color, ""));
    }
    for (i, (label, color, dash)) in legend.iter().enumerate() {
        let y = y0 + 12.0 + 20.0 * i as f64;
        let dash_attr = if dash.is_empty() { String::new() } else { format!(" stroke-dasharray=\"{dash}\"") };
        writeln!(s, "<line x1=\"555.00\" y1=\"{y:.2}\" x2=\"580.00\" y2=\"{y:.2}\" stroke=\"{color}\" stroke-width=\"1.5\"{dash_attr}/>").expect("write");
        text(&mut s, 586.0, y + 4.0, "start", label);
    }
    let mut y = y1 + 60.0;
    text(&mut s, x0, y, "start", &format!("M = {}, sigma = {}, {} samples, seed = {}", v.m, tick(v.sigma), v.samples, v.base_seed));
    for series in &v.series {
        y += 16.0;
        text(&mut s, x0, y, "start", &format!("d = {}: sup |empirical - F1| = {:.4}", series.d, series.ks_distance));
    }
    s.push_str("</svg>\n");
    s
}

fn write(path: PathBuf, body: &str) -> Result<PathBuf> {
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn caption(runs: &[RunOutput]) -> Vec<String> {
    runs.iter()
        .map(|r| {
            let mu: Vec<String> = r.mu.iter().map(|(m, mu)| format!("{m}:{mu:.4}")).collect();
            let mu = if mu.len() > 4 {
                let first = r.mu.iter().next().expect("nonempty");
                let last = r.mu.iter().next_back().expect("nonempty");
                format!("mu(M) from {:.4} at M={} to {:.4} at M={}", first.1, first.0, last.1, last.0)
            } else {
                format!("mu (M:mu) = {}", mu.join(", "))
            };
            let algs: Vec<&str> = r.config.algorithms.iter().map(|a| a.label()).collect();
            format!(
                "{}: {mu}; {} trials; seed {}; config {:016x}",
                algs.join("+"),
                r.config.trials,
                r.config.base_seed,
                r.config_hash
            )
        })
        .collect()
}

/// Writes the CSV and SVG artifacts of a sweep preset or config run.
pub fn write_sweep(name: &str, runs: &[RunOutput], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let curves: Vec<SrpCurve> = runs.iter().flat_map(|r| r.curves.iter().cloned()).collect();
    let cap = caption(runs);
    let mut out = Vec::new();
    if curves.iter().any(|c| c.outer.is_some()) {
        out.push(write(dir.join(format!("{name}.csv")), &grid_csv(&curves))?);
        out.push(write(dir.join(format!("{name}_theory.csv")), &theory_csv(&curves))?);
        out.push(write(dir.join(format!("{name}_edges.csv")), &edges_csv(&curves))?);
        out.push(write(dir.join(format!("{name}.svg")), &svg_grid(name, &curves, &cap))?);
    } else {
        out.push(write(dir.join(format!("{name}.csv")), &curves_csv(&curves))?);
        out.push(write(dir.join(format!("{name}.svg")), &svg_curves(name, &curves, &cap))?);
    }
    Ok(out)
}

pub fn write_tw(name: &str, v: &TwValidation, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(vec![
        write(dir.join(format!("{name}.csv")), &tw_csv(v))?,
        write(dir.join(format!("{name}.svg")), &svg_tw(name, v))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::runner::EdgeDirection;

    fn sample_curve(theory: Vec<Overlay>) -> SrpCurve {
        SrpCurve {
            algorithm: Algorithm::Sompt,
            axis: Axis::CMin,
            outer: None,
            points: (0..4)
                .map(|i| CurvePoint {
                    value: 0.1 * (i + 1) as f64,
                    trials: 3,
                    successes: i.min(3),
                    srp: i.min(3) as f64 / 3.0,
                    wilson_lo: 1.0 / 3.0,
                    wilson_hi: 0.9,
                    theory: theory.clone(),
                })
                .collect(),
            direction: EdgeDirection::Upper,
            target: 1.0,
            notes: vec![],
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let c = sample_curve(vec![
            Overlay { method: "l2".into(), value: 0.1 + 0.2 },
            Overlay { method: "frobenius".into(), value: 1.0 / 3.0 },
        ]);
        let text = curves_csv(std::slice::from_ref(&c));
        assert!(text.starts_with(CSV_HEADER_1D));
        let rows = parse_curves_csv(&text).unwrap();
        assert_eq!(rows.len(), 4);
        for (row, p) in rows.iter().zip(&c.points) {
            assert_eq!((row.axis, row.algorithm), (Axis::CMin, Algorithm::Sompt));
            assert_eq!(&row.point, p);
        }
    }

    #[test]
    fn empty_overlay_gets_caption_note() {
        let svg = svg_curves("t", &[sample_curve(vec![])], &[]);
        assert!(svg.contains("no theory overlay"));
        assert!(!svg.contains("stroke-dasharray=\"6,4\""));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn grid_position_interpolates() {
        let g = [1.0, 2.0, 4.0];
        assert_eq!(grid_position(&g, 3.0), Some(1.5));
        assert_eq!(grid_position(&g, 0.5), None);
        assert_eq!(grid_position(&g, 4.0), Some(2.0));
    }
}
