//! Minimal SVG 1.1 renderings on a fixed 800×600 viewBox.

use std::fmt::Write;

const W: f64 = 800.0;
const H: f64 = 600.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn header(title: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n\
         <rect width=\"800\" height=\"600\" fill=\"white\"/>\n\
         <text x=\"400\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>\n",
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    /// Fixed y range; points outside it break the line.
    pub y_range: Option<(f64, f64)>,
    pub series: Vec<Series>,
}

impl LinePlot {
    pub fn render(&self) -> String {
        let tx = |v: f64| if self.log_x { v.ln() } else { v };
        let ty = |v: f64| if self.log_y { v.ln() } else { v };
        let usable = |&(x, y): &(f64, f64)| {
            let (a, b) = (tx(x), ty(y));
            a.is_finite() && b.is_finite() && self.y_range.is_none_or(|(lo, hi)| y >= lo && y <= hi)
        };
        let pts: Vec<(f64, f64)> =
            self.series.iter().flat_map(|s| s.points.iter().copied()).filter(usable).collect();
        let mut out = header(&self.title);
        if pts.is_empty() {
            out.push_str("</svg>\n");
            return out;
        }
        let span = |v: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
            if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) }
        };
        let (x0, x1) = span(&mut pts.iter().map(|p| tx(p.0)));
        let (y0, y1) = match self.y_range {
            Some((lo, hi)) => (ty(lo), ty(hi)),
            None => span(&mut pts.iter().map(|p| ty(p.1))),
        };
        let px = |x: f64| MARGIN + (tx(x) - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
        let py = |y: f64| H - MARGIN - (ty(y) - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
        let _ = writeln!(
            out,
            "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            W - 2.0 * MARGIN,
            H - 2.0 * MARGIN
        );
        let inv_x = |v: f64| if self.log_x { v.exp() } else { v };
        let inv_y = |v: f64| if self.log_y { v.exp() } else { v };
        for (v, anchor) in [(x0, "start"), (x1, "end")] {
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"12\">{:.4}</text>",
                MARGIN + (v - x0) / (x1 - x0) * (W - 2.0 * MARGIN),
                H - MARGIN + 18.0,
                inv_x(v)
            );
        }
        for v in [y0, y1] {
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">{:.4e}</text>",
                MARGIN - 6.0,
                H - MARGIN - (v - y0) / (y1 - y0) * (H - 2.0 * MARGIN) + 4.0,
                inv_y(v)
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"400\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
            H - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"18\" y=\"300\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 300)\">{}</text>",
            escape(&self.y_label)
        );
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            // split into runs of drawable points
            let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
            for p in &s.points {
                if usable(p) {
                    runs.last_mut().expect("nonempty").push(*p);
                } else if !runs.last().expect("nonempty").is_empty() {
                    runs.push(Vec::new());
                }
            }
            for run in runs.iter().filter(|r| !r.is_empty()) {
                let coords: Vec<String> = run.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
                let _ = writeln!(
                    out,
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                    coords.join(" ")
                );
            }
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>",
                W - MARGIN - 150.0,
                MARGIN + 18.0 + 16.0 * i as f64,
                escape(&s.name)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn color(t: f64) -> String {
    // blue -> white -> red
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let u = t * 2.0;
        (u, u, 1.0)
    } else {
        let u = (1.0 - t) * 2.0;
        (1.0, u, u)
    };
    format!("#{:02x}{:02x}{:02x}", (r * 255.0) as u8, (g * 255.0) as u8, (b * 255.0) as u8)
}

/// Filled triangles in the unit-width planar embedding, coloured by value.
pub fn heightfield(title: &str, triangles: &[([(f64, f64); 3], f64)]) -> String {
    let mut out = header(title);
    let (lo, hi) = triangles
        .iter()
        .map(|t| t.1)
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let range = if hi > lo { hi - lo } else { 1.0 };
    let size = H - 2.0 * MARGIN;
    let left = (W - size) / 2.0;
    for (pts, v) in triangles {
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.3},{:.3}", left + x * size, H - MARGIN - y * size))
            .collect();
        let _ = writeln!(out, "<polygon points=\"{}\" fill=\"{}\"/>", coords.join(" "), color((v - lo) / range));
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">min {:.6e}  max {:.6e}</text>",
        MARGIN,
        H - 20.0,
        lo,
        hi
    );
    out.push_str("</svg>\n");
    out
}
