//! Minimal static SVG rendering for traces, sweep bands and scalograms.
//!
//! Numbers are written with fixed precision so the output is byte-stable.

use std::fmt::Write;

const W: f64 = 720.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

/// Shaded region between `lo` and `hi` over `xs`.
#[derive(Debug, Clone)]
pub struct Band {
    pub name: String,
    pub xs: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Vertical (`x`) or horizontal (`y`) reference line.
#[derive(Debug, Clone)]
pub struct RefLine {
    pub label: String,
    pub at: f64,
    pub vertical: bool,
    /// Palette slot used for the colour.
    pub colour: usize,
}

#[derive(Debug, Clone, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub bands: Vec<Band>,
    pub lines: Vec<RefLine>,
    pub log_x: bool,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    log_x: bool,
}

impl Frame {
    fn tx(&self, x: f64) -> f64 {
        let (a, b, v) = if self.log_x { (self.x0.log10(), self.x1.log10(), x.log10()) } else { (self.x0, self.x1, x) };
        LEFT + (v - a) / (b - a) * (W - LEFT - RIGHT)
    }

    fn ty(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn extent(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let mut r: Option<(f64, f64)> = None;
    for v in values.filter(|v| v.is_finite()) {
        r = Some(match r {
            None => (v, v),
            Some((a, b)) => (a.min(v), b.max(v)),
        });
    }
    r.map(|(a, b)| if a == b { (a - 0.5 * a.abs().max(1e-12), b + 0.5 * b.abs().max(1e-12)) } else { (a, b) })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(out, r#"<rect x="{l:.1}" y="{t:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#, r - l, b - t);
    for i in 0..=4 {
        let fx = i as f64 / 4.0;
        let xv = if f.log_x { 10f64.powf(f.x0.log10() + fx * (f.x1.log10() - f.x0.log10())) } else { f.x0 + fx * (f.x1 - f.x0) };
        let yv = f.y0 + fx * (f.y1 - f.y0);
        let px = f.tx(xv);
        let py = f.ty(yv);
        let _ = writeln!(out, r#"<line x1="{px:.1}" y1="{b:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/>"#, b + 4.0);
        let _ = writeln!(out, r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, b + 18.0, tick(xv));
        let _ = writeln!(out, r#"<line x1="{:.1}" y1="{py:.1}" x2="{l:.1}" y2="{py:.1}" stroke="black"/>"#, l - 4.0);
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, l - 6.0, py + 4.0, tick(yv));
    }
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, (l + r) / 2.0, H - 10.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(y_label)
    );
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if !(1e-2..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}").trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

impl LinePlot {
    pub fn render(&self) -> String {
        let xs = self.series.iter().flat_map(|s| s.xs.iter().copied())
            .chain(self.bands.iter().flat_map(|b| b.xs.iter().copied()))
            .chain(self.lines.iter().filter(|l| l.vertical).map(|l| l.at))
            .filter(|&x| !self.log_x || x > 0.0);
        let ys = self.series.iter().flat_map(|s| s.ys.iter().copied())
            .chain(self.bands.iter().flat_map(|b| b.lo.iter().chain(&b.hi).copied()))
            .chain(self.lines.iter().filter(|l| !l.vertical).map(|l| l.at));
        let (x0, x1) = extent(xs).unwrap_or((0.0, 1.0));
        let (y0, y1) = extent(ys).unwrap_or((0.0, 1.0));
        let pad = 0.05 * (y1 - y0);
        let f = Frame { x0, x1, y0: y0 - pad, y1: y1 + pad, log_x: self.log_x };

        let mut out = String::new();
        header(&mut out, &self.title);
        axes(&mut out, &f, &self.x_label, &self.y_label);
        for (i, b) in self.bands.iter().enumerate() {
            let mut pts = Vec::new();
            for (x, y) in b.xs.iter().zip(&b.hi) {
                pts.push(format!("{:.2},{:.2}", f.tx(*x), f.ty(*y)));
            }
            for (x, y) in b.xs.iter().zip(&b.lo).rev() {
                pts.push(format!("{:.2},{:.2}", f.tx(*x), f.ty(*y)));
            }
            let _ = writeln!(out, r#"<polygon points="{}" fill="{}" fill-opacity="0.25" stroke="none"><title>{}</title></polygon>"#, pts.join(" "), PALETTE[i % 8], escape(&b.name));
        }
        for (i, s) in self.series.iter().enumerate() {
            let pts: Vec<String> = s.xs.iter().zip(&s.ys)
                .filter(|(x, y)| y.is_finite() && (!self.log_x || **x > 0.0))
                .map(|(x, y)| format!("{:.2},{:.2}", f.tx(*x), f.ty(*y)))
                .collect();
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.2"/>"#, pts.join(" "), PALETTE[i % 8]);
            let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" fill="{}">{}</text>"#, W - RIGHT - 90.0, TOP + 16.0 + 14.0 * i as f64, PALETTE[i % 8], escape(&s.name));
        }
        for l in &self.lines {
            let c = PALETTE[l.colour % 8];
            if l.vertical {
                let x = f.tx(l.at);
                let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{TOP:.1}" x2="{x:.2}" y2="{:.1}" stroke="{c}" stroke-dasharray="4 3"><title>{}</title></line>"#, H - BOTTOM, escape(&l.label));
            } else {
                let y = f.ty(l.at);
                let _ = writeln!(out, r#"<line x1="{LEFT:.1}" y1="{y:.2}" x2="{:.1}" y2="{y:.2}" stroke="{c}" stroke-dasharray="4 3"><title>{}</title></line>"#, W - RIGHT, escape(&l.label));
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Colour for `v ∈ [0, 1]`: piecewise-linear through five viridis stops.
pub fn colormap(v: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
    let s = v * 4.0;
    let i = (s.floor() as usize).min(3);
    let t = s - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |p: f64, q: f64| (p + t * (q - p)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Time × frequency heatmap with an optional per-time boundary curve (e.g. the COI).
#[derive(Debug, Clone, Default)]
pub struct Heatmap {
    pub title: String,
    pub times: Vec<f64>,
    pub freqs: Vec<f64>,
    /// Time-major, `times.len() × freqs.len()`, already normalized to [0, 1].
    pub values: Vec<f64>,
    pub boundary: Option<Vec<f64>>,
    /// Cells drawn along each axis at most (values are decimated by taking the max).
    pub max_cells: (usize, usize),
}

impl Heatmap {
    pub fn render(&self) -> String {
        let (nt, nf) = (self.times.len(), self.freqs.len());
        let mut out = String::new();
        header(&mut out, &self.title);
        if nt == 0 || nf == 0 {
            out.push_str("</svg>\n");
            return out;
        }
        let (ct, cf) = (self.max_cells.0.clamp(1, nt), self.max_cells.1.clamp(1, nf));
        let f = Frame { x0: self.times[0], x1: self.times[nt - 1].max(self.times[0] + 1e-12), y0: self.freqs[0], y1: self.freqs[nf - 1].max(self.freqs[0] + 1e-12), log_x: false };
        let cw = (W - LEFT - RIGHT) / ct as f64;
        let ch = (H - TOP - BOTTOM) / cf as f64;
        for a in 0..ct {
            let (i0, i1) = (a * nt / ct, ((a + 1) * nt / ct).max(a * nt / ct + 1));
            for b in 0..cf {
                let (j0, j1) = (b * nf / cf, ((b + 1) * nf / cf).max(b * nf / cf + 1));
                let mut v: f64 = 0.0;
                for i in i0..i1 {
                    for j in j0..j1 {
                        v = v.max(self.values[i * nf + j]);
                    }
                }
                let _ = writeln!(out, r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#, LEFT + a as f64 * cw, H - BOTTOM - (b + 1) as f64 * ch, cw + 0.05, ch + 0.05, colormap(v));
            }
        }
        if let Some(bd) = &self.boundary {
            let pts: Vec<String> = self.times.iter().zip(bd)
                .filter(|(_, y)| y.is_finite() && **y <= f.y1 && **y >= f.y0)
                .map(|(x, y)| format!("{:.2},{:.2}", f.tx(*x), f.ty(*y)))
                .collect();
            if !pts.is_empty() {
                let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="white" stroke-dasharray="5 3" stroke-width="1.5"/>"#, pts.join(" "));
            }
        }
        axes(&mut out, &f, "time (s)", "frequency (Hz)");
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_endpoints() {
        assert_eq!(colormap(0.0), "#440154");
        assert_eq!(colormap(1.0), "#fde725");
        assert_eq!(colormap(f64::NAN), "#440154");
    }

    #[test]
    fn line_plot_is_deterministic() {
        let p = LinePlot {
            title: "t".into(),
            series: vec![Series { name: "a".into(), xs: vec![0.0, 1.0, 2.0], ys: vec![1.0, 3.0, 2.0] }],
            lines: vec![RefLine { label: "m".into(), at: 1.5, vertical: true, colour: 1 }],
            ..Default::default()
        };
        let a = p.render();
        assert_eq!(a, p.render());
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert!(a.contains("polyline"));
    }

    #[test]
    fn heatmap_decimates() {
        let h = Heatmap {
            times: (0..100).map(f64::from).collect(),
            freqs: (1..=10).map(f64::from).collect(),
            values: vec![0.5; 1000],
            max_cells: (20, 5),
            ..Default::default()
        };
        let s = h.render();
        assert_eq!(s.matches("<rect x=").count(), 100 + 1);
    }
}
