//! Minimal native SVG charts: line charts with ±sd bands, matrix heat maps,
//! 2-D raster fields and quantile-quantile plots.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 440.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 52.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

pub struct Series {
    pub name: String,
    /// `(x, mean, sd)`
    pub points: Vec<(f64, f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = write!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = write!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    s
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let (mut x0, mut x1) = bounds(xs);
        let (mut y0, mut y1) = bounds(ys);
        if x1 <= x0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 <= y0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }

    fn axes(&self, s: &mut String, x_label: &str, y_label: &str) {
        let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
        let _ = write!(s, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, r - l, b - t);
        for i in 0..=4 {
            let fx = self.x0 + (self.x1 - self.x0) * i as f64 / 4.0;
            let fy = self.y0 + (self.y1 - self.y0) * i as f64 / 4.0;
            let _ = write!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, self.px(fx), b + 16.0, tick(fx));
            let _ = write!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, l - 6.0, self.py(fy) + 4.0, tick(fy));
        }
        let _ = write!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (l + r) / 2.0, H - 12.0, escape(x_label));
        let _ = write!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            (t + b) / 2.0,
            (t + b) / 2.0,
            escape(y_label)
        );
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn tick(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    format!("{r}")
}

/// Mean curves with shaded mean ± sd bands.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let frame = Frame::new(
        all.clone().map(|p| p.0),
        all.clone().flat_map(|p| [p.1 - p.2, p.1 + p.2]),
    );
    let mut s = header(title);
    frame.axes(&mut s, x_label, y_label);
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let upper: Vec<String> = ser.points.iter().map(|p| format!("{:.2},{:.2}", frame.px(p.0), frame.py(p.1 + p.2))).collect();
        let lower: Vec<String> = ser.points.iter().rev().map(|p| format!("{:.2},{:.2}", frame.px(p.0), frame.py(p.1 - p.2))).collect();
        let _ = write!(s, r#"<polygon points="{} {}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#, upper.join(" "), lower.join(" "));
        let line: Vec<String> = ser.points.iter().map(|p| format!("{:.2},{:.2}", frame.px(p.0), frame.py(p.1))).collect();
        let _ = write!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, line.join(" "));
        let _ = write!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            LEFT + 10.0,
            TOP + 16.0 + 14.0 * i as f64,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Blue-to-yellow colour for `t` in `[0, 1]`; grey for NaN.
fn colour(t: f64) -> String {
    if !t.is_finite() {
        return "#cccccc".into();
    }
    let stops = [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];
    let t = t.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let i = (t.floor() as usize).min(stops.len() - 2);
    let f = t - i as f64;
    let mix = |a: f64, b: f64| (a + (b - a) * f).round() as u8;
    let (a, b) = (stops[i], stops[i + 1]);
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn unit(v: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        (v - lo) / (hi - lo)
    } else {
        0.5
    }
}

/// Square matrix heat map with values printed in the cells.
pub fn heatmap(title: &str, labels: &[String], matrix: &[Vec<f64>], lo: f64, hi: f64) -> String {
    let n = matrix.len().max(1);
    let side = (H - TOP - BOTTOM).min(W - LEFT - RIGHT) / n as f64;
    let mut s = header(title);
    for (i, row) in matrix.iter().enumerate() {
        let y = TOP + side * i as f64;
        let _ = write!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + side / 2.0 + 4.0, escape(&labels[i]));
        for (j, &v) in row.iter().enumerate() {
            let x = LEFT + side * j as f64;
            let _ = write!(
                s,
                r#"<rect x="{x:.1}" y="{y:.1}" width="{side:.1}" height="{side:.1}" fill="{}" stroke="white"/>"#,
                colour(unit(v, lo, hi))
            );
            let text = if v.is_finite() { format!("{v:.2}") } else { "-".into() };
            let _ = write!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" fill="white">{text}</text>"#, x + side / 2.0, y + side / 2.0 + 4.0);
        }
    }
    for (j, l) in labels.iter().enumerate() {
        let x = LEFT + side * j as f64 + side / 2.0;
        let _ = write!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, TOP + side * n as f64 + 16.0, escape(l));
    }
    s.push_str("</svg>\n");
    s
}

/// Raster of a scalar field on an `nx × ny` grid given row by row
/// (x fastest), with values mapped from `[lo, hi]`.
pub fn raster(title: &str, x_range: [f64; 2], y_range: [f64; 2], nx: usize, ny: usize, values: &[f64], lo: f64, hi: f64) -> String {
    let frame = Frame {
        x0: x_range[0],
        x1: if x_range[1] > x_range[0] { x_range[1] } else { x_range[0] + 1.0 },
        y0: y_range[0],
        y1: if y_range[1] > y_range[0] { y_range[1] } else { y_range[0] + 1.0 },
    };
    let mut s = header(title);
    let cw = (W - LEFT - RIGHT) / nx as f64;
    let ch = (H - TOP - BOTTOM) / ny as f64;
    for j in 0..ny {
        for i in 0..nx {
            let v = values[j * nx + i];
            let x = LEFT + cw * i as f64;
            let y = H - BOTTOM - ch * (j + 1) as f64;
            let _ = write!(
                s,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                cw + 0.05,
                ch + 0.05,
                colour(unit(v, lo, hi))
            );
        }
    }
    frame.axes(&mut s, "x1", "x2");
    s.push_str("</svg>\n");
    s
}

/// Quantile-quantile scatter of paired quantiles with the identity line.
pub fn qq_plot(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let all = series.iter().flat_map(|(_, p)| p.iter().flat_map(|&(a, b)| [a, b]));
    let frame = Frame::new(all.clone(), all);
    let mut s = header(title);
    frame.axes(&mut s, x_label, y_label);
    let lo = frame.x0.max(frame.y0);
    let hi = frame.x1.min(frame.y1);
    let _ = write!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
        frame.px(lo),
        frame.py(lo),
        frame.px(hi),
        frame.py(hi)
    );
    for (i, (name, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for &(a, b) in points {
            let _ = write!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, frame.px(a), frame.py(b));
        }
        let _ = write!(s, r#"<text x="{}" y="{}" fill="{color}">{}</text>"#, LEFT + 10.0, TOP + 16.0 + 14.0 * i as f64, escape(name));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_are_well_formed() {
        let line = line_chart(
            "t",
            "k",
            "ARI",
            &[Series { name: "a<b".into(), points: vec![(2.0, 0.5, 0.1), (3.0, 0.9, 0.05)] }],
        );
        assert!(line.starts_with("<svg") && line.ends_with("</svg>\n"));
        assert!(line.contains("a&lt;b"));
        let hm = heatmap("m", &["1".into(), "2".into()], &[vec![f64::NAN, 0.5], vec![0.2, f64::NAN]], 0.0, 1.0);
        assert_eq!(hm.matches("<rect").count(), 1 + 4);
        let r = raster("r", [0.0, 1.0], [0.0, 1.0], 2, 2, &[0.0, 0.3, 0.6, 1.0], 0.0, 1.0);
        assert!(r.contains("#fde725"));
        let qq = qq_plot("q", "a", "b", &[("k=2".into(), vec![(0.1, 0.2), (0.5, 0.4)])]);
        assert_eq!(qq.matches("<circle").count(), 2);
    }

    #[test]
    fn colour_scale_endpoints() {
        assert_eq!(colour(0.0), "#440154");
        assert_eq!(colour(1.0), "#fde725");
        assert_eq!(colour(f64::NAN), "#cccccc");
    }
}
