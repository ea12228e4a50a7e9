//! Minimal deterministic SVG plots: a fixed 640x400 viewport, linear axes,
//! coordinates printed with two decimals.

use std::fmt::Write;

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Line,
    Scatter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points: points.into_iter().filter(|(x, y)| x.is_finite() && y.is_finite()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub mark: Mark,
    pub series: Vec<Series>,
    /// Dashed horizontal reference line, drawn only if it falls inside the data range.
    pub reference_y: Option<f64>,
}

struct Axis {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, from: f64, to: f64) -> Self {
        let (lo, hi) = if lo == hi { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
        Self { lo, hi, from, to }
    }

    fn map(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Renders the plot, or `None` when no series has a point.
pub fn render(plot: &Plot) -> Option<String> {
    let points = || plot.series.iter().flat_map(|s| s.points.iter());
    if points().next().is_none() {
        return None;
    }
    let fold = |f: fn(&(f64, f64)) -> f64| {
        points().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (x_lo, x_hi) = fold(|p| p.0);
    let (y_lo, y_hi) = fold(|p| p.1);
    let x = Axis::new(x_lo, x_hi, LEFT, WIDTH - RIGHT);
    let y = Axis::new(y_lo, y_hi, HEIGHT - BOTTOM, TOP);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(&plot.title));
    let _ = writeln!(
        s,
        r#"<path d="M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2}" fill="none" stroke="black"/>"#,
        LEFT,
        TOP,
        LEFT,
        HEIGHT - BOTTOM,
        WIDTH - RIGHT,
        HEIGHT - BOTTOM
    );
    for i in 0..TICKS {
        let f = i as f64 / (TICKS - 1) as f64;
        let xv = x.lo + f * (x.hi - x.lo);
        let yv = y.lo + f * (y.hi - y.lo);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x.map(xv),
            HEIGHT - BOTTOM + 16.0,
            tick_label(xv)
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, y.map(yv) + 4.0, tick_label(yv));
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (LEFT + WIDTH - RIGHT) / 2.0, HEIGHT - 12.0, escape(&plot.x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        escape(&plot.y_label)
    );
    if let Some(r) = plot.reference_y.filter(|r| (y.lo..=y.hi).contains(r)) {
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
            LEFT,
            y.map(r),
            WIDTH - RIGHT,
            y.map(r)
        );
    }
    for (k, series) in plot.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        match plot.mark {
            Mark::Line if !series.points.is_empty() => {
                let coords: Vec<String> = series.points.iter().map(|&(a, b)| format!("{:.2},{:.2}", x.map(a), y.map(b))).collect();
                let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
            }
            Mark::Line => {}
            Mark::Scatter => {
                for &(a, b) in &series.points {
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}" fill-opacity="0.6"/>"#, x.map(a), y.map(b));
                }
            }
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}" text-anchor="end">{}</text>"#,
            WIDTH - RIGHT - 4.0,
            TOP + 14.0 * (k as f64 + 1.0),
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plot(points: Vec<(f64, f64)>) -> Plot {
        Plot {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            mark: Mark::Line,
            series: vec![Series::new("s", points)],
            reference_y: None,
        }
    }

    #[test]
    fn two_points_make_one_segment_at_the_plot_corners() {
        let svg = render(&plot(vec![(0.0, 0.0), (10.0, 2.0)])).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains(r#"points="70.00,350.00 620.00,40.00""#), "{svg}");
    }

    #[test]
    fn empty_series_renders_nothing() {
        assert_eq!(render(&plot(vec![])), None);
        assert_eq!(render(&plot(vec![(f64::NAN, 1.0)])), None);
    }

    #[test]
    fn rendering_is_deterministic() {
        let p = plot(vec![(0.0, 0.3), (1.0, 0.7), (2.0, 0.1)]);
        assert_eq!(render(&p), render(&p));
    }

    #[test]
    fn flat_series_is_centered() {
        let svg = render(&plot(vec![(0.0, 1.0), (1.0, 1.0)])).unwrap();
        assert!(svg.contains(r#"points="70.00,195.00 620.00,195.00""#), "{svg}");
    }

    #[test]
    fn labels_are_escaped() {
        let mut p = plot(vec![(0.0, 0.0), (1.0, 1.0)]);
        p.title = "a<b & c".into();
        assert!(render(&p).unwrap().contains("a&lt;b &amp; c"));
    }
}
