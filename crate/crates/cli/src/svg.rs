//! Minimal line-chart emitter. Output is plain SVG text with coordinates
//! rounded to two decimals, so identical data gives identical bytes.

use std::fmt::Write;

const WIDTH: f64 = 860.0;
const PANEL_HEIGHT: f64 = 320.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 220.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 45.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];
const DASHES: [&str; 4] = ["", "6,3", "2,2", "8,3,2,3"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub color: usize,
    pub dash: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub x_label: String,
    pub y_label: String,
    pub x_log: bool,
    pub y_log: bool,
    /// Fixed y range; data outside it is clipped to the frame.
    pub y_range: Option<(f64, f64)>,
    pub series: Vec<Series>,
}

impl Panel {
    pub fn new(x_label: &str, y_label: &str, x_log: bool, y_log: bool) -> Self {
        Self {
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_log,
            y_log,
            y_range: None,
            series: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub panels: Vec<Panel>,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        if log {
            (lo, hi) = (lo.floor(), hi.ceil());
        } else {
            let pad = 0.05 * (hi - lo);
            (lo, hi) = (lo - pad, hi + pad);
        }
        Self { lo, hi, log }
    }

    fn fixed(lo: f64, hi: f64, log: bool) -> Self {
        if log {
            Self {
                lo: lo.log10(),
                hi: hi.log10(),
                log,
            }
        } else {
            Self { lo, hi, log }
        }
    }

    /// Position in [0, 1], clipped.
    fn unit(&self, v: f64) -> f64 {
        let v = if self.log {
            if v > 0.0 {
                v.log10()
            } else {
                self.lo
            }
        } else {
            v
        };
        ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let step = ((self.hi - self.lo) / 10.0).ceil().max(1.0) as i32;
            (self.lo as i32..=self.hi as i32)
                .step_by(step as usize)
                .map(|e| (10f64.powi(e), format!("1e{e}")))
                .collect()
        } else {
            let raw = (self.hi - self.lo) / 8.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|m| m * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            let first = (self.lo / step).ceil() as i64;
            let last = (self.hi / step).floor() as i64;
            (first..=last)
                .map(|k| {
                    let v = k as f64 * step;
                    (v, trim_label(v, step))
                })
                .collect()
        }
    }
}

fn trim_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Chart {
    pub fn new(title: &str) -> Self {
        Self {
            title: title.into(),
            panels: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let height = MARGIN_TOP + self.panels.len() as f64 * (PANEL_HEIGHT + MARGIN_BOTTOM) + 10.0;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            (WIDTH - MARGIN_RIGHT + MARGIN_LEFT) / 2.0,
            escape(&self.title)
        );
        for (i, panel) in self.panels.iter().enumerate() {
            let top = MARGIN_TOP + i as f64 * (PANEL_HEIGHT + MARGIN_BOTTOM);
            render_panel(&mut out, panel, top);
        }
        out.push_str("</svg>\n");
        out
    }
}

fn render_panel(out: &mut String, panel: &Panel, top: f64) {
    let left = MARGIN_LEFT;
    let w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let h = PANEL_HEIGHT - 20.0;
    let xa = Axis::fit(
        panel.series.iter().flat_map(|s| s.x.iter().copied()),
        panel.x_log,
    );
    let ya = match panel.y_range {
        Some((lo, hi)) => Axis::fixed(lo, hi, panel.y_log),
        None => Axis::fit(
            panel.series.iter().flat_map(|s| s.y.iter().copied()),
            panel.y_log,
        ),
    };
    let px = |v: f64| left + xa.unit(v) * w;
    let py = |v: f64| top + h - ya.unit(v) * h;

    for (v, label) in xa.ticks() {
        let x = px(v);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{top:.2}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"##,
            top + h,
            top + h + 14.0
        );
    }
    for (v, label) in ya.ticks() {
        let y = py(v);
        let _ = writeln!(
            out,
            r##"<line x1="{left:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"##,
            left + w,
            left - 4.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        left + w / 2.0,
        top + h + 30.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        top + h / 2.0,
        top + h / 2.0,
        escape(&panel.y_label)
    );

    for (k, s) in panel.series.iter().enumerate() {
        let color = PALETTE[s.color % PALETTE.len()];
        let dash = DASHES[s.dash % DASHES.len()];
        let mut points = String::new();
        for (&x, &y) in s.x.iter().zip(&s.y) {
            if x.is_finite() && y.is_finite() {
                let _ = write!(points, "{:.2},{:.2} ", px(x), py(y));
            }
        }
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2"{dash_attr} points="{}"/>"#,
            points.trim_end()
        );
        let ly = top + 10.0 + k as f64 * 13.0;
        if ly < top + h {
            let lx = left + w + 10.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.5"{dash_attr}/><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 22.0,
                lx + 26.0,
                ly + 4.0,
                escape(&s.name)
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Chart {
        let mut p = Panel::new("omega", "|S|", true, true);
        p.series.push(Series {
            name: "S <adrc>".into(),
            x: vec![0.01, 1.0, 100.0],
            y: vec![0.001, 1.0, 1.0],
            color: 0,
            dash: 1,
        });
        let mut c = Chart::new("test");
        c.panels.push(p);
        c
    }

    #[test]
    fn renders_well_formed_text() {
        let s = sample().render();
        assert!(s.starts_with("<svg"));
        assert!(s.trim_end().ends_with("</svg>"));
        assert!(s.contains("S &lt;adrc&gt;"));
        assert!(s.contains("1e-2") && s.contains("1e2"));
        assert_eq!(s.matches("<polyline").count(), 1);
    }

    #[test]
    fn deterministic() {
        assert_eq!(sample().render(), sample().render());
    }

    #[test]
    fn linear_ticks_are_round() {
        let a = Axis {
            lo: -0.1,
            hi: 1.3,
            log: false,
        };
        let labels: Vec<String> = a.ticks().into_iter().map(|t| t.1).collect();
        assert_eq!(labels, ["0.0", "0.2", "0.4", "0.6", "0.8", "1.0", "1.2"]);
    }

    #[test]
    fn clipping_keeps_points_in_frame() {
        let mut c = sample();
        c.panels[0].y_range = Some((0.01, 10.0));
        c.panels[0].series[0].y[0] = 1e-9;
        let s = c.render();
        let poly = s.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let bottom = MARGIN_TOP + PANEL_HEIGHT - 20.0;
        assert!(poly.contains(&format!("{bottom:.2}")));
    }
}
