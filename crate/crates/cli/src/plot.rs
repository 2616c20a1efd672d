//! SVG 1.1 figures: zero sets with the spiral in the `(z, y)` plane, and
//! eigenvalue-versus-α panels on a `μ` axis.

use std::fmt::Write as _;

use qtree::orthopoly::pq_roots;
use qtree::spectra::linear_spectrum;
use qtree::transfer::{dirichlet_spectrum, sample_spiral, SpiralPoint};
use qtree::zerosets::{first_index, trace_component, ComponentKind, CurveComponent};
use qtree::{lambda_of_mu, mu_of_lambda, GraphParams, Potential};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::CliResult;

struct Style {
    width: f64,
    height: f64,
    margin: f64,
    font: &'static str,
    font_size: f64,
    axis: &'static str,
    band_fill: &'static str,
    band_opacity: f64,
    strip: &'static str,
    strip_dash: &'static str,
    component: &'static str,
    rogue: &'static str,
    spiral: &'static str,
    eigenvalue: &'static str,
    marker_radius: f64,
    stroke: f64,
    ticks: usize,
}

const STYLE: Style = Style {
    width: 720.0,
    height: 720.0,
    margin: 60.0,
    font: "Helvetica, Arial, sans-serif",
    font_size: 13.0,
    axis: "#222222",
    band_fill: "#9ecae1",
    band_opacity: 0.35,
    strip: "#888888",
    strip_dash: "4 3",
    component: "#08519c",
    rogue: "#cb181d",
    spiral: "#238b45",
    eigenvalue: "#000000",
    marker_radius: 3.0,
    stroke: 1.4,
    ticks: 6,
};

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Affine map from data coordinates to the plot box.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        STYLE.margin + (x - self.x.0) / (self.x.1 - self.x.0) * (STYLE.width - 2.0 * STYLE.margin)
    }

    fn py(&self, y: f64) -> f64 {
        STYLE.height
            - STYLE.margin
            - (y - self.y.0) / (self.y.1 - self.y.0) * (STYLE.height - 2.0 * STYLE.margin)
    }

    fn point(&self, x: f64, y: f64) -> String {
        format!("{},{}", num(self.px(x)), num(self.py(y)))
    }

    /// Polylines for the runs of points inside a box twice the frame size.
    fn runs(&self, pts: &[(f64, f64)]) -> Vec<String> {
        let (cx, cy) = ((self.x.0 + self.x.1) / 2.0, (self.y.0 + self.y.1) / 2.0);
        let (hx, hy) = (self.x.1 - self.x.0, self.y.1 - self.y.0);
        let inside = |&(x, y): &(f64, f64)| (x - cx).abs() <= hx && (y - cy).abs() <= hy;
        let mut out = Vec::new();
        let mut cur: Vec<String> = Vec::new();
        for p in pts {
            if inside(p) {
                cur.push(self.point(p.0, p.1));
            } else if !cur.is_empty() {
                if cur.len() > 1 {
                    out.push(cur.join(" "));
                }
                cur.clear();
            }
        }
        if cur.len() > 1 {
            out.push(cur.join(" "));
        }
        out
    }
}

fn header(svg: &mut String, title: &str, timestamp: Option<u64>) {
    let (w, h) = (STYLE.width, STYLE.height);
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="{}" font-size="{}">"#,
        STYLE.font, STYLE.font_size
    );
    if let Some(t) = timestamp {
        let _ = writeln!(svg, "<metadata>generated {t}</metadata>");
    }
    let _ = writeln!(svg, "<title>{}</title>", escape(title));
    let m = STYLE.margin;
    let _ = writeln!(
        svg,
        r#"<defs><clipPath id="plot"><rect x="{m}" y="{m}" width="{}" height="{}"/></clipPath></defs>"#,
        w - 2.0 * m,
        h - 2.0 * m
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        w / 2.0,
        m / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn axes(svg: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let m = STYLE.margin;
    let (w, h) = (STYLE.width, STYLE.height);
    let _ = writeln!(
        svg,
        r#"<rect class="frame" x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="{}"/>"#,
        w - 2.0 * m,
        h - 2.0 * m,
        STYLE.axis
    );
    for i in 0..=STYLE.ticks {
        let t = i as f64 / STYLE.ticks as f64;
        let xv = f.x.0 + t * (f.x.1 - f.x.0);
        let yv = f.y.0 + t * (f.y.1 - f.y.0);
        let (px, py) = (f.px(xv), f.py(yv));
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="{3}"/><text x="{0}" y="{4}" text-anchor="middle">{5}</text>"#,
            num(px),
            num(h - m),
            num(h - m + 5.0),
            STYLE.axis,
            num(h - m + 20.0),
            tick_label(xv)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{3}"/><text x="{4}" y="{5}" text-anchor="end">{6}</text>"#,
            num(m - 5.0),
            num(py),
            num(m),
            STYLE.axis,
            num(m - 8.0),
            num(py + 4.0),
            tick_label(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - m / 4.0,
        escape(xlabel)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{0}" y="{1}" text-anchor="middle" transform="rotate(-90 {0} {1})">{2}</text>"#,
        m / 4.0 + 4.0,
        h / 2.0,
        escape(ylabel)
    );
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Data behind the zero-set figure.
#[derive(Debug, Serialize)]
pub struct ZeroSetData {
    pub params: GraphParams,
    pub window: f64,
    pub spiral: Vec<SpiralPoint>,
    pub components: Vec<CurveComponent>,
    /// `v`-values of the strip boundaries: roots of `P_n` and `Q_n`.
    pub strip_v: Vec<f64>,
    /// `(μ, z, y)` at the eigenvalues inside the `μ` range.
    pub eigen_points: Vec<(f64, f64, f64)>,
}

pub struct ZeroSetOptions {
    pub window: f64,
    pub mu_range: (f64, f64),
    pub spiral_points: usize,
    pub trace_points: usize,
}

pub fn zero_set_data(
    params: &GraphParams,
    q: &Potential,
    o: &ZeroSetOptions,
) -> CliResult<ZeroSetData> {
    let w = o.window;
    let spiral = sample_spiral(q, o.mu_range.0, o.mu_range.1, o.spiral_points)?;
    let components = (first_index(params)..=params.n)
        .map(|k| trace_component(params, k, (-2.0 * w, 2.0 * w), o.trace_points))
        .collect::<Result<Vec<_>, _>>()?;
    let (p, qr) = pq_roots(params.poly());
    let mut strip_v: Vec<f64> = p.into_iter().chain(qr).collect();
    strip_v.sort_by(f64::total_cmp);
    let (l0, l1) = (lambda_of_mu(o.mu_range.0), lambda_of_mu(o.mu_range.1));
    let spectrum = linear_spectrum(params, q, l0, l1)?;
    let mut eigen_points = Vec::new();
    for e in spectrum
        .eigenvalues
        .iter()
        .filter(|e| e.lambda >= l0 && e.lambda <= l1)
    {
        let t = qtree::transfer::transfer_at(q, e.lambda)?;
        eigen_points.push((mu_of_lambda(e.lambda), t.s(), t.c()));
    }
    Ok(ZeroSetData {
        params: *params,
        window: w,
        spiral,
        components,
        strip_v,
        eigen_points,
    })
}

pub fn zero_set_svg(d: &ZeroSetData, timestamp: Option<u64>) -> String {
    let p = &d.params;
    let w = d.window;
    let f = Frame {
        x: (-w, w),
        y: (-w, w),
    };
    let mut svg = String::new();
    let title = format!(
        "zero sets, n = {}, b = {}, α = {}, {} root",
        p.n, p.b, p.alpha, p.root_condition
    );
    header(&mut svg, &title, timestamp);
    let _ = writeln!(svg, r#"<g clip-path="url(#plot)">"#);

    // line v = (b+1) y + α z = c as two endpoints at z = ±2w
    let line = |c: f64| {
        let y = |z: f64| (c - p.alpha * z) / (p.b + 1.0);
        ((-2.0 * w, y(-2.0 * w)), (2.0 * w, y(2.0 * w)))
    };
    let edge = 2.0 * p.b.sqrt();
    let (lo, hi) = (line(-edge), line(edge));
    let _ = writeln!(
        svg,
        r#"<polygon class="oscillatory" points="{} {} {} {}" fill="{}" fill-opacity="{}" stroke="none"/>"#,
        f.point(lo.0 .0, lo.0 .1),
        f.point(lo.1 .0, lo.1 .1),
        f.point(hi.1 .0, hi.1 .1),
        f.point(hi.0 .0, hi.0 .1),
        STYLE.band_fill,
        STYLE.band_opacity
    );
    for &c in &d.strip_v {
        let (a, b) = line(c);
        let _ = writeln!(
            svg,
            r#"<polyline class="strip" points="{} {}" fill="none" stroke="{}" stroke-dasharray="{}"/>"#,
            f.point(a.0, a.1),
            f.point(b.0, b.1),
            STYLE.strip,
            STYLE.strip_dash
        );
    }
    for c in &d.components {
        let color = if c.kind == ComponentKind::Rogue {
            STYLE.rogue
        } else {
            STYLE.component
        };
        let _ = writeln!(svg, r#"<g class="component" data-k="{}">"#, c.k);
        for run in f.runs(&c.points) {
            let _ = writeln!(
                svg,
                r#"<polyline points="{run}" fill="none" stroke="{color}" stroke-width="{}"/>"#,
                STYLE.stroke
            );
        }
        let _ = writeln!(svg, "</g>");
    }
    let spiral: Vec<(f64, f64)> = d.spiral.iter().map(|s| (s.z, s.y)).collect();
    let _ = writeln!(svg, r#"<g class="spiral">"#);
    for run in f.runs(&spiral) {
        let _ = writeln!(
            svg,
            r#"<polyline points="{run}" fill="none" stroke="{}" stroke-width="{}"/>"#,
            STYLE.spiral, STYLE.stroke
        );
    }
    let _ = writeln!(svg, "</g>");
    for &(mu, z, y) in &d.eigen_points {
        if z.abs() <= w && y.abs() <= w {
            let _ = writeln!(
                svg,
                r#"<circle class="eigenvalue" data-mu="{}" cx="{}" cy="{}" r="{}" fill="{}"/>"#,
                num(mu),
                num(f.px(z)),
                num(f.py(y)),
                STYLE.marker_radius,
                STYLE.eigenvalue
            );
        }
    }
    let _ = writeln!(svg, "</g>");
    axes(&mut svg, &f, "z = s(λ)", "y = c(λ)");
    svg.push_str("</svg>\n");
    svg
}

/// Data behind the eigenvalue-versus-α panel.
#[derive(Debug, Serialize)]
pub struct SweepData {
    pub params: GraphParams,
    pub alphas: Vec<f64>,
    pub mu_range: (f64, f64),
    /// Per α: `μ` of the eigenvalues in the range, by rank.
    pub mus: Vec<Vec<f64>>,
    pub dirichlet_mu: Vec<f64>,
}

pub fn sweep_data(
    params: &GraphParams,
    q: &Potential,
    alpha_range: (f64, f64),
    points: usize,
    mu_range: (f64, f64),
) -> CliResult<SweepData> {
    let points = points.max(2);
    let alphas: Vec<f64> = (0..points)
        .map(|i| alpha_range.0 + (alpha_range.1 - alpha_range.0) * i as f64 / (points - 1) as f64)
        .collect();
    let (l0, l1) = (lambda_of_mu(mu_range.0), lambda_of_mu(mu_range.1));
    let mus = alphas
        .par_iter()
        .map(|&a| {
            let p = GraphParams {
                alpha: a,
                ..*params
            };
            let r = linear_spectrum(&p, q, l0.min(-1.0), l1)?;
            Ok(r.values().into_iter().map(mu_of_lambda).collect())
        })
        .collect::<Result<Vec<Vec<f64>>, qtree::Error>>()?;
    let dirichlet_mu = if l1 > 0.0 {
        dirichlet_spectrum(q, l1)?
            .values
            .into_iter()
            .map(mu_of_lambda)
            .collect()
    } else {
        Vec::new()
    };
    Ok(SweepData {
        params: *params,
        alphas,
        mu_range,
        mus,
        dirichlet_mu,
    })
}

pub fn sweep_svg(d: &SweepData, timestamp: Option<u64>) -> String {
    let p = &d.params;
    let a = (d.alphas[0], d.alphas[d.alphas.len() - 1]);
    let f = Frame {
        x: a,
        y: d.mu_range,
    };
    let mut svg = String::new();
    let title = format!(
        "eigenvalues against α, n = {}, b = {}, {} root",
        p.n, p.b, p.root_condition
    );
    header(&mut svg, &title, timestamp);
    let _ = writeln!(svg, r#"<g clip-path="url(#plot)">"#);
    for &mu in &d.dirichlet_mu {
        let _ = writeln!(
            svg,
            r#"<polyline class="dirichlet" points="{} {}" fill="none" stroke="{}" stroke-dasharray="{}"/>"#,
            f.point(a.0, mu),
            f.point(a.1, mu),
            STYLE.strip,
            STYLE.strip_dash
        );
    }
    let ranks = d.mus.iter().map(Vec::len).max().unwrap_or(0);
    for r in 0..ranks {
        let pts: Vec<(f64, f64)> = d
            .alphas
            .iter()
            .zip(&d.mus)
            .filter_map(|(&al, m)| m.get(r).map(|&mu| (al, mu)))
            .collect();
        for run in f.runs(&pts) {
            let _ = writeln!(
                svg,
                r#"<polyline class="branch" data-rank="{r}" points="{run}" fill="none" stroke="{}" stroke-width="{}"/>"#,
                STYLE.component, STYLE.stroke
            );
        }
    }
    let _ = writeln!(svg, "</g>");
    axes(&mut svg, &f, "α", "μ = sgn(λ) √|λ|");
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> ZeroSetOptions {
        ZeroSetOptions {
            window: 3.0,
            mu_range: (-3.0, 12.0),
            spiral_points: 400,
            trace_points: 101,
        }
    }

    #[test]
    fn zero_set_figure_has_every_component() {
        let p = GraphParams::robin(11, 3.0, -2.0).unwrap();
        let d = zero_set_data(&p, &Potential::zero(), &opts()).unwrap();
        let svg = zero_set_svg(&d, None);
        assert_eq!(svg.matches(r#"class="component""#).count(), 12);
        assert!(svg.contains(r#"class="spiral""#) && svg.contains(r#"class="oscillatory""#));
        assert_eq!(svg.matches(r#"class="strip""#).count(), 21);
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg, zero_set_svg(&d, None));
        assert!(!svg.contains("<metadata>"));
        assert!(zero_set_svg(&d, Some(5)).contains("<metadata>"));
    }

    #[test]
    fn sweep_panel_has_branches() {
        let p = GraphParams::robin(3, 2.0, 0.0).unwrap();
        let d = sweep_data(&p, &Potential::zero(), (-5.0, 2.0), 8, (-6.0, 7.0)).unwrap();
        assert_eq!(d.mus.len(), 8);
        assert!(d.mus.iter().all(|m| m.windows(2).all(|w| w[0] < w[1])));
        assert_eq!(d.dirichlet_mu.len(), 2);
        let svg = sweep_svg(&d, None);
        assert!(svg.matches(r#"class="branch""#).count() >= 6);
    }

    #[test]
    fn runs_split_at_the_window() {
        let f = Frame {
            x: (-1.0, 1.0),
            y: (-1.0, 1.0),
        };
        let pts = [(0.0, 0.0), (0.5, 0.5), (9.0, 9.0), (0.1, 0.1), (0.2, 0.2)];
        assert_eq!(f.runs(&pts).len(), 2);
    }
}
