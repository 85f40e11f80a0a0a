//! SVG pictures of developments and of the torus demo, on a 1000×1000 viewBox.

use std::fmt::Write;

use tlab_core::develop::DevelopedChain;
use tlab_core::geodesic::CrossingTrace;
use tlab_core::planar::OrientedLine;
use tlab_core::torus::{chebyshev_line_fit, ShiftedPath};
use tlab_core::PlanarPoint;

const SIZE: f64 = 1000.0;
const MARGIN: f64 = 40.0;

/// Affine map from a planar box onto the viewBox, y flipped.
struct View {
    min: PlanarPoint,
    scale: f64,
    off: PlanarPoint,
}

impl View {
    fn fit(pts: impl IntoIterator<Item = PlanarPoint>) -> Self {
        let (mut lo, mut hi) =
            (PlanarPoint::new(f64::INFINITY, f64::INFINITY), PlanarPoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in pts {
            lo = PlanarPoint::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = PlanarPoint::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if !lo.x.is_finite() {
            lo = PlanarPoint::new(-1.0, -1.0);
            hi = PlanarPoint::new(1.0, 1.0);
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
        let scale = (SIZE - 2.0 * MARGIN) / span;
        let off = PlanarPoint::new(
            MARGIN + (SIZE - 2.0 * MARGIN - scale * (hi.x - lo.x)) / 2.0,
            MARGIN + (SIZE - 2.0 * MARGIN - scale * (hi.y - lo.y)) / 2.0,
        );
        View { min: lo, scale, off }
    }

    fn map(&self, p: PlanarPoint) -> (f64, f64) {
        let x = self.off.x + (p.x - self.min.x) * self.scale;
        let y = SIZE - (self.off.y + (p.y - self.min.y) * self.scale);
        (x, y)
    }

    /// Planar length covering the whole picture from any visible point.
    fn reach(&self) -> f64 {
        2.0 * SIZE / self.scale
    }
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {SIZE} {SIZE}\" width=\"{SIZE}\" height=\"{SIZE}\">\n\
         <rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"
    )
}

fn line(out: &mut String, v: &View, l: &OrientedLine, stroke: &str) {
    let r = v.reach();
    let (a, b) = (v.map(l.anchor - l.direction * r), v.map(l.anchor + l.direction * r));
    let _ = writeln!(
        out,
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{stroke}\" stroke-width=\"1\"/>",
        a.0, a.1, b.0, b.1
    );
}

fn polyline(out: &mut String, v: &View, pts: &[PlanarPoint], stroke: &str) {
    let mut d = String::new();
    for p in pts {
        let (x, y) = v.map(*p);
        let _ = write!(d, "{x:.3},{y:.3} ");
    }
    let _ =
        writeln!(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"2\"/>", d.trim_end());
}

fn dot(out: &mut String, v: &View, p: PlanarPoint, fill: &str) {
    let (x, y) = v.map(p);
    let _ = writeln!(out, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"4\" fill=\"{fill}\"/>");
}

/// Gluing lines black, strip bands gray at 20%, origins red, an optional ray overlay blue.
pub fn development_svg(chain: &DevelopedChain, overlay: Option<&CrossingTrace>) -> String {
    let mut pts = chain.origins();
    if let Some(tr) = overlay {
        pts.push(tr.basepoint);
        pts.push(tr.point_at(tr.reach()));
    }
    let v = View::fit(pts.iter().copied());
    let mut out = header();
    let r = v.reach();
    out.push_str("<g id=\"bands\">\n");
    for s in &chain.strips {
        let (d0, d1) = (s.near.direction, s.far.direction);
        let d1 = if d0.dot(d1) < 0.0 { -d1 } else { d1 };
        let corners = [s.near.anchor - d0 * r, s.near.anchor + d0 * r, s.far.anchor + d1 * r, s.far.anchor - d1 * r];
        let mut d = String::new();
        for c in corners {
            let (x, y) = v.map(c);
            let _ = write!(d, "{x:.3},{y:.3} ");
        }
        let _ =
            writeln!(out, "<polygon points=\"{}\" fill=\"gray\" fill-opacity=\"0.2\" stroke=\"none\"/>", d.trim_end());
    }
    out.push_str("</g>\n<g id=\"lines\">\n");
    for w in &chain.walls {
        for l in w.entry.iter().chain(w.exit.iter()) {
            line(&mut out, &v, l, "black");
        }
    }
    out.push_str("</g>\n<g id=\"origins\">\n");
    for o in chain.origins() {
        dot(&mut out, &v, o, "red");
    }
    out.push_str("</g>\n");
    if let Some(tr) = overlay {
        out.push_str("<g id=\"overlay\">\n");
        polyline(&mut out, &v, &[tr.basepoint, tr.point_at(tr.reach())], "blue");
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Shifted path in blue against its best straight line in black.
pub fn torus_svg(path: &ShiftedPath, theta: f64) -> String {
    let v = View::fit(path.points.iter().copied());
    let mut out = header();
    let p0 = path.points[0];
    let slope = theta.tan();
    let res: Vec<(f64, f64)> = path.points.iter().map(|p| (p.x, p.y - p0.y - slope * (p.x - p0.x))).collect();
    let fit = chebyshev_line_fit(&res);
    let at = |x: f64| PlanarPoint::new(x, p0.y + slope * (x - p0.x) + fit.slope * x + fit.intercept);
    let (x0, x1) = res.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    out.push_str("<g id=\"best-ray\">\n");
    polyline(&mut out, &v, &[at(x0), at(x1)], "black");
    out.push_str("</g>\n<g id=\"overlay\">\n");
    polyline(&mut out, &v, &path.points, "blue");
    out.push_str("</g>\n<g id=\"jumps\">\n");
    for &j in &path.jumps {
        dot(&mut out, &v, path.points[j], "red");
    }
    out.push_str("</g>\n</svg>\n");
    out
}
