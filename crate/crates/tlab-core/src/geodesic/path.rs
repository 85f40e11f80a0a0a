use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::points::{start_wall_frame, TemplatePoint};
use crate::develop::{Frontier, WallChoice};
use crate::error::GeodesicError;
use crate::planar::{
    halfline_arc, halfplane_arc, AngleInterval, OrientedLine, PlanarPoint, RigidMotion, ToleranceConfig,
};
use crate::template::TemplateData;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeodesicKind {
    Straight,
    Bent,
}

/// A straight developed segment from `from` to `to`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StraightPiece {
    pub from: TemplatePoint,
    pub to: TemplatePoint,
    pub length: f64,
    /// Developed endpoints, in the development of this piece.
    pub a: PlanarPoint,
    pub b: PlanarPoint,
    /// Choices at the intermediate walls.
    pub choices: Vec<WallChoice>,
    /// (chain piece index, intrinsic → developed frame), from `a` to `b`.
    frames: Vec<(usize, RigidMotion)>,
    /// Gate lines between consecutive frames.
    gates: Vec<OrientedLine>,
}

impl StraightPiece {
    /// Template point at distance `s` from `from`.
    pub fn point_at(&self, s: f64) -> TemplatePoint {
        if self.length <= 0.0 {
            return self.from;
        }
        let dir = (self.b - self.a) * (1.0 / self.length);
        let q = self.a + dir * s.clamp(0.0, self.length);
        let mut k = 0;
        for g in &self.gates {
            let denom = dir.cross(g.direction);
            if denom == 0.0 {
                break;
            }
            let tg = (g.anchor - self.a).cross(g.direction) / denom;
            if s > tg {
                k += 1;
            } else {
                break;
            }
        }
        let (piece, m) = self.frames[k.min(self.frames.len() - 1)];
        TemplatePoint::from_piece(piece, m.inverse().apply(q))
    }

    fn reversed(mut self) -> Self {
        core::mem::swap(&mut self.from, &mut self.to);
        core::mem::swap(&mut self.a, &mut self.b);
        self.frames.reverse();
        self.gates.reverse();
        self.choices.reverse();
        self
    }

    fn single(x: TemplatePoint, y: TemplatePoint) -> Self {
        let (a, b) = (x.coords(), y.coords());
        StraightPiece {
            from: x,
            to: y,
            length: a.dist(b),
            a,
            b,
            choices: Vec::new(),
            frames: alloc::vec![(x.piece(), RigidMotion::IDENTITY)],
            gates: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicResult {
    pub length: f64,
    /// Walls at whose origins the path bends.
    pub breakpoints: Vec<usize>,
    pub pieces: Vec<StraightPiece>,
    pub kind: GeodesicKind,
}

impl GeodesicResult {
    /// Point at arclength `s` from the start.
    pub fn point_at(&self, s: f64) -> TemplatePoint {
        let mut rem = s.max(0.0);
        for p in &self.pieces {
            if rem <= p.length {
                return p.point_at(rem);
            }
            rem -= p.length;
        }
        self.pieces.last().map(|p| p.to).expect("geodesic has at least one piece")
    }
}

struct Search<'a> {
    t: &'a TemplateData,
    tol: &'a ToleranceConfig,
    px: PlanarPoint,
    y: TemplatePoint,
    best: Option<StraightPiece>,
    frames: Vec<(usize, RigidMotion)>,
    gates: Vec<OrientedLine>,
    choices: Vec<WallChoice>,
    x: TemplatePoint,
    /// No gate at the near line of a start strip.
    skip_gate: bool,
}

impl Search<'_> {
    fn offer(&mut self, py: PlanarPoint, window: &AngleInterval, end: (usize, RigidMotion)) {
        let v = py - self.px;
        let len = v.norm();
        let ok = len <= self.tol.eps_length || window.contains(v.angle(), 1e3 * self.tol.eps_angle);
        if ok && self.best.as_ref().is_none_or(|b| len < b.length) {
            let mut frames = self.frames.clone();
            frames.push(end);
            self.best = Some(StraightPiece {
                from: self.x,
                to: self.y,
                length: len,
                a: self.px,
                b: py,
                choices: self.choices.clone(),
                frames,
                gates: self.gates.clone(),
            });
        }
    }

    /// In strip `j`, whose near line and band normal are given by `f`.
    fn dfs(&mut self, f: Frontier, j: usize, window: AngleInterval) {
        let eps = self.tol.eps_angle;
        let (a0, w0) = halfplane_arc(f.normal);
        let Some(w) = window.intersect_arc(a0, w0, eps) else { return };
        let s = self.t.strips[j];
        let strip_frame = f.strip_frame();
        let gated = !core::mem::replace(&mut self.skip_gate, false);
        if gated {
            self.gates.push(OrientedLine { anchor: f.origin, direction: f.dir });
        }
        match self.y {
            TemplatePoint::Strip { strip, u, v } if strip == j => {
                let py = strip_frame.apply(PlanarPoint::new(u, v));
                self.offer(py, &w, (2 * j + 1, strip_frame));
            }
            TemplatePoint::Wall { wall, x, y } if wall == j + 1 => {
                let o = f.cross_strip(s.width, s.eps);
                let py = o + f.dir * x + f.normal * libm::fabs(y);
                self.frames.push((2 * j + 1, strip_frame));
                self.gates.push(OrientedLine { anchor: o, direction: f.dir });
                let sg = if y < 0.0 { -1.0 } else { 1.0 };
                self.offer(py, &w, (2 * wall, RigidMotion::from_frame(o, f.dir, f.normal * sg)));
                self.gates.pop();
                self.frames.pop();
            }
            _ => {
                let k = j + 1;
                if self.t.is_interior(k) && k < self.t.n_walls() {
                    self.frames.push((2 * j + 1, strip_frame));
                    for c in WallChoice::ALL {
                        let st = f.step(s.width, s.eps, self.t.alpha(k), c);
                        let (a1, w1) = halfline_arc(self.px, st.origin, st.entry_half);
                        let Some(w2) = w.intersect_arc(a1, w1, eps) else { continue };
                        let (a2, w2a) = halfline_arc(self.px, st.origin, st.exit_half);
                        let Some(w3) = w2.intersect_arc(a2, w2a, eps) else { continue };
                        self.frames.push((2 * k, st.frame));
                        self.gates.push(OrientedLine { anchor: st.origin, direction: st.entry_dir });
                        self.choices.push(c);
                        self.dfs(st.next, k, w3);
                        self.choices.pop();
                        self.gates.pop();
                        self.frames.pop();
                    }
                    self.frames.pop();
                }
            }
        }
        if gated {
            self.gates.pop();
        }
    }
}

/// Shortest straight developed segment between two points, if one is valid.
pub fn straight_distance(
    t: &TemplateData,
    x: TemplatePoint,
    y: TemplatePoint,
    tol: &ToleranceConfig,
) -> Option<StraightPiece> {
    if x.piece() == y.piece() {
        return Some(StraightPiece::single(x, y));
    }
    if x.piece() > y.piece() {
        return straight_distance(t, y, x, tol).map(StraightPiece::reversed);
    }
    let (j, px, start) = match x {
        TemplatePoint::Wall { wall, .. } => {
            if wall >= t.strips.len() {
                return None;
            }
            let m = start_wall_frame(t, wall, x.coords());
            (wall, m.apply(x.coords()), (2 * wall, m))
        }
        TemplatePoint::Strip { strip, u, v } => (strip, PlanarPoint::new(u, v), (2 * strip + 1, RigidMotion::IDENTITY)),
    };
    let mut s = Search {
        t,
        tol,
        px,
        y,
        best: None,
        frames: Vec::new(),
        gates: Vec::new(),
        choices: Vec::new(),
        x,
        skip_gate: matches!(x, TemplatePoint::Strip { .. }),
    };
    if let TemplatePoint::Wall { .. } = x {
        s.frames.push(start);
    }
    let full = AngleInterval::new(-core::f64::consts::PI, core::f64::consts::PI);
    s.dfs(Frontier::start(), j, full);
    s.best
}

/// Shortest path between two template points.
///
/// Tries a straight developed segment first; otherwise minimizes over paths
/// bending only at origins of the walls between the points.
pub fn geodesic(
    t: &TemplateData,
    x: TemplatePoint,
    y: TemplatePoint,
    tol: &ToleranceConfig,
) -> Result<GeodesicResult, GeodesicError> {
    x.check(t, tol.eps_length)?;
    y.check(t, tol.eps_length)?;
    if x.piece() > y.piece() {
        let mut g = geodesic(t, y, x, tol)?;
        g.pieces = g.pieces.into_iter().rev().map(StraightPiece::reversed).collect();
        g.breakpoints.reverse();
        return Ok(g);
    }
    if let Some(p) = straight_distance(t, x, y, tol) {
        return Ok(GeodesicResult {
            length: p.length,
            breakpoints: Vec::new(),
            pieces: alloc::vec![p],
            kind: GeodesicKind::Straight,
        });
    }
    // nodes: x, origins of interior walls between the points, y
    let (lo, hi) = (x.piece(), y.piece());
    let mut nodes = alloc::vec![x];
    let mut walls = Vec::new();
    for w in t.interior_walls() {
        if 2 * w >= lo && 2 * w <= hi {
            nodes.push(TemplatePoint::origin(w));
            walls.push(w);
        }
    }
    nodes.push(y);
    let n = nodes.len();
    let mut dist = alloc::vec![f64::INFINITY; n];
    let mut prev: Vec<Option<(usize, StraightPiece)>> = alloc::vec![None; n];
    dist[0] = 0.0;
    for j in 1..n {
        for i in 0..j {
            if !dist[i].is_finite() {
                continue;
            }
            if let Some(p) = straight_distance(t, nodes[i], nodes[j], tol) {
                let d = dist[i] + p.length;
                if d < dist[j] {
                    dist[j] = d;
                    prev[j] = Some((i, p));
                }
            }
        }
    }
    if !dist[n - 1].is_finite() {
        return Err(GeodesicError::NoPath);
    }
    let mut pieces = Vec::new();
    let mut breakpoints = Vec::new();
    let mut j = n - 1;
    while let Some((i, p)) = prev[j].take() {
        pieces.push(p);
        if i > 0 {
            breakpoints.push(walls[i - 1]);
        }
        j = i;
    }
    pieces.reverse();
    breakpoints.reverse();
    let kind = if breakpoints.is_empty() { GeodesicKind::Straight } else { GeodesicKind::Bent };
    Ok(GeodesicResult { length: dist[n - 1], breakpoints, pieces, kind })
}
