use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::points::TemplatePoint;
use crate::error::GeodesicError;
use crate::fm;
use crate::planar::PlanarPoint;
use crate::template::TemplateData;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub mesh_step: f64,
    /// Half-length of each gluing line kept in the graph; automatic when absent.
    pub truncation: Option<f64>,
    /// Extra length added to the automatic truncation.
    pub slack: f64,
    /// Times the truncation is doubled after a path touches its end.
    pub max_doublings: usize,
}

impl OracleConfig {
    pub fn new(mesh_step: f64) -> Self {
        OracleConfig { mesh_step, truncation: None, slack: 1.0, max_doublings: 4 }
    }
}

#[derive(Clone, Copy, Debug)]
struct Member {
    node: usize,
    at: PlanarPoint,
}

/// Graph on mesh points of the gluing lines, complete inside each piece.
///
/// Pieces are convex, so the straight edge between two of their points is
/// the shortest path within the piece.
#[derive(Clone, Debug)]
pub struct LineGraph {
    /// First chain piece represented.
    pub first_piece: usize,
    members: Vec<Vec<Member>>,
    /// Per node: the (piece, coordinates) it belongs to.
    places: Vec<[(usize, PlanarPoint); 2]>,
    extreme: Vec<bool>,
}

#[derive(Clone, Copy, PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl LineGraph {
    /// Mesh nodes t = k·h, |t| ≤ radius(line) on every gluing line between
    /// chain pieces `lo` and `hi`.
    pub fn build(
        t: &TemplateData,
        lo: usize,
        hi: usize,
        h: f64,
        radius: impl Fn(usize) -> f64,
    ) -> Result<Self, GeodesicError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(GeodesicError::BadMesh);
        }
        let mut g = LineGraph {
            first_piece: lo,
            members: alloc::vec![Vec::new(); hi - lo + 1],
            places: Vec::new(),
            extreme: Vec::new(),
        };
        for p in lo..hi {
            let rho = radius(p);
            let k_max = fm::ceil(rho / h) as i64;
            for k in -k_max..=k_max {
                let s = k as f64 * h;
                let (a, b) = line_point(t, p, s);
                g.push([(p, a), (p + 1, b)], k.abs() == k_max);
            }
        }
        Ok(g)
    }

    fn push(&mut self, places: [(usize, PlanarPoint); 2], extreme: bool) -> usize {
        let id = self.places.len();
        for (p, at) in places {
            if let Some(m) = p.checked_sub(self.first_piece).and_then(|i| self.members.get_mut(i)) {
                if !m.iter().any(|x| x.node == id) {
                    m.push(Member { node: id, at });
                }
            }
        }
        self.places.push(places);
        self.extreme.push(extreme);
        id
    }

    /// Add a free point of the template as a node.
    pub fn add_point(&mut self, p: TemplatePoint) -> usize {
        let place = (p.piece(), p.coords());
        self.push([place, place], false)
    }

    pub fn n_nodes(&self) -> usize {
        self.places.len()
    }

    pub fn is_extreme(&self, node: usize) -> bool {
        self.extreme[node]
    }

    /// (piece, coordinates) of a node; the two entries coincide for free points.
    pub fn places(&self, node: usize) -> [(usize, PlanarPoint); 2] {
        self.places[node]
    }

    /// Nodes of a chain piece with their coordinates there.
    pub fn piece_nodes(&self, piece: usize) -> impl Iterator<Item = (usize, PlanarPoint)> + '_ {
        piece
            .checked_sub(self.first_piece)
            .and_then(|i| self.members.get(i))
            .into_iter()
            .flatten()
            .map(|m| (m.node, m.at))
    }

    /// Single-source distances and predecessors, using only edges accepted by `allow(piece, a, b)`.
    pub fn dijkstra_with(
        &self,
        src: usize,
        allow: impl Fn(usize, PlanarPoint, PlanarPoint) -> bool,
        removed: &[bool],
    ) -> (Vec<f64>, Vec<usize>) {
        let n = self.n_nodes();
        let mut dist = alloc::vec![f64::INFINITY; n];
        let mut prev = alloc::vec![usize::MAX; n];
        let mut done = alloc::vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Item(0.0, src));
        while let Some(Item(d, u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            let pl = self.places[u];
            for (k, &(piece, at)) in pl.iter().enumerate() {
                if k == 1 && pl[1].0 == pl[0].0 {
                    break;
                }
                for m in self.piece_nodes(piece) {
                    let (v, bt) = m;
                    if done[v] || removed.get(v).copied().unwrap_or(false) || !allow(piece, at, bt) {
                        continue;
                    }
                    let nd = d + at.dist(bt);
                    if nd < dist[v] {
                        dist[v] = nd;
                        prev[v] = u;
                        heap.push(Item(nd, v));
                    }
                }
            }
        }
        (dist, prev)
    }

    pub fn dijkstra(&self, src: usize) -> (Vec<f64>, Vec<usize>) {
        self.dijkstra_with(src, |_, _, _| true, &[])
    }
}

/// Point at parameter `s` of the gluing line between chain pieces p and p+1,
/// in the coordinates of each side.
fn line_point(t: &TemplateData, p: usize, s: f64) -> (PlanarPoint, PlanarPoint) {
    let i = p / 2;
    if p.is_multiple_of(2) {
        (PlanarPoint::unit(t.alpha(i)) * s, PlanarPoint::new(s, 0.0))
    } else {
        let st = t.strips[i];
        (PlanarPoint::new(s + st.eps, st.width), PlanarPoint::new(s, 0.0))
    }
}

/// Upper bound on the distance from a point to each wall origin, by hops
/// through origins.
fn origin_bounds(t: &TemplateData, x: TemplatePoint) -> Vec<f64> {
    let n = t.n_walls();
    let mut ub = alloc::vec![f64::INFINITY; n];
    match x {
        TemplatePoint::Wall { wall, .. } => ub[wall] = x.coords().norm(),
        TemplatePoint::Strip { strip, u, v } => {
            let s = t.strips[strip];
            ub[strip] = fm::hypot(u, v);
            ub[strip + 1] = fm::hypot(u - s.eps, v - s.width);
        }
    }
    for i in 1..n {
        let s = t.strips[i - 1];
        ub[i] = ub[i].min(ub[i - 1] + fm::hypot(s.width, s.eps));
    }
    for i in (0..n - 1).rev() {
        let s = t.strips[i];
        ub[i] = ub[i].min(ub[i + 1] + fm::hypot(s.width, s.eps));
    }
    ub
}

/// Origin of the wall on which the gluing line after chain piece p lies.
fn line_wall(p: usize) -> usize {
    if p.is_multiple_of(2) {
        p / 2
    } else {
        p / 2 + 1
    }
}

/// Approximate distance by shortest paths in the line graph.
pub fn dijkstra_oracle(
    t: &TemplateData,
    x: TemplatePoint,
    y: TemplatePoint,
    cfg: &OracleConfig,
) -> Result<f64, GeodesicError> {
    x.check(t, 1e-9)?;
    y.check(t, 1e-9)?;
    if !(cfg.mesh_step > 0.0) {
        return Err(GeodesicError::BadMesh);
    }
    if x.piece() == y.piece() {
        return Ok(x.coords().dist(y.coords()));
    }
    let (x, y) = if x.piece() < y.piece() { (x, y) } else { (y, x) };
    let (bx, by) = (origin_bounds(t, x), origin_bounds(t, y));
    let u = (0..t.n_walls()).map(|i| bx[i] + by[i]).fold(f64::INFINITY, f64::min);
    let mut scale = 1.0;
    for _ in 0..=cfg.max_doublings {
        let radius = |p: usize| {
            let w = line_wall(p);
            let auto = (bx[w] + by[w] + u) / 2.0 + cfg.slack;
            cfg.truncation.unwrap_or(auto) * scale
        };
        let mut g = LineGraph::build(t, x.piece(), y.piece(), cfg.mesh_step, radius)?;
        let a = g.add_point(x);
        let b = g.add_point(y);
        let (dist, prev) = g.dijkstra(a);
        if !dist[b].is_finite() {
            return Err(GeodesicError::NoPath);
        }
        let mut v = b;
        let mut touched = false;
        while v != a {
            touched |= g.is_extreme(v);
            v = prev[v];
        }
        if !touched {
            return Ok(dist[b]);
        }
        scale *= 2.0;
    }
    Err(GeodesicError::TruncationTooSmall)
}
