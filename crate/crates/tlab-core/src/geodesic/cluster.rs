use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::oracle::LineGraph;
use super::path::geodesic;
use super::points::TemplatePoint;
use crate::error::GeodesicError;
use crate::fm;
use crate::planar::{point_segment_distance, PlanarPoint, ToleranceConfig};
use crate::template::TemplateData;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub center: TemplatePoint,
    /// Every wall in the range must meet B(center, radius).
    pub radius: f64,
    /// Radius of the avoided ball.
    pub r_prime: f64,
    pub n0: usize,
    pub n1: usize,
    pub samples: usize,
    /// Required ratio r_prime / radius.
    pub multiplier: f64,
    /// Defaults to r_prime / 8.
    pub mesh_step: Option<f64>,
    /// Offset into the endpoint sequence.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSample {
    pub x: TemplatePoint,
    pub y: TemplatePoint,
    pub distance: f64,
    pub avoiding_length: f64,
    pub excess: f64,
    pub normalized_excess: f64,
    /// Upper estimate of how close the geodesic xy comes to the center.
    pub closest_approach: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub n_span: usize,
    pub r_prime: f64,
    pub min_excess: f64,
    pub min_normalized_excess: f64,
    /// Largest closest approach over the samples.
    pub max_closest_approach: f64,
    pub samples: Vec<ClusterSample>,
}

/// Endpoint on wall `w` at distance `r` from its origin, at angle `a`.
fn point_on_wall(w: usize, r: f64, a: f64) -> TemplatePoint {
    let p = PlanarPoint::unit(a) * r;
    TemplatePoint::wall(w, p.x, p.y)
}

/// Distance upper bound from the center, given graph distances from it.
fn from_center(g: &LineGraph, d: &[f64], center: TemplatePoint, z: TemplatePoint) -> f64 {
    let mut best = if center.piece() == z.piece() { center.coords().dist(z.coords()) } else { f64::INFINITY };
    for (q, at) in g.piece_nodes(z.piece()) {
        best = best.min(d[q] + at.dist(z.coords()));
    }
    best
}

/// Shortest paths between walls n0 and n1 that avoid B(center, r_prime),
/// compared with the geodesic between their endpoints.
pub fn cluster_excess_experiment(
    t: &TemplateData,
    cfg: &ClusterConfig,
    tol: &ToleranceConfig,
) -> Result<ClusterReport, GeodesicError> {
    if cfg.n0 >= cfg.n1 || cfg.n1 >= t.n_walls() {
        return Err(GeodesicError::Infeasible("wall range outside the template"));
    }
    if !(cfg.radius > 0.0) || cfg.r_prime < cfg.multiplier * cfg.radius {
        return Err(GeodesicError::Infeasible("r_prime below multiplier times radius"));
    }
    cfg.center.check(t, tol.eps_length)?;
    let rp = cfg.r_prime;
    let h = cfg.mesh_step.unwrap_or(rp / 8.0);
    let lo = (2 * cfg.n0).min(cfg.center.piece());
    let hi = (2 * cfg.n1).max(cfg.center.piece());
    let mut scale = 1.0;
    'grow: for _ in 0..4 {
        let radius = |_: usize| (6.0 * rp + 2.0 * cfg.radius) * scale;
        let mut g = LineGraph::build(t, lo, hi, h, radius)?;
        let c = g.add_point(cfg.center);
        let (dc, _) = g.dijkstra(c);
        for w in cfg.n0..=cfg.n1 {
            let near = if cfg.center.piece() == 2 * w {
                0.0
            } else {
                g.piece_nodes(2 * w).map(|(q, _)| dc[q]).fold(f64::INFINITY, f64::min)
            };
            if near > cfg.radius {
                return Err(GeodesicError::Infeasible("a wall in the range misses B(center, radius)"));
            }
        }
        let removed: Vec<bool> = (0..g.n_nodes()).map(|q| dc[q] < rp).collect();
        // ball nodes per piece, with their distance from the center
        let ball: Vec<Vec<(PlanarPoint, f64)>> = (lo..=hi)
            .map(|p| g.piece_nodes(p).filter(|&(q, _)| dc[q] < rp).map(|(q, at)| (at, dc[q])).collect())
            .collect();
        let allow = |piece: usize, a: PlanarPoint, b: PlanarPoint| {
            if piece == cfg.center.piece() && point_segment_distance(cfg.center.coords(), a, b) < rp {
                return false;
            }
            ball[piece - lo].iter().all(|&(q, d)| d + point_segment_distance(q, a, b) >= rp)
        };

        let mut samples = Vec::with_capacity(cfg.samples);
        for k in 0..cfg.samples {
            // low-discrepancy radii in [1.5, 2.5]·r_prime and angles
            let f = |m: f64| {
                let v = (k as u64).wrapping_add(cfg.seed) as f64 * m;
                v - fm::floor(v)
            };
            let x = point_on_wall(cfg.n0, (1.5 + f(0.618_033_988_7)) * rp, core::f64::consts::TAU * f(0.754_877_666_2));
            let y = point_on_wall(cfg.n1, (1.5 + f(0.569_840_290_9)) * rp, core::f64::consts::TAU * f(0.414_213_562_4));
            let dist = geodesic(t, x, y, tol)?;
            let mut g2 = g.clone();
            let a = g2.add_point(x);
            let b = g2.add_point(y);
            let mut rem = removed.clone();
            rem.resize(g2.n_nodes(), false);
            let (d, prev) = g2.dijkstra_with(a, allow, &rem);
            if !d[b].is_finite() {
                return Err(GeodesicError::NoPath);
            }
            let mut v = b;
            while v != a {
                if g2.is_extreme(v) {
                    scale *= 2.0;
                    continue 'grow;
                }
                v = prev[v];
            }
            let steps = 64;
            let closest = (0..=steps)
                .map(|i| from_center(&g, &dc, cfg.center, dist.point_at(dist.length * i as f64 / steps as f64)))
                .fold(f64::INFINITY, f64::min);
            let excess = d[b] - dist.length;
            samples.push(ClusterSample {
                x,
                y,
                distance: dist.length,
                avoiding_length: d[b],
                excess,
                normalized_excess: excess / ((cfg.n1 - cfg.n0) as f64 * rp),
                closest_approach: closest,
            });
        }
        let min_excess = samples.iter().map(|s| s.excess).fold(f64::INFINITY, f64::min);
        let min_norm = samples.iter().map(|s| s.normalized_excess).fold(f64::INFINITY, f64::min);
        let max_close = samples.iter().map(|s| s.closest_approach).fold(0.0, f64::max);
        return Ok(ClusterReport {
            n_span: cfg.n1 - cfg.n0,
            r_prime: rp,
            min_excess,
            min_normalized_excess: min_norm,
            max_closest_approach: max_close,
            samples,
        });
    }
    Err(GeodesicError::TruncationTooSmall)
}
