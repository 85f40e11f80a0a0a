//! The four-torus complex: a degenerate half template whose walls are quarter
//! planes, a ray through it, and the divergence of the shifted development.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::develop::{Frontier, SignSequence, WallChoice};
use crate::error::TorusError;
use crate::fm;
use crate::geodesic::{shoot, CrossingTrace};
use crate::planar::{PlanarPoint, ToleranceConfig};
use crate::template::{StripSpec, TemplateData, TemplateKind, WallSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusComplexConfig {
    /// Vertical shift of the perturbed gluing.
    pub r: f64,
    /// Number of wall crossings to build.
    pub horizon: usize,
    /// 0 selects the diagonal ray; other values pick a slope in (0.3, 1.2).
    pub itinerary_seed: u64,
}

impl TorusComplexConfig {
    pub fn theta(&self) -> f64 {
        if self.itinerary_seed == 0 {
            FRAC_PI_4
        } else {
            let v = self.itinerary_seed as f64 * 0.618_033_988_749_894_8;
            0.3 + 0.9 * (v - fm::floor(v))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusTemplate {
    pub template: TemplateData,
    /// Ray direction in the development.
    pub theta: f64,
    /// Basepoint on wall 0.
    pub basepoint: PlanarPoint,
    /// Ray parameter of each wall crossing.
    pub crossings: Vec<f64>,
    /// Length of the ray inside walls 1, 2, ...
    pub lengths: Vec<f64>,
    /// Smallest distance from the ray to a wall origin.
    pub origin_margin: f64,
}

/// Horizontal lines sit at even crossing indices, vertical lines at odd ones.
fn is_horizontal(i: usize) -> bool {
    i.is_multiple_of(2)
}

/// Greedy staircase: line positions (in ray-at-origin coordinates) such
/// that the ray spends strictly increasing lengths, at least i in wall i,
/// between consecutive lines. Same-type lines differ by odd multiples of π.
fn staircase(theta: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (s, c) = (fm::sin(theta), fm::cos(theta));
    let first = 0.5;
    let mut pos = alloc::vec![first];
    let mut taus = alloc::vec![first / s];
    let mut lengths: Vec<f64> = Vec::new();
    for i in 1..n {
        let cur = taus[i - 1];
        let need = (i as f64).max(lengths.last().copied().unwrap_or(0.0));
        let proj = if is_horizontal(i) { s } else { c };
        let p = if i == 1 {
            (cur + need + 0.1) * c
        } else {
            let mut k = 0u32;
            loop {
                let p = pos[i - 2] + f64::from(2 * k + 1) * PI;
                let len = p / proj - cur;
                if len >= need && lengths.last().is_none_or(|&l| len > l) {
                    break p;
                }
                k += 1;
            }
        };
        pos.push(p);
        taus.push(p / proj);
        lengths.push(p / proj - cur);
    }
    (pos, taus)
}

/// Degenerate half template realizing the staircase for `cfg.horizon` crossings.
pub fn build_torus_template(cfg: &TorusComplexConfig) -> Result<TorusTemplate, TorusError> {
    let theta = cfg.theta();
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(TorusError::BadDirection);
    }
    let n = cfg.horizon.max(2) + 1;
    let (pos, taus) = staircase(theta, n);
    // origin of wall i+1 is the corner of lines i and i+1
    let corner = |i: usize| {
        if is_horizontal(i) {
            PlanarPoint::new(pos[i + 1], pos[i])
        } else {
            PlanarPoint::new(pos[i], pos[i + 1])
        }
    };
    // wall 0's reference point sits π to the left of the first corner
    let o0 = corner(0) - PlanarPoint::new(PI, 0.0);
    let basepoint = -o0;
    let dir = PlanarPoint::unit(theta);
    let mut f = Frontier::start();
    let mut strips = Vec::with_capacity(n - 1);
    let mut margin = f64::INFINITY;
    for i in 0..n - 1 {
        let o = corner(i) - o0;
        let eps = (o - f.origin).dot(f.dir);
        strips.push(StripSpec { width: 0.0, eps, degenerate_ok: true });
        let entry = basepoint + dir * taus[i];
        let pass = if (entry - o).dot(f.dir) > 0.0 { 1 } else { -1 };
        margin = margin.min(fm::abs((o - basepoint).cross(dir)));
        f = f.step(0.0, eps, FRAC_PI_2, WallChoice { sign: 1, pass }).next;
    }
    let mut walls = alloc::vec![WallSpec { alpha: Some(FRAC_PI_2) }; n];
    walls[0].alpha = None;
    let template = TemplateData { kind: TemplateKind::Half, anchor: Default::default(), walls, strips };
    let lengths = taus.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(TorusTemplate { template, theta, basepoint, crossings: taus, lengths, origin_margin: margin })
}

impl TorusTemplate {
    /// Shoot the ray through the first `walls` walls with all rotation signs +1.
    pub fn trace(&self, walls: usize) -> Result<CrossingTrace, TorusError> {
        let signs = SignSequence::all_positive(walls);
        shoot(&self.template, self.basepoint, self.theta, &signs, walls, &ToleranceConfig::default())
            .map_err(TorusError::Shoot)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftedPath {
    pub points: Vec<PlanarPoint>,
    /// Indices into `points` of the vertex reached just after each jump.
    pub jumps: Vec<usize>,
}

/// Crossings of the gluing between e₄-walls and e₁-walls: every 4th, from the first.
pub fn is_jump_crossing(crossing: usize) -> bool {
    crossing.is_multiple_of(4)
}

/// The developed ray with a vertical jump of `r` at every e₄ → e₁ crossing.
pub fn apply_shift_map(trace: &CrossingTrace, r: f64) -> ShiftedPath {
    let mut points = alloc::vec![trace.basepoint];
    let mut jumps = Vec::new();
    let mut off = 0.0;
    for (i, c) in trace.crossings.iter().enumerate() {
        points.push(c.entry + PlanarPoint::new(0.0, off));
        if is_jump_crossing(i) {
            off += r;
            points.push(c.entry + PlanarPoint::new(0.0, off));
            jumps.push(points.len() - 1);
        }
    }
    ShiftedPath { points, jumps }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub k: u32,
    /// Wall crossings covered: 2^k.
    pub horizon: usize,
    pub jumps: usize,
    pub best_ray_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub r: f64,
    pub theta: f64,
    pub rows: Vec<DivergenceRow>,
}

/// Lower (sign −1) or upper (sign +1) convex hull of x-sorted points.
fn hull(pts: &[(f64, f64)], sign: f64) -> Vec<(f64, f64)> {
    let mut h: Vec<(f64, f64)> = Vec::new();
    for &p in pts {
        while h.len() >= 2 {
            let (a, b) = (h[h.len() - 2], h[h.len() - 1]);
            let cr = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if sign * cr >= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(p);
    }
    h
}

/// Best line y = slope·x + intercept in the vertical Chebyshev sense.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub deviation: f64,
}

/// min over slopes κ of half the spread of y − κx. The optimum is attained
/// at a hull edge slope.
pub fn chebyshev_line_fit(pts: &[(f64, f64)]) -> LineFit {
    if pts.len() < 2 {
        let intercept = pts.first().map_or(0.0, |p| p.1);
        return LineFit { slope: 0.0, intercept, deviation: 0.0 };
    }
    let mut v = pts.to_vec();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let spread = |k: f64| {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &v {
            let s = y - k * x;
            lo = lo.min(s);
            hi = hi.max(s);
        }
        LineFit { slope: k, intercept: (hi + lo) / 2.0, deviation: (hi - lo) / 2.0 }
    };
    let mut best = spread(0.0);
    for h in [hull(&v, 1.0), hull(&v, -1.0)] {
        for w in h.windows(2) {
            let dx = w[1].0 - w[0].0;
            if dx > 0.0 {
                let f = spread((w[1].1 - w[0].1) / dx);
                if f.deviation < best.deviation {
                    best = f;
                }
            }
        }
    }
    best
}

/// Vertical Chebyshev distance from the points to the best line.
pub fn chebyshev_line_deviation(pts: &[(f64, f64)]) -> f64 {
    chebyshev_line_fit(pts).deviation
}

/// Best straight-ray deviation of the shifted path at horizons 2^k, k_min..=k_max.
pub fn divergence_experiment(cfg: &TorusComplexConfig, k_min: u32, k_max: u32) -> Result<DivergenceReport, TorusError> {
    if k_min < 1 || k_min > k_max || k_max > 16 {
        return Err(TorusError::BadHorizon);
    }
    let horizon = 1usize << k_max;
    let tt = build_torus_template(&TorusComplexConfig { horizon, ..*cfg })?;
    let trace = tt.trace(horizon)?;
    let dir = PlanarPoint::unit(tt.theta);
    // residual coordinates: position along x, vertical offset from the ray
    let mut res = alloc::vec![(tt.basepoint.x, 0.0)];
    let mut ends = Vec::new();
    let mut jumps = Vec::new();
    let mut off = 0.0;
    let mut m = 0;
    for (i, c) in trace.crossings.iter().enumerate() {
        let x = (tt.basepoint + dir * c.t_entry).x;
        res.push((x, off));
        if is_jump_crossing(i) {
            off = cfg.r * f64::from(m + 1);
            m += 1;
            res.push((x, off));
        }
        ends.push(res.len());
        jumps.push(m as usize);
    }
    let rows = (k_min..=k_max)
        .map(|k| {
            let h = 1usize << k;
            DivergenceRow {
                k,
                horizon: h,
                jumps: jumps[h - 1],
                best_ray_deviation: chebyshev_line_deviation(&res[..ends[h - 1]]),
            }
        })
        .collect();
    Ok(DivergenceReport { r: cfg.r, theta: tt.theta, rows })
}
