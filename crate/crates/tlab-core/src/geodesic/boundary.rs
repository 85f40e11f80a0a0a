use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::develop::{Frontier, WallChoice};
use crate::error::GeodesicError;
use crate::planar::{halfline_arc, halfplane_arc, AngleInterval, PlanarPoint, ToleranceConfig};
use crate::template::TemplateData;

pub const DEFAULT_BRANCH_CAP: usize = 64;

/// Directions at the basepoint valid through `wall_depth` walls for one choice prefix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionInterval {
    pub lo: f64,
    pub hi: f64,
    pub wall_depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEstimate {
    /// Extrapolated from the decay of `theta_hi`; an estimate, not a certified bound.
    pub theta_lo: f64,
    /// Angular width of the union of surviving intervals.
    pub theta_hi: f64,
    pub depth: usize,
    pub surviving_branches: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRun {
    /// One estimate per depth 1..=depth.
    pub profile: Vec<BoundaryEstimate>,
    /// Surviving intervals at the final depth, in branch order.
    pub intervals: Vec<DirectionInterval>,
    /// Choice sequence of each surviving branch.
    pub choices: Vec<Vec<WallChoice>>,
}

impl BoundaryRun {
    pub fn last(&self) -> BoundaryEstimate {
        *self.profile.last().expect("profile is never empty")
    }
}

#[derive(Clone)]
struct Branch {
    frontier: Frontier,
    window: AngleInterval,
    choices: Vec<WallChoice>,
}

/// Width of the union of intervals.
pub fn union_width(ivs: &[AngleInterval]) -> f64 {
    let mut v: Vec<AngleInterval> = ivs.to_vec();
    v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut total = 0.0;
    let mut cur: Option<AngleInterval> = None;
    for iv in v {
        match cur {
            Some(ref mut c) if iv.lo <= c.hi => c.hi = c.hi.max(iv.hi),
            _ => {
                if let Some(c) = cur {
                    total += c.width();
                }
                cur = Some(iv);
            }
        }
    }
    if let Some(c) = cur {
        total += c.width();
    }
    total
}

/// Lower estimate from the stride-2 geometric decay of the upper bracket.
fn extrapolated_lo(hi: &[f64], prev_lo: f64, stable: bool) -> f64 {
    let n = hi.len();
    let h = hi[n - 1];
    if h <= 0.0 {
        return 0.0;
    }
    let mut lo = if n >= 5 {
        let d1 = hi[n - 5] - hi[n - 3];
        let d2 = hi[n - 3] - hi[n - 1];
        let tail = if d1 > 0.0 && d2 >= 0.0 {
            let q = (d2 / d1).min(0.95);
            d2 * q / (1.0 - q)
        } else {
            d2.abs()
        };
        (h - tail).max(0.0)
    } else {
        0.0
    };
    if stable {
        lo = lo.max(prev_lo);
    }
    lo.min(h)
}

/// Branch-and-bound over wall choices for directions at `basepoint`
/// whose rays meet walls 1..=depth in order.
pub fn boundary_run(
    t: &TemplateData,
    basepoint: PlanarPoint,
    depth: usize,
    tol: &ToleranceConfig,
    cap: usize,
) -> Result<BoundaryRun, GeodesicError> {
    if depth < 2 {
        return Err(GeodesicError::DepthTooSmall(depth));
    }
    if t.n_walls() < depth + 1 || (1..=depth).any(|w| !t.is_interior(w)) {
        return Err(GeodesicError::TooShallow { walls: t.n_walls(), depth, needed: depth + 1 });
    }
    t.check(tol)?;
    let eps = tol.eps_angle;
    let mut branches = alloc::vec![Branch {
        frontier: Frontier::start(),
        window: AngleInterval::new(0.0, core::f64::consts::PI),
        choices: Vec::new(),
    }];
    let mut profile = Vec::with_capacity(depth);
    let mut his = Vec::with_capacity(depth);
    for wall in 1..=depth {
        let s = t.strips[wall - 1];
        let alpha = t.alpha(wall);
        let mut next = Vec::new();
        for b in &branches {
            let (a0, w0) = halfplane_arc(b.frontier.normal);
            let Some(w) = b.window.intersect_arc(a0, w0, eps) else { continue };
            for c in WallChoice::ALL {
                let st = b.frontier.step(s.width, s.eps, alpha, c);
                let (a1, w1) = halfline_arc(basepoint, st.origin, st.entry_half);
                let Some(w) = w.intersect_arc(a1, w1, eps) else { continue };
                let (a2, w2) = halfline_arc(basepoint, st.origin, st.exit_half);
                let Some(w) = w.intersect_arc(a2, w2, eps) else { continue };
                let mut choices = b.choices.clone();
                choices.push(c);
                next.push(Branch { frontier: st.next, window: w, choices });
            }
        }
        if next.len() > cap {
            return Err(GeodesicError::BranchOverflow { cap, wall });
        }
        branches = next;
        let windows: Vec<AngleInterval> = branches.iter().map(|b| b.window).collect();
        let hi = union_width(&windows);
        his.push(hi);
        let stable = profile.last().is_some_and(|p: &BoundaryEstimate| p.surviving_branches == branches.len());
        let prev_lo = profile.last().map_or(0.0, |p: &BoundaryEstimate| p.theta_lo);
        let lo = extrapolated_lo(&his, prev_lo, stable);
        profile.push(BoundaryEstimate { theta_lo: lo, theta_hi: hi, depth: wall, surviving_branches: branches.len() });
    }
    let intervals =
        branches.iter().map(|b| DirectionInterval { lo: b.window.lo, hi: b.window.hi, wall_depth: depth }).collect();
    let choices = branches.into_iter().map(|b| b.choices).collect();
    Ok(BoundaryRun { profile, intervals, choices })
}

pub fn boundary_interval(
    t: &TemplateData,
    basepoint: PlanarPoint,
    depth: usize,
    tol: &ToleranceConfig,
) -> Result<BoundaryEstimate, GeodesicError> {
    Ok(boundary_run(t, basepoint, depth, tol, DEFAULT_BRANCH_CAP)?.last())
}
