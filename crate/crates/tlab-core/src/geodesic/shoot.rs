use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::develop::{Frontier, SignSequence, WallChoice};
use crate::planar::{intersect_ray_line, OrientedLine, PlanarPoint, ToleranceConfig};
use crate::template::TemplateData;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallCrossing {
    pub wall: usize,
    pub entry: PlanarPoint,
    pub t_entry: f64,
    /// Absent on the last wall reached.
    pub exit: Option<PlanarPoint>,
    pub t_exit: Option<f64>,
    /// Half of ℓ⁻ the ray crossed.
    pub pass: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingTrace {
    pub basepoint: PlanarPoint,
    pub direction: f64,
    pub crossings: Vec<WallCrossing>,
    pub signs: SignSequence,
    /// Developed origins o₁, o₂, ... of the walls crossed.
    pub origins: Vec<PlanarPoint>,
}

impl CrossingTrace {
    pub fn dir(&self) -> PlanarPoint {
        PlanarPoint::unit(self.direction)
    }

    pub fn point_at(&self, t: f64) -> PlanarPoint {
        self.basepoint + self.dir() * t
    }

    /// Furthest ray parameter known to lie inside the traced chain.
    pub fn reach(&self) -> f64 {
        self.crossings.last().map(|c| c.t_exit.unwrap_or(c.t_entry)).unwrap_or(0.0)
    }

    pub fn walls(&self) -> usize {
        self.crossings.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShootFailureReason {
    Parallel,
    Backward,
    BandNotCrossed,
    OrderViolated,
    /// Passes through an origin within tolerance: a branch point, reported not perturbed.
    OriginHit,
    ExitMissed,
    TooFewSigns,
    TemplateTooShort,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShootFailure {
    pub wall: usize,
    pub reason: ShootFailureReason,
}

impl fmt::Display for ShootFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ray fails at wall {}: {:?}", self.wall, self.reason)
    }
}

/// Crossing bookkeeping shared by explicit and searched shooting.
#[derive(Clone, Copy)]
struct RayState {
    frontier: Frontier,
    t: f64,
}

fn enter_wall(
    t: &TemplateData,
    p: PlanarPoint,
    dir: PlanarPoint,
    st: &RayState,
    wall: usize,
    tol: &ToleranceConfig,
) -> Result<(PlanarPoint, f64, PlanarPoint, i8), ShootFailure> {
    let fail = |reason| ShootFailure { wall, reason };
    let s = t.strips.get(wall - 1).ok_or(fail(ShootFailureReason::TemplateTooShort))?;
    let f = &st.frontier;
    if dir.dot(f.normal) <= tol.eps_angle {
        return Err(fail(ShootFailureReason::BandNotCrossed));
    }
    let o = f.cross_strip(s.width, s.eps);
    let line = OrientedLine { anchor: o, direction: f.dir };
    let (te, e) = intersect_ray_line(p, dir, &line, tol).ok_or(fail(ShootFailureReason::Backward))?;
    if te + tol.eps_length < st.t {
        return Err(fail(ShootFailureReason::OrderViolated));
    }
    if e.dist(o) <= tol.eps_length {
        return Err(fail(ShootFailureReason::OriginHit));
    }
    let pass = if (e - o).dot(f.dir) > 0.0 { 1 } else { -1 };
    Ok((e, te, o, pass))
}

fn exit_wall(
    t: &TemplateData,
    p: PlanarPoint,
    dir: PlanarPoint,
    st: &RayState,
    wall: usize,
    sign: i8,
    pass: i8,
    te: f64,
    tol: &ToleranceConfig,
) -> Result<(PlanarPoint, f64, Frontier), ShootFailure> {
    let fail = |reason| ShootFailure { wall, reason };
    let s = t.strips[wall - 1];
    let step = st.frontier.step(s.width, s.eps, t.alpha(wall), WallChoice { sign, pass });
    let line = OrientedLine { anchor: step.origin, direction: step.next.dir };
    let (tx, x) = match intersect_ray_line(p, dir, &line, tol) {
        Some(v) => v,
        None => {
            let parallel = crate::fm::abs(dir.cross(line.direction)) <= tol.eps_angle;
            let reason = if parallel { ShootFailureReason::Parallel } else { ShootFailureReason::ExitMissed };
            return Err(fail(reason));
        }
    };
    if tx <= te + tol.eps_length {
        return Err(fail(ShootFailureReason::ExitMissed));
    }
    if x.dist(step.origin) <= tol.eps_length {
        return Err(fail(ShootFailureReason::OriginHit));
    }
    if (x - step.origin).dot(step.exit_half) <= 0.0 {
        return Err(fail(ShootFailureReason::ExitMissed));
    }
    Ok((x, tx, step.next))
}

/// Shoot a ray from `basepoint` (wall 0 frame) at angle `direction` through the
/// development fixed by `signs`, entering walls 1..=max_walls.
pub fn shoot(
    t: &TemplateData,
    basepoint: PlanarPoint,
    direction: f64,
    signs: &SignSequence,
    max_walls: usize,
    tol: &ToleranceConfig,
) -> Result<CrossingTrace, ShootFailure> {
    let dir = PlanarPoint::unit(direction);
    let last = max_walls.min(t.n_walls().saturating_sub(1));
    if max_walls > last {
        return Err(ShootFailure { wall: last + 1, reason: ShootFailureReason::TemplateTooShort });
    }
    let mut st = RayState { frontier: Frontier::start(), t: 0.0 };
    let mut trace = CrossingTrace {
        basepoint,
        direction,
        crossings: Vec::new(),
        signs: SignSequence::default(),
        origins: Vec::new(),
    };
    for wall in 1..=last {
        let (e, te, o, pass) = enter_wall(t, basepoint, dir, &st, wall, tol)?;
        trace.origins.push(o);
        let mut c = WallCrossing { wall, entry: e, t_entry: te, exit: None, t_exit: None, pass };
        if wall < last {
            if !t.is_interior(wall) {
                return Err(ShootFailure { wall, reason: ShootFailureReason::TemplateTooShort });
            }
            let sign =
                *signs.signs.get(wall - 1).ok_or(ShootFailure { wall, reason: ShootFailureReason::TooFewSigns })?;
            let (x, tx, next) = exit_wall(t, basepoint, dir, &st, wall, sign, pass, te, tol)?;
            c.exit = Some(x);
            c.t_exit = Some(tx);
            trace.signs.signs.push(sign);
            st = RayState { frontier: next, t: tx };
        }
        trace.crossings.push(c);
    }
    Ok(trace)
}

/// Shoot while searching the rotation signs (depth first, +1 before −1).
pub fn shoot_auto(
    t: &TemplateData,
    basepoint: PlanarPoint,
    direction: f64,
    max_walls: usize,
    tol: &ToleranceConfig,
) -> Result<CrossingTrace, ShootFailure> {
    let dir = PlanarPoint::unit(direction);
    let last = max_walls.min(t.n_walls().saturating_sub(1));
    if max_walls > last {
        return Err(ShootFailure { wall: last + 1, reason: ShootFailureReason::TemplateTooShort });
    }
    let mut best_fail = ShootFailure { wall: 1, reason: ShootFailureReason::BandNotCrossed };
    let mut budget = 1usize << 16;
    let mut signs = Vec::new();
    let ok = search(
        t,
        basepoint,
        dir,
        RayState { frontier: Frontier::start(), t: 0.0 },
        1,
        last,
        tol,
        &mut signs,
        &mut best_fail,
        &mut budget,
    );
    if ok {
        shoot(t, basepoint, direction, &SignSequence { signs }, max_walls, tol)
    } else {
        Err(best_fail)
    }
}

#[allow(clippy::too_many_arguments)]
fn search(
    t: &TemplateData,
    p: PlanarPoint,
    dir: PlanarPoint,
    st: RayState,
    wall: usize,
    last: usize,
    tol: &ToleranceConfig,
    signs: &mut Vec<i8>,
    best: &mut ShootFailure,
    budget: &mut usize,
) -> bool {
    if wall > last {
        return true;
    }
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let (_, te, _, pass) = match enter_wall(t, p, dir, &st, wall, tol) {
        Ok(v) => v,
        Err(f) => {
            if f.wall >= best.wall {
                *best = f;
            }
            return false;
        }
    };
    if wall == last {
        return true;
    }
    if !t.is_interior(wall) {
        *best = ShootFailure { wall, reason: ShootFailureReason::TemplateTooShort };
        return false;
    }
    for sign in [1i8, -1] {
        match exit_wall(t, p, dir, &st, wall, sign, pass, te, tol) {
            Ok((_, tx, next)) => {
                signs.push(sign);
                if search(t, p, dir, RayState { frontier: next, t: tx }, wall + 1, last, tol, signs, best, budget) {
                    return true;
                }
                signs.pop();
            }
            Err(f) => {
                if f.wall >= best.wall {
                    *best = f;
                }
            }
        }
    }
    false
}
