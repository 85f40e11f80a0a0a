//! Isometric development of a wall/strip chain into the plane.
//!
//! Conventions: ℓ₀⁺ is the x-axis oriented +x, with the anchor at the
//! origin and band 0 above it. At an interior wall the exit line ℓᵢ⁺ is the
//! entry orientation rotated by `sign·αᵢ` about oᵢ. The next band is placed
//! on the side of ℓᵢ⁺ away from the quarter plane the chain passes through;
//! that quarter plane is bounded by the half of ℓᵢ⁻ selected by `pass`.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DevelopError;
use crate::planar::{OrientedLine, PlanarPoint, RigidMotion, ToleranceConfig};
use crate::template::{SelfSimilarData, TemplateData};

/// Quarter planes of a wall relative to the oriented entry line (x) and the
/// oriented exit line (y); labels run counterclockwise from {x ≥ 0, y ≥ 0}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuarterPlaneCase {
    I,
    II,
    III,
    IV,
}

impl QuarterPlaneCase {
    pub const ALL: [QuarterPlaneCase; 4] =
        [QuarterPlaneCase::I, QuarterPlaneCase::II, QuarterPlaneCase::III, QuarterPlaneCase::IV];

    /// (σx, σy): which half of the entry line and of the exit line bound it.
    pub fn signs(self) -> (i8, i8) {
        match self {
            QuarterPlaneCase::I => (1, 1),
            QuarterPlaneCase::II => (-1, 1),
            QuarterPlaneCase::III => (-1, -1),
            QuarterPlaneCase::IV => (1, -1),
        }
    }

    pub fn from_signs(sx: i8, sy: i8) -> Self {
        match (sx >= 0, sy >= 0) {
            (true, true) => QuarterPlaneCase::I,
            (false, true) => QuarterPlaneCase::II,
            (false, false) => QuarterPlaneCase::III,
            (true, false) => QuarterPlaneCase::IV,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            QuarterPlaneCase::I => "I",
            QuarterPlaneCase::II => "II",
            QuarterPlaneCase::III => "III",
            QuarterPlaneCase::IV => "IV",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.name() == s)
    }

    /// Quarter labels used at (even, odd) walls of the self-similar
    /// development attached to a nontrivial case.
    pub fn self_similar_pattern(self) -> (QuarterPlaneCase, QuarterPlaneCase) {
        use QuarterPlaneCase::*;
        match self {
            I => (I, III),
            II => (IV, IV),
            III => (III, I),
            IV => (II, II),
        }
    }
}

impl fmt::Display for QuarterPlaneCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One rotation sign per interior wall.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SignSequence {
    pub signs: Vec<i8>,
}

impl SignSequence {
    pub fn new(signs: Vec<i8>) -> Self {
        Self { signs: signs.into_iter().map(|s| if s >= 0 { 1 } else { -1 }).collect() }
    }

    pub fn all_positive(n: usize) -> Self {
        Self { signs: alloc::vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }
}

/// Full choice at an interior wall: rotation sign and the half of ℓ⁻ crossed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WallChoice {
    pub sign: i8,
    pub pass: i8,
}

impl WallChoice {
    pub const ALL: [WallChoice; 4] = [
        WallChoice { sign: 1, pass: 1 },
        WallChoice { sign: 1, pass: -1 },
        WallChoice { sign: -1, pass: 1 },
        WallChoice { sign: -1, pass: -1 },
    ];
}

/// Developed exit line, origin and band normal after leaving a wall.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frontier {
    pub origin: PlanarPoint,
    pub dir: PlanarPoint,
    pub normal: PlanarPoint,
}

/// Result of developing one interior wall from a frontier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WallStep {
    pub origin: PlanarPoint,
    /// Entry direction (orientation of ℓ⁻).
    pub entry_dir: PlanarPoint,
    /// Bounding half of ℓ⁻.
    pub entry_half: PlanarPoint,
    /// Bounding half of ℓ⁺.
    pub exit_half: PlanarPoint,
    pub quarter: QuarterPlaneCase,
    /// Intrinsic wall frame → plane.
    pub frame: RigidMotion,
    pub next: Frontier,
}

impl Frontier {
    pub fn start() -> Self {
        Self { origin: PlanarPoint::ORIGIN, dir: PlanarPoint::new(1.0, 0.0), normal: PlanarPoint::new(0.0, 1.0) }
    }

    /// +1 when the band normal is the left normal of the line direction.
    pub fn handedness(&self) -> i8 {
        if self.dir.cross(self.normal) >= 0.0 {
            1
        } else {
            -1
        }
    }

    /// Origin of the next wall after crossing a strip of `width` and displacement `eps`.
    pub fn cross_strip(&self, width: f64, eps: f64) -> PlanarPoint {
        self.origin + self.dir * eps + self.normal * width
    }

    /// Intrinsic strip frame (u along the strip, v across it) → plane.
    pub fn strip_frame(&self) -> RigidMotion {
        RigidMotion::from_frame(self.origin, self.dir, self.normal)
    }

    /// Develop the wall reached across the strip (`width`, `eps`) with angle `alpha`.
    pub fn step(&self, width: f64, eps: f64, alpha: f64, choice: WallChoice) -> WallStep {
        let o = self.cross_strip(width, eps);
        let d = self.dir;
        let s = f64::from(choice.sign);
        let d2 = d.rotate(s * alpha);
        let u = if d2.dot(self.normal) > 0.0 { d2 } else { -d2 };
        let hm = d * f64::from(choice.pass);
        let mut n2 = d2.perp();
        if n2.dot(hm + u) > 0.0 {
            n2 = -n2;
        }
        let sy = if u.dot(d2) > 0.0 { 1 } else { -1 };
        WallStep {
            origin: o,
            entry_dir: d,
            entry_half: hm,
            exit_half: u,
            quarter: QuarterPlaneCase::from_signs(choice.pass, sy),
            frame: RigidMotion::from_frame(o, d, d.perp() * s),
            next: Frontier { origin: o, dir: d2, normal: n2 },
        }
    }

    /// The choice realizing quarter label `q` from this frontier.
    pub fn choice_for(&self, q: QuarterPlaneCase) -> WallChoice {
        let (sx, sy) = q.signs();
        WallChoice { sign: sy * self.handedness(), pass: sx }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DevelopedWall {
    pub index: usize,
    pub entry: Option<OrientedLine>,
    pub exit: Option<OrientedLine>,
    /// oᵢ; the anchor for wall 0 and the reference point of a final boundary wall.
    pub origin: PlanarPoint,
    pub quarter: Option<QuarterPlaneCase>,
    pub frame: RigidMotion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DevelopedStrip {
    pub index: usize,
    pub near: OrientedLine,
    pub far: OrientedLine,
    pub normal: PlanarPoint,
    pub width: f64,
    pub frame: RigidMotion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DevelopedChain {
    pub walls: Vec<DevelopedWall>,
    pub strips: Vec<DevelopedStrip>,
}

impl DevelopedChain {
    pub fn origins(&self) -> Vec<PlanarPoint> {
        self.walls.iter().map(|w| w.origin).collect()
    }
}

/// Develop with rotation signs only; every wall is passed on the forward half of ℓ⁻.
pub fn develop_chain(t: &TemplateData, signs: &SignSequence) -> Result<DevelopedChain, DevelopError> {
    let choices: Vec<WallChoice> = signs.signs.iter().map(|&s| WallChoice { sign: s, pass: 1 }).collect();
    develop_with_choices(t, &choices)
}

pub fn develop_with_choices(t: &TemplateData, choices: &[WallChoice]) -> Result<DevelopedChain, DevelopError> {
    t.check(&ToleranceConfig::default())?;
    let expected = t.n_interior();
    if choices.len() != expected {
        return Err(DevelopError::SignCount { expected, got: choices.len() });
    }
    let mut f = Frontier::start();
    let mut walls = Vec::with_capacity(t.n_walls());
    let mut strips = Vec::with_capacity(t.strips.len());
    walls.push(DevelopedWall {
        index: 0,
        entry: None,
        exit: Some(OrientedLine { anchor: f.origin, direction: f.dir }),
        origin: f.origin,
        quarter: None,
        frame: RigidMotion::IDENTITY,
    });
    let mut next_choice = choices.iter();
    for (i, s) in t.strips.iter().enumerate() {
        let o = f.cross_strip(s.width, s.eps);
        strips.push(DevelopedStrip {
            index: i,
            near: OrientedLine { anchor: f.origin, direction: f.dir },
            far: OrientedLine { anchor: o, direction: f.dir },
            normal: f.normal,
            width: s.width,
            frame: f.strip_frame(),
        });
        let w = i + 1;
        let entry = Some(OrientedLine { anchor: o, direction: f.dir });
        if t.is_interior(w) {
            let c = *next_choice.next().ok_or(DevelopError::SignCount { expected, got: choices.len() })?;
            let st = f.step(s.width, s.eps, t.alpha(w), c);
            walls.push(DevelopedWall {
                index: w,
                entry,
                exit: Some(OrientedLine { anchor: o, direction: st.next.dir }),
                origin: o,
                quarter: Some(st.quarter),
                frame: st.frame,
            });
            f = st.next;
        } else {
            walls.push(DevelopedWall {
                index: w,
                entry,
                exit: None,
                origin: o,
                quarter: None,
                frame: RigidMotion::from_frame(o, f.dir, f.normal),
            });
        }
    }
    Ok(DevelopedChain { walls, strips })
}

/// Self-similar development in a quarter-plane case, with the cone vertex at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarDevelopment {
    pub case: QuarterPlaneCase,
    /// D(o₀), D(o₁), ... with the base vertex v at the origin.
    pub origins: Vec<PlanarPoint>,
    /// Base vertex before translation (in the anchor-at-origin development).
    pub vertex: PlanarPoint,
    /// Unit direction of r_even (through even origins).
    pub r_even: PlanarPoint,
    /// Unit direction of r_odd (through odd origins).
    pub r_odd: PlanarPoint,
    /// Unsigned angle between r_even and r_odd.
    pub angle: f64,
}

/// Raw origins (anchor at origin) and the step data of each wall for a case pattern.
fn self_similar_steps(s: &SelfSimilarData, case: QuarterPlaneCase, n: usize) -> Vec<(PlanarPoint, Option<WallStep>)> {
    let (even, odd) = case.self_similar_pattern();
    let mut f = Frontier::start();
    let mut out = Vec::with_capacity(n);
    out.push((f.origin, None));
    for k in 0..n.saturating_sub(1) {
        let (l, e) = s.strip(k);
        let q = if (k + 1) % 2 == 0 { even } else { odd };
        let st = f.step(l, e, s.beta, f.choice_for(q));
        out.push((st.origin, Some(st)));
        f = st.next;
    }
    out
}

pub fn develop_self_similar(
    s: &SelfSimilarData,
    case: QuarterPlaneCase,
    n_origins: usize,
) -> Result<SelfSimilarDevelopment, DevelopError> {
    if n_origins < 4 {
        return Err(DevelopError::TooFewOrigins { min: 4, got: n_origins });
    }
    s.check()?;
    let steps = self_similar_steps(s, case, n_origins);
    let raw: Vec<PlanarPoint> = steps.iter().map(|x| x.0).collect();
    let v = raw[0] * 2.0 - raw[2];
    let v1 = raw[1] * 2.0 - raw[3];
    let scale = raw.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    let defect = v.dist(v1);
    if defect > tol {
        return Err(DevelopError::Inconsistent { defect });
    }
    let origins: Vec<PlanarPoint> = raw.iter().map(|&p| p - v).collect();
    for i in 0..origins.len().saturating_sub(2) {
        let d = origins[i + 2].dist(origins[i] * 2.0);
        if d > 1e-9 * origins[i + 2].norm().max(1.0) * 4.0 {
            return Err(DevelopError::Inconsistent { defect: d });
        }
    }
    // the geodesic between consecutive even origins must run through the developed quarter at o₁
    let st = steps[1].1.as_ref().ok_or(DevelopError::InvalidCase)?;
    if !segment_meets_wedge(raw[0], raw[2], st.origin, st.entry_half, st.exit_half) {
        return Err(DevelopError::InvalidCase);
    }
    let r_even = origins[0].normalized().ok_or(DevelopError::InvalidCase)?;
    let r_odd = origins[1].normalized().ok_or(DevelopError::InvalidCase)?;
    let angle = crate::planar::unsigned_angle(r_even, r_odd);
    Ok(SelfSimilarDevelopment { case, origins, vertex: v, r_even, r_odd, angle })
}

/// Cases whose self-similar development is consistent and valid.
pub fn valid_self_similar_cases(s: &SelfSimilarData) -> Vec<QuarterPlaneCase> {
    QuarterPlaneCase::ALL.into_iter().filter(|&c| develop_self_similar(s, c, 6).is_ok()).collect()
}

/// Whether the closed segment `ab` meets the open convex wedge at `apex`
/// spanned by unit vectors `u1`, `u2` (opening below π).
pub fn segment_meets_wedge(
    a: PlanarPoint,
    b: PlanarPoint,
    apex: PlanarPoint,
    u1: PlanarPoint,
    u2: PlanarPoint,
) -> bool {
    let orient = u1.cross(u2);
    if orient == 0.0 {
        return false;
    }
    // wedge = {p : cross(u1, p−apex)·sgn > 0 and cross(p−apex, u2)·sgn > 0}
    let sg = orient.signum();
    let f1 = |p: PlanarPoint| u1.cross(p - apex) * sg;
    let f2 = |p: PlanarPoint| (p - apex).cross(u2) * sg;
    // both constraints are affine along the segment: clip the parameter range
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    for f in [&f1 as &dyn Fn(PlanarPoint) -> f64, &f2] {
        let fa = f(a);
        let fb = f(b);
        if fa <= 0.0 && fb <= 0.0 {
            return false;
        }
        if fa > 0.0 && fb > 0.0 {
            continue;
        }
        let t = fa / (fa - fb);
        if fa > 0.0 {
            hi = hi.min(t);
        } else {
            lo = lo.max(t);
        }
    }
    hi > lo
}
