//! Planar primitives: points, oriented lines, rigid motions, angle arithmetic
//! and the tolerance policy shared by every geometric decision.

use core::f64::consts::{PI, TAU};
use core::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::fm;

/// A point (or vector) in the development plane.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const ORIGIN: PlanarPoint = PlanarPoint { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at angle `a`.
    #[inline]
    pub fn unit(a: f64) -> Self {
        Self::new(fm::cos(a), fm::sin(a))
    }

    #[inline]
    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product; positive when `o` is to the left of `self`.
    #[inline]
    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        fm::hypot(self.x, self.y)
    }

    #[inline]
    pub fn dist(self, o: Self) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn angle(self) -> f64 {
        fm::atan2(self.y, self.x)
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    #[inline]
    pub fn rotate(self, a: f64) -> Self {
        let (s, c) = (fm::sin(a), fm::cos(a));
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(Self::new(self.x / n, self.y / n))
        } else {
            None
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for PlanarPoint {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for PlanarPoint {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for PlanarPoint {
    type Output = Self;
    #[inline]
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl Neg for PlanarPoint {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Line through `anchor` with unit `direction`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientedLine {
    pub anchor: PlanarPoint,
    pub direction: PlanarPoint,
}

impl OrientedLine {
    /// Normalizes `direction`; `None` for a zero or non-finite direction.
    pub fn new(anchor: PlanarPoint, direction: PlanarPoint) -> Option<Self> {
        Some(Self { anchor, direction: direction.normalized()? })
    }

    pub fn from_angle(anchor: PlanarPoint, angle: f64) -> Self {
        Self { anchor, direction: PlanarPoint::unit(angle) }
    }

    /// Signed distance of `p`, positive on the left.
    #[inline]
    pub fn side(&self, p: PlanarPoint) -> f64 {
        self.direction.cross(p - self.anchor)
    }

    #[inline]
    pub fn point_at(&self, t: f64) -> PlanarPoint {
        self.anchor + self.direction * t
    }

    /// Coordinate of the orthogonal projection of `p` along the line.
    #[inline]
    pub fn coordinate(&self, p: PlanarPoint) -> f64 {
        (p - self.anchor).dot(self.direction)
    }

    pub fn flipped(&self) -> Self {
        Self { anchor: self.anchor, direction: -self.direction }
    }

    pub fn angle(&self) -> f64 {
        self.direction.angle()
    }
}

/// `p ↦ R(angle)·C(p) + translation`, with `C` complex conjugation when `reflect`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidMotion {
    pub angle: f64,
    pub translation: PlanarPoint,
    pub reflect: bool,
}

impl RigidMotion {
    pub const IDENTITY: RigidMotion = RigidMotion { angle: 0.0, translation: PlanarPoint::ORIGIN, reflect: false };

    pub const fn new(angle: f64, translation: PlanarPoint, reflect: bool) -> Self {
        Self { angle, translation, reflect }
    }

    /// The motion sending the standard frame to (`origin`, `e1`, `e2`), where
    /// `e1` is a unit vector and `e2` a unit vector orthogonal to it.
    pub fn from_frame(origin: PlanarPoint, e1: PlanarPoint, e2: PlanarPoint) -> Self {
        Self { angle: e1.angle(), translation: origin, reflect: e1.cross(e2) < 0.0 }
    }

    #[inline]
    pub fn apply_vector(&self, v: PlanarPoint) -> PlanarPoint {
        let v = if self.reflect { PlanarPoint::new(v.x, -v.y) } else { v };
        v.rotate(self.angle)
    }

    #[inline]
    pub fn apply(&self, p: PlanarPoint) -> PlanarPoint {
        self.apply_vector(p) + self.translation
    }

    pub fn apply_line(&self, l: &OrientedLine) -> OrientedLine {
        OrientedLine { anchor: self.apply(l.anchor), direction: self.apply_vector(l.direction) }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &RigidMotion) -> RigidMotion {
        let angle = if self.reflect { self.angle - other.angle } else { self.angle + other.angle };
        RigidMotion {
            angle: normalize_angle(angle),
            translation: self.apply(other.translation),
            reflect: self.reflect != other.reflect,
        }
    }

    pub fn inverse(&self) -> RigidMotion {
        // R C x + t = y  =>  x = C^{-1} R^{-1} (y - t)
        let angle = if self.reflect { self.angle } else { -self.angle };
        let lin = RigidMotion { angle, translation: PlanarPoint::ORIGIN, reflect: self.reflect };
        let t = -lin.apply_vector(self.translation);
        RigidMotion { angle: normalize_angle(angle), translation: t, reflect: self.reflect }
    }

    /// Reflection across `line`.
    pub fn reflection_across(line: &OrientedLine) -> RigidMotion {
        let th = line.angle();
        let lin = RigidMotion { angle: 2.0 * th, translation: PlanarPoint::ORIGIN, reflect: true };
        let t = line.anchor - lin.apply_vector(line.anchor);
        RigidMotion { angle: normalize_angle(2.0 * th), translation: t, reflect: true }
    }
}

/// Tolerance policy. All comparisons against zero go through one of these.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub eps_length: f64,
    pub eps_angle: f64,
    pub boundary_margin: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { eps_length: 1e-9, eps_angle: 1e-12, boundary_margin: 1e-6 }
    }
}

impl ToleranceConfig {
    pub fn is_valid(&self) -> bool {
        [self.eps_length, self.eps_angle, self.boundary_margin].iter().all(|v| v.is_finite() && *v > 0.0)
    }
}

/// Normalize to (−π, π].
pub fn normalize_angle(a: f64) -> f64 {
    let mut r = fm::rem_euclid(a + PI, TAU) - PI;
    if r <= -PI {
        r += TAU;
    }
    r
}

/// Angle rotating `from` onto `to`, in (−π, π]; the antipodal case returns +π.
pub fn signed_angle(from: PlanarPoint, to: PlanarPoint) -> f64 {
    let a = fm::atan2(from.cross(to), from.dot(to));
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Unsigned angle in [0, π].
pub fn unsigned_angle(a: PlanarPoint, b: PlanarPoint) -> f64 {
    fm::abs(signed_angle(a, b))
}

/// Forward intersection of the ray `origin + t·dir` (t ≥ 0) with `line`.
pub fn intersect_ray_line(
    origin: PlanarPoint,
    dir: PlanarPoint,
    line: &OrientedLine,
    tol: &ToleranceConfig,
) -> Option<(f64, PlanarPoint)> {
    let denom = dir.cross(line.direction);
    if fm::abs(denom) <= tol.eps_angle {
        return None;
    }
    let t = (line.anchor - origin).cross(line.direction) / denom;
    if t < -tol.eps_length {
        return None;
    }
    let t = t.max(0.0);
    Some((t, origin + dir * t))
}

/// Distance from `p` to the segment `ab`.
pub fn point_segment_distance(p: PlanarPoint, a: PlanarPoint, b: PlanarPoint) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// A counterclockwise arc of directions `[lo, hi]` (radians, `hi − lo < 2π`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleInterval {
    pub lo: f64,
    pub hi: f64,
}

impl AngleInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Intersection with the arc starting at `start` of sweep `sweep`, taken
    /// modulo 2π; keeps the widest piece. `None` when the overlap is below `eps`.
    pub fn intersect_arc(&self, start: f64, sweep: f64, eps: f64) -> Option<AngleInterval> {
        let mut best: Option<AngleInterval> = None;
        let base = start + TAU * fm::round((self.lo - start) / TAU);
        for k in -2..=2 {
            let s = base + TAU * f64::from(k);
            let lo = self.lo.max(s);
            let hi = self.hi.min(s + sweep);
            if hi - lo > eps && best.is_none_or(|b| hi - lo > b.width()) {
                best = Some(AngleInterval { lo, hi });
            }
        }
        best
    }

    /// Whether direction `a` (any representative) lies in the arc, with slack `eps`.
    pub fn contains(&self, a: f64, eps: f64) -> bool {
        let r = self.lo + fm::rem_euclid(a - self.lo, TAU);
        r <= self.hi + eps || r - TAU >= self.lo - eps
    }
}

/// Arc of directions from `p` whose rays meet the half-line `o + t·u`, t ≥ 0.
/// Returned as (start, sweep) with sweep in [0, π].
pub fn halfline_arc(p: PlanarPoint, o: PlanarPoint, u: PlanarPoint) -> (f64, f64) {
    let a = (o - p).angle();
    let b = u.angle();
    let w = fm::rem_euclid(b - a, TAU);
    if w <= PI {
        (a, w)
    } else {
        (b, TAU - w)
    }
}

/// Directions with positive component along `n`.
pub fn halfplane_arc(n: PlanarPoint) -> (f64, f64) {
    (n.angle() - 0.5 * PI, PI)
}
