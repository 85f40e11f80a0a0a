use serde::{Deserialize, Serialize};

use crate::error::GeodesicError;
use crate::planar::{PlanarPoint, RigidMotion};
use crate::template::TemplateData;

/// A point of a template in intrinsic coordinates.
///
/// Wall i: origin at oᵢ (the anchor on W₀, the reference point on a final
/// boundary wall), x-axis along the oriented Lᵢ⁻ (along L₀⁺ on W₀), and
/// Lᵢ⁺ in direction (cos αᵢ, sin αᵢ).
/// Strip i: (u, v) with 0 ≤ v ≤ lᵢ; (u, 0) is the point u·(cos αᵢ, sin αᵢ)
/// of Wᵢ and (u, lᵢ) is the point (u − εᵢ, 0) of Wᵢ₊₁.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "piece", rename_all = "snake_case")]
pub enum TemplatePoint {
    Wall { wall: usize, x: f64, y: f64 },
    Strip { strip: usize, u: f64, v: f64 },
}

impl TemplatePoint {
    pub fn wall(wall: usize, x: f64, y: f64) -> Self {
        TemplatePoint::Wall { wall, x, y }
    }

    pub fn strip(strip: usize, u: f64, v: f64) -> Self {
        TemplatePoint::Strip { strip, u, v }
    }

    pub fn origin(wall: usize) -> Self {
        TemplatePoint::Wall { wall, x: 0.0, y: 0.0 }
    }

    /// Position in the chain W₀, S₀, W₁, ...: 2i for wall i, 2i+1 for strip i.
    pub fn piece(&self) -> usize {
        match *self {
            TemplatePoint::Wall { wall, .. } => 2 * wall,
            TemplatePoint::Strip { strip, .. } => 2 * strip + 1,
        }
    }

    pub fn coords(&self) -> PlanarPoint {
        match *self {
            TemplatePoint::Wall { x, y, .. } => PlanarPoint::new(x, y),
            TemplatePoint::Strip { u, v, .. } => PlanarPoint::new(u, v),
        }
    }

    pub fn with_coords(&self, p: PlanarPoint) -> Self {
        match *self {
            TemplatePoint::Wall { wall, .. } => TemplatePoint::Wall { wall, x: p.x, y: p.y },
            TemplatePoint::Strip { strip, .. } => TemplatePoint::Strip { strip, u: p.x, v: p.y },
        }
    }

    pub fn from_piece(piece: usize, p: PlanarPoint) -> Self {
        if piece.is_multiple_of(2) {
            TemplatePoint::Wall { wall: piece / 2, x: p.x, y: p.y }
        } else {
            TemplatePoint::Strip { strip: piece / 2, u: p.x, v: p.y }
        }
    }

    pub fn check(&self, t: &TemplateData, eps: f64) -> Result<(), GeodesicError> {
        if !self.coords().is_finite() {
            return Err(GeodesicError::Unlocatable("non-finite coordinates"));
        }
        match *self {
            TemplatePoint::Wall { wall, .. } => {
                if wall >= t.n_walls() {
                    return Err(GeodesicError::Unlocatable("wall index out of range"));
                }
            }
            TemplatePoint::Strip { strip, v, .. } => {
                let s = t.strips.get(strip).ok_or(GeodesicError::Unlocatable("strip index out of range"))?;
                if v < -eps || v > s.width + eps {
                    return Err(GeodesicError::Unlocatable("strip coordinate outside the band"));
                }
            }
        }
        Ok(())
    }
}

/// Wall-0 point at planar position `p` of the standard development.
pub fn locate_basepoint(p: PlanarPoint) -> TemplatePoint {
    TemplatePoint::Wall { wall: 0, x: p.x, y: p.y }
}

/// Unit direction of Lᵢ⁺ in the intrinsic frame of wall i.
pub(crate) fn exit_direction(t: &TemplateData, wall: usize) -> PlanarPoint {
    PlanarPoint::unit(t.alpha(wall))
}

/// Frame of a start wall placing Lₐ⁺ on the x-axis and `x` at or below it.
pub(crate) fn start_wall_frame(t: &TemplateData, wall: usize, x: PlanarPoint) -> RigidMotion {
    let e = exit_direction(t, wall);
    let a = t.alpha(wall);
    if e.cross(x) > 0.0 {
        RigidMotion::new(a, PlanarPoint::ORIGIN, true)
    } else {
        RigidMotion::new(-a, PlanarPoint::ORIGIN, false)
    }
}
