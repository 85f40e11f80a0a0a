use super::path::geodesic;
use super::points::TemplatePoint;
use super::shoot::CrossingTrace;
use crate::develop::{Frontier, WallChoice};
use crate::error::GeodesicError;
use crate::fm;
use crate::planar::ToleranceConfig;
use crate::template::TemplateData;

/// Euclidean comparison angle at p for side lengths a = |px|, b = |py|, c = |xy|.
pub fn comparison_angle_from_lengths(a: f64, b: f64, c: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    let cos = (a * a + b * b - c * c) / (2.0 * a * b);
    fm::acos(cos.clamp(-1.0, 1.0))
}

pub fn comparison_angle(
    t: &TemplateData,
    p: TemplatePoint,
    x: TemplatePoint,
    y: TemplatePoint,
    tol: &ToleranceConfig,
) -> Result<f64, GeodesicError> {
    let a = geodesic(t, p, x, tol)?.length;
    let b = geodesic(t, p, y, tol)?.length;
    let c = geodesic(t, x, y, tol)?.length;
    Ok(comparison_angle_from_lengths(a, b, c))
}

/// Template point at ray parameter `s` of a traced ray.
pub fn ray_point(t: &TemplateData, trace: &CrossingTrace, s: f64) -> Result<TemplatePoint, GeodesicError> {
    if s > trace.reach() + 1e-12 || trace.crossings.is_empty() {
        return Err(GeodesicError::HorizonBeyondTrace { horizon: s });
    }
    let q = trace.point_at(s);
    let mut f = Frontier::start();
    if s <= 0.0 || q.y <= 0.0 && s < trace.crossings[0].t_entry {
        return Ok(TemplatePoint::wall(0, q.x, q.y));
    }
    for (k, c) in trace.crossings.iter().enumerate() {
        if s < c.t_entry {
            return Ok(TemplatePoint::from_piece(2 * (c.wall - 1) + 1, f.strip_frame().inverse().apply(q)));
        }
        let st = t.strips[c.wall - 1];
        let sign = trace.signs.signs.get(k).copied().unwrap_or(1);
        let step = f.step(st.width, st.eps, t.alpha(c.wall), WallChoice { sign, pass: c.pass });
        if c.t_exit.is_none_or(|tx| s <= tx) {
            return Ok(TemplatePoint::from_piece(2 * c.wall, step.frame.inverse().apply(q)));
        }
        f = step.next;
    }
    Err(GeodesicError::HorizonBeyondTrace { horizon: s })
}

/// Comparison angle at the common basepoint between the points of two rays at `horizon`.
pub fn tits_angle_estimate(
    t: &TemplateData,
    ray1: &CrossingTrace,
    ray2: &CrossingTrace,
    horizon: f64,
    tol: &ToleranceConfig,
) -> Result<f64, GeodesicError> {
    let p = TemplatePoint::wall(0, ray1.basepoint.x, ray1.basepoint.y);
    let x = ray_point(t, ray1, horizon)?;
    let y = ray_point(t, ray2, horizon)?;
    comparison_angle(t, p, x, y, tol)
}
