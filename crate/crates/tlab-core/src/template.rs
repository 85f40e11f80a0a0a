//! Template data: walls, strips, displacements; validation, self-similar
//! expansion and scaling.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::TemplateError;
use crate::fm;
use crate::planar::ToleranceConfig;

/// Angle between the two gluing lines of a wall; absent on boundary walls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallSpec {
    pub alpha: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripSpec {
    pub width: f64,
    /// Signed offset of the forward wall's origin above the backward one.
    pub eps: f64,
    #[serde(default)]
    pub degenerate_ok: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateKind {
    Finite,
    Half,
}

/// A chain W_0, S_0, W_1, ..., S_{n-2}, W_{n-1}.
///
/// `anchor` labels the reference point on the first gluing line from which
/// the first displacement is measured. The development places it at the
/// planar origin, so its value does not enter any computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateData {
    pub kind: TemplateKind,
    #[serde(default)]
    pub anchor: f64,
    pub walls: Vec<WallSpec>,
    pub strips: Vec<StripSpec>,
}

/// (β; l₀, ε₀, l₁, ε₁) with widths and displacements doubling every two steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarData {
    pub beta: f64,
    pub l0: f64,
    pub eps0: f64,
    pub l1: f64,
    pub eps1: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Violation {
    TooFewWalls { walls: usize },
    StripCount { walls: usize, strips: usize },
    AlphaMissing { wall: usize },
    AlphaOutOfRange { wall: usize, alpha: f64 },
    AlphaOnBoundary { wall: usize },
    WidthNotPositive { strip: usize, width: f64 },
    NonFinite { strip: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::TooFewWalls { walls } => write!(f, "need at least 2 walls, got {walls}"),
            Violation::StripCount { walls, strips } => {
                write!(f, "{walls} walls need {} strips, got {strips}", walls.saturating_sub(1))
            }
            Violation::AlphaMissing { wall } => write!(f, "alpha missing at wall {wall}"),
            Violation::AlphaOutOfRange { wall, alpha } => {
                write!(f, "alpha out of (0,π) at wall {wall} (alpha = {alpha})")
            }
            Violation::AlphaOnBoundary { wall } => write!(f, "alpha given on boundary wall {wall}"),
            Violation::WidthNotPositive { strip, width } => {
                write!(f, "width not positive at strip {strip} (width = {width})")
            }
            Violation::NonFinite { strip } => write!(f, "non-finite value at strip {strip}"),
        }
    }
}

impl TemplateData {
    pub fn n_walls(&self) -> usize {
        self.walls.len()
    }

    pub fn is_interior(&self, wall: usize) -> bool {
        match self.kind {
            TemplateKind::Half => wall >= 1 && wall < self.walls.len(),
            TemplateKind::Finite => wall >= 1 && wall + 1 < self.walls.len(),
        }
    }

    /// Interior walls, in order.
    pub fn interior_walls(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.walls.len()).filter(|&i| self.is_interior(i))
    }

    pub fn n_interior(&self) -> usize {
        self.interior_walls().count()
    }

    /// Angle of wall `i`; 0 for a wall without one.
    pub fn alpha(&self, i: usize) -> f64 {
        self.walls.get(i).and_then(|w| w.alpha).unwrap_or(0.0)
    }

    /// min over interior walls of min(α, π − α).
    pub fn beta_min(&self) -> f64 {
        self.interior_walls()
            .map(|i| {
                let a = self.alpha(i);
                a.min(PI - a)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self, tol: &ToleranceConfig) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.walls.len();
        if n < 2 {
            out.push(Violation::TooFewWalls { walls: n });
        }
        if self.strips.len() + 1 != n {
            out.push(Violation::StripCount { walls: n, strips: self.strips.len() });
        }
        for (i, w) in self.walls.iter().enumerate() {
            match (self.is_interior(i), w.alpha) {
                (true, None) => out.push(Violation::AlphaMissing { wall: i }),
                (true, Some(a)) => {
                    if !(a.is_finite() && a > tol.eps_angle && a < PI - tol.eps_angle) {
                        out.push(Violation::AlphaOutOfRange { wall: i, alpha: a });
                    }
                }
                (false, Some(_)) => out.push(Violation::AlphaOnBoundary { wall: i }),
                (false, None) => {}
            }
        }
        for (i, s) in self.strips.iter().enumerate() {
            if !(s.width.is_finite() && s.eps.is_finite()) {
                out.push(Violation::NonFinite { strip: i });
                continue;
            }
            let ok = if s.degenerate_ok { s.width >= 0.0 } else { s.width > tol.eps_length };
            if !ok {
                out.push(Violation::WidthNotPositive { strip: i, width: s.width });
            }
        }
        out
    }

    pub fn check(&self, tol: &ToleranceConfig) -> Result<(), TemplateError> {
        match self.validate(tol).first() {
            None => Ok(()),
            Some(v) => Err(TemplateError::Invalid(*v)),
        }
    }

    pub fn scale(&self, c: f64) -> Result<TemplateData, TemplateError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(TemplateError::BadScale(c));
        }
        let mut t = self.clone();
        for s in &mut t.strips {
            s.width *= c;
            s.eps *= c;
        }
        Ok(t)
    }

    /// Keep walls `0..n` (and the strips between them).
    pub fn truncated(&self, n: usize) -> TemplateData {
        let n = n.min(self.walls.len());
        TemplateData {
            kind: self.kind,
            anchor: self.anchor,
            walls: self.walls[..n].to_vec(),
            strips: self.strips[..n.saturating_sub(1)].to_vec(),
        }
    }
}

impl SelfSimilarData {
    pub fn new(beta: f64, l0: f64, eps0: f64, l1: f64, eps1: f64) -> Self {
        Self { beta, l0, eps0, l1, eps1 }
    }

    pub fn check(&self) -> Result<(), TemplateError> {
        let finite = [self.beta, self.l0, self.eps0, self.l1, self.eps1].iter().all(|v| v.is_finite());
        if !finite || !(self.beta > 0.0 && self.beta < PI) || !(self.l0 > 0.0 && self.l1 > 0.0) {
            return Err(TemplateError::BadSelfSimilar);
        }
        Ok(())
    }

    /// Width and displacement of strip `k` of the full template.
    pub fn strip(&self, k: usize) -> (f64, f64) {
        let e = i32::try_from(k / 2).unwrap_or(i32::MAX);
        let (l, eps) = if k.is_multiple_of(2) { (self.l0, self.eps0) } else { (self.l1, self.eps1) };
        (fm::ldexp(l, e), fm::ldexp(eps, e))
    }

    /// (arctan(ε₀/l₀), arctan(ε₁/l₁)).
    pub fn psi(&self) -> (f64, f64) {
        (fm::atan(self.eps0 / self.l0), fm::atan(self.eps1 / self.l1))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { beta: self.beta, l0: self.l0 * c, eps0: self.eps0 * c, l1: self.l1 * c, eps1: self.eps1 * c }
    }
}

/// Half template whose strip i is strip `start_index + i` of the full self-similar template.
pub fn expand_self_similar(
    s: &SelfSimilarData,
    n_walls: usize,
    start_index: usize,
) -> Result<TemplateData, TemplateError> {
    if n_walls < 2 {
        return Err(TemplateError::TooFewWalls(n_walls));
    }
    s.check()?;
    let mut walls = Vec::with_capacity(n_walls);
    walls.push(WallSpec { alpha: None });
    walls.extend((1..n_walls).map(|_| WallSpec { alpha: Some(s.beta) }));
    let strips = (0..n_walls - 1)
        .map(|i| {
            let (width, eps) = s.strip(start_index + i);
            StripSpec { width, eps, degenerate_ok: false }
        })
        .collect();
    Ok(TemplateData { kind: TemplateKind::Half, anchor: 0.0, walls, strips })
}
