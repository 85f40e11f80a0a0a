//! Closed-form triviality decision and exact Tits angle for self-similar templates.

use core::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::develop::{develop_self_similar, QuarterPlaneCase};
use crate::error::SelfSimilarError;
use crate::fm;
use crate::template::SelfSimilarData;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiPair {
    pub psi0: f64,
    pub psi1: f64,
}

impl PsiPair {
    pub fn of(s: &SelfSimilarData) -> Self {
        let (psi0, psi1) = s.psi();
        Self { psi0, psi1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrivialityVerdict {
    pub trivial: bool,
    pub case: Option<QuarterPlaneCase>,
    /// min of the four slacks; ≥ 0 exactly when trivial.
    pub margin: f64,
}

/// The four slacks x+β−y, y−x+β, π−β−x−y, x+y+π−β.
pub fn a_beta_slacks(p: PsiPair, beta: f64) -> [f64; 4] {
    let (x, y) = (p.psi0, p.psi1);
    [x + beta - y, y - x + beta, PI - beta - x - y, x + y + PI - beta]
}

/// Membership in A_β (closed) together with the margin.
pub fn in_a_beta(p: PsiPair, beta: f64) -> Result<(bool, f64), SelfSimilarError> {
    if !(beta > 0.0 && beta < PI) {
        return Err(SelfSimilarError::BadBeta);
    }
    let inside = |v: f64| v.is_finite() && v > -FRAC_PI_2 && v < FRAC_PI_2;
    if !(inside(p.psi0) && inside(p.psi1)) {
        return Err(SelfSimilarError::OutsideSquare);
    }
    let margin = a_beta_slacks(p, beta).into_iter().fold(f64::INFINITY, f64::min);
    Ok((margin >= 0.0, margin))
}

pub fn triviality(s: &SelfSimilarData) -> TrivialityVerdict {
    let p = PsiPair::of(s);
    let beta = s.beta;
    let sl = a_beta_slacks(p, beta);
    let margin = sl.into_iter().fold(f64::INFINITY, f64::min);
    if margin >= 0.0 {
        return TrivialityVerdict { trivial: true, case: None, margin };
    }
    let (x, y) = (p.psi0, p.psi1);
    let case = if x > y + beta {
        QuarterPlaneCase::I
    } else if -y - (PI - beta) > x {
        QuarterPlaneCase::II
    } else if y - beta > x {
        QuarterPlaneCase::III
    } else {
        QuarterPlaneCase::IV
    };
    TrivialityVerdict { trivial: false, case: Some(case), margin }
}

/// 0 for trivial data; otherwise the cone angle between r_even and r_odd.
pub fn exact_tits_angle(s: &SelfSimilarData) -> Result<f64, SelfSimilarError> {
    let v = triviality(s);
    match v.case {
        None => Ok(0.0),
        Some(c) => Ok(develop_self_similar(s, c, 8)?.angle),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseIAngles {
    pub theta0: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub satisfied: bool,
    /// Sum within eps_angle of π; classified by the verdict margin.
    pub boundary: bool,
}

pub fn case_i_angle_condition(s: &SelfSimilarData, eps_angle: f64) -> CaseIAngles {
    let theta0 = FRAC_PI_2 - fm::atan(s.eps0 / s.l0);
    let theta1 = s.beta;
    let theta2 = FRAC_PI_2 - fm::atan(-s.eps1 / s.l1);
    let sum = theta0 + theta1 + theta2;
    let boundary = fm::abs(sum - PI) <= eps_angle;
    let satisfied = if boundary {
        let v = triviality(s);
        !v.trivial && v.case == Some(QuarterPlaneCase::I)
    } else {
        sum < PI
    };
    CaseIAngles { theta0, theta1, theta2, satisfied, boundary }
}

/// (x, y) ↦ (arctan(tan(x)/c), arctan(c·tan(y))).
pub fn halfpi_map(c: f64, p: PsiPair) -> PsiPair {
    PsiPair { psi0: fm::atan(fm::tan(p.psi0) / c), psi1: fm::atan(c * fm::tan(p.psi1)) }
}

/// Whether membership in A_β agrees at `sample` and at its image under `halfpi_map`.
pub fn a_halfpi_symmetry_check_beta(c: f64, sample: PsiPair, beta: f64) -> bool {
    let a = in_a_beta(sample, beta).map(|r| r.0);
    let b = in_a_beta(halfpi_map(c, sample), beta).map(|r| r.0);
    a == b
}

/// The β = π/2 invariance.
pub fn a_halfpi_symmetry_check(c: f64, sample: PsiPair) -> bool {
    a_halfpi_symmetry_check_beta(c, sample, FRAC_PI_2)
}
