//! Recovering β and the affine ratios from a membership oracle for the set
//! of parameters whose self-similar template is trivial.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::RecoveryError;
use crate::fm;
use crate::planar::ToleranceConfig;
use crate::selfsim::{in_a_beta, PsiPair};

/// A predicate on R⁴ with x₁ > 0 and x₃ > 0.
pub trait MembershipOracle {
    fn contains(&self, x: [f64; 4]) -> bool;
}

impl<F: Fn([f64; 4]) -> bool> MembershipOracle for F {
    fn contains(&self, x: [f64; 4]) -> bool {
        self(x)
    }
}

/// Oracle built from hidden parameters: x is a member when
/// (a₁x₁+b₁, a₂x₂+b₂, a₃x₃, a₄x₄) has its arctangent angles in A_β.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticOracle {
    pub beta: f64,
    pub a: [f64; 4],
    pub b: [f64; 2],
}

impl SyntheticOracle {
    pub fn new(beta: f64, a: [f64; 4], b: [f64; 2]) -> Result<Self, RecoveryError> {
        let o = SyntheticOracle { beta, a, b };
        o.check()?;
        Ok(o)
    }

    pub fn check(&self) -> Result<(), RecoveryError> {
        if !(self.beta > 0.0 && self.beta < PI) {
            return Err(RecoveryError::InvalidData("beta must lie in (0, π)"));
        }
        if !self.a.iter().all(|&v| v > 0.0 && v.is_finite()) {
            return Err(RecoveryError::InvalidData("a₁..a₄ must be positive"));
        }
        if !(self.b[0] > 0.0 && self.b[0].is_finite() && self.b[1].is_finite()) {
            return Err(RecoveryError::InvalidData("b₁ must be positive and b₂ finite"));
        }
        Ok(())
    }

    pub fn psi(&self, x: [f64; 4]) -> Option<PsiPair> {
        let den0 = self.a[0] * x[0] + self.b[0];
        let den1 = self.a[2] * x[2];
        if !(den0 > 0.0 && den1 > 0.0) {
            return None;
        }
        Some(PsiPair { psi0: fm::atan((self.a[1] * x[1] + self.b[1]) / den0), psi1: fm::atan(self.a[3] * x[3] / den1) })
    }

    /// (b₁/a₁, b₂/a₂, b₁/a₂, b₂/a₁).
    pub fn ratios(&self) -> [f64; 4] {
        let [a1, a2, _, _] = self.a;
        let [b1, b2] = self.b;
        [b1 / a1, b2 / a2, b1 / a2, b2 / a1]
    }
}

impl MembershipOracle for SyntheticOracle {
    fn contains(&self, x: [f64; 4]) -> bool {
        if !(x[0] > 0.0 && x[2] > 0.0) {
            return false;
        }
        match self.psi(x) {
            Some(p) => in_a_beta(p, self.beta).map(|(inside, _)| inside).unwrap_or(false),
            None => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveredData {
    pub beta_hat: f64,
    /// b₁/a₁.
    pub r1: f64,
    /// b₂/a₂.
    pub r2: f64,
    /// (b₁/a₂, b₂/a₁), only when β ≠ π/2.
    pub cross: Option<(f64, f64)>,
    /// Fraction of validation points where the oracle and the reconstruction disagree.
    pub residual: f64,
    pub probes: usize,
    /// Slices skipped because their ψ₀ sign could not be told apart.
    pub ambiguous_slices: usize,
}

const ITERATIONS: usize = 60;
const REACH: f64 = 1e15;
/// tan ψ₀ values aimed at by the slices.
const TARGETS: [f64; 11] = [0.02, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 2.0, 4.0, 8.0];

struct Prober<'a, O: MembershipOracle + ?Sized> {
    oracle: &'a O,
    calls: usize,
    budget: usize,
}

type Line<'l> = &'l dyn Fn(f64) -> [f64; 4];

impl<O: MembershipOracle + ?Sized> Prober<'_, O> {
    fn probe(&mut self, x: [f64; 4]) -> Result<bool, RecoveryError> {
        if self.calls >= self.budget {
            return Err(RecoveryError::BudgetExhausted(self.calls));
        }
        self.calls += 1;
        Ok(self.oracle.contains(x))
    }

    fn on(&mut self, line: Line, t: f64) -> Result<bool, RecoveryError> {
        self.probe(line(t))
    }

    /// Boundary between a member `inside` and a non-member `outside`.
    fn bisect(&mut self, line: Line, mut inside: f64, mut outside: f64) -> Result<f64, RecoveryError> {
        for _ in 0..ITERATIONS {
            let m = 0.5 * (inside + outside);
            if m == inside || m == outside {
                break;
            }
            if self.on(line, m)? {
                inside = m;
            } else {
                outside = m;
            }
        }
        Ok(0.5 * (inside + outside))
    }

    /// End of the member interval through `m` in direction `dir`; infinite if not found.
    fn edge(&mut self, line: Line, m: f64, dir: f64, step: f64) -> Result<f64, RecoveryError> {
        let mut d = step.max(1e-300);
        let mut last = m;
        let limit = REACH * (1.0 + fm::abs(m));
        while d <= limit {
            let t = m + dir * d;
            if self.on(line, t)? {
                last = t;
                d *= 2.0;
            } else {
                return self.bisect(line, last, t);
            }
        }
        Ok(dir * f64::INFINITY)
    }

    fn interval(&mut self, line: Line, seed: f64, step: f64) -> Result<(f64, f64), RecoveryError> {
        let lo = self.edge(line, seed, -1.0, step)?;
        let hi = self.edge(line, seed, 1.0, step)?;
        Ok((lo, hi))
    }

    /// A member near `center`, scanning offsets ±scale·10^(k/32).
    fn find_member(&mut self, line: Line, center: f64, scale: f64, span: i32) -> Result<Option<f64>, RecoveryError> {
        if self.on(line, center)? {
            return Ok(Some(center));
        }
        for k in -span..=span {
            let d = scale * fm::pow10(f64::from(k) / 32.0);
            for t in [center + d, center - d] {
                if self.on(line, t)? {
                    return Ok(Some(t));
                }
            }
        }
        Ok(None)
    }

    /// Member interval of `line(s, ·)` followed along s = 1.2^j up to `s_max`;
    /// returns the intervals at s = 10³, 10⁴, ... up to `s_max`.
    fn follow(
        &mut self,
        line: &dyn Fn(f64, f64) -> [f64; 4],
        s_max: f64,
    ) -> Result<Vec<(f64, f64, f64)>, RecoveryError> {
        let at = |s: f64| move |t: f64| line(s, t);
        let first = at(1.0);
        let seed = self.find_member(&first, 0.0, 1.0, 384)?.ok_or(RecoveryError::Degenerate("no-member oracle"))?;
        let (mut lo, mut hi) = self.interval(&first, seed, 1e-3 * (1.0 + fm::abs(seed)))?;
        let mut out = Vec::new();
        let mut s = 1.0f64;
        let mut mark = 1e3;
        while mark <= s_max {
            s = (s * 1.2).min(mark);
            let l = at(s);
            let width = if (hi - lo).is_finite() { hi - lo } else { 1.0 + fm::abs(lo).min(fm::abs(hi)) };
            let mid = if lo.is_finite() && hi.is_finite() {
                0.5 * (lo + hi)
            } else if lo.is_finite() {
                lo + width
            } else {
                hi - width
            };
            // the interval can move by much more than its width; scan out from each old end too
            let mut seed = None;
            for c in [mid, lo, hi] {
                if c.is_finite() {
                    seed = self.find_member(&l, c, width, 192)?;
                    if seed.is_some() {
                        break;
                    }
                }
            }
            let seed = seed.ok_or(RecoveryError::Inconsistent(f64::NAN))?;
            (lo, hi) = self.interval(&l, seed, width / 8.0)?;
            if s == mark {
                out.push((s, lo, hi));
                mark *= 10.0;
            }
        }
        Ok(out)
    }

    /// Limit point of the shrinking member interval, with agreement across
    /// s = 10³, 10⁴, 10⁵ and escalation up to 10⁸.
    fn limit_point(&mut self, line: &dyn Fn(f64, f64) -> [f64; 4]) -> Result<(f64, (f64, f64)), RecoveryError> {
        let mut s_max = 1e5;
        loop {
            let marks = self.follow(line, s_max)?;
            let (_, lo3, hi3) = marks[0];
            let n = marks.len();
            let m = |i: usize| 0.5 * (marks[i].1 + marks[i].2);
            let finite = marks.iter().all(|&(_, a, b)| a.is_finite() && b.is_finite());
            if finite && fm::abs(m(n - 1) - m(n - 2)) <= 1e-3 * (hi3 - lo3) {
                return Ok((m(n - 1), (lo3, hi3)));
            }
            if s_max >= 1e8 {
                return Err(RecoveryError::Inconsistent(fm::abs(m(n - 1) - m(n - 2))));
            }
            s_max *= 10.0;
        }
    }
}

/// ψ₀ from the ψ₁-interval of a slice, using the shape of A_β.
fn psi0_from_slice(beta: f64, half_pi: bool, y_lo: f64, y_hi: f64) -> f64 {
    let w = y_hi - y_lo;
    let mid = 0.5 * (y_lo + y_hi);
    if half_pi {
        return (PI - w) / 2.0;
    }
    // inside the middle band the midpoint is ±ψ₀ and the width is fixed; outside
    // it the midpoint sits at ±m and the width gives ψ₀. Take whichever moved.
    let s = if beta < FRAC_PI_2 { 1.0 } else { -1.0 };
    let m = fm::abs(FRAC_PI_2 - beta);
    let outer = (PI - w) / 2.0;
    if fm::abs(fm::abs(mid) - m) >= fm::abs(outer - m) {
        s * mid
    } else {
        s * mid.signum() * outer
    }
}

/// Least squares for (r₁, ρ, q) in x₁·T = −r₁·T + ρ·x₂ + q.
fn fit(rows: &[(f64, f64, f64)]) -> Option<(f64, f64, f64)> {
    // columns scaled to unit norm before forming the normal equations
    let col = |j: usize, r: &(f64, f64, f64)| match j {
        0 => -r.2,
        1 => r.1,
        _ => 1.0,
    };
    let mut scale = [0.0; 3];
    for r in rows {
        for (j, s) in scale.iter_mut().enumerate() {
            *s += col(j, r) * col(j, r);
        }
    }
    let scale = scale.map(fm::sqrt);
    if scale.contains(&0.0) {
        return None;
    }
    let mut m = [[0.0; 4]; 3];
    for r in rows {
        let rhs = r.0 * r.2;
        for i in 0..3 {
            let ci = col(i, r) / scale[i];
            for j in 0..3 {
                m[i][j] += ci * col(j, r) / scale[j];
            }
            m[i][3] += ci * rhs;
        }
    }
    for c in 0..3 {
        let p = (c..3).max_by(|&a, &b| fm::abs(m[a][c]).total_cmp(&fm::abs(m[b][c])))?;
        m.swap(c, p);
        if fm::abs(m[c][c]) < 1e-300 {
            return None;
        }
        for r in 0..3 {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..4 {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    let sol = [0, 1, 2].map(|i| m[i][3] / m[i][i] / scale[i]);
    Some((sol[0], sol[1], sol[2]))
}

/// Probe the oracle to recover β, b₁/a₁, b₂/a₂ and, when β ≠ π/2, b₁/a₂ and b₂/a₁.
pub fn recover<O: MembershipOracle + ?Sized>(
    oracle: &O,
    tol: &ToleranceConfig,
    probe_budget: usize,
) -> Result<RecoveredData, RecoveryError> {
    let mut pr = Prober { oracle, calls: 0, budget: probe_budget };

    let spread = [1e-3, 0.1, 1.0, 10.0, 1e3];
    let mut all = true;
    for &u in &spread {
        for &v in &[-1e3, -1.0, 0.0, 1.0, 1e3] {
            all &= pr.probe([u, v, 1.0, v * u])?;
        }
    }
    if all {
        return Err(RecoveryError::Degenerate("all-member oracle"));
    }

    // ψ₁ level π/2 − β: slices at x₂ → ∞
    let (x4_0, (lo3, hi3)) = pr.limit_point(&|s, t| [1.0, s, 1.0, t])?;
    let half_pi = fm::abs(lo3 + hi3) <= 1e-9 * (hi3 - lo3);

    // ψ₀ level π/2 − β (and β − π/2) at x₁ = 1, 2, from slices at x₄ → ±∞
    let mut level = [[0.0; 2]; 2];
    for (k, x1) in [1.0, 2.0].into_iter().enumerate() {
        level[0][k] = pr.limit_point(&move |s, t| [x1, t, 1.0, s])?.0;
        level[1][k] = pr.limit_point(&move |s, t| [x1, t, 1.0, -s])?.0;
    }

    let (beta, kappa) = if half_pi {
        (FRAC_PI_2, 1.0)
    } else {
        // ψ₁ level π/2 − 2β (β < π/2) or 2β − 3π/2 (β > π/2) at the ψ₀ level point
        let x2 = level[0][0];
        let line = move |t: f64| [1.0, x2, 1.0, t];
        let seed = pr.find_member(&line, 0.0, 1.0, 384)?.ok_or(RecoveryError::Inconsistent(f64::NAN))?;
        let x4_1 = pr.edge(&line, seed, -1.0, 1e-3 * (1.0 + fm::abs(seed)))?;
        if !x4_1.is_finite() {
            (FRAC_PI_2, 1.0)
        } else {
            let q = x4_1 / x4_0;
            let beta =
                if x4_0 > 0.0 { fm::atan(fm::sqrt(1.0 - 2.0 * q)) } else { PI - fm::atan(fm::sqrt(1.0 + 2.0 * q)) };
            if !beta.is_finite() {
                return Err(RecoveryError::Inconsistent(q));
            }
            (beta, 1.0 / (fm::tan(beta) * x4_0))
        }
    };
    let is_half_pi = fm::abs(beta - FRAC_PI_2) <= 10.0 * tol.eps_angle;

    // slices over (x₁, x₂) give ψ₀; fit tan ψ₀ = ρ(x₂ + r₂)/(x₁ + r₁)
    let mut rows = Vec::new();
    let mut ambiguous = 0;
    for (k, x1) in [0.5, 1.0, 2.0, 4.0].into_iter().enumerate() {
        let (z0, z1) = match k {
            1 => (level[0][0], level[1][0]),
            2 => (level[0][1], level[1][1]),
            _ => (pr.limit_point(&move |s, t| [x1, t, 1.0, s])?.0, pr.limit_point(&move |s, t| [x1, t, 1.0, -s])?.0),
        };
        // tan ψ₀ is affine in x₂ and equals ±cot β at z0, z1: aim at chosen tan ψ₀ values
        let m = 0.5 * (z0 + z1);
        let cot = 1.0 / fm::tan(beta);
        let aimed = !is_half_pi && fm::abs(z0 - z1) > 1e-9 * (1.0 + fm::abs(z0));
        let scale = 1.0 + fm::abs(z0);
        for j in -4..=6 {
            for sg in [1.0, -1.0] {
                let x2 = if aimed {
                    m + (z0 - m) * sg * TARGETS[(j + 4) as usize] / cot
                } else {
                    z0 + sg * scale * fm::pow10(f64::from(j) / 2.0)
                };
                let line = move |t: f64| [x1, x2, 1.0, t];
                let Some(seed) = pr.find_member(&line, 0.0, 1.0, 384)? else { continue };
                let (lo, hi) = pr.interval(&line, seed, 1e-3 * (1.0 + fm::abs(seed)))?;
                let y = |v: f64| fm::atan(kappa * v);
                let mut x = psi0_from_slice(beta, is_half_pi, y(lo), y(hi));
                if is_half_pi {
                    if x < 0.05 {
                        ambiguous += 1;
                        continue;
                    }
                    x *= sg;
                }
                if fm::abs(x) < 1.45 {
                    rows.push((x1, x2, fm::tan(x)));
                }
            }
        }
    }
    let (r1, rho, q) = fit(&rows).ok_or(RecoveryError::Degenerate("too few informative slices"))?;
    if !(rho > 0.0) {
        return Err(RecoveryError::Inconsistent(rho));
    }
    let r2 = q / rho;

    let cross = if is_half_pi { None } else { Some((r1 / rho, r2 * rho)) };
    let beta_hat = if is_half_pi { FRAC_PI_2 } else { beta };

    // validation against the reconstructed predicate
    let mut checked = 0usize;
    let mut wrong = 0usize;
    for i in 0..256u32 {
        let h = |m: f64| {
            let v = f64::from(i) * m;
            v - fm::floor(v)
        };
        let p0 = (h(0.754_877_666_2) - 0.5) * 3.0;
        let p1 = (h(0.569_840_290_9) - 0.5) * 3.0;
        let x1 = 0.25 + 4.0 * h(0.618_033_988_7);
        let x2 = (x1 + r1) * fm::tan(p0) / rho - r2;
        let x4 = fm::tan(p1) / kappa;
        let x = [x1, x2, 1.0, x4];
        let psi = PsiPair { psi0: fm::atan(rho * (x2 + r2) / (x1 + r1)), psi1: fm::atan(kappa * x4) };
        let Ok((inside, margin)) = in_a_beta(psi, beta_hat) else { continue };
        if fm::abs(margin) < 1e-6 {
            continue;
        }
        checked += 1;
        if pr.probe(x)? != inside {
            wrong += 1;
        }
    }
    let residual = if checked == 0 { 1.0 } else { wrong as f64 / checked as f64 };
    if residual > 1e-2 {
        return Err(RecoveryError::Inconsistent(residual));
    }
    Ok(RecoveredData { beta_hat, r1, r2, cross, residual, probes: pr.calls, ambiguous_slices: ambiguous })
}
