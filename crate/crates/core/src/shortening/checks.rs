//! Executable forms of the inequalities behind Ψ.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;

use super::random::{random_lambda_curve, CurveRng};
use super::{psi, PsiReport};
use crate::curve::DiscreteCurve;
use crate::error::{Error, Result};
use crate::manifold::{geodesic_bvp, Surface, SurfacePoint};
use crate::math::Vec3;

/// Consecutive rejections tolerated by [`property4_scan`].
const MAX_REJECTIONS: usize = 100;

/// Both sides of the segment-shortening inequality on one interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaScGap {
    /// `dist²(σ1, σ2)` in W^{1,2} over the interval.
    pub dist_sq: f64,
    /// `C·(E(σ1) − E(σ2))` with `C = 2(1 + 4/L²)`.
    pub bound: f64,
}

impl LemmaScGap {
    pub fn holds(&self, slack: f64) -> bool {
        self.dist_sq <= self.bound + slack
    }
}

/// Compares a path with the minimizing geodesic between its endpoints.
///
/// `sigma1` holds `m + 1` samples over a parameter interval of length
/// `interval`; integrals use exact piecewise-linear quadrature.
pub fn lemma_sc_gap(surface: &Surface, sigma1: &[Vec3], interval: f64, l: usize) -> Result<LemmaScGap> {
    if sigma1.len() < 2 {
        return Err(Error::InvalidSpec("path needs at least two samples".into()));
    }
    let m = sigma1.len() - 1;
    if interval <= 0.0 || interval > TAU / l as f64 * (1.0 + 1e-12) {
        return Err(Error::PreconditionViolated(format!(
            "interval {interval} exceeds 2π/L for L = {l}"
        )));
    }
    let h = interval / m as f64;
    let speed = sigma1.windows(2).map(|w| w[0].dist(w[1]) / h).fold(0.0, f64::max);
    if speed > l as f64 * (1.0 + 1e-9) {
        return Err(Error::LipschitzExceeded { speed, bound: l as f64 });
    }
    let sigma2 = geodesic_bvp(surface, SurfacePoint(sigma1[0]), SurfacePoint(sigma1[m]), m)?.samples;
    let mut dist_sq = 0.0;
    let mut e1 = 0.0;
    let mut e2 = 0.0;
    for i in 0..m {
        let fa = sigma1[i] - sigma2[i];
        let fb = sigma1[i + 1] - sigma2[i + 1];
        dist_sq += h * (fa.norm_sq() + fa.dot(fb) + fb.norm_sq()) / 3.0 + (fb - fa).norm_sq() / h;
        e1 += (sigma1[i + 1] - sigma1[i]).norm_sq() / h;
        e2 += (sigma2[i + 1] - sigma2[i]).norm_sq() / h;
    }
    let c = 2.0 * (1.0 + 4.0 / (l * l) as f64);
    Ok(LemmaScGap { dist_sq, bound: c * (e1 - e2) })
}

/// `(|(x − y)^⊥|, |x − y|²)` with the normal taken at `y`.
pub fn lemma_norm_gap(surface: &Surface, x: SurfacePoint, y: SurfacePoint) -> (f64, f64) {
    let d = x.0 - y.0;
    (d.dot(surface.normal(y.0)).abs(), d.norm_sq())
}

/// Largest tangential component of the second difference quotient over the
/// samples of a constant-speed curve.
pub fn discrete_geodesic_residual(surface: &Surface, curve: &DiscreteCurve) -> f64 {
    let n = curve.len();
    let h = curve.step();
    let mut worst = 0.0f64;
    for i in 0..n {
        let x = curve.sample(i);
        let acc = (curve.sample(i + 1) - x * 2.0 + curve.sample(i + n - 1)) / (h * h);
        let nu = surface.normal(x);
        worst = worst.max((acc - nu * acc.dot(nu)).norm());
    }
    worst
}

/// Explicit bound on `‖γ − Ψγ‖²_{W^{1,2}}` in terms of the relative drop
/// `r = (Len²(γ) − Len²(Ψγ))/Len²(Ψγ)`.
///
/// The even replacement moves the curve by at most `b1 = (C/2π)·r·Len²(Ψγ)`
/// in squared distance, each reparametrization by at most
/// `b2 = 5(2L²τ + L⁴τ/32 + 16L³√(πτ))` with `τ = 2πr`, and the odd step is
/// bounded like the even one.
pub fn property3_bound(drop_ratio: f64, length_after: f64, l: usize) -> f64 {
    let r = drop_ratio.max(0.0);
    let l = l as f64;
    let c = 2.0 * (1.0 + 4.0 / (l * l));
    let b1 = c / TAU * r * length_after * length_after;
    let tau = TAU * r;
    let b2 = 5.0 * (2.0 * l * l * tau + l.powi(4) * tau / 32.0 + 16.0 * l.powi(3) * (PI * tau).sqrt());
    let d = 2.0 * b1.sqrt() + 2.0 * b2.sqrt();
    d * d
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Property3Row {
    pub drop_ratio: f64,
    pub moved_sq: f64,
    pub length_after: f64,
    pub bound: f64,
}

/// `(drop_ratio, moved²)` pairs sorted by drop ratio.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Property3Table {
    pub l: usize,
    pub rows: Vec<Property3Row>,
}

impl Property3Table {
    /// Every row within its bound.
    pub fn bound_respected(&self) -> bool {
        self.rows.iter().all(|r| r.moved_sq <= r.bound)
    }

    /// Largest `moved²` among the lowest-drop decile (at least one row).
    pub fn lowest_decile_max(&self) -> f64 {
        let k = (self.rows.len() / 10).max(1).min(self.rows.len());
        self.rows[..k].iter().map(|r| r.moved_sq).fold(0.0, f64::max)
    }

    /// The lowest decile stays below the bound evaluated at that decile's
    /// largest drop ratio.
    pub fn decile_controlled(&self) -> bool {
        if self.rows.is_empty() {
            return true;
        }
        let k = (self.rows.len() / 10).max(1).min(self.rows.len());
        let top = self.rows[..k].iter().map(|r| r.drop_ratio).fold(0.0, f64::max);
        let len = self.rows[..k].iter().map(|r| r.length_after).fold(0.0, f64::max);
        self.lowest_decile_max() <= property3_bound(top, len, self.l)
    }
}

/// Applies Ψ to every curve and tabulates moved² against the drop ratio.
pub fn property3_scan(surface: &Surface, curves: &[DiscreteCurve]) -> Result<Property3Table> {
    let mut rows = Vec::with_capacity(curves.len());
    let l = curves.first().map_or(0, |c| c.l());
    for c in curves {
        if c.is_point(surface.collapse_length()) {
            return Err(Error::PreconditionViolated("constant curve has no drop ratio".into()));
        }
        let (_, rep): (_, PsiReport) = psi(surface, c)?;
        rows.push(Property3Row {
            drop_ratio: rep.drop_ratio,
            moved_sq: rep.moved * rep.moved,
            length_after: rep.length_after,
            bound: property3_bound(rep.drop_ratio, rep.length_after, c.l()),
        });
    }
    rows.sort_by(|a, b| a.drop_ratio.total_cmp(&b.drop_ratio));
    Ok(Property3Table { l, rows })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Property4Result {
    /// Smallest observed `Length(γ) − Length(Ψγ)` over accepted curves.
    pub min_decrease: f64,
    pub accepted: usize,
    pub rejected: usize,
}

/// Samples random Λ-curves whose geodesic residual is at least `epsilon`
/// and records the smallest length decrease under Ψ.
pub fn property4_scan(
    surface: &Surface,
    epsilon: f64,
    samples: usize,
    seed: u64,
    l: usize,
    m: usize,
) -> Result<Property4Result> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidSpec("epsilon must be positive".into()));
    }
    let mut rng = CurveRng::seed_from_u64(seed);
    let mut out = Property4Result { min_decrease: f64::INFINITY, accepted: 0, rejected: 0 };
    let mut streak = 0;
    while out.accepted < samples {
        let curve = random_lambda_curve(surface, &mut rng, l, m)?;
        let (_, rep) = psi(surface, &curve)?;
        if rep.moved < epsilon {
            out.rejected += 1;
            streak += 1;
            if streak >= MAX_REJECTIONS {
                return Err(Error::SamplingExhausted { attempts: streak });
            }
            continue;
        }
        streak = 0;
        out.accepted += 1;
        out.min_decrease = out.min_decrease.min(rep.length_before - rep.length_after);
    }
    Ok(out)
}
