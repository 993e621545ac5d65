//! The Birkhoff shortening map Ψ.
//!
//! Ψ replaces the curve by minimizing geodesics on the even intervals
//! `[x_{2j}, x_{2j+2}]`, then on the odd intervals `[x_{2j+1}, x_{2j+3}]`, and
//! finally reparametrizes to constant speed fixing the image of `x_0`.
//! [`psi_symmetric`] builds the same curve in four steps, reparametrizing
//! after each replacement.

mod checks;
mod random;

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

pub use checks::{
    discrete_geodesic_residual, lemma_norm_gap, lemma_sc_gap, property3_bound, property3_scan,
    property4_scan, LemmaScGap, Property3Row, Property3Table, Property4Result,
};
pub use random::{
    random_lambda_curve, random_lipschitz_path, random_surface_point, CurveRng, LipschitzPath,
};

use crate::curve::{reparametrize_constant_speed, resample_polyline, w12_distance, DiscreteCurve};
use crate::error::{Error, PartialResult, Result};
use crate::manifold::{geodesic_bvp, GeodesicSegment, Surface, SurfacePoint};
use crate::math::Vec3;

/// What one application of Ψ did to a curve.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PsiReport {
    pub length_before: f64,
    pub length_after: f64,
    pub energy_before: f64,
    pub energy_after: f64,
    /// W^{1,2} distance between input and output.
    pub moved: f64,
    /// `(Length²(γ) − Length²(Ψγ)) / Length²(Ψγ)`.
    pub drop_ratio: f64,
}

/// History of [`shorten_to_geodesic`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ShorteningTrace {
    pub iterations: usize,
    pub reports: Vec<PsiReport>,
    pub final_residual: f64,
    pub converged: bool,
    /// The curve fell below the collapse length and was replaced by a point.
    pub collapsed: bool,
}

impl ShorteningTrace {
    /// Checks that lengths never increased by more than `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.reports.iter().all(|r| r.length_after <= r.length_before + slack)
    }
}

fn replace_intervals(surface: &Surface, curve: &DiscreteCurve, offset: usize) -> Result<DiscreteCurve> {
    let m = curve.m();
    let n = curve.len();
    let mut samples = curve.samples().to_vec();
    for j in 0..curve.l() {
        let a = (2 * j + offset) * m;
        let p = SurfacePoint(curve.sample(a));
        let q = SurfacePoint(curve.sample(a + 2 * m));
        let seg = geodesic_bvp(surface, p, q, 2 * m)?;
        for k in 1..2 * m {
            samples[(a + k) % n] = seg.samples[k];
        }
    }
    Ok(curve.with_samples(samples))
}

/// Step 1: minimizing geodesics on every even interval `[x_{2j}, x_{2j+2}]`.
pub fn even_replacement(surface: &Surface, curve: &DiscreteCurve) -> Result<DiscreteCurve> {
    replace_intervals(surface, curve, 0)
}

/// Step 2: minimizing geodesics on every odd interval `[x_{2j+1}, x_{2j+3}]`.
pub fn odd_replacement(surface: &Surface, curve: &DiscreteCurve) -> Result<DiscreteCurve> {
    replace_intervals(surface, curve, 1)
}

fn is_point(surface: &Surface, curve: &DiscreteCurve) -> bool {
    curve.is_point(surface.collapse_length())
}

fn report(before: &DiscreteCurve, after: &DiscreteCurve) -> Result<PsiReport> {
    let lb = before.length();
    let la = after.length();
    let drop_ratio = if la > 0.0 {
        (lb * lb - la * la) / (la * la)
    } else if lb > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(PsiReport {
        length_before: lb,
        length_after: la,
        energy_before: before.energy(),
        energy_after: after.energy(),
        moved: w12_distance(before, after)?.total,
        drop_ratio,
    })
}

/// Ψ in three steps: even replacement, odd replacement, constant-speed
/// reparametrization fixing `x_0`. Point curves are returned unchanged.
pub fn psi(surface: &Surface, curve: &DiscreteCurve) -> Result<(DiscreteCurve, PsiReport)> {
    if is_point(surface, curve) {
        let len = curve.length();
        let e = curve.energy();
        let rep = PsiReport {
            length_before: len,
            length_after: len,
            energy_before: e,
            energy_after: e,
            ..PsiReport::default()
        };
        return Ok((curve.clone(), rep));
    }
    let even = even_replacement(surface, curve)?;
    let odd = odd_replacement(surface, &even)?;
    let out = reparametrize_constant_speed(surface, &odd)?;
    let rep = report(curve, &out)?;
    Ok((out, rep))
}

/// Parameters `x̃_j` of the partition nodes after constant-speed
/// reparametrization of `curve` fixing `x_0`.
fn moved_nodes(curve: &DiscreteCurve) -> Vec<f64> {
    let total = curve.length();
    let m = curve.m();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(curve.grid().node_count());
    for (i, c) in curve.chords().enumerate() {
        if i % m == 0 {
            out.push(TAU * acc / total);
        }
        acc += c;
    }
    out
}

/// Ψ in four steps: even replacement (A1), reparametrization tracking the
/// moved nodes `x̃_j` (B1), replacement on the odd `x̃` intervals (A2), and a
/// final reparametrization (B2) anchored at the point the three-step map keeps
/// at `x_0`.
///
/// The A2 curve has corners at the nodes `x̃_j`, which rarely fall on the
/// sample grid, so B2 reads it as the grid samples with the corner points
/// inserted at their parameters.
pub fn psi_symmetric(surface: &Surface, curve: &DiscreteCurve) -> Result<DiscreteCurve> {
    if is_point(surface, curve) {
        return Ok(curve.clone());
    }
    let even = even_replacement(surface, curve)?;
    // B1 only moves the nodes to x̃_j; the samples themselves are not needed.
    let nodes = moved_nodes(&even);
    let node_count = nodes.len();
    let n = curve.len();
    let h = curve.step();
    // (parameter, point, is the anchor) on [0, 2π).
    let mut marked: Vec<(f64, Vec3, bool)> = Vec::with_capacity(n + node_count + 1);
    for j in 0..curve.l() {
        let a = 2 * j + 1;
        let b = a + 2;
        let seg: GeodesicSegment = geodesic_bvp(
            surface,
            SurfacePoint(even.node(a)),
            SurfacePoint(even.node(b)),
            2 * curve.m(),
        )?;
        let start = nodes[a % node_count];
        let mut end = nodes[b % node_count];
        if end <= start {
            end += TAU;
        }
        let width = end - start;
        marked.push((start, seg.start.0, false));
        let mut i = (start / h).floor() as usize + 1;
        while (i as f64) * h < end {
            let frac = ((i as f64) * h - start) / width;
            marked.push((crate::math::wrap(i as f64 * h, TAU), seg.point_at(surface, frac), false));
            i += 1;
        }
        if b % node_count == 1 {
            // The odd interval straddling x_0: the three-step map keeps its
            // midpoint at parameter 0.
            let mid = crate::math::wrap(start + 0.5 * width, TAU);
            marked.push((mid, seg.point_at(surface, 0.5), true));
        }
    }
    marked.sort_by(|x, y| x.0.total_cmp(&y.0));
    let points: Vec<Vec3> = marked.iter().map(|m| m.1).collect();
    let k = marked.iter().position(|m| m.2).unwrap_or(0);
    let start: f64 = points.windows(2).take(k).map(|w| w[0].dist(w[1])).sum();
    resample_polyline(surface, curve, &points, start)
}

/// `‖γ − Ψ(γ)‖_{W^{1,2}}`, the numerical distance to the closed geodesics.
pub fn geodesic_residual(surface: &Surface, curve: &DiscreteCurve) -> Result<f64> {
    Ok(psi(surface, curve)?.1.moved)
}

/// Iterates Ψ until the residual drops below `tol`, the curve collapses to a
/// point, or `max_iter` applications have been made.
pub fn shorten_to_geodesic(
    surface: &Surface,
    curve: &DiscreteCurve,
    tol: f64,
    max_iter: usize,
) -> Result<(DiscreteCurve, ShorteningTrace)> {
    let mut trace = ShorteningTrace::default();
    let mut current = curve.clone();
    if is_point(surface, &current) {
        trace.converged = true;
        trace.collapsed = true;
        return Ok((current, trace));
    }
    for _ in 0..max_iter {
        let (next, rep) = psi(surface, &current)?;
        trace.iterations += 1;
        trace.final_residual = rep.moved;
        trace.reports.push(rep);
        if is_point(surface, &next) {
            trace.converged = true;
            trace.collapsed = true;
            let p = surface.project(next.centroid())?.0;
            return Ok((DiscreteCurve::point(next.l(), next.m(), p)?, trace));
        }
        current = next;
        if rep.moved < tol {
            trace.converged = true;
            return Ok((current, trace));
        }
    }
    Err(Error::MaxIterExceeded(PartialResult::Shortening(Box::new(trace))))
}
