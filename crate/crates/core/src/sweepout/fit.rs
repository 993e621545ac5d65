//! Analytic closed-geodesic fits on the round sphere and on ellipsoids.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use crate::curve::{w12_distance, DiscreteCurve};
use crate::error::{Error, Result};
use crate::manifold::{Surface, SurfaceKind};
use crate::math::{symmetric_eigen, Mat3, Vec3};

/// Points per sample used to tabulate ellipse arclength.
const ELLIPSE_TABLE_FACTOR: usize = 32;
const GOLDEN_STEPS: usize = 40;

/// Best-fit closed geodesic through the origin plane of the samples.
///
/// On the round sphere this is a great circle; on an ellipsoid, the principal
/// ellipse whose plane normal is closest to the fitted one. Returns the
/// W^{1,2} distance minimized over phase and orientation, and the fitted
/// curve at its own constant speed.
pub fn great_circle_fit(surface: &Surface, curve: &DiscreteCurve) -> Result<(f64, DiscreteCurve)> {
    let axes = match surface.kind() {
        SurfaceKind::Sphere | SurfaceKind::Ellipsoid => surface.semi_axes().ok_or(Error::DegenerateFit)?,
        SurfaceKind::PerturbedSphere => {
            return Err(Error::UnsupportedSurface("analytic fit needs a sphere or an ellipsoid"))
        }
    };
    if curve.is_point(surface.collapse_length()) {
        return Err(Error::DegenerateFit);
    }
    let mut moment = Mat3::ZERO;
    for &x in curve.samples() {
        moment = moment + Mat3::outer(x, x);
    }
    let (values, vectors) = symmetric_eigen(&moment);
    if values[1] <= 1e-12 * values[2] {
        return Err(Error::DegenerateFit);
    }
    let normal = vectors.col(0);
    let template: Template = if surface.kind() == SurfaceKind::Sphere {
        let x0 = curve.sample(0);
        let e1 = (x0 - normal * x0.dot(normal))
            .normalized()
            .unwrap_or_else(|| normal.any_orthogonal());
        let e2 = normal.cross(e1);
        Template::Circle { radius: axes[0], e1, e2 }
    } else {
        let axis = (0..3)
            .max_by(|&a, &b| normal[a].abs().total_cmp(&normal[b].abs()))
            .unwrap_or(2);
        let (p, q) = ((axis + 1) % 3, (axis + 2) % 3);
        Template::ellipse(axes[p], axes[q], unit(p), unit(q), curve.len())
    };
    fit_template(curve, &template)
}

fn unit(i: usize) -> Vec3 {
    let mut v = Vec3::ZERO;
    v.0[i] = 1.0;
    v
}

enum Template {
    Circle { radius: f64, e1: Vec3, e2: Vec3 },
    Ellipse { a: f64, b: f64, e1: Vec3, e2: Vec3, arc: Vec<f64>, angle: Vec<f64> },
}

impl Template {
    fn ellipse(a: f64, b: f64, e1: Vec3, e2: Vec3, n: usize) -> Template {
        let dense = n * ELLIPSE_TABLE_FACTOR;
        let mut arc = Vec::with_capacity(dense + 1);
        let mut angle = Vec::with_capacity(dense + 1);
        let mut acc = 0.0;
        let mut prev = Vec3::new(a, 0.0, 0.0);
        for i in 0..=dense {
            let t = TAU * i as f64 / dense as f64;
            let p = Vec3::new(a * t.cos(), b * t.sin(), 0.0);
            acc += (p - prev).norm();
            prev = p;
            arc.push(acc);
            angle.push(t);
        }
        Template::Ellipse { a, b, e1, e2, arc, angle }
    }

    /// Point at arclength fraction `f` of the closed template.
    fn at(&self, f: f64) -> Vec3 {
        let f = crate::math::wrap(f, 1.0);
        match self {
            Template::Circle { radius, e1, e2 } => {
                let t = TAU * f;
                (*e1 * t.cos() + *e2 * t.sin()) * *radius
            }
            Template::Ellipse { a, b, e1, e2, arc, angle } => {
                let total = arc[arc.len() - 1];
                let s = f * total;
                let k = arc.partition_point(|&c| c <= s).clamp(1, arc.len() - 1);
                let (s0, s1) = (arc[k - 1], arc[k]);
                let w = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
                let t = angle[k - 1] + w * (angle[k] - angle[k - 1]);
                *e1 * (*a * t.cos()) + *e2 * (*b * t.sin())
            }
        }
    }
}

fn fit_template(curve: &DiscreteCurve, template: &Template) -> Result<(f64, DiscreteCurve)> {
    let n = curve.len();
    let (l, m) = (curve.l(), curve.m());
    let table: Vec<Vec3> = (0..n).map(|i| template.at(i as f64 / n as f64)).collect();
    let build = |phase: f64, sign: f64| -> Result<DiscreteCurve> {
        let samples = (0..n).map(|i| template.at(phase + sign * i as f64 / n as f64)).collect();
        DiscreteCurve::from_raw(l, m, samples)
    };
    let distance = |c: &DiscreteCurve| w12_distance(curve, c).map(|r| r.total);

    let mut best = (f64::INFINITY, 0.0, 1.0);
    for sign in [1.0, -1.0] {
        for shift in 0..n {
            let samples = (0..n)
                .map(|i| {
                    let k = if sign > 0.0 { (shift + i) % n } else { (shift + n - i % n) % n };
                    table[k]
                })
                .collect();
            let d = distance(&DiscreteCurve::from_raw(l, m, samples)?)?;
            if d < best.0 {
                best = (d, shift as f64 / n as f64, sign);
            }
        }
    }
    let (_, centre, sign) = best;
    let step = 1.0 / n as f64;
    let (mut lo, mut hi) = (centre - step, centre + step);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = distance(&build(x1, sign)?)?;
    let mut f2 = distance(&build(x2, sign)?)?;
    for _ in 0..GOLDEN_STEPS {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = distance(&build(x1, sign)?)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = distance(&build(x2, sign)?)?;
        }
    }
    let phase = if f1 < f2 { x1 } else { x2 };
    let mut fitted = build(phase, sign)?;
    let mut d = distance(&fitted)?;
    if best.0 < d {
        fitted = build(centre, sign)?;
        d = best.0;
    }
    Ok((d, fitted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{normalize, SurfaceSpec};
    use core::f64::consts::PI;

    #[test]
    fn great_circle_fits_itself() {
        let s = normalize(&SurfaceSpec::sphere(1.0)).unwrap();
        let r = s.scale();
        let tilt = 0.3f64;
        let c = DiscreteCurve::from_fn(8, 8, |x| {
            Vec3::new(r * x.cos(), r * x.sin() * tilt.cos(), r * x.sin() * tilt.sin())
        })
        .unwrap();
        let (d, _) = great_circle_fit(&s, &c).unwrap();
        assert!(d < 1e-8, "distance {d}");
    }

    #[test]
    fn latitude_is_far_from_great_circles() {
        let s = normalize(&SurfaceSpec::sphere(1.0)).unwrap();
        let c = DiscreteCurve::from_fn(8, 8, |x| s.chart_angles(PI / 3.0, x)).unwrap();
        let (d, _) = great_circle_fit(&s, &c).unwrap();
        assert!(d > 0.1 * s.scale());
    }

    #[test]
    fn reversed_orientation_is_found() {
        let s = normalize(&SurfaceSpec::sphere(1.0)).unwrap();
        let c = DiscreteCurve::from_fn(8, 8, |x| s.chart_angles(PI / 2.0, -x + 0.1)).unwrap();
        let (d, _) = great_circle_fit(&s, &c).unwrap();
        assert!(d < 1e-8, "distance {d}");
    }

    #[test]
    fn point_curve_is_degenerate() {
        let s = normalize(&SurfaceSpec::sphere(1.0)).unwrap();
        let c = DiscreteCurve::point(8, 4, Vec3::new(0.0, 0.0, s.scale())).unwrap();
        assert!(matches!(great_circle_fit(&s, &c), Err(Error::DegenerateFit)));
    }
}
