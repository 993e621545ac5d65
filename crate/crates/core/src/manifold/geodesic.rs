//! Geodesic initial- and boundary-value problems.
//!
//! Geodesics satisfy `x'' = −(x'ᵀ ∇²F x' / |∇F|²) ∇F`, integrated with a fixed
//! step classical Runge–Kutta scheme. After each step the position is snapped
//! back onto the level set and the velocity is projected to the tangent plane
//! and rescaled to the initial speed.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::{Surface, SurfacePoint, TangentVector};
use crate::error::{Error, Result};
use crate::math::{solve_dense, Vec3};

/// Largest arclength covered by one integrator step.
const MAX_STEP_ARC: f64 = 0.125;
/// Convexity radius guaranteed by normalization.
const CONVEX_RADIUS: f64 = 4.0 * PI;

/// Longest geodesic the shooting solver will return: the convexity radius,
/// or three quarters of the certified conjugate radius when that is larger.
fn max_length(surface: &Surface) -> f64 {
    (0.75 * surface.certificate().conjugate_radius).max(CONVEX_RADIUS)
}

/// A constant-speed minimizing geodesic on the unit parameter interval.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicSegment {
    pub start: SurfacePoint,
    pub end: SurfacePoint,
    /// `m + 1` samples at parameters `k / m`.
    pub samples: Vec<Vec3>,
    pub length: f64,
    /// Velocity at the start; its norm equals `length`.
    pub initial_velocity: Vec3,
}

impl GeodesicSegment {
    /// Point at unit parameter `fraction`, by integrating from the start.
    pub fn point_at(&self, surface: &Surface, fraction: f64) -> Vec3 {
        if self.length == 0.0 || fraction == 0.0 {
            return self.start.0;
        }
        let steps = steps_for(self.length * fraction.abs());
        let h = fraction / steps as f64;
        integrate(surface, self.start.0, self.initial_velocity, h, steps, |_, _| {}).0
    }
}

fn steps_for(arc: f64) -> usize {
    ((arc / MAX_STEP_ARC).ceil() as usize).max(1)
}

#[inline]
fn rk4_step(surface: &Surface, x: Vec3, v: Vec3, h: f64, speed: f64) -> (Vec3, Vec3) {
    let shape = &surface.shape;
    let half = 0.5 * h;
    let a1 = shape.geodesic_accel(x, v);
    let x2 = x + v * half;
    let v2 = v + a1 * half;
    let a2 = shape.geodesic_accel(x2, v2);
    let x3 = x + v2 * half;
    let v3 = v + a2 * half;
    let a3 = shape.geodesic_accel(x3, v3);
    let x4 = x + v3 * h;
    let v4 = v + a3 * h;
    let a4 = shape.geodesic_accel(x4, v4);
    let sixth = h / 6.0;
    let xn = x + (v + v2 * 2.0 + v3 * 2.0 + v4) * sixth;
    let vn = v + (a1 + a2 * 2.0 + a3 * 2.0 + a4) * sixth;
    let xn = surface.snap(xn);
    let n = surface.normal(xn);
    let vt = vn - n * vn.dot(n);
    let s = vt.norm();
    let vt = if s > 0.0 { vt * (speed / s) } else { vt };
    (xn, vt)
}

/// Integrates `steps` steps of size `h`, calling `visit(i, x)` after step `i`.
fn integrate(
    surface: &Surface,
    mut x: Vec3,
    mut v: Vec3,
    h: f64,
    steps: usize,
    mut visit: impl FnMut(usize, Vec3),
) -> (Vec3, Vec3) {
    let speed = v.norm();
    for i in 0..steps {
        (x, v) = rk4_step(surface, x, v, h, speed);
        visit(i + 1, x);
    }
    (x, v)
}

/// Follows the geodesic with initial data `start` for parameter time `t`.
///
/// The step count is doubled until two successive resolutions agree to
/// `tol_geo`.
pub fn geodesic_ivp(surface: &Surface, start: TangentVector, t: f64) -> Result<TangentVector> {
    let tol = surface.tolerances().tol_geo;
    if t == 0.0 || start.dir.norm() == 0.0 {
        return Ok(start);
    }
    let arc = start.dir.norm() * t.abs();
    let mut steps = steps_for(arc);
    let run = |steps: usize| {
        integrate(surface, start.base.0, start.dir, t / steps as f64, steps, |_, _| {})
    };
    let mut coarse = run(steps);
    for _ in 0..16 {
        steps *= 2;
        let fine = run(steps);
        if !fine.0.is_finite() {
            break;
        }
        if (fine.0 - coarse.0).norm() < tol {
            return Ok(TangentVector { base: SurfacePoint(fine.0), dir: fine.1 });
        }
        coarse = fine;
    }
    Err(Error::StepSizeUnderflow { tol })
}

/// Minimizing constant-speed geodesic from `p` to `q` sampled at `m + 1`
/// points, by single shooting from the tangent-projected chord.
pub fn geodesic_bvp(surface: &Surface, p: SurfacePoint, q: SurfacePoint, m: usize) -> Result<GeodesicSegment> {
    let m = m.max(1);
    let chord = q.0 - p.0;
    let d = chord.norm();
    if d <= 1e-13 * surface.scale().max(1.0) {
        return Ok(GeodesicSegment {
            start: p,
            end: q,
            samples: alloc::vec![p.0; m + 1],
            length: 0.0,
            initial_velocity: Vec3::ZERO,
        });
    }
    let max_len = max_length(surface);
    if d > max_len {
        return Err(Error::PreconditionViolated(format!(
            "endpoints {d} apart exceed the admissible geodesic length {max_len}"
        )));
    }
    let tol = surface.tolerances().tol_bvp;
    let target = (1e-3 * tol).max(1e-14 * surface.scale());
    let n = surface.normal(p.0);
    let e1 = (chord - n * chord.dot(n)).normalized().unwrap_or_else(|| n.any_orthogonal());
    let e2 = n.cross(e1);
    let velocity = |c: [f64; 2]| e1 * c[0] + e2 * c[1];

    // Substeps keep every integrator step below MAX_STEP_ARC.
    let substeps = steps_for(1.5 * d / m as f64);
    let steps = m * substeps;
    let h = 1.0 / steps as f64;
    let shoot = |c: [f64; 2]| integrate(surface, p.0, velocity(c), h, steps, |_, _| {}).0;

    let mut c = [d, 0.0];
    let mut end = shoot(c);
    let mut miss = (end - q.0).norm();
    let mut iterations = 0;
    while miss > target && iterations < surface.tolerances().max_newton {
        iterations += 1;
        let r = end - q.0;
        let speed = (c[0] * c[0] + c[1] * c[1]).sqrt();
        let eta = 1e-7 * speed.max(1e-3);
        let j0 = (shoot([c[0] + eta, c[1]]) - end) / eta;
        let j1 = (shoot([c[0], c[1] + eta]) - end) / eta;
        let a = [[j0.dot(j0), j0.dot(j1)], [j1.dot(j0), j1.dot(j1)]];
        let Some(delta) = solve_dense(a, [-j0.dot(r), -j1.dot(r)]) else {
            break;
        };
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let trial = [c[0] + step * delta[0], c[1] + step * delta[1]];
            let trial_end = shoot(trial);
            let trial_miss = (trial_end - q.0).norm();
            if trial_miss < miss {
                c = trial;
                end = trial_end;
                miss = trial_miss;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if !(miss <= tol) {
        return Err(Error::ShootingDiverged { miss });
    }
    let v0 = velocity(c);
    let length = v0.norm();
    if length > max_len {
        return Err(Error::PreconditionViolated(format!(
            "geodesic of length {length} exceeds the admissible length {max_len}"
        )));
    }
    let mut samples = Vec::with_capacity(m + 1);
    samples.push(p.0);
    integrate(surface, p.0, v0, h, steps, |i, x| {
        if i % substeps == 0 {
            samples.push(x);
        }
    });
    samples[m] = q.0;
    Ok(GeodesicSegment { start: p, end: q, samples, length, initial_velocity: v0 })
}

/// Length of the minimizing geodesic between two nearby points.
pub fn intrinsic_distance(surface: &Surface, p: SurfacePoint, q: SurfacePoint) -> Result<f64> {
    Ok(geodesic_bvp(surface, p, q, 16)?.length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{normalize, SurfaceSpec};
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn sphere() -> Surface {
        normalize(&SurfaceSpec::sphere(1.0)).unwrap()
    }

    #[test]
    fn ivp_quarter_and_half_great_circle() {
        let s = sphere();
        let r = s.scale();
        let start = TangentVector { base: SurfacePoint(Vec3::new(r, 0.0, 0.0)), dir: Vec3::new(0.0, 1.0, 0.0) };
        let q = geodesic_ivp(&s, start, FRAC_PI_2 * r).unwrap();
        assert!((q.base.0 - Vec3::new(0.0, r, 0.0)).norm() < 1e-6);
        assert!((q.dir - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-6);
        let h = geodesic_ivp(&s, start, PI * r).unwrap();
        assert!((h.base.0 - Vec3::new(-r, 0.0, 0.0)).norm() < 1e-6);
        assert_eq!(geodesic_ivp(&s, start, 0.0).unwrap(), start);
    }

    #[test]
    fn ivp_conserves_speed() {
        let s = normalize(&SurfaceSpec::ellipsoid(1.0, 1.1, 1.2)).unwrap();
        let p = s.project(s.chart_angles(1.0, 0.3)).unwrap();
        let v = s.tangent_project(p, Vec3::new(0.2, 1.0, -0.4));
        let end = geodesic_ivp(&s, v, 10.0).unwrap();
        assert!((end.dir.norm() / v.dir.norm() - 1.0).abs() < s.tolerances().tol_speed);
    }

    #[test]
    fn bvp_quarter_great_circle() {
        let s = sphere();
        let r = s.scale();
        let p = SurfacePoint(Vec3::new(r, 0.0, 0.0));
        let q = SurfacePoint(Vec3::new(0.0, r, 0.0));
        let seg = geodesic_bvp(&s, p, q, 16).unwrap();
        assert!((seg.length - FRAC_PI_2 * r).abs() < 1e-8);
        let expect = Vec3::new(r * FRAC_1_SQRT_2, r * FRAC_1_SQRT_2, 0.0);
        assert!((seg.samples[8] - expect).norm() < 1e-8);

        let ang = PI / 8.0;
        let q = SurfacePoint(Vec3::new(r * ang.cos(), r * ang.sin(), 0.0));
        let seg = geodesic_bvp(&s, p, q, 16).unwrap();
        assert!((seg.length - r * ang).abs() < 1e-8);
    }

    #[test]
    fn bvp_degenerate_endpoints() {
        let s = sphere();
        let p = SurfacePoint(Vec3::new(0.0, 0.0, s.scale()));
        let seg = geodesic_bvp(&s, p, p, 8).unwrap();
        assert_eq!(seg.length, 0.0);
        assert!(seg.samples.iter().all(|&x| x == p.0));
    }

    #[test]
    fn bvp_rejects_far_endpoints() {
        let s = sphere();
        let r = s.scale();
        let p = SurfacePoint(Vec3::new(r, 0.0, 0.0));
        let q = SurfacePoint(Vec3::new(-r, 0.0, 0.0));
        assert!(geodesic_bvp(&s, p, q, 16).is_err());
    }
}
