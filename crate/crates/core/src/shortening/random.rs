//! Seeded generators for random Λ-curves and Lipschitz paths.
//!
//! All randomness comes from [`CurveRng`], ChaCha with 8 rounds. It is a
//! counter-based stream cipher, so a seed yields the same stream on every
//! platform.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::curve::DiscreteCurve;
use crate::error::{Error, Result};
use crate::manifold::{geodesic_bvp, geodesic_ivp, Surface, SurfacePoint};
use crate::math::Vec3;

/// The generator behind every randomized check.
pub type CurveRng = rand_chacha::ChaCha8Rng;

const MAX_ATTEMPTS: usize = 100;
const MAX_DEGREE: usize = 5;

fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

fn cube<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    Vec3::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    )
}

/// A random closed curve in Λ: a trigonometric loop of degree at most five
/// around a random direction, pushed onto the surface by the radial chart and
/// resampled to constant speed. Loops violating the Λ bounds are redrawn.
pub fn random_lambda_curve<R: Rng + ?Sized>(
    surface: &Surface,
    rng: &mut R,
    l: usize,
    m: usize,
) -> Result<DiscreteCurve> {
    let n_raw = (2 * l * m).max(512);
    for _ in 0..MAX_ATTEMPTS {
        let center = unit_vector(rng);
        let amplitude = rng.random_range(0.05..0.9);
        let degree = rng.random_range(1..=MAX_DEGREE);
        let coeffs: Vec<(Vec3, Vec3)> = (1..=degree)
            .map(|k| {
                let w = amplitude / k as f64;
                (cube(rng) * w, cube(rng) * w)
            })
            .collect();
        let mut points = Vec::with_capacity(n_raw);
        let mut ok = true;
        for i in 0..n_raw {
            let x = TAU * i as f64 / n_raw as f64;
            let mut u = center;
            for (k, (a, b)) in coeffs.iter().enumerate() {
                let kx = (k + 1) as f64 * x;
                u = u + *a * kx.cos() + *b * kx.sin();
            }
            // Keep the loop well away from the chart's singular center.
            if u.norm() < 0.2 {
                ok = false;
                break;
            }
            points.push(surface.chart(u / u.norm()));
        }
        if !ok {
            continue;
        }
        match DiscreteCurve::from_samples(surface, &points, l, m) {
            Ok(c) if !c.is_point(surface.collapse_length()) => return Ok(c),
            Ok(_) | Err(Error::LipschitzExceeded { .. }) | Err(Error::SegmentTooLong { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplingExhausted { attempts: MAX_ATTEMPTS })
}

/// Samples of a path over a parameter interval of length `interval`.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzPath {
    pub samples: Vec<Vec3>,
    pub interval: f64,
}

/// A random path with speed at most `L` on an interval of length at most
/// `2π/L`: a geodesic arc plus a sinusoidal wiggle vanishing at both ends.
pub fn random_lipschitz_path<R: Rng + ?Sized>(
    surface: &Surface,
    rng: &mut R,
    l: usize,
    m: usize,
) -> Result<LipschitzPath> {
    let lf = l as f64;
    let interval = TAU / lf * rng.random_range(0.5..1.0);
    let h = interval / m as f64;
    let p = surface.project(surface.chart(unit_vector(rng)))?;
    let mut dir = surface.tangent_project(p, cube(rng));
    let dn = dir.dir.norm().max(1e-12);
    dir.dir = dir.dir / dn;
    let base_len = rng.random_range(0.1..0.6) * lf * interval;
    let q = geodesic_ivp(surface, dir, base_len)?.base;
    let base = geodesic_bvp(surface, p, q, m)?.samples;
    let modes: Vec<(f64, f64)> =
        (0..3).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let mut amplitude = rng.random_range(0.0..0.3) * base_len;
    loop {
        let mut samples = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let b = base[i];
            let tangent = (base[(i + 1).min(m)] - base[i.saturating_sub(1)])
                .normalized()
                .unwrap_or(dir.dir);
            let side = surface.normal(b).cross(tangent);
            let mut w = Vec3::ZERO;
            if i != 0 && i != m {
                for (k, &(a, c)) in modes.iter().enumerate() {
                    let kk = (k + 1) as f64;
                    let s = (kk * PI * i as f64 / m as f64).sin() * amplitude / kk;
                    w = w + (side * a + tangent * c) * s;
                }
            }
            samples.push(surface.project(b + w)?.0);
        }
        let speed = samples.windows(2).map(|s| s[0].dist(s[1]) / h).fold(0.0, f64::max);
        if speed <= lf {
            return Ok(LipschitzPath { samples, interval });
        }
        amplitude *= 0.5;
        if amplitude < 1e-12 {
            return Ok(LipschitzPath { samples: base, interval });
        }
    }
}

/// A random point on the surface, uniform in the chart direction.
pub fn random_surface_point<R: Rng + ?Sized>(surface: &Surface, rng: &mut R) -> Result<SurfacePoint> {
    surface.project(surface.chart(unit_vector(rng)))
}
