//! Closed piecewise-geodesic curves and their functionals.
//!
//! A curve is stored densely: `2L·m` samples at the parameters
//! `x_i = 2π i / (2Lm)`, so partition node `x_j = jπ/L` is sample `j·m`.
//! Energy, length and the W^{1,2} metric are quadratures over these samples.
//! Energy and length are those of the closed polyline through the samples, so
//! `length² ≤ 2π · energy` holds exactly, with equality iff all chords agree.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::manifold::{Surface, SurfacePoint};
use crate::math::Vec3;
use crate::tolerances::Tolerances;

/// Smallest admissible number of partition half-intervals.
pub const MIN_L: usize = 8;
/// Curves shorter than this are treated as point curves by reparametrization.
pub const DEGENERATE_LENGTH: f64 = 1e-12;

/// The `2L` evenly spaced partition points `x_j = jπ/L` of the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionGrid {
    l: usize,
}

impl PartitionGrid {
    pub fn new(l: usize) -> Result<Self> {
        if l < MIN_L {
            return Err(Error::PreconditionViolated(alloc::format!("L = {l} is below {MIN_L}")));
        }
        Ok(Self { l })
    }

    /// The number `L`; the grid has `2L` points.
    pub fn l(self) -> usize {
        self.l
    }

    pub fn node_count(self) -> usize {
        2 * self.l
    }

    pub fn spacing(self) -> f64 {
        PI / self.l as f64
    }

    pub fn node(self, j: usize) -> f64 {
        (j % self.node_count()) as f64 * self.spacing()
    }
}

/// Sum of squared differences in the W^{1,2} distance between two curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveMetricReport {
    pub l2_part: f64,
    pub h1_part: f64,
    pub total: f64,
}

/// A closed curve in the space of piecewise geodesics.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteCurve {
    grid: PartitionGrid,
    m: usize,
    samples: Vec<Vec3>,
    speed: f64,
    constant_speed: bool,
}

impl DiscreteCurve {
    /// Builds a curve from raw samples at the grid parameters. No resampling
    /// is done; `constant_speed` is set when the chords agree to `tol_param`.
    pub fn from_raw(l: usize, m: usize, samples: Vec<Vec3>) -> Result<Self> {
        let grid = PartitionGrid::new(l)?;
        if m == 0 || samples.len() != 2 * l * m {
            return Err(Error::GridMismatch);
        }
        let mut curve = Self { grid, m, samples, speed: 0.0, constant_speed: false };
        curve.speed = curve.length() / TAU;
        curve.constant_speed = curve.spacing_spread() <= Tolerances::default().tol_param;
        Ok(curve)
    }

    /// Rebuilds a curve from serialized parts, keeping the stored speed.
    pub fn from_parts(l: usize, m: usize, speed: f64, samples: Vec<Vec3>) -> Result<Self> {
        let mut curve = Self::from_raw(l, m, samples)?;
        curve.speed = speed;
        Ok(curve)
    }

    /// Samples `f` at the grid parameters.
    pub fn from_fn(l: usize, m: usize, f: impl Fn(f64) -> Vec3) -> Result<Self> {
        let n = 2 * l * m;
        Self::from_raw(l, m, (0..n).map(|i| f(TAU * i as f64 / n as f64)).collect())
    }

    /// The constant curve at `p`.
    pub fn point(l: usize, m: usize, p: Vec3) -> Result<Self> {
        Self::from_raw(l, m, alloc::vec![p; 2 * l * m])
    }

    /// Resamples a closed polyline on the surface at constant speed and checks
    /// the Λ bounds.
    pub fn from_samples(surface: &Surface, points: &[Vec3], l: usize, m: usize) -> Result<Self> {
        let grid = PartitionGrid::new(l)?;
        if points.len() < grid.node_count() || m == 0 {
            return Err(Error::PreconditionViolated(alloc::format!(
                "need at least {} points, got {}",
                grid.node_count(),
                points.len()
            )));
        }
        let n = 2 * l * m;
        let total: f64 = closed_chords(points).sum();
        let curve = if total < DEGENERATE_LENGTH {
            Self::point(l, m, points[0])?
        } else {
            let first = resample_closed(surface, points, 0.0, n)?;
            let mut c = Self::from_raw(l, m, first)?;
            c = reparametrize_constant_speed(surface, &c)?;
            c
        };
        curve.check_lambda()?;
        Ok(curve)
    }

    pub fn grid(&self) -> PartitionGrid {
        self.grid
    }

    pub fn l(&self) -> usize {
        self.grid.l
    }

    /// Samples per partition interval.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vec3] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Vec3> {
        self.samples
    }

    /// Speed in ambient length per radian (`length / 2π`).
    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn is_constant_speed(&self) -> bool {
        self.constant_speed
    }

    /// Parameter step between samples.
    pub fn step(&self) -> f64 {
        TAU / self.samples.len() as f64
    }

    /// Image of partition node `j` (indices wrap).
    pub fn node(&self, j: usize) -> Vec3 {
        self.samples[(j * self.m) % self.samples.len()]
    }

    /// Sample `i`, wrapping around the circle.
    #[inline]
    pub fn sample(&self, i: usize) -> Vec3 {
        self.samples[i % self.samples.len()]
    }

    /// Chord lengths between consecutive samples, closing the loop.
    pub fn chords(&self) -> impl Iterator<Item = f64> + '_ {
        closed_chords(&self.samples)
    }

    /// Length of the sub-arc over partition interval `[x_j, x_{j+1}]`.
    pub fn interval_length(&self, j: usize) -> f64 {
        let start = (j % self.grid.node_count()) * self.m;
        (0..self.m).map(|k| self.sample(start + k).dist(self.sample(start + k + 1))).sum()
    }

    /// Relative spread `(max − min) / mean` of the chord lengths.
    pub fn spacing_spread(&self) -> f64 {
        let (mut lo, mut hi, mut sum) = (f64::INFINITY, 0.0f64, 0.0);
        for c in self.chords() {
            lo = lo.min(c);
            hi = hi.max(c);
            sum += c;
        }
        let mean = sum / self.samples.len() as f64;
        if mean <= 0.0 {
            0.0
        } else {
            (hi - lo) / mean
        }
    }

    /// Squared parametric speed integrated over the circle.
    pub fn energy(&self) -> f64 {
        let h = self.step();
        closed_chords(&self.samples).map(|c| c * c).sum::<f64>() / h
    }

    pub fn length(&self) -> f64 {
        closed_chords(&self.samples).sum()
    }

    pub fn is_point(&self, threshold: f64) -> bool {
        self.length() < threshold
    }

    /// Checks the Lipschitz and segment-length bounds of Λ.
    pub fn check_lambda(&self) -> Result<()> {
        let bound = self.grid.l as f64;
        let speed = self.length() / TAU;
        if speed > bound * (1.0 + 1e-12) {
            return Err(Error::LipschitzExceeded { speed, bound });
        }
        for j in 0..self.grid.node_count() {
            let arc = self.interval_length(j);
            if arc > TAU {
                return Err(Error::SegmentTooLong { arc });
            }
        }
        Ok(())
    }

    /// Sample-wise centroid, used as the location of collapsed curves.
    pub fn centroid(&self) -> Vec3 {
        let sum = self.samples.iter().fold(Vec3::ZERO, |acc, &p| acc + p);
        sum / self.samples.len() as f64
    }

    /// The same samples rotated so that sample `shift` comes first.
    pub fn rotated(&self, shift: usize) -> Self {
        let n = self.samples.len();
        let samples = (0..n).map(|i| self.samples[(i + shift) % n]).collect();
        Self { samples, ..self.clone() }
    }

    pub(crate) fn with_samples(&self, samples: Vec<Vec3>) -> Self {
        let mut c = Self { samples, ..self.clone() };
        c.speed = c.length() / TAU;
        c.constant_speed = c.spacing_spread() <= Tolerances::default().tol_param;
        c
    }
}

fn closed_chords(points: &[Vec3]) -> impl Iterator<Item = f64> + '_ {
    let n = points.len();
    (0..n).map(move |i| points[i].dist(points[(i + 1) % n]))
}

/// Resamples the closed polyline `points` at `n` arclength-uniform positions
/// starting at arclength `anchor`, projecting each interpolated point.
pub(crate) fn resample_closed(surface: &Surface, points: &[Vec3], anchor: f64, n: usize) -> Result<Vec<Vec3>> {
    let k = points.len();
    let mut cumulative = Vec::with_capacity(k + 1);
    cumulative.push(0.0);
    let mut acc = 0.0;
    for c in closed_chords(points) {
        acc += c;
        cumulative.push(acc);
    }
    let total = acc;
    let mut out = Vec::with_capacity(n);
    let mut seg = 0usize;
    let anchor = crate::math::wrap(anchor, total);
    // Walk targets in increasing arclength from the anchor, wrapping once.
    let mut wrapped = false;
    for i in 0..n {
        let mut target = anchor + total * i as f64 / n as f64;
        if target >= total {
            target -= total;
            if !wrapped {
                wrapped = true;
                seg = 0;
            }
        } else if i == 0 {
            seg = cumulative.partition_point(|&c| c <= target).saturating_sub(1);
        }
        while seg + 1 < k && cumulative[seg + 1] <= target {
            seg += 1;
        }
        let a = points[seg];
        let b = points[(seg + 1) % k];
        let span = cumulative[seg + 1] - cumulative[seg];
        let t = if span > 0.0 { ((target - cumulative[seg]) / span).clamp(0.0, 1.0) } else { 0.0 };
        let p = if t == 0.0 {
            a
        } else if t == 1.0 {
            b
        } else {
            surface.project(a.lerp(b, t))?.0
        };
        out.push(p);
    }
    Ok(out)
}

/// Arclength-uniform resampling fixing the image of `x_0`.
///
/// Curves shorter than [`DEGENERATE_LENGTH`] are returned unchanged.
pub fn reparametrize_constant_speed(surface: &Surface, curve: &DiscreteCurve) -> Result<DiscreteCurve> {
    reparametrize_from(surface, curve, 0.0)
}

/// Arclength-uniform resampling whose first sample is the curve point at
/// fractional sample position `anchor` (in `[0, n)`).
pub fn reparametrize_from(surface: &Surface, curve: &DiscreteCurve, anchor: f64) -> Result<DiscreteCurve> {
    if curve.length() < DEGENERATE_LENGTH {
        return Ok(curve.clone());
    }
    let n = curve.len();
    let chords: Vec<f64> = curve.chords().collect();
    let whole = anchor.floor() as usize % n;
    let frac = anchor - anchor.floor();
    let start: f64 = chords[..whole].iter().sum::<f64>() + frac * chords[whole];
    resample_polyline(surface, curve, curve.samples(), start)
}

/// Constant-speed curve on the grid of `template` through the closed polyline
/// `points`, starting at arclength `start`.
pub(crate) fn resample_polyline(
    surface: &Surface,
    template: &DiscreteCurve,
    points: &[Vec3],
    start: f64,
) -> Result<DiscreteCurve> {
    let n = template.len();
    let mut samples = resample_closed(surface, points, start, n)?;
    // The second pass absorbs the spacing change caused by projection.
    let spread = template.with_samples(samples.clone()).spacing_spread();
    if spread > 0.0 {
        samples = resample_closed(surface, &samples, 0.0, n)?;
    }
    let mut out = template.with_samples(samples);
    out.constant_speed = out.spacing_spread() <= surface.tolerances().tol_param;
    Ok(out)
}

/// W^{1,2} distance in ambient coordinates; derivatives by centered
/// differences on the common periodic grid.
pub fn w12_distance(c1: &DiscreteCurve, c2: &DiscreteCurve) -> Result<CurveMetricReport> {
    if c1.grid != c2.grid || c1.m != c2.m {
        return Err(Error::GridMismatch);
    }
    let n = c1.len();
    let h = c1.step();
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    for i in 0..n {
        let d = c1.samples[i] - c2.samples[i];
        l2 += d.norm_sq();
        let next = (i + 1) % n;
        let prev = (i + n - 1) % n;
        let dd = (c1.samples[next] - c1.samples[prev]) - (c2.samples[next] - c2.samples[prev]);
        h1 += dd.norm_sq();
    }
    let l2_part = l2 * h;
    let h1_part = h1 / (4.0 * h);
    Ok(CurveMetricReport { l2_part, h1_part, total: (l2_part + h1_part).sqrt() })
}

/// `4∫(f')² − ∫f²` on `[0, 2π]` for a function sampled at `N + 1` equally
/// spaced points that vanishes at both ends.
///
/// Both integrals are taken exactly for the piecewise-linear interpolant, so
/// the result is non-negative for any samples up to rounding, and equals zero
/// in the limit for `sin(t/2)`.
pub fn wirtinger_gap(f: &[f64]) -> Result<f64> {
    if f.len() < 2 {
        return Err(Error::EndpointNotZero);
    }
    let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let first = f[0];
    let last = f[f.len() - 1];
    if first.abs() > 1e-12 * (1.0 + scale) || last.abs() > 1e-12 * (1.0 + scale) {
        return Err(Error::EndpointNotZero);
    }
    let h = TAU / (f.len() - 1) as f64;
    let (mut mass, mut stiff) = (0.0, 0.0);
    for w in f.windows(2) {
        let (a, b) = (w[0], w[1]);
        mass += h * (a * a + a * b + b * b) / 3.0;
        stiff += (b - a) * (b - a) / h;
    }
    Ok(4.0 * stiff - mass)
}

/// Point at parameter `x`, interpolating linearly between the neighbouring
/// samples and projecting back to the surface.
pub fn evaluate(surface: &Surface, curve: &DiscreteCurve, x: f64) -> Result<SurfacePoint> {
    let n = curve.len();
    let pos = crate::math::wrap(x, TAU) / curve.step();
    let i = (pos.floor() as usize) % n;
    let t = pos - pos.floor();
    let a = curve.sample(i);
    if t == 0.0 {
        return Ok(SurfacePoint(a));
    }
    let b = curve.sample(i + 1);
    if a == b {
        return Ok(SurfacePoint(a));
    }
    surface.project(a.lerp(b, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{normalize, SurfaceSpec};

    fn sphere() -> Surface {
        normalize(&SurfaceSpec::sphere(1.0)).unwrap()
    }

    fn equator(s: &Surface, l: usize, m: usize) -> DiscreteCurve {
        let r = s.scale();
        DiscreteCurve::from_fn(l, m, |x| Vec3::new(r * x.cos(), r * x.sin(), 0.0)).unwrap()
    }

    #[test]
    fn grid_spacing() {
        let g = PartitionGrid::new(64).unwrap();
        assert_eq!(g.node_count(), 128);
        assert!((g.spacing() - PI / 64.0).abs() < 1e-15);
        assert!(PartitionGrid::new(4).is_err());
    }

    #[test]
    fn equator_energy_and_length() {
        let s = sphere();
        let r = s.scale();
        let c = equator(&s, 64, 16);
        assert!(c.is_constant_speed());
        assert!((c.energy() / (TAU * r * r) - 1.0).abs() < 1e-6);
        assert!((c.energy() - 1024.0 * PI).abs() < 1e-2);
        assert!((c.length() / (TAU * r) - 1.0).abs() < 1e-6);
        let e = c.energy();
        let len = c.length();
        assert!((e - len * len / TAU).abs() < 1e-9 * e);
    }

    #[test]
    fn point_curve_functionals_vanish() {
        let c = DiscreteCurve::point(8, 4, Vec3::new(1.0, 2.0, 3.0)).unwrap();
        assert_eq!(c.energy(), 0.0);
        assert_eq!(c.length(), 0.0);
        assert_eq!(c.speed(), 0.0);
    }

    #[test]
    fn from_samples_equator() {
        let s = sphere();
        let r = s.scale();
        let pts: Vec<Vec3> = (0..256)
            .map(|i| {
                let a = TAU * i as f64 / 256.0;
                Vec3::new(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect();
        let c = DiscreteCurve::from_samples(&s, &pts, 64, 16).unwrap();
        assert!(c.is_constant_speed());
        // Projection puts every resampled point back on the equator, so the
        // speed is that of the inscribed 2048-gon.
        let poly = 2048.0 * 2.0 * r * (PI / 2048.0).sin();
        assert!((c.speed() - poly / TAU).abs() < 1e-9 * r);
        assert!((c.speed() / r - 1.0).abs() < 1e-6);
        assert_eq!(c.node(0), pts[0]);
    }

    #[test]
    fn from_samples_point_and_too_long() {
        let s = sphere();
        let p = Vec3::new(0.0, 0.0, s.scale());
        let c = DiscreteCurve::from_samples(&s, &alloc::vec![p; 32], 8, 4).unwrap();
        assert_eq!(c.length(), 0.0);
        // A latitude circle wound many times exceeds 2πL.
        let r = s.scale();
        let pts: Vec<Vec3> = (0..400)
            .map(|i| {
                let a = 20.0 * TAU * i as f64 / 400.0;
                Vec3::new(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect();
        assert!(matches!(
            DiscreteCurve::from_samples(&s, &pts, 8, 4),
            Err(Error::LipschitzExceeded { .. })
        ));
    }

    #[test]
    fn reparametrization_of_speed_profile() {
        let s = sphere();
        let r = s.scale();
        // phi' = 1 + 0.5 sin x, phi(0) = 0, phi(2π) = 2π.
        let c = DiscreteCurve::from_fn(64, 16, |x| {
            let phi = x - 0.5 * x.cos() + 0.5;
            Vec3::new(r * phi.cos(), r * phi.sin(), 0.0)
        })
        .unwrap();
        assert!(!c.is_constant_speed());
        let base = TAU * r * r;
        assert!((c.energy() / (base * 9.0 / 8.0) - 1.0).abs() < 1e-4);
        let u = reparametrize_constant_speed(&s, &c).unwrap();
        assert!(u.is_constant_speed());
        assert!((u.energy() / base - 1.0).abs() < 1e-5);
        assert!((u.length() - c.length()).abs() < 1e-6 * c.length());
        assert_eq!(u.sample(0), c.sample(0));
    }

    #[test]
    fn reparametrization_is_idempotent() {
        let s = sphere();
        let c = equator(&s, 16, 8);
        let u = reparametrize_constant_speed(&s, &c).unwrap();
        for (a, b) in c.samples().iter().zip(u.samples()) {
            assert!(a.dist(*b) < 1e-9);
        }
        let p = DiscreteCurve::point(8, 4, Vec3::new(0.0, 0.0, s.scale())).unwrap();
        assert_eq!(reparametrize_constant_speed(&s, &p).unwrap(), p);
    }

    #[test]
    fn w12_examples() {
        let s = sphere();
        let c = equator(&s, 16, 8);
        assert_eq!(w12_distance(&c, &c).unwrap().total, 0.0);
        let p = Vec3::new(1.0, 2.0, 2.0);
        let q = Vec3::new(0.0, 0.0, 0.0);
        let a = DiscreteCurve::point(16, 8, p).unwrap();
        let b = DiscreteCurve::point(16, 8, q).unwrap();
        let d = w12_distance(&a, &b).unwrap();
        assert!((d.total - TAU.sqrt() * 3.0).abs() < 1e-12);
        let other = DiscreteCurve::point(8, 8, p).unwrap();
        assert!(matches!(w12_distance(&a, &other), Err(Error::GridMismatch)));
    }

    #[test]
    fn wirtinger_examples() {
        let n = 2048;
        let sample = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
            (0..=n).map(|i| if i == n { 0.0 } else { f(TAU * i as f64 / n as f64) }).collect()
        };
        let g = wirtinger_gap(&sample(&|t| (t / 2.0).sin())).unwrap();
        assert!(g.abs() < 1e-5 && g >= 0.0);
        assert_eq!(wirtinger_gap(&alloc::vec![0.0; 10]).unwrap(), 0.0);
        let g = wirtinger_gap(&sample(&|t| t.sin())).unwrap();
        assert!((g - 3.0 * PI).abs() < 1e-4);
        assert!(matches!(wirtinger_gap(&[1.0, 0.0, 0.0]), Err(Error::EndpointNotZero)));
    }

    #[test]
    fn evaluate_examples() {
        let s = sphere();
        let r = s.scale();
        let c = equator(&s, 16, 8);
        assert_eq!(evaluate(&s, &c, c.grid().node(3)).unwrap().0, c.node(3));
        let anti = evaluate(&s, &c, PI).unwrap().0;
        assert!((anti - Vec3::new(-r, 0.0, 0.0)).norm() < 1e-9);
        let mid = evaluate(&s, &c, 0.5 * c.step()).unwrap().0;
        let a = 0.5 * c.step();
        assert!((mid - Vec3::new(r * a.cos(), r * a.sin(), 0.0)).norm() < 1e-9);
        let p = DiscreteCurve::point(8, 4, Vec3::new(0.0, 0.0, r)).unwrap();
        assert_eq!(evaluate(&s, &p, 1.234).unwrap().0, Vec3::new(0.0, 0.0, r));
    }
}
