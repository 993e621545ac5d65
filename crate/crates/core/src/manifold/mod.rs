//! Embedded surfaces, their normalization, and geodesics.
//!
//! A [`Surface`] is one of the built-in radial graphs over the round sphere,
//! rescaled so that its second fundamental form satisfies `sup |A| ≤ 1/16`.
//! After scaling, every geodesic ball of radius `4π` is strictly convex and
//! short chords bound intrinsic distance (`dist ≤ 2|x − y|` for `|x − y| ≤ 1`).

mod geodesic;
mod shape;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2, TAU};

#[allow(unused_imports)]
use num_traits::Float;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

pub use geodesic::{geodesic_bvp, geodesic_ivp, intrinsic_distance, GeodesicSegment};
pub use shape::{direction, Harmonic};
pub(crate) use shape::Shape;

use crate::error::{Error, Result};
use crate::math::{solve_dense, Vec3};
use crate::tolerances::Tolerances;

/// Grid resolution (per parameter direction) for curvature certification.
pub const CURVATURE_GRID: usize = 256;
/// Multiplicative margin applied to grid-certified curvature bounds.
pub const CURVATURE_MARGIN: f64 = 1.01;
/// Largest perturbation amplitude accepted for the perturbed sphere.
pub const MAX_PERTURBATION: f64 = 0.1;
/// Target bound on the second fundamental form after scaling.
pub const SECOND_FORM_TARGET: f64 = 1.0 / 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SurfaceKind {
    Sphere,
    Ellipsoid,
    PerturbedSphere,
}

/// User-facing description of a surface before normalization.
///
/// `params` holds the radius (sphere), the semi-axes `a, b, c` (ellipsoid),
/// or the perturbation amplitude followed by an optional harmonic degree
/// 2 or 3 (perturbed sphere, radial graph `1 + ε Y(u)`).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    pub params: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(default = "default_ambient_dim"))]
    pub ambient_dim: usize,
}

#[cfg(feature = "serde")]
fn default_ambient_dim() -> usize {
    3
}

impl SurfaceSpec {
    pub fn sphere(radius: f64) -> Self {
        Self { kind: SurfaceKind::Sphere, params: alloc::vec![radius], ambient_dim: 3 }
    }

    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Self {
        Self { kind: SurfaceKind::Ellipsoid, params: alloc::vec![a, b, c], ambient_dim: 3 }
    }

    pub fn perturbed_sphere(amplitude: f64) -> Self {
        Self { kind: SurfaceKind::PerturbedSphere, params: alloc::vec![amplitude], ambient_dim: 3 }
    }

    /// The unscaled shape described by this spec.
    pub(crate) fn shape(&self) -> Result<Shape> {
        if self.ambient_dim != 3 {
            return Err(Error::InvalidSpec(format!(
                "ambient_dim must be 3, got {}",
                self.ambient_dim
            )));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match (self.kind, self.params.as_slice()) {
            (SurfaceKind::Sphere, &[r]) if positive(r) => Ok(Shape::Sphere { radius: r }),
            (SurfaceKind::Ellipsoid, &[a, b, c]) if positive(a) && positive(b) && positive(c) => {
                Ok(Shape::Ellipsoid { axes: Vec3::new(a, b, c) })
            }
            (SurfaceKind::PerturbedSphere, params) if matches!(params.len(), 1 | 2) => {
                let amplitude = params[0];
                let harmonic = match params.get(1).copied() {
                    None => Harmonic::Quadratic,
                    Some(d) if d == 2.0 => Harmonic::Quadratic,
                    Some(d) if d == 3.0 => Harmonic::Cubic,
                    Some(d) => {
                        return Err(Error::InvalidSpec(format!(
                            "perturbation degree must be 2 or 3, got {d}"
                        )))
                    }
                };
                if !amplitude.is_finite() {
                    return Err(Error::InvalidSpec(String::from("non-finite amplitude")));
                }
                if amplitude.abs() > MAX_PERTURBATION {
                    return Err(Error::PerturbationTooLarge(format!(
                        "amplitude {amplitude} exceeds {MAX_PERTURBATION}"
                    )));
                }
                Ok(Shape::Perturbed { radius: 1.0, amplitude, harmonic })
            }
            (kind, params) => Err(Error::InvalidSpec(format!(
                "{kind:?} does not accept parameters {params:?}"
            ))),
        }
    }
}

/// A point on a surface, in normalized ambient coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint(pub Vec3);

impl SurfacePoint {
    pub fn coords(self) -> Vec3 {
        self.0
    }
}

/// A tangent vector attached to a surface point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVector {
    pub base: SurfacePoint,
    pub dir: Vec3,
}

/// Curvature and chord-arc certificate computed by [`normalize`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    /// Sup of the Gaussian curvature after scaling.
    pub curvature_bound: f64,
    /// Lower bound for the conjugate radius, `π / sqrt(K_max)`.
    pub conjugate_radius: f64,
    /// Largest observed `dist / |x − y|` over sampled pairs with `|x − y| ≤ 1`.
    pub chord_ratio: f64,
}

/// A normalized surface.
#[derive(Clone, Debug, PartialEq)]
pub struct Surface {
    spec: SurfaceSpec,
    scale: f64,
    second_form_bound: f64,
    area: f64,
    certificate: Certificate,
    pub(crate) shape: Shape,
    tolerances: Tolerances,
}

/// Scales `spec` so that `sup |A| ≤ 1/16`, then certifies curvature,
/// conjugate radius and the chord/distance comparison on samples.
pub fn normalize(spec: &SurfaceSpec) -> Result<Surface> {
    normalize_with(spec, Tolerances::default())
}

pub fn normalize_with(spec: &SurfaceSpec, tolerances: Tolerances) -> Result<Surface> {
    let unit = spec.shape()?;
    let scale = match unit {
        Shape::Sphere { radius } => SQRT_2 / (radius * SECOND_FORM_TARGET),
        _ => {
            check_embedding(&unit)?;
            let (sup_a, _) = grid_curvature(&unit);
            sup_a * CURVATURE_MARGIN / SECOND_FORM_TARGET
        }
    };
    let shape = unit.scaled(scale);
    let (sup_a, sup_k) = match shape {
        Shape::Sphere { radius } => (SQRT_2 / radius, 1.0 / (radius * radius)),
        _ => grid_curvature(&shape),
    };
    let mut surface = Surface {
        spec: spec.clone(),
        scale,
        second_form_bound: sup_a,
        area: 0.0,
        certificate: Certificate {
            curvature_bound: sup_k,
            conjugate_radius: if sup_k > 0.0 { PI / sup_k.sqrt() } else { f64::INFINITY },
            chord_ratio: 0.0,
        },
        shape,
        tolerances,
    };
    if sup_a > SECOND_FORM_TARGET * (1.0 + 1e-12) {
        return Err(Error::PerturbationTooLarge(format!(
            "second fundamental form bound {sup_a} exceeds 1/16 after scaling"
        )));
    }
    if sup_k > 1.0 / 64.0 || surface.certificate.conjugate_radius < 8.0 * PI {
        return Err(Error::PerturbationTooLarge(format!(
            "curvature bound {sup_k} violates the 1/64 ceiling"
        )));
    }
    surface.area = surface.parametric_area(512);
    surface.certificate.chord_ratio = surface.check_chord_distance()?;
    Ok(surface)
}

/// Sup of `|A|` and of the Gaussian curvature over the chart grid.
fn grid_curvature(shape: &Shape) -> (f64, f64) {
    let n = CURVATURE_GRID;
    let mut sup_a = 0.0f64;
    let mut sup_k = f64::NEG_INFINITY;
    for i in 0..n {
        let theta = PI * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let phi = TAU * j as f64 / n as f64;
            let u = direction(theta, phi);
            let (a, k) = shape.curvatures(u * shape.radial(u));
            sup_a = sup_a.max(a);
            sup_k = sup_k.max(k);
        }
    }
    (sup_a, sup_k)
}

/// The radial chart must stay a transversal graph: `r > 0` and `⟨∇F, u⟩ > 0`.
fn check_embedding(shape: &Shape) -> Result<()> {
    let n = CURVATURE_GRID;
    for i in 0..n {
        let theta = PI * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let u = direction(theta, TAU * j as f64 / n as f64);
            let r = shape.radial(u);
            let g = shape.gradient(u * r);
            if !(r > 0.0) || !(g.dot(u) > 1e-3 * g.norm()) {
                return Err(Error::PerturbationTooLarge(format!(
                    "radial chart degenerates at theta={theta}"
                )));
            }
        }
    }
    Ok(())
}

impl Surface {
    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    /// The factor applied to the ambient embedding.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Certified `sup |A|` after scaling.
    pub fn second_form_bound(&self) -> f64 {
        self.second_form_bound
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// Total area by parametric quadrature over the radial chart.
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn kind(&self) -> SurfaceKind {
        self.spec.kind
    }

    /// Scaled semi-axes, for ellipsoids and spheres.
    pub fn semi_axes(&self) -> Option<Vec3> {
        match self.shape {
            Shape::Sphere { radius } => Some(Vec3::new(radius, radius, radius)),
            Shape::Ellipsoid { axes } => Some(axes),
            Shape::Perturbed { .. } => None,
        }
    }

    /// Length below which a curve is treated as a point curve.
    pub fn collapse_length(&self) -> f64 {
        self.tolerances.collapse * self.scale
    }

    /// Point of the radial chart in unit direction `u`.
    pub fn chart(&self, u: Vec3) -> Vec3 {
        u * self.shape.radial(u)
    }

    /// Point of the radial chart at polar angle `theta`, azimuth `phi`.
    pub fn chart_angles(&self, theta: f64, phi: f64) -> Vec3 {
        self.chart(direction(theta, phi))
    }

    /// Outward unit normal at a point on (or near) the surface.
    pub fn normal(&self, p: Vec3) -> Vec3 {
        let g = self.shape.gradient(p);
        g / g.norm()
    }

    /// Signed level-set distance estimate `F / |∇F|`.
    pub fn level_distance(&self, p: Vec3) -> f64 {
        self.shape.level(p) / self.shape.gradient(p).norm()
    }

    /// `(|A|, K)` at a surface point.
    pub fn curvatures(&self, p: Vec3) -> (f64, f64) {
        self.shape.curvatures(p)
    }

    /// Nearest-point projection of an ambient point onto the surface.
    pub fn project(&self, p: Vec3) -> Result<SurfacePoint> {
        if let Shape::Sphere { radius } = self.shape {
            return match p.normalized() {
                Some(u) => Ok(SurfacePoint(u * radius)),
                None => Err(Error::ProjectionDiverged { residual: radius }),
            };
        }
        let u = p.normalized().ok_or(Error::ProjectionDiverged { residual: f64::INFINITY })?;
        let mut y = self.chart(u);
        let g0 = self.shape.gradient(y);
        let mut lambda = (p - y).dot(g0) / g0.norm_sq();
        let tol = self.tolerances.tol_surf;
        let step_floor = 1e-14 * self.scale;
        for _ in 0..self.tolerances.max_newton {
            let (f, g, h) = self.shape.jet(y);
            // Stationarity of |p − y|² on F = 0: y + λ∇F(y) − p = 0.
            let r = y + g * lambda - p;
            let mut a = [[0.0; 4]; 4];
            for i in 0..3 {
                for j in 0..3 {
                    a[i][j] = lambda * h.0[i][j] + if i == j { 1.0 } else { 0.0 };
                }
                a[i][3] = g[i];
                a[3][i] = g[i];
            }
            let b = [-r[0], -r[1], -r[2], -f];
            let Some(d) = solve_dense(a, b) else { break };
            let dy = Vec3::new(d[0], d[1], d[2]);
            y += dy;
            lambda += d[3];
            if dy.norm() <= step_floor {
                break;
            }
        }
        let residual = self.level_distance(y).abs();
        let tangential = {
            let n = self.normal(y);
            let d = p - y;
            (d - n * d.dot(n)).norm()
        };
        if residual < tol && tangential < tol.max(1e-12 * self.scale) * (1.0 + (p - y).norm()) {
            Ok(SurfacePoint(y))
        } else {
            Err(Error::ProjectionDiverged { residual: residual.max(tangential) })
        }
    }

    /// Projection used on points already within a hair of the surface:
    /// Newton steps along the gradient onto the level set.
    #[inline]
    pub(crate) fn snap(&self, mut p: Vec3) -> Vec3 {
        if let Shape::Sphere { radius } = self.shape {
            return p * (radius / p.norm());
        }
        for _ in 0..2 {
            let (f, g, _) = self.shape.jet(p);
            p -= g * (f / g.norm_sq());
        }
        p
    }

    /// Removes the normal component of `v` at `p`.
    pub fn tangent_project(&self, p: SurfacePoint, v: Vec3) -> TangentVector {
        let n = self.normal(p.0);
        TangentVector { base: p, dir: v - n * v.dot(n) }
    }

    /// Samples chord pairs with `|x − y| ≤ 1` and returns the largest
    /// observed `dist(x, y) / |x − y|`, failing when it exceeds 2.
    fn check_chord_distance(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        let n_theta = 9;
        let n_phi = 8;
        for i in 0..n_theta {
            let theta = PI * (i as f64 + 0.5) / n_theta as f64;
            for j in 0..n_phi {
                let phi = TAU * (j as f64 + 0.25 * i as f64) / n_phi as f64;
                let x = self.chart_angles(theta, phi);
                let n = self.normal(x);
                let e1 = n.any_orthogonal();
                let e2 = n.cross(e1);
                for (k, chord) in [0.25, 0.6, 0.95].into_iter().enumerate() {
                    let angle = 0.9 * (k + j) as f64;
                    let dir = e1 * angle.cos() + e2 * angle.sin();
                    let mut y = self.project(x + dir * chord)?.0;
                    let d = (y - x).norm();
                    if d > 1.0 {
                        y = self.project(x + (y - x) * (0.99 / d))?.0;
                    }
                    let d = (y - x).norm();
                    let dist = intrinsic_distance(self, SurfacePoint(x), SurfacePoint(y))?;
                    worst = worst.max(dist / d);
                }
            }
        }
        if worst > 2.0 {
            return Err(Error::PerturbationTooLarge(format!(
                "sampled dist/chord ratio {worst} exceeds 2"
            )));
        }
        Ok(worst)
    }

    /// Area of the surface by summing chart quadrilaterals on an
    /// `n × 2n` polar grid.
    fn parametric_area(&self, n: usize) -> f64 {
        let m = 2 * n;
        let mut total = 0.0;
        let mut prev: Vec<Vec3> = (0..m).map(|j| self.chart_angles(0.0, TAU * j as f64 / m as f64)).collect();
        for i in 1..=n {
            let theta = PI * i as f64 / n as f64;
            let row: Vec<Vec3> =
                (0..m).map(|j| self.chart_angles(theta, TAU * j as f64 / m as f64)).collect();
            for j in 0..m {
                let jn = (j + 1) % m;
                let d1 = row[jn] - prev[j];
                let d2 = prev[jn] - row[j];
                total += 0.5 * d1.cross(d2).norm();
            }
            prev = row;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_sphere_scale_is_sixteen_root_two() {
        let s = normalize(&SurfaceSpec::sphere(1.0)).unwrap();
        assert!((s.scale() - 16.0 * SQRT_2).abs() < 1e-12);
        assert!((s.second_form_bound() - 1.0 / 16.0).abs() < 1e-15);
        assert!((s.certificate().conjugate_radius - PI * 16.0 * SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn normalized_sphere_is_fixed_point() {
        let s = normalize(&SurfaceSpec::sphere(16.0 * SQRT_2)).unwrap();
        assert!((s.scale() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_area_quadrature() {
        let s = normalize(&SurfaceSpec::sphere(1.0)).unwrap();
        let r = s.scale();
        assert!((s.area() / (4.0 * PI * r * r) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(matches!(normalize(&SurfaceSpec::sphere(-1.0)), Err(Error::InvalidSpec(_))));
        let mut bad = SurfaceSpec::sphere(1.0);
        bad.ambient_dim = 4;
        assert!(matches!(normalize(&bad), Err(Error::InvalidSpec(_))));
        assert!(matches!(
            normalize(&SurfaceSpec::perturbed_sphere(0.3)),
            Err(Error::PerturbationTooLarge(_))
        ));
    }

    #[test]
    fn sphere_projection_is_radial() {
        let s = normalize(&SurfaceSpec::sphere(1.0)).unwrap();
        let r = s.scale();
        let p = s.project(Vec3::new(2.0 * r, 0.0, 0.0)).unwrap().0;
        assert_eq!(p, Vec3::new(r, 0.0, 0.0));
        let on = Vec3::new(0.0, r, 0.0);
        assert_eq!(s.project(on).unwrap().0, on);
    }

    #[test]
    fn tangent_projection_examples() {
        let s = normalize(&SurfaceSpec::sphere(1.0)).unwrap();
        let p = SurfacePoint(Vec3::new(s.scale(), 0.0, 0.0));
        assert_eq!(s.tangent_project(p, Vec3::new(1.0, 1.0, 0.0)).dir, Vec3::new(0.0, 1.0, 0.0));
        let t = Vec3::new(0.0, 0.3, -0.2);
        assert_eq!(s.tangent_project(p, t).dir, t);
        assert!(s.tangent_project(p, s.normal(p.0)).dir.norm() < 1e-15);
    }
}
