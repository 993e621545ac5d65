//! Implicit level-set descriptions `F(x) = 0` of the built-in surfaces.
//!
//! Every built-in is also a radial graph over the unit sphere, which gives a
//! global chart `u ↦ r(u) u` used for sampling and as a projection seed.

#[allow(unused_imports)]
use num_traits::Float;

use crate::math::{Mat3, Vec3};

/// Fixed low-order harmonic used by the perturbed sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Harmonic {
    /// `½(3z² − |u|²) + xy + xz`
    Quadratic,
    /// `z³ − 1.5 z x² − 1.5 z y² + 3xyz`
    Cubic,
}

impl Harmonic {
    /// Value, gradient and Hessian of the polynomial in ambient coordinates.
    fn jet(self, u: Vec3) -> (f64, Vec3, Mat3) {
        let [x, y, z] = u.0;
        match self {
            Harmonic::Quadratic => {
                let b = Mat3([[-0.5, 0.5, 0.5], [0.5, -0.5, 0.0], [0.5, 0.0, 1.0]]);
                let g = b.mul_vec(u) * 2.0;
                (b.quad(u), g, b.scale(2.0))
            }
            Harmonic::Cubic => {
                let p = z * z * z - 1.5 * z * x * x - 1.5 * z * y * y + 3.0 * x * y * z;
                let g = Vec3::new(
                    -3.0 * z * x + 3.0 * y * z,
                    -3.0 * z * y + 3.0 * x * z,
                    3.0 * z * z - 1.5 * x * x - 1.5 * y * y + 3.0 * x * y,
                );
                let h = Mat3([
                    [-3.0 * z, 3.0 * z, -3.0 * x + 3.0 * y],
                    [3.0 * z, -3.0 * z, -3.0 * y + 3.0 * x],
                    [-3.0 * x + 3.0 * y, -3.0 * y + 3.0 * x, 6.0 * z],
                ]);
                (p, g, h)
            }
        }
    }

    pub fn value(self, u: Vec3) -> f64 {
        self.jet(u).0
    }
}

/// A built-in surface at a fixed ambient size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Shape {
    Sphere { radius: f64 },
    Ellipsoid { axes: Vec3 },
    Perturbed { radius: f64, amplitude: f64, harmonic: Harmonic },
}

impl Shape {
    pub fn scaled(self, s: f64) -> Shape {
        match self {
            Shape::Sphere { radius } => Shape::Sphere { radius: radius * s },
            Shape::Ellipsoid { axes } => Shape::Ellipsoid { axes: axes * s },
            Shape::Perturbed { radius, amplitude, harmonic } => Shape::Perturbed {
                radius: radius * s,
                amplitude,
                harmonic,
            },
        }
    }

    /// `(F, ∇F, ∇²F)` at an ambient point.
    pub fn jet(&self, x: Vec3) -> (f64, Vec3, Mat3) {
        match *self {
            Shape::Sphere { radius } => (
                0.5 * (x.norm_sq() - radius * radius),
                x,
                Mat3::identity(),
            ),
            Shape::Ellipsoid { axes } => {
                let inv = Vec3::new(
                    1.0 / (axes[0] * axes[0]),
                    1.0 / (axes[1] * axes[1]),
                    1.0 / (axes[2] * axes[2]),
                );
                let g = Vec3::new(x[0] * inv[0], x[1] * inv[1], x[2] * inv[2]);
                (0.5 * (x.dot(g) - 1.0), g, Mat3::diagonal(inv))
            }
            Shape::Perturbed { radius, amplitude, harmonic } => {
                let rho = x.norm();
                let u = x / rho;
                let (p, gu, hu) = harmonic.jet(u);
                let proj = (Mat3::identity() - Mat3::outer(u, u)).scale(1.0 / rho);
                let gdotu = gu.dot(u);
                let y_grad = (gu - u * gdotu) / rho;
                let mut y_hess = proj.mul_mat(&hu).mul_mat(&proj);
                let inv_rho2 = 1.0 / (rho * rho);
                for j in 0..3 {
                    for k in 0..3 {
                        let delta = if j == k { 1.0 } else { 0.0 };
                        y_hess.0[j][k] += (-gu[j] * u[k] - gu[k] * u[j] - gdotu * delta
                            + 3.0 * gdotu * u[j] * u[k])
                            * inv_rho2;
                    }
                }
                let k = radius * amplitude;
                let f = rho - radius * (1.0 + amplitude * p);
                let g = u - y_grad * k;
                let h = proj - y_hess.scale(k);
                (f, g, h)
            }
        }
    }

    pub fn level(&self, x: Vec3) -> f64 {
        match *self {
            Shape::Sphere { radius } => 0.5 * (x.norm_sq() - radius * radius),
            Shape::Ellipsoid { axes } => {
                0.5 * ((x[0] / axes[0]).powi(2) + (x[1] / axes[1]).powi(2) + (x[2] / axes[2]).powi(2)
                    - 1.0)
            }
            Shape::Perturbed { .. } => self.jet(x).0,
        }
    }

    pub fn gradient(&self, x: Vec3) -> Vec3 {
        match *self {
            Shape::Sphere { .. } => x,
            Shape::Ellipsoid { axes } => Vec3::new(
                x[0] / (axes[0] * axes[0]),
                x[1] / (axes[1] * axes[1]),
                x[2] / (axes[2] * axes[2]),
            ),
            Shape::Perturbed { .. } => self.jet(x).1,
        }
    }

    /// Acceleration of a geodesic through `x` with velocity `v`: the unique
    /// normal vector keeping `F` constant to second order.
    #[inline]
    pub fn geodesic_accel(&self, x: Vec3, v: Vec3) -> Vec3 {
        match *self {
            Shape::Sphere { .. } => x * (-v.norm_sq() / x.norm_sq()),
            Shape::Ellipsoid { axes } => {
                let inv = Vec3::new(
                    1.0 / (axes[0] * axes[0]),
                    1.0 / (axes[1] * axes[1]),
                    1.0 / (axes[2] * axes[2]),
                );
                let g = Vec3::new(x[0] * inv[0], x[1] * inv[1], x[2] * inv[2]);
                let q = v[0] * v[0] * inv[0] + v[1] * v[1] * inv[1] + v[2] * v[2] * inv[2];
                g * (-q / g.norm_sq())
            }
            Shape::Perturbed { .. } => {
                let (_, g, h) = self.jet(x);
                g * (-h.quad(v) / g.norm_sq())
            }
        }
    }

    /// Radius of the radial graph in the unit direction `u`.
    pub fn radial(&self, u: Vec3) -> f64 {
        match *self {
            Shape::Sphere { radius } => radius,
            Shape::Ellipsoid { axes } => {
                1.0 / ((u[0] / axes[0]).powi(2) + (u[1] / axes[1]).powi(2) + (u[2] / axes[2]).powi(2))
                    .sqrt()
            }
            Shape::Perturbed { radius, amplitude, harmonic } => {
                radius * (1.0 + amplitude * harmonic.value(u))
            }
        }
    }

    /// Norm of the second fundamental form and Gaussian curvature at a point
    /// on the surface.
    pub fn curvatures(&self, x: Vec3) -> (f64, f64) {
        let (_, g, h) = self.jet(x);
        let gn = g.norm();
        let n = g / gn;
        let p = Mat3::identity() - Mat3::outer(n, n);
        let shape_op = p.mul_mat(&h).mul_mat(&p).scale(1.0 / gn);
        let trace = shape_op.0[0][0] + shape_op.0[1][1] + shape_op.0[2][2];
        let frob = shape_op.frobenius_sq();
        (frob.sqrt(), 0.5 * (trace * trace - frob))
    }
}

/// Unit direction at polar angle `theta` and azimuth `phi`.
#[inline]
pub fn direction(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(shape: Shape, x: Vec3) {
        let (_, g, h) = shape.jet(x);
        let eps = 1e-5;
        for i in 0..3 {
            let mut e = Vec3::ZERO;
            e.0[i] = eps;
            let fd_g = (shape.jet(x + e).0 - shape.jet(x - e).0) / (2.0 * eps);
            assert!((fd_g - g[i]).abs() < 1e-7 * (1.0 + g.norm()), "grad {i}");
            let fd_h = (shape.jet(x + e).1 - shape.jet(x - e).1) / (2.0 * eps);
            for j in 0..3 {
                assert!((fd_h[j] - h.0[j][i]).abs() < 1e-6 * (1.0 + fd_h.norm()), "hess {i}{j}");
            }
        }
    }

    #[test]
    fn perturbed_jet_matches_finite_differences() {
        for harmonic in [Harmonic::Quadratic, Harmonic::Cubic] {
            let shape = Shape::Perturbed { radius: 1.3, amplitude: 0.08, harmonic };
            fd_check(shape, Vec3::new(0.3, -0.7, 0.9));
            fd_check(shape, Vec3::new(-1.1, 0.2, 0.05));
        }
    }

    #[test]
    fn ellipsoid_jet_matches_finite_differences() {
        fd_check(Shape::Ellipsoid { axes: Vec3::new(1.0, 1.1, 1.2) }, Vec3::new(0.4, 0.5, 0.6));
    }

    #[test]
    fn radial_point_lies_on_level_set() {
        let shapes = [
            Shape::Sphere { radius: 2.0 },
            Shape::Ellipsoid { axes: Vec3::new(1.0, 1.1, 1.2) },
            Shape::Perturbed { radius: 1.0, amplitude: 0.1, harmonic: Harmonic::Quadratic },
        ];
        for s in shapes {
            let u = direction(0.7, 2.1);
            assert!(s.level(u * s.radial(u)).abs() < 1e-14);
        }
    }

    #[test]
    fn sphere_curvature_norm_is_root_two_over_radius() {
        let (a, k) = Shape::Sphere { radius: 2.0 }.curvatures(Vec3::new(0.0, 2.0, 0.0));
        assert!((a - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((k - 0.25).abs() < 1e-15);
    }
}
