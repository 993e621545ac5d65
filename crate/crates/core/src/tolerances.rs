//! Solver and quadrature tolerances.
//!
//! Lengths are in normalized (post-scaling) ambient units. Fields documented
//! as relative are multiplied by the magnitude of the compared quantity.

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Tolerances shared by every numerical routine on a [`crate::Surface`].
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Tolerances {
    /// Distance from the surface accepted for projected points.
    pub tol_surf: f64,
    /// Normal component accepted for tangent vectors.
    pub tol_tan: f64,
    /// Integrator accuracy target for geodesics.
    pub tol_geo: f64,
    /// Endpoint miss accepted by the shooting solver.
    pub tol_bvp: f64,
    /// Relative speed drift accepted along an integrated geodesic.
    pub tol_speed: f64,
    /// Newton iteration cap for projection and shooting.
    pub max_newton: usize,
    /// Relative slack for discrete inequalities between quadratures.
    pub tol_quad: f64,
    /// Relative spread of sample spacing accepted as constant speed.
    pub tol_param: f64,
    /// W^{1,2} agreement required between the three- and four-step maps.
    pub tol_equiv: f64,
    /// Window stall threshold for tightening, in units of scale².
    pub stall_tol: f64,
    /// Curves shorter than this many scale units are point curves.
    pub collapse: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_surf: 1e-10,
            tol_tan: 1e-10,
            tol_geo: 1e-8,
            tol_bvp: 1e-8,
            tol_speed: 1e-6,
            max_newton: 50,
            tol_quad: 1e-9,
            tol_param: 1e-6,
            tol_equiv: 1e-4,
            stall_tol: 1e-6,
            collapse: 1e-6,
        }
    }
}

impl Tolerances {
    /// Names of the fields whose value is not strictly positive and finite.
    pub fn invalid_fields(&self) -> alloc::vec::Vec<&'static str> {
        let reals = [
            ("tol_surf", self.tol_surf),
            ("tol_tan", self.tol_tan),
            ("tol_geo", self.tol_geo),
            ("tol_bvp", self.tol_bvp),
            ("tol_speed", self.tol_speed),
            ("tol_quad", self.tol_quad),
            ("tol_param", self.tol_param),
            ("tol_equiv", self.tol_equiv),
            ("stall_tol", self.stall_tol),
            ("collapse", self.collapse),
        ];
        let mut bad: alloc::vec::Vec<_> = reals
            .iter()
            .filter(|(_, v)| !(v.is_finite() && *v > 0.0))
            .map(|(n, _)| *n)
            .collect();
        if self.max_newton == 0 {
            bad.push("max_newton");
        }
        bad
    }
}
