//! Birkhoff curve shortening on embedded surfaces.
//!
//! The crate builds closed piecewise-geodesic curves on normalized surfaces,
//! applies the Birkhoff map Ψ, tightens sweepouts slice by slice and reports
//! an upper bound for the min-max width together with its near-maximal
//! slices. It is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod curve;
pub mod error;
pub mod exec;
pub mod manifold;
pub mod math;
pub mod shortening;
pub mod sweepout;
pub mod tolerances;

pub use curve::{w12_distance, DiscreteCurve, PartitionGrid};
pub use error::{Error, PartialResult, Result};
pub use exec::{Sequential, SliceExecutor};
pub use manifold::{normalize, normalize_with, Surface, SurfaceKind, SurfacePoint, SurfaceSpec};
pub use math::Vec3;
pub use shortening::{psi, shorten_to_geodesic, PsiReport, ShorteningTrace};
pub use sweepout::{Sweepout, WidthEstimate};
pub use tolerances::Tolerances;
