//! Sweepouts by closed curves, tightening by slice-wise Ψ and the width.
//!
//! A sweepout is a list of `K` slices at `t_k = −1 + 2k/(K − 1)` whose end
//! slices are point curves. Tightening never searches the homotopy class; it
//! iterates Ψ on one sweepout, so the reported width is an upper bound.

mod fit;

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)]
use num_traits::Float;

pub use fit::great_circle_fit;

use crate::curve::{reparametrize_constant_speed, w12_distance, DiscreteCurve};
use crate::error::{Error, PartialResult, Result};
use crate::exec::{Sequential, SliceExecutor};
use crate::manifold::{direction, Surface, SurfaceKind};
use crate::math::Vec3;
use crate::shortening::{even_replacement, psi};

/// Smallest admissible slice count.
pub const MIN_SLICES: usize = 9;
/// Window, in iterations, of the stall test.
pub const STALL_WINDOW: usize = 10;
/// Iterations between recorded energy profiles.
pub const CHECKPOINT_EVERY: usize = 50;
/// Largest distance from an integer accepted by [`degree`].
const DEGREE_SLACK: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct Sweepout {
    slices: Vec<DiscreteCurve>,
}

impl Sweepout {
    /// Checks slice count, the shared grid and the point-curve ends.
    pub fn new(surface: &Surface, slices: Vec<DiscreteCurve>) -> Result<Self> {
        let k = slices.len();
        if k < MIN_SLICES || k % 2 == 0 {
            return Err(Error::InvalidSpec(format!("slice count {k} must be odd and at least {MIN_SLICES}")));
        }
        let (grid, m) = (slices[0].grid(), slices[0].m());
        if slices.iter().any(|s| s.grid() != grid || s.m() != m) {
            return Err(Error::GridMismatch);
        }
        let threshold = surface.collapse_length();
        if !slices[0].is_point(threshold) || !slices[k - 1].is_point(threshold) {
            return Err(Error::PreconditionViolated("end slices must be point curves".into()));
        }
        Ok(Self { slices })
    }

    pub fn slices(&self) -> &[DiscreteCurve] {
        &self.slices
    }

    pub fn into_slices(self) -> Vec<DiscreteCurve> {
        self.slices
    }

    /// Number of slices `K`.
    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn l(&self) -> usize {
        self.slices[0].l()
    }

    pub fn m(&self) -> usize {
        self.slices[0].m()
    }

    /// Slice parameter `t_k`.
    pub fn parameter(&self, k: usize) -> f64 {
        -1.0 + 2.0 * k as f64 / (self.len() - 1) as f64
    }

    pub fn energies(&self) -> Vec<f64> {
        self.slices.iter().map(DiscreteCurve::energy).collect()
    }

    /// Largest W^{1,2} distance between neighbouring slices.
    pub fn max_adjacent_step(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for w in self.slices.windows(2) {
            worst = worst.max(w12_distance(&w[0], &w[1])?.total);
        }
        Ok(worst)
    }

    fn map_slices<E: SliceExecutor>(
        &self,
        surface: &Surface,
        exec: &E,
        f: impl Fn(&DiscreteCurve) -> Result<DiscreteCurve> + Sync + Send,
    ) -> Result<Sweepout> {
        let threshold = surface.collapse_length();
        let out = exec.map(&self.slices, |s| if s.is_point(threshold) { Ok(s.clone()) } else { f(s) });
        Ok(Sweepout { slices: out.into_iter().collect::<Result<Vec<_>>>()? })
    }
}

/// Images of the round latitude circles under the radial chart, with the
/// poles as end slices.
pub fn latitude_sweepout(surface: &Surface, k: usize, l: usize, m: usize) -> Result<Sweepout> {
    if k < MIN_SLICES || k % 2 == 0 {
        return Err(Error::InvalidSpec(format!("slice count {k} must be odd and at least {MIN_SLICES}")));
    }
    let n = 2 * l * m;
    let mut slices = Vec::with_capacity(k);
    for i in 0..k {
        let theta = PI * i as f64 / (k - 1) as f64;
        if i == 0 || i == k - 1 {
            let pole = surface.chart(Vec3::new(0.0, 0.0, theta.cos().signum()));
            slices.push(DiscreteCurve::point(l, m, pole)?);
            continue;
        }
        let points: Vec<Vec3> =
            (0..n).map(|j| surface.chart(direction(theta, TAU * j as f64 / n as f64))).collect();
        slices.push(DiscreteCurve::from_samples(surface, &points, l, m)?);
    }
    Sweepout::new(surface, slices)
}

/// `(argmax, max)` of the slice energies, ties to the lowest index.
pub fn max_energy(sweepout: &Sweepout) -> (usize, f64) {
    let mut best = (0, 0.0);
    for (i, e) in sweepout.energies().into_iter().enumerate() {
        if e > best.1 {
            best = (i, e);
        }
    }
    best
}

/// Geodesic replacement on the even intervals followed by constant-speed
/// reparametrization, slice by slice.
pub fn linearize(surface: &Surface, sweepout: &Sweepout) -> Result<Sweepout> {
    linearize_with(surface, sweepout, &Sequential)
}

pub fn linearize_with<E: SliceExecutor>(surface: &Surface, sweepout: &Sweepout, exec: &E) -> Result<Sweepout> {
    sweepout.map_slices(surface, exec, |s| reparametrize_constant_speed(surface, &even_replacement(surface, s)?))
}

/// One row of the tightening trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub max_energy: f64,
    pub argmax: usize,
    pub max_adjacent_step: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct WidthEstimate {
    /// Iteration 0 is the input sweepout.
    pub per_iteration: Vec<IterationRecord>,
    /// Final maximal slice energy.
    pub width_upper: f64,
    /// The maximal energy stalled within the window.
    pub converged: bool,
    /// First iteration at which the maximal energy stalled.
    pub stall_iteration: Option<usize>,
    /// Slice energy profiles at checkpoint iterations.
    pub checkpoints: Vec<(usize, Vec<f64>)>,
}

impl WidthEstimate {
    pub fn iterations(&self) -> usize {
        self.per_iteration.last().map_or(0, |r| r.iteration)
    }

    /// The maximal energy never rose by more than `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.per_iteration.windows(2).all(|w| w[1].max_energy <= w[0].max_energy + slack)
    }
}

fn record(iteration: usize, sweepout: &Sweepout) -> Result<IterationRecord> {
    let (argmax, max_energy) = max_energy(sweepout);
    Ok(IterationRecord { iteration, max_energy, argmax, max_adjacent_step: sweepout.max_adjacent_step()? })
}

/// Ψ on every non-point slice. Returns the new sweepout and its record.
pub fn tighten_once(surface: &Surface, sweepout: &Sweepout) -> Result<(Sweepout, IterationRecord)> {
    tighten_once_with(surface, sweepout, &Sequential)
}

pub fn tighten_once_with<E: SliceExecutor>(
    surface: &Surface,
    sweepout: &Sweepout,
    exec: &E,
) -> Result<(Sweepout, IterationRecord)> {
    let next = sweepout.map_slices(surface, exec, |s| Ok(psi(surface, s)?.0))?;
    let rec = record(1, &next)?;
    Ok((next, rec))
}

/// Iterates [`tighten_once`].
///
/// The maximal energy is declared converged once it drops by less than
/// `stall_tol·scale²` over [`STALL_WINDOW`] iterations. Iteration continues
/// until every slice energy stalls in the same sense or `max_iter` is
/// reached, so slices below the maximum keep tightening. Fails with
/// [`Error::MaxIterExceeded`] only when the maximal energy never stalled.
pub fn tighten(surface: &Surface, sweepout: &Sweepout, max_iter: usize, stall_tol: f64) -> Result<(Sweepout, WidthEstimate)> {
    tighten_with(surface, sweepout, max_iter, stall_tol, &Sequential)
}

pub fn tighten_with<E: SliceExecutor>(
    surface: &Surface,
    sweepout: &Sweepout,
    max_iter: usize,
    stall_tol: f64,
    exec: &E,
) -> Result<(Sweepout, WidthEstimate)> {
    let threshold = stall_tol * surface.scale() * surface.scale();
    let mut current = sweepout.clone();
    let mut est = WidthEstimate::default();
    let first = record(0, &current)?;
    est.per_iteration.push(first);
    est.checkpoints.push((0, current.energies()));
    let collapse = surface.collapse_length();
    if current.slices.iter().all(|s| s.is_point(collapse)) {
        est.width_upper = first.max_energy;
        est.converged = true;
        est.stall_iteration = Some(0);
        return Ok((current, est));
    }
    let mut history: Vec<Vec<f64>> = alloc::vec![current.energies()];
    let mut profile_stalled = false;
    for it in 1..=max_iter {
        let (next, mut rec) = tighten_once_with(surface, &current, exec)?;
        rec.iteration = it;
        current = next;
        est.per_iteration.push(rec);
        let energies = current.energies();
        if it % CHECKPOINT_EVERY == 0 {
            est.checkpoints.push((it, energies.clone()));
        }
        history.push(energies);
        if history.len() > STALL_WINDOW + 1 {
            history.remove(0);
        }
        if history.len() == STALL_WINDOW + 1 {
            let (old, new) = (&history[0], &history[STALL_WINDOW]);
            let old_max = old.iter().cloned().fold(0.0, f64::max);
            let new_max = new.iter().cloned().fold(0.0, f64::max);
            if est.stall_iteration.is_none() && old_max - new_max < threshold {
                est.stall_iteration = Some(it);
            }
            let profile_drop = old.iter().zip(new).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
            if profile_drop < threshold {
                profile_stalled = true;
                break;
            }
        }
    }
    let last = est.per_iteration.last().map_or(0, |r| r.iteration);
    if est.checkpoints.last().map(|c| c.0) != Some(last) {
        est.checkpoints.push((last, current.energies()));
    }
    est.width_upper = max_energy(&current).1;
    est.converged = est.stall_iteration.is_some() || profile_stalled;
    if est.converged {
        Ok((current, est))
    } else {
        Err(Error::MaxIterExceeded(PartialResult::Tightening(Box::new(est))))
    }
}

/// Slices within `delta` of the maximal energy, with their residuals.
#[derive(Clone, Debug, PartialEq)]
pub struct NearGeodesicReport {
    pub delta: f64,
    pub indices: Vec<usize>,
    pub residuals: Vec<f64>,
    /// W^{1,2} distance of each listed slice to its analytic fit, when the
    /// surface has one.
    pub fit_distances: Option<Vec<f64>>,
    /// Largest fit distance over the listed slices.
    pub best_fit_distance: Option<f64>,
}

impl NearGeodesicReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn near_max_slices(surface: &Surface, sweepout: &Sweepout, width_upper: f64, delta: f64) -> Result<NearGeodesicReport> {
    near_max_slices_with(surface, sweepout, width_upper, delta, &Sequential)
}

pub fn near_max_slices_with<E: SliceExecutor>(
    surface: &Surface,
    sweepout: &Sweepout,
    width_upper: f64,
    delta: f64,
    exec: &E,
) -> Result<NearGeodesicReport> {
    if !(delta > 0.0) {
        return Err(Error::InvalidSpec("delta must be positive".into()));
    }
    let collapse = surface.collapse_length();
    let indices: Vec<usize> = sweepout
        .slices
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_point(collapse) && s.energy() > width_upper - delta)
        .map(|(i, _)| i)
        .collect();
    let listed: Vec<&DiscreteCurve> = indices.iter().map(|&i| &sweepout.slices[i]).collect();
    let residuals = exec
        .map(&listed, |s| psi(surface, s).map(|r| r.1.moved))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let fit_distances = match surface.kind() {
        SurfaceKind::Sphere | SurfaceKind::Ellipsoid => Some(
            exec.map(&listed, |s| great_circle_fit(surface, s).map(|f| f.0))
                .into_iter()
                .collect::<Result<Vec<_>>>()?,
        ),
        SurfaceKind::PerturbedSphere => None,
    };
    let best_fit_distance = fit_distances.as_ref().map(|d| d.iter().cloned().fold(0.0, f64::max));
    Ok(NearGeodesicReport { delta, indices, residuals, fit_distances, best_fit_distance })
}

/// Largest near-max residual for each `delta = fraction · width_upper`.
pub fn residual_trend<E: SliceExecutor>(
    surface: &Surface,
    sweepout: &Sweepout,
    width_upper: f64,
    fractions: &[f64],
    exec: &E,
) -> Result<Vec<(f64, f64)>> {
    fractions
        .iter()
        .map(|&f| {
            let delta = f * width_upper;
            let rep = near_max_slices_with(surface, sweepout, width_upper, delta, exec)?;
            Ok((delta, rep.max_residual()))
        })
        .collect()
}

/// Degree of the map `S¹ × [−1, 1] → M` collapsed at the ends, from the
/// signed area swept between neighbouring slices.
pub fn degree(surface: &Surface, sweepout: &Sweepout) -> Result<i64> {
    let value = degree_value(surface, sweepout);
    let rounded = value.round();
    if (value - rounded).abs() > DEGREE_SLACK {
        return Err(Error::DegreeAmbiguous { value });
    }
    Ok(rounded as i64)
}

/// The unrounded signed-area ratio behind [`degree`].
pub fn degree_value(surface: &Surface, sweepout: &Sweepout) -> f64 {
    let mut total = 0.0;
    for w in sweepout.slices.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        for i in 0..a.len() {
            let p00 = a.sample(i);
            let p01 = a.sample(i + 1);
            let p10 = b.sample(i);
            let p11 = b.sample(i + 1);
            let d1 = p11 - p00;
            let d2 = p01 - p10;
            let centroid = (p00 + p01 + p10 + p11) * 0.25;
            if centroid.norm() == 0.0 {
                continue;
            }
            total += 0.5 * d1.cross(d2).dot(surface.normal(centroid));
        }
    }
    total / surface.area()
}
