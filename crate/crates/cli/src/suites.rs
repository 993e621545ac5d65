//! Seeded property suites over a normalized surface.
//!
//! Item `i` of a suite draws from `CurveRng::seed_from_u64(seed)` on stream
//! `tag << 32 | i`, so each item is reproducible on its own and the outcome
//! does not depend on how items are scheduled across workers.

use bmm_core::curve::wirtinger_gap;
use bmm_core::shortening::{
    lemma_norm_gap, lemma_sc_gap, property3_scan, property4_scan, psi_symmetric, random_lambda_curve,
    random_lipschitz_path, random_surface_point, CurveRng, Property3Row,
};
use bmm_core::sweepout::{degree, latitude_sweepout, tighten_once_with};
use bmm_core::{psi, w12_distance, DiscreteCurve, Result, SliceExecutor, Surface, SurfaceKind, Vec3};
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Perturbation sizes of the continuity check, largest first.
pub const CONTINUITY_EPSILONS: [f64; 3] = [1e-1, 1e-2, 1e-3];
/// Slack of the length and segment inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-8;

/// Summary of one suite on one surface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub surface: String,
    pub cases: usize,
    pub violations: usize,
    /// Suite-specific worst value; see [`describe`].
    pub worst: f64,
}

impl SuiteOutcome {
    fn new(suite: &str, surface: &Surface, cases: usize, violations: usize, worst: f64) -> Self {
        Self { suite: suite.into(), surface: surface_label(surface), cases, violations, worst }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// What `worst` measures for each suite.
pub fn describe(suite: &str) -> &'static str {
    match suite {
        "property1" => "largest length increase / scale",
        "lemma_sc" => "largest dist² − bound",
        "lemma_norm" => "largest |(x−y)^⊥| / |x−y|²",
        "equivalence" => "largest W^{1,2} distance between the two maps",
        "wirtinger" => "most negative gap",
        "property3" => "largest moved² / bound",
        "property4" => "smallest length decrease / scale",
        "continuity" => "largest ratio of successive displacements",
        "degree" => "number of surfaces checked",
        _ => "",
    }
}

pub fn surface_label(surface: &Surface) -> String {
    match surface.kind() {
        SurfaceKind::Sphere => "sphere",
        SurfaceKind::Ellipsoid => "ellipsoid",
        SurfaceKind::PerturbedSphere => "perturbed-sphere",
    }
    .to_string()
}

/// Sizes shared by the curve-based suites.
#[derive(Clone, Copy, Debug)]
pub struct SuiteParams {
    pub l: usize,
    pub m: usize,
    pub count: usize,
    pub seed: u64,
}

/// Stream tags. Property (1), the equivalence check and the drop-ratio table
/// share one curve test set.
mod tag {
    pub const TEST_SET: u64 = 1;
    pub const LEMMA_SC: u64 = 2;
    pub const LEMMA_NORM: u64 = 3;
    pub const WIRTINGER: u64 = 5;
    pub const PROPERTY4: u64 = 7;
    pub const CONTINUITY: u64 = 8;
}

pub fn item_rng(seed: u64, tag: u64, index: usize) -> CurveRng {
    let mut rng = CurveRng::seed_from_u64(seed);
    rng.set_stream(tag << 32 | index as u64);
    rng
}

fn indices(count: usize) -> Vec<usize> {
    (0..count).collect()
}

/// The seeded test set of random Λ-curves.
pub fn test_set<E: SliceExecutor>(surface: &Surface, p: SuiteParams, exec: &E) -> Result<Vec<DiscreteCurve>> {
    curve_set(surface, p, tag::TEST_SET, exec)
}

fn curve_set<E: SliceExecutor>(surface: &Surface, p: SuiteParams, tag: u64, exec: &E) -> Result<Vec<DiscreteCurve>> {
    exec.map(&indices(p.count), |&i| random_lambda_curve(surface, &mut item_rng(p.seed, tag, i), p.l, p.m))
        .into_iter()
        .collect()
}

/// Ψ never lengthens a curve.
pub fn property1<E: SliceExecutor>(surface: &Surface, p: SuiteParams, exec: &E) -> Result<SuiteOutcome> {
    let curves = test_set(surface, p, exec)?;
    let slack = INEQUALITY_SLACK * surface.scale();
    let growth = exec
        .map(&curves, |c| psi(surface, c).map(|(_, r)| r.length_after - r.length_before))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let violations = growth.iter().filter(|&&g| g > slack).count();
    let worst = growth.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / surface.scale();
    Ok(SuiteOutcome::new("property1", surface, p.count, violations, worst))
}

/// Distance to the minimizing segment is controlled by the energy gap.
pub fn lemma_sc<E: SliceExecutor>(surface: &Surface, p: SuiteParams, exec: &E) -> Result<SuiteOutcome> {
    let excess = exec
        .map(&indices(p.count), |&i| {
            let path = random_lipschitz_path(surface, &mut item_rng(p.seed, tag::LEMMA_SC, i), p.l, p.m)?;
            let gap = lemma_sc_gap(surface, &path.samples, path.interval, p.l)?;
            Ok(gap.dist_sq - gap.bound)
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let violations = excess.iter().filter(|&&e| e > INEQUALITY_SLACK).count();
    let worst = excess.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(SuiteOutcome::new("lemma_sc", surface, p.count, violations, worst))
}

/// The normal part of a chord is at most its squared length. On a sphere of
/// radius `s` it equals `|x − y|²/(2s)`, which is checked to `1e-6` relative.
pub fn lemma_norm(surface: &Surface, count: usize, seed: u64) -> Result<SuiteOutcome> {
    let s = surface.scale();
    let sphere = surface.kind() == SurfaceKind::Sphere;
    let mut violations = 0;
    let mut worst = 0.0f64;
    for i in 0..count {
        let mut rng = item_rng(seed, tag::LEMMA_NORM, i);
        let y = random_surface_point(surface, &mut rng)?;
        // Half the pairs are far apart, half are local at a log-uniform size.
        let x = if i % 2 == 0 {
            random_surface_point(surface, &mut rng)?
        } else {
            let size = s * 10f64.powf(rng.random_range(-3.0..-0.5));
            let v = surface.tangent_project(y, random_cube(&mut rng)).dir;
            let v = v.normalized().unwrap_or(Vec3::new(1.0, 0.0, 0.0));
            surface.project(y.0 + v * size)?
        };
        let (perp, sq) = lemma_norm_gap(surface, x, y);
        if sq == 0.0 {
            continue;
        }
        worst = worst.max(perp / sq);
        let mut bad = perp > sq;
        if sphere {
            let exact = sq / (2.0 * s);
            bad |= (perp - exact).abs() > 1e-6 * exact;
        }
        violations += bad as usize;
    }
    Ok(SuiteOutcome::new("lemma_norm", surface, count, violations, worst))
}

fn random_cube<R: Rng>(rng: &mut R) -> Vec3 {
    Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// The three- and four-step forms of Ψ agree.
pub fn equivalence<E: SliceExecutor>(surface: &Surface, p: SuiteParams, exec: &E) -> Result<SuiteOutcome> {
    let curves = test_set(surface, p, exec)?;
    let tol = surface.tolerances().tol_equiv;
    let dist = exec
        .map(&curves, |c| {
            let a = psi(surface, c)?.0;
            let b = psi_symmetric(surface, c)?;
            Ok(w12_distance(&a, &b)?.total)
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let violations = dist.iter().filter(|&&d| !(d < tol)).count();
    let worst = dist.iter().cloned().fold(0.0, f64::max);
    Ok(SuiteOutcome::new("equivalence", surface, p.count, violations, worst))
}

/// `sin(t/2)` sampled at `n + 1` points.
pub fn half_sine(n: usize) -> Vec<f64> {
    let mut f: Vec<f64> = (0..=n).map(|i| (PI * i as f64 / n as f64).sin()).collect();
    f[n] = 0.0;
    f
}

/// Extremal case: the gap of `sin(t/2)` is `O(n⁻²)`, checked by halving the
/// step. Random zero-endpoint samples never go below `−1e-8`.
pub fn wirtinger(count: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    let gaps: Vec<f64> = [64, 128, 256, 512, 1024]
        .iter()
        .map(|&n| wirtinger_gap(&half_sine(n)))
        .collect::<Result<_>>()?;
    for (w, n) in gaps.windows(2).zip([64.0, 128.0, 256.0, 512.0]) {
        let ratio = w[0] / w[1];
        let scaled = w[0] * n * n;
        if !(3.5..=4.5).contains(&ratio) || !(scaled.abs() < 10.0) {
            violations += 1;
        }
    }
    for i in 0..count {
        let mut rng = item_rng(seed, tag::WIRTINGER, i);
        let n = rng.random_range(2..=256);
        let amp = 10f64.powf(rng.random_range(-3.0..3.0));
        let mut f: Vec<f64> = (0..=n).map(|_| amp * rng.random_range(-1.0..1.0)).collect();
        f[0] = 0.0;
        f[n] = 0.0;
        let gap = wirtinger_gap(&f)?;
        worst = worst.min(gap);
        violations += (gap < -INEQUALITY_SLACK) as usize;
    }
    Ok(SuiteOutcome {
        suite: "wirtinger".into(),
        surface: "none".into(),
        cases: count + gaps.len(),
        violations,
        worst,
    })
}

/// Rows of the drop-ratio table; the suite fails when any row exceeds its
/// bound or the lowest-drop decile is not controlled.
pub fn property3<E: SliceExecutor>(surface: &Surface, p: SuiteParams, exec: &E) -> Result<(SuiteOutcome, Vec<Property3Row>)> {
    let curves = test_set(surface, p, exec)?;
    let tables = exec
        .map(&curves, |c| property3_scan(surface, std::slice::from_ref(c)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut table = bmm_core::shortening::Property3Table { l: p.l, rows: Vec::new() };
    for t in tables {
        table.rows.extend(t.rows);
    }
    table.rows.sort_by(|a, b| a.drop_ratio.total_cmp(&b.drop_ratio));
    let mut violations = table.rows.iter().filter(|r| r.moved_sq > r.bound).count();
    if !table.decile_controlled() {
        violations += 1;
    }
    let worst = table.rows.iter().map(|r| r.moved_sq / r.bound).fold(0.0, f64::max);
    Ok((SuiteOutcome::new("property3", surface, p.count, violations, worst), table.rows))
}

/// Curves at residual at least `epsilon_fraction·scale` lose length under Ψ.
pub fn property4(surface: &Surface, epsilon_fraction: f64, p: SuiteParams) -> Result<SuiteOutcome> {
    let seed = p.seed ^ (tag::PROPERTY4 << 32);
    let res = property4_scan(surface, epsilon_fraction * surface.scale(), p.count, seed, p.l, p.m)?;
    let violations = (res.min_decrease <= 0.0) as usize;
    Ok(SuiteOutcome::new("property4", surface, res.accepted, violations, res.min_decrease / surface.scale()))
}

/// Displacements `‖Ψc − Ψc_ε‖` for each entry of [`CONTINUITY_EPSILONS`],
/// where `c_ε` moves `c` by `ε` in W^{1,2} along a smooth tangent field.
pub fn continuity_displacements(surface: &Surface, curve: &DiscreteCurve, rng: &mut CurveRng) -> Result<Vec<f64>> {
    let n = curve.len();
    let modes: Vec<(f64, f64, f64)> = (1..=3)
        .map(|k| (k as f64, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let field: Vec<Vec3> = (0..n)
        .map(|i| {
            let x = TAU * i as f64 / n as f64;
            let p = curve.sample(i);
            let t = (curve.sample(i + 1) - curve.sample(i + n - 1)).normalized().unwrap_or(Vec3::ZERO);
            let side = surface.normal(p).cross(t);
            let a: f64 = modes.iter().map(|&(k, a, b)| a * (k * x).sin() + b * (k * x).cos()).sum();
            side * a
        })
        .collect();
    let shifted: Vec<Vec3> = curve.samples().iter().zip(&field).map(|(&p, &v)| p + v).collect();
    let norm = w12_distance(curve, &DiscreteCurve::from_raw(curve.l(), curve.m(), shifted)?)?.total;
    let base = psi(surface, curve)?.0;
    CONTINUITY_EPSILONS
        .iter()
        .map(|&eps| {
            let moved = curve
                .samples()
                .iter()
                .zip(&field)
                .map(|(&p, &v)| surface.project(p + v * (eps / norm)).map(|q| q.0))
                .collect::<Result<Vec<_>>>()?;
            let perturbed = DiscreteCurve::from_raw(curve.l(), curve.m(), moved)?;
            Ok(w12_distance(&base, &psi(surface, &perturbed)?.0)?.total)
        })
        .collect()
}

/// Displacements shrink strictly with the perturbation size on every curve.
pub fn continuity<E: SliceExecutor>(surface: &Surface, p: SuiteParams, exec: &E) -> Result<SuiteOutcome> {
    let curves = curve_set(surface, p, tag::CONTINUITY, exec)?;
    let idx = indices(curves.len());
    let rows = exec
        .map(&idx, |&i| {
            let mut rng = item_rng(p.seed, tag::CONTINUITY, i);
            rng.set_word_pos(1 << 20);
            continuity_displacements(surface, &curves[i], &mut rng)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut violations = 0;
    let mut worst = 0.0f64;
    for d in &rows {
        for w in d.windows(2) {
            worst = worst.max(w[1] / w[0]);
            violations += !(w[1] < w[0]) as usize;
        }
    }
    Ok(SuiteOutcome::new("continuity", surface, p.count, violations, worst))
}

/// Degree of the latitude sweepout before and after `iterations` tightening
/// steps.
pub fn degree_check<E: SliceExecutor>(
    surface: &Surface,
    k: usize,
    l: usize,
    m: usize,
    iterations: usize,
    exec: &E,
) -> Result<(i64, i64)> {
    let mut sw = latitude_sweepout(surface, k, l, m)?;
    let before = degree(surface, &sw)?;
    for _ in 0..iterations {
        sw = tighten_once_with(surface, &sw, exec)?.0;
    }
    Ok((before, degree(surface, &sw)?))
}

pub fn degree_suite<E: SliceExecutor>(
    surface: &Surface,
    k: usize,
    l: usize,
    m: usize,
    iterations: usize,
    exec: &E,
) -> Result<SuiteOutcome> {
    let (before, after) = degree_check(surface, k, l, m, iterations, exec)?;
    let violations = (before != 1) as usize + (after != 1) as usize;
    Ok(SuiteOutcome::new("degree", surface, 2, violations, after as f64))
}
