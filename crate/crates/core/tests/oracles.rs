//! Worked examples with independently derived expected values.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};

use bmm_core::curve::reparametrize_constant_speed;
use bmm_core::manifold::{direction, geodesic_bvp, intrinsic_distance};
use bmm_core::shortening::{
    even_replacement, lemma_sc_gap, odd_replacement, property3_scan, property4_scan, psi_symmetric,
};
use bmm_core::sweepout::{
    degree, great_circle_fit, latitude_sweepout, linearize, max_energy, near_max_slices, tighten_once,
};
use bmm_core::{
    normalize, psi, shorten_to_geodesic, w12_distance, DiscreteCurve, Error, Surface, SurfacePoint, SurfaceSpec,
    Sweepout, Vec3,
};

fn sphere() -> Surface {
    normalize(&SurfaceSpec::sphere(1.0)).unwrap()
}

fn ellipsoid() -> Surface {
    normalize(&SurfaceSpec::ellipsoid(1.0, 1.1, 1.2)).unwrap()
}

fn equator(s: &Surface, l: usize, m: usize) -> DiscreteCurve {
    DiscreteCurve::from_fn(l, m, |x| s.chart_angles(FRAC_PI_2, x)).unwrap()
}

/// Principal curvatures of `x²/a² + y²/b² + z²/c² = 1` from the Weingarten
/// map of the level set, as a closed form in the point.
fn ellipsoid_second_form(axes: [f64; 3], p: [f64; 3]) -> f64 {
    let g = [p[0] / (axes[0] * axes[0]), p[1] / (axes[1] * axes[1]), p[2] / (axes[2] * axes[2])];
    let gn = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
    let h = [1.0 / (axes[0] * axes[0]), 1.0 / (axes[1] * axes[1]), 1.0 / (axes[2] * axes[2])];
    let n = [g[0] / gn, g[1] / gn, g[2] / gn];
    // Shape operator P·H·P / |∇F| with P the tangent projector; its squared
    // Frobenius norm is |A|².
    let mut a = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut v = 0.0;
            for k in 0..3 {
                let pik = if i == k { 1.0 } else { 0.0 } - n[i] * n[k];
                let pkj = if k == j { 1.0 } else { 0.0 } - n[k] * n[j];
                v += pik * h[k] * pkj;
            }
            a[i][j] = v / gn;
        }
    }
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn ellipsoid_scale_matches_dense_curvature_scan() {
    let axes = [1.0, 1.1, 1.2];
    let mut sup = 0.0f64;
    for i in 0..=400 {
        let theta = PI * i as f64 / 400.0;
        for j in 0..800 {
            let phi = TAU * j as f64 / 800.0;
            let p = [axes[0] * theta.sin() * phi.cos(), axes[1] * theta.sin() * phi.sin(), axes[2] * theta.cos()];
            sup = sup.max(ellipsoid_second_form(axes, p));
        }
    }
    // At the ends of the longest axis the principal curvatures are c/a² and c/b².
    let pole = ((1.2f64 / 1.0).powi(2) + (1.2f64 / 1.21).powi(2)).sqrt();
    assert!((sup - pole).abs() < 1e-9, "dense scan {sup}, pole {pole}");
    let s = ellipsoid().scale();
    let expected = 16.0 * sup * 1.01;
    assert!((s / expected - 1.0).abs() < 1e-3, "scale {s}, expected {expected}");
    assert!(ellipsoid().second_form_bound() <= 1.0 / 16.0);
}

#[test]
fn sphere_projection_and_ellipsoid_normal_offsets() {
    let s = sphere();
    let r = s.scale();
    let p = s.project(Vec3::new(2.0 * r, 0.0, 0.0)).unwrap();
    assert!(p.0.dist(Vec3::new(r, 0.0, 0.0)) < 1e-12 * r);
    let e = ellipsoid();
    for (theta, phi) in [(0.3, 0.2), (1.2, 2.9), (2.7, 5.1)] {
        let q = e.chart_angles(theta, phi);
        let back = e.project(q + e.normal(q) * 1e-3).unwrap();
        assert!(back.0.dist(q) < 1e-6, "{theta} {phi}");
    }
}

#[test]
fn principal_ellipse_is_geodesic() {
    let e = ellipsoid();
    let p = SurfacePoint(e.chart_angles(FRAC_PI_2, 0.2));
    let q = SurfacePoint(e.chart_angles(FRAC_PI_2, 1.4));
    let seg = geodesic_bvp(&e, p, q, 32).unwrap();
    for x in &seg.samples {
        assert!(x.z().abs() < 1e-8 * e.scale(), "{x:?}");
    }
}

#[test]
fn sphere_distance_is_chord_arcsine() {
    let s = sphere();
    let r = s.scale();
    let p = SurfacePoint(s.chart(direction(0.4, 0.1)));
    for (theta, phi) in [(0.5, 0.3), (1.0, 1.0), (1.6, 2.0)] {
        let q = SurfacePoint(s.chart(direction(theta, phi)));
        let d = p.0.dist(q.0);
        let dist = intrinsic_distance(&s, p, q).unwrap();
        let exact = 2.0 * r * (d / (2.0 * r)).asin();
        assert!((dist / exact - 1.0).abs() < 1e-7, "{dist} vs {exact}");
        assert!(dist <= 2.0 * d);
    }
}

#[test]
fn w12_between_equator_and_latitude() {
    let s = sphere();
    let r = s.scale();
    let (l, m) = (64, 16);
    let theta = FRAC_PI_2 - 0.1;
    let eq = equator(&s, l, m);
    let lat = DiscreteCurve::from_fn(l, m, |x| s.chart_angles(theta, x)).unwrap();
    let got = w12_distance(&eq, &lat).unwrap().total;
    // The difference is a circle of radius r(1 − sin θ) lifted by r·cos θ.
    let a = r * (1.0 - theta.sin());
    let b = r * theta.cos();
    let exact = (TAU * (a * a + b * b + a * a)).sqrt();
    assert!((got / exact - 1.0).abs() < 1e-4, "{got} vs {exact}");
}

/// Equator with node `i` at longitude `x_i + δ(x_i)`.
fn shifted_equator(s: &Surface, l: usize, m: usize, delta: impl Fn(f64) -> f64) -> DiscreteCurve {
    DiscreteCurve::from_fn(l, m, |x| s.chart_angles(FRAC_PI_2, x + delta(x))).unwrap()
}

/// Energy of an equator polyline whose runs of `run` samples are uniform
/// arcs between the given longitudes.
fn uniform_arc_energy(r: f64, longitudes: &[f64], run: usize, h: f64) -> f64 {
    let k = longitudes.len();
    (0..k)
        .map(|j| {
            let mut d = longitudes[(j + 1) % k] - longitudes[j];
            if d < 0.0 {
                d += TAU;
            }
            let chord = 2.0 * r * (d / (2.0 * run as f64)).sin();
            run as f64 * chord * chord / h
        })
        .sum()
}

#[test]
fn even_and_odd_replacement_energies() {
    let s = sphere();
    let r = s.scale();
    let (l, m) = (16, 8);
    let delta = |x: f64| 1e-2 * (3.0 * x).sin() + 1e-2 * (5.0 * x).cos();
    let c = shifted_equator(&s, l, m, delta);
    let h = c.step();
    let even = even_replacement(&s, &c).unwrap();
    let nodes: Vec<f64> = (0..2 * l).map(|j| j as f64 * PI / l as f64).map(|x| x + delta(x)).collect();
    let even_nodes: Vec<f64> = nodes.iter().step_by(2).cloned().collect();
    let expected = uniform_arc_energy(r, &even_nodes, 2 * m, h);
    assert!(even.energy() < c.energy());
    assert!((even.energy() / expected - 1.0).abs() < 1e-4, "{} vs {expected}", even.energy());

    let odd = odd_replacement(&s, &even).unwrap();
    // After the even step the odd nodes sit mid-arc between even nodes.
    let odd_nodes: Vec<f64> = (0..l)
        .map(|j| {
            let a = even_nodes[j];
            let mut b = even_nodes[(j + 1) % l];
            if b < a {
                b += TAU;
            }
            0.5 * (a + b)
        })
        .collect();
    let expected = uniform_arc_energy(r, &odd_nodes, 2 * m, h);
    assert!(odd.energy() < even.energy());
    assert!((odd.energy() / expected - 1.0).abs() < 1e-4, "{} vs {expected}", odd.energy());
}

#[test]
fn symmetric_curve_shortens_to_great_circle() {
    let s = sphere();
    let r = s.scale();
    // Invariant under the antipodal map, so it cannot collapse to a point.
    let n = 1024;
    let points: Vec<Vec3> = (0..n)
        .map(|i| {
            let x = TAU * i as f64 / n as f64;
            let u = Vec3::new(x.cos(), x.sin(), 0.15 * (3.0 * x).sin());
            s.chart(u / u.norm())
        })
        .collect();
    let c = DiscreteCurve::from_samples(&s, &points, 32, 8).unwrap();
    let tol = 1e-5 * r;
    let (out, trace) = shorten_to_geodesic(&s, &c, tol, 3000).unwrap();
    assert!(trace.converged && !trace.collapsed);
    assert!(trace.is_monotone(1e-9 * r));
    assert!(trace.final_residual < tol);
    let n = out.len() as f64;
    let poly = TAU * r * (PI / n).sin() / (PI / n);
    assert!((out.length() / poly - 1.0).abs() < 1e-3, "{} vs {poly}", out.length());
}

#[test]
fn lemma_sc_with_normal_wiggle_has_strict_slack() {
    let s = sphere();
    let l = 32;
    let m = 32;
    let interval = TAU / l as f64;
    let base: Vec<Vec3> = (0..=m).map(|i| s.chart_angles(FRAC_PI_2, interval * i as f64 / m as f64)).collect();
    let wiggled: Vec<Vec3> = base
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let w = 1e-2 * (PI * i as f64 / m as f64).sin();
            s.project(p + Vec3::new(0.0, 0.0, w)).unwrap().0
        })
        .collect();
    let gap = lemma_sc_gap(&s, &wiggled, interval, l).unwrap();
    assert!(gap.dist_sq > 0.0 && gap.dist_sq < gap.bound, "{gap:?}");
}

#[test]
fn property3_examples() {
    let s = sphere();
    let r = s.scale();
    let (l, m) = (32, 8);
    let circles: Vec<DiscreteCurve> = (0..3)
        .map(|k| {
            let tilt = 0.3 * k as f64;
            DiscreteCurve::from_fn(l, m, |x| {
                Vec3::new(x.cos(), x.sin() * tilt.cos(), x.sin() * tilt.sin()) * r
            })
            .unwrap()
        })
        .collect();
    let table = property3_scan(&s, &circles).unwrap();
    assert!(table.rows.iter().all(|row| row.drop_ratio.abs() < 1e-9 && row.moved_sq < 1e-12));

    let perturbed: Vec<DiscreteCurve> = [1e-3, 1e-2, 1e-1]
        .iter()
        .map(|&a| {
            let pts: Vec<Vec3> = (0..512)
                .map(|i| {
                    let x = TAU * i as f64 / 512.0;
                    let u = Vec3::new(x.cos(), x.sin(), a * (2.0 * x).sin());
                    s.chart(u / u.norm())
                })
                .collect();
            DiscreteCurve::from_samples(&s, &pts, l, m).unwrap()
        })
        .collect();
    let table = property3_scan(&s, &perturbed).unwrap();
    assert!(table.bound_respected());
    assert!(table.rows.windows(2).all(|w| w[0].moved_sq < w[1].moved_sq));

    let point = DiscreteCurve::point(l, m, Vec3::new(r, 0.0, 0.0)).unwrap();
    assert!(matches!(property3_scan(&s, &[point]), Err(Error::PreconditionViolated(_))));
}

#[test]
fn property4_examples() {
    let s = sphere();
    let r = s.scale();
    let a = property4_scan(&s, 0.5 * r, 200, 11, 32, 8).unwrap();
    assert!(a.min_decrease > 0.0 && a.accepted == 200);
    let b = property4_scan(&s, 0.5 * r, 200, 11, 32, 8).unwrap();
    assert_eq!(a, b);
    assert!(matches!(property4_scan(&s, 1e6 * r, 5, 11, 32, 8), Err(Error::SamplingExhausted { .. })));
}

#[test]
fn latitude_sweepouts() {
    let s = sphere();
    let r = s.scale();
    let sw = latitude_sweepout(&s, 65, 64, 16).unwrap();
    assert!(sw.slices()[0].length() == 0.0 && sw.slices()[64].length() == 0.0);
    let (k, e) = max_energy(&sw);
    let n = sw.slices()[32].len() as f64;
    let sinc = (PI / n).sin() / (PI / n);
    assert_eq!(k, 32);
    assert!((e / (TAU * r * r * sinc * sinc) - 1.0).abs() < 1e-9);

    let lin = linearize(&s, &sw).unwrap();
    for (a, b) in sw.energies().iter().zip(lin.energies()) {
        assert!((a - b).abs() <= 1e-3 * a.max(1e-300), "{a} vs {b}");
    }

    let e = ellipsoid();
    let sw = latitude_sweepout(&e, 17, 32, 4).unwrap();
    assert!(sw.slices()[8].samples().iter().all(|p| p.z().abs() < 1e-9 * e.scale()));
}

#[test]
fn tightening_examples() {
    let s = sphere();
    let r = s.scale();
    let (l, m) = (32, 4);
    let north = Vec3::new(0.0, 0.0, r);
    let south = Vec3::new(0.0, 0.0, -r);
    let mut slices = vec![DiscreteCurve::point(l, m, north).unwrap()];
    for k in 1..8 {
        let tilt = 0.2 * k as f64;
        slices.push(
            DiscreteCurve::from_fn(l, m, |x| Vec3::new(x.cos(), x.sin() * tilt.cos(), x.sin() * tilt.sin()) * r)
                .unwrap(),
        );
    }
    slices.push(DiscreteCurve::point(l, m, south).unwrap());
    let sw = Sweepout::new(&s, slices).unwrap();
    let (next, _) = tighten_once(&s, &sw).unwrap();
    for (a, b) in sw.slices().iter().zip(next.slices()) {
        assert!(w12_distance(a, b).unwrap().total < 1e-6 * r);
    }

    let lat = latitude_sweepout(&s, 17, l, m).unwrap();
    let (next, rec) = tighten_once(&s, &lat).unwrap();
    assert!((rec.max_energy / max_energy(&lat).1 - 1.0).abs() < 1e-3);
    assert!(next.energies()[4] < lat.energies()[4]);

    let p = normalize(&SurfaceSpec::perturbed_sphere(0.05)).unwrap();
    let lat = latitude_sweepout(&p, 17, l, m).unwrap();
    let (_, rec) = tighten_once(&p, &lat).unwrap();
    assert!(rec.max_energy < max_energy(&lat).1);
}

#[test]
fn near_max_lists_every_non_point_slice_for_large_delta() {
    let s = sphere();
    let sw = latitude_sweepout(&s, 9, 32, 2).unwrap();
    let width = max_energy(&sw).1;
    let rep = near_max_slices(&s, &sw, width, 2.0 * width).unwrap();
    assert_eq!(rep.indices, (1..8).collect::<Vec<_>>());
}

#[test]
fn perturbed_great_circle_fit_distance() {
    let s = sphere();
    let r = s.scale();
    let c = DiscreteCurve::from_fn(32, 8, |x| {
        let u = Vec3::new(x.cos(), x.sin(), 1e-3 * (2.0 * x).sin());
        s.chart(u / u.norm())
    })
    .unwrap();
    let (d, _) = great_circle_fit(&s, &c).unwrap();
    assert!(d > 1e-4 * r && d < 1e-2 * r, "{}", d / r);
}

#[test]
fn latitude_circle_residual_and_symmetric_map() {
    let s = sphere();
    let r = s.scale();
    let lat = DiscreteCurve::from_fn(32, 8, |x| s.chart_angles(FRAC_PI_3, x)).unwrap();
    let lat = reparametrize_constant_speed(&s, &lat).unwrap();
    let (out, rep) = psi(&s, &lat).unwrap();
    assert!(rep.length_after < rep.length_before && rep.moved > 1e-2 * r);
    let sym = psi_symmetric(&s, &lat).unwrap();
    assert!(w12_distance(&out, &sym).unwrap().total < 1e-4);
}

#[test]
fn degree_survives_tightening() {
    let s = sphere();
    let mut sw = latitude_sweepout(&s, 17, 32, 4).unwrap();
    assert_eq!(degree(&s, &sw).unwrap(), 1);
    for _ in 0..100 {
        sw = tighten_once(&s, &sw).unwrap().0;
    }
    assert_eq!(degree(&s, &sw).unwrap(), 1);
}
