//! Property checks run by `sasaki verify`.
//!
//! Every check draws its random samples from its own ChaCha stream keyed by
//! the seed and the check's position, so results do not depend on thread
//! scheduling.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI, TAU};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sasaki_core::closed_forms::{
    ellipse_perimeter, minimizer_angle, minimizer_slope, reference_bounds, MinimizerSpec,
};
use sasaki_core::fields::{
    check_boundary_conditions, directional_derivatives, eval_angle, geodesic_curvatures,
    poincare_index, AngleField, AngleFunction, LinearProfile, PinnedPerturbation, Pole,
};
use sasaki_core::functional::{
    area, axisymmetric_area, first_integral, hi_split, lower_bound_with, BoundReading,
    POLE_LOOP_LATITUDE,
};
use sasaki_core::optimizer::{
    area_gradient, discrete_area, minimize_profile, minimize_profile_observed, substituted_nodes,
    Direction, MinimizeOptions, Profile,
};
use sasaki_core::quadrature::QuadratureScheme;
use sasaki_core::sphere::{cross, dot, frame_at, make_annulus, AnnulusSpec, LatLon, Region};

const TWO_PI_SQ: f64 = 2.0 * PI * PI;

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub bound_reading: BoundReading,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 42, bound_reading: BoundReading::Corrected }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type CheckFn = fn(&mut ChaCha8Rng, &VerifyConfig) -> Result<String, String>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("frame_orthonormality", frame_orthonormality),
    ("frame_periodicity", frame_periodicity),
    ("curvature_identity", curvature_identity),
    ("winding_additivity", winding_additivity),
    ("grid_closed_form_agreement", grid_agreement),
    ("j_identity", j_identity),
    ("bound_validity", bound_validity),
    ("sharpness", sharpness),
    ("quadrature_convergence", quadrature_convergence),
    ("perturbation_optimality", perturbation_optimality),
    ("minimizer_odd_symmetry", odd_symmetry),
    ("first_integral", first_integral_check),
    ("equality_condition", equality_condition),
    ("vk_attains_ellipse_bound", vk_attainment),
    ("ellipse_refines_index_bound", ellipse_refines),
    ("descent_monotone", descent_monotone),
    ("gradient_consistency", gradient_consistency),
    ("oracle_convergence", oracle_convergence),
    ("discretization_order", discretization_order),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

pub fn run(cfg: &VerifyConfig) -> Vec<CheckResult> {
    CHECKS
        .par_iter()
        .enumerate()
        .map(|(i, &(name, f))| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            match f(&mut rng, cfg) {
                Ok(detail) => CheckResult { name, passed: true, detail },
                Err(detail) => CheckResult { name, passed: false, detail },
            }
        })
        .collect()
}

/// Fixed-width table, one row per check.
pub fn render_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status}  {:<width$}  {}\n", r.name, r.detail));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} checks, {} failed\n", results.len(), failed));
    out
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(r: sasaki_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn annulus(a0: f64) -> Result<AnnulusSpec, String> {
    core(make_annulus(a0))
}

fn e(x: f64) -> String {
    format!("{x:.2e}")
}

fn frame_orthonormality(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = core(LatLon::new(rng.gen_range(-1.55..1.55), rng.gen_range(-20.0..20.0)))?;
        let f = frame_at(p);
        let vs = [f.point, f.e1, f.e2];
        for (i, u) in vs.iter().enumerate() {
            worst = worst.max((dot(*u, *u) - 1.0).abs());
            for v in &vs[i + 1..] {
                worst = worst.max(dot(*u, *v).abs());
            }
        }
        worst = worst.max((dot(cross(f.e1, f.e2), f.point) - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("residual {}", e(worst)))?;
    Ok(format!("max residual {}", e(worst)))
}

fn frame_periodicity(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (alpha, beta) = (rng.gen_range(-1.55..1.55), rng.gen_range(-20.0..20.0));
        let a = frame_at(core(LatLon::new(alpha, beta))?);
        let b = frame_at(core(LatLon::new(alpha, beta + TAU))?);
        for (u, v) in [(a.point, b.point), (a.e1, b.e1), (a.e2, b.e2)] {
            for i in 0..3 {
                worst = worst.max((u[i] - v[i]).abs());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("difference {}", e(worst)))?;
    Ok(format!("max difference {}", e(worst)))
}

fn curvature_identity(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..2000 {
        let a0: f64 = rng.gen_range(0.1..1.5);
        let an = annulus(a0)?;
        let beta = rng.gen_range(0.0..TAU);
        let inside = rng.gen_range(-0.999..0.999) * a0;
        let amp = rng.gen_range(-0.5..0.5);
        let bumped = AngleField::closed_form(
            Arc::new(PinnedPerturbation {
                base: Arc::new(LinearProfile { alpha0: a0 }),
                alpha0: a0,
                modes: vec![(1, amp), (2, -amp)],
            }),
            Region::Annulus(an),
        );
        let k = rng.gen_range(-5..6);
        let cases = [
            (AngleField::vk(k), rng.gen_range(-1.4..1.4)),
            (AngleField::minimizer(an), inside),
            (bumped, inside),
        ];
        for (f, alpha) in cases {
            let p = core(LatLon::new(alpha, beta))?;
            let d = core(directional_derivatives(&f, p))?;
            let c = core(geodesic_curvatures(&f, p))?;
            let lhs = 1.0 + c.gamma * c.gamma + c.delta * c.delta;
            let shifted = alpha.tan() + d.theta1;
            let rhs = 1.0 + shifted * shifted + d.theta2 * d.theta2;
            worst = worst.max((lhs - rhs).abs() / rhs.max(1.0));
        }
    }
    ensure(worst <= 1e-10, || format!("relative residual {}", e(worst)))?;
    Ok(format!("max relative residual {}", e(worst)))
}

fn winding_additivity(_: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    for k in [-1i64, 0, 1, 3, 4, 5] {
        let f = AngleField::vk(k);
        let n = core(poincare_index(&f, Pole::North, POLE_LOOP_LATITUDE))?;
        let s = core(poincare_index(&f, Pole::South, -POLE_LOOP_LATITUDE))?;
        ensure(n == k && s == 2 - k && n + s == 2, || format!("k={k}: indices ({n}, {s})"))?;
    }
    Ok("indices (k, 2-k) for k in {-1,0,1,3,4,5}".to_string())
}

fn grid_agreement(_: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let mut worst = 0.0f64;
    for a0 in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let an = annulus(a0)?;
        let nodes = substituted_nodes(an, 399);
        let grid = core(AngleField::sample_onto_grid(an, &nodes, |x| {
            minimizer_angle(x, an).unwrap_or(f64::NAN)
        }))?;
        let exact = AngleField::minimizer(an);
        for j in 0..=500 {
            let x = -0.9 * a0 + 1.8 * a0 * j as f64 / 500.0;
            let p = core(LatLon::new(x, 1.0))?;
            let dt = core(eval_angle(&grid, p))? - core(eval_angle(&exact, p))?;
            let dd = core(directional_derivatives(&grid, p))?.theta2 - core(minimizer_slope(x, an))?;
            worst = worst.max(dt.abs()).max(dd.abs());
        }
    }
    ensure(worst <= 1e-6, || format!("deviation {}", e(worst)))?;
    Ok(format!("max deviation {} on middle 90%", e(worst)))
}

fn j_identity(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let a0 = rng.gen_range(0.05..1.5);
        let an = annulus(a0)?;
        let x: f64 = rng.gen_range(-1.0..=1.0) * a0;
        let t2: f64 = rng.gen_range(-20.0..20.0);
        let s = core(hi_split(x, an, t2))?;
        ensure(s.h >= 0.0 && s.i >= 0.0, || format!("negative part at alpha={x}"))?;
        let c = x.cos();
        worst = worst.max((s.h + s.i - (1.0 + c * c * t2 * t2)).abs());
    }
    ensure(worst <= 1e-12, || format!("residual {}", e(worst)))?;
    Ok(format!("max residual {} over 1e4 samples", e(worst)))
}

fn bound_validity(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<String, String> {
    let q = QuadratureScheme::default();
    let mut least = f64::INFINITY;
    for i in 0..12 {
        let a0 = rng.gen_range(0.2..1.4);
        let an = annulus(a0)?;
        let base: Arc<dyn AngleFunction> = if i % 2 == 0 {
            Arc::new(MinimizerSpec::new(an))
        } else {
            Arc::new(LinearProfile { alpha0: a0 })
        };
        let modes = (1..=3).map(|j| (2 * j, rng.gen_range(-0.3..0.3))).collect();
        let f = AngleField::closed_form(
            Arc::new(PinnedPerturbation { base, alpha0: a0, modes }),
            Region::Annulus(an),
        );
        ensure(core(check_boundary_conditions(&f, an, 1e-9))?.all_hold(), || {
            "sample field breaks the boundary hypotheses".to_string()
        })?;
        let value = core(axisymmetric_area(&f, an, &q))?;
        let bound = core(lower_bound_with(an, &q, cfg.bound_reading))?.bound;
        least = least.min(value - bound);
    }
    ensure(least >= -1e-6, || format!("area below bound by {}", e(-least)))?;
    Ok(format!("smallest gap {}", e(least)))
}

fn sharpness(_: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<String, String> {
    let mut worst = 0.0f64;
    for a0 in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, 1.4] {
        let an = annulus(a0)?;
        let value = core(axisymmetric_area(&AngleField::minimizer(an), an, &QuadratureScheme::default()))?;
        let bound = core(lower_bound_with(an, &QuadratureScheme::oracle(), cfg.bound_reading))?.bound;
        worst = worst.max((value - bound).abs());
    }
    ensure(worst <= 1e-6, || format!("minimizer misses bound by {}", e(worst)))?;
    Ok(format!("max |gap| {}", e(worst)))
}

fn quadrature_convergence(_: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let mut worst = 0.0f64;
    for a0 in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, 1.4] {
        let an = annulus(a0)?;
        let f = AngleField::minimizer(an);
        let mut prev: Option<f64> = None;
        for panels in [64, 128, 256] {
            let v = core(axisymmetric_area(&f, an, &QuadratureScheme::gauss_legendre(16, panels)))?;
            if let Some(p) = prev {
                worst = worst.max((v - p).abs());
            }
            prev = Some(v);
        }
    }
    ensure(worst <= 1e-9, || format!("panel doubling changed area by {}", e(worst)))?;
    Ok(format!("max change {}", e(worst)))
}

fn perturbation_optimality(_: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let q = QuadratureScheme::default();
    let mut least = f64::INFINITY;
    for a0 in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let an = annulus(a0)?;
        let best = core(axisymmetric_area(&AngleField::minimizer(an), an, &q))?;
        for eps in [1e-2, -1e-2, 1e-3, -1e-3] {
            let f = AngleField::closed_form(
                Arc::new(PinnedPerturbation {
                    base: Arc::new(MinimizerSpec::new(an)),
                    alpha0: a0,
                    modes: vec![(1, eps)],
                }),
                Region::Annulus(an),
            );
            least = least.min(core(axisymmetric_area(&f, an, &q))? - best);
        }
    }
    ensure(least >= 0.0, || format!("perturbation lowered area by {}", e(-least)))?;
    Ok(format!("smallest increase {}", e(least)))
}

fn odd_symmetry(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let a0 = rng.gen_range(0.05..1.5);
        let an = annulus(a0)?;
        let x = rng.gen_range(-1.0..=1.0) * a0;
        let s = core(minimizer_angle(x, an))? + core(minimizer_angle(-x, an))?;
        worst = worst.max((s - PI).abs());
    }
    ensure(worst <= 1e-12, || format!("theta(a)+theta(-a)-pi = {}", e(worst)))?;
    Ok(format!("max residual {}", e(worst)))
}

fn first_integral_check(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let a0: f64 = rng.gen_range(0.05..1.5);
        let an = annulus(a0)?;
        for j in 0..50 {
            let x = a0 * (-0.999 + 1.998 * j as f64 / 49.0);
            let q = first_integral(x, core(minimizer_slope(x, an))?);
            worst = worst.max((q - a0.cos()).abs());
        }
    }
    ensure(worst <= 1e-10, || format!("deviation from cos(alpha0) {}", e(worst)))?;
    Ok(format!("max deviation {}", e(worst)))
}

fn equality_condition(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let a0 = rng.gen_range(0.05..1.5);
        let an = annulus(a0)?;
        let lim = a0 - 1e-6;
        for j in 0..=50 {
            let x = -lim + 2.0 * lim * j as f64 / 50.0;
            let s = core(hi_split(x, an, core(minimizer_slope(x, an))?))?;
            worst = worst.max(s.i.abs());
        }
    }
    let an = annulus(FRAC_PI_4)?;
    let linear_slope = 2.0;
    let positive = (1..50).all(|j| {
        let x = -FRAC_PI_4 + FRAC_PI_2 * j as f64 / 50.0;
        hi_split(x, an, linear_slope).map(|s| s.i > 0.0).unwrap_or(false)
    });
    ensure(worst <= 1e-10, || format!("I along minimizer {}", e(worst)))?;
    ensure(positive, || "I vanished for the linear profile".to_string())?;
    Ok(format!("max I {} along minimizer; I > 0 for linear", e(worst)))
}

fn vk_attainment(_: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let mut worst = 0.0f64;
    for k in [1i64, 3, 4] {
        let r = core(area(&AngleField::vk(k), Region::PuncturedSphere, &QuadratureScheme::default()))?;
        let target = PI * core(ellipse_perimeter(k))?;
        worst = worst.max((r.area - target).abs());
    }
    ensure(worst <= 1e-6, || format!("area differs from pi*L by {}", e(worst)))?;
    Ok(format!("max |area - pi*L| {}", e(worst)))
}

fn ellipse_refines(_: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    for k in [1i64, 3, 4, 5, -1] {
        let b = core(reference_bounds(k))?;
        ensure(b.bcgn >= b.bcj - 1e-12, || format!("k={k}: {} < {}", b.bcgn, b.bcj))?;
    }
    Ok("bcgn >= bcj for k in {1,3,4,5,-1}".to_string())
}

fn descent_monotone(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    for _ in 0..4 {
        let an = annulus(rng.gen_range(0.2..1.4))?;
        let n = rng.gen_range(8..64);
        let opts = MinimizeOptions { max_iters: 2000, ..MinimizeOptions::default() };
        let mut last = f64::INFINITY;
        let mut rises = 0;
        core(minimize_profile_observed(an, n, &opts, |_, v, _| {
            if v > last {
                rises += 1;
            }
            last = v;
        }))?;
        ensure(rises == 0, || format!("area rose {rises} times"))?;
    }
    Ok("area non-increasing on 4 runs".to_string())
}

fn gradient_consistency(rng: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a0: f64 = rng.gen_range(0.2..1.4);
        let an = annulus(a0)?;
        let n = rng.gen_range(8..60);
        let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.4..0.4)).collect();
        let mut p = core(Profile::from_fn(an, substituted_nodes(an, n), |x| {
            let t = (x + a0) / (2.0 * a0);
            PI * t
                + coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * ((j + 1) as f64 * PI * t).sin())
                    .sum::<f64>()
        }))?;
        let g = area_gradient(&p);
        let base = p.interior().to_vec();
        let h = 1e-7;
        for j in 0..base.len() {
            let mut v = base.clone();
            v[j] += h;
            core(p.set_interior(&v))?;
            let up = discrete_area(&p);
            v[j] = base[j] - h;
            core(p.set_interior(&v))?;
            let down = discrete_area(&p);
            worst = worst.max(((up - down) / (2.0 * h) - g[j]).abs());
        }
    }
    ensure(worst <= 1e-6, || format!("gradient differs by {}", e(worst)))?;
    Ok(format!("max difference {} on 20 profiles", e(worst)))
}

fn oracle_convergence(_: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let an = annulus(FRAC_PI_4)?;
    let opts = MinimizeOptions { direction: Direction::ConjugateGradient, ..MinimizeOptions::default() };
    let devs = [50, 100, 200, 400]
        .par_iter()
        .map(|&n| minimize_profile(an, n, &opts).map(|r| r.max_deviation_from_closed_form))
        .collect::<sasaki_core::Result<Vec<f64>>>()
        .map_err(|e| e.to_string())?;
    let shown = devs.iter().map(|d| e(*d)).collect::<Vec<_>>().join(" ");
    ensure(devs.windows(2).all(|w| w[1] < w[0]), || format!("not decreasing: {shown}"))?;
    Ok(format!("deviation at n=50..400: {shown}"))
}

fn discretization_order(_: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<String, String> {
    let an = annulus(FRAC_PI_4)?;
    let errs = [50, 100, 200, 400]
        .iter()
        .map(|&n| Profile::sampled_minimizer(an, n).map(|p| (discrete_area(&p) - TWO_PI_SQ).abs()))
        .collect::<sasaki_core::Result<Vec<f64>>>()
        .map_err(|e| e.to_string())?;
    let order = errs.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
    ensure(order >= 1.0, || format!("observed order {order:.2}"))?;
    Ok(format!("observed order >= {order:.2}"))
}
