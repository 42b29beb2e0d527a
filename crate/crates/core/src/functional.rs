//! The Sasaki area functional and the annulus lower bound.
//!
//! For `V = cos θ e1 + sin θ e2` the area of `V(M)` in the unit tangent
//! bundle is `∫ sqrt(1 + γ² + δ²) ν = ∫ sqrt(1 + (tan α + θ₁)² + θ₂²) ν`
//! with `ν = cos α dβ dα`. When `θ₁ ≡ 0` this reduces to
//! `2π ∫ sqrt(1 + cos²α · θ₂²) dα`.
//!
//! On the annulus `|α| ≤ α₀`, writing `J = 1 + cos²α θ₂² = H + I` with
//!
//! ```text
//! H = ( sqrt(1 − cos²α₀ sec²α) + cos α₀ θ₂ )²
//! I = ( −cos α₀ sec α + sqrt(1 − cos²α₀ sec²α) cos α θ₂ )²
//! ```
//!
//! gives `sqrt(J) ≥ sqrt(1 − cos²α₀ sec²α) + cos α₀ θ₂`, and integrating
//! with `θ(−α₀) = 0`, `θ(α₀) = π` yields `area ≥ K + 2π² cos α₀`.
use alloc::vec::Vec;

use core::f64::consts::{FRAC_PI_2, PI, TAU};

use libm::{cos, fabs, sin, sqrt, tan};

use crate::closed_forms::{ellipse_bound, MinimizerSpec};
use crate::fields::{
    check_boundary_conditions, curvatures_from, directional_derivatives, poincare_index,
    AngleField, BoundaryReport, FieldKind, Pole,
};
use crate::quadrature::{pairwise_sum, EndpointMap, QuadratureScheme};
use crate::sphere::{AnnulusSpec, LatLon, Region};
use crate::{Error, Result};

/// Relative agreement required between the curvature and derivative forms
/// of the integrand.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Longitudes in the periodic rule used for fields that depend on `β`.
pub const BETA_SAMPLES: usize = 64;

/// Boundary tolerance used when deciding whether the annulus bound applies.
pub const HYPOTHESIS_TOL: f64 = 1e-8;

/// Absolute slack added to quadrature error estimates before a bound
/// violation is treated as real.
pub const BOUND_SLACK: f64 = 1e-9;

/// `sqrt(1 + γ² + δ²)` at `p`, checked against
/// `sqrt(1 + (tan α + θ₁)² + θ₂²)`.
pub fn pointwise_integrand(f: &AngleField, p: LatLon) -> Result<f64> {
    let d = directional_derivatives(f, p)?;
    let theta = crate::fields::eval_angle(f, p)?;
    let k = curvatures_from(theta, p.alpha(), d);
    let curvature_form = sqrt(1.0 + k.gamma * k.gamma + k.delta * k.delta);
    let shifted = tan(p.alpha()) + d.theta1;
    let derivative_form = sqrt(1.0 + shifted * shifted + d.theta2 * d.theta2);
    if fabs(curvature_form - derivative_form) > IDENTITY_TOL * derivative_form.max(1.0) {
        return Err(Error::IdentityViolation { curvature_form, derivative_form });
    }
    Ok(curvature_form)
}

/// The two pieces of `J = 1 + cos²α θ₂²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiSplit {
    pub h: f64,
    pub i: f64,
}

/// `sqrt(1 − cos²α₀ sec²α)` written as `sqrt(sin²α₀ − sin²α) / cos α`.
fn boundary_gap_ratio(alpha: f64, sin_alpha0: f64) -> f64 {
    let s = sin(alpha);
    sqrt(((sin_alpha0 - s) * (sin_alpha0 + s)).max(0.0)) / cos(alpha)
}

pub fn hi_split(alpha: f64, a: AnnulusSpec, theta2: f64) -> Result<HiSplit> {
    if !a.contains(alpha) {
        return Err(Error::OutsideAnnulus { alpha, alpha0: a.alpha0() });
    }
    let c0 = cos(a.alpha0());
    let ca = cos(alpha);
    let root = boundary_gap_ratio(alpha, sin(a.alpha0()));
    let h = root + c0 * theta2;
    let i = -c0 / ca + root * ca * theta2;
    Ok(HiSplit { h: h * h, i: i * i })
}

/// Conserved quantity `cos²α θ₂ / sqrt(1 + cos²α θ₂²)` of the reduced
/// Lagrangian `sqrt(1 + cos²α θ₂²)`.
pub fn first_integral(alpha: f64, theta2: f64) -> f64 {
    let c2 = cos(alpha) * cos(alpha);
    c2 * theta2 / sqrt(1.0 + c2 * theta2 * theta2)
}

/// Which coefficient multiplies `cos α₀` in the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundReading {
    /// `K + 2π² cos α₀`, forced by `∬ θ₂ dβ dα = 2π · π`.
    #[default]
    Corrected,
    /// `K + 2π cos α₀`; the minimizer does not attain it.
    Literal,
}

impl BoundReading {
    pub fn coefficient(&self) -> f64 {
        match self {
            BoundReading::Corrected => 2.0 * PI * PI,
            BoundReading::Literal => TAU,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    /// `K = 2π ∫ sqrt(1 − cos²α₀ sec²α) dα`.
    pub k_constant: f64,
    pub bound: f64,
}

pub fn lower_bound(a: AnnulusSpec, q: &QuadratureScheme) -> Result<LowerBound> {
    lower_bound_with(a, q, BoundReading::Corrected)
}

pub fn lower_bound_with(
    a: AnnulusSpec,
    q: &QuadratureScheme,
    reading: BoundReading,
) -> Result<LowerBound> {
    let a0 = a.alpha0();
    let s0 = sin(a0);
    let integral = if q.endpoint_substitution {
        // sqrt(1 − cos²α₀ sec²α) dα = (sin α₀ cos u / cos α)² du
        let map = EndpointMap::new(a0);
        let (lo, hi) = map.u_range();
        q.integrate(lo, hi, |u| {
            let p = map.at(u);
            let r = p.gap / p.cos_alpha;
            r * r
        })?
    } else {
        q.integrate(-a0, a0, |x| boundary_gap_ratio(x, s0))?
    };
    let k_constant = TAU * integral;
    Ok(LowerBound { k_constant, bound: k_constant + reading.coefficient() * cos(a0) })
}

/// `2π²(1 − cos α₀)`: the value of `K` that makes the bound identically
/// `2π²`. Compared against quadrature, never substituted for it.
pub fn k_conjectured_closed_form(a: AnnulusSpec) -> f64 {
    2.0 * PI * PI * (1.0 - cos(a.alpha0()))
}

/// `2π ∫ sqrt(1 + cos²α θ₂²) dα` for a field with `θ₁ ≡ 0`.
pub fn axisymmetric_area(f: &AngleField, a: AnnulusSpec, q: &QuadratureScheme) -> Result<f64> {
    axisymmetric_integral(f, Region::Annulus(a), q)
}

fn axisymmetric_integral(f: &AngleField, region: Region, q: &QuadratureScheme) -> Result<f64> {
    if !f.is_axisymmetric() {
        return Err(Error::InvalidScheme("axisymmetric area needs a field with theta1 = 0"));
    }
    let h = region.half_width();
    f.check_domain(h.min(FRAC_PI_2 - f64::EPSILON))?;
    f.check_domain(-h.min(FRAC_PI_2 - f64::EPSILON))?;
    // Spline knots are kinks of the integrand; keep panels between them.
    let knots = match f.kind() {
        FieldKind::Grid(g) => Some(g),
        FieldKind::ClosedForm(_) => None,
    };
    let integral = match region {
        Region::Annulus(a) if q.endpoint_substitution => {
            let map = EndpointMap::new(a.alpha0());
            let (lo, hi) = map.u_range();
            let g = |u: f64| {
                let p = map.at(u);
                let tu = f.slope_in_u(&p, &map);
                let ct = p.cos_alpha * tu;
                sqrt(p.dalpha_du * p.dalpha_du + ct * ct)
            };
            match knots {
                Some(grid) => q.integrate_pieces(grid.knots_u(), g)?,
                None => q.integrate(lo, hi, g)?,
            }
        }
        _ => {
            let g = |x: f64| {
                let t2 = f.raw(x, FRAC_PI_2).1;
                let ct = cos(x) * t2;
                sqrt(1.0 + ct * ct)
            };
            match knots {
                Some(grid) => q.integrate_pieces(grid.alphas(), g)?,
                None => q.integrate(-h, h, g)?,
            }
        }
    };
    Ok(TAU * integral)
}

// ∫ sqrt(1 + (tan α + θ₁)² + θ₂²) cos α dβ written as
// ∫ sqrt(cos²α + (sin α + ∂θ/∂β)² + cos²α (∂θ/∂α)²) dβ, bounded at the poles.
fn general_integral(f: &AngleField, region: Region, q: &QuadratureScheme) -> Result<f64> {
    let row = |alpha: f64, jacobian: f64| -> f64 {
        let (sa, ca) = (sin(alpha), cos(alpha));
        let weight = TAU / BETA_SAMPLES as f64;
        let terms: Vec<f64> = (1..=BETA_SAMPLES)
            .map(|j| {
                let beta = TAU * j as f64 / BETA_SAMPLES as f64;
                let (_, da, db) = f.raw(alpha, beta);
                let shifted = sa + db;
                let slope = ca * da;
                weight * jacobian * sqrt(ca * ca + shifted * shifted + slope * slope)
            })
            .collect();
        pairwise_sum(&terms)
    };
    match region {
        Region::Annulus(a) if q.endpoint_substitution => {
            let map = EndpointMap::new(a.alpha0());
            let (lo, hi) = map.u_range();
            q.integrate(lo, hi, |u| {
                let p = map.at(u);
                row(p.alpha, p.dalpha_du)
            })
        }
        _ => {
            let h = region.half_width();
            q.integrate(-h, h, |x| row(x, 1.0))
        }
    }
}

fn integrate_area(f: &AngleField, region: Region, q: &QuadratureScheme) -> Result<f64> {
    if f.is_axisymmetric() {
        axisymmetric_integral(f, region, q)
    } else {
        general_integral(f, region, q)
    }
}

/// Which bound an [`AreaReport`] is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `K + 2π² cos α₀` on an annulus.
    Annulus,
    /// `π L(ε_k)` on the punctured sphere, `k = max(I_N, I_S)`.
    IndexEllipse { k: i64 },
    /// No bound applies (excluded index class).
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AreaReport {
    pub area: f64,
    pub lower_bound: Option<f64>,
    pub k_constant: Option<f64>,
    pub gap: Option<f64>,
    pub bound_kind: BoundKind,
    pub scheme_used: QuadratureScheme,
    /// `|area − area under the companion scheme|`.
    pub estimated_quadrature_error: f64,
    /// Whether the field meets the hypotheses under which the bound holds.
    pub hypotheses_hold: bool,
    pub boundary: Option<BoundaryReport>,
}

/// Latitude of the loops used to read off pole indices.
pub const POLE_LOOP_LATITUDE: f64 = FRAC_PI_2 - 1e-3;

/// Area of `f` over `region`, with the applicable bound and the gap to it.
///
/// Fails with [`Error::BoundViolation`] when a field that meets the bound's
/// hypotheses lands below it by more than the quadrature error estimate.
pub fn area(f: &AngleField, region: Region, q: &QuadratureScheme) -> Result<AreaReport> {
    let h = region.half_width();
    let probe = h.min(FRAC_PI_2 - 1e-12);
    f.check_domain(probe)?;
    f.check_domain(-probe)?;

    let value = integrate_area(f, region, q)?;
    let companion = q.companion();
    let check = integrate_area(f, region, &companion)?;
    let area_err = fabs(value - check);

    let (lower_bound, k_constant, bound_kind, bound_err, boundary, hypotheses_hold) = match region {
        Region::Annulus(a) => {
            let lb = lower_bound(a, q)?;
            let lb_check = lower_bound(a, &companion)?;
            let report = check_boundary_conditions(f, a, HYPOTHESIS_TOL)?;
            let holds = report.all_hold() && f.is_axisymmetric();
            (
                Some(lb.bound),
                Some(lb.k_constant),
                BoundKind::Annulus,
                fabs(lb.bound - lb_check.bound),
                Some(report),
                holds,
            )
        }
        Region::PuncturedSphere => {
            let north = poincare_index(f, Pole::North, POLE_LOOP_LATITUDE)?;
            let south = poincare_index(f, Pole::South, -POLE_LOOP_LATITUDE)?;
            let k = north.max(south);
            match ellipse_bound(k) {
                Ok(e) => (Some(e.bound), None, BoundKind::IndexEllipse { k }, 0.0, None, true),
                Err(_) => (None, None, BoundKind::None, 0.0, None, false),
            }
        }
    };
    let gap = lower_bound.map(|b| value - b);
    let estimated_quadrature_error = area_err + bound_err;
    if let (Some(g), Some(b), true) = (gap, lower_bound, hypotheses_hold) {
        let tolerance = estimated_quadrature_error + BOUND_SLACK;
        if g < -tolerance {
            return Err(Error::BoundViolation { area: value, bound: b, tolerance });
        }
    }
    Ok(AreaReport {
        area: value,
        lower_bound,
        k_constant,
        gap,
        bound_kind,
        scheme_used: *q,
        estimated_quadrature_error,
        hypotheses_hold,
        boundary,
    })
}

/// Reduced-area integrand of the minimizer at `α`, in closed form:
/// `cos α / sqrt(cos²α − cos²α₀)`.
pub fn minimizer_reduced_integrand(alpha: f64, a: AnnulusSpec) -> f64 {
    let spec = MinimizerSpec::new(a);
    let s = sin(alpha);
    let s0 = sin(spec.alpha0);
    cos(alpha) / sqrt((s0 - s) * (s0 + s))
}
