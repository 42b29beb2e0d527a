//! Unit vector fields encoded by their angle function.
//!
//! A field is `V = cos θ · e1 + sin θ · e2`, with `e1` tangent to parallels
//! and `e2` tangent to meridians. Closed-form fields carry exact partials;
//! grid fields are axisymmetric samples `θ(α_i)` joined by a natural cubic
//! spline in the endpoint variable `u` (`sin α = sin α₀ sin u`), where
//! profiles with a square-root boundary layer are still smooth.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};
use core::fmt;

use libm::{cos, fabs, round, sin, tan};

use crate::closed_forms::{MinimizerSpec, VkField};
use crate::quadrature::{EndpointMap, MappedPoint};
use crate::sphere::{AnnulusSpec, LatLon, Region};
use crate::spline::CubicSpline;
use crate::{Error, Result};

/// An angle function with exact partial derivatives.
pub trait AngleFunction: fmt::Debug + Send + Sync {
    fn theta(&self, alpha: f64, beta: f64) -> f64;

    /// `∂θ/∂α`.
    fn d_alpha(&self, alpha: f64, beta: f64) -> f64;

    /// `∂θ/∂β`.
    fn d_beta(&self, alpha: f64, beta: f64) -> f64;

    /// True when `θ` does not depend on `β`.
    fn is_axisymmetric(&self) -> bool;

    /// `dθ/du` along `map`, for functions whose latitude slope diverges at
    /// `±α₀` but stays bounded in `u`. `None` falls back to the chain rule.
    fn d_theta_du(&self, _p: &MappedPoint, _map: &EndpointMap) -> Option<f64> {
        None
    }
}

/// `θ ≡ value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantAngle(pub f64);

impl AngleFunction for ConstantAngle {
    fn theta(&self, _: f64, _: f64) -> f64 {
        self.0
    }
    fn d_alpha(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d_beta(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn is_axisymmetric(&self) -> bool {
        true
    }
}

/// `θ(α) = π (α + α₀) / (2 α₀)`, running from 0 to π across the annulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearProfile {
    pub alpha0: f64,
}

impl AngleFunction for LinearProfile {
    fn theta(&self, alpha: f64, _: f64) -> f64 {
        PI * (alpha + self.alpha0) / (2.0 * self.alpha0)
    }
    fn d_alpha(&self, _: f64, _: f64) -> f64 {
        PI / (2.0 * self.alpha0)
    }
    fn d_beta(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn is_axisymmetric(&self) -> bool {
        true
    }
}

/// `base + Σ a_j sin(j π (α + α₀) / (2 α₀))`. Every mode vanishes at `±α₀`,
/// so boundary values of the base are kept; even modes also vanish at the
/// equator.
#[derive(Debug, Clone)]
pub struct PinnedPerturbation {
    pub base: Arc<dyn AngleFunction>,
    pub alpha0: f64,
    pub modes: Vec<(u32, f64)>,
}

impl PinnedPerturbation {
    fn phase(&self, j: u32, alpha: f64) -> f64 {
        j as f64 * PI * (alpha + self.alpha0) / (2.0 * self.alpha0)
    }

    fn bump_slope(&self, alpha: f64) -> f64 {
        self.modes
            .iter()
            .map(|&(j, a)| a * j as f64 * PI / (2.0 * self.alpha0) * cos(self.phase(j, alpha)))
            .sum()
    }
}

impl AngleFunction for PinnedPerturbation {
    fn theta(&self, alpha: f64, beta: f64) -> f64 {
        let bump: f64 = self.modes.iter().map(|&(j, a)| a * sin(self.phase(j, alpha))).sum();
        self.base.theta(alpha, beta) + bump
    }
    fn d_alpha(&self, alpha: f64, beta: f64) -> f64 {
        self.base.d_alpha(alpha, beta) + self.bump_slope(alpha)
    }
    fn d_beta(&self, alpha: f64, beta: f64) -> f64 {
        self.base.d_beta(alpha, beta)
    }
    fn is_axisymmetric(&self) -> bool {
        self.base.is_axisymmetric()
    }
    fn d_theta_du(&self, p: &MappedPoint, map: &EndpointMap) -> Option<f64> {
        let base = self.base.d_theta_du(p, map)?;
        Some(base + self.bump_slope(p.alpha) * p.dalpha_du)
    }
}

#[derive(Debug, Clone)]
pub enum FieldKind {
    ClosedForm(Arc<dyn AngleFunction>),
    /// Axisymmetric samples; latitudes span the whole annulus.
    Grid(GridProfile),
}

/// Step of the one-sided difference used for `∂θ/∂α` exactly at `±α₀`,
/// where the chain rule through `u` divides by zero.
pub const GRID_EDGE_STEP: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct GridProfile {
    alphas: Vec<f64>,
    map: EndpointMap,
    spline: CubicSpline,
}

impl GridProfile {
    fn new(a: AnnulusSpec, alphas: Vec<f64>, thetas: Vec<f64>) -> Result<Self> {
        let a0 = a.alpha0();
        match (alphas.first(), alphas.last()) {
            (Some(&lo), Some(&hi)) => {
                if fabs(lo + a0) > GRID_ENDPOINT_TOL || fabs(hi - a0) > GRID_ENDPOINT_TOL {
                    return Err(Error::InvalidGrid("latitudes must run from -alpha0 to alpha0"));
                }
            }
            _ => return Err(Error::InvalidGrid("at least two samples are required")),
        }
        if alphas.len() != thetas.len() {
            return Err(Error::InvalidGrid("latitudes and values differ in length"));
        }
        if alphas.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("latitudes must be strictly increasing"));
        }
        let map = EndpointMap::new(a0);
        let n = alphas.len() - 1;
        let us: Vec<f64> = alphas
            .iter()
            .enumerate()
            .map(|(j, &x)| match j {
                0 => -FRAC_PI_2,
                j if j == n => FRAC_PI_2,
                _ => map.u_of(x),
            })
            .collect();
        let spline = CubicSpline::new(us, thetas)?;
        Ok(GridProfile { alphas, map, spline })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn thetas(&self) -> &[f64] {
        self.spline.ys()
    }

    /// Sample positions in `u`.
    pub fn knots_u(&self) -> &[f64] {
        self.spline.xs()
    }

    pub fn theta(&self, alpha: f64) -> f64 {
        self.spline.eval(self.map.u_of(alpha))
    }

    pub fn theta_u(&self, u: f64) -> f64 {
        self.spline.eval_with_derivative(u).1
    }

    /// `∂θ/∂α`, by the chain rule inside the annulus and a one-sided
    /// difference at its edges.
    pub fn d_alpha(&self, alpha: f64) -> f64 {
        let p = self.map.at(self.map.u_of(alpha));
        if p.dalpha_du > 0.0 {
            return self.theta_u(p.u) / p.dalpha_du;
        }
        let h = if alpha > 0.0 { -GRID_EDGE_STEP } else { GRID_EDGE_STEP };
        (self.theta(alpha + h) - self.theta(alpha)) / h
    }
}

#[derive(Debug, Clone)]
pub struct AngleField {
    kind: FieldKind,
    region: Region,
}

/// Tolerance on grid endpoints matching `±α₀`.
pub const GRID_ENDPOINT_TOL: f64 = 1e-9;

impl AngleField {
    pub fn closed_form(f: Arc<dyn AngleFunction>, region: Region) -> Self {
        AngleField { kind: FieldKind::ClosedForm(f), region }
    }

    /// The area minimizer `θ = arcsin(cot α₀ tan α) + π/2` on `A`.
    pub fn minimizer(a: AnnulusSpec) -> Self {
        Self::closed_form(Arc::new(MinimizerSpec::new(a)), Region::Annulus(a))
    }

    pub fn constant(value: f64, region: Region) -> Self {
        Self::closed_form(Arc::new(ConstantAngle(value)), region)
    }

    pub fn linear(a: AnnulusSpec) -> Self {
        Self::closed_form(Arc::new(LinearProfile { alpha0: a.alpha0() }), Region::Annulus(a))
    }

    /// `V_k` on the twice-punctured sphere.
    pub fn vk(k: i64) -> Self {
        Self::closed_form(Arc::new(VkField { k }), Region::PuncturedSphere)
    }

    /// Axisymmetric grid field; the first and last latitudes must be `∓α₀`.
    pub fn grid(a: AnnulusSpec, alphas: Vec<f64>, thetas: Vec<f64>) -> Result<Self> {
        let g = GridProfile::new(a, alphas, thetas)?;
        Ok(AngleField { kind: FieldKind::Grid(g), region: Region::Annulus(a) })
    }

    /// Samples `f` on `nodes` (which must start at `−α₀` and end at `α₀`).
    pub fn sample_onto_grid<F>(a: AnnulusSpec, nodes: &[f64], mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> f64,
    {
        let thetas = nodes.iter().map(|&x| f(x)).collect();
        Self::grid(a, nodes.to_vec(), thetas)
    }

    /// Same angle function, declared on another region.
    pub fn restricted(&self, region: Region) -> Self {
        AngleField { kind: self.kind.clone(), region }
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn is_axisymmetric(&self) -> bool {
        match &self.kind {
            FieldKind::ClosedForm(f) => f.is_axisymmetric(),
            FieldKind::Grid(_) => true,
        }
    }

    pub(crate) fn check_domain(&self, alpha: f64) -> Result<()> {
        if self.region.contains(alpha) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { alpha, limit: self.region.half_width() })
        }
    }

    /// `θ` and its coordinate partials `(∂θ/∂α, ∂θ/∂β)` without domain checks.
    pub(crate) fn raw(&self, alpha: f64, beta: f64) -> (f64, f64, f64) {
        match &self.kind {
            FieldKind::ClosedForm(f) => {
                (f.theta(alpha, beta), f.d_alpha(alpha, beta), f.d_beta(alpha, beta))
            }
            FieldKind::Grid(g) => (g.theta(alpha), g.d_alpha(alpha), 0.0),
        }
    }

    /// `dθ/du` at a mapped latitude, for axisymmetric fields.
    pub(crate) fn slope_in_u(&self, p: &MappedPoint, map: &EndpointMap) -> f64 {
        match &self.kind {
            FieldKind::ClosedForm(f) => {
                if let Some(v) = f.d_theta_du(p, map) {
                    return v;
                }
            }
            FieldKind::Grid(g) if g.map.alpha0() == map.alpha0() => return g.theta_u(p.u),
            FieldKind::Grid(_) => {}
        }
        self.raw(p.alpha, FRAC_PI_2).1 * p.dalpha_du
    }
}

pub fn eval_angle(f: &AngleField, p: LatLon) -> Result<f64> {
    f.check_domain(p.alpha())?;
    Ok(f.raw(p.alpha(), p.beta()).0)
}

/// Derivatives of `θ` along the unit frame vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativePair {
    /// `dθ(e1) = (∂θ/∂β) / cos α`.
    pub theta1: f64,
    /// `dθ(e2) = ∂θ/∂α`.
    pub theta2: f64,
}

pub fn directional_derivatives(f: &AngleField, p: LatLon) -> Result<DerivativePair> {
    f.check_domain(p.alpha())?;
    let (_, da, db) = f.raw(p.alpha(), p.beta());
    if !da.is_finite() || !db.is_finite() {
        return Err(Error::BoundarySingularity { alpha: p.alpha(), alpha0: f.region.half_width() });
    }
    Ok(DerivativePair { theta1: db / cos(p.alpha()), theta2: da })
}

/// Geodesic curvatures of the integral curves of `V` and `V⊥`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvaturePair {
    pub gamma: f64,
    pub delta: f64,
}

pub fn curvatures_from(theta: f64, alpha: f64, d: DerivativePair) -> CurvaturePair {
    let (s, c) = (sin(theta), cos(theta));
    let shifted = tan(alpha) + d.theta1;
    CurvaturePair {
        gamma: c * shifted + s * d.theta2,
        delta: s * shifted - c * d.theta2,
    }
}

pub fn geodesic_curvatures(f: &AngleField, p: LatLon) -> Result<CurvaturePair> {
    let d = directional_derivatives(f, p)?;
    let theta = f.raw(p.alpha(), p.beta()).0;
    Ok(curvatures_from(theta, p.alpha(), d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pole {
    North,
    South,
}

/// Fewest samples accepted on a winding loop.
pub const MIN_LOOP_SAMPLES: usize = 720;

/// Index of `V` at a pole, from the winding of `θ` along the parallel at
/// `loop_latitude` traversed with increasing `β`.
pub fn poincare_index(f: &AngleField, pole: Pole, loop_latitude: f64) -> Result<i64> {
    poincare_index_sampled(f, pole, loop_latitude, 4 * MIN_LOOP_SAMPLES)
}

/// Winding of `θ` along a parallel, in turns; successive samples are joined
/// on the nearest branch and a jump larger than π/2 is rejected.
pub fn loop_winding(f: &AngleField, loop_latitude: f64, samples: usize) -> Result<f64> {
    let p0 = LatLon::new(loop_latitude, TAU)?;
    f.check_domain(p0.alpha())?;
    let samples = samples.max(MIN_LOOP_SAMPLES);
    let first = f.raw(loop_latitude, TAU / samples as f64).0;
    let mut prev = first;
    let mut total = 0.0;
    for j in 2..=samples + 1 {
        let theta = if j == samples + 1 {
            first
        } else {
            f.raw(loop_latitude, TAU * j as f64 / samples as f64).0
        };
        if !theta.is_finite() {
            return Err(Error::NonIntegralWinding { value: f64::NAN });
        }
        let step = wrap_to_pi(theta - prev);
        if fabs(step) > FRAC_PI_2 {
            return Err(Error::NonIntegralWinding { value: total / TAU });
        }
        total += step;
        prev = theta;
    }
    Ok(total / TAU)
}

pub fn poincare_index_sampled(
    f: &AngleField,
    pole: Pole,
    loop_latitude: f64,
    samples: usize,
) -> Result<i64> {
    let w = loop_winding(f, loop_latitude, samples)?;
    let raw = match pole {
        Pole::North => 1.0 + w,
        Pole::South => 1.0 - w,
    };
    let nearest = round(raw);
    if fabs(raw - nearest) > 0.1 {
        return Err(Error::NonIntegralWinding { value: raw });
    }
    Ok(nearest as i64)
}

/// Reduces an angle into `(−π, π]`.
pub fn wrap_to_pi(x: f64) -> f64 {
    let r = x - TAU * round(x / TAU);
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Distance from `x` to the nearest multiple of `period`.
fn distance_to_lattice(x: f64, period: f64) -> f64 {
    fabs(x - period * round(x / period))
}

/// Result of testing the annulus boundary hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryReport {
    /// `θ(±α₀, β)` is a multiple of π.
    pub tangent_at_boundaries: bool,
    /// `θ(−α₀, β) = 0` and `θ(α₀, β) = π` modulo 2π.
    pub antipodal_opposition: bool,
    /// `θ(0, β)` is an odd multiple of π/2.
    pub perpendicular_at_equator: bool,
    /// Largest angular violation over all three conditions, radians.
    pub max_violation: f64,
    pub tangency_violation: f64,
    pub opposition_violation: f64,
    pub perpendicularity_violation: f64,
    pub tolerance: f64,
}

impl BoundaryReport {
    pub fn all_hold(&self) -> bool {
        self.tangent_at_boundaries && self.antipodal_opposition && self.perpendicular_at_equator
    }
}

/// Longitudes sampled by [`check_boundary_conditions`].
pub const BOUNDARY_SAMPLES: usize = 64;

pub fn check_boundary_conditions(
    f: &AngleField,
    a: AnnulusSpec,
    tol: f64,
) -> Result<BoundaryReport> {
    let a0 = a.alpha0();
    f.check_domain(a0)?;
    f.check_domain(-a0)?;
    let (mut tangency, mut opposition, mut perpendicularity) = (0.0f64, 0.0f64, 0.0f64);
    for j in 1..=BOUNDARY_SAMPLES {
        let beta = TAU * j as f64 / BOUNDARY_SAMPLES as f64;
        let lower = f.raw(-a0, beta).0;
        let upper = f.raw(a0, beta).0;
        let equator = f.raw(0.0, beta).0;
        tangency = tangency
            .max(distance_to_lattice(lower, PI))
            .max(distance_to_lattice(upper, PI));
        opposition = opposition
            .max(distance_to_lattice(lower, TAU))
            .max(distance_to_lattice(upper - PI, TAU));
        perpendicularity = perpendicularity.max(distance_to_lattice(equator - FRAC_PI_2, PI));
    }
    Ok(BoundaryReport {
        tangent_at_boundaries: tangency <= tol,
        antipodal_opposition: opposition <= tol,
        perpendicular_at_equator: perpendicularity <= tol,
        max_violation: tangency.max(opposition).max(perpendicularity),
        tangency_violation: tangency,
        opposition_violation: opposition,
        perpendicularity_violation: perpendicularity,
        tolerance: tol,
    })
}
