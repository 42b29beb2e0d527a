//! Discrete minimization of the reduced area over axisymmetric profiles.
//!
//! A [`Profile`] is a piecewise-linear `θ(α)` with `θ(−α₀) = 0` and
//! `θ(α₀) = π` pinned. Its area is the midpoint sum
//! `Σ 2π Δα_i sqrt(1 + cos²(ᾱ_i) s_i²)` over segment slopes `s_i`, which is
//! convex in the interior values and is minimized by gradient descent with
//! a halving Armijo line search.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use libm::{asin, cos, fabs, sin, sqrt};

use crate::closed_forms::minimizer_angle;
use crate::fields::{AngleField, GRID_ENDPOINT_TOL};
use crate::functional::axisymmetric_area;
use crate::quadrature::{pairwise_sum, QuadratureScheme};
use crate::sphere::AnnulusSpec;
use crate::{Error, Result};

/// Sufficient-decrease constant of the line search.
pub const ARMIJO_C: f64 = 1e-4;

/// Smallest segment count accepted by [`minimize_profile`].
pub const MIN_SEGMENTS: usize = 8;

/// `n + 1` latitudes uniform in `u`, `sin α = sin α₀ sin u`, so nodes
/// cluster near `±α₀`. Exactly `∓α₀` at the ends and mirror-symmetric.
pub fn substituted_nodes(a: AnnulusSpec, n: usize) -> Vec<f64> {
    let a0 = a.alpha0();
    let s0 = sin(a0);
    let mut nodes = alloc::vec![0.0; n + 1];
    for j in 0..=n / 2 {
        let u = -FRAC_PI_2 + PI * j as f64 / n as f64;
        let x = if j == 0 { -a0 } else { asin(s0 * sin(u)) };
        nodes[j] = x;
        nodes[n - j] = -x;
    }
    if n % 2 == 0 {
        nodes[n / 2] = 0.0;
    }
    nodes
}

pub fn uniform_nodes(a: AnnulusSpec, n: usize) -> Vec<f64> {
    let a0 = a.alpha0();
    let mut nodes: Vec<f64> = (0..=n).map(|j| -a0 + 2.0 * a0 * j as f64 / n as f64).collect();
    nodes[0] = -a0;
    nodes[n] = a0;
    nodes
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    alpha0: f64,
    nodes: Vec<f64>,
    thetas: Vec<f64>,
}

impl Profile {
    pub fn new(a: AnnulusSpec, nodes: Vec<f64>, thetas: Vec<f64>) -> Result<Self> {
        let a0 = a.alpha0();
        if nodes.len() != thetas.len() {
            return Err(Error::InvalidProfile("nodes and values differ in length"));
        }
        if nodes.len() < 2 {
            return Err(Error::InvalidProfile("a profile needs at least one segment"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidProfile("nodes must be strictly increasing"));
        }
        let n = nodes.len() - 1;
        if fabs(nodes[0] + a0) > GRID_ENDPOINT_TOL || fabs(nodes[n] - a0) > GRID_ENDPOINT_TOL {
            return Err(Error::InvalidProfile("nodes must run from -alpha0 to alpha0"));
        }
        if thetas[0] != 0.0 || thetas[n] != PI {
            return Err(Error::InvalidProfile("endpoint values must be pinned to 0 and pi"));
        }
        if thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidProfile("values must be finite"));
        }
        Ok(Profile { alpha0: a0, nodes, thetas })
    }

    /// Samples `f` at interior nodes; endpoint values are pinned regardless.
    pub fn from_fn<F>(a: AnnulusSpec, nodes: Vec<f64>, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> f64,
    {
        let n = nodes.len().saturating_sub(1);
        let thetas = nodes
            .iter()
            .enumerate()
            .map(|(j, &x)| match j {
                0 => 0.0,
                j if j == n => PI,
                _ => f(x),
            })
            .collect();
        Self::new(a, nodes, thetas)
    }

    /// Straight line from 0 to π on substituted nodes.
    pub fn linear(a: AnnulusSpec, n: usize) -> Result<Self> {
        let a0 = a.alpha0();
        Self::from_fn(a, substituted_nodes(a, n), |x| PI * (x + a0) / (2.0 * a0))
    }

    /// The closed-form minimizer sampled on substituted nodes.
    pub fn sampled_minimizer(a: AnnulusSpec, n: usize) -> Result<Self> {
        Self::from_fn(a, substituted_nodes(a, n), |x| {
            minimizer_angle(x, a).unwrap_or(f64::NAN)
        })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn segments(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn interior(&self) -> &[f64] {
        &self.thetas[1..self.thetas.len() - 1]
    }

    pub fn set_interior(&mut self, values: &[f64]) -> Result<()> {
        let n = self.segments();
        if values.len() != n - 1 {
            return Err(Error::InvalidProfile("interior length mismatch"));
        }
        self.thetas[1..n].copy_from_slice(values);
        Ok(())
    }

    /// As a grid field on its annulus.
    pub fn to_field(&self, a: AnnulusSpec) -> Result<AngleField> {
        AngleField::grid(a, self.nodes.clone(), self.thetas.clone())
    }

    fn geometry(&self) -> Geometry {
        Geometry::new(&self.nodes)
    }
}

// Segment widths and cos² of the midpoints; fixed for a node set.
struct Geometry {
    widths: Vec<f64>,
    cos2: Vec<f64>,
}

impl Geometry {
    fn new(nodes: &[f64]) -> Self {
        let widths = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let cos2 = nodes
            .windows(2)
            .map(|w| {
                let c = cos(0.5 * (w[0] + w[1]));
                c * c
            })
            .collect();
        Geometry { widths, cos2 }
    }

    fn slope(&self, thetas: &[f64], i: usize) -> f64 {
        (thetas[i + 1] - thetas[i]) / self.widths[i]
    }

    fn area(&self, thetas: &[f64]) -> f64 {
        let terms: Vec<f64> = (0..self.widths.len())
            .map(|i| {
                let s = self.slope(thetas, i);
                TAU * self.widths[i] * sqrt(1.0 + self.cos2[i] * s * s)
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// Area change from moving interior value `j + 1` by `t · dir[j]`.
    /// Slope increments are formed from the step itself, so decreases far
    /// below the rounding of the total (or of the values) still register.
    fn area_change(&self, thetas: &[f64], dir: &[f64], t: f64) -> f64 {
        let n = self.widths.len();
        let terms: Vec<f64> = (0..n)
            .map(|i| {
                let lo = if i == 0 { 0.0 } else { dir[i - 1] };
                let hi = if i + 1 == n { 0.0 } else { dir[i] };
                let s0 = self.slope(thetas, i);
                let ds = t * (hi - lo) / self.widths[i];
                let s1 = s0 + ds;
                let c2 = self.cos2[i];
                let (q0, q1) = (sqrt(1.0 + c2 * s0 * s0), sqrt(1.0 + c2 * s1 * s1));
                TAU * self.widths[i] * c2 * ds * (2.0 * s0 + ds) / (q0 + q1)
            })
            .collect();
        pairwise_sum(&terms)
    }

    // ∂(segment term)/∂s_i / Δα_i · Δα_i = 2π c² s / sqrt(1 + c² s²).
    fn flux(&self, thetas: &[f64], i: usize) -> f64 {
        let s = self.slope(thetas, i);
        TAU * self.cos2[i] * s / sqrt(1.0 + self.cos2[i] * s * s)
    }

    fn gradient_into(&self, thetas: &[f64], out: &mut [f64]) {
        let n = self.widths.len();
        let mut left = self.flux(thetas, 0);
        for j in 1..n {
            let right = self.flux(thetas, j);
            out[j - 1] = left - right;
            left = right;
        }
    }
}

pub fn discrete_area(p: &Profile) -> f64 {
    p.geometry().area(&p.thetas)
}

/// Exact gradient of [`discrete_area`] with respect to the interior values.
pub fn area_gradient(p: &Profile) -> Vec<f64> {
    let mut g = alloc::vec![0.0; p.segments() - 1];
    p.geometry().gradient_into(&p.thetas, &mut g);
    g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// Try `growth ×` the last accepted step (starting from `initial_step`),
    /// halving until the Armijo condition holds.
    Backtracking { initial_step: f64, growth: f64 },
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule::Backtracking { initial_step: 1e-2, growth: 2.0 }
    }
}

/// Search direction fed to the line search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// `−∇A`.
    #[default]
    SteepestDescent,
    /// Polak–Ribière+ conjugate directions, restarted on loss of descent.
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step_rule: StepRule,
    pub direction: Direction,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_iters: 2_000_000,
            grad_tol: 1e-8,
            step_rule: StepRule::default(),
            direction: Direction::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerResult {
    pub profile: Profile,
    pub final_area: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
    /// Sup over interior nodes of `|θ_j − minimizer_angle(α_j)|`.
    pub max_deviation_from_closed_form: f64,
    /// Area of the optimized profile read back as a smooth grid field,
    /// integrated with the default quadrature.
    pub profile_area: f64,
}

impl OptimizerResult {
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { iterations: self.iterations, gradient_norm: self.gradient_norm })
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

pub fn minimize_profile(a: AnnulusSpec, n: usize, opts: &MinimizeOptions) -> Result<OptimizerResult> {
    minimize_profile_observed(a, n, opts, |_, _, _| {})
}

/// As [`minimize_profile`], calling `observe(iteration, area, gradient_norm)`
/// after every accepted step.
pub fn minimize_profile_observed<O>(
    a: AnnulusSpec,
    n: usize,
    opts: &MinimizeOptions,
    mut observe: O,
) -> Result<OptimizerResult>
where
    O: FnMut(usize, f64, f64),
{
    if n < MIN_SEGMENTS {
        return Err(Error::InvalidProfile("at least 8 segments are required"));
    }
    if !(opts.grad_tol > 0.0) {
        return Err(Error::InvalidProfile("gradient tolerance must be positive"));
    }
    let StepRule::Backtracking { initial_step, growth } = opts.step_rule;
    if !(initial_step > 0.0) || !(growth >= 1.0) {
        return Err(Error::InvalidProfile("step rule needs a positive step and growth >= 1"));
    }

    let mut profile = Profile::linear(a, n)?;
    let geo = profile.geometry();
    let m = n - 1;
    let mut thetas = profile.thetas.clone();
    let mut grad = alloc::vec![0.0; m];
    let mut prev_grad = alloc::vec![0.0; m];
    let mut dir = alloc::vec![0.0; m];
    geo.gradient_into(&thetas, &mut grad);
    let mut value = geo.area(&thetas);
    let mut gnorm = norm(&grad);
    let mut step = initial_step;
    let mut iterations = 0;
    for j in 0..m {
        dir[j] = -grad[j];
    }

    while gnorm > opts.grad_tol && iterations < opts.max_iters {
        let mut slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
        if !(slope < 0.0) {
            for j in 0..m {
                dir[j] = -grad[j];
            }
            slope = -gnorm * gnorm;
        }
        let mut t = step * growth;
        let accepted = loop {
            let change = geo.area_change(&thetas, &dir, t);
            if change <= ARMIJO_C * t * slope {
                break Some((t, change));
            }
            t *= 0.5;
            if t < f64::MIN_POSITIVE {
                break None;
            }
        };
        let Some((t, change)) = accepted else { break };
        for j in 0..m {
            thetas[j + 1] += t * dir[j];
        }
        step = t;
        iterations += 1;
        core::mem::swap(&mut grad, &mut prev_grad);
        geo.gradient_into(&thetas, &mut grad);
        gnorm = norm(&grad);
        value += change;
        match opts.direction {
            Direction::SteepestDescent => {
                for j in 0..m {
                    dir[j] = -grad[j];
                }
            }
            Direction::ConjugateGradient => {
                let num: f64 = grad.iter().zip(&prev_grad).map(|(g, p)| g * (g - p)).sum();
                let den: f64 = prev_grad.iter().map(|p| p * p).sum();
                let beta = if den > 0.0 { (num / den).max(0.0) } else { 0.0 };
                for j in 0..m {
                    dir[j] = -grad[j] + beta * dir[j];
                }
            }
        }
        observe(iterations, value, gnorm);
    }

    profile.thetas = thetas;
    value = geo.area(&profile.thetas);
    let max_deviation_from_closed_form = profile.nodes[1..n]
        .iter()
        .zip(profile.interior())
        .map(|(&x, &t)| fabs(t - minimizer_angle(x, a).unwrap_or(f64::NAN)))
        .fold(0.0, f64::max);
    let profile_area =
        axisymmetric_area(&profile.to_field(a)?, a, &QuadratureScheme::default())?;
    Ok(OptimizerResult {
        final_area: value,
        profile_area,
        iterations,
        gradient_norm: gnorm,
        converged: gnorm <= opts.grad_tol,
        max_deviation_from_closed_form,
        profile,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstIntegralResidual {
    /// Max `|q_i − median|` over segments.
    pub residual: f64,
    pub median: f64,
}

/// Spread of `cos²ᾱ s / sqrt(1 + cos²ᾱ s²)` across segment midpoints; a
/// discrete stationary profile makes it exactly constant.
pub fn first_integral_residual(p: &Profile) -> FirstIntegralResidual {
    let geo = p.geometry();
    let values: Vec<f64> = (0..p.segments()).map(|i| geo.flux(&p.thetas, i) / TAU).collect();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let median = if k % 2 == 1 { sorted[k / 2] } else { 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]) };
    let residual = values.iter().map(|v| fabs(v - median)).fold(0.0, f64::max);
    FirstIntegralResidual { residual, median }
}
