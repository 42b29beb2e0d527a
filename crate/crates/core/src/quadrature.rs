//! One-dimensional quadrature: composite Gauss–Legendre, adaptive Simpson,
//! and the endpoint map `sin α = sin α₀ · sin u` that removes the
//! inverse-square-root singularities of annulus integrands at `±α₀`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use libm::{asin, atan2, ceil, cos, fabs, hypot, sin, sqrt};

use crate::{Error, Result};

/// Integration rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    GaussLegendre { order: usize, panels: usize },
    AdaptiveSimpson { tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureScheme {
    pub rule: Rule,
    /// Integrate annulus latitudes in the variable `u` of [`EndpointMap`].
    pub endpoint_substitution: bool,
}

impl Default for QuadratureScheme {
    /// Gauss–Legendre of order 16 on 64 panels, substitution on.
    fn default() -> Self {
        QuadratureScheme {
            rule: Rule::GaussLegendre { order: 16, panels: 64 },
            endpoint_substitution: true,
        }
    }
}

impl QuadratureScheme {
    pub fn gauss_legendre(order: usize, panels: usize) -> Self {
        QuadratureScheme { rule: Rule::GaussLegendre { order, panels }, endpoint_substitution: true }
    }

    pub fn adaptive_simpson(tol: f64) -> Self {
        QuadratureScheme { rule: Rule::AdaptiveSimpson { tol }, endpoint_substitution: true }
    }

    /// Adaptive Simpson at `1e-10`, the independent cross-check of the default.
    pub fn oracle() -> Self {
        Self::adaptive_simpson(1e-10)
    }

    pub fn with_substitution(mut self, on: bool) -> Self {
        self.endpoint_substitution = on;
        self
    }

    /// The scheme used to estimate the error of `self`: the oracle for
    /// Gauss–Legendre rules and the default rule for adaptive Simpson.
    pub fn companion(&self) -> Self {
        let other = match self.rule {
            Rule::GaussLegendre { .. } => Self::oracle(),
            Rule::AdaptiveSimpson { .. } => Self::default(),
        };
        other.with_substitution(self.endpoint_substitution)
    }

    pub fn validate(&self) -> Result<()> {
        match self.rule {
            Rule::GaussLegendre { order, panels } => {
                if order < 2 {
                    return Err(Error::InvalidScheme("Gauss-Legendre order must be at least 2"));
                }
                if panels < 1 {
                    return Err(Error::InvalidScheme("at least one panel is required"));
                }
            }
            Rule::AdaptiveSimpson { tol } => {
                if !(tol > 0.0) {
                    return Err(Error::InvalidScheme("Simpson tolerance must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F>(&self, a: f64, b: f64, f: F) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        self.validate()?;
        match self.rule {
            Rule::GaussLegendre { order, panels } => {
                GaussLegendre::new(order).integrate_composite(a, b, panels, f)
            }
            Rule::AdaptiveSimpson { tol } => adaptive_simpson(a, b, tol, f),
        }
    }
}

impl QuadratureScheme {
    /// Integrates over `[breaks[0], breaks[last]]` piece by piece, so no
    /// panel straddles a breakpoint. Panels (or tolerance) are shared out in
    /// proportion to piece length.
    pub fn integrate_pieces<F>(&self, breaks: &[f64], mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        self.validate()?;
        if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidScheme("breakpoints must be strictly increasing"));
        }
        let total = breaks[breaks.len() - 1] - breaks[0];
        let mut parts = Vec::with_capacity(breaks.len() - 1);
        match self.rule {
            Rule::GaussLegendre { order, panels } => {
                let gl = GaussLegendre::new(order);
                for w in breaks.windows(2) {
                    let share = ceil(panels as f64 * (w[1] - w[0]) / total) as usize;
                    parts.push(gl.integrate_composite(w[0], w[1], share.max(1), &mut f)?);
                }
            }
            Rule::AdaptiveSimpson { tol } => {
                for w in breaks.windows(2) {
                    parts.push(adaptive_simpson(w[0], w[1], tol * (w[1] - w[0]) / total, &mut f)?);
                }
            }
        }
        Ok(pairwise_sum(&parts))
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        let n = order.max(1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if fabs(dx) <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Splits `[a, b]` into `panels` equal pieces; panel sums are reduced
    /// pairwise in a fixed order.
    pub fn integrate_composite<F>(&self, a: f64, b: f64, panels: usize, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut sums = Vec::with_capacity(panels);
        for p in 0..panels {
            let lo = a + h * p as f64;
            let mid = lo + 0.5 * h;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let t = mid + 0.5 * h * x;
                let v = f(t);
                if !v.is_finite() {
                    return Err(Error::SingularIntegrand { at: t });
                }
                s += w * v;
            }
            sums.push(0.5 * h * s);
        }
        Ok(pairwise_sum(&sums))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Sum with a fixed binary-tree reduction order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

const SIMPSON_MAX_DEPTH: u32 = 48;
const SIMPSON_MAX_EVALS: usize = 2_000_000;

struct Simpson<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(f64) -> f64> Simpson<F> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evals += 1;
        if self.evals > SIMPSON_MAX_EVALS {
            return Err(Error::QuadratureFailure { evaluations: self.evals });
        }
        let v = (self.f)(x);
        if !v.is_finite() {
            return Err(Error::SingularIntegrand { at: x });
        }
        Ok(v)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        fa: f64,
        m: f64,
        fm: f64,
        b: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // Halved tolerances eventually drop below roundoff in the panel sums.
        let settled = fabs(delta) <= 15.0 * tol
            || fabs(delta) <= 64.0 * f64::EPSILON * (fabs(left) + fabs(right));
        if settled && depth >= 4 {
            return Ok(left + right + delta / 15.0);
        }
        if depth >= SIMPSON_MAX_DEPTH {
            return Err(Error::QuadratureFailure { evaluations: self.evals });
        }
        let l = self.refine(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1)?;
        let r = self.refine(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1)?;
        Ok(l + r)
    }
}

/// Adaptive Simpson with Richardson correction. The absolute tolerance is
/// split evenly between halves; at least four levels are always taken so a
/// lucky first estimate cannot end the recursion.
pub fn adaptive_simpson<F>(a: f64, b: f64, tol: f64, f: F) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidScheme("Simpson tolerance must be positive"));
    }
    let mut s = Simpson { f, evals: 0 };
    let m = 0.5 * (a + b);
    let fa = s.eval(a)?;
    let fm = s.eval(m)?;
    let fb = s.eval(b)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    s.refine(a, fa, m, fm, b, fb, whole, tol, 0)
}

/// The change of variables `sin α = sin α₀ · sin u`, `u ∈ [−π/2, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointMap {
    alpha0: f64,
    sin_alpha0: f64,
    cos_alpha0: f64,
}

/// Latitude data at a value of `u`, computed without forming
/// `sin α₀ − sin α` by cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedPoint {
    pub u: f64,
    pub alpha: f64,
    pub sin_alpha: f64,
    pub cos_alpha: f64,
    /// `dα/du = sin α₀ cos u / cos α`.
    pub dalpha_du: f64,
    /// `sqrt(sin²α₀ − sin²α) = sin α₀ |cos u|`.
    pub gap: f64,
}

impl EndpointMap {
    pub fn new(alpha0: f64) -> Self {
        EndpointMap { alpha0, sin_alpha0: sin(alpha0), cos_alpha0: cos(alpha0) }
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn u_range(&self) -> (f64, f64) {
        (-FRAC_PI_2, FRAC_PI_2)
    }

    pub fn at(&self, u: f64) -> MappedPoint {
        let s0 = self.sin_alpha0;
        let su = sin(u);
        let cu = cos(u).max(0.0);
        let sin_alpha = s0 * su;
        // cos²α = cos²u + cos²α₀ sin²u, free of cancellation near the poles.
        let cos_alpha = hypot(cu, self.cos_alpha0 * su);
        let alpha = if su >= 1.0 {
            self.alpha0
        } else if su <= -1.0 {
            -self.alpha0
        } else {
            asin(sin_alpha)
        };
        MappedPoint {
            u,
            alpha,
            sin_alpha,
            cos_alpha,
            dalpha_du: s0 * cu / cos_alpha,
            gap: s0 * cu,
        }
    }

    /// Inverse map, `u = asin(sin α / sin α₀)`, clamped to `[−π/2, π/2]`.
    pub fn u_of(&self, alpha: f64) -> f64 {
        let s = sin(alpha).clamp(-self.sin_alpha0, self.sin_alpha0);
        atan2(s, sqrt((self.sin_alpha0 - s) * (self.sin_alpha0 + s)))
    }
}
