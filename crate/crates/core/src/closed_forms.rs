//! The closed-form annulus minimizer, the `V_k` family on the punctured
//! sphere, and the index-class reference bounds.

use core::f64::consts::{FRAC_PI_2, PI};

use libm::{atan2, cos, fabs, sin, sqrt, tan};

use crate::elliptic::ellipse_perimeter_axes;
use crate::fields::AngleFunction;
use crate::quadrature::{EndpointMap, MappedPoint};
use crate::sphere::{AnnulusSpec, LatLon};
use crate::{Error, Result};

/// Slack on `|cot α₀ tan α| ≤ 1` before a latitude counts as outside.
const OUTSIDE_TOL: f64 = 1e-12;

/// Distance from `±α₀` inside which the slope is reported as singular.
pub const SLOPE_BOUNDARY_GUARD: f64 = 1e-9;

/// `θ(α) = arcsin(cot α₀ tan α) + C`, `C = π/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizerSpec {
    pub alpha0: f64,
    pub integration_constant: f64,
    sin_alpha0: f64,
    cos_alpha0: f64,
}

impl MinimizerSpec {
    pub fn new(a: AnnulusSpec) -> Self {
        let alpha0 = a.alpha0();
        MinimizerSpec {
            alpha0,
            integration_constant: FRAC_PI_2,
            sin_alpha0: sin(alpha0),
            cos_alpha0: cos(alpha0),
        }
    }

    /// `sqrt(sin²α₀ − sin²α) = sqrt(cos²α − cos²α₀)`, clamped at zero.
    fn gap(&self, sin_alpha: f64) -> f64 {
        let r = (self.sin_alpha0 - sin_alpha) * (self.sin_alpha0 + sin_alpha);
        sqrt(r.max(0.0))
    }

    // arcsin(cot α₀ tan α) = atan2(cos α₀ sin α, sqrt(sin²α₀ − sin²α)), exact at ±α₀.
    fn angle(&self, alpha: f64) -> f64 {
        let s = sin(alpha);
        atan2(self.cos_alpha0 * s, self.gap(s)) + self.integration_constant
    }

    /// `cos α₀ / (cos α · sqrt(cos²α − cos²α₀))`; infinite at `±α₀`.
    fn slope(&self, alpha: f64) -> f64 {
        self.cos_alpha0 / (cos(alpha) * self.gap(sin(alpha)))
    }
}

impl AngleFunction for MinimizerSpec {
    fn theta(&self, alpha: f64, _: f64) -> f64 {
        self.angle(alpha)
    }
    fn d_alpha(&self, alpha: f64, _: f64) -> f64 {
        self.slope(alpha)
    }
    fn d_beta(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn is_axisymmetric(&self) -> bool {
        true
    }
    // dθ/du = cos α₀ / cos²α under sin α = sin α₀ sin u.
    fn d_theta_du(&self, p: &MappedPoint, map: &EndpointMap) -> Option<f64> {
        (map.alpha0() == self.alpha0).then(|| self.cos_alpha0 / (p.cos_alpha * p.cos_alpha))
    }
}

fn check_inside(alpha: f64, a: AnnulusSpec) -> Result<()> {
    let ratio = tan(alpha) / tan(a.alpha0());
    if !alpha.is_finite() || fabs(ratio) > 1.0 + OUTSIDE_TOL {
        return Err(Error::OutsideAnnulus { alpha, alpha0: a.alpha0() });
    }
    Ok(())
}

pub fn minimizer_angle(alpha: f64, a: AnnulusSpec) -> Result<f64> {
    check_inside(alpha, a)?;
    Ok(MinimizerSpec::new(a).angle(alpha))
}

/// `dθ/dα` of the minimizer; singular within [`SLOPE_BOUNDARY_GUARD`] of `±α₀`.
pub fn minimizer_slope(alpha: f64, a: AnnulusSpec) -> Result<f64> {
    check_inside(alpha, a)?;
    if fabs(alpha) > a.alpha0() - SLOPE_BOUNDARY_GUARD {
        return Err(Error::BoundarySingularity { alpha, alpha0: a.alpha0() });
    }
    Ok(MinimizerSpec::new(a).slope(alpha))
}

/// `θ = (k − 1) β + π/2`: `k − 1` turns along every parallel, parallel
/// along meridians.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VkField {
    pub k: i64,
}

impl AngleFunction for VkField {
    fn theta(&self, _: f64, beta: f64) -> f64 {
        (self.k - 1) as f64 * beta + FRAC_PI_2
    }
    fn d_alpha(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d_beta(&self, _: f64, _: f64) -> f64 {
        (self.k - 1) as f64
    }
    fn is_axisymmetric(&self) -> bool {
        self.k == 1
    }
}

pub fn vk_angle(k: i64, p: LatLon) -> f64 {
    VkField { k }.theta(p.alpha(), p.beta())
}

/// Ellipse `x²/k² + y²/(k − 2)² = 1` and the area bound `π · perimeter`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseBound {
    pub k: i64,
    pub semi_axes: (f64, f64),
    pub perimeter: f64,
    pub bound: f64,
}

pub fn ellipse_bound(k: i64) -> Result<EllipseBound> {
    if k == 0 || k == 2 {
        return Err(Error::ExcludedIndex { k });
    }
    let semi_axes = ((k as f64).abs(), ((k - 2) as f64).abs());
    let perimeter = ellipse_perimeter_axes(semi_axes.0, semi_axes.1);
    Ok(EllipseBound { k, semi_axes, perimeter, bound: PI * perimeter })
}

pub fn ellipse_perimeter(k: i64) -> Result<f64> {
    Ok(ellipse_bound(k)?.perimeter)
}

/// `½ (π + |I_N| + |I_S| − 2) · 4π`, with `I_N = k` and `I_S = 2 − k`.
pub fn index_sum_bound(k: i64) -> f64 {
    let total = (k as f64).abs() + ((2 - k) as f64).abs();
    0.5 * (PI + total - 2.0) * 4.0 * PI
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceBounds {
    /// Index-sum bound on the twice-punctured sphere.
    pub bcj: f64,
    /// Ellipse bound `π L(ε_k)`.
    pub bcgn: f64,
}

pub fn reference_bounds(k: i64) -> Result<ReferenceBounds> {
    Ok(ReferenceBounds { bcj: index_sum_bound(k), bcgn: ellipse_bound(k)?.bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::make_annulus;
    use core::f64::consts::{FRAC_PI_4, TAU};

    #[test]
    fn minimizer_angle_examples() {
        for a0 in [0.3, FRAC_PI_4, 1.2] {
            let a = make_annulus(a0).unwrap();
            assert_eq!(minimizer_angle(0.0, a).unwrap(), FRAC_PI_2);
            assert_eq!(minimizer_angle(a0, a).unwrap(), PI);
            assert_eq!(minimizer_angle(-a0, a).unwrap(), 0.0);
        }
        let a = make_annulus(FRAC_PI_4).unwrap();
        let v = minimizer_angle(PI / 6.0, a).unwrap();
        // arcsin(1/√3) + π/2, evaluated to 20 digits offline.
        assert!((v - 2.186_276_035_465_284_1).abs() < 1e-15);
        assert!(matches!(minimizer_angle(0.8, a), Err(Error::OutsideAnnulus { .. })));
    }

    #[test]
    fn minimizer_slope_examples() {
        let a = make_annulus(0.9).unwrap();
        let s = minimizer_slope(0.0, a).unwrap();
        assert!((s - 1.0 / tan(0.9)).abs() < 1e-15);
        assert!(matches!(
            minimizer_slope(0.9 - 1e-10, a),
            Err(Error::BoundarySingularity { .. })
        ));
        assert!(matches!(minimizer_slope(0.95, a), Err(Error::OutsideAnnulus { .. })));
        for &x in &[-0.85, -0.3, 0.1, 0.6, 0.89] {
            let h = 1e-6;
            let fd = (minimizer_angle(x + h, a).unwrap() - minimizer_angle(x - h, a).unwrap())
                / (2.0 * h);
            let s = minimizer_slope(x, a).unwrap();
            assert!(s > 0.0);
            assert!(((s - fd) / s).abs() < 1e-5, "alpha = {x}");
        }
    }

    #[test]
    fn vk_examples() {
        let p = LatLon::new(0.3, PI).unwrap();
        assert_eq!(vk_angle(1, p), FRAC_PI_2);
        assert!((vk_angle(3, p) - (TAU + FRAC_PI_2)).abs() < 1e-15);
    }

    #[test]
    fn ellipse_examples() {
        assert!((ellipse_perimeter(1).unwrap() - TAU).abs() < 1e-14);
        assert_eq!(ellipse_perimeter(-1).unwrap(), ellipse_perimeter(3).unwrap());
        assert_eq!(ellipse_perimeter(0), Err(Error::ExcludedIndex { k: 0 }));
        assert_eq!(ellipse_perimeter(2), Err(Error::ExcludedIndex { k: 2 }));
        let e = ellipse_bound(5).unwrap();
        assert_eq!(e.semi_axes, (5.0, 3.0));
        assert!(e.perimeter >= TAU * 3.0);
    }

    #[test]
    fn reference_bound_examples() {
        let two_pi_sq = 2.0 * PI * PI;
        let r = reference_bounds(1).unwrap();
        assert!((r.bcj - two_pi_sq).abs() < 1e-13);
        assert!((r.bcgn - two_pi_sq).abs() < 1e-13);
        assert!((index_sum_bound(3) - TAU * (PI + 2.0)).abs() < 1e-13);
        assert!(reference_bounds(2).is_err());
        assert!((index_sum_bound(0) - index_sum_bound(2)).abs() < 1e-15);
    }
}
