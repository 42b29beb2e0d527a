//! Complete elliptic integral of the second kind by the arithmetic-geometric mean.

use core::f64::consts::FRAC_PI_2;

use libm::{fabs, sqrt};

const MAX_ITER: usize = 40;

/// `E(m) = ∫₀^{π/2} sqrt(1 − m sin²t) dt` for parameter `m ∈ [0, 1]`.
///
/// Uses `E = K · (1 − Σ 2^{n−1} c_n²)` with `K = π / (2 AGM(1, sqrt(1 − m)))`
/// and `c₀² = m`, `c_{n+1} = (a_n − b_n) / 2`.
pub fn complete_second_kind(m: f64) -> f64 {
    if m == 1.0 {
        return 1.0;
    }
    let mut a = 1.0;
    let mut b = sqrt(1.0 - m);
    let mut weight = 0.5;
    let mut sum = weight * m;
    for _ in 0..MAX_ITER {
        let c = 0.5 * (a - b);
        let next_a = 0.5 * (a + b);
        b = sqrt(a * b);
        a = next_a;
        weight *= 2.0;
        sum += weight * c * c;
        if fabs(c) <= 1e-17 * a {
            break;
        }
    }
    FRAC_PI_2 / a * (1.0 - sum)
}

/// Perimeter of the ellipse with semi-axes `a` and `b`.
pub fn ellipse_perimeter_axes(a: f64, b: f64) -> f64 {
    let (major, minor) = if a >= b { (a, b) } else { (b, a) };
    if major == 0.0 {
        return 0.0;
    }
    let ratio = minor / major;
    4.0 * major * complete_second_kind(1.0 - ratio * ratio)
}
