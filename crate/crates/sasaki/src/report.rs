//! Report records and their JSON / CSV renderings.

use serde::Serialize;

use sasaki_core::fields::BoundaryReport;
use sasaki_core::functional::{AreaReport, BoundKind, BoundReading};
use sasaki_core::quadrature::{QuadratureScheme, Rule};

pub const SIGNIFICANT_DIGITS: usize = 12;

pub const BOUND_NOTE: &str = "bound = K + 2*pi^2*cos(alpha0). The cos(alpha0) term comes from \
integrating theta_2 over the annulus, 2*pi*(theta(alpha0) - theta(-alpha0)) = 2*pi^2. The \
alternative coefficient 2*pi is not attained by the minimizer and is not used.";

pub const LITERAL_NOTE: &str = "bound = K + 2*pi*cos(alpha0) (literal coefficient; not \
attained by the minimizer).";

pub fn bound_note(reading: BoundReading) -> &'static str {
    match reading {
        BoundReading::Corrected => BOUND_NOTE,
        BoundReading::Literal => LITERAL_NOTE,
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros dropped,
/// exponent form outside `[1e-4, 1e12)`.
pub fn sig(x: f64) -> String {
    sig_digits(x, SIGNIFICANT_DIGITS)
}

pub fn sig_digits(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SchemeJson {
    pub rule: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub panels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub endpoint_substitution: bool,
}

impl From<&QuadratureScheme> for SchemeJson {
    fn from(q: &QuadratureScheme) -> Self {
        match q.rule {
            Rule::GaussLegendre { order, panels } => SchemeJson {
                rule: "gauss-legendre",
                order: Some(order),
                panels: Some(panels),
                tol: None,
                endpoint_substitution: q.endpoint_substitution,
            },
            Rule::AdaptiveSimpson { tol } => SchemeJson {
                rule: "adaptive-simpson",
                order: None,
                panels: None,
                tol: Some(tol),
                endpoint_substitution: q.endpoint_substitution,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundJson {
    pub alpha0: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub bound: f64,
    pub quad_error: f64,
    pub closed_form_conjecture_gap: f64,
    pub notes: &'static str,
}

impl BoundJson {
    pub const CSV_HEADER: &'static str = "alpha0,K,bound,quad_error,closed_form_conjecture_gap";

    pub fn csv_row(&self) -> String {
        [self.alpha0, self.k, self.bound, self.quad_error, self.closed_form_conjecture_gap]
            .map(sig)
            .join(",")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryJson {
    pub tangent_at_boundaries: bool,
    pub antipodal_opposition: bool,
    pub perpendicular_at_equator: bool,
    pub max_violation: f64,
    pub tolerance: f64,
}

impl From<&BoundaryReport> for BoundaryJson {
    fn from(b: &BoundaryReport) -> Self {
        BoundaryJson {
            tangent_at_boundaries: b.tangent_at_boundaries,
            antipodal_opposition: b.antipodal_opposition,
            perpendicular_at_equator: b.perpendicular_at_equator,
            max_violation: b.max_violation,
            tolerance: b.tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AreaJson {
    pub field: String,
    pub region: String,
    pub area: f64,
    pub lower_bound: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub gap: Option<f64>,
    pub bound_kind: String,
    pub quad_error: f64,
    pub hypotheses_hold: bool,
    pub boundary: Option<BoundaryJson>,
    pub scheme: SchemeJson,
    pub notes: &'static str,
}

impl AreaJson {
    pub fn new(field: String, region: String, r: &AreaReport, notes: &'static str) -> Self {
        let bound_kind = match r.bound_kind {
            BoundKind::Annulus => "annulus".to_string(),
            BoundKind::IndexEllipse { k } => format!("index-ellipse(k={k})"),
            BoundKind::None => "none".to_string(),
        };
        AreaJson {
            field,
            region,
            area: r.area,
            lower_bound: r.lower_bound,
            k: r.k_constant,
            gap: r.gap,
            bound_kind,
            quad_error: r.estimated_quadrature_error,
            hypotheses_hold: r.hypotheses_hold,
            boundary: r.boundary.as_ref().map(BoundaryJson::from),
            scheme: SchemeJson::from(&r.scheme_used),
            notes,
        }
    }

    pub const CSV_HEADER: &'static str =
        "field,region,area,lower_bound,K,gap,quad_error,hypotheses_hold";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(sig).unwrap_or_default();
        [
            self.field.clone(),
            self.region.clone(),
            sig(self.area),
            opt(self.lower_bound),
            opt(self.k),
            opt(self.gap),
            sig(self.quad_error),
            self.hypotheses_hold.to_string(),
        ]
        .join(",")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeJson {
    pub alpha0: f64,
    pub segments: usize,
    pub direction: &'static str,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    pub final_area: f64,
    pub profile_area: f64,
    pub bound: f64,
    pub max_deviation_from_closed_form: f64,
    pub first_integral_residual: f64,
    pub exported_to: Option<String>,
}

impl OptimizeJson {
    pub const CSV_HEADER: &'static str = "alpha0,segments,iterations,converged,gradient_norm,\
final_area,profile_area,bound,max_deviation_from_closed_form,first_integral_residual";

    pub fn csv_row(&self) -> String {
        [
            sig(self.alpha0),
            self.segments.to_string(),
            self.iterations.to_string(),
            self.converged.to_string(),
            sig(self.gradient_norm),
            sig(self.final_area),
            sig(self.profile_area),
            sig(self.bound),
            sig(self.max_deviation_from_closed_form),
            sig(self.first_integral_residual),
        ]
        .join(",")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnulusRow {
    pub alpha0: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub bound: f64,
    pub minimizer_area: f64,
    pub gap: f64,
}

impl AnnulusRow {
    pub const CSV_HEADER: &'static str = "alpha0,K,bound,minimizer_area,gap";

    pub fn csv_row(&self) -> String {
        [self.alpha0, self.k, self.bound, self.minimizer_area, self.gap].map(sig).join(",")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexRow {
    pub k: i64,
    pub bcj: f64,
    pub bcgn: Option<f64>,
    pub vk_area: f64,
}

impl IndexRow {
    pub const CSV_HEADER: &'static str = "k,bcj,bcgn,vk_area";

    pub fn csv_row(&self) -> String {
        [self.k.to_string(), sig(self.bcj), self.bcgn.map(sig).unwrap_or_default(), sig(self.vk_area)]
            .join(",")
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig(19.739208802178716), "19.7392088022");
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(1.0), "1");
        assert_eq!(sig(-2.5e-7), "-2.5e-7");
        assert_eq!(sig(1.5e-4), "0.00015");
        assert_eq!(sig(123456789012345.0), "1.23456789012e14");
        assert_eq!(sig(0.1 + 0.2), "0.3");
        assert_eq!(sig(999999999999.5), "1e12");
    }

    #[test]
    fn bound_json_key_order() {
        let b = BoundJson {
            alpha0: 0.5,
            k: 1.0,
            bound: 2.0,
            quad_error: 0.0,
            closed_form_conjecture_gap: 0.0,
            notes: BOUND_NOTE,
        };
        let s = to_json(&b);
        let keys: Vec<usize> = ["alpha0", "\"K\"", "bound", "quad_error", "closed_form_conjecture_gap", "notes"]
            .iter()
            .map(|k| s.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }
}
