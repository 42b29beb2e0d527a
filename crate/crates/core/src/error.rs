use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Annulus half-width outside the open interval (0, π/2).
    DegenerateAnnulus { alpha0: f64 },
    /// Latitude outside (−π/2, π/2) or not finite.
    InvalidLatitude { alpha: f64 },
    /// Point outside the domain a field is declared on.
    OutOfDomain { alpha: f64, limit: f64 },
    /// Latitude outside the closed annulus where a radicand turns negative.
    OutsideAnnulus { alpha: f64, alpha0: f64 },
    /// Closed-form slope evaluated too close to `±α₀`, where it diverges.
    BoundarySingularity { alpha: f64, alpha0: f64 },
    /// Curvature and derivative forms of the area integrand disagree.
    IdentityViolation { curvature_form: f64, derivative_form: f64 },
    /// Winding along a loop did not come out close to an integer.
    NonIntegralWinding { value: f64 },
    /// Adaptive quadrature ran out of its evaluation budget.
    QuadratureFailure { evaluations: usize },
    /// Integrand was not finite at a quadrature node.
    SingularIntegrand { at: f64 },
    /// Index classes 0 and 2 have a degenerate ellipse.
    ExcludedIndex { k: i64 },
    InvalidScheme(&'static str),
    InvalidGrid(&'static str),
    InvalidProfile(&'static str),
    /// Descent stopped at the iteration cap above the gradient tolerance.
    NotConverged { iterations: usize, gradient_norm: f64 },
    /// A field satisfying the annulus hypotheses came out below the bound.
    BoundViolation { area: f64, bound: f64, tolerance: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateAnnulus { alpha0 } => {
                write!(f, "alpha0 must lie in (0, pi/2), got {alpha0}")
            }
            Error::InvalidLatitude { alpha } => {
                write!(f, "latitude {alpha} is not inside (-pi/2, pi/2)")
            }
            Error::OutOfDomain { alpha, limit } => {
                write!(f, "latitude {alpha} is outside the field domain |alpha| <= {limit}")
            }
            Error::OutsideAnnulus { alpha, alpha0 } => {
                write!(f, "latitude {alpha} is outside the annulus |alpha| <= {alpha0}")
            }
            Error::BoundarySingularity { alpha, alpha0 } => {
                write!(f, "slope diverges at latitude {alpha} (annulus boundary {alpha0})")
            }
            Error::IdentityViolation { curvature_form, derivative_form } => write!(
                f,
                "integrand identity violated: curvature form {curvature_form}, derivative form {derivative_form}"
            ),
            Error::NonIntegralWinding { value } => {
                write!(f, "winding {value} is not close to an integer; sample the loop more densely")
            }
            Error::QuadratureFailure { evaluations } => {
                write!(f, "adaptive quadrature exceeded its budget after {evaluations} evaluations")
            }
            Error::SingularIntegrand { at } => write!(f, "integrand is not finite at {at}"),
            Error::ExcludedIndex { k } => {
                write!(f, "index class k = {k} has no ellipse bound (k must not be 0 or 2)")
            }
            Error::InvalidScheme(why) => write!(f, "invalid quadrature scheme: {why}"),
            Error::InvalidGrid(why) => write!(f, "invalid grid field: {why}"),
            Error::InvalidProfile(why) => write!(f, "invalid profile: {why}"),
            Error::NotConverged { iterations, gradient_norm } => write!(
                f,
                "descent stopped after {iterations} iterations with gradient norm {gradient_norm}"
            ),
            Error::BoundViolation { area, bound, tolerance } => write!(
                f,
                "area {area} is below the lower bound {bound} by more than {tolerance}"
            ),
        }
    }
}

impl core::error::Error for Error {}
