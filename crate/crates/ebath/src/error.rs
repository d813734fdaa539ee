//! Error type shared by the library.

use core::fmt;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A physical parameter violates its domain (value, explanation).
    InvalidParameter(&'static str),
    /// A unit tag is not supported by the requested conversion.
    UnsupportedUnit(&'static str),
    /// T = 0 requested where a finite thermal scale is required.
    VacuumNoThermalScale,
    /// Incompatible grids between an input state and the requested output.
    GridMismatch(&'static str),
    /// The momentum grid cannot resolve the requested spatial point.
    NyquistViolation { required: f64, available: f64 },
    /// Adaptive quadrature failed to reach the requested tolerance.
    QuadratureTolerance { requested: f64, achieved: f64 },
    /// Least-squares fit is ill-conditioned (t-range too narrow).
    IllConditionedFit,
    /// Kinematic input off the mass shell / energy shell beyond tolerance.
    OffShell(&'static str),
    /// A denominator fell below the degeneracy cutoff.
    DegenerateDenominator,
    /// Explicit step produced a negative density; retry with suggested dt.
    NegativeDensity { suggested_dt: f64 },
    /// Non-finite number encountered in state data.
    NonFinite(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::UnsupportedUnit(what) => write!(f, "unsupported unit: {what}"),
            Error::VacuumNoThermalScale => {
                write!(f, "vacuum (T = 0): no finite thermal time scale")
            }
            Error::GridMismatch(what) => write!(f, "grid mismatch: {what}"),
            Error::NyquistViolation {
                required,
                available,
            } => write!(
                f,
                "grid too coarse for requested point: need spacing <= {required:.3e}, have {available:.3e}"
            ),
            Error::QuadratureTolerance {
                requested,
                achieved,
            } => write!(
                f,
                "quadrature tolerance not met: requested {requested:.3e}, achieved {achieved:.3e}"
            ),
            Error::IllConditionedFit => write!(f, "ill-conditioned fit: t-range too narrow"),
            Error::OffShell(what) => write!(f, "kinematics off shell: {what}"),
            Error::DegenerateDenominator => write!(f, "denominator below degeneracy cutoff"),
            Error::NegativeDensity { suggested_dt } => write!(
                f,
                "negative density produced (dt too large); suggested dt = {suggested_dt:.3e}"
            ),
            Error::NonFinite(what) => write!(f, "non-finite value: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
