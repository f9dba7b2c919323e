use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid problem definition; `path` is the dotted location in the config document.
    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("state support exceeds grid: {0}")]
    SupportExceedsGrid(String),

    #[error("lambda = {lambda} is too close to a pole (|W| = {magnitude:e})")]
    PoleProximity { lambda: Complex64, magnitude: f64 },

    #[error("quadrature did not converge (last increment {increment:e})")]
    QuadratureNotConverged { increment: f64 },

    #[error("contour truncation did not converge (last increment {last_increment:e})")]
    TruncationNotConverged { last_increment: f64 },

    #[error("zero on or near the boundary of {region}")]
    BoundaryZero { region: String },

    #[error("root refinement did not converge in {region}")]
    NonConvergence { region: String },

    #[error("lambda0 = {lambda} lies on the classification curve")]
    OnCurve { lambda: Complex64 },

    #[error("|W'(lambda0)| = {derivative:e} at a zero declared simple")]
    NonSimpleDerivative { derivative: f64 },

    #[error("state is not in the domain of A^{order}: {reason}")]
    NotInDomain { order: usize, reason: String },

    #[error("CFL violated: dt = {dt} exceeds {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("support cone leaves the grid: {0}")]
    ConeViolation(String),

    #[error("time stepping blew up at t = {time}")]
    BlowUp { time: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable tag used in the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config { .. } => "config",
            Error::Parse(_) => "parse",
            Error::GridTooSmall(_) => "grid_too_small",
            Error::SupportExceedsGrid(_) => "support_exceeds_grid",
            Error::PoleProximity { .. } => "pole_proximity",
            Error::QuadratureNotConverged { .. } => "quadrature_not_converged",
            Error::TruncationNotConverged { .. } => "truncation_not_converged",
            Error::BoundaryZero { .. } => "boundary_zero",
            Error::NonConvergence { .. } => "non_convergence",
            Error::OnCurve { .. } => "on_curve",
            Error::NonSimpleDerivative { .. } => "non_simple_derivative",
            Error::NotInDomain { .. } => "not_in_domain",
            Error::Cfl { .. } => "cfl",
            Error::ConeViolation(_) => "cone_violation",
            Error::BlowUp { .. } => "blow_up",
            Error::Unsupported(_) => "unsupported",
            Error::Io(_) => "io",
        }
    }

    /// Errors caused by the problem definition rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::Parse(_)
                | Error::GridTooSmall(_)
                | Error::SupportExceedsGrid(_)
                | Error::NotInDomain { .. }
                | Error::Cfl { .. }
                | Error::ConeViolation(_)
                | Error::Unsupported(_)
        )
    }
}
