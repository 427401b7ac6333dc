use thiserror::Error;

/// Errors surfaced by the solver and the geometric diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must satisfy n >= 3, got {0}")]
    InvalidDimension(i64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation order K = {0} exceeds the supported envelope (K <= {1})")]
    TruncationTooLarge(usize, usize),

    #[error("coefficient u_{0} requested but only u_0..u_{1} are available")]
    MissingCoefficient(usize, usize),

    #[error("point (r = {r}, theta = {theta}) outside the validity region: u = {u} <= {threshold}")]
    OutsideValidity {
        r: f64,
        theta: f64,
        u: f64,
        threshold: f64,
    },

    #[error("metric degenerate at (r = {r}, theta = {theta})")]
    DegenerateMetric { r: f64, theta: f64 },

    #[error("Kottler metric inside horizon region at r = {r} (1 - 2m/r^(n-2) + r^2 = {lapse})")]
    InsideHorizon { r: f64, lapse: f64 },

    #[error("quadrature failed to converge: relative change {rel_change} after order {order}")]
    QuadratureNotConverged { order: usize, rel_change: f64 },

    #[error("extrapolation did not stabilize: {0}")]
    ExtrapolationUnstable(String),

    #[error("spatial map is not orthogonal (max deviation {0})")]
    NotOrthogonal(f64),

    #[error("radii must be strictly increasing")]
    RadiiNotIncreasing,

    #[error("input changes sign on [-1, 1]; hypothesis requires strict constant sign")]
    SignChange,

    #[error("finite-difference stencil leaves the domain at (r = {r}, theta = {theta}, h = {h})")]
    StencilOutsideDomain { r: f64, theta: f64, h: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
