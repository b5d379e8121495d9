use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate gradient: |∂f| = {norm:.3e} below tolerance {tol:.3e}")]
    DegenerateGradient { norm: f64, tol: f64 },

    #[error("point is off the surface: |g(r)| = {residual:.3e} exceeds {tol:.3e}")]
    OffSurface { residual: f64, tol: f64 },

    #[error("no convergence after {iters} iterations: {context}")]
    NoConvergence { iters: usize, context: String },

    #[error("empty surface: no zero of g found along the searched rays")]
    EmptySurface,

    #[error("vector is not tangent to the surface (defect {defect:.3e})")]
    NonTangent { defect: f64 },

    #[error("integration step failed: {0}")]
    StepFailure(String),

    #[error("singular ODE right-hand side at s = {s:.6e}, f = {f:.6e}")]
    OdeSingular { s: f64, f: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
