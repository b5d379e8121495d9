//! Central tolerance constants and the override table used by consumers.
//!
//! Every threshold that a verdict or a report depends on lives here so that
//! no magic numbers are scattered through the computation paths.

use serde::Serialize;

use crate::error::{Error, Result};

/// Residual |g(r)| accepted after projecting a point onto the surface.
pub const SURFACE_TOL: f64 = 1e-10;

/// Below this value of the gradient norm a point counts as degenerate.
pub const GRAD_TOL: f64 = 1e-12;

/// Cross-route agreement expected from curvature reports on analytic profiles.
pub const REPORT_TOL: f64 = 1e-8;

/// Residual |1 - |p|·h(T,T)| accepted at a converged critical point.
pub const CRITICAL_TOL: f64 = 1e-6;

/// Relative spread of sampled h(T,T) under which the curvature counts as constant.
pub const CONSTANCY_TOL: f64 = 1e-6;

/// Accepted gap between sampled |p| and the predicted sphere radius.
pub const RADIUS_TOL: f64 = 1e-6;

/// Torus confinement budget for closed-form trajectories.
pub const TORUS_TOL_CLOSED_FORM: f64 = 1e-12;

/// Default central-difference step of the finite-difference derivative mode.
pub const FD_STEP: f64 = 1e-5;

/// Tangency defect accepted when a caller passes explicit tangent vectors.
pub const TANGENT_TOL: f64 = 1e-10;

/// Iteration cap of the radial projection Newton.
pub const PROJECT_MAX_ITER: usize = 50;

/// Multi-start budget of the critical-point search.
pub const CRITICAL_STARTS: usize = 20;

/// Stage-equation tolerance of the implicit midpoint integrator.
pub const MIDPOINT_STAGE_TOL: f64 = 1e-12;

/// Stage-equation iteration cap of the implicit midpoint integrator.
pub const MIDPOINT_STAGE_MAX_ITER: usize = 20;

/// Cap on stored trajectory samples; longer runs are strided down.
pub const MAX_TRAJECTORY_SAMPLES: usize = 100_000;

/// Runtime-adjustable tolerances, echoed into every output that depends on them.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub surface_tol: f64,
    pub grad_tol: f64,
    pub report_tol: f64,
    pub critical_tol: f64,
    pub constancy_tol: f64,
    pub radius_tol: f64,
    /// Half-width of the boundedness search box; derived from the profile when absent.
    pub search_radius: Option<f64>,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            surface_tol: SURFACE_TOL,
            grad_tol: GRAD_TOL,
            report_tol: REPORT_TOL,
            critical_tol: CRITICAL_TOL,
            constancy_tol: CONSTANCY_TOL,
            radius_tol: RADIUS_TOL,
            search_radius: None,
            max_iter: PROJECT_MAX_ITER,
        }
    }
}

impl Tolerances {
    /// Applies a `key=value` override; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "surface_tol" => self.surface_tol = value,
            "grad_tol" => self.grad_tol = value,
            "report_tol" => self.report_tol = value,
            "critical_tol" => self.critical_tol = value,
            "constancy_tol" => self.constancy_tol = value,
            "radius_tol" => self.radius_tol = value,
            "search_radius" => self.search_radius = Some(value),
            "max_iter" => self.max_iter = value as usize,
            other => {
                return Err(Error::Domain(format!("unknown tolerance key `{other}`")));
            }
        }
        Ok(())
    }
}
