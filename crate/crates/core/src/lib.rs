//! Curvature invariants of smooth Reinhardt boundaries in ℂ^{n+1}.
//!
//! The crate evaluates radial defining functions g(|z_1|², …, |z_{n+1}|²),
//! computes the characteristic curvature, the Levi curvatures and the mean
//! curvature of the level set {g = 0} through independent routes with
//! cross-check residuals, integrates the characteristic Hamiltonian flow and
//! its conserved quantities, searches critical points of the squared-distance
//! function, and tests numerically whether a boundary with constant
//! characteristic curvature is a sphere of radius 1/h(T,T).

pub mod error;
pub mod flow;
pub mod geometry;
pub mod linalg;
pub mod profile;
pub mod profile_ode;
pub mod symmetry;
pub mod tol;

pub use error::{Error, Result};
pub use flow::{FlowMode, Method, Torus, Trajectory};
pub use geometry::{CurvatureReport, Frame};
pub use profile::{Boundedness, DerivativeMode, Family, RadialProfile, SurfacePoint};
pub use profile_ode::{OdeRun, OdeState, StepControl, Terminus};
pub use symmetry::{CriticalKind, CriticalPointResult, SymmetryVerdict, VerdictKind};
pub use tol::Tolerances;
