//! The characteristic Hamiltonian flow ż_k = −i z_k g_k(r(z)) on level sets
//! of a radial defining function, in closed form and numerically, plus the
//! conserved-quantity bookkeeping (radii, energy, curvatures, invariant tori).
//!
//! Because the Hamiltonian depends only on the radii, each radius is an
//! action variable: the closed-form orbit rotates every coordinate with the
//! frozen frequency g_k(r(z₀)) and stays on the torus {|z_k| = |z₀_k|}.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry;
use crate::profile::{eval_radii, RadialProfile};
use crate::tol;

/// Phase-space velocity −i z_k g_k: the symplectic matrix applied to the
/// Wirtinger gradient (f_1̄, …, f_{n+1}̄).
pub fn hamiltonian_field(profile: &RadialProfile, z: &[Complex64]) -> Result<Vec<Complex64>> {
    let r = eval_radii(z);
    let eval = profile.eval(&r)?;
    Ok(z.iter()
        .zip(&eval.grad)
        .map(|(zk, gk)| Complex64::new(0.0, -1.0) * zk * gk)
        .collect())
}

/// Closed-form flow z_k(t) = z_k(0)·e^{−i g_k(r(0)) t}; the radii are frozen
/// at the initial point, which is exact because they are conserved.
pub fn flow_closed_form(
    profile: &RadialProfile,
    z0: &[Complex64],
    t: f64,
) -> Result<Vec<Complex64>> {
    let r = eval_radii(z0);
    let eval = profile.eval(&r)?;
    Ok(z0
        .iter()
        .zip(&eval.grad)
        .map(|(zk, gk)| zk * Complex64::from_polar(1.0, -gk * t))
        .collect())
}

/// Arc-length-parametrized integral curve of the characteristic direction:
/// z_k(t) = z_k(0)·e^{−i g_k t / |∂f(0)|}. Requires a point on M.
pub fn characteristic_integral_curve(
    profile: &RadialProfile,
    z0: &[Complex64],
    t: f64,
) -> Result<Vec<Complex64>> {
    let q = profile.on_surface(z0, tol::SURFACE_TOL)?;
    let eval = profile.eval(&q.r)?;
    if q.grad_norm_complex < tol::GRAD_TOL {
        return Err(Error::DegenerateGradient {
            norm: q.grad_norm_complex,
            tol: tol::GRAD_TOL,
        });
    }
    Ok(z0
        .iter()
        .zip(&eval.grad)
        .map(|(zk, gk)| zk * Complex64::from_polar(1.0, -gk * t / q.grad_norm_complex))
        .collect())
}

/// Fixed-step integrator choice for [`flow_numeric`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4,
    ImplicitMidpoint,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Rk4 => "rk4",
            Method::ImplicitMidpoint => "implicit_midpoint",
        }
    }
}

/// How a trajectory was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowMode {
    ClosedForm,
    Numeric { step: f64, method: Method },
}

/// Maximum drift of each conserved quantity over the samples of a trajectory.
#[derive(Debug, Clone)]
pub struct DriftTable {
    /// Per-coordinate max | r_k(t) − r_k(0) |.
    pub radii: Vec<f64>,
    /// max | f(z(t)) − f(z(0)) |.
    pub energy: f64,
    /// max | h_TT(t) − h_TT(0) |.
    pub h_tt: f64,
    /// Per-order max | L^j(t) − L^j(0) |.
    pub levi: Vec<f64>,
}

impl DriftTable {
    pub fn max_radius_drift(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_levi_drift(&self) -> f64 {
        self.levi.iter().copied().fold(0.0, f64::max)
    }
}

/// A time-sampled orbit with its conservation summary.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<(f64, Vec<Complex64>)>,
    pub mode: FlowMode,
    pub drift: DriftTable,
}

/// The invariant torus {|z_k| = c_k} carrying an initial condition.
#[derive(Debug, Clone)]
pub struct Torus {
    pub radii: Vec<f64>,
    /// Some coordinate vanishes: the torus has collapsed circles.
    pub degenerate: bool,
}

/// Torus moduli c_k = |z_k| of an initial condition.
pub fn torus_of(z0: &[Complex64]) -> Torus {
    let radii: Vec<f64> = z0.iter().map(|zk| zk.norm()).collect();
    let degenerate = radii.contains(&0.0);
    Torus { radii, degenerate }
}

fn rk4_step(
    profile: &RadialProfile,
    z: &[Complex64],
    dt: f64,
) -> Result<Vec<Complex64>> {
    let add = |base: &[Complex64], dir: &[Complex64], s: f64| -> Vec<Complex64> {
        base.iter().zip(dir).map(|(b, d)| b + d * s).collect()
    };
    let k1 = hamiltonian_field(profile, z)?;
    let k2 = hamiltonian_field(profile, &add(z, &k1, dt / 2.0))?;
    let k3 = hamiltonian_field(profile, &add(z, &k2, dt / 2.0))?;
    let k4 = hamiltonian_field(profile, &add(z, &k3, dt))?;
    Ok(z.iter()
        .enumerate()
        .map(|(i, zi)| zi + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0))
        .collect())
}

fn implicit_midpoint_step(
    profile: &RadialProfile,
    z: &[Complex64],
    dt: f64,
) -> Result<Vec<Complex64>> {
    // Solve m = z + (dt/2)·F(m) by fixed-point iteration, then z' = 2m − z.
    let mut m: Vec<Complex64> = {
        let f = hamiltonian_field(profile, z)?;
        z.iter().zip(&f).map(|(zi, fi)| zi + fi * (dt / 2.0)).collect()
    };
    let mut converged = false;
    for _ in 0..tol::MIDPOINT_STAGE_MAX_ITER {
        let f = hamiltonian_field(profile, &m)?;
        let next: Vec<Complex64> = z
            .iter()
            .zip(&f)
            .map(|(zi, fi)| zi + fi * (dt / 2.0))
            .collect();
        let delta = next
            .iter()
            .zip(&m)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        m = next;
        if delta <= tol::MIDPOINT_STAGE_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::StepFailure(
            "implicit midpoint stage iteration did not converge".into(),
        ));
    }
    Ok(z.iter()
        .zip(&m)
        .map(|(zi, mi)| mi * 2.0 - zi)
        .collect())
}

/// Integrates ż_k = −i z_k g_k(r(z)) with a fixed step. Off-surface initial
/// conditions are allowed; the drift table is computed over the stored
/// samples (at most [`tol::MAX_TRAJECTORY_SAMPLES`], strided when longer).
pub fn flow_numeric(
    profile: &RadialProfile,
    z0: &[Complex64],
    t_end: f64,
    dt: f64,
    method: Method,
) -> Result<Trajectory> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::Domain("dt must be positive".into()));
    }
    if t_end < 0.0 || !t_end.is_finite() {
        return Err(Error::Domain("t_end must be nonnegative".into()));
    }
    let full_steps = (t_end / dt + 1e-9).floor() as usize;
    let remainder = t_end - full_steps as f64 * dt;
    let steps = full_steps + usize::from(remainder > 1e-12 * dt);
    let stride = steps / tol::MAX_TRAJECTORY_SAMPLES + 1;
    let mut z = z0.to_vec();
    let mut samples = vec![(0.0, z.clone())];
    for step_index in 1..=steps {
        let h = if step_index <= full_steps { dt } else { remainder };
        z = match method {
            Method::Rk4 => rk4_step(profile, &z, h)?,
            Method::ImplicitMidpoint => implicit_midpoint_step(profile, &z, h)?,
        };
        if z.iter().any(|zi| !zi.re.is_finite() || !zi.im.is_finite()) {
            return Err(Error::StepFailure(format!(
                "non-finite state at step {step_index}"
            )));
        }
        if step_index % stride == 0 || step_index == steps {
            let t = if step_index <= full_steps {
                step_index as f64 * dt
            } else {
                t_end
            };
            samples.push((t, z.clone()));
        }
    }
    let drift = drift_over(profile, &samples)?;
    Ok(Trajectory {
        samples,
        mode: FlowMode::Numeric { step: dt, method },
        drift,
    })
}

/// Samples the closed-form flow on an even time grid.
pub fn trajectory_closed_form(
    profile: &RadialProfile,
    z0: &[Complex64],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if dt <= 0.0 || t_end < 0.0 {
        return Err(Error::Domain("need dt > 0 and t_end ≥ 0".into()));
    }
    let steps = (t_end / dt + 1e-9).floor() as usize;
    let stride = steps / tol::MAX_TRAJECTORY_SAMPLES + 1;
    let mut samples = Vec::with_capacity(steps.min(tol::MAX_TRAJECTORY_SAMPLES) + 2);
    for i in (0..steps).step_by(stride.max(1)) {
        let t = i as f64 * dt;
        samples.push((t, flow_closed_form(profile, z0, t)?));
    }
    // The final sample lands exactly on t_end.
    samples.push((t_end, flow_closed_form(profile, z0, t_end)?));
    let drift = drift_over(profile, &samples)?;
    Ok(Trajectory {
        samples,
        mode: FlowMode::ClosedForm,
        drift,
    })
}

fn conserved_at(profile: &RadialProfile, z: &[Complex64]) -> Result<(Vec<f64>, f64, f64, Vec<f64>)> {
    let q = profile.surface_point(z)?;
    let eval = profile.eval(&q.r)?;
    let h_tt = geometry::characteristic_curvature_radial(profile, &q)?;
    let levi: Vec<f64> = (1..=profile.cr_dim())
        .map(|j| geometry::levi_curvature_det(profile, &q, j))
        .collect::<Result<_>>()?;
    Ok((q.r, eval.g, h_tt, levi))
}

fn drift_over(profile: &RadialProfile, samples: &[(f64, Vec<Complex64>)]) -> Result<DriftTable> {
    let dim = profile.dim();
    let n = profile.cr_dim();
    let (r0, f0, h0, levi0) = conserved_at(profile, &samples[0].1)?;
    let mut table = DriftTable {
        radii: vec![0.0; dim],
        energy: 0.0,
        h_tt: 0.0,
        levi: vec![0.0; n],
    };
    for (_, z) in samples.iter().skip(1) {
        let (r, f, h, levi) = conserved_at(profile, z)?;
        for k in 0..dim {
            table.radii[k] = table.radii[k].max((r[k] - r0[k]).abs());
        }
        table.energy = table.energy.max((f - f0).abs());
        table.h_tt = table.h_tt.max((h - h0).abs());
        for j in 0..n {
            table.levi[j] = table.levi[j].max((levi[j] - levi0[j]).abs());
        }
    }
    Ok(table)
}

/// Recomputes the conservation summary of an existing trajectory.
pub fn conservation_report(profile: &RadialProfile, trajectory: &Trajectory) -> Result<DriftTable> {
    drift_over(profile, &trajectory.samples)
}

/// Writes the trajectory CSV: t, x_1.., y_1.., r_1.., f, h_TT, L_1..L_n.
pub fn write_trajectory_csv<W: Write>(
    profile: &RadialProfile,
    trajectory: &Trajectory,
    out: &mut W,
) -> std::io::Result<()> {
    let dim = profile.dim();
    let n = profile.cr_dim();
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=dim).map(|k| format!("x_{k}")));
    cols.extend((1..=dim).map(|k| format!("y_{k}")));
    cols.extend((1..=dim).map(|k| format!("r_{k}")));
    cols.push("f".into());
    cols.push("h_TT".into());
    cols.extend((1..=n).map(|j| format!("L_{j}")));
    writeln!(out, "{}", cols.join(","))?;
    for (t, z) in &trajectory.samples {
        let (r, f, h, levi) = conserved_at(profile, z)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))?;
        let mut fields = vec![format!("{t:.16e}")];
        fields.extend(z.iter().map(|zk| format!("{:.16e}", zk.re)));
        fields.extend(z.iter().map(|zk| format!("{:.16e}", zk.im)));
        fields.extend(r.iter().map(|rk| format!("{rk:.16e}")));
        fields.push(format!("{f:.16e}"));
        fields.push(format!("{h:.16e}"));
        fields.extend(levi.iter().map(|l| format!("{l:.16e}")));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
