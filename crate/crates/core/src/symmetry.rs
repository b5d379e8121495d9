//! Rigidity machinery: the vanishing characteristic component of the position
//! vector, critical points of the squared-distance function, the residual
//! 1 − |p̂|·h(T,T) at those points, and the numerical sphere verdict for
//! constant characteristic curvature.
//!
//! The squared-distance function φ = (Σ_k r_k)/2 and the constraint both live
//! in radii space, and the characteristic direction is flat for φ, so the
//! critical-point search runs in the (n+1)-dimensional radii orthant: every
//! radii-space solution lifts to a whole torus of ambient critical points.

use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry;
use crate::linalg;
use crate::profile::{Boundedness, RadialProfile, SurfacePoint};
use crate::tol::Tolerances;

/// One half the squared distance from the origin, φ(q) = (Σ_k r_k)/2.
pub fn distance_half_sq(q: &SurfacePoint) -> f64 {
    q.r.iter().sum::<f64>() / 2.0
}

/// |g̃(p, T_p)|: the characteristic component of the position vector, which
/// vanishes identically on Reinhardt boundaries.
pub fn check_lemma(profile: &RadialProfile, q: &SurfacePoint) -> Result<f64> {
    let t = geometry::characteristic_direction(profile, q)?;
    let p = q.real_coords();
    Ok(p.iter().zip(&t).map(|(a, b)| a * b).sum::<f64>().abs())
}

/// Signature-based classification of a constrained critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Max,
    Min,
    Saddle,
    Undetermined,
}

impl CriticalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CriticalKind::Max => "max",
            CriticalKind::Min => "min",
            CriticalKind::Saddle => "saddle",
            CriticalKind::Undetermined => "undetermined",
        }
    }
}

/// A converged critical point of φ with its rigidity data.
#[derive(Debug, Clone)]
pub struct CriticalPointResult {
    pub p_hat: SurfacePoint,
    /// |p̂|.
    pub norm: f64,
    pub h_tt_at: f64,
    /// |1 − |p̂|·h(T,T)|.
    pub rigidity_residual: f64,
    /// ‖p̂ + |p̂|·N_{p̂}‖: distance from exact position-normal antiparallelism.
    pub parallelism_residual: f64,
    pub kind: CriticalKind,
}

/// |1 − |p̂|·h_{p̂}(T,T)| recomputed from the stored point.
pub fn check_critical_relation(profile: &RadialProfile, cp: &CriticalPointResult) -> Result<f64> {
    let h = geometry::characteristic_curvature_radial(profile, &cp.p_hat)?;
    Ok((1.0 - cp.norm * h).abs())
}

/// Newton iteration on the radii-space stationarity system for one start:
/// g_j(r) = c on the active set, r = 0 off it, g(r) = 0. Returns the radii
/// and the common derivative value c.
fn kkt_solve(profile: &RadialProfile, start: &[f64]) -> Option<(Vec<f64>, f64)> {
    let dim = profile.dim();
    let mut r = start.to_vec();
    let mut active: Vec<usize> = (0..dim).filter(|&k| r[k] > 1e-9).collect();
    for k in 0..dim {
        if !active.contains(&k) {
            r[k] = 0.0;
        }
    }
    if active.is_empty() {
        return None;
    }
    let eval0 = profile.eval(&r).ok()?;
    let mut c: f64 = active.iter().map(|&k| eval0.grad[k]).sum::<f64>() / active.len() as f64;

    for _iter in 0..80 {
        let eval = profile.eval(&r).ok()?;
        let mut residual: Vec<f64> = active.iter().map(|&j| eval.grad[j] - c).collect();
        residual.push(eval.g);
        let scale = 1.0 + c.abs() + eval.g.abs();
        let max_res = residual.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if max_res <= 1e-13 * scale {
            return Some((r, c));
        }
        // KKT Jacobian: [ Hess_g restricted | −1 ; ∇g restricted | 0 ].
        let m = active.len();
        let mut jac = vec![vec![0.0; m + 1]; m + 1];
        for (row, &j) in active.iter().enumerate() {
            for (col, &k) in active.iter().enumerate() {
                jac[row][col] = eval.hess[j][k];
            }
            jac[row][m] = -1.0;
        }
        for (col, &k) in active.iter().enumerate() {
            jac[m][col] = eval.grad[k];
        }
        let rhs: Vec<f64> = residual.iter().map(|v| -v).collect();
        let delta = match linalg::real_solve(&jac, &rhs) {
            Ok(d) => d,
            Err(_) => {
                // Singular stationarity system (flat directions); regularize.
                let mut damped = jac.clone();
                for i in 0..=m {
                    damped[i][i] += 1e-10;
                }
                linalg::real_solve(&damped, &rhs).ok()?
            }
        };
        // Damp the step so the active radii stay nonnegative.
        let mut alpha = 1.0f64;
        for (col, &k) in active.iter().enumerate() {
            if delta[col] < 0.0 {
                let limit = -r[k] / delta[col];
                if limit < alpha {
                    alpha = limit;
                }
            }
        }
        for (col, &k) in active.iter().enumerate() {
            r[k] = (r[k] + alpha * delta[col]).max(0.0);
        }
        c += alpha * delta[m];
        // Drop coordinates pinned at the boundary.
        let dropped: Vec<usize> = active.iter().copied().filter(|&k| r[k] <= 1e-12).collect();
        if !dropped.is_empty() {
            for &k in &dropped {
                r[k] = 0.0;
            }
            active.retain(|k| !dropped.contains(k));
            if active.is_empty() {
                return None;
            }
            let eval = profile.eval(&r).ok()?;
            c = active.iter().map(|&k| eval.grad[k]).sum::<f64>() / active.len() as f64;
        }
    }
    None
}

/// Classifies a converged radii-space critical point by the sign pattern of
/// φ along feasible directions: first-order rates into the inactive
/// coordinates plus the constrained Hessian on the active tangent space.
fn classify(profile: &RadialProfile, r: &[f64], c: f64) -> CriticalKind {
    let dim = profile.dim();
    let Ok(eval) = profile.eval(r) else {
        return CriticalKind::Undetermined;
    };
    let active: Vec<usize> = (0..dim).filter(|&k| r[k] > 0.0).collect();
    let tol_sign = 1e-9 * (1.0 + c.abs());
    let mut has_positive = false;
    let mut has_negative = false;
    let mut has_zero = false;
    // Feasible move into an inactive coordinate, compensated on the active
    // set to stay on g = 0, changes φ at first order by (1 − g_k/c)/2.
    for k in (0..dim).filter(|k| !active.contains(k)) {
        let rate = 0.5 * (1.0 - eval.grad[k] / c);
        if rate > tol_sign {
            has_positive = true;
        } else if rate < -tol_sign {
            has_negative = true;
        } else {
            has_zero = true;
        }
    }
    // Second-order behavior along the active tangent {v : Σ g_k v_k = 0}:
    // the constrained Hessian of φ − μg is −μ·Hess g with μ = 1/(2c).
    if active.len() >= 2 {
        let m = active.len();
        let grad_a: Vec<f64> = active.iter().map(|&k| eval.grad[k]).collect();
        let gnorm2: f64 = grad_a.iter().map(|v| v * v).sum();
        // Orthonormal tangent basis by Gram–Schmidt against grad_a.
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for seed in 0..m {
            let mut v: Vec<f64> = (0..m)
                .map(|i| if i == seed { 1.0 } else { 0.0 })
                .collect();
            let coeff = v.iter().zip(&grad_a).map(|(a, b)| a * b).sum::<f64>() / gnorm2;
            for i in 0..m {
                v[i] -= coeff * grad_a[i];
            }
            for b in &basis {
                let coeff: f64 = v.iter().zip(b).map(|(a, bb)| a * bb).sum();
                for i in 0..m {
                    v[i] -= coeff * b[i];
                }
            }
            let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if len > 1e-10 {
                for vi in &mut v {
                    *vi /= len;
                }
                basis.push(v);
            }
            if basis.len() == m - 1 {
                break;
            }
        }
        let mu = 1.0 / (2.0 * c);
        let proj: Vec<Vec<Complex64>> = basis
            .iter()
            .map(|u| {
                basis
                    .iter()
                    .map(|v| {
                        let mut acc = 0.0;
                        for (i, &ki) in active.iter().enumerate() {
                            for (j, &kj) in active.iter().enumerate() {
                                acc += u[i] * eval.hess[ki][kj] * v[j];
                            }
                        }
                        Complex64::new(-mu * acc, 0.0)
                    })
                    .collect()
            })
            .collect();
        if let Ok(eig) = linalg::hermitian_eigenvalues(&proj) {
            for lambda in eig {
                if lambda > tol_sign {
                    has_positive = true;
                } else if lambda < -tol_sign {
                    has_negative = true;
                } else {
                    has_zero = true;
                }
            }
        }
    }
    match (has_positive, has_negative, has_zero) {
        (true, false, false) => CriticalKind::Min,
        (false, true, false) => CriticalKind::Max,
        (true, true, _) => CriticalKind::Saddle,
        _ => CriticalKind::Undetermined,
    }
}

/// Finds critical points of φ on M by a multi-start active-set Newton in
/// radii space, seeded from the axis sections and random surface samples.
/// Requires a bounded profile.
pub fn find_critical_points(
    profile: &RadialProfile,
    tols: &Tolerances,
    starts: usize,
    seed: u64,
) -> Result<Vec<CriticalPointResult>> {
    let search_radius = tols
        .search_radius
        .unwrap_or_else(|| profile.default_search_radius());
    match profile.is_bounded(search_radius) {
        Boundedness::Bounded => {}
        Boundedness::UnboundedWitness(_) => {
            return Err(Error::Precondition(
                "profile is unbounded; critical-point rigidity needs a bounded domain".into(),
            ));
        }
        Boundedness::Inconclusive => {
            return Err(Error::Precondition(
                "boundedness scan was inconclusive at the chosen search radius".into(),
            ));
        }
    }
    let dim = profile.dim();
    let mut start_list: Vec<Vec<f64>> = Vec::new();
    for (k, crossing) in profile.axis_crossings().into_iter().enumerate() {
        if let Some(t) = crossing {
            let mut r = vec![0.0; dim];
            r[k] = t;
            start_list.push(r);
        }
    }
    let random_budget = starts.saturating_sub(start_list.len());
    if random_budget > 0 {
        for q in profile.sample_surface(random_budget, seed, tols)? {
            start_list.push(q.r);
        }
    }

    let mut results: Vec<CriticalPointResult> = Vec::new();
    for start in &start_list {
        let Some((r_hat, c)) = kkt_solve(profile, start) else {
            continue;
        };
        // p̂ = −|p̂|·N forces the common derivative value to be positive.
        if c <= 0.0 {
            log::debug!("discarding stationary point with nonpositive multiplier c = {c}");
            continue;
        }
        let z: Vec<Complex64> = r_hat
            .iter()
            .map(|&rk| Complex64::new(rk.max(0.0).sqrt(), 0.0))
            .collect();
        let Ok(p_hat) = profile.on_surface(&z, tols.surface_tol) else {
            continue;
        };
        let norm = p_hat.norm();
        let Ok(n_vec) = geometry::unit_normal(profile, &p_hat) else {
            continue;
        };
        let pos = p_hat.real_coords();
        let parallelism_residual = pos
            .iter()
            .zip(&n_vec)
            .map(|(p, n)| (p + norm * n).powi(2))
            .sum::<f64>()
            .sqrt();
        if parallelism_residual > 1e-8 {
            log::debug!("discarding point with parallelism residual {parallelism_residual:.3e}");
            continue;
        }
        let Ok(h_tt_at) = geometry::characteristic_curvature_radial(profile, &p_hat) else {
            continue;
        };
        let rigidity_residual = (1.0 - norm * h_tt_at).abs();
        let kind = classify(profile, &r_hat, c);
        results.push(CriticalPointResult {
            p_hat,
            norm,
            h_tt_at,
            rigidity_residual,
            parallelism_residual,
            kind,
        });
    }
    // Deterministic merge: sort by norm then lexicographic radii, then
    // deduplicate radii vectors within 1e-8.
    results.sort_by(|a, b| {
        a.norm
            .partial_cmp(&b.norm)
            .unwrap()
            .then_with(|| a.p_hat.r.partial_cmp(&b.p_hat.r).unwrap())
    });
    results.dedup_by(|a, b| {
        a.p_hat
            .r
            .iter()
            .zip(&b.p_hat.r)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
            <= 1e-8
    });
    if results.is_empty() {
        return Err(Error::NoConvergence {
            iters: start_list.len(),
            context: "no critical point converged from any start".into(),
        });
    }
    Ok(results)
}

/// Witness sample attached to a `not_sphere` verdict.
#[derive(Debug, Clone)]
pub struct Witness {
    pub radii: Vec<f64>,
    pub h_tt: f64,
}

/// Outcome of the constant-curvature test.
#[derive(Debug, Clone)]
pub enum VerdictKind {
    Sphere { radius: f64 },
    NotSphere { witness: Box<(Witness, Witness)> },
    PreconditionFailed { reason: String },
}

impl VerdictKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictKind::Sphere { .. } => "sphere",
            VerdictKind::NotSphere { .. } => "not_sphere",
            VerdictKind::PreconditionFailed { .. } => "precondition_failed",
        }
    }
}

/// Full record of one symmetry verification run.
#[derive(Debug, Clone)]
pub struct SymmetryVerdict {
    pub h_tt_mean: f64,
    pub h_tt_spread: f64,
    pub is_constant: bool,
    pub bounded: Boundedness,
    pub verdict: VerdictKind,
    /// max | |p| − 1/mean(h_TT) | over the sample (meaningful when constant).
    pub radius_check: f64,
    pub sample_count: usize,
    pub seed: u64,
    pub constancy_tol: f64,
    pub radius_tol: f64,
    pub surface_tol: f64,
    pub search_radius: f64,
}

impl SymmetryVerdict {
    /// JSON with exactly the external contract fields: verdict, radius,
    /// h_TT_mean, h_TT_spread, bounded, sample_count, seed, tolerances.
    pub fn to_json(&self) -> serde_json::Value {
        let radius = match &self.verdict {
            VerdictKind::Sphere { radius } => json!(radius),
            _ => serde_json::Value::Null,
        };
        json!({
            "verdict": self.verdict.as_str(),
            "radius": radius,
            "h_TT_mean": self.h_tt_mean,
            "h_TT_spread": self.h_tt_spread,
            "bounded": self.bounded.as_str(),
            "sample_count": self.sample_count,
            "seed": self.seed,
            "tolerances": {
                "constancy_tol": self.constancy_tol,
                "radius_tol": self.radius_tol,
                "surface_tol": self.surface_tol,
                "search_radius": self.search_radius,
            },
        })
    }
}

/// Samples the surface, tests whether h(T,T) is constant, and issues the
/// sphere / not-sphere / precondition-failed verdict. The verdict is a
/// numerical assertion at this sample size and tolerance, not a proof.
pub fn verify_symmetry(
    profile: &RadialProfile,
    sample_count: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<SymmetryVerdict> {
    if sample_count == 0 {
        return Err(Error::Domain("sample_count must be positive".into()));
    }
    let samples = profile.sample_surface(sample_count, seed, tols)?;
    let h_values: Vec<f64> = samples
        .iter()
        .map(|q| geometry::characteristic_curvature_radial(profile, q))
        .collect::<Result<_>>()?;
    let mean = h_values.iter().sum::<f64>() / h_values.len() as f64;
    let (mut idx_min, mut idx_max) = (0usize, 0usize);
    for (i, h) in h_values.iter().enumerate() {
        if *h < h_values[idx_min] {
            idx_min = i;
        }
        if *h > h_values[idx_max] {
            idx_max = i;
        }
    }
    let spread = h_values[idx_max] - h_values[idx_min];
    let is_constant = spread <= tols.constancy_tol * mean.abs().max(1e-300);

    let axis_extent = profile.default_search_radius();
    let sample_extent = samples
        .iter()
        .flat_map(|q| q.r.iter().copied())
        .fold(0.0f64, f64::max)
        .sqrt()
        * 2.0;
    let search_radius = tols
        .search_radius
        .unwrap_or_else(|| axis_extent.max(sample_extent));
    let bounded = profile.is_bounded(search_radius);

    let witness_pair = || {
        Box::new((
            Witness {
                radii: samples[idx_min].r.clone(),
                h_tt: h_values[idx_min],
            },
            Witness {
                radii: samples[idx_max].r.clone(),
                h_tt: h_values[idx_max],
            },
        ))
    };

    let mut radius_check = f64::NAN;
    let verdict = if !bounded.is_bounded() {
        VerdictKind::PreconditionFailed {
            reason: match &bounded {
                Boundedness::UnboundedWitness(_) => "unbounded".into(),
                _ => "boundedness inconclusive".into(),
            },
        }
    } else if !is_constant {
        VerdictKind::NotSphere {
            witness: witness_pair(),
        }
    } else if mean <= 0.0 {
        VerdictKind::PreconditionFailed {
            reason: "constant characteristic curvature is not positive".into(),
        }
    } else {
        let radius = 1.0 / mean;
        radius_check = samples
            .iter()
            .map(|q| (q.norm() - radius).abs())
            .fold(0.0, f64::max);
        if radius_check <= tols.radius_tol {
            VerdictKind::Sphere { radius }
        } else {
            // Constant curvature but wrong radii: report the extremes.
            VerdictKind::NotSphere {
                witness: witness_pair(),
            }
        }
    };

    Ok(SymmetryVerdict {
        h_tt_mean: mean,
        h_tt_spread: spread,
        is_constant,
        bounded,
        verdict,
        radius_check,
        sample_count,
        seed,
        constancy_tol: tols.constancy_tol,
        radius_tol: tols.radius_tol,
        surface_tol: tols.surface_tol,
        search_radius,
    })
}
