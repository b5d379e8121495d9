//! Radial defining functions g(r) of Reinhardt boundaries and the lifting
//! between ambient complex points and radii coordinates.
//!
//! A boundary point z ∈ ℂ^{n+1} only enters the defining function through its
//! radii r_k = |z_k|², so the profile carries g together with its first and
//! second radial derivatives and everything downstream is phase-invariant by
//! construction.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::{self, Tolerances};

/// The concrete shape of the defining function g(r).
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// g(r) = r_1 + … + r_{n+1} − R²
    Sphere { radius: f64 },
    /// g(r) = r_1/a_1² + … + r_{n+1}/a_{n+1}² − 1
    Ellipsoid { semiaxes: Vec<f64> },
    /// g(r) = r_m − R² for one fixed coordinate m (0-based)
    Cylinder { radius: f64, fixed_index: usize },
    /// g(r) = Σ c_α r^α over multi-indices α
    Polynomial { terms: Vec<(Vec<u32>, f64)> },
}

/// How radial derivatives are produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    Analytic,
    /// Central differences of g with the given step, one-sided at r_k = 0.
    FiniteDifference { step: f64 },
}

/// Value, gradient, and (exactly symmetric) Hessian of g at a radii vector.
#[derive(Debug, Clone)]
pub struct ProfileEval {
    pub g: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<Vec<f64>>,
}

/// A point on (or near) the surface M = {g(r(z)) = 0}.
#[derive(Debug, Clone)]
pub struct SurfacePoint {
    /// Ambient coordinates.
    pub z: Vec<Complex64>,
    /// Radii r_k = |z_k|².
    pub r: Vec<f64>,
    /// |g(r)|.
    pub residual: f64,
    /// |∂f| = (Σ_k r_k g_k²)^{1/2}.
    pub grad_norm_complex: f64,
}

impl SurfacePoint {
    /// The point as a real 2(n+1)-vector, x-block then y-block.
    pub fn real_coords(&self) -> Vec<f64> {
        let dim = self.z.len();
        let mut v = vec![0.0; 2 * dim];
        for (k, zk) in self.z.iter().enumerate() {
            v[k] = zk.re;
            v[dim + k] = zk.im;
        }
        v
    }

    /// Euclidean norm |z| of the position vector.
    pub fn norm(&self) -> f64 {
        self.r.iter().sum::<f64>().sqrt()
    }
}

/// Verdict of the boundedness scan.
#[derive(Debug, Clone, PartialEq)]
pub enum Boundedness {
    Bounded,
    /// A radii vector with g(r) ≤ 0 on the outer face of the search box.
    UnboundedWitness(Vec<f64>),
    Inconclusive,
}

impl Boundedness {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Boundedness::Bounded)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Boundedness::Bounded => "bounded",
            Boundedness::UnboundedWitness(_) => "unbounded",
            Boundedness::Inconclusive => "inconclusive",
        }
    }
}

/// A Reinhardt defining function together with its derivative strategy.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    dim: usize,
    family: Family,
    mode: DerivativeMode,
}

/// Radii r_k = |z_k|² = x_k² + y_k² of an ambient point.
pub fn eval_radii(z: &[Complex64]) -> Vec<f64> {
    z.iter().map(|zk| zk.norm_sqr()).collect()
}

/// Componentwise phase rotation z_k ↦ e^{iθ_k} z_k.
pub fn rotate_phases(z: &[Complex64], thetas: &[f64]) -> Vec<Complex64> {
    z.iter()
        .zip(thetas)
        .map(|(zk, th)| zk * Complex64::from_polar(1.0, *th))
        .collect()
}

impl RadialProfile {
    pub fn sphere(dim: usize, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::InvalidProfile("sphere radius must be positive".into()));
        }
        Self::new(dim, Family::Sphere { radius })
    }

    pub fn ellipsoid(semiaxes: &[f64]) -> Result<Self> {
        if semiaxes.iter().any(|&a| a <= 0.0) {
            return Err(Error::InvalidProfile("semiaxes must be positive".into()));
        }
        Self::new(
            semiaxes.len(),
            Family::Ellipsoid {
                semiaxes: semiaxes.to_vec(),
            },
        )
    }

    /// Cylinder-type profile in ℂ^dim; `fixed_index` is 0-based.
    pub fn cylinder(dim: usize, radius: f64, fixed_index: usize) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::InvalidProfile("cylinder radius must be positive".into()));
        }
        if fixed_index >= dim {
            return Err(Error::InvalidProfile(format!(
                "fixed_index {fixed_index} out of range for dim {dim}"
            )));
        }
        Self::new(dim, Family::Cylinder { radius, fixed_index })
    }

    pub fn polynomial(dim: usize, terms: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidProfile("polynomial table is empty".into()));
        }
        if terms.iter().any(|(alpha, _)| alpha.len() != dim) {
            return Err(Error::InvalidProfile(
                "polynomial multi-index length must equal dim".into(),
            ));
        }
        Self::new(dim, Family::Polynomial { terms })
    }

    fn new(dim: usize, family: Family) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidProfile(
                "ambient complex dimension must be at least 2".into(),
            ));
        }
        Ok(RadialProfile {
            dim,
            family,
            mode: DerivativeMode::Analytic,
        })
    }

    /// Switches the derivative strategy.
    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    /// Ambient complex dimension n+1.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// CR dimension n = dim − 1.
    pub fn cr_dim(&self) -> usize {
        self.dim - 1
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    /// A random polynomial profile with positive linear part and nonnegative
    /// quadratic part, hence monotone in every radius and bounded.
    pub fn random_bounded_polynomial(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms: Vec<(Vec<u32>, f64)> = vec![(vec![0; dim], -1.0)];
        for k in 0..dim {
            let mut alpha = vec![0u32; dim];
            alpha[k] = 1;
            terms.push((alpha, rng.gen_range(0.3..1.5)));
        }
        for k in 0..dim {
            if rng.gen_bool(0.7) {
                let mut alpha = vec![0u32; dim];
                alpha[k] = 2;
                terms.push((alpha, rng.gen_range(0.0..0.4)));
            }
        }
        for j in 0..dim {
            for k in (j + 1)..dim {
                if rng.gen_bool(0.5) {
                    let mut alpha = vec![0u32; dim];
                    alpha[j] = 1;
                    alpha[k] = 1;
                    terms.push((alpha, rng.gen_range(0.0..0.25)));
                }
            }
        }
        RadialProfile::polynomial(dim, terms).expect("generated table is valid")
    }

    fn g_value(&self, r: &[f64]) -> f64 {
        match &self.family {
            Family::Sphere { radius } => r.iter().sum::<f64>() - radius * radius,
            Family::Ellipsoid { semiaxes } => {
                r.iter()
                    .zip(semiaxes)
                    .map(|(rk, a)| rk / (a * a))
                    .sum::<f64>()
                    - 1.0
            }
            Family::Cylinder { radius, fixed_index } => r[*fixed_index] - radius * radius,
            Family::Polynomial { terms } => terms
                .iter()
                .map(|(alpha, coeff)| {
                    coeff
                        * alpha
                            .iter()
                            .zip(r)
                            .map(|(&e, &rk)| rk.powi(e as i32))
                            .product::<f64>()
                })
                .sum(),
        }
    }

    fn analytic_grad(&self, r: &[f64]) -> Vec<f64> {
        match &self.family {
            Family::Sphere { .. } => vec![1.0; self.dim],
            Family::Ellipsoid { semiaxes } => semiaxes.iter().map(|a| 1.0 / (a * a)).collect(),
            Family::Cylinder { fixed_index, .. } => {
                let mut grad = vec![0.0; self.dim];
                grad[*fixed_index] = 1.0;
                grad
            }
            Family::Polynomial { terms } => {
                let mut grad = vec![0.0; self.dim];
                for (alpha, coeff) in terms {
                    for (k, &ek) in alpha.iter().enumerate() {
                        if ek == 0 {
                            continue;
                        }
                        let mut part = coeff * ek as f64;
                        for (m, &em) in alpha.iter().enumerate() {
                            let e = if m == k { em - 1 } else { em };
                            part *= r[m].powi(e as i32);
                        }
                        grad[k] += part;
                    }
                }
                grad
            }
        }
    }

    fn analytic_hess(&self, r: &[f64]) -> Vec<Vec<f64>> {
        let dim = self.dim;
        let mut hess = vec![vec![0.0; dim]; dim];
        if let Family::Polynomial { terms } = &self.family {
            for j in 0..dim {
                for k in j..dim {
                    let mut acc = 0.0;
                    for (alpha, coeff) in terms {
                        let factor = if j == k {
                            alpha[j] as f64 * (alpha[j] as f64 - 1.0)
                        } else {
                            alpha[j] as f64 * alpha[k] as f64
                        };
                        if factor == 0.0 {
                            continue;
                        }
                        let mut part = coeff * factor;
                        for (m, &em) in alpha.iter().enumerate() {
                            let mut e = em;
                            if m == j {
                                e -= 1;
                            }
                            if m == k {
                                e -= 1;
                            }
                            part *= r[m].powi(e as i32);
                        }
                        acc += part;
                    }
                    hess[j][k] = acc;
                    hess[k][j] = acc;
                }
            }
        }
        hess
    }

    /// First derivative of g along axis k by a second-order stencil,
    /// one-sided when the point sits too close to r_k = 0.
    fn fd_first<F: Fn(&[f64]) -> f64>(g: &F, r: &[f64], k: usize, h: f64) -> f64 {
        let mut plus = r.to_vec();
        let mut minus = r.to_vec();
        if r[k] >= h {
            plus[k] += h;
            minus[k] -= h;
            (g(&plus) - g(&minus)) / (2.0 * h)
        } else {
            let mut plus2 = r.to_vec();
            plus[k] += h;
            plus2[k] += 2.0 * h;
            (-3.0 * g(r) + 4.0 * g(&plus) - g(&plus2)) / (2.0 * h)
        }
    }

    fn fd_eval(&self, r: &[f64], h: f64) -> ProfileEval {
        let g = |rr: &[f64]| self.g_value(rr);
        let dim = self.dim;
        let grad: Vec<f64> = (0..dim).map(|k| Self::fd_first(&g, r, k, h)).collect();
        let mut hess = vec![vec![0.0; dim]; dim];
        for j in 0..dim {
            for k in j..dim {
                let value = if j == k {
                    if r[k] >= h {
                        let mut plus = r.to_vec();
                        let mut minus = r.to_vec();
                        plus[k] += h;
                        minus[k] -= h;
                        (g(&plus) - 2.0 * g(r) + g(&minus)) / (h * h)
                    } else {
                        let shifted: Vec<f64> = (0..4)
                            .map(|i| {
                                let mut s = r.to_vec();
                                s[k] += i as f64 * h;
                                g(&s)
                            })
                            .collect();
                        (2.0 * shifted[0] - 5.0 * shifted[1] + 4.0 * shifted[2] - shifted[3])
                            / (h * h)
                    }
                } else {
                    // Mixed partial as a nested first-difference; each axis
                    // independently picks the boundary-safe stencil.
                    let inner = |rr: &[f64]| Self::fd_first(&g, rr, k, h);
                    Self::fd_first(&inner, r, j, h)
                };
                hess[j][k] = value;
                hess[k][j] = value;
            }
        }
        ProfileEval {
            g: g(r),
            grad,
            hess,
        }
    }

    /// g, ∇g and the radial Hessian at a radii vector.
    pub fn eval(&self, r: &[f64]) -> Result<ProfileEval> {
        if r.len() != self.dim {
            return Err(Error::Domain(format!(
                "radii vector has length {}, profile dimension is {}",
                r.len(),
                self.dim
            )));
        }
        if let Some(bad) = r.iter().find(|&&rk| rk < 0.0 || !rk.is_finite()) {
            return Err(Error::Domain(format!("radius {bad} outside [0, ∞)")));
        }
        let eval = match self.mode {
            DerivativeMode::Analytic => ProfileEval {
                g: self.g_value(r),
                grad: self.analytic_grad(r),
                hess: self.analytic_hess(r),
            },
            DerivativeMode::FiniteDifference { step } => self.fd_eval(r, step),
        };
        // Defining-function regularity: the radial gradient must not vanish
        // on the zero set.
        if eval.g.abs() <= 1e-10 {
            let max_grad = eval.grad.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if max_grad < tol::GRAD_TOL {
                return Err(Error::Domain(
                    "irregular defining function: g(r) = 0 with vanishing radial gradient".into(),
                ));
            }
        }
        Ok(eval)
    }

    /// |∂f| = (Σ_k r_k g_k²)^{1/2} at a radii vector.
    pub fn grad_norm_complex(&self, r: &[f64]) -> Result<f64> {
        let eval = self.eval(r)?;
        Ok(r.iter()
            .zip(&eval.grad)
            .map(|(rk, gk)| rk * gk * gk)
            .sum::<f64>()
            .sqrt())
    }

    /// Wirtinger derivatives f_k = ∂f/∂z_k = z̄_k g_k.
    pub fn complex_gradient(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let r = eval_radii(z);
        let eval = self.eval(&r)?;
        Ok(z.iter()
            .zip(&eval.grad)
            .map(|(zk, gk)| zk.conj() * gk)
            .collect())
    }

    /// Real gradient (f_{x_1},…,f_{x_{n+1}}, f_{y_1},…,f_{y_{n+1}}) with
    /// f_{x_k} = 2 x_k g_k and f_{y_k} = 2 y_k g_k.
    pub fn real_gradient(&self, z: &[Complex64]) -> Result<Vec<f64>> {
        let r = eval_radii(z);
        let eval = self.eval(&r)?;
        let dim = self.dim;
        let mut grad = vec![0.0; 2 * dim];
        for (k, zk) in z.iter().enumerate() {
            grad[k] = 2.0 * zk.re * eval.grad[k];
            grad[dim + k] = 2.0 * zk.im * eval.grad[k];
        }
        let norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < tol::GRAD_TOL {
            return Err(Error::DegenerateGradient {
                norm,
                tol: tol::GRAD_TOL,
            });
        }
        Ok(grad)
    }

    /// Complex Hessian entry f_{j k̄} = δ_{jk} g_k + z_k z̄_j g_{jk}
    /// (0-based indices).
    pub fn complex_hessian_entry(&self, z: &[Complex64], j: usize, k: usize) -> Result<Complex64> {
        let r = eval_radii(z);
        let eval = self.eval(&r)?;
        let delta = if j == k { eval.grad[k] } else { 0.0 };
        Ok(Complex64::new(delta, 0.0) + z[k] * z[j].conj() * eval.hess[j][k])
    }

    /// Full complex Hessian (f_{j k̄}); Hermitian by construction.
    pub fn complex_hessian(&self, z: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        let r = eval_radii(z);
        let eval = self.eval(&r)?;
        let dim = self.dim;
        let mut h = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for j in 0..dim {
            for k in j..dim {
                let delta = if j == k { eval.grad[k] } else { 0.0 };
                let entry = Complex64::new(delta, 0.0) + z[k] * z[j].conj() * eval.hess[j][k];
                h[j][k] = entry;
                h[k][j] = entry.conj();
            }
        }
        Ok(h)
    }

    /// Evaluates a point without asserting surface membership.
    pub fn surface_point(&self, z: &[Complex64]) -> Result<SurfacePoint> {
        let r = eval_radii(z);
        let eval = self.eval(&r)?;
        let grad_norm = r
            .iter()
            .zip(&eval.grad)
            .map(|(rk, gk)| rk * gk * gk)
            .sum::<f64>()
            .sqrt();
        if grad_norm < tol::GRAD_TOL {
            return Err(Error::DegenerateGradient {
                norm: grad_norm,
                tol: tol::GRAD_TOL,
            });
        }
        Ok(SurfacePoint {
            z: z.to_vec(),
            r,
            residual: eval.g.abs(),
            grad_norm_complex: grad_norm,
        })
    }

    /// Evaluates a point and insists that it lies on M.
    pub fn on_surface(&self, z: &[Complex64], surface_tol: f64) -> Result<SurfacePoint> {
        let q = self.surface_point(z)?;
        if q.residual > surface_tol {
            return Err(Error::OffSurface {
                residual: q.residual,
                tol: surface_tol,
            });
        }
        Ok(q)
    }

    /// Scaling t > 0 with g(t·dir) = 0 along a ray in radii space.
    pub fn section_crossing(&self, dir: &[f64]) -> Result<f64> {
        if dir.iter().any(|&d| d < 0.0) || dir.iter().all(|&d| d == 0.0) {
            return Err(Error::Domain(
                "ray direction must be nonnegative and nonzero".into(),
            ));
        }
        let phi = |t: f64| -> f64 { self.g_value(&dir.iter().map(|d| t * d).collect::<Vec<_>>()) };
        // Geometric bracket scan over 24 decades.
        let mut t_prev = 0.0;
        let mut phi_prev = phi(0.0);
        let mut bracket = None;
        let mut t = 1e-12;
        while t <= 1e12 {
            let phi_t = phi(t);
            if phi_prev == 0.0 {
                bracket = Some((t_prev, t_prev));
                break;
            }
            if phi_prev * phi_t <= 0.0 {
                bracket = Some((t_prev, t));
                break;
            }
            t_prev = t;
            phi_prev = phi_t;
            t *= 2.0;
        }
        let (mut lo, mut hi) = bracket.ok_or(Error::EmptySurface)?;
        if lo == hi {
            return Ok(lo);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if phi(lo) * phi(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut root = 0.5 * (lo + hi);
        // Newton polish with the analytic ray derivative Σ d_k g_k(t d).
        for _ in 0..4 {
            let r_t: Vec<f64> = dir.iter().map(|d| root * d).collect();
            let eval = self.eval(&r_t)?;
            let slope: f64 = dir.iter().zip(&eval.grad).map(|(d, gk)| d * gk).sum();
            if slope.abs() < 1e-300 {
                break;
            }
            let next = root - eval.g / slope;
            if next.is_finite() && next > 0.0 {
                root = next;
            }
        }
        Ok(root)
    }

    /// Ray crossing g(t·e_k) = 0 per coordinate axis, when one exists.
    pub fn axis_crossings(&self) -> Vec<Option<f64>> {
        (0..self.dim)
            .map(|k| {
                let mut dir = vec![0.0; self.dim];
                dir[k] = 1.0;
                self.section_crossing(&dir).ok()
            })
            .collect()
    }

    /// Projects a guess onto M by scaling its radii, preserving every phase.
    pub fn project_to_surface(&self, z_guess: &[Complex64], tols: &Tolerances) -> Result<SurfacePoint> {
        let r_guess = eval_radii(z_guess);
        if r_guess.iter().all(|&rk| rk == 0.0) {
            return Err(Error::Domain("cannot project the origin".into()));
        }
        let mut t = 1.0f64;
        let mut iters = 0usize;
        let mut converged = false;
        while iters < tols.max_iter {
            iters += 1;
            let r_t: Vec<f64> = r_guess.iter().map(|rk| t * rk).collect();
            let eval = self.eval(&r_t)?;
            if eval.g.abs() <= tols.surface_tol {
                converged = true;
                break;
            }
            let slope: f64 = r_guess.iter().zip(&eval.grad).map(|(rk, gk)| rk * gk).sum();
            if slope.abs() < 1e-300 {
                break;
            }
            let next = t - eval.g / slope;
            if !next.is_finite() || next <= 0.0 {
                break;
            }
            t = next;
        }
        if !converged {
            // Newton left its basin; fall back to the bracketed ray solve.
            t = self.section_crossing(&r_guess)?;
            let r_t: Vec<f64> = r_guess.iter().map(|rk| t * rk).collect();
            if self.eval(&r_t)?.g.abs() > tols.surface_tol {
                return Err(Error::NoConvergence {
                    iters: tols.max_iter,
                    context: "radial projection".into(),
                });
            }
        }
        let scale = t.sqrt();
        let z: Vec<Complex64> = z_guess.iter().map(|zk| zk * scale).collect();
        self.on_surface(&z, tols.surface_tol)
    }

    /// Deterministic random sample of M: rejection-sampled radii directions
    /// scaled onto the section, with independent uniform phases. A quarter of
    /// the draws zero out a random coordinate subset so degenerate tori
    /// (some z_k = 0) and near-axis regions are covered.
    pub fn sample_surface(
        &self,
        count: usize,
        seed: u64,
        tols: &Tolerances,
    ) -> Result<Vec<SurfacePoint>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(count);
        while points.len() < count {
            let mut found = false;
            for _attempt in 0..100 {
                let mut dir: Vec<f64> = (0..self.dim).map(|_| 1.0 - rng.gen::<f64>()).collect();
                if rng.gen_bool(0.25) {
                    let zeros = rng.gen_range(1..self.dim);
                    let mut order: Vec<usize> = (0..self.dim).collect();
                    for i in 0..zeros {
                        let j = rng.gen_range(i..self.dim);
                        order.swap(i, j);
                    }
                    for &k in &order[..zeros] {
                        dir[k] = 0.0;
                    }
                }
                let Ok(t) = self.section_crossing(&dir) else {
                    continue;
                };
                let thetas: Vec<f64> = (0..self.dim).map(|_| rng.gen::<f64>() * TAU).collect();
                let z: Vec<Complex64> = dir
                    .iter()
                    .zip(&thetas)
                    .map(|(d, th)| Complex64::from_polar((t * d).sqrt(), *th))
                    .collect();
                match self.on_surface(&z, tols.surface_tol) {
                    Ok(q) => {
                        points.push(q);
                        found = true;
                        break;
                    }
                    Err(_) => continue,
                }
            }
            if !found {
                return Err(Error::EmptySurface);
            }
        }
        Ok(points)
    }

    /// Grid scan of the sublevel set {g ≤ 0} inside [0, search_radius²]^{n+1}.
    ///
    /// A face hit yields an unboundedness witness; a strictly interior hit
    /// with clean faces counts as bounded. This flags rather than certifies.
    pub fn is_bounded(&self, search_radius: f64) -> Boundedness {
        if search_radius <= 0.0 {
            return Boundedness::Inconclusive;
        }
        let dim = self.dim;
        let budget = 300_000f64;
        let per_axis = (budget.powf(1.0 / dim as f64).floor() as usize).clamp(5, 33);
        let r_max = search_radius * search_radius;
        let mut idx = vec![0usize; dim];
        let mut interior_hit = false;
        loop {
            let r: Vec<f64> = idx
                .iter()
                .map(|&i| r_max * i as f64 / (per_axis - 1) as f64)
                .collect();
            let g = self.g_value(&r);
            let on_face = idx.iter().any(|&i| i == per_axis - 1);
            if g <= 0.0 {
                if on_face {
                    return Boundedness::UnboundedWitness(r);
                }
                interior_hit = true;
            }
            // Odometer increment over the grid.
            let mut axis = 0;
            loop {
                idx[axis] += 1;
                if idx[axis] < per_axis {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
                if axis == dim {
                    return if interior_hit {
                        Boundedness::Bounded
                    } else {
                        Boundedness::Inconclusive
                    };
                }
            }
        }
    }

    /// Default boundedness search radius: twice the largest surface extent
    /// seen along the coordinate axes (falls back to 10 when no axis crosses).
    pub fn default_search_radius(&self) -> f64 {
        let max_axis = self
            .axis_crossings()
            .into_iter()
            .flatten()
            .fold(0.0f64, f64::max);
        if max_axis > 0.0 {
            2.0 * max_axis.sqrt()
        } else {
            10.0
        }
    }
}

// ---------------------------------------------------------------------------
// JSON profile documents
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    dim: usize,
    family: String,
    params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    derivative_mode: Option<ModeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModeDoc {
    Analytic,
    FiniteDifference { h: f64 },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereParams {
    radius: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipsoidParams {
    semiaxes: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CylinderParams {
    radius: f64,
    /// 1-based coordinate index of the constrained radius.
    #[serde(default = "default_fixed_index")]
    fixed_index: usize,
}

fn default_fixed_index() -> usize {
    1
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialParams {
    /// Multi-index strings "e1,e2,...,e(n+1)" mapped to coefficients.
    coefficients: BTreeMap<String, f64>,
}

impl RadialProfile {
    /// Parses the JSON profile document; unknown keys are rejected.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: ProfileDoc = serde_json::from_str(text)
            .map_err(|e| Error::InvalidProfile(format!("profile JSON: {e}")))?;
        let parse = |what: &str, e: serde_json::Error| {
            Error::InvalidProfile(format!("{what} params: {e}"))
        };
        let mut profile = match doc.family.as_str() {
            "sphere" => {
                let p: SphereParams =
                    serde_json::from_value(doc.params).map_err(|e| parse("sphere", e))?;
                RadialProfile::sphere(doc.dim, p.radius)?
            }
            "ellipsoid" => {
                let p: EllipsoidParams =
                    serde_json::from_value(doc.params).map_err(|e| parse("ellipsoid", e))?;
                if p.semiaxes.len() != doc.dim {
                    return Err(Error::InvalidProfile(format!(
                        "expected {} semiaxes, got {}",
                        doc.dim,
                        p.semiaxes.len()
                    )));
                }
                RadialProfile::ellipsoid(&p.semiaxes)?
            }
            "cylinder" => {
                let p: CylinderParams =
                    serde_json::from_value(doc.params).map_err(|e| parse("cylinder", e))?;
                if p.fixed_index == 0 || p.fixed_index > doc.dim {
                    return Err(Error::InvalidProfile(format!(
                        "fixed_index must be in 1..={}, got {}",
                        doc.dim, p.fixed_index
                    )));
                }
                RadialProfile::cylinder(doc.dim, p.radius, p.fixed_index - 1)?
            }
            "polynomial" => {
                let p: PolynomialParams =
                    serde_json::from_value(doc.params).map_err(|e| parse("polynomial", e))?;
                let mut terms = Vec::with_capacity(p.coefficients.len());
                for (key, coeff) in p.coefficients {
                    let alpha: std::result::Result<Vec<u32>, _> =
                        key.split(',').map(|part| part.trim().parse::<u32>()).collect();
                    let alpha = alpha.map_err(|_| {
                        Error::InvalidProfile(format!("bad multi-index `{key}`"))
                    })?;
                    if alpha.len() != doc.dim {
                        return Err(Error::InvalidProfile(format!(
                            "multi-index `{key}` has {} entries, expected {}",
                            alpha.len(),
                            doc.dim
                        )));
                    }
                    terms.push((alpha, coeff));
                }
                RadialProfile::polynomial(doc.dim, terms)?
            }
            other => {
                return Err(Error::InvalidProfile(format!("unknown family `{other}`")));
            }
        };
        if let Some(ModeDoc::FiniteDifference { h }) = doc.derivative_mode {
            if h <= 0.0 {
                return Err(Error::InvalidProfile("finite-difference step must be positive".into()));
            }
            profile = profile.with_mode(DerivativeMode::FiniteDifference { step: h });
        }
        Ok(profile)
    }

    /// Canonical JSON document for this profile (stable key order).
    pub fn to_json_string(&self) -> String {
        let (family, params) = match &self.family {
            Family::Sphere { radius } => ("sphere", serde_json::json!({ "radius": radius })),
            Family::Ellipsoid { semiaxes } => {
                ("ellipsoid", serde_json::json!({ "semiaxes": semiaxes }))
            }
            Family::Cylinder { radius, fixed_index } => (
                "cylinder",
                serde_json::json!({ "radius": radius, "fixed_index": fixed_index + 1 }),
            ),
            Family::Polynomial { terms } => {
                let mut map = BTreeMap::new();
                for (alpha, coeff) in terms {
                    let key = alpha
                        .iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(",");
                    map.insert(key, coeff);
                }
                ("polynomial", serde_json::json!({ "coefficients": map }))
            }
        };
        let mode = match self.mode {
            DerivativeMode::Analytic => None,
            DerivativeMode::FiniteDifference { step } => {
                Some(serde_json::json!({ "finite_difference": { "h": step } }))
            }
        };
        let mut doc = serde_json::json!({
            "dim": self.dim,
            "family": family,
            "params": params,
        });
        if let Some(mode) = mode {
            doc["derivative_mode"] = mode;
        }
        serde_json::to_string_pretty(&doc).expect("profile document serializes")
    }
}
