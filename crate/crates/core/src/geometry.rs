//! Extrinsic CR geometry of the level set M = {g(r(z)) = 0}: adapted frames,
//! the second fundamental form, the characteristic curvature through two
//! independent routes, the Levi form with its eigenvalue and bordered
//! determinant routes, and the mean curvature.
//!
//! Conventions, fixed once and validated by the sphere:
//! * the unit normal is inner, N = −∇f/‖∇f‖, so the sphere of radius R has
//!   h(T,T) = +1/R;
//! * the complex structure acts on real coordinates as J(x, y) = (−y, x), and
//!   T = J·N = (f_y, −f_x)/‖∇f‖;
//! * complex-notation formulas use |∂f|² = Σ_k r_k g_k², real-notation ones
//!   use ‖∇f‖ = 2|∂f|;
//! * the Levi matrix is taken on a Hermitian-orthonormal horizontal basis and
//!   scaled so the sphere eigenvalues are 1/R, the same scale the bordered
//!   determinant route produces. On the unnormalized pair Z = X − iJX with
//!   |X| = 1 the raw form l(Z,Z) = h(X,X) + h(JX,JX) is twice the matrix
//!   quadratic.

use itertools::Itertools;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::profile::{RadialProfile, SurfacePoint};
use crate::tol;

/// J(x-block, y-block) = (−y-block, x-block): multiplication by i on ℂ^{n+1}
/// written on real coordinates.
pub fn apply_complex_structure(v: &[f64]) -> Vec<f64> {
    let dim = v.len() / 2;
    let mut out = vec![0.0; 2 * dim];
    for k in 0..dim {
        out[k] = -v[dim + k];
        out[dim + k] = v[k];
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Real form of a complex vector: [Re ζ | Im ζ].
pub fn complex_to_real(zeta: &[Complex64]) -> Vec<f64> {
    let dim = zeta.len();
    let mut v = vec![0.0; 2 * dim];
    for (k, z) in zeta.iter().enumerate() {
        v[k] = z.re;
        v[dim + k] = z.im;
    }
    v
}

/// Inner unit normal N = −∇f/‖∇f‖ in real coordinates.
pub fn unit_normal(profile: &RadialProfile, q: &SurfacePoint) -> Result<Vec<f64>> {
    let grad = profile.real_gradient(&q.z)?;
    let n = norm(&grad);
    Ok(grad.iter().map(|v| -v / n).collect())
}

/// Characteristic direction T = J·N.
pub fn characteristic_direction(profile: &RadialProfile, q: &SurfacePoint) -> Result<Vec<f64>> {
    Ok(apply_complex_structure(&unit_normal(profile, q)?))
}

/// Real 2(n+1)×2(n+1) Hessian of f(z) = g(r) in (x-block, y-block) ordering.
pub fn real_hessian(profile: &RadialProfile, q: &SurfacePoint) -> Result<Vec<Vec<f64>>> {
    let dim = profile.dim();
    let eval = profile.eval(&q.r)?;
    let x: Vec<f64> = q.z.iter().map(|z| z.re).collect();
    let y: Vec<f64> = q.z.iter().map(|z| z.im).collect();
    let mut h = vec![vec![0.0; 2 * dim]; 2 * dim];
    for j in 0..dim {
        for k in 0..dim {
            let delta = if j == k { 2.0 * eval.grad[k] } else { 0.0 };
            let gjk = eval.hess[j][k];
            h[j][k] = delta + 4.0 * x[j] * x[k] * gjk;
            h[dim + j][dim + k] = delta + 4.0 * y[j] * y[k] * gjk;
            h[j][dim + k] = 4.0 * x[j] * y[k] * gjk;
            h[dim + k][j] = h[j][dim + k];
        }
    }
    Ok(h)
}

fn quadratic_form(m: &[Vec<f64>], u: &[f64], v: &[f64]) -> f64 {
    m.iter()
        .zip(u)
        .map(|(row, ui)| ui * dot(row, v))
        .sum()
}

/// Second fundamental form h(V, W) = Vᵀ·Hess f·W / ‖∇f‖ on tangent vectors,
/// with the inner-normal sign convention.
pub fn second_fundamental_form(
    profile: &RadialProfile,
    q: &SurfacePoint,
    v: &[f64],
    w: &[f64],
) -> Result<f64> {
    let grad = profile.real_gradient(&q.z)?;
    let grad_norm = norm(&grad);
    for vec in [v, w] {
        let defect = dot(vec, &grad).abs() / (grad_norm * norm(vec).max(1e-300));
        if defect > tol::TANGENT_TOL {
            return Err(Error::NonTangent { defect });
        }
    }
    let hess = real_hessian(profile, q)?;
    Ok(quadratic_form(&hess, v, w) / grad_norm)
}

/// Characteristic curvature by the radial formula Σ_k r_k g_k³ / |∂f|³.
pub fn characteristic_curvature_radial(profile: &RadialProfile, q: &SurfacePoint) -> Result<f64> {
    let eval = profile.eval(&q.r)?;
    let norm2: f64 = q
        .r
        .iter()
        .zip(&eval.grad)
        .map(|(rk, gk)| rk * gk * gk)
        .sum();
    if norm2.sqrt() < tol::GRAD_TOL {
        return Err(Error::DegenerateGradient {
            norm: norm2.sqrt(),
            tol: tol::GRAD_TOL,
        });
    }
    let numerator: f64 = q
        .r
        .iter()
        .zip(&eval.grad)
        .map(|(rk, gk)| rk * gk * gk * gk)
        .sum();
    Ok(numerator / norm2.powf(1.5))
}

/// Characteristic curvature through the real Hessian: h(T, T) with T = J·N.
pub fn characteristic_curvature_oracle(profile: &RadialProfile, q: &SurfacePoint) -> Result<f64> {
    let t = characteristic_direction(profile, q)?;
    second_fundamental_form(profile, q, &t, &t)
}

/// Hermitian-orthonormal basis {Z_1..Z_n} of the horizontal space
/// {ζ ∈ ℂ^{n+1} : Σ_k ζ_k f_k = 0}, built by Gram–Schmidt on coordinate
/// seeds with the largest-|f_k| coordinate excluded.
pub fn horizontal_complex_basis(
    profile: &RadialProfile,
    q: &SurfacePoint,
) -> Result<Vec<Vec<Complex64>>> {
    let dim = profile.dim();
    let f = profile.complex_gradient(&q.z)?;
    let f_norm_sqr: f64 = f.iter().map(|v| v.norm_sqr()).sum();
    if f_norm_sqr.sqrt() < tol::GRAD_TOL {
        return Err(Error::DegenerateGradient {
            norm: f_norm_sqr.sqrt(),
            tol: tol::GRAD_TOL,
        });
    }
    let pivot = (0..dim)
        .max_by(|&i, &j| f[i].norm_sqr().partial_cmp(&f[j].norm_sqr()).unwrap())
        .unwrap();
    // The functional ζ ↦ Σ ζ_k f_k is ⟨ζ, w⟩ with w = conj(f).
    let w: Vec<Complex64> = f.iter().map(|v| v.conj()).collect();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(dim - 1);
    for j in (0..dim).filter(|&j| j != pivot) {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|k| {
                let seed = if k == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                seed - f[j] * w[k] / f_norm_sqr
            })
            .collect();
        // Two Gram–Schmidt passes keep orthogonality near machine precision.
        for _ in 0..2 {
            for b in &basis {
                let coeff: Complex64 = v.iter().zip(b).map(|(vi, bi)| vi * bi.conj()).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= coeff * bi;
                }
            }
        }
        let len = v.iter().map(|vi| vi.norm_sqr()).sum::<f64>().sqrt();
        if len < 1e-12 {
            return Err(Error::Domain(
                "horizontal basis seed collapsed during orthogonalization".into(),
            ));
        }
        for vi in &mut v {
            *vi /= len;
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Levi form matrix on the horizontal complex basis, scaled so the sphere of
/// radius R has every eigenvalue equal to 1/R:
/// `M[j][k] = Σ_{a,b} f_{a b̄} (Z_j)_a conj((Z_k)_b) / |∂f|`.
pub fn levi_form_matrix(profile: &RadialProfile, q: &SurfacePoint) -> Result<Vec<Vec<Complex64>>> {
    let basis = horizontal_complex_basis(profile, q)?;
    let hess = profile.complex_hessian(&q.z)?;
    let dim = profile.dim();
    let n = basis.len();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for j in 0..n {
        for k in j..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..dim {
                for b in 0..dim {
                    acc += hess[a][b] * basis[j][a] * basis[k][b].conj();
                }
            }
            acc /= q.grad_norm_complex;
            if j == k {
                m[j][j] = Complex64::new(acc.re, 0.0);
            } else {
                m[j][k] = acc;
                m[k][j] = acc.conj();
            }
        }
    }
    Ok(m)
}

/// Eigenvalues of the Levi form, sorted descending.
pub fn levi_eigenvalues(profile: &RadialProfile, q: &SurfacePoint) -> Result<Vec<f64>> {
    linalg::hermitian_eigenvalues(&levi_form_matrix(profile, q)?)
}

/// j-th Levi curvature (1-based j) as the normalized elementary symmetric
/// function of the Levi eigenvalues.
pub fn levi_curvature_sym(profile: &RadialProfile, q: &SurfacePoint, j: usize) -> Result<f64> {
    let n = profile.cr_dim();
    if j == 0 || j > n {
        return Err(Error::Domain(format!("Levi order {j} outside 1..={n}")));
    }
    let eig = levi_eigenvalues(profile, q)?;
    Ok(linalg::normalized_elementary_symmetric(&eig)[j - 1])
}

/// Bordered complex Hessian determinant over one index subset: the
/// (j+2)×(j+2) determinant with border f_{i}, f_{ī} and block f_{i k̄}.
fn bordered_determinant(
    f_grad: &[Complex64],
    f_hess: &[Vec<Complex64>],
    subset: &[usize],
) -> Complex64 {
    let m = subset.len() + 1;
    let mut mat = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for (row, &i) in subset.iter().enumerate() {
        // Border: first row carries f_{ī} = conj(f_i), first column f_i.
        mat[0][row + 1] = f_grad[i].conj();
        mat[row + 1][0] = f_grad[i];
        for (col, &k) in subset.iter().enumerate() {
            mat[row + 1][col + 1] = f_hess[i][k];
        }
    }
    linalg::complex_det(&mat)
}

/// j-th Levi curvature by the bordered-determinant formula
/// L^j = −(1/C(n,j)) |∂f|^{−(j+2)} Σ_{i_1<…<i_{j+1}} Δ_{(i_1..i_{j+1})}.
pub fn levi_curvature_det(profile: &RadialProfile, q: &SurfacePoint, j: usize) -> Result<f64> {
    let n = profile.cr_dim();
    if j == 0 || j > n {
        return Err(Error::Domain(format!("Levi order {j} outside 1..={n}")));
    }
    let f_grad = profile.complex_gradient(&q.z)?;
    let f_hess = profile.complex_hessian(&q.z)?;
    if q.grad_norm_complex < tol::GRAD_TOL {
        return Err(Error::DegenerateGradient {
            norm: q.grad_norm_complex,
            tol: tol::GRAD_TOL,
        });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for subset in (0..profile.dim()).combinations(j + 1) {
        sum += bordered_determinant(&f_grad, &f_hess, &subset);
    }
    let scale = linalg::binomial(n, j) * q.grad_norm_complex.powi(j as i32 + 2);
    Ok(-sum.re / scale)
}

/// Mean curvature H = (trace Hess f − Nᵀ·Hess f·N) / ((2n+1)·‖∇f‖).
pub fn mean_curvature(profile: &RadialProfile, q: &SurfacePoint) -> Result<f64> {
    let grad = profile.real_gradient(&q.z)?;
    let grad_norm = norm(&grad);
    let n_vec: Vec<f64> = grad.iter().map(|v| -v / grad_norm).collect();
    let hess = real_hessian(profile, q)?;
    let trace: f64 = (0..hess.len()).map(|i| hess[i][i]).sum();
    let normal_part = quadratic_form(&hess, &n_vec, &n_vec);
    let two_n_plus_1 = (2 * profile.cr_dim() + 1) as f64;
    Ok((trace - normal_part) / (two_n_plus_1 * grad_norm))
}

/// Adapted orthonormal frame {X_1..X_n, Y_1..Y_n, T, N} at a surface point.
#[derive(Debug, Clone)]
pub struct Frame {
    /// Inner unit normal.
    pub normal: Vec<f64>,
    /// Characteristic direction T = J·N.
    pub characteristic: Vec<f64>,
    /// Horizontal vectors X_1..X_n followed by Y_k = J·X_k.
    pub horizontal: Vec<Vec<f64>>,
}

/// Builds the adapted frame from the horizontal complex basis.
pub fn frame(profile: &RadialProfile, q: &SurfacePoint) -> Result<Frame> {
    let normal = unit_normal(profile, q)?;
    let characteristic = apply_complex_structure(&normal);
    let basis = horizontal_complex_basis(profile, q)?;
    let n = basis.len();
    let mut horizontal = Vec::with_capacity(2 * n);
    for zeta in &basis {
        horizontal.push(complex_to_real(zeta));
    }
    for k in 0..n {
        horizontal.push(apply_complex_structure(&horizontal[k]));
    }
    Ok(Frame {
        normal,
        characteristic,
        horizontal,
    })
}

/// Mean curvature as the frame average Σ_e h(e,e)/(2n+1); an independent
/// route used for cross-checking.
pub fn mean_curvature_frame(profile: &RadialProfile, q: &SurfacePoint) -> Result<f64> {
    let fr = frame(profile, q)?;
    let mut acc = 0.0;
    for e in fr.horizontal.iter().chain(std::iter::once(&fr.characteristic)) {
        acc += second_fundamental_form(profile, q, e, e)?;
    }
    Ok(acc / (2 * profile.cr_dim() + 1) as f64)
}

/// g̃([X, Y], T) with Y = J·X, the bracket taken between the horizontal
/// extensions of X by finite differences of step `step`. The extension
/// projects the frozen vector onto the horizontal space of the level set
/// through each nearby point.
pub fn bracket_form(
    profile: &RadialProfile,
    q: &SurfacePoint,
    x: &[f64],
    step: f64,
) -> Result<f64> {
    let dim = profile.dim();
    let to_z = |v: &[f64]| -> Vec<Complex64> {
        (0..dim).map(|k| Complex64::new(v[k], v[dim + k])).collect()
    };
    let field_x = |at: &[f64]| -> Result<Vec<f64>> {
        let grad = profile.real_gradient(&to_z(at))?;
        let gnorm = norm(&grad);
        let n_at: Vec<f64> = grad.iter().map(|v| -v / gnorm).collect();
        let t_at = apply_complex_structure(&n_at);
        let cn = dot(x, &n_at);
        let ct = dot(x, &t_at);
        Ok(x.iter()
            .zip(n_at.iter().zip(&t_at))
            .map(|(xi, (ni, ti))| xi - cn * ni - ct * ti)
            .collect())
    };
    let field_y = |at: &[f64]| -> Result<Vec<f64>> { Ok(apply_complex_structure(&field_x(at)?)) };

    let p = q.real_coords();
    let x_p = field_x(&p)?;
    let y_p = field_y(&p)?;
    let shift = |base: &[f64], dir: &[f64], s: f64| -> Vec<f64> {
        base.iter().zip(dir).map(|(b, d)| b + s * d).collect()
    };
    let mut bracket = vec![0.0; 2 * dim];
    let dy_plus = field_y(&shift(&p, &x_p, step))?;
    let dy_minus = field_y(&shift(&p, &x_p, -step))?;
    let dx_plus = field_x(&shift(&p, &y_p, step))?;
    let dx_minus = field_x(&shift(&p, &y_p, -step))?;
    for i in 0..2 * dim {
        let d_x_y = (dy_plus[i] - dy_minus[i]) / (2.0 * step);
        let d_y_x = (dx_plus[i] - dx_minus[i]) / (2.0 * step);
        bracket[i] = d_x_y - d_y_x;
    }
    let t = characteristic_direction(profile, q)?;
    Ok(dot(&bracket, &t))
}

/// Residuals between the independent computation routes of one report.
#[derive(Debug, Clone, Serialize)]
pub struct RouteResiduals {
    /// |h_TT(radial) − h_TT(Hessian)|.
    pub h_tt_gap: f64,
    /// max_j |L^j(det) − L^j(eigenvalues)|.
    pub levi_gap_max: f64,
    /// |H(trace) − H(frame sum)|.
    pub mean_frame_gap: f64,
}

impl RouteResiduals {
    pub fn max(&self) -> f64 {
        self.h_tt_gap.max(self.levi_gap_max).max(self.mean_frame_gap)
    }
}

/// Every curvature quantity at one surface point plus cross-check residuals.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    #[serde(rename = "h_TT")]
    pub h_tt: f64,
    #[serde(rename = "h_TT_oracle")]
    pub h_tt_oracle: f64,
    pub levi_eigenvalues: Vec<f64>,
    pub levi_det: Vec<f64>,
    pub levi_sym: Vec<f64>,
    pub mean_curvature: f64,
    pub relation_residual: f64,
    #[serde(skip)]
    pub route_residuals: RouteResiduals,
}

impl CurvatureReport {
    /// Strict pseudoconvexity at this point: every Levi eigenvalue positive.
    pub fn strictly_pseudoconvex(&self) -> bool {
        self.levi_eigenvalues.iter().all(|&l| l > 0.0)
    }
}

/// Assembles the full curvature report at a surface point.
pub fn curvature_report(profile: &RadialProfile, q: &SurfacePoint) -> Result<CurvatureReport> {
    let n = profile.cr_dim();
    let h_tt = characteristic_curvature_radial(profile, q)?;
    let h_tt_oracle = characteristic_curvature_oracle(profile, q)?;
    let eigenvalues = levi_eigenvalues(profile, q)?;
    let levi_sym = linalg::normalized_elementary_symmetric(&eigenvalues);
    let levi_det: Vec<f64> = (1..=n)
        .map(|j| levi_curvature_det(profile, q, j))
        .collect::<Result<_>>()?;
    let mean = mean_curvature(profile, q)?;
    let mean_frame = mean_curvature_frame(profile, q)?;
    let two_n_plus_1 = (2 * n + 1) as f64;
    let relation_residual =
        (mean - (2.0 * n as f64 * levi_sym[0] + h_tt) / two_n_plus_1).abs();
    let levi_gap_max = levi_det
        .iter()
        .zip(&levi_sym)
        .map(|(d, s)| (d - s).abs())
        .fold(0.0, f64::max);
    Ok(CurvatureReport {
        h_tt,
        h_tt_oracle,
        levi_eigenvalues: eigenvalues,
        levi_det,
        levi_sym,
        mean_curvature: mean,
        relation_residual,
        route_residuals: RouteResiduals {
            h_tt_gap: (h_tt - h_tt_oracle).abs(),
            levi_gap_max,
            mean_frame_gap: (mean - mean_frame).abs(),
        },
    })
}

/// Header of the per-point scan CSV; kept in one place so writers and
/// readers share the contract.
pub fn scan_csv_header(dim: usize) -> String {
    let n = dim - 1;
    let mut cols = vec![
        "index".to_string(),
        "norm".to_string(),
        "h_TT".to_string(),
        "h_TT_oracle".to_string(),
        "mean_curvature".to_string(),
        "relation_residual".to_string(),
    ];
    cols.extend((1..=n).map(|j| format!("levi_eig_{j}")));
    cols.extend((1..=n).map(|j| format!("levi_sym_{j}")));
    cols.extend((1..=n).map(|j| format!("levi_det_{j}")));
    cols.extend((1..=dim).map(|k| format!("r_{k}")));
    cols.join(",")
}

/// One scan CSV row matching [`scan_csv_header`]; 17 significant digits.
pub fn scan_csv_row(index: usize, q: &SurfacePoint, report: &CurvatureReport) -> String {
    let mut fields = vec![
        index.to_string(),
        format!("{:.16e}", q.norm()),
        format!("{:.16e}", report.h_tt),
        format!("{:.16e}", report.h_tt_oracle),
        format!("{:.16e}", report.mean_curvature),
        format!("{:.16e}", report.relation_residual),
    ];
    fields.extend(report.levi_eigenvalues.iter().map(|v| format!("{v:.16e}")));
    fields.extend(report.levi_sym.iter().map(|v| format!("{v:.16e}")));
    fields.extend(report.levi_det.iter().map(|v| format!("{v:.16e}")));
    fields.extend(q.r.iter().map(|v| format!("{v:.16e}")));
    fields.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{eval_radii, rotate_phases};
    use crate::tol::Tolerances;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sphere_point(radius: f64, dim: usize) -> (RadialProfile, SurfacePoint) {
        let profile = RadialProfile::sphere(dim, radius).unwrap();
        let mut z = vec![c(0.0, 0.0); dim];
        z[0] = c(radius, 0.0);
        let q = profile.on_surface(&z, tol::SURFACE_TOL).unwrap();
        (profile, q)
    }

    #[test]
    fn normal_and_characteristic_on_the_sphere_pole() {
        let (profile, q) = sphere_point(1.0, 3);
        let n = unit_normal(&profile, &q).unwrap();
        assert!((n[0] + 1.0).abs() < 1e-14);
        assert!(n[1..].iter().all(|&v| v.abs() < 1e-14));
        let t = characteristic_direction(&profile, &q).unwrap();
        // T = (0,…,0 | −1, 0,…,0): the flow direction of the closed orbit.
        assert!((t[3] + 1.0).abs() < 1e-14);
        for (i, &v) in t.iter().enumerate() {
            if i != 3 {
                assert!(v.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn unit_normal_on_ellipsoid_axis_point() {
        let profile = RadialProfile::ellipsoid(&[1.0, 2.0]).unwrap();
        let q = profile
            .on_surface(&[c(0.0, 0.0), c(2.0, 0.0)], tol::SURFACE_TOL)
            .unwrap();
        let n = unit_normal(&profile, &q).unwrap();
        assert!((n[1] + 1.0).abs() < 1e-14);
        for (i, &v) in n.iter().enumerate() {
            if i != 1 {
                assert!(v.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn cylinder_report_has_flat_levi_direction() {
        // g = r_1 - R²: h_TT = 1/R, the single Levi eigenvalue vanishes,
        // and the mean curvature collapses to h_TT/(2n+1).
        let profile = RadialProfile::cylinder(2, 2.0, 0).unwrap();
        let q = profile
            .on_surface(&[c(2.0, 0.0), c(1.0, -4.0)], tol::SURFACE_TOL)
            .unwrap();
        let report = curvature_report(&profile, &q).unwrap();
        assert!((report.h_tt - 0.5).abs() < 1e-12);
        assert!(report.levi_sym[0].abs() < 1e-12);
        assert!(report.levi_det[0].abs() < 1e-12);
        assert!((report.mean_curvature - 0.5 / 3.0).abs() < 1e-12);
        assert!(report.relation_residual < 1e-12);
        assert!(!report.strictly_pseudoconvex());
    }

    #[test]
    fn levi_first_order_is_the_single_eigenvalue_when_n_is_one() {
        let profile = RadialProfile::ellipsoid(&[1.0, 2.0]).unwrap();
        let tols = Tolerances::default();
        for q in profile.sample_surface(5, 3, &tols).unwrap() {
            let eig = levi_eigenvalues(&profile, &q).unwrap();
            assert_eq!(eig.len(), 1);
            let l1 = levi_curvature_sym(&profile, &q, 1).unwrap();
            assert_eq!(l1, eig[0]);
        }
    }

    #[test]
    fn characteristic_matches_gradient_rotation_formula() {
        let profile = RadialProfile::ellipsoid(&[1.0, 2.0]).unwrap();
        let tols = Tolerances::default();
        for q in profile.sample_surface(10, 9, &tols).unwrap() {
            let grad = profile.real_gradient(&q.z).unwrap();
            let gnorm = norm(&grad);
            let t = characteristic_direction(&profile, &q).unwrap();
            let dim = profile.dim();
            for k in 0..dim {
                assert!((t[k] - grad[dim + k] / gnorm).abs() < 1e-13);
                assert!((t[dim + k] + grad[k] / gnorm).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn normal_points_inward_and_t_is_tangent() {
        let profile = RadialProfile::random_bounded_polynomial(3, 5);
        let tols = Tolerances::default();
        for q in profile.sample_surface(15, 2, &tols).unwrap() {
            let grad = profile.real_gradient(&q.z).unwrap();
            let n = unit_normal(&profile, &q).unwrap();
            assert!(dot(&n, &grad) < 0.0);
            assert!((norm(&n) - 1.0).abs() < 1e-14);
            let t = characteristic_direction(&profile, &q).unwrap();
            assert!((norm(&t) - 1.0).abs() < 1e-14);
            assert!(dot(&t, &n).abs() < 1e-14);
            assert!(dot(&t, &grad).abs() < 1e-12 * norm(&grad));
        }
    }

    #[test]
    fn second_fundamental_form_on_sphere_is_inverse_radius() {
        let (profile, q) = sphere_point(2.0, 2);
        let fr = frame(&profile, &q).unwrap();
        for e in fr.horizontal.iter().chain([&fr.characteristic]) {
            let h = second_fundamental_form(&profile, &q, e, e).unwrap();
            assert!((h - 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn second_fundamental_form_rejects_non_tangent_input() {
        let (profile, q) = sphere_point(1.0, 2);
        let n = unit_normal(&profile, &q).unwrap();
        let t = characteristic_direction(&profile, &q).unwrap();
        assert!(matches!(
            second_fundamental_form(&profile, &q, &n, &t),
            Err(Error::NonTangent { .. })
        ));
    }

    #[test]
    fn second_fundamental_form_is_symmetric() {
        let profile = RadialProfile::random_bounded_polynomial(2, 31);
        let tols = Tolerances::default();
        for q in profile.sample_surface(10, 4, &tols).unwrap() {
            let fr = frame(&profile, &q).unwrap();
            let v = &fr.horizontal[0];
            let w = &fr.characteristic;
            let hvw = second_fundamental_form(&profile, &q, v, w).unwrap();
            let hwv = second_fundamental_form(&profile, &q, w, v).unwrap();
            assert!((hvw - hwv).abs() < 1e-14 * (1.0 + hvw.abs()));
        }
    }

    #[test]
    fn characteristic_curvature_worked_examples() {
        for radius in [0.5, 1.0, 3.0] {
            let (profile, q) = sphere_point(radius, 2);
            let h = characteristic_curvature_radial(&profile, &q).unwrap();
            assert!((h - 1.0 / radius).abs() < 1e-12);
        }

        // Ellipsoid axis point: h(T,T) = 1/a_m.
        let profile = RadialProfile::ellipsoid(&[1.0, 2.0]).unwrap();
        let q = profile
            .on_surface(&[c(0.0, 0.0), c(2.0, 0.0)], tol::SURFACE_TOL)
            .unwrap();
        assert!((characteristic_curvature_radial(&profile, &q).unwrap() - 0.5).abs() < 1e-13);
        assert!((characteristic_curvature_oracle(&profile, &q).unwrap() - 0.5).abs() < 1e-10);

        // Cylinder: constant 1/R despite unboundedness.
        let profile = RadialProfile::cylinder(2, 2.0, 0).unwrap();
        let q = profile
            .on_surface(&[c(2.0, 0.0), c(5.0, -3.0)], tol::SURFACE_TOL)
            .unwrap();
        assert!((characteristic_curvature_radial(&profile, &q).unwrap() - 0.5).abs() < 1e-13);
    }

    #[test]
    fn ellipsoid_radial_formula_closed_form() {
        let a = [1.0, 2.0, 3.0];
        let profile = RadialProfile::ellipsoid(&a).unwrap();
        let tols = Tolerances::default();
        for q in profile.sample_surface(25, 8, &tols).unwrap() {
            let num: f64 = q.r.iter().zip(&a).map(|(rk, ak)| rk / ak.powi(6)).sum();
            let den: f64 = q.r.iter().zip(&a).map(|(rk, ak)| rk / ak.powi(4)).sum();
            let expected = num / den.powf(1.5);
            let h = characteristic_curvature_radial(&profile, &q).unwrap();
            assert!((h - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn horizontal_basis_annihilates_gradient_and_is_orthonormal() {
        let profile = RadialProfile::random_bounded_polynomial(4, 13);
        let tols = Tolerances::default();
        for q in profile.sample_surface(8, 6, &tols).unwrap() {
            let f = profile.complex_gradient(&q.z).unwrap();
            let basis = horizontal_complex_basis(&profile, &q).unwrap();
            assert_eq!(basis.len(), 3);
            for (j, zj) in basis.iter().enumerate() {
                let pairing: Complex64 = zj.iter().zip(&f).map(|(a, b)| a * b).sum();
                assert!(pairing.norm() < 1e-12);
                for (k, zk) in basis.iter().enumerate() {
                    let gram: Complex64 = zj.iter().zip(zk).map(|(a, b)| a * b.conj()).sum();
                    let expected = if j == k { 1.0 } else { 0.0 };
                    assert!((gram - c(expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn horizontal_basis_on_sphere_pole_excludes_first_axis() {
        let (profile, q) = sphere_point(1.5, 3);
        let basis = horizontal_complex_basis(&profile, &q).unwrap();
        for zeta in &basis {
            assert!(zeta[0].norm() < 1e-14);
        }
    }

    #[test]
    fn levi_matrix_on_sphere_is_inverse_radius_identity() {
        for radius in [0.5, 2.0] {
            let (profile, q) = sphere_point(radius, 3);
            let m = levi_form_matrix(&profile, &q).unwrap();
            for j in 0..2 {
                for k in 0..2 {
                    let expected = if j == k { 1.0 / radius } else { 0.0 };
                    assert!((m[j][k] - c(expected, 0.0)).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn levi_matrix_is_hermitian() {
        let profile = RadialProfile::random_bounded_polynomial(3, 19);
        let tols = Tolerances::default();
        for q in profile.sample_surface(10, 12, &tols).unwrap() {
            let m = levi_form_matrix(&profile, &q).unwrap();
            for j in 0..m.len() {
                for k in 0..m.len() {
                    assert!((m[j][k] - m[k][j].conj()).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn levi_quadratic_compares_with_second_fundamental_form() {
        // l(Z,Z) = h(X,X) + h(JX,JX) for Z = X − iJX; on a Hermitian-unit
        // basis vector the raw form is twice the matrix quadratic.
        let profile = RadialProfile::random_bounded_polynomial(3, 29);
        let tols = Tolerances::default();
        for q in profile.sample_surface(6, 21, &tols).unwrap() {
            let m = levi_form_matrix(&profile, &q).unwrap();
            let fr = frame(&profile, &q).unwrap();
            let n = profile.cr_dim();
            for j in 0..n {
                let x = &fr.horizontal[j];
                let y = &fr.horizontal[n + j];
                let hx = second_fundamental_form(&profile, &q, x, x).unwrap();
                let hy = second_fundamental_form(&profile, &q, y, y).unwrap();
                assert!(
                    (hx + hy - 2.0 * m[j][j].re).abs() < 1e-10,
                    "comparison identity broke: {} vs {}",
                    hx + hy,
                    2.0 * m[j][j].re
                );
            }
        }
    }

    #[test]
    fn bordered_determinant_sphere_value() {
        // Sphere in ℂ²: Δ_{(1,2)} = −(r_1 + r_2) and L^1 = 1/R.
        let (profile, q) = sphere_point(2.0, 2);
        let f_grad = profile.complex_gradient(&q.z).unwrap();
        let f_hess = profile.complex_hessian(&q.z).unwrap();
        let delta = bordered_determinant(&f_grad, &f_hess, &[0, 1]);
        assert!((delta - c(-4.0, 0.0)).norm() < 1e-13);
        let l1 = levi_curvature_det(&profile, &q, 1).unwrap();
        assert!((l1 - 0.5).abs() < 1e-13);
    }

    #[test]
    fn levi_curvatures_sphere_all_orders() {
        for radius in [0.5_f64, 1.0, 3.0] {
            for dim in [2usize, 3, 4] {
                let (profile, q) = sphere_point(radius, dim);
                for j in 1..=profile.cr_dim() {
                    let expected = radius.powi(-(j as i32));
                    let sym = levi_curvature_sym(&profile, &q, j).unwrap();
                    let det = levi_curvature_det(&profile, &q, j).unwrap();
                    assert!((sym - expected).abs() < 1e-10);
                    assert!((det - expected).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn levi_routes_agree_on_random_profiles() {
        let tols = Tolerances::default();
        for seed in [41u64, 42, 43] {
            let profile = RadialProfile::random_bounded_polynomial(3, seed);
            for q in profile.sample_surface(10, seed, &tols).unwrap() {
                for j in 1..=2 {
                    let sym = levi_curvature_sym(&profile, &q, j).unwrap();
                    let det = levi_curvature_det(&profile, &q, j).unwrap();
                    assert!((sym - det).abs() < 1e-8, "j={j}: {sym} vs {det}");
                }
            }
        }
    }

    #[test]
    fn bordered_determinant_depends_only_on_subset_radii() {
        // Randomize the radii and phases outside the subset; Δ must not move.
        let profile = RadialProfile::random_bounded_polynomial(3, 37);
        let tols = Tolerances::default();
        let q = &profile.sample_surface(1, 50, &tols).unwrap()[0];
        let f_grad = profile.complex_gradient(&q.z).unwrap();
        let f_hess = profile.complex_hessian(&q.z).unwrap();
        let subset = [0usize, 1];
        let base = bordered_determinant(&f_grad, &f_hess, &subset);
        for scale in [0.3, 1.7, 2.4] {
            let mut z = q.z.clone();
            z[2] = c(0.11, -0.47) * scale;
            let fg = profile.complex_gradient(&z).unwrap();
            let fh = profile.complex_hessian(&z).unwrap();
            let moved = bordered_determinant(&fg, &fh, &subset);
            assert!((moved - base).norm() < 1e-12 * (1.0 + base.norm()));
        }
    }

    #[test]
    fn mean_curvature_relation_holds() {
        let profiles = vec![
            RadialProfile::sphere(3, 1.0).unwrap(),
            RadialProfile::ellipsoid(&[1.0, 2.0]).unwrap(),
            RadialProfile::random_bounded_polynomial(4, 57),
        ];
        let tols = Tolerances::default();
        for profile in profiles {
            for q in profile.sample_surface(10, 33, &tols).unwrap() {
                let report = curvature_report(&profile, &q).unwrap();
                assert!(report.relation_residual < 1e-8);
                assert!(report.route_residuals.mean_frame_gap < 1e-10);
            }
        }
    }

    #[test]
    fn mean_curvature_on_sphere() {
        let (profile, q) = sphere_point(2.0, 3);
        assert!((mean_curvature(&profile, &q).unwrap() - 0.5).abs() < 1e-13);
    }

    #[test]
    fn mean_curvature_relation_two_sides_independently() {
        let profile = RadialProfile::ellipsoid(&[1.0, 2.0]).unwrap();
        let q = profile
            .on_surface(&[c(1.0, 0.0), c(0.0, 0.0)], tol::SURFACE_TOL)
            .unwrap();
        let h = mean_curvature(&profile, &q).unwrap();
        let l1 = levi_curvature_det(&profile, &q, 1).unwrap();
        let h_tt = characteristic_curvature_oracle(&profile, &q).unwrap();
        assert!((h - (2.0 * l1 + h_tt) / 3.0).abs() <= 1e-8);
    }

    #[test]
    fn curvature_report_sphere_and_axis_asymmetry() {
        let (profile, q) = sphere_point(1.0, 2);
        let report = curvature_report(&profile, &q).unwrap();
        assert!((report.h_tt - 1.0).abs() < 1e-10);
        assert!((report.levi_sym[0] - 1.0).abs() < 1e-10);
        assert!((report.mean_curvature - 1.0).abs() < 1e-10);
        assert!(report.route_residuals.max() < 1e-10);
        assert!(report.strictly_pseudoconvex());

        let profile = RadialProfile::ellipsoid(&[1.0, 2.0]).unwrap();
        let qa = profile
            .on_surface(&[c(1.0, 0.0), c(0.0, 0.0)], tol::SURFACE_TOL)
            .unwrap();
        let qb = profile
            .on_surface(&[c(0.0, 0.0), c(0.0, 2.0)], tol::SURFACE_TOL)
            .unwrap();
        let ha = curvature_report(&profile, &qa).unwrap().h_tt;
        let hb = curvature_report(&profile, &qb).unwrap().h_tt;
        assert!((ha - 1.0).abs() < 1e-10);
        assert!((hb - 0.5).abs() < 1e-10);
    }

    #[test]
    fn scalar_curvatures_are_phase_equivariant() {
        let profile = RadialProfile::random_bounded_polynomial(3, 71);
        let tols = Tolerances::default();
        let q = &profile.sample_surface(1, 77, &tols).unwrap()[0];
        let report = curvature_report(&profile, q).unwrap();
        let rotated = rotate_phases(&q.z, &[0.9, -1.7, 2.6]);
        let q_rot = profile.on_surface(&rotated, 1e-9).unwrap();
        let report_rot = curvature_report(&profile, &q_rot).unwrap();
        assert!((report.h_tt - report_rot.h_tt).abs() < 1e-10);
        assert!((report.mean_curvature - report_rot.mean_curvature).abs() < 1e-10);
        for j in 0..profile.cr_dim() {
            assert!((report.levi_sym[j] - report_rot.levi_sym[j]).abs() < 1e-10);
        }
        // Radii themselves stay put under rotation.
        let r0 = eval_radii(&q.z);
        let r1 = eval_radii(&rotated);
        for (a, b) in r0.iter().zip(&r1) {
            assert!((a - b).abs() < 1e-14 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn bracket_identity_on_sphere_and_random_profile() {
        let (profile, q) = sphere_point(1.0, 2);
        let fr = frame(&profile, &q).unwrap();
        let x = &fr.horizontal[0];
        let y = &fr.horizontal[1];
        let lhs = second_fundamental_form(&profile, &q, x, x).unwrap()
            + second_fundamental_form(&profile, &q, y, y).unwrap();
        let rhs = bracket_form(&profile, &q, x, 1e-5).unwrap();
        assert!((lhs - rhs).abs() < 1e-8, "sphere bracket gap {}", (lhs - rhs).abs());

        let tols = Tolerances::default();
        for (dim, seed) in [(2usize, 83u64), (3, 84)] {
            let profile = RadialProfile::random_bounded_polynomial(dim, seed);
            for q in profile.sample_surface(5, 15, &tols).unwrap() {
                let fr = frame(&profile, &q).unwrap();
                let n = profile.cr_dim();
                for j in 0..n {
                    let x = &fr.horizontal[j];
                    let y = &fr.horizontal[n + j];
                    let lhs = second_fundamental_form(&profile, &q, x, x).unwrap()
                        + second_fundamental_form(&profile, &q, y, y).unwrap();
                    let rhs = bracket_form(&profile, &q, x, 1e-5).unwrap();
                    assert!((lhs - rhs).abs() < 1e-6, "bracket gap {}", (lhs - rhs).abs());
                }
            }
        }
    }

    #[test]
    fn frame_is_orthonormal_and_adapted() {
        let profile = RadialProfile::ellipsoid(&[1.0, 2.0, 0.8]).unwrap();
        let tols = Tolerances::default();
        for q in profile.sample_surface(6, 25, &tols).unwrap() {
            let fr = frame(&profile, &q).unwrap();
            let grad = profile.real_gradient(&q.z).unwrap();
            let mut all = fr.horizontal.clone();
            all.push(fr.characteristic.clone());
            all.push(fr.normal.clone());
            for (i, u) in all.iter().enumerate() {
                for (j, v) in all.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(u, v) - expected).abs() < 1e-12);
                }
            }
            let n = profile.cr_dim();
            for k in 0..n {
                let jx = apply_complex_structure(&fr.horizontal[k]);
                for (a, b) in jx.iter().zip(&fr.horizontal[n + k]) {
                    assert!((a - b).abs() < 1e-14);
                }
                assert!(dot(&fr.horizontal[k], &grad).abs() < 1e-10 * norm(&grad));
            }
            let jn = apply_complex_structure(&fr.normal);
            for (a, b) in jn.iter().zip(&fr.characteristic) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pseudoconvexity_of_model_surfaces() {
        let tols = Tolerances::default();
        for profile in [
            RadialProfile::sphere(3, 1.0).unwrap(),
            RadialProfile::ellipsoid(&[1.0, 2.0, 3.0]).unwrap(),
        ] {
            for q in profile.sample_surface(10, 62, &tols).unwrap() {
                let eig = levi_eigenvalues(&profile, &q).unwrap();
                assert!(eig.iter().all(|&l| l > 0.0));
            }
        }
    }

    #[test]
    fn scan_csv_contract() {
        let header = scan_csv_header(2);
        assert_eq!(
            header,
            "index,norm,h_TT,h_TT_oracle,mean_curvature,relation_residual,levi_eig_1,levi_sym_1,levi_det_1,r_1,r_2"
        );
        let (profile, q) = sphere_point(1.0, 2);
        let report = curvature_report(&profile, &q).unwrap();
        let row = scan_csv_row(0, &q, &report);
        assert_eq!(row.split(',').count(), header.split(',').count());
    }
}
