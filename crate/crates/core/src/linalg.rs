//! Small dense linear algebra: complex LU determinants, Hermitian eigenvalues
//! by cyclic Jacobi rotations, and a pivoted real solver.
//!
//! Matrix sizes here are tied to the ambient complex dimension (a handful),
//! so everything is written for clarity and accuracy rather than blocking.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Determinant of a square complex matrix by LU with partial pivoting.
pub fn complex_det(matrix: &[Vec<Complex64>]) -> Complex64 {
    let n = matrix.len();
    debug_assert!(matrix.iter().all(|row| row.len() == n));
    let mut a: Vec<Vec<Complex64>> = matrix.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .norm_sqr()
                    .partial_cmp(&a[j][col].norm_sqr())
                    .unwrap()
            })
            .unwrap();
        if a[pivot_row][col].norm_sqr() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            det = -det;
        }
        let pivot = a[col][col];
        det *= pivot;
        for row in col + 1..n {
            let factor = a[row][col] / pivot;
            for k in col..n {
                let sub = factor * a[col][k];
                a[row][k] -= sub;
            }
        }
    }
    det
}

/// Eigenvalues of a Hermitian matrix, sorted descending, by cyclic Jacobi
/// iterations. Each rotation first removes the phase of the off-diagonal
/// entry, then applies the classical symmetric Schur rotation.
pub fn hermitian_eigenvalues(matrix: &[Vec<Complex64>]) -> Result<Vec<f64>> {
    let n = matrix.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a: Vec<Vec<Complex64>> = matrix.to_vec();
    let frob: f64 = a
        .iter()
        .flat_map(|row| row.iter().map(|v| v.norm_sqr()))
        .sum::<f64>()
        .sqrt();
    let target = 1e-15 * (1.0 + frob);

    let mut converged = false;
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| 2.0 * a[p][q].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                // Golub–Van Loan symmetric Schur rotation on the de-phased block.
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Unitary U: U[p][p]=c, U[p][q]=s, U[q][p]=-conj(phase)*s, U[q][q]=conj(phase)*c.
                let upp = Complex64::new(c, 0.0);
                let upq = Complex64::new(s, 0.0);
                let uqp = -phase.conj() * s;
                let uqq = phase.conj() * c;

                // A <- U^H A U restricted to rows/columns p and q.
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = aip * upp + aiq * uqp;
                    a[i][q] = aip * upq + aiq * uqq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = upp.conj() * apk + uqp.conj() * aqk;
                    a[q][k] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[p][q] = Complex64::new(0.0, 0.0);
                a[q][p] = Complex64::new(0.0, 0.0);
            }
        }
    }
    if !converged {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| 2.0 * a[p][q].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off > 1e-10 * (1.0 + frob) {
            return Err(Error::NoConvergence {
                iters: 60,
                context: format!("Jacobi sweeps left off-diagonal norm {off:.3e}"),
            });
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    eig.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(eig)
}

/// Solves a small dense real system by LU with partial pivoting.
pub fn real_solve(matrix: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = matrix.len();
    debug_assert_eq!(rhs.len(), n);
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut b: Vec<f64> = rhs.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        let scale: f64 = a[col].iter().map(|v| v.abs()).fold(0.0, f64::max);
        if a[pivot_row][col].abs() <= 1e-14 * (1.0 + scale) {
            return Err(Error::Domain("singular linear system".into()));
        }
        a.swap(pivot_row, col);
        b.swap(pivot_row, col);
        let pivot = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / pivot;
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Normalized elementary symmetric functions e_j(λ)/C(n,j) for j = 1..n.
pub fn normalized_elementary_symmetric(eigenvalues: &[f64]) -> Vec<f64> {
    let n = eigenvalues.len();
    // e[j] accumulates the j-th elementary symmetric polynomial.
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for &lambda in eigenvalues {
        for j in (1..=n).rev() {
            e[j] += lambda * e[j - 1];
        }
    }
    (1..=n).map(|j| e[j] / binomial(n, j)).collect()
}

/// Binomial coefficient as f64; arguments stay single-digit here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}
