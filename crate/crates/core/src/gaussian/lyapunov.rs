//! Steady-state covariance from `A V + V Aᵀ = -D`.
//!
//! Bartels-Stewart: reduce `A` to real Schur form `Q T Qᵀ`, back-substitute the
//! quasi-triangular equation block by block, and rotate back. A vectorized
//! Kronecker solve takes over if the Schur form is not cleanly quasi-triangular.

use nalgebra::{DMatrix, DVector};

use super::covariance::{CovarianceMatrix, Mode};
use crate::dynamics::{stability, DiffusionMatrix, DriftMatrix};
use crate::error::{Error, Result};

const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// `‖A V + V Aᵀ + D‖_F`.
pub fn lyapunov_residual(a: &DMatrix<f64>, v: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    (a * v + v * a.transpose() + d).norm()
}

/// Solves the five-mode steady state. The drift matrix must be stable.
pub fn lyapunov_solve(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<CovarianceMatrix> {
    let verdict = stability(a)?;
    if !verdict.stable {
        return Err(Error::Unstable(verdict.spectral_abscissa));
    }
    let a_dyn = DMatrix::from_iterator(10, 10, a.entries.iter().copied());
    let d_dyn = DMatrix::from_iterator(10, 10, d.to_matrix().iter().copied());
    let v = solve_continuous_lyapunov(&a_dyn, &d_dyn)?;
    CovarianceMatrix::new(v, Mode::ALL.to_vec())
}

/// Solves `A X + X Aᵀ + D = 0` for square `A` and symmetric `D`, returning the
/// symmetrized solution. Fails when the residual bound
/// `‖A X + X Aᵀ + D‖_F ≤ 1e-8 max(1, ‖D‖_F)` cannot be met.
pub fn solve_continuous_lyapunov(a: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || d.nrows() != n || d.ncols() != n {
        return Err(Error::SolverBreakdown(format!(
            "shape mismatch: A {}x{}, D {}x{}",
            a.nrows(),
            a.ncols(),
            d.nrows(),
            d.ncols()
        )));
    }
    let bound = RESIDUAL_TOLERANCE * d.norm().max(1.0);

    let attempt = bartels_stewart(a, d).map(symmetrized);
    if let Ok(v) = &attempt {
        if lyapunov_residual(a, v, d) <= bound {
            return Ok(v.clone());
        }
    }
    match &attempt {
        Ok(_) => log::debug!("Schur back-substitution missed residual bound; using Kronecker solve"),
        Err(e) => log::debug!("Schur back-substitution failed ({e}); using Kronecker solve"),
    }
    let v = symmetrized(kronecker_solve(a, d)?);
    let r = lyapunov_residual(a, &v, d);
    if r <= bound {
        Ok(v)
    } else {
        Err(Error::SolverBreakdown(format!(
            "residual {r:e} exceeds bound {bound:e}"
        )))
    }
}

fn symmetrized(v: DMatrix<f64>) -> DMatrix<f64> {
    (&v + v.transpose()) * 0.5
}

/// Diagonal block partition of a quasi-upper-triangular matrix.
fn schur_blocks(t: &DMatrix<f64>) -> Result<Vec<(usize, usize)>> {
    let n = t.nrows();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        let size = if i + 1 < n && t[(i + 1, i)] != 0.0 { 2 } else { 1 };
        if size == 2 && i + 2 < n && t[(i + 2, i + 1)] != 0.0 {
            return Err(Error::SolverBreakdown("Schur form is not quasi-triangular".into()));
        }
        blocks.push((i, size));
        i += size;
    }
    Ok(blocks)
}

fn bartels_stewart(a: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let schur = nalgebra::Schur::try_new(a.clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::EigenSolver("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let blocks = schur_blocks(&t)?;

    let c = -(q.transpose() * d * &q);
    let mut y = DMatrix::<f64>::zeros(n, n);

    for &(i0, p) in blocks.iter().rev() {
        for &(j0, s) in blocks.iter().rev() {
            let mut rhs = c.view((i0, j0), (p, s)).into_owned();
            if i0 + p < n {
                rhs -= t.view((i0, i0 + p), (p, n - i0 - p)) * y.view((i0 + p, j0), (n - i0 - p, s));
            }
            if j0 + s < n {
                rhs -= y.view((i0, j0 + s), (p, n - j0 - s)) * t.view((j0, j0 + s), (s, n - j0 - s)).transpose();
            }
            let tii = t.view((i0, i0), (p, p));
            let tjj = t.view((j0, j0), (s, s));
            // (I_s ⊗ T_ii + T_jj ⊗ I_p) vec(Y_ij) = vec(rhs), column-major.
            let k = p * s;
            let mut m = DMatrix::<f64>::zeros(k, k);
            for col in 0..s {
                for r in 0..p {
                    for r2 in 0..p {
                        m[(col * p + r, col * p + r2)] += tii[(r, r2)];
                    }
                    for col2 in 0..s {
                        m[(col * p + r, col2 * p + r)] += tjj[(col, col2)];
                    }
                }
            }
            let b = DVector::from_iterator(k, rhs.iter().copied());
            let sol = m
                .lu()
                .solve(&b)
                .ok_or_else(|| Error::SolverBreakdown(format!("singular {k}x{k} block at ({i0},{j0})")))?;
            for col in 0..s {
                for r in 0..p {
                    y[(i0 + r, j0 + col)] = sol[col * p + r];
                }
            }
        }
    }
    Ok(&q * y * q.transpose())
}

/// Solves `(I ⊗ A + A ⊗ I) vec(X) = -vec(D)` directly.
pub fn kronecker_solve(a: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let nn = n * n;
    let mut m = DMatrix::<f64>::zeros(nn, nn);
    for j in 0..n {
        for i in 0..n {
            let row = j * n + i;
            for k in 0..n {
                m[(row, j * n + k)] += a[(i, k)];
                m[(row, k * n + i)] += a[(j, k)];
            }
        }
    }
    let b = -DVector::from_iterator(nn, d.iter().copied());
    let x = m
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::SolverBreakdown("singular Kronecker system".into()))?;
    Ok(DMatrix::from_iterator(n, n, x.iter().copied()))
}
