use nalgebra::DMatrix;
use serde::Serialize;

use super::covariance::{partial_transpose, reduce, CovarianceMatrix, Mode};
use crate::error::{Error, Result};

const PAIRING_TOLERANCE: f64 = 1e-6;

/// `⊕ iσ_y` over `m` modes: blocks `[[0, 1], [-1, 0]]`.
fn symplectic_form(m: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Symplectic spectrum, ascending: moduli of the eigenvalues of `iΘV`,
/// each of which appears twice.
pub fn symplectic_eigenvalues(v: &CovarianceMatrix) -> Result<Vec<f64>> {
    let n = v.entries.nrows();
    if !n.is_multiple_of(2) || n == 0 || v.entries.ncols() != n {
        return Err(Error::UnsupportedModeCount(n / 2, "an even-dimensional square matrix"));
    }
    let m = n / 2;
    let theta_v = symplectic_form(m) * &v.entries;
    if theta_v.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenSolver("non-finite covariance entries".into()));
    }
    let schur = nalgebra::Schur::try_new(theta_v, f64::EPSILON, 1000 * n)
        .ok_or_else(|| Error::EigenSolver("Schur iteration did not converge".into()))?;
    let mut moduli: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);

    let mut out = Vec::with_capacity(m);
    for pair in moduli.chunks_exact(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if hi - lo > PAIRING_TOLERANCE * hi.max(f64::MIN_POSITIVE) {
            return Err(Error::Pairing(format!("unpaired moduli {lo:e} and {hi:e}")));
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

fn negativity_from_min(f_min: f64) -> f64 {
    (-(2.0 * f_min).ln()).max(0.0)
}

/// Logarithmic negativity of a two-mode state, transposing its first mode.
pub fn log_negativity(v2: &CovarianceMatrix) -> Result<f64> {
    if v2.num_modes() != 2 {
        return Err(Error::UnsupportedModeCount(v2.num_modes(), "2"));
    }
    let vt = partial_transpose(v2, v2.mode_labels[0])?;
    Ok(negativity_from_min(symplectic_eigenvalues(&vt)?[0]))
}

/// Logarithmic negativity of the bipartition `singled | rest` of a three-mode state.
pub fn one_vs_two_negativity(v3: &CovarianceMatrix, singled: Mode) -> Result<f64> {
    if v3.num_modes() != 3 {
        return Err(Error::UnsupportedModeCount(v3.num_modes(), "3"));
    }
    let vt = partial_transpose(v3, singled)?;
    Ok(negativity_from_min(symplectic_eigenvalues(&vt)?[0]))
}

/// Residual contangles `R^{k|lm} = E²_{k|lm} - E²_{k|l} - E²_{k|m}` of a three-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualContangle {
    /// One entry per singled-out mode, in the state's mode order, before clamping.
    pub raw: [f64; 3],
    /// Same values clamped at zero.
    pub partitions: [f64; 3],
    pub min: f64,
}

pub fn residual_contangle(v3: &CovarianceMatrix) -> Result<ResidualContangle> {
    if v3.num_modes() != 3 {
        return Err(Error::UnsupportedModeCount(v3.num_modes(), "3"));
    }
    let modes = [v3.mode_labels[0], v3.mode_labels[1], v3.mode_labels[2]];
    let mut raw = [0.0; 3];
    for k in 0..3 {
        let (l, m) = match k {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let whole = one_vs_two_negativity(v3, modes[k])?;
        let with_l = log_negativity(&reduce(v3, &[modes[k], modes[l]])?)?;
        let with_m = log_negativity(&reduce(v3, &[modes[k], modes[m]])?)?;
        raw[k] = whole * whole - with_l * with_l - with_m * with_m;
    }
    let mut partitions = raw;
    for (k, r) in partitions.iter_mut().enumerate() {
        if *r < 0.0 {
            log::debug!("clamping residual contangle {}|rest = {:e} to 0", modes[k], *r);
            *r = 0.0;
        }
    }
    let min = partitions.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ResidualContangle { raw, partitions, min })
}
