//! Mean-field steady state, linearized drift and diffusion matrices, and stability.
//!
//! Fluctuation quadratures are ordered `(U1, W1, U2, W2, u1, w1, x, y, u2, w2)`:
//! cavity 1, cavity 2, magnon, phonon, ensemble. Each pair is `(δa + δa†)/√2`,
//! `i(δa† - δa)/√2`; the phonon carries its dimensionless position and momentum.

use nalgebra::{DMatrix, SMatrix, SVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{SystemParams, ThermalOccupations};

pub type Mat10 = SMatrix<f64, 10, 10>;

const SINGULAR_DENOMINATOR: f64 = 1e-30;
const MIXING: f64 = 0.5;
const MAX_ITERATIONS: usize = 10_000;
const STEP_TOLERANCE: f64 = 1e-12;
const STABILITY_EPS: f64 = 1e-9;

/// Complex mean amplitudes of the five modes and the effective magnon detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    #[serde(serialize_with = "ser_complex")]
    pub a1: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub a2: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub e: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub n: Complex64,
    pub x_mean: f64,
    pub y_mean: f64,
    /// Effective magnon detuning (rad/s).
    pub delta_n_tilde: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

struct Amplitudes {
    a1: Complex64,
    a2: Complex64,
    e: Complex64,
    n: Complex64,
}

/// Closed-form amplitudes at a fixed effective magnon detuning.
///
/// All rates are scaled by `ω_d` so the singularity threshold is dimensionless.
fn amplitudes_at(p: &SystemParams, dn_tilde: f64) -> Result<Amplitudes> {
    let s = 1.0 / p.omega_d;
    let i = Complex64::i();
    let c = |re: f64, im: f64| Complex64::new(re * s, im * s);

    let cav1 = c(p.kappa_a, p.delta_1);
    let cav2 = c(p.kappa_a, p.delta_2);
    let mag = c(p.kappa_n, dn_tilde);
    let ens = c(p.gamma_e, p.delta_e);
    let (g_na, g_ae, j) = (p.g_na * s, p.g_ae * s, p.hopping * s);
    let (om_l, om_n) = (p.drive_cavity * s, p.drive_magnon * s);

    let cav2_mag = cav2 * mag + g_na * g_na;
    let denom = cav1 * ens * cav2_mag + g_ae * g_ae * cav2_mag + j * j * ens * mag;
    for d in [denom, cav2_mag, ens, mag] {
        if d.norm() < SINGULAR_DENOMINATOR {
            return Err(Error::SingularDenominator(d.norm()));
        }
    }

    let a1 = (om_l * cav2 * mag * ens + g_na * g_na * om_l * ens - g_na * om_n * j * ens) / denom;
    let a2 = (-i * j * mag * a1 - i * g_na * om_n) / cav2_mag;
    let e = -i * g_ae * a1 / ens;
    let n = (om_n - i * g_na * a2) / mag;
    Ok(Amplitudes { a1, a2, e, n })
}

/// Steady-state mean fields.
///
/// With `delta_n_tilde_override` set the amplitudes are evaluated once at that
/// detuning. Otherwise the magnetostrictive shift is solved self-consistently by
/// damped fixed-point iteration on `Δ̃n ← Δn + g_nd <x>`.
pub fn steady_state(p: &SystemParams) -> Result<SteadyState> {
    p.validate()?;
    let x_of = |n: Complex64| -(p.g_nd / p.omega_d) * n.norm_sqr();

    if let Some(dn_tilde) = p.delta_n_tilde_override {
        let amp = amplitudes_at(p, dn_tilde)?;
        return Ok(SteadyState {
            a1: amp.a1,
            a2: amp.a2,
            e: amp.e,
            n: amp.n,
            x_mean: x_of(amp.n),
            y_mean: 0.0,
            delta_n_tilde: dn_tilde,
            converged: true,
            iterations: 0,
        });
    }

    let tol = STEP_TOLERANCE * p.omega_d;
    let mut dn_tilde = p.delta_n;
    let mut last_step = f64::INFINITY;
    for iteration in 1..=MAX_ITERATIONS {
        let amp = amplitudes_at(p, dn_tilde)?;
        let target = p.delta_n + p.g_nd * x_of(amp.n);
        let step = target - dn_tilde;
        if step.abs() < tol {
            let amp = amplitudes_at(p, target)?;
            return Ok(SteadyState {
                a1: amp.a1,
                a2: amp.a2,
                e: amp.e,
                n: amp.n,
                x_mean: x_of(amp.n),
                y_mean: 0.0,
                delta_n_tilde: target,
                converged: true,
                iterations: iteration,
            });
        }
        last_step = step.abs();
        dn_tilde += MIXING * step;
    }
    Err(Error::NonConvergent {
        iterations: MAX_ITERATIONS,
        last_step,
    })
}

/// Drift matrix of the linearized quadrature fluctuations.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    pub entries: Mat10,
    /// Mechanical frequency, the scale for the stability threshold.
    pub omega_d: f64,
}

impl DriftMatrix {
    pub fn from_entries(entries: Mat10, omega_d: f64) -> Self {
        DriftMatrix { entries, omega_d }
    }
}

pub fn drift_matrix(p: &SystemParams, ss: &SteadyState) -> DriftMatrix {
    let (ka, kn, ge, gd) = (p.kappa_a, p.kappa_n, p.gamma_e, p.gamma_d);
    let (d1, d2, dn, de) = (p.delta_1, p.delta_2, ss.delta_n_tilde, p.delta_e);
    let (j, g_ae, g_na, g_nd, wd) = (p.hopping, p.g_ae, p.g_na, p.g_nd_eff, p.omega_d);

    let mut a = Mat10::zeros();
    // cavity 1
    a[(0, 0)] = -ka;
    a[(0, 1)] = d1;
    a[(0, 3)] = j;
    a[(0, 9)] = g_ae;
    a[(1, 0)] = -d1;
    a[(1, 1)] = -ka;
    a[(1, 2)] = -j;
    a[(1, 8)] = -g_ae;
    // cavity 2
    a[(2, 1)] = j;
    a[(2, 2)] = -ka;
    a[(2, 3)] = d2;
    a[(2, 5)] = g_na;
    a[(3, 0)] = -j;
    a[(3, 2)] = -d2;
    a[(3, 3)] = -ka;
    a[(3, 4)] = -g_na;
    // magnon
    a[(4, 3)] = g_na;
    a[(4, 4)] = -kn;
    a[(4, 5)] = dn;
    a[(4, 6)] = -g_nd;
    a[(5, 2)] = -g_na;
    a[(5, 4)] = -dn;
    a[(5, 5)] = -kn;
    // phonon
    a[(6, 7)] = wd;
    a[(7, 5)] = g_nd;
    a[(7, 6)] = -wd;
    a[(7, 7)] = -gd;
    // ensemble
    a[(8, 1)] = g_ae;
    a[(8, 8)] = -ge;
    a[(8, 9)] = de;
    a[(9, 0)] = -g_ae;
    a[(9, 8)] = -de;
    a[(9, 9)] = -ge;

    DriftMatrix {
        entries: a,
        omega_d: wd,
    }
}

/// Diagonal noise-strength matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionMatrix {
    pub diagonal: SVector<f64, 10>,
}

impl DiffusionMatrix {
    pub fn from_diagonal(diagonal: SVector<f64, 10>) -> Self {
        DiffusionMatrix { diagonal }
    }

    pub fn to_matrix(&self) -> Mat10 {
        Mat10::from_diagonal(&self.diagonal)
    }
}

/// The ensemble rows carry `γe` without a thermal factor and the phonon
/// position row carries no noise.
pub fn diffusion_matrix(p: &SystemParams) -> Result<DiffusionMatrix> {
    let z = ThermalOccupations::of(p)?;
    let d = SVector::<f64, 10>::from([
        p.kappa_a * (2.0 * z.z_a1 + 1.0),
        p.kappa_a * (2.0 * z.z_a1 + 1.0),
        p.kappa_a * (2.0 * z.z_a2 + 1.0),
        p.kappa_a * (2.0 * z.z_a2 + 1.0),
        p.kappa_n * (2.0 * z.z_n + 1.0),
        p.kappa_n * (2.0 * z.z_n + 1.0),
        0.0,
        p.gamma_d * (2.0 * z.z_d + 1.0),
        p.gamma_e,
        p.gamma_e,
    ]);
    Ok(DiffusionMatrix { diagonal: d })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    /// Largest real part of the drift spectrum (rad/s).
    pub spectral_abscissa: f64,
    /// Distance below the stability threshold (rad/s); positive when stable.
    pub margin: f64,
}

/// Complex spectrum of a real square matrix via the real Schur form.
pub(crate) fn spectrum(m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenSolver("non-finite matrix entries".into()));
    }
    let n = m.nrows();
    let schur = nalgebra::Schur::try_new(m, f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::EigenSolver(format!("{n}x{n} Schur iteration did not converge")))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Stable iff every eigenvalue has real part below `-1e-9 ω_d`.
pub fn stability(a: &DriftMatrix) -> Result<StabilityVerdict> {
    let abscissa = spectrum(DMatrix::from_column_slice(10, 10, a.entries.as_slice()))?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let threshold = -STABILITY_EPS * a.omega_d;
    Ok(StabilityVerdict {
        stable: abscissa < threshold,
        spectral_abscissa: abscissa,
        margin: threshold - abscissa,
    })
}

/// Whitespace-separated numeric grid, one matrix row per line.
pub fn matrix_to_text<const N: usize>(m: &SMatrix<f64, N, N>) -> String {
    let mut out = String::new();
    for r in 0..N {
        let row: Vec<String> = (0..N).map(|c| format!("{:.12e}", m[(r, c)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
