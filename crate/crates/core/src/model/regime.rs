use std::fmt;

use serde::Serialize;

use super::{single_atom_coupling, CouplingDerivation, SystemParams};
use crate::dynamics::SteadyState;

/// A violated approximation. Diagnostics only; evaluation proceeds regardless.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RegimeWarning {
    /// A bare mode frequency is not at least 100x the largest coupling or decay rate.
    RotatingWave {
        mode: &'static str,
        omega: f64,
        max_rate: f64,
    },
    /// Mechanical quality factor below 1000.
    LowQuality { q: f64 },
    /// Magnon population not small against `2 N_s ς`.
    HighExcitation { magnons: f64, limit: f64 },
    /// Mean amplitude too small to linearize around.
    SmallAmplitude { mode: &'static str, amplitude: f64 },
    /// Atom-cavity coupling too strong for the bosonic ensemble description.
    StrongAtomCoupling { ratio: f64, bound: f64 },
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeWarning::RotatingWave { mode, omega, max_rate } => write!(
                f,
                "rotating-wave approximation: {mode} = {omega:.3e} rad/s < 100 x {max_rate:.3e} rad/s"
            ),
            RegimeWarning::LowQuality { q } => write!(f, "mechanical quality factor Q = {q:.3e} < 1000"),
            RegimeWarning::HighExcitation { magnons, limit } => {
                write!(f, "magnon population {magnons:.3e} >= 1% of 2 N_s s = {limit:.3e}")
            }
            RegimeWarning::SmallAmplitude { mode, amplitude } => {
                write!(f, "steady-state amplitude |<{mode}>| = {amplitude:.3e} < 10")
            }
            RegimeWarning::StrongAtomCoupling { ratio, bound } => write!(
                f,
                "atom-cavity coupling g^2/(De^2+ge^2) = {ratio:.3e} >= |<a1>|^-2 = {bound:.3e}"
            ),
        }
    }
}

pub fn validate_regime(p: &SystemParams, ss: &SteadyState, cd: Option<&CouplingDerivation>) -> Vec<RegimeWarning> {
    let mut out = Vec::new();

    let max_rate = [p.g_na, p.kappa_a, p.kappa_n, p.gamma_e]
        .into_iter()
        .fold(0.0_f64, f64::max);
    for (mode, omega) in [
        ("omega_1", p.omega_c1),
        ("omega_2", p.omega_c2),
        ("omega_n", p.omega_n),
        ("omega_e", p.omega_e),
    ] {
        if omega < 100.0 * max_rate {
            out.push(RegimeWarning::RotatingWave { mode, omega, max_rate });
        }
    }

    let q = p.omega_d / p.gamma_d;
    if q < 1000.0 {
        out.push(RegimeWarning::LowQuality { q });
    }

    if let Some(cd) = cd {
        let magnons = ss.n.norm_sqr();
        let limit = 2.0 * cd.n_spins() * cd.spin_number;
        if magnons >= 0.01 * limit {
            out.push(RegimeWarning::HighExcitation { magnons, limit });
        }
    }

    for (mode, amplitude) in [("a1", ss.a1.norm()), ("n", ss.n.norm())] {
        if amplitude < 10.0 {
            out.push(RegimeWarning::SmallAmplitude { mode, amplitude });
        }
    }

    if let Some(cd) = cd {
        if let Ok(g) = single_atom_coupling(cd, p.omega_c1) {
            let ratio = g * g / (p.delta_e * p.delta_e + p.gamma_e * p.gamma_e);
            let bound = 1.0 / ss.a1.norm_sqr();
            if ratio >= bound {
                out.push(RegimeWarning::StrongAtomCoupling { ratio, bound });
            }
        }
    }

    out
}
