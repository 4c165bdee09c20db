use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::covariance::{reduce, CovarianceMatrix, Mode};
use super::lyapunov::lyapunov_solve;
use super::negativity::{log_negativity, residual_contangle, ResidualContangle};
use crate::dynamics::{diffusion_matrix, drift_matrix, stability, steady_state, StabilityVerdict, SteadyState};
use crate::error::{Error, Result};
use crate::model::SystemParams;

/// The fixed vocabulary of reportable entanglement measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "EN_a1a2")]
    EnA1A2,
    #[serde(rename = "EN_a1e")]
    EnA1E,
    #[serde(rename = "EN_a1n")]
    EnA1N,
    #[serde(rename = "EN_a1d")]
    EnA1D,
    #[serde(rename = "EN_a2e")]
    EnA2E,
    #[serde(rename = "EN_a2n")]
    EnA2N,
    #[serde(rename = "EN_a2d")]
    EnA2D,
    #[serde(rename = "EN_ne")]
    EnNE,
    #[serde(rename = "EN_de")]
    EnDE,
    #[serde(rename = "EN_nd")]
    EnND,
    #[serde(rename = "R_a1nd")]
    RA1ND,
    #[serde(rename = "R_nde")]
    RNDE,
}

impl Measure {
    pub const ALL: [Measure; 12] = [
        Measure::EnA1A2,
        Measure::EnA1E,
        Measure::EnA1N,
        Measure::EnA1D,
        Measure::EnA2E,
        Measure::EnA2N,
        Measure::EnA2D,
        Measure::EnNE,
        Measure::EnDE,
        Measure::EnND,
        Measure::RA1ND,
        Measure::RNDE,
    ];

    pub const BIPARTITE: [Measure; 10] = [
        Measure::EnA1A2,
        Measure::EnA1E,
        Measure::EnA1N,
        Measure::EnA1D,
        Measure::EnA2E,
        Measure::EnA2N,
        Measure::EnA2D,
        Measure::EnNE,
        Measure::EnDE,
        Measure::EnND,
    ];

    pub const TRIPARTITE: [Measure; 2] = [Measure::RA1ND, Measure::RNDE];

    pub fn id(self) -> &'static str {
        match self {
            Measure::EnA1A2 => "EN_a1a2",
            Measure::EnA1E => "EN_a1e",
            Measure::EnA1N => "EN_a1n",
            Measure::EnA1D => "EN_a1d",
            Measure::EnA2E => "EN_a2e",
            Measure::EnA2N => "EN_a2n",
            Measure::EnA2D => "EN_a2d",
            Measure::EnNE => "EN_ne",
            Measure::EnDE => "EN_de",
            Measure::EnND => "EN_nd",
            Measure::RA1ND => "R_a1nd",
            Measure::RNDE => "R_nde",
        }
    }

    pub fn modes(self) -> &'static [Mode] {
        use Mode::*;
        match self {
            Measure::EnA1A2 => &[Cavity1, Cavity2],
            Measure::EnA1E => &[Cavity1, Ensemble],
            Measure::EnA1N => &[Cavity1, Magnon],
            Measure::EnA1D => &[Cavity1, Phonon],
            Measure::EnA2E => &[Cavity2, Ensemble],
            Measure::EnA2N => &[Cavity2, Magnon],
            Measure::EnA2D => &[Cavity2, Phonon],
            Measure::EnNE => &[Magnon, Ensemble],
            Measure::EnDE => &[Phonon, Ensemble],
            Measure::EnND => &[Magnon, Phonon],
            Measure::RA1ND => &[Cavity1, Magnon, Phonon],
            Measure::RNDE => &[Magnon, Phonon, Ensemble],
        }
    }

    pub fn is_tripartite(self) -> bool {
        self.modes().len() == 3
    }

    /// True when the pair sits on opposite sides of the cavity-cavity link.
    pub fn crosses_cavities(self) -> bool {
        let side = |m: Mode| matches!(m, Mode::Cavity1 | Mode::Ensemble);
        let modes = self.modes();
        modes.len() == 2 && side(modes[0]) != side(modes[1])
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::UnknownMeasure(s.to_string()))
    }
}

/// Value of one measure on the full five-mode covariance.
pub fn measure_value(v: &CovarianceMatrix, measure: Measure) -> Result<f64> {
    let sub = reduce(v, measure.modes())?;
    if measure.is_tripartite() {
        Ok(residual_contangle(&sub)?.min)
    } else {
        log_negativity(&sub)
    }
}

/// Linearized solution at one parameter point.
#[derive(Debug, Clone)]
pub struct PointSolution {
    pub steady_state: SteadyState,
    pub stability: StabilityVerdict,
    /// Present only for stable points.
    pub covariance: Option<CovarianceMatrix>,
}

fn point_context(p: &SystemParams) -> String {
    let wd = p.omega_d;
    format!(
        "D1={:.6} D2={:.6} Dn~={} De={:.6} J={:.6} T={} K (units of wd)",
        p.delta_1 / wd,
        p.delta_2 / wd,
        p.delta_n_tilde_override
            .map_or("self-consistent".to_string(), |d| format!("{:.6}", d / wd)),
        p.delta_e / wd,
        p.hopping / wd,
        p.temperature
    )
}

fn with_context<T>(p: &SystemParams, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::AtPoint {
        context: point_context(p),
        source: Box::new(e),
    })
}

pub fn solve_point(p: &SystemParams) -> Result<PointSolution> {
    with_context(p, solve_point_inner(p))
}

fn solve_point_inner(p: &SystemParams) -> Result<PointSolution> {
    let ss = steady_state(p)?;
    let a = drift_matrix(p, &ss);
    let verdict = stability(&a)?;
    let covariance = if verdict.stable {
        Some(lyapunov_solve(&a, &diffusion_matrix(p)?)?)
    } else {
        None
    };
    Ok(PointSolution {
        steady_state: ss,
        stability: verdict,
        covariance,
    })
}

/// Requested measures at one point; `None` entries mark an unstable point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointValues {
    pub stability: StabilityVerdict,
    pub values: Vec<Option<f64>>,
}

pub fn evaluate(p: &SystemParams, measures: &[Measure]) -> Result<PointValues> {
    let sol = solve_point(p)?;
    let values = match &sol.covariance {
        Some(v) => with_context(
            p,
            measures
                .iter()
                .map(|&m| measure_value(v, m).map(Some))
                .collect::<Result<Vec<_>>>(),
        )?,
        None => vec![None; measures.len()],
    };
    Ok(PointValues {
        stability: sol.stability,
        values,
    })
}

/// All bipartite negativities and both tripartite residual contangles at one point.
#[derive(Debug, Clone, Serialize)]
pub struct EntanglementReport {
    pub stable: bool,
    pub stability: StabilityVerdict,
    pub steady_state: SteadyState,
    /// Empty when unstable.
    pub bipartite: BTreeMap<Measure, f64>,
    /// Empty when unstable.
    pub tripartite: BTreeMap<Measure, ResidualContangle>,
    #[serde(skip)]
    pub covariance: Option<CovarianceMatrix>,
}

impl EntanglementReport {
    pub fn value(&self, measure: Measure) -> Option<f64> {
        if measure.is_tripartite() {
            self.tripartite.get(&measure).map(|r| r.min)
        } else {
            self.bipartite.get(&measure).copied()
        }
    }
}

pub fn full_report(p: &SystemParams) -> Result<EntanglementReport> {
    let sol = solve_point(p)?;
    let mut bipartite = BTreeMap::new();
    let mut tripartite = BTreeMap::new();
    if let Some(v) = &sol.covariance {
        with_context(
            p,
            (|| {
                for m in Measure::BIPARTITE {
                    bipartite.insert(m, measure_value(v, m)?);
                }
                for m in Measure::TRIPARTITE {
                    tripartite.insert(m, residual_contangle(&reduce(v, m.modes())?)?);
                }
                Ok(())
            })(),
        )?;
    }
    Ok(EntanglementReport {
        stable: sol.stability.stable,
        stability: sol.stability,
        steady_state: sol.steady_state,
        bipartite,
        tripartite,
        covariance: sol.covariance,
    })
}
