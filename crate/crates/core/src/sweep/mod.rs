//! Grid evaluation over detunings, hopping and temperature.
//!
//! Axis values are in units of ω_d, except temperature which is in kelvin.

mod csv;

pub use csv::{emit_csv, parse_csv, Cell, CsvTable};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::steady_state;
use crate::error::{Error, Result};
use crate::exec::{par_map, Workers};
use crate::gaussian::{evaluate, Measure};
use crate::model::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxisParam {
    #[serde(rename = "delta_1")]
    Delta1,
    #[serde(rename = "delta_2")]
    Delta2,
    /// Common cavity detuning under symmetric or antisymmetric linkage.
    #[serde(rename = "delta_a")]
    DeltaA,
    #[serde(rename = "delta_e")]
    DeltaE,
    #[serde(rename = "delta_n_tilde")]
    DeltaNTilde,
    #[serde(rename = "J")]
    Hopping,
    #[serde(rename = "T")]
    Temperature,
}

impl AxisParam {
    pub const ALL: [AxisParam; 7] = [
        AxisParam::Delta1,
        AxisParam::Delta2,
        AxisParam::DeltaA,
        AxisParam::DeltaE,
        AxisParam::DeltaNTilde,
        AxisParam::Hopping,
        AxisParam::Temperature,
    ];

    pub fn id(self) -> &'static str {
        match self {
            AxisParam::Delta1 => "delta_1",
            AxisParam::Delta2 => "delta_2",
            AxisParam::DeltaA => "delta_a",
            AxisParam::DeltaE => "delta_e",
            AxisParam::DeltaNTilde => "delta_n_tilde",
            AxisParam::Hopping => "J",
            AxisParam::Temperature => "T",
        }
    }

    /// CSV column name, with the unit.
    pub fn column(self) -> String {
        match self {
            AxisParam::Temperature => "T_K".to_string(),
            other => format!("{}_wd", other.id()),
        }
    }
}

impl fmt::Display for AxisParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for AxisParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AxisParam::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::InvalidGrid(format!("unknown axis parameter `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(param: AxisParam, min: f64, max: f64, points: usize) -> Self {
        Axis {
            param,
            min,
            max,
            points,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|k| {
                if k == last {
                    self.max
                } else {
                    self.min + (self.max - self.min) * k as f64 / last as f64
                }
            })
            .collect()
    }
}

/// Sign relation between the two cavity detunings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    #[default]
    Independent,
    /// `Δ1 = Δ2 = Δa`.
    Symmetric,
    /// `-Δ1 = Δ2 = Δa`.
    Antisymmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub name: String,
    pub axes: Vec<Axis>,
    pub linkage: Linkage,
    pub base: SystemParams,
    pub measures: Vec<Measure>,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidGrid(format!(
                "expected 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        for (k, ax) in self.axes.iter().enumerate() {
            if ax.points < 2 {
                return Err(Error::InvalidGrid(format!("axis {} needs at least 2 points", ax.param)));
            }
            if !(ax.min < ax.max) || !ax.min.is_finite() || !ax.max.is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "axis {} needs finite min < max, got [{}, {}]",
                    ax.param, ax.min, ax.max
                )));
            }
            if ax.param == AxisParam::Temperature && ax.min < 0.0 {
                return Err(Error::InvalidGrid("temperature axis must be >= 0".into()));
            }
            if self.axes[..k].iter().any(|o| o.param == ax.param) {
                return Err(Error::InvalidGrid(format!("axis {} repeated", ax.param)));
            }
        }
        let has = |a: AxisParam| self.axes.iter().any(|ax| ax.param == a);
        match self.linkage {
            Linkage::Independent if has(AxisParam::DeltaA) => {
                return Err(Error::InvalidGrid(
                    "delta_a axis requires symmetric or antisymmetric linkage".into(),
                ))
            }
            Linkage::Symmetric | Linkage::Antisymmetric if has(AxisParam::Delta1) => {
                return Err(Error::InvalidGrid(
                    "delta_1 is fixed by the linkage; sweep delta_a instead".into(),
                ))
            }
            Linkage::Symmetric | Linkage::Antisymmetric if has(AxisParam::Delta2) && has(AxisParam::DeltaA) => {
                return Err(Error::InvalidGrid(
                    "delta_2 and delta_a both set the common detuning".into(),
                ))
            }
            _ => {}
        }
        self.base.validate()
    }

    pub fn num_points(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    /// Axis coordinates of every grid point, row-major (last axis fastest).
    pub fn coordinates(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = vec![vec![]];
        for ax in &self.axes {
            let vals = ax.values();
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    vals.iter().map(move |&v| {
                        let mut c = prefix.clone();
                        c.push(v);
                        c
                    })
                })
                .collect();
        }
        out
    }

    /// Parameters at one grid point, linkage applied.
    pub fn params_at(&self, base: &SystemParams, coords: &[f64]) -> SystemParams {
        let mut p = base.clone();
        p.omega_l = None;
        let wd = p.omega_d;
        for (ax, &v) in self.axes.iter().zip(coords) {
            match ax.param {
                AxisParam::Delta1 => p.delta_1 = v * wd,
                AxisParam::Delta2 | AxisParam::DeltaA => p.delta_2 = v * wd,
                AxisParam::DeltaE => p.delta_e = v * wd,
                AxisParam::DeltaNTilde => p.delta_n_tilde_override = Some(v * wd),
                AxisParam::Hopping => p.hopping = v * wd,
                AxisParam::Temperature => p.temperature = v,
            }
        }
        match self.linkage {
            Linkage::Independent => {}
            Linkage::Symmetric => p.delta_1 = p.delta_2,
            Linkage::Antisymmetric => p.delta_1 = -p.delta_2,
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    /// `None` when the point failed to evaluate.
    pub stable: Option<bool>,
    /// In units of ω_d.
    pub spectral_abscissa: Option<f64>,
    pub values: Vec<Option<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Constants {
    pub hbar: f64,
    pub k_b: f64,
    pub eps0: f64,
}

impl Default for Constants {
    fn default() -> Self {
        use crate::model::constants::*;
        Constants {
            hbar: HBAR,
            k_b: KB,
            eps0: EPS0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepMetadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub constants: Constants,
    pub grid: GridSpec,
    /// Effective magnon detuning applied at every point, when not swept (rad/s).
    pub delta_n_tilde: Option<f64>,
    pub failed_rows: Vec<(usize, String)>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn spec(&self) -> &GridSpec {
        &self.metadata.grid
    }

    /// Column index of a measure in each row's `values`.
    pub fn measure_index(&self, m: Measure) -> Option<usize> {
        self.spec().measures.iter().position(|&x| x == m)
    }
}

const PROGRESS_BLOCK: usize = 512;

pub fn run_grid(spec: &GridSpec, workers: Workers) -> Result<SweepResult> {
    spec.validate()?;

    let mut base = spec.base.clone();
    if base.delta_n_tilde_override.is_none() {
        let ss = steady_state(&base)?;
        base.delta_n_tilde_override = Some(ss.delta_n_tilde);
    }

    let coords = spec.coordinates();
    let total = coords.len();
    let mut rows = Vec::with_capacity(total);
    for (block_idx, block) in coords.chunks(PROGRESS_BLOCK).enumerate() {
        rows.extend(par_map(block, workers, |c| evaluate_row(spec, &base, c)));
        log::info!(
            "{}: {}/{} points",
            spec.name,
            (block_idx * PROGRESS_BLOCK + block.len()).min(total),
            total
        );
    }

    let failed_rows = rows
        .iter()
        .enumerate()
        .filter_map(|(k, r)| r.error.clone().map(|e| (k, e)))
        .collect();
    Ok(SweepResult {
        rows,
        metadata: SweepMetadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            constants: Constants::default(),
            grid: spec.clone(),
            delta_n_tilde: base.delta_n_tilde_override,
            failed_rows,
        },
    })
}

fn evaluate_row(spec: &GridSpec, base: &SystemParams, coords: &[f64]) -> SweepRow {
    let p = spec.params_at(base, coords);
    match evaluate(&p, &spec.measures) {
        Ok(v) => SweepRow {
            coords: coords.to_vec(),
            stable: Some(v.stability.stable),
            spectral_abscissa: Some(v.stability.spectral_abscissa / p.omega_d),
            values: v.values,
            error: None,
        },
        Err(e) => {
            log::warn!("{}: {e}", spec.name);
            SweepRow {
                coords: coords.to_vec(),
                stable: None,
                spectral_abscissa: None,
                values: vec![None; spec.measures.len()],
                error: Some(e.to_string()),
            }
        }
    }
}
