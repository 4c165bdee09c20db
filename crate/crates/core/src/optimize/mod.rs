//! Seeded multi-restart direct search over `(Δ1, Δ2, Δ̃n, Δe, J)` and
//! critical-temperature search.

mod simplex;

pub use simplex::{minimize, SimplexRun};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{par_map, Workers};
use crate::gaussian::{evaluate, Measure};
use crate::model::SystemParams;

/// Coordinate names of the search vector, all in units of ω_d.
pub const COORDINATES: [&str; 5] = ["delta_1", "delta_2", "delta_n_tilde", "delta_e", "J"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSpec {
    pub measure: Measure,
    /// `(min, max)` per coordinate, in the order of [`COORDINATES`]. A collapsed
    /// interval pins that coordinate.
    pub bounds: [(f64, f64); 5],
    pub restarts: usize,
    pub max_evaluations: usize,
    pub seed: u64,
}

impl OptimizeSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, &(lo, hi)) in COORDINATES.iter().zip(&self.bounds) {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::invalid(name, format!("bad bounds [{lo}, {hi}]")));
            }
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts", "must be >= 1"));
        }
        if self.max_evaluations < self.restarts {
            return Err(Error::invalid("max_evaluations", "must be >= restarts"));
        }
        Ok(())
    }

    fn free_axes(&self) -> Vec<usize> {
        (0..5).filter(|&i| self.bounds[i].1 > self.bounds[i].0).collect()
    }

    fn point_from_unit(&self, free: &[usize], u: &[f64]) -> [f64; 5] {
        let mut x: [f64; 5] = std::array::from_fn(|i| self.bounds[i].0);
        for (&axis, &t) in free.iter().zip(u) {
            let (lo, hi) = self.bounds[axis];
            x[axis] = if t >= 1.0 { hi } else { lo + (hi - lo) * t };
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartTrace {
    pub start: [f64; 5],
    /// Best stable point of this restart, if any.
    pub best_point: Option<[f64; 5]>,
    pub best_value: Option<f64>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimumReport {
    pub measure: Measure,
    pub best_point: [f64; 5],
    pub best_value: f64,
    pub evaluations: usize,
    pub trace: Vec<RestartTrace>,
}

/// Measure value at `point`, `None` when unstable or not evaluable.
pub fn objective(base: &SystemParams, measure: Measure, point: [f64; 5]) -> Option<f64> {
    let p = base.at_operating_point(point);
    match evaluate(&p, &[measure]) {
        Ok(v) => v.values[0],
        Err(e) => {
            log::debug!("objective failed: {e}");
            None
        }
    }
}

fn run_restart(spec: &OptimizeSpec, base: &SystemParams, free: &[usize], index: usize, budget: usize) -> RestartTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let start_unit: Vec<f64> = if index == 0 {
        vec![0.5; free.len()]
    } else {
        (0..free.len()).map(|_| rng.random::<f64>()).collect()
    };
    let start = spec.point_from_unit(free, &start_unit);

    let mut best: Option<([f64; 5], f64)> = None;
    let run = minimize(&start_unit, budget, |u| {
        let x = spec.point_from_unit(free, u);
        match objective(base, spec.measure, x) {
            Some(v) => {
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((x, v));
                }
                -v
            }
            None => 0.0,
        }
    });
    RestartTrace {
        start,
        best_point: best.map(|b| b.0),
        best_value: best.map(|b| b.1),
        evaluations: run.evaluations,
    }
}

/// Maximizes one measure over the box. Unstable points score zero.
pub fn maximize(spec: &OptimizeSpec, base: &SystemParams, workers: Workers) -> Result<OptimumReport> {
    spec.validate()?;
    base.validate()?;
    let free = spec.free_axes();

    if free.is_empty() {
        let x = spec.point_from_unit(&free, &[]);
        let value = objective(base, spec.measure, x).ok_or(Error::NoStablePoint(1))?;
        return Ok(OptimumReport {
            measure: spec.measure,
            best_point: x,
            best_value: value,
            evaluations: 1,
            trace: vec![RestartTrace {
                start: x,
                best_point: Some(x),
                best_value: Some(value),
                evaluations: 1,
            }],
        });
    }

    let budget = spec.max_evaluations / spec.restarts;
    let indices: Vec<usize> = (0..spec.restarts).collect();
    let trace = par_map(&indices, workers, |&i| run_restart(spec, base, &free, i, budget));

    let evaluations = trace.iter().map(|t| t.evaluations).sum();
    let mut best: Option<([f64; 5], f64)> = None;
    for t in &trace {
        if let (Some(x), Some(v)) = (t.best_point, t.best_value) {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((x, v));
            }
        }
    }
    let (best_point, best_value) = best.ok_or(Error::NoStablePoint(evaluations))?;
    Ok(OptimumReport {
        measure: spec.measure,
        best_point,
        best_value,
        evaluations,
        trace,
    })
}

/// Entanglement below this value counts as vanished.
pub const VANISHING_THRESHOLD: f64 = 1e-4;
pub const FLOOR_TEMPERATURE: f64 = 1e-3;
const TEMPERATURE_SAMPLES: usize = 41;
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcOptions {
    /// Bisection stops once the bracket is narrower than this (K).
    pub tolerance: f64,
}

impl Default for TcOptions {
    fn default() -> Self {
        TcOptions { tolerance: 1e-3 }
    }
}

fn value_at_temperature(p: &SystemParams, measure: Measure, t: f64) -> Result<f64> {
    let mut q = p.clone();
    q.temperature = t;
    let v = evaluate(&q, &[measure])?;
    v.values[0].ok_or(Error::Unstable(v.stability.spectral_abscissa))
}

/// Temperature at which `measure` first drops below [`VANISHING_THRESHOLD`].
///
/// Samples `[1 mK, t_max]` on a uniform grid, checks the profile decreases up to
/// the first vanishing sample, then bisects that bracket.
pub fn critical_temperature(p: &SystemParams, measure: Measure, t_max: f64) -> Result<f64> {
    critical_temperature_with(p, measure, t_max, TcOptions::default())
}

pub fn critical_temperature_with(p: &SystemParams, measure: Measure, t_max: f64, opts: TcOptions) -> Result<f64> {
    if !(t_max > FLOOR_TEMPERATURE) {
        return Err(Error::invalid("T_max", format!("must exceed {FLOOR_TEMPERATURE} K")));
    }
    if !(opts.tolerance > 0.0) {
        return Err(Error::invalid("tolerance", "must be > 0"));
    }
    let floor_value = match value_at_temperature(p, measure, FLOOR_TEMPERATURE) {
        Ok(v) => v,
        Err(e) if matches!(e.root(), Error::Unstable(_)) => {
            return Err(Error::AtPoint {
                context: "floor temperature".into(),
                source: Box::new(e),
            })
        }
        Err(e) => return Err(e),
    };
    if floor_value < VANISHING_THRESHOLD {
        return Err(Error::NotEntangledAtFloor {
            measure: measure.id().into(),
            value: floor_value,
            floor_k: FLOOR_TEMPERATURE,
        });
    }

    let step = (t_max - FLOOR_TEMPERATURE) / (TEMPERATURE_SAMPLES - 1) as f64;
    let mut samples = vec![(FLOOR_TEMPERATURE, floor_value)];
    let mut bracket = None;
    for k in 1..TEMPERATURE_SAMPLES {
        let t = if k == TEMPERATURE_SAMPLES - 1 {
            t_max
        } else {
            FLOOR_TEMPERATURE + step * k as f64
        };
        let v = value_at_temperature(p, measure, t)?;
        let prev = samples[samples.len() - 1];
        samples.push((t, v));
        if v > prev.1 + MONOTONE_SLACK {
            return Err(Error::NonMonotone {
                measure: measure.id().into(),
                samples,
            });
        }
        if v < VANISHING_THRESHOLD {
            bracket = Some((prev.0, t));
            break;
        }
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| Error::NotVanished {
        measure: measure.id().into(),
        t_max,
    })?;

    while hi - lo > opts.tolerance {
        let mid = 0.5 * (lo + hi);
        if value_at_temperature(p, measure, mid)? < VANISHING_THRESHOLD {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
