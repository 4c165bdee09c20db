//! Plain-text run configuration.
//!
//! Parameter keys in `[params]` carry a unit suffix: `_hz2pi` for ω/2π in Hz,
//! `_K`, `_W`, `_T`, `_m`. Sweep axes, optimizer bounds and `at` overrides are
//! in units of ω_d, temperatures in kelvin.
//!
//! ```toml
//! [params]
//! J_hz2pi = 8.0e6
//! T_K = 0.01
//!
//! [[sweep]]
//! name = "de_vs_detunings"
//! measures = ["EN_de"]
//! axes = [
//!   { param = "delta_1", min = -3.0, max = 2.0, points = 101 },
//!   { param = "delta_2", min = -3.0, max = 2.0, points = 101 },
//! ]
//! ```

use serde::Serialize;
use toml::{Table, Value};

use super::constants::TWO_PI;
use super::{rabi_from_field, rabi_from_power, CouplingDerivation, SystemParams};
use crate::error::{Error, Result};
use crate::gaussian::Measure;
use crate::optimize::{OptimizeSpec, COORDINATES};
use crate::sweep::{Axis, AxisParam, GridSpec, Linkage};

/// Frequency-valued keys of `[params]` without their `_hz2pi` suffix.
const FREQUENCY_KEYS: [&str; 22] = [
    "omega_c1",
    "omega_c2",
    "omega_e",
    "omega_n",
    "omega_d",
    "omega_l",
    "delta_1",
    "delta_2",
    "delta_e",
    "delta_n",
    "delta_n_tilde_override",
    "kappa_a",
    "kappa_n",
    "gamma_e",
    "gamma_d",
    "g_na",
    "g_nd",
    "G_nd",
    "G_ae",
    "J",
    "Omega_l",
    "Omega_n",
];

/// Keys of `[params]` with a non-frequency unit.
const OTHER_KEYS: [(&str, &str); 4] = [("T", "_K"), ("P", "_W"), ("B0", "_T"), ("sphere_radius", "_m")];

const SECTIONS: [&str; 6] = ["params", "sweep", "optimize", "tc", "stability_map", "run"];

/// Critical-temperature request.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TcSpec {
    pub name: String,
    pub measure: Measure,
    pub t_max: f64,
    pub params: SystemParams,
}

/// Everything a run needs, resolved from a configuration file, presets and overrides.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub params: SystemParams,
    pub sweeps: Vec<GridSpec>,
    pub optimize: Option<OptimizeSpec>,
    pub tc: Vec<TcSpec>,
    pub stability_map: Option<GridSpec>,
    /// Overrides applied after the file, in order.
    pub overrides: Vec<String>,
}

fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            let t = l.trim_start();
            t.strip_prefix(key).is_some_and(|rest| {
                let rest = rest.trim_start();
                rest.starts_with('=')
            })
        })
        .map(|k| k + 1)
}

fn locate(text: &str, section: &str, key: &str) -> String {
    match line_of(text, key) {
        Some(line) => format!("line {line}, key `{section}.{key}`"),
        None => format!("key `{section}.{key}`"),
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn number(text: &str, section: &str, key: &str, v: &Value) -> Result<f64> {
    as_f64(v).ok_or_else(|| Error::config(locate(text, section, key), "expected a number"))
}

fn string<'a>(text: &str, section: &str, key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::config(locate(text, section, key), "expected a string"))
}

fn integer(text: &str, section: &str, key: &str, v: &Value) -> Result<u64> {
    v.as_integer()
        .and_then(|i| u64::try_from(i).ok())
        .ok_or_else(|| Error::config(locate(text, section, key), "expected a non-negative integer"))
}

fn table<'a>(text: &str, section: &str, key: &str, v: &'a Value) -> Result<&'a Table> {
    v.as_table()
        .ok_or_else(|| Error::config(locate(text, section, key), "expected a table"))
}

fn measure(text: &str, section: &str, key: &str, v: &Value) -> Result<Measure> {
    string(text, section, key, v)?
        .parse()
        .map_err(|e: Error| Error::config(locate(text, section, key), e.to_string()))
}

fn split_suffix(key: &str) -> Option<(&str, &str)> {
    let idx = key.rfind('_')?;
    Some(key.split_at(idx))
}

fn frequency_slot<'a>(p: &'a mut SystemParams, base: &str) -> Option<FrequencySlot<'a>> {
    use FrequencySlot::*;
    Some(match base {
        "omega_c1" => Plain(&mut p.omega_c1),
        "omega_c2" => Plain(&mut p.omega_c2),
        "omega_e" => Plain(&mut p.omega_e),
        "omega_n" => Plain(&mut p.omega_n),
        "omega_d" => Plain(&mut p.omega_d),
        "omega_l" => Optional(&mut p.omega_l),
        "delta_1" => Plain(&mut p.delta_1),
        "delta_2" => Plain(&mut p.delta_2),
        "delta_e" => Plain(&mut p.delta_e),
        "delta_n" => Plain(&mut p.delta_n),
        "delta_n_tilde_override" => Optional(&mut p.delta_n_tilde_override),
        "kappa_a" => Plain(&mut p.kappa_a),
        "kappa_n" => Plain(&mut p.kappa_n),
        "gamma_e" => Plain(&mut p.gamma_e),
        "gamma_d" => Plain(&mut p.gamma_d),
        "g_na" => Plain(&mut p.g_na),
        "g_nd" => Plain(&mut p.g_nd),
        "G_nd" => Plain(&mut p.g_nd_eff),
        "G_ae" => Plain(&mut p.g_ae),
        "J" => Plain(&mut p.hopping),
        "Omega_l" => Plain(&mut p.drive_cavity),
        "Omega_n" => Plain(&mut p.drive_magnon),
        _ => return None,
    })
}

enum FrequencySlot<'a> {
    Plain(&'a mut f64),
    Optional(&'a mut Option<f64>),
}

/// Converts a key whose suffix is wrong or missing into a diagnostic.
fn suffix_error(text: &str, key: &str) -> Error {
    let loc = locate(text, "params", key);
    let known_base = FREQUENCY_KEYS
        .iter()
        .map(|b| (*b, "_hz2pi"))
        .chain(OTHER_KEYS)
        .find(|(b, _)| key == *b || key.strip_prefix(b).is_some_and(|rest| rest.starts_with('_')));
    match known_base {
        Some((base, suffix)) => Error::config(
            loc,
            format!("malformed unit suffix on `{key}`; expected `{base}{suffix}`"),
        ),
        None => Error::config(loc, format!("unknown parameter `{key}`")),
    }
}

fn parse_params(text: &str, section: &Table) -> Result<SystemParams> {
    let mut p = SystemParams::defaults();
    let mut power = None;
    let mut b0 = None;
    let mut radius = None;

    for (key, value) in section {
        let Some((base, suffix)) = split_suffix(key) else {
            return Err(suffix_error(text, key));
        };
        if suffix == "_hz2pi" {
            if !FREQUENCY_KEYS.contains(&base) {
                return Err(suffix_error(text, key));
            }
            let x = TWO_PI * number(text, "params", key, value)?;
            match frequency_slot(&mut p, base) {
                Some(FrequencySlot::Plain(slot)) => *slot = x,
                Some(FrequencySlot::Optional(slot)) => *slot = Some(x),
                None => return Err(suffix_error(text, key)),
            }
            continue;
        }
        match OTHER_KEYS.iter().find(|(b, s)| *b == base && *s == suffix) {
            Some(("T", _)) => p.temperature = number(text, "params", key, value)?,
            Some(("P", _)) => power = Some(number(text, "params", key, value)?),
            Some(("B0", _)) => b0 = Some(number(text, "params", key, value)?),
            Some(("sphere_radius", _)) => radius = Some(number(text, "params", key, value)?),
            _ => return Err(suffix_error(text, key)),
        }
    }

    if section.contains_key("delta_n_hz2pi") && !section.contains_key("delta_n_tilde_override_hz2pi") {
        p.delta_n_tilde_override = None;
    }
    if let Some(pw) = power {
        let omega_l = p.omega_l.unwrap_or(p.omega_c1 - p.delta_1);
        p.drive_cavity = rabi_from_power(pw, p.kappa_a, omega_l)
            .map_err(|e| Error::config(locate(text, "params", "P_W"), e.to_string()))?
            .rate();
    }
    if b0.is_some() || radius.is_some() {
        let mut cd = CouplingDerivation::yig_defaults(&p);
        if let Some(b) = b0 {
            cd.b0 = b;
        }
        if let Some(r) = radius {
            cd.v_sphere = 4.0 / 3.0 * std::f64::consts::PI * r * r * r;
        }
        p.drive_magnon = rabi_from_field(&cd)
            .map_err(|e| Error::config(locate(text, "params", "B0_T"), e.to_string()))?
            .rate();
    }
    p.validate().map_err(|e| Error::config("[params]", e.to_string()))?;
    Ok(p)
}

/// Applies one bare override `name = value` in units of ω_d (`T` in kelvin).
pub fn apply_override(p: &mut SystemParams, name: &str, value: f64) -> Result<()> {
    if name.ends_with("_hz2pi") {
        return Err(Error::config(
            format!("override `{name}`"),
            "absolute frequencies are only accepted in a configuration file; give the value in units of omega_d",
        ));
    }
    if !value.is_finite() {
        return Err(Error::config(format!("override `{name}`"), "value must be finite"));
    }
    let wd = p.omega_d;
    let x = value * wd;
    match name {
        "delta_1" => p.delta_1 = x,
        "delta_2" => p.delta_2 = x,
        "delta_e" => p.delta_e = x,
        "delta_n" => {
            p.delta_n = x;
            p.delta_n_tilde_override = None;
        }
        "delta_n_tilde" => p.delta_n_tilde_override = Some(x),
        "J" => p.hopping = x,
        "G_nd" => p.g_nd_eff = x,
        "G_ae" => p.g_ae = x,
        "g_na" => p.g_na = x,
        "kappa_a" => p.kappa_a = x,
        "kappa_n" => p.kappa_n = x,
        "gamma_e" => p.gamma_e = x,
        "gamma_d" => p.gamma_d = x,
        "T" => p.temperature = value,
        other => return Err(Error::config(format!("override `{other}`"), "unknown parameter")),
    }
    if name.starts_with("delta") {
        p.omega_l = None;
    }
    p.validate()
        .map_err(|e| Error::config(format!("override `{name}`"), e.to_string()))
}

fn apply_at(text: &str, section: &str, base: &SystemParams, entry: &Table) -> Result<SystemParams> {
    let mut p = base.clone();
    if let Some(at) = entry.get("at") {
        for (k, v) in table(text, section, "at", at)? {
            let x = number(text, section, k, v)?;
            apply_override(&mut p, k, x).map_err(|e| Error::config(locate(text, section, k), e.to_string()))?;
        }
    }
    Ok(p)
}

fn parse_linkage(text: &str, section: &str, entry: &Table) -> Result<Linkage> {
    match entry.get("linkage") {
        None => Ok(Linkage::Independent),
        Some(v) => match string(text, section, "linkage", v)? {
            "independent" => Ok(Linkage::Independent),
            "symmetric" => Ok(Linkage::Symmetric),
            "antisymmetric" => Ok(Linkage::Antisymmetric),
            other => Err(Error::config(
                locate(text, section, "linkage"),
                format!("unknown linkage `{other}`"),
            )),
        },
    }
}

fn parse_axes(text: &str, section: &str, entry: &Table) -> Result<Vec<Axis>> {
    let axes = entry
        .get("axes")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::config(locate(text, section, "axes"), "expected an array of axes"))?;
    axes.iter()
        .map(|a| {
            let t = a
                .as_table()
                .ok_or_else(|| Error::config(locate(text, section, "axes"), "axis must be a table"))?;
            let get = |k: &str| {
                t.get(k)
                    .ok_or_else(|| Error::config(locate(text, section, "axes"), format!("axis missing `{k}`")))
            };
            let param: AxisParam = string(text, section, "param", get("param")?)?
                .parse()
                .map_err(|e: Error| Error::config(locate(text, section, "axes"), e.to_string()))?;
            let points = integer(text, section, "points", get("points")?)? as usize;
            Ok(Axis::new(
                param,
                number(text, section, "min", get("min")?)?,
                number(text, section, "max", get("max")?)?,
                points,
            ))
        })
        .collect()
}

fn parse_grid(text: &str, section: &str, entry: &Table, base: &SystemParams, default_name: &str) -> Result<GridSpec> {
    let name = match entry.get("name") {
        Some(v) => string(text, section, "name", v)?.to_string(),
        None => default_name.to_string(),
    };
    let measures = match entry.get("measures") {
        None => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .map(|m| measure(text, section, "measures", m))
            .collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(Error::config(locate(text, section, "measures"), "expected an array")),
    };
    let spec = GridSpec {
        name,
        axes: parse_axes(text, section, entry)?,
        linkage: parse_linkage(text, section, entry)?,
        base: apply_at(text, section, base, entry)?,
        measures,
    };
    spec.validate()
        .map_err(|e| Error::config(format!("[{section}] `{}`", spec.name), e.to_string()))?;
    Ok(spec)
}

fn entries<'a>(text: &str, doc: &'a Table, section: &str) -> Result<Vec<&'a Table>> {
    match doc.get(section) {
        None => Ok(Vec::new()),
        Some(Value::Table(t)) => Ok(vec![t]),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_table()
                    .ok_or_else(|| Error::config(format!("[[{section}]]"), "expected tables"))
            })
            .collect(),
        Some(_) => Err(Error::config(locate(text, section, section), "expected a section")),
    }
}

fn parse_optimize(text: &str, entry: &Table) -> Result<OptimizeSpec> {
    const S: &str = "optimize";
    let get = |k: &str| {
        entry
            .get(k)
            .ok_or_else(|| Error::config("[optimize]", format!("missing `{k}`")))
    };
    let bounds_table = table(text, S, "bounds", get("bounds")?)?;
    let mut bounds = [(0.0, 0.0); 5];
    for (slot, name) in bounds.iter_mut().zip(COORDINATES) {
        let pair = bounds_table
            .get(name)
            .and_then(Value::as_array)
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::config(locate(text, S, name), format!("bounds need `{name} = [min, max]`")))?;
        *slot = (number(text, S, name, &pair[0])?, number(text, S, name, &pair[1])?);
    }
    for key in bounds_table.keys() {
        if !COORDINATES.contains(&key.as_str()) {
            return Err(Error::config(locate(text, S, key), format!("unknown bound `{key}`")));
        }
    }
    let spec = OptimizeSpec {
        measure: measure(text, S, "measure", get("measure")?)?,
        bounds,
        restarts: integer(text, S, "restarts", get("restarts")?)? as usize,
        max_evaluations: integer(text, S, "max_evals", get("max_evals")?)? as usize,
        seed: match entry.get("seed") {
            Some(v) => integer(text, S, "seed", v)?,
            None => 0,
        },
    };
    spec.validate()
        .map_err(|e| Error::config("[optimize]", e.to_string()))?;
    Ok(spec)
}

fn parse_tc(text: &str, entry: &Table, base: &SystemParams, index: usize) -> Result<TcSpec> {
    const S: &str = "tc";
    let get = |k: &str| {
        entry
            .get(k)
            .ok_or_else(|| Error::config("[tc]", format!("missing `{k}`")))
    };
    let m = measure(text, S, "measure", get("measure")?)?;
    let name = match entry.get("name") {
        Some(v) => string(text, S, "name", v)?.to_string(),
        None => format!("tc_{index}_{}", m.id()),
    };
    Ok(TcSpec {
        name,
        measure: m,
        t_max: number(text, S, "T_max_K", get("T_max_K")?)?,
        params: apply_at(text, S, base, entry)?,
    })
}

fn default_stability_map(base: &SystemParams) -> GridSpec {
    GridSpec {
        name: "stability_map".into(),
        axes: vec![
            Axis::new(AxisParam::Delta1, -3.0, 2.0, 51),
            Axis::new(AxisParam::Delta2, -3.0, 2.0, 51),
        ],
        linkage: Linkage::Independent,
        base: base.clone(),
        measures: Vec::new(),
    }
}

fn parse_document(text: &str) -> Result<Table> {
    text.parse::<Table>().map_err(|e| {
        let loc = match e.span() {
            Some(span) => format!("line {}", text[..span.start.min(text.len())].lines().count().max(1)),
            None => "config".to_string(),
        };
        Error::config(loc, e.message().to_string())
    })
}

/// Parses a configuration and applies overrides `name=value` left to right.
///
/// Overrides are bare parameter names in units of ω_d (`T` in kelvin). They
/// act on `[params]` before sweeps and other sections derive their bases.
pub fn load(text: &str, overrides: &[String]) -> Result<RunConfig> {
    load_layers(&[text], overrides)
}

fn merge(into: &mut Table, layer: Table) {
    for (k, v) in layer {
        match (into.get_mut(&k), v) {
            (Some(Value::Table(a)), Value::Table(b)) => merge(a, b),
            (_, v) => {
                into.insert(k, v);
            }
        }
    }
}

/// Like [`load`], with later layers overriding keys of earlier ones.
///
/// Tables merge key by key; arrays of tables are replaced wholesale.
/// Diagnostics carry line numbers of the last layer.
pub fn load_layers(layers: &[&str], overrides: &[String]) -> Result<RunConfig> {
    let mut doc = Table::new();
    for layer in layers {
        merge(&mut doc, parse_document(layer)?);
    }
    let text = layers.last().copied().unwrap_or("");
    for key in doc.keys() {
        if !SECTIONS.contains(&key.as_str()) {
            return Err(Error::config(
                locate(text, key, key),
                format!("unknown section `{key}`"),
            ));
        }
    }
    let mut params = match doc.get("params") {
        None => SystemParams::defaults(),
        Some(v) => parse_params(text, table(text, "params", "params", v)?)?,
    };
    for o in overrides {
        let (name, value) = parse_override(o)?;
        apply_override(&mut params, name, value)?;
    }

    let sweeps = entries(text, &doc, "sweep")?
        .into_iter()
        .enumerate()
        .map(|(k, e)| parse_grid(text, "sweep", e, &params, &format!("sweep_{k}")))
        .collect::<Result<Vec<_>>>()?;
    let optimize = entries(text, &doc, "optimize")?
        .first()
        .map(|e| parse_optimize(text, e))
        .transpose()?;
    let tc = entries(text, &doc, "tc")?
        .into_iter()
        .enumerate()
        .map(|(k, e)| parse_tc(text, e, &params, k))
        .collect::<Result<Vec<_>>>()?;
    let stability_map = entries(text, &doc, "stability_map")?
        .first()
        .map(|e| parse_grid(text, "stability_map", e, &params, "stability_map"))
        .transpose()?;

    Ok(RunConfig {
        params,
        sweeps,
        optimize,
        tc,
        stability_map,
        overrides: overrides.to_vec(),
    })
}

impl RunConfig {
    /// The configured stability map, or a 51×51 (Δ1, Δ2) map over [-3, 2] ω_d.
    pub fn stability_map_or_default(&self) -> GridSpec {
        self.stability_map
            .clone()
            .unwrap_or_else(|| default_stability_map(&self.params))
    }
}

/// Splits `name=value`.
pub fn parse_override(s: &str) -> Result<(&str, f64)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| Error::config(format!("override `{s}`"), "expected name=value"))?;
    let name = name.trim();
    let value: f64 = value.trim().parse().map_err(|_| {
        Error::config(
            format!("override `{name}`"),
            format!("`{}` is not a number", value.trim()),
        )
    })?;
    Ok((name, value))
}
