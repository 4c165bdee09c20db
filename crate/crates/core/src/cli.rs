//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Workers;
use crate::gaussian::{full_report, EntanglementReport};
use crate::model::config::{load_layers, RunConfig};
use crate::model::{validate_regime, SystemParams};
use crate::optimize::{critical_temperature, maximize, OptimumReport, COORDINATES};
use crate::sweep::{emit_csv, run_grid, Constants, GridSpec};

/// Bundled configuration files, one per figure panel and optimized row.
pub const PRESETS: &[(&str, &str)] = &[
    ("default", include_str!("../presets/default.toml")),
    ("fig2a", include_str!("../presets/fig2a.toml")),
    ("fig2b", include_str!("../presets/fig2b.toml")),
    ("fig2c", include_str!("../presets/fig2c.toml")),
    ("fig2d", include_str!("../presets/fig2d.toml")),
    ("fig3a", include_str!("../presets/fig3a.toml")),
    ("fig3b", include_str!("../presets/fig3b.toml")),
    ("fig3c", include_str!("../presets/fig3c.toml")),
    ("fig3d", include_str!("../presets/fig3d.toml")),
    ("fig4a", include_str!("../presets/fig4a.toml")),
    ("fig4b", include_str!("../presets/fig4b.toml")),
    ("fig4c", include_str!("../presets/fig4c.toml")),
    ("fig4d", include_str!("../presets/fig4d.toml")),
    ("fig5a", include_str!("../presets/fig5a.toml")),
    ("fig5b", include_str!("../presets/fig5b.toml")),
    ("fig5c", include_str!("../presets/fig5c.toml")),
    ("fig5d", include_str!("../presets/fig5d.toml")),
    ("fig6a", include_str!("../presets/fig6a.toml")),
    ("fig6b", include_str!("../presets/fig6b.toml")),
    ("fig6c", include_str!("../presets/fig6c.toml")),
    ("fig6d", include_str!("../presets/fig6d.toml")),
    ("fig7", include_str!("../presets/fig7.toml")),
    ("fig8", include_str!("../presets/fig8.toml")),
    ("fig9", include_str!("../presets/fig9.toml")),
    ("fig10a", include_str!("../presets/fig10a.toml")),
    ("fig10b", include_str!("../presets/fig10b.toml")),
    ("fig10c", include_str!("../presets/fig10c.toml")),
    ("fig10d", include_str!("../presets/fig10d.toml")),
    ("table2_a1n", include_str!("../presets/table2_a1n.toml")),
    ("table2_a1d", include_str!("../presets/table2_a1d.toml")),
    ("table2_ne", include_str!("../presets/table2_ne.toml")),
    ("table2_de", include_str!("../presets/table2_de.toml")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

#[derive(Debug, Parser)]
#[command(
    name = "cavmag",
    version,
    about = "Steady-state entanglement of a driven two-cavity magnomechanical system"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Bundled configuration, applied before `--config`.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Parameter override `name=value` in units of omega_d (T in kelvin); repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Optimizer seed, overriding the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// More log output; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Full entanglement report at one parameter point.
    Point,
    /// Every configured grid sweep.
    Sweep,
    /// Maximize one measure over the configured box.
    Optimize,
    /// Critical temperatures of the configured measures.
    Tc,
    /// Stability verdict over a detuning grid.
    StabilityMap,
}

impl Command {
    fn id(self) -> &'static str {
        match self {
            Command::Point => "point",
            Command::Sweep => "sweep",
            Command::Optimize => "optimize",
            Command::Tc => "tc",
            Command::StabilityMap => "stability-map",
        }
    }
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Failure = 1,
    /// Unstable point or no stable point in the search box.
    Unstable = 2,
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    preset: Option<&'a str>,
    config_path: Option<String>,
    config_layers: &'a [String],
    overrides: &'a [String],
    seed: Option<u64>,
    constants: Constants,
    resolved: &'a RunConfig,
}

/// Configuration layers: the preset, then the file.
fn config_layers(common: &Common) -> Result<Vec<String>> {
    let mut layers = Vec::new();
    if let Some(name) = &common.preset {
        let body = preset(name).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            Error::config(
                "--preset",
                format!("unknown preset `{name}`; available: {}", names.join(", ")),
            )
        })?;
        layers.push(body.to_string());
    }
    if let Some(path) = &common.config {
        let body = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("--config {}", path.display()), e.to_string()))?;
        layers.push(body);
    }
    Ok(layers)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let body = serde_json::to_string_pretty(value).map_err(|e| Error::config("json", e.to_string()))?;
    fs::write(path, body + "\n")?;
    Ok(())
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e.root(),
        Error::Config { .. } | Error::InvalidParameter { .. } | Error::InvalidGrid(_) | Error::UnknownMeasure(_)
    )
}

pub fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Info,
        1 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .try_init();
}

/// Runs one invocation and returns its exit status. Diagnostics go to stderr.
pub fn run(cli: &Cli) -> Status {
    match execute(cli) {
        Ok(status) => status,
        Err(e) => {
            if is_config_error(&e) {
                eprintln!("configuration error: {e}");
            } else {
                eprintln!("error: {e}");
            }
            Status::Failure
        }
    }
}

fn execute(cli: &Cli) -> Result<Status> {
    let common = &cli.common;
    let layers = config_layers(common)?;
    let refs: Vec<&str> = layers.iter().map(String::as_str).collect();
    let mut config = load_layers(&refs, &common.overrides)?;
    if let (Some(seed), Some(spec)) = (common.seed, config.optimize.as_mut()) {
        spec.seed = seed;
    }
    fs::create_dir_all(&common.out)?;
    let meta = RunMetadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.id(),
        preset: common.preset.as_deref(),
        config_path: common.config.as_ref().map(|p| p.display().to_string()),
        config_layers: &layers,
        overrides: &common.overrides,
        seed: config.optimize.as_ref().map(|o| o.seed).or(common.seed),
        constants: Constants::default(),
        resolved: &config,
    };
    write_json(&common.out.join(format!("run-{}.meta.json", cli.command.id())), &meta)?;

    let workers = Workers(common.workers);
    match cli.command {
        Command::Point => cmd_point(&config.params, &common.out),
        Command::Sweep => cmd_sweep(&config.sweeps, workers, &common.out),
        Command::Optimize => cmd_optimize(&config, workers, &common.out),
        Command::Tc => cmd_tc(&config, &common.out),
        Command::StabilityMap => {
            let spec = config.stability_map_or_default();
            cmd_sweep(std::slice::from_ref(&spec), workers, &common.out)
        }
    }
}

#[derive(Serialize)]
struct PointRecord<'a> {
    report: &'a EntanglementReport,
    warnings: Vec<String>,
}

pub fn cmd_point(p: &SystemParams, out: &Path) -> Result<Status> {
    let report = full_report(p)?;
    let ss = &report.steady_state;
    let warnings: Vec<String> = validate_regime(p, ss, None).iter().map(ToString::to_string).collect();
    let wd = p.omega_d;

    println!(
        "stable: {} (spectral abscissa {:.6e} omega_d)",
        if report.stable { "yes" } else { "no" },
        report.stability.spectral_abscissa / wd
    );
    println!("effective magnon detuning: {:.6} omega_d", ss.delta_n_tilde / wd);
    for (name, z) in [("a1", ss.a1), ("a2", ss.a2), ("n", ss.n), ("e", ss.e)] {
        println!("<{name}> = {:.6e} {:+.6e}i", z.re, z.im);
    }
    println!("<x> = {:.6e}  <y> = {:.6e}", ss.x_mean, ss.y_mean);
    for (m, v) in &report.bipartite {
        println!("{:<8} {v:.9e}", m.id());
    }
    for (m, r) in &report.tripartite {
        println!(
            "{:<8} min {:.9e}  partitions {:.9e} {:.9e} {:.9e}",
            m.id(),
            r.min,
            r.partitions[0],
            r.partitions[1],
            r.partitions[2]
        );
    }
    for w in &warnings {
        println!("warning: {w}");
    }

    let mut csv = String::from("measure,value\n");
    for (m, v) in &report.bipartite {
        csv.push_str(&format!("{},{v:.8e}\n", m.id()));
    }
    for (m, r) in &report.tripartite {
        csv.push_str(&format!("{},{:.8e}\n", m.id(), r.min));
    }
    fs::write(out.join("point.csv"), csv)?;
    write_json(
        &out.join("point.json"),
        &PointRecord {
            report: &report,
            warnings,
        },
    )?;
    Ok(if report.stable { Status::Ok } else { Status::Unstable })
}

pub fn cmd_sweep(sweeps: &[GridSpec], workers: Workers, out: &Path) -> Result<Status> {
    if sweeps.is_empty() {
        return Err(Error::config("[sweep]", "no sweep configured"));
    }
    for spec in sweeps {
        let result = run_grid(spec, workers)?;
        let path = out.join(format!("{}.csv", spec.name));
        emit_csv(&result, &path)?;
        let unstable = result.rows.iter().filter(|r| r.stable == Some(false)).count();
        println!(
            "{}: {} points, {} unstable, {} failed -> {}",
            spec.name,
            result.rows.len(),
            unstable,
            result.metadata.failed_rows.len(),
            path.display()
        );
    }
    Ok(Status::Ok)
}

fn trace_csv(report: &OptimumReport) -> String {
    let mut s = String::from("restart,");
    for c in COORDINATES {
        s.push_str(&format!("start_{c}_wd,"));
    }
    for c in COORDINATES {
        s.push_str(&format!("best_{c}_wd,"));
    }
    s.push_str("best_value,evaluations\n");
    for (k, t) in report.trace.iter().enumerate() {
        let mut cells = vec![k.to_string()];
        cells.extend(t.start.iter().map(|x| format!("{x:.8e}")));
        match t.best_point {
            Some(b) => cells.extend(b.iter().map(|x| format!("{x:.8e}"))),
            None => cells.extend(std::iter::repeat_n(String::new(), 5)),
        }
        cells.push(t.best_value.map_or(String::new(), |v| format!("{v:.8e}")));
        cells.push(t.evaluations.to_string());
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn cmd_optimize(config: &RunConfig, workers: Workers, out: &Path) -> Result<Status> {
    let spec = config
        .optimize
        .as_ref()
        .ok_or_else(|| Error::config("[optimize]", "no optimization configured"))?;
    match maximize(spec, &config.params, workers) {
        Ok(report) => {
            println!(
                "{} = {:.9e} after {} evaluations",
                report.measure.id(),
                report.best_value,
                report.evaluations
            );
            for (c, x) in COORDINATES.iter().zip(report.best_point) {
                println!("  {c:<14} {x:.6} omega_d");
            }
            write_json(&out.join("optimize.json"), &report)?;
            fs::write(out.join("optimize_trace.csv"), trace_csv(&report))?;
            Ok(Status::Ok)
        }
        Err(e @ Error::NoStablePoint(_)) => {
            eprintln!("{e}");
            Ok(Status::Unstable)
        }
        Err(e) => Err(e),
    }
}

pub fn cmd_tc(config: &RunConfig, out: &Path) -> Result<Status> {
    if config.tc.is_empty() {
        return Err(Error::config("[tc]", "no critical-temperature request configured"));
    }
    let mut csv = String::from("name,measure,T_c_K,error\n");
    let mut status = Status::Ok;
    for spec in &config.tc {
        match critical_temperature(&spec.params, spec.measure, spec.t_max) {
            Ok(tc) => {
                println!("{}: {} vanishes at {:.1} mK", spec.name, spec.measure.id(), tc * 1e3);
                csv.push_str(&format!("{},{},{tc:.8e},\n", spec.name, spec.measure.id()));
            }
            Err(e) => {
                println!("{}: {}: {e}", spec.name, spec.measure.id());
                csv.push_str(&format!(
                    "{},{},,{}\n",
                    spec.name,
                    spec.measure.id(),
                    e.to_string().replace(',', ";")
                ));
                status = Status::Unstable;
            }
        }
    }
    fs::write(out.join("tc.csv"), csv)?;
    Ok(status)
}
