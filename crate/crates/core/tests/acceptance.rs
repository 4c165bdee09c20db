mod common;

use cavmag::cli::{preset, PRESETS};
use cavmag::dynamics::{diffusion_matrix, drift_matrix};
use cavmag::exec::Workers;
use cavmag::gaussian::{
    full_report, log_negativity, lyapunov_residual, reduce, residual_contangle, symplectic_eigenvalues,
    CovarianceMatrix, Measure,
};
use cavmag::model::config::{load_layers, RunConfig};
use cavmag::model::SystemParams;
use cavmag::optimize::{critical_temperature, maximize, objective};
use cavmag::sweep::{run_grid, CsvTable, SweepResult};
use nalgebra::DMatrix;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(pass: bool, detail: String) -> Outcome {
    if pass {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn config(name: &str) -> RunConfig {
    load_layers(&[preset(name).expect("preset")], &[]).expect("preset parses")
}

fn sweep(name: &str, index: usize) -> SweepResult {
    run_grid(&config(name).sweeps[index], Workers::default()).expect("sweep")
}

/// Values of one measure on a grid; unstable points are `None`.
fn column(result: &SweepResult, m: Measure) -> Vec<Option<f64>> {
    let k = result.measure_index(m).expect("measure in sweep");
    result.rows.iter().map(|r| r.values[k]).collect()
}

fn argmax(values: &[Option<f64>]) -> Option<(usize, f64)> {
    values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .fold(None, |best, (i, v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
}

fn lyapunov_oracle() -> Outcome {
    let mut worst_rel: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    for (p, sol) in common::random_stable_points(50, 101) {
        let scale = 1.0 / p.omega_d;
        let a = DMatrix::from_column_slice(10, 10, drift_matrix(&p, &sol.steady_state).entries.as_slice()) * scale;
        let d = DMatrix::from_column_slice(10, 10, diffusion_matrix(&p).unwrap().to_matrix().as_slice()) * scale;
        let (oracle, _) = common::integrate_to_steady_state(&a, &d);
        let v = sol.covariance.unwrap().entries;
        worst_rel = worst_rel.max(common::frobenius(&(&v - &oracle)) / common::frobenius(&oracle));
        worst_res = worst_res.max(lyapunov_residual(&a, &v, &d) / common::frobenius(&d).max(1.0));
    }
    check(
        worst_rel < 1e-4 && worst_res <= 1e-8,
        format!("max relative error {worst_rel:.3e}, max scaled residual {worst_res:.3e}"),
    )
}

fn squeezed_pair() -> Outcome {
    let mut worst: f64 = 0.0;
    for r in [0.1f64, 0.5, 1.0, 2.0] {
        let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            c, 0.0, s, 0.0,
            0.0, c, 0.0, -s,
            s, 0.0, c, 0.0,
            0.0, -s, 0.0, c,
        ]);
        let e = log_negativity(&CovarianceMatrix::unlabeled(m).unwrap()).unwrap();
        worst = worst.max((e - 2.0 * r).abs());
    }
    check(worst <= 1e-9, format!("max |E_N - 2r| {worst:.3e}"))
}

fn physicality() -> Outcome {
    let mut min_nu = f64::INFINITY;
    let mut min_raw = f64::INFINITY;
    for (_, sol) in common::random_stable_points(200, 303) {
        let v = sol.covariance.unwrap();
        min_nu = min_nu.min(symplectic_eigenvalues(&v).unwrap()[0]);
        for m in Measure::TRIPARTITE {
            let r = residual_contangle(&reduce(&v, m.modes()).unwrap()).unwrap();
            min_raw = r.raw.iter().copied().fold(min_raw, f64::min);
        }
    }
    check(
        min_nu >= 0.5 - 1e-6 && min_raw >= -1e-8,
        format!("min symplectic eigenvalue {min_nu:.9}, min unclamped residual contangle {min_raw:.3e}"),
    )
}

fn decoupling() -> Outcome {
    let mut p = SystemParams::defaults();
    p.hopping = 0.0;
    let r = full_report(&p).unwrap();
    let cross = Measure::BIPARTITE
        .into_iter()
        .filter(|m| m.crosses_cavities())
        .map(|m| r.value(m).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let mut p = SystemParams::defaults();
    p.g_nd_eff = 0.0;
    let r = full_report(&p).unwrap();
    let phonon = [Measure::EnA1D, Measure::EnA2D, Measure::EnDE, Measure::EnND]
        .into_iter()
        .map(|m| r.value(m).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    check(
        cross < 1e-12 && phonon < 1e-12,
        format!("max cross-cavity E_N at J=0 {cross:.3e}, max phonon E_N at G_nd=0 {phonon:.3e}"),
    )
}

/// Local maxima over 3x3 neighbourhoods reaching half the global maximum.
fn fig2_maxima() -> Outcome {
    let result = sweep("fig2a", 0);
    let values = column(&result, Measure::EnDE);
    let n1 = result.spec().axes[0].points;
    let n2 = result.spec().axes[1].points;
    let (_, global) = argmax(&values).ok_or("no stable point")?;
    let at = |i: usize, j: usize| values[i * n2 + j].unwrap_or(f64::NEG_INFINITY);
    let mut peaks = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            let v = at(i, j);
            if v <= 0.0 || v < 0.5 * global {
                continue;
            }
            let neighbours = (i.saturating_sub(1)..=(i + 1).min(n1 - 1))
                .flat_map(|a| (j.saturating_sub(1)..=(j + 1).min(n2 - 1)).map(move |b| (a, b)));
            if neighbours.filter(|&nb| nb != (i, j)).all(|(a, b)| at(a, b) <= v) {
                peaks.push(result.rows[i * n2 + j].coords.clone());
            }
        }
    }
    let near = |x: f64, y: f64| {
        peaks
            .iter()
            .any(|c| ((c[0] - x).powi(2) + (c[1] - y).powi(2)).sqrt() <= 0.5)
    };
    let listed: Vec<String> = peaks.iter().map(|c| format!("({:.2},{:.2})", c[0], c[1])).collect();
    check(
        near(0.0, 0.0) && near(-2.0, -2.0),
        format!("peaks {} (global max {global:.4})", listed.join(" ")),
    )
}

fn fig4_optimum() -> Outcome {
    let result = sweep("fig4a", 0);
    let (i, v) = argmax(&column(&result, Measure::EnNE)).ok_or("no stable point")?;
    let c = &result.rows[i].coords;
    check(
        (c[0] - 0.5).abs() <= 0.3,
        format!(
            "argmax delta_a = {:.3} at delta_n_tilde = {:.3}, EN_ne = {v:.4}",
            c[0], c[1]
        ),
    )
}

fn fig7_trend() -> Outcome {
    let result = sweep("fig7", 0);
    let values = column(&result, Measure::EnDE);
    let spec = result.spec();
    let (nj, na) = (spec.axes[0].points, spec.axes[1].points);
    let step = (spec.axes[1].max - spec.axes[1].min) / (na - 1) as f64;
    let mut peaks = Vec::new();
    for j in 0..nj {
        let (i, _) = argmax(&values[j * na..(j + 1) * na]).ok_or("no stable point in a row")?;
        peaks.push(result.rows[j * na + i].coords[1]);
    }
    let drops: Vec<f64> = peaks.windows(2).map(|w| w[0] - w[1]).filter(|&d| d > 1e-12).collect();
    let monotone = drops.len() <= 1 && drops.iter().all(|&d| d <= step + 1e-12);
    let (first, last) = (peaks[0], *peaks.last().unwrap());
    let starts_near = (first + 1.0).abs() <= 0.5;
    let moves_toward_zero = last > first && last.abs() < first.abs();
    let listed: Vec<String> = peaks.iter().map(|x| format!("{x:.2}")).collect();
    check(
        monotone && starts_near && moves_toward_zero,
        format!("argmax delta_a per J: {}", listed.join(" ")),
    )
}

fn critical_temperatures() -> Outcome {
    let bands = [
        (Measure::EnDE, 0.140, 0.260),
        (Measure::EnNE, 0.140, 0.260),
        (Measure::EnA1N, 0.120, 0.220),
        (Measure::EnA1D, 0.125, 0.235),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, lo, hi) in bands {
        let row = common::TABLE2.iter().find(|(id, _)| *id == m.id()).unwrap().1;
        let p = SystemParams::defaults().at_operating_point(row);
        match critical_temperature(&p, m, 0.4) {
            Ok(t) => {
                pass &= (lo..=hi).contains(&t);
                parts.push(format!("{m} {:.1} mK", t * 1e3));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{m} error: {}", e.root()));
            }
        }
    }
    check(pass, parts.join(", "))
}

fn fig8_positivity() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (index, m) in [(0, Measure::RA1ND), (1, Measure::RNDE)] {
        let result = sweep("fig8", index);
        match argmax(&column(&result, m)) {
            Some((i, v)) => {
                pass &= v > 0.0;
                parts.push(format!(
                    "max {m} = {v:.4e} at delta_a = {:.2}",
                    result.rows[i].coords[0]
                ));
            }
            None => {
                pass = false;
                parts.push(format!("{m}: no stable point"));
            }
        }
    }
    check(pass, parts.join(", "))
}

fn optimizer_floor() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (id, row) in common::TABLE2 {
        let cfg = config(&format!("table2_{}", id.trim_start_matches("EN_")));
        let spec = cfg.optimize.expect("optimize section");
        let floor = objective(&cfg.params, spec.measure, row).unwrap_or(0.0);
        match maximize(&spec, &cfg.params, Workers::default()) {
            Ok(r) => {
                pass &= r.best_value >= floor;
                parts.push(format!("{id} {:.5} vs {floor:.5}", r.best_value));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{id} error: {e}"));
            }
        }
    }
    check(pass, parts.join(", "))
}

fn determinism() -> Outcome {
    let mut grids = 0;
    for (name, _) in PRESETS {
        let cfg = config(name);
        let mut specs = cfg.sweeps.clone();
        specs.push(cfg.stability_map_or_default());
        for spec in &specs {
            let serial = CsvTable::from_result(&run_grid(spec, Workers::SERIAL).unwrap()).render();
            let parallel = CsvTable::from_result(&run_grid(spec, Workers(8)).unwrap()).render();
            if serial != parallel {
                return Err(format!("{name}/{} differs between 1 and 8 workers", spec.name));
            }
            grids += 1;
        }
    }
    Ok(format!("{grids} grids across {} presets identical", PRESETS.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("Lyapunov solve matches time integration", lyapunov_oracle),
        ("squeezed pair negativity equals 2r", squeezed_pair),
        ("covariances are physical and monogamous", physicality),
        ("uncoupled modes share no entanglement", decoupling),
        ("EN_de detuning-plane maxima", fig2_maxima),
        ("EN_ne symmetric-detuning optimum", fig4_optimum),
        ("EN_de optimum shifts with hopping", fig7_trend),
        ("critical temperatures", critical_temperatures),
        ("tripartite residual contangle positive", fig8_positivity),
        ("optimizer reaches tabulated points", optimizer_floor),
        ("sweeps are identical across worker counts", determinism),
    ];
    let mut failed = 0;
    for (k, (label, f)) in criteria.iter().enumerate() {
        let (status, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{status} {:>2} {label}: {detail}", k + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
