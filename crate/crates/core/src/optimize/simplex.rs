//! Nelder-Mead on the unit cube with projection onto the box.

/// Outcome of one simplex run.
#[derive(Debug, Clone)]
pub struct SimplexRun {
    pub best_point: Vec<f64>,
    pub best_cost: f64,
    pub evaluations: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const INITIAL_STEP: f64 = 0.15;
const COST_TOLERANCE: f64 = 1e-12;
const SIZE_TOLERANCE: f64 = 1e-7;

fn clamp_unit(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(0.0, 1.0);
    }
}

/// Minimizes `cost` over `[0, 1]^k` from `start`, using at most `budget` evaluations.
pub fn minimize<F>(start: &[f64], budget: usize, mut cost: F) -> SimplexRun
where
    F: FnMut(&[f64]) -> f64,
{
    let k = start.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        cost(x)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    let mut x0 = start.to_vec();
    clamp_unit(&mut x0);
    simplex.push(x0.clone());
    for i in 0..k {
        let mut v = x0.clone();
        v[i] = if v[i] + INITIAL_STEP <= 1.0 {
            v[i] + INITIAL_STEP
        } else {
            v[i] - INITIAL_STEP
        };
        simplex.push(v);
    }
    let mut costs: Vec<f64> = Vec::with_capacity(k + 1);
    for v in &simplex {
        if evals >= budget {
            break;
        }
        costs.push(eval(v, &mut evals));
    }
    if costs.len() < simplex.len() {
        simplex.truncate(costs.len());
        return finish(simplex, costs, evals);
    }

    while evals < budget {
        let mut order: Vec<usize> = (0..=k).collect();
        order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        costs = order.iter().map(|&i| costs[i]).collect();

        let spread = costs[k] - costs[0];
        let size = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread.abs() <= COST_TOLERANCE && size <= SIZE_TOLERANCE {
            break;
        }

        let centroid: Vec<f64> = (0..k)
            .map(|d| simplex[..k].iter().map(|v| v[d]).sum::<f64>() / k as f64)
            .collect();
        let toward = |coef: f64| {
            let mut p: Vec<f64> = (0..k)
                .map(|d| centroid[d] + coef * (simplex[k][d] - centroid[d]))
                .collect();
            clamp_unit(&mut p);
            p
        };

        let reflected = toward(-REFLECT);
        let c_r = eval(&reflected, &mut evals);
        if c_r < costs[0] {
            if evals >= budget {
                simplex[k] = reflected;
                costs[k] = c_r;
                break;
            }
            let expanded = toward(-EXPAND);
            let c_e = eval(&expanded, &mut evals);
            if c_e < c_r {
                simplex[k] = expanded;
                costs[k] = c_e;
            } else {
                simplex[k] = reflected;
                costs[k] = c_r;
            }
            continue;
        }
        if c_r < costs[k - 1] {
            simplex[k] = reflected;
            costs[k] = c_r;
            continue;
        }
        if evals >= budget {
            break;
        }
        let (contracted, c_c) = if c_r < costs[k] {
            let p = toward(-CONTRACT);
            let c = eval(&p, &mut evals);
            (p, c)
        } else {
            let p = toward(CONTRACT);
            let c = eval(&p, &mut evals);
            (p, c)
        };
        if c_c < costs[k].min(c_r) {
            simplex[k] = contracted;
            costs[k] = c_c;
            continue;
        }
        for i in 1..=k {
            if evals >= budget {
                break;
            }
            let shrunk: Vec<f64> = (0..k)
                .map(|d| simplex[0][d] + SHRINK * (simplex[i][d] - simplex[0][d]))
                .collect();
            costs[i] = eval(&shrunk, &mut evals);
            simplex[i] = shrunk;
        }
    }
    finish(simplex, costs, evals)
}

fn finish(simplex: Vec<Vec<f64>>, costs: Vec<f64>, evaluations: usize) -> SimplexRun {
    let best = (0..costs.len())
        .min_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)))
        .unwrap_or(0);
    SimplexRun {
        best_point: simplex.get(best).cloned().unwrap_or_default(),
        best_cost: costs.get(best).copied().unwrap_or(f64::INFINITY),
        evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_minimum() {
        let run = minimize(&[0.9, 0.1, 0.5], 2000, |x| {
            (x[0] - 0.3).powi(2) + 2.0 * (x[1] - 0.7).powi(2) + (x[2] - 0.45).powi(2)
        });
        assert!(run.best_cost < 1e-10);
        assert!((run.best_point[1] - 0.7).abs() < 1e-4);
    }

    #[test]
    fn respects_the_box() {
        let run = minimize(&[0.5, 0.5], 1000, |x| -(x[0] + x[1]));
        assert!(run.best_point.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!((run.best_cost + 2.0).abs() < 1e-6);
    }

    #[test]
    fn budget_is_honored() {
        let mut calls = 0;
        let run = minimize(&[0.2, 0.2, 0.2, 0.2], 17, |x| {
            calls += 1;
            x.iter().map(|v| (v - 0.6).powi(2)).sum()
        });
        assert_eq!(run.evaluations, calls);
        assert!(calls <= 17);
    }
}
