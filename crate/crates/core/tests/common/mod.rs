#![allow(dead_code)]

use cavmag::gaussian::{solve_point, PointSolution};
use cavmag::model::SystemParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Optimized operating points `(Δ1, Δ2, Δ̃n, Δe, J)` in units of ω_d.
pub const TABLE2: [(&str, [f64; 5]); 4] = [
    ("EN_a1n", [-1.41, -0.68, -0.65, -1.63, 0.35]),
    ("EN_a1d", [-0.04, 0.85, 0.77, 0.99, 1.28]),
    ("EN_ne", [0.76, -0.52, 0.77, -0.63, 0.8]),
    ("EN_de", [0.28, -0.84, 0.6, -1.07, 1.06]),
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random operating point inside the explored detuning, hopping and temperature ranges.
pub fn random_params(rng: &mut ChaCha8Rng) -> SystemParams {
    let mut p = SystemParams::defaults().at_operating_point([
        rng.random_range(-3.0..2.0),
        rng.random_range(-3.0..2.0),
        rng.random_range(0.4..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(0.0..1.6),
    ]);
    p.temperature = rng.random_range(0.0..0.2);
    p
}

/// The first `count` stable random points with their solved covariance.
pub fn random_stable_points(count: usize, seed: u64) -> Vec<(SystemParams, PointSolution)> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut draws = 0;
    while out.len() < count {
        draws += 1;
        assert!(draws < 100 * count, "too few stable points");
        let p = random_params(&mut rng);
        let sol = solve_point(&p).expect("evaluation");
        if sol.stability.stable {
            out.push((p, sol));
        }
    }
    out
}

pub fn frobenius(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Stationary covariance by integrating `dV/dt = AV + VAᵀ + D` from `V(0) = I/2`.
///
/// Uses the exact discretization `V(t + h) = Φ V(t) Φᵀ + Q(h)` with interval
/// doubling `Φ(2h) = Φ(h)²`, `Q(2h) = Φ(h) Q(h) Φ(h)ᵀ + Q(h)`. The first interval
/// is integrated with classical Runge-Kutta. Returns the covariance and the final
/// rate `‖dV/dt‖_F`.
pub fn integrate_to_steady_state(
    a: &nalgebra::DMatrix<f64>,
    d: &nalgebra::DMatrix<f64>,
) -> (nalgebra::DMatrix<f64>, f64) {
    use nalgebra::DMatrix;
    let n = a.nrows();
    let norm_a = frobenius(a).max(1e-300);
    let h0 = 1e-3 / norm_a;
    let substeps = 32;
    let dt = h0 / substeps as f64;

    let f_phi = |phi: &DMatrix<f64>| a * phi;
    let f_q = |q: &DMatrix<f64>| a * q + q * a.transpose() + d;
    let mut phi = DMatrix::<f64>::identity(n, n);
    let mut q = DMatrix::<f64>::zeros(n, n);
    for _ in 0..substeps {
        let k1 = f_phi(&phi);
        let k2 = f_phi(&(&phi + &k1 * (dt / 2.0)));
        let k3 = f_phi(&(&phi + &k2 * (dt / 2.0)));
        let k4 = f_phi(&(&phi + &k3 * dt));
        phi += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        let k1 = f_q(&q);
        let k2 = f_q(&(&q + &k1 * (dt / 2.0)));
        let k3 = f_q(&(&q + &k2 * (dt / 2.0)));
        let k4 = f_q(&(&q + &k3 * dt));
        q += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }

    let v0 = DMatrix::<f64>::identity(n, n) * 0.5;
    let mut v = v0.clone();
    let mut rate = f64::INFINITY;
    for _ in 0..200 {
        q = &phi * &q * phi.transpose() + &q;
        phi = &phi * &phi;
        v = &phi * &v0 * phi.transpose() + &q;
        v = (&v + v.transpose()) * 0.5;
        rate = frobenius(&(a * &v + &v * a.transpose() + d));
        if rate < 1e-10 * frobenius(d).max(1.0) {
            break;
        }
    }
    (v, rate)
}
