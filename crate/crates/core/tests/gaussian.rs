mod common;

use cavmag::dynamics::{diffusion_matrix, drift_matrix};
use cavmag::gaussian::{
    full_report, log_negativity, lyapunov_residual, one_vs_two_negativity, partial_transpose, reduce,
    residual_contangle, symplectic_eigenvalues, CovarianceMatrix, Measure, Mode,
};
use cavmag::model::SystemParams;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn two_mode_squeezed(r: f64) -> CovarianceMatrix {
    let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c, 0.0, s, 0.0,
        0.0, c, 0.0, -s,
        s, 0.0, c, 0.0,
        0.0, -s, 0.0, c,
    ]);
    CovarianceMatrix::unlabeled(m).unwrap()
}

fn squeeze_first_mode(v: &CovarianceMatrix, r: f64) -> CovarianceMatrix {
    let n = v.entries.nrows();
    let mut s = DMatrix::<f64>::identity(n, n);
    s[(0, 0)] = r.exp();
    s[(1, 1)] = (-r).exp();
    CovarianceMatrix::new(&s * &v.entries * s.transpose(), v.mode_labels.clone()).unwrap()
}

fn swapped(v: &CovarianceMatrix) -> CovarianceMatrix {
    let p = DMatrix::from_fn(4, 4, |r, c| if c == (r + 2) % 4 { 1.0 } else { 0.0 });
    let mut labels = v.mode_labels.clone();
    labels.reverse();
    CovarianceMatrix::new(&p * &v.entries * p.transpose(), labels).unwrap()
}

#[test]
fn steady_state_covariance_matches_time_integration() {
    for (p, sol) in common::random_stable_points(10, 21) {
        let a = drift_matrix(&p, &sol.steady_state);
        let d = diffusion_matrix(&p).unwrap();
        let scale = 1.0 / p.omega_d;
        let a_dyn = DMatrix::from_column_slice(10, 10, a.entries.as_slice()) * scale;
        let d_dyn = DMatrix::from_column_slice(10, 10, d.to_matrix().as_slice()) * scale;
        let (oracle, _) = common::integrate_to_steady_state(&a_dyn, &d_dyn);
        let v = sol.covariance.unwrap().entries;
        let rel = common::frobenius(&(&v - &oracle)) / common::frobenius(&oracle);
        assert!(rel < 1e-4, "relative error {rel:e}");
        let res = lyapunov_residual(&a_dyn, &v, &d_dyn);
        assert!(res <= 1e-8 * common::frobenius(&d_dyn).max(1.0), "residual {res:e}");
    }
}

#[test]
fn full_covariance_is_physical() {
    for (_, sol) in common::random_stable_points(40, 22) {
        let v = sol.covariance.unwrap();
        let nu = symplectic_eigenvalues(&v).unwrap();
        assert_eq!(nu.len(), 5);
        assert!(nu[0] >= 0.5 - 1e-6, "{nu:?}");
        let asym = common::frobenius(&(&v.entries - v.entries.transpose()));
        assert!(asym <= 1e-10 * common::frobenius(&v.entries));
    }
}

#[test]
fn negativity_is_partition_symmetric_and_locally_invariant() {
    for (_, sol) in common::random_stable_points(20, 23) {
        let v = sol.covariance.unwrap();
        for m in Measure::BIPARTITE {
            let v2 = reduce(&v, m.modes()).unwrap();
            let e = log_negativity(&v2).unwrap();
            let e_swapped = log_negativity(&swapped(&v2)).unwrap();
            assert!((e - e_swapped).abs() <= 1e-10, "{m}: {e} vs {e_swapped}");
            let e_squeezed = log_negativity(&squeeze_first_mode(&v2, 0.7)).unwrap();
            assert!((e - e_squeezed).abs() <= 1e-9, "{m}: {e} vs {e_squeezed}");
        }
    }
}

#[test]
fn residual_contangles_are_clamped_non_negative() {
    for (_, sol) in common::random_stable_points(20, 24) {
        let v = sol.covariance.unwrap();
        for m in Measure::TRIPARTITE {
            let r = residual_contangle(&reduce(&v, m.modes()).unwrap()).unwrap();
            assert!(r.partitions.iter().all(|&x| x >= 0.0));
            assert!(r.min >= 0.0);
            assert_eq!(r.min, r.partitions.iter().copied().fold(f64::INFINITY, f64::min));
        }
    }
}

proptest! {
    #[test]
    fn squeezed_pair_negativity_is_twice_the_squeezing(r in 0.0f64..2.5) {
        let e = log_negativity(&two_mode_squeezed(r)).unwrap();
        prop_assert!((e - 2.0 * r).abs() <= 1e-9);
    }

    #[test]
    fn local_squeezing_leaves_negativity_unchanged(r in 0.01f64..2.0, s in -1.5f64..1.5) {
        let v = two_mode_squeezed(r);
        let a = log_negativity(&v).unwrap();
        let b = log_negativity(&squeeze_first_mode(&v, s)).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn transposition_is_an_involution(r in 0.0f64..2.0) {
        let v = two_mode_squeezed(r);
        let back = partial_transpose(&partial_transpose(&v, v.mode_labels[1]).unwrap(), v.mode_labels[1]).unwrap();
        prop_assert_eq!(back.entries, v.entries);
    }
}

#[test]
fn squeezed_pair_with_vacuum_has_no_residual_contangle() {
    for r in [0.1, 0.5, 1.0] {
        let mut m = DMatrix::<f64>::identity(6, 6) * 0.5;
        m.view_mut((0, 0), (4, 4)).copy_from(&two_mode_squeezed(r).entries);
        let v3 = CovarianceMatrix::unlabeled(m).unwrap();
        let labels = v3.mode_labels.clone();
        assert!((one_vs_two_negativity(&v3, labels[0]).unwrap() - 2.0 * r).abs() < 1e-9);
        assert!(one_vs_two_negativity(&v3, labels[2]).unwrap().abs() < 1e-12);
        assert!(residual_contangle(&v3).unwrap().min.abs() < 1e-9);
    }
}

#[test]
fn reduction_composes() {
    let (_, sol) = common::random_stable_points(1, 25).pop().unwrap();
    let v = sol.covariance.unwrap();
    assert_eq!(reduce(&v, &Mode::ALL).unwrap().entries, v.entries);
    let once = reduce(&v, &[Mode::Cavity1, Mode::Magnon]).unwrap();
    let twice = reduce(
        &reduce(&v, &[Mode::Cavity1, Mode::Magnon, Mode::Ensemble]).unwrap(),
        &[Mode::Cavity1, Mode::Magnon],
    )
    .unwrap();
    assert_eq!(once.entries, twice.entries);
    assert_eq!(
        reduce(&v, &[Mode::Cavity1, Mode::Cavity2]).unwrap().entries,
        v.entries.view((0, 0), (4, 4))
    );
}

#[test]
fn uncoupled_cavities_share_no_entanglement() {
    let mut p = SystemParams::defaults();
    p.hopping = 0.0;
    let r = full_report(&p).unwrap();
    assert!(r.stable);
    for m in Measure::BIPARTITE.into_iter().filter(|m| m.crosses_cavities()) {
        assert!(r.value(m).unwrap() < 1e-12, "{m}");
    }
}

#[test]
fn uncoupled_phonon_shares_no_entanglement() {
    let mut p = SystemParams::defaults();
    p.g_nd_eff = 0.0;
    let r = full_report(&p).unwrap();
    assert!(r.stable);
    for m in [Measure::EnA1D, Measure::EnA2D, Measure::EnDE, Measure::EnND] {
        assert!(r.value(m).unwrap() < 1e-12, "{m}");
    }
}

#[test]
fn table2_magnon_ensemble_point_is_entangled() {
    let p = SystemParams::defaults().at_operating_point(common::TABLE2[2].1);
    assert!(full_report(&p).unwrap().value(Measure::EnNE).unwrap() > 0.0);
}
