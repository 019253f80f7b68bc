mod common;

use kdv_ist::potential::{make_preset, GridSpec};
use kdv_ist::reconstruct::*;
use kdv_ist::scattering::{BoundState, BoundStateConfig};
use kdv_ist::Potential;

fn sech2_soliton(x: f64, t: f64) -> f64 {
    // κ = 1, c = 2: δ = ½ ln(c/2κ) = 0
    let delta = 0.5 * (2.0f64 / 2.0).ln();
    -2.0 / (x - 4.0 * t + delta).cosh().powi(2)
}

#[test]
fn one_soliton_on_the_acceptance_window() {
    let data = SpectralData::reflectionless(vec![BoundState { kappa: 1.0, c: 2.0 }]);
    let xs: Vec<f64> = (0..=60).map(|i| -5.0 + 0.25 * i as f64).collect();
    let f = reconstruct_grid(&data, &ReconstructParams::default(), PathKind::Proposition, &xs, &[0.1, 1.0]).unwrap();
    for (j, t) in f.t_list.iter().enumerate() {
        for (i, x) in xs.iter().enumerate() {
            let want = sech2_soliton(*x, *t);
            assert!((f.value(i, j) - want).abs() < 1e-6, "({x}, {t}): {} vs {want}", f.value(i, j));
            assert!((want - common::one_soliton(1.0, 2.0, *x, *t)).abs() < 1e-12);
        }
    }
}

#[test]
fn node_sums_match_the_kernel_route() {
    let q: Potential = make_preset("square_well", &[1.0, 2.0], GridSpec::default()).unwrap();
    let data = SpectralData::from_potential(&q, &BoundStateConfig::for_potential(&q)).unwrap();
    let base = ReconstructParams::default();
    let sums = ReconstructParams { node_sum: true, ..base };
    for path in [PathKind::Contour, PathKind::Proposition] {
        let a = reconstruct_point(&data, &base, path, 0.5, 0.1).unwrap();
        let b = reconstruct_point(&data, &sums, path, 0.5, 0.1).unwrap();
        assert!((a.0 - b.0).abs() < 1e-6, "{path:?}: {} vs {}", a.0, b.0);
        // the individual terms are route dependent; only I₁ is shared
        assert!((a.1.i1 - b.1.i1).norm() < 1e-12);
    }
}

#[test]
fn contour_and_real_line_paths_agree() {
    let q: Potential = make_preset("square_well", &[1.0, 2.0], GridSpec::default()).unwrap();
    let data = SpectralData::from_potential(&q, &BoundStateConfig::for_potential(&q)).unwrap();
    let p = ReconstructParams::default();
    let xs = [-2.0, 0.0, 1.0, 3.0, 6.0];
    let ts = [0.1, 0.3, 0.5];
    let gamma = reconstruct_grid(&data, &p, PathKind::Contour, &xs, &ts).unwrap();
    let axis = reconstruct_grid(&data, &p, PathKind::Proposition, &xs, &ts).unwrap();
    let worst = gamma.values.iter().zip(&axis.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-4, "max difference {worst:e}");
    assert!(gamma.max_imag_residual() < 1e-3 && axis.max_imag_residual() < 1e-3);
    // a genuinely nonzero field
    assert!(gamma.values.iter().any(|v| v.abs() > 0.1));
}

#[test]
fn numeric_derivative_matches_the_derivative_solve() {
    let q: Potential = make_preset("square_well", &[1.0, 2.0], GridSpec::default()).unwrap();
    let data = SpectralData::from_potential(&q, &BoundStateConfig::for_potential(&q)).unwrap();
    let exact = ReconstructParams::default();
    let numeric = ReconstructParams { numeric_dx: Some(1e-3), ..exact };
    let a = reconstruct_point(&data, &exact, PathKind::Proposition, 1.0, 0.2).unwrap().0;
    let b = reconstruct_point(&data, &numeric, PathKind::Proposition, 1.0, 0.2).unwrap().0;
    assert!((a - b).abs() < 1e-5, "{a} vs {b}");
}
