use kdv_ist::contour::*;
use kdv_ist::potential::{make_preset, GridSpec};
use kdv_ist::scalar::xi_inv;
use kdv_ist::scattering::*;
use kdv_ist::Potential;
use num_complex::Complex64 as Cx;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PI: f64 = std::f64::consts::PI;

struct WellData {
    q: Potential,
    bound: Vec<BoundState<f64>>,
}

fn square_well() -> WellData {
    let q: Potential = make_preset("square_well", &[1.0, 2.0], GridSpec::default()).unwrap();
    let bound = bound_states(&q, &BoundStateConfig::for_potential(&q)).unwrap();
    WellData { q, bound }
}

fn l_real(q: &Potential, ks: &[f64]) -> Vec<Cx> {
    let mesh = q.mesh(q.grid_step());
    ks.iter().map(|k| coefficients_at(q, &mesh, *k).unwrap().l).collect()
}

fn sample_grid() -> Vec<f64> {
    symmetric_k_grid(6.0, 0.0731, 0.0137).unwrap()
}

#[test]
fn symbol_respects_reflection_conjugation() {
    let d = square_well();
    let c = build_contour(1.2, 30.0, 1600, 32, 64, &[d.bound[0].kappa]).unwrap();
    let on_gamma = l_values(&d.q, &c.nodes, &JostConfig::for_potential(&d.q)).unwrap();
    let ks = sample_grid();
    let s = symbol_phi(&on_gamma, &c, 0.5, 0.1, &ks, &l_real(&d.q, &ks)).unwrap();
    assert!(s.symmetry_residual() < 1e-8, "{}", s.symmetry_residual());
    let n = ks.len();
    for i in 0..n / 2 {
        assert!((s.dphi_dx_values[i] - s.dphi_dx_values[n - 1 - i].conj()).norm() < 1e-8);
    }
}

#[test]
fn detour_adds_the_residue_of_a_rational_reflection() {
    // L = 1/(λ - p) with p inside the rectangle: moving the path from ℝ to Γ
    // picks up ξ⁻¹(p)/(p - k) and nothing else
    let a = 1.0;
    let p = Cx::new(0.1, 0.5 * a);
    let (x, t) = (0.3, 0.05);
    let c = build_contour(a, 20.0, 960, 48, 96, &[]).unwrap();
    let r = c.real_line_rule(0.125, 16);
    let l = |nodes: &[Cx]| nodes.iter().map(|z| 1.0 / (z - p)).collect::<Vec<_>>();
    let ks = sample_grid();
    let on_grid: Vec<Cx> = ks.iter().map(|k| 1.0 / (Cx::new(*k, 0.0) - p)).collect();
    let on_gamma = symbol_phi(&l(&c.nodes), &c, x, t, &ks, &on_grid).unwrap();
    let on_axis = symbol_phi(&l(&r.nodes), &r, x, t, &ks, &on_grid).unwrap();
    for (i, k) in ks.iter().enumerate() {
        let residue = xi_inv(p, x, t) / (p - k);
        let diff = on_gamma.phi_values[i] - on_axis.phi_values[i];
        assert!((diff - residue).norm() < 1e-8, "k = {k}: {diff} vs {residue}");
    }
}

#[test]
fn deformation_to_the_real_line_picks_up_bound_states() {
    let d = square_well();
    let cfg = JostConfig::for_potential(&d.q);
    let p = ContourParams { a: Some(1.0), ray_cutoff: Some(25.0), ..ContourParams::default() };
    let c = graded_contour(&p, &[d.bound[0].kappa], 0.1, 10.0, 1.0).unwrap();
    let r = c.real_line_rule(0.125, 16);
    for (x, t) in [(0.0, 0.1), (1.5, 0.1), (-1.0, 0.1)] {
        let gamma: Cx = c
            .nodes
            .iter()
            .zip(l_values(&d.q, &c.nodes, &cfg).unwrap())
            .zip(&c.weights)
            .map(|((z, l), w)| xi_inv(*z, x, t) * l * w)
            .sum();
        let axis: Cx = r
            .nodes
            .iter()
            .zip(l_values(&d.q, &r.nodes, &cfg).unwrap())
            .zip(&r.weights)
            .map(|((z, l), w)| xi_inv(*z, x, t) * l * w)
            .sum();
        let residues: Cx = d
            .bound
            .iter()
            .map(|b| xi_inv(Cx::new(0.0, b.kappa), x, t) * Cx::new(0.0, b.c))
            .sum();
        let want = axis - 2.0 * PI * Cx::i() * residues;
        assert!((gamma - want).norm() < 1e-6 * want.norm(), "({x}, {t}): {gamma} vs {want}");
    }
}

#[test]
fn x_derivative_matches_central_differences() {
    let d = square_well();
    let c = build_contour(1.2, 30.0, 1600, 32, 64, &[d.bound[0].kappa]).unwrap();
    let on_gamma = l_values(&d.q, &c.nodes, &JostConfig::for_potential(&d.q)).unwrap();
    let ks = [-2.3, -0.41, 0.17, 0.88, 3.1];
    let lg = l_real(&d.q, &ks);
    let (x, t) = (0.4, 0.1);
    let exact = symbol_phi(&on_gamma, &c, x, t, &ks, &lg).unwrap();
    let err = |h: f64| {
        let p = symbol_phi(&on_gamma, &c, x + h, t, &ks, &lg).unwrap();
        let m = symbol_phi(&on_gamma, &c, x - h, t, &ks, &lg).unwrap();
        (0..ks.len())
            .map(|i| ((p.phi_values[i] - m.phi_values[i]) / (2.0 * h) - exact.dphi_dx_values[i]).norm())
            .fold(0.0, f64::max)
    };
    let (e3, e4) = (err(1e-3), err(1e-4));
    let ratio = e3 / e4;
    assert!((60.0..160.0).contains(&ratio), "errors {e3:e}, {e4:e}, ratio {ratio}");
}

#[test]
fn doubling_the_cutoff_stays_within_the_estimate() {
    let d = square_well();
    let kappas = [d.bound[0].kappa];
    let cfg = JostConfig::for_potential(&d.q);
    let ks = sample_grid();
    let lg = l_real(&d.q, &ks);
    let (x, t) = (0.5, 0.1);
    let base = ContourParams { ray_cutoff: Some(20.0), ..ContourParams::default() };
    let c1 = graded_contour(&base, &kappas, t, 2.0, 1.0).unwrap();
    let c2 = graded_contour(&ContourParams { ray_cutoff: Some(40.0), ..base }, &kappas, t, 2.0, 1.0).unwrap();
    let s1 = symbol_phi(&l_values(&d.q, &c1.nodes, &cfg).unwrap(), &c1, x, t, &ks, &lg).unwrap();
    let s2 = symbol_phi(&l_values(&d.q, &c2.nodes, &cfg).unwrap(), &c2, x, t, &ks, &lg).unwrap();
    let change = s1.phi_values.iter().zip(&s2.phi_values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(change < c1.truncation_estimate, "{change:e} vs {:e}", c1.truncation_estimate);
}

#[test]
fn cauchy_transform_is_bounded_by_the_density() {
    let a = 1.0;
    let c = build_contour(a, 5.0, 32, 64, 128, &[]).unwrap();
    let (nodes, weights): (Vec<Cx>, Vec<Cx>) = c.rect_part().unzip();
    let ks = symmetric_k_grid(40.0, 0.01, 0.003).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let coef: Vec<Cx> = (0..6).map(|_| Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let f: Vec<Cx> = nodes
            .iter()
            .map(|z| coef.iter().rev().fold(Cx::new(0.0, 0.0), |acc, c| acc * (z / a) + c))
            .collect();
        let sup = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let transform = cauchy_transform(&f, &nodes, &weights, &ks);
        let l2 = (transform.iter().map(|v| v.norm_sqr()).sum::<f64>() * 0.01).sqrt();
        worst = worst.max(l2 / sup);
    }
    assert!(worst.is_finite() && worst < 20.0, "empirical constant {worst}");
}
