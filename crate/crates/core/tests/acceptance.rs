//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::PiecewiseConstant;
use kdv_ist::contour::{default_a, SymbolGrid};
use kdv_ist::hankel::*;
use kdv_ist::pipeline::{cmd_crosscheck, cmd_reconstruct, Axis, RunConfig};
use kdv_ist::potential::{make_preset, GridSpec};
use kdv_ist::reconstruct::*;
use kdv_ist::scattering::*;
use kdv_ist::validate::*;
use kdv_ist::Potential;
use num_complex::Complex64 as Cx;

type Outcome = Result<String, String>;

fn preset(name: &str, p: &[f64]) -> Potential {
    make_preset(name, p, GridSpec::default()).unwrap()
}

fn well() -> Potential {
    preset("square_well", &[1.0, 2.0])
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn checks_verdict(checks: &[Check]) -> Outcome {
    let detail = checks.iter().map(|c| format!("{} {:.2e}/{:.0e}", c.name, c.residual, c.tolerance)).collect::<Vec<_>>().join(", ");
    verdict(checks.iter().all(|c| c.pass), detail)
}

fn unitarity() -> Outcome {
    let start = Instant::now();
    let k = symmetric_k_grid(20.0, 0.005, 0.05).unwrap();
    let mut worst = 0.0f64;
    for q in [well(), preset("gaussian_bump", &[1.0, 3.0, 0.5])] {
        let s = scattering_coefficients(&q, &k, &BoundStateConfig::for_potential(&q)).unwrap();
        for i in 0..k.len() {
            let t2 = s.t[i].norm_sqr();
            worst = worst.max((t2 + s.r[i].norm_sqr() - 1.0).abs()).max((t2 + s.l[i].norm_sqr() - 1.0).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(worst < 1e-6 && secs < 30.0, format!("max residual {worst:.2e}, {secs:.1} s"))
}

/// `ψ` and `ψ'` at `x = 0` from the Faddeev-normalized solution.
fn at_origin(q: &Potential, k: Cx, side: Side) -> (Cx, Cx) {
    let s = jost_solve(q, k, side, &JostConfig::for_potential(q)).unwrap();
    let i = s.x_grid.iter().position(|x| *x == 0.0).expect("mesh starts at the origin");
    let sign = if side == Side::Right { 1.0 } else { -1.0 };
    (s.m_values[i], sign * Cx::i() * k * s.m_values[i] + s.dm_values[i])
}

fn wronskian(a: (Cx, Cx), b: (Cx, Cx)) -> Cx {
    a.0 * b.1 - a.1 * b.0
}

fn transfer_matrix_oracle() -> Outcome {
    let q = well();
    let oracle = PiecewiseConstant::square_well(1.0, 2.0);
    let k = symmetric_k_grid(20.0, 0.01, 0.005).unwrap();
    let s = scattering_coefficients(&q, &k, &BoundStateConfig::for_potential(&q)).unwrap();
    let mut real = 0.0f64;
    for (i, kk) in k.iter().enumerate() {
        let (t, r, l) = oracle.coefficients(Cx::new(*kk, 0.0));
        real = real.max((s.t[i] - t).norm()).max((s.r[i] - r).norm()).max((s.l[i] - l).norm());
    }
    let kappas: Vec<f64> = s.bound_states.iter().map(|b| b.kappa).collect();
    let a = default_a(&kappas, 0.25);
    let cfg = JostConfig::for_potential(&q);
    let mut off = 0.0f64;
    for j in 0..10 {
        let lam = Cx::new(-2.0 + 0.45 * j as f64, a * (0.05 + 0.1 * j as f64));
        // R needs ψ₊ at -λ in the lower half-plane, so only T and L are continued
        let (t, _, l) = oracle.coefficients(lam);
        let w = wronskian(at_origin(&q, lam, Side::Left), at_origin(&q, lam, Side::Right));
        let got_t = 2.0 * Cx::i() * lam / w;
        let got_l = l_analytic(&q, lam, &s.bound_states, 0.01, &cfg).unwrap();
        for (g, want) in [(got_t, t), (got_l, l)] {
            off = off.max((g - want).norm() / (1.0 + want.norm()));
        }
    }
    verdict(real < 1e-6 && off < 1e-6, format!("T/R/L on the real grid {real:.2e}, T/L at complex points (Im ≤ {a:.3}) {off:.2e}"))
}

fn residues() -> Outcome {
    let q = well();
    let b = bound_states(&q, &BoundStateConfig::for_potential(&q)).unwrap();
    let checks = check_residues_and_lt(&q, &b, &JostConfig::for_potential(&q), 1e-4).unwrap();
    let res: Vec<Check> = checks.into_iter().filter(|c| c.name.starts_with("residue")).collect();
    if res.is_empty() {
        return Err("no bound states".into());
    }
    checks_verdict(&res)
}

fn zf_trace() -> Outcome {
    let k = symmetric_k_grid(20.0, 0.005, 0.0025).unwrap();
    let mut out = vec![];
    for q in [well(), preset("exp_decay", &[1.0, 1.0])] {
        let s = scattering_coefficients(&q, &k, &BoundStateConfig::for_potential(&q)).unwrap();
        let mut c = check_zf_trace(&q, &s, 1e-3);
        c.name = format!("{}:{}", q.preset_tag().unwrap_or("?"), c.name);
        out.push(c);
    }
    checks_verdict(&out)
}

fn layer_stripping() -> Outcome {
    let q = well();
    let k = symmetric_k_grid(20.0, 0.005, 0.0025).unwrap();
    checks_verdict(&check_layer_stripping(&q, 1.0, &k, &JostConfig::for_potential(&q), 1e-6).unwrap())
}

fn truncation() -> Outcome {
    let q = preset("exp_decay", &[1.0, 1.0]);
    let k = symmetric_k_grid(20.0, 0.005, 0.0025).unwrap();
    let cfg = JostConfig::for_potential(&q);
    let pts = truncation_rates(&q, &[2.0, 4.0, 8.0], 1.5, &k, &cfg).unwrap();
    let ratios: Vec<String> = pts.iter().map(|p| format!("b={} ratio {:.3}", p.b, p.sup_kl / (-p.b).exp())).collect();
    let checks = check_truncation_rates(&q, &[2.0, 4.0, 8.0], 1.5, &k, &cfg, 2.0).unwrap();
    checks_verdict(&checks).map(|d| format!("{}; {d}", ratios.join(", "))).map_err(|d| format!("{}; {d}", ratios.join(", ")))
}

fn hankel_machinery() -> Outcome {
    // rank one: Ω(w) = c̃ e^{-κw} on [0, s]
    let (kappa, c, s_max) = (1.0f64, 2.0f64, 40.0f64);
    let mut rank_one = 0.0f64;
    for (x, t) in [(0.0, 0.01), (0.7, 0.1), (-1.5, 1.0), (3.0, 0.1)] {
        let ct = c * (2.0 * kappa * x - 8.0 * kappa * kappa * kappa * t).exp();
        let mass = (1.0 - (-2.0 * kappa * s_max).exp()) / (2.0 * kappa);
        let d = 1.0 + ct * mass;
        let (amp, damp) = (-ct / d, -2.0 * kappa * ct / (d * d));
        let sys = assemble(&SpectralKernel::poles_only(&[BoundState { kappa, c }], t), x, t, s_max, &NystromParams::default());
        let scale = (ct * mass).max(1.0);
        rank_one = rank_one.max((hankel_norm(&sys) - ct * mass).abs() / scale);
        let sol = solve(&sys, 1e-6).unwrap();
        for i in 0..sys.basis_size() {
            let e = (-kappa * sys.nodes[i]).exp() * sys.sqrt_weights[i];
            let sc = amp.abs().max(1.0);
            rank_one = rank_one.max((sol.z[i] - amp * e).abs() / sc).max((sol.dz[i] - damp * e).abs() / sc);
        }
    }
    // Riesz projection applied twice
    let n = 1 << 14;
    let grid: Vec<f64> = (0..n).map(|j| (j as f64 - (n as f64 - 1.0) / 2.0) * 0.01).collect();
    let f: Vec<Cx> = grid.iter().map(|k| 1.0 / Cx::new(*k, -1.0) + 0.5 / Cx::new(*k - 1.0, 2.0)).collect();
    let once = riesz_project_minus(&f, &grid).unwrap();
    let twice = riesz_project_minus(&once, &grid).unwrap();
    let idem = once.iter().zip(&twice).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    // a constant symbol has no Hankel part
    let k_grid: Vec<f64> = (-75_000..75_000).map(|j| (j as f64 + 0.5) * 0.02).collect();
    let constant = SymbolGrid {
        phi_values: vec![Cx::new(3.0, -1.0); k_grid.len()],
        dphi_dx_values: vec![Cx::new(0.0, 0.0); k_grid.len()],
        k_grid,
        x: 0.0,
        t: 0.01,
    };
    let annihilated = hankel_matrix(&constant, 24, 1.0).unwrap().matrix.abs().max();
    verdict(
        rank_one < 1e-6 && idem < 1e-10 && annihilated < 1e-12,
        format!("rank one {rank_one:.2e}, P² - P {idem:.2e}, constant symbol {annihilated:.2e}"),
    )
}

fn hankel_norm_below_one() -> Outcome {
    let q = well();
    let p = ReconstructParams::default();
    let mut checks = vec![];
    for x in [0.0, 2.0] {
        for t in [0.1, 0.5] {
            checks.push(check_hankel_norm_lt1(&q, x, t, &p, 0.0).unwrap());
        }
    }
    let margins = checks
        .iter()
        .map(|c| match c.lhs {
            Value::Real(n) => format!("margin {:.3}", 1.0 - n),
            _ => "?".into(),
        })
        .collect::<Vec<_>>()
        .join(", ");
    checks_verdict(&checks).map(|_| margins.clone()).map_err(|d| format!("{margins}; {d}"))
}

fn one_soliton() -> Outcome {
    let data = SpectralData::reflectionless(vec![BoundState { kappa: 1.0, c: 2.0 }]);
    let xs: Vec<f64> = (0..=60).map(|i| -5.0 + 0.25 * i as f64).collect();
    let f = reconstruct_grid(&data, &ReconstructParams::default(), PathKind::Proposition, &xs, &[0.1, 1.0]).unwrap();
    let mut worst = 0.0f64;
    for (j, t) in f.t_list.iter().enumerate() {
        for (i, x) in xs.iter().enumerate() {
            worst = worst.max((f.value(i, j) - common::one_soliton(1.0, 2.0, *x, *t)).abs());
        }
    }
    verdict(worst < 1e-6, format!("max error {worst:.2e} over {} points", f.values.len()))
}

fn path_equivalence() -> Outcome {
    let start = Instant::now();
    let q = well();
    let data = SpectralData::from_potential(&q, &BoundStateConfig::for_potential(&q)).unwrap();
    let p = ReconstructParams::default();
    let (xs, ts) = ([-2.0, 0.0, 1.0, 3.0, 6.0], [0.1, 0.3, 0.5]);
    let gamma = reconstruct_grid(&data, &p, PathKind::Contour, &xs, &ts).unwrap();
    let axis = reconstruct_grid(&data, &p, PathKind::Proposition, &xs, &ts).unwrap();
    let worst = gamma.values.iter().zip(&axis.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    verdict(worst < 1e-4 && secs < 300.0, format!("max difference {worst:.2e}, {secs:.1} s"))
}

fn scratch_dir(tag: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("kdv-ist-acceptance-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn pde_crosscheck() -> Outcome {
    let cfg = RunConfig {
        x_grid: Axis::Range { start: -5.0, stop: 15.0, step: 0.25 },
        t_list: vec![0.1, 0.5],
        output_dir: scratch_dir("crosscheck"),
        ..RunConfig::default()
    };
    let mut cfg = cfg;
    cfg.potential.preset = "square_well(0.5,2)".into();
    let out = cmd_crosscheck(&cfg).unwrap();
    let _ = std::fs::remove_dir_all(&cfg.output_dir);
    let rows = out.value.rows.iter().map(|r| format!("t={} max {:.2e}", r.t, r.max_abs_error)).collect::<Vec<_>>().join(", ");
    verdict(out.value.max_error() < 1e-2 && out.pass, format!("{rows}, wrap-free to t={:.2}", out.value.wrap_free_time))
}

fn determinism() -> Outcome {
    let run = |tag: &str, threads: Option<usize>| {
        let cfg = RunConfig {
            x_grid: Axis::List(vec![-2.0, 0.0, 0.5, 1.0, 3.0]),
            t_list: vec![0.1, 0.3],
            output_dir: scratch_dir(tag),
            threads,
            ..RunConfig::default()
        };
        let d = cmd_reconstruct(&cfg).unwrap().value.csv_digest;
        let _ = std::fs::remove_dir_all(&cfg.output_dir);
        d
    };
    let a = run("det-a", None);
    let b = run("det-b", None);
    let c = run("det-c", Some(1));
    verdict(a == b && a == c, format!("sha256 {}…", &a[..16]))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("unitarity", unitarity),
        ("transfer-matrix oracle", transfer_matrix_oracle),
        ("residues of L", residues),
        ("trace formula", zf_trace),
        ("layer stripping", layer_stripping),
        ("truncation convergence", truncation),
        ("Hankel machinery", hankel_machinery),
        ("Hankel norm < 1", hankel_norm_below_one),
        ("one-soliton reconstruction", one_soliton),
        ("path equivalence", path_equivalence),
        ("PDE cross-check", pde_crosscheck),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.1} s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d} [{secs:.1} s]", i + 1)
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
