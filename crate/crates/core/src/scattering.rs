//! Forward scattering: Jost solutions, T/R/L, bound states and the continuation of L.
//!
//! Jost solutions are propagated with a fourth-order Magnus integrator for the
//! first-order system `(ψ, ψ')' = [[0, 1], [q - k², 0]] (ψ, ψ')`. The state is
//! carried in Faddeev-normalized form, `u = e^{∓ikx}(ψ, ψ')`, so nothing grows
//! like `e^{Im k · x}`. On constant pieces of the potential one Magnus step is
//! the exact propagator, which makes square wells exact up to rounding.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{Mesh, Potential};
use crate::scalar::{cabs, cexp, cplx, creal, csqrt, csqrt_upper, Complex, Real, C};

/// Which Jost solution: `Right` is `e^{ikx}` beyond the support, `Left` is `e^{-ikx}` before it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn sigma<T: Real>(self) -> T {
        match self {
            Side::Right => T::one(),
            Side::Left => -T::one(),
        }
    }
}

/// Integration settings for the Jost solver.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct JostConfig<T> {
    /// Largest step on smooth pieces of the potential.
    pub max_step: T,
}

impl<T: Real> JostConfig<T> {
    pub fn for_potential(q: &Potential<T>) -> Self {
        JostConfig { max_step: q.grid_step() }
    }
}

/// Faddeev-normalized Jost solution `m(k, x)` on a grid.
#[derive(Clone, Debug)]
pub struct JostSolution<T> {
    pub k: C<T>,
    pub side: Side,
    pub x_grid: Vec<T>,
    pub m_values: Vec<C<T>>,
    pub dm_values: Vec<C<T>>,
}

type State<T> = [C<T>; 2];
type Mat<T> = [[C<T>; 2]; 2];

fn sqrt3<T: Real>() -> T {
    T::of(3f64.sqrt())
}

/// Fourth-order Magnus propagator over `[x0, x0 + h]` (h may be negative).
#[inline]
fn magnus<T: Real>(q1: T, q2: T, k2: C<T>, h: T) -> Mat<T> {
    let half = T::of(0.5);
    let abar = creal::<T>((q1 + q2) * half) - k2;
    let d = sqrt3::<T>() / T::of(12.0) * h * h * (q1 - q2);
    let s2 = abar * (h * h) + creal(d * d);
    let (ch, sc) = cosh_sinhc(s2);
    [
        [ch + sc * d, sc * h],
        [sc * abar * h, ch - sc * d],
    ]
}

/// `cosh(s)` and `sinh(s)/s` as functions of `s²`.
#[inline]
fn cosh_sinhc<T: Real>(s2: C<T>) -> (C<T>, C<T>) {
    if cabs(s2) < T::of(1e-2) {
        let one = creal(T::one());
        let s4 = s2 * s2;
        let ch = one + s2 * T::of(0.5) + s4 * T::of(1.0 / 24.0) + s4 * s2 * T::of(1.0 / 720.0)
            + s4 * s4 * T::of(1.0 / 40320.0);
        let sc = one + s2 * T::of(1.0 / 6.0) + s4 * T::of(1.0 / 120.0) + s4 * s2 * T::of(1.0 / 5040.0)
            + s4 * s4 * T::of(1.0 / 362880.0);
        (ch, sc)
    } else {
        let s = csqrt(s2);
        let e = cexp(s);
        let ei = cexp(-s);
        let half = T::of(0.5);
        ((e + ei) * half, (e - ei) * half / s)
    }
}

#[inline]
fn apply<T: Real>(p: &Mat<T>, u: &State<T>, phase: C<T>) -> State<T> {
    [
        (p[0][0] * u[0] + p[0][1] * u[1]) * phase,
        (p[1][0] * u[0] + p[1][1] * u[1]) * phase,
    ]
}

/// Advances the normalized state across one mesh interval from `x0` to `x1`.
fn step<T: Real>(
    q: &Potential<T>,
    constant: Option<T>,
    x0: T,
    x1: T,
    k: C<T>,
    sigma: T,
    u: State<T>,
) -> Result<State<T>> {
    let k2 = k * k;
    let h = x1 - x0;
    let (q1, q2, n_sub) = match constant {
        Some(c) => {
            // exact propagator; split only to keep cosh/sinh in range
            let s = csqrt(creal::<T>(c) - k2) * h;
            let grow = s.re.mag().as_f64();
            let n = (grow / 30.0).ceil().max(1.0) as usize;
            (c, c, n)
        }
        None => {
            let g = T::of(0.5) - sqrt3::<T>() / T::of(6.0);
            (q.value(x0 + g * h), q.value(x1 - g * h), 1)
        }
    };
    let mut u = u;
    if n_sub == 1 {
        let p = magnus(q1, q2, k2, h);
        let phase = cexp(-(k * (sigma * h)) * C::new(T::zero(), T::one()));
        u = apply(&p, &u, phase);
    } else {
        let hs = h / T::count(n_sub);
        let p = magnus(q1, q2, k2, hs);
        let phase = cexp(-(k * (sigma * hs)) * C::new(T::zero(), T::one()));
        for _ in 0..n_sub {
            u = apply(&p, &u, phase);
        }
    }
    if !(u[0].re.is_finite_value() && u[0].im.is_finite_value() && u[1].re.is_finite_value() && u[1].im.is_finite_value()) {
        return Err(Error::Overflow {
            k_re: k.re.as_f64(),
            k_im: k.im.as_f64(),
            growth: (k.im * x1).as_f64(),
        });
    }
    Ok(u)
}

fn initial<T: Real>(k: C<T>, side: Side) -> State<T> {
    let ik = k * C::new(T::zero(), T::one());
    match side {
        Side::Right => [creal(T::one()), ik],
        Side::Left => [creal(T::one()), -ik],
    }
}

/// Normalized right state `e^{-ikx}(ψ₊, ψ₊')` propagated from the support end down to node `stop`.
fn right_state_at<T: Real>(q: &Potential<T>, mesh: &Mesh<T>, k: C<T>, stop: usize) -> Result<State<T>> {
    let n = mesh.nodes.len();
    let mut u = initial(k, Side::Right);
    for i in (stop..n - 1).rev() {
        u = step(q, mesh.constant[i], mesh.nodes[i + 1], mesh.nodes[i], k, T::one(), u)?;
    }
    Ok(u)
}

/// Normalized left state `e^{ikx}(ψ₋, ψ₋')` propagated from the origin up to node `stop`.
fn left_state_at<T: Real>(q: &Potential<T>, mesh: &Mesh<T>, k: C<T>, stop: usize) -> Result<State<T>> {
    let mut u = initial(k, Side::Left);
    for i in 0..stop {
        u = step(q, mesh.constant[i], mesh.nodes[i], mesh.nodes[i + 1], k, -T::one(), u)?;
    }
    Ok(u)
}

fn check_k<T: Real>(k: C<T>) -> Result<()> {
    if k.im < T::zero() {
        return Err(Error::InvalidInput(format!("Im k = {} < 0", k.im.as_f64())));
    }
    if k.re == T::zero() && k.im == T::zero() {
        return Err(Error::InvalidInput("k = 0 is excluded".into()));
    }
    Ok(())
}

/// Solves for the Faddeev-normalized Jost solution on the mesh across the support.
pub fn jost_solve<T: Real>(q: &Potential<T>, k: C<T>, side: Side, cfg: &JostConfig<T>) -> Result<JostSolution<T>> {
    check_k(k)?;
    let mesh = q.fine_mesh(cfg.max_step);
    let n = mesh.nodes.len();
    let sigma = side.sigma::<T>();
    let ik = k * C::new(T::zero(), T::one());
    let mut states = vec![initial(k, side); n];
    match side {
        Side::Right => {
            for i in (0..n - 1).rev() {
                states[i] = step(q, mesh.constant[i], mesh.nodes[i + 1], mesh.nodes[i], k, sigma, states[i + 1])?;
            }
        }
        Side::Left => {
            for i in 0..n - 1 {
                states[i + 1] = step(q, mesh.constant[i], mesh.nodes[i], mesh.nodes[i + 1], k, sigma, states[i])?;
            }
        }
    }
    let m_values: Vec<C<T>> = states.iter().map(|u| u[0]).collect();
    let dm_values = states
        .iter()
        .map(|u| match side {
            Side::Right => u[1] - ik * u[0],
            Side::Left => u[1] + ik * u[0],
        })
        .collect();
    Ok(JostSolution { k, side, x_grid: mesh.nodes, m_values, dm_values })
}

/// Wronskian data at one real or complex momentum.
#[derive(Clone, Copy, Debug)]
pub struct Coefficients<T> {
    pub t: C<T>,
    pub r: C<T>,
    pub l: C<T>,
    /// `|W(ψ₋, ψ₊)| / (2|k|)`, i.e. `1/|T|`.
    pub wronskian_scale: T,
}

/// T, R, L at real `k` from Wronskians of the two Jost solutions, evaluated at
/// the middle node of the mesh.
pub fn coefficients_at<T: Real>(q: &Potential<T>, mesh: &Mesh<T>, k: T) -> Result<Coefficients<T>> {
    let kc = creal(k);
    check_k(kc)?;
    let mid = mesh.nodes.len() / 2;
    let xm = mesh.nodes[mid];
    let up = right_state_at(q, mesh, kc, mid)?;
    let um = left_state_at(q, mesh, kc, mid)?;
    let i = C::new(T::zero(), T::one());
    // W(ψ₋, ψ₊)
    let w = um[0] * up[1] - um[1] * up[0];
    // W(ψ₊, conj ψ₋) and W(conj ψ₊, ψ₋)
    let e = cexp(i * (T::of(2.0) * k * xm));
    let w_l = e * (up[0] * um[1].conj() - up[1] * um[0].conj());
    let w_r = e.conj() * (up[0].conj() * um[1] - up[1].conj() * um[0]);
    let two_ik = i * (T::of(2.0) * k);
    Ok(Coefficients { t: two_ik / w, r: w_r / w, l: w_l / w, wronskian_scale: cabs(w) / (T::of(2.0) * k.mag()) })
}

/// `(ψ₊(0), ψ₊'(0))` for the right Jost solution, up to the factor `e^{ik·0} = 1`.
pub fn right_boundary_state<T: Real>(q: &Potential<T>, k: C<T>, cfg: &JostConfig<T>) -> Result<(C<T>, C<T>)> {
    let mesh = q.mesh(cfg.max_step);
    let u = right_state_at(q, &mesh, k, 0)?;
    Ok((u[0], u[1]))
}

/// Titchmarsh–Weyl function `m₊(z) = ψ₊'(0)/ψ₊(0)` with `k = √z`, `Im k > 0`.
pub fn weyl_m<T: Real>(q: &Potential<T>, z: C<T>, cfg: &JostConfig<T>) -> Result<C<T>> {
    let k = csqrt_upper(z);
    check_k(k)?;
    let (p, dp) = right_boundary_state(q, k, cfg)?;
    let scale = T::one().max_of(cabs(dp));
    if cabs(p) < T::of(1e-12) * scale {
        return Err(Error::DirichletPole { re: z.re.as_f64(), im: z.im.as_f64(), value: cabs(p).as_f64() });
    }
    Ok(dp / p)
}

/// Left reflection coefficient continued into the closed upper half-plane,
/// `L = (iλ - m₊)/(iλ + m₊)` written without dividing by `ψ₊(0)`.
pub fn l_analytic<T: Real>(
    q: &Potential<T>,
    lambda: C<T>,
    bound_states: &[BoundState<T>],
    exclusion_radius: T,
    cfg: &JostConfig<T>,
) -> Result<C<T>> {
    if lambda.im < T::zero() {
        return Err(Error::InvalidInput(format!("Im lambda = {} < 0", lambda.im.as_f64())));
    }
    for b in bound_states {
        let d = cabs(lambda - cplx(T::zero(), b.kappa));
        if d < exclusion_radius {
            return Err(Error::PoleProximity {
                re: lambda.re.as_f64(),
                im: lambda.im.as_f64(),
                kappa: b.kappa.as_f64(),
                distance: d.as_f64(),
            });
        }
    }
    l_analytic_unchecked(q, lambda, cfg)
}

/// [`l_analytic`] without the pole-exclusion test (used on small residue circles).
pub fn l_analytic_unchecked<T: Real>(q: &Potential<T>, lambda: C<T>, cfg: &JostConfig<T>) -> Result<C<T>> {
    if lambda.re == T::zero() && lambda.im == T::zero() {
        return Err(Error::InvalidInput("lambda = 0 is excluded".into()));
    }
    let (p, dp) = right_boundary_state(q, lambda, cfg)?;
    let ilp = lambda * C::new(T::zero(), T::one()) * p;
    Ok((ilp - dp) / (ilp + dp))
}

/// `L` at many points of the closed upper half-plane (data-parallel).
pub fn l_values<T: Real>(q: &Potential<T>, nodes: &[C<T>], cfg: &JostConfig<T>) -> Result<Vec<C<T>>> {
    if q.is_zero() {
        return Ok(vec![C::new(T::zero(), T::zero()); nodes.len()]);
    }
    let mesh = q.mesh(cfg.max_step);
    nodes
        .par_iter()
        .map(|&lambda| {
            if lambda.im < T::zero() {
                return Err(Error::InvalidInput("node below the real axis".into()));
            }
            let u = right_state_at(q, &mesh, lambda, 0)?;
            let ilp = lambda * C::new(T::zero(), T::one()) * u[0];
            Ok((ilp - u[1]) / (ilp + u[1]))
        })
        .collect()
}

/// Negative eigenvalue `-κ²` with its left norming constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundState<T> {
    pub kappa: T,
    pub c: T,
}

/// `A(iκ)` up to the positive factor `2κ`: `ψ₊'(0) - κ ψ₊(0)` in normalized form.
fn bound_state_function<T: Real>(q: &Potential<T>, mesh: &Mesh<T>, kappa: T) -> Result<T> {
    let u = right_state_at(q, mesh, cplx(T::zero(), kappa), 0)?;
    Ok((u[1] - u[0] * kappa).re)
}

/// Number of zeros of the zero-energy right solution (oscillation count).
fn zero_energy_node_count<T: Real>(q: &Potential<T>, max_step: T) -> Result<usize> {
    let mesh = q.fine_mesh(max_step);
    let n = mesh.nodes.len();
    let zero = C::new(T::zero(), T::zero());
    let mut u = [creal(T::one()), zero];
    let mut count = 0usize;
    let mut prev = T::one();
    for i in (0..n - 1).rev() {
        u = step(q, mesh.constant[i], mesh.nodes[i + 1], mesh.nodes[i], zero, T::one(), u)?;
        let v = u[0].re;
        if v == T::zero() {
            continue;
        }
        if (v > T::zero()) != (prev > T::zero()) {
            count += 1;
        }
        prev = v;
    }
    // linear continuation ψ(0) + ψ'(0) x for x < 0
    let (p, dp) = (u[0].re, u[1].re);
    if dp != T::zero() && p / dp > T::zero() {
        count += 1;
    }
    Ok(count)
}

/// Settings of the bound-state search.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BoundStateConfig<T> {
    pub jost: JostConfig<T>,
    /// Initial number of scan points on `(0, κ_cap]`.
    pub n_scan: usize,
    /// Margin added to the Lieb–Thirring cap.
    pub cap_margin: T,
    /// Roots closer than this are reported as degenerate.
    pub degeneracy_tol: T,
}

impl<T: Real> BoundStateConfig<T> {
    pub fn for_potential(q: &Potential<T>) -> Self {
        BoundStateConfig {
            jost: JostConfig::for_potential(q),
            n_scan: 400,
            cap_margin: T::of(0.1),
            degeneracy_tol: T::of(1e-9),
        }
    }
}

/// Locates all bound states by bracketing and bisection, then computes norming constants.
pub fn bound_states<T: Real>(q: &Potential<T>, cfg: &BoundStateConfig<T>) -> Result<Vec<BoundState<T>>> {
    if q.is_zero() {
        return Ok(vec![]);
    }
    let depth = q.samples().iter().fold(T::zero(), |m, v| m.max_of(-*v));
    let (lo, hi) = q.support();
    let mut probe_depth = depth;
    for i in 0..=64 {
        let x = lo + (hi - lo) * T::count(i) / T::of(64.0);
        probe_depth = probe_depth.max_of(-q.value(x));
    }
    if !(probe_depth > T::zero()) {
        return Ok(vec![]);
    }
    let expected = zero_energy_node_count(q, cfg.jost.max_step.min_of(T::of(0.01)))?;
    if expected == 0 {
        return Ok(vec![]);
    }
    let half_l1 = q.l1_exact() * T::of(0.5);
    let cap = half_l1.min_of(probe_depth.sqrt()) + cfg.cap_margin;
    let mesh = q.mesh(cfg.jost.max_step);

    let mut n_scan = cfg.n_scan.max(16);
    let mut brackets: Vec<(T, T, T, T)> = vec![];
    for _attempt in 0..4 {
        brackets.clear();
        let kap = |i: usize| {
            let s = T::count(i) / T::count(n_scan);
            cap * s * s
        };
        let mut k_prev = kap(1);
        let mut g_prev = bound_state_function(q, &mesh, k_prev)?;
        for i in 2..=n_scan {
            let k = kap(i);
            let g = bound_state_function(q, &mesh, k)?;
            if g == T::zero() || (g > T::zero()) != (g_prev > T::zero()) {
                brackets.push((k_prev, g_prev, k, g));
            }
            k_prev = k;
            g_prev = g;
        }
        if brackets.len() == expected {
            break;
        }
        n_scan *= 4;
    }
    if brackets.len() != expected {
        return Err(Error::RootFinder(format!(
            "found {} sign changes but the zero-energy solution has {} nodes",
            brackets.len(),
            expected
        )));
    }

    let mut kappas = Vec::with_capacity(expected);
    for &(mut a, mut ga, mut b, _) in &brackets {
        let tol = T::of(4.0) * T::default_epsilon() * cap;
        let mut iter = 0;
        while b - a > tol {
            let m = (a + b) * T::of(0.5);
            let gm = bound_state_function(q, &mesh, m)?;
            if gm == T::zero() {
                a = m;
                b = m;
                break;
            }
            if (gm > T::zero()) == (ga > T::zero()) {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
            iter += 1;
            if iter > 200 {
                return Err(Error::RootFinder("bisection did not converge".into()));
            }
        }
        kappas.push((a + b) * T::of(0.5));
    }
    kappas.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    for p in kappas.windows(2) {
        if p[0] - p[1] < cfg.degeneracy_tol {
            return Err(Error::DegenerateRoots(p[0].as_f64(), p[1].as_f64()));
        }
    }
    kappas
        .into_iter()
        .map(|kappa| Ok(BoundState { kappa, c: norming_constant(q, kappa, cfg.jost.max_step)? }))
        .collect()
}

/// `c = ‖ψ₋(·, iκ)‖⁻²` by Simpson's rule across the support plus exact exponential tails.
pub fn norming_constant<T: Real>(q: &Potential<T>, kappa: T, max_step: T) -> Result<T> {
    let mesh = q.fine_mesh(max_step);
    let (lo, _) = q.support();
    let k = cplx(T::zero(), kappa);
    let two = T::of(2.0);
    let mut u = initial(k, Side::Left);
    let psi2 = |u: &State<T>, x: T| {
        let v = u[0].re * (kappa * x).exp();
        v * v
    };
    let mut integral = (two * kappa * lo).exp() / (two * kappa);
    for i in 0..mesh.nodes.len() - 1 {
        let (x0, x1) = (mesh.nodes[i], mesh.nodes[i + 1]);
        if x1 <= lo {
            continue;
        }
        let xm = (x0 + x1) * T::of(0.5);
        let um = step(q, mesh.constant[i], x0, xm, k, -T::one(), u)?;
        let u1 = step(q, mesh.constant[i], x0, x1, k, -T::one(), u)?;
        integral += (x1 - x0) / T::of(6.0) * (psi2(&u, x0) + T::of(4.0) * psi2(&um, xm) + psi2(&u1, x1));
        u = u1;
    }
    let end = *mesh.nodes.last().unwrap_or(&T::zero());
    integral += psi2(&u, end) / (two * kappa);
    Ok(T::one() / integral)
}

/// Symmetric real momentum grid `±(gap + j·dk)`, ascending.
pub fn symmetric_k_grid<T: Real>(k_max: T, dk: T, gap: T) -> Result<Vec<T>> {
    if !(dk > T::zero()) || !(gap > T::zero()) || !(k_max > gap) {
        return Err(Error::InvalidInput("k grid needs 0 < gap < k_max and dk > 0".into()));
    }
    let n = ((k_max - gap) / dk).floor().as_f64() as usize;
    let pos: Vec<T> = (0..=n).map(|j| gap + dk * T::count(j)).collect();
    let mut grid: Vec<T> = pos.iter().rev().map(|k| -*k).collect();
    grid.extend(pos);
    Ok(grid)
}

/// Scattering data on a real momentum grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScatteringSlice<T> {
    pub k_grid: Vec<T>,
    #[serde(rename = "T")]
    pub t: Vec<Complex<T>>,
    #[serde(rename = "R")]
    pub r: Vec<Complex<T>>,
    #[serde(rename = "L")]
    pub l: Vec<Complex<T>>,
    pub bound_states: Vec<BoundState<T>>,
    pub source_potential_hash: String,
    /// max over the grid of `||T|²+|R|²-1|` and `||T|²+|L|²-1|`.
    pub unitarity_residual: T,
    /// Grid indices where the transmission Wronskian was nearly singular.
    pub flagged: Vec<usize>,
}

/// Transmission Wronskians with `|W|/(2|k|)` below this are flagged.
const WRONSKIAN_FLOOR: f64 = 1e-10;

/// T, R, L on `k_grid` and the bound-state list of `q`.
pub fn scattering_coefficients<T: Real>(
    q: &Potential<T>,
    k_grid: &[T],
    bs_cfg: &BoundStateConfig<T>,
) -> Result<ScatteringSlice<T>> {
    if k_grid.iter().any(|k| *k == T::zero()) {
        return Err(Error::InvalidInput("k grid must exclude 0".into()));
    }
    let mesh = q.mesh(bs_cfg.jost.max_step);
    let coeffs: Vec<Coefficients<T>> =
        k_grid.par_iter().map(|&k| coefficients_at(q, &mesh, k)).collect::<Result<_>>()?;
    let bound = bound_states(q, bs_cfg)?;
    let mut residual = T::zero();
    let mut flagged = vec![];
    for (i, c) in coeffs.iter().enumerate() {
        let t2 = c.t.norm_sqr();
        residual = residual
            .max_of((t2 + c.r.norm_sqr() - T::one()).mag())
            .max_of((t2 + c.l.norm_sqr() - T::one()).mag());
        if c.wronskian_scale < T::of(WRONSKIAN_FLOOR) {
            flagged.push(i);
        }
    }
    Ok(ScatteringSlice {
        k_grid: k_grid.to_vec(),
        t: coeffs.iter().map(|c| c.t).collect(),
        r: coeffs.iter().map(|c| c.r).collect(),
        l: coeffs.iter().map(|c| c.l).collect(),
        bound_states: bound,
        source_potential_hash: q.digest(),
        unitarity_residual: residual,
        flagged,
    })
}

impl<T: Real> ScatteringSlice<T> {
    /// Largest `|L(-k) - conj L(k)|` and `|T(-k) - conj T(k)|` over mirrored grid pairs.
    pub fn conjugate_symmetry_residual(&self) -> T {
        let n = self.k_grid.len();
        let mut worst = T::zero();
        for i in 0..n / 2 {
            let j = n - 1 - i;
            if (self.k_grid[i] + self.k_grid[j]).mag() > T::of(1e-12) * self.k_grid[j].mag() {
                continue;
            }
            worst = worst
                .max_of(cabs(self.l[i] - self.l[j].conj()))
                .max_of(cabs(self.t[i] - self.t[j].conj()))
                .max_of(cabs(self.r[i] - self.r[j].conj()));
        }
        worst
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
