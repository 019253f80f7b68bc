//! Executable residual checks of the identities behind the reconstruction.
//!
//! Each check computes its two sides through separate code paths: scattering
//! data on one side, the potential (or an independent quadrature) on the other.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::hankel_norm;
use crate::potential::{GridSpec, Potential};
use crate::reconstruct::{PathKind, ReconstructParams, Reconstructor, SpectralData};
use crate::scalar::{c_to_f64, cabs, cis, creal, imag_unit, Real, C};
use crate::scattering::{
    bound_states, coefficients_at, l_analytic_unchecked, norming_constant, BoundState, BoundStateConfig,
    Coefficients, JostConfig, ScatteringSlice,
};

/// One side of a check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Real(f64),
    Complex([f64; 2]),
}

impl Value {
    fn complex(z: C<f64>) -> Self {
        Value::Complex([z.re, z.im])
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: Value,
    pub rhs: Value,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, lhs: Value, rhs: Value, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), lhs, rhs, residual, tolerance, pass: residual <= tolerance, detail: None }
    }

    /// Inequality `lhs ≤ rhs`; the residual is the excess `lhs - rhs` clipped at 0.
    fn bound(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let mut c = Check::new(name, Value::Real(lhs), Value::Real(rhs), (lhs - rhs).max(0.0), 0.0);
        c.pass = lhs <= rhs;
        c
    }

    /// `lhs ≤ rhs + slack`, for sides that bottom out at roundoff.
    fn bound_with_slack(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        let mut c = Check::bound(name, lhs, rhs);
        c.tolerance = slack;
        c.pass = lhs <= rhs + slack;
        c
    }

    fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub potential_digest: String,
    pub preset_tag: Option<String>,
    pub grid: GridSpec<f64>,
    pub k_range: (f64, f64),
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Tolerances of the suite.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub unitarity: f64,
    pub zf_trace: f64,
    pub layer_stripping: f64,
    pub residue: f64,
    /// Required gap `1 - ‖H‖`.
    pub hankel_margin: f64,
    /// Width of the band around the fitted rate constant (multiplicative).
    pub rate_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { unitarity: 1e-6, zf_trace: 1e-3, layer_stripping: 1e-6, residue: 1e-4, hankel_margin: 0.0, rate_band: 2.0 }
    }
}

/// Differences of reflection coefficients below this are roundoff.
pub const L_RESOLUTION: f64 = 1e-11;

/// `T, R, L` of `q` on a real grid.
pub fn coefficients_on<T: Real>(q: &Potential<T>, k_grid: &[T], cfg: &JostConfig<T>) -> Result<Vec<Coefficients<T>>> {
    let mesh = q.mesh(cfg.max_step);
    k_grid.par_iter().map(|&k| coefficients_at(q, &mesh, k)).collect()
}

/// Trapezoid integral of samples `f(k)` over the positive half of a symmetric
/// grid, with `f(0) = 0` closing the gap at the origin.
fn positive_half_integral<T: Real>(k_grid: &[T], f: impl Fn(usize) -> T) -> T {
    let idx: Vec<usize> = (0..k_grid.len()).filter(|&i| k_grid[i] > T::zero()).collect();
    let mut total = T::zero();
    let (mut k0, mut f0) = (T::zero(), T::zero());
    for i in idx {
        let (k1, f1) = (k_grid[i], f(i));
        total += (k1 - k0) * (f0 + f1) * T::of(0.5);
        k0 = k1;
        f0 = f1;
    }
    total
}

/// `∫_K^∞ g` for `g ~ C/k²`. `C` is a Hann-weighted mean of `k² g` over the
/// top half of the positive grid, so oscillations from jumps in `q` average out.
fn power_tail<T: Real>(k_grid: &[T], g: impl Fn(usize) -> T) -> T {
    let k_top = k_grid.iter().copied().fold(T::zero(), |a, b| a.max_of(b));
    let lo = T::of(0.5) * k_top;
    let (mut sum, mut norm) = (T::zero(), T::zero());
    for (i, k) in k_grid.iter().enumerate() {
        if *k >= lo {
            let s = (T::pi() * (*k - lo) / (k_top - lo)).sin();
            sum += s * s * *k * *k * g(i);
            norm += s * s;
        }
    }
    if norm == T::zero() {
        return T::zero();
    }
    sum / norm / k_top
}

/// `max ||T|²+|R|²-1|` and `max ||T|²+|L|²-1|` recomputed from the slice values.
pub fn check_unitarity<T: Real>(slice: &ScatteringSlice<T>, tol: f64) -> Check {
    let (mut worst, mut at) = (0.0f64, 1.0f64);
    for i in 0..slice.k_grid.len() {
        let t2 = slice.t[i].norm_sqr().as_f64();
        for s in [t2 + slice.r[i].norm_sqr().as_f64(), t2 + slice.l[i].norm_sqr().as_f64()] {
            if (s - 1.0).abs() > worst {
                worst = (s - 1.0).abs();
                at = s;
            }
        }
    }
    Check::new("unitarity", Value::Real(at), Value::Real(1.0), worst, tol)
}

/// `(16/3)Σκ³ + (8/π)∫_0^∞ k² log(1-|L|²)⁻¹ dk` against `∫q²`.
///
/// The `k` integral runs over the positive half-line; by `|L(-k)| = |L(k)|`
/// this is half the integral over ℝ. Beyond the grid a `C/k²` tail is added.
pub fn check_zf_trace<T: Real>(q: &Potential<T>, slice: &ScatteringSlice<T>, tol: f64) -> Check {
    let g = |i: usize| {
        let k = slice.k_grid[i].as_f64();
        let l2 = slice.l[i].norm_sqr().as_f64();
        k * k * -(1.0 - l2).ln()
    };
    let k = slice.k_grid.iter().map(|v| v.as_f64()).collect::<Vec<_>>();
    let body = positive_half_integral(&k, g);
    let tail = power_tail(&k, |i| if k[i] > 0.0 { g(i) } else { 0.0 });
    let kappa3: f64 = slice.bound_states.iter().map(|b| b.kappa.as_f64().powi(3)).sum();
    let lhs = 16.0 / 3.0 * kappa3 + 8.0 / std::f64::consts::PI * (body + tail);
    let rhs = q.integral_of_square().as_f64();
    let residual = if rhs > 0.0 { (lhs - rhs).abs() / rhs } else { lhs.abs() };
    if let Some(i) = (0..slice.k_grid.len()).find(|&i| !(slice.l[i].norm_sqr().as_f64() < 1.0)) {
        return Check::new("zf_trace", Value::Real(f64::INFINITY), Value::Real(rhs), f64::INFINITY, tol)
            .with_detail(format!("|L| >= 1 at k = {}", slice.k_grid[i].as_f64()));
    }
    let mut check = Check::new("zf_trace", Value::Real(lhs), Value::Real(rhs), residual, tol)
        .with_detail(format!("tail beyond k = {:.3}: {:.3e}", k.last().copied().unwrap_or(0.0), 8.0 / std::f64::consts::PI * tail));
    if rhs > 0.0 && 8.0 / std::f64::consts::PI * tail > 0.1 * rhs {
        check.pass = false;
        check.detail = Some("k range too narrow: tail estimate above 10% of ∫q²".into());
    }
    check
}

/// `L = L_b + T_b² L_{>b} / (1 - R_b L_{>b})` with `L_{>b}` the reflection of
/// `q·1_(b,∞)` in the original frame, plus `|L - L_b| ≤ 2|L_{>b}|`.
pub fn check_layer_stripping<T: Real>(q: &Potential<T>, b: T, k_grid: &[T], cfg: &JostConfig<T>, tol: f64) -> Result<Vec<Check>> {
    let end = q.support().1;
    let whole = coefficients_on(q, k_grid, cfg)?;
    let inner = coefficients_on(&q.truncate(b)?, k_grid, cfg)?;
    let outer: Vec<Coefficients<T>> = if b < end {
        coefficients_on(&q.restrict(b, q.b_max())?, k_grid, cfg)?
    } else {
        // nothing beyond b: L_{>b} = 0
        let zero = C::new(T::zero(), T::zero());
        vec![Coefficients { t: creal(T::one()), r: zero, l: zero, wronskian_scale: T::one() }; k_grid.len()]
    };
    let (mut worst, mut worst_i) = (0.0f64, 0usize);
    let mut min_den = f64::INFINITY;
    let mut excess = f64::NEG_INFINITY;
    let (mut ex_l, mut ex_r) = (0.0, 0.0);
    for i in 0..k_grid.len() {
        let den = C::new(T::one(), T::zero()) - inner[i].r * outer[i].l;
        min_den = min_den.min(cabs(den).as_f64());
        let composed = inner[i].l + inner[i].t * inner[i].t * outer[i].l / den;
        let r = cabs(whole[i].l - composed).as_f64();
        if r > worst {
            worst = r;
            worst_i = i;
        }
        let lhs = cabs(whole[i].l - inner[i].l).as_f64();
        let rhs = 2.0 * cabs(outer[i].l).as_f64();
        if lhs - rhs > excess {
            excess = lhs - rhs;
            ex_l = lhs;
            ex_r = rhs;
        }
    }
    let i = worst_i;
    let composed = c_to_f64(inner[i].l + inner[i].t * inner[i].t * outer[i].l / (creal(T::one()) - inner[i].r * outer[i].l));
    let mut identity = Check::new(
        format!("layer_stripping(b={})", b.as_f64()),
        Value::complex(c_to_f64(whole[i].l)),
        Value::complex(composed),
        worst,
        tol,
    )
    .with_detail(format!("worst at k = {:.6}; min |1 - R_b L_>b| = {min_den:.3e}", k_grid[i].as_f64()));
    if min_den < 1e-6 {
        identity.pass = false;
        identity.detail = Some(format!("near-zero denominator 1 - R_b L_>b ({min_den:.3e})"));
    }
    let pointwise = Check::bound_with_slack(format!("layer_stripping_bound(b={})", b.as_f64()), ex_l, ex_r, L_RESOLUTION)
        .with_detail("worst k of |L - L_b| - 2|L_>b|");
    Ok(vec![identity, pointwise])
}

/// Precondition `(Q/2a) e^{Q/a} < 1` with `Q = ‖q‖₁`.
pub fn rate_precondition(q_l1: f64, a: f64) -> f64 {
    q_l1 / (2.0 * a) * (q_l1 / a).exp()
}

/// Smallest `a` with the precondition below 1, times `margin`.
pub fn admissible_a(q_l1: f64, margin: f64) -> f64 {
    if q_l1 == 0.0 {
        return margin;
    }
    let (mut lo, mut hi) = (1e-3 * q_l1, 1e3 * q_l1);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rate_precondition(q_l1, mid) < 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi * margin
}

/// Per-truncation measurements of [`check_truncation_rates`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatePoint {
    pub b: f64,
    /// `sup_{|k|≥a} |k (L - L_b)|`
    pub sup_kl: f64,
    /// `‖q - q_b‖₁`
    pub tail_l1: f64,
    /// `∫ k² |L - L_b|²` over ℝ (grid plus tail)
    pub k2_l2: f64,
    /// `(π/2) ∫_b^∞ q²`
    pub tail_sq: f64,
}

/// Truncation curves over `b_list` at rectangle height `a`.
pub fn truncation_rates<T: Real>(q: &Potential<T>, b_list: &[T], a: T, k_grid: &[T], cfg: &JostConfig<T>) -> Result<Vec<RatePoint>> {
    let q1 = q.l1_exact().as_f64();
    let pre = rate_precondition(q1, a.as_f64());
    if !(pre < 1.0) {
        return Err(Error::InvalidInput(format!("a = {} violates (Q/2a)e^(Q/a) < 1 (value {pre:.3})", a.as_f64())));
    }
    let whole = coefficients_on(q, k_grid, cfg)?;
    let end = q.support().1;
    let k: Vec<f64> = k_grid.iter().map(|v| v.as_f64()).collect();
    let mut out = vec![];
    for &b in b_list {
        let (tail_l1, tail_sq) = if b < end {
            let rest = q.restrict(b, q.b_max())?;
            (rest.l1_exact().as_f64(), std::f64::consts::FRAC_PI_2 * rest.integral_of_square().as_f64())
        } else {
            (0.0, 0.0)
        };
        let part = coefficients_on(&q.truncate(b.min_of(q.b_max()))?, k_grid, cfg)?;
        let diff: Vec<f64> = whole.iter().zip(&part).map(|(w, p)| cabs(w.l - p.l).as_f64()).collect();
        let sup_kl = k.iter().zip(&diff).filter(|(k, _)| k.abs() >= a.as_f64()).map(|(k, d)| k.abs() * d).fold(0.0, f64::max);
        let g = |i: usize| k[i] * k[i] * diff[i] * diff[i];
        // |L - L_b| is even in k
        let k2_l2 = 2.0 * (positive_half_integral(&k, g) + power_tail(&k, |i| if k[i] > 0.0 { g(i) } else { 0.0 }));
        out.push(RatePoint { b: b.as_f64(), sup_kl, tail_l1, k2_l2, tail_sq });
    }
    Ok(out)
}

/// The rate curve `sup|k(L - L_b)|` against `‖q - q_b‖₁` (one fitted constant,
/// every ratio within `band` of it) and `∫k²|L - L_b|² ≤ (π/2)∫_b^∞ q²` at each `b`.
pub fn check_truncation_rates<T: Real>(
    q: &Potential<T>,
    b_list: &[T],
    a: T,
    k_grid: &[T],
    cfg: &JostConfig<T>,
    band: f64,
) -> Result<Vec<Check>> {
    let pts = truncation_rates(q, b_list, a, k_grid, cfg)?;
    let mut checks = vec![];
    // tails below the resolution of L carry no rate information; there both sides must vanish
    let resolved = |p: &RatePoint| p.tail_l1 > 1e3 * L_RESOLUTION;
    let ratios: Vec<f64> = pts.iter().filter(|p| resolved(p)).map(|p| p.sup_kl / p.tail_l1).collect();
    let vanished = pts.iter().filter(|p| !resolved(p)).map(|p| p.sup_kl).fold(0.0, f64::max);
    if ratios.is_empty() {
        checks.push(Check::new("truncation_rate", Value::Real(vanished), Value::Real(0.0), vanished, 1e3 * L_RESOLUTION));
    } else {
        let fitted = (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp();
        let spread = ratios.iter().map(|r| (r / fitted).max(fitted / r)).fold(1.0, f64::max);
        let mut c = Check::new("truncation_rate", Value::Real(spread), Value::Real(band), (spread - band).max(0.0), 0.0)
            .with_detail(format!(
                "C = {fitted:.4}; ratios {:?}",
                ratios.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>()
            ));
        c.pass = spread <= band && vanished <= 1e3 * L_RESOLUTION;
        checks.push(c);
    }
    for p in &pts {
        checks.push(
            Check::bound_with_slack(format!("truncation_l2(b={})", p.b), p.k2_l2, p.tail_sq, L_RESOLUTION * L_RESOLUTION * 1e3)
                .with_detail(format!("sup|k(L-L_b)| = {:.4e}", p.sup_kl)),
        );
    }
    Ok(checks)
}

/// `(2πi)⁻¹∮ L dλ` on a circle around `iκ`, trapezoid rule with `n` nodes.
pub fn residue_of_l<T: Real>(q: &Potential<T>, kappa: T, radius: T, n: usize, cfg: &JostConfig<T>) -> Result<C<T>> {
    let center = C::new(T::zero(), kappa);
    let mut sum = C::new(T::zero(), T::zero());
    for j in 0..n {
        let e = cis(T::two_pi() * T::count(j) / T::count(n));
        let z = center + e * radius;
        // dλ = i r e^{iθ} dθ, and the 1/(2πi) cancels 2π and i
        sum += l_analytic_unchecked(q, z, cfg)? * e * radius;
    }
    Ok(sum / T::count(n))
}

/// Residues of `L` at the bound states against `i c_n`, and `Σκ ≤ ½‖q‖₁`.
pub fn check_residues_and_lt<T: Real>(q: &Potential<T>, bound: &[BoundState<T>], cfg: &JostConfig<T>, tol: f64) -> Result<Vec<Check>> {
    let mut out = vec![];
    for (n, b) in bound.iter().enumerate() {
        let mut r = b.kappa * T::of(0.5);
        for (m, o) in bound.iter().enumerate() {
            if m != n {
                r = r.min_of((o.kappa - b.kappa).mag() * T::of(0.5));
            }
        }
        let lhs = residue_of_l(q, b.kappa, r, 128, cfg)?;
        // the norming constant again, from the normalized left solution
        let c = norming_constant(q, b.kappa, cfg.max_step)?;
        let rhs = imag_unit::<T>() * c;
        let residual = (cabs(lhs - rhs) / c.mag()).as_f64();
        out.push(
            Check::new(format!("residue(kappa={:.6})", b.kappa.as_f64()), Value::complex(c_to_f64(lhs)), Value::complex(c_to_f64(rhs)), residual, tol)
                .with_detail(format!("circle radius {:.4}", r.as_f64())),
        );
    }
    let sum: f64 = bound.iter().map(|b| b.kappa.as_f64()).sum();
    out.push(Check::bound("lieb_thirring", sum, 0.5 * q.l1_exact().as_f64()));
    Ok(out)
}

/// `‖H‖` of the reflection-only operator (bound states dropped) at `(x, t)`.
pub fn reflection_hankel_norm<T: Real>(q: &Potential<T>, x: T, t: T, params: &ReconstructParams<T>) -> Result<T> {
    let data = SpectralData::from_potential(q, &BoundStateConfig::for_potential(q))?.reflection_only();
    let r = Reconstructor::new(&data, *params, PathKind::Proposition);
    let prepared = r.prepare(&[x], &[t])?;
    let slab = r.slab(&prepared, t, &[x])?;
    Ok(hankel_norm(&r.system_at(&slab, x)))
}

pub fn check_hankel_norm_lt1<T: Real>(q: &Potential<T>, x: T, t: T, params: &ReconstructParams<T>, margin: f64) -> Result<Check> {
    let norm = reflection_hankel_norm(q, x, t, params)?.as_f64();
    let mut c = Check::bound(format!("hankel_norm(x={}, t={})", x.as_f64(), t.as_f64()), norm, 1.0 - margin)
        .with_detail(format!("margin {:.4e}", 1.0 - norm));
    c.pass = norm < 1.0 - margin;
    Ok(c)
}

/// Options of [`validate_potential`].
#[derive(Clone, Debug)]
pub struct SuiteOptions<T> {
    pub k_grid: Vec<T>,
    pub tolerances: Tolerances,
    /// Truncation points; those outside `(0, b_max]` are dropped.
    pub b_list: Vec<T>,
    /// Rectangle height of the rate check; the smallest admissible value times 1.25 when absent.
    pub rate_a: Option<T>,
    pub hankel_points: Vec<(T, T)>,
    pub reconstruct: ReconstructParams<T>,
}

impl<T: Real> Default for SuiteOptions<T> {
    fn default() -> Self {
        SuiteOptions {
            k_grid: crate::scattering::symmetric_k_grid(T::of(20.0), T::of(0.005), T::of(0.0025)).expect("static grid"),
            tolerances: Tolerances::default(),
            b_list: vec![T::of(2.0), T::of(4.0), T::of(8.0)],
            rate_a: None,
            hankel_points: vec![(T::zero(), T::of(0.1)), (T::zero(), T::of(0.5)), (T::of(2.0), T::of(0.1)), (T::of(2.0), T::of(0.5))],
            reconstruct: ReconstructParams::default(),
        }
    }
}

/// Runs every check on one potential.
pub fn validate_potential<T: Real>(q: &Potential<T>, opts: &SuiteOptions<T>) -> Result<ValidationReport> {
    let bs_cfg = BoundStateConfig::for_potential(q);
    let mesh = q.mesh(bs_cfg.jost.max_step);
    let coeffs: Vec<Coefficients<T>> = opts.k_grid.par_iter().map(|&k| coefficients_at(q, &mesh, k)).collect::<Result<_>>()?;
    let slice = ScatteringSlice {
        k_grid: opts.k_grid.clone(),
        t: coeffs.iter().map(|c| c.t).collect(),
        r: coeffs.iter().map(|c| c.r).collect(),
        l: coeffs.iter().map(|c| c.l).collect(),
        bound_states: bound_states(q, &bs_cfg)?,
        source_potential_hash: q.digest(),
        unitarity_residual: T::zero(),
        flagged: vec![],
    };
    validate_with_slice(q, &slice, opts)
}

/// Same suite, but unitarity, the trace formula and the residues use the
/// supplied slice instead of a fresh forward solve. The slice must belong to `q`.
pub fn validate_with_slice<T: Real>(q: &Potential<T>, slice: &ScatteringSlice<T>, opts: &SuiteOptions<T>) -> Result<ValidationReport> {
    if slice.source_potential_hash != q.digest() {
        return Err(Error::InvalidInput("scattering slice was computed from a different potential".into()));
    }
    let tol = opts.tolerances;
    let cfg = BoundStateConfig::for_potential(q).jost;
    let mut checks = vec![check_unitarity(slice, tol.unitarity), check_zf_trace(q, slice, tol.zf_trace)];
    let end = q.support().1;
    if end > T::zero() {
        checks.extend(check_layer_stripping(q, end * T::of(0.5), &opts.k_grid, &cfg, tol.layer_stripping)?);
        let a = opts.rate_a.unwrap_or_else(|| T::of(admissible_a(q.l1_exact().as_f64(), 1.25)));
        let bs: Vec<T> = opts.b_list.iter().copied().filter(|b| *b > T::zero() && *b <= q.b_max()).collect();
        checks.extend(check_truncation_rates(q, &bs, a, &opts.k_grid, &cfg, tol.rate_band)?);
    }
    checks.extend(check_residues_and_lt(q, &slice.bound_states, &cfg, tol.residue)?);
    for &(x, t) in &opts.hankel_points {
        checks.push(check_hankel_norm_lt1(q, x, t, &opts.reconstruct, tol.hankel_margin)?);
    }
    let grid = q.grid();
    Ok(ValidationReport {
        potential_digest: q.digest(),
        preset_tag: q.preset_tag().map(str::to_string),
        grid: GridSpec { grid_step: grid.grid_step.as_f64(), b_max: grid.b_max.as_f64() },
        k_range: (
            slice.k_grid.first().map(|k| k.as_f64()).unwrap_or(0.0),
            slice.k_grid.last().map(|k| k.as_f64()).unwrap_or(0.0),
        ),
        checks,
    })
}
