//! The deformed contour Γ, quadrature along it, and the Hankel symbol Φ.
//!
//! Γ runs from `-K` to `-a` on the real axis, around the rectangle
//! `-a → -a + ia → a + ia → a`, and from `a` to `K`. Every node carries a
//! complex weight that already includes `dλ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::Rule;
use crate::scalar::{cabs, cln, cplx, creal, imag_unit, xi_inv, Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    RayLeft,
    RectSideLeft,
    RectTop,
    RectSideRight,
    RayRight,
    /// `[-a, a]` on the real axis; only used by the real-line rule.
    Middle,
}

impl Segment {
    pub fn is_ray(self) -> bool {
        matches!(self, Segment::RayLeft | Segment::RayRight)
    }

    pub fn is_rect(self) -> bool {
        matches!(self, Segment::RectSideLeft | Segment::RectTop | Segment::RectSideRight)
    }
}

/// Quadrature nodes along Γ, ordered left to right.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContourSpec<T> {
    pub a: T,
    pub ray_cutoff: T,
    pub nodes: Vec<C<T>>,
    pub weights: Vec<C<T>>,
    pub segment_tags: Vec<Segment>,
    /// Estimated size of the neglected ray tails (0 when unknown).
    pub truncation_estimate: T,
}

fn push_segment<T: Real>(spec: &mut ContourSpec<T>, rule: &Rule<T>, map: impl Fn(T) -> C<T>, dir: C<T>, tag: Segment) {
    for (s, w) in rule.nodes.iter().zip(&rule.weights) {
        spec.nodes.push(map(*s));
        spec.weights.push(dir * *w);
        spec.segment_tags.push(tag);
    }
}

fn check_geometry<T: Real>(a: T, k_cut: T, kappas: &[T]) -> Result<()> {
    if !(a > T::zero()) {
        return Err(Error::Contour(format!("a = {} must be positive", a.as_f64())));
    }
    if !(k_cut > a) {
        return Err(Error::Contour(format!("ray cutoff K = {} must exceed a = {}", k_cut.as_f64(), a.as_f64())));
    }
    if let Some(k) = kappas.iter().find(|k| **k >= a) {
        return Err(Error::Contour(format!("a = {} is not above the pole at i*{}", a.as_f64(), k.as_f64())));
    }
    Ok(())
}

/// Breaks on `[lo, hi]` with panel length at most `max_len`.
fn even_breaks<T: Real>(lo: T, hi: T, max_len: T) -> Vec<T> {
    let n = ((hi - lo) / max_len).as_f64().ceil().max(1.0) as usize;
    (0..=n).map(|i| lo + (hi - lo) * T::count(i) / T::count(n)).collect()
}

impl<T: Real> ContourSpec<T> {
    fn empty(a: T, k_cut: T) -> Self {
        ContourSpec {
            a,
            ray_cutoff: k_cut,
            nodes: vec![],
            weights: vec![],
            segment_tags: vec![],
            truncation_estimate: T::zero(),
        }
    }

    /// Assembles Γ from a ray rule on `[a, K]` (mirrored for the left ray) and
    /// rules on `[0, a]` for the sides and `[-a, a]` for the top.
    fn assemble(a: T, k_cut: T, ray: &Rule<T>, side: &Rule<T>, top: &Rule<T>) -> Self {
        let mut spec = Self::empty(a, k_cut);
        let one = creal(T::one());
        let i = imag_unit::<T>();
        let mirrored = Rule {
            nodes: ray.nodes.iter().rev().map(|s| -*s).collect(),
            weights: ray.weights.iter().rev().copied().collect(),
        };
        push_segment(&mut spec, &mirrored, creal, one, Segment::RayLeft);
        push_segment(&mut spec, side, |y| cplx(-a, y), i, Segment::RectSideLeft);
        push_segment(&mut spec, top, |s| cplx(s, a), one, Segment::RectTop);
        let down = Rule {
            nodes: side.nodes.iter().rev().copied().collect(),
            weights: side.weights.iter().rev().copied().collect(),
        };
        push_segment(&mut spec, &down, |y| cplx(a, y), -i, Segment::RectSideRight);
        push_segment(&mut spec, ray, creal, one, Segment::RayRight);
        spec
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_Γ f(λ) dλ`.
    pub fn integrate(&self, f: impl Fn(C<T>) -> C<T>) -> C<T> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(C::new(T::zero(), T::zero()), |acc, (l, w)| acc + f(*l) * *w)
    }

    /// Nodes and weights of the ray segments only.
    pub fn ray_part(&self) -> impl Iterator<Item = (C<T>, C<T>)> + '_ {
        self.part(Segment::is_ray)
    }

    /// Nodes and weights of the rectangle segments only.
    pub fn rect_part(&self) -> impl Iterator<Item = (C<T>, C<T>)> + '_ {
        self.part(Segment::is_rect)
    }

    fn part(&self, keep: fn(Segment) -> bool) -> impl Iterator<Item = (C<T>, C<T>)> + '_ {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.segment_tags)
            .filter(move |(_, tag)| keep(**tag))
            .map(|((l, w), _)| (*l, *w))
    }

    /// Fails unless every `iκ` lies strictly below the rectangle top.
    pub fn check_above_poles(&self, kappas: &[T]) -> Result<()> {
        check_geometry(self.a, self.ray_cutoff, kappas)
    }

    /// The same rays with `[-a, a]` on the real axis in place of the rectangle,
    /// using panels no longer than `max_panel`.
    pub fn real_line_rule(&self, max_panel: T, order: usize) -> Self {
        let mut spec = Self::empty(self.a, self.ray_cutoff);
        spec.truncation_estimate = self.truncation_estimate;
        let mid = Rule::composite(&even_breaks(-self.a, self.a, max_panel), order);
        for ((l, w), tag) in self.nodes.iter().zip(&self.weights).zip(&self.segment_tags) {
            if *tag == Segment::RayLeft {
                spec.nodes.push(*l);
                spec.weights.push(*w);
                spec.segment_tags.push(*tag);
            }
        }
        push_segment(&mut spec, &mid, creal, creal(T::one()), Segment::Middle);
        for ((l, w), tag) in self.nodes.iter().zip(&self.weights).zip(&self.segment_tags) {
            if *tag == Segment::RayRight {
                spec.nodes.push(*l);
                spec.weights.push(*w);
                spec.segment_tags.push(*tag);
            }
        }
        spec
    }
}

/// Γ with `n_ray` Gauss–Legendre nodes split evenly between the two rays,
/// `n_side` on each vertical side and `n_top` on the top.
pub fn build_contour<T: Real>(a: T, k_cut: T, n_ray: usize, n_side: usize, n_top: usize, kappas: &[T]) -> Result<ContourSpec<T>> {
    check_geometry(a, k_cut, kappas)?;
    if n_ray % 2 != 0 {
        return Err(Error::Contour(format!("n_ray = {n_ray} must be even")));
    }
    const ORDER: usize = 16;
    let ray = Rule::with_node_count(a, k_cut, n_ray / 2, ORDER);
    let side = Rule::with_node_count(T::zero(), a, n_side, ORDER);
    let top = Rule::with_node_count(-a, a, n_top, ORDER);
    Ok(ContourSpec::assemble(a, k_cut, &ray, &side, &top))
}

/// Settings of the graded contour used by the reconstruction.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Real + serde::de::DeserializeOwned"))]
pub struct ContourParams<T> {
    /// Fixed rectangle size; derived from the bound states when absent.
    pub a: Option<T>,
    /// Gap between the largest `κ` and `a`.
    pub a_margin: T,
    /// Fixed ray cutoff; derived from `ray_tol` when absent.
    pub ray_cutoff: Option<T>,
    /// Target size of the neglected ray tails.
    pub ray_tol: T,
    /// Upper limit for the derived cutoff.
    pub max_cutoff: T,
    /// Phase (radians) allowed per ray panel.
    pub phase_per_panel: T,
    /// Longest ray panel.
    pub max_ray_panel: T,
    /// Longest panel on the rectangle and on `[-a, a]`.
    pub max_rect_panel: T,
    pub order: usize,
    /// Largest admissible `16 t a³`, the log-size of `ξ⁻¹` on the rectangle top.
    pub max_growth: T,
}

impl<T: Real> Default for ContourParams<T> {
    fn default() -> Self {
        ContourParams {
            a: None,
            a_margin: T::of(0.25),
            ray_cutoff: None,
            ray_tol: T::of(1e-5),
            max_cutoff: T::of(400.0),
            phase_per_panel: T::of(16.0),
            max_ray_panel: T::of(1.0),
            max_rect_panel: T::of(0.25),
            order: 16,
            max_growth: T::of(200.0),
        }
    }
}

/// Bound on the neglected ray tails of `(1/2π)∫ λ L e^{-8iλ³t + iλu} dλ`
/// when `|L(λ)| ≤ c_l/λ²` for `λ ≥ K` and `|u| ≤ u_max`, by one integration by parts.
pub fn tail_estimate<T: Real>(c_l: T, k_cut: T, t: T, u_max: T) -> T {
    let slope = T::of(24.0) * t * k_cut * k_cut - u_max;
    if !(slope > T::zero()) {
        return T::of(f64::INFINITY);
    }
    T::of(4.0) * c_l / (T::pi() * k_cut * slope)
}

/// Rectangle size for the given bound states.
pub fn default_a<T: Real>(kappas: &[T], margin: T) -> T {
    match kappas.iter().copied().reduce(|a, b| a.max_of(b)) {
        Some(k) => k + margin,
        None => T::one(),
    }
}

/// Γ graded for time `t`: ray panels carry at most `phase_per_panel` radians of
/// `u_max λ + 8tλ³`, and the cutoff meets `ray_tol` via [`tail_estimate`].
pub fn graded_contour<T: Real>(params: &ContourParams<T>, kappas: &[T], t: T, u_max: T, c_l: T) -> Result<ContourSpec<T>> {
    graded_contour_span(params, kappas, t, t, u_max, c_l)
}

/// One Γ serving every time in `[t_min, t_max]`: the cutoff is set by `t_min`
/// and the ray grading by `t_max`.
pub fn graded_contour_span<T: Real>(
    params: &ContourParams<T>,
    kappas: &[T],
    t_min: T,
    t_max: T,
    u_max: T,
    c_l: T,
) -> Result<ContourSpec<T>> {
    if !(t_min > T::zero()) || t_max < t_min {
        return Err(Error::InvalidInput(format!("t = {} must be positive", t_min.as_f64())));
    }
    let t = t_min;
    let a = params.a.unwrap_or_else(|| default_a(kappas, params.a_margin));
    let growth = T::of(16.0) * t_max * a * a * a;
    if growth > params.max_growth {
        return Err(Error::Contour(format!(
            "|ξ⁻¹| on the rectangle reaches e^{:.1}; lower a or t",
            growth.as_f64()
        )));
    }
    let (k_cut, estimate) = match params.ray_cutoff {
        Some(k) => (k, tail_estimate(c_l, k, t, u_max)),
        None => {
            let mut k = (a + T::one()).max_of(a * T::of(2.0));
            while tail_estimate(c_l, k, t, u_max) > params.ray_tol && k < params.max_cutoff {
                k *= T::of(1.1);
            }
            let k = k.min_of(params.max_cutoff);
            (k, tail_estimate(c_l, k, t, u_max))
        }
    };
    check_geometry(a, k_cut, kappas)?;

    let phase = |l: T| u_max * l + T::of(8.0) * t_max * l * l * l;
    let dphase = |l: T| u_max + T::of(24.0) * t_max * l * l;
    let mut breaks = vec![a];
    let mut lo = a;
    while lo < k_cut {
        let target = phase(lo) + params.phase_per_panel;
        let mut l = lo + params.max_ray_panel;
        if phase(l) > target {
            // Newton from the left on the increasing convex phase
            l = lo;
            for _ in 0..60 {
                let step = (phase(l) - target) / dphase(l);
                l -= step;
                if step.mag() < T::of(1e-12) * (T::one() + l) {
                    break;
                }
            }
        }
        let hi = l.min_of(k_cut);
        let hi = if k_cut - hi < T::of(1e-9) * k_cut { k_cut } else { hi };
        breaks.push(hi);
        lo = hi;
    }
    let ray = Rule::composite(&breaks, params.order);
    let side = Rule::composite(&even_breaks(T::zero(), a, params.max_rect_panel), params.order);
    let top = Rule::composite(&even_breaks(-a, a, params.max_rect_panel), params.order);
    let mut spec = ContourSpec::assemble(a, k_cut, &ray, &side, &top);
    spec.truncation_estimate = estimate;
    Ok(spec)
}

/// Φ and ∂ₓΦ on a real grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolGrid<T> {
    pub k_grid: Vec<T>,
    pub phi_values: Vec<C<T>>,
    pub dphi_dx_values: Vec<C<T>>,
    pub x: T,
    pub t: T,
}

impl<T: Real> SymbolGrid<T> {
    /// Largest `|Φ(-k) - conj Φ(k)|` over mirrored grid pairs.
    pub fn symmetry_residual(&self) -> T {
        let n = self.k_grid.len();
        (0..n / 2)
            .map(|i| cabs(self.phi_values[i] - self.phi_values[n - 1 - i].conj()))
            .fold(T::zero(), |a, b| a.max_of(b))
    }
}

/// `Φ(k) = -(2πi)⁻¹ ∫_Γ ξ⁻¹L/(λ - (k - i0)) dλ` and its x-derivative on `k_grid`.
///
/// The singular ray integral is written as `∫ (G(λ) - G(k))/(λ - k) dλ + G(k) ∫ dλ/(λ - k)`
/// with `G = ξ⁻¹L`; the second integral over truncated Γ is `ln|(K-k)/(K+k)| - iπ`
/// for `|k| < K` (the `-iπ` is the `k - i0` half residue on the rays and the
/// winding around `k` for points under the rectangle), so `L` on the real grid is
/// needed as well.
pub fn symbol_phi<T: Real>(
    l_on_gamma: &[C<T>],
    contour: &ContourSpec<T>,
    x: T,
    t: T,
    k_grid: &[T],
    l_on_grid: &[C<T>],
) -> Result<SymbolGrid<T>> {
    if !(t > T::zero()) {
        return Err(Error::InvalidInput(format!("t = {} must be positive", t.as_f64())));
    }
    if l_on_gamma.len() != contour.len() || l_on_grid.len() != k_grid.len() {
        return Err(Error::InvalidInput("L values do not match the nodes".into()));
    }
    let i = imag_unit::<T>();
    let two = T::of(2.0);
    let g: Vec<C<T>> = contour.nodes.iter().zip(l_on_gamma).map(|(l, v)| xi_inv(*l, x, t) * *v).collect();
    let dg: Vec<C<T>> = contour.nodes.iter().zip(&g).map(|(l, v)| -(i * *l * two) * *v).collect();
    let k_cut = contour.ray_cutoff;
    let scale = -(creal(T::one()) / (i * two * T::pi()));
    let values: Vec<(C<T>, C<T>)> = k_grid
        .par_iter()
        .zip(l_on_grid)
        .map(|(&k, &lk)| {
            let kc = creal(k);
            let gk = xi_inv(kc, x, t) * lk;
            let dgk = -(i * kc * two) * gk;
            let mut s = C::new(T::zero(), T::zero());
            let mut ds = C::new(T::zero(), T::zero());
            for j in 0..contour.len() {
                let d = contour.nodes[j] - kc;
                if cabs(d) < T::of(1e-12) * (T::one() + k.mag()) {
                    return Err(Error::Contour(format!("k = {} coincides with a contour node", k.as_f64())));
                }
                let w = contour.weights[j] / d;
                s += (g[j] - gk) * w;
                ds += (dg[j] - dgk) * w;
            }
            let mut log = creal(((k_cut - k) / (k_cut + k)).mag().ln());
            if k.mag() < k_cut {
                log -= i * T::pi();
            }
            Ok(((s + gk * log) * scale, (ds + dgk * log) * scale))
        })
        .collect::<Result<_>>()?;
    Ok(SymbolGrid {
        k_grid: k_grid.to_vec(),
        phi_values: values.iter().map(|v| v.0).collect(),
        dphi_dx_values: values.iter().map(|v| v.1).collect(),
        x,
        t,
    })
}

/// `F(k) = ∫_{S_a} f(λ)/(λ - k) dλ` for real `k`, with `S_a` given by nodes and weights.
pub fn cauchy_transform<T: Real>(f_on_rect: &[C<T>], rect_nodes: &[C<T>], rect_weights: &[C<T>], k_grid: &[T]) -> Vec<C<T>> {
    k_grid
        .iter()
        .map(|&k| {
            f_on_rect
                .iter()
                .zip(rect_nodes)
                .zip(rect_weights)
                .fold(C::new(T::zero(), T::zero()), |acc, ((f, l), w)| acc + *f * *w / (*l - creal(k)))
        })
        .collect()
}

/// Principal-log antiderivative of `1/(λ - k)` along the straight segment `[p, q]`,
/// valid when the segment does not cross the cut of `Log(· - k)`.
pub fn segment_log<T: Real>(p: C<T>, q: C<T>, k: C<T>) -> C<T> {
    cln(q - k) - cln(p - k)
}
