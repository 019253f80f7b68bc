//! Hankel operators: Riesz projection, the Marchenko-type Nyström system for
//! `I + H`, its solves and spectral diagnostics, and the rational-basis matrix.
//!
//! Under the Fourier map between H² of the upper half-plane and L²(0, ∞) the
//! symbol `Φ_{x,t}(k) = ∫₀^∞ Ω(w) e^{-ikw} dw` turns `H(Φ)` into the integral
//! operator with kernel `Ω(w + v)`, where `Ω(w) = F(w - 2x)` and
//!
//! ```text
//! F(u) = (2π)⁻¹ ∫ L(λ) e^{-8iλ³t} e^{iλu} dλ + Σ c_n e^{-κ_n u - 8κ_n³ t}
//! ```
//!
//! with the integral along Γ (no pole terms) or along ℝ (with them).

use std::io::Write;
use std::path::Path;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use rustfft::{FftNum, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::contour::{ContourSpec, SymbolGrid};
use crate::error::{Error, Result};
use crate::quadrature::Rule;
use crate::scalar::{cabs, cexp, cplx, creal, imag_unit, Real, C};
use crate::scattering::BoundState;

/// Step of a uniform, symmetric grid.
pub fn uniform_step<T: Real>(k_grid: &[T]) -> Result<T> {
    let n = k_grid.len();
    if n < 2 {
        return Err(Error::NonUniformGrid);
    }
    let dk = k_grid[1] - k_grid[0];
    let tol = T::of(1e-9) * dk.mag().max_of(k_grid[n - 1].mag());
    for i in 0..n {
        if (k_grid[i] - k_grid[0] - dk * T::count(i)).mag() > tol || (k_grid[i] + k_grid[n - 1 - i]).mag() > tol {
            return Err(Error::NonUniformGrid);
        }
    }
    if !(dk > T::zero()) {
        return Err(Error::NonUniformGrid);
    }
    Ok(dk)
}

/// Orthogonal projection onto boundary values of H² of the lower half-plane,
/// i.e. onto the span of `e^{-iks}`, `s > 0`, computed with the DFT. The zero
/// and Nyquist modes are dropped.
pub fn riesz_project_minus<T: Real + FftNum>(f: &[C<T>], k_grid: &[T]) -> Result<Vec<C<T>>> {
    uniform_step(k_grid)?;
    if f.len() != k_grid.len() {
        return Err(Error::InvalidInput("values and grid differ in length".into()));
    }
    let n = f.len();
    let mut planner = FftPlanner::<T>::new();
    let mut buf = f.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    // bins 0 < m < n/2 carry e^{iks} with s > 0, which lie in the upper Hardy space
    for (m, v) in buf.iter_mut().enumerate() {
        if 2 * m <= n {
            *v = C::new(T::zero(), T::zero());
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = T::one() / T::count(n);
    Ok(buf.into_iter().map(|v| v * scale).collect())
}

/// Source of the Hankel kernel: `F(u)` and `F'(u)`.
pub trait HankelKernel<T: Real>: Sync {
    fn eval(&self, u: T) -> (C<T>, C<T>);
}

/// `F` as an explicit sum over quadrature nodes plus pole terms.
#[derive(Clone, Debug)]
pub struct SpectralKernel<T> {
    pub t: T,
    nodes: Vec<C<T>>,
    /// `w_j L_j e^{-8iλ_j³t} / 2π`
    amps: Vec<C<T>>,
    /// `(κ, c e^{-8κ³t})`
    poles: Vec<(T, T)>,
}

impl<T: Real> SpectralKernel<T> {
    /// Kernel from `L` at the nodes of `rule` and the listed bound states.
    pub fn new(rule: &ContourSpec<T>, l_values: &[C<T>], poles: &[BoundState<T>], t: T) -> Result<Self> {
        if l_values.len() != rule.len() {
            return Err(Error::InvalidInput("L values do not match the nodes".into()));
        }
        let i = imag_unit::<T>();
        let two_pi = T::two_pi();
        let amps = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .zip(l_values)
            .map(|((l, w), v)| *w * *v * cexp(-(i * *l * *l * *l * T::of(8.0) * t)) / two_pi)
            .collect();
        Ok(SpectralKernel { t, nodes: rule.nodes.clone(), amps, poles: Self::pole_terms(poles, t) })
    }

    /// Pure pole kernel (reflectionless data).
    pub fn poles_only(poles: &[BoundState<T>], t: T) -> Self {
        SpectralKernel { t, nodes: vec![], amps: vec![], poles: Self::pole_terms(poles, t) }
    }

    fn pole_terms(poles: &[BoundState<T>], t: T) -> Vec<(T, T)> {
        poles
            .iter()
            .map(|b| (b.kappa, b.c * (-(T::of(8.0) * b.kappa * b.kappa * b.kappa * t)).exp()))
            .collect()
    }

    pub fn nodes(&self) -> &[C<T>] {
        &self.nodes
    }

    /// `w_j L_j e^{-8iλ_j³t}/2π` for every node.
    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    /// `(F, F', F'')` contributed by the pole terms.
    fn pole_part(&self, u: T) -> [C<T>; 3] {
        let mut out = [C::new(T::zero(), T::zero()); 3];
        for &(kappa, c) in &self.poles {
            let e = c * (-kappa * u).exp();
            out[0] += creal(e);
            out[1] += creal(-kappa * e);
            out[2] += creal(kappa * kappa * e);
        }
        out
    }

    /// `(F, F', F'')` by direct summation.
    pub fn eval_all(&self, u: T) -> [C<T>; 3] {
        let i = imag_unit::<T>();
        let mut out = self.pole_part(u);
        for (l, a) in self.nodes.iter().zip(&self.amps) {
            let z = *a * cexp(i * *l * u);
            out[0] += z;
            out[1] += i * *l * z;
            out[2] -= *l * *l * z;
        }
        out
    }
}

impl<T: Real> HankelKernel<T> for SpectralKernel<T> {
    fn eval(&self, u: T) -> (C<T>, C<T>) {
        let v = self.eval_all(u);
        (v[0], v[1])
    }
}

/// `F`, `F'`, `F''` of the node sum tabulated on a uniform grid, interpolated
/// by cubic Hermite polynomials; pole terms are added exactly. Queries outside
/// the table fall back to direct summation.
#[derive(Clone, Debug)]
pub struct KernelTable<T> {
    source: SpectralKernel<T>,
    u0: T,
    du: T,
    f: Vec<C<T>>,
    df: Vec<C<T>>,
    d2f: Vec<C<T>>,
}

impl<T: Real> KernelTable<T> {
    /// Tabulates on `[u_lo, u_hi]` with spacing at most `du`.
    pub fn build(source: &SpectralKernel<T>, u_lo: T, u_hi: T, du: T) -> Self {
        let n = ((u_hi - u_lo) / du).as_f64().ceil().max(1.0) as usize;
        let du = (u_hi - u_lo) / T::count(n);
        const CHUNK: usize = 128;
        let i = imag_unit::<T>();
        let il: Vec<C<T>> = source.nodes.iter().map(|l| i * *l).collect();
        let ll: Vec<C<T>> = source.nodes.iter().map(|l| -(*l * *l)).collect();
        let ratio: Vec<C<T>> = il.iter().map(|z| cexp(*z * du)).collect();
        let chunks: Vec<Vec<[C<T>; 3]>> = (0..=n)
            .step_by(CHUNK)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&start| {
                let stop = (start + CHUNK).min(n + 1);
                let u_start = u_lo + du * T::count(start);
                let mut cur: Vec<C<T>> = source.amps.iter().zip(&il).map(|(a, z)| *a * cexp(*z * u_start)).collect();
                let mut out = Vec::with_capacity(stop - start);
                for _ in start..stop {
                    let zero = C::new(T::zero(), T::zero());
                    let mut acc = [zero; 3];
                    for j in 0..cur.len() {
                        let z = cur[j];
                        acc[0] += z;
                        acc[1] += il[j] * z;
                        acc[2] += ll[j] * z;
                        cur[j] = z * ratio[j];
                    }
                    out.push(acc);
                }
                out
            })
            .collect();
        let values: Vec<[C<T>; 3]> = chunks.into_iter().flatten().collect();
        KernelTable {
            source: source.clone(),
            u0: u_lo,
            du,
            f: values.iter().map(|v| v[0]).collect(),
            df: values.iter().map(|v| v[1]).collect(),
            d2f: values.iter().map(|v| v[2]).collect(),
        }
    }

    pub fn range(&self) -> (T, T) {
        (self.u0, self.u0 + self.du * T::count(self.f.len() - 1))
    }

    /// Largest `|Im F|` relative to `max |F|` over the tabulated node sum;
    /// zero in exact arithmetic when `L(-k) = conj L(k)` on a symmetric rule.
    pub fn imag_residual(&self) -> T {
        let (mut im, mut all) = (T::zero(), T::zero());
        for v in &self.f {
            im = im.max_of(v.im.mag());
            all = all.max_of(cabs(*v));
        }
        if all > T::zero() {
            im / all
        } else {
            T::zero()
        }
    }
}

#[inline]
fn hermite<T: Real>(s: T, h: T, y0: C<T>, d0: C<T>, y1: C<T>, d1: C<T>) -> C<T> {
    let s2 = s * s;
    let s3 = s2 * s;
    let two = T::of(2.0);
    let three = T::of(3.0);
    y0 * (two * s3 - three * s2 + T::one()) + d0 * ((s3 - two * s2 + s) * h) + y1 * (three * s2 - two * s3)
        + d1 * ((s3 - s2) * h)
}

impl<T: Real> HankelKernel<T> for KernelTable<T> {
    fn eval(&self, u: T) -> (C<T>, C<T>) {
        let pos = (u - self.u0) / self.du;
        let last = self.f.len() - 1;
        if pos < -T::of(1e-9) || pos > T::count(last) + T::of(1e-9) {
            return self.source.eval(u);
        }
        let p = self.source.pole_part(u);
        let idx = (pos.as_f64().floor().max(0.0) as usize).min(last.saturating_sub(1));
        let s = (pos - T::count(idx)).max_of(T::zero()).min_of(T::one());
        if last == 0 {
            return (self.f[0] + p[0], self.df[0] + p[1]);
        }
        let f = hermite(s, self.du, self.f[idx], self.df[idx], self.f[idx + 1], self.df[idx + 1]);
        let df = hermite(s, self.du, self.df[idx], self.d2f[idx], self.df[idx + 1], self.d2f[idx + 1]);
        (f + p[0], df + p[1])
    }
}

/// Nyström discretization of `I + H` on `[0, s_max]` at one `(x, t)`.
///
/// With Gauss–Legendre nodes `s_i` and weights `w_i`, the unknown is
/// `z_i = √w_i Y(s_i)` and the system reads `(I + √w K √w) z = -b`,
/// `K_ij = Re F(s_i + s_j - 2x)`, `b_i = √w_i Re F(s_i - 2x)`.
#[derive(Clone, Debug)]
pub struct HankelSystem<T: Real> {
    pub x: T,
    pub t: T,
    pub nodes: Vec<T>,
    pub sqrt_weights: Vec<T>,
    /// `I + H`
    pub matrix: DMatrix<T>,
    /// `b`, the coordinates of `JΦ`
    pub rhs: DVector<T>,
    /// `∂ₓH`
    pub dmatrix: DMatrix<T>,
    /// `∂ₓb`
    pub drhs: DVector<T>,
    /// Largest `|Im F|` over the entries relative to the largest `|F|`.
    pub imag_residual: T,
    pub min_eig_estimate: T,
    pub norm_estimate: T,
}

/// Quadrature settings of the Nyström discretization.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Real + serde::de::DeserializeOwned"))]
pub struct NystromParams<T> {
    pub panel_length: T,
    pub order: usize,
    pub lanczos_steps: usize,
}

impl<T: Real> Default for NystromParams<T> {
    fn default() -> Self {
        NystromParams { panel_length: T::one(), order: 12, lanczos_steps: 60 }
    }
}

impl<T: Real> HankelSystem<T> {
    pub fn basis_size(&self) -> usize {
        self.nodes.len()
    }

    /// `H = matrix - I`.
    pub fn operator(&self) -> DMatrix<T> {
        &self.matrix - DMatrix::identity(self.basis_size(), self.basis_size())
    }
}

/// Assembles the Nyström system for `Ω(w) = F(w - 2x)` on `[0, s_max]`.
pub fn assemble<T: Real, K: HankelKernel<T>>(kernel: &K, x: T, t: T, s_max: T, params: &NystromParams<T>) -> HankelSystem<T> {
    let n_panels = (s_max / params.panel_length).as_f64().ceil().max(1.0) as usize;
    let rule = Rule::uniform(T::zero(), s_max.max_of(params.panel_length), n_panels, params.order);
    let n = rule.len();
    let sw: Vec<T> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let two_x = T::of(2.0) * x;
    let two = T::of(2.0);
    let mut matrix = DMatrix::<T>::identity(n, n);
    let mut dmatrix = DMatrix::<T>::zeros(n, n);
    let mut im_max = T::zero();
    let mut abs_max = T::zero();
    for i in 0..n {
        for j in i..n {
            let (f, df) = kernel.eval(rule.nodes[i] + rule.nodes[j] - two_x);
            im_max = im_max.max_of(f.im.mag());
            abs_max = abs_max.max_of(cabs(f));
            let s = sw[i] * sw[j];
            let h = s * f.re;
            let dh = -two * s * df.re;
            matrix[(i, j)] += h;
            dmatrix[(i, j)] = dh;
            if i != j {
                matrix[(j, i)] += h;
                dmatrix[(j, i)] = dh;
            }
        }
    }
    let mut rhs = DVector::<T>::zeros(n);
    let mut drhs = DVector::<T>::zeros(n);
    for i in 0..n {
        let (f, df) = kernel.eval(rule.nodes[i] - two_x);
        im_max = im_max.max_of(f.im.mag());
        abs_max = abs_max.max_of(cabs(f));
        rhs[i] = sw[i] * f.re;
        drhs[i] = -two * sw[i] * df.re;
    }
    let (lo, hi) = lanczos_extremes(&matrix, params.lanczos_steps);
    HankelSystem {
        x,
        t,
        nodes: rule.nodes,
        sqrt_weights: sw,
        matrix,
        rhs,
        dmatrix,
        drhs,
        imag_residual: if abs_max > T::zero() { im_max / abs_max } else { T::zero() },
        min_eig_estimate: lo,
        norm_estimate: (hi - T::one()).mag().max_of((lo - T::one()).mag()),
    }
}

/// Extreme eigenvalues of a symmetric matrix by Lanczos with full
/// reorthogonalization (exact eigenvalues when `steps ≥ n`).
pub fn lanczos_extremes<T: Real>(a: &DMatrix<T>, steps: usize) -> (T, T) {
    let n = a.nrows();
    if n == 0 {
        return (T::zero(), T::zero());
    }
    if n <= steps {
        let e = SymmetricEigen::new(a.clone()).eigenvalues;
        return (e.min(), e.max());
    }
    let mut q = DVector::<T>::from_fn(n, |i, _| T::one() + T::of(0.37) * T::of((i as f64 * 1.618).sin()));
    q /= q.norm();
    let mut basis: Vec<DVector<T>> = vec![q];
    let mut alpha: Vec<T> = vec![];
    let mut beta: Vec<T> = vec![];
    for j in 0..steps {
        let mut w = a * &basis[j];
        let aj = basis[j].dot(&w);
        alpha.push(aj);
        for _ in 0..2 {
            for v in &basis {
                let c = v.dot(&w);
                w.axpy(-c, v, T::one());
            }
        }
        let bj = w.norm();
        if bj <= T::of(1e-12) * aj.mag().max_of(T::one()) || j + 1 == steps {
            break;
        }
        beta.push(bj);
        basis.push(w / bj);
    }
    let m = alpha.len();
    let mut tri = DMatrix::<T>::zeros(m, m);
    for i in 0..m {
        tri[(i, i)] = alpha[i];
        if i + 1 < m {
            tri[(i, i + 1)] = beta[i];
            tri[(i + 1, i)] = beta[i];
        }
    }
    let e = SymmetricEigen::new(tri).eigenvalues;
    (e.min(), e.max())
}

/// Spectral norm of `H` from a full symmetric eigendecomposition.
pub fn hankel_norm<T: Real>(system: &HankelSystem<T>) -> T {
    let e = SymmetricEigen::new(system.operator()).eigenvalues;
    e.iter().fold(T::zero(), |m, v| m.max_of(v.mag()))
}

/// Factored `I + H` with its solutions.
pub struct Solved<T: Real> {
    /// `z = √w Y`, with `Y = m - 1` in the half-line picture.
    pub z: DVector<T>,
    pub dz: DVector<T>,
    pub alpha: T,
    /// `‖(I+H)z + b‖ / ‖b‖`
    pub residual: T,
}

fn factor<T: Real>(system: &HankelSystem<T>, alpha_floor: T) -> Result<Cholesky<T, nalgebra::Dyn>> {
    let fail = |min_eig: T| Error::Positivity {
        x: system.x.as_f64(),
        t: system.t.as_f64(),
        min_eig: min_eig.as_f64(),
        floor: alpha_floor.as_f64(),
    };
    if system.min_eig_estimate <= alpha_floor {
        return Err(fail(system.min_eig_estimate));
    }
    Cholesky::new(system.matrix.clone()).ok_or_else(|| fail(system.min_eig_estimate))
}

/// `z = -(I + H)⁻¹ b`; the reported α is the Lanczos estimate of the smallest eigenvalue.
pub fn solve_m<T: Real>(system: &HankelSystem<T>, alpha_floor: T) -> Result<(DVector<T>, T)> {
    let chol = factor(system, alpha_floor)?;
    Ok((-chol.solve(&system.rhs), system.min_eig_estimate))
}

/// `∂ₓz = -(I + H)⁻¹(∂ₓH z + ∂ₓb)`.
pub fn solve_dm_dx<T: Real>(system: &HankelSystem<T>, z: &DVector<T>, alpha_floor: T) -> Result<DVector<T>> {
    let chol = factor(system, alpha_floor)?;
    Ok(-chol.solve(&(&system.dmatrix * z + &system.drhs)))
}

/// Both solves with a single factorization.
pub fn solve<T: Real>(system: &HankelSystem<T>, alpha_floor: T) -> Result<Solved<T>> {
    let chol = factor(system, alpha_floor)?;
    let z = -chol.solve(&system.rhs);
    let dz = -chol.solve(&(&system.dmatrix * &z + &system.drhs));
    let bn = system.rhs.norm();
    let residual = if bn > T::zero() { (&system.matrix * &z + &system.rhs).norm() / bn } else { T::zero() };
    Ok(Solved { z, dz, alpha: system.min_eig_estimate, residual })
}

/// Outcome of the refinement sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Refinement<T> {
    /// `(basis size, ‖H‖)` per level.
    pub history: Vec<(usize, T)>,
    pub converged: bool,
}

/// Halves the panel length until `‖H‖` changes by less than `tol` or the
/// basis would exceed `max_size`.
pub fn refine_basis<T: Real, K: HankelKernel<T>>(
    kernel: &K,
    x: T,
    t: T,
    s_max: T,
    params: &NystromParams<T>,
    tol: T,
    max_size: usize,
) -> Refinement<T> {
    let mut p = *params;
    let mut history = vec![];
    loop {
        let sys = assemble(kernel, x, t, s_max, &p);
        let norm = hankel_norm(&sys);
        let n = sys.basis_size();
        let done = history.last().map(|(_, prev): &(usize, T)| (norm - *prev).mag() < tol).unwrap_or(false);
        history.push((n, norm));
        if done {
            return Refinement { history, converged: true };
        }
        if 2 * n > max_size {
            return Refinement { history, converged: false };
        }
        p.panel_length *= T::of(0.5);
    }
}

/// Writes `(matrix, rhs)` for offline inspection.
///
/// Layout, little-endian: the bytes `KDVH`, a `u32` version (1), a `u64` size
/// `n`, then the `n × n` matrix row-major and the `n` right-hand side entries,
/// each as a pair of `f64` (real, imaginary).
pub fn dump_binary<T: Real>(system: &HankelSystem<T>, path: &Path) -> Result<()> {
    let n = system.basis_size();
    let mut out = Vec::with_capacity(16 + 16 * n * (n + 1));
    out.extend_from_slice(b"KDVH");
    out.extend_from_slice(&1u32.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    let mut push = |v: T| {
        out.extend_from_slice(&v.as_f64().to_le_bytes());
        out.extend_from_slice(&0f64.to_le_bytes());
    };
    for i in 0..n {
        for j in 0..n {
            push(system.matrix[(i, j)]);
        }
    }
    for i in 0..n {
        push(system.rhs[i]);
    }
    std::fs::File::create(path)?.write_all(&out)?;
    Ok(())
}

/// `H(Φ)` in the orthonormal basis `e_n(k) = √(β/π) Bⁿ/(k + iβ)` of H²,
/// `B = (k - iβ)/(k + iβ)`, from symbol values on a uniform symmetric grid.
#[derive(Clone, Debug)]
pub struct RationalSystem<T: Real> {
    pub beta: T,
    /// `M_mn = ⟨H e_n, e_m⟩`, real symmetric for a symmetric symbol.
    pub matrix: DMatrix<T>,
    pub dmatrix: DMatrix<T>,
    /// Coordinates of `JΦ` (purely imaginary for a symmetric symbol).
    pub rhs: Vec<C<T>>,
    pub drhs: Vec<C<T>>,
    /// Largest imaginary part discarded from `M`.
    pub imag_residual: T,
}

/// Assembles [`RationalSystem`] after replacing `Φ` by `P₋Φ`.
pub fn hankel_matrix<T: Real + FftNum>(symbol: &SymbolGrid<T>, basis_size: usize, beta: T) -> Result<RationalSystem<T>> {
    let dk = uniform_step(&symbol.k_grid)?;
    let needed = (T::of(4.0) * beta * symbol.x.mag()).as_f64().ceil() as usize + 8;
    if basis_size < needed {
        return Err(Error::Resolution(format!(
            "basis size {basis_size} cannot resolve e^(2ikx) at x = {}; need at least {needed}",
            symbol.x.as_f64()
        )));
    }
    let phi = riesz_project_minus(&symbol.phi_values, &symbol.k_grid)?;
    let dphi = riesz_project_minus(&symbol.dphi_dx_values, &symbol.k_grid)?;
    let i = imag_unit::<T>();
    let n2 = 2 * basis_size - 1;
    // moments μ_p = ∫ P₋Φ Bᵖ/(k+iβ)² dk and ν_p = ∫ Φ Bᵖ/(k+iβ) dk
    let mut mu = vec![C::new(T::zero(), T::zero()); n2];
    let mut dmu = mu.clone();
    let mut nu = vec![C::new(T::zero(), T::zero()); basis_size];
    let mut dnu = nu.clone();
    for (idx, &k) in symbol.k_grid.iter().enumerate() {
        let den = creal(k) + i * beta;
        let b = (creal(k) - i * beta) / den;
        let inv = creal(T::one()) / den;
        let mut bp = creal(T::one());
        for p in 0..n2 {
            let e = bp * inv * dk;
            mu[p] += phi[idx] * e * inv;
            dmu[p] += dphi[idx] * e * inv;
            if p < basis_size {
                nu[p] += symbol.phi_values[idx] * e;
                dnu[p] += symbol.dphi_dx_values[idx] * e;
            }
            bp *= b;
        }
    }
    let scale = -beta / T::pi();
    let mut imag = T::zero();
    let mut matrix = DMatrix::<T>::zeros(basis_size, basis_size);
    let mut dmatrix = DMatrix::<T>::zeros(basis_size, basis_size);
    for m in 0..basis_size {
        for n in 0..basis_size {
            let v = mu[m + n] * scale;
            imag = imag.max_of(v.im.mag());
            matrix[(m, n)] = v.re;
            dmatrix[(m, n)] = (dmu[m + n] * scale).re;
        }
    }
    let r = -(beta / T::pi()).sqrt();
    Ok(RationalSystem {
        beta,
        matrix,
        dmatrix,
        rhs: nu.iter().map(|v| *v * r).collect(),
        drhs: dnu.iter().map(|v| *v * r).collect(),
        imag_residual: imag,
    })
}

impl<T: Real> RationalSystem<T> {
    pub fn norm(&self) -> T {
        let e = SymmetricEigen::new(self.matrix.clone()).eigenvalues;
        e.iter().fold(T::zero(), |m, v| m.max_of(v.mag()))
    }

    /// Expansion coefficients of `y = -(I + M)⁻¹ JΦ`.
    pub fn solve(&self) -> Result<Vec<C<T>>> {
        let n = self.matrix.nrows();
        let a = &self.matrix + DMatrix::<T>::identity(n, n);
        let chol = Cholesky::new(a).ok_or_else(|| Error::Positivity {
            x: f64::NAN,
            t: f64::NAN,
            min_eig: f64::NAN,
            floor: 0.0,
        })?;
        let re = DVector::from_iterator(n, self.rhs.iter().map(|v| v.re));
        let im = DVector::from_iterator(n, self.rhs.iter().map(|v| v.im));
        let (yr, yi) = (chol.solve(&re), chol.solve(&im));
        Ok((0..n).map(|j| -cplx(yr[j], yi[j])).collect())
    }

    /// `y(λ) = Σ y_n e_n(λ)` for `Im λ > -β`.
    pub fn evaluate(&self, coeffs: &[C<T>], lambda: C<T>) -> C<T> {
        let i = imag_unit::<T>();
        let den = lambda + i * self.beta;
        let b = (lambda - i * self.beta) / den;
        let s = (self.beta / T::pi()).sqrt();
        let mut bp = creal(s) / den;
        let mut acc = C::new(T::zero(), T::zero());
        for c in coeffs {
            acc += *c * bp;
            bp *= b;
        }
        acc
    }
}
