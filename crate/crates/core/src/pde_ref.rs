//! Direct KdV integrator, `q_t = 6 q q_x - q_xxx`, used as an independent oracle.
//!
//! Fourier pseudo-spectral in space on a periodic box `[-W, W)`, ETDRK4 in time
//! (Cox–Matthews scheme, φ-functions by contour means as in Kassam–Trefethen),
//! 2/3-rule dealiasing. The initial state is the exact projection of `q₀` onto
//! the retained modes, so the discrete flow conserves `∫q` and `∫q²` up to the
//! time-stepping error.

use std::path::Path;
use std::sync::Arc;

use rustfft::{Fft, FftNum, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quadrature::Rule;
use crate::scalar::{cexp, cis, imag_unit, Real, C};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Real + serde::de::DeserializeOwned"))]
pub struct PdeParams<T> {
    pub domain_half_width: T,
    pub n_modes: usize,
    /// Largest time step; each interval between snapshots is split evenly.
    pub dt: T,
    pub dealias_fraction: T,
    /// Points on the circle used for the φ-function means.
    pub contour_points: usize,
    /// Fraction of the box at each end watched for contamination.
    pub boundary_fraction: T,
    pub boundary_tol: T,
}

impl<T: Real> Default for PdeParams<T> {
    fn default() -> Self {
        PdeParams {
            domain_half_width: T::of(60.0),
            n_modes: 2048,
            dt: T::of(1e-3),
            dealias_fraction: T::of(2.0 / 3.0),
            contour_points: 64,
            boundary_fraction: T::of(0.05),
            boundary_tol: T::of(1e-8),
        }
    }
}

impl<T: Real> PdeParams<T> {
    /// Largest retained wavenumber.
    pub fn xi_cut(&self) -> T {
        let n = self.n_modes;
        T::pi() / self.domain_half_width * T::count(keep_mask(n, self.dealias_fraction).iter().take(n / 2 + 1).filter(|k| **k).count() - 1)
    }

    /// Time until the fastest retained mode, moving at `3ξ_c²`, has crossed the
    /// box and re-entered a window of width `window`.
    pub fn wrap_free_time(&self, window: T) -> T {
        let xi = self.xi_cut();
        (T::of(2.0) * self.domain_half_width - window) / (T::of(3.0) * xi * xi)
    }

    /// Box and mode count with retained band `[0, xi_cut]` that stay wrap-free
    /// on `[x_lo, x_hi]` up to `t_max`. Never smaller than the defaults.
    pub fn for_window(x_lo: T, x_hi: T, t_max: T, xi_cut: T) -> Self {
        let base = PdeParams::<T>::default();
        let window = x_hi - x_lo;
        let need = (T::of(3.0) * xi_cut * xi_cut * t_max + window) * T::of(0.55);
        let w = base.domain_half_width.max_of(need).ceil();
        // n/2 · (2/3) · π/W ≥ ξ_c
        let modes = (T::of(3.0) * xi_cut * w / T::pi()).as_f64().ceil() as usize;
        let n = modes.next_power_of_two().max(base.n_modes);
        // widen the box so the rounded-up mode count keeps the band at ξ_c
        let probe = PdeParams { domain_half_width: T::pi(), n_modes: n, ..base };
        let w = w.max_of(probe.xi_cut() * T::pi() / xi_cut);
        PdeParams { domain_half_width: w, n_modes: n, ..base }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Snapshot<T> {
    pub t: T,
    pub values: Vec<T>,
    /// `∫q`
    pub mass: T,
    /// `∫q²`
    pub energy: T,
    /// max |q| in the boundary layers of the box.
    pub boundary_amplitude: T,
    #[serde(skip)]
    spectrum: Vec<C<T>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PdeRun<T> {
    pub params: PdeParams<T>,
    pub x: Vec<T>,
    pub snapshots: Vec<Snapshot<T>>,
    pub initial_mass: T,
    pub initial_energy: T,
    pub steps: usize,
}

impl<T: Real> PdeRun<T> {
    /// Largest relative drift of `∫q²` (and absolute drift of `∫q` scaled by `∫|q|` proxy) over the snapshots.
    pub fn energy_drift(&self) -> T {
        let e0 = self.initial_energy;
        self.snapshots.iter().fold(T::zero(), |m, s| {
            let d = (s.energy - e0).mag();
            m.max_of(if e0 > T::zero() { d / e0 } else { d })
        })
    }

    pub fn mass_drift(&self) -> T {
        self.snapshots.iter().fold(T::zero(), |m, s| m.max_of((s.mass - self.initial_mass).mag()))
    }

    /// Snapshots whose boundary layers exceed the tolerance.
    pub fn contaminated(&self) -> Vec<T> {
        self.snapshots.iter().filter(|s| s.boundary_amplitude > self.params.boundary_tol).map(|s| s.t).collect()
    }

    pub fn snapshot(&self, t: T) -> Option<&Snapshot<T>> {
        let tol = T::of(1e-12) * t.mag().max_of(T::one());
        self.snapshots.iter().find(|s| (s.t - t).mag() <= tol)
    }

    /// One `x,q` CSV per snapshot, named `snapshot_<index>.csv`.
    pub fn save_snapshots(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = vec![];
        for (j, s) in self.snapshots.iter().enumerate() {
            let mut csv = format!("# t = {:.16e}\nx,q\n", s.t.as_f64());
            for (x, q) in self.x.iter().zip(&s.values) {
                csv.push_str(&format!("{:.16e},{:.16e}\n", x.as_f64(), q.as_f64()));
            }
            let p = dir.join(format!("snapshot_{j}.csv"));
            std::fs::write(&p, csv)?;
            out.push(p);
        }
        Ok(out)
    }

    /// Run parameters and per-snapshot invariants as JSON (fields omitted).
    pub fn manifest(&self) -> serde_json::Value {
        serde_json::json!({
            "params": {
                "domain_half_width": self.params.domain_half_width.as_f64(),
                "n_modes": self.params.n_modes,
                "dt": self.params.dt.as_f64(),
                "dealias_fraction": self.params.dealias_fraction.as_f64(),
                "contour_points": self.params.contour_points,
                "boundary_tol": self.params.boundary_tol.as_f64(),
            },
            "steps": self.steps,
            "initial_mass": self.initial_mass.as_f64(),
            "initial_energy": self.initial_energy.as_f64(),
            "energy_drift": self.energy_drift().as_f64(),
            "mass_drift": self.mass_drift().as_f64(),
            "snapshots": self.snapshots.iter().map(|s| serde_json::json!({
                "t": s.t.as_f64(),
                "mass": s.mass.as_f64(),
                "energy": s.energy.as_f64(),
                "boundary_amplitude": s.boundary_amplitude.as_f64(),
            })).collect::<Vec<_>>(),
        })
    }
}

impl<T: Real> Snapshot<T> {
    /// Trigonometric interpolant of the snapshot at any `x` in the box.
    pub fn eval(&self, x: T, half_width: T) -> T {
        let n = self.spectrum.len();
        let dk = T::pi() / half_width;
        let step = cis(dk * (x + half_width));
        // v̂ is stored for the grid starting at -W; modes above n/2 are negative
        let mut acc = C::new(T::zero(), T::zero());
        let mut e = C::new(T::one(), T::zero());
        for j in 0..n / 2 {
            acc += self.spectrum[j] * e;
            e *= step;
        }
        let back = step.conj();
        let mut e = back;
        for j in 1..n / 2 {
            acc += self.spectrum[n - j] * e;
            e *= back;
        }
        acc.re / T::count(n)
    }
}

struct Spectral<T: FftNum> {
    n: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    /// `3iξ` on kept modes, 0 elsewhere
    nonlinear: Vec<C<T>>,
    keep: Vec<bool>,
}

impl<T: Real + FftNum> Spectral<T> {
    fn wavenumber(n: usize, j: usize, dk: T) -> T {
        if j <= n / 2 {
            dk * T::count(j)
        } else {
            -dk * T::count(n - j)
        }
    }

    /// `N(v) = 3iξ · FFT(q²)`, dealiased.
    fn apply(&self, v: &[C<T>], work: &mut Vec<C<T>>) -> Vec<C<T>> {
        work.clear();
        work.extend_from_slice(v);
        self.inv.process(work);
        let scale = T::one() / T::count(self.n);
        for z in work.iter_mut() {
            let q = z.re * scale;
            *z = C::new(q * q, T::zero());
        }
        self.fwd.process(work);
        work.iter().zip(&self.nonlinear).map(|(a, g)| *a * *g).collect()
    }
}

/// `(1/2W) ∫ q₀ e^{-iξ_j (x + W)} dx` times `n` (FFT normalization) for the kept modes.
fn project<T: Real>(q0: &Potential<T>, n: usize, w: T, keep: &[bool]) -> Vec<C<T>> {
    let dk = T::pi() / w;
    let (lo, hi) = q0.support();
    let mut out = vec![C::new(T::zero(), T::zero()); n];
    if !(hi > lo) {
        return out;
    }
    let k_max = dk * T::count(n / 2);
    // panels short enough for 12-point Gauss–Legendre at the top wavenumber
    let mesh = q0.fine_mesh((T::of(2.0) / k_max).min_of(T::of(0.25)));
    let mut nodes = vec![];
    for p in mesh.nodes.windows(2) {
        let r = Rule::composite(&[p[0], p[1]], 12);
        for (x, wt) in r.nodes.iter().zip(&r.weights) {
            nodes.push((*x, *wt * q0.value(*x)));
        }
    }
    let i = imag_unit::<T>();
    let scale = T::count(n) / (T::of(2.0) * w);
    for (x, qw) in nodes {
        let step = cexp(-i * dk * (x + w));
        let mut e = C::new(T::one(), T::zero());
        for j in 0..=n / 2 {
            if keep[j] {
                out[j] += e * qw;
            }
            e *= step;
        }
    }
    for j in 1..n / 2 {
        out[n - j] = out[j].conj();
    }
    for (j, v) in out.iter_mut().enumerate() {
        if keep[j] {
            *v *= scale;
        } else {
            *v = C::new(T::zero(), T::zero());
        }
    }
    out
}

/// ETDRK4 coefficients for step `h` and linear symbol `L`.
struct Etd<T> {
    e: Vec<C<T>>,
    e2: Vec<C<T>>,
    q: Vec<C<T>>,
    f1: Vec<C<T>>,
    f2: Vec<C<T>>,
    f3: Vec<C<T>>,
}

fn etd_coefficients<T: Real>(lin: &[C<T>], h: T, m: usize) -> Etd<T> {
    let roots: Vec<C<T>> =
        (0..m).map(|j| cis(T::two_pi() * (T::count(j) + T::of(0.5)) / T::count(m))).collect();
    let c = |v: f64| C::new(T::of(v), T::zero());
    let (one, two, three, four) = (c(1.0), c(2.0), c(3.0), c(4.0));
    let inv_m = T::one() / T::count(m);
    let mut c = Etd { e: vec![], e2: vec![], q: vec![], f1: vec![], f2: vec![], f3: vec![] };
    for l in lin {
        let hl = *l * h;
        c.e.push(cexp(hl));
        c.e2.push(cexp(hl / two));
        let (mut q, mut f1, mut f2, mut f3) =
            (C::new(T::zero(), T::zero()), C::new(T::zero(), T::zero()), C::new(T::zero(), T::zero()), C::new(T::zero(), T::zero()));
        for r in &roots {
            let z = hl + *r;
            let ez = cexp(z);
            let z3 = z * z * z;
            q += (cexp(z / two) - one) / z;
            f1 += (-four - z + ez * (four - z * three + z * z)) / z3;
            f2 += (two + z + ez * (z - two)) / z3;
            f3 += (-four - z * three - z * z + ez * (four - z)) / z3;
        }
        c.q.push(q * (h * inv_m));
        c.f1.push(f1 * (h * inv_m));
        c.f2.push(f2 * (h * inv_m));
        c.f3.push(f3 * (h * inv_m));
    }
    c
}

fn etd_step<T: Real + FftNum>(v: &mut Vec<C<T>>, c: &Etd<T>, sp: &Spectral<T>, work: &mut Vec<C<T>>) {
    let n = v.len();
    let nv = sp.apply(v, work);
    let a: Vec<C<T>> = (0..n).map(|j| c.e2[j] * v[j] + c.q[j] * nv[j]).collect();
    let na = sp.apply(&a, work);
    let b: Vec<C<T>> = (0..n).map(|j| c.e2[j] * v[j] + c.q[j] * na[j]).collect();
    let nb = sp.apply(&b, work);
    let two = T::of(2.0);
    let cc: Vec<C<T>> = (0..n).map(|j| c.e2[j] * a[j] + c.q[j] * (nb[j] * two - nv[j])).collect();
    let nc = sp.apply(&cc, work);
    for j in 0..n {
        v[j] = c.e[j] * v[j] + nv[j] * c.f1[j] + (na[j] + nb[j]) * c.f2[j] * two + nc[j] * c.f3[j];
        if !sp.keep[j] {
            v[j] = C::new(T::zero(), T::zero());
        }
    }
}

/// `6 q q_x - q_xxx` of grid values on the box, spectrally and without dealiasing.
pub fn spatial_rhs<T: Real + FftNum>(values: &[T], half_width: T) -> Vec<T> {
    let n = values.len();
    let dk = T::pi() / half_width;
    let mut planner = FftPlanner::new();
    let (fwd, inv) = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
    let mut v: Vec<C<T>> = values.iter().map(|q| C::new(*q, T::zero())).collect();
    fwd.process(&mut v);
    let i = imag_unit::<T>();
    let deriv = |p: u32| -> Vec<T> {
        let mut d: Vec<C<T>> = v
            .iter()
            .enumerate()
            .map(|(j, z)| {
                if n % 2 == 0 && j == n / 2 {
                    return C::new(T::zero(), T::zero());
                }
                let ik = i * Spectral::<T>::wavenumber(n, j, dk);
                *z * ik.powu(p)
            })
            .collect();
        inv.process(&mut d);
        d.iter().map(|z| z.re / T::count(n)).collect()
    };
    let (qx, qxxx) = (deriv(1), deriv(3));
    (0..n).map(|j| T::of(6.0) * values[j] * qx[j] - qxxx[j]).collect()
}

/// Box nodes `-W + j·2W/n`.
pub fn box_nodes<T: Real>(n: usize, half_width: T) -> Vec<T> {
    box_grid(n, half_width)
}

/// Evolves `q₀` and records snapshots at each time of `t_list`.
pub fn evolve_kdv<T: Real + FftNum>(q0: &Potential<T>, t_list: &[T], params: &PdeParams<T>) -> Result<PdeRun<T>> {
    let n = params.n_modes;
    let keep = keep_mask(n, params.dealias_fraction);
    let v0 = project(q0, n, params.domain_half_width, &keep);
    evolve_spectrum(v0, t_list, params)
}

/// Same as [`evolve_kdv`] for an initial profile given pointwise (smooth profiles only).
pub fn evolve_profile<T: Real + FftNum>(f: impl Fn(T) -> T, t_list: &[T], params: &PdeParams<T>) -> Result<PdeRun<T>> {
    let n = params.n_modes;
    let keep = keep_mask(n, params.dealias_fraction);
    let x = box_grid(n, params.domain_half_width);
    let mut v: Vec<C<T>> = x.iter().map(|x| C::new(f(*x), T::zero())).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut v);
    for (j, z) in v.iter_mut().enumerate() {
        if !keep[j] {
            *z = C::new(T::zero(), T::zero());
        }
    }
    evolve_spectrum(v, t_list, params)
}

fn box_grid<T: Real>(n: usize, w: T) -> Vec<T> {
    let dx = T::of(2.0) * w / T::count(n);
    (0..n).map(|j| -w + dx * T::count(j)).collect()
}

fn keep_mask<T: Real>(n: usize, fraction: T) -> Vec<bool> {
    let cut = (fraction.as_f64() * (n / 2) as f64).floor() as usize;
    (0..n).map(|j| j.min(n - j) <= cut && !(n % 2 == 0 && j == n / 2)).collect()
}

fn evolve_spectrum<T: Real + FftNum>(mut v: Vec<C<T>>, t_list: &[T], params: &PdeParams<T>) -> Result<PdeRun<T>> {
    let n = params.n_modes;
    if n < 16 || n % 2 != 0 {
        return Err(Error::Pde(format!("n_modes = {n} must be even and at least 16")));
    }
    if !(params.dt > T::zero()) || !(params.domain_half_width > T::zero()) {
        return Err(Error::Pde("dt and domain_half_width must be positive".into()));
    }
    let mut prev = T::zero();
    for t in t_list {
        if !(*t > prev) {
            return Err(Error::Pde("t_list must be positive and increasing".into()));
        }
        prev = *t;
    }
    let w = params.domain_half_width;
    let dk = T::pi() / w;
    let keep = keep_mask(n, params.dealias_fraction);
    let mut planner = FftPlanner::new();
    let i = imag_unit::<T>();
    let xi: Vec<T> = (0..n).map(|j| Spectral::<T>::wavenumber(n, j, dk)).collect();
    let sp = Spectral {
        n,
        fwd: planner.plan_fft_forward(n),
        inv: planner.plan_fft_inverse(n),
        nonlinear: xi.iter().zip(&keep).map(|(k, on)| if *on { i * *k * T::of(3.0) } else { C::new(T::zero(), T::zero()) }).collect(),
        keep: keep.clone(),
    };
    // -∂ₓ³ → -(iξ)³ = iξ³
    let lin: Vec<C<T>> = xi.iter().map(|k| i * *k * *k * *k).collect();
    let x = box_grid(n, w);
    let dx = T::of(2.0) * w / T::count(n);
    let edge = (params.boundary_fraction * T::count(n)).as_f64().ceil() as usize;
    let measure = |v: &[C<T>], t: T| -> Snapshot<T> {
        let mut q = v.to_vec();
        sp.inv.process(&mut q);
        let values: Vec<T> = q.iter().map(|z| z.re / T::count(n)).collect();
        let mass = values.iter().fold(T::zero(), |a, b| a + *b) * dx;
        let energy = values.iter().fold(T::zero(), |a, b| a + *b * *b) * dx;
        let boundary = values[..edge].iter().chain(&values[n - edge..]).fold(T::zero(), |m, v| m.max_of(v.mag()));
        Snapshot { t, values, mass, energy, boundary_amplitude: boundary, spectrum: v.to_vec() }
    };
    let start = measure(&v, T::zero());
    let mut work = Vec::with_capacity(n);
    let mut snapshots = vec![];
    let mut t_now = T::zero();
    let mut steps = 0;
    let mut cached: Option<(T, Etd<T>)> = None;
    for &t in t_list {
        let span = t - t_now;
        let m = (span / params.dt).ceil().as_f64().max(1.0) as usize;
        let h = span / T::count(m);
        let reuse = matches!(&cached, Some((hc, _)) if (*hc - h).mag() <= T::of(1e-14) * h);
        if !reuse {
            cached = Some((h, etd_coefficients(&lin, h, params.contour_points)));
        }
        let coef = &cached.as_ref().expect("set above").1;
        for _ in 0..m {
            etd_step(&mut v, coef, &sp, &mut work);
        }
        steps += m;
        if v.iter().any(|z| !z.re.is_finite_value() || !z.im.is_finite_value()) {
            return Err(Error::Pde(format!("non-finite state before t = {}", t.as_f64())));
        }
        snapshots.push(measure(&v, t));
        t_now = t;
    }
    Ok(PdeRun { params: *params, x, snapshots, initial_mass: start.mass, initial_energy: start.energy, steps })
}
