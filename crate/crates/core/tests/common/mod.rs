//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as Cx;

/// Piecewise-constant potential on `[edges[0], edges[n]]`, zero outside,
/// solved by matching plane-wave amplitudes at every interface.
pub struct PiecewiseConstant {
    pub edges: Vec<f64>,
    pub values: Vec<f64>,
}

/// Plane-wave amplitudes `ψ = a e^{ipx} + b e^{-ipx}` in one region.
#[derive(Clone, Copy, Debug)]
struct Amp {
    a: Cx,
    b: Cx,
    p: Cx,
}

fn wavenumber(k: Cx, v: f64) -> Cx {
    let p = (k * k - v).sqrt();
    if p.im < 0.0 {
        -p
    } else {
        p
    }
}

impl Amp {
    fn value(&self, x: f64) -> (Cx, Cx) {
        let i = Cx::i();
        let e = (i * self.p * x).exp();
        let f = (-i * self.p * x).exp();
        (self.a * e + self.b * f, i * self.p * (self.a * e - self.b * f))
    }

    fn from_value(p: Cx, x: f64, psi: Cx, dpsi: Cx) -> Amp {
        let i = Cx::i();
        let a = 0.5 * (psi + dpsi / (i * p)) * (-i * p * x).exp();
        let b = 0.5 * (psi - dpsi / (i * p)) * (i * p * x).exp();
        Amp { a, b, p }
    }
}

impl PiecewiseConstant {
    pub fn square_well(depth: f64, width: f64) -> Self {
        PiecewiseConstant { edges: vec![0.0, width], values: vec![-depth] }
    }

    fn regions(&self, k: Cx) -> Vec<Cx> {
        let mut p = vec![k];
        p.extend(self.values.iter().map(|v| wavenumber(k, *v)));
        p.push(k);
        p
    }

    /// Amplitudes of the right Jost solution in every region, left to right.
    fn right_chain(&self, k: Cx) -> Vec<Amp> {
        let p = self.regions(k);
        let n = p.len();
        let mut amps = vec![Amp { a: Cx::new(0.0, 0.0), b: Cx::new(0.0, 0.0), p: k }; n];
        amps[n - 1] = Amp { a: Cx::new(1.0, 0.0), b: Cx::new(0.0, 0.0), p: k };
        for j in (0..n - 1).rev() {
            let x = self.edges[j];
            let (psi, dpsi) = amps[j + 1].value(x);
            amps[j] = Amp::from_value(p[j], x, psi, dpsi);
        }
        amps
    }

    /// Amplitudes of the left Jost solution in every region, left to right.
    fn left_chain(&self, k: Cx) -> Vec<Amp> {
        let p = self.regions(k);
        let n = p.len();
        let mut amps = vec![Amp { a: Cx::new(0.0, 0.0), b: Cx::new(1.0, 0.0), p: k }; n];
        for j in 1..n {
            let x = self.edges[j - 1];
            let (psi, dpsi) = amps[j - 1].value(x);
            amps[j] = Amp::from_value(p[j], x, psi, dpsi);
        }
        amps
    }

    /// (T, R, L) at momentum `k`.
    pub fn coefficients(&self, k: Cx) -> (Cx, Cx, Cx) {
        let right = self.right_chain(k);
        let left = self.left_chain(k);
        let (a, b) = (right[0].a, right[0].b);
        let last = left.last().unwrap();
        let (c, d) = (last.b, last.a);
        (1.0 / a, d / c, b / a)
    }

    /// `m(k, x) = e^{-ikx} ψ₊(x, k)`.
    pub fn m_right(&self, k: Cx, x: f64) -> Cx {
        let right = self.right_chain(k);
        let mut j = 0;
        while j < self.edges.len() && x >= self.edges[j] {
            j += 1;
        }
        let (psi, _) = right[j].value(x);
        psi * (-Cx::i() * k * x).exp()
    }

    /// `ψ₊'(0)/ψ₊(0)`.
    pub fn weyl(&self, k: Cx) -> Cx {
        let right = self.right_chain(k);
        let j = if self.edges[0] > 0.0 { 0 } else { 1 };
        let (psi, dpsi) = right[j].value(0.0);
        dpsi / psi
    }
}

/// Roots of the finite-well matching condition on (0, √V0), largest first.
pub fn finite_well_kappas(depth: f64, width: f64) -> Vec<f64> {
    let f = |kappa: f64| {
        let p = (depth - kappa * kappa).sqrt();
        2.0 * kappa * (p * width).cos() + (kappa * kappa / p - p) * (p * width).sin()
    };
    let top = depth.sqrt();
    let n = 200_000;
    let mut roots = vec![];
    let mut prev = (1e-9, f(1e-9));
    for i in 1..n {
        let k = top * i as f64 / n as f64;
        let v = f(k);
        if v.signum() != prev.1.signum() {
            let (mut a, mut b) = (prev.0, k);
            let fa0 = prev.1;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if f(m).signum() == fa0.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev = (k, v);
    }
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    roots
}

/// Closed-form left norming constant of a finite well at a bound state.
pub fn finite_well_norming(depth: f64, width: f64, kappa: f64) -> f64 {
    let p = (depth - kappa * kappa).sqrt();
    let r = kappa / p;
    let b = width;
    let s2 = (2.0 * p * b).sin() / (4.0 * p);
    let inner = (b / 2.0 + s2) + r * (p * b).sin().powi(2) / p + r * r * (b / 2.0 - s2);
    let psi_b = (p * b).cos() + r * (p * b).sin();
    1.0 / (1.0 / (2.0 * kappa) + inner + psi_b * psi_b / (2.0 * kappa))
}

/// One-soliton `-2κ² sech²(κ(x - 4κ²t) + δ)` with `δ = ½ ln(c / 2κ)`.
pub fn one_soliton(kappa: f64, c: f64, x: f64, t: f64) -> f64 {
    let delta = 0.5 * (c / (2.0 * kappa)).ln();
    let s = 1.0 / (kappa * (x - 4.0 * kappa * kappa * t) + delta).cosh();
    -2.0 * kappa * kappa * s * s
}
