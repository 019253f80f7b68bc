//! Gauss–Legendre rules, composite panels and the trapezoid rule.

use crate::scalar::Real;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1], ascending.
///
/// Computed in `f64` by Newton iteration on the three-term recurrence and
/// converted afterwards, so `f32` rules are correctly rounded.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre_f64(n);
    (
        x.into_iter().map(T::of).collect(),
        w.into_iter().map(T::of).collect(),
    )
}

fn gauss_legendre_f64(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x).
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A quadrature rule on a real interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    /// Composite Gauss–Legendre rule with panel edges `breaks` and `order` nodes per panel.
    pub fn composite(breaks: &[T], order: usize) -> Self {
        let (x, w) = gauss_legendre::<T>(order);
        let mut nodes = Vec::with_capacity(order * breaks.len());
        let mut weights = Vec::with_capacity(order * breaks.len());
        let half = T::of(0.5);
        for p in breaks.windows(2) {
            let (a, b) = (p[0], p[1]);
            let c = (a + b) * half;
            let r = (b - a) * half;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(c + r * *xi);
                weights.push(r * *wi);
            }
        }
        Rule { nodes, weights }
    }

    /// `n_panels` equal panels on [a, b].
    pub fn uniform(a: T, b: T, n_panels: usize, order: usize) -> Self {
        let n = n_panels.max(1);
        let breaks: Vec<T> = (0..=n)
            .map(|i| a + (b - a) * T::count(i) / T::count(n))
            .collect();
        Self::composite(&breaks, order)
    }

    /// Exactly `n` nodes on [a, b], split into panels of at most `max_order` nodes.
    pub fn with_node_count(a: T, b: T, n: usize, max_order: usize) -> Self {
        if n == 0 {
            return Rule { nodes: vec![], weights: vec![] };
        }
        let panels = n.div_ceil(max_order.max(1));
        let base = n / panels;
        let extra = n % panels;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for p in 0..panels {
            let order = base + usize::from(p < extra);
            let lo = a + (b - a) * T::count(p) / T::count(panels);
            let hi = a + (b - a) * T::count(p + 1) / T::count(panels);
            let r = Self::composite(&[lo, hi], order);
            nodes.extend(r.nodes);
            weights.extend(r.weights);
        }
        Rule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (x, w)| acc + *w * f(*x))
    }
}

/// Trapezoid rule for samples on a uniform grid of spacing `h`.
pub fn trapezoid<T: Real>(values: &[T], h: T) -> T {
    match values.len() {
        0 | 1 => T::zero(),
        n => {
            let inner = values.iter().fold(T::zero(), |a, v| a + *v);
            h * (inner - (values[0] + values[n - 1]) * T::of(0.5))
        }
    }
}

/// Adaptive Gauss–Kronrod-free bisection quadrature used for checks: recursively
/// compares a 10-point rule against its two halves.
pub fn adaptive<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, tol: T, depth: usize) -> T {
    let whole = Rule::composite(&[a, b], 10).integrate(f);
    let mid = (a + b) * T::of(0.5);
    let split = Rule::composite(&[a, mid, b], 10).integrate(f);
    if depth == 0 || (whole - split).mag() <= tol {
        split
    } else {
        let h = tol * T::of(0.5);
        adaptive(f, a, mid, h, depth - 1) + adaptive(f, mid, b, h, depth - 1)
    }
}
