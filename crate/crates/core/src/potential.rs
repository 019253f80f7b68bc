//! Initial data supported on the half-line: presets, sampling, truncation and norms.
//!
//! A [`Potential`] stores uniform samples on `[0, b_max]` together with the
//! profile they came from. Analytic presets keep their closed form so the Jost
//! integrator can place mesh nodes exactly at jumps; potentials read from files
//! fall back to linear interpolation of the samples.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::quadrature::{trapezoid, Rule};
use crate::scalar::Real;

/// Sampling grid shared by all potentials of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub grid_step: T,
    pub b_max: T,
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        GridSpec { grid_step: T::of(0.005), b_max: T::of(20.0) }
    }
}

impl<T: Real> GridSpec<T> {
    pub fn new(grid_step: T, b_max: T) -> Result<Self> {
        if !(grid_step > T::zero()) || !(b_max > T::zero()) || !grid_step.is_finite_value() {
            return Err(Error::InvalidInput(format!(
                "grid_step {} and b_max {} must be positive",
                grid_step.as_f64(),
                b_max.as_f64()
            )));
        }
        let n = (b_max / grid_step).as_f64();
        if (n - n.round()).abs() > 1e-6 {
            return Err(Error::InvalidInput(format!(
                "b_max {} is not a multiple of grid_step {}",
                b_max.as_f64(),
                grid_step.as_f64()
            )));
        }
        Ok(GridSpec { grid_step, b_max })
    }

    pub fn n_intervals(&self) -> usize {
        (self.b_max / self.grid_step).as_f64().round() as usize
    }

    pub fn x(&self, j: usize) -> T {
        self.grid_step * T::count(j)
    }
}

/// Analytic families of test potentials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Preset<T> {
    Zero,
    /// `-depth` on `(0, width)`.
    SquareWell { depth: T, width: T },
    /// `-amplitude * exp(-rate x)` on `(0, b_max)`.
    ExpDecay { amplitude: T, rate: T },
    /// `-2κ² sech²(κ(x - center))` on `(0, cut)`.
    TruncatedSech2 { kappa: T, center: T, cut: T },
    /// `amplitude * exp(-(x - mean)² / (2 sigma²))` on `(0, b_max)`.
    GaussianBump { amplitude: T, mean: T, sigma: T },
}

impl<T: Real> Preset<T> {
    pub fn new(name: &str, params: &[T], b_max: T) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if params.len() != n {
                Err(Error::InvalidParameters(format!(
                    "{name} takes {n} parameter(s), got {}",
                    params.len()
                )))
            } else if params.iter().any(|p| !p.is_finite_value()) {
                Err(Error::InvalidParameters(format!("{name}: non-finite parameter")))
            } else {
                Ok(())
            }
        };
        let bad = |msg: String| Err(Error::InvalidParameters(format!("{name}: {msg}")));
        let zero = T::zero();
        match name {
            "zero" => {
                want(0)?;
                Ok(Preset::Zero)
            }
            "square_well" => {
                want(2)?;
                let (depth, width) = (params[0], params[1]);
                if !(width > zero) || width > b_max {
                    return bad(format!("width {} outside (0, b_max]", width.as_f64()));
                }
                Ok(Preset::SquareWell { depth, width })
            }
            "exp_decay" => {
                want(2)?;
                if !(params[1] > zero) {
                    return bad("rate must be positive".into());
                }
                Ok(Preset::ExpDecay { amplitude: params[0], rate: params[1] })
            }
            "truncated_sech2" => {
                want(3)?;
                let (kappa, center, cut) = (params[0], params[1], params[2]);
                if !(kappa > zero) {
                    return bad("kappa must be positive".into());
                }
                if !(cut > zero) || cut > b_max {
                    return bad(format!("cut {} outside (0, b_max]", cut.as_f64()));
                }
                Ok(Preset::TruncatedSech2 { kappa, center, cut })
            }
            "gaussian_bump" => {
                want(3)?;
                let (amplitude, mean, sigma) = (params[0], params[1], params[2]);
                if !(sigma > zero) {
                    return bad("sigma must be positive".into());
                }
                if mean < zero || mean > b_max {
                    return bad(format!("mean {} outside [0, b_max]", mean.as_f64()));
                }
                Ok(Preset::GaussianBump { amplitude, mean, sigma })
            }
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Zero => "zero",
            Preset::SquareWell { .. } => "square_well",
            Preset::ExpDecay { .. } => "exp_decay",
            Preset::TruncatedSech2 { .. } => "truncated_sech2",
            Preset::GaussianBump { .. } => "gaussian_bump",
        }
    }

    pub fn params(&self) -> Vec<T> {
        match *self {
            Preset::Zero => vec![],
            Preset::SquareWell { depth, width } => vec![depth, width],
            Preset::ExpDecay { amplitude, rate } => vec![amplitude, rate],
            Preset::TruncatedSech2 { kappa, center, cut } => vec![kappa, center, cut],
            Preset::GaussianBump { amplitude, mean, sigma } => vec![amplitude, mean, sigma],
        }
    }

    /// Closed form on the natural support (continuous there).
    fn profile(&self, x: T) -> T {
        match *self {
            Preset::Zero => T::zero(),
            Preset::SquareWell { depth, .. } => -depth,
            Preset::ExpDecay { amplitude, rate } => -amplitude * (-rate * x).exp(),
            Preset::TruncatedSech2 { kappa, center, .. } => {
                let c = (kappa * (x - center)).cosh();
                -T::of(2.0) * kappa * kappa / (c * c)
            }
            Preset::GaussianBump { amplitude, mean, sigma } => {
                let z = (x - mean) / sigma;
                amplitude * (-z * z * T::of(0.5)).exp()
            }
        }
    }

    fn natural_end(&self, b_max: T) -> T {
        match *self {
            Preset::Zero => T::zero(),
            Preset::SquareWell { width, .. } => width,
            Preset::TruncatedSech2 { cut, .. } => cut,
            Preset::ExpDecay { .. } | Preset::GaussianBump { .. } => b_max,
        }
    }

    fn constant(&self) -> Option<T> {
        match *self {
            Preset::Zero => Some(T::zero()),
            Preset::SquareWell { depth, .. } => Some(-depth),
            _ => None,
        }
    }
}

/// Where the values of a potential come from.
#[derive(Clone, Debug)]
enum Shape<T> {
    Preset(Preset<T>),
    /// Linear interpolation of raw samples with spacing `step`.
    Samples { step: T, values: Arc<Vec<T>> },
}

impl<T: Real> Shape<T> {
    fn eval(&self, x: T) -> T {
        match self {
            Shape::Preset(p) => p.profile(x),
            Shape::Samples { step, values } => {
                let n = values.len();
                if n == 0 || x < T::zero() {
                    return T::zero();
                }
                let s = x / *step;
                let j = s.floor().as_f64() as usize;
                if j + 1 >= n {
                    return if j + 1 == n { values[n - 1] } else { T::zero() };
                }
                let f = s - T::count(j);
                values[j] * (T::one() - f) + values[j + 1] * f
            }
        }
    }

    fn natural_end(&self, b_max: T) -> T {
        match self {
            Shape::Preset(p) => p.natural_end(b_max),
            Shape::Samples { step, values } => {
                match values.iter().rposition(|v| *v != T::zero()) {
                    None => T::zero(),
                    Some(j) => (*step * T::count(j + 1)).min_of(b_max),
                }
            }
        }
    }

    fn constant(&self) -> Option<T> {
        match self {
            Shape::Preset(p) => p.constant(),
            Shape::Samples { .. } => None,
        }
    }

    /// Interior points where the profile has a kink that the mesh should respect.
    fn kinks(&self, lo: T, hi: T) -> Vec<T> {
        match self {
            Shape::Preset(_) => vec![],
            Shape::Samples { step, .. } => {
                let first = (lo / *step).floor().as_f64() as usize + 1;
                let mut out = vec![];
                let mut j = first;
                loop {
                    let x = *step * T::count(j);
                    if x >= hi {
                        break;
                    }
                    if x > lo {
                        out.push(x);
                    }
                    j += 1;
                }
                out
            }
        }
    }
}

/// Nodes of an integration mesh across the support, with per-interval flags
/// telling whether the potential is constant there.
#[derive(Clone, Debug)]
pub struct Mesh<T> {
    pub nodes: Vec<T>,
    pub constant: Vec<Option<T>>,
}

impl<T: Real> Mesh<T> {
    pub fn n_intervals(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }
}

/// A real potential supported in `[0, b_max]`, sampled on a uniform grid.
#[derive(Clone, Debug)]
pub struct Potential<T> {
    grid: GridSpec<T>,
    samples: Vec<T>,
    preset_tag: Option<String>,
    shape: Shape<T>,
    window: (T, T),
}

/// On-disk layout of a potential.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialFile<T> {
    pub grid_step: T,
    pub b_max: T,
    pub samples: Vec<T>,
    pub preset_tag: Option<String>,
}

/// Parses `name(p1,p2,...)` with an optional `[lo,hi]` window suffix.
pub fn parse_tag(tag: &str) -> Result<(String, Vec<f64>, Option<(f64, f64)>)> {
    let tag = tag.trim();
    let bad = || Error::InvalidInput(format!("malformed preset tag `{tag}`"));
    let (head, window) = match tag.find('[') {
        Some(i) => {
            let w = tag[i..].trim();
            if !w.ends_with(']') {
                return Err(bad());
            }
            let inner = &w[1..w.len() - 1];
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != 2 {
                return Err(bad());
            }
            let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
            let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
            (tag[..i].trim(), Some((lo, hi)))
        }
        None => (tag, None),
    };
    let (name, params) = match head.find('(') {
        Some(i) => {
            if !head.ends_with(')') {
                return Err(bad());
            }
            let inner = head[i + 1..head.len() - 1].trim();
            let params = if inner.is_empty() {
                vec![]
            } else {
                inner
                    .split(',')
                    .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?
            };
            (head[..i].trim().to_string(), params)
        }
        None => (head.to_string(), vec![]),
    };
    Ok((name, params, window))
}

fn format_tag(name: &str, params: &[f64], window: Option<(f64, f64)>) -> String {
    let mut s = String::from(name);
    if !params.is_empty() || name != "zero" {
        s.push('(');
        for (i, p) in params.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{p}");
        }
        s.push(')');
    }
    if let Some((lo, hi)) = window {
        let _ = write!(s, "[{lo},{hi}]");
    }
    s
}

/// Builds a preset potential sampled on `grid`.
pub fn make_preset<T: Real>(name: &str, params: &[T], grid: GridSpec<T>) -> Result<Potential<T>> {
    let preset = Preset::new(name, params, grid.b_max)?;
    Ok(Potential::from_shape(grid, Shape::Preset(preset), (T::zero(), grid.b_max)))
}

/// Builds a potential from a tag such as `square_well(1,2)` or `exp_decay(1,1)[0,4]`.
pub fn make_preset_from_tag<T: Real>(tag: &str, grid: GridSpec<T>) -> Result<Potential<T>> {
    let (name, params, window) = parse_tag(tag)?;
    let params: Vec<T> = params.into_iter().map(T::of).collect();
    let q = make_preset(&name, &params, grid)?;
    match window {
        None => Ok(q),
        Some((lo, hi)) => q.restrict(T::of(lo), T::of(hi)),
    }
}

impl<T: Real> Potential<T> {
    fn from_shape(grid: GridSpec<T>, shape: Shape<T>, window: (T, T)) -> Self {
        let mut q = Potential { grid, samples: vec![], preset_tag: None, shape, window };
        q.samples = q.sample();
        q.preset_tag = q.tag();
        q
    }

    /// The zero potential.
    pub fn zero(grid: GridSpec<T>) -> Self {
        Self::from_shape(grid, Shape::Preset(Preset::Zero), (T::zero(), grid.b_max))
    }

    /// Wraps raw samples; the tag is kept (and the analytic profile used) only
    /// when it reproduces the samples.
    pub fn from_samples(
        grid_step: T,
        b_max: T,
        samples: Vec<T>,
        preset_tag: Option<String>,
    ) -> Result<Self> {
        let grid = GridSpec::new(grid_step, b_max)?;
        if samples.len() != grid.n_intervals() + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} samples for b_max / grid_step, got {}",
                grid.n_intervals() + 1,
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite_value()) {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        if let Some(tag) = &preset_tag {
            if let Ok(q) = make_preset_from_tag(tag, grid) {
                let scale = samples.iter().fold(T::one(), |m, v| m.max_of(v.mag()));
                let tol = T::default_epsilon() * T::of(64.0) * scale;
                if q.samples.iter().zip(&samples).all(|(a, b)| (*a - *b).mag() <= tol) {
                    return Ok(q);
                }
            }
        }
        let shape = Shape::Samples { step: grid_step, values: Arc::new(samples) };
        Ok(Self::from_shape(grid, shape, (T::zero(), b_max)))
    }

    pub fn grid(&self) -> GridSpec<T> {
        self.grid
    }

    pub fn grid_step(&self) -> T {
        self.grid.grid_step
    }

    pub fn b_max(&self) -> T {
        self.grid.b_max
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn preset_tag(&self) -> Option<&str> {
        self.preset_tag.as_deref()
    }

    /// `[lo, hi]` outside of which the potential vanishes.
    pub fn support(&self) -> (T, T) {
        let end = self.shape.natural_end(self.grid.b_max).min_of(self.window.1);
        let lo = self.window.0.min_of(end);
        (lo, end)
    }

    pub fn is_zero(&self) -> bool {
        let (lo, hi) = self.support();
        hi <= lo || self.shape.constant() == Some(T::zero())
    }

    /// Value at an interior point; at jumps the right limit is returned.
    pub fn value(&self, x: T) -> T {
        let (lo, hi) = self.support();
        if x < lo || x >= hi {
            T::zero()
        } else {
            self.shape.eval(x)
        }
    }

    fn left_limit(&self, x: T) -> T {
        let (lo, hi) = self.support();
        if x > lo && x <= hi {
            self.shape.eval(x)
        } else {
            T::zero()
        }
    }

    /// Value used when sampling: the average of one-sided limits at jumps,
    /// except at the origin where the grid starts and the right limit is used.
    pub fn sample_value(&self, x: T) -> T {
        let right = self.value(x);
        if x <= T::zero() {
            return right;
        }
        let left = self.left_limit(x);
        (left + right) * T::of(0.5)
    }

    fn sample(&self) -> Vec<T> {
        let n = self.grid.n_intervals();
        let (lo, hi) = self.support();
        let tol = self.grid.grid_step * T::of(1e-9);
        (0..=n)
            .map(|j| {
                let x = self.grid.x(j);
                let at_edge = (x - lo).mag() <= tol || (x - hi).mag() <= tol;
                if at_edge {
                    let x_edge = if (x - lo).mag() <= tol { lo } else { hi };
                    self.sample_value(x_edge)
                } else {
                    self.value(x)
                }
            })
            .collect()
    }

    fn tag(&self) -> Option<String> {
        match &self.shape {
            Shape::Samples { .. } => None,
            Shape::Preset(p) => {
                let params: Vec<f64> = p.params().into_iter().map(|v| v.as_f64()).collect();
                let full = self.window.0 == T::zero() && self.window.1 >= self.grid.b_max;
                let window = (!full).then(|| (self.window.0.as_f64(), self.window.1.as_f64()));
                Some(format_tag(p.name(), &params, window))
            }
        }
    }

    /// `q · 1_(0,b)`.
    pub fn truncate(&self, b: T) -> Result<Self> {
        if !(b > T::zero()) || b > self.grid.b_max {
            return Err(Error::TruncationOutOfRange { b: b.as_f64(), b_max: self.grid.b_max.as_f64() });
        }
        self.restrict(T::zero(), b)
    }

    /// `q · 1_(lo,hi)` in the same coordinate frame.
    pub fn restrict(&self, lo: T, hi: T) -> Result<Self> {
        if lo < T::zero() || !(hi > lo) || hi > self.grid.b_max {
            return Err(Error::InvalidInput(format!(
                "window [{}, {}] not inside [0, {}]",
                lo.as_f64(),
                hi.as_f64(),
                self.grid.b_max.as_f64()
            )));
        }
        let window = (lo.max_of(self.window.0), hi.min_of(self.window.1));
        let window = if window.1 < window.0 { (window.0, window.0) } else { window };
        Ok(Self::from_shape(self.grid, self.shape.clone(), window))
    }

    /// Trapezoid values of the L¹ and L² norms from the samples.
    pub fn norms(&self) -> (T, T) {
        let h = self.grid.grid_step;
        let abs: Vec<T> = self.samples.iter().map(|v| v.mag()).collect();
        let sq: Vec<T> = self.samples.iter().map(|v| *v * *v).collect();
        (trapezoid(&abs, h), trapezoid(&sq, h).sqrt())
    }

    /// ∫ q² using Gauss–Legendre on each smooth piece of the profile.
    pub fn integral_of_square(&self) -> T {
        self.profile_integral(|v| v * v)
    }

    /// ∫ |q| using Gauss–Legendre on each smooth piece of the profile.
    pub fn l1_exact(&self) -> T {
        self.profile_integral(|v| v.mag())
    }

    fn profile_integral(&self, f: impl Fn(T) -> T) -> T {
        let mesh = self.mesh(T::of(0.25));
        let mut total = T::zero();
        for (i, p) in mesh.nodes.windows(2).enumerate() {
            if let Some(c) = mesh.constant[i] {
                total += f(c) * (p[1] - p[0]);
            } else {
                total += Rule::composite(&[p[0], p[1]], 12).integrate(|x| f(self.shape.eval(x)));
            }
        }
        total
    }

    /// Mesh from 0 to the end of the support with steps at most `max_step`.
    /// Constant pieces are kept as a single interval.
    pub fn mesh(&self, max_step: T) -> Mesh<T> {
        self.build_mesh(max_step, true)
    }

    /// Like [`Potential::mesh`] but constant pieces are subdivided too.
    pub fn fine_mesh(&self, max_step: T) -> Mesh<T> {
        self.build_mesh(max_step, false)
    }

    fn build_mesh(&self, max_step: T, merge_constant: bool) -> Mesh<T> {
        let (lo, hi) = self.support();
        let mut nodes = vec![T::zero()];
        let mut constant = vec![];
        if hi <= lo {
            return Mesh { nodes, constant };
        }
        let push_run = |nodes: &mut Vec<T>, constant: &mut Vec<Option<T>>, a: T, b: T, c: Option<T>| {
            if b <= a {
                return;
            }
            let n = if merge_constant && c.is_some() {
                1
            } else {
                ((b - a) / max_step).ceil().as_f64().max(1.0) as usize
            };
            for i in 1..=n {
                let x = if i == n { b } else { a + (b - a) * T::count(i) / T::count(n) };
                nodes.push(x);
                constant.push(c);
            }
        };
        if lo > T::zero() {
            push_run(&mut nodes, &mut constant, T::zero(), lo, Some(T::zero()));
        }
        let c = self.shape.constant();
        let mut breaks = vec![lo];
        breaks.extend(self.shape.kinks(lo, hi));
        breaks.push(hi);
        for p in breaks.windows(2) {
            push_run(&mut nodes, &mut constant, p[0], p[1], c);
        }
        Mesh { nodes, constant }
    }

    /// Hex SHA-256 over the grid parameters and the sample bit patterns.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.grid.grid_step.as_f64().to_le_bytes());
        h.update(self.grid.b_max.as_f64().to_le_bytes());
        for v in &self.samples {
            h.update(v.as_f64().to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn to_file(&self) -> PotentialFile<T> {
        PotentialFile {
            grid_step: self.grid.grid_step,
            b_max: self.grid.b_max,
            samples: self.samples.clone(),
            preset_tag: self.preset_tag.clone(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let s = serde_json::to_string(&self.to_file())?;
        std::fs::write(path, s)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: PotentialFile<T> = serde_json::from_str(&text)?;
        Self::try_from(file)
    }
}

impl<T: Real> TryFrom<PotentialFile<T>> for Potential<T> {
    type Error = Error;

    fn try_from(f: PotentialFile<T>) -> Result<Self> {
        Potential::from_samples(f.grid_step, f.b_max, f.samples, f.preset_tag)
    }
}

impl<T: Real> Serialize for Potential<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Potential<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = PotentialFile::<T>::deserialize(d)?;
        Potential::try_from(f).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec<f64> {
        GridSpec::default()
    }

    #[test]
    fn zero_preset() {
        let q = make_preset::<f64>("zero", &[], grid()).unwrap();
        assert!(q.samples().iter().all(|v| *v == 0.0));
        assert_eq!(q.norms(), (0.0, 0.0));
        assert!(q.is_zero());
        let t = q.truncate(1.0).unwrap();
        assert!(t.samples().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn square_well_norms() {
        let q = make_preset("square_well", &[1.0, 2.0], grid()).unwrap();
        let (l1, l2) = q.norms();
        assert!((l1 - 2.0).abs() < 1e-12);
        // the half-value sample at x = 2 costs h/4 in the L² trapezoid
        assert!((l2 - 2f64.sqrt()).abs() < 1e-3);
        assert!((q.integral_of_square() - 2.0).abs() < 1e-13);
        let j = (2.0 / 0.005) as usize;
        assert_eq!(q.samples()[j], -0.5);
        assert_eq!(q.samples()[0], -1.0);
        assert_eq!(q.preset_tag(), Some("square_well(1,2)"));
    }

    #[test]
    fn exp_decay_norms() {
        let q = make_preset("exp_decay", &[1.0, 1.0], grid()).unwrap();
        let (l1, l2) = q.norms();
        let e1 = 1.0 - (-20f64).exp();
        let e2 = ((1.0 - (-40f64).exp()) / 2.0).sqrt();
        assert!((l1 - e1).abs() < 1e-5);
        assert!((l2 - e2).abs() < 1e-5);
        for b in [1.0f64, 2.0, 5.0, 10.0] {
            let tail = l1 - q.truncate(b).unwrap().norms().0;
            let exact = (-b).exp() - (-20f64).exp();
            assert!((tail - exact).abs() < 10.0 * 0.005 * 0.005, "b = {b}");
        }
    }

    #[test]
    fn truncation_of_the_square_well() {
        let q = make_preset("square_well", &[1.0, 2.0], grid()).unwrap();
        let t = q.truncate(1.0).unwrap();
        let w = make_preset("square_well", &[1.0, 1.0], grid()).unwrap();
        assert_eq!(t.samples(), w.samples());
        assert_eq!(t.support(), (0.0, 1.0));
        assert_eq!(q.truncate(3.0).unwrap().samples(), q.samples());
        assert!(q.truncate(0.0).is_err());
        assert!(q.truncate(21.0).is_err());
    }

    #[test]
    fn truncation_is_idempotent() {
        let q = make_preset("gaussian_bump", &[-1.0, 3.0, 0.7], grid()).unwrap();
        let once = q.truncate(2.5).unwrap();
        let twice = once.truncate(2.5).unwrap();
        assert_eq!(once.samples(), twice.samples());
    }

    #[test]
    fn tags_roundtrip_through_json() {
        let q = make_preset_from_tag::<f64>("exp_decay(1,1)[2,20]", grid()).unwrap();
        assert_eq!(q.support(), (2.0, 20.0));
        let s = serde_json::to_string(&q).unwrap();
        let back: Potential<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back.preset_tag(), q.preset_tag());
        assert_eq!(back.samples(), q.samples());
        assert_eq!(back.digest(), q.digest());
    }

    #[test]
    fn samples_without_tag_interpolate() {
        let g = GridSpec::new(0.5, 2.0).unwrap();
        let q = Potential::<f64>::from_samples(0.5, 2.0, vec![-1.0, -1.0, -0.5, 0.0, 0.0], None).unwrap();
        assert_eq!(q.grid(), g);
        assert!(q.preset_tag().is_none());
        assert_eq!(q.support(), (0.0, 1.5));
        assert!((q.value(0.75) + 0.75).abs() < 1e-15);
        assert_eq!(q.mesh(0.5).nodes, vec![0.0, 0.5, 1.0, 1.5]);
        let fine = q.mesh(0.1);
        assert_eq!(fine.n_intervals(), 15);
        assert!([0.5, 1.0, 1.5].iter().all(|x| fine.nodes.contains(x)));
    }

    #[test]
    fn mismatching_tag_is_dropped() {
        let mut s = make_preset::<f64>("square_well", &[1.0, 2.0], grid()).unwrap().samples().to_vec();
        s[10] = 3.0;
        let q = Potential::from_samples(0.005, 20.0, s, Some("square_well(1,2)".into())).unwrap();
        assert!(q.preset_tag().is_none());
    }

    #[test]
    fn errors() {
        assert!(matches!(make_preset::<f64>("nope", &[], grid()), Err(Error::UnknownPreset(_))));
        assert!(make_preset::<f64>("square_well", &[1.0, -1.0], grid()).is_err());
        assert!(make_preset::<f64>("square_well", &[1.0, 25.0], grid()).is_err());
        assert!(make_preset::<f64>("gaussian_bump", &[1.0, -1.0, 1.0], grid()).is_err());
        assert!(make_preset::<f64>("exp_decay", &[1.0], grid()).is_err());
    }

    #[test]
    fn mesh_keeps_jumps_and_constant_pieces() {
        let q = make_preset::<f64>("square_well", &[1.0, 2.0], grid()).unwrap();
        let m = q.mesh(0.01);
        assert_eq!(m.nodes, vec![0.0, 2.0]);
        assert_eq!(m.constant, vec![Some(-1.0)]);
        let r = q.restrict(1.0, 20.0).unwrap();
        let m = r.mesh(0.01);
        assert_eq!(m.nodes, vec![0.0, 1.0, 2.0]);
        let f = r.fine_mesh(0.25);
        assert_eq!(f.n_intervals(), 8);
    }

    #[test]
    fn single_precision_preset() {
        let q = make_preset::<f32>("square_well", &[1.0, 2.0], GridSpec::default()).unwrap();
        assert!((q.norms().0 - 2.0).abs() < 1e-3);
    }
}
