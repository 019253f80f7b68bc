//! Orchestration behind the command-line tool: one [`RunConfig`], five commands,
//! and a manifest next to every set of outputs.
//!
//! Everything here is `f64`. Outputs are written under `output_dir`; the
//! scattering cache lives in `$KDV_IST_CACHE` (default `<output_dir>/cache`).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pde_ref::{evolve_kdv, PdeParams, PdeRun};
use crate::potential::{make_preset_from_tag, GridSpec, Potential};
use crate::reconstruct::{reconstruct_grid, PathKind, ReconstructParams, ReconstructionField, SpectralData};
use crate::scattering::{scattering_coefficients, symmetric_k_grid, BoundStateConfig, ScatteringSlice};
use crate::validate::{validate_potential, validate_with_slice, SuiteOptions, Tolerances, ValidationReport};

/// Environment variable naming the scattering cache directory.
pub const CACHE_ENV: &str = "KDV_IST_CACHE";

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    /// Preset tag such as `square_well(1,2)`; ignored when `file` is set.
    pub preset: String,
    /// Potential file (JSON with `grid_step`, `b_max`, `samples`).
    pub file: Option<PathBuf>,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        PotentialConfig { preset: "square_well(1,2)".into(), file: None }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub grid_step: f64,
    pub b_max: f64,
    pub k_max: f64,
    pub dk: f64,
    /// Smallest `|k|` on the momentum grid.
    pub k_gap: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { grid_step: 0.005, b_max: 20.0, k_max: 20.0, dk: 0.005, k_gap: 0.0025 }
    }
}

impl GridConfig {
    pub fn spec(&self) -> Result<GridSpec<f64>> {
        GridSpec::new(self.grid_step, self.b_max)
    }

    pub fn k_grid(&self) -> Result<Vec<f64>> {
        symmetric_k_grid(self.k_max, self.dk, self.k_gap)
    }
}

/// Sample points: an explicit list or an inclusive arithmetic range.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Axis {
    pub fn points(&self) -> Result<Vec<f64>> {
        match self {
            Axis::List(v) => Ok(v.clone()),
            &Axis::Range { start, stop, step } => {
                if !(step > 0.0) || !(stop >= start) {
                    return Err(Error::Config(format!("bad range {start}..{stop} step {step}")));
                }
                // index-based so the grid does not depend on accumulated roundoff
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                Ok((0..=n).map(|i| start + step * i as f64).collect())
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    pub tolerances: Tolerances,
    pub b_list: Vec<f64>,
    pub rate_a: Option<f64>,
    /// `(x, t)` pairs for the Hankel norm check.
    pub hankel_points: Vec<[f64; 2]>,
    /// Use this scattering slice instead of a fresh forward solve.
    pub slice: Option<PathBuf>,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        let d = SuiteOptions::<f64>::default();
        ValidateConfig {
            tolerances: d.tolerances,
            b_list: d.b_list,
            rate_a: None,
            hankel_points: d.hankel_points.iter().map(|(x, t)| [*x, *t]).collect(),
            slice: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdeConfig {
    /// Spectral cutoff used to size the periodic box.
    pub xi_cut: f64,
    pub dt: f64,
    pub n_modes: Option<usize>,
    pub domain_half_width: Option<f64>,
    /// Pass threshold for the max abs IST/PDE difference.
    pub tolerance: f64,
}

impl Default for PdeConfig {
    fn default() -> Self {
        PdeConfig { xi_cut: 21.0, dt: 2.5e-4, n_modes: None, domain_half_width: None, tolerance: 1e-2 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Nyström `(panel_length, order)` levels, coarse to fine.
    pub levels: Vec<(f64, usize)>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { levels: vec![(4.0, 2), (4.0, 3), (2.0, 3), (1.0, 12)] }
    }
}

/// One experiment. Every field can be overridden by a dotted key, see [`RunConfig::set`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialConfig,
    pub grid: GridConfig,
    pub path: PathKind,
    pub x_grid: Axis,
    pub t_list: Vec<f64>,
    /// Also run the other path and report the agreement.
    pub compare_paths: bool,
    pub reconstruct: ReconstructParams<f64>,
    pub validate: ValidateConfig,
    pub pde: PdeConfig,
    pub sweep: SweepConfig,
    pub output_dir: PathBuf,
    /// Worker threads; rayon's default when absent.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            potential: PotentialConfig::default(),
            grid: GridConfig::default(),
            path: PathKind::Contour,
            x_grid: Axis::Range { start: -5.0, stop: 15.0, step: 0.5 },
            t_list: vec![0.1, 0.5],
            compare_paths: false,
            reconstruct: ReconstructParams::default(),
            validate: ValidateConfig::default(),
            pde: PdeConfig::default(),
            sweep: SweepConfig::default(),
            output_dir: PathBuf::from("out"),
            threads: None,
        }
    }
}

fn parse_scalar(raw: &str) -> serde_json::Value {
    serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()))
}

impl RunConfig {
    /// Reads a `.json` or `.toml` file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
            _ => serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
        }
    }

    /// Overrides one value by dotted key, e.g. `reconstruct.nystrom.order=8`.
    /// The value is read as JSON when it parses and as a bare string otherwise.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let mut root = serde_json::to_value(&*self)?;
        let mut slot = &mut root;
        for part in key.split('.') {
            slot = slot
                .as_object_mut()
                .and_then(|m| m.get_mut(part))
                .ok_or_else(|| Error::Config(format!("unknown config key `{key}`")))?;
        }
        *slot = parse_scalar(raw);
        *self = serde_json::from_value(root).map_err(|e| Error::Config(format!("{key}={raw}: {e}")))?;
        Ok(())
    }

    /// Applies `key=value` strings in order.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o.split_once('=').ok_or_else(|| Error::Config(format!("override `{o}` is not key=value")))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn load_potential(&self) -> Result<Potential<f64>> {
        match &self.potential.file {
            Some(f) => Potential::load(f),
            None => make_preset_from_tag(&self.potential.preset, self.grid.spec()?),
        }
    }

    fn cache_dir(&self) -> PathBuf {
        std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| self.output_dir.join("cache"))
    }
}

/// Files written by a command plus what the CLI prints.
#[derive(Clone, Debug)]
pub struct Outcome<R> {
    pub value: R,
    pub summary: String,
    pub pass: bool,
    pub manifest: PathBuf,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub potential_digest: String,
    pub threads: usize,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<String, f64>,
    pub outputs: Vec<OutputFile>,
    pub pass: bool,
}

pub fn file_digest(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

struct Recorder<'a> {
    cfg: &'a RunConfig,
    command: &'static str,
    timings: BTreeMap<String, f64>,
    outputs: Vec<PathBuf>,
    clock: Instant,
}

impl<'a> Recorder<'a> {
    fn new(cfg: &'a RunConfig, command: &'static str) -> Result<Self> {
        fs::create_dir_all(&cfg.output_dir)?;
        Ok(Recorder { cfg, command, timings: BTreeMap::new(), outputs: vec![], clock: Instant::now() })
    }

    fn lap(&mut self, stage: &str) {
        self.timings.insert(stage.to_string(), self.clock.elapsed().as_secs_f64());
        self.clock = Instant::now();
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.cfg.output_dir.join(name);
        self.outputs.push(p.clone());
        p
    }

    fn finish(self, digest: String, pass: bool) -> Result<PathBuf> {
        let outputs = self
            .outputs
            .iter()
            .map(|p| Ok(OutputFile { path: p.clone(), sha256: file_digest(p)? }))
            .collect::<Result<Vec<_>>>()?;
        let m = Manifest {
            command: self.command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: self.cfg.hash(),
            config: self.cfg.clone(),
            potential_digest: digest,
            threads: rayon::current_num_threads(),
            timings: self.timings,
            outputs,
            pass,
        };
        let path = self.cfg.output_dir.join(format!("{}_manifest.json", self.command));
        fs::write(&path, serde_json::to_string_pretty(&m)?)?;
        Ok(path)
    }
}

fn in_pool<R: Send>(cfg: &RunConfig, f: impl FnOnce() -> Result<R> + Send) -> Result<R> {
    match cfg.threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(f),
    }
}

fn scatter_cache_key(q: &Potential<f64>, g: &GridConfig) -> String {
    let mut h = Sha256::new();
    h.update(q.digest().as_bytes());
    for v in [g.grid_step, g.b_max, g.k_max, g.dk, g.k_gap] {
        h.update(v.to_le_bytes());
    }
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    hex::encode(h.finalize())
}

/// Forward scattering on the configured momentum grid, through the cache.
pub fn cmd_scatter(cfg: &RunConfig) -> Result<Outcome<ScatteringSlice<f64>>> {
    in_pool(cfg, || {
        let mut rec = Recorder::new(cfg, "scatter")?;
        let q = cfg.load_potential()?;
        let cache = cfg.cache_dir();
        let cached = cache.join(format!("scatter_{}.json", scatter_cache_key(&q, &cfg.grid)));
        let (slice, hit) = match fs::read(&cached) {
            Ok(bytes) => (serde_json::from_slice::<ScatteringSlice<f64>>(&bytes)?, true),
            Err(_) => {
                let s = scattering_coefficients(&q, &cfg.grid.k_grid()?, &BoundStateConfig::for_potential(&q))?;
                fs::create_dir_all(&cache)?;
                s.save(&cached)?;
                (s, false)
            }
        };
        rec.lap("scatter");
        let out = rec.path("scattering.json");
        fs::copy(&cached, &out)?;
        let qp = rec.path("potential.json");
        q.save(&qp)?;
        let mut summary = String::new();
        let n = slice.bound_states.len();
        let lmax = slice.l.iter().map(|l| l.norm()).fold(0.0, f64::max);
        if n == 0 && lmax == 0.0 {
            summary.push_str("0 bound states, L ≡ 0\n");
        } else {
            summary.push_str(&format!("{n} bound state{}\n", if n == 1 { "" } else { "s" }));
            summary.push_str("  n        kappa                 c\n");
            for (i, b) in slice.bound_states.iter().enumerate() {
                summary.push_str(&format!("  {i:<3} {:>20.14} {:>20.14e}\n", b.kappa, b.c));
            }
        }
        summary.push_str(&format!("unitarity residual {:.3e}", slice.unitarity_residual));
        if !slice.flagged.is_empty() {
            summary.push_str(&format!(" ({} flagged k)", slice.flagged.len()));
        }
        summary.push_str(if hit { "\ncache hit" } else { "\ncache miss" });
        let pass = slice.flagged.is_empty();
        let manifest = rec.finish(q.digest(), pass)?;
        Ok(Outcome { value: slice, summary, pass, manifest })
    })
}

fn suite_options(cfg: &RunConfig) -> Result<SuiteOptions<f64>> {
    Ok(SuiteOptions {
        k_grid: cfg.grid.k_grid()?,
        tolerances: cfg.validate.tolerances,
        b_list: cfg.validate.b_list.clone(),
        rate_a: cfg.validate.rate_a,
        hankel_points: cfg.validate.hankel_points.iter().map(|p| (p[0], p[1])).collect(),
        reconstruct: cfg.reconstruct,
    })
}

/// Runs the identity suite; `pass` is false when any check fails.
pub fn cmd_validate(cfg: &RunConfig) -> Result<Outcome<ValidationReport>> {
    in_pool(cfg, || {
        let mut rec = Recorder::new(cfg, "validate")?;
        let q = cfg.load_potential()?;
        let opts = suite_options(cfg)?;
        let report = match &cfg.validate.slice {
            Some(p) => validate_with_slice(&q, &ScatteringSlice::load(p)?, &opts)?,
            None => validate_potential(&q, &opts)?,
        };
        rec.lap("suite");
        report.save(&rec.path("validation.json"))?;
        let mut summary = String::new();
        for c in &report.checks {
            summary.push_str(&format!(
                "{} {:<28} residual {:.3e} tol {:.1e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance
            ));
        }
        let pass = report.all_pass();
        summary.push_str(&format!("{} of {} checks pass", report.checks.iter().filter(|c| c.pass).count(), report.checks.len()));
        let manifest = rec.finish(q.digest(), pass)?;
        Ok(Outcome { value: report, summary, pass, manifest })
    })
}

/// Difference between the two reconstruction paths on the same grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathAgreement {
    pub max_abs_diff: f64,
    pub mean_abs_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub field: ReconstructionField<f64>,
    pub csv_digest: String,
    pub agreement: Option<PathAgreement>,
}

const PATH_TOLERANCE: f64 = 1e-4;

fn spectral_data(q: &Potential<f64>) -> Result<SpectralData<f64>> {
    SpectralData::from_potential(q, &BoundStateConfig::for_potential(q))
}

/// `q(x, t)` on `x_grid × t_list` as CSV and JSON.
pub fn cmd_reconstruct(cfg: &RunConfig) -> Result<Outcome<Reconstruction>> {
    in_pool(cfg, || {
        let mut rec = Recorder::new(cfg, "reconstruct")?;
        let q = cfg.load_potential()?;
        let xs = cfg.x_grid.points()?;
        let data = spectral_data(&q)?;
        rec.lap("scatter");
        let field = reconstruct_grid(&data, &cfg.reconstruct, cfg.path, &xs, &cfg.t_list)?;
        rec.lap("reconstruct");
        let csv = rec.path("field.csv");
        field.save_csv(&csv)?;
        field.save_json(&rec.path("field.json"))?;
        let csv_digest = file_digest(&csv)?;
        let mut pass = field.diagnostics.iter().all(|d| !d.flagged);
        let mut summary = format!(
            "{} points on the {} path, max |Im q| {:.3e}\nfield.csv sha256 {csv_digest}",
            field.values.len(),
            path_name(cfg.path),
            field.max_imag_residual()
        );
        let agreement = if cfg.compare_paths {
            let other = match cfg.path {
                PathKind::Contour => PathKind::Proposition,
                PathKind::Proposition => PathKind::Contour,
            };
            let g = reconstruct_grid(&data, &cfg.reconstruct, other, &xs, &cfg.t_list)?;
            rec.lap("reconstruct_other_path");
            let diffs: Vec<f64> = field.values.iter().zip(&g.values).map(|(a, b)| (a - b).abs()).collect();
            let max_abs_diff = diffs.iter().copied().fold(0.0, f64::max);
            let a = PathAgreement {
                max_abs_diff,
                mean_abs_diff: diffs.iter().sum::<f64>() / diffs.len().max(1) as f64,
                tolerance: PATH_TOLERANCE,
                pass: max_abs_diff < PATH_TOLERANCE,
            };
            fs::write(rec.path("agreement.json"), serde_json::to_string_pretty(&a)?)?;
            summary.push_str(&format!("\n{} vs {} max |Δq| {:.3e}", path_name(cfg.path), path_name(other), a.max_abs_diff));
            pass &= a.pass;
            Some(a)
        } else {
            None
        };
        let manifest = rec.finish(q.digest(), pass)?;
        Ok(Outcome { value: Reconstruction { field, csv_digest, agreement }, summary, pass, manifest })
    })
}

fn path_name(p: PathKind) -> &'static str {
    match p {
        PathKind::Contour => "contour",
        PathKind::Proposition => "proposition",
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CrosscheckRow {
    pub t: f64,
    pub max_abs_error: f64,
    pub mean_abs_error: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Crosscheck {
    pub rows: Vec<CrosscheckRow>,
    pub pde: PdeParams<f64>,
    /// Latest time before radiation wrapped around the periodic box reaches the window.
    pub wrap_free_time: f64,
    pub energy_drift: f64,
    pub tolerance: f64,
}

impl Crosscheck {
    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.max_abs_error).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,max_abs_error,mean_abs_error\n");
        for r in &self.rows {
            s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", r.t, r.max_abs_error, r.mean_abs_error));
        }
        s
    }
}

fn pde_params(cfg: &RunConfig, xs: &[f64]) -> Result<PdeParams<f64>> {
    let (lo, hi) = (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let t_max = cfg.t_list.iter().copied().fold(0.0, f64::max);
    if !(lo <= hi) || !(t_max > 0.0) {
        return Err(Error::Config("crosscheck needs a nonempty x grid and positive times".into()));
    }
    let mut p = PdeParams { dt: cfg.pde.dt, ..PdeParams::for_window(lo, hi, t_max, cfg.pde.xi_cut) };
    if let Some(w) = cfg.pde.domain_half_width {
        p.domain_half_width = w;
    }
    if let Some(n) = cfg.pde.n_modes {
        p.n_modes = n;
    }
    Ok(p)
}

fn compare(field: &ReconstructionField<f64>, run: &PdeRun<f64>) -> Result<Vec<CrosscheckRow>> {
    let w = run.params.domain_half_width;
    field
        .t_list
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let s = run.snapshot(t).ok_or_else(|| Error::Pde(format!("no snapshot at t = {t}")))?;
            let errs: Vec<f64> =
                field.x_grid.iter().enumerate().map(|(i, &x)| (s.eval(x, w) - field.value(i, j)).abs()).collect();
            Ok(CrosscheckRow {
                t,
                max_abs_error: errs.iter().copied().fold(0.0, f64::max),
                mean_abs_error: errs.iter().sum::<f64>() / errs.len().max(1) as f64,
            })
        })
        .collect()
}

fn window_width(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - xs.iter().copied().fold(f64::INFINITY, f64::min)
}

/// IST field against the pseudo-spectral reference, error per time.
pub fn cmd_crosscheck(cfg: &RunConfig) -> Result<Outcome<Crosscheck>> {
    in_pool(cfg, || {
        let mut rec = Recorder::new(cfg, "crosscheck")?;
        let q = cfg.load_potential()?;
        let xs = cfg.x_grid.points()?;
        let params = pde_params(cfg, &xs)?;
        let run = evolve_kdv(&q, &cfg.t_list, &params)?;
        rec.lap("pde");
        let pde_dir = cfg.output_dir.join("pde");
        run.save_snapshots(&pde_dir)?;
        let field = reconstruct_grid(&spectral_data(&q)?, &cfg.reconstruct, cfg.path, &xs, &cfg.t_list)?;
        rec.lap("reconstruct");
        let out = Crosscheck {
            rows: compare(&field, &run)?,
            pde: params,
            wrap_free_time: params.wrap_free_time(window_width(&xs)),
            energy_drift: run.energy_drift(),
            tolerance: cfg.pde.tolerance,
        };
        fs::write(rec.path("crosscheck.csv"), out.to_csv())?;
        fs::write(rec.path("crosscheck.json"), serde_json::to_string_pretty(&out)?)?;
        let t_max = cfg.t_list.iter().copied().fold(0.0, f64::max);
        let pass = out.max_error() < out.tolerance && out.wrap_free_time >= t_max;
        let mut summary = format!(
            "PDE box half-width {:.1}, {} modes, dt {:.1e}, energy drift {:.2e}\n       t     max|err|    mean|err|\n",
            params.domain_half_width,
            params.n_modes,
            params.dt,
            out.energy_drift
        );
        for r in &out.rows {
            summary.push_str(&format!("{:>8.4} {:>12.3e} {:>12.3e}\n", r.t, r.max_abs_error, r.mean_abs_error));
        }
        if out.wrap_free_time < t_max {
            summary.push_str(&format!("box too small: wrap-free only up to t = {:.3}\n", out.wrap_free_time));
        }
        summary.push_str(if pass { "PASS" } else { "FAIL" });
        let manifest = rec.finish(q.digest(), pass)?;
        Ok(Outcome { value: out, summary, pass, manifest })
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepLevel {
    pub panel_length: f64,
    pub order: usize,
    /// Largest Nyström basis over the sample points.
    pub basis_size: usize,
    pub rows: Vec<CrosscheckRow>,
}

impl SweepLevel {
    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.max_abs_error).fold(0.0, f64::max)
    }
}

/// Crosscheck repeated over increasingly fine Nyström bases against one PDE run.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome<Vec<SweepLevel>>> {
    in_pool(cfg, || {
        let mut rec = Recorder::new(cfg, "sweep")?;
        let q = cfg.load_potential()?;
        let xs = cfg.x_grid.points()?;
        let params = pde_params(cfg, &xs)?;
        let run = evolve_kdv(&q, &cfg.t_list, &params)?;
        rec.lap("pde");
        let data = spectral_data(&q)?;
        let mut levels = Vec::with_capacity(cfg.sweep.levels.len());
        for (i, &(panel_length, order)) in cfg.sweep.levels.iter().enumerate() {
            let mut p = cfg.reconstruct;
            p.nystrom.panel_length = panel_length;
            p.nystrom.order = order;
            let field = reconstruct_grid(&data, &p, cfg.path, &xs, &cfg.t_list)?;
            rec.lap(&format!("level_{i}"));
            levels.push(SweepLevel {
                panel_length,
                order,
                basis_size: field.diagnostics.iter().map(|d| d.basis_size).max().unwrap_or(0),
                rows: compare(&field, &run)?,
            });
        }
        let mut csv = String::from("panel_length,order,basis_size,t,max_abs_error,mean_abs_error\n");
        let mut summary = String::from("panel  order  basis   max|err|\n");
        for l in &levels {
            for r in &l.rows {
                csv.push_str(&format!(
                    "{},{},{},{:.16e},{:.16e},{:.16e}\n",
                    l.panel_length, l.order, l.basis_size, r.t, r.max_abs_error, r.mean_abs_error
                ));
            }
            summary.push_str(&format!("{:>5} {:>6} {:>6} {:>10.3e}\n", l.panel_length, l.order, l.basis_size, l.max_error()));
        }
        fs::write(rec.path("sweep.csv"), csv)?;
        fs::write(rec.path("sweep.json"), serde_json::to_string_pretty(&levels)?)?;
        let pass = levels.last().map_or(true, |l| l.max_error() < cfg.pde.tolerance);
        let manifest = rec.finish(q.digest(), pass)?;
        Ok(Outcome { value: levels, summary, pass, manifest })
    })
}
