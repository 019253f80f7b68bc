use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use kdv_ist::pipeline::{self, RunConfig};

/// KdV solutions by inverse scattering.
///
/// Every config key can be set with `--set key=value` (dotted, e.g.
/// `reconstruct.nystrom.order=8`); the named flags are shorthands for common keys.
/// Exit status: 0 on success, 1 when a check fails, 2 on errors.
#[derive(Parser)]
#[command(name = "kdv-ist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forward scattering data and bound states.
    Scatter(Common),
    /// Identity checks on the scattering data.
    Validate(Common),
    /// q(x, t) on the configured grid.
    Reconstruct(Common),
    /// IST field against the pseudo-spectral reference.
    Crosscheck(Common),
    /// Crosscheck over increasingly fine Nyström bases.
    Sweep(Common),
    /// Print the effective configuration as JSON.
    Config(Common),
}

#[derive(Args)]
struct Common {
    /// JSON or TOML run configuration.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a config key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// potential.preset
    #[arg(long)]
    preset: Option<String>,
    /// potential.file
    #[arg(long)]
    potential: Option<PathBuf>,
    /// path (contour | proposition)
    #[arg(long)]
    path: Option<String>,
    /// output_dir
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// threads
    #[arg(long)]
    threads: Option<usize>,
    /// compare_paths
    #[arg(long)]
    compare_paths: bool,
}

impl Common {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => RunConfig::default(),
        };
        let mut sets: Vec<String> = Vec::new();
        if let Some(v) = &self.preset {
            sets.push(format!("potential.preset={v}"));
        }
        if let Some(v) = &self.path {
            sets.push(format!("path={v}"));
        }
        if let Some(v) = self.threads {
            sets.push(format!("threads={v}"));
        }
        if self.compare_paths {
            sets.push("compare_paths=true".into());
        }
        sets.extend(self.overrides.iter().cloned());
        cfg.apply_overrides(&sets)?;
        // paths go in verbatim so they are not mistaken for JSON
        if let Some(p) = &self.potential {
            cfg.potential.file = Some(p.clone());
        }
        if let Some(p) = &self.out {
            cfg.output_dir = p.clone();
        }
        Ok(cfg)
    }
}

fn report<R>(o: pipeline::Outcome<R>) -> bool {
    println!("{}", o.summary);
    println!("manifest {}", o.manifest.display());
    o.pass
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    Ok(match cli.command {
        Command::Scatter(c) => report(pipeline::cmd_scatter(&c.config()?)?),
        Command::Validate(c) => report(pipeline::cmd_validate(&c.config()?)?),
        Command::Reconstruct(c) => report(pipeline::cmd_reconstruct(&c.config()?)?),
        Command::Crosscheck(c) => report(pipeline::cmd_crosscheck(&c.config()?)?),
        Command::Sweep(c) => report(pipeline::cmd_sweep(&c.config()?)?),
        Command::Config(c) => {
            println!("{}", serde_json::to_string_pretty(&c.config()?)?);
            true
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
