//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 configuration or I/O error,
//! 3 numerical failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::dynamics::{self, cavity_threshold};
use crate::error::{Error, Result};
use crate::experiments::{self, detect_crossings, label_cavities, occupancy, SweepAxis};
use crate::io::{self, csv, snapshot, SimConfig};

#[derive(Debug, Parser)]
#[command(name = "pilotwave", version, about = "Walking-droplet simulations over variable bathymetry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a simulation and write a run directory.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides run.output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single impact at the centre of a flat bath; reports symmetry and crest spacing.
    ImpactTest {
        #[arg(long)]
        config: PathBuf,
    },
    /// Frequency check of single free modes against the dispersion relation.
    DispersionTest {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        amplitude: f64,
    },
    /// One run per value of a parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// gamma, well_width, barrier_width or depth_ratio
        #[arg(long)]
        axis: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Crossing and occupancy statistics from a trajectory and a topography snapshot.
    Stats {
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long)]
        topo: PathBuf,
        /// Faraday period in seconds for the per-minute rate.
        #[arg(long, default_value_t = 0.025)]
        period: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and check a configuration without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Validate { config } => {
            let cfg = SimConfig::load(&config)?;
            let report = cfg.validate();
            if !report.is_ok() {
                return Err(Error::config(report.to_string()));
            }
            let c = cfg.constants()?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "ok: T_F = {:.6e} s, lambda_F = {:.6e} m, mu = {:.6}, G = {:.6}, Bo = {:.6}, Re = {:.6}, M = {:.6e}",
                c.scales.period, c.scales.wavelength, c.groups.mu, c.groups.gravity, c.groups.bond, c.groups.reynolds, c.groups.mass
            );
            Ok(())
        }
        Command::Simulate { config, out } => {
            let cfg = SimConfig::load(&config)?;
            let dir = out.unwrap_or_else(|| cfg.run.output_dir.clone());
            let art = dynamics::run(&cfg)?;
            ensure_dir(&dir)?;
            let (events, stats) = io::write_run(&dir, &cfg, &art)?;
            println!(
                "{} rows, {} snapshots, {} crossings, mean speed (last 10 T_F) {:.6e}",
                art.trajectory.len(),
                art.snapshots.len(),
                events.len(),
                art.mean_speed(experiments::SPEED_WINDOW)
            );
            println!("rate {:.4} crossings/min", stats.rate_per_minute);
            match art.failure {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
        Command::ImpactTest { config } => {
            let cfg = SimConfig::load(&config)?;
            let r = experiments::impact_test(&cfg)?;
            println!("t = {}", r.t);
            println!("max |eta| = {:.6e}", r.max_amplitude);
            if r.no_wave {
                println!("no wave");
                return Ok(());
            }
            println!("rotation asymmetry = {:.3e}", r.asymmetry);
            match r.crest_spacing {
                Some(s) => println!("first crest spacing = {s:.6} lambda_F"),
                None => println!("fewer than two crests found"),
            }
            Ok(())
        }
        Command::DispersionTest { config, amplitude } => {
            let cfg = SimConfig::load(&config)?;
            let r = experiments::dispersion_test(cfg.grid, &cfg.constants()?, cfg.step, amplitude)?;
            for m in &r.modes {
                println!(
                    "mode {:?} k = {:.4}: analytic {:.6}, measured {:.6}, error {:.3e}",
                    m.mode, m.k, m.analytic, m.measured, m.rel_error
                );
            }
            if let Some(note) = &r.note {
                println!("{note}");
            }
            if r.blowup.is_some() {
                return Err(Error::Numerical {
                    t: 0.0,
                    message: "dispersion test blew up".into(),
                });
            }
            println!("max relative error {:.3e}", r.max_rel_error);
            Ok(())
        }
        Command::Sweep { config, axis, values, out } => {
            let cfg = SimConfig::load(&config)?;
            let axis: SweepAxis = axis.parse()?;
            let table = experiments::sweep(&cfg, axis, &values)?;
            let text = csv::format_sweep(&table);
            print!("{text}");
            if let Some(v) = table.interior_max() {
                println!("interior maximum of crossing rate at {axis} = {v}");
            }
            if let Some(dir) = out {
                ensure_dir(&dir)?;
                let path = dir.join("sweep.csv");
                std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            }
            Ok(())
        }
        Command::Stats {
            trajectory,
            topo,
            period,
            out,
        } => {
            let rows = csv::read_trajectory(&trajectory)?;
            let topo = snapshot::read_topography(&topo)?;
            let map = label_cavities(&topo, cavity_threshold(&topo))?;
            let events = detect_crossings(&rows, &map);
            let stats = occupancy(&rows, &map, &events, period);
            let text = csv::format_stats(&stats);
            print!("{text}");
            if let Some(dir) = out {
                ensure_dir(&dir)?;
                for (name, body) in [
                    ("stats.csv", text),
                    ("crossings.csv", csv::format_crossings(&events)),
                    ("heatmap.csv", csv::format_heatmap(&stats, &map)),
                ] {
                    let path = dir.join(name);
                    std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
                }
            }
            Ok(())
        }
    }
}
