//! Flat `key.path = value` configuration files.
//!
//! One assignment per line, `#` starts a comment. Unknown and duplicate keys
//! are errors. Every key that is not given explicitly is resolved to its
//! default and echoed by [`SimConfig::resolved_text`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::dtn::default_radius;
use crate::dynamics::{DtnSign, GradientMethod, Integrator, Scheme, StepConfig};
use crate::error::{Error, Result};
use crate::params::{FluidParams, ForcingParams, ModelConstants, ValidationReport};
use crate::spectral::Grid;
use crate::topography::CavitySpec;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Default_ {
    Required,
    Optional,
    Value(&'static str),
    /// Filled in from other keys during resolution.
    Derived,
}

use Default_::*;

const KEYS: &[(&str, Default_)] = &[
    ("preset", Optional),
    ("fluid.density", Required),
    ("fluid.surface_tension", Required),
    ("fluid.dynamic_viscosity", Optional),
    ("fluid.kinematic_viscosity", Derived),
    ("fluid.drop_mass", Required),
    ("fluid.drop_damping", Required),
    ("forcing.frequency", Required),
    ("forcing.gamma", Value("0")),
    ("forcing.gravity", Value("9.81")),
    ("forcing.threshold_hint", Optional),
    ("domain.mean_depth", Required),
    ("domain.length", Value("8")),
    ("domain.n", Value("64")),
    ("domain.topography", Value("flat")),
    ("domain.flat_depth", Value("1")),
    ("domain.topography_file", Optional),
    ("cavity.rows", Value("1")),
    ("cavity.cols", Value("2")),
    ("cavity.well_width", Value("2")),
    ("cavity.barrier_width", Value("0.5")),
    ("cavity.deep_depth", Value("1")),
    ("cavity.shallow_depth", Value("0.08333333333333333")),
    ("cavity.smoothing", Value("0.25")),
    ("numerics.scheme", Value("pseudo_spectral")),
    ("numerics.integrator", Value("rk4")),
    ("numerics.dt", Value("0.015625")),
    ("numerics.galerkin_radius", Derived),
    ("numerics.contact_fraction", Value("0.25")),
    ("numerics.dealias", Value("false")),
    ("numerics.courant", Value("0.5")),
    ("numerics.gradient", Value("spectral")),
    ("numerics.export_dtn", Value("false")),
    ("debug.dtn_sign", Value("kinematic")),
    ("run.t_max", Value("10")),
    ("run.snapshot_stride", Value("1")),
    ("run.seed", Value("0")),
    ("run.output_dir", Value("out")),
    ("droplet.enabled", Value("true")),
    ("droplet.x", Derived),
    ("droplet.y", Derived),
    ("droplet.vx", Value("0")),
    ("droplet.vy", Value("0")),
    ("droplet.impact_phase", Value("0")),
    ("droplet.perturbation", Value("0")),
    ("droplet.impacts", Value("0")),
];

/// Values supplied by `preset = <name>`; explicit keys take precedence.
fn preset(name: &str) -> Option<&'static [(&'static str, &'static str)]> {
    match name {
        "silicone_80hz" => Some(&[
            ("fluid.density", "965"),
            ("fluid.surface_tension", "0.0209"),
            ("fluid.dynamic_viscosity", "0.02"),
            ("forcing.frequency", "80"),
            ("domain.mean_depth", "0.006"),
        ]),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TopographyConfig {
    Flat { depth: f64 },
    Cavities(CavitySpec),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropletConfig {
    pub enabled: bool,
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    /// Amplitude of a seeded random velocity kick added at start.
    pub perturbation: f64,
    /// Number of contact periods before the droplet is removed; 0 = no limit.
    pub impacts: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Duration in Faraday periods.
    pub t_max: u64,
    /// Snapshot interval in Faraday periods; 0 keeps only the initial one.
    pub snapshot_stride: u64,
    pub seed: u64,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub fluid: FluidParams,
    pub forcing: ForcingParams,
    pub threshold_hint: Option<f64>,
    /// Reference depth `h` in metres.
    pub mean_depth: f64,
    pub grid: Grid,
    pub topography: TopographyConfig,
    pub step: StepConfig,
    pub galerkin_radius: usize,
    pub export_dtn: bool,
    pub run: RunConfig,
    pub droplet: DropletConfig,
    resolved: BTreeMap<String, String>,
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let parsed = if let Some((a, b)) = v.split_once('/') {
        match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            (Ok(a), Ok(b)) => Ok(a / b),
            _ => Err(()),
        }
    } else {
        v.parse::<f64>().map_err(|_| ())
    };
    parsed.map_err(|_| Error::config(format!("{key}: expected a number, got '{v}'")))
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.parse().map_err(|_| Error::config(format!("{key}: expected a non-negative integer, got '{v}'")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::config(format!("{key}: expected true or false, got '{v}'"))),
    }
}

/// Parses `key = value` lines, rejecting unknown and duplicate keys.
pub fn parse_assignments(text: &str, path: &Path) -> Result<BTreeMap<String, (String, usize)>> {
    let mut out: BTreeMap<String, (String, usize)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: path.into(),
                line: line_no,
                message: format!("expected 'key = value', got '{line}'"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(Error::Parse {
                path: path.into(),
                line: line_no,
                message: format!("unknown key '{key}'"),
            });
        }
        if value.is_empty() {
            return Err(Error::Parse {
                path: path.into(),
                line: line_no,
                message: format!("missing value for '{key}'"),
            });
        }
        if let Some((_, first)) = out.get(key) {
            return Err(Error::Parse {
                path: path.into(),
                line: line_no,
                message: format!("duplicate key '{key}' (first set on line {first}, again on line {line_no})"),
            });
        }
        out.insert(key.to_string(), (value.to_string(), line_no));
    }
    Ok(out)
}

impl SimConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, path)
    }

    pub fn from_text(text: &str, path: &Path) -> Result<Self> {
        let assigned = parse_assignments(text, path)?;
        let mut values: BTreeMap<String, String> = assigned.iter().map(|(k, (v, _))| (k.clone(), v.clone())).collect();
        Self::from_values(&mut values)
    }

    /// Builds a configuration from key/value pairs, as if read from a file.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self> {
        let mut text = String::new();
        for (k, v) in pairs {
            let _ = writeln!(text, "{k} = {v}");
        }
        Self::from_text(&text, Path::new("<inline>"))
    }

    fn from_values(values: &mut BTreeMap<String, String>) -> Result<Self> {
        if let Some(name) = values.get("preset").cloned() {
            let entries = preset(&name).ok_or_else(|| Error::config(format!("unknown preset '{name}'")))?;
            for (k, v) in entries {
                values.entry(k.to_string()).or_insert_with(|| v.to_string());
            }
        }
        for (key, default) in KEYS {
            if values.contains_key(*key) {
                continue;
            }
            match default {
                Value(v) => {
                    values.insert(key.to_string(), v.to_string());
                }
                Required => return Err(Error::config(format!("missing mandatory key '{key}'"))),
                Optional | Derived => {}
            }
        }
        let get = |k: &str| values.get(k).map(String::as_str);
        let num = |k: &str| parse_f64(k, get(k).expect("resolved"));
        let int = |k: &str| parse_u64(k, get(k).expect("resolved"));

        let density = num("fluid.density")?;
        let kinematic = match (get("fluid.dynamic_viscosity"), get("fluid.kinematic_viscosity")) {
            // a resolved file carries both; accept them when they agree
            (Some(mu), Some(nu)) => {
                let nu = parse_f64("fluid.kinematic_viscosity", nu)?;
                let from_mu = parse_f64("fluid.dynamic_viscosity", mu)? / density;
                if (nu - from_mu).abs() > 1e-12 * from_mu.abs() {
                    return Err(Error::config(
                        "fluid.dynamic_viscosity and fluid.kinematic_viscosity disagree; give only one",
                    ));
                }
                from_mu
            }
            (Some(mu), None) => parse_f64("fluid.dynamic_viscosity", mu)? / density,
            (None, Some(nu)) => parse_f64("fluid.kinematic_viscosity", nu)?,
            (None, None) => return Err(Error::config("missing mandatory key 'fluid.dynamic_viscosity' or 'fluid.kinematic_viscosity'")),
        };
        let fluid = FluidParams {
            density,
            surface_tension: num("fluid.surface_tension")?,
            kinematic_viscosity: kinematic,
            drop_mass: num("fluid.drop_mass")?,
            drop_damping: num("fluid.drop_damping")?,
        };
        let forcing = ForcingParams {
            frequency: num("forcing.frequency")?,
            gamma: num("forcing.gamma")?,
            gravity: num("forcing.gravity")?,
        };
        let threshold_hint = get("forcing.threshold_hint").map(|v| parse_f64("forcing.threshold_hint", v)).transpose()?;
        let mean_depth = num("domain.mean_depth")?;
        let n = int("domain.n")? as usize;
        let grid = Grid::new(num("domain.length")?, n)?;

        let topography = match get("domain.topography").expect("resolved") {
            "flat" => TopographyConfig::Flat {
                depth: num("domain.flat_depth")?,
            },
            "cavities" => TopographyConfig::Cavities(CavitySpec {
                rows: int("cavity.rows")? as usize,
                cols: int("cavity.cols")? as usize,
                well_width: num("cavity.well_width")?,
                barrier_width: num("cavity.barrier_width")?,
                deep_depth: num("cavity.deep_depth")?,
                shallow_depth: num("cavity.shallow_depth")?,
                smoothing: num("cavity.smoothing")?,
            }),
            "file" => TopographyConfig::File(PathBuf::from(
                get("domain.topography_file").ok_or_else(|| Error::config("domain.topography = file needs domain.topography_file"))?,
            )),
            other => return Err(Error::config(format!("domain.topography: unknown kind '{other}'"))),
        };

        let step = StepConfig {
            dt: num("numerics.dt")?,
            integrator: match get("numerics.integrator").expect("resolved") {
                "rk4" => Integrator::Rk4,
                "leapfrog" => Integrator::Leapfrog,
                other => return Err(Error::config(format!("numerics.integrator: unknown '{other}'"))),
            },
            scheme: match get("numerics.scheme").expect("resolved") {
                "pseudo_spectral" => Scheme::PseudoSpectral,
                "central_difference" => Scheme::CentralDifference,
                other => return Err(Error::config(format!("numerics.scheme: unknown '{other}'"))),
            },
            contact_fraction: num("numerics.contact_fraction")?,
            impact_phase: num("droplet.impact_phase")?,
            dealias: parse_bool("numerics.dealias", get("numerics.dealias").expect("resolved"))?,
            dtn_sign: match get("debug.dtn_sign").expect("resolved") {
                "kinematic" => DtnSign::Kinematic,
                "reversed" => DtnSign::Reversed,
                other => return Err(Error::config(format!("debug.dtn_sign: unknown '{other}'"))),
            },
            gradient: match get("numerics.gradient").expect("resolved") {
                "spectral" => GradientMethod::Spectral,
                "bilinear" => GradientMethod::Bilinear,
                other => return Err(Error::config(format!("numerics.gradient: unknown '{other}'"))),
            },
            courant: num("numerics.courant")?,
        };
        let galerkin_radius = match get("numerics.galerkin_radius") {
            Some(v) => parse_u64("numerics.galerkin_radius", v)? as usize,
            None => default_radius(n),
        };
        let centre = 0.5 * grid.length;
        let droplet = DropletConfig {
            enabled: parse_bool("droplet.enabled", get("droplet.enabled").expect("resolved"))?,
            position: [
                get("droplet.x").map(|v| parse_f64("droplet.x", v)).transpose()?.unwrap_or(centre),
                get("droplet.y").map(|v| parse_f64("droplet.y", v)).transpose()?.unwrap_or(centre),
            ],
            velocity: [num("droplet.vx")?, num("droplet.vy")?],
            perturbation: num("droplet.perturbation")?,
            impacts: int("droplet.impacts")?,
        };
        let run = RunConfig {
            t_max: int("run.t_max")?,
            snapshot_stride: int("run.snapshot_stride")?,
            seed: int("run.seed")?,
            output_dir: PathBuf::from(get("run.output_dir").expect("resolved")),
        };
        let export_dtn = parse_bool("numerics.export_dtn", get("numerics.export_dtn").expect("resolved"))?;

        let fmt = |v: f64| format!("{v}");
        values.insert("fluid.kinematic_viscosity".into(), fmt(kinematic));
        values.insert("numerics.galerkin_radius".into(), galerkin_radius.to_string());
        values.insert("droplet.x".into(), fmt(droplet.position[0]));
        values.insert("droplet.y".into(), fmt(droplet.position[1]));

        Ok(SimConfig {
            fluid,
            forcing,
            threshold_hint,
            mean_depth,
            grid,
            topography,
            step,
            galerkin_radius,
            export_dtn,
            run,
            droplet,
            resolved: values.clone(),
        })
    }

    /// Overrides one key and re-resolves. Used by sweeps and the CLI.
    pub fn with_override(&self, key: &str, value: &str) -> Result<Self> {
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(Error::config(format!("unknown key '{key}'")));
        }
        let mut values = self.resolved.clone();
        // derived entries are recomputed from their sources
        for (k, d) in KEYS {
            if *d == Derived && *k != key && !matches!(*k, "droplet.x" | "droplet.y") {
                values.remove(*k);
            }
        }
        if key == "fluid.kinematic_viscosity" {
            values.remove("fluid.dynamic_viscosity");
        }
        values.insert(key.to_string(), value.to_string());
        Self::from_values(&mut values)
    }

    pub fn value(&self, key: &str) -> Option<&str> {
        self.resolved.get(key).map(String::as_str)
    }

    /// Every key with its resolved value, in declaration order.
    pub fn resolved_text(&self) -> String {
        let mut out = String::new();
        for (key, _) in KEYS {
            if let Some(v) = self.resolved.get(*key) {
                let _ = writeln!(out, "{key} = {v}");
            }
        }
        out
    }

    pub fn constants(&self) -> Result<ModelConstants> {
        ModelConstants::new(&self.fluid, &self.forcing, self.mean_depth)
    }

    /// Parameter and geometry checks, aggregated.
    pub fn validate(&self) -> ValidationReport {
        let mut report = crate::params::validate(&self.fluid, &self.forcing, self.mean_depth, self.threshold_hint);
        if let TopographyConfig::Cavities(spec) = &self.topography {
            if let Err(e) = spec.validate(&self.grid) {
                report.errors.push(e.to_string());
            }
        }
        if let TopographyConfig::Flat { depth } = self.topography {
            if !(depth > 0.0) {
                report.errors.push("flat depth must be positive".into());
            }
        }
        if self.step.steps_per_period().is_none() {
            report.errors.push(format!("numerics.dt = {} must divide one Faraday period evenly", self.step.dt));
        }
        if self.galerkin_radius == 0 || self.galerkin_radius >= self.grid.n / 2 {
            report.errors.push(format!("numerics.galerkin_radius = {} must lie in 1..{}", self.galerkin_radius, self.grid.n / 2));
        }
        report
    }
}
