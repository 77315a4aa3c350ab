//! Configured runs: builds the topography, DtN closure and stepper from a
//! [`SimConfig`] and records trajectory rows, snapshots and an event log.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cfl_check, CflVerdict, DropletState, WaveSolver, WaveState};
use crate::dtn::{DtnModel, DtnOperator, FlatDtn};
use crate::error::{Error, Result};
use crate::experiments::{label_cavities, CavityMap};
use crate::io::config::{SimConfig, TopographyConfig};
use crate::io::snapshot;
use crate::params::ModelConstants;
use crate::spectral::{Fft2d, FourierBasis, GridField};
use crate::topography::{self, Topography, TopographySource};

/// One trajectory sample, written after every sub-step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub in_contact: bool,
    /// Cavity label at the droplet position, 0 on barriers.
    pub cavity: u32,
}

/// Real-space surface fields at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRecord {
    pub t: f64,
    pub eta: GridField,
    pub phi: GridField,
}

#[derive(Debug)]
pub struct RunArtifacts {
    pub constants: ModelConstants,
    pub topography: Topography,
    pub cavities: CavityMap,
    pub trajectory: Vec<TrajectoryRow>,
    pub snapshots: Vec<SnapshotRecord>,
    pub events: Vec<String>,
    /// Set when the run aborted; the series above hold everything recorded
    /// up to that point, and the last snapshot is the last finite state.
    pub failure: Option<Error>,
    pub final_wave: WaveState,
}

impl RunArtifacts {
    /// Stroboscopic drift speed: net displacement between the droplet
    /// positions at whole Faraday periods over the last `window` periods,
    /// divided by the time spanned. Back-and-forth motion within a period
    /// or across alternate periods averages out.
    pub fn mean_speed(&self, window: f64) -> f64 {
        let Some(last) = self.trajectory.last() else {
            return 0.0;
        };
        let l = self.topography.grid.length;
        let strobe: Vec<&TrajectoryRow> = self
            .trajectory
            .iter()
            .filter(|r| (r.t - r.t.round()).abs() < 1e-9 && r.t >= last.t - window - 1e-9)
            .collect();
        if strobe.len() < 2 {
            return 0.0;
        }
        let wrap = |d: f64| d - l * (d / l).round();
        let (dx, dy) = strobe
            .windows(2)
            .fold((0.0, 0.0), |(sx, sy), w| (sx + wrap(w[1].x - w[0].x), sy + wrap(w[1].y - w[0].y)));
        dx.hypot(dy) / (strobe[strobe.len() - 1].t - strobe[0].t)
    }
}

/// A fully assembled run, ready to step.
#[derive(Debug)]
pub struct Simulation {
    pub config: SimConfig,
    pub constants: ModelConstants,
    pub topography: Topography,
    pub cavities: CavityMap,
    pub solver: WaveSolver,
    pub wave: WaveState,
    pub droplet: Option<DropletState>,
    fft: Fft2d,
}

/// Builds the bed described by a configuration.
pub fn build_topography(config: &SimConfig) -> Result<Topography> {
    match &config.topography {
        TopographyConfig::Flat { depth } => topography::flat(config.grid, *depth),
        TopographyConfig::Cavities(spec) => topography::cavities(config.grid, *spec),
        TopographyConfig::File(path) => {
            let topo = snapshot::read_topography(path)?;
            if topo.grid.n != config.grid.n || topo.grid.length != config.grid.length {
                return Err(Error::config(format!(
                    "{}: topography grid {}x{} on L = {} does not match domain {}x{} on L = {}",
                    path.display(),
                    topo.grid.n,
                    topo.grid.n,
                    topo.grid.length,
                    config.grid.n,
                    config.grid.n,
                    config.grid.length
                )));
            }
            Ok(topo)
        }
    }
}

/// Depth separating cavities from barriers: midway between the extremes,
/// or half the depth for a flat bed.
pub fn cavity_threshold(topo: &Topography) -> f64 {
    if topo.is_flat() {
        0.5 * topo.min_depth()
    } else {
        0.5 * (topo.min_depth() + topo.max_depth())
    }
}

impl Simulation {
    pub fn new(config: &SimConfig) -> Result<Self> {
        let report = config.validate();
        if !report.is_ok() {
            return Err(Error::config(report.to_string()));
        }
        let constants = config.constants()?;
        let topo = build_topography(config)?;
        let basis = FourierBasis::new(config.grid);
        if let CflVerdict::Violation { limit, wavenumber } = cfl_check(&config.step, &config.grid, &constants, topo.max_depth()) {
            return Err(Error::config(format!(
                "time step {} exceeds the CFL limit {limit:.4e} (fastest wavenumber {wavenumber:.3})",
                config.step.dt
            )));
        }
        let mu = constants.groups.mu;
        let dtn = match topo.source {
            TopographySource::Flat { depth } => DtnModel::Flat(FlatDtn::new(&basis, mu, depth)),
            _ if topo.is_flat() => DtnModel::Flat(FlatDtn::new(&basis, mu, topo.min_depth())),
            _ => {
                let mut op = DtnOperator::assemble(&topo, &basis, mu, config.galerkin_radius)?;
                op.precompute();
                DtnModel::Variable(Box::new(op))
            }
        };
        let cavities = label_cavities(&topo, cavity_threshold(&topo))?;
        let solver = WaveSolver::new(basis, constants, dtn, config.step)?;
        let droplet = config.droplet.enabled.then(|| {
            let mut velocity = config.droplet.velocity;
            if config.droplet.perturbation > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(config.run.seed);
                let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                velocity[0] += config.droplet.perturbation * angle.cos();
                velocity[1] += config.droplet.perturbation * angle.sin();
            }
            DropletState::new(config.grid.wrap(config.droplet.position), velocity)
        });
        Ok(Simulation {
            config: config.clone(),
            constants,
            topography: topo,
            cavities,
            solver,
            wave: WaveState::rest(config.grid.n),
            droplet,
            fft: Fft2d::new(config.grid.n),
        })
    }

    pub fn snapshot(&self) -> Result<SnapshotRecord> {
        Ok(SnapshotRecord {
            t: self.wave.t,
            eta: self.fft.inverse(&self.wave.eta)?,
            phi: self.fft.inverse(&self.wave.phi)?,
        })
    }

    /// Advances one sub-step and returns the trajectory row, if a droplet
    /// is present.
    pub fn step(&mut self) -> Result<Option<TrajectoryRow>> {
        let spp = self.solver.steps_per_period();
        let impacts = self.config.droplet.impacts;
        if impacts > 0 && self.solver.step_index() >= impacts * spp {
            self.droplet = None;
        }
        self.solver.step(&mut self.wave, self.droplet.as_mut())?;
        Ok(self.droplet.map(|d| TrajectoryRow {
            t: self.wave.t,
            x: d.position[0],
            y: d.position[1],
            vx: d.velocity[0],
            vy: d.velocity[1],
            in_contact: d.in_contact,
            cavity: self.cavities.label_at(d.position),
        }))
    }

    /// Steps for `run.t_max` Faraday periods. Never fails: a numerical
    /// error ends the run and is stored in [`RunArtifacts::failure`].
    pub fn run(mut self) -> RunArtifacts {
        let spp = self.solver.steps_per_period();
        let total = self.config.run.t_max * spp;
        let stride = self.config.run.snapshot_stride * spp;
        let mut events = vec![format!(
            "t=0 start grid={}x{} L={} dt={} dtn={} cavities={}",
            self.config.grid.n,
            self.config.grid.n,
            self.config.grid.length,
            self.config.step.dt,
            match self.solver_dtn_kind() {
                true => "galerkin",
                false => "flat",
            },
            self.cavities.count
        )];
        let mut trajectory = Vec::with_capacity(total as usize);
        let mut snapshots = Vec::new();
        let mut failure = None;
        match self.snapshot() {
            Ok(s) => snapshots.push(s),
            Err(e) => failure = Some(e),
        }
        let mut last_good = self.wave.clone();
        for i in 1..=total {
            if failure.is_some() {
                break;
            }
            let had_droplet = self.droplet.is_some();
            match self.step() {
                Ok(row) => {
                    if let Some(r) = row {
                        trajectory.push(r);
                    }
                    if had_droplet && self.droplet.is_none() {
                        events.push(format!("t={} droplet removed", self.wave.t));
                    }
                    if stride > 0 && i % stride == 0 {
                        match self.snapshot() {
                            Ok(s) => snapshots.push(s),
                            Err(e) => failure = Some(e),
                        }
                    }
                    last_good.clone_from(&self.wave);
                }
                Err(e) => {
                    events.push(format!("t={} abort: {e}", self.wave.t));
                    self.wave = last_good.clone();
                    if let Ok(s) = self.snapshot() {
                        snapshots.push(s);
                    }
                    failure = Some(e);
                }
            }
        }
        if failure.is_none() {
            events.push(format!("t={} finished", self.wave.t));
        }
        RunArtifacts {
            constants: self.constants,
            topography: self.topography,
            cavities: self.cavities,
            trajectory,
            snapshots,
            events,
            failure,
            final_wave: self.wave,
        }
    }

    fn solver_dtn_kind(&self) -> bool {
        !matches!(self.topography.source, TopographySource::Flat { .. }) && !self.topography.is_flat()
    }
}

/// Validates, assembles and runs a configuration.
pub fn run(config: &SimConfig) -> Result<RunArtifacts> {
    Ok(Simulation::new(config)?.run())
}
