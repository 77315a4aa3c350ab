//! Time evolution of the surface elevation `η̂`, surface potential `φ̂` and
//! the walking droplet.
//!
//! One sub-step of length `Δt'` is two wave half-steps. While the droplet is
//! in contact (the first `contact_fraction` of each Faraday period) the
//! droplet velocity and position are updated between the half-steps and the
//! impact pressure enters `φ̂`; otherwise the wave evolves freely and the
//! droplet moves ballistically with frozen velocity.

mod run;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dtn::DtnModel;
use crate::error::{Error, Result};
use crate::params::ModelConstants;
use crate::spectral::{self, laplacian_cd2, Fft2d, FourierBasis, Grid, SpectralField};

pub use run::{build_topography, cavity_threshold, run, RunArtifacts, Simulation, SnapshotRecord, TrajectoryRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Leapfrog,
    Rk4,
}

/// How horizontal Laplacians are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    PseudoSpectral,
    CentralDifference,
}

/// Sign of the DtN term in the kinematic condition. `Reversed` exists only
/// as a diagnostic; it makes the flat-bed system exponentially unstable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtnSign {
    Kinematic,
    Reversed,
}

impl DtnSign {
    fn factor(self) -> f64 {
        match self {
            DtnSign::Kinematic => 1.0,
            DtnSign::Reversed => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMethod {
    Spectral,
    Bilinear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    /// Sub-step `Δt'` in Faraday periods.
    pub dt: f64,
    pub integrator: Integrator,
    pub scheme: Scheme,
    pub contact_fraction: f64,
    /// Offset of the contact window relative to the forcing cycle.
    pub impact_phase: f64,
    pub dealias: bool,
    pub dtn_sign: DtnSign,
    pub gradient: GradientMethod,
    /// Courant number used by [`cfl_check`].
    pub courant: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            dt: 1.0 / 64.0,
            integrator: Integrator::Rk4,
            scheme: Scheme::PseudoSpectral,
            contact_fraction: 0.25,
            impact_phase: 0.0,
            dealias: false,
            dtn_sign: DtnSign::Kinematic,
            gradient: GradientMethod::Spectral,
            courant: 0.5,
        }
    }
}

impl StepConfig {
    /// Number of sub-steps per Faraday period; `None` unless `Δt'` divides
    /// one period evenly.
    pub fn steps_per_period(&self) -> Option<u64> {
        if !(self.dt > 0.0 && self.dt <= 1.0) {
            return None;
        }
        let n = (1.0 / self.dt).round();
        ((n * self.dt - 1.0).abs() < 1e-9).then_some(n as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub eta: SpectralField,
    pub phi: SpectralField,
    /// Time in Faraday periods.
    pub t: f64,
}

impl WaveState {
    pub fn rest(n: usize) -> Self {
        WaveState {
            eta: SpectralField::zeros(n),
            phi: SpectralField::zeros(n),
            t: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropletState {
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    /// Contact-phase clock in `[0, 1)`.
    pub phase: f64,
    pub in_contact: bool,
}

impl DropletState {
    pub fn new(position: [f64; 2], velocity: [f64; 2]) -> Self {
        DropletState {
            position,
            velocity,
            phase: 0.0,
            in_contact: true,
        }
    }

    pub fn speed(&self) -> f64 {
        self.velocity[0].hypot(self.velocity[1])
    }
}

/// Contact-phase clock at time `t`.
pub fn contact_phase(t: f64, impact_phase: f64) -> f64 {
    let tau = (t - impact_phase).rem_euclid(1.0);
    if tau >= 1.0 {
        0.0
    } else {
        tau
    }
}

/// Scalar impact pulse `F(τ) = 8π²/(ω T_F) sin(4πτ)` during contact, zero
/// otherwise.
pub fn forcing_pulse(tau: f64, consts: &ModelConstants, contact_fraction: f64) -> f64 {
    if tau < contact_fraction {
        consts.pulse_amplitude() * (4.0 * PI * tau).sin()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CflVerdict {
    Ok { limit: f64 },
    Violation { limit: f64, wavenumber: f64 },
}

impl CflVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, CflVerdict::Ok { .. })
    }

    pub fn limit(&self) -> f64 {
        match *self {
            CflVerdict::Ok { limit } | CflVerdict::Violation { limit, .. } => limit,
        }
    }
}

/// `Δt' ≤ C Δx / c_max`, with `c_max` the largest gravity-capillary phase
/// speed over the resolved wavenumbers at the deepest point of the bed.
pub fn cfl_check(cfg: &StepConfig, grid: &Grid, consts: &ModelConstants, max_depth: f64) -> CflVerdict {
    let basis = FourierBasis::new(*grid);
    let mut c_max = 0.0;
    let mut k_lim = 0.0;
    for &k in basis.kmag.iter().skip(1) {
        let c = consts.groups.dispersion_omega2(k, max_depth).sqrt() / k;
        if c > c_max {
            c_max = c;
            k_lim = k;
        }
    }
    let limit = cfg.courant * grid.dx() / c_max;
    if cfg.dt <= limit {
        CflVerdict::Ok { limit }
    } else {
        CflVerdict::Violation {
            limit,
            wavenumber: k_lim,
        }
    }
}

/// Fixed-configuration time stepper for the coupled system.
pub struct WaveSolver {
    basis: FourierBasis,
    fft: Fft2d,
    consts: ModelConstants,
    dtn: DtnModel,
    cfg: StepConfig,
    /// Eigenvalue of `-Δ` used by the selected scheme, per mode.
    lap_symbol: Vec<f64>,
    /// 1 for evolved modes, 0 for Nyquist (and dealiased) modes.
    mask: Vec<f64>,
    steps_per_period: u64,
    step_index: u64,
    previous: Option<(SpectralField, SpectralField)>,
}

impl std::fmt::Debug for WaveSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WaveSolver")
            .field("grid", &self.basis.grid)
            .field("cfg", &self.cfg)
            .field("step_index", &self.step_index)
            .finish()
    }
}

impl WaveSolver {
    pub fn new(basis: FourierBasis, consts: ModelConstants, dtn: DtnModel, cfg: StepConfig) -> Result<Self> {
        let steps_per_period = cfg
            .steps_per_period()
            .ok_or_else(|| Error::config(format!("time step {} must divide one Faraday period evenly", cfg.dt)))?;
        if !(cfg.contact_fraction > 0.0 && cfg.contact_fraction <= 1.0) {
            return Err(Error::config("contact_fraction must lie in (0, 1]"));
        }
        let dx = basis.grid.dx();
        let lap_symbol = match cfg.scheme {
            Scheme::PseudoSpectral => basis.k2.clone(),
            Scheme::CentralDifference => (0..basis.len())
                .map(|i| {
                    let [kx, ky] = basis.wavevector(i);
                    4.0 / (dx * dx) * ((0.5 * kx * dx).sin().powi(2) + (0.5 * ky * dx).sin().powi(2))
                })
                .collect(),
        };
        let dealias = basis.dealias_mask();
        let mask = (0..basis.len())
            .map(|i| {
                let keep = !basis.is_nyquist(i) && (!cfg.dealias || dealias[i]);
                if keep {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let fft = Fft2d::new(basis.n());
        Ok(WaveSolver {
            basis,
            fft,
            consts,
            dtn,
            cfg,
            lap_symbol,
            mask,
            steps_per_period,
            step_index: 0,
            previous: None,
        })
    }

    pub fn basis(&self) -> &FourierBasis {
        &self.basis
    }

    pub fn constants(&self) -> &ModelConstants {
        &self.consts
    }

    pub fn config(&self) -> &StepConfig {
        &self.cfg
    }

    pub fn steps_per_period(&self) -> u64 {
        self.steps_per_period
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    /// Projects a state onto the evolved modes.
    pub fn project(&self, wave: &mut WaveState) {
        for field in [&mut wave.eta, &mut wave.phi] {
            for (c, m) in field.coeffs.iter_mut().zip(&self.mask) {
                *c *= *m;
            }
        }
    }

    /// Spectrum of the unit impulse at `p`: the band-limited delta
    /// `e^{-ik·p}/L²`, or for the central-difference scheme a one-cell spike
    /// of weight `1/Δx²` at the nearest node.
    pub fn impulse(&self, p: [f64; 2]) -> SpectralField {
        let grid = &self.basis.grid;
        let p = match self.cfg.scheme {
            Scheme::PseudoSpectral => p,
            Scheme::CentralDifference => grid.point(grid.nearest(p)),
        };
        let n = self.basis.n();
        let area = grid.length * grid.length;
        let ex: Vec<Complex64> = self.basis.axis.iter().map(|k| Complex64::from_polar(1.0, -k * p[0])).collect();
        let ey: Vec<Complex64> = self.basis.axis.iter().map(|k| Complex64::from_polar(1.0, -k * p[1])).collect();
        let mut out = SpectralField::zeros(n);
        for iy in 0..n {
            for ix in 0..n {
                let idx = iy * n + ix;
                out.coeffs[idx] = ex[ix] * ey[iy] * (self.mask[idx] / area);
            }
        }
        out
    }

    fn laplacian(&self, f: &SpectralField) -> Result<SpectralField> {
        match self.cfg.scheme {
            Scheme::PseudoSpectral => Ok(spectral::laplacian_spectral(f, &self.basis)),
            Scheme::CentralDifference => {
                let real = self.fft.inverse(f)?;
                let lap = laplacian_cd2(&real, self.basis.grid.dx());
                self.fft.forward(&lap)
            }
        }
    }

    /// Right-hand side without the viscous terms, with the impact pressure
    /// applied at `source` when given.
    fn rhs_inviscid(
        &self,
        phi: &SpectralField,
        eta: &SpectralField,
        t: f64,
        source: Option<[f64; 2]>,
    ) -> Result<(SpectralField, SpectralField)> {
        let g = &self.consts.groups;
        let dtn = self.dtn.apply(phi)?;
        let lap_eta = self.laplacian(eta)?;
        let restoring = g.gravity * (1.0 + g.gamma * (4.0 * PI * t).cos());
        let mut dphi = SpectralField::zeros(phi.n);
        let mut deta = SpectralField::zeros(phi.n);
        let kin = self.cfg.dtn_sign.factor() / g.mu;
        for i in 0..phi.coeffs.len() {
            dphi.coeffs[i] = (-restoring * eta.coeffs[i] + g.bond * lap_eta.coeffs[i]) * self.mask[i];
            deta.coeffs[i] = kin * dtn.coeffs[i] * self.mask[i];
        }
        if let Some(p) = source {
            let tau = contact_phase(t, self.cfg.impact_phase);
            let pulse = forcing_pulse(tau, &self.consts, self.cfg.contact_fraction);
            if pulse != 0.0 {
                dphi.axpy(-g.gravity * g.mass * pulse, &self.impulse(p));
            }
        }
        Ok((dphi, deta))
    }

    fn add_viscous(&self, phi: &SpectralField, eta: &SpectralField, dphi: &mut SpectralField, deta: &mut SpectralField) -> Result<()> {
        let nu = self.consts.groups.reynolds;
        if nu == 0.0 {
            return Ok(());
        }
        let (lap_phi, lap_eta) = (self.laplacian(phi)?, self.laplacian(eta)?);
        for i in 0..phi.coeffs.len() {
            dphi.coeffs[i] += nu * lap_phi.coeffs[i] * self.mask[i];
            deta.coeffs[i] += nu * lap_eta.coeffs[i] * self.mask[i];
        }
        Ok(())
    }

    fn rhs_full(
        &self,
        phi: &SpectralField,
        eta: &SpectralField,
        t: f64,
        source: Option<[f64; 2]>,
    ) -> Result<(SpectralField, SpectralField)> {
        let (mut dphi, mut deta) = self.rhs_inviscid(phi, eta, t, source)?;
        self.add_viscous(phi, eta, &mut dphi, &mut deta)?;
        Ok((dphi, deta))
    }

    /// `(dφ̂/dt, dη̂/dt)` at the state's time, with the impact pressure
    /// included when the droplet is in contact.
    pub fn rhs_wave(&self, wave: &WaveState, droplet: Option<&DropletState>) -> Result<(SpectralField, SpectralField)> {
        let source = droplet.and_then(|d| {
            let tau = contact_phase(wave.t, self.cfg.impact_phase);
            (tau < self.cfg.contact_fraction).then_some(d.position)
        });
        self.rhs_full(&wave.phi, &wave.eta, wave.t, source)
    }

    pub fn surface_gradient(&self, eta: &SpectralField, p: [f64; 2]) -> Result<[f64; 2]> {
        match self.cfg.gradient {
            GradientMethod::Spectral => Ok(spectral::grad_at(eta, &self.basis, p)),
            GradientMethod::Bilinear => Ok(spectral::grad_bilinear(&self.fft.inverse(eta)?, &self.basis.grid, p)),
        }
    }

    /// Droplet acceleration: wave-slope forcing and contact drag while in
    /// contact, zero in flight.
    pub fn rhs_droplet(&self, droplet: &DropletState, eta: &SpectralField) -> Result<[f64; 2]> {
        let tau = droplet.phase;
        if tau >= self.cfg.contact_fraction {
            return Ok([0.0, 0.0]);
        }
        let grad = self.surface_gradient(eta, droplet.position)?;
        let drive = self.consts.slope_coupling();
        let drag = self.consts.contact_drag() * (4.0 * PI * tau).sin();
        Ok([
            -drive * grad[0] - drag * droplet.velocity[0],
            -drive * grad[1] - drag * droplet.velocity[1],
        ])
    }

    fn rk4(&self, wave: &mut WaveState, h: f64, source: Option<[f64; 2]>) -> Result<()> {
        let t = wave.t;
        let (p0, e0) = (&wave.phi, &wave.eta);
        let (k1p, k1e) = self.rhs_full(p0, e0, t, source)?;
        let stage = |base: &SpectralField, d: &SpectralField, a: f64| {
            let mut s = base.clone();
            s.axpy(a, d);
            s
        };
        let (k2p, k2e) = self.rhs_full(&stage(p0, &k1p, 0.5 * h), &stage(e0, &k1e, 0.5 * h), t + 0.5 * h, source)?;
        let (k3p, k3e) = self.rhs_full(&stage(p0, &k2p, 0.5 * h), &stage(e0, &k2e, 0.5 * h), t + 0.5 * h, source)?;
        let (k4p, k4e) = self.rhs_full(&stage(p0, &k3p, h), &stage(e0, &k3e, h), t + h, source)?;
        let w = h / 6.0;
        for (field, ks) in [(&mut wave.phi, [&k1p, &k2p, &k3p, &k4p]), (&mut wave.eta, [&k1e, &k2e, &k3e, &k4e])] {
            for i in 0..field.coeffs.len() {
                field.coeffs[i] += w * (ks[0].coeffs[i] + 2.0 * ks[1].coeffs[i] + 2.0 * ks[2].coeffs[i] + ks[3].coeffs[i]);
            }
        }
        wave.t = t + h;
        Ok(())
    }

    /// Leapfrog with the viscous terms folded into an integrating factor
    /// `E = exp(-ν λ h)`: `Y⁺ = E² Y⁻ + 2h E N(Y)`.
    fn leapfrog(&mut self, wave: &mut WaveState, h: f64, source: Option<[f64; 2]>) -> Result<()> {
        let Some((prev_phi, prev_eta)) = self.previous.take() else {
            let start = (wave.phi.clone(), wave.eta.clone());
            self.rk4(wave, h, source)?;
            self.previous = Some(start);
            return Ok(());
        };
        let (nphi, neta) = self.rhs_inviscid(&wave.phi, &wave.eta, wave.t, source)?;
        let nu = self.consts.groups.reynolds;
        let mut new_phi = prev_phi;
        let mut new_eta = prev_eta;
        for i in 0..new_phi.coeffs.len() {
            let e = (-nu * self.lap_symbol[i] * h).exp();
            new_phi.coeffs[i] = e * e * new_phi.coeffs[i] + 2.0 * h * e * nphi.coeffs[i];
            new_eta.coeffs[i] = e * e * new_eta.coeffs[i] + 2.0 * h * e * neta.coeffs[i];
        }
        let old_phi = std::mem::replace(&mut wave.phi, new_phi);
        let old_eta = std::mem::replace(&mut wave.eta, new_eta);
        self.previous = Some((old_phi, old_eta));
        wave.t += h;
        Ok(())
    }

    fn advance_wave(&mut self, wave: &mut WaveState, h: f64, source: Option<[f64; 2]>) -> Result<()> {
        match self.cfg.integrator {
            Integrator::Rk4 => self.rk4(wave, h, source),
            Integrator::Leapfrog => self.leapfrog(wave, h, source),
        }
    }

    /// Advances one sub-step `Δt'`.
    pub fn step(&mut self, wave: &mut WaveState, droplet: Option<&mut DropletState>) -> Result<()> {
        let dt = self.cfg.dt;
        let h = 0.5 * dt;
        let t0 = self.step_index as f64 * dt;
        wave.t = t0;
        let tau0 = contact_phase(t0, self.cfg.impact_phase);
        let grid = self.basis.grid;
        match droplet {
            Some(d) if tau0 < self.cfg.contact_fraction => {
                d.phase = tau0;
                d.in_contact = true;
                self.advance_wave(wave, h, Some(d.position))?;
                let tau_mid = contact_phase(t0 + h, self.cfg.impact_phase);
                let grad = self.surface_gradient(&wave.eta, d.position)?;
                let drive = self.consts.slope_coupling();
                let drag = self.consts.contact_drag() * (4.0 * PI * tau_mid).sin();
                for c in 0..2 {
                    d.velocity[c] = (d.velocity[c] - dt * drive * grad[c]) / (1.0 + dt * drag);
                }
                d.position = grid.wrap([d.position[0] + dt * d.velocity[0], d.position[1] + dt * d.velocity[1]]);
                self.advance_wave(wave, h, Some(d.position))?;
            }
            Some(d) => {
                d.phase = tau0;
                d.in_contact = false;
                self.advance_wave(wave, h, None)?;
                self.advance_wave(wave, h, None)?;
                d.position = grid.wrap([d.position[0] + dt * d.velocity[0], d.position[1] + dt * d.velocity[1]]);
            }
            None => {
                self.advance_wave(wave, h, None)?;
                self.advance_wave(wave, h, None)?;
            }
        }
        self.step_index += 1;
        wave.t = self.step_index as f64 * dt;
        if !(wave.eta.is_finite() && wave.phi.is_finite()) {
            return Err(Error::Numerical {
                t: wave.t,
                message: "non-finite wave field".into(),
            });
        }
        Ok(())
    }

    /// Quadratic wave energy `Σ (G + Bo λ)|η̂|² + (λ_DtN/μ)|φ̂|²` over the
    /// nonzero modes, with the flat-bed DtN symbol. Conserved by the
    /// unforced inviscid flat-bed system.
    pub fn energy(&self, wave: &WaveState) -> f64 {
        let g = &self.consts.groups;
        (1..self.basis.len())
            .map(|i| {
                let k = self.basis.kmag[i];
                (g.gravity + g.bond * self.lap_symbol[i]) * wave.eta.coeffs[i].norm_sqr()
                    + k * (g.mu * k).tanh() * wave.phi.coeffs[i].norm_sqr()
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtn::FlatDtn;
    use crate::params::{FluidParams, ForcingParams};

    pub(crate) fn constants(gamma: f64) -> ModelConstants {
        let fluid = FluidParams::from_dynamic_viscosity(965.0, 0.0209, 2e-2, 2.6e-7, 1.0);
        let forcing = ForcingParams {
            frequency: 80.0,
            gamma,
            gravity: 9.81,
        };
        ModelConstants::new(&fluid, &forcing, 6e-3).unwrap()
    }

    fn solver(n: usize, l: f64, cfg: StepConfig) -> WaveSolver {
        let basis = FourierBasis::new(Grid::new(l, n).unwrap());
        let consts = constants(0.0);
        let dtn = DtnModel::Flat(FlatDtn::new(&basis, consts.groups.mu, 1.0));
        WaveSolver::new(basis, consts, dtn, cfg).unwrap()
    }

    #[test]
    fn pulse_values() {
        let c = constants(0.0);
        assert_eq!(forcing_pulse(0.0, &c, 0.25), 0.0);
        let peak = 8.0 * PI * PI / (80.0 * c.scales.period);
        assert!((forcing_pulse(0.125, &c, 0.25) - peak).abs() < 1e-12 * peak);
        assert_eq!(forcing_pulse(0.5, &c, 0.25), 0.0);
    }

    #[test]
    fn rest_state_is_a_fixed_point() {
        let mut s = solver(16, 4.0, StepConfig::default());
        let mut w = WaveState::rest(16);
        let (dp, de) = s.rhs_wave(&w, None).unwrap();
        assert_eq!(dp.max_abs() + de.max_abs(), 0.0);
        for _ in 0..64 {
            s.step(&mut w, None).unwrap();
        }
        assert_eq!(w.eta.max_abs() + w.phi.max_abs(), 0.0);
        assert_eq!(w.t, 1.0);
    }

    #[test]
    fn impulse_at_origin_has_unit_phase() {
        let s = solver(16, 4.0, StepConfig::default());
        let d = s.impulse([0.0, 0.0]);
        let area = 16.0;
        for (i, c) in d.coeffs.iter().enumerate() {
            if s.basis().is_nyquist(i) {
                assert_eq!(c.norm(), 0.0);
            } else {
                assert!((c - Complex64::new(1.0 / area, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn flight_phase_keeps_velocity_bitwise() {
        let mut s = solver(16, 4.0, StepConfig::default());
        let mut w = WaveState::rest(16);
        let mut d = DropletState::new([1.0, 1.5], [0.013, -0.021]);
        for _ in 0..16 {
            s.step(&mut w, Some(&mut d)).unwrap();
        }
        let v = d.velocity;
        for _ in 0..48 {
            s.step(&mut w, Some(&mut d)).unwrap();
            assert!(!d.in_contact);
            assert_eq!(d.velocity, v);
        }
    }

    #[test]
    fn drag_decays_speed_on_a_flat_surface() {
        let s = solver(16, 4.0, StepConfig::default());
        let mut d = DropletState::new([1.0, 1.0], [0.1, 0.0]);
        d.phase = 0.1;
        let a = s.rhs_droplet(&d, &SpectralField::zeros(16)).unwrap();
        assert!(a[0] < 0.0 && a[1] == 0.0);
        d.phase = 0.6;
        assert_eq!(s.rhs_droplet(&d, &SpectralField::zeros(16)).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn cfl_bounds() {
        let grid = Grid::new(8.0, 32).unwrap();
        let c = constants(0.0);
        let mut cfg = StepConfig {
            dt: 1e-9,
            ..StepConfig::default()
        };
        assert!(cfl_check(&cfg, &grid, &c, 1.0).is_ok());
        cfg.dt = 10.0;
        assert!(!cfl_check(&cfg, &grid, &c, 1.0).is_ok());
        let limit = cfl_check(&cfg, &grid, &c, 1.0).limit();
        cfg.dt = limit * (1.0 - 1e-9);
        assert!(cfl_check(&cfg, &grid, &c, 1.0).is_ok());
        cfg.dt = limit * (1.0 + 1e-9);
        assert!(!cfl_check(&cfg, &grid, &c, 1.0).is_ok());
    }

    #[test]
    fn uneven_steps_are_rejected() {
        let basis = FourierBasis::new(Grid::new(4.0, 16).unwrap());
        let consts = constants(0.0);
        let dtn = DtnModel::Flat(FlatDtn::new(&basis, consts.groups.mu, 1.0));
        let cfg = StepConfig {
            dt: 0.3,
            ..StepConfig::default()
        };
        assert!(WaveSolver::new(basis, consts, dtn, cfg).is_err());
    }
}
