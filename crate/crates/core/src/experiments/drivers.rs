use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dtn::{DtnModel, FlatDtn};
use crate::dynamics::{self, StepConfig, WaveSolver, WaveState};
use crate::error::{Error, Result};
use crate::io::config::{SimConfig, TopographyConfig};
use crate::params::ModelConstants;
use crate::spectral::{eval_at, FourierBasis, Grid, GridField};

/// Outcome of a single impact at the centre of a flat bath.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpactReport {
    /// Time of the final field, in Faraday periods.
    pub t: f64,
    /// `max |η − R η| / max |η|` with `R` the 90° rotation about the impact.
    pub asymmetry: f64,
    pub max_amplitude: f64,
    /// Radii of positive crests along the `+x` ray, beyond the central peak.
    pub crests: Vec<f64>,
    /// Distance between the first two crests, in Faraday wavelengths.
    pub crest_spacing: Option<f64>,
    pub no_wave: bool,
    pub eta: GridField,
}

/// Amplitudes below this are treated as an undisturbed surface.
const NO_WAVE: f64 = 1e-14;

/// Crests within this radius belong to the impact peak and are skipped.
const INNER_RADIUS: f64 = 0.25;

/// Runs one contact period at the grid centre and inspects the field after
/// `run.t_max` periods.
pub fn impact_test(config: &SimConfig) -> Result<ImpactReport> {
    if !matches!(config.topography, TopographyConfig::Flat { .. }) {
        return Err(Error::config("impact test needs a flat bottom"));
    }
    let centre = 0.5 * config.grid.length;
    let mut cfg = config.clone();
    cfg.droplet.position = [centre, centre];
    cfg.droplet.velocity = [0.0, 0.0];
    cfg.droplet.perturbation = 0.0;
    cfg.droplet.impacts = 1;
    cfg.run.snapshot_stride = 0;
    let art = dynamics::run(&cfg)?;
    if let Some(e) = art.failure {
        return Err(e);
    }
    let n = cfg.grid.n;
    let fft = crate::spectral::Fft2d::new(n);
    let eta = fft.inverse(&art.final_wave.eta)?;
    let max_amplitude = eta.max_abs();
    let no_wave = max_amplitude < NO_WAVE;

    let mut diff = 0.0f64;
    for iy in 0..n {
        for ix in 0..n {
            let (rx, ry) = ((n - iy) % n, ix);
            diff = diff.max((eta.values[iy * n + ix] - eta.values[ry * n + rx]).abs());
        }
    }
    let asymmetry = if no_wave { 0.0 } else { diff / max_amplitude };

    let crests = if no_wave {
        Vec::new()
    } else {
        let basis = FourierBasis::new(cfg.grid);
        radial_crests(&art.final_wave.eta, &basis, [centre, centre], 1e-3 * max_amplitude)
    };
    let crest_spacing = (crests.len() >= 2).then(|| crests[1] - crests[0]);
    Ok(ImpactReport {
        t: art.final_wave.t,
        asymmetry,
        max_amplitude,
        crests,
        crest_spacing,
        no_wave,
        eta,
    })
}

/// Positive local maxima of the band-limited field along the `+x` ray from
/// `origin`, refined by a parabola through the three bracketing samples.
fn radial_crests(eta: &crate::spectral::SpectralField, basis: &FourierBasis, origin: [f64; 2], floor: f64) -> Vec<f64> {
    let grid = basis.grid;
    let dr = grid.dx() / 8.0;
    let r_max = 0.5 * grid.length - grid.dx();
    let steps = (r_max / dr) as usize;
    let profile: Vec<f64> = (0..=steps).map(|i| eval_at(eta, basis, [origin[0] + i as f64 * dr, origin[1]])).collect();
    let mut out = Vec::new();
    for i in 1..steps {
        let (a, b, c) = (profile[i - 1], profile[i], profile[i + 1]);
        let r = i as f64 * dr;
        if r > INNER_RADIUS && b > floor && b > a && b >= c {
            let denom = a - 2.0 * b + c;
            let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            out.push(r + shift * dr);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeResult {
    pub mode: [i64; 2],
    pub k: f64,
    pub analytic: f64,
    pub measured: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionReport {
    pub modes: Vec<ModeResult>,
    pub max_rel_error: f64,
    /// First mode whose amplitude grew past ten times its initial value,
    /// with the growth factor reached.
    pub blowup: Option<([i64; 2], f64)>,
    pub note: Option<String>,
}

impl DispersionReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.blowup.is_none() && self.max_rel_error < tolerance
    }
}

/// Mode numbers probed by [`dispersion_test`]: ten distinct magnitudes up
/// to a third of the grid, cycling through the x, y and diagonal directions.
pub fn dispersion_modes(n: usize) -> Vec<[i64; 2]> {
    let top = (n / 3).max(10) as f64;
    (1..=10)
        .map(|j| {
            let m = ((j as f64 * top / 10.0).round() as i64).max(1);
            match j % 3 {
                0 => [m, 0],
                1 => [0, m],
                _ => {
                    let d = ((m as f64) / 2f64.sqrt()).round().max(1.0) as i64;
                    [d, d]
                }
            }
        })
        .collect()
}

/// Evolves single standing modes over a flat bed with no forcing, droplet
/// or damping and compares the zero-crossing frequency with
/// `Ω² = (G k + Bo k³) tanh(μ k)`.
pub fn dispersion_test(grid: Grid, consts: &ModelConstants, cfg: StepConfig, amplitude: f64) -> Result<DispersionReport> {
    let mut c = *consts;
    c.groups.gamma = 0.0;
    c.groups.reynolds = 0.0;
    let basis = FourierBasis::new(grid);
    if amplitude == 0.0 {
        return Ok(DispersionReport {
            modes: Vec::new(),
            max_rel_error: 0.0,
            blowup: None,
            note: Some("no oscillation: zero amplitude".into()),
        });
    }
    let mut modes = Vec::new();
    let spp = cfg
        .steps_per_period()
        .ok_or_else(|| Error::config("time step must divide one Faraday period evenly"))?;
    for mode in dispersion_modes(grid.n) {
        let idx = basis.index_of(mode);
        let conj = basis.conjugate_index(idx);
        let k = basis.kmag[idx];
        let analytic = c.groups.dispersion_omega2(k, 1.0).sqrt();
        let periods = ((4.0 * 2.0 * PI / analytic).ceil() as u64).max(2);
        let dtn = DtnModel::Flat(FlatDtn::new(&basis, c.groups.mu, 1.0));
        let mut solver = WaveSolver::new(basis.clone(), c, dtn, cfg)?;
        let mut wave = WaveState::rest(grid.n);
        wave.eta.coeffs[idx] = Complex64::new(0.5 * amplitude, 0.0);
        wave.eta.coeffs[conj] = Complex64::new(0.5 * amplitude, 0.0);
        let mut prev = (0.0, wave.eta.coeffs[idx].re);
        let mut crossings = Vec::new();
        for _ in 0..periods * spp {
            solver.step(&mut wave, None)?;
            let a = wave.eta.coeffs[idx].re;
            let growth = wave.eta.coeffs[idx].norm() / (0.5 * amplitude);
            if growth > 10.0 || !growth.is_finite() {
                return Ok(DispersionReport {
                    max_rel_error: f64::INFINITY,
                    modes,
                    blowup: Some((mode, growth)),
                    note: Some(format!(
                        "mode {mode:?} grew by {growth:.3e} within {:.3} periods: DtN sign is inconsistent with the dispersion relation",
                        wave.t
                    )),
                });
            }
            if prev.1 != 0.0 && (a == 0.0 || a.signum() != prev.1.signum()) {
                crossings.push(prev.0 + (wave.t - prev.0) * prev.1 / (prev.1 - a));
            }
            prev = (wave.t, a);
        }
        if crossings.len() < 3 {
            return Err(Error::Numerical {
                t: wave.t,
                message: format!("mode {mode:?} did not oscillate"),
            });
        }
        let half = (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;
        let measured = PI / half;
        modes.push(ModeResult {
            mode,
            k,
            analytic,
            measured,
            rel_error: (measured - analytic).abs() / analytic,
        });
    }
    let max_rel_error = modes.iter().fold(0.0f64, |m, r| m.max(r.rel_error));
    Ok(DispersionReport {
        modes,
        max_rel_error,
        blowup: None,
        note: None,
    })
}
