//! Dimensional fluid and forcing parameters, Faraday scales and the
//! nondimensional groups that drive the wave and droplet equations.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Fluid and droplet constants, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidParams {
    /// kg/m³
    pub density: f64,
    /// N/m
    pub surface_tension: f64,
    /// m²/s
    pub kinematic_viscosity: f64,
    /// kg
    pub drop_mass: f64,
    /// Dimensionless drag constant `c` of the droplet trajectory equation.
    pub drop_damping: f64,
}

impl FluidParams {
    /// Builds the parameter set from a dynamic viscosity (Pa·s), converting
    /// it with `ν = μ / ρ`.
    pub fn from_dynamic_viscosity(
        density: f64,
        surface_tension: f64,
        dynamic_viscosity: f64,
        drop_mass: f64,
        drop_damping: f64,
    ) -> Self {
        FluidParams {
            density,
            surface_tension,
            kinematic_viscosity: dynamic_viscosity / density,
            drop_mass,
            drop_damping,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcingParams {
    /// Shaker frequency in Hz.
    pub frequency: f64,
    /// Peak shaker acceleration divided by gravity, `Γ = γ / g`.
    pub gamma: f64,
    /// m/s²
    pub gravity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaradayScales {
    /// Faraday period in seconds (twice the forcing period).
    pub period: f64,
    /// Faraday wavelength in metres.
    pub wavelength: f64,
    /// Faraday wavenumber `2π / λ_F` in 1/m.
    pub wavenumber: f64,
}

/// Nondimensional groups of the wave/droplet system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondimGroups {
    /// `h / λ_F`
    pub mu: f64,
    /// `g T_F² / λ_F`
    pub gravity: f64,
    /// `σ T_F² / (ρ λ_F³)`
    pub bond: f64,
    /// `2 ν T_F / λ_F²`, the viscous coefficient multiplying the horizontal
    /// Laplacian in both surface equations.
    pub reynolds: f64,
    /// `m / (ρ λ_F³)`
    pub mass: f64,
    pub gamma: f64,
    pub damping: f64,
}

impl NondimGroups {
    /// Squared angular frequency (radians per Faraday period) of a free
    /// surface mode with nondimensional wavenumber `k` over a flat bed of
    /// relative depth `depth`.
    pub fn dispersion_omega2(&self, k: f64, depth: f64) -> f64 {
        (self.gravity * k + self.bond * k * k * k) * (self.mu * k * depth).tanh()
    }
}

/// Everything the time stepper needs: the nondimensional groups plus the
/// dimensional constants that appear verbatim in the droplet equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConstants {
    pub groups: NondimGroups,
    pub scales: FaradayScales,
    /// Shaker frequency in Hz.
    pub frequency: f64,
    /// m/s²
    pub gravity: f64,
}

impl ModelConstants {
    pub fn new(fluid: &FluidParams, forcing: &ForcingParams, mean_depth: f64) -> Result<Self> {
        let scales = faraday_scales(fluid, forcing, mean_depth)?;
        let groups = nondim_groups(fluid, forcing, &scales, mean_depth)?;
        Ok(ModelConstants {
            groups,
            scales,
            frequency: forcing.frequency,
            gravity: forcing.gravity,
        })
    }

    /// Amplitude of the impact pressure pulse, `8π² / (ω T_F)`.
    pub fn pulse_amplitude(&self) -> f64 {
        8.0 * PI * PI / (self.frequency * self.scales.period)
    }

    /// Coefficient of the wave-slope term in the droplet equation,
    /// `8 T_F g π² / (λ_F ω)`.
    pub fn slope_coupling(&self) -> f64 {
        8.0 * self.scales.period * self.gravity * PI * PI / (self.scales.wavelength * self.frequency)
    }

    /// Coefficient of the contact drag term, `8 c g π² / ω`.
    pub fn contact_drag(&self) -> f64 {
        8.0 * self.groups.damping * self.gravity * PI * PI / self.frequency
    }
}

fn dispersion_residual(k: f64, fluid: &FluidParams, forcing: &ForcingParams, depth: f64) -> f64 {
    let target = (PI * forcing.frequency).powi(2);
    let rhs = (forcing.gravity * k + fluid.surface_tension * k.powi(3) / fluid.density) * (k * depth).tanh();
    rhs - target
}

/// Faraday period and wavelength for a subharmonic response at half the
/// shaker frequency. The wavenumber is the positive root of the finite-depth
/// gravity-capillary dispersion relation `(π f)² = (g k + σ k³ / ρ) tanh(k h)`.
pub fn faraday_scales(fluid: &FluidParams, forcing: &ForcingParams, mean_depth: f64) -> Result<FaradayScales> {
    let positive = [
        ("frequency", forcing.frequency),
        ("gravity", forcing.gravity),
        ("density", fluid.density),
        ("mean_depth", mean_depth),
    ];
    for (name, value) in positive {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::config(format!("{name} must be positive (got {value})")));
        }
    }
    if !(fluid.surface_tension >= 0.0 && fluid.surface_tension.is_finite()) {
        return Err(Error::config("surface_tension must be non-negative"));
    }

    // residual is strictly increasing in k with value -(πf)² at k = 0
    let mut lo = 0.0;
    let mut hi = (PI * forcing.frequency).powi(2) / forcing.gravity;
    let mut expansions = 0;
    while dispersion_residual(hi, fluid, forcing, mean_depth) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 200 || !hi.is_finite() {
            return Err(Error::config(format!(
                "no Faraday wavenumber found; check frequency = {} Hz and mean_depth = {} m",
                forcing.frequency, mean_depth
            )));
        }
    }
    while (hi - lo) > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if dispersion_residual(mid, fluid, forcing, mean_depth) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    Ok(FaradayScales {
        period: 2.0 / forcing.frequency,
        wavelength: 2.0 * PI / k,
        wavenumber: k,
    })
}

pub fn nondim_groups(
    fluid: &FluidParams,
    forcing: &ForcingParams,
    scales: &FaradayScales,
    mean_depth: f64,
) -> Result<NondimGroups> {
    let report = validate(fluid, forcing, mean_depth, None);
    if let Some(e) = report.errors.first() {
        return Err(Error::config(e.clone()));
    }
    let lf = scales.wavelength;
    let tf = scales.period;
    Ok(NondimGroups {
        mu: mean_depth / lf,
        gravity: forcing.gravity * tf * tf / lf,
        bond: fluid.surface_tension * tf * tf / (fluid.density * lf.powi(3)),
        reynolds: 2.0 * fluid.kinematic_viscosity * tf / (lf * lf),
        mass: fluid.drop_mass / (fluid.density * lf.powi(3)),
        gamma: forcing.gamma,
        damping: fluid.drop_damping,
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.errors.extend(other.errors);
        self.warnings.extend(other.warnings);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Checks physical parameters. `threshold_hint` is a user-supplied estimate
/// of the Faraday threshold `Γ_F`; forcing above it is reported as a warning.
pub fn validate(
    fluid: &FluidParams,
    forcing: &ForcingParams,
    mean_depth: f64,
    threshold_hint: Option<f64>,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut positive = |name: &str, v: f64| {
        if !(v > 0.0 && v.is_finite()) {
            report.errors.push(format!("{name} must be positive"));
        }
    };
    positive("density", fluid.density);
    positive("surface tension", fluid.surface_tension);
    positive("kinematic viscosity", fluid.kinematic_viscosity);
    positive("drop mass", fluid.drop_mass);
    positive("drop damping", fluid.drop_damping);
    positive("frequency", forcing.frequency);
    positive("gravity", forcing.gravity);
    positive("mean depth", mean_depth);
    if !(forcing.gamma >= 0.0 && forcing.gamma.is_finite()) {
        report.errors.push("forcing amplitude gamma must be non-negative".into());
    }
    if let Some(threshold) = threshold_hint {
        if forcing.gamma > threshold {
            report.warnings.push(format!(
                "supercritical forcing: gamma = {} exceeds the Faraday threshold hint {}",
                forcing.gamma, threshold
            ));
        }
    }
    report
}
