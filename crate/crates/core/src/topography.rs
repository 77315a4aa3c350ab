//! Nondimensional bath depth fields on the periodic square.
//!
//! Depth is positive downward and measured in units of the reference depth,
//! so `H = 1` is the depth used to define `μ`.

use crate::error::{Error, Result};
use crate::spectral::{Fft2d, FourierBasis, GridField};

pub use crate::spectral::Grid;

/// Tail ratio above which a depth field is considered under-resolved.
pub const TAIL_WARNING_THRESHOLD: f64 = 1e-3;

/// Rectangular array of square wells separated by shallow barriers.
/// Lengths are in Faraday wavelengths, depths relative to the reference depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySpec {
    pub rows: usize,
    pub cols: usize,
    pub well_width: f64,
    pub barrier_width: f64,
    pub deep_depth: f64,
    pub shallow_depth: f64,
    /// Width of the tanh transition at each wall; zero gives sharp walls.
    pub smoothing: f64,
}

impl CavitySpec {
    /// Side length of the block of wells and the barriers between them.
    pub fn extent(&self) -> [f64; 2] {
        let span = |count: usize| count as f64 * self.well_width + (count.saturating_sub(1)) as f64 * self.barrier_width;
        [span(self.cols), span(self.rows)]
    }

    /// Centres of the wells, row-major from the bottom-left, for a domain of
    /// side `length`.
    pub fn centres(&self, length: f64) -> Vec<[f64; 2]> {
        let pitch = self.well_width + self.barrier_width;
        let mut out = Vec::with_capacity(self.rows * self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.push([
                    0.5 * length + (c as f64 - 0.5 * (self.cols as f64 - 1.0)) * pitch,
                    0.5 * length + (r as f64 - 0.5 * (self.rows as f64 - 1.0)) * pitch,
                ]);
            }
        }
        out
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::config("cavity layout needs at least one row and one column"));
        }
        if !(self.shallow_depth > 0.0) {
            return Err(Error::config("shallow_depth must be positive"));
        }
        if !(self.deep_depth > self.shallow_depth) {
            return Err(Error::config("deep_depth must exceed shallow_depth"));
        }
        if !(self.well_width > 0.0) {
            return Err(Error::config("well_width must be positive"));
        }
        if self.barrier_width < 0.0 {
            return Err(Error::config("barrier_width must be non-negative"));
        }
        if self.barrier_width == 0.0 && (self.rows > 1 || self.cols > 1) {
            return Err(Error::config("wells overlap: barrier_width must be positive for multi-well layouts"));
        }
        if self.smoothing < 0.0 {
            return Err(Error::config("smoothing width must be non-negative"));
        }
        let [ex, ey] = self.extent();
        let margin = grid.dx().max(self.smoothing);
        if ex + 2.0 * margin > grid.length || ey + 2.0 * margin > grid.length {
            return Err(Error::config(format!(
                "cavity block {ex:.3} x {ey:.3} does not fit in a domain of side {} with margin {margin:.3}",
                grid.length
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TopographySource {
    Flat { depth: f64 },
    Cavities(CavitySpec),
    Imported,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topography {
    pub grid: Grid,
    pub depth: GridField,
    pub source: TopographySource,
}

impl Topography {
    pub fn from_field(grid: Grid, depth: GridField) -> Result<Self> {
        if depth.n != grid.n || depth.values.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                found: depth.values.len(),
            });
        }
        if let Some(v) = depth.values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::config(format!("topography has a dry or invalid point (depth {v})")));
        }
        Ok(Topography {
            grid,
            depth,
            source: TopographySource::Imported,
        })
    }

    pub fn min_depth(&self) -> f64 {
        self.depth.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_depth(&self) -> f64 {
        self.depth.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_flat(&self) -> bool {
        self.max_depth() - self.min_depth() == 0.0
    }

    /// Largest centred-difference slope magnitude.
    pub fn max_slope(&self) -> f64 {
        let n = self.grid.n;
        let dx = self.grid.dx();
        let h = &self.depth.values;
        let mut best = 0.0f64;
        for iy in 0..n {
            for ix in 0..n {
                let gx = (h[iy * n + (ix + 1) % n] - h[iy * n + (ix + n - 1) % n]) / (2.0 * dx);
                let gy = (h[((iy + 1) % n) * n + ix] - h[((iy + n - 1) % n) * n + ix]) / (2.0 * dx);
                best = best.max(gx.hypot(gy));
            }
        }
        best
    }
}

pub fn flat(grid: Grid, depth: f64) -> Result<Topography> {
    if !(depth > 0.0 && depth.is_finite()) {
        return Err(Error::config(format!("flat depth must be positive (got {depth})")));
    }
    Ok(Topography {
        grid,
        depth: GridField {
            n: grid.n,
            values: vec![depth; grid.len()],
        },
        source: TopographySource::Flat { depth },
    })
}

/// Smooth indicator of `|d| < half`, with transition width `s`; `s = 0`
/// gives the sharp indicator.
fn ramp(d: f64, half: f64, s: f64) -> f64 {
    if s == 0.0 {
        if d.abs() < half {
            1.0
        } else {
            0.0
        }
    } else {
        0.5 * ((2.0 * (d + half) / s).tanh() - (2.0 * (d - half) / s).tanh())
    }
}

fn periodic_offset(x: f64, centre: f64, length: f64) -> f64 {
    let d = (x - centre).rem_euclid(length);
    if d >= 0.5 * length {
        d - length
    } else {
        d
    }
}

/// Wells at `deep_depth` separated by barriers and surrounded by an exterior
/// at `shallow_depth`, blended by products of tanh ramps along each axis.
pub fn cavities(grid: Grid, spec: CavitySpec) -> Result<Topography> {
    spec.validate(&grid)?;
    let centres = spec.centres(grid.length);
    let half = 0.5 * spec.well_width;
    let l = grid.length;
    let depth = grid.sample(|x, y| {
        let cover: f64 = centres
            .iter()
            .map(|c| {
                ramp(periodic_offset(x, c[0], l), half, spec.smoothing) * ramp(periodic_offset(y, c[1], l), half, spec.smoothing)
            })
            .sum();
        spec.shallow_depth + (spec.deep_depth - spec.shallow_depth) * cover
    });
    Ok(Topography {
        grid,
        depth,
        source: TopographySource::Cavities(spec),
    })
}

/// Fraction of the depth-fluctuation energy carried by the top third of
/// wavenumbers (`‖k‖ > 2/3` of the axis Nyquist wavenumber).
pub fn spectral_quality(topo: &Topography) -> f64 {
    let basis = FourierBasis::new(topo.grid);
    let fft = Fft2d::new(topo.grid.n);
    let spec = fft.forward(&topo.depth).expect("grid sizes agree");
    let cutoff = 2.0 / 3.0 * basis.axis[topo.grid.n / 2].abs();
    let mut total = 0.0;
    let mut tail = 0.0;
    for (i, c) in spec.coeffs.iter().enumerate().skip(1) {
        let e = c.norm_sqr();
        total += e;
        if basis.kmag[i] > cutoff {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}
