use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{detect_crossings, occupancy};
use crate::dynamics;
use crate::error::{Error, Result};
use crate::io::config::SimConfig;

/// Window (in Faraday periods) over which the sweep averages droplet speed.
pub const SPEED_WINDOW: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Gamma,
    WellWidth,
    BarrierWidth,
    /// Shallow depth as a fraction of the deep depth.
    DepthRatio,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" => Ok(SweepAxis::Gamma),
            "well_width" => Ok(SweepAxis::WellWidth),
            "barrier_width" => Ok(SweepAxis::BarrierWidth),
            "depth_ratio" => Ok(SweepAxis::DepthRatio),
            _ => Err(Error::config(format!(
                "unknown sweep axis '{s}' (expected gamma, well_width, barrier_width or depth_ratio)"
            ))),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Gamma => "gamma",
            SweepAxis::WellWidth => "well_width",
            SweepAxis::BarrierWidth => "barrier_width",
            SweepAxis::DepthRatio => "depth_ratio",
        })
    }
}

impl SweepAxis {
    pub fn apply(&self, base: &SimConfig, value: f64) -> Result<SimConfig> {
        let v = format!("{value}");
        match self {
            SweepAxis::Gamma => base.with_override("forcing.gamma", &v),
            SweepAxis::WellWidth => base.with_override("cavity.well_width", &v),
            SweepAxis::BarrierWidth => base.with_override("cavity.barrier_width", &v),
            SweepAxis::DepthRatio => {
                let deep: f64 = base.value("cavity.deep_depth").unwrap_or("1").parse().map_err(|_| Error::config("bad cavity.deep_depth"))?;
                base.with_override("cavity.shallow_depth", &format!("{}", deep * value))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub mean_speed: f64,
    pub crossings: usize,
    pub rate_per_minute: f64,
    pub dwell_fraction: Vec<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: SweepAxis,
    /// Sorted by value.
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Value with the highest crossing rate, if it lies strictly inside the
    /// swept range and beats both end points.
    pub fn interior_max(&self) -> Option<f64> {
        let rows = &self.rows;
        if rows.len() < 3 {
            return None;
        }
        let (best, row) = rows
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.rate_per_minute.total_cmp(&b.1.rate_per_minute))?;
        let inside = best > 0 && best + 1 < rows.len();
        (inside && row.rate_per_minute > rows[0].rate_per_minute && row.rate_per_minute > rows[rows.len() - 1].rate_per_minute)
            .then_some(row.value)
    }
}

/// One run per value, all with the base seed. Runs execute in parallel;
/// a failing run is recorded in its row and the sweep continues.
pub fn sweep(base: &SimConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepTable> {
    let mut values = values.to_vec();
    values.sort_by(f64::total_cmp);
    let configs = values.iter().map(|&v| axis.apply(base, v)).collect::<Result<Vec<_>>>()?;
    let rows = values
        .par_iter()
        .zip(configs.par_iter())
        .map(|(&value, cfg)| sweep_point(value, cfg))
        .collect();
    Ok(SweepTable { axis, rows })
}

fn sweep_point(value: f64, cfg: &SimConfig) -> SweepRow {
    let art = match dynamics::run(cfg) {
        Ok(a) => a,
        Err(e) => {
            return SweepRow {
                value,
                mean_speed: f64::NAN,
                crossings: 0,
                rate_per_minute: f64::NAN,
                dwell_fraction: Vec::new(),
                failure: Some(e.to_string()),
            }
        }
    };
    let events = detect_crossings(&art.trajectory, &art.cavities);
    let stats = occupancy(&art.trajectory, &art.cavities, &events, art.constants.scales.period);
    SweepRow {
        value,
        mean_speed: art.mean_speed(SPEED_WINDOW),
        crossings: stats.crossings,
        rate_per_minute: stats.rate_per_minute,
        dwell_fraction: stats.fraction,
        failure: art.failure.map(|e| e.to_string()),
    }
}
