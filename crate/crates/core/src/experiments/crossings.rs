use std::collections::BTreeMap;

use super::CavityMap;
use crate::dynamics::TrajectoryRow;

/// Default debounce window, one Faraday period.
pub const DEBOUNCE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingEvent {
    /// Time of the first sample in the destination cavity.
    pub t: f64,
    pub from: u32,
    pub to: u32,
    pub position: [f64; 2],
    /// The two cavities do not share a barrier edge.
    pub diagonal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyStats {
    /// Sum of sample intervals over the run.
    pub total_time: f64,
    /// Time spent in each cavity, indexed by label − 1.
    pub dwell: Vec<f64>,
    pub fraction: Vec<f64>,
    /// Crossing counts per unordered cavity pair `(a, b)`, `a < b`.
    pub edges: BTreeMap<(u32, u32), usize>,
    pub crossings: usize,
    pub rate_per_minute: f64,
    /// Faraday period in seconds used for the rate conversion.
    pub period_seconds: f64,
}

/// Length of time each sample stands for: the gap to the next sample, and
/// for the last sample the gap before it.
pub fn sample_weights(rows: &[TrajectoryRow]) -> Vec<f64> {
    let n = rows.len();
    (0..n)
        .map(|i| {
            if i + 1 < n {
                rows[i + 1].t - rows[i].t
            } else if n >= 2 {
                rows[n - 1].t - rows[n - 2].t
            } else {
                0.0
            }
        })
        .collect()
}

/// Crossings with the default one-period debounce.
pub fn detect_crossings(rows: &[TrajectoryRow], map: &CavityMap) -> Vec<CrossingEvent> {
    detect_crossings_with(rows, map, DEBOUNCE)
}

/// Barrier samples (label 0) are ignored; the remaining samples are grouped
/// into visits of constant label, visits shorter than `debounce` are
/// dropped, and equal neighbours are merged. Every label change in what is
/// left is one crossing.
pub fn detect_crossings_with(rows: &[TrajectoryRow], map: &CavityMap, debounce: f64) -> Vec<CrossingEvent> {
    struct Visit {
        label: u32,
        first: usize,
        duration: f64,
    }
    let weights = sample_weights(rows);
    let mut visits: Vec<Visit> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if r.cavity == 0 {
            continue;
        }
        match visits.last_mut() {
            Some(v) if v.label == r.cavity => v.duration += weights[i],
            _ => visits.push(Visit {
                label: r.cavity,
                first: i,
                duration: weights[i],
            }),
        }
    }
    let mut kept: Vec<&Visit> = Vec::new();
    for v in visits.iter().filter(|v| v.duration >= debounce) {
        if kept.last().is_none_or(|k| k.label != v.label) {
            kept.push(v);
        }
    }
    kept.windows(2)
        .map(|w| {
            let r = &rows[w[1].first];
            CrossingEvent {
                t: r.t,
                from: w[0].label,
                to: w[1].label,
                position: [r.x, r.y],
                diagonal: !map.is_adjacent(w[0].label, w[1].label),
            }
        })
        .collect()
}

pub fn occupancy(rows: &[TrajectoryRow], map: &CavityMap, events: &[CrossingEvent], period_seconds: f64) -> OccupancyStats {
    let weights = sample_weights(rows);
    let total_time: f64 = weights.iter().sum();
    let mut dwell = vec![0.0; map.count as usize];
    for (r, w) in rows.iter().zip(&weights) {
        if r.cavity > 0 && r.cavity <= map.count {
            dwell[(r.cavity - 1) as usize] += w;
        }
    }
    let fraction = dwell
        .iter()
        .map(|d| if total_time > 0.0 { d / total_time } else { 0.0 })
        .collect();
    let mut edges = BTreeMap::new();
    for e in events {
        *edges.entry((e.from.min(e.to), e.from.max(e.to))).or_insert(0) += 1;
    }
    let minutes = total_time * period_seconds / 60.0;
    OccupancyStats {
        total_time,
        dwell,
        fraction,
        edges,
        crossings: events.len(),
        rate_per_minute: if minutes > 0.0 { events.len() as f64 / minutes } else { 0.0 },
        period_seconds,
    }
}
