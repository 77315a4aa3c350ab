//! Trajectory, crossing, stats and sweep tables as CSV.
//!
//! Floats use Rust's shortest round-trip formatting, so parsing a written
//! file reproduces every value bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::dynamics::TrajectoryRow;
use crate::error::{Error, Result};
use crate::experiments::{CavityMap, CrossingEvent, OccupancyStats, SweepTable};

pub const TRAJECTORY_HEADER: &str = "t,x,y,vx,vy,in_contact,cavity";

fn format_err(what: &str, line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Format(format!("{what} line {line}: {msg}"))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn format_trajectory(rows: &[TrajectoryRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{},{},{}", r.t, r.x, r.y, r.vx, r.vy, u8::from(r.in_contact), r.cavity);
    }
    out
}

pub fn parse_trajectory(text: &str) -> Result<Vec<TrajectoryRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == TRAJECTORY_HEADER => {}
        other => return Err(format_err("trajectory", 1, format!("expected header '{TRAJECTORY_HEADER}', got {other:?}"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(format_err("trajectory", i + 2, format!("expected 7 columns, got {}", cols.len())));
        }
        let f = |j: usize| cols[j].parse::<f64>().map_err(|e| format_err("trajectory", i + 2, e));
        rows.push(TrajectoryRow {
            t: f(0)?,
            x: f(1)?,
            y: f(2)?,
            vx: f(3)?,
            vy: f(4)?,
            in_contact: match cols[5] {
                "1" => true,
                "0" => false,
                v => return Err(format_err("trajectory", i + 2, format!("in_contact must be 0 or 1, got '{v}'"))),
            },
            cavity: cols[6].parse().map_err(|e| format_err("trajectory", i + 2, e))?,
        });
    }
    Ok(rows)
}

pub fn write_trajectory(rows: &[TrajectoryRow], path: &Path) -> Result<()> {
    write_text(path, &format_trajectory(rows))
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRow>> {
    parse_trajectory(&read_text(path)?)
}

pub fn format_crossings(events: &[CrossingEvent]) -> String {
    let mut out = String::from("t,from,to,x,y,diagonal\n");
    for e in events {
        let _ = writeln!(out, "{},{},{},{},{},{}", e.t, e.from, e.to, e.position[0], e.position[1], u8::from(e.diagonal));
    }
    out
}

/// Stats as `record,cavity,other,value` rows. `cavity`/`other` are empty
/// where they do not apply.
pub fn format_stats(stats: &OccupancyStats) -> String {
    let mut out = String::from("record,cavity,other,value\n");
    let _ = writeln!(out, "total_time,,,{}", stats.total_time);
    let _ = writeln!(out, "period_seconds,,,{}", stats.period_seconds);
    let _ = writeln!(out, "crossings,,,{}", stats.crossings);
    let _ = writeln!(out, "rate_per_minute,,,{}", stats.rate_per_minute);
    for (i, d) in stats.dwell.iter().enumerate() {
        let _ = writeln!(out, "dwell,{},,{}", i + 1, d);
    }
    for (i, f) in stats.fraction.iter().enumerate() {
        let _ = writeln!(out, "fraction,{},,{}", i + 1, f);
    }
    for ((a, b), c) in &stats.edges {
        let _ = writeln!(out, "edge,{a},{b},{c}");
    }
    out
}

pub fn parse_stats(text: &str) -> Result<OccupancyStats> {
    let mut stats = OccupancyStats {
        total_time: 0.0,
        dwell: Vec::new(),
        fraction: Vec::new(),
        edges: BTreeMap::new(),
        crossings: 0,
        rate_per_minute: 0.0,
        period_seconds: 0.0,
    };
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(format_err("stats", i + 1, "expected 4 columns"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| format_err("stats", i + 1, e));
        let int = |s: &str| s.parse::<usize>().map_err(|e| format_err("stats", i + 1, e));
        match cols[0] {
            "total_time" => stats.total_time = num(cols[3])?,
            "period_seconds" => stats.period_seconds = num(cols[3])?,
            "crossings" => stats.crossings = int(cols[3])?,
            "rate_per_minute" => stats.rate_per_minute = num(cols[3])?,
            "dwell" => stats.dwell.push(num(cols[3])?),
            "fraction" => stats.fraction.push(num(cols[3])?),
            "edge" => {
                stats.edges.insert((int(cols[1])? as u32, int(cols[2])? as u32), int(cols[3])?);
            }
            other => return Err(format_err("stats", i + 1, format!("unknown record '{other}'"))),
        }
    }
    Ok(stats)
}

/// Per-cavity dwell fractions at the cavity centroids, followed by the
/// edges with their crossing counts and widths relative to the busiest edge.
pub fn format_heatmap(stats: &OccupancyStats, map: &CavityMap) -> String {
    let mut out = String::from("kind,a,b,x,y,value\n");
    for (i, c) in map.centroids().iter().enumerate() {
        let f = stats.fraction.get(i).copied().unwrap_or(0.0);
        let _ = writeln!(out, "cavity,{},,{},{},{}", i + 1, c[0], c[1], f);
    }
    let busiest = stats.edges.values().copied().max().unwrap_or(0).max(1) as f64;
    let mut pairs: Vec<(u32, u32)> = map.adjacency.clone();
    for k in stats.edges.keys() {
        if !pairs.contains(k) {
            pairs.push(*k);
        }
    }
    for (a, b) in pairs {
        let count = stats.edges.get(&(a, b)).copied().unwrap_or(0);
        let _ = writeln!(out, "edge,{a},{b},,,{}", count as f64 / busiest);
    }
    out
}

pub fn format_sweep(table: &SweepTable) -> String {
    let mut out = format!("{},mean_speed,crossings,rate_per_minute,dwell_fractions,failure\n", table.axis);
    for r in &table.rows {
        let dwell: Vec<String> = r.dwell_fraction.iter().map(|f| f.to_string()).collect();
        let failure = r.failure.as_deref().unwrap_or("").replace([',', '\n'], ";");
        let _ = writeln!(out, "{},{},{},{},{},{}", r.value, r.mean_speed, r.crossings, r.rate_per_minute, dwell.join(";"), failure);
    }
    out
}
