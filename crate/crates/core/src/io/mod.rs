//! Configuration files and run artifacts on disk.

pub mod config;
pub mod csv;
pub mod snapshot;

use std::path::Path;

use num_complex::Complex64;

use crate::dtn::{DtnModel, DtnOperator, FlatDtn};
use crate::dynamics::RunArtifacts;
use crate::error::{Error, Result};
use crate::experiments::{detect_crossings, occupancy, CrossingEvent, OccupancyStats};
use crate::spectral::{Fft2d, FourierBasis, SpectralField};
use crate::topography::Topography;

pub use config::SimConfig;
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes a complete run directory:
///
/// ```text
/// resolved.cfg  trajectory.csv  events.log  crossings.csv  stats.csv
/// heatmap.csv   topography.pwf  snapshots/snap_NNNNNN.pwf  [dtn.pwf]
/// ```
pub fn write_run(dir: &Path, config: &SimConfig, art: &RunArtifacts) -> Result<(Vec<CrossingEvent>, OccupancyStats)> {
    let snaps = dir.join("snapshots");
    std::fs::create_dir_all(&snaps).map_err(|e| Error::io(&snaps, e))?;
    write(&dir.join("resolved.cfg"), &config.resolved_text())?;
    csv::write_trajectory(&art.trajectory, &dir.join("trajectory.csv"))?;
    let mut log = art.events.join("\n");
    log.push('\n');
    let events = detect_crossings(&art.trajectory, &art.cavities);
    for e in &events {
        log.push_str(&format!(
            "t={} crossing {} -> {}{}\n",
            e.t,
            e.from,
            e.to,
            if e.diagonal { " (diagonal)" } else { "" }
        ));
    }
    write(&dir.join("events.log"), &log)?;
    write(&dir.join("crossings.csv"), &csv::format_crossings(&events))?;
    let stats = occupancy(&art.trajectory, &art.cavities, &events, art.constants.scales.period);
    write(&dir.join("stats.csv"), &csv::format_stats(&stats))?;
    write(&dir.join("heatmap.csv"), &csv::format_heatmap(&stats, &art.cavities))?;
    snapshot::write_topography(&dir.join("topography.pwf"), &art.topography)?;
    for (i, rec) in art.snapshots.iter().enumerate() {
        let path = snaps.join(format!("snap_{i:06}.pwf"));
        snapshot::write_snapshot(&path, &Snapshot::from_record(&config.grid, rec))?;
    }
    if config.export_dtn {
        snapshot::write_snapshot(&dir.join("dtn.pwf"), &dtn_response(config, &art.topography)?)?;
    }
    Ok((events, stats))
}

/// DtN of the first few unit cosine modes, one real-space field per mode,
/// named `dtn_<mx>_<my>`.
pub fn dtn_response(config: &SimConfig, topo: &Topography) -> Result<Snapshot> {
    let basis = FourierBasis::new(config.grid);
    let mu = config.constants()?.groups.mu;
    let model = if topo.is_flat() {
        DtnModel::Flat(FlatDtn::new(&basis, mu, topo.min_depth()))
    } else {
        DtnModel::Variable(Box::new(DtnOperator::assemble(topo, &basis, mu, config.galerkin_radius)?))
    };
    let fft = Fft2d::new(config.grid.n);
    let mut fields = Vec::new();
    for m in [[1, 0], [0, 1], [1, 1], [2, 0], [3, 1]] {
        let mut q = SpectralField::zeros(config.grid.n);
        let i = basis.index_of(m);
        q.coeffs[i] = Complex64::new(0.5, 0.0);
        q.coeffs[basis.conjugate_index(i)] = Complex64::new(0.5, 0.0);
        let out = fft.inverse(&model.apply(&q)?)?;
        fields.push((format!("dtn_{}_{}", m[0], m[1]), out.values));
    }
    Ok(Snapshot {
        n: config.grid.n as u32,
        length: config.grid.length,
        t: 0.0,
        fields,
    })
}
